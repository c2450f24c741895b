//! Tagging-quality statistics: per-document classes, a tag-count histogram
//! with a collapsed `25+` bucket, and class percentages over tagged
//! documents.

use std::fmt::Write as _;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::apply::TagAssignment;
use crate::error::{Error, Result};

pub const UNDER_TAGGED_MAX: usize = 3;
pub const SUFFICIENT_MAX: usize = 20;
/// Counts above this share a single histogram bucket.
pub const HISTOGRAM_MAX: usize = 25;
pub const OVERFLOW_BUCKET: &str = "25+";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TagClass {
    Untagged,
    UnderTagged,
    SufficientlyTagged,
    OverTagged,
}

impl TagClass {
    pub const ALL: [TagClass; 4] = [
        TagClass::Untagged,
        TagClass::UnderTagged,
        TagClass::SufficientlyTagged,
        TagClass::OverTagged,
    ];

    pub fn color(self) -> &'static str {
        match self {
            TagClass::Untagged => "none",
            TagClass::UnderTagged => "under",
            TagClass::SufficientlyTagged => "sufficient",
            TagClass::OverTagged => "over",
        }
    }
}

pub fn classify(tag_count: usize) -> TagClass {
    match tag_count {
        0 => TagClass::Untagged,
        1..=UNDER_TAGGED_MAX => TagClass::UnderTagged,
        c if c <= SUFFICIENT_MAX => TagClass::SufficientlyTagged,
        _ => TagClass::OverTagged,
    }
}

pub fn bucket_label(tag_count: usize) -> Option<String> {
    match tag_count {
        0 => None,
        c if c > HISTOGRAM_MAX => Some(OVERFLOW_BUCKET.to_string()),
        c => Some(c.to_string()),
    }
}

/// Percentages over tagged documents, one decimal place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassPercentages {
    pub under_tagged: Option<f64>,
    pub sufficiently_tagged: Option<f64>,
    pub over_tagged: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggingReport {
    pub total_documents: usize,
    pub tagged_documents: usize,
    /// Buckets `"1"` to `"25"` then `"25+"`, always all present.
    pub histogram: IndexMap<String, usize>,
    pub class_counts: IndexMap<TagClass, usize>,
    pub class_percentages: ClassPercentages,
    pub min_tags: Option<usize>,
    pub max_tags: Option<usize>,
    /// Most frequent tag count among tagged documents; ties go to the
    /// smallest count.
    pub mode_tags: Option<usize>,
}

/// `100 * part / whole` rounded half-up to one decimal, in exact integer
/// arithmetic.
pub fn percent_one_decimal(part: usize, whole: usize) -> Option<f64> {
    if whole == 0 {
        return None;
    }
    let (part, whole) = (part as u128, whole as u128);
    let tenths = (2 * 1000 * part + whole) / (2 * whole);
    Some(tenths as f64 / 10.0)
}

fn empty_histogram() -> IndexMap<String, usize> {
    (1..=HISTOGRAM_MAX)
        .map(|c| c.to_string())
        .chain(std::iter::once(OVERFLOW_BUCKET.to_string()))
        .map(|label| (label, 0))
        .collect()
}

impl TaggingReport {
    pub fn from_counts(counts: impl IntoIterator<Item = usize>) -> Self {
        let mut histogram = empty_histogram();
        let mut class_counts: IndexMap<TagClass, usize> =
            TagClass::ALL.iter().map(|&c| (c, 0)).collect();
        let mut exact: std::collections::BTreeMap<usize, usize> = Default::default();
        let mut total = 0;
        for count in counts {
            total += 1;
            class_counts[&classify(count)] += 1;
            if let Some(label) = bucket_label(count) {
                histogram[&label] += 1;
                *exact.entry(count).or_insert(0) += 1;
            }
        }
        let tagged = total - class_counts[&TagClass::Untagged];
        let pct = |class| percent_one_decimal(class_counts[&class], tagged);
        let mode_tags = exact
            .iter()
            .fold(None, |best: Option<(usize, usize)>, (&c, &n)| match best {
                Some((_, bn)) if bn >= n => best,
                _ => Some((c, n)),
            })
            .map(|(c, _)| c);
        TaggingReport {
            total_documents: total,
            tagged_documents: tagged,
            histogram,
            class_percentages: ClassPercentages {
                under_tagged: pct(TagClass::UnderTagged),
                sufficiently_tagged: pct(TagClass::SufficientlyTagged),
                over_tagged: pct(TagClass::OverTagged),
            },
            class_counts,
            min_tags: exact.keys().next().copied(),
            max_tags: exact.keys().next_back().copied(),
            mode_tags,
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

pub fn build_report(assignments: &[TagAssignment]) -> TaggingReport {
    TaggingReport::from_counts(assignments.iter().map(TagAssignment::tag_count))
}

/// Histogram rows as `bucket,count,class_color`.
pub fn emit_histogram_csv(report: &TaggingReport) -> String {
    let mut out = String::from("bucket,count,class_color\n");
    for (label, count) in &report.histogram {
        let class = if label == OVERFLOW_BUCKET {
            TagClass::OverTagged
        } else {
            classify(label.parse().expect("numeric bucket label"))
        };
        writeln!(out, "{label},{count},{}", class.color()).unwrap();
    }
    out
}
