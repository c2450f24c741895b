//! Local stand-in for a keyword-extraction service.
#![allow(dead_code)]

use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;

use tiny_http::{Header, Response, Server};

#[derive(Debug, Clone)]
pub struct SeenRequest {
    pub body: String,
    pub authorization: Option<String>,
}

pub struct MockService {
    server: Arc<Server>,
    port: u16,
    pub hits: Arc<AtomicUsize>,
    seen: Arc<Mutex<Vec<SeenRequest>>>,
}

impl MockService {
    /// `respond(body) -> (status, response body)`.
    pub fn start<F>(respond: F) -> Self
    where
        F: Fn(&str) -> (u16, String) + Send + Sync + 'static,
    {
        let server = Arc::new(Server::http("127.0.0.1:0").expect("bind mock service"));
        let port = server.server_addr().to_ip().unwrap().port();
        let hits = Arc::new(AtomicUsize::new(0));
        let seen = Arc::new(Mutex::new(Vec::new()));
        let respond = Arc::new(respond);
        for _ in 0..4 {
            let (server, hits, seen, respond) =
                (server.clone(), hits.clone(), seen.clone(), respond.clone());
            thread::spawn(move || {
                for mut request in server.incoming_requests() {
                    hits.fetch_add(1, Ordering::SeqCst);
                    let mut body = String::new();
                    request.as_reader().read_to_string(&mut body).unwrap();
                    let authorization = request
                        .headers()
                        .iter()
                        .find(|h| h.field.equiv("Authorization"))
                        .map(|h| h.value.to_string());
                    seen.lock().unwrap().push(SeenRequest {
                        body: body.clone(),
                        authorization,
                    });
                    let (status, text) = respond(&body);
                    let header = Header::from_bytes("Content-Type", "application/json").unwrap();
                    let _ = request.respond(
                        Response::from_string(text)
                            .with_status_code(status)
                            .with_header(header),
                    );
                }
            });
        }
        MockService {
            server,
            port,
            hits,
            seen,
        }
    }

    /// Replies with `script` in order, repeating the last entry.
    pub fn start_sequence(script: Vec<(u16, String)>) -> Self {
        let counter = AtomicUsize::new(0);
        Self::start(move |_| {
            let i = counter.fetch_add(1, Ordering::SeqCst).min(script.len() - 1);
            script[i].clone()
        })
    }

    pub fn url(&self) -> String {
        format!("http://127.0.0.1:{}/v1/analyze", self.port)
    }

    pub fn requests(&self) -> Vec<SeenRequest> {
        self.seen.lock().unwrap().clone()
    }
}

impl Drop for MockService {
    fn drop(&mut self) {
        self.server.unblock();
    }
}

/// URL of a port with nothing listening.
pub fn closed_port_url() -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = listener.local_addr().unwrap().port();
    drop(listener);
    format!("http://127.0.0.1:{port}/v1/analyze")
}
