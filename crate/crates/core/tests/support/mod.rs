//! Shared helpers for integration tests: a tiny scripted HTTP server and a
//! form-body decoder for golden request assertions.

#![allow(dead_code)]

use std::io::{Read, Write};
use std::net::TcpListener;
use std::thread::JoinHandle;

/// One canned response: status code and JSON body.
pub struct CannedResponse {
    pub status: u16,
    pub body: String,
}

impl CannedResponse {
    pub fn ok(body: impl Into<String>) -> Self {
        Self { status: 200, body: body.into() }
    }

    pub fn error(status: u16) -> Self {
        Self { status, body: "{}".into() }
    }
}

/// Serves the given responses in order, one connection per request
/// (responses carry `Connection: close`), then returns the recorded request
/// bodies. The server stops listening after the last response; any further
/// request fails to connect.
pub struct TestServer {
    pub url: String,
    handle: JoinHandle<Vec<String>>,
}

impl TestServer {
    pub fn start(responses: Vec<CannedResponse>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind test server");
        let url = format!("http://{}", listener.local_addr().unwrap());
        let handle = std::thread::spawn(move || {
            let mut bodies = Vec::new();
            for response in responses {
                let (mut stream, _) = listener.accept().expect("accept");
                let body = read_request_body(&mut stream);
                bodies.push(body);
                let status_line = match response.status {
                    200 => "200 OK",
                    500 => "500 Internal Server Error",
                    _ => "400 Bad Request",
                };
                let reply = format!(
                    "HTTP/1.1 {status_line}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                    response.body.len(),
                    response.body
                );
                stream.write_all(reply.as_bytes()).expect("write response");
            }
            bodies
        });
        Self { url, handle }
    }

    /// Waits for all responses to be served and returns raw request bodies.
    pub fn finish(self) -> Vec<String> {
        self.handle.join().expect("server thread")
    }
}

fn read_request_body(stream: &mut std::net::TcpStream) -> String {
    let mut buf = Vec::new();
    let mut chunk = [0u8; 1024];
    let header_end;
    loop {
        let n = stream.read(&mut chunk).expect("read request");
        buf.extend_from_slice(&chunk[..n]);
        if let Some(pos) = find_subsequence(&buf, b"\r\n\r\n") {
            header_end = pos + 4;
            break;
        }
        if n == 0 {
            return String::new();
        }
    }
    let headers = String::from_utf8_lossy(&buf[..header_end]).to_string();
    let content_length: usize = headers
        .lines()
        .find_map(|line| {
            let (name, value) = line.split_once(':')?;
            name.eq_ignore_ascii_case("content-length")
                .then(|| value.trim().parse().ok())
                .flatten()
        })
        .unwrap_or(0);
    while buf.len() < header_end + content_length {
        let n = stream.read(&mut chunk).expect("read body");
        if n == 0 {
            break;
        }
        buf.extend_from_slice(&chunk[..n]);
    }
    String::from_utf8_lossy(&buf[header_end..header_end + content_length]).to_string()
}

fn find_subsequence(haystack: &[u8], needle: &[u8]) -> Option<usize> {
    haystack.windows(needle.len()).position(|w| w == needle)
}

/// Decodes an `application/x-www-form-urlencoded` body into pairs.
pub fn decode_form(body: &str) -> Vec<(String, String)> {
    body.split('&')
        .filter(|piece| !piece.is_empty())
        .map(|piece| {
            let (k, v) = piece.split_once('=').unwrap_or((piece, ""));
            (percent_decode(k), percent_decode(v))
        })
        .collect()
}

fn percent_decode(text: &str) -> String {
    let bytes = text.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'+' => {
                out.push(b' ');
                i += 1;
            }
            b'%' if i + 2 < bytes.len() => {
                let hex = std::str::from_utf8(&bytes[i + 1..i + 3]).unwrap_or("");
                match u8::from_str_radix(hex, 16) {
                    Ok(b) => {
                        out.push(b);
                        i += 3;
                    }
                    Err(_) => {
                        out.push(bytes[i]);
                        i += 1;
                    }
                }
            }
            b => {
                out.push(b);
                i += 1;
            }
        }
    }
    String::from_utf8_lossy(&out).to_string()
}

/// A SPARQL-results JSON document binding `var` to the given values.
pub fn sparql_bindings(var: &str, values: &[&str]) -> String {
    let bindings: Vec<String> = values
        .iter()
        .map(|v| format!(r#"{{"{var}": {{"type": "uri", "value": "{v}"}}}}"#))
        .collect();
    format!(r#"{{"head": {{"vars": ["{var}"]}}, "results": {{"bindings": [{}]}}}}"#, bindings.join(", "))
}
