//! Shared test support: an in-process SPARQL endpoint serving
//! `application/sparql-results+json` over a real TCP socket, backed by the
//! local pattern evaluator.

use g2g::rdf::{Prefixes, RdfTerm, TripleStore};
use g2g::sparql::{evaluate, parse_pattern};
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

pub struct MockEndpoint {
    pub url: String,
    requests: Arc<AtomicUsize>,
}

impl MockEndpoint {
    /// Number of queries answered so far (paging sends several).
    #[allow(dead_code)]
    pub fn request_count(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }
}

/// Start an endpoint over `store` on an ephemeral local port. The listener
/// thread runs until the test process exits.
pub fn spawn_endpoint(store: TripleStore) -> MockEndpoint {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind mock endpoint");
    let port = listener.local_addr().unwrap().port();
    let requests = Arc::new(AtomicUsize::new(0));
    let counter = Arc::clone(&requests);
    let store = Arc::new(store);
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(stream) = stream else { continue };
            counter.fetch_add(1, Ordering::SeqCst);
            let store = Arc::clone(&store);
            std::thread::spawn(move || {
                let _ = handle_connection(stream, &store);
            });
        }
    });
    MockEndpoint {
        url: format!("http://127.0.0.1:{port}/sparql"),
        requests,
    }
}

fn handle_connection(stream: TcpStream, store: &TripleStore) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream);
    let mut request_line = String::new();
    reader.read_line(&mut request_line)?;
    let mut parts = request_line.split_whitespace();
    let method = parts.next().unwrap_or("").to_string();
    let target = parts.next().unwrap_or("").to_string();

    let mut content_length = 0usize;
    loop {
        let mut header = String::new();
        reader.read_line(&mut header)?;
        let header = header.trim_end();
        if header.is_empty() {
            break;
        }
        if let Some(v) = header
            .to_ascii_lowercase()
            .strip_prefix("content-length:")
            .map(|v| v.trim().to_string())
        {
            content_length = v.parse().unwrap_or(0);
        }
    }

    let raw_params = if method == "GET" {
        target.split_once('?').map(|(_, q)| q.to_string())
    } else {
        let mut body = vec![0u8; content_length];
        reader.read_exact(&mut body)?;
        Some(String::from_utf8_lossy(&body).into_owned())
    };
    let query = raw_params.and_then(|params| {
        url::form_urlencoded::parse(params.as_bytes())
            .find(|(k, _)| k == "query")
            .map(|(_, v)| v.into_owned())
    });

    let mut stream = reader.into_inner();
    let Some(query) = query else {
        return respond(&mut stream, 400, "missing query parameter");
    };
    match answer_query(&query, store) {
        Ok(body) => respond(&mut stream, 200, &body),
        Err(msg) => respond(&mut stream, 400, &msg),
    }
}

fn respond(stream: &mut TcpStream, status: u16, body: &str) -> std::io::Result<()> {
    let reason = if status == 200 { "OK" } else { "Bad Request" };
    write!(
        stream,
        "HTTP/1.1 {status} {reason}\r\nContent-Type: application/sparql-results+json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )?;
    stream.flush()
}

/// Understands exactly the queries [`g2g::remote`] builds:
/// `SELECT ?v... WHERE { ... }` with an optional `LIMIT n OFFSET m` tail.
fn answer_query(query: &str, store: &TripleStore) -> Result<String, String> {
    let rest = query
        .trim()
        .strip_prefix("SELECT")
        .ok_or("expected SELECT")?;
    let (head, rest) = rest.split_once('{').ok_or("expected '{'")?;
    let head = head
        .trim()
        .strip_suffix("WHERE")
        .ok_or("expected WHERE")?;
    let vars: Vec<String> = head
        .split_whitespace()
        .map(|v| v.trim_start_matches(['?', '$']).to_string())
        .filter(|v| !v.is_empty())
        .collect();

    let close = rest.rfind('}').ok_or("expected '}'")?;
    let body = &rest[..close];
    let tail = &rest[close + 1..];
    let mut limit = None;
    let mut offset = 0usize;
    let mut tokens = tail.split_whitespace();
    while let Some(tok) = tokens.next() {
        match tok.to_ascii_uppercase().as_str() {
            "LIMIT" => {
                limit = Some(
                    tokens
                        .next()
                        .and_then(|n| n.parse().ok())
                        .ok_or("bad LIMIT")?,
                )
            }
            "OFFSET" => {
                offset = tokens
                    .next()
                    .and_then(|n| n.parse().ok())
                    .ok_or("bad OFFSET")?
            }
            other => return Err(format!("unexpected token '{other}'")),
        }
    }

    let pattern = parse_pattern(body, &Prefixes::empty()).map_err(|e| e.to_string())?;
    let mut solutions = evaluate(&pattern, store);
    solutions = solutions.into_iter().skip(offset).collect();
    if let Some(limit) = limit {
        solutions.truncate(limit);
    }

    let bindings: Vec<serde_json::Value> = solutions
        .iter()
        .map(|sol| {
            let mut row = serde_json::Map::new();
            for var in &vars {
                if var == "*" {
                    continue;
                }
                if let Some(term) = sol.get(var) {
                    row.insert(var.clone(), term_json(term));
                }
            }
            serde_json::Value::Object(row)
        })
        .collect();
    let doc = serde_json::json!({
        "head": {"vars": vars},
        "results": {"bindings": bindings}
    });
    Ok(doc.to_string())
}

fn term_json(term: &RdfTerm) -> serde_json::Value {
    match term {
        RdfTerm::Iri(i) => serde_json::json!({"type": "uri", "value": i}),
        RdfTerm::Blank(l) => serde_json::json!({"type": "bnode", "value": l}),
        RdfTerm::Literal {
            lexical,
            lang,
            datatype,
        } => {
            let mut obj = serde_json::Map::new();
            obj.insert("type".into(), "literal".into());
            obj.insert("value".into(), lexical.clone().into());
            if let Some(lang) = lang {
                obj.insert("xml:lang".into(), lang.clone().into());
            }
            if let Some(dt) = datatype {
                obj.insert("datatype".into(), dt.clone().into());
            }
            serde_json::Value::Object(obj)
        }
    }
}
