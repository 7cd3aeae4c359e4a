//! SPARQL endpoint client: SELECT query construction, HTTP transport, and
//! `application/sparql-results+json` decoding.

use crate::rdf::RdfTerm;
use crate::sparql::{Solution, SolutionSequence};
use std::time::Duration;

/// Queries whose encoded GET URL would exceed this length are sent as POST
/// forms when the method is [`QueryMethod::Auto`].
const GET_URL_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryMethod {
    Auto,
    Get,
    Post,
}

#[derive(Debug, Clone)]
pub struct EndpointConfig {
    pub url: String,
    pub timeout: Duration,
    pub method: QueryMethod,
    /// When set, results are fetched in LIMIT/OFFSET pages of this size.
    pub page_size: Option<usize>,
}

impl EndpointConfig {
    pub fn new(url: impl Into<String>) -> Self {
        EndpointConfig {
            url: url.into(),
            timeout: Duration::from_secs(60),
            method: QueryMethod::Auto,
            page_size: None,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum RemoteError {
    #[error("endpoint request failed: {0}")]
    Network(String),
    #[error("endpoint request timed out")]
    Timeout,
    #[error("endpoint returned HTTP status {0}")]
    Http(u16),
    #[error("could not parse endpoint response: {0}")]
    ResultParse(String),
}

/// Render a SELECT query around an already-rendered group graph pattern.
/// The pattern text carries absolute IRIs, so no PREFIX prologue is needed.
pub fn build_select(pattern_text: &str, projection: &[String]) -> String {
    let vars = if projection.is_empty() {
        "*".to_string()
    } else {
        projection
            .iter()
            .map(|v| format!("?{v}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    format!("SELECT {vars} WHERE {{\n{pattern_text}\n}}")
}

/// Run the pattern against the endpoint and decode all solutions, paging
/// when the configuration asks for it.
pub fn execute(
    config: &EndpointConfig,
    pattern_text: &str,
    projection: &[String],
) -> Result<SolutionSequence, RemoteError> {
    let base = build_select(pattern_text, projection);
    let client = reqwest::blocking::Client::builder()
        .timeout(config.timeout)
        .build()
        .map_err(|e| RemoteError::Network(e.to_string()))?;
    match config.page_size {
        None => send_query(&client, config, &base),
        Some(page) => {
            let page = page.max(1);
            let mut all = SolutionSequence::new();
            let mut offset = 0usize;
            loop {
                let query = format!("{base}\nLIMIT {page} OFFSET {offset}");
                let batch = send_query(&client, config, &query)?;
                let n = batch.len();
                all.extend(batch);
                if n < page {
                    return Ok(all);
                }
                offset += page;
            }
        }
    }
}

fn encoded_get_len(url: &str, query: &str) -> usize {
    let encoded: String = url::form_urlencoded::byte_serialize(query.as_bytes()).collect();
    url.len() + "?query=".len() + encoded.len()
}

fn send_query(
    client: &reqwest::blocking::Client,
    config: &EndpointConfig,
    query: &str,
) -> Result<SolutionSequence, RemoteError> {
    let use_get = match config.method {
        QueryMethod::Get => true,
        QueryMethod::Post => false,
        QueryMethod::Auto => encoded_get_len(&config.url, query) <= GET_URL_LIMIT,
    };
    let request = if use_get {
        client.get(&config.url).query(&[("query", query)])
    } else {
        client.post(&config.url).form(&[("query", query)])
    };
    let response = request
        .header("Accept", "application/sparql-results+json")
        .send()
        .map_err(|e| {
            if e.is_timeout() {
                RemoteError::Timeout
            } else {
                RemoteError::Network(e.to_string())
            }
        })?;
    let status = response.status();
    if !status.is_success() {
        return Err(RemoteError::Http(status.as_u16()));
    }
    let body = response
        .text()
        .map_err(|e| RemoteError::Network(e.to_string()))?;
    parse_results_json(&body)
}

fn parse_results_json(body: &str) -> Result<SolutionSequence, RemoteError> {
    let json: serde_json::Value = serde_json::from_str(body)
        .map_err(|e| RemoteError::ResultParse(format!("invalid JSON: {e}")))?;
    let bindings = json
        .get("results")
        .and_then(|r| r.get("bindings"))
        .and_then(|b| b.as_array())
        .ok_or_else(|| RemoteError::ResultParse("missing results.bindings array".into()))?;
    let mut out = SolutionSequence::new();
    for row in bindings {
        let obj = row
            .as_object()
            .ok_or_else(|| RemoteError::ResultParse("binding row is not an object".into()))?;
        let mut sol = Solution::default();
        for (var, term) in obj {
            sol.bind(var, decode_term(term)?);
        }
        out.push(sol);
    }
    Ok(out)
}

fn decode_term(v: &serde_json::Value) -> Result<RdfTerm, RemoteError> {
    let obj = v
        .as_object()
        .ok_or_else(|| RemoteError::ResultParse("term is not an object".into()))?;
    let get = |key: &str| -> Result<&str, RemoteError> {
        obj.get(key)
            .and_then(|x| x.as_str())
            .ok_or_else(|| RemoteError::ResultParse(format!("term missing string field '{key}'")))
    };
    let value = get("value")?;
    match get("type")? {
        "uri" => Ok(RdfTerm::iri(value)),
        "bnode" => Ok(RdfTerm::blank(value)),
        "literal" | "typed-literal" => {
            if let Some(lang) = obj.get("xml:lang").and_then(|x| x.as_str()) {
                Ok(RdfTerm::lang_literal(value, lang))
            } else if let Some(dt) = obj.get("datatype").and_then(|x| x.as_str()) {
                Ok(RdfTerm::typed_literal(value, dt))
            } else {
                Ok(RdfTerm::plain(value))
            }
        }
        other => Err(RemoteError::ResultParse(format!(
            "unknown term type '{other}'"
        ))),
    }
}
