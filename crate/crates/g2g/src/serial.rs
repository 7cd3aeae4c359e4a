//! Reading and writing of the flat PG format and JSON-PG, plus one-way
//! export to graph-database bulk-load formats.
//!
//! Output is deterministic: nodes sorted by id, edges sorted by
//! (src, dst, direction, labels, properties), single-space separators,
//! LF line endings. Input tolerates tabs, repeated spaces, CR/LF, blank
//! lines, and `#` comments.

use crate::pg::{infer_value, PgEdge, PgNode, PgValue, PropertyGraph, Props};
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, thiserror::Error)]
pub enum SerialError {
    #[error("syntax error at line {line}, column {col}: {reason}")]
    Syntax {
        line: usize,
        col: usize,
        reason: String,
    },
    #[error("document shape error: {0}")]
    Schema(String),
    #[error("value not representable in this dialect: {0}")]
    UnsupportedValue(String),
}

// ---------------------------------------------------------------------------
// quoting

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn has_structural_char(s: &str) -> bool {
    s.is_empty()
        || s == "--"
        || s == "->"
        || s.chars()
            .any(|c| c.is_whitespace() || c.is_control() || matches!(c, ':' | '"' | '#' | '\\'))
}

/// Ids, labels, and keys: quote only when a bare token would be ambiguous.
fn write_id(s: &str) -> String {
    if has_structural_char(s) {
        escape(s)
    } else {
        s.to_string()
    }
}

/// Text values additionally quote number-like tokens ("01.pdf", "15") so
/// they survive re-inference as text.
fn write_text_value(s: &str) -> String {
    let number_like = s
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.'));
    if has_structural_char(s) || number_like {
        escape(s)
    } else {
        s.to_string()
    }
}

fn write_value(v: &PgValue) -> String {
    match v {
        PgValue::Integer(n) => n.to_string(),
        PgValue::Double(d) => {
            let mut s = format!("{d}");
            // keep the float marker so re-inference yields a double again
            if !s.contains(['.', 'e', 'E', 'N', 'i']) {
                s.push_str(".0");
            }
            s
        }
        PgValue::Text(t) => write_text_value(t),
    }
}

// ---------------------------------------------------------------------------
// flat PG format

fn render_labels_and_props(labels: &std::collections::BTreeSet<String>, props: &Props) -> String {
    let mut out = String::new();
    for label in labels {
        out.push_str(" :");
        out.push_str(&write_id(label));
    }
    for (key, values) in props.iter() {
        for v in values {
            out.push(' ');
            out.push_str(&write_id(key));
            out.push(':');
            out.push_str(&write_value(v));
        }
    }
    out
}

pub fn write_pg(graph: &PropertyGraph) -> String {
    let mut out = String::new();
    for node in graph.nodes() {
        out.push_str(&write_id(&node.id));
        out.push_str(&render_labels_and_props(&node.labels, &node.props));
        out.push('\n');
    }
    let mut edges: Vec<&PgEdge> = graph.edges().iter().collect();
    edges.sort_by(|a, b| {
        (&a.src, &a.dst, a.directed, &a.labels, &a.props).cmp(&(
            &b.src, &b.dst, b.directed, &b.labels, &b.props,
        ))
    });
    for edge in edges {
        out.push_str(&write_id(&edge.src));
        out.push_str(if edge.directed { " -> " } else { " -- " });
        out.push_str(&write_id(&edge.dst));
        out.push_str(&render_labels_and_props(&edge.labels, &edge.props));
        out.push('\n');
    }
    out
}

/// One segment of a whitespace-delimited token; segments are separated by
/// unquoted ':' characters, e.g. `country:"United States"` has two.
#[derive(Debug)]
struct Seg {
    text: String,
    quoted: bool,
}

#[derive(Debug)]
struct RawToken {
    segs: Vec<Seg>,
    col: usize,
}

fn split_line(line: &str, lineno: usize) -> Result<Vec<RawToken>, SerialError> {
    let chars: Vec<char> = line.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        if chars[i] == '#' {
            break; // comment to end of line
        }
        let col = i + 1;
        let mut segs = vec![Seg {
            text: String::new(),
            quoted: false,
        }];
        while i < chars.len() && !chars[i].is_whitespace() {
            match chars[i] {
                '"' => {
                    i += 1;
                    let seg = segs.last_mut().unwrap();
                    seg.quoted = true;
                    let mut closed = false;
                    while i < chars.len() {
                        match chars[i] {
                            '\\' => {
                                i += 1;
                                let c = chars.get(i).copied().ok_or(SerialError::Syntax {
                                    line: lineno,
                                    col: i,
                                    reason: "dangling escape".into(),
                                })?;
                                seg.text.push(match c {
                                    'n' => '\n',
                                    't' => '\t',
                                    'r' => '\r',
                                    c => c,
                                });
                                i += 1;
                            }
                            '"' => {
                                i += 1;
                                closed = true;
                                break;
                            }
                            c => {
                                seg.text.push(c);
                                i += 1;
                            }
                        }
                    }
                    if !closed {
                        return Err(SerialError::Syntax {
                            line: lineno,
                            col,
                            reason: "unterminated quoted token".into(),
                        });
                    }
                }
                ':' => {
                    segs.push(Seg {
                        text: String::new(),
                        quoted: false,
                    });
                    i += 1;
                }
                '#' => {
                    return Err(SerialError::Syntax {
                        line: lineno,
                        col: i + 1,
                        reason: "'#' must be quoted inside a token".into(),
                    });
                }
                c => {
                    segs.last_mut().unwrap().text.push(c);
                    i += 1;
                }
            }
        }
        tokens.push(RawToken { segs, col });
    }
    Ok(tokens)
}

enum Part {
    Label(String),
    Prop(String, PgValue),
}

fn classify_part(tok: &RawToken, lineno: usize) -> Result<Part, SerialError> {
    if tok.segs.len() != 2 {
        return Err(SerialError::Syntax {
            line: lineno,
            col: tok.col,
            reason: "malformed label or property token".into(),
        });
    }
    let (head, tail) = (&tok.segs[0], &tok.segs[1]);
    if head.text.is_empty() && !head.quoted {
        return Ok(Part::Label(tail.text.clone()));
    }
    let value = if tail.quoted {
        PgValue::text(tail.text.clone())
    } else {
        infer_value(&tail.text)
    };
    Ok(Part::Prop(head.text.clone(), value))
}

fn single_seg<'a>(tok: &'a RawToken, lineno: usize, what: &str) -> Result<&'a Seg, SerialError> {
    if tok.segs.len() == 1 {
        Ok(&tok.segs[0])
    } else {
        Err(SerialError::Syntax {
            line: lineno,
            col: tok.col,
            reason: format!("{what} containing ':' must be quoted"),
        })
    }
}

pub fn parse_pg(text: &str) -> Result<PropertyGraph, SerialError> {
    let mut graph = PropertyGraph::new();
    let mut pending_edges = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let tokens = split_line(line, lineno)?;
        if tokens.is_empty() {
            continue;
        }
        let is_direction = |t: &RawToken| {
            t.segs.len() == 1
                && !t.segs[0].quoted
                && (t.segs[0].text == "--" || t.segs[0].text == "->")
        };
        if tokens.len() >= 2 && is_direction(&tokens[1]) {
            if tokens.len() < 3 {
                return Err(SerialError::Syntax {
                    line: lineno,
                    col: tokens[1].col,
                    reason: "edge line missing destination node id".into(),
                });
            }
            let src = single_seg(&tokens[0], lineno, "node id")?.text.clone();
            let dst = single_seg(&tokens[2], lineno, "node id")?.text.clone();
            let directed = tokens[1].segs[0].text == "->";
            let mut edge = PgEdge::new(src, dst, directed);
            for tok in &tokens[3..] {
                match classify_part(tok, lineno)? {
                    Part::Label(l) => {
                        edge.labels.insert(l);
                    }
                    Part::Prop(k, v) => edge.props.push_value(&k, v),
                }
            }
            pending_edges.push(edge);
        } else {
            let id = single_seg(&tokens[0], lineno, "node id")?.text.clone();
            if id.is_empty() {
                return Err(SerialError::Syntax {
                    line: lineno,
                    col: tokens[0].col,
                    reason: "node id must be non-empty".into(),
                });
            }
            let mut node = PgNode::new(id);
            for tok in &tokens[1..] {
                match classify_part(tok, lineno)? {
                    Part::Label(l) => {
                        node.labels.insert(l);
                    }
                    Part::Prop(k, v) => node.props.push_value(&k, v),
                }
            }
            graph.upsert_node(node);
        }
    }
    for edge in pending_edges {
        // edge lines referencing undeclared ids create implicit nodes
        for endpoint in [&edge.src, &edge.dst] {
            if !graph.contains_node(endpoint) {
                graph.upsert_node(PgNode::new(endpoint.clone()));
            }
        }
        graph.add_edge(edge).expect("endpoints were just inserted");
    }
    Ok(graph)
}

// ---------------------------------------------------------------------------
// JSON-PG
//
// The flat format's definition gives no JSON schema; this document shape is
// this tool's declared convention:
//   {"nodes": [{"id", "labels", "properties"}],
//    "edges": [{"from", "to", "undirected", "labels", "properties"}]}

fn value_to_json(v: &PgValue) -> Value {
    match v {
        PgValue::Integer(n) => json!(n),
        PgValue::Double(d) => json!(d),
        PgValue::Text(t) => json!(t),
    }
}

fn props_to_json(props: &Props) -> Value {
    let mut map = Map::new();
    for (k, values) in props.iter() {
        map.insert(k.to_string(), Value::Array(values.iter().map(value_to_json).collect()));
    }
    Value::Object(map)
}

pub fn write_json_pg(graph: &PropertyGraph) -> String {
    let nodes: Vec<Value> = graph
        .nodes()
        .map(|n| {
            json!({
                "id": n.id,
                "labels": n.labels.iter().collect::<Vec<_>>(),
                "properties": props_to_json(&n.props),
            })
        })
        .collect();
    let mut edges: Vec<&PgEdge> = graph.edges().iter().collect();
    edges.sort();
    let edges: Vec<Value> = edges
        .iter()
        .map(|e| {
            json!({
                "from": e.src,
                "to": e.dst,
                "undirected": !e.directed,
                "labels": e.labels.iter().collect::<Vec<_>>(),
                "properties": props_to_json(&e.props),
            })
        })
        .collect();
    serde_json::to_string(&json!({"nodes": nodes, "edges": edges})).expect("graph serializes")
}

fn json_to_value(v: &Value) -> Result<PgValue, SerialError> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(PgValue::Integer(i))
            } else if let Some(f) = n.as_f64() {
                Ok(PgValue::Double(f))
            } else {
                Err(SerialError::Schema(format!("unrepresentable number {n}")))
            }
        }
        Value::String(s) => Ok(PgValue::text(s.clone())),
        other => Err(SerialError::Schema(format!(
            "property values must be numbers or strings, found {other}"
        ))),
    }
}

fn json_props(obj: &Map<String, Value>) -> Result<Props, SerialError> {
    let mut props = Props::new();
    if let Some(p) = obj.get("properties") {
        let map = p
            .as_object()
            .ok_or_else(|| SerialError::Schema("'properties' must be an object".into()))?;
        for (k, values) in map {
            let arr = values
                .as_array()
                .ok_or_else(|| SerialError::Schema(format!("property '{k}' must be an array")))?;
            for v in arr {
                props.push_value(k, json_to_value(v)?);
            }
        }
    }
    Ok(props)
}

fn json_labels(obj: &Map<String, Value>) -> Result<Vec<String>, SerialError> {
    let mut labels = Vec::new();
    if let Some(l) = obj.get("labels") {
        let arr = l
            .as_array()
            .ok_or_else(|| SerialError::Schema("'labels' must be an array".into()))?;
        for v in arr {
            labels.push(
                v.as_str()
                    .ok_or_else(|| SerialError::Schema("labels must be strings".into()))?
                    .to_string(),
            );
        }
    }
    Ok(labels)
}

fn required_str<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a str, SerialError> {
    obj.get(key)
        .ok_or_else(|| SerialError::Schema(format!("missing required key '{key}'")))?
        .as_str()
        .ok_or_else(|| SerialError::Schema(format!("'{key}' must be a string")))
}

pub fn parse_json_pg(text: &str) -> Result<PropertyGraph, SerialError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| SerialError::Syntax {
        line: e.line(),
        col: e.column(),
        reason: e.to_string(),
    })?;
    let doc = doc
        .as_object()
        .ok_or_else(|| SerialError::Schema("top level must be an object".into()))?;
    let mut graph = PropertyGraph::new();
    let nodes = doc
        .get("nodes")
        .ok_or_else(|| SerialError::Schema("missing required key 'nodes'".into()))?
        .as_array()
        .ok_or_else(|| SerialError::Schema("'nodes' must be an array".into()))?;
    for n in nodes {
        let obj = n
            .as_object()
            .ok_or_else(|| SerialError::Schema("each node must be an object".into()))?;
        let mut node = PgNode::new(required_str(obj, "id")?);
        node.labels.extend(json_labels(obj)?);
        node.props = json_props(obj)?;
        graph.upsert_node(node);
    }
    let edges = doc
        .get("edges")
        .ok_or_else(|| SerialError::Schema("missing required key 'edges'".into()))?
        .as_array()
        .ok_or_else(|| SerialError::Schema("'edges' must be an array".into()))?;
    for e in edges {
        let obj = e
            .as_object()
            .ok_or_else(|| SerialError::Schema("each edge must be an object".into()))?;
        let undirected = obj
            .get("undirected")
            .map(|v| {
                v.as_bool()
                    .ok_or_else(|| SerialError::Schema("'undirected' must be a boolean".into()))
            })
            .transpose()?
            .unwrap_or(false);
        let mut edge = PgEdge::new(
            required_str(obj, "from")?,
            required_str(obj, "to")?,
            !undirected,
        );
        edge.labels.extend(json_labels(obj)?);
        edge.props = json_props(obj)?;
        for endpoint in [edge.src.clone(), edge.dst.clone()] {
            if !graph.contains_node(&endpoint) {
                graph.upsert_node(PgNode::new(endpoint));
            }
        }
        graph
            .add_edge(edge)
            .map_err(|e| SerialError::Schema(e.to_string()))?;
    }
    Ok(graph)
}

// ---------------------------------------------------------------------------
// database bulk-load exports

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DbDialect {
    Neo4j,
    Oracle,
    Neptune,
}

impl std::str::FromStr for DbDialect {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "neo4j" => Ok(DbDialect::Neo4j),
            "oracle" => Ok(DbDialect::Oracle),
            "neptune" => Ok(DbDialect::Neptune),
            other => Err(format!("unknown dialect '{other}'")),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn flat_value(v: &PgValue) -> Result<String, SerialError> {
    let s = match v {
        PgValue::Integer(n) => n.to_string(),
        PgValue::Double(d) => write_value(&PgValue::Double(*d)),
        PgValue::Text(t) => t.clone(),
    };
    // ';' joins multi-valued fields; a value containing it would be ambiguous
    if s.contains(';') || s.contains('\n') || s.contains('\r') {
        return Err(SerialError::UnsupportedValue(s));
    }
    Ok(s)
}

fn joined(values: &[PgValue]) -> Result<String, SerialError> {
    let parts: Result<Vec<_>, _> = values.iter().map(flat_value).collect();
    Ok(parts?.join(";"))
}

fn join_labels(labels: &std::collections::BTreeSet<String>) -> Result<String, SerialError> {
    for l in labels {
        if l.contains(';') {
            return Err(SerialError::UnsupportedValue(l.clone()));
        }
    }
    Ok(labels.iter().cloned().collect::<Vec<_>>().join(";"))
}

fn sorted_keys<'a>(items: impl Iterator<Item = &'a Props>) -> Vec<String> {
    let mut keys: Vec<String> = items
        .flat_map(|p| p.iter().map(|(k, _)| k.to_string()))
        .collect();
    keys.sort();
    keys.dedup();
    keys
}

fn sorted_edges(graph: &PropertyGraph) -> Vec<&PgEdge> {
    let mut edges: Vec<&PgEdge> = graph.edges().iter().collect();
    edges.sort();
    edges
}

pub fn export_db(
    graph: &PropertyGraph,
    dialect: DbDialect,
) -> Result<Vec<(String, String)>, SerialError> {
    match dialect {
        DbDialect::Neo4j => export_neo4j(graph),
        DbDialect::Neptune => export_neptune(graph),
        DbDialect::Oracle => export_oracle(graph),
    }
}

fn export_neo4j(graph: &PropertyGraph) -> Result<Vec<(String, String)>, SerialError> {
    let node_keys = sorted_keys(graph.nodes().map(|n| &n.props));
    let mut nodes = String::from("id:ID,:LABEL");
    for k in &node_keys {
        nodes.push(',');
        nodes.push_str(&csv_field(k));
    }
    nodes.push('\n');
    for n in graph.nodes() {
        let mut row = vec![csv_field(&n.id), csv_field(&join_labels(&n.labels)?)];
        for k in &node_keys {
            row.push(csv_field(&n.props.get(k).map(joined).transpose()?.unwrap_or_default()));
        }
        nodes.push_str(&row.join(","));
        nodes.push('\n');
    }

    let edge_keys = sorted_keys(graph.edges().iter().map(|e| &e.props));
    let mut edges = String::from(":START_ID,:END_ID,:TYPE,undirected");
    for k in &edge_keys {
        edges.push(',');
        edges.push_str(&csv_field(k));
    }
    edges.push('\n');
    for e in sorted_edges(graph) {
        let mut row = vec![
            csv_field(&e.src),
            csv_field(&e.dst),
            csv_field(&join_labels(&e.labels)?),
            (!e.directed).to_string(),
        ];
        for k in &edge_keys {
            row.push(csv_field(&e.props.get(k).map(joined).transpose()?.unwrap_or_default()));
        }
        edges.push_str(&row.join(","));
        edges.push('\n');
    }
    Ok(vec![("nodes.csv".into(), nodes), ("edges.csv".into(), edges)])
}

fn export_neptune(graph: &PropertyGraph) -> Result<Vec<(String, String)>, SerialError> {
    let node_keys = sorted_keys(graph.nodes().map(|n| &n.props));
    let mut nodes = String::from("~id,~label");
    for k in &node_keys {
        nodes.push(',');
        nodes.push_str(&csv_field(k));
    }
    nodes.push('\n');
    for n in graph.nodes() {
        let mut row = vec![csv_field(&n.id), csv_field(&join_labels(&n.labels)?)];
        for k in &node_keys {
            row.push(csv_field(&n.props.get(k).map(joined).transpose()?.unwrap_or_default()));
        }
        nodes.push_str(&row.join(","));
        nodes.push('\n');
    }

    let edge_keys = sorted_keys(graph.edges().iter().map(|e| &e.props));
    let mut edges = String::from("~id,~from,~to,~label,undirected");
    for k in &edge_keys {
        edges.push(',');
        edges.push_str(&csv_field(k));
    }
    edges.push('\n');
    for (i, e) in sorted_edges(graph).iter().enumerate() {
        let mut row = vec![
            format!("e{i}"),
            csv_field(&e.src),
            csv_field(&e.dst),
            csv_field(&join_labels(&e.labels)?),
            (!e.directed).to_string(),
        ];
        for k in &edge_keys {
            row.push(csv_field(&e.props.get(k).map(joined).transpose()?.unwrap_or_default()));
        }
        edges.push_str(&row.join(","));
        edges.push('\n');
    }
    Ok(vec![
        ("vertices.csv".into(), nodes),
        ("edges.csv".into(), edges),
    ])
}

/// Oracle flat files: one element per line, id / label list first, then
/// alternating key and value columns for the keys the element carries.
fn export_oracle(graph: &PropertyGraph) -> Result<Vec<(String, String)>, SerialError> {
    let mut nodes = String::new();
    for n in graph.nodes() {
        let mut row = vec![csv_field(&n.id), csv_field(&join_labels(&n.labels)?)];
        for (k, values) in n.props.iter() {
            row.push(csv_field(k));
            row.push(csv_field(&joined(values)?));
        }
        nodes.push_str(&row.join(","));
        nodes.push('\n');
    }
    let mut edges = String::new();
    for e in sorted_edges(graph) {
        let mut row = vec![
            csv_field(&e.src),
            csv_field(&e.dst),
            csv_field(&join_labels(&e.labels)?),
            format!("undirected:{}", !e.directed),
        ];
        for (k, values) in e.props.iter() {
            row.push(csv_field(k));
            row.push(csv_field(&joined(values)?));
        }
        edges.push_str(&row.join(","));
        edges.push('\n');
    }
    Ok(vec![
        ("nodes.flat".into(), nodes),
        ("edges.flat".into(), edges),
    ])
}
