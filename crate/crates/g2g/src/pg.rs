//! The implementation-independent property-graph model: nodes and edges
//! with multiple labels, multi-valued properties, and mixed directed /
//! undirected edges.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, thiserror::Error)]
pub enum PgError {
    #[error("edge endpoint '{0}' does not exist in the graph")]
    MissingEndpoint(String),
}

/// A typed property value. Type inference happens once at ingestion;
/// `Integer(2017)` and `Text("2017")` are distinct values.
#[derive(Debug, Clone)]
pub enum PgValue {
    Integer(i64),
    Double(f64),
    Text(String),
}

impl PgValue {
    pub fn text(s: impl Into<String>) -> Self {
        PgValue::Text(s.into())
    }
}

impl PartialEq for PgValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for PgValue {}

impl PartialOrd for PgValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PgValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use PgValue::*;
        match (self, other) {
            (Integer(a), Integer(b)) => a.cmp(b),
            (Double(a), Double(b)) => a.total_cmp(b),
            (Text(a), Text(b)) => a.cmp(b),
            (Integer(_), _) => Ordering::Less,
            (_, Integer(_)) => Ordering::Greater,
            (Double(_), _) => Ordering::Less,
            (_, Double(_)) => Ordering::Greater,
        }
    }
}

/// Infer a typed value from a lexical form. Total: anything that is not an
/// integer or a float falls back to text. Callers serializing quoted
/// tokens bypass this and force `Text`.
pub fn infer_value(lexical: &str) -> PgValue {
    if let Some(v) = parse_integer(lexical) {
        return PgValue::Integer(v);
    }
    if let Some(v) = parse_double(lexical) {
        return PgValue::Double(v);
    }
    PgValue::text(lexical)
}

fn parse_integer(s: &str) -> Option<i64> {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse::<i64>().ok()
}

/// Decimal / scientific float grammar: optional sign, digits with a dot or
/// an exponent (plain digit runs are the integer case).
fn parse_double(s: &str) -> Option<f64> {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    let mantissa_ok = match mantissa.find('.') {
        Some(i) => {
            let (int, frac) = (&mantissa[..i], &mantissa[i + 1..]);
            (digits(int) && (frac.is_empty() || digits(frac))) || (int.is_empty() && digits(frac))
        }
        None => digits(mantissa),
    };
    if !mantissa_ok {
        return None;
    }
    match exponent {
        Some(e) => {
            let e = e.strip_prefix(['+', '-']).unwrap_or(e);
            if !digits(e) {
                return None;
            }
        }
        None => {
            if !mantissa.contains('.') {
                return None; // integer form, not a float
            }
        }
    }
    let v = s.parse::<f64>().ok()?;
    if v.is_finite() {
        Some(v)
    } else {
        None
    }
}

/// Insertion-ordered property map: key -> list of values, each list keeping
/// first-occurrence order with duplicates suppressed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Props(Vec<(String, Vec<PgValue>)>);

impl Props {
    pub fn new() -> Self {
        Props::default()
    }

    pub fn push_value(&mut self, key: &str, value: PgValue) {
        match self.0.iter_mut().find(|(k, _)| k == key) {
            Some((_, values)) => {
                if !values.contains(&value) {
                    values.push(value);
                }
            }
            None => self.0.push((key.to_string(), vec![value])),
        }
    }

    pub fn get(&self, key: &str) -> Option<&[PgValue]> {
        self.0
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[PgValue])> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn merge(&mut self, other: &Props) {
        for (k, values) in other.iter() {
            for v in values {
                self.push_value(k, v.clone());
            }
        }
    }
}

impl<K: Into<String>> FromIterator<(K, Vec<PgValue>)> for Props {
    fn from_iter<T: IntoIterator<Item = (K, Vec<PgValue>)>>(iter: T) -> Self {
        let mut props = Props::new();
        for (k, values) in iter {
            let k = k.into();
            for v in values {
                props.push_value(&k, v);
            }
        }
        props
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PgNode {
    pub id: String,
    pub labels: BTreeSet<String>,
    pub props: Props,
}

impl PgNode {
    pub fn new(id: impl Into<String>) -> Self {
        PgNode {
            id: id.into(),
            labels: BTreeSet::new(),
            props: Props::new(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.labels.insert(label.into());
        self
    }

    pub fn with_prop(mut self, key: &str, value: PgValue) -> Self {
        self.props.push_value(key, value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PgEdge {
    pub src: String,
    pub dst: String,
    pub directed: bool,
    pub labels: BTreeSet<String>,
    pub props: Props,
}

impl PgEdge {
    /// Undirected edges are canonicalized at construction: endpoints are
    /// ordered lexicographically so `(a,b)` and `(b,a)` compare equal.
    pub fn new(src: impl Into<String>, dst: impl Into<String>, directed: bool) -> Self {
        let mut edge = PgEdge {
            src: src.into(),
            dst: dst.into(),
            directed,
            labels: BTreeSet::new(),
            props: Props::new(),
        };
        edge.canonicalize();
        edge
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.labels.insert(label.into());
        self
    }

    pub fn with_prop(mut self, key: &str, value: PgValue) -> Self {
        self.props.push_value(key, value);
        self
    }

    fn canonicalize(&mut self) {
        if !self.directed && self.src > self.dst {
            std::mem::swap(&mut self.src, &mut self.dst);
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct PropertyGraph {
    nodes: BTreeMap<String, PgNode>,
    edges: Vec<PgEdge>,
}

impl PropertyGraph {
    pub fn new() -> Self {
        PropertyGraph::default()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &PgNode> {
        self.nodes.values()
    }

    pub fn node(&self, id: &str) -> Option<&PgNode> {
        self.nodes.get(id)
    }

    pub fn contains_node(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn edges(&self) -> &[PgEdge] {
        &self.edges
    }

    /// Insert or merge. Merging unions the label sets and appends property
    /// values per key with duplicate suppression, keeping first-seen order.
    pub fn upsert_node(&mut self, node: PgNode) {
        debug_assert!(!node.id.is_empty(), "node id must be non-empty");
        match self.nodes.get_mut(&node.id) {
            Some(existing) => {
                existing.labels.extend(node.labels);
                existing.props.merge(&node.props);
            }
            None => {
                self.nodes.insert(node.id.clone(), node);
            }
        }
    }

    /// Append unless an identical edge (canonical form) already exists.
    pub fn add_edge(&mut self, edge: PgEdge) -> Result<(), PgError> {
        let mut edge = edge;
        edge.canonicalize();
        for endpoint in [&edge.src, &edge.dst] {
            if !self.nodes.contains_key(endpoint) {
                return Err(PgError::MissingEndpoint(endpoint.clone()));
            }
        }
        if !self.edges.contains(&edge) {
            self.edges.push(edge);
        }
        Ok(())
    }

    pub fn stats(&self) -> (usize, usize) {
        (self.nodes.len(), self.edges.len())
    }

    /// Drop every node incident to zero edges.
    pub fn remove_orphans(&mut self) {
        let mut incident = BTreeSet::new();
        for e in &self.edges {
            incident.insert(e.src.clone());
            incident.insert(e.dst.clone());
        }
        self.nodes.retain(|id, _| incident.contains(id));
    }
}

impl PartialEq for PropertyGraph {
    fn eq(&self, other: &Self) -> bool {
        if self.nodes != other.nodes {
            return false;
        }
        let mut a = self.edges.clone();
        let mut b = other.edges.clone();
        a.sort();
        b.sort();
        a == b
    }
}

impl Eq for PropertyGraph {}
