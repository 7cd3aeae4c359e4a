//! RDF terms, triples, and the indexed in-memory triple store used by
//! local-file mode.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub mod vocab {
    pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";

    pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const XSD_FLOAT: &str = "http://www.w3.org/2001/XMLSchema#float";
    pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
}

/// An RDF term: IRI, blank node, or literal. A literal carries at most one
/// of a language tag or a datatype IRI.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RdfTerm {
    Iri(String),
    Blank(String),
    Literal {
        lexical: String,
        lang: Option<String>,
        datatype: Option<String>,
    },
}

impl RdfTerm {
    pub fn iri(s: impl Into<String>) -> Self {
        RdfTerm::Iri(s.into())
    }

    pub fn blank(label: impl Into<String>) -> Self {
        RdfTerm::Blank(label.into())
    }

    pub fn plain(lexical: impl Into<String>) -> Self {
        RdfTerm::Literal {
            lexical: lexical.into(),
            lang: None,
            datatype: None,
        }
    }

    pub fn lang_literal(lexical: impl Into<String>, lang: impl Into<String>) -> Self {
        RdfTerm::Literal {
            lexical: lexical.into(),
            lang: Some(lang.into()),
            datatype: None,
        }
    }

    pub fn typed_literal(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        RdfTerm::Literal {
            lexical: lexical.into(),
            lang: None,
            datatype: Some(datatype.into()),
        }
    }

    pub fn integer(n: i64) -> Self {
        Self::typed_literal(n.to_string(), vocab::XSD_INTEGER)
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, RdfTerm::Literal { .. })
    }

    /// True when this term is a literal with a numeric XSD datatype.
    pub fn numeric_value(&self) -> Option<f64> {
        if let RdfTerm::Literal {
            lexical,
            datatype: Some(dt),
            ..
        } = self
        {
            match dt.as_str() {
                vocab::XSD_INTEGER | vocab::XSD_DECIMAL | vocab::XSD_DOUBLE | vocab::XSD_FLOAT => {
                    lexical.parse::<f64>().ok()
                }
                _ => None,
            }
        } else {
            None
        }
    }
}

impl fmt::Display for RdfTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RdfTerm::Iri(i) => write!(f, "<{i}>"),
            RdfTerm::Blank(l) => write!(f, "_:{l}"),
            RdfTerm::Literal {
                lexical,
                lang,
                datatype,
            } => {
                write!(f, "\"")?;
                for c in lexical.chars() {
                    match c {
                        '"' => write!(f, "\\\"")?,
                        '\\' => write!(f, "\\\\")?,
                        '\n' => write!(f, "\\n")?,
                        '\r' => write!(f, "\\r")?,
                        '\t' => write!(f, "\\t")?,
                        c => write!(f, "{c}")?,
                    }
                }
                write!(f, "\"")?;
                if let Some(lang) = lang {
                    write!(f, "@{lang}")?;
                }
                if let Some(dt) = datatype {
                    write!(f, "^^<{dt}>")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub s: RdfTerm,
    pub p: RdfTerm,
    pub o: RdfTerm,
}

impl Triple {
    pub fn new(s: RdfTerm, p: RdfTerm, o: RdfTerm) -> Self {
        debug_assert!(matches!(p, RdfTerm::Iri(_)), "predicate must be an IRI");
        Triple { s, p, o }
    }
}

/// Prefix environment shared by the Turtle and SPARQL parsers.
#[derive(Debug, Clone, Default)]
pub struct Prefixes {
    map: BTreeMap<String, String>,
}

impl Prefixes {
    pub fn empty() -> Self {
        Prefixes::default()
    }

    /// Well-known prefixes available without declaration in G2GML pattern
    /// bodies (the Wikidata example relies on `rdfs:` being predefined).
    pub fn with_builtins() -> Self {
        let mut p = Prefixes::default();
        p.insert("rdf", vocab::RDF_NS);
        p.insert("rdfs", vocab::RDFS_NS);
        p.insert("xsd", vocab::XSD_NS);
        p
    }

    pub fn insert(&mut self, prefix: impl Into<String>, iri: impl Into<String>) {
        self.map.insert(prefix.into(), iri.into());
    }

    pub fn resolve(&self, prefix: &str, local: &str) -> Option<String> {
        self.map.get(prefix).map(|base| format!("{base}{local}"))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// Immutable after bulk load; keeps SPO, POS, and OSP orderings so matching
/// with any bound-position combination walks a deterministic index.
#[derive(Debug, Clone, Default)]
pub struct TripleStore {
    spo: BTreeSet<(RdfTerm, RdfTerm, RdfTerm)>,
    pos: BTreeSet<(RdfTerm, RdfTerm, RdfTerm)>,
    osp: BTreeSet<(RdfTerm, RdfTerm, RdfTerm)>,
}

impl TripleStore {
    pub fn new(triples: impl IntoIterator<Item = Triple>) -> Self {
        let mut store = TripleStore::default();
        for t in triples {
            store.insert(t);
        }
        store
    }

    fn insert(&mut self, t: Triple) {
        self.spo.insert((t.s.clone(), t.p.clone(), t.o.clone()));
        self.pos.insert((t.p.clone(), t.o.clone(), t.s.clone()));
        self.osp.insert((t.o, t.s, t.p));
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo
            .iter()
            .map(|(s, p, o)| Triple::new(s.clone(), p.clone(), o.clone()))
    }

    /// All triples matching the bound positions, in index order. `None`
    /// means wildcard.
    pub fn matching(
        &self,
        s: Option<&RdfTerm>,
        p: Option<&RdfTerm>,
        o: Option<&RdfTerm>,
    ) -> Vec<Triple> {
        let keep = |t: &Triple| {
            s.is_none_or(|s| *s == t.s)
                && p.is_none_or(|p| *p == t.p)
                && o.is_none_or(|o| *o == t.o)
        };
        let mut out = Vec::new();
        if s.is_some() {
            for (s, p, o) in &self.spo {
                let t = Triple::new(s.clone(), p.clone(), o.clone());
                if keep(&t) {
                    out.push(t);
                }
            }
        } else if p.is_some() {
            for (p, o, s) in &self.pos {
                let t = Triple::new(s.clone(), p.clone(), o.clone());
                if keep(&t) {
                    out.push(t);
                }
            }
        } else if o.is_some() {
            for (o, s, p) in &self.osp {
                let t = Triple::new(s.clone(), p.clone(), o.clone());
                if keep(&t) {
                    out.push(t);
                }
            }
        } else {
            out.extend(self.iter());
        }
        out
    }
}
