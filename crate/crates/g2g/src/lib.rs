//! Convert RDF graphs into property graphs driven by declarative G2GML
//! mapping descriptions.
//!
//! The pipeline: parse a G2GML document ([`g2gml`]), evaluate each map's
//! RDF graph pattern either locally over a Turtle file ([`turtle`],
//! [`sparql`]) or against a remote SPARQL endpoint ([`remote`]), and
//! materialize the property graph ([`engine`], [`pg`]). Results serialize
//! to the flat PG format, JSON-PG, or database bulk-load files
//! ([`serial`]).

pub mod engine;
pub mod g2gml;
pub mod lex;
pub mod pg;
pub mod rdf;
pub mod remote;
pub mod serial;
pub mod sparql;
pub mod turtle;

pub use engine::{run, RunOptions, RunReport, Source};
pub use pg::{infer_value, PgEdge, PgNode, PgValue, PropertyGraph};
pub use rdf::{Prefixes, RdfTerm, Triple, TripleStore};
pub use serial::{parse_json_pg, parse_pg, write_json_pg, write_pg, DbDialect};
