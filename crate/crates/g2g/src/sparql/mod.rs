//! Parser and evaluator for the SPARQL group-graph-pattern subset that
//! G2GML pattern bodies use.
//!
//! Supported: basic graph patterns with `;`/`,` abbreviations and `a`,
//! `OPTIONAL`, `FILTER`, `BIND(... AS ?v)`, sequence paths `p1/p2`,
//! anonymous `[]` subjects and objects, string and numeric literals, and
//! comments. Everything else raises `UnsupportedFeature`.

mod eval;
mod parser;

pub use eval::evaluate;
pub use parser::parse_pattern;

use crate::rdf::{vocab, RdfTerm};
use std::collections::BTreeMap;
use std::fmt::Write;

#[derive(Debug, Clone, thiserror::Error)]
pub enum PatternError {
    #[error("syntax error at line {line}, column {col}: {reason}")]
    Syntax {
        line: usize,
        col: usize,
        reason: String,
    },
    #[error("undefined prefix '{name}:' at line {line}")]
    UndefinedPrefix { name: String, line: usize },
    #[error("unsupported SPARQL feature: {0}")]
    UnsupportedFeature(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternTerm {
    Var(String),
    Const(RdfTerm),
}

impl PatternTerm {
    fn render(&self, out: &mut String) {
        match self {
            PatternTerm::Var(v) => {
                let _ = write!(out, "?{v}");
            }
            PatternTerm::Const(t) => {
                let _ = write!(out, "{t}");
            }
        }
    }
}

/// Edge of a triple pattern: either a predicate variable or a sequence of
/// one or more predicate IRIs joined by '/'.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PredPath {
    Var(String),
    Seq(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub s: PatternTerm,
    pub path: PredPath,
    pub o: PatternTerm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Var(String),
    Const(RdfTerm),
    Lang(Box<Expr>),
    Str(Box<Expr>),
    Eq(Box<Expr>, Box<Expr>),
    Neq(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternElement {
    Triple(TriplePattern),
    Optional(GraphPattern),
    Filter(Expr),
    Bind { expr: Expr, var: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GraphPattern {
    pub elements: Vec<PatternElement>,
}

impl GraphPattern {
    /// All variables in first-occurrence order, hidden `_`-prefixed ones
    /// included.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out, false);
        out
    }

    /// Variables whose binding is guaranteed outside OPTIONAL blocks:
    /// those in top-level triple patterns and top-level BIND targets.
    pub fn mandatory_variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out, true);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>, mandatory_only: bool) {
        fn push(out: &mut Vec<String>, v: &str) {
            if !out.iter().any(|x| x == v) {
                out.push(v.to_string());
            }
        }
        fn term(out: &mut Vec<String>, t: &PatternTerm) {
            if let PatternTerm::Var(v) = t {
                push(out, v);
            }
        }
        fn expr_vars(out: &mut Vec<String>, e: &Expr) {
            match e {
                Expr::Var(v) => push(out, v),
                Expr::Const(_) => {}
                Expr::Lang(i) | Expr::Str(i) => expr_vars(out, i),
                Expr::Eq(l, r) | Expr::Neq(l, r) => {
                    expr_vars(out, l);
                    expr_vars(out, r);
                }
            }
        }
        for el in &self.elements {
            match el {
                PatternElement::Triple(t) => {
                    term(out, &t.s);
                    if let PredPath::Var(v) = &t.path {
                        push(out, v);
                    }
                    term(out, &t.o);
                }
                PatternElement::Optional(sub) => {
                    if !mandatory_only {
                        sub.collect_vars(out, false);
                    }
                }
                PatternElement::Filter(e) => {
                    if !mandatory_only {
                        expr_vars(out, e);
                    }
                }
                PatternElement::Bind { expr, var } => {
                    if !mandatory_only {
                        expr_vars(out, expr);
                    }
                    push(out, var);
                }
            }
        }
    }

    /// Apply a variable substitution everywhere, including OPTIONAL bodies
    /// and expressions.
    pub fn rename_variables(&self, mapping: &BTreeMap<String, String>) -> GraphPattern {
        let map = |v: &str| mapping.get(v).cloned().unwrap_or_else(|| v.to_string());
        let term = |t: &PatternTerm| match t {
            PatternTerm::Var(v) => PatternTerm::Var(map(v)),
            c => c.clone(),
        };
        fn expr(e: &Expr, mapping: &BTreeMap<String, String>) -> Expr {
            match e {
                Expr::Var(v) => Expr::Var(
                    mapping.get(v).cloned().unwrap_or_else(|| v.to_string()),
                ),
                Expr::Const(c) => Expr::Const(c.clone()),
                Expr::Lang(i) => Expr::Lang(Box::new(expr(i, mapping))),
                Expr::Str(i) => Expr::Str(Box::new(expr(i, mapping))),
                Expr::Eq(l, r) => Expr::Eq(
                    Box::new(expr(l, mapping)),
                    Box::new(expr(r, mapping)),
                ),
                Expr::Neq(l, r) => Expr::Neq(
                    Box::new(expr(l, mapping)),
                    Box::new(expr(r, mapping)),
                ),
            }
        }
        GraphPattern {
            elements: self
                .elements
                .iter()
                .map(|el| match el {
                    PatternElement::Triple(t) => PatternElement::Triple(TriplePattern {
                        s: term(&t.s),
                        path: match &t.path {
                            PredPath::Var(v) => PredPath::Var(map(v)),
                            p => p.clone(),
                        },
                        o: term(&t.o),
                    }),
                    PatternElement::Optional(sub) => {
                        PatternElement::Optional(sub.rename_variables(mapping))
                    }
                    PatternElement::Filter(e) => PatternElement::Filter(expr(e, mapping)),
                    PatternElement::Bind { expr: e, var } => PatternElement::Bind {
                        expr: expr(e, mapping),
                        var: map(var),
                    },
                })
                .collect(),
        }
    }

    /// Render back to SPARQL text (absolute IRIs; re-parses under
    /// [`parse_pattern`]).
    pub fn to_sparql_text(&self) -> String {
        let mut out = String::new();
        self.render(&mut out, 0);
        out
    }

    fn render(&self, out: &mut String, depth: usize) {
        for el in &self.elements {
            if !out.is_empty() && !out.ends_with('\n') {
                out.push('\n');
            }
            for _ in 0..depth {
                out.push_str("  ");
            }
            match el {
                PatternElement::Triple(t) => {
                    t.s.render(out);
                    out.push(' ');
                    match &t.path {
                        PredPath::Var(v) => {
                            let _ = write!(out, "?{v}");
                        }
                        PredPath::Seq(iris) => {
                            let rendered: Vec<String> = iris
                                .iter()
                                .map(|i| {
                                    if i == vocab::RDF_TYPE {
                                        "a".to_string()
                                    } else {
                                        format!("<{i}>")
                                    }
                                })
                                .collect();
                            out.push_str(&rendered.join("/"));
                        }
                    }
                    out.push(' ');
                    t.o.render(out);
                    out.push_str(" .");
                }
                PatternElement::Optional(sub) => {
                    out.push_str("OPTIONAL {");
                    sub.render(out, depth + 1);
                    out.push('\n');
                    for _ in 0..depth {
                        out.push_str("  ");
                    }
                    out.push('}');
                }
                PatternElement::Filter(e) => {
                    out.push_str("FILTER(");
                    render_expr(e, out);
                    out.push(')');
                }
                PatternElement::Bind { expr, var } => {
                    out.push_str("BIND(");
                    render_expr(expr, out);
                    let _ = write!(out, " AS ?{var})");
                }
            }
        }
    }
}

fn render_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Var(v) => {
            let _ = write!(out, "?{v}");
        }
        Expr::Const(t) => {
            let _ = write!(out, "{t}");
        }
        Expr::Lang(i) => {
            out.push_str("lang(");
            render_expr(i, out);
            out.push(')');
        }
        Expr::Str(i) => {
            out.push_str("str(");
            render_expr(i, out);
            out.push(')');
        }
        Expr::Eq(l, r) => {
            out.push('(');
            render_expr(l, out);
            out.push_str(" = ");
            render_expr(r, out);
            out.push(')');
        }
        Expr::Neq(l, r) => {
            out.push('(');
            render_expr(l, out);
            out.push_str(" != ");
            render_expr(r, out);
            out.push(')');
        }
    }
}

/// A partial assignment of variables to RDF terms. Within one evaluation a
/// bound variable is never rebound.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Solution(pub BTreeMap<String, RdfTerm>);

impl Solution {
    pub fn get(&self, var: &str) -> Option<&RdfTerm> {
        self.0.get(var)
    }

    pub fn bind(&mut self, var: &str, term: RdfTerm) {
        self.0.insert(var.to_string(), term);
    }

    /// Check-and-extend: fails if `var` is already bound to a different
    /// term.
    pub fn try_bind(&self, var: &str, term: &RdfTerm) -> Option<Solution> {
        match self.0.get(var) {
            Some(existing) if existing != term => None,
            Some(_) => Some(self.clone()),
            None => {
                let mut next = self.clone();
                next.bind(var, term.clone());
                Some(next)
            }
        }
    }

    /// Restriction to the named (non `_`-prefixed) variables.
    pub fn named(&self) -> Solution {
        Solution(
            self.0
                .iter()
                .filter(|(k, _)| !k.starts_with('_'))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )
    }
}

pub type SolutionSequence = Vec<Solution>;
