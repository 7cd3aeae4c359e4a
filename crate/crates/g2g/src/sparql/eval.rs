use super::{Expr, GraphPattern, PatternElement, PatternTerm, PredPath, Solution, SolutionSequence, TriplePattern};
use crate::rdf::{RdfTerm, TripleStore};

/// Standard semantics over an immutable store: basic-pattern join in
/// source order with index-backed lookup, OPTIONAL as left-join, FILTER
/// removing rows whose condition is not true (errors count as false),
/// BIND extending rows (errors leave the variable unbound). Sequence
/// paths expand to chained triple patterns with fresh hidden variables.
/// Result order is deterministic; duplicate solutions are preserved.
pub fn evaluate(pattern: &GraphPattern, store: &TripleStore) -> SolutionSequence {
    let mut ctx = EvalCtx { path_counter: 0 };
    eval_elements(&pattern.elements, store, vec![Solution::default()], &mut ctx)
}

struct EvalCtx {
    path_counter: usize,
}

fn eval_elements(
    elements: &[PatternElement],
    store: &TripleStore,
    mut rows: SolutionSequence,
    ctx: &mut EvalCtx,
) -> SolutionSequence {
    for el in elements {
        rows = match el {
            PatternElement::Triple(t) => eval_triple(t, store, rows, ctx),
            PatternElement::Optional(sub) => {
                let mut out = Vec::new();
                for row in rows {
                    let extended =
                        eval_elements(&sub.elements, store, vec![row.clone()], ctx);
                    if extended.is_empty() {
                        out.push(row);
                    } else {
                        out.extend(extended);
                    }
                }
                out
            }
            PatternElement::Filter(expr) => rows
                .into_iter()
                .filter(|row| matches!(eval_expr(expr, row), Ok(EvalValue::Bool(true))))
                .collect(),
            PatternElement::Bind { expr, var } => rows
                .into_iter()
                .map(|mut row| {
                    if row.get(var).is_none() {
                        if let Ok(value) = eval_expr(expr, &row) {
                            if let Some(term) = value.into_term() {
                                row.bind(var, term);
                            }
                        }
                    }
                    row
                })
                .collect(),
        };
        if rows.is_empty() {
            return rows;
        }
    }
    rows
}

fn eval_triple(
    t: &TriplePattern,
    store: &TripleStore,
    rows: SolutionSequence,
    ctx: &mut EvalCtx,
) -> SolutionSequence {
    match &t.path {
        PredPath::Var(p) => eval_single(&t.s, &PatternTerm::Var(p.clone()), &t.o, store, rows),
        PredPath::Seq(iris) if iris.len() == 1 => eval_single(
            &t.s,
            &PatternTerm::Const(RdfTerm::iri(iris[0].clone())),
            &t.o,
            store,
            rows,
        ),
        PredPath::Seq(iris) => {
            // a/b/c expands to ?s a ?_p0 . ?_p0 b ?_p1 . ?_p1 c ?o
            let mut rows = rows;
            let mut subject = t.s.clone();
            for (i, iri) in iris.iter().enumerate() {
                let object = if i + 1 == iris.len() {
                    t.o.clone()
                } else {
                    let v = format!("_p{}", ctx.path_counter);
                    ctx.path_counter += 1;
                    PatternTerm::Var(v)
                };
                rows = eval_single(
                    &subject,
                    &PatternTerm::Const(RdfTerm::iri(iri.clone())),
                    &object,
                    store,
                    rows,
                );
                subject = object;
            }
            rows
        }
    }
}

fn eval_single(
    s: &PatternTerm,
    p: &PatternTerm,
    o: &PatternTerm,
    store: &TripleStore,
    rows: SolutionSequence,
) -> SolutionSequence {
    let mut out = Vec::new();
    for row in rows {
        let sub = |t: &PatternTerm| -> PatternTerm {
            if let PatternTerm::Var(v) = t {
                if let Some(term) = row.get(v) {
                    return PatternTerm::Const(term.clone());
                }
            }
            t.clone()
        };
        let (s, p, o) = (sub(s), sub(p), sub(o));
        let as_const = |t: &PatternTerm| match t {
            PatternTerm::Const(c) => Some(c.clone()),
            PatternTerm::Var(_) => None,
        };
        for triple in store.matching(
            as_const(&s).as_ref(),
            as_const(&p).as_ref(),
            as_const(&o).as_ref(),
        ) {
            let mut next = Some(row.clone());
            for (term, value) in [(&s, &triple.s), (&p, &triple.p), (&o, &triple.o)] {
                if let PatternTerm::Var(v) = term {
                    next = next.and_then(|n| n.try_bind(v, value));
                }
            }
            if let Some(next) = next {
                out.push(next);
            }
        }
    }
    out
}

pub(crate) enum EvalValue {
    Term(RdfTerm),
    Text(String),
    Bool(bool),
}

impl EvalValue {
    fn into_term(self) -> Option<RdfTerm> {
        match self {
            EvalValue::Term(t) => Some(t),
            EvalValue::Text(s) => Some(RdfTerm::plain(s)),
            EvalValue::Bool(_) => None,
        }
    }
}

pub(crate) struct ExprError;

/// Expression evaluation with SPARQL error semantics: any error propagates
/// and the caller treats it as false (FILTER) or leaves the target unbound
/// (BIND).
pub(crate) fn eval_expr(expr: &Expr, row: &Solution) -> Result<EvalValue, ExprError> {
    match expr {
        Expr::Var(v) => row.get(v).cloned().map(EvalValue::Term).ok_or(ExprError),
        Expr::Const(t) => Ok(EvalValue::Term(t.clone())),
        Expr::Lang(inner) => match eval_expr(inner, row)? {
            // language tags compare case-insensitively; normalize here
            EvalValue::Term(RdfTerm::Literal { lang, .. }) => Ok(EvalValue::Text(
                lang.map(|l| l.to_lowercase()).unwrap_or_default(),
            )),
            _ => Err(ExprError),
        },
        Expr::Str(inner) => match eval_expr(inner, row)? {
            EvalValue::Term(RdfTerm::Iri(iri)) => Ok(EvalValue::Text(iri)),
            EvalValue::Term(RdfTerm::Literal { lexical, .. }) => Ok(EvalValue::Text(lexical)),
            EvalValue::Text(s) => Ok(EvalValue::Text(s)),
            _ => Err(ExprError),
        },
        Expr::Eq(l, r) => {
            let l = eval_expr(l, row)?;
            let r = eval_expr(r, row)?;
            Ok(EvalValue::Bool(values_equal(&l, &r)))
        }
        Expr::Neq(l, r) => {
            let l = eval_expr(l, row)?;
            let r = eval_expr(r, row)?;
            Ok(EvalValue::Bool(!values_equal(&l, &r)))
        }
    }
}

enum CmpValue {
    Number(f64),
    Text(String),
    Node(RdfTerm),
}

fn to_cmp(v: &EvalValue) -> CmpValue {
    match v {
        EvalValue::Text(s) => CmpValue::Text(s.clone()),
        EvalValue::Bool(b) => CmpValue::Text(b.to_string()),
        EvalValue::Term(t) => {
            if let Some(n) = t.numeric_value() {
                return CmpValue::Number(n);
            }
            if let RdfTerm::Literal {
                lexical,
                lang: None,
                datatype,
            } = t
            {
                if datatype.is_none() || datatype.as_deref() == Some(crate::rdf::vocab::XSD_STRING)
                {
                    return CmpValue::Text(lexical.clone());
                }
            }
            CmpValue::Node(t.clone())
        }
    }
}

/// Numeric literals compare by value within numeric types, plain strings
/// by content, everything else by term.
fn values_equal(l: &EvalValue, r: &EvalValue) -> bool {
    match (to_cmp(l), to_cmp(r)) {
        (CmpValue::Number(a), CmpValue::Number(b)) => a == b,
        (CmpValue::Text(a), CmpValue::Text(b)) => a == b,
        (CmpValue::Node(a), CmpValue::Node(b)) => a == b,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::Prefixes;
    use crate::sparql::parse_pattern;
    use crate::turtle::parse_turtle;

    const MINIMAL_TTL: &str = "\
@prefix : <http://example.org/> .
:person1 a :Person ;
         :name 'Alice' .
:person2 a :Person ;
         :name 'Bob' .
:person1 :supervised_by :person2 .
[] a :Email ;
   :sender     :person1 ;
   :receiver   :person2 ;
   :year       2017 ;
   :attachment '01.pdf' .
";

    const MULTI_EDGE_TTL: &str = "\
@prefix : <http://example.org/> .
:person1 a :Person ;
         :name 'Alice' .
:person2 a :Person ;
         :name 'Bob' .
[] a :Email ;
   :sender   :person1 ;
   :receiver :person2 ;
   :year     2017 .
[] a :Email ;
   :sender   :person1 ;
   :receiver :person2 ;
   :year     2018 .
";

    const MULTI_VALUE_TTL: &str = "\
@prefix : <http://example.org/> .
:person1 a :Person ;
         :name 'Alice' .
:person2 a :Person ;
         :name 'Bob' .
[] a :Email ;
   :sender     :person1 ;
   :receiver   :person2 ;
   :year       2017 ;
   :attachment '01.pdf' ;
   :attachment '02.pdf' .
";

    const EMAILED: &str = "\
?f a :Email ;
   :sender   ?p1 ;
   :receiver ?p2 ;
   :year     ?y .
OPTIONAL { ?f :attachment ?a }
";

    fn prefixes() -> Prefixes {
        let mut p = Prefixes::with_builtins();
        p.insert("", "http://example.org/");
        p
    }

    fn store(turtle: &str) -> TripleStore {
        TripleStore::new(parse_turtle(turtle).unwrap())
    }

    #[test]
    fn person_pattern_over_minimal_store() {
        let g = parse_pattern("?p a :Person .\n?p :name ?n .", &prefixes()).unwrap();
        let rows = evaluate(&g, &store(MINIMAL_TTL));
        assert_eq!(rows.len(), 2);
        let names: Vec<_> = rows
            .iter()
            .map(|r| r.get("n").unwrap().clone())
            .collect();
        assert_eq!(names, vec![RdfTerm::plain("Alice"), RdfTerm::plain("Bob")]);
    }

    #[test]
    fn emailed_pattern_with_two_attachments() {
        let g = parse_pattern(EMAILED, &prefixes()).unwrap();
        let rows = evaluate(&g, &store(MULTI_VALUE_TTL));
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].get("f"), rows[1].get("f"));
        let atts: Vec<_> = rows.iter().map(|r| r.get("a").unwrap().clone()).collect();
        assert_eq!(
            atts,
            vec![RdfTerm::plain("01.pdf"), RdfTerm::plain("02.pdf")]
        );
    }

    #[test]
    fn emailed_pattern_multi_edge_store() {
        let g = parse_pattern(EMAILED, &prefixes()).unwrap();
        let rows = evaluate(&g, &store(MULTI_EDGE_TTL));
        assert_eq!(rows.len(), 2);
        assert_ne!(rows[0].get("f"), rows[1].get("f"));
        assert!(rows.iter().all(|r| r.get("a").is_none()));
        let mut years: Vec<_> = rows
            .iter()
            .map(|r| match r.get("y").unwrap() {
                RdfTerm::Literal { lexical, .. } => lexical.clone(),
                other => panic!("{other:?}"),
            })
            .collect();
        years.sort();
        assert_eq!(years, vec!["2017", "2018"]);
    }

    #[test]
    fn any_pattern_over_empty_store_is_empty() {
        let g = parse_pattern("?s ?p ?o .", &prefixes()).unwrap();
        assert!(evaluate(&g, &TripleStore::default()).is_empty());
    }

    #[test]
    fn optional_extends_every_mandatory_row() {
        let g = parse_pattern(EMAILED, &prefixes()).unwrap();
        let mandatory = parse_pattern(
            "?f a :Email ; :sender ?p1 ; :receiver ?p2 ; :year ?y .",
            &prefixes(),
        )
        .unwrap();
        for src in [MINIMAL_TTL, MULTI_EDGE_TTL, MULTI_VALUE_TTL] {
            let st = store(src);
            let full = evaluate(&g, &st);
            for row in evaluate(&mandatory, &st) {
                assert!(full
                    .iter()
                    .any(|r| r.get("f") == row.get("f") && r.get("y") == row.get("y")));
            }
        }
    }

    #[test]
    fn lang_filter_keeps_tag_case_insensitively() {
        let ttl = "\
@prefix : <http://example.org/> .
:a :label \"one\"@en .
:b :label \"two\"@EN .
:c :label \"drei\"@de .
:d :label \"plain\" .
:e :label :notaliteral .
";
        let g = parse_pattern(
            "?x :label ?l . FILTER(lang(?l) = \"en\")",
            &prefixes(),
        )
        .unwrap();
        let rows = evaluate(&g, &store(ttl));
        assert_eq!(rows.len(), 2);
    }

    #[test]
    fn bind_str_extracts_lexical_form() {
        let ttl = "@prefix : <http://example.org/> .\n:d :label \"asthma\"@en .";
        let g = parse_pattern(
            "?d :label ?l . BIND(str(?l) AS ?n)",
            &prefixes(),
        )
        .unwrap();
        let rows = evaluate(&g, &store(ttl));
        assert_eq!(rows[0].get("n"), Some(&RdfTerm::plain("asthma")));
    }

    #[test]
    fn sequence_path_chains() {
        let ttl = "\
@prefix : <http://example.org/> .
:m :hometown :city1 .
:city1 :label \"Springfield\"@en .
";
        let g = parse_pattern("?m :hometown/:label ?h .", &prefixes()).unwrap();
        let rows = evaluate(&g, &store(ttl));
        assert_eq!(rows.len(), 1);
        assert_eq!(
            rows[0].get("h"),
            Some(&RdfTerm::lang_literal("Springfield", "en"))
        );
        // hidden intermediate is carried but not named
        assert_eq!(rows[0].named().0.len(), 2);
    }

    #[test]
    fn numeric_equality_compares_by_value() {
        let ttl = "@prefix : <http://example.org/> .\n:a :v 5 .\n:b :v 5.0 .";
        let g = parse_pattern("?x :v ?v . FILTER(?v = 5)", &prefixes()).unwrap();
        assert_eq!(evaluate(&g, &store(ttl)).len(), 2);
    }

    #[test]
    fn filter_error_counts_as_false() {
        // lang() of an IRI is an expression error; the row is filtered
        let ttl = "@prefix : <http://example.org/> .\n:a :label :iri .";
        let g = parse_pattern(
            "?x :label ?l . FILTER(lang(?l) = \"\")",
            &prefixes(),
        )
        .unwrap();
        assert!(evaluate(&g, &store(ttl)).is_empty());
    }

    #[test]
    fn neq_filter_on_band_members() {
        let ttl = "\
@prefix : <http://example.org/> .
:g :member :a , :b .
";
        let g = parse_pattern("?g :member ?m1 , ?m2 . FILTER(?m1 != ?m2)", &prefixes()).unwrap();
        let rows = evaluate(&g, &store(ttl));
        assert_eq!(rows.len(), 2); // (a,b) and (b,a)
    }
}
