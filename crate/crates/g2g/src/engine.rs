//! Mapping execution: compile G2GML maps into evaluable patterns, obtain
//! solutions from a local store or a remote endpoint, and materialize the
//! property graph.

use crate::g2gml::{validate, Diagnostic, EdgeMapDef, G2GDocument, MapRef, NodeMapDef};
use crate::pg::{PgEdge, PgNode, PgValue, PropertyGraph};
use crate::rdf::{vocab, Prefixes, RdfTerm, TripleStore};
use crate::remote::{self, EndpointConfig, RemoteError};
use crate::sparql::{evaluate, parse_pattern, GraphPattern, PatternError, Solution};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

#[derive(Debug)]
pub enum Source {
    Local(TripleStore),
    Remote(EndpointConfig),
}

#[derive(Debug)]
pub struct RunOptions {
    pub source: Source,
    /// Keep nodes with no incident edge. Orphans are only pruned when the
    /// document declares at least one edge map.
    pub include_orphans: bool,
    /// Worker threads for remote fetches; local evaluation is sequential.
    pub parallelism: usize,
}

impl RunOptions {
    pub fn local(store: TripleStore) -> Self {
        RunOptions {
            source: Source::Local(store),
            include_orphans: false,
            parallelism: 1,
        }
    }

    pub fn remote(endpoint: EndpointConfig) -> Self {
        RunOptions {
            source: Source::Remote(endpoint),
            include_orphans: false,
            parallelism: 1,
        }
    }
}

#[derive(Debug, Default)]
pub struct RunReport {
    pub graph: PropertyGraph,
    pub warnings: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("{}", render_diagnostics(.0))]
    Validation(Vec<Diagnostic>),
    #[error("{}", render_compile_errors(.0))]
    Compile(Vec<(String, PatternError)>),
    #[error(transparent)]
    Remote(#[from] RemoteError),
}

fn render_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

fn render_compile_errors(errs: &[(String, PatternError)]) -> String {
    errs.iter()
        .map(|(map, e)| format!("in map '{map}': {e}"))
        .collect::<Vec<_>>()
        .join("\n")
}

// ---------------------------------------------------------------------------
// compilation

enum MapRole {
    Node {
        var: String,
        label: String,
    },
    Edge {
        src_var: String,
        dst_var: String,
        label: String,
        directed: bool,
        /// Variables whose binding tuple identifies one edge instance:
        /// the mandatory named variables of the edge map's own pattern.
        identity_vars: Vec<String>,
    },
}

struct CompiledMap {
    name: String,
    role: MapRole,
    /// (property name, variable) pairs from the map header.
    prop_bindings: Vec<(String, String)>,
    pattern: GraphPattern,
    /// Named variables a remote SELECT must return.
    projection: Vec<String>,
}

fn compile_node_map(def: &NodeMapDef, prefixes: &Prefixes) -> Result<CompiledMap, PatternError> {
    let pattern = parse_pattern(&def.pattern.raw_text, prefixes)?;
    let mut projection = vec![def.node_var.clone()];
    for (_, var) in &def.props {
        if !projection.contains(var) {
            projection.push(var.clone());
        }
    }
    Ok(CompiledMap {
        name: def.label.clone(),
        role: MapRole::Node {
            var: def.node_var.clone(),
            label: def.label.clone(),
        },
        prop_bindings: def.props.clone(),
        pattern,
        projection,
    })
}

/// Rename every variable of an imported node pattern except the node
/// variable (which becomes the endpoint variable) to a fresh hidden name.
fn import_node_pattern(
    pattern: &GraphPattern,
    node_var: &str,
    endpoint_var: &str,
    tag: &str,
    used: &mut BTreeSet<String>,
) -> GraphPattern {
    let mut mapping = BTreeMap::new();
    mapping.insert(node_var.to_string(), endpoint_var.to_string());
    let mut k = 0usize;
    for v in pattern.variables() {
        if v == node_var {
            continue;
        }
        let fresh = loop {
            let cand = format!("_{tag}{k}");
            k += 1;
            if !used.contains(&cand) {
                break cand;
            }
        };
        used.insert(fresh.clone());
        mapping.insert(v, fresh);
    }
    pattern.rename_variables(&mapping)
}

fn compile_edge_map(
    def: &EdgeMapDef,
    node_maps: &BTreeMap<&str, (&NodeMapDef, GraphPattern)>,
    prefixes: &Prefixes,
) -> Result<CompiledMap, PatternError> {
    let own = parse_pattern(&def.pattern.raw_text, prefixes)?;
    let identity_vars: Vec<String> = own
        .mandatory_variables()
        .into_iter()
        .filter(|v| !v.starts_with('_'))
        .collect();

    let mut used: BTreeSet<String> = own.variables().into_iter().collect();
    used.insert(def.src_var.clone());
    used.insert(def.dst_var.clone());

    // endpoint node-map patterns constrain the endpoints; their auxiliary
    // variables are hidden so they neither join with nor project over the
    // edge map's own variables
    let mut elements = Vec::new();
    for (label, endpoint_var, tag) in [
        (&def.src_label, &def.src_var, "s"),
        (&def.dst_label, &def.dst_var, "d"),
    ] {
        if let Some(label) = label {
            let (node_def, node_pattern) = &node_maps[label.as_str()];
            let imported = import_node_pattern(
                node_pattern,
                &node_def.node_var,
                endpoint_var,
                tag,
                &mut used,
            );
            elements.extend(imported.elements);
        }
    }
    elements.extend(own.elements);
    let pattern = GraphPattern { elements };

    let mut projection = identity_vars.clone();
    for var in [&def.src_var, &def.dst_var]
        .into_iter()
        .chain(def.edge_var.iter())
        .chain(def.props.iter().map(|(_, v)| v))
    {
        if !projection.contains(var) && !var.starts_with('_') {
            projection.push(var.clone());
        }
    }
    Ok(CompiledMap {
        name: def.edge_label.clone(),
        role: MapRole::Edge {
            src_var: def.src_var.clone(),
            dst_var: def.dst_var.clone(),
            label: def.edge_label.clone(),
            directed: def.directed,
            identity_vars,
        },
        prop_bindings: def.props.clone(),
        pattern,
        projection,
    })
}

fn compile_document(doc: &G2GDocument) -> Result<Vec<CompiledMap>, EngineError> {
    let mut prefixes = Prefixes::with_builtins();
    for (p, iri) in &doc.prefixes {
        prefixes.insert(p.clone(), iri.clone());
    }

    let mut errors = Vec::new();
    let mut node_patterns: BTreeMap<&str, (&NodeMapDef, GraphPattern)> = BTreeMap::new();
    for n in &doc.node_maps {
        match parse_pattern(&n.pattern.raw_text, &prefixes) {
            Ok(p) => {
                node_patterns.insert(n.label.as_str(), (n, p));
            }
            Err(e) => errors.push((n.label.clone(), e)),
        }
    }

    let mut compiled = Vec::new();
    for map in doc.maps_in_order() {
        let result = match map {
            MapRef::Node(n) => compile_node_map(n, &prefixes),
            MapRef::Edge(e) => {
                if e.src_label
                    .iter()
                    .chain(e.dst_label.iter())
                    .any(|l| !node_patterns.contains_key(l.as_str()))
                {
                    // the referenced node map failed to compile; its own
                    // error is already recorded
                    continue;
                }
                compile_edge_map(e, &node_patterns, &prefixes)
            }
        };
        match result {
            Ok(c) => compiled.push(c),
            Err(e) => errors.push((
                match map {
                    MapRef::Node(n) => n.label.clone(),
                    MapRef::Edge(e) => e.edge_label.clone(),
                },
                e,
            )),
        }
    }
    if errors.is_empty() {
        Ok(compiled)
    } else {
        Err(EngineError::Compile(errors))
    }
}

// ---------------------------------------------------------------------------
// value conversion

fn term_to_id(term: &RdfTerm) -> String {
    match term {
        RdfTerm::Iri(i) => i.clone(),
        RdfTerm::Blank(l) => format!("_:{l}"),
        RdfTerm::Literal { lexical, .. } => lexical.clone(),
    }
}

fn term_to_value(term: &RdfTerm) -> PgValue {
    match term {
        RdfTerm::Iri(i) => PgValue::text(i.clone()),
        RdfTerm::Blank(l) => PgValue::text(format!("_:{l}")),
        RdfTerm::Literal {
            lexical,
            datatype: Some(dt),
            ..
        } => match dt.as_str() {
            vocab::XSD_INTEGER => lexical
                .parse::<i64>()
                .map(PgValue::Integer)
                .unwrap_or_else(|_| PgValue::text(lexical.clone())),
            vocab::XSD_DOUBLE | vocab::XSD_DECIMAL | vocab::XSD_FLOAT => lexical
                .parse::<f64>()
                .ok()
                .filter(|f| f.is_finite())
                .map(PgValue::Double)
                .unwrap_or_else(|| PgValue::text(lexical.clone())),
            _ => PgValue::text(lexical.clone()),
        },
        RdfTerm::Literal { lexical, .. } => PgValue::text(lexical.clone()),
    }
}

// ---------------------------------------------------------------------------
// materialization

fn materialize_node(
    map: &CompiledMap,
    var: &str,
    label: &str,
    solutions: &[Solution],
    graph: &mut PropertyGraph,
    warnings: &mut Vec<String>,
) {
    let mut groups: BTreeMap<RdfTerm, Vec<&Solution>> = BTreeMap::new();
    let mut unbound = 0usize;
    for sol in solutions {
        match sol.get(var) {
            Some(term) => groups.entry(term.clone()).or_default().push(sol),
            None => unbound += 1,
        }
    }
    if unbound > 0 {
        warnings.push(format!(
            "map '{}': {unbound} solution(s) left ?{var} unbound and were skipped",
            map.name
        ));
    }
    for (term, sols) in groups {
        let mut node = PgNode::new(term_to_id(&term)).with_label(label);
        for (prop, pvar) in &map.prop_bindings {
            for sol in &sols {
                if let Some(t) = sol.get(pvar) {
                    node.props.push_value(prop, term_to_value(t));
                }
            }
        }
        graph.upsert_node(node);
    }
}

#[allow(clippy::too_many_arguments)]
fn materialize_edge(
    map: &CompiledMap,
    src_var: &str,
    dst_var: &str,
    label: &str,
    directed: bool,
    identity_vars: &[String],
    solutions: &[Solution],
    graph: &mut PropertyGraph,
    warnings: &mut Vec<String>,
) {
    type Key = Vec<Option<RdfTerm>>;
    let mut groups: BTreeMap<Key, Vec<&Solution>> = BTreeMap::new();
    let mut dropped = 0usize;
    for sol in solutions {
        let (src, dst) = match (sol.get(src_var), sol.get(dst_var)) {
            (Some(s), Some(d)) => (s, d),
            _ => {
                dropped += 1;
                continue;
            }
        };
        // undirected instances are identified up to endpoint swap
        let swap = !directed && src > dst;
        let key: Key = identity_vars
            .iter()
            .map(|v| {
                let v = if swap {
                    if v == src_var {
                        dst_var
                    } else if v == dst_var {
                        src_var
                    } else {
                        v
                    }
                } else {
                    v.as_str()
                };
                sol.get(v).cloned()
            })
            .collect();
        groups.entry(key).or_default().push(sol);
    }
    if dropped > 0 {
        warnings.push(format!(
            "map '{}': {dropped} solution(s) lacked an endpoint binding and were dropped",
            map.name
        ));
    }
    for sols in groups.values() {
        let first = sols[0];
        let src = term_to_id(first.get(src_var).unwrap());
        let dst = term_to_id(first.get(dst_var).unwrap());
        // endpoints without a node-map label still need node records
        for id in [&src, &dst] {
            if !graph.contains_node(id) {
                graph.upsert_node(PgNode::new(id.clone()));
            }
        }
        let mut edge = PgEdge::new(src, dst, directed).with_label(label);
        for (prop, pvar) in &map.prop_bindings {
            for sol in sols.iter() {
                if let Some(t) = sol.get(pvar) {
                    edge.props.push_value(prop, term_to_value(t));
                }
            }
        }
        // endpoints exist by construction
        let _ = graph.add_edge(edge);
    }
}

// ---------------------------------------------------------------------------
// solution acquisition

type FetchSlot = Mutex<Option<Result<Vec<Solution>, RemoteError>>>;

fn fetch_remote(
    compiled: &[CompiledMap],
    endpoint: &EndpointConfig,
    parallelism: usize,
) -> Result<Vec<Vec<Solution>>, RemoteError> {
    let workers = parallelism.max(1).min(compiled.len().max(1));
    if workers <= 1 {
        return compiled
            .iter()
            .map(|c| remote::execute(endpoint, &c.pattern.to_sparql_text(), &c.projection))
            .collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<FetchSlot> = compiled.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= compiled.len() {
                    break;
                }
                let c = &compiled[i];
                let result =
                    remote::execute(endpoint, &c.pattern.to_sparql_text(), &c.projection);
                *slots[i].lock().unwrap() = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("worker filled every slot"))
        .collect()
}

// ---------------------------------------------------------------------------
// entry point

pub fn run(doc: &G2GDocument, options: &RunOptions) -> Result<RunReport, EngineError> {
    let diags = validate(doc);
    let hard: Vec<Diagnostic> = diags.iter().filter(|d| !d.is_warning()).cloned().collect();
    if !hard.is_empty() {
        return Err(EngineError::Validation(hard));
    }
    let mut warnings: Vec<String> = diags
        .iter()
        .filter(|d| d.is_warning())
        .map(|d| d.to_string())
        .collect();

    let compiled = compile_document(doc)?;
    let solutions: Vec<Vec<Solution>> = match &options.source {
        Source::Local(store) => compiled
            .iter()
            .map(|c| evaluate(&c.pattern, store))
            .collect(),
        Source::Remote(endpoint) => fetch_remote(&compiled, endpoint, options.parallelism)?,
    };

    let mut graph = PropertyGraph::new();
    for (map, sols) in compiled.iter().zip(&solutions) {
        match &map.role {
            MapRole::Node { var, label } => {
                materialize_node(map, var, label, sols, &mut graph, &mut warnings)
            }
            MapRole::Edge {
                src_var,
                dst_var,
                label,
                directed,
                identity_vars,
            } => materialize_edge(
                map,
                src_var,
                dst_var,
                label,
                *directed,
                identity_vars,
                sols,
                &mut graph,
                &mut warnings,
            ),
        }
    }

    let has_edge_maps = doc
        .maps_in_order()
        .iter()
        .any(|m| matches!(m, MapRef::Edge(_)));
    if !options.include_orphans && has_edge_maps {
        graph.remove_orphans();
    }
    Ok(RunReport { graph, warnings })
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, e) = self.graph.stats();
        write!(f, "{n} nodes, {e} edges")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::g2gml::parse_g2gml;
    use crate::serial::write_pg;
    use crate::turtle::parse_turtle;

    const MINIMAL_G2G: &str = "\
PREFIX : <http://example.org/>
(p:person {name:n})
    ?p a :Person .
    ?p :name ?n .
(p1:person)-[:supervised_by]->(p2:person)
    ?p1 :supervised_by ?p2 .
(p1:person)-[:emailed {year:y, attachment:a}]->(p2:person)
    ?f a :Email ;
       :sender   ?p1 ;
       :receiver ?p2 ;
       :year     ?y .
    OPTIONAL { ?f :attachment ?a }
";

    const MINIMAL_TTL: &str = "\
@prefix : <http://example.org/> .
:person1 a :Person ; :name 'Alice' .
:person2 a :Person ; :name 'Bob' ;
    :supervised_by :person1 .
:email1 a :Email ;
    :sender :person1 ;
    :receiver :person2 ;
    :year 2017 ;
    :attachment '01.pdf' .
";

    fn run_local(g2g: &str, ttl: &str) -> RunReport {
        let doc = parse_g2gml(g2g).unwrap();
        let store = TripleStore::new(parse_turtle(ttl).unwrap());
        run(&doc, &RunOptions::local(store)).unwrap()
    }

    #[test]
    fn minimal_mapping_produces_expected_graph() {
        let report = run_local(MINIMAL_G2G, MINIMAL_TTL);
        let out = write_pg(&report.graph);
        let mut lines: Vec<&str> = out.lines().collect();
        lines.sort_unstable();
        assert_eq!(
            lines,
            vec![
                "\"http://example.org/person1\" -> \"http://example.org/person2\" :emailed year:2017 attachment:\"01.pdf\"",
                "\"http://example.org/person1\" :person name:Alice",
                "\"http://example.org/person2\" -> \"http://example.org/person1\" :supervised_by",
                "\"http://example.org/person2\" :person name:Bob",
            ]
        );
    }

    #[test]
    fn optional_multivalue_groups_into_one_edge() {
        let ttl = "\
@prefix : <http://example.org/> .
:person1 a :Person ; :name 'Alice' .
:person2 a :Person ; :name 'Bob' .
:email1 a :Email ;
    :sender :person1 ;
    :receiver :person2 ;
    :year 2017 ;
    :attachment '01.pdf' , '02.pdf' .
";
        let report = run_local(MINIMAL_G2G, ttl);
        assert_eq!(report.graph.edges().len(), 1);
        let edge = &report.graph.edges()[0];
        assert_eq!(
            edge.props.get("attachment").unwrap(),
            &[PgValue::text("01.pdf"), PgValue::text("02.pdf")]
        );
        assert_eq!(edge.props.get("year").unwrap(), &[PgValue::Integer(2017)]);
    }

    #[test]
    fn distinct_mandatory_bindings_make_distinct_edges() {
        let ttl = "\
@prefix : <http://example.org/> .
:person1 a :Person ; :name 'Alice' .
:person2 a :Person ; :name 'Bob' .
:email1 a :Email ; :sender :person1 ; :receiver :person2 ; :year 2017 .
:email2 a :Email ; :sender :person1 ; :receiver :person2 ; :year 2018 .
";
        let report = run_local(MINIMAL_G2G, ttl);
        let years: Vec<_> = report
            .graph
            .edges()
            .iter()
            .filter(|e| e.labels.contains("emailed"))
            .map(|e| e.props.get("year").unwrap()[0].clone())
            .collect();
        assert_eq!(years, vec![PgValue::Integer(2017), PgValue::Integer(2018)]);
    }

    #[test]
    fn orphan_nodes_are_pruned_when_edge_maps_exist() {
        let ttl = "\
@prefix : <http://example.org/> .
:person1 a :Person ; :name 'Alice' .
:person2 a :Person ; :name 'Bob' ; :supervised_by :person1 .
:person3 a :Person ; :name 'Carol' .
";
        let report = run_local(MINIMAL_G2G, ttl);
        assert!(!report.graph.contains_node("http://example.org/person3"));
        assert_eq!(report.graph.stats(), (2, 1));
    }

    #[test]
    fn include_orphans_keeps_unconnected_nodes() {
        let ttl = "\
@prefix : <http://example.org/> .
:person1 a :Person ; :name 'Alice' .
:person2 a :Person ; :name 'Bob' ; :supervised_by :person1 .
:person3 a :Person ; :name 'Carol' .
";
        let doc = parse_g2gml(MINIMAL_G2G).unwrap();
        let store = TripleStore::new(parse_turtle(ttl).unwrap());
        let mut opts = RunOptions::local(store);
        opts.include_orphans = true;
        let report = run(&doc, &opts).unwrap();
        assert_eq!(report.graph.stats(), (3, 1));
    }

    #[test]
    fn node_only_document_skips_orphan_pruning() {
        let g2g = "\
PREFIX : <http://example.org/>
(p:person {name:n})
    ?p a :Person ; :name ?n .
";
        let ttl = "\
@prefix : <http://example.org/> .
:person1 a :Person ; :name 'Alice' .
";
        let report = run_local(g2g, ttl);
        assert_eq!(report.graph.stats(), (1, 0));
    }

    #[test]
    fn undirected_symmetric_solutions_collapse() {
        let g2g = "\
PREFIX : <http://example.org/>
(m:musician)
    ?m a :Musician .
(m1:musician)-[:same_group]-(m2:musician)
    ?g a :Group ; :member ?m1 , ?m2 .
    FILTER(?m1 != ?m2)
";
        let ttl = "\
@prefix : <http://example.org/> .
:m1 a :Musician . :m2 a :Musician .
:g a :Group ; :member :m1 , :m2 .
";
        let report = run_local(g2g, ttl);
        assert_eq!(report.graph.edges().len(), 1);
        assert!(!report.graph.edges()[0].directed);
    }

    #[test]
    fn labelless_endpoint_creates_implicit_node() {
        let g2g = "\
PREFIX : <http://example.org/>
(p:person)
    ?p a :Person .
(p:person)-[:likes]->(q)
    ?p :likes ?q .
";
        let ttl = "\
@prefix : <http://example.org/> .
:person1 a :Person ; :likes :thing1 .
";
        let report = run_local(g2g, ttl);
        assert_eq!(report.graph.stats(), (2, 1));
        let implicit = report.graph.node("http://example.org/thing1").unwrap();
        assert!(implicit.labels.is_empty());
    }

    #[test]
    fn validation_errors_abort_the_run() {
        let doc = parse_g2gml("(p:person {name:n})\n ?p a ?c .").unwrap();
        let err = run(&doc, &RunOptions::local(TripleStore::default())).unwrap_err();
        assert!(matches!(err, EngineError::Validation(_)));
    }

    #[test]
    fn unused_prefix_surfaces_as_warning() {
        let g2g = "\
PREFIX : <http://example.org/>
PREFIX unused: <http://nowhere/>
(p:person)
    ?p a :Person .
";
        let report = run_local(g2g, "@prefix : <http://example.org/> .\n:p1 a :Person .");
        assert!(report.warnings.iter().any(|w| w.contains("UnusedPrefix")));
    }

    #[test]
    fn blank_node_ids_use_underscore_colon_form() {
        let g2g = "\
PREFIX : <http://example.org/>
(p:person)
    ?p a :Person .
";
        let ttl = "\
@prefix : <http://example.org/> .
[] a :Person .
";
        let report = run_local(g2g, ttl);
        let ids: Vec<_> = report.graph.nodes().map(|n| n.id.clone()).collect();
        assert_eq!(ids.len(), 1);
        assert!(ids[0].starts_with("_:"));
    }
}
