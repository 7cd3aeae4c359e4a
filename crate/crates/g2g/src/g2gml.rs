//! Lexer, parser, and validator for the G2GML mapping language.
//!
//! A document is a sequence of PREFIX declarations followed by node and
//! edge maps. Each map is a single-line PG-pattern header followed by an
//! indented SPARQL graph-pattern body. Header variables are written
//! without the `?` sigil; `$`-sigil variables in bodies are normalized to
//! `?` form.

use std::fmt;

#[derive(Debug, Clone, thiserror::Error)]
pub enum G2gmlError {
    #[error("syntax error at line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("map header at line {line} has no indented RDF pattern")]
    EmptyPattern { line: usize },
    #[error("indented block at line {line} precedes any map header")]
    DanglingIndent { line: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RdfPatternSrc {
    /// Body text with the common leading indentation stripped and `$`
    /// sigils normalized to `?`.
    pub raw_text: String,
    /// Variable names (sans sigil) in first-occurrence order.
    pub variables: Vec<String>,
}

impl RdfPatternSrc {
    pub fn contains_var(&self, name: &str) -> bool {
        self.variables.iter().any(|v| v == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeMapDef {
    pub node_var: String,
    pub label: String,
    /// (property name, pattern variable) in declaration order.
    pub props: Vec<(String, String)>,
    pub pattern: RdfPatternSrc,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMapDef {
    pub src_var: String,
    pub dst_var: String,
    /// Endpoint labels reference node maps; omitting a label leaves the
    /// endpoint unconstrained.
    pub src_label: Option<String>,
    pub dst_label: Option<String>,
    pub edge_var: Option<String>,
    pub edge_label: String,
    pub directed: bool,
    pub props: Vec<(String, String)>,
    pub pattern: RdfPatternSrc,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct G2GDocument {
    pub prefixes: Vec<(String, String)>,
    pub node_maps: Vec<NodeMapDef>,
    pub edge_maps: Vec<EdgeMapDef>,
    /// Document order of the maps, used when materialization must follow
    /// source order.
    map_order: Vec<(bool, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapRef<'a> {
    Node(&'a NodeMapDef),
    Edge(&'a EdgeMapDef),
}

impl G2GDocument {
    /// Maps in source order, node and edge maps interleaved as written.
    pub fn maps_in_order(&self) -> Vec<MapRef<'_>> {
        self.map_order
            .iter()
            .map(|(is_node, idx)| {
                if *is_node {
                    MapRef::Node(&self.node_maps[*idx])
                } else {
                    MapRef::Edge(&self.edge_maps[*idx])
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    DuplicateLabel(String),
    UndefinedNodeLabel(String),
    UnboundHeaderVariable { map: String, var: String },
    SameEndpointVariable { map: String },
    UnusedPrefix(String),
}

impl Diagnostic {
    pub fn is_warning(&self) -> bool {
        matches!(self, Diagnostic::UnusedPrefix(_))
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::DuplicateLabel(l) => {
                write!(f, "error: DuplicateLabel: node-map label '{l}' is declared more than once")
            }
            Diagnostic::UndefinedNodeLabel(l) => write!(
                f,
                "error: UndefinedNodeLabel: edge map references node label '{l}' which no node map defines"
            ),
            Diagnostic::UnboundHeaderVariable { map, var } => write!(
                f,
                "error: UnboundHeaderVariable: map '{map}' uses variable '{var}' absent from its RDF pattern"
            ),
            Diagnostic::SameEndpointVariable { map } => write!(
                f,
                "error: SameEndpointVariable: edge map '{map}' uses the same variable for both endpoints"
            ),
            Diagnostic::UnusedPrefix(p) => {
                write!(f, "warning: UnusedPrefix: prefix '{p}:' is never used")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// comment stripping and variable scanning

/// Strip a `#` comment, honoring single/double quoted strings and `<>`
/// IRIs (prefix IRIs routinely contain `#`).
fn strip_comment(line: &str) -> &str {
    let mut in_double = false;
    let mut in_single = false;
    let mut in_angle = false;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        if escaped {
            escaped = false;
            continue;
        }
        match c {
            '\\' if in_double || in_single => escaped = true,
            '"' if !in_single && !in_angle => in_double = !in_double,
            '\'' if !in_double && !in_angle => in_single = !in_single,
            '<' if !in_double && !in_single => in_angle = true,
            '>' if in_angle => in_angle = false,
            '#' if !in_double && !in_single && !in_angle => return &line[..i],
            _ => {}
        }
    }
    line
}

/// Normalize `$` sigils to `?` and collect variable names, skipping
/// string literals.
fn scan_pattern_text(text: &str) -> (String, Vec<String>) {
    let mut out = String::with_capacity(text.len());
    let mut vars = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut quote: Option<char> = None;
    while i < chars.len() {
        let c = chars[i];
        match quote {
            Some(q) => {
                out.push(c);
                if c == '\\' && i + 1 < chars.len() {
                    out.push(chars[i + 1]);
                    i += 1;
                } else if c == q {
                    quote = None;
                }
            }
            None => match c {
                '"' | '\'' => {
                    quote = Some(c);
                    out.push(c);
                }
                '?' | '$' => {
                    out.push('?');
                    let mut name = String::new();
                    while i + 1 < chars.len()
                        && (chars[i + 1].is_alphanumeric() || chars[i + 1] == '_')
                    {
                        i += 1;
                        name.push(chars[i]);
                        out.push(chars[i]);
                    }
                    if !name.is_empty() && !vars.contains(&name) {
                        vars.push(name);
                    }
                }
                c => out.push(c),
            },
        }
        i += 1;
    }
    (out, vars)
}

// ---------------------------------------------------------------------------
// header parsing

struct HeaderCursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    src: &'a str,
}

impl<'a> HeaderCursor<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        HeaderCursor {
            chars: src.chars().collect(),
            pos: 0,
            line,
            src,
        }
    }

    fn err(&self, reason: impl Into<String>) -> G2gmlError {
        G2gmlError::Syntax {
            line: self.line,
            reason: format!("{} (in header '{}')", reason.into(), self.src.trim()),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), G2gmlError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn ident(&mut self) -> Result<String, G2gmlError> {
        self.skip_ws();
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        if s.is_empty() {
            Err(self.err("expected identifier"))
        } else {
            Ok(s)
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    /// `{name:var, name:var}` — whitespace around ':' and ',' optional.
    fn prop_list(&mut self) -> Result<Vec<(String, String)>, G2gmlError> {
        let mut props = Vec::new();
        if !self.eat('{') {
            return Ok(props);
        }
        loop {
            let name = self.ident()?;
            self.expect(':')?;
            let var = self.ident()?;
            props.push((name, var));
            if self.eat(',') {
                continue;
            }
            self.expect('}')?;
            return Ok(props);
        }
    }

    /// `(var:label?)` — endpoint or node head.
    fn endpoint(&mut self) -> Result<Endpoint, G2gmlError> {
        self.expect('(')?;
        let var = self.ident()?;
        let label = if self.eat(':') {
            Some(self.ident()?)
        } else {
            None
        };
        let props = self.prop_list()?;
        self.expect(')')?;
        Ok((var, label, props))
    }
}

/// `(variable, optional label, properties)` from a parenthesized head.
type Endpoint = (String, Option<String>, Vec<(String, String)>);

enum Header {
    Node(NodeMapDef),
    Edge(EdgeMapDef),
}

fn parse_header(line_text: &str, line: usize) -> Result<Header, G2gmlError> {
    let mut cur = HeaderCursor::new(line_text, line);
    let (var, label, props) = cur.endpoint()?;
    if cur.at_end() {
        let label = label.ok_or_else(|| {
            cur.err("node map requires a label (it names the map for edge references)")
        })?;
        return Ok(Header::Node(NodeMapDef {
            node_var: var,
            label,
            props,
            pattern: RdfPatternSrc {
                raw_text: String::new(),
                variables: Vec::new(),
            },
            line,
        }));
    }
    if !props.is_empty() {
        return Err(cur.err("property blocks are not allowed on edge endpoints"));
    }
    cur.expect('-')?;
    cur.expect('[')?;
    cur.skip_ws();
    let edge_var = if cur.peek() != Some(':') {
        Some(cur.ident()?)
    } else {
        None
    };
    cur.expect(':')?;
    let edge_label = cur.ident()?;
    let edge_props = cur.prop_list()?;
    cur.expect(']')?;
    cur.expect('-')?;
    let directed = cur.eat('>');
    let (dst_var, dst_label, dst_props) = cur.endpoint()?;
    if !dst_props.is_empty() {
        return Err(cur.err("property blocks are not allowed on edge endpoints"));
    }
    if !cur.at_end() {
        return Err(cur.err("unexpected trailing text after edge pattern"));
    }
    Ok(Header::Edge(EdgeMapDef {
        src_var: var,
        dst_var,
        src_label: label,
        dst_label,
        edge_var,
        edge_label,
        directed,
        props: edge_props,
        pattern: RdfPatternSrc {
            raw_text: String::new(),
            variables: Vec::new(),
        },
        line,
    }))
}

fn parse_prefix_line(line_text: &str, line: usize) -> Result<(String, String), G2gmlError> {
    let rest = &line_text.trim_start()["PREFIX".len()..];
    let rest = rest.trim_start();
    let colon = rest.find(':').ok_or(G2gmlError::Syntax {
        line,
        reason: "expected ':' in PREFIX declaration".into(),
    })?;
    let prefix = rest[..colon].trim();
    if !prefix
        .chars()
        .all(|c| c.is_alphanumeric() || c == '_' || c == '-')
    {
        return Err(G2gmlError::Syntax {
            line,
            reason: format!("invalid prefix name '{prefix}'"),
        });
    }
    let rest = rest[colon + 1..].trim();
    let iri = rest
        .strip_prefix('<')
        .and_then(|r| r.strip_suffix('>'))
        .ok_or(G2gmlError::Syntax {
            line,
            reason: "expected '<IRI>' in PREFIX declaration".into(),
        })?;
    Ok((prefix.to_string(), iri.to_string()))
}

// ---------------------------------------------------------------------------
// document parsing

pub fn parse_g2gml(text: &str) -> Result<G2GDocument, G2gmlError> {
    let mut doc = G2GDocument::default();
    let mut current: Option<(Header, Vec<String>)> = None;

    let finalize = |doc: &mut G2GDocument,
                        current: Option<(Header, Vec<String>)>|
     -> Result<(), G2gmlError> {
        if let Some((header, body)) = current {
            let header_line = match &header {
                Header::Node(n) => n.line,
                Header::Edge(e) => e.line,
            };
            if body.iter().all(|l| l.trim().is_empty()) {
                return Err(G2gmlError::EmptyPattern { line: header_line });
            }
            let pattern = build_pattern(&body);
            match header {
                Header::Node(mut n) => {
                    n.pattern = pattern;
                    doc.map_order.push((true, doc.node_maps.len()));
                    doc.node_maps.push(n);
                }
                Header::Edge(mut e) => {
                    e.pattern = pattern;
                    doc.map_order.push((false, doc.edge_maps.len()));
                    doc.edge_maps.push(e);
                }
            }
        }
        Ok(())
    };

    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw_line);
        if line.trim().is_empty() {
            continue;
        }
        let indented = line.starts_with(|c: char| c.is_whitespace());
        if indented {
            match current.as_mut() {
                Some((_, body)) => body.push(line.to_string()),
                None => return Err(G2gmlError::DanglingIndent { line: lineno }),
            }
            continue;
        }
        // a new top-level declaration closes the current map
        let upper = line.trim_start().to_uppercase();
        if upper.starts_with("PREFIX") {
            if current.is_some() || !doc.node_maps.is_empty() || !doc.edge_maps.is_empty() {
                finalize(&mut doc, current.take())?;
                return Err(G2gmlError::Syntax {
                    line: lineno,
                    reason: "PREFIX declarations must precede the first map".into(),
                });
            }
            doc.prefixes.push(parse_prefix_line(line, lineno)?);
            continue;
        }
        finalize(&mut doc, current.take())?;
        if !line.starts_with('(') {
            return Err(G2gmlError::Syntax {
                line: lineno,
                reason: "expected a PREFIX declaration or a map header starting with '('".into(),
            });
        }
        current = Some((parse_header(line, lineno)?, Vec::new()));
    }
    finalize(&mut doc, current.take())?;
    Ok(doc)
}

fn build_pattern(body: &[String]) -> RdfPatternSrc {
    let indent = body
        .iter()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.len() - l.trim_start().len())
        .min()
        .unwrap_or(0);
    let dedented: Vec<String> = body
        .iter()
        .map(|l| {
            if l.len() >= indent {
                l.chars().skip(indent).collect()
            } else {
                l.trim_start().to_string()
            }
        })
        .collect();
    let (raw_text, variables) = scan_pattern_text(&dedented.join("\n"));
    RdfPatternSrc {
        raw_text,
        variables,
    }
}

// ---------------------------------------------------------------------------
// validation

pub fn validate(doc: &G2GDocument) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut seen = Vec::new();
    for n in &doc.node_maps {
        if seen.contains(&n.label) {
            if !diags.contains(&Diagnostic::DuplicateLabel(n.label.clone())) {
                diags.push(Diagnostic::DuplicateLabel(n.label.clone()));
            }
        } else {
            seen.push(n.label.clone());
        }
        check_header_vars(
            &n.label,
            [&n.node_var]
                .into_iter()
                .chain(n.props.iter().map(|(_, v)| v)),
            &n.pattern,
            &mut diags,
        );
    }
    for e in &doc.edge_maps {
        for label in [&e.src_label, &e.dst_label].into_iter().flatten() {
            if !doc.node_maps.iter().any(|n| &n.label == label)
                && !diags.contains(&Diagnostic::UndefinedNodeLabel(label.clone()))
            {
                diags.push(Diagnostic::UndefinedNodeLabel(label.clone()));
            }
        }
        if e.src_var == e.dst_var {
            diags.push(Diagnostic::SameEndpointVariable {
                map: e.edge_label.clone(),
            });
        }
        check_header_vars(
            &e.edge_label,
            [&e.src_var, &e.dst_var]
                .into_iter()
                .chain(e.edge_var.iter())
                .chain(e.props.iter().map(|(_, v)| v)),
            &e.pattern,
            &mut diags,
        );
    }
    'prefixes: for (prefix, _) in &doc.prefixes {
        let needle = format!("{prefix}:");
        for pattern in doc
            .node_maps
            .iter()
            .map(|n| &n.pattern)
            .chain(doc.edge_maps.iter().map(|e| &e.pattern))
        {
            if pattern_uses_prefix(&pattern.raw_text, &needle) {
                continue 'prefixes;
            }
        }
        diags.push(Diagnostic::UnusedPrefix(prefix.clone()));
    }
    diags
}

fn check_header_vars<'a>(
    map: &str,
    vars: impl Iterator<Item = &'a String>,
    pattern: &RdfPatternSrc,
    diags: &mut Vec<Diagnostic>,
) {
    for var in vars {
        if !pattern.contains_var(var) {
            diags.push(Diagnostic::UnboundHeaderVariable {
                map: map.to_string(),
                var: var.clone(),
            });
        }
    }
}

fn pattern_uses_prefix(text: &str, needle: &str) -> bool {
    // occurrences inside string literals do not count
    let mut quote: Option<char> = None;
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match quote {
            Some(q) => {
                if c == '\\' {
                    i += 1;
                } else if c == q {
                    quote = None;
                }
            }
            None => {
                if c == '"' || c == '\'' {
                    quote = Some(c);
                } else if text[..].len() - i >= needle.len()
                    && chars[i..].starts_with(&needle.chars().collect::<Vec<_>>()[..])
                {
                    let preceded_by_name = i > 0 && (chars[i - 1].is_alphanumeric() || chars[i - 1] == '_');
                    if !preceded_by_name || needle.len() > 1 {
                        return true;
                    }
                }
            }
        }
        i += 1;
    }
    false
}

// ---------------------------------------------------------------------------
// pretty printing

impl fmt::Display for G2GDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (prefix, iri) in &self.prefixes {
            writeln!(f, "PREFIX {prefix}: <{iri}>")?;
        }
        let render_props = |props: &[(String, String)]| -> String {
            if props.is_empty() {
                String::new()
            } else {
                let inner: Vec<String> =
                    props.iter().map(|(k, v)| format!("{k}:{v}")).collect();
                format!(" {{{}}}", inner.join(", "))
            }
        };
        let render_body = |f: &mut fmt::Formatter<'_>, pattern: &RdfPatternSrc| -> fmt::Result {
            for line in pattern.raw_text.lines() {
                writeln!(f, "    {line}")?;
            }
            Ok(())
        };
        for (is_node, idx) in &self.map_order {
            if *is_node {
                let n = &self.node_maps[*idx];
                writeln!(f, "({}:{}{})", n.node_var, n.label, render_props(&n.props))?;
                render_body(f, &n.pattern)?;
            } else {
                let e = &self.edge_maps[*idx];
                let src_label = e
                    .src_label
                    .as_ref()
                    .map(|l| format!(":{l}"))
                    .unwrap_or_default();
                let dst_label = e
                    .dst_label
                    .as_ref()
                    .map(|l| format!(":{l}"))
                    .unwrap_or_default();
                let edge_var = e.edge_var.clone().unwrap_or_default();
                writeln!(
                    f,
                    "({}{})-[{}:{}{}]-{}({}{})",
                    e.src_var,
                    src_label,
                    edge_var,
                    e.edge_label,
                    render_props(&e.props),
                    if e.directed { ">" } else { "" },
                    e.dst_var,
                    dst_label,
                )?;
                render_body(f, &e.pattern)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const MINIMAL_G2G: &str = "\
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

    const MUSIC_G2G: &str = "\
PREFIX dbo: <http://dbpedia.org/ontology/>
PREFIX schema: <http://schema.org/>
PREFIX foaf: <http://xmlns.com/foaf/0.1/>
(m:musician {name:n, hometown:h})                            # PG Pattern
    ?m rdf:type foaf:Person , dbo:MusicalArtist ;            # RDF Pattern
       rdfs:label ?n . FILTER(lang(?n) = \"en\") .
    OPTIONAL { ?m dbo:hometown/rdfs:label ?h . FILTER(lang(?h) = \"en\") }
(m1:musician)-[:same_group {name:n, since:s}]-(m2:musician)   # PG Pattern
    ?g rdf:type schema:MusicGroup ;                          # RDF Pattern
       dbo:bandMember ?m1 , ?m2 . FILTER(?m1 != ?m2)
    OPTIONAL { ?g rdfs:label ?n . FILTER(lang(?n) = \"en\")}
    OPTIONAL { ?g dbo:activeYearsStartYear ?s }
";

    #[test]
    fn minimal_example_parses() {
        let doc = parse_g2gml(MINIMAL_G2G).unwrap();
        assert_eq!(doc.prefixes, vec![("".to_string(), "http://example.org/".to_string())]);
        assert_eq!(doc.node_maps.len(), 1);
        assert_eq!(doc.edge_maps.len(), 2);

        let person = &doc.node_maps[0];
        assert_eq!(person.label, "person");
        assert_eq!(person.node_var, "p");
        assert_eq!(person.props, vec![("name".to_string(), "n".to_string())]);
        assert_eq!(person.pattern.variables, vec!["p", "n"]);

        let supervised = &doc.edge_maps[0];
        assert_eq!(supervised.edge_label, "supervised_by");
        assert!(supervised.directed);
        assert!(supervised.props.is_empty());
        assert_eq!(supervised.edge_var, None);

        let emailed = &doc.edge_maps[1];
        assert_eq!(emailed.edge_label, "emailed");
        assert!(emailed.directed);
        assert_eq!(
            emailed.props,
            vec![
                ("year".to_string(), "y".to_string()),
                ("attachment".to_string(), "a".to_string())
            ]
        );
    }

    #[test]
    fn undirected_edge_map_with_props() {
        let doc = parse_g2gml(MUSIC_G2G).unwrap();
        let e = &doc.edge_maps[0];
        assert_eq!(e.edge_label, "same_group");
        assert!(!e.directed);
        assert_eq!(
            e.props,
            vec![
                ("name".to_string(), "n".to_string()),
                ("since".to_string(), "s".to_string())
            ]
        );
        assert_eq!(e.src_label.as_deref(), Some("musician"));
    }

    #[test]
    fn propless_node_map() {
        let doc = parse_g2gml("(p:person)\n ?p a ?c .").unwrap();
        assert!(doc.node_maps[0].props.is_empty());
    }

    #[test]
    fn dollar_variables_are_normalized() {
        let doc = parse_g2gml("(p:person)\n $p a $c .").unwrap();
        assert_eq!(doc.node_maps[0].pattern.raw_text, "?p a ?c .");
        assert_eq!(doc.node_maps[0].pattern.variables, vec!["p", "c"]);
    }

    #[test]
    fn empty_pattern_is_an_error() {
        let err = parse_g2gml("(p:person)\n(q:thing)\n ?q a ?c .").unwrap_err();
        assert!(matches!(err, G2gmlError::EmptyPattern { line: 1 }));
    }

    #[test]
    fn dangling_indent_is_an_error() {
        let err = parse_g2gml("  ?p a ?c .").unwrap_err();
        assert!(matches!(err, G2gmlError::DanglingIndent { line: 1 }));
    }

    #[test]
    fn interleaved_prefix_is_rejected() {
        let err = parse_g2gml(
            "(p:person)\n ?p a ?c .\nPREFIX : <http://example.org/>\n(q:thing)\n ?q a ?c .",
        )
        .unwrap_err();
        assert!(matches!(err, G2gmlError::Syntax { line: 3, .. }));
    }

    #[test]
    fn valid_document_has_no_diagnostics() {
        let doc = parse_g2gml(MINIMAL_G2G).unwrap();
        assert_eq!(validate(&doc), vec![]);
    }

    #[test]
    fn duplicate_label_diagnostic() {
        let doc =
            parse_g2gml("(p:person)\n ?p a ?c .\n(q:person)\n ?q a ?c .").unwrap();
        assert_eq!(validate(&doc), vec![Diagnostic::DuplicateLabel("person".into())]);
    }

    #[test]
    fn undefined_node_label_diagnostic() {
        let doc = parse_g2gml(
            "(a:author)\n ?a a ?c .\n(a:author)-[:wrote]->(b:book)\n ?a ?w ?b .",
        )
        .unwrap();
        assert_eq!(
            validate(&doc),
            vec![Diagnostic::UndefinedNodeLabel("book".into())]
        );
    }

    #[test]
    fn header_variable_missing_from_pattern() {
        let doc = parse_g2gml("(p:person {name:n})\n ?p a ?c .").unwrap();
        assert_eq!(
            validate(&doc),
            vec![Diagnostic::UnboundHeaderVariable {
                map: "person".into(),
                var: "n".into()
            }]
        );
    }

    #[test]
    fn unused_prefix_is_a_warning() {
        let doc = parse_g2gml(
            "PREFIX unused: <http://nowhere/>\n(p:person)\n ?p a ?c .",
        )
        .unwrap();
        let diags = validate(&doc);
        assert_eq!(diags, vec![Diagnostic::UnusedPrefix("unused".into())]);
        assert!(diags[0].is_warning());
    }

    #[test]
    fn pretty_print_reparses_to_equal_document() {
        for src in [MINIMAL_G2G, MUSIC_G2G] {
            let doc = parse_g2gml(src).unwrap();
            let printed = doc.to_string();
            let reparsed = parse_g2gml(&printed).unwrap();
            assert_eq!(doc.prefixes, reparsed.prefixes);
            assert_eq!(doc.node_maps.len(), reparsed.node_maps.len());
            assert_eq!(doc.edge_maps.len(), reparsed.edge_maps.len());
            for (a, b) in doc.edge_maps.iter().zip(&reparsed.edge_maps) {
                assert_eq!(a.edge_label, b.edge_label);
                assert_eq!(a.directed, b.directed);
                assert_eq!(a.props, b.props);
                assert_eq!(a.pattern.variables, b.pattern.variables);
            }
        }
    }

    #[test]
    fn comment_with_quotes_is_stripped() {
        let doc = parse_g2gml(
            "(g:human_gene {symbol: s})\n    ?g wdt:P31 wd:Q7187 ;      # \"instance of\" \"gene\"\n       wdt:P353 ?s .",
        )
        .unwrap();
        assert!(!doc.node_maps[0].pattern.raw_text.contains("instance"));
        assert_eq!(doc.node_maps[0].pattern.variables, vec!["g", "s"]);
    }

    #[test]
    fn prefix_iri_with_hash_survives_comment_stripping() {
        let doc = parse_g2gml(
            "PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>\n(p:person)\n ?p rdf:type ?c .",
        )
        .unwrap();
        assert_eq!(doc.prefixes[0].1, "http://www.w3.org/1999/02/22-rdf-syntax-ns#");
    }
}
