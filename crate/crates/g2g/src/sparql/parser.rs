use super::{Expr, GraphPattern, PatternElement, PatternError, PatternTerm, PredPath, TriplePattern};
use crate::lex::{LexError, Lexer, Tok, Token};
use crate::rdf::{vocab, Prefixes, RdfTerm};

impl From<LexError> for PatternError {
    fn from(e: LexError) -> Self {
        PatternError::Syntax {
            line: e.line,
            col: e.col,
            reason: e.msg,
        }
    }
}

/// SPARQL constructs outside the supported subset, rejected explicitly.
const UNSUPPORTED: &[&str] = &[
    "UNION", "MINUS", "GRAPH", "SERVICE", "SELECT", "VALUES", "EXISTS", "NOT", "GROUP", "ORDER",
];

pub fn parse_pattern(raw: &str, prefixes: &Prefixes) -> Result<GraphPattern, PatternError> {
    let tokens = Lexer::new(raw).tokenize()?;
    let mut p = Parser {
        tokens,
        pos: 0,
        prefixes,
        blank_counter: 0,
    };
    let pattern = p.parse_elements()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.err(format!("unexpected '{}'", p.peek().tok)));
    }
    Ok(pattern)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    prefixes: &'a Prefixes,
    blank_counter: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, reason: impl Into<String>) -> PatternError {
        let t = self.peek();
        PatternError::Syntax {
            line: t.line,
            col: t.col,
            reason: reason.into(),
        }
    }

    fn expect(&mut self, want: &Tok) -> Result<(), PatternError> {
        if &self.peek().tok == want {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected '{}', found '{}'", want, self.peek().tok)))
        }
    }

    fn eat_dot(&mut self) {
        if self.peek().tok == Tok::Dot {
            self.bump();
        }
    }

    fn fresh_blank_var(&mut self) -> PatternTerm {
        let v = format!("_b{}", self.blank_counter);
        self.blank_counter += 1;
        PatternTerm::Var(v)
    }

    fn resolve(&self, prefix: &str, local: &str, line: usize) -> Result<String, PatternError> {
        self.prefixes
            .resolve(prefix, local)
            .ok_or_else(|| PatternError::UndefinedPrefix {
                name: prefix.to_string(),
                line,
            })
    }

    fn parse_elements(&mut self) -> Result<GraphPattern, PatternError> {
        let mut elements = Vec::new();
        loop {
            match self.peek().tok.clone() {
                Tok::Eof | Tok::RBrace => return Ok(GraphPattern { elements }),
                Tok::Word(w) if w.eq_ignore_ascii_case("OPTIONAL") => {
                    self.bump();
                    self.expect(&Tok::LBrace)?;
                    let sub = self.parse_elements()?;
                    self.expect(&Tok::RBrace)?;
                    self.eat_dot();
                    elements.push(PatternElement::Optional(sub));
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("FILTER") => {
                    self.bump();
                    self.expect(&Tok::LParen)?;
                    let e = self.parse_expr()?;
                    self.expect(&Tok::RParen)?;
                    self.eat_dot();
                    elements.push(PatternElement::Filter(e));
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("BIND") => {
                    self.bump();
                    self.expect(&Tok::LParen)?;
                    let e = self.parse_expr()?;
                    match self.bump().tok {
                        Tok::Word(w) if w.eq_ignore_ascii_case("AS") => {}
                        other => {
                            return Err(self.err(format!("expected 'AS', found '{other}'")))
                        }
                    }
                    let var = match self.bump().tok {
                        Tok::Var(v) => v,
                        other => {
                            return Err(self.err(format!("expected variable, found '{other}'")))
                        }
                    };
                    self.expect(&Tok::RParen)?;
                    self.eat_dot();
                    elements.push(PatternElement::Bind { expr: e, var });
                }
                Tok::Word(w)
                    if UNSUPPORTED
                        .iter()
                        .any(|u| w.eq_ignore_ascii_case(u)) =>
                {
                    return Err(PatternError::UnsupportedFeature(w.to_uppercase()));
                }
                Tok::LBrace => {
                    return Err(PatternError::UnsupportedFeature(
                        "nested group pattern".into(),
                    ));
                }
                _ => {
                    self.parse_triples_block(&mut elements)?;
                }
            }
        }
    }

    fn parse_triples_block(
        &mut self,
        elements: &mut Vec<PatternElement>,
    ) -> Result<(), PatternError> {
        let subject = self.parse_term(true)?;
        loop {
            let path = self.parse_path()?;
            loop {
                let object = self.parse_term(false)?;
                elements.push(PatternElement::Triple(TriplePattern {
                    s: subject.clone(),
                    path: path.clone(),
                    o: object,
                }));
                if self.peek().tok == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            if self.peek().tok == Tok::Semi {
                self.bump();
                // tolerate '; .' and ';' before '}'
                if matches!(self.peek().tok, Tok::Dot | Tok::RBrace | Tok::Eof) {
                    self.eat_dot();
                    return Ok(());
                }
            } else {
                self.eat_dot();
                return Ok(());
            }
        }
    }

    fn parse_path(&mut self) -> Result<PredPath, PatternError> {
        let first = match self.peek().tok.clone() {
            Tok::Var(v) => {
                self.bump();
                if self.peek().tok == Tok::Slash {
                    return Err(self.err("variables cannot appear in a sequence path"));
                }
                return Ok(PredPath::Var(v));
            }
            Tok::A => {
                self.bump();
                vocab::RDF_TYPE.to_string()
            }
            Tok::Iri(iri) => {
                self.bump();
                iri
            }
            Tok::Pname { prefix, local } => {
                let line = self.peek().line;
                self.bump();
                self.resolve(&prefix, &local, line)?
            }
            other => return Err(self.err(format!("expected predicate, found '{other}'"))),
        };
        let mut iris = vec![first];
        while self.peek().tok == Tok::Slash {
            self.bump();
            let next = match self.peek().tok.clone() {
                Tok::A => {
                    self.bump();
                    vocab::RDF_TYPE.to_string()
                }
                Tok::Iri(iri) => {
                    self.bump();
                    iri
                }
                Tok::Pname { prefix, local } => {
                    let line = self.peek().line;
                    self.bump();
                    self.resolve(&prefix, &local, line)?
                }
                other => {
                    return Err(self.err(format!(
                        "expected predicate in sequence path, found '{other}'"
                    )))
                }
            };
            iris.push(next);
        }
        Ok(PredPath::Seq(iris))
    }

    fn parse_term(&mut self, subject_position: bool) -> Result<PatternTerm, PatternError> {
        match self.peek().tok.clone() {
            Tok::Var(v) => {
                self.bump();
                Ok(PatternTerm::Var(v))
            }
            Tok::Iri(iri) => {
                self.bump();
                Ok(PatternTerm::Const(RdfTerm::iri(iri)))
            }
            Tok::Pname { prefix, local } => {
                let line = self.peek().line;
                self.bump();
                Ok(PatternTerm::Const(RdfTerm::iri(
                    self.resolve(&prefix, &local, line)?,
                )))
            }
            Tok::Blank(label) => {
                self.bump();
                Ok(PatternTerm::Const(RdfTerm::blank(label)))
            }
            Tok::LBracket => {
                self.bump();
                self.expect(&Tok::RBracket)?;
                Ok(self.fresh_blank_var())
            }
            Tok::Str(_) | Tok::Int(_) | Tok::Dec(_) | Tok::Dbl(_) if !subject_position => {
                Ok(PatternTerm::Const(self.parse_literal()?))
            }
            other => Err(self.err(format!(
                "expected {}, found '{other}'",
                if subject_position { "subject" } else { "object" }
            ))),
        }
    }

    fn parse_literal(&mut self) -> Result<RdfTerm, PatternError> {
        match self.bump().tok {
            Tok::Str(s) => match self.peek().tok.clone() {
                Tok::AtWord(lang) => {
                    self.bump();
                    Ok(RdfTerm::lang_literal(s, lang))
                }
                Tok::HatHat => {
                    self.bump();
                    let dt = match self.bump().tok {
                        Tok::Iri(iri) => iri,
                        Tok::Pname { prefix, local } => {
                            let line = self.peek().line;
                            self.resolve(&prefix, &local, line)?
                        }
                        other => {
                            return Err(
                                self.err(format!("expected datatype IRI, found '{other}'"))
                            )
                        }
                    };
                    Ok(RdfTerm::typed_literal(s, dt))
                }
                _ => Ok(RdfTerm::plain(s)),
            },
            Tok::Int(n) => Ok(RdfTerm::typed_literal(n, vocab::XSD_INTEGER)),
            Tok::Dec(n) => Ok(RdfTerm::typed_literal(n, vocab::XSD_DECIMAL)),
            Tok::Dbl(n) => Ok(RdfTerm::typed_literal(n, vocab::XSD_DOUBLE)),
            other => Err(self.err(format!("expected literal, found '{other}'"))),
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, PatternError> {
        let left = self.parse_primary_expr()?;
        match self.peek().tok {
            Tok::Eq => {
                self.bump();
                let right = self.parse_primary_expr()?;
                Ok(Expr::Eq(Box::new(left), Box::new(right)))
            }
            Tok::Neq => {
                self.bump();
                let right = self.parse_primary_expr()?;
                Ok(Expr::Neq(Box::new(left), Box::new(right)))
            }
            _ => Ok(left),
        }
    }

    fn parse_primary_expr(&mut self) -> Result<Expr, PatternError> {
        match self.peek().tok.clone() {
            Tok::Var(v) => {
                self.bump();
                Ok(Expr::Var(v))
            }
            Tok::Str(_) | Tok::Int(_) | Tok::Dec(_) | Tok::Dbl(_) => {
                Ok(Expr::Const(self.parse_literal()?))
            }
            Tok::Iri(iri) => {
                self.bump();
                Ok(Expr::Const(RdfTerm::iri(iri)))
            }
            Tok::Pname { prefix, local } => {
                let line = self.peek().line;
                self.bump();
                Ok(Expr::Const(RdfTerm::iri(
                    self.resolve(&prefix, &local, line)?,
                )))
            }
            Tok::LParen => {
                self.bump();
                let e = self.parse_expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Tok::Word(w) if w.eq_ignore_ascii_case("lang") => {
                self.bump();
                self.expect(&Tok::LParen)?;
                let inner = self.parse_expr()?;
                self.expect(&Tok::RParen)?;
                Ok(Expr::Lang(Box::new(inner)))
            }
            Tok::Word(w) if w.eq_ignore_ascii_case("str") => {
                self.bump();
                self.expect(&Tok::LParen)?;
                let inner = self.parse_expr()?;
                self.expect(&Tok::RParen)?;
                Ok(Expr::Str(Box::new(inner)))
            }
            Tok::Word(w) => Err(PatternError::UnsupportedFeature(format!(
                "function or keyword '{w}' in expression"
            ))),
            other => Err(self.err(format!("expected expression, found '{other}'"))),
        }
    }
}
