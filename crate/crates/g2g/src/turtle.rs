//! Turtle-subset reader for local-file mode.
//!
//! Supports the features the mapping fixtures need: prefix declarations,
//! `a`, predicate-object lists with `;` and `,`, anonymous blank nodes
//! `[]`, string literals with language tags and datatypes, bare numeric
//! literals, and comments. Anything else is a hard syntax error rather
//! than a silent skip.

use crate::lex::{LexError, Lexer, Tok, Token};
use crate::rdf::{vocab, Prefixes, RdfTerm, Triple};

#[derive(Debug, Clone, thiserror::Error)]
pub enum TurtleError {
    #[error("syntax error at line {line}, column {col}: {reason}")]
    Syntax {
        line: usize,
        col: usize,
        reason: String,
    },
    #[error("undefined prefix '{name}:' at line {line}")]
    UndefinedPrefix { name: String, line: usize },
}

impl From<LexError> for TurtleError {
    fn from(e: LexError) -> Self {
        TurtleError::Syntax {
            line: e.line,
            col: e.col,
            reason: e.msg,
        }
    }
}

pub fn parse_turtle(text: &str) -> Result<Vec<Triple>, TurtleError> {
    let tokens = Lexer::new(text).tokenize()?;
    Parser {
        tokens,
        pos: 0,
        prefixes: Prefixes::empty(),
        triples: Vec::new(),
        blank_counter: 0,
    }
    .parse_document()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    prefixes: Prefixes,
    triples: Vec<Triple>,
    blank_counter: usize,
}

impl Parser {
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

    fn err(&self, reason: impl Into<String>) -> TurtleError {
        let t = self.peek();
        TurtleError::Syntax {
            line: t.line,
            col: t.col,
            reason: reason.into(),
        }
    }

    fn expect(&mut self, want: &Tok) -> Result<(), TurtleError> {
        if &self.peek().tok == want {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected '{}', found '{}'", want, self.peek().tok)))
        }
    }

    fn fresh_blank(&mut self) -> RdfTerm {
        // reserved namespace for generated labels
        let label = format!("g{}", self.blank_counter);
        self.blank_counter += 1;
        RdfTerm::blank(label)
    }

    fn resolve(&self, prefix: &str, local: &str, line: usize) -> Result<String, TurtleError> {
        self.prefixes
            .resolve(prefix, local)
            .ok_or_else(|| TurtleError::UndefinedPrefix {
                name: prefix.to_string(),
                line,
            })
    }

    fn parse_document(mut self) -> Result<Vec<Triple>, TurtleError> {
        loop {
            match &self.peek().tok {
                Tok::Eof => return Ok(self.triples),
                Tok::AtWord(w) if w.eq_ignore_ascii_case("prefix") => {
                    self.bump();
                    self.parse_prefix_decl(true)?;
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("prefix") => {
                    self.bump();
                    self.parse_prefix_decl(false)?;
                }
                _ => self.parse_statement()?,
            }
        }
    }

    fn parse_prefix_decl(&mut self, dotted: bool) -> Result<(), TurtleError> {
        let (prefix, line) = match self.bump() {
            Token {
                tok: Tok::Pname { prefix, local },
                line,
                ..
            } if local.is_empty() => (prefix, line),
            t => {
                return Err(TurtleError::Syntax {
                    line: t.line,
                    col: t.col,
                    reason: "expected prefix name".into(),
                })
            }
        };
        let iri = match self.bump() {
            Token { tok: Tok::Iri(iri), .. } => iri,
            t => {
                return Err(TurtleError::Syntax {
                    line: t.line,
                    col: t.col,
                    reason: "expected IRI in prefix declaration".into(),
                })
            }
        };
        let _ = line;
        self.prefixes.insert(prefix, iri);
        if dotted {
            self.expect(&Tok::Dot)?;
        } else if self.peek().tok == Tok::Dot {
            self.bump();
        }
        Ok(())
    }

    fn parse_statement(&mut self) -> Result<(), TurtleError> {
        let subject = self.parse_subject()?;
        self.parse_predicate_object_list(&subject)?;
        self.expect(&Tok::Dot)
    }

    fn parse_subject(&mut self) -> Result<RdfTerm, TurtleError> {
        match self.peek().tok.clone() {
            Tok::Iri(iri) => {
                self.bump();
                Ok(RdfTerm::iri(iri))
            }
            Tok::Pname { prefix, local } => {
                let line = self.peek().line;
                self.bump();
                Ok(RdfTerm::iri(self.resolve(&prefix, &local, line)?))
            }
            Tok::Blank(label) => {
                self.bump();
                Ok(RdfTerm::blank(label))
            }
            Tok::LBracket => {
                self.bump();
                self.expect(&Tok::RBracket)?;
                Ok(self.fresh_blank())
            }
            other => Err(self.err(format!("expected subject, found '{other}'"))),
        }
    }

    fn parse_predicate_object_list(&mut self, subject: &RdfTerm) -> Result<(), TurtleError> {
        loop {
            let predicate = self.parse_predicate()?;
            loop {
                let object = self.parse_object()?;
                self.triples
                    .push(Triple::new(subject.clone(), predicate.clone(), object));
                if self.peek().tok == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            if self.peek().tok == Tok::Semi {
                self.bump();
                // tolerate a trailing ';' before the closing dot
                if self.peek().tok == Tok::Dot {
                    return Ok(());
                }
            } else {
                return Ok(());
            }
        }
    }

    fn parse_predicate(&mut self) -> Result<RdfTerm, TurtleError> {
        match self.peek().tok.clone() {
            Tok::A => {
                self.bump();
                Ok(RdfTerm::iri(vocab::RDF_TYPE))
            }
            Tok::Iri(iri) => {
                self.bump();
                Ok(RdfTerm::iri(iri))
            }
            Tok::Pname { prefix, local } => {
                let line = self.peek().line;
                self.bump();
                Ok(RdfTerm::iri(self.resolve(&prefix, &local, line)?))
            }
            other => Err(self.err(format!("expected predicate, found '{other}'"))),
        }
    }

    fn parse_object(&mut self) -> Result<RdfTerm, TurtleError> {
        match self.peek().tok.clone() {
            Tok::Iri(_) | Tok::Pname { .. } | Tok::Blank(_) | Tok::LBracket => {
                self.parse_subject()
            }
            Tok::Str(s) => {
                self.bump();
                match self.peek().tok.clone() {
                    Tok::AtWord(lang) => {
                        self.bump();
                        Ok(RdfTerm::lang_literal(s, lang))
                    }
                    Tok::HatHat => {
                        self.bump();
                        let dt = match self.peek().tok.clone() {
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
                                return Err(
                                    self.err(format!("expected datatype IRI, found '{other}'"))
                                )
                            }
                        };
                        Ok(RdfTerm::typed_literal(s, dt))
                    }
                    _ => Ok(RdfTerm::plain(s)),
                }
            }
            Tok::Int(n) => {
                self.bump();
                Ok(RdfTerm::typed_literal(n, vocab::XSD_INTEGER))
            }
            Tok::Dec(n) => {
                self.bump();
                Ok(RdfTerm::typed_literal(n, vocab::XSD_DECIMAL))
            }
            Tok::Dbl(n) => {
                self.bump();
                Ok(RdfTerm::typed_literal(n, vocab::XSD_DOUBLE))
            }
            other => Err(self.err(format!("expected object, found '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::TripleStore;

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

    #[test]
    fn minimal_example_triple_count() {
        // 2 typed persons + 2 names + 1 supervised_by + 5 email triples
        let triples = parse_turtle(MINIMAL_TTL).unwrap();
        assert_eq!(triples.len(), 10);
        let store = TripleStore::new(triples);
        let typed = store.matching(
            None,
            Some(&RdfTerm::iri(vocab::RDF_TYPE)),
            Some(&RdfTerm::iri("http://example.org/Person")),
        );
        assert_eq!(typed.len(), 2);
    }

    #[test]
    fn bare_integer_is_typed() {
        let triples = parse_turtle("@prefix : <http://x/> .\n:a :b 2017 .").unwrap();
        assert_eq!(
            triples[0].o,
            RdfTerm::typed_literal("2017", vocab::XSD_INTEGER)
        );
    }

    #[test]
    fn bare_decimal_is_typed() {
        let triples = parse_turtle("@prefix : <http://x/> .\n:a :b 2.5 .").unwrap();
        assert_eq!(
            triples[0].o,
            RdfTerm::typed_literal("2.5", vocab::XSD_DECIMAL)
        );
    }

    #[test]
    fn attachments_share_one_blank_subject() {
        let triples = parse_turtle(MULTI_VALUE_TTL).unwrap();
        let att: Vec<_> = triples
            .iter()
            .filter(|t| t.p == RdfTerm::iri("http://example.org/attachment"))
            .collect();
        assert_eq!(att.len(), 2);
        assert_eq!(att[0].s, att[1].s);
        assert!(matches!(att[0].s, RdfTerm::Blank(_)));
    }

    #[test]
    fn undefined_prefix_is_reported() {
        let err = parse_turtle(":a :b :c .").unwrap_err();
        assert!(matches!(err, TurtleError::UndefinedPrefix { .. }));
    }

    #[test]
    fn sparql_style_prefix_and_lang_tag() {
        let triples =
            parse_turtle("PREFIX ex: <http://x/>\nex:a ex:label \"asthma\"@en .").unwrap();
        assert_eq!(triples[0].o, RdfTerm::lang_literal("asthma", "en"));
    }

    #[test]
    fn unsupported_syntax_is_an_error() {
        assert!(parse_turtle("@prefix : <http://x/> .\n:a :b (1 2) .").is_err());
    }

    #[test]
    fn reparse_is_isomorphic_modulo_blank_labels() {
        let triples = parse_turtle(MINIMAL_TTL).unwrap();
        let mut serialized = String::new();
        for t in &triples {
            serialized.push_str(&format!("{} {} {} .\n", t.s, t.p, t.o));
        }
        let reparsed = parse_turtle(&serialized).unwrap();
        assert_eq!(reparsed.len(), triples.len());
    }
}
