//! Shared token-level scanner for Turtle documents and SPARQL graph patterns.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    /// `<http://...>`
    Iri(String),
    /// `prefix:local` (either part may be empty)
    Pname { prefix: String, local: String },
    /// `_:label`
    Blank(String),
    /// `?name` or `$name`, stored without the sigil
    Var(String),
    /// quoted string content, unescaped
    Str(String),
    /// `@word` — a directive (`@prefix`) or a language tag
    AtWord(String),
    Int(String),
    Dec(String),
    Dbl(String),
    /// the `a` keyword
    A,
    /// bare identifier (keywords such as OPTIONAL, FILTER, lang, ...)
    Word(String),
    Dot,
    Semi,
    Comma,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Slash,
    Eq,
    Neq,
    HatHat,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Iri(i) => write!(f, "<{i}>"),
            Tok::Pname { prefix, local } => write!(f, "{prefix}:{local}"),
            Tok::Blank(l) => write!(f, "_:{l}"),
            Tok::Var(v) => write!(f, "?{v}"),
            Tok::Str(_) => write!(f, "string literal"),
            Tok::AtWord(w) => write!(f, "@{w}"),
            Tok::Int(n) | Tok::Dec(n) | Tok::Dbl(n) => write!(f, "{n}"),
            Tok::A => write!(f, "a"),
            Tok::Word(w) => write!(f, "{w}"),
            Tok::Dot => write!(f, "."),
            Tok::Semi => write!(f, ";"),
            Tok::Comma => write!(f, ","),
            Tok::LBracket => write!(f, "["),
            Tok::RBracket => write!(f, "]"),
            Tok::LBrace => write!(f, "{{"),
            Tok::RBrace => write!(f, "}}"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::Slash => write!(f, "/"),
            Tok::Eq => write!(f, "="),
            Tok::Neq => write!(f, "!="),
            Tok::HatHat => write!(f, "^^"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct LexError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

pub struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

impl Lexer {
    pub fn new(text: &str) -> Self {
        Lexer {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    pub fn tokenize(mut self) -> Result<Vec<Token>, LexError> {
        let mut out = Vec::new();
        loop {
            let t = self.next_token()?;
            let end = t.tok == Tok::Eof;
            out.push(t);
            if end {
                return Ok(out);
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, msg: impl Into<String>) -> LexError {
        LexError {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn next_token(&mut self) -> Result<Token, LexError> {
        self.skip_trivia();
        let (line, col) = (self.line, self.col);
        let tok = |t| Token { tok: t, line, col };
        let c = match self.peek() {
            None => return Ok(tok(Tok::Eof)),
            Some(c) => c,
        };
        match c {
            '<' => {
                self.bump();
                let mut iri = String::new();
                loop {
                    match self.bump() {
                        Some('>') => break,
                        Some('\n') | None => return Err(self.err("unterminated IRI")),
                        Some(c) => iri.push(c),
                    }
                }
                Ok(tok(Tok::Iri(iri)))
            }
            '"' | '\'' => {
                let quote = c;
                self.bump();
                let s = self.read_string(quote)?;
                Ok(tok(Tok::Str(s)))
            }
            '?' | '$' => {
                self.bump();
                let mut name = String::new();
                while let Some(c) = self.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        name.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if name.is_empty() {
                    return Err(self.err("expected variable name after '?'"));
                }
                Ok(tok(Tok::Var(name)))
            }
            '@' => {
                self.bump();
                let mut w = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '-' {
                        w.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if w.is_empty() {
                    return Err(self.err("expected word after '@'"));
                }
                Ok(tok(Tok::AtWord(w)))
            }
            '.' => {
                if self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
                    let n = self.read_number()?;
                    Ok(tok(n))
                } else {
                    self.bump();
                    Ok(tok(Tok::Dot))
                }
            }
            '+' | '-' => {
                let after = self.peek_at(1);
                let digit_follows = after.is_some_and(|c| c.is_ascii_digit())
                    || (after == Some('.') && self.peek_at(2).is_some_and(|c| c.is_ascii_digit()));
                if digit_follows {
                    let n = self.read_number()?;
                    Ok(tok(n))
                } else {
                    Err(self.err(format!("unexpected character '{c}'")))
                }
            }
            c if c.is_ascii_digit() => {
                let n = self.read_number()?;
                Ok(tok(n))
            }
            '_' if self.peek_at(1) == Some(':') => {
                self.bump();
                self.bump();
                let mut label = String::new();
                while let Some(c) = self.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        label.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if label.is_empty() {
                    return Err(self.err("expected blank node label after '_:'"));
                }
                Ok(tok(Tok::Blank(label)))
            }
            ':' => {
                self.bump();
                let local = self.read_local();
                Ok(tok(Tok::Pname {
                    prefix: String::new(),
                    local,
                }))
            }
            ';' => {
                self.bump();
                Ok(tok(Tok::Semi))
            }
            ',' => {
                self.bump();
                Ok(tok(Tok::Comma))
            }
            '[' => {
                self.bump();
                Ok(tok(Tok::LBracket))
            }
            ']' => {
                self.bump();
                Ok(tok(Tok::RBracket))
            }
            '{' => {
                self.bump();
                Ok(tok(Tok::LBrace))
            }
            '}' => {
                self.bump();
                Ok(tok(Tok::RBrace))
            }
            '(' => {
                self.bump();
                Ok(tok(Tok::LParen))
            }
            ')' => {
                self.bump();
                Ok(tok(Tok::RParen))
            }
            '/' => {
                self.bump();
                Ok(tok(Tok::Slash))
            }
            '=' => {
                self.bump();
                Ok(tok(Tok::Eq))
            }
            '!' => {
                self.bump();
                if self.peek() == Some('=') {
                    self.bump();
                    Ok(tok(Tok::Neq))
                } else {
                    Err(self.err("expected '=' after '!'"))
                }
            }
            '^' => {
                self.bump();
                if self.peek() == Some('^') {
                    self.bump();
                    Ok(tok(Tok::HatHat))
                } else {
                    Err(self.err("expected '^^'"))
                }
            }
            c if is_name_start(c) => {
                let mut word = String::new();
                while let Some(c) = self.peek() {
                    if is_name_char(c) {
                        word.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if self.peek() == Some(':') {
                    self.bump();
                    let local = self.read_local();
                    Ok(tok(Tok::Pname {
                        prefix: word,
                        local,
                    }))
                } else if word == "a" {
                    Ok(tok(Tok::A))
                } else {
                    Ok(tok(Tok::Word(word)))
                }
            }
            other => Err(self.err(format!("unexpected character '{other}'"))),
        }
    }

    /// Local part of a prefixed name. Dots are allowed but a trailing dot is
    /// the statement terminator, not part of the name.
    fn read_local(&mut self) -> String {
        let mut local = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' || c == '-' || c == '%' {
                local.push(c);
                self.bump();
            } else if c == '.' {
                // only take the dot if a name character follows
                if self.peek_at(1).is_some_and(|n| n.is_alphanumeric() || n == '_') {
                    local.push(c);
                    self.bump();
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        local
    }

    fn read_string(&mut self, quote: char) -> Result<String, LexError> {
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err("unterminated string literal")),
                Some('\\') => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some('r') => s.push('\r'),
                    Some('\\') => s.push('\\'),
                    Some('"') => s.push('"'),
                    Some('\'') => s.push('\''),
                    Some(other) => {
                        return Err(self.err(format!("unsupported escape '\\{other}'")))
                    }
                    None => return Err(self.err("unterminated string literal")),
                },
                Some(c) if c == quote => return Ok(s),
                Some(c) => s.push(c),
            }
        }
    }

    fn read_number(&mut self) -> Result<Tok, LexError> {
        let mut s = String::new();
        if matches!(self.peek(), Some('+') | Some('-')) {
            s.push(self.bump().unwrap());
        }
        let mut has_dot = false;
        let mut has_exp = false;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                s.push(c);
                self.bump();
            } else if c == '.' && !has_dot && !has_exp {
                // integer followed by statement dot: "2017 ." vs decimal "2.5"
                if self.peek_at(1).is_some_and(|n| n.is_ascii_digit()) {
                    has_dot = true;
                    s.push(c);
                    self.bump();
                } else {
                    break;
                }
            } else if (c == 'e' || c == 'E') && !has_exp {
                let mut off = 1;
                if matches!(self.peek_at(1), Some('+') | Some('-')) {
                    off = 2;
                }
                if self.peek_at(off).is_some_and(|n| n.is_ascii_digit()) {
                    has_exp = true;
                    s.push(c);
                    self.bump();
                    if matches!(self.peek(), Some('+') | Some('-')) {
                        s.push(self.bump().unwrap());
                    }
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        if has_exp {
            Ok(Tok::Dbl(s))
        } else if has_dot {
            Ok(Tok::Dec(s))
        } else {
            Ok(Tok::Int(s))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str) -> Vec<Tok> {
        Lexer::new(text)
            .tokenize()
            .unwrap()
            .into_iter()
            .map(|t| t.tok)
            .collect()
    }

    #[test]
    fn basic_turtle_tokens() {
        let got = toks(":person1 a :Person .");
        assert_eq!(
            got,
            vec![
                Tok::Pname {
                    prefix: "".into(),
                    local: "person1".into()
                },
                Tok::A,
                Tok::Pname {
                    prefix: "".into(),
                    local: "Person".into()
                },
                Tok::Dot,
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn integer_then_statement_dot() {
        let got = toks(":a :y 2017 .");
        assert!(got.contains(&Tok::Int("2017".into())));
        assert_eq!(got[got.len() - 2], Tok::Dot);
    }

    #[test]
    fn decimal_and_double() {
        assert_eq!(toks("2.5")[0], Tok::Dec("2.5".into()));
        assert_eq!(toks("-2.5e3")[0], Tok::Dbl("-2.5e3".into()));
    }

    #[test]
    fn string_with_lang_tag() {
        let got = toks("\"asthma\"@en");
        assert_eq!(got[0], Tok::Str("asthma".into()));
        assert_eq!(got[1], Tok::AtWord("en".into()));
    }

    #[test]
    fn comments_are_skipped() {
        let got = toks("?g wdt:P31 wd:Q7187 ; # \"instance of\" \"gene\"\n   wdt:P353 ?s .");
        assert!(got.contains(&Tok::Semi));
        assert!(!got.iter().any(|t| matches!(t, Tok::Str(_))));
    }

    #[test]
    fn local_name_with_dot() {
        let got = toks("wd:Q15978631 ex:v1.2 .");
        assert_eq!(
            got[0],
            Tok::Pname {
                prefix: "wd".into(),
                local: "Q15978631".into()
            }
        );
        assert_eq!(
            got[1],
            Tok::Pname {
                prefix: "ex".into(),
                local: "v1.2".into()
            }
        );
        assert_eq!(got[2], Tok::Dot);
    }
}
