use std::collections::HashMap;

use super::{is_ident_char, Node, RegexCV, SyntaxError};

/// Named sub-formulas referenced as `@name`.
pub type Macros = HashMap<String, RegexCV>;

pub fn parse_regex_cv(source: &str) -> Result<RegexCV, SyntaxError> {
    parse_with_macros(source, &Macros::new())
}

pub fn parse_with_macros(source: &str, macros: &Macros) -> Result<RegexCV, SyntaxError> {
    let mut parser = Parser { chars: source.chars().collect(), pos: 0, macros };
    let root = parser.alternation()?;
    parser.skip_ws();
    match parser.peek() {
        None => Ok(RegexCV::new(root)),
        Some(')') => Err(parser.error("unbalanced ')'")),
        Some('}') => Err(parser.error("unbalanced '}'")),
        Some(c) => Err(parser.error(format!("unexpected '{c}'"))),
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    macros: &'a Macros,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError { offset: self.pos, message: message.into() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\n' | '\r')) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, want: char) -> Result<(), SyntaxError> {
        self.skip_ws();
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{want}'")))
        }
    }

    fn alternation(&mut self) -> Result<Node, SyntaxError> {
        let mut branches = vec![self.concatenation()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some('|' | '∨') => {
                    self.pos += 1;
                    branches.push(self.concatenation()?);
                }
                _ => break,
            }
        }
        Ok(if branches.len() == 1 { branches.pop().unwrap() } else { Node::alt(branches) })
    }

    fn concatenation(&mut self) -> Result<Node, SyntaxError> {
        let mut parts = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None | Some(')' | '}' | '|' | '∨') => break,
                _ => parts.push(self.postfix()?),
            }
        }
        Ok(Node::concat(parts))
    }

    fn postfix(&mut self) -> Result<Node, SyntaxError> {
        let mut node = self.atom()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => node = Node::star(node),
                Some('+') => node = Node::concat(vec![node.clone(), Node::star(node)]),
                Some('?') => node = Node::alt(vec![node, Node::Epsilon]),
                _ => break,
            }
            self.pos += 1;
        }
        Ok(node)
    }

    fn atom(&mut self) -> Result<Node, SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Err(self.error("unexpected end of input"));
        };
        let node = match c {
            '(' => {
                self.pos += 1;
                let inner = self.alternation()?;
                self.expect(')')?;
                inner
            }
            '[' => self.class()?,
            'Σ' => {
                self.pos += 1;
                Node::Any
            }
            'ε' => {
                self.pos += 1;
                Node::Epsilon
            }
            '∅' => {
                self.pos += 1;
                Node::Empty
            }
            '@' => {
                self.pos += 1;
                let name = self.identifier();
                if name.is_empty() {
                    return Err(self.error("expected a macro name after '@'"));
                }
                match self.macros.get(&name) {
                    Some(r) => r.root().clone(),
                    None => {
                        return Err(SyntaxError {
                            offset: start,
                            message: format!("unknown macro `{name}`"),
                        })
                    }
                }
            }
            '{' => {
                return Err(self.error("empty capture name"));
            }
            ')' | '}' | ']' | '*' | '+' | '?' | '|' | '∨' | '−' => {
                return Err(self.error(format!("unexpected '{c}'")));
            }
            c if is_ident_char(c) => {
                let name = self.identifier();
                if self.peek() == Some('{') {
                    if !(name.starts_with(|ch: char| ch.is_ascii_alphabetic() || ch == '_')) {
                        return Err(SyntaxError {
                            offset: start,
                            message: format!("invalid capture name `{name}`"),
                        });
                    }
                    self.pos += 1;
                    let body = self.alternation()?;
                    self.expect('}')?;
                    Node::capture(name, body)
                } else {
                    // Only the first character of the run is consumed; the
                    // rest are ordinary literals.
                    self.pos = start + 1;
                    Node::Char(c as u8)
                }
            }
            _ => Node::Char(self.literal_char()?),
        };
        self.subtractions(node)
    }

    fn subtractions(&mut self, mut node: Node) -> Result<Node, SyntaxError> {
        loop {
            if !matches!(node, Node::Any | Node::Minus(..)) {
                return Ok(node);
            }
            self.skip_ws();
            match self.peek() {
                Some('−' | '-') => {
                    self.pos += 1;
                    self.skip_ws();
                    if self.peek().is_none() {
                        return Err(self.error("expected a character after '−'"));
                    }
                    let c = self.literal_char()?;
                    node = Node::Minus(Box::new(node), c);
                }
                _ => return Ok(node),
            }
        }
    }

    fn identifier(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(is_ident_char) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    /// One literal character: an escape sequence, `␣`, or a plain ASCII char.
    fn literal_char(&mut self) -> Result<u8, SyntaxError> {
        let Some(c) = self.peek() else {
            return Err(self.error("unexpected end of input"));
        };
        match c {
            '\\' => {
                self.pos += 1;
                let Some(e) = self.peek() else {
                    return Err(self.error("dangling escape"));
                };
                let value = match e {
                    'n' => b'\n',
                    's' => b' ',
                    't' => b'\t',
                    'x' => {
                        let hex: String = self.chars.iter().skip(self.pos + 1).take(2).collect();
                        match u8::from_str_radix(&hex, 16) {
                            Ok(v) if hex.len() == 2 && v < 128 => {
                                self.pos += 2;
                                v
                            }
                            _ => return Err(self.error("invalid \\x escape")),
                        }
                    }
                    e if e.is_ascii_punctuation() || e == ' ' => e as u8,
                    _ => {
                        self.pos -= 1;
                        return Err(self.error(format!("unknown escape '\\{e}'")));
                    }
                };
                self.pos += 1;
                Ok(value)
            }
            '␣' => {
                self.pos += 1;
                Ok(b' ')
            }
            c if c.is_ascii() => {
                self.pos += 1;
                Ok(c as u8)
            }
            _ => Err(self.error(format!("character '{c}' is outside ASCII"))),
        }
    }

    fn class(&mut self) -> Result<Node, SyntaxError> {
        self.pos += 1;
        self.skip_ws();
        let lo = self.class_char()?;
        self.skip_ws();
        match self.peek() {
            Some('-' | ',') => self.pos += 1,
            _ => return Err(self.error("expected '-' or ',' in range")),
        }
        self.skip_ws();
        let hi = self.class_char()?;
        self.expect(']')?;
        if lo > hi {
            return Err(self.error("empty range"));
        }
        Ok(Node::Range(lo, hi))
    }

    fn class_char(&mut self) -> Result<u8, SyntaxError> {
        match self.peek() {
            Some(']') | None => Err(self.error("expected a character in range")),
            _ => self.literal_char(),
        }
    }
}
