//! Recursive-descent parser for the Boolean field-query language.
//!
//! ```text
//! query   := or
//! or      := and ("OR" and)*
//! and     := not ("AND"? not)*
//! not     := "NOT" not | primary
//! primary := "(" query ")" | FIELD ":" value | value
//! value   := "\"" phrase "\"" | term | "[" YEAR "TO" YEAR "]"
//! ```
//!
//! Operators are upper-case only. Juxtaposition means AND. Unqualified
//! values search the `all` pseudo-field. Empty input is `MatchAll`.

use std::fmt;

use thiserror::Error;

use super::ast::{QueryAst, QueryField};
use crate::record::{fold, tokenize};

/// Parse failure at a character offset into the query text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct SyntaxError {
    pub offset: usize,
    pub message: String,
}

impl SyntaxError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        SyntaxError {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Quoted(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "{w:?}"),
            Tok::Quoted(q) => write!(f, "\"{q}\""),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::LBracket => f.write_str("'['"),
            Tok::RBracket => f.write_str("']'"),
            Tok::Colon => f.write_str("':'"),
        }
    }
}

fn is_special(c: char) -> bool {
    matches!(c, '(' | ')' | '[' | ']' | ':' | '"')
}

fn lex(input: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let chars: Vec<char> = input.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => toks.push((Tok::LParen, start)),
            ')' => toks.push((Tok::RParen, start)),
            '[' => toks.push((Tok::LBracket, start)),
            ']' => toks.push((Tok::RBracket, start)),
            ':' => toks.push((Tok::Colon, start)),
            '"' => {
                let mut text = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(SyntaxError::new(start, "unterminated quoted phrase")),
                        Some('"') => break,
                        Some('\\') => match chars.get(i + 1) {
                            Some(&next) => {
                                text.push(next);
                                i += 2;
                            }
                            None => {
                                return Err(SyntaxError::new(start, "unterminated quoted phrase"))
                            }
                        },
                        Some(&ch) => {
                            text.push(ch);
                            i += 1;
                        }
                    }
                }
                toks.push((Tok::Quoted(text), start));
            }
            _ => {
                let mut word = String::new();
                while i < chars.len() && !chars[i].is_whitespace() && !is_special(chars[i]) {
                    word.push(chars[i]);
                    i += 1;
                }
                toks.push((Tok::Word(word), start));
                continue;
            }
        }
        i += 1;
    }
    Ok(toks)
}

fn is_operator(tok: &Tok) -> bool {
    matches!(tok, Tok::Word(w) if w == "AND" || w == "OR" || w == "NOT")
}

/// Maximum nesting of groups and negations.
pub const MAX_DEPTH: usize = 128;

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|&(_, o)| o).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn at_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(x)) if x == w)
    }

    fn parse_or(&mut self) -> Result<QueryAst, SyntaxError> {
        let mut children = vec![self.parse_and()?];
        while self.at_word("OR") {
            self.pos += 1;
            children.push(self.parse_and()?);
        }
        Ok(collapse(children, QueryAst::or))
    }

    fn parse_and(&mut self) -> Result<QueryAst, SyntaxError> {
        let mut children = vec![self.parse_not()?];
        loop {
            if self.at_word("AND") {
                self.pos += 1;
                children.push(self.parse_not()?);
                continue;
            }
            match self.peek() {
                None | Some(Tok::RParen) => break,
                Some(Tok::Word(w)) if w == "OR" => break,
                _ => children.push(self.parse_not()?),
            }
        }
        Ok(collapse(children, QueryAst::and))
    }

    fn enter(&mut self) -> Result<(), SyntaxError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(SyntaxError::new(
                self.offset(),
                format!("query nested deeper than {MAX_DEPTH} levels"),
            ));
        }
        Ok(())
    }

    fn parse_not(&mut self) -> Result<QueryAst, SyntaxError> {
        if self.at_word("NOT") {
            self.enter()?;
            self.pos += 1;
            let child = self.parse_not()?;
            self.depth -= 1;
            return Ok(QueryAst::not(child));
        }
        self.parse_primary()
    }

    fn parse_primary(&mut self) -> Result<QueryAst, SyntaxError> {
        let offset = self.offset();
        let Some((tok, _)) = self.next() else {
            return Err(SyntaxError::new(offset, "expected a term after operator"));
        };
        match tok {
            Tok::LParen => {
                if matches!(self.peek(), Some(Tok::RParen)) {
                    return Err(SyntaxError::new(offset, "empty group"));
                }
                self.enter()?;
                let inner = self.parse_or()?;
                self.depth -= 1;
                match self.next() {
                    Some((Tok::RParen, _)) => Ok(inner),
                    Some((t, o)) => Err(SyntaxError::new(o, format!("expected ')', found {t}"))),
                    None => Err(SyntaxError::new(offset, "unbalanced '('")),
                }
            }
            Tok::RParen => Err(SyntaxError::new(offset, "unbalanced ')'")),
            ref t if is_operator(t) => {
                Err(SyntaxError::new(offset, format!("dangling operator {t}")))
            }
            Tok::Word(word) if matches!(self.peek(), Some(Tok::Colon)) => {
                let field: QueryField = word
                    .parse()
                    .map_err(|_| SyntaxError::new(offset, format!("unknown field {word:?}")))?;
                self.pos += 1;
                self.parse_field_value(field, offset)
            }
            Tok::Word(word) => make_term(QueryField::All, &word, offset),
            Tok::Quoted(text) => make_term(QueryField::All, &text, offset),
            t @ (Tok::Colon | Tok::LBracket | Tok::RBracket) => {
                Err(SyntaxError::new(offset, format!("unexpected {t}")))
            }
        }
    }

    fn parse_field_value(
        &mut self,
        field: QueryField,
        field_offset: usize,
    ) -> Result<QueryAst, SyntaxError> {
        let offset = self.offset();
        match self.next() {
            Some((Tok::Word(w), _)) if !is_operator(&Tok::Word(w.clone())) => {
                make_term(field, &w, offset)
            }
            Some((Tok::Quoted(q), _)) => make_term(field, &q, offset),
            Some((Tok::LBracket, _)) => {
                if field != QueryField::Year {
                    return Err(SyntaxError::new(
                        offset,
                        format!("range values are only allowed on the year field, not {field}"),
                    ));
                }
                self.parse_range(offset)
            }
            Some((t, o)) => Err(SyntaxError::new(
                o,
                format!("expected a value for field {field}, found {t}"),
            )),
            None => Err(SyntaxError::new(
                field_offset,
                format!("missing value for field {field}"),
            )),
        }
    }

    fn parse_range(&mut self, open: usize) -> Result<QueryAst, SyntaxError> {
        let from = self.range_year(open)?;
        match self.next() {
            Some((Tok::Word(w), _)) if w == "TO" => {}
            _ => return Err(SyntaxError::new(open, "malformed range: expected TO")),
        }
        let to = self.range_year(open)?;
        match self.next() {
            Some((Tok::RBracket, _)) => {}
            _ => return Err(SyntaxError::new(open, "malformed range: expected ']'")),
        }
        if from > to {
            return Err(SyntaxError::new(
                open,
                format!("malformed range: {from} is after {to}"),
            ));
        }
        Ok(QueryAst::YearRange { from, to })
    }

    fn range_year(&mut self, open: usize) -> Result<i32, SyntaxError> {
        match self.next() {
            Some((Tok::Word(w), o)) => w
                .parse::<i32>()
                .map_err(|_| SyntaxError::new(o, format!("malformed range: {w:?} is not a year"))),
            _ => Err(SyntaxError::new(open, "malformed range: expected a year")),
        }
    }
}

fn collapse(mut children: Vec<QueryAst>, build: fn(Vec<QueryAst>) -> QueryAst) -> QueryAst {
    if children.len() == 1 {
        children.pop().unwrap()
    } else {
        build(children)
    }
}

fn make_term(field: QueryField, text: &str, offset: usize) -> Result<QueryAst, SyntaxError> {
    if field == QueryField::Year {
        let year = text
            .trim()
            .parse::<i32>()
            .map_err(|_| SyntaxError::new(offset, format!("{text:?} is not a year")))?;
        return Ok(QueryAst::term(field, year.to_string()));
    }
    if field.is_tokenized() {
        let mut words = tokenize(text);
        return match words.len() {
            0 => Err(SyntaxError::new(
                offset,
                "term has no searchable characters",
            )),
            1 => Ok(QueryAst::term(field, words.pop().unwrap())),
            _ => Ok(QueryAst::Phrase { field, words }),
        };
    }
    let value = fold(&text.split_whitespace().collect::<Vec<_>>().join(" "));
    if value.is_empty() {
        return Err(SyntaxError::new(
            offset,
            format!("empty value for field {field}"),
        ));
    }
    Ok(QueryAst::term(field, value))
}

/// Parses query text into an AST.
pub fn parse_query(text: &str) -> Result<QueryAst, SyntaxError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Ok(QueryAst::MatchAll);
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count(),
        depth: 0,
    };
    let ast = p.parse_or()?;
    if let Some((t, o)) = p.next() {
        let message = match t {
            Tok::RParen => "unbalanced ')'".to_string(),
            t => format!("unexpected {t}"),
        };
        return Err(SyntaxError::new(o, message));
    }
    Ok(ast)
}
