use std::fmt;

use super::{Expr, Ident, IdentError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    True,
    False,
    And,
    Or,
    Post,
    Context,
    Semi,
    LParen,
    RParen,
    Ident(String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::True => f.write_str("`true`"),
            Tok::False => f.write_str("`false`"),
            Tok::And => f.write_str("`and`"),
            Tok::Or => f.write_str("`or`"),
            Tok::Post => f.write_str("`post`"),
            Tok::Context => f.write_str("`context`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, SyntaxError> {
    let mut toks = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        let single = match c {
            ';' => Some(Tok::Semi),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            column += 1;
            toks.push((tok, pos));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            let tok = match word.as_str() {
                "true" => Tok::True,
                "false" => Tok::False,
                "and" => Tok::And,
                "or" => Tok::Or,
                "post" => Tok::Post,
                "context" => Tok::Context,
                _ => Tok::Ident(word),
            };
            toks.push((tok, pos));
            continue;
        }
        return Err(SyntaxError {
            line,
            column,
            message: format!("unexpected character `{c}`"),
        });
    }
    toks.push((Tok::Eof, Pos { line, column }));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error_at(pos: Pos, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }

    fn seq(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.context()?;
        while *self.peek() == Tok::Semi {
            self.bump();
            let rhs = self.context()?;
            lhs = Expr::seq(lhs, rhs);
        }
        Ok(lhs)
    }

    fn context(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.post()?;
        while *self.peek() == Tok::Context {
            self.bump();
            let rhs = self.post()?;
            lhs = Expr::context(lhs, rhs);
        }
        Ok(lhs)
    }

    fn post(&mut self) -> Result<Expr, SyntaxError> {
        let start = self.pos();
        let lhs = self.or()?;
        if *self.peek() != Tok::Post {
            return Ok(lhs);
        }
        let (_, post_pos) = self.bump();
        if !lhs.is_atom() {
            return Err(Self::error_at(
                start,
                format!(
                    "left operand of `post` at {}:{} must be an identifier or constant",
                    post_pos.line, post_pos.column
                ),
            ));
        }
        let goal = self.post()?;
        Ok(Expr::Post(Box::new(lhs), Box::new(goal)))
    }

    fn or(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Expr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.primary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.primary()?;
            lhs = Expr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn primary(&mut self) -> Result<Expr, SyntaxError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::True => Ok(Expr::Const(true)),
            Tok::False => Ok(Expr::Const(false)),
            Tok::Ident(name) => Ident::new(&name).map(Expr::Var).map_err(|e| match e {
                IdentError::Reserved(_) => {
                    Self::error_at(pos, format!("`{name}` is reserved for internal use"))
                }
                other => Self::error_at(pos, other.to_string()),
            }),
            Tok::LParen => {
                let inner = self.seq()?;
                match self.bump() {
                    (Tok::RParen, _) => Ok(inner),
                    (other, at) => Err(Self::error_at(
                        at,
                        format!(
                            "expected `)` to close `(` at {}:{}, found {other}",
                            pos.line, pos.column
                        ),
                    )),
                }
            }
            other => Err(Self::error_at(pos, format!("expected an expression, found {other}"))),
        }
    }
}

/// Parses goal-language text.
pub fn parse(text: &str) -> Result<Expr, SyntaxError> {
    let mut parser = Parser { toks: lex(text)?, at: 0 };
    let expr = parser.seq()?;
    match parser.bump() {
        (Tok::Eof, _) => Ok(expr),
        (Tok::RParen, pos) => Err(Parser::error_at(pos, "unbalanced `)`")),
        (other, pos) => Err(Parser::error_at(pos, format!("unexpected {other}"))),
    }
}
