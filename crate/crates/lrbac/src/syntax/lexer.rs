//! Tokenizer for the `.lr` concrete syntax.  Line comments start with `//`.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Lowercase-initial identifier (term variables, including `_`).
    Ident(String),
    /// Uppercase-initial identifier (role atoms and base type names).
    UpperIdent(String),
    Int(i64),
    Str(String),
    Lambda,
    Colon,
    Dot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Semi,
    EqEq,
    Eq,
    Arrow,
    Caret,
    Bang,
    Amp,
    Pipe,
    KwLet,
    KwIn,
    KwIf,
    KwThen,
    KwElse,
    KwCheck,
    KwFix,
    KwUp,
    KwDn,
    KwAs,
    KwAmp,
    KwTrue,
    KwFalse,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::UpperIdent(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Str(s) => write!(f, "{s:?}"),
            Tok::Lambda => write!(f, "`\\`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::EqEq => write!(f, "`==`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::Bang => write!(f, "`!`"),
            Tok::Amp => write!(f, "`&`"),
            Tok::Pipe => write!(f, "`|`"),
            Tok::KwLet => write!(f, "`let`"),
            Tok::KwIn => write!(f, "`in`"),
            Tok::KwIf => write!(f, "`if`"),
            Tok::KwThen => write!(f, "`then`"),
            Tok::KwElse => write!(f, "`else`"),
            Tok::KwCheck => write!(f, "`check`"),
            Tok::KwFix => write!(f, "`fix`"),
            Tok::KwUp => write!(f, "`up`"),
            Tok::KwDn => write!(f, "`dn`"),
            Tok::KwAs => write!(f, "`as`"),
            Tok::KwAmp => write!(f, "`amp`"),
            Tok::KwTrue => write!(f, "`true`"),
            Tok::KwFalse => write!(f, "`false`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub pos: Pos,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.pos.line, self.pos.col, self.message)
    }
}

impl std::error::Error for ParseError {}

pub fn err(message: impl Into<String>, pos: Pos) -> ParseError {
    ParseError { message: message.into(), pos }
}

pub fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let mut line = 1usize;
    let mut col = 1usize;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    loop {
        let pos = Pos { line, col };
        let Some(&c) = chars.peek() else {
            out.push((Tok::Eof, pos));
            return Ok(out);
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '/' => {
                bump!();
                if chars.peek() == Some(&'/') {
                    while let Some(&c) = chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        bump!();
                    }
                } else {
                    return Err(err("unexpected `/` (comments are `//` to end of line)", pos));
                }
            }
            '\\' => {
                bump!();
                out.push((Tok::Lambda, pos));
            }
            ':' => {
                bump!();
                out.push((Tok::Colon, pos));
            }
            '.' => {
                bump!();
                out.push((Tok::Dot, pos));
            }
            '(' => {
                bump!();
                out.push((Tok::LParen, pos));
            }
            ')' => {
                bump!();
                out.push((Tok::RParen, pos));
            }
            '[' => {
                bump!();
                out.push((Tok::LBracket, pos));
            }
            ']' => {
                bump!();
                out.push((Tok::RBracket, pos));
            }
            '{' => {
                bump!();
                out.push((Tok::LBrace, pos));
            }
            '}' => {
                bump!();
                out.push((Tok::RBrace, pos));
            }
            ';' => {
                bump!();
                out.push((Tok::Semi, pos));
            }
            '^' => {
                bump!();
                out.push((Tok::Caret, pos));
            }
            '!' => {
                bump!();
                out.push((Tok::Bang, pos));
            }
            '&' => {
                bump!();
                out.push((Tok::Amp, pos));
            }
            '|' => {
                bump!();
                out.push((Tok::Pipe, pos));
            }
            '=' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    out.push((Tok::EqEq, pos));
                } else {
                    out.push((Tok::Eq, pos));
                }
            }
            '-' => {
                bump!();
                if chars.peek() == Some(&'>') {
                    bump!();
                    out.push((Tok::Arrow, pos));
                } else {
                    return Err(err("unexpected `-` (did you mean `->`?)", pos));
                }
            }
            '"' => {
                bump!();
                let mut s = String::new();
                loop {
                    match bump!() {
                        None => return Err(err("unterminated string literal", pos)),
                        Some('"') => break,
                        Some('\\') => match bump!() {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            other => {
                                return Err(err(
                                    format!("unknown string escape `\\{}`", other.unwrap_or(' ')),
                                    pos,
                                ))
                            }
                        },
                        Some(c) => s.push(c),
                    }
                }
                out.push((Tok::Str(s), pos));
            }
            '0'..='9' => {
                let mut n = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        n.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                let v = n.parse::<i64>().map_err(|_| err("integer literal too large", pos))?;
                out.push((Tok::Int(v), pos));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                        name.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                let tok = match name.as_str() {
                    "let" => Tok::KwLet,
                    "in" => Tok::KwIn,
                    "if" => Tok::KwIf,
                    "then" => Tok::KwThen,
                    "else" => Tok::KwElse,
                    "check" => Tok::KwCheck,
                    "fix" => Tok::KwFix,
                    "up" => Tok::KwUp,
                    "dn" => Tok::KwDn,
                    "as" => Tok::KwAs,
                    "amp" => Tok::KwAmp,
                    "true" => Tok::KwTrue,
                    "false" => Tok::KwFalse,
                    _ if name.starts_with(|c: char| c.is_ascii_uppercase()) => {
                        Tok::UpperIdent(name)
                    }
                    _ => Tok::Ident(name),
                };
                out.push((tok, pos));
            }
            other => return Err(err(format!("unexpected character `{other}`"), pos)),
        }
    }
}
