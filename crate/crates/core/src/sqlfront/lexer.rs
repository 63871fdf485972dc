// Copyright 2026 The predjoin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Tokenizer for the SQL subset.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(i64),
    Str(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Semicolon,
    Star,
    Plus,
    Minus,
    Slash,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("'{s}'"),
            TokenKind::Int(i) => i.to_string(),
            TokenKind::Str(s) => format!("string '{s}'"),
            TokenKind::LParen => "'('".into(),
            TokenKind::RParen => "')'".into(),
            TokenKind::Comma => "','".into(),
            TokenKind::Dot => "'.'".into(),
            TokenKind::Semicolon => "';'".into(),
            TokenKind::Star => "'*'".into(),
            TokenKind::Plus => "'+'".into(),
            TokenKind::Minus => "'-'".into(),
            TokenKind::Slash => "'/'".into(),
            TokenKind::Eq => "'='".into(),
            TokenKind::Ne => "'<>'".into(),
            TokenKind::Lt => "'<'".into(),
            TokenKind::Le => "'<='".into(),
            TokenKind::Gt => "'>'".into(),
            TokenKind::Ge => "'>='".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }

    /// Case-insensitive keyword test.
    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self, TokenKind::Ident(s) if s.eq_ignore_ascii_case(kw))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Byte offset of the token's first character.
    pub position: usize,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = |kind| Token { kind, position: start };
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'-' if bytes.get(i + 1) == Some(&b'-') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            b'(' => tokens.push(single(TokenKind::LParen)),
            b')' => tokens.push(single(TokenKind::RParen)),
            b',' => tokens.push(single(TokenKind::Comma)),
            b'.' => tokens.push(single(TokenKind::Dot)),
            b';' => tokens.push(single(TokenKind::Semicolon)),
            b'*' => tokens.push(single(TokenKind::Star)),
            b'+' => tokens.push(single(TokenKind::Plus)),
            b'-' => tokens.push(single(TokenKind::Minus)),
            b'/' => tokens.push(single(TokenKind::Slash)),
            b'=' => tokens.push(single(TokenKind::Eq)),
            b'<' | b'>' | b'!' => {
                let next = bytes.get(i + 1).copied();
                let (kind, width) = match (c, next) {
                    (b'<', Some(b'=')) => (TokenKind::Le, 2),
                    (b'<', Some(b'>')) => (TokenKind::Ne, 2),
                    (b'<', _) => (TokenKind::Lt, 1),
                    (b'>', Some(b'=')) => (TokenKind::Ge, 2),
                    (b'>', _) => (TokenKind::Gt, 1),
                    (b'!', Some(b'=')) => (TokenKind::Ne, 2),
                    _ => {
                        return Err(Error::SyntaxError {
                            position: start,
                            expected: "'!='".into(),
                            found: "'!'".into(),
                        })
                    }
                };
                tokens.push(single(kind));
                i += width;
                continue;
            }
            b'\'' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match text[i..].find('\'') {
                        None => {
                            return Err(Error::SyntaxError {
                                position: start,
                                expected: "closing quote".into(),
                                found: "end of input".into(),
                            })
                        }
                        Some(off) => {
                            s.push_str(&text[i..i + off]);
                            i += off + 1;
                            if bytes.get(i) == Some(&b'\'') {
                                s.push('\'');
                                i += 1;
                            } else {
                                break;
                            }
                        }
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Str(s),
                    position: start,
                });
                continue;
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..i];
                let v = digits.parse::<i64>().map_err(|_| Error::SyntaxError {
                    position: start,
                    expected: "64-bit integer".into(),
                    found: digits.to_string(),
                })?;
                tokens.push(Token {
                    kind: TokenKind::Int(v),
                    position: start,
                });
                continue;
            }
            b'"' => {
                let end = text[i + 1..].find('"').ok_or(Error::SyntaxError {
                    position: start,
                    expected: "closing '\"'".into(),
                    found: "end of input".into(),
                })?;
                tokens.push(Token {
                    kind: TokenKind::Ident(text[i + 1..i + 1 + end].to_string()),
                    position: start,
                });
                i += end + 2;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(text[start..i].to_string()),
                    position: start,
                });
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(Error::SyntaxError {
                    position: start,
                    expected: "a token".into(),
                    found: format!("'{ch}'"),
                });
            }
        }
        i += 1;
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        position: text.len(),
    });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(s: &str) -> Vec<TokenKind> {
        tokenize(s).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn operators_and_literals() {
        assert_eq!(
            kinds("a.b<>'it''s' -- comment\n<= 42;"),
            vec![
                TokenKind::Ident("a".into()),
                TokenKind::Dot,
                TokenKind::Ident("b".into()),
                TokenKind::Ne,
                TokenKind::Str("it's".into()),
                TokenKind::Le,
                TokenKind::Int(42),
                TokenKind::Semicolon,
                TokenKind::Eof
            ]
        );
    }

    #[test]
    fn unterminated_string_is_positioned() {
        assert!(matches!(
            tokenize("SELECT 'abc"),
            Err(Error::SyntaxError { position: 7, .. })
        ));
    }
}
