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

//! Recursive-descent parser for the SQL subset and DDL extensions.

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};
use crate::error::{Error, Result};
use crate::storage::{parse_date, DataType};

const RESERVED: &[&str] = &[
    "SELECT", "FROM", "WHERE", "AND", "OR", "NOT", "GROUP", "ORDER", "BY", "LIMIT", "HAVING", "JOIN",
    "ON", "UNION", "AS", "IN", "EXISTS", "INNER", "LEFT", "RIGHT", "OUTER", "CROSS", "EXPLAIN",
];

/// Parses exactly one statement; a trailing `;` is allowed.
pub fn parse(text: &str) -> Result<Statement> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let stmt = p.statement()?;
    p.eat(&TokenKind::Semicolon);
    p.expect_eof()?;
    Ok(stmt)
}

/// Splits a script into `;`-terminated statements and parses each one.
///
/// Returns the byte offset of every statement alongside it. Error positions
/// are relative to the whole script.
pub fn parse_script(text: &str) -> Result<Vec<(usize, Statement)>> {
    let tokens = tokenize(text)?;
    let mut out = Vec::new();
    let mut start = 0;
    for (i, tok) in tokens.iter().enumerate() {
        if matches!(tok.kind, TokenKind::Semicolon | TokenKind::Eof) {
            if i > start {
                let mut slice: Vec<Token> = tokens[start..i].to_vec();
                slice.push(Token {
                    kind: TokenKind::Eof,
                    position: tok.position,
                });
                let offset = slice[0].position;
                let mut p = Parser { tokens: slice, pos: 0 };
                let stmt = p.statement()?;
                p.expect_eof()?;
                out.push((offset, stmt));
            }
            start = i + 1;
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

enum Operand {
    Column(ColumnName),
    Literal(Literal),
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_kind(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn peek_at(&self, ahead: usize) -> &TokenKind {
        let i = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T> {
        let t = self.peek();
        Err(Error::SyntaxError {
            position: t.position,
            expected: expected.to_string(),
            found: t.kind.describe(),
        })
    }

    fn unsupported<T>(&self, what: &str) -> Result<T> {
        Err(Error::UnsupportedFeature(format!(
            "{what} (at offset {})",
            self.peek().position
        )))
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek_kind() == kind {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<()> {
        if self.eat(&kind) {
            Ok(())
        } else {
            self.error(&kind.describe())
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        self.peek_kind().is_keyword(kw)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            self.error(kw)
        }
    }

    fn expect_eof(&self) -> Result<()> {
        match self.peek_kind() {
            TokenKind::Eof => Ok(()),
            k if k.is_keyword("GROUP") => self.unsupported("GROUP BY"),
            k if k.is_keyword("ORDER") => self.unsupported("ORDER BY"),
            k if k.is_keyword("LIMIT") => self.unsupported("LIMIT"),
            k if k.is_keyword("HAVING") => self.unsupported("HAVING"),
            k if k.is_keyword("UNION") => self.unsupported("UNION"),
            _ => self.error("end of statement"),
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek_kind() {
            TokenKind::Ident(s) if !RESERVED.iter().any(|r| r.eq_ignore_ascii_case(s)) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => self.error("identifier"),
        }
    }

    fn ident_list(&mut self) -> Result<Vec<String>> {
        self.expect(TokenKind::LParen)?;
        let mut out = vec![self.ident()?];
        while self.eat(&TokenKind::Comma) {
            out.push(self.ident()?);
        }
        self.expect(TokenKind::RParen)?;
        Ok(out)
    }

    fn statement(&mut self) -> Result<Statement> {
        if self.at_keyword("SELECT") {
            return Ok(Statement::Query(self.query()?));
        }
        if self.eat_keyword("EXPLAIN") {
            return Ok(Statement::Explain(self.query()?));
        }
        if self.eat_keyword("PREDEFINE") {
            self.expect_keyword("JOIN")?;
            let from_table = self.ident()?;
            let from_cols = self.ident_list()?;
            self.expect_keyword("REFERENCES")?;
            let to_table = self.ident()?;
            let to_cols = self.ident_list()?;
            return Ok(Statement::PredefineJoin {
                from_table,
                from_cols,
                to_table,
                to_cols,
            });
        }
        if self.eat_keyword("CREATE") {
            if self.eat_keyword("TABLE") {
                return self.create_table();
            }
            let extended = self.eat_keyword("EXTENDED");
            self.expect_keyword("RID")?;
            self.expect_keyword("INDEX")?;
            self.expect_keyword("ON")?;
            let table = self.ident()?;
            if extended {
                self.expect_keyword("FROM")?;
                let near_table = self.ident()?;
                let near_cols = self.ident_list()?;
                self.expect_keyword("TO")?;
                let far_table = self.ident()?;
                let far_cols = self.ident_list()?;
                return Ok(Statement::CreateExtendedRidIndex {
                    table,
                    near_table,
                    near_cols,
                    far_table,
                    far_cols,
                });
            }
            self.expect_keyword("REFERENCES")?;
            let referenced = self.ident()?;
            let columns = self.ident_list()?;
            return Ok(Statement::CreateRidIndex {
                table,
                referenced,
                columns,
            });
        }
        if self.eat_keyword("COPY") {
            let table = self.ident()?;
            self.expect_keyword("FROM")?;
            let path = match self.peek_kind().clone() {
                TokenKind::Str(s) => {
                    self.advance();
                    s
                }
                _ => return self.error("quoted file path"),
            };
            let mut header = false;
            if self.eat_keyword("WITH") || self.at_keyword("HEADER") || *self.peek_kind() == TokenKind::LParen {
                let paren = self.eat(&TokenKind::LParen);
                self.expect_keyword("HEADER")?;
                if paren {
                    self.expect(TokenKind::RParen)?;
                }
                header = true;
            }
            return Ok(Statement::CopyCsv { table, path, header });
        }
        if self.eat_keyword("INSERT") {
            self.expect_keyword("INTO")?;
            let table = self.ident()?;
            self.expect_keyword("VALUES")?;
            let mut rows = Vec::new();
            loop {
                self.expect(TokenKind::LParen)?;
                let mut row = vec![self.literal()?];
                while self.eat(&TokenKind::Comma) {
                    row.push(self.literal()?);
                }
                self.expect(TokenKind::RParen)?;
                rows.push(row);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
            return Ok(Statement::Insert { table, rows });
        }
        self.error("SELECT, EXPLAIN, CREATE, COPY, INSERT or PREDEFINE")
    }

    fn create_table(&mut self) -> Result<Statement> {
        let name = self.ident()?;
        self.expect(TokenKind::LParen)?;
        let mut columns = Vec::new();
        loop {
            let col = self.ident()?;
            let ty = self.data_type()?;
            columns.push((col, ty));
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        self.expect(TokenKind::RParen)?;
        Ok(Statement::CreateTable { name, columns })
    }

    fn data_type(&mut self) -> Result<DataType> {
        let ty = match self.peek_kind() {
            TokenKind::Ident(s) => match s.to_ascii_uppercase().as_str() {
                "INT" | "INTEGER" | "BIGINT" | "INT64" => DataType::Int64,
                "VARCHAR" | "TEXT" | "STRING" => DataType::Str,
                "DATE" => DataType::Date,
                _ => return self.error("column type"),
            },
            _ => return self.error("column type"),
        };
        self.advance();
        if ty == DataType::Str && self.eat(&TokenKind::LParen) {
            if !matches!(self.peek_kind(), TokenKind::Int(_)) {
                return self.error("length");
            }
            self.advance();
            self.expect(TokenKind::RParen)?;
        }
        Ok(ty)
    }

    fn literal(&mut self) -> Result<Literal> {
        let negative = self.eat(&TokenKind::Minus);
        match self.peek_kind().clone() {
            TokenKind::Int(v) => {
                self.advance();
                Ok(Literal::Int(if negative { -v } else { v }))
            }
            TokenKind::Str(s) if !negative => {
                self.advance();
                Ok(Literal::Str(s))
            }
            TokenKind::Ident(kw) if !negative && kw.eq_ignore_ascii_case("DATE") => {
                if let TokenKind::Str(s) = self.peek_at(1).clone() {
                    let position = self.peek().position;
                    self.advance();
                    self.advance();
                    let days = parse_date(&s).ok_or(Error::SyntaxError {
                        position,
                        expected: "date 'YYYY-MM-DD'".into(),
                        found: format!("'{s}'"),
                    })?;
                    Ok(Literal::Date(days))
                } else {
                    self.error("literal")
                }
            }
            _ => self.error("literal"),
        }
    }

    fn column_name(&mut self) -> Result<ColumnName> {
        let first = self.ident()?;
        if self.eat(&TokenKind::Dot) {
            let name = self.ident()?;
            Ok(ColumnName {
                qualifier: Some(first),
                name,
            })
        } else {
            Ok(ColumnName {
                qualifier: None,
                name: first,
            })
        }
    }

    fn query(&mut self) -> Result<QuerySpec> {
        self.expect_keyword("SELECT")?;
        if self.at_keyword("DISTINCT") {
            return self.unsupported("DISTINCT");
        }
        let select = self.select_list()?;
        self.expect_keyword("FROM")?;
        let mut relations = vec![self.table_ref()?];
        while self.eat(&TokenKind::Comma) {
            relations.push(self.table_ref()?);
        }
        for kw in ["JOIN", "INNER", "LEFT", "RIGHT", "CROSS"] {
            if self.at_keyword(kw) {
                return self.unsupported("explicit JOIN syntax");
            }
        }
        let mut join_preds = Vec::new();
        let mut filter_preds = Vec::new();
        if self.eat_keyword("WHERE") {
            loop {
                self.predicate(&mut join_preds, &mut filter_preds)?;
                if self.at_keyword("OR") {
                    return self.unsupported("OR");
                }
                if !self.eat_keyword("AND") {
                    break;
                }
            }
        }
        Ok(QuerySpec {
            select,
            relations,
            join_preds,
            filter_preds,
        })
    }

    fn select_list(&mut self) -> Result<SelectList> {
        if self.eat(&TokenKind::Star) {
            return Ok(SelectList::Star);
        }
        if let TokenKind::Ident(name) = self.peek_kind().clone() {
            if *self.peek_at(1) == TokenKind::LParen {
                let agg = match name.to_ascii_uppercase().as_str() {
                    "COUNT" => {
                        self.advance();
                        self.advance();
                        self.expect(TokenKind::Star)?;
                        Aggregate::CountStar
                    }
                    "MIN" | "MAX" => {
                        self.advance();
                        self.advance();
                        let col = self.column_name()?;
                        if name.eq_ignore_ascii_case("MIN") {
                            Aggregate::Min(col)
                        } else {
                            Aggregate::Max(col)
                        }
                    }
                    _ => return self.unsupported(&format!("function {name}")),
                };
                self.expect(TokenKind::RParen)?;
                if *self.peek_kind() == TokenKind::Comma {
                    return self.unsupported("mixing aggregates with other select items");
                }
                return Ok(SelectList::Aggregate(agg));
            }
        }
        let mut cols = vec![self.select_item()?];
        while self.eat(&TokenKind::Comma) {
            cols.push(self.select_item()?);
        }
        Ok(SelectList::Columns(cols))
    }

    fn select_item(&mut self) -> Result<ColumnName> {
        if let TokenKind::Ident(_) = self.peek_kind() {
            if *self.peek_at(1) == TokenKind::LParen {
                return self.unsupported("aggregates mixed with columns");
            }
        }
        let col = self.column_name()?;
        self.check_no_arithmetic()?;
        Ok(col)
    }

    fn table_ref(&mut self) -> Result<TableRef> {
        if *self.peek_kind() == TokenKind::LParen {
            return self.unsupported("subquery");
        }
        let table = self.ident()?;
        self.eat_keyword("AS");
        let alias = match self.peek_kind() {
            TokenKind::Ident(s) if !RESERVED.iter().any(|r| r.eq_ignore_ascii_case(s)) => self.ident()?,
            _ => table.clone(),
        };
        Ok(TableRef { table, alias })
    }

    fn check_no_arithmetic(&self) -> Result<()> {
        match self.peek_kind() {
            TokenKind::Plus | TokenKind::Minus | TokenKind::Slash | TokenKind::Star => {
                self.unsupported("arithmetic")
            }
            _ => Ok(()),
        }
    }

    fn operand(&mut self) -> Result<Operand> {
        match self.peek_kind() {
            TokenKind::LParen => {
                if self.peek_at(1).is_keyword("SELECT") {
                    self.unsupported("subquery")
                } else {
                    self.unsupported("parenthesized expression")
                }
            }
            TokenKind::Ident(s) if s.eq_ignore_ascii_case("DATE") && matches!(self.peek_at(1), TokenKind::Str(_)) => {
                Ok(Operand::Literal(self.literal()?))
            }
            TokenKind::Ident(s) if s.eq_ignore_ascii_case("NOT") || s.eq_ignore_ascii_case("EXISTS") => {
                self.unsupported(&s.to_ascii_uppercase())
            }
            TokenKind::Ident(_) => {
                let c = self.column_name()?;
                self.check_no_arithmetic()?;
                Ok(Operand::Column(c))
            }
            _ => {
                let l = self.literal()?;
                self.check_no_arithmetic()?;
                Ok(Operand::Literal(l))
            }
        }
    }

    fn cmp_op(&mut self) -> Result<CmpOp> {
        let op = match self.peek_kind() {
            TokenKind::Eq => CmpOp::Eq,
            TokenKind::Ne => CmpOp::Ne,
            TokenKind::Lt => CmpOp::Lt,
            TokenKind::Le => CmpOp::Le,
            TokenKind::Gt => CmpOp::Gt,
            TokenKind::Ge => CmpOp::Ge,
            k if k.is_keyword("IN") => return self.unsupported("IN"),
            k if k.is_keyword("LIKE") => return self.unsupported("LIKE"),
            k if k.is_keyword("BETWEEN") => return self.unsupported("BETWEEN"),
            _ => return self.error("comparison operator"),
        };
        self.advance();
        Ok(op)
    }

    fn predicate(&mut self, joins: &mut Vec<JoinPredicate>, filters: &mut Vec<FilterPredicate>) -> Result<()> {
        let lhs = self.operand()?;
        let op = self.cmp_op()?;
        let rhs = self.operand()?;
        match (lhs, rhs) {
            (Operand::Column(left), Operand::Column(right)) => {
                if op != CmpOp::Eq {
                    return self.unsupported("non-equality join predicate");
                }
                joins.push(JoinPredicate { left, right });
            }
            (Operand::Column(column), Operand::Literal(value)) => {
                filters.push(FilterPredicate { column, op, value })
            }
            (Operand::Literal(value), Operand::Column(column)) => filters.push(FilterPredicate {
                column,
                op: op.flip(),
                value,
            }),
            (Operand::Literal(_), Operand::Literal(_)) => {
                return self.unsupported("predicate without a column");
            }
        }
        Ok(())
    }
}
