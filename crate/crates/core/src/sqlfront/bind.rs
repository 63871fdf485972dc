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

//! Name resolution of parsed queries against a catalog.

use std::collections::HashSet;

use super::ast::{Aggregate, CmpOp, ColumnName, Literal, QuerySpec, SelectList};
use crate::error::{Error, Result};
use crate::storage::{parse_date, Catalog, DataType, TableId, Value, Vector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub alias: String,
    pub table: TableId,
}

/// A user column of one relation instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColRef {
    pub rel: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JoinPred {
    pub left: ColRef,
    pub right: ColRef,
}

impl JoinPred {
    pub fn touches(&self, rel: usize) -> bool {
        self.left.rel == rel || self.right.rel == rel
    }

    /// The predicate oriented so that `rel`'s column comes first.
    pub fn oriented(&self, rel: usize) -> (ColRef, ColRef) {
        if self.left.rel == rel {
            (self.left, self.right)
        } else {
            (self.right, self.left)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filter {
    pub column: ColRef,
    pub op: CmpOp,
    pub value: Value,
}

impl Filter {
    pub fn matches(&self, v: &Value) -> bool {
        match (v, &self.value) {
            (Value::Str(a), Value::Str(b)) => self.op.eval(&**a, &**b),
            (a, b) => match (a.as_i64(), b.as_i64()) {
                (Some(x), Some(y)) => self.op.eval(&x, &y),
                _ => false,
            },
        }
    }

    /// Clears bits of `sel` whose value in `data` fails the predicate.
    pub fn apply(&self, data: &Vector, sel: &mut crate::Bitmap) {
        self.apply_range(data, 0, sel);
    }

    /// Like [`Filter::apply`] with bit `i` of `sel` standing for `data[start + i]`.
    /// Bits already cleared are not evaluated.
    pub fn apply_range(&self, data: &Vector, start: usize, sel: &mut crate::Bitmap) {
        match (data, &self.value) {
            (Vector::Int64(v), val) => {
                let rhs = val.as_i64().expect("bound filter constants match column type");
                let v = &v[start..start + sel.len()];
                for (i, x) in v.iter().enumerate() {
                    if sel.get(i) && !self.op.eval(x, &rhs) {
                        sel.clear(i);
                    }
                }
            }
            (Vector::Str(v), Value::Str(rhs)) => {
                let v = &v[start..start + sel.len()];
                for (i, x) in v.iter().enumerate() {
                    if sel.get(i) && !self.op.eval(&**x, &**rhs) {
                        sel.clear(i);
                    }
                }
            }
            _ => unreachable!("filter type checked at bind time"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Output {
    Columns(Vec<ColRef>),
    Count,
    Min(ColRef),
    Max(ColRef),
}

/// A query resolved against a catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub relations: Vec<Relation>,
    pub joins: Vec<JoinPred>,
    pub filters: Vec<Filter>,
    pub output: Output,
}

impl Query {
    /// Bit set of all relations.
    pub fn all_rels(&self) -> u64 {
        if self.relations.len() >= 64 {
            u64::MAX
        } else {
            (1u64 << self.relations.len()) - 1
        }
    }

    /// Whether the relations in `mask` induce a connected join graph.
    pub fn is_connected(&self, mask: u64) -> bool {
        if mask == 0 {
            return false;
        }
        let mut seen = 1u64 << mask.trailing_zeros();
        loop {
            let mut grown = seen;
            for p in &self.joins {
                let (a, b) = (1u64 << p.left.rel, 1u64 << p.right.rel);
                if mask & a != 0 && mask & b != 0 && (seen & (a | b)) != 0 {
                    grown |= a | b;
                }
            }
            if grown == seen {
                return seen == mask;
            }
            seen = grown;
        }
    }

    /// Whether some join predicate connects `a` and `b`.
    pub fn connects(&self, a: u64, b: u64) -> bool {
        self.joins.iter().any(|p| {
            let (l, r) = (1u64 << p.left.rel, 1u64 << p.right.rel);
            (a & l != 0 && b & r != 0) || (a & r != 0 && b & l != 0)
        })
    }

    pub fn filters_of(&self, rel: usize) -> impl Iterator<Item = &Filter> {
        self.filters.iter().filter(move |f| f.column.rel == rel)
    }

    /// Columns of `rel` that appear in the query output.
    pub fn output_columns(&self) -> Vec<ColRef> {
        match &self.output {
            Output::Columns(c) => c.clone(),
            Output::Count => vec![],
            Output::Min(c) | Output::Max(c) => vec![*c],
        }
    }

    /// `alias.column` labels of the output.
    pub fn output_names(&self, catalog: &Catalog) -> Vec<String> {
        let name = |c: &ColRef| {
            let rel = &self.relations[c.rel];
            format!("{}.{}", rel.alias, catalog.table(rel.table).column(c.column).name)
        };
        match &self.output {
            Output::Columns(cols) => cols.iter().map(name).collect(),
            Output::Count => vec!["count".into()],
            Output::Min(c) => vec![format!("min({})", name(c))],
            Output::Max(c) => vec![format!("max({})", name(c))],
        }
    }
}

fn resolve(spec: &QuerySpec, rels: &[Relation], catalog: &Catalog, col: &ColumnName) -> Result<ColRef> {
    match &col.qualifier {
        Some(q) => {
            let rel = spec
                .relations
                .iter()
                .position(|r| &r.alias == q)
                .ok_or_else(|| Error::ResolutionError(format!("alias '{q}'")))?;
            let column = catalog
                .table(rels[rel].table)
                .user_column(&col.name)
                .ok_or_else(|| Error::ResolutionError(format!("column '{col}'")))?;
            Ok(ColRef { rel, column })
        }
        None => {
            let hits: Vec<ColRef> = rels
                .iter()
                .enumerate()
                .filter_map(|(rel, r)| {
                    catalog
                        .table(r.table)
                        .user_column(&col.name)
                        .map(|column| ColRef { rel, column })
                })
                .collect();
            match hits.as_slice() {
                [one] => Ok(*one),
                [] => Err(Error::ResolutionError(format!("column '{col}'"))),
                _ => Err(Error::ResolutionError(format!("ambiguous column '{col}'"))),
            }
        }
    }
}

fn coerce_literal(lit: &Literal, ty: DataType, what: &ColumnName) -> Result<Value> {
    let v = match (lit, ty) {
        (Literal::Int(v), DataType::Int64) => Some(Value::Int64(*v)),
        (Literal::Str(s), DataType::Str) => Some(Value::str(s)),
        (Literal::Date(d), DataType::Date) => Some(Value::Date(*d)),
        (Literal::Str(s), DataType::Date) => parse_date(s).map(Value::Date),
        _ => None,
    };
    v.ok_or_else(|| Error::TypeMismatch(format!("{lit} cannot be compared with {what} ({ty})")))
}

/// Resolves table, alias and column names.
pub fn bind(spec: &QuerySpec, catalog: &Catalog) -> Result<Query> {
    let mut seen = HashSet::new();
    let mut relations = Vec::with_capacity(spec.relations.len());
    for r in &spec.relations {
        if !seen.insert(r.alias.as_str()) {
            return Err(Error::ResolutionError(format!("duplicate alias '{}'", r.alias)));
        }
        let table = catalog
            .table_id(&r.table)
            .map_err(|_| Error::ResolutionError(format!("table '{}'", r.table)))?;
        relations.push(Relation {
            alias: r.alias.clone(),
            table,
        });
    }
    if relations.len() > 63 {
        return Err(Error::UnsupportedFeature("more than 63 relations".into()));
    }
    let col_type = |c: ColRef| catalog.table(relations[c.rel].table).column(c.column).data_type;

    let mut joins = Vec::new();
    for p in &spec.join_preds {
        let left = resolve(spec, &relations, catalog, &p.left)?;
        let right = resolve(spec, &relations, catalog, &p.right)?;
        if left.rel == right.rel {
            return Err(Error::UnsupportedFeature(format!(
                "predicate {} = {} within one relation",
                p.left, p.right
            )));
        }
        if col_type(left) != col_type(right) {
            return Err(Error::TypeMismatch(format!(
                "{} ({}) = {} ({})",
                p.left,
                col_type(left),
                p.right,
                col_type(right)
            )));
        }
        joins.push(JoinPred { left, right });
    }
    let mut filters = Vec::new();
    for f in &spec.filter_preds {
        let column = resolve(spec, &relations, catalog, &f.column)?;
        let value = coerce_literal(&f.value, col_type(column), &f.column)?;
        filters.push(Filter {
            column,
            op: f.op,
            value,
        });
    }
    let output = match &spec.select {
        SelectList::Star => Output::Columns(
            relations
                .iter()
                .enumerate()
                .flat_map(|(rel, r)| {
                    catalog
                        .table(r.table)
                        .user_columns()
                        .map(move |column| ColRef { rel, column })
                })
                .collect(),
        ),
        SelectList::Columns(cols) => Output::Columns(
            cols.iter()
                .map(|c| resolve(spec, &relations, catalog, c))
                .collect::<Result<_>>()?,
        ),
        SelectList::Aggregate(Aggregate::CountStar) => Output::Count,
        SelectList::Aggregate(Aggregate::Min(c)) => Output::Min(resolve(spec, &relations, catalog, c)?),
        SelectList::Aggregate(Aggregate::Max(c)) => Output::Max(resolve(spec, &relations, catalog, c)?),
    };
    Ok(Query {
        relations,
        joins,
        filters,
        output,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{running_example, TWO_HOP_QUERY};
    use crate::sqlfront::{parse, Statement};

    fn query(sql: &str, cat: &Catalog) -> Result<Query> {
        match parse(sql)? {
            Statement::Query(q) => bind(&q, cat),
            _ => panic!("not a query"),
        }
    }

    #[test]
    fn star_expands_in_from_order() {
        let cat = running_example();
        let q = query(TWO_HOP_QUERY, &cat).unwrap();
        assert_eq!(q.output_columns().len(), 12);
        assert_eq!(q.output_names(&cat)[..3], ["P1.ID", "P1.name", "F1.ID1"]);
        assert!(q.is_connected(q.all_rels()));
        assert!(!q.is_connected(0b00101));
    }

    #[test]
    fn hidden_columns_do_not_resolve() {
        let mut cat = running_example();
        cat.predefine_join_by_name("Follows", &["ID1"], "Person", &["ID"]).unwrap();
        let err = query("SELECT F.RID FROM Follows F", &cat).unwrap_err();
        assert!(matches!(err, Error::ResolutionError(_)));
        let q = query("SELECT * FROM Follows F", &cat).unwrap();
        assert_eq!(q.output_columns().len(), 3);
    }

    #[test]
    fn resolution_errors() {
        let cat = running_example();
        for sql in [
            "SELECT * FROM Nope N",
            "SELECT X.ID FROM Person P",
            "SELECT P.nope FROM Person P",
            "SELECT ID FROM Person P, Person Q WHERE P.ID = Q.ID",
            "SELECT * FROM Person P, Person P",
        ] {
            assert!(matches!(query(sql, &cat), Err(Error::ResolutionError(_))), "{sql}");
        }
        assert!(matches!(
            query("SELECT * FROM Person P WHERE P.ID = 'x'", &cat),
            Err(Error::TypeMismatch(_))
        ));
        assert!(matches!(
            query("SELECT * FROM Person P, Follows F WHERE P.name = F.ID1", &cat),
            Err(Error::TypeMismatch(_))
        ));
    }

    #[test]
    fn unqualified_and_flipped() {
        let cat = running_example();
        let q = query("SELECT name FROM Person WHERE 202 <= ID", &cat).unwrap();
        assert_eq!(q.filters[0].op, CmpOp::Ge);
        assert_eq!(q.relations[0].alias, "Person");
    }
}
