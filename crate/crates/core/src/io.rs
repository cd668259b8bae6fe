//! JSON documents for groups, expectations and hypergroup tables.
//!
//! Rationals are written as strings `"p/q"` (or `"p"`); on input plain JSON
//! integers are accepted as well.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expectation::{BlockSystem, ConditionalExpectation};
use crate::group::GroupTable;
use crate::hypergroup::HypergroupTable;
use crate::scalar::{format_rational, int, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Text(String),
    Int(i64),
}

impl RationalText {
    pub fn parse(&self) -> Result<Rational> {
        match self {
            RationalText::Text(s) => parse_rational(s),
            RationalText::Int(n) => Ok(int(*n)),
        }
    }
}

impl From<&Rational> for RationalText {
    fn from(r: &Rational) -> Self {
        RationalText::Text(format_rational(r))
    }
}

fn parse_all(v: &[RationalText]) -> Result<Vec<Rational>> {
    v.iter().map(RationalText::parse).collect()
}

fn render_all(v: &[Rational]) -> Vec<RationalText> {
    v.iter().map(RationalText::from).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupDoc {
    pub order: usize,
    pub table: Vec<Vec<i64>>,
}

impl GroupDoc {
    pub fn from_table(g: &GroupTable) -> Self {
        GroupDoc {
            order: g.order(),
            table: g
                .rows()
                .into_iter()
                .map(|r| r.into_iter().map(|x| x as i64).collect())
                .collect(),
        }
    }

    pub fn to_table(&self) -> Result<GroupTable> {
        if self.table.len() != self.order {
            return Err(Error::NotSquare {
                row: self.table.len(),
                len: self.table.len(),
                expected: self.order,
            });
        }
        GroupTable::validate(&self.table)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationDoc {
    pub blocks: Vec<Vec<usize>>,
    /// Per-block weights aligned with `blocks`; uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<RationalText>>>,
}

impl ExpectationDoc {
    pub fn from_expectation(p: &ConditionalExpectation) -> Self {
        ExpectationDoc {
            blocks: p.block_system().blocks().to_vec(),
            weights: Some(p.weights().iter().map(|w| render_all(w)).collect()),
        }
    }

    pub fn to_expectation(&self, order: usize) -> Result<ConditionalExpectation> {
        let blocks = BlockSystem::new(order, self.blocks.clone())?;
        match &self.weights {
            None => Ok(ConditionalExpectation::uniform(blocks)),
            Some(w) => {
                let w = w.iter().map(|b| parse_all(b)).collect::<Result<Vec<_>>>()?;
                ConditionalExpectation::new(blocks, w)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypergroupDoc {
    pub size: usize,
    pub identity: usize,
    pub involution: Vec<usize>,
    /// `c[s][t][r]`.
    pub c: Vec<Vec<Vec<RationalText>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub haar: Option<Vec<RationalText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modular: Option<Vec<RationalText>>,
}

impl HypergroupDoc {
    pub fn from_table(h: &HypergroupTable) -> Self {
        HypergroupDoc {
            size: h.size(),
            identity: h.identity(),
            involution: h.involution().to_vec(),
            c: h
                .structure_constants()
                .iter()
                .map(|plane| plane.iter().map(|row| render_all(row)).collect())
                .collect(),
            haar: Some(render_all(h.haar())),
            modular: Some(render_all(h.modular())),
        }
    }

    pub fn to_table(&self) -> Result<HypergroupTable> {
        if self.c.len() != self.size {
            return Err(Error::InvalidTable(format!(
                "size is {} but c has {} planes",
                self.size,
                self.c.len()
            )));
        }
        let c = self
            .c
            .iter()
            .map(|plane| plane.iter().map(|row| parse_all(row)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let haar = self.haar.as_deref().map(parse_all).transpose()?;
        let modular = self.modular.as_deref().map(parse_all).transpose()?;
        HypergroupTable::from_parts(c, self.identity, self.involution.clone(), haar, modular)
    }
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::scalar::rat;

    #[test]
    fn group_round_trip() {
        let g = catalog::group("S3").unwrap().table;
        let doc = GroupDoc::from_table(&g);
        let text = serde_json::to_string(&doc).unwrap();
        let back: GroupDoc = parse_json(&text).unwrap();
        assert_eq!(back.to_table().unwrap(), g);
        let z2: GroupDoc = parse_json(r#"{"order":2,"table":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(z2.to_table().unwrap().order(), 2);
        let bad: GroupDoc = parse_json(r#"{"order":2,"table":[[0,1],[0,1]]}"#).unwrap();
        assert!(bad.to_table().is_err());
    }

    #[test]
    fn expectation_parsing() {
        let doc: ExpectationDoc =
            parse_json(r#"{"blocks":[[0],[1,2]],"weights":[["1"],["1/4", 3]]}"#).unwrap();
        assert!(doc.to_expectation(3).is_err());
        let doc: ExpectationDoc =
            parse_json(r#"{"blocks":[[0],[1,2]],"weights":[["1"],["1/4","3/4"]]}"#).unwrap();
        let p = doc.to_expectation(3).unwrap();
        assert_eq!(p.weights()[1], vec![rat(1, 4), rat(3, 4)]);
        let uniform: ExpectationDoc = parse_json(r#"{"blocks":[[0],[1,2]]}"#).unwrap();
        assert_eq!(uniform.to_expectation(3).unwrap().weights()[1], vec![rat(1, 2), rat(1, 2)]);
        assert!(parse_json::<ExpectationDoc>("{").is_err());
    }

    #[test]
    fn hypergroup_round_trip_and_derived_fields() {
        let g = catalog::group("S3").unwrap().table;
        let p = ConditionalExpectation::conjugation(&g);
        let h = HypergroupTable::construct(&p, &g, 0).unwrap();
        let text = serde_json::to_string(&HypergroupDoc::from_table(&h)).unwrap();
        assert!(text.contains("\"1/3\""));
        let back = parse_json::<HypergroupDoc>(&text).unwrap().to_table().unwrap();
        assert_eq!(back, h);
        let mut doc = HypergroupDoc::from_table(&h);
        doc.haar = None;
        doc.modular = None;
        let solved = doc.to_table().unwrap();
        // solved Haar weights are normalized at the identity
        assert_eq!(solved.haar()[h.identity()], int(1));
        assert!(solved.verify_djs().passed());
    }
}
