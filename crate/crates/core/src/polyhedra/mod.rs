//! Exact-rational linear systems and the polyhedral machinery built on them.

mod build;
mod field;
mod fm;
mod lp;
mod tdi;
mod vertices;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::FractionalPoint;
use crate::rational::Rational;

pub use build::{build_pi, build_sigma, build_sigma_as_prefs};
pub use fm::{canonicalize, fm_eliminate, fm_eliminate_all, systems_match, FmStep, MatchMode, MatchReport};
pub use lp::{solve_lp_exact, LpResult, LpStatus, Sense};
pub use tdi::{
    check_integrality, check_tdi, check_tdi_with, integral_dual, IntegralityReport, TdiFailure, TdiOptions, TdiReport,
    TdiVerdict,
};
pub use vertices::{enumerate_vertices, enumerate_vertices_by_bases, VertexSet};


#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Ge => ">=",
            Relation::Le => "<=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub label: String,
    pub coeffs: BTreeMap<String, Rational>,
    pub rel: Relation,
    pub rhs: Rational,
}

impl Row {
    /// Left-hand side at `x`.
    pub fn lhs(&self, x: &FractionalPoint) -> Rational {
        self.coeffs.iter().map(|(v, a)| a * x.get(v)).sum()
    }

    pub fn satisfied_by(&self, x: &FractionalPoint) -> bool {
        let lhs = self.lhs(x);
        match self.rel {
            Relation::Ge => lhs >= self.rhs,
            Relation::Le => lhs <= self.rhs,
        }
    }

    pub fn is_tight(&self, x: &FractionalPoint) -> bool {
        self.lhs(x) == self.rhs
    }

    /// Coefficients and rhs with the row flipped into `<=` form.
    pub fn as_le(&self) -> (BTreeMap<String, Rational>, Rational) {
        match self.rel {
            Relation::Le => (self.coeffs.clone(), self.rhs.clone()),
            Relation::Ge => (
                self.coeffs.iter().map(|(k, v)| (k.clone(), -v)).collect(),
                -&self.rhs,
            ),
        }
    }

    /// Human-readable `x(a) + 2 x(b) >= 1`.
    pub fn render(&self) -> String {
        render_terms(&self.coeffs, self.rel, &self.rhs)
    }
}

pub(crate) fn render_terms(coeffs: &BTreeMap<String, Rational>, rel: Relation, rhs: &Rational) -> String {
    let mut s = String::new();
    for (i, (v, a)) in coeffs.iter().enumerate() {
        let neg = a.is_negative();
        let mag = a.abs();
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if mag != Rational::one() {
            s.push_str(&format!("{mag} "));
        }
        s.push_str(&format!("x({v})"));
    }
    if coeffs.is_empty() {
        s.push('0');
    }
    format!("{s} {rel} {rhs}")
}

/// Rows over an ordered list of variables. Variables are free unless a row
/// bounds them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSystem {
    pub variables: Vec<String>,
    pub rows: Vec<Row>,
}

impl LinearSystem {
    pub fn new<S: AsRef<str>>(variables: &[S]) -> Self {
        LinearSystem {
            variables: variables.iter().map(|v| v.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Append a row; zero coefficients are dropped, labels must be unique.
    pub fn push(
        &mut self,
        label: impl Into<String>,
        coeffs: impl IntoIterator<Item = (String, Rational)>,
        rel: Relation,
        rhs: Rational,
    ) -> Result<()> {
        let label = label.into();
        let mut map: BTreeMap<String, Rational> = BTreeMap::new();
        for (v, a) in coeffs {
            if !self.variables.contains(&v) {
                return Err(Error::UnknownVariable(v));
            }
            *map.entry(v).or_insert_with(Rational::zero) += a;
        }
        map.retain(|_, a| !a.is_zero());
        if self.rows.iter().any(|r| r.label == label) {
            return Err(Error::DuplicateId(label));
        }
        self.rows.push(Row { label, coeffs: map, rel, rhs });
        Ok(())
    }

    /// Row with unit coefficients on `vars`.
    pub fn push_sum<S: AsRef<str>>(&mut self, label: impl Into<String>, vars: &[S], rel: Relation, rhs: i64) -> Result<()> {
        self.push(
            label,
            vars.iter().map(|v| (v.as_ref().to_string(), Rational::one())),
            rel,
            Rational::from_integer(rhs),
        )
    }

    pub fn var_index(&self) -> BTreeMap<&str, usize> {
        self.variables.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect()
    }

    /// Dense `<=` rows: (coefficients in variable order, rhs).
    pub fn dense_le(&self) -> Vec<(Vec<Rational>, Rational)> {
        let idx = self.var_index();
        self.rows
            .iter()
            .map(|r| {
                let (coeffs, rhs) = r.as_le();
                let mut dense = vec![Rational::zero(); self.variables.len()];
                for (v, a) in coeffs {
                    dense[idx[v.as_str()]] = a;
                }
                (dense, rhs)
            })
            .collect()
    }

    pub fn violated_rows(&self, x: &FractionalPoint) -> Vec<String> {
        self.rows
            .iter()
            .filter(|r| !r.satisfied_by(x))
            .map(|r| r.label.clone())
            .collect()
    }

    pub fn is_satisfied_by(&self, x: &FractionalPoint) -> bool {
        self.rows.iter().all(|r| r.satisfied_by(x))
    }

    pub fn tight_rows(&self, x: &FractionalPoint) -> Vec<String> {
        self.rows
            .iter()
            .filter(|r| r.is_tight(x))
            .map(|r| r.label.clone())
            .collect()
    }

    pub fn row(&self, label: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// Substitute variable names; rows keep their labels.
    pub fn renamed(&self, renaming: &BTreeMap<String, String>) -> Result<LinearSystem> {
        let rename = |v: &String| renaming.get(v).cloned().unwrap_or_else(|| v.clone());
        let variables: Vec<String> = self.variables.iter().map(rename).collect();
        let distinct: BTreeSet<&String> = variables.iter().collect();
        if distinct.len() != variables.len() {
            return Err(Error::Invalid("renaming merges two variables".into()));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| Row {
                label: r.label.clone(),
                coeffs: r.coeffs.iter().map(|(v, a)| (rename(v), a.clone())).collect(),
                rel: r.rel,
                rhs: r.rhs.clone(),
            })
            .collect();
        Ok(LinearSystem { variables, rows })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("system serializes")
    }

    /// Parse and validate: unique labels, declared variables only.
    pub fn from_json(text: &str) -> Result<LinearSystem> {
        let raw: LinearSystem = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        let mut sys = LinearSystem::new(&raw.variables);
        if BTreeSet::from_iter(&raw.variables).len() != raw.variables.len() {
            return Err(Error::Invalid("duplicate variable".into()));
        }
        for r in raw.rows {
            sys.push(r.label, r.coeffs, r.rel, r.rhs)?;
        }
        Ok(sys)
    }
}

impl fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.rows.iter().map(|r| r.label.len()).max().unwrap_or(0);
        for r in &self.rows {
            writeln!(f, "{:<width$}  {}", r.label, r.render())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_validates() {
        let mut s = LinearSystem::new(&["a", "b"]);
        s.push_sum("r", &["a", "b"], Relation::Ge, 1).unwrap();
        assert!(matches!(s.push_sum("r", &["a"], Relation::Ge, 1), Err(Error::DuplicateId(_))));
        assert!(matches!(s.push_sum("q", &["c"], Relation::Ge, 1), Err(Error::UnknownVariable(_))));
        s.push("z", [("a".to_string(), Rational::zero())], Relation::Le, Rational::one()).unwrap();
        assert!(s.row("z").unwrap().coeffs.is_empty());
    }

    #[test]
    fn json_format() {
        let mut s = LinearSystem::new(&["a", "b"]);
        s.push("r", [("a".to_string(), Rational::new(1, 2)), ("b".to_string(), Rational::one())], Relation::Ge, Rational::one())
            .unwrap();
        let json = s.to_json();
        assert!(json.contains("\"1/2\""));
        assert!(json.contains("\">=\""));
        assert_eq!(LinearSystem::from_json(&json).unwrap(), s);
        let bad = json.replace("\"b\": \"1\"", "\"c\": \"1\"");
        assert!(LinearSystem::from_json(&bad).is_err());
    }

    #[test]
    fn renders_rows() {
        let mut s = LinearSystem::new(&["a", "b"]);
        s.push("r", [("a".to_string(), Rational::from_integer(-2)), ("b".to_string(), Rational::one())], Relation::Le, Rational::zero())
            .unwrap();
        assert_eq!(s.rows[0].render(), "-2 x(a) + x(b) <= 0");
    }
}
