use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

/// Exact point keyed by variable id; absent keys read as zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FractionalPoint {
    pub values: BTreeMap<String, Rational>,
}

impl FractionalPoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, Rational)>) -> Self {
        FractionalPoint { values: pairs.into_iter().map(|(k, v)| (k.into(), v)).collect() }
    }

    /// Zip variable names with a dense vector.
    pub fn from_dense<S: AsRef<str>>(vars: &[S], dense: &[Rational]) -> Self {
        Self::from_pairs(vars.iter().zip(dense).map(|(v, x)| (v.as_ref().to_string(), x.clone())))
    }

    pub fn get(&self, var: &str) -> Rational {
        self.values.get(var).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, var: &str, value: Rational) {
        self.values.insert(var.to_string(), value);
    }

    pub fn dense<S: AsRef<str>>(&self, vars: &[S]) -> Vec<Rational> {
        vars.iter().map(|v| self.get(v.as_ref())).collect()
    }

    /// Sum over a set of variables.
    pub fn sum<'a>(&self, vars: impl IntoIterator<Item = &'a str>) -> Rational {
        vars.into_iter().map(|v| self.get(v)).sum()
    }

    /// Every coordinate is a multiple of 1/k.
    pub fn is_integral_over(&self, k: u32) -> bool {
        self.values.values().all(|x| x.is_multiple_of_unit_fraction(k))
    }

    pub fn is_integral(&self) -> bool {
        self.is_integral_over(1)
    }

    /// Variables whose value equals `alpha`.
    pub fn level_set(&self, alpha: &Rational) -> Vec<String> {
        self.values
            .iter()
            .filter(|(_, x)| *x == alpha)
            .map(|(k, _)| k.clone())
            .collect()
    }

    /// `(v1, v2, ...)` in the given variable order.
    pub fn tuple<S: AsRef<str>>(&self, vars: &[S]) -> String {
        let parts: Vec<String> = self.dense(vars).iter().map(|x| x.to_string()).collect();
        format!("({})", parts.join(", "))
    }
}
