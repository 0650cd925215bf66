//! Certificates for negative verdicts and their independent re-validation.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use kernelpoly::bridge::{verify_goodness_certificate, Goodness, GoodnessReport};
use kernelpoly::gadget::{expand, lift_point, InternalOrderTable};
use kernelpoly::oracles::{enumerate_kernels, judge_encoding, violation_of, PolyCache, SweepOptions, Violation};
use kernelpoly::polyhedra::{integral_dual, solve_lp_exact, LpStatus, Sense};
use kernelpoly::stable::fsm_check;
use kernelpoly::{Budget, FractionalPoint, LinearSystem, Rational};
use serde::{Deserialize, Serialize};

use crate::{load_digraph, load_multigraph, load_prefs, load_system, CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// A one-way cycle inside a clique, or a directed odd cycle with
    /// neither chord nor pseudo-chord.
    NotGood { report: GoodnessReport },
    /// The digraph has no kernel (re-validated by exhaustive search).
    NoKernel,
    /// An induced subdigraph without a kernel.
    KernelFree { subset: BTreeSet<String> },
    /// Arcs attributed to `vertex` that run around `cycle`.
    CyclicTournament { vertex: String, cycle: Vec<String> },
    /// A vertex of the polytope that is not 1/k-integral.
    NonIntegral { k: u32, point: FractionalPoint },
    /// An integral objective whose optimum has no 1/k-integral optimal dual.
    TdiFailure { k: u32, objective: BTreeMap<String, i64>, optimum: Rational },
    /// Rows of π the point violates.
    NotInFsm { point: FractionalPoint, violated: Vec<String> },
    /// Rows of π of the expansion violated by the lift of `point`.
    LiftLeavesFsm { point: FractionalPoint, table: String, violated: Vec<String> },
    /// Orientations whose verdicts disagree.
    TheoremViolations { c_bound: u32, violations: Vec<Violation> },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::NotGood { .. } => "not_good",
            Certificate::NoKernel => "no_kernel",
            Certificate::KernelFree { .. } => "kernel_free",
            Certificate::CyclicTournament { .. } => "cyclic_tournament",
            Certificate::NonIntegral { .. } => "non_integral",
            Certificate::TdiFailure { .. } => "tdi_failure",
            Certificate::NotInFsm { .. } => "not_in_fsm",
            Certificate::LiftLeavesFsm { .. } => "lift_leaves_fsm",
            Certificate::TheoremViolations { .. } => "theorem_violations",
        }
    }

    /// Accepts a bare certificate or a full `--json` command output that
    /// carries one under `certificate`.
    pub fn from_output(text: &str) -> Result<Certificate, serde_json::Error> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("certificate") {
            Some(c) => serde_json::from_value(c.clone()),
            None => serde_json::from_value(value),
        }
    }

    fn inputs_needed(&self) -> usize {
        match self {
            Certificate::CyclicTournament { .. } => 2,
            _ => 1,
        }
    }

    /// Whether the certificate really refutes the claim on `inputs`.
    pub fn check(&self, inputs: &[PathBuf], budget: Budget) -> CliResult<bool> {
        if inputs.len() != self.inputs_needed() {
            return Err(CliError::Usage(format!(
                "a {} certificate needs {} input file(s), got {}",
                self.kind(),
                self.inputs_needed(),
                inputs.len()
            )));
        }
        let first: &Path = &inputs[0];
        match self {
            Certificate::NotGood { report } => {
                let d = load_digraph(first)?;
                Ok(report.verdict != Goodness::Good && verify_goodness_certificate(&d, report)?)
            }
            Certificate::NoKernel => Ok(enumerate_kernels(&load_digraph(first)?, budget)?.is_empty()),
            Certificate::KernelFree { subset } => {
                let d = load_digraph(first)?;
                let names: Vec<&String> = subset.iter().collect();
                let sub = d.induced_subdigraph(&names)?;
                Ok(enumerate_kernels(&sub, budget)?.is_empty())
            }
            Certificate::CyclicTournament { vertex, cycle } => {
                let h = load_multigraph(first)?;
                let d = load_digraph(&inputs[1])?;
                let w = h.vertex(vertex)?;
                let incident: BTreeSet<&str> = h.incident(w).into_iter().map(|e| h.edge_id(e)).collect();
                if cycle.len() < 2 || !cycle.iter().all(|e| incident.contains(e.as_str())) {
                    return Ok(false);
                }
                let arc_at = |a: &str, b: &str| -> CliResult<bool> {
                    let (a, b) = (d.vertex(a)?, d.vertex(b)?);
                    Ok(d.arcs().iter().any(|x| x.tail == a && x.head == b && x.provenance.as_deref() == Some(vertex.as_str())))
                };
                let n = cycle.len();
                let mut forward = true;
                let mut backward = true;
                for i in 0..n {
                    let (a, b) = (&cycle[i], &cycle[(i + 1) % n]);
                    forward &= arc_at(a, b)?;
                    backward &= arc_at(b, a)?;
                }
                Ok(forward || backward)
            }
            Certificate::NonIntegral { k, point } => {
                let sys = load_system(first, budget)?;
                Ok(!point.is_integral_over(*k) && is_vertex(&sys, point))
            }
            Certificate::TdiFailure { k, objective, optimum } => {
                let sys = load_system(first, budget)?;
                let lp = solve_lp_exact(&sys, &objective_as_rationals(objective), Sense::Max)?;
                if lp.status != LpStatus::Optimal || lp.value.as_ref() != Some(optimum) {
                    return Ok(false);
                }
                Ok(integral_dual(&sys, objective, *k, budget)?.is_none())
            }
            Certificate::NotInFsm { point, violated } => {
                let r = fsm_check(&load_prefs(first)?, point)?;
                Ok(!r.member && !violated.is_empty() && violated.iter().all(|v| r.violated.contains(v)))
            }
            Certificate::LiftLeavesFsm { point, table, violated } => {
                let ps = load_prefs(first)?;
                if !fsm_check(&ps, point)?.member {
                    return Ok(false);
                }
                let exp = expand(&ps, &InternalOrderTable::parse(table)?)?;
                let r = fsm_check(&exp.expanded, &lift_point(point, &exp)?)?;
                Ok(!r.member && !violated.is_empty() && violated.iter().all(|v| r.violated.contains(v)))
            }
            Certificate::TheoremViolations { c_bound, violations } => {
                let h = load_multigraph(first)?;
                let opts = SweepOptions { budget, ..SweepOptions::new(*c_bound) };
                let mut cache = PolyCache::new();
                if violations.is_empty() {
                    return Ok(false);
                }
                for v in violations {
                    let verdict = judge_encoding(&h, &v.encoding, &opts, &mut cache)?;
                    if violation_of(&verdict).is_none() {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

fn objective_as_rationals(obj: &BTreeMap<String, i64>) -> BTreeMap<String, Rational> {
    obj.iter().map(|(k, v)| (k.clone(), Rational::from_integer(*v))).collect()
}

/// Feasible, and the tight rows have full column rank.
fn is_vertex(sys: &LinearSystem, x: &FractionalPoint) -> bool {
    if !sys.is_satisfied_by(x) || x.values.keys().any(|k| !sys.variables.contains(k)) {
        return false;
    }
    let tight: Vec<Vec<Rational>> = sys
        .rows
        .iter()
        .filter(|r| r.is_tight(x))
        .map(|r| sys.variables.iter().map(|v| r.coeffs.get(v).cloned().unwrap_or_else(Rational::zero)).collect())
        .collect();
    rank(tight) == sys.variables.len()
}

fn rank(mut m: Vec<Vec<Rational>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone() / m[r][c].clone();
                for j in c..cols {
                    let t = f.clone() * m[r][j].clone();
                    m[i][j] = m[i][j].clone() - t;
                }
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_small_matrices() {
        let q = Rational::from_integer;
        assert_eq!(rank(vec![vec![q(1), q(2)], vec![q(2), q(4)]]), 1);
        assert_eq!(rank(vec![vec![q(1), q(0)], vec![q(1), q(1)], vec![q(0), q(3)]]), 2);
        assert_eq!(rank(Vec::new()), 0);
    }

    #[test]
    fn parses_bare_and_wrapped() {
        let bare = r#"{"kind":"no_kernel"}"#;
        assert_eq!(Certificate::from_output(bare).unwrap(), Certificate::NoKernel);
        let wrapped = r#"{"kernel":null,"certificate":{"kind":"kernel_free","subset":["a","b"]}}"#;
        assert_eq!(Certificate::from_output(wrapped).unwrap().kind(), "kernel_free");
    }
}
