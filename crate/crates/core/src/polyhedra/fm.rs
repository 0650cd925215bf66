use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

use super::lp::{solve_lp_exact, LpStatus, Sense};
use super::{render_terms, LinearSystem, Relation, Row};

/// Result of eliminating one variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FmStep {
    pub eliminated: String,
    pub system: LinearSystem,
    /// Set when the variable had a coefficient outside {0, ±1}, in which
    /// case total dual integrality need not survive the elimination.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Project out `var`: every row with a positive coefficient is paired with
/// every row with a negative one, rows without `var` are kept, and the
/// result is canonicalized.
pub fn fm_eliminate(sys: &LinearSystem, var: &str) -> Result<FmStep> {
    if !sys.variables.iter().any(|v| v == var) {
        return Err(Error::UnknownVariable(var.to_string()));
    }
    let mut warning = None;
    let mut keep = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for row in &sys.rows {
        let (coeffs, rhs) = row.as_le();
        match coeffs.get(var) {
            None => keep.push(row.clone()),
            Some(a) => {
                if a.abs() != Rational::one() && warning.is_none() {
                    warning = Some(format!("`{var}` has coefficient {a} in row `{}`", row.label));
                }
                if a.is_positive() {
                    upper.push((row.label.clone(), coeffs, rhs));
                } else {
                    lower.push((row.label.clone(), coeffs, rhs));
                }
            }
        }
    }
    let variables: Vec<String> = sys.variables.iter().filter(|v| *v != var).cloned().collect();
    let mut rows = keep;
    for (pl, pc, pb) in &upper {
        for (nl, nc, nb) in &lower {
            let p = &pc[var];
            let q = -&nc[var];
            let mut coeffs: BTreeMap<String, Rational> = BTreeMap::new();
            for (v, a) in pc {
                *coeffs.entry(v.clone()).or_insert_with(Rational::zero) += &(&q * a);
            }
            for (v, a) in nc {
                *coeffs.entry(v.clone()).or_insert_with(Rational::zero) += &(p * a);
            }
            coeffs.remove(var);
            coeffs.retain(|_, a| !a.is_zero());
            let rhs = &(&q * pb) + &(p * nb);
            rows.push(Row { label: format!("({pl} + {nl})"), coeffs, rel: Relation::Le, rhs });
        }
    }
    let system = canonicalize(&LinearSystem { variables, rows });
    Ok(FmStep { eliminated: var.to_string(), system, warning })
}

/// Eliminate variables in order, returning every intermediate step.
pub fn fm_eliminate_all<S: AsRef<str>>(sys: &LinearSystem, order: &[S]) -> Result<Vec<FmStep>> {
    let mut steps: Vec<FmStep> = Vec::with_capacity(order.len());
    for v in order {
        let current = steps.last().map_or(sys, |s| &s.system);
        steps.push(fm_eliminate(current, v.as_ref())?);
    }
    Ok(steps)
}

/// Primitive-integer coefficient vector and rhs of a row in `<=` form.
fn primitive(row: &Row) -> (BTreeMap<String, BigInt>, Rational) {
    let (coeffs, rhs) = row.as_le();
    if coeffs.is_empty() {
        return (BTreeMap::new(), rhs);
    }
    let lcm = coeffs.values().fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
    let ints: BTreeMap<String, BigInt> = coeffs.iter().map(|(v, a)| (v.clone(), a.numer() * &lcm / a.denom())).collect();
    let gcd = ints.values().fold(BigInt::zero(), |acc, a| acc.gcd(a));
    let ints = ints.into_iter().map(|(v, a)| (v, a / &gcd)).collect();
    let scale = Rational::from_big(lcm, gcd);
    (ints, &rhs * &scale)
}

fn from_primitive(label: String, coeffs: &BTreeMap<String, BigInt>, rhs: &Rational) -> Row {
    let flip = !coeffs.is_empty() && coeffs.values().all(|a| a.is_negative());
    let sign = if flip { -Rational::one() } else { Rational::one() };
    Row {
        label,
        coeffs: coeffs.iter().map(|(v, a)| (v.clone(), &sign * &Rational::from_bigint(a.clone()))).collect(),
        rel: if flip { Relation::Ge } else { Relation::Le },
        rhs: &sign * rhs,
    }
}

/// Scale rows to primitive integer coefficients, drop tautologies `0 <= b`
/// with `b >= 0`, exact duplicates, and rows implied by a single other row
/// with the same left-hand side. Rows written with only nonpositive
/// coefficients are flipped to `>=`. The first row of each group keeps its label.
pub fn canonicalize(sys: &LinearSystem) -> LinearSystem {
    let mut best: BTreeMap<BTreeMap<String, BigInt>, (usize, Rational)> = BTreeMap::new();
    let mut labels = Vec::new();
    for (i, row) in sys.rows.iter().enumerate() {
        let (coeffs, rhs) = primitive(row);
        if coeffs.is_empty() && !rhs.is_negative() {
            continue;
        }
        labels.push(row.label.clone());
        match best.get_mut(&coeffs) {
            Some((_, b)) if *b <= rhs => {}
            Some(slot) => *slot = (i, rhs),
            None => {
                best.insert(coeffs, (i, rhs));
            }
        }
    }
    let mut kept: Vec<(usize, Row)> = best
        .iter()
        .map(|(coeffs, (i, rhs))| (*i, from_primitive(sys.rows[*i].label.clone(), coeffs, rhs)))
        .collect();
    kept.sort_by_key(|(i, _)| *i);
    LinearSystem { variables: sys.variables.clone(), rows: kept.into_iter().map(|(_, r)| r).collect() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    /// Equal sets of canonical rows.
    Syntactic,
    /// Every row of each system is implied by the other system (LP check).
    Implied,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchReport {
    pub matched: bool,
    pub only_in_a: Vec<String>,
    pub only_in_b: Vec<String>,
}

/// Compare `a` (with variables renamed) against `b`.
pub fn systems_match(a: &LinearSystem, b: &LinearSystem, renaming: &BTreeMap<String, String>, mode: MatchMode) -> Result<MatchReport> {
    let a = canonicalize(&a.renamed(renaming)?);
    let b = canonicalize(b);
    let va: BTreeSet<&String> = a.variables.iter().collect();
    let vb: BTreeSet<&String> = b.variables.iter().collect();
    let mut only_in_a: Vec<String> = va.difference(&vb).map(|v| format!("variable {v}")).collect();
    let mut only_in_b: Vec<String> = vb.difference(&va).map(|v| format!("variable {v}")).collect();
    if only_in_a.is_empty() && only_in_b.is_empty() {
        let key = |s: &LinearSystem| -> BTreeSet<String> { s.rows.iter().map(|r| r.render()).collect() };
        let (ka, kb) = (key(&a), key(&b));
        match mode {
            MatchMode::Syntactic => {
                only_in_a = ka.difference(&kb).cloned().collect();
                only_in_b = kb.difference(&ka).cloned().collect();
            }
            MatchMode::Implied => {
                only_in_a = not_implied(&a, &b, &kb)?;
                only_in_b = not_implied(&b, &a, &ka)?;
            }
        }
    }
    Ok(MatchReport { matched: only_in_a.is_empty() && only_in_b.is_empty(), only_in_a, only_in_b })
}

/// Rows of `a` that `b` does not imply; rows rendered in `present` are
/// taken as implied without solving.
fn not_implied(a: &LinearSystem, b: &LinearSystem, present: &BTreeSet<String>) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for row in a.rows.iter().filter(|r| !present.contains(&r.render())) {
        let (coeffs, rhs) = row.as_le();
        let lp = solve_lp_exact(b, &coeffs, Sense::Max)?;
        let implied = match lp.status {
            LpStatus::Infeasible => true,
            LpStatus::Unbounded => false,
            LpStatus::Optimal => lp.value.as_ref().is_some_and(|v| *v <= rhs),
        };
        if !implied {
            out.push(render_terms(&row.coeffs, row.rel, &row.rhs));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(vars: &[&str], rows: &[(&str, &[(&str, i64)], Relation, i64)]) -> LinearSystem {
        let mut s = LinearSystem::new(vars);
        for (label, coeffs, rel, rhs) in rows {
            s.push(*label, coeffs.iter().map(|(v, a)| (v.to_string(), Rational::from_integer(*a))), *rel, (*rhs).into())
                .unwrap();
        }
        s
    }

    #[test]
    fn chain_elimination() {
        let s = sys(
            &["x", "y", "z"],
            &[("a", &[("y", 1), ("x", -1)], Relation::Ge, 0), ("b", &[("y", 1), ("z", -1)], Relation::Le, 0)],
        );
        let step = fm_eliminate(&s, "y").unwrap();
        assert_eq!(step.system.rows.len(), 1);
        assert_eq!(step.system.rows[0].render(), "x(x) - x(z) <= 0");
        assert!(step.warning.is_none());
    }

    #[test]
    fn bounds_cancel_to_nothing() {
        let s = sys(&["x"], &[("hi", &[("x", 1)], Relation::Le, 1), ("lo", &[("x", 1)], Relation::Ge, 0)]);
        let step = fm_eliminate(&s, "x").unwrap();
        assert!(step.system.rows.is_empty());
        assert!(step.system.variables.is_empty());
    }

    #[test]
    fn warns_on_non_unit_coefficient() {
        let s = sys(&["x", "y"], &[("a", &[("x", 2), ("y", 1)], Relation::Le, 3), ("b", &[("x", 1)], Relation::Ge, 0)]);
        assert!(fm_eliminate(&s, "x").unwrap().warning.is_some());
        assert_eq!(fm_eliminate(&s, "w"), Err(Error::UnknownVariable("w".into())));
    }

    #[test]
    fn canonical_form_drops_duplicates_and_dominated() {
        let s = sys(
            &["x", "y"],
            &[
                ("a", &[("x", 2), ("y", 2)], Relation::Le, 2),
                ("b", &[("x", 1), ("y", 1)], Relation::Le, 1),
                ("c", &[("x", 1), ("y", 1)], Relation::Le, 5),
                ("d", &[("x", -1)], Relation::Le, 0),
            ],
        );
        let c = canonicalize(&s);
        let rendered: Vec<String> = c.rows.iter().map(|r| r.render()).collect();
        assert_eq!(rendered, ["x(x) + x(y) <= 1", "x(x) >= 0"]);
    }

    #[test]
    fn matching_modes() {
        let a = sys(&["p"], &[("r", &[("p", 1)], Relation::Le, 1), ("s", &[("p", 1)], Relation::Ge, 0)]);
        let b = sys(&["q"], &[("r", &[("q", 1)], Relation::Le, 1), ("s", &[("q", 1)], Relation::Ge, 0)]);
        let ren = BTreeMap::from([("p".to_string(), "q".to_string())]);
        assert!(systems_match(&a, &b, &ren, MatchMode::Syntactic).unwrap().matched);
        let c = sys(&["q"], &[("r", &[("q", 1)], Relation::Le, 2), ("s", &[("q", 1)], Relation::Ge, 0)]);
        let rep = systems_match(&a, &c, &ren, MatchMode::Syntactic).unwrap();
        assert!(!rep.matched);
        assert_eq!(rep.only_in_a, ["x(q) <= 1"]);
        assert_eq!(rep.only_in_b, ["x(q) <= 2"]);
        // an implied row that no single row dominates matches semantically only
        let tri = |extra: bool| {
            let mut rows: Vec<(&str, &[(&str, i64)], Relation, i64)> = vec![
                ("x", &[("x", 1)], Relation::Ge, 0),
                ("y", &[("y", 1)], Relation::Ge, 0),
                ("s", &[("x", 1), ("y", 1)], Relation::Le, 1),
            ];
            if extra {
                rows.push(("t", &[("x", 1)], Relation::Le, 1));
            }
            sys(&["x", "y"], &rows)
        };
        let none = BTreeMap::new();
        assert!(!systems_match(&tri(false), &tri(true), &none, MatchMode::Syntactic).unwrap().matched);
        assert!(systems_match(&tri(false), &tri(true), &none, MatchMode::Implied).unwrap().matched);
        let d2 = sys(
            &["q", "w"],
            &[("r", &[("q", 1)], Relation::Le, 1), ("s", &[("q", 1)], Relation::Ge, 0)],
        );
        assert!(!systems_match(&a, &d2, &ren, MatchMode::Implied).unwrap().matched);
    }
}
