use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::point::FractionalPoint;
use crate::rational::Rational;

use super::LinearSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of an exact LP solve with both certificates.
///
/// `dual` holds nonnegative multipliers, one per row label, for rows read in
/// `<=` form when maximizing and `>=` form when minimizing; on optimal
/// results they combine to the objective and their rhs sum equals `value`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LpResult {
    pub status: LpStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primal: Option<FractionalPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual: Option<BTreeMap<String, Rational>>,
}

impl LpResult {
    /// Re-check primal feasibility, dual feasibility, and equal objective values.
    pub fn verify(&self, sys: &LinearSystem, objective: &BTreeMap<String, Rational>, sense: Sense) -> bool {
        if self.status != LpStatus::Optimal {
            return true;
        }
        let (Some(value), Some(x), Some(y)) = (&self.value, &self.primal, &self.dual) else {
            return false;
        };
        if !sys.is_satisfied_by(x) {
            return false;
        }
        let primal_value: Rational = objective.iter().map(|(v, c)| c * x.get(v)).sum();
        if &primal_value != value {
            return false;
        }
        let flip = |r: &super::Row| match sense {
            Sense::Max => r.as_le(),
            Sense::Min => {
                let (c, b) = r.as_le();
                (c.into_iter().map(|(k, v)| (k, -v)).collect(), -b)
            }
        };
        let mut combo: BTreeMap<String, Rational> = BTreeMap::new();
        let mut dual_value = Rational::zero();
        for row in &sys.rows {
            let yi = y.get(&row.label).cloned().unwrap_or_else(Rational::zero);
            if yi.is_negative() {
                return false;
            }
            if yi.is_zero() {
                continue;
            }
            let (coeffs, rhs) = flip(row);
            for (v, a) in coeffs {
                *combo.entry(v).or_insert_with(Rational::zero) += &(&yi * &a);
            }
            dual_value += &(&yi * &rhs);
        }
        let combo_ok = sys.variables.iter().all(|v| {
            let lhs = combo.get(v).cloned().unwrap_or_else(Rational::zero);
            let c = objective.get(v).cloned().unwrap_or_else(Rational::zero);
            lhs == c
        });
        combo_ok && &dual_value == value
    }
}

/// Solve `max/min objective·x` over `sys` exactly (two-phase simplex,
/// Bland's rule). Variables not bounded by rows are free.
pub fn solve_lp_exact(sys: &LinearSystem, objective: &BTreeMap<String, Rational>, sense: Sense) -> Result<LpResult> {
    let idx = sys.var_index();
    let n = sys.variables.len();
    let mut c = vec![Rational::zero(); n];
    for (v, a) in objective {
        let j = *idx.get(v.as_str()).ok_or_else(|| Error::UnknownVariable(v.clone()))?;
        c[j] = match sense {
            Sense::Max => a.clone(),
            Sense::Min => -a,
        };
    }
    let (a, b): (Vec<_>, Vec<_>) = sys.dense_le().into_iter().unzip();
    Ok(match simplex_max(&a, &b, &c) {
        SimplexOutcome::Infeasible => LpResult { status: LpStatus::Infeasible, value: None, primal: None, dual: None },
        SimplexOutcome::Unbounded => LpResult { status: LpStatus::Unbounded, value: None, primal: None, dual: None },
        SimplexOutcome::Optimal { x, y, value } => LpResult {
            status: LpStatus::Optimal,
            value: Some(match sense {
                Sense::Max => value,
                Sense::Min => -value,
            }),
            primal: Some(FractionalPoint::from_dense(&sys.variables, &x)),
            dual: Some(sys.rows.iter().map(|r| r.label.clone()).zip(y).collect()),
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum SimplexOutcome {
    Optimal { x: Vec<Rational>, y: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

/// `max c·x` subject to `a x <= b`, `x` free. Duals `y >= 0` satisfy
/// `aᵀ y = c` and `b·y = value` on optimal outcomes.
pub(crate) fn simplex_max(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> SimplexOutcome {
    let m = a.len();
    let n = c.len();
    // columns: x+ (n), x- (n), slacks (m), artificials
    let slack0 = 2 * n;
    let mut art_rows = Vec::new();
    for (i, bi) in b.iter().enumerate() {
        if bi.is_negative() {
            art_rows.push(i);
        }
    }
    let art0 = slack0 + m;
    let cols = art0 + art_rows.len();
    let mut t = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        obj: vec![Rational::zero(); cols],
        cols,
    };
    for i in 0..m {
        let neg = b[i].is_negative();
        let sign = |r: &Rational| if neg { -r } else { r.clone() };
        let mut row = vec![Rational::zero(); cols];
        for j in 0..n {
            row[j] = sign(&a[i][j]);
            row[n + j] = -&row[j];
        }
        row[slack0 + i] = if neg { -Rational::one() } else { Rational::one() };
        if neg {
            let k = art_rows.iter().position(|&r| r == i).unwrap();
            row[art0 + k] = Rational::one();
            t.basis.push(art0 + k);
        } else {
            t.basis.push(slack0 + i);
        }
        t.rows.push(row);
        t.rhs.push(sign(&b[i]));
    }

    if !art_rows.is_empty() {
        // phase 1: maximize -sum(artificials)
        let mut cost = vec![Rational::zero(); cols];
        for j in art0..cols {
            cost[j] = -Rational::one();
        }
        t.set_objective(&cost);
        if !t.optimize(cols) {
            unreachable!("phase 1 is bounded");
        }
        let value: Rational = t.value(&cost);
        if value.is_negative() {
            return SimplexOutcome::Infeasible;
        }
        // drive artificials out of the basis
        for r in 0..m {
            if t.basis[r] >= art0 {
                let j = (0..art0)
                    .find(|&j| !t.rows[r][j].is_zero())
                    .expect("slack block keeps every row nonzero");
                t.pivot(r, j);
            }
        }
        for row in &mut t.rows {
            row.truncate(art0);
        }
        t.cols = art0;
        t.obj.truncate(art0);
    }

    let mut cost = vec![Rational::zero(); t.cols];
    for j in 0..n {
        cost[j] = c[j].clone();
        cost[n + j] = -&c[j];
    }
    t.set_objective(&cost);
    if !t.optimize(t.cols) {
        return SimplexOutcome::Unbounded;
    }
    let mut full = vec![Rational::zero(); t.cols];
    for (r, &j) in t.basis.iter().enumerate() {
        full[j] = t.rhs[r].clone();
    }
    let x: Vec<Rational> = (0..n).map(|j| &full[j] - &full[n + j]).collect();
    let y: Vec<Rational> = (0..m).map(|i| -&t.obj[slack0 + i]).collect();
    let value = t.value(&cost);
    SimplexOutcome::Optimal { x, y, value }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// reduced costs c_j - z_j
    obj: Vec<Rational>,
    cols: usize,
}

impl Tableau {
    fn set_objective(&mut self, cost: &[Rational]) {
        self.obj = cost.to_vec();
        for r in 0..self.rows.len() {
            let cb = &cost[self.basis[r]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                if !self.rows[r][j].is_zero() {
                    let d = cb * &self.rows[r][j];
                    self.obj[j] -= &d;
                }
            }
        }
    }

    fn value(&self, cost: &[Rational]) -> Rational {
        self.basis
            .iter()
            .zip(&self.rhs)
            .map(|(&j, v)| &cost[j] * v)
            .sum()
    }

    /// Bland's rule; false when unbounded.
    fn optimize(&mut self, cols: usize) -> bool {
        loop {
            let Some(enter) = (0..cols).find(|&j| self.obj[j].is_positive()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.rows[r][j].clone();
        if p != Rational::one() {
            for x in self.rows[r].iter_mut() {
                if !x.is_zero() {
                    *x = &*x / &p;
                }
            }
            self.rhs[r] = &self.rhs[r] / &p;
        }
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for k in 0..self.rows.len() {
            if k == r || self.rows[k][j].is_zero() {
                continue;
            }
            let f = self.rows[k][j].clone();
            for (x, pr) in self.rows[k].iter_mut().zip(&pivot_row) {
                if !pr.is_zero() {
                    *x -= &(&f * pr);
                }
            }
            self.rhs[k] -= &(&f * &pivot_rhs);
        }
        if !self.obj[j].is_zero() {
            let f = self.obj[j].clone();
            for (x, pr) in self.obj.iter_mut().zip(&pivot_row) {
                if !pr.is_zero() {
                    *x -= &(&f * pr);
                }
            }
        }
        self.basis[r] = j;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedra::Relation;

    fn obj(pairs: &[(&str, i64)]) -> BTreeMap<String, Rational> {
        pairs.iter().map(|(v, c)| (v.to_string(), Rational::from_integer(*c))).collect()
    }

    #[test]
    fn small_max_problem() {
        // max x + y, x + 2y <= 4, 3x + y <= 6, x,y >= 0  -> (8/5, 6/5), value 14/5
        let mut s = LinearSystem::new(&["x", "y"]);
        s.push("a", [("x".into(), 1.into()), ("y".into(), 2.into())], Relation::Le, 4.into()).unwrap();
        s.push("b", [("x".into(), 3.into()), ("y".into(), 1.into())], Relation::Le, 6.into()).unwrap();
        s.push_sum("nx", &["x"], Relation::Ge, 0).unwrap();
        s.push_sum("ny", &["y"], Relation::Ge, 0).unwrap();
        let o = obj(&[("x", 1), ("y", 1)]);
        let r = solve_lp_exact(&s, &o, Sense::Max).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert_eq!(r.value, Some(Rational::new(14, 5)));
        assert!(r.verify(&s, &o, Sense::Max));
        let y = r.dual.unwrap();
        assert_eq!(y["a"], Rational::new(2, 5));
        assert_eq!(y["b"], Rational::new(1, 5));
    }

    #[test]
    fn min_with_ge_rows() {
        let mut s = LinearSystem::new(&["x", "y"]);
        s.push_sum("cover", &["x", "y"], Relation::Ge, 1).unwrap();
        s.push_sum("nx", &["x"], Relation::Ge, 0).unwrap();
        s.push_sum("ny", &["y"], Relation::Ge, 0).unwrap();
        let o = obj(&[("x", 2), ("y", 3)]);
        let r = solve_lp_exact(&s, &o, Sense::Min).unwrap();
        assert_eq!(r.value, Some(Rational::from_integer(2)));
        assert!(r.verify(&s, &o, Sense::Min));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut s = LinearSystem::new(&["x"]);
        s.push_sum("lo", &["x"], Relation::Ge, 2).unwrap();
        s.push_sum("hi", &["x"], Relation::Le, 1).unwrap();
        let r = solve_lp_exact(&s, &obj(&[("x", 1)]), Sense::Max).unwrap();
        assert_eq!(r.status, LpStatus::Infeasible);

        let mut s = LinearSystem::new(&["x"]);
        s.push_sum("lo", &["x"], Relation::Ge, 2).unwrap();
        let r = solve_lp_exact(&s, &obj(&[("x", 1)]), Sense::Max).unwrap();
        assert_eq!(r.status, LpStatus::Unbounded);
        let r = solve_lp_exact(&s, &obj(&[("x", 1)]), Sense::Min).unwrap();
        assert_eq!(r.value, Some(Rational::from_integer(2)));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // a classic cycling example under the largest-coefficient rule
        let mut s = LinearSystem::new(&["x1", "x2", "x3", "x4"]);
        let row = |c: [(i64, i64); 4]| -> Vec<(String, Rational)> {
            c.iter().enumerate().map(|(i, (p, q))| (format!("x{}", i + 1), Rational::new(*p, *q))).collect()
        };
        s.push("r1", row([(1, 4), (-8, 1), (-1, 1), (9, 1)]), Relation::Le, 0.into()).unwrap();
        s.push("r2", row([(1, 2), (-12, 1), (-1, 2), (3, 1)]), Relation::Le, 0.into()).unwrap();
        s.push("r3", row([(0, 1), (0, 1), (1, 1), (0, 1)]), Relation::Le, 1.into()).unwrap();
        for v in ["x1", "x2", "x3", "x4"] {
            s.push_sum(format!("n{v}"), &[v], Relation::Ge, 0).unwrap();
        }
        let o: BTreeMap<String, Rational> = row([(3, 4), (-20, 1), (1, 2), (-6, 1)]).into_iter().collect();
        let r = solve_lp_exact(&s, &o, Sense::Max).unwrap();
        assert_eq!(r.value, Some(Rational::new(5, 4)));
        assert!(r.verify(&s, &o, Sense::Max));
    }
}
