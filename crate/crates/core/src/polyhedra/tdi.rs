use std::collections::{BTreeMap, VecDeque};

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Budget, Error, Result};
use crate::point::FractionalPoint;
use crate::rational::Rational;

use super::lp::{simplex_max, solve_lp_exact, LpStatus, Sense, SimplexOutcome};
use super::vertices::{enumerate_vertices, VertexSet};
use super::LinearSystem;

/// Largest box, in cells, explored by the exhaustive dual search.
const REACH_CELLS: u64 = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegralityReport {
    pub k: u32,
    pub integral: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<FractionalPoint>,
    pub vertices: VertexSet,
}

/// Whether every vertex of the polytope is 1/k-integral; the witness is
/// the first vertex (in sorted order) that is not.
pub fn check_integrality(sys: &LinearSystem, k: u32, budget: Budget) -> Result<IntegralityReport> {
    if k == 0 {
        return Err(Error::Invalid("k must be positive".into()));
    }
    let vertices = enumerate_vertices(sys, budget)?;
    let witness = vertices.vertices.iter().find(|v| !v.is_integral_over(k)).cloned();
    Ok(IntegralityReport { k, integral: witness.is_none(), witness, vertices })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TdiVerdict {
    /// No failing objective inside the box; bounded evidence only.
    Pass,
    /// Some objective has no 1/k-integral optimal dual.
    Fail,
}

/// An integral objective whose dual optimal face has no 1/k-integral point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TdiFailure {
    pub objective: BTreeMap<String, i64>,
    pub optimum: Rational,
    pub vertex: FractionalPoint,
    pub tight_rows: Vec<String>,
    /// Some optimal dual, for reference; it is necessarily not 1/k-integral.
    pub rational_dual: BTreeMap<String, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TdiReport {
    pub k: u32,
    pub c_bound: u32,
    pub verdict: TdiVerdict,
    pub objectives_checked: u64,
    pub failures: Vec<TdiFailure>,
}

#[derive(Debug, Clone, Copy)]
pub struct TdiOptions {
    pub k: u32,
    pub c_bound: u32,
    /// Stop the sweep after this many failures.
    pub max_failures: usize,
    pub budget: Budget,
}

/// Bounded total dual 1/k-integrality check over every integral objective
/// with entries in `[-c_bound, c_bound]`.
pub fn check_tdi(sys: &LinearSystem, k: u32, c_bound: u32, budget: Budget) -> Result<TdiReport> {
    check_tdi_with(sys, TdiOptions { k, c_bound, max_failures: 16, budget })
}

pub fn check_tdi_with(sys: &LinearSystem, opts: TdiOptions) -> Result<TdiReport> {
    let mut ctx = DualContext::new(sys, opts.k, opts.budget)?;
    let n = sys.variables.len();
    let b = opts.c_bound as i64;
    let side = (2 * b + 1) as u128;
    opts.budget.check("objectives", side.saturating_pow(n as u32))?;
    let mut c = vec![-b; n];
    let mut checked = 0u64;
    let mut failures = Vec::new();
    loop {
        checked += 1;
        let v = ctx.best_vertex(&c);
        if ctx.decide(v, &c)?.is_none() {
            failures.push(ctx.failure(v, &c)?);
            if failures.len() >= opts.max_failures {
                break;
            }
        }
        // odometer, last variable fastest
        let mut i = n;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if c[i] < b {
                c[i] += 1;
                break;
            }
            c[i] = -b;
        }
        if c.iter().all(|&x| x == -b) {
            break;
        }
    }
    Ok(TdiReport {
        k: opts.k,
        c_bound: opts.c_bound,
        verdict: if failures.is_empty() { TdiVerdict::Pass } else { TdiVerdict::Fail },
        objectives_checked: checked,
        failures,
    })
}

/// A 1/k-integral optimal dual for `max c·x` over the system, keyed by row
/// label (rows read in `<=` form), or `None` when none exists.
pub fn integral_dual(
    sys: &LinearSystem,
    objective: &BTreeMap<String, i64>,
    k: u32,
    budget: Budget,
) -> Result<Option<BTreeMap<String, Rational>>> {
    let mut ctx = DualContext::new(sys, k, budget)?;
    let c: Vec<i64> = sys.variables.iter().map(|v| objective.get(v).copied().unwrap_or(0)).collect();
    for key in objective.keys() {
        if !sys.variables.contains(key) {
            return Err(Error::UnknownVariable(key.clone()));
        }
    }
    let v = ctx.best_vertex(&c);
    Ok(ctx.decide(v, &c)?.map(|y| ctx.dual_by_label(v, &y)))
}

/// Bases kept per vertex, most recently successful first.
const BASIS_CACHE: usize = 32;

/// Cache misses at one vertex before its small reachable set is built.
const NEAR_AFTER_MISSES: usize = 64;

struct DualContext<'a> {
    sys: &'a LinearSystem,
    k: i64,
    budget: Budget,
    vertices: VertexSet,
    scaled: Vec<Vec<i128>>,
    per_vertex: Vec<VertexDual>,
}

struct VertexDual {
    tight: Vec<usize>,
    /// Distinct tight row vectors; `gen_row[j]` is a row realizing `gens[j]`.
    gens: Vec<Vec<i64>>,
    gen_row: Vec<usize>,
    bases: Vec<Basis>,
    reach: Option<Reach>,
    /// Reachable set in a box too small for completeness: a hit proves
    /// decomposability, a miss proves nothing.
    near: Option<Reach>,
    misses: usize,
}

struct Basis {
    cols: Vec<usize>,
    /// `scale · B⁻¹` with integer entries.
    adj: Vec<Vec<i64>>,
    scale: i64,
}

struct Reach {
    radius: i64,
    side: i64,
    /// generator index used to enter each cell; `u16::MAX` when unreached
    parent: Vec<u16>,
}

impl<'a> DualContext<'a> {
    fn new(sys: &'a LinearSystem, k: u32, budget: Budget) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("k must be positive".into()));
        }
        let rows: Vec<Vec<i64>> = sys
            .dense_le()
            .into_iter()
            .zip(&sys.rows)
            .map(|((a, _), r)| {
                a.iter()
                    .map(|x| x.to_i64().filter(|_| x.is_integer()))
                    .collect::<Option<Vec<i64>>>()
                    .ok_or_else(|| Error::NonIntegral(r.label.clone()))
            })
            .collect::<Result<_>>()?;
        let vertices = enumerate_vertices(sys, budget)?;
        let mut lcm = num_bigint::BigInt::from(1);
        for v in &vertices.vertices {
            for x in v.values.values() {
                lcm = lcm.lcm(x.denom());
            }
        }
        let scaled = vertices
            .vertices
            .iter()
            .map(|v| {
                v.dense(&sys.variables)
                    .iter()
                    .map(|x| (x.numer() * &lcm / x.denom()).to_i128())
                    .collect::<Option<Vec<i128>>>()
                    .ok_or_else(|| Error::Invalid("vertex coordinates too large".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let per_vertex = vertices
            .vertices
            .iter()
            .map(|v| {
                let tight: Vec<usize> = (0..sys.rows.len()).filter(|&i| sys.rows[i].is_tight(v)).collect();
                let mut gens: Vec<Vec<i64>> = Vec::new();
                let mut gen_row = Vec::new();
                for &i in &tight {
                    if !gens.contains(&rows[i]) && rows[i].iter().any(|&x| x != 0) {
                        gens.push(rows[i].clone());
                        gen_row.push(i);
                    }
                }
                VertexDual { tight, gens, gen_row, bases: Vec::new(), reach: None, near: None, misses: 0 }
            })
            .collect();
        Ok(DualContext { sys, k: k as i64, budget, vertices, scaled, per_vertex })
    }

    fn best_vertex(&self, c: &[i64]) -> usize {
        let val = |v: &Vec<i128>| -> i128 { v.iter().zip(c).map(|(x, &ci)| x * ci as i128).sum() };
        let mut best = 0;
        let mut best_val = val(&self.scaled[0]);
        for (i, v) in self.scaled.iter().enumerate().skip(1) {
            let x = val(v);
            if x > best_val {
                best = i;
                best_val = x;
            }
        }
        best
    }

    /// Integer multipliers `w` over the vertex's generators with
    /// `Σ w_j g_j = k c`, or `None` when there are none.
    fn decide(&mut self, v: usize, c: &[i64]) -> Result<Option<Vec<i64>>> {
        let n = c.len();
        let k = self.k;
        let budget = self.budget;
        let cmax = c.iter().map(|x| x.abs()).max().unwrap_or(0);
        let t: Vec<i64> = c.iter().map(|&x| x * k).collect();
        if t.iter().all(|&x| x == 0) {
            return Ok(Some(vec![0; self.per_vertex[v].gens.len()]));
        }
        let pv = &mut self.per_vertex[v];

        // cached bases, most recently successful first
        for bi in 0..pv.bases.len() {
            if let Some(w) = pv.bases[bi].solve(&t, pv.gens.len()) {
                pv.bases[..=bi].rotate_right(1);
                return Ok(Some(w));
            }
        }

        pv.misses += 1;
        if pv.misses >= NEAR_AFTER_MISSES && pv.gens.len() < u16::MAX as usize {
            let amax = pv.gens.iter().flatten().map(|x| x.abs()).max().unwrap_or(1);
            let fits = |r: i64| ((2 * r + 1) as u128).checked_pow(n as u32).is_some_and(|c| c <= REACH_CELLS as u128);
            let want = (k * cmax..=k * cmax + amax).rev().find(|&r| fits(r));
            if let Some(r) = want {
                if pv.near.as_ref().is_none_or(|near| near.radius < r) {
                    pv.near = Some(Reach::build(&pv.gens, r, n));
                }
            }
            if let Some(w) = pv.near.as_ref().and_then(|near| near.decompose(&pv.gens, &t)) {
                return Ok(Some(w));
            }
        }

        // a basic optimal dual from the LP
        let Some(y) = min_sum_solution(&pv.gens, &t, &[], &[], None) else {
            return Err(Error::Invalid("objective is not in the normal cone of its optimal vertex".into()));
        };
        if let Some(basis) = Basis::around(&pv.gens, &y, n) {
            let hit = basis.solve(&t, pv.gens.len());
            pv.bases.insert(0, basis);
            pv.bases.truncate(BASIS_CACHE);
            if let Some(w) = hit {
                return Ok(Some(w));
            }
        }

        // exhaustive search
        let amax = pv.gens.iter().flatten().map(|x| x.abs()).max().unwrap_or(1);
        let radius = k * cmax + 2 * n as i64 * amax;
        let side = 2 * radius + 1;
        let cells = (side as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if cells <= REACH_CELLS as u128 && pv.gens.len() < u16::MAX as usize {
            if pv.reach.as_ref().is_none_or(|r| r.radius < radius) {
                pv.reach = Some(Reach::build(&pv.gens, radius, n));
            }
            return Ok(pv.reach.as_ref().unwrap().decompose(&pv.gens, &t));
        }
        branch_and_bound(&pv.gens, &t, budget)
    }

    fn dual_by_label(&self, v: usize, w: &[i64]) -> BTreeMap<String, Rational> {
        let pv = &self.per_vertex[v];
        let mut out: BTreeMap<String, Rational> =
            self.sys.rows.iter().map(|r| (r.label.clone(), Rational::zero())).collect();
        for (j, &wj) in w.iter().enumerate() {
            if wj != 0 {
                out.insert(self.sys.rows[pv.gen_row[j]].label.clone(), Rational::new(wj, self.k));
            }
        }
        out
    }

    fn failure(&self, v: usize, c: &[i64]) -> Result<TdiFailure> {
        let objective: BTreeMap<String, i64> = self.sys.variables.iter().cloned().zip(c.iter().copied()).collect();
        let obj_r: BTreeMap<String, Rational> =
            objective.iter().map(|(k, &x)| (k.clone(), Rational::from_integer(x))).collect();
        let lp = solve_lp_exact(self.sys, &obj_r, Sense::Max)?;
        debug_assert_eq!(lp.status, LpStatus::Optimal);
        let vertex = self.vertices.vertices[v].clone();
        let optimum = obj_r.iter().map(|(k, x)| x * vertex.get(k)).sum();
        Ok(TdiFailure {
            objective,
            optimum,
            tight_rows: self.per_vertex[v].tight.iter().map(|&i| self.sys.rows[i].label.clone()).collect(),
            vertex,
            rational_dual: lp.dual.unwrap_or_default(),
        })
    }
}

impl Basis {
    /// Extend the support of `y` to `n` independent generators.
    fn around(gens: &[Vec<i64>], y: &[Rational], n: usize) -> Option<Basis> {
        let mut cols: Vec<usize> = (0..gens.len()).filter(|&j| !y[j].is_zero()).collect();
        let mut order: Vec<usize> = cols.clone();
        order.extend((0..gens.len()).filter(|j| y[*j].is_zero()));
        let mut chosen = Vec::new();
        let mut echelon: Vec<(usize, Vec<Rational>)> = Vec::new();
        for j in order {
            let mut r: Vec<Rational> = gens[j].iter().map(|&x| Rational::from_integer(x)).collect();
            for (p, e) in &echelon {
                if !r[*p].is_zero() {
                    let f = &r[*p] / &e[*p];
                    for i in 0..n {
                        let d = &f * &e[i];
                        r[i] -= &d;
                    }
                }
            }
            if let Some(p) = r.iter().position(|x| !x.is_zero()) {
                echelon.push((p, r));
                chosen.push(j);
                if chosen.len() == n {
                    break;
                }
            }
        }
        if chosen.len() < n {
            return None;
        }
        cols.clear();
        cols.extend(chosen);
        let m: Vec<Vec<Rational>> =
            cols.iter().map(|&j| gens[j].iter().map(|&x| Rational::from_integer(x)).collect()).collect();
        let inv = rational_inverse(&m)?;
        let scale = crate::rational::common_denominator(inv.iter().flatten());
        let adj = inv
            .iter()
            .map(|row| row.iter().map(|x| (x.numer() * &scale / x.denom()).to_i64()).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(Basis { cols, adj, scale: scale.to_i64()? })
    }

    /// `w = t B⁻¹` when it is nonnegative and integral.
    fn solve(&self, t: &[i64], len: usize) -> Option<Vec<i64>> {
        let n = t.len();
        let mut w = vec![0i64; len];
        for (jj, &col) in self.cols.iter().enumerate() {
            let num: i128 = (0..n).map(|i| t[i] as i128 * self.adj[i][jj] as i128).sum();
            if num < 0 || num % self.scale as i128 != 0 {
                return None;
            }
            w[col] = (num / self.scale as i128) as i64;
        }
        Some(w)
    }
}

fn rational_inverse(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, p);
        let piv = m[c][c].clone();
        for x in m[c].iter_mut() {
            *x = &*x / &piv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for j in 0..2 * n {
                    let d = &f * &m[c][j];
                    m[r][j] -= &d;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

impl Reach {
    /// Breadth-first closure of the origin under adding generators, inside
    /// the box of the given radius. If `t = Σ w_j g_j` with `w >= 0`
    /// integral, the summands can be ordered so every partial sum stays
    /// within `2 n max|g|` of the segment `[0, t]` (Steinitz lemma).
    fn build(gens: &[Vec<i64>], radius: i64, n: usize) -> Reach {
        let side = 2 * radius + 1;
        let cells = side.pow(n as u32) as usize;
        let mut parent = vec![u16::MAX; cells];
        let origin = encode(&vec![0; n], radius, side).unwrap();
        parent[origin] = u16::MAX - 1;
        let mut queue = VecDeque::from([origin]);
        let mut point = vec![0i64; n];
        while let Some(cell) = queue.pop_front() {
            decode(cell, radius, side, &mut point);
            for (j, g) in gens.iter().enumerate() {
                let next: Vec<i64> = point.iter().zip(g).map(|(a, b)| a + b).collect();
                if let Some(idx) = encode(&next, radius, side) {
                    if parent[idx] == u16::MAX {
                        parent[idx] = j as u16;
                        queue.push_back(idx);
                    }
                }
            }
        }
        Reach { radius, side, parent }
    }

    fn decompose(&self, gens: &[Vec<i64>], t: &[i64]) -> Option<Vec<i64>> {
        let mut idx = encode(t, self.radius, self.side)?;
        if self.parent[idx] == u16::MAX {
            return None;
        }
        let mut w = vec![0i64; gens.len()];
        let mut point = t.to_vec();
        while self.parent[idx] != u16::MAX - 1 {
            let j = self.parent[idx] as usize;
            w[j] += 1;
            for (p, g) in point.iter_mut().zip(&gens[j]) {
                *p -= g;
            }
            idx = encode(&point, self.radius, self.side).expect("parents stay in the box");
        }
        Some(w)
    }
}

fn encode(p: &[i64], radius: i64, side: i64) -> Option<usize> {
    let mut idx: i64 = 0;
    for &x in p {
        if x.abs() > radius {
            return None;
        }
        idx = idx * side + (x + radius);
    }
    Some(idx as usize)
}

fn decode(mut idx: usize, radius: i64, side: i64, out: &mut [i64]) {
    for x in out.iter_mut().rev() {
        *x = (idx as i64 % side) - radius;
        idx /= side as usize;
    }
}

/// `min Σ y` over `y >= 0`, `Σ y_j g_j = t`, with optional bounds and a cap
/// on `Σ y`; `None` when infeasible.
fn min_sum_solution(
    gens: &[Vec<i64>],
    t: &[i64],
    lower: &[(usize, i64)],
    upper: &[(usize, i64)],
    cap: Option<&Rational>,
) -> Option<Vec<Rational>> {
    let m = gens.len();
    let n = t.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..n {
        let row: Vec<Rational> = gens.iter().map(|g| Rational::from_integer(g[i])).collect();
        a.push(row.iter().map(|x| -x).collect());
        b.push(Rational::from_integer(-t[i]));
        a.push(row);
        b.push(Rational::from_integer(t[i]));
    }
    for j in 0..m {
        let mut row = vec![Rational::zero(); m];
        row[j] = -Rational::one();
        let lo = lower.iter().filter(|(x, _)| *x == j).map(|(_, v)| *v).max().unwrap_or(0);
        a.push(row);
        b.push(Rational::from_integer(-lo));
    }
    for &(j, hi) in upper {
        let mut row = vec![Rational::zero(); m];
        row[j] = Rational::one();
        a.push(row);
        b.push(Rational::from_integer(hi));
    }
    if let Some(cap) = cap {
        a.push(vec![Rational::one(); m]);
        b.push(cap.clone());
    }
    match simplex_max(&a, &b, &vec![-Rational::one(); m]) {
        SimplexOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

/// Depth-first branch and bound for a nonnegative integral `w` with
/// `Σ w_j g_j = t`. Minimal solutions satisfy `Σ w <= (1 + max_i Σ_j |g_j[i]| + |t_i|)^n`
/// (Pottier), which bounds the search.
fn branch_and_bound(gens: &[Vec<i64>], t: &[i64], budget: Budget) -> Result<Option<Vec<i64>>> {
    let n = t.len();
    let base: i64 = (0..n)
        .map(|i| 1 + gens.iter().map(|g| g[i].abs()).sum::<i64>() + t[i].abs())
        .max()
        .unwrap_or(1);
    let cap = Rational::from_bigint(num_bigint::BigInt::from(base).pow(n as u32));
    let mut stack: Vec<(Vec<(usize, i64)>, Vec<(usize, i64)>)> = vec![(Vec::new(), Vec::new())];
    let mut nodes: u128 = 0;
    while let Some((lower, upper)) = stack.pop() {
        nodes += 1;
        budget.check("branch-and-bound nodes", nodes)?;
        let Some(y) = min_sum_solution(gens, t, &lower, &upper, Some(&cap)) else {
            continue;
        };
        match y.iter().position(|x| !x.is_integer()) {
            None => return Ok(Some(y.iter().map(|x| x.to_i64().expect("bounded")).collect())),
            Some(j) => {
                let fl = y[j].floor().to_i64().expect("bounded");
                let mut up = upper.clone();
                up.push((j, fl));
                let mut lo = lower.clone();
                lo.push((j, fl + 1));
                stack.push((lo, upper));
                stack.push((lower, up));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::CliqueMode;
    use crate::graph::tests::sec5;
    use crate::polyhedra::{build_sigma, Relation};

    #[test]
    fn sec5_integrality() {
        let s = build_sigma(&sec5(), CliqueMode::All, Budget::default()).unwrap();
        let r1 = check_integrality(&s, 1, Budget::default()).unwrap();
        assert!(!r1.integral);
        assert_eq!(r1.witness.unwrap().tuple(&s.variables), "(1/2, 1/2, 0, 1/2)");
        assert!(check_integrality(&s, 2, Budget::default()).unwrap().integral);
    }

    #[test]
    fn sec5_tdi() {
        let s = build_sigma(&sec5(), CliqueMode::All, Budget::default()).unwrap();
        let r = check_tdi(&s, 1, 2, Budget::default()).unwrap();
        assert_eq!(r.verdict, TdiVerdict::Fail);
        let f = &r.failures[0];
        assert!(!f.vertex.is_integral());
        let r2 = check_tdi(&s, 2, 2, Budget::default()).unwrap();
        assert_eq!(r2.verdict, TdiVerdict::Pass);
        assert_eq!(r2.objectives_checked, 625);
    }

    #[test]
    fn single_variable_equality_is_tdi() {
        let mut s = LinearSystem::new(&["x"]);
        s.push_sum("lo", &["x"], Relation::Ge, 1).unwrap();
        s.push_sum("hi", &["x"], Relation::Le, 1).unwrap();
        let r = check_tdi(&s, 1, 3, Budget::default()).unwrap();
        assert_eq!(r.verdict, TdiVerdict::Pass);
        let y = integral_dual(&s, &BTreeMap::from([("x".to_string(), -2)]), 1, Budget::default()).unwrap().unwrap();
        assert_eq!(y["lo"], Rational::from_integer(2));
    }

    #[test]
    fn half_plane_pair_needs_half_duals() {
        // x + y <= 1, x - y <= 0, -x + y <= 0 gives the segment x = y <= 1/2 ... plus lower bound
        let mut s = LinearSystem::new(&["x", "y"]);
        let r = |a: i64, b: i64| vec![("x".to_string(), Rational::from_integer(a)), ("y".to_string(), Rational::from_integer(b))];
        s.push("p", r(1, 1), Relation::Le, 1.into()).unwrap();
        s.push("q", r(1, -1), Relation::Le, 0.into()).unwrap();
        s.push("s", r(-1, 1), Relation::Le, 0.into()).unwrap();
        s.push("z", r(1, 1), Relation::Ge, 0.into()).unwrap();
        // c = (1, 0) at (1/2, 1/2): (1,0) = 1/2 (1,1) + 1/2 (1,-1), no integral combination
        let none = integral_dual(&s, &BTreeMap::from([("x".to_string(), 1)]), 1, Budget::default()).unwrap();
        assert!(none.is_none());
        let half = integral_dual(&s, &BTreeMap::from([("x".to_string(), 1)]), 2, Budget::default()).unwrap();
        assert!(half.is_some());
        assert_eq!(check_tdi(&s, 1, 1, Budget::default()).unwrap().verdict, TdiVerdict::Fail);
    }

    #[test]
    fn branch_and_bound_agrees_with_reach() {
        let gens = vec![vec![1, 1], vec![1, -1], vec![-1, 1]];
        for t in [[1, 0], [2, 0], [3, 1], [0, 0], [1, 1]] {
            let bb = branch_and_bound(&gens, &t, Budget::default()).unwrap();
            let reach = Reach::build(&gens, 8, 2).decompose(&gens, &t);
            assert_eq!(bb.is_some(), reach.is_some(), "t = {t:?}");
            if let Some(w) = bb {
                let sum: Vec<i64> = (0..2).map(|i| w.iter().zip(&gens).map(|(a, g)| a * g[i]).sum()).collect();
                assert_eq!(sum, t);
            }
        }
    }
}
