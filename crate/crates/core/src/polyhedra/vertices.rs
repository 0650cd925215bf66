use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Budget, Error, Result};
use crate::point::FractionalPoint;
use crate::rational::Rational;

use super::field::{Field, Small};
use super::lp::{solve_lp_exact, LpStatus, Sense};
use super::LinearSystem;

/// The vertices of a bounded polyhedron, sorted lexicographically
/// descending in variable order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexSet {
    pub variables: Vec<String>,
    pub vertices: Vec<FractionalPoint>,
}

impl VertexSet {
    fn from_dense(variables: Vec<String>, mut dense: Vec<Vec<Rational>>) -> Self {
        dense.sort_by(|a, b| b.cmp(a));
        dense.dedup();
        let vertices = dense.iter().map(|d| FractionalPoint::from_dense(&variables, d)).collect();
        VertexSet { variables, vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn tuples(&self) -> Vec<String> {
        self.vertices.iter().map(|v| v.tuple(&self.variables)).collect()
    }

    /// Same vertex set after renaming variables in `self`.
    pub fn same_as_renamed(&self, other: &VertexSet, renaming: &BTreeMap<String, String>) -> bool {
        let rename = |p: &FractionalPoint| {
            FractionalPoint::from_pairs(
                p.values
                    .iter()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(k, x)| (renaming.get(k).cloned().unwrap_or_else(|| k.clone()), x.clone())),
            )
        };
        let strip = |p: &FractionalPoint| {
            FractionalPoint::from_pairs(p.values.iter().filter(|(_, x)| !x.is_zero()).map(|(k, x)| (k.clone(), x.clone())))
        };
        let a: BTreeSet<FractionalPoint> = self.vertices.iter().map(rename).collect();
        let b: BTreeSet<FractionalPoint> = other.vertices.iter().map(strip).collect();
        a == b
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {} vertices over ({})", self.len(), self.variables.join(", "))?;
        for t in self.tuples() {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Check that the system is feasible and bounded with exact LPs.
pub(crate) fn ensure_polytope(sys: &LinearSystem) -> Result<()> {
    let zero = BTreeMap::new();
    if solve_lp_exact(sys, &zero, Sense::Max)?.status == LpStatus::Infeasible {
        return Err(Error::Infeasible);
    }
    for v in &sys.variables {
        let obj = BTreeMap::from([(v.clone(), Rational::one())]);
        for sense in [Sense::Max, Sense::Min] {
            if solve_lp_exact(sys, &obj, sense)?.status == LpStatus::Unbounded {
                return Err(Error::Unbounded);
            }
        }
    }
    Ok(())
}

/// Distinct `<=` rows scaled so the first nonzero entry has absolute value 1.
fn normalized_rows(sys: &LinearSystem) -> Vec<(Vec<Rational>, Rational)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (a, b) in sys.dense_le() {
        let (a, b) = match a.iter().find(|x| !x.is_zero()) {
            Some(p) => {
                let s = p.abs();
                (a.iter().map(|x| x / &s).collect::<Vec<_>>(), &b / &s)
            }
            None => (a, b),
        };
        if a.iter().all(Rational::is_zero) {
            continue;
        }
        if seen.insert((a.clone(), b.clone())) {
            out.push((a, b));
        }
    }
    out
}

/// All vertices of the polytope `{x : sys}` by the double description
/// method on the homogenized cone `{(x, t) : a x - b t <= 0, t >= 0}`.
///
/// The budget caps the number of intermediate rays.
pub fn enumerate_vertices(sys: &LinearSystem, budget: Budget) -> Result<VertexSet> {
    ensure_polytope(sys)?;
    let n = sys.variables.len();
    if n == 0 {
        return Ok(VertexSet::from_dense(Vec::new(), vec![Vec::new()]));
    }
    let mut g: Vec<Vec<Rational>> = normalized_rows(sys)
        .into_iter()
        .map(|(mut a, b)| {
            a.push(-b);
            a
        })
        .collect();
    let mut t_row = vec![Rational::zero(); n + 1];
    t_row[n] = -Rational::one();
    g.push(t_row);

    let rays = match double_description::<Small>(&g, budget)? {
        Some(r) => r,
        None => double_description::<Rational>(&g, budget)?.expect("big rationals never overflow"),
    };
    let dense = rays
        .into_iter()
        .filter(|r| r[n].is_positive())
        .map(|r| r[..n].iter().map(|x| x / &r[n]).collect())
        .collect();
    Ok(VertexSet::from_dense(sys.variables.clone(), dense))
}

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn contains(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & b == *b)
    }
}

struct Ray<F> {
    v: Vec<F>,
    zeros: Bits,
}

fn dot<F: Field>(row: &[F], v: &[F]) -> Option<F> {
    let mut acc = F::zero();
    for (a, x) in row.iter().zip(v) {
        if !a.is_zero() && !x.is_zero() {
            acc = acc.add(&a.mul(x)?)?;
        }
    }
    Some(acc)
}

fn normalize<F: Field>(v: &mut [F]) -> Option<()> {
    let Some(p) = v.iter().find(|x| !x.is_zero()).cloned() else {
        return Some(());
    };
    let s = if p < F::zero() { F::zero().sub(&p)? } else { p };
    for x in v.iter_mut() {
        *x = x.div(&s)?;
    }
    Some(())
}

/// Extreme rays of the pointed cone `{y : g y <= 0}`, or `None` on overflow.
fn double_description<F: Field>(g: &[Vec<Rational>], budget: Budget) -> Result<Option<Vec<Vec<Rational>>>> {
    let Some(g): Option<Vec<Vec<F>>> = g
        .iter()
        .map(|r| r.iter().map(F::from_rational).collect::<Option<Vec<F>>>())
        .collect()
    else {
        return Ok(None);
    };
    let d = g[0].len();
    let m = g.len();
    let Some(basis) = independent_rows(&g, d) else {
        return Ok(None);
    };
    if basis.len() < d {
        return Err(Error::Invalid("cone is not pointed".into()));
    }
    // initial simplicial cone: rays are the columns of -G_B^{-1}
    let Some(inv) = inverse(&basis.iter().map(|&i| g[i].clone()).collect::<Vec<_>>()) else {
        return Ok(None);
    };
    let mut processed = vec![false; m];
    for &i in &basis {
        processed[i] = true;
    }
    let mut rays: Vec<Ray<F>> = Vec::with_capacity(d);
    for col in 0..d {
        let mut v = Vec::with_capacity(d);
        for row in inv.iter() {
            let Some(x) = F::zero().sub(&row[col]) else { return Ok(None) };
            v.push(x);
        }
        if normalize(&mut v).is_none() {
            return Ok(None);
        }
        let mut zeros = Bits::new(m);
        for (k, &i) in basis.iter().enumerate() {
            if k != col {
                zeros.set(i);
            }
        }
        rays.push(Ray { v, zeros });
    }

    for i in 0..m {
        if processed[i] {
            continue;
        }
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut zer = Vec::new();
        let mut vals = Vec::with_capacity(rays.len());
        for (k, r) in rays.iter().enumerate() {
            let Some(s) = dot(&g[i], &r.v) else { return Ok(None) };
            if s.is_zero() {
                zer.push(k);
            } else if s > F::zero() {
                pos.push(k);
            } else {
                neg.push(k);
            }
            vals.push(s);
        }
        let mut next: Vec<Ray<F>> = Vec::with_capacity(neg.len() + zer.len());
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zeros.and(&rays[q].zeros);
                if common.count() + 2 < d {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(k, r)| k == p || k == q || !r.zeros.contains(&common));
                if !adjacent {
                    continue;
                }
                // vals[p] > 0 > vals[q]: vals[p]·r_q - vals[q]·r_p lies on the hyperplane
                let mut v = Vec::with_capacity(d);
                for (a, b) in rays[q].v.iter().zip(&rays[p].v) {
                    let Some(x) = vals[p].mul(a).and_then(|x| x.sub(&vals[q].mul(b)?)) else {
                        return Ok(None);
                    };
                    v.push(x);
                }
                if normalize(&mut v).is_none() {
                    return Ok(None);
                }
                let mut zeros = common;
                zeros.set(i);
                next.push(Ray { v, zeros });
            }
        }
        let mut kept: Vec<Ray<F>> = Vec::with_capacity(next.len() + neg.len() + zer.len());
        for k in zer {
            let mut r = Ray { v: rays[k].v.clone(), zeros: rays[k].zeros.clone() };
            r.zeros.set(i);
            kept.push(r);
        }
        for k in neg {
            kept.push(Ray { v: rays[k].v.clone(), zeros: rays[k].zeros.clone() });
        }
        kept.extend(next);
        budget.check("double description rays", kept.len() as u128)?;
        rays = kept;
        processed[i] = true;
    }
    Ok(Some(rays.into_iter().map(|r| r.v.iter().map(F::to_rational).collect()).collect()))
}

/// Indices of a maximal linearly independent subset of rows (greedy, in order).
fn independent_rows<F: Field>(g: &[Vec<F>], d: usize) -> Option<Vec<usize>> {
    let mut echelon: Vec<(usize, Vec<F>)> = Vec::new();
    let mut chosen = Vec::new();
    for (i, row) in g.iter().enumerate() {
        let mut r = row.clone();
        for (piv, e) in &echelon {
            if !r[*piv].is_zero() {
                let f = r[*piv].div(&e[*piv])?;
                for j in 0..d {
                    if !e[j].is_zero() {
                        r[j] = r[j].sub(&f.mul(&e[j])?)?;
                    }
                }
            }
        }
        if let Some(p) = r.iter().position(|x| !x.is_zero()) {
            echelon.push((p, r));
            chosen.push(i);
            if chosen.len() == d {
                break;
            }
        }
    }
    Some(chosen)
}

/// Gauss–Jordan inverse of a nonsingular square matrix.
fn inverse<F: Field>(a: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let n = a.len();
    let mut m: Vec<Vec<F>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, p);
        let piv = m[c][c].clone();
        for x in m[c].iter_mut() {
            *x = x.div(&piv)?;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for j in 0..2 * n {
                    let t = f.mul(&m[c][j])?;
                    m[r][j] = m[r][j].sub(&t)?;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Reference enumeration: solve every nonsingular `n`-subset of rows and
/// keep the feasible solutions. Exponential; used to cross-check
/// [`enumerate_vertices`].
pub fn enumerate_vertices_by_bases(sys: &LinearSystem, budget: Budget) -> Result<VertexSet> {
    ensure_polytope(sys)?;
    let n = sys.variables.len();
    let rows = normalized_rows(sys);
    budget.check("row subsets", binomial(rows.len() as u128, n as u128))?;
    let mut found = Vec::new();
    let mut chosen = Vec::with_capacity(n);
    subsets(&rows, n, 0, &mut chosen, &mut found);
    let dense = found
        .into_iter()
        .filter(|x: &Vec<Rational>| {
            rows.iter().all(|(a, b)| a.iter().zip(x).map(|(p, q)| p * q).sum::<Rational>() <= *b)
        })
        .collect();
    Ok(VertexSet::from_dense(sys.variables.clone(), dense))
}

fn subsets(
    rows: &[(Vec<Rational>, Rational)],
    n: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Vec<Rational>>,
) {
    if chosen.len() == n {
        let a: Vec<Vec<Rational>> = chosen.iter().map(|&i| rows[i].0.clone()).collect();
        if let Some(inv) = inverse(&a) {
            let x = (0..n)
                .map(|r| chosen.iter().enumerate().map(|(k, &i)| &inv[r][k] * &rows[i].1).sum())
                .collect();
            out.push(x);
        }
        return;
    }
    for i in start..rows.len() {
        if rows.len() - i < n - chosen.len() {
            break;
        }
        chosen.push(i);
        subsets(rows, n, i + 1, chosen, out);
        chosen.pop();
    }
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}
