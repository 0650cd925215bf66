//! Stable matchings and the fractional stable matching polytope: dominance
//! sets, stability, exhaustive enumeration, membership, the half-integral
//! cycle structure of fractional points, and rounding by perturbation.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::bridge::{label_cyclic, PrefCycle};
use crate::error::{Budget, Error, Result};
use crate::point::FractionalPoint;
use crate::polyhedra::{build_pi, enumerate_vertices, solve_lp_exact, LinearSystem, LpStatus, Relation, Sense};
use crate::prefs::PreferenceSystem;
use crate::rational::Rational;

/// φ(e), or φ_v(e) when `at` names an endpoint `v` of `e`, as edge ids.
pub fn compute_phi(ps: &PreferenceSystem, e: &str, at: Option<&str>) -> Result<BTreeSet<String>> {
    let g = ps.graph();
    let ei = g.edge(e)?;
    let set = match at {
        None => ps.phi(ei),
        Some(v) => {
            let vi = g.vertex(v)?;
            if !g.edges()[ei].has_end(vi) {
                return Err(Error::NotAnEndpoint { edge: e.to_string(), vertex: v.to_string() });
            }
            ps.phi_at(vi, ei)
        }
    };
    Ok(set.into_iter().map(|f| g.edge_id(f).to_string()).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StabilityViolation {
    /// Two chosen edges meet at `vertex`.
    NotAMatching { vertex: String, edges: [String; 2] },
    /// `edge` is outside the matching and no chosen edge dominates it.
    Blocking { edge: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub stable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<StabilityViolation>,
}

pub fn is_stable_matching(ps: &PreferenceSystem, matching: &BTreeSet<String>) -> Result<StabilityReport> {
    let g = ps.graph();
    let chosen: BTreeSet<usize> = matching.iter().map(|e| g.edge(e)).collect::<Result<_>>()?;
    Ok(StabilityReport::from(stability_violation(ps, &chosen)))
}

impl From<Option<StabilityViolation>> for StabilityReport {
    fn from(violation: Option<StabilityViolation>) -> Self {
        StabilityReport { stable: violation.is_none(), violation }
    }
}

fn stability_violation(ps: &PreferenceSystem, chosen: &BTreeSet<usize>) -> Option<StabilityViolation> {
    let g = ps.graph();
    let mut at: Vec<Option<usize>> = vec![None; g.vertex_count()];
    for &e in chosen {
        let edge = &g.edges()[e];
        for w in [edge.u, edge.v] {
            if let Some(f) = at[w] {
                return Some(StabilityViolation::NotAMatching {
                    vertex: g.vertex_name(w).to_string(),
                    edges: [g.edge_id(f).to_string(), g.edge_id(e).to_string()],
                });
            }
            at[w] = Some(e);
        }
    }
    for f in 0..g.edge_count() {
        if chosen.contains(&f) {
            continue;
        }
        let edge = &g.edges()[f];
        let dominated = [edge.u, edge.v]
            .into_iter()
            .any(|w| at[w].is_some_and(|m| ps.prefers(w, m, f)));
        if !dominated {
            return Some(StabilityViolation::Blocking { edge: g.edge_id(f).to_string() });
        }
    }
    None
}

/// All stable matchings by exhaustive search over matchings, in the order
/// of their sorted edge-index lists.
pub fn enumerate_stable_matchings(ps: &PreferenceSystem, budget: Budget) -> Result<Vec<BTreeSet<String>>> {
    let g = ps.graph();
    let m = g.edge_count();
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut used = vec![false; g.vertex_count()];
    let mut chosen: Vec<usize> = Vec::new();
    let mut nodes: u128 = 0;
    fn walk(
        ps: &PreferenceSystem,
        e: usize,
        m: usize,
        used: &mut [bool],
        chosen: &mut Vec<usize>,
        found: &mut Vec<Vec<usize>>,
        nodes: &mut u128,
        budget: Budget,
    ) -> Result<()> {
        *nodes += 1;
        budget.check("matching search nodes", *nodes)?;
        if e == m {
            let set: BTreeSet<usize> = chosen.iter().copied().collect();
            if stability_violation(ps, &set).is_none() {
                found.push(chosen.clone());
            }
            return Ok(());
        }
        let edge = &ps.graph().edges()[e];
        let (u, v) = (edge.u, edge.v);
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            chosen.push(e);
            walk(ps, e + 1, m, used, chosen, found, nodes, budget)?;
            chosen.pop();
            used[u] = false;
            used[v] = false;
        }
        walk(ps, e + 1, m, used, chosen, found, nodes, budget)
    }
    walk(ps, 0, m, &mut used, &mut chosen, &mut found, &mut nodes, budget)?;
    found.sort();
    Ok(found
        .into_iter()
        .map(|s| s.into_iter().map(|e| g.edge_id(e).to_string()).collect())
        .collect())
}

/// Incidence vector of an edge set over every edge of the system.
pub fn incidence_vector(ps: &PreferenceSystem, set: &BTreeSet<String>) -> FractionalPoint {
    FractionalPoint::from_pairs(ps.graph().edges().iter().map(|e| {
        let x = if set.contains(&e.id) { Rational::one() } else { Rational::zero() };
        (e.id.clone(), x)
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FsmReport {
    pub member: bool,
    pub violated: Vec<String>,
}

/// Membership in FSM(G,≺) with the labels of every violated row of π.
pub fn fsm_check(ps: &PreferenceSystem, x: &FractionalPoint) -> Result<FsmReport> {
    check_keys(ps, x)?;
    let violated = build_pi(ps).violated_rows(x);
    Ok(FsmReport { member: violated.is_empty(), violated })
}

fn check_keys(ps: &PreferenceSystem, x: &FractionalPoint) -> Result<()> {
    for k in x.values.keys() {
        ps.graph().edge(k)?;
    }
    Ok(())
}

fn require_fsm(ps: &PreferenceSystem, x: &FractionalPoint) -> Result<()> {
    let r = fsm_check(ps, x)?;
    if r.member {
        Ok(())
    } else {
        Err(Error::NotInFsm { violated: r.violated })
    }
}

/// One component of E_{1/2}(x).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HalfCycle {
    pub vertices: Vec<String>,
    pub edges: Vec<String>,
    pub odd: bool,
    #[serde(skip)]
    pub cycle: PrefCycle,
}

/// Split E_{1/2}(x) into connected components and check that each one is
/// a cycle with cyclic preferences.
pub fn half_integral_decomposition(ps: &PreferenceSystem, x: &FractionalPoint) -> Result<Vec<HalfCycle>> {
    require_fsm(ps, x)?;
    if !x.is_integral_over(2) {
        return Err(Error::NotHalfIntegral);
    }
    let g = ps.graph();
    let half = Rational::new(1, 2);
    let support: Vec<usize> = (0..g.edge_count()).filter(|&e| x.get(g.edge_id(e)) == half).collect();
    let mut deg: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &e in &support {
        let edge = &g.edges()[e];
        deg.entry(edge.u).or_default().push(e);
        deg.entry(edge.v).or_default().push(e);
    }
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut out = Vec::new();
    for &start in &support {
        if seen.contains(&start) {
            continue;
        }
        // walk the component from `start`
        let origin = g.edges()[start].u;
        let mut vertices = vec![origin];
        let mut edges = vec![start];
        let mut here = g.edges()[start].v;
        let mut component_ok = true;
        loop {
            let inc = &deg[&here];
            if inc.len() != 2 {
                component_ok = false;
                break;
            }
            if here == origin {
                break;
            }
            vertices.push(here);
            let last = *edges.last().unwrap();
            let next = if inc[0] == last { inc[1] } else { inc[0] };
            edges.push(next);
            here = g.edges()[next].other(here);
        }
        let component = component_of(g, &deg, start);
        seen.extend(component.iter().copied());
        let names = |es: &[usize]| es.iter().map(|&e| g.edge_id(e).to_string()).collect::<Vec<_>>();
        if !component_ok || deg[&origin].len() != 2 || component.len() != edges.len() {
            return Err(Error::StructureViolation(format!("component {{{}}} is not a cycle", names(&component).join(", "))));
        }
        let Some(cycle) = label_cyclic(ps, &vertices, &edges) else {
            return Err(Error::StructureViolation(format!(
                "cycle {} does not have cyclic preferences",
                names(&edges).join(" ")
            )));
        };
        out.push(HalfCycle {
            vertices: cycle.vertices.iter().map(|&v| g.vertex_name(v).to_string()).collect(),
            edges: cycle.edge_ids(ps),
            odd: cycle.is_odd(),
            cycle,
        });
    }
    out.sort_by(|a, b| a.cycle.cmp(&b.cycle));
    Ok(out)
}

fn component_of(g: &crate::graph::Multigraph, deg: &BTreeMap<usize, Vec<usize>>, start: usize) -> Vec<usize> {
    let mut edges = BTreeSet::from([start]);
    let mut stack = vec![g.edges()[start].u, g.edges()[start].v];
    let mut visited = BTreeSet::new();
    while let Some(v) = stack.pop() {
        if !visited.insert(v) {
            continue;
        }
        for &e in &deg[&v] {
            edges.insert(e);
            stack.push(g.edges()[e].other(v));
        }
    }
    edges.into_iter().collect()
}

/// The alternating direction z: along each labelled cycle e_1, e_2, ...,
/// odd-indexed edges get −1 and even-indexed edges +1.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct PerturbationVector {
    pub values: BTreeMap<String, i8>,
}

impl PerturbationVector {
    pub fn get(&self, e: &str) -> i8 {
        self.values.get(e).copied().unwrap_or(0)
    }
}

pub fn perturbation_vector(ps: &PreferenceSystem, cycles: &[PrefCycle]) -> Result<PerturbationVector> {
    let mut values = BTreeMap::new();
    for c in cycles {
        let l = c.len();
        if l % 2 == 1 {
            return Err(Error::OddCycle(l));
        }
        let consistent = c.vertices.len() == l
            && (0..l).all(|k| ps.prefers(c.vertices[(k + 1) % l], c.edges[k], c.edges[(k + 1) % l]));
        if !consistent {
            return Err(Error::InconsistentLabeling(c.edge_ids(ps).join(" ")));
        }
        for (k, &e) in c.edges.iter().enumerate() {
            values.insert(ps.graph().edge_id(e).to_string(), if k % 2 == 0 { -1 } else { 1 });
        }
    }
    Ok(PerturbationVector { values })
}

/// Rows of π tight at `x` whose coefficient vector is not orthogonal to `z`.
pub fn tight_rows_moved_by(ps: &PreferenceSystem, x: &FractionalPoint, z: &PerturbationVector) -> Vec<String> {
    build_pi(ps)
        .rows
        .iter()
        .filter(|r| r.is_tight(x))
        .filter(|r| {
            let dot: Rational = r.coeffs.iter().map(|(v, a)| a * &Rational::from_integer(z.get(v) as i64)).sum();
            !dot.is_zero()
        })
        .map(|r| r.label.clone())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundStep {
    /// +1 when moving along z, −1 along −z.
    pub direction: i8,
    pub epsilon: Rational,
    pub cycles: Vec<Vec<String>>,
    /// Whether the step ended off the half-integral lattice and was
    /// completed by moving to a vertex of the smallest face.
    pub face_vertex: bool,
    pub point: FractionalPoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rounding {
    pub point: FractionalPoint,
    pub matching: BTreeSet<String>,
    pub steps: Vec<RoundStep>,
}

/// Move a 1/2-integral point of FSM along ±z by the largest feasible step
/// until it is integral.
pub fn perturb_and_round(ps: &PreferenceSystem, x: &FractionalPoint, budget: Budget) -> Result<Rounding> {
    require_fsm(ps, x)?;
    let pi = build_pi(ps);
    let ids: Vec<String> = ps.graph().edges().iter().map(|e| e.id.clone()).collect();
    let mut x = FractionalPoint::from_pairs(ids.iter().map(|e| (e.clone(), x.get(e))));
    let mut steps = Vec::new();
    for _ in 0..=pi.rows.len() {
        if x.is_integral() {
            let matching = x.level_set(&Rational::one()).into_iter().collect();
            return Ok(Rounding { point: x, matching, steps });
        }
        let cycles = half_integral_decomposition(ps, &x)?;
        if let Some(c) = cycles.iter().find(|c| c.odd) {
            return Err(Error::OddCyclicCycle(c.edges.clone()));
        }
        let labelled: Vec<PrefCycle> = cycles.iter().map(|c| c.cycle.clone()).collect();
        let z = perturbation_vector(ps, &labelled)?;
        let mut moved = None;
        for direction in [1i8, -1] {
            let eps = max_step(&pi, &x, &z, direction);
            if eps.is_positive() {
                moved = Some((direction, eps));
                break;
            }
        }
        let Some((direction, epsilon)) = moved else {
            return Err(Error::Degenerate);
        };
        for (e, &s) in &z.values {
            let step = &epsilon * &Rational::from_integer((s * direction) as i64);
            x.set(e, &x.get(e) + &step);
        }
        let face_vertex = !x.is_integral_over(2);
        if face_vertex {
            x = smallest_face_vertex(&pi, &x, budget)?;
        }
        steps.push(RoundStep {
            direction,
            epsilon,
            cycles: cycles.iter().map(|c| c.edges.clone()).collect(),
            face_vertex,
            point: x.clone(),
        });
    }
    Err(Error::Invalid("rounding did not terminate".into()))
}

/// Largest ε >= 0 with x + ε·dir·z still satisfying every row.
fn max_step(sys: &LinearSystem, x: &FractionalPoint, z: &PerturbationVector, dir: i8) -> Rational {
    let mut best: Option<Rational> = None;
    for row in &sys.rows {
        let (coeffs, rhs) = row.as_le();
        let slope: Rational = coeffs.iter().map(|(v, a)| a * &Rational::from_integer((z.get(v) * dir) as i64)).sum();
        if !slope.is_positive() {
            continue;
        }
        let slack: Rational = &rhs - &coeffs.iter().map(|(v, a)| a * &x.get(v)).sum::<Rational>();
        let ratio = &slack / &slope;
        if best.as_ref().is_none_or(|b| ratio < *b) {
            best = Some(ratio);
        }
    }
    best.unwrap_or_else(Rational::zero)
}

/// A vertex of the smallest face of `{sys}` containing `x`.
fn smallest_face_vertex(sys: &LinearSystem, x: &FractionalPoint, budget: Budget) -> Result<FractionalPoint> {
    let mut face = sys.clone();
    for row in sys.rows.iter().filter(|r| r.is_tight(x)) {
        let flipped = match row.rel {
            Relation::Ge => Relation::Le,
            Relation::Le => Relation::Ge,
        };
        face.push(format!("{}=", row.label), row.coeffs.clone(), flipped, row.rhs.clone())?;
    }
    let lp = solve_lp_exact(&face, &BTreeMap::new(), Sense::Max)?;
    if lp.status == LpStatus::Optimal {
        if let Some(p) = lp.primal {
            let tight: Vec<Vec<Rational>> = sys
                .rows
                .iter()
                .filter(|r| r.is_tight(&p))
                .map(|r| sys.variables.iter().map(|v| r.coeffs.get(v).cloned().unwrap_or_else(Rational::zero)).collect())
                .collect();
            if rank(tight) == sys.variables.len() {
                return Ok(p);
            }
        }
    }
    let vs = enumerate_vertices(&face, budget)?;
    vs.vertices.into_iter().next().ok_or(Error::Infeasible)
}

fn rank(mut m: Vec<Vec<Rational>>) -> usize {
    let mut r = 0;
    let cols = m.first().map_or(0, |row| row.len());
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for j in 0..cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= &d;
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

    pub(crate) fn c4() -> PreferenceSystem {
        PreferenceSystem::parse(
            "v v1\nv v2\nv v3\nv v4\ne e12 v1 v2\ne e23 v2 v3\ne e34 v3 v4\ne e41 v4 v1\n\
             p v1 : e41 e12\np v2 : e12 e23\np v3 : e23 e34\np v4 : e34 e41\n",
        )
        .unwrap()
    }

    fn k3() -> PreferenceSystem {
        PreferenceSystem::parse(
            "v a\nv b\nv c\ne ab a b\ne bc b c\ne ca c a\np a : ca ab\np b : ab bc\np c : bc ca\n",
        )
        .unwrap()
    }

    fn star() -> PreferenceSystem {
        PreferenceSystem::parse(
            "v c\nv x\nv y\nv z\ne a c x\ne b c y\ne d c z\np c : a b d\np x : a\np y : b\np z : d\n",
        )
        .unwrap()
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn constant(ps: &PreferenceSystem, v: Rational) -> FractionalPoint {
        FractionalPoint::from_pairs(ps.graph().edges().iter().map(|e| (e.id.clone(), v.clone())))
    }

    #[test]
    fn phi_examples() {
        assert_eq!(compute_phi(&star(), "d", None).unwrap(), set(&["a", "b", "d"]));
        assert_eq!(compute_phi(&star(), "d", Some("c")).unwrap(), set(&["a", "b"]));
        assert_eq!(compute_phi(&star(), "a", None).unwrap(), set(&["a"]));
        assert_eq!(compute_phi(&c4(), "e12", None).unwrap(), set(&["e12", "e41"]));
        assert!(matches!(compute_phi(&star(), "a", Some("y")), Err(Error::NotAnEndpoint { .. })));
    }

    #[test]
    fn stability_examples() {
        assert!(is_stable_matching(&star(), &set(&["a"])).unwrap().stable);
        assert!(is_stable_matching(&c4(), &set(&["e12", "e34"])).unwrap().stable);
        let r = is_stable_matching(&star(), &set(&["a", "b"])).unwrap();
        assert!(matches!(r.violation, Some(StabilityViolation::NotAMatching { .. })));
        let r = is_stable_matching(&star(), &set(&["b"])).unwrap();
        assert_eq!(r.violation, Some(StabilityViolation::Blocking { edge: "a".into() }));
    }

    #[test]
    fn enumeration_examples() {
        let b = Budget::default();
        assert_eq!(enumerate_stable_matchings(&c4(), b).unwrap(), vec![set(&["e12", "e34"]), set(&["e23", "e41"])]);
        assert!(enumerate_stable_matchings(&k3(), b).unwrap().is_empty());
    }

    #[test]
    fn fsm_membership() {
        let half = Rational::new(1, 2);
        assert!(fsm_check(&c4(), &constant(&c4(), half.clone())).unwrap().member);
        let zero = fsm_check(&c4(), &constant(&c4(), Rational::zero())).unwrap();
        assert_eq!(zero.violated.iter().filter(|l| l.starts_with("stab")).count(), 4);
    }

    #[test]
    fn decomposition_and_z() {
        let half = Rational::new(1, 2);
        let d = half_integral_decomposition(&c4(), &constant(&c4(), half.clone())).unwrap();
        assert_eq!(d.len(), 1);
        assert!(!d[0].odd);
        assert_eq!(d[0].edges, ["e12", "e23", "e34", "e41"]);
        let z = perturbation_vector(&c4(), &[d[0].cycle.clone()]).unwrap();
        assert_eq!(z.values.values().copied().collect::<Vec<_>>(), [-1, 1, -1, 1]);
        assert!(tight_rows_moved_by(&c4(), &constant(&c4(), half.clone()), &z).is_empty());

        let d3 = half_integral_decomposition(&k3(), &constant(&k3(), half)).unwrap();
        assert!(d3[0].odd);
        assert_eq!(perturbation_vector(&k3(), &[d3[0].cycle.clone()]), Err(Error::OddCycle(3)));
    }

    #[test]
    fn rounding() {
        let half = Rational::new(1, 2);
        let r = perturb_and_round(&c4(), &constant(&c4(), half.clone()), Budget::default()).unwrap();
        assert_eq!(r.matching, set(&["e23", "e41"]));
        assert_eq!(r.steps[0].epsilon, half);
        assert!(is_stable_matching(&c4(), &r.matching).unwrap().stable);
        let err = perturb_and_round(&k3(), &constant(&k3(), half), Budget::default()).unwrap_err();
        assert!(matches!(err, Error::OddCyclicCycle(_)));
        let int = incidence_vector(&c4(), &set(&["e12", "e34"]));
        assert_eq!(perturb_and_round(&c4(), &int, Budget::default()).unwrap().point, int);
    }
}
