//! Brute-force ground truth: kernels, kernel-perfectness, and a sweep that
//! compares goodness, kernel-perfectness, integrality and bounded total dual
//! integrality over every orientation of a line multigraph.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bridge::{is_good, line_orientation, orientation_from_prefs, CliqueMode, GoodnessReport};
use crate::corpus::preference_systems;
use crate::error::{Budget, Error, Result};
use crate::graph::{build_line_multigraph, Digraph, Multigraph};
use crate::point::FractionalPoint;
use crate::polyhedra::{build_sigma, check_integrality, check_tdi_with, TdiOptions, TdiVerdict};
use crate::prefs::PreferenceSystem;
use crate::rational::Rational;
use crate::stable::{enumerate_stable_matchings, fsm_check};

fn out_masks(d: &Digraph) -> Vec<u64> {
    let mut out = vec![0u64; d.vertex_count()];
    for a in d.arcs() {
        out[a.tail] |= 1 << a.head;
    }
    out
}

fn names_of(d: &Digraph, mask: u64) -> BTreeSet<String> {
    (0..d.vertex_count()).filter(|v| mask >> v & 1 == 1).map(|v| d.vertex_name(v).to_string()).collect()
}

fn check_size(d: &Digraph, budget: Budget) -> Result<()> {
    let n = d.vertex_count();
    if n >= 63 {
        return Err(Error::InstanceTooLarge { what: "vertex subsets".into(), needed: u128::MAX, budget: budget.0 });
    }
    budget.check("vertex subsets", 1u128 << n)
}

/// Independent and absorbing: no arc inside `set`, and every vertex outside
/// has an arc into it.
pub fn is_kernel(d: &Digraph, set: &BTreeSet<String>) -> Result<bool> {
    let members: BTreeSet<usize> = set.iter().map(|v| d.vertex(v)).collect::<Result<_>>()?;
    let independent = d.arcs().iter().all(|a| !(members.contains(&a.tail) && members.contains(&a.head)));
    let absorbing = (0..d.vertex_count())
        .filter(|v| !members.contains(v))
        .all(|v| d.out_neighbors(v).iter().any(|w| members.contains(w)));
    Ok(independent && absorbing)
}

/// Every kernel, by exhaustive search over vertex subsets.
pub fn enumerate_kernels(d: &Digraph, budget: Budget) -> Result<Vec<BTreeSet<String>>> {
    check_size(d, budget)?;
    let n = d.vertex_count();
    let out = out_masks(d);
    let mut found: Vec<Vec<usize>> = Vec::new();
    for mask in 0..(1u64 << n) {
        let independent = (0..n).all(|v| mask >> v & 1 == 0 || out[v] & mask == 0);
        let absorbing = (0..n).all(|v| mask >> v & 1 == 1 || out[v] & mask != 0);
        if independent && absorbing {
            found.push((0..n).filter(|v| mask >> v & 1 == 1).collect());
        }
    }
    found.sort();
    Ok(found
        .into_iter()
        .map(|s| s.into_iter().map(|v| d.vertex_name(v).to_string()).collect())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelPerfectReport {
    pub perfect: bool,
    /// A smallest vertex set whose induced subdigraph has no kernel.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BTreeSet<String>>,
}

/// Whether every induced subdigraph has a kernel. An independent set `I`
/// is a kernel of exactly the induced subdigraphs on `I ∪ T` with `T` a set
/// of vertices that each have an arc into `I`.
pub fn is_kernel_perfect(d: &Digraph, budget: Budget) -> Result<KernelPerfectReport> {
    check_size(d, budget)?;
    let n = d.vertex_count();
    let out = out_masks(d);
    let mut has_kernel = vec![false; 1usize << n];
    let mut independent: Vec<u64> = vec![0];
    // grow independent sets vertex by vertex
    for v in 0..n {
        let extended: Vec<u64> = independent
            .iter()
            .filter(|&&i| out[v] & i == 0 && (0..n).all(|w| i >> w & 1 == 0 || out[w] >> v & 1 == 0))
            .map(|&i| i | 1 << v)
            .collect();
        independent.extend(extended);
    }
    for &i in &independent {
        let dom: u64 = (0..n).filter(|&v| i >> v & 1 == 0 && out[v] & i != 0).fold(0, |m, v| m | 1 << v);
        let mut t = dom;
        loop {
            has_kernel[(i | t) as usize] = true;
            if t == 0 {
                break;
            }
            t = (t - 1) & dom;
        }
    }
    let witness = (0..1u64 << n)
        .filter(|&m| !has_kernel[m as usize])
        .min_by_key(|&m| (m.count_ones(), m))
        .map(|m| names_of(d, m));
    Ok(KernelPerfectReport { perfect: witness.is_none(), witness })
}

/// Stable matchings, integral points of FSM, and kernels of the derived
/// orientation, each as a sorted list of edge-id sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgreementReport {
    pub stable_matchings: Vec<BTreeSet<String>>,
    pub integral_fsm_points: Vec<BTreeSet<String>>,
    pub kernels: Vec<BTreeSet<String>>,
    pub agree: bool,
}

pub fn oracle_agreement(ps: &PreferenceSystem, budget: Budget) -> Result<AgreementReport> {
    let g = ps.graph();
    let m = g.edge_count();
    budget.check("edge subsets", 1u128 << m.min(127))?;
    let mut stable_matchings = enumerate_stable_matchings(ps, budget)?;
    let mut integral_fsm_points = Vec::new();
    for mask in 0..(1u64 << m) {
        let x = FractionalPoint::from_pairs((0..m).map(|e| {
            (g.edge_id(e).to_string(), Rational::from_integer((mask >> e & 1) as i64))
        }));
        if fsm_check(ps, &x)?.member {
            integral_fsm_points.push((0..m).filter(|e| mask >> e & 1 == 1).map(|e| g.edge_id(e).to_string()).collect());
        }
    }
    let mut kernels = enumerate_kernels(&orientation_from_prefs(ps), budget)?;
    stable_matchings.sort();
    integral_fsm_points.sort();
    kernels.sort();
    let agree = stable_matchings == integral_fsm_points && integral_fsm_points == kernels;
    Ok(AgreementReport { stable_matchings, integral_fsm_points, kernels, agree })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationSource {
    /// Derived from a preference system over the root.
    Prefs,
    /// An arbitrary orientation of L(H), given by its bit mask.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrientationVerdict {
    pub source: OrientationSource,
    /// `prefs:` followed by the orders, or `raw:` followed by the mask bits;
    /// together with the root this reproduces the digraph.
    pub encoding: String,
    pub good: bool,
    pub kernel_perfect: bool,
    pub kernel_ideal: bool,
    /// Bounded evidence only: no failing objective inside the box.
    pub mengerian_bounded: bool,
    pub goodness: GoodnessReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_free: Option<BTreeSet<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub non_integral: Option<BTreeSet<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub non_tdi: Option<BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub encoding: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub root: String,
    pub c_bound: u32,
    pub raw_swept: bool,
    pub orientations: Vec<OrientationVerdict>,
    pub violations: Vec<Violation>,
}

impl TheoremReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// Aligned counts per verdict combination.
    pub fn summary_table(&self) -> String {
        let mut counts: BTreeMap<(OrientationSource, bool, bool, bool, bool), usize> = BTreeMap::new();
        for o in &self.orientations {
            *counts.entry((o.source, o.good, o.kernel_perfect, o.kernel_ideal, o.mengerian_bounded)).or_default() += 1;
        }
        let yn = |b: bool| if b { "yes" } else { "no" };
        let mut s = String::new();
        let _ = writeln!(s, "{:<7} {:<5} {:<14} {:<12} {:<17} {:>6}", "source", "good", "kernel-perfect", "kernel-ideal", "mengerian(bound)", "count");
        for ((src, g, kp, ki, km), n) in counts {
            let src = match src {
                OrientationSource::Prefs => "prefs",
                OrientationSource::Raw => "raw",
            };
            let _ = writeln!(s, "{:<7} {:<5} {:<14} {:<12} {:<17} {:>6}", src, yn(g), yn(kp), yn(ki), yn(km), n);
        }
        let _ = writeln!(s, "violations: {}", self.violations.len());
        s
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    pub c_bound: u32,
    /// Raw orientations are swept only when L(H) has at most this many edges.
    pub raw_edge_limit: usize,
    pub budget: Budget,
}

impl SweepOptions {
    pub fn new(c_bound: u32) -> Self {
        SweepOptions { c_bound, raw_edge_limit: 10, budget: Budget::default() }
    }
}

#[derive(Debug, Clone, Copy)]
struct PolyVerdict {
    integral: bool,
    tdi: bool,
}

/// Polyhedral verdicts keyed by the isomorphism class of the underlying
/// simple digraph (σ depends on nothing else).
#[derive(Debug, Default)]
pub struct PolyCache {
    map: HashMap<(usize, Vec<(usize, usize)>, u32), PolyVerdict>,
}

impl PolyCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

fn structure_key(d: &Digraph) -> (usize, Vec<(usize, usize)>) {
    let n = d.vertex_count();
    let arcs: BTreeSet<(usize, usize)> = d.arcs().iter().map(|a| (a.tail, a.head)).collect();
    let relabel = |p: &[usize]| -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = arcs.iter().map(|&(a, b)| (p[a], p[b])).collect();
        v.sort_unstable();
        v
    };
    if n > 6 {
        return (n, arcs.into_iter().collect());
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = relabel(&perm);
    while next_perm(&mut perm) {
        let cand = relabel(&perm);
        if cand < best {
            best = cand;
        }
    }
    (n, best)
}

fn next_perm(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// σ of the digraph: integral (k = 1), and passes the bounded TDI check.
/// An infeasible σ counts as neither.
fn poly_verdict(d: &Digraph, opts: &SweepOptions, cache: &mut PolyCache) -> Result<PolyVerdict> {
    let (n, arcs) = structure_key(d);
    let key = (n, arcs, opts.c_bound);
    if let Some(v) = cache.map.get(&key) {
        return Ok(*v);
    }
    let sys = build_sigma(d, CliqueMode::All, opts.budget)?;
    let verdict = match check_integrality(&sys, 1, opts.budget) {
        Err(Error::Infeasible) => PolyVerdict { integral: false, tdi: false },
        Err(e) => return Err(e),
        Ok(r) => {
            let tdi = check_tdi_with(
                &sys,
                TdiOptions { k: 1, c_bound: opts.c_bound, max_failures: 1, budget: opts.budget },
            )?;
            PolyVerdict { integral: r.integral, tdi: tdi.verdict == TdiVerdict::Pass }
        }
    };
    cache.map.insert(key, verdict);
    Ok(verdict)
}

fn judge(
    d: &Digraph,
    source: OrientationSource,
    encoding: String,
    opts: &SweepOptions,
    cache: &mut PolyCache,
) -> Result<OrientationVerdict> {
    let goodness = is_good(d, opts.budget)?;
    let kp = is_kernel_perfect(d, opts.budget)?;
    let n = d.vertex_count();
    let mut non_integral = None;
    let mut non_tdi = None;
    let mut subsets: Vec<u64> = (1..1u64 << n).collect();
    subsets.sort_by_key(|m| (m.count_ones(), *m));
    for mask in subsets {
        let keep: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
        let v = poly_verdict(&d.induced_by_mask(&keep), opts, cache)?;
        if !v.integral && non_integral.is_none() {
            non_integral = Some(names_of(d, mask));
        }
        if !v.tdi && non_tdi.is_none() {
            non_tdi = Some(names_of(d, mask));
        }
        if non_integral.is_some() && non_tdi.is_some() {
            break;
        }
    }
    Ok(OrientationVerdict {
        source,
        encoding,
        good: goodness.is_good(),
        kernel_perfect: kp.perfect,
        kernel_ideal: non_integral.is_none(),
        mengerian_bounded: non_tdi.is_none(),
        goodness,
        kernel_free: kp.witness,
        non_integral,
        non_tdi,
    })
}

fn prefs_encoding(ps: &PreferenceSystem) -> String {
    let g = ps.graph();
    let parts: Vec<String> = (0..g.vertex_count())
        .map(|v| {
            let order: Vec<&str> = ps.order(v).iter().map(|&e| g.edge_id(e)).collect();
            format!("{}={}", g.vertex_name(v), order.join(","))
        })
        .collect();
    format!("prefs:{}", parts.join(";"))
}

/// Sweep every preference system over `h` and, when L(H) is small enough,
/// every raw orientation of L(H).
pub fn verify_main_theorem(h: &Multigraph, tdi_c_bound: u32, budget: Budget) -> Result<TheoremReport> {
    let opts = SweepOptions { budget, ..SweepOptions::new(tdi_c_bound) };
    verify_main_theorem_with(h, &opts, &mut PolyCache::new())
}

pub fn verify_main_theorem_with(h: &Multigraph, opts: &SweepOptions, cache: &mut PolyCache) -> Result<TheoremReport> {
    let line_edges = build_line_multigraph(h).edge_count();
    let systems = preference_systems(h);
    opts.budget.check("preference systems", systems.len() as u128)?;
    let mut orientations = Vec::new();
    for ps in &systems {
        let d = orientation_from_prefs(ps);
        orientations.push(judge(&d, OrientationSource::Prefs, prefs_encoding(ps), opts, cache)?);
    }
    let raw_swept = line_edges <= opts.raw_edge_limit;
    if raw_swept {
        for mask in 0..(1u64 << line_edges) {
            let d = line_orientation(h, mask);
            let bits: String = (0..line_edges).map(|i| if mask >> i & 1 == 1 { '1' } else { '0' }).collect();
            orientations.push(judge(&d, OrientationSource::Raw, format!("raw:{bits}"), opts, cache)?);
        }
    }
    orientations.sort_by(|a, b| a.encoding.cmp(&b.encoding));
    let violations = orientations.iter().filter_map(violation_of).collect();
    Ok(TheoremReport { root: h.to_text(), c_bound: opts.c_bound, raw_swept, orientations, violations })
}

/// The disagreement among the verdicts of one orientation, if any.
pub fn violation_of(o: &OrientationVerdict) -> Option<Violation> {
    {
        let mut reasons = Vec::new();
        if o.good != o.kernel_perfect {
            reasons.push("good and kernel-perfect disagree");
        }
        if o.good != o.kernel_ideal {
            reasons.push("good and kernel-ideal disagree");
        }
        if o.good && !o.mengerian_bounded {
            reasons.push("good but a bounded TDI check fails");
        }
        if reasons.is_empty() {
            None
        } else {
            Some(Violation { encoding: o.encoding.clone(), reason: reasons.join("; ") })
        }
    }
}

/// Rebuild the digraph an orientation encoding names over the root `h`.
pub fn decode_orientation(h: &Multigraph, encoding: &str) -> Result<(OrientationSource, Digraph)> {
    if let Some(rest) = encoding.strip_prefix("prefs:") {
        let mut named: Vec<(&str, Vec<&str>)> = Vec::new();
        for part in rest.split(';').filter(|p| !p.is_empty()) {
            let (v, order) = part
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("malformed orientation encoding `{part}`")))?;
            named.push((v, order.split(',').filter(|e| !e.is_empty()).collect()));
        }
        let ps = PreferenceSystem::from_named(h.clone(), &named)?;
        Ok((OrientationSource::Prefs, orientation_from_prefs(&ps)))
    } else if let Some(bits) = encoding.strip_prefix("raw:") {
        let lines = build_line_multigraph(h).edge_count();
        if bits.len() != lines || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::Invalid(format!("raw encoding needs {lines} bits, got `{bits}`")));
        }
        let mask = bits.chars().enumerate().fold(0u64, |m, (i, c)| if c == '1' { m | 1 << i } else { m });
        Ok((OrientationSource::Raw, line_orientation(h, mask)))
    } else {
        Err(Error::Invalid(format!("unknown orientation encoding `{encoding}`")))
    }
}

/// Recompute the verdicts of a single orientation named by its encoding.
pub fn judge_encoding(h: &Multigraph, encoding: &str, opts: &SweepOptions, cache: &mut PolyCache) -> Result<OrientationVerdict> {
    let (source, d) = decode_orientation(h, encoding)?;
    judge(&d, source, encoding.to_string(), opts, cache)
}
