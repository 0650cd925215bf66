//! Instance generators: every small root multigraph up to isomorphism,
//! every preference system over a root, and seeded random simple systems.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Multigraph;
use crate::prefs::PreferenceSystem;

/// Edge list with vertices relabelled in order of first appearance.
fn relabel(edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut names: Vec<usize> = Vec::new();
    let id = |v: usize, names: &mut Vec<usize>| match names.iter().position(|&w| w == v) {
        Some(i) => i,
        None => {
            names.push(v);
            names.len() - 1
        }
    };
    edges.iter().map(|&(a, b)| (id(a, &mut names), id(b, &mut names))).collect()
}

/// Smallest relabelled edge list over all edge orders and orientations.
fn canonical_form(edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let m = edges.len();
    let mut best: Option<Vec<(usize, usize)>> = None;
    let mut perm: Vec<usize> = (0..m).collect();
    loop {
        for flips in 0..(1u32 << m) {
            let seq: Vec<(usize, usize)> = perm
                .iter()
                .enumerate()
                .map(|(k, &i)| {
                    let (a, b) = edges[i];
                    if flips >> k & 1 == 1 {
                        (b, a)
                    } else {
                        (a, b)
                    }
                })
                .collect();
            let r = relabel(&seq);
            if best.as_ref().is_none_or(|b| r < *b) {
                best = Some(r);
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap_or_default()
}

fn next_permutation(p: &mut [usize]) -> bool {
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

fn to_multigraph(edges: &[(usize, usize)]) -> Multigraph {
    let mut g = Multigraph::new();
    let n = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
    for v in 0..n {
        g.add_vertex(&format!("v{}", v + 1)).expect("fresh vertex");
    }
    for (i, &(a, b)) in edges.iter().enumerate() {
        g.add_edge(&format!("e{}", i + 1), &format!("v{}", a + 1), &format!("v{}", b + 1))
            .expect("distinct endpoints");
    }
    g
}

/// Every loopless multigraph with between 1 and `max_edges` edges and no
/// isolated vertices, one per isomorphism class, sorted by edge count.
pub fn root_multigraphs(max_edges: usize) -> Vec<Multigraph> {
    let mut classes: BTreeSet<(usize, Vec<(usize, usize)>)> = BTreeSet::new();
    let mut frontier: BTreeSet<Vec<(usize, usize)>> = BTreeSet::from([Vec::new()]);
    for m in 1..=max_edges {
        let mut next = BTreeSet::new();
        for g in &frontier {
            let n = g.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
            // a new edge may touch at most two fresh vertices
            for a in 0..n + 2 {
                for b in a + 1..n + 2 {
                    if a > n && b > n {
                        continue;
                    }
                    let a2 = if a >= n { n } else { a };
                    let b2 = if b >= n { if a >= n { n + 1 } else { n } } else { b };
                    if a2 == b2 {
                        continue;
                    }
                    let mut h = g.clone();
                    h.push((a2, b2));
                    next.insert(canonical_form(&h));
                }
            }
        }
        classes.extend(next.iter().map(|g| (m, g.clone())));
        frontier = next;
    }
    classes.into_iter().map(|(_, g)| to_multigraph(&g)).collect()
}

/// Every preference system over `g`: all combinations of orders at its vertices.
pub fn preference_systems(g: &Multigraph) -> Vec<PreferenceSystem> {
    let per_vertex: Vec<Vec<Vec<usize>>> = (0..g.vertex_count())
        .map(|v| {
            let mut p = g.incident(v);
            let mut all = vec![p.clone()];
            while next_permutation(&mut p) {
                all.push(p.clone());
            }
            all
        })
        .collect();
    let mut out = vec![Vec::new()];
    for options in &per_vertex {
        out = out
            .into_iter()
            .flat_map(|partial: Vec<Vec<usize>>| {
                options.iter().map(move |o| {
                    let mut next = partial.clone();
                    next.push(o.clone());
                    next
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|orders| PreferenceSystem::new(g.clone(), orders).expect("orders are permutations"))
        .collect()
}

/// Seeded random simple connected preference systems; edge counts are
/// drawn from `min_edges..=max_edges`.
pub fn random_simple_systems(seed: u64, count: usize, min_edges: usize, max_edges: usize) -> Vec<PreferenceSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let m = rng.gen_range(min_edges..=max_edges);
        // connected: random tree on n vertices, then extra distinct edges
        let n = rng.gen_range(2..=m + 1);
        let max_simple = n * (n - 1) / 2;
        if m < n - 1 || m > max_simple {
            continue;
        }
        let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
        while edges.len() < m {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            let e = (a.min(b), a.max(b));
            if a != b && !edges.contains(&e) {
                edges.push(e);
            }
        }
        let g = to_multigraph(&edges);
        let orders = (0..n)
            .map(|v| {
                let mut o = g.incident(v);
                o.shuffle(&mut rng);
                o
            })
            .collect();
        out.push(PreferenceSystem::new(g, orders).expect("shuffled incident edges"));
    }
    out
}

/// Seed of the random part of [`desk_corpus`].
pub const DESK_SEED: u64 = 0x5EED_2026;

/// Simple preference systems on at most 8 edges: every system over every
/// simple root with at most 4 edges, the named simple instances, and
/// `random` seeded systems with 5 to 8 edges.
pub fn desk_corpus(random: usize) -> Vec<PreferenceSystem> {
    let mut out: Vec<PreferenceSystem> = root_multigraphs(4)
        .iter()
        .filter(|g| g.is_simple())
        .flat_map(preference_systems)
        .collect();
    out.extend([named::c4_cyclic(), named::k3_cyclic(), named::star()]);
    out.extend(random_simple_systems(DESK_SEED, random, 5, 8));
    out
}

/// Named instances used across the tests and the command line.
pub mod named {
    use crate::prefs::PreferenceSystem;

    /// Two parallel edges with `e1 ≺_u e2` and `e2 ≺_v e1`.
    pub fn parallel_pair() -> PreferenceSystem {
        PreferenceSystem::parse("v u\nv v\ne e1 u v\ne e2 u v\np u : e1 e2\np v : e2 e1\n").expect("valid")
    }

    /// Three parallel edges with different orders at the two ends.
    pub fn parallel_triple() -> PreferenceSystem {
        PreferenceSystem::parse("v u\nv v\ne e1 u v\ne e2 u v\ne e3 u v\np u : e1 e2 e3\np v : e3 e1 e2\n").expect("valid")
    }

    /// A 4-cycle where each vertex prefers the edge it is entered by.
    pub fn c4_cyclic() -> PreferenceSystem {
        PreferenceSystem::parse(
            "v v1\nv v2\nv v3\nv v4\ne e12 v1 v2\ne e23 v2 v3\ne e34 v3 v4\ne e41 v4 v1\n\
             p v1 : e41 e12\np v2 : e12 e23\np v3 : e23 e34\np v4 : e34 e41\n",
        )
        .expect("valid")
    }

    /// A triangle with cyclic preferences; it has no stable matching.
    pub fn k3_cyclic() -> PreferenceSystem {
        PreferenceSystem::parse("v a\nv b\nv c\ne ab a b\ne bc b c\ne ca c a\np a : ca ab\np b : ab bc\np c : bc ca\n")
            .expect("valid")
    }

    /// A claw whose center ranks `a ≺ b ≺ d`.
    pub fn star() -> PreferenceSystem {
        PreferenceSystem::parse("v c\nv x\nv y\nv z\ne a c x\ne b c y\ne d c z\np c : a b d\np x : a\np y : b\np z : d\n")
            .expect("valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multigraph_counts() {
        // 1 edge: K2. 2 edges: P3, parallel pair, 2K2.
        let counts: Vec<usize> = (1..=4)
            .map(|m| root_multigraphs(m).iter().filter(|g| g.edge_count() == m).count())
            .collect();
        assert_eq!(&counts[..2], &[1, 3]);
        // loopless multigraphs without isolated vertices, by edges: 1, 3, 8, 23
        assert_eq!(counts[2], 8);
        assert_eq!(counts[3], 23);
    }

    #[test]
    fn preference_system_counts() {
        let star = named::star();
        assert_eq!(preference_systems(star.graph()).len(), 6);
        let pp = named::parallel_pair();
        assert_eq!(preference_systems(pp.graph()).len(), 4);
    }

    #[test]
    fn random_systems_are_simple_and_seeded() {
        let a = random_simple_systems(7, 20, 5, 8);
        let b = random_simple_systems(7, 20, 5, 8);
        assert_eq!(a, b);
        assert!(a.iter().all(|ps| ps.is_simple() && (5..=8).contains(&ps.graph().edge_count())));
    }
}
