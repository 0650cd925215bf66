//! The correspondence between orientations of line multigraphs and
//! preference systems over their roots: conversion in both directions,
//! clique enumeration and classification, goodness, and cyclic-preference
//! cycles.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Budget, Error, Result};
use crate::graph::{build_line_multigraph, enumerate_directed_cycles, Digraph, Multigraph, Parity};
use crate::prefs::PreferenceSystem;

/// Arc (f, e) with provenance v for every pair e ≺_v f.
pub fn orientation_from_prefs(ps: &PreferenceSystem) -> Digraph {
    let h = ps.graph();
    let names: Vec<&str> = h.edges().iter().map(|e| e.id.as_str()).collect();
    let mut d = Digraph::with_vertices(&names).expect("edge ids are unique");
    for v in 0..h.vertex_count() {
        let order = ps.order(v);
        let vname = h.vertex_name(v);
        for (i, &e) in order.iter().enumerate() {
            for &f in &order[i + 1..] {
                let id = format!("{}>{}@{}", h.edge_id(f), h.edge_id(e), vname);
                d.add_arc_by_index(&id, f, e, Some(vname.to_string()))
                    .expect("fresh arc id");
            }
        }
    }
    d
}

/// Every orientation of L(H), indexed by a bit mask over the edges of L(H):
/// bit i set reverses the i-th line-graph edge. Arcs carry the shared endpoint.
pub fn line_orientation(h: &Multigraph, mask: u64) -> Digraph {
    let l = build_line_multigraph(h);
    let names: Vec<&str> = l.vertex_names().iter().map(String::as_str).collect();
    let mut d = Digraph::with_vertices(&names).expect("edge ids are unique");
    for (i, e) in l.edges().iter().enumerate() {
        let (t, hd) = if mask >> i & 1 == 1 { (e.v, e.u) } else { (e.u, e.v) };
        d.add_arc_by_index(&format!("o{i}"), t, hd, e.label.clone())
            .expect("fresh arc id");
    }
    d
}

/// Recover the preference system a clique-acyclic orientation encodes.
pub fn prefs_from_orientation(h: &Multigraph, d: &Digraph) -> Result<PreferenceSystem> {
    let m = h.edge_count();
    if d.vertex_count() != m {
        return Err(Error::Invalid(format!(
            "digraph has {} vertices but the root has {} edges",
            d.vertex_count(),
            m
        )));
    }
    // digraph vertex -> root edge
    let to_edge: Vec<usize> = d
        .vertex_names()
        .iter()
        .map(|n| h.edge(n).map_err(|_| Error::UnknownId(n.clone())))
        .collect::<Result<_>>()?;

    // beats[w][e][f]: an arc attributed to w says e ≺_w f
    let n = h.vertex_count();
    let mut beats = vec![vec![vec![false; m]; m]; n];
    for arc in d.arcs() {
        let f = to_edge[arc.tail];
        let e = to_edge[arc.head];
        let common = h.common_ends(e, f);
        let w = match &arc.provenance {
            Some(p) => {
                let w = h.vertex(p)?;
                if !common.contains(&w) {
                    return Err(Error::BadArc { arc: arc.id.clone(), vertex: p.clone() });
                }
                w
            }
            None => match common.as_slice() {
                [w] => *w,
                [] => return Err(Error::BadArc { arc: arc.id.clone(), vertex: "-".into() }),
                _ => return Err(Error::AmbiguousAttribution(arc.id.clone())),
            },
        };
        beats[w][e][f] = true;
    }

    let mut orders = Vec::with_capacity(n);
    for w in 0..n {
        let star = h.incident(w);
        let wname = h.vertex_name(w).to_string();
        for (i, &e) in star.iter().enumerate() {
            for &f in &star[i + 1..] {
                match (beats[w][e][f], beats[w][f][e]) {
                    (true, true) => {
                        return Err(Error::NotCliqueAcyclic {
                            vertex: wname,
                            cycle: vec![h.edge_id(e).to_string(), h.edge_id(f).to_string()],
                        })
                    }
                    (false, false) => {
                        return Err(Error::IncompleteTournament {
                            vertex: wname,
                            pair: (h.edge_id(e).to_string(), h.edge_id(f).to_string()),
                        })
                    }
                    _ => {}
                }
            }
        }
        let wins = |e: usize| star.iter().filter(|&&f| beats[w][e][f]).count();
        let mut order = star.clone();
        order.sort_by_key(|&e| std::cmp::Reverse(wins(e)));
        let transitive = order
            .iter()
            .enumerate()
            .all(|(i, &e)| order[i + 1..].iter().all(|&f| beats[w][e][f]));
        if !transitive {
            let cycle = tournament_triangle(&star, &beats[w]).expect("intransitive tournament has a 3-cycle");
            return Err(Error::NotCliqueAcyclic {
                vertex: wname,
                cycle: cycle.iter().map(|&e| h.edge_id(e).to_string()).collect(),
            });
        }
        orders.push(order);
    }
    PreferenceSystem::new(h.clone(), orders)
}

fn tournament_triangle(star: &[usize], beats: &[Vec<bool>]) -> Option<[usize; 3]> {
    for &a in star {
        for &b in star {
            for &c in star {
                if beats[a][b] && beats[b][c] && beats[c][a] {
                    return Some([a, b, c]);
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CliqueMode {
    All,
    Maximal,
}

/// How a clique of an oriented line multigraph sits in the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CliqueKind {
    /// All of δ(v).
    FullStar(String),
    /// A nonempty proper subset of δ(v).
    PartialStar(String),
    /// Edges of a triangle on the three named root vertices.
    Triangle([String; 3]),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Clique {
    pub members: Vec<usize>,
    pub kind: Option<CliqueKind>,
}

/// Cliques of `d` (pairwise adjacent vertex sets), singletons included.
///
/// With `root`, the digraph's vertices are read as the root's edge ids and
/// each clique is classified.
pub fn enumerate_cliques(d: &Digraph, mode: CliqueMode, root: Option<&Multigraph>, budget: Budget) -> Result<Vec<Clique>> {
    let n = d.vertex_count();
    let arcs = d.arc_matrix();
    let adj: Vec<Vec<bool>> = (0..n).map(|u| (0..n).map(|v| arcs[u][v] || arcs[v][u]).collect()).collect();
    let sets = match mode {
        CliqueMode::All => all_cliques(&adj, budget)?,
        CliqueMode::Maximal => maximal_cliques(&adj, budget)?,
    };
    let edge_of: Option<Vec<usize>> = match root {
        Some(h) => Some(
            d.vertex_names()
                .iter()
                .map(|name| h.edge(name).map_err(|_| Error::UnknownId(name.clone())))
                .collect::<Result<_>>()?,
        ),
        None => None,
    };
    Ok(sets
        .into_iter()
        .map(|members| {
            let kind = root.zip(edge_of.as_ref()).and_then(|(h, map)| {
                let edges: Vec<usize> = members.iter().map(|&v| map[v]).collect();
                classify(h, &edges)
            });
            Clique { members, kind }
        })
        .collect())
}

fn classify(h: &Multigraph, edges: &[usize]) -> Option<CliqueKind> {
    let mut partial = None;
    for w in 0..h.vertex_count() {
        if edges.iter().all(|&e| h.edges()[e].has_end(w)) {
            let star: BTreeSet<usize> = h.incident(w).into_iter().collect();
            let set: BTreeSet<usize> = edges.iter().copied().collect();
            if star == set {
                return Some(CliqueKind::FullStar(h.vertex_name(w).to_string()));
            }
            partial.get_or_insert_with(|| CliqueKind::PartialStar(h.vertex_name(w).to_string()));
        }
    }
    if partial.is_some() {
        return partial;
    }
    let ends: BTreeSet<usize> = edges.iter().flat_map(|&e| [h.edges()[e].u, h.edges()[e].v]).collect();
    if ends.len() == 3 {
        let names: Vec<String> = ends.iter().map(|&v| h.vertex_name(v).to_string()).collect();
        return Some(CliqueKind::Triangle([names[0].clone(), names[1].clone(), names[2].clone()]));
    }
    None
}

fn all_cliques(adj: &[Vec<bool>], budget: Budget) -> Result<Vec<Vec<usize>>> {
    let n = adj.len();
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..n).rev().map(|v| vec![v]).collect();
    while let Some(c) = stack.pop() {
        let last = *c.last().unwrap();
        for v in (last + 1..n).rev() {
            if c.iter().all(|&u| adj[u][v]) {
                let mut next = c.clone();
                next.push(v);
                stack.push(next);
            }
        }
        out.push(c);
        budget.check("cliques", out.len() as u128)?;
    }
    Ok(out)
}

fn maximal_cliques(adj: &[Vec<bool>], budget: Budget) -> Result<Vec<Vec<usize>>> {
    fn expand(
        adj: &[Vec<bool>],
        r: &mut Vec<usize>,
        p: Vec<usize>,
        x: Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        budget: Budget,
    ) -> Result<()> {
        if p.is_empty() && x.is_empty() {
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
            return budget.check("cliques", out.len() as u128);
        }
        let mut p = p;
        let mut x = x;
        while let Some(v) = p.first().copied() {
            r.push(v);
            let np = p.iter().copied().filter(|&u| adj[v][u]).collect();
            let nx = x.iter().copied().filter(|&u| adj[v][u]).collect();
            expand(adj, r, np, nx, out, budget)?;
            r.pop();
            p.remove(0);
            x.push(v);
        }
        Ok(())
    }
    let n = adj.len();
    let mut out = Vec::new();
    if n > 0 {
        expand(adj, &mut Vec::new(), (0..n).collect(), Vec::new(), &mut out, budget)?;
    }
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Goodness {
    Good,
    NotCliqueAcyclic,
    ChordlessOddCycle,
}

/// Verdict plus a replayable witness: a clique whose one-way arcs contain
/// `cycle`, or a directed odd `cycle` with neither chord nor pseudo-chord.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodnessReport {
    pub verdict: Goodness,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clique: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<Vec<String>>,
}

impl GoodnessReport {
    pub fn is_good(&self) -> bool {
        self.verdict == Goodness::Good
    }
}

pub fn is_good(d: &Digraph, budget: Budget) -> Result<GoodnessReport> {
    let arcs = d.arc_matrix();
    let names = |vs: &[usize]| vs.iter().map(|&v| d.vertex_name(v).to_string()).collect::<Vec<_>>();
    for clique in enumerate_cliques(d, CliqueMode::Maximal, None, budget)? {
        if let Some(cycle) = one_way_cycle(&arcs, &clique.members) {
            return Ok(GoodnessReport {
                verdict: Goodness::NotCliqueAcyclic,
                clique: Some(names(&clique.members)),
                cycle: Some(names(&cycle)),
            });
        }
    }
    for cycle in enumerate_directed_cycles(d, Some(Parity::Odd), budget)? {
        if !has_chord_or_pseudo_chord(&arcs, &cycle) {
            return Ok(GoodnessReport {
                verdict: Goodness::ChordlessOddCycle,
                clique: None,
                cycle: Some(names(&cycle)),
            });
        }
    }
    Ok(GoodnessReport { verdict: Goodness::Good, clique: None, cycle: None })
}

/// A directed cycle among the one-way arcs inside `members`, if any.
fn one_way_cycle(arcs: &[Vec<bool>], members: &[usize]) -> Option<Vec<usize>> {
    let one_way = |u: usize, v: usize| arcs[u][v] && !arcs[v][u];
    // colour-based DFS over the clique
    let k = members.len();
    let mut state = vec![0u8; k];
    let mut parent = vec![usize::MAX; k];
    for s in 0..k {
        if state[s] != 0 {
            continue;
        }
        let mut stack = vec![(s, 0usize)];
        state[s] = 1;
        while let Some((u, next)) = stack.pop() {
            if next < k {
                stack.push((u, next + 1));
                let v = next;
                if !one_way(members[u], members[v]) {
                    continue;
                }
                if state[v] == 1 {
                    let mut cycle = vec![members[v]];
                    let mut w = u;
                    while w != v {
                        cycle.push(members[w]);
                        w = parent[w];
                    }
                    cycle[1..].reverse();
                    return Some(cycle);
                }
                if state[v] == 0 {
                    state[v] = 1;
                    parent[v] = u;
                    stack.push((v, 0));
                }
            } else {
                state[u] = 2;
            }
        }
    }
    None
}

fn has_chord_or_pseudo_chord(arcs: &[Vec<bool>], cycle: &[usize]) -> bool {
    let l = cycle.len();
    for i in 0..l {
        let prev = cycle[(i + l - 1) % l];
        if arcs[cycle[i]][prev] {
            return true;
        }
        for j in 0..l {
            let gap = (j + l - i) % l;
            if gap > 1 && gap < l - 1 && arcs[cycle[i]][cycle[j]] {
                return true;
            }
        }
    }
    false
}

/// Replay a goodness certificate against `d`.
pub fn verify_goodness_certificate(d: &Digraph, report: &GoodnessReport) -> Result<bool> {
    let arcs = d.arc_matrix();
    let idx = |names: &Vec<String>| names.iter().map(|n| d.vertex(n)).collect::<Result<Vec<_>>>();
    match report.verdict {
        Goodness::Good => Ok(is_good(d, Budget::default())?.is_good()),
        Goodness::NotCliqueAcyclic => {
            let (Some(clique), Some(cycle)) = (&report.clique, &report.cycle) else {
                return Ok(false);
            };
            let clique = idx(clique)?;
            let cycle = idx(cycle)?;
            let pairwise = clique
                .iter()
                .all(|&u| clique.iter().all(|&v| u == v || arcs[u][v] || arcs[v][u]));
            let l = cycle.len();
            let closed = l >= 2
                && cycle.iter().all(|v| clique.contains(v))
                && (0..l).all(|i| {
                    let (u, v) = (cycle[i], cycle[(i + 1) % l]);
                    arcs[u][v] && !arcs[v][u]
                });
            Ok(pairwise && closed)
        }
        Goodness::ChordlessOddCycle => {
            let Some(cycle) = &report.cycle else { return Ok(false) };
            let cycle = idx(cycle)?;
            let l = cycle.len();
            let distinct: BTreeSet<_> = cycle.iter().collect();
            let closed = distinct.len() == l && (0..l).all(|i| arcs[cycle[i]][cycle[(i + 1) % l]]);
            Ok(l % 2 == 1 && closed && !has_chord_or_pseudo_chord(&arcs, &cycle))
        }
    }
}

/// Kernels of an orientation and stable matchings of its root live on the
/// same index set; this checks the ids and returns the same set.
pub fn kernel_matching_translate(h: &Multigraph, set: &BTreeSet<String>) -> Result<BTreeSet<String>> {
    for id in set {
        h.edge(id).map_err(|_| Error::UnknownId(id.clone()))?;
    }
    Ok(set.clone())
}

/// A cycle labelled so that `edges[k]` joins `vertices[k]` and
/// `vertices[k+1]`, and every vertex prefers its incoming edge to its
/// outgoing one: e_k ≺_{v_{k+1}} e_{k+1}. The first edge has the smallest index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrefCycle {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl PrefCycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_odd(&self) -> bool {
        self.edges.len() % 2 == 1
    }

    pub fn edge_ids(&self, ps: &PreferenceSystem) -> Vec<String> {
        self.edges.iter().map(|&e| ps.graph().edge_id(e).to_string()).collect()
    }
}

/// Orient and rotate a closed walk into canonical [`PrefCycle`] form, or
/// `None` when its preferences are not cyclic.
///
/// `edges[k]` must join `vertices[k]` and `vertices[(k+1) % l]`.
pub fn label_cyclic(ps: &PreferenceSystem, vertices: &[usize], edges: &[usize]) -> Option<PrefCycle> {
    let l = edges.len();
    if l < 2 || vertices.len() != l {
        return None;
    }
    // at vertices[k], incoming edges[k-1], outgoing edges[k]
    let forward = (0..l).all(|k| ps.prefers(vertices[k], edges[(k + l - 1) % l], edges[k]));
    let backward = (0..l).all(|k| ps.prefers(vertices[k], edges[k], edges[(k + l - 1) % l]));
    let (vs, es): (Vec<usize>, Vec<usize>) = if forward {
        (vertices.to_vec(), edges.to_vec())
    } else if backward {
        // walk the other way: start at vertices[1], edges[0] then edges[l-1], ...
        let vs = (0..l).map(|k| vertices[(l + 1 - k) % l]).collect();
        let es = (0..l).map(|k| edges[(l - k) % l]).collect();
        (vs, es)
    } else {
        return None;
    };
    let start = (0..l).min_by_key(|&k| es[k]).unwrap();
    Some(PrefCycle {
        vertices: (0..l).map(|k| vs[(start + k) % l]).collect(),
        edges: (0..l).map(|k| es[(start + k) % l]).collect(),
    })
}

/// Every cycle of the root (parallel pairs give 2-cycles) whose preferences
/// are cyclic, once each up to rotation and reflection.
pub fn find_cyclic_preference_cycles(ps: &PreferenceSystem, parity: Option<Parity>, budget: Budget) -> Result<Vec<PrefCycle>> {
    let g = ps.graph();
    let m = g.edge_count();
    let incident: Vec<Vec<usize>> = (0..g.vertex_count()).map(|v| g.incident(v)).collect();
    let mut out = Vec::new();
    let mut explored: u128 = 0;
    for s in 0..m {
        let origin = g.edges()[s].u;
        let mut vertices = vec![origin, g.edges()[s].v];
        let mut edges = vec![s];
        let mut on_path = vec![false; g.vertex_count()];
        on_path[origin] = true;
        on_path[g.edges()[s].v] = true;
        let mut cursor = vec![0usize];
        while !edges.is_empty() {
            let here = *vertices.last().unwrap();
            let depth = edges.len() - 1;
            if cursor[depth] < incident[here].len() {
                let f = incident[here][cursor[depth]];
                cursor[depth] += 1;
                if f <= s || edges.contains(&f) {
                    continue;
                }
                explored += 1;
                budget.check("cycle search steps", explored)?;
                let next = g.edges()[f].other(here);
                if next == origin {
                    let mut es = edges.clone();
                    es.push(f);
                    let vs = &vertices[..];
                    if parity.is_none_or(|p| p.admits(es.len())) {
                        if let Some(c) = label_cyclic(ps, vs, &es) {
                            out.push(c);
                        }
                    }
                } else if !on_path[next] {
                    on_path[next] = true;
                    vertices.push(next);
                    edges.push(f);
                    cursor.push(0);
                }
            } else {
                edges.pop();
                cursor.pop();
                if let Some(v) = vertices.pop() {
                    on_path[v] = false;
                }
                if edges.is_empty() {
                    break;
                }
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}
