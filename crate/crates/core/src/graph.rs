//! Undirected multigraphs, directed multigraphs, and the line-multigraph
//! construction that links them.
//!
//! Both graph types keep their vertices and edges in declaration order and
//! address them by index internally; names are only used at the boundary.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Budget, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub u: usize,
    pub v: usize,
    /// Shared root endpoint for edges of a line multigraph.
    pub label: Option<String>,
}

impl Edge {
    pub fn other(&self, w: usize) -> usize {
        if self.u == w {
            self.v
        } else {
            self.u
        }
    }

    pub fn has_end(&self, w: usize) -> bool {
        self.u == w || self.v == w
    }
}

/// Loopless undirected graph; parallel edges are allowed.
#[derive(Debug, Clone, Default)]
pub struct Multigraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
}

impl PartialEq for Multigraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for Multigraph {}

impl Multigraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: &str) -> Result<usize> {
        if self.vertex_index.contains_key(name) {
            return Err(Error::DuplicateId(name.to_string()));
        }
        let idx = self.vertices.len();
        self.vertices.push(name.to_string());
        self.vertex_index.insert(name.to_string(), idx);
        Ok(idx)
    }

    pub fn add_edge(&mut self, id: &str, u: &str, v: &str) -> Result<usize> {
        self.add_labeled_edge(id, u, v, None)
    }

    pub fn add_labeled_edge(&mut self, id: &str, u: &str, v: &str, label: Option<String>) -> Result<usize> {
        if self.edge_index.contains_key(id) {
            return Err(Error::DuplicateId(id.to_string()));
        }
        let ui = self.vertex(u)?;
        let vi = self.vertex(v)?;
        if ui == vi {
            return Err(Error::Loop(u.to_string()));
        }
        let idx = self.edges.len();
        self.edges.push(Edge { id: id.to_string(), u: ui, v: vi, label });
        self.edge_index.insert(id.to_string(), idx);
        Ok(idx)
    }

    pub fn vertex(&self, name: &str) -> Result<usize> {
        self.vertex_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn edge(&self, id: &str) -> Result<usize> {
        self.edge_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownEdge(id.to_string()))
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_id(&self, e: usize) -> &str {
        &self.edges[e].id
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// δ(v): indices of edges incident to `v`, in edge order.
    pub fn incident(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].has_end(v)).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.has_end(v)).count()
    }

    /// Endpoints shared by two distinct edges, in vertex order.
    pub fn common_ends(&self, e: usize, f: usize) -> Vec<usize> {
        let (a, b) = (&self.edges[e], &self.edges[f]);
        let mut ends: Vec<usize> = [a.u, a.v].into_iter().filter(|&w| b.has_end(w)).collect();
        ends.sort_unstable();
        ends.dedup();
        ends
    }

    /// Edges with the same endpoint pair as `e`, including `e` itself.
    pub fn parallel_class(&self, e: usize) -> Vec<usize> {
        let key = ordered(self.edges[e].u, self.edges[e].v);
        (0..self.edges.len())
            .filter(|&f| ordered(self.edges[f].u, self.edges[f].v) == key)
            .collect()
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges.iter().all(|e| seen.insert(ordered(e.u, e.v)))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut g = Multigraph::new();
        for (lineno, tokens) in records(text) {
            match tokens.as_slice() {
                ["v", name] => {
                    g.add_vertex(name).map_err(|e| at(lineno, e))?;
                }
                ["e", id, u, v] => {
                    g.add_edge(id, u, v).map_err(|e| at(lineno, e))?;
                }
                ["p", ..] => {}
                _ => return Err(Error::Parse { line: lineno, message: format!("unexpected record `{}`", tokens.join(" ")) }),
            }
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let _ = writeln!(out, "v {v}");
        }
        for e in &self.edges {
            let _ = writeln!(out, "e {} {} {}", e.id, self.vertices[e.u], self.vertices[e.v]);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    /// Shared root endpoint when the digraph orients a line multigraph.
    pub provenance: Option<String>,
}

/// Loopless directed multigraph; parallel and antiparallel arcs are allowed.
#[derive(Debug, Clone, Default)]
pub struct Digraph {
    vertices: Vec<String>,
    arcs: Vec<Arc>,
    vertex_index: HashMap<String, usize>,
    arc_ids: BTreeSet<String>,
}

impl PartialEq for Digraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.arcs == other.arcs
    }
}

impl Eq for Digraph {}

impl Digraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertices<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut d = Digraph::new();
        for n in names {
            d.add_vertex(n.as_ref())?;
        }
        Ok(d)
    }

    pub fn add_vertex(&mut self, name: &str) -> Result<usize> {
        if self.vertex_index.contains_key(name) {
            return Err(Error::DuplicateId(name.to_string()));
        }
        let idx = self.vertices.len();
        self.vertices.push(name.to_string());
        self.vertex_index.insert(name.to_string(), idx);
        Ok(idx)
    }

    pub fn add_arc(&mut self, id: &str, tail: &str, head: &str, provenance: Option<&str>) -> Result<usize> {
        let t = self.vertex(tail)?;
        let h = self.vertex(head)?;
        self.add_arc_by_index(id, t, h, provenance.map(str::to_string))
    }

    pub fn add_arc_by_index(&mut self, id: &str, tail: usize, head: usize, provenance: Option<String>) -> Result<usize> {
        if tail == head {
            return Err(Error::Loop(self.vertices[tail].clone()));
        }
        if !self.arc_ids.insert(id.to_string()) {
            return Err(Error::DuplicateId(id.to_string()));
        }
        self.arcs.push(Arc { id: id.to_string(), tail, head, provenance });
        Ok(self.arcs.len() - 1)
    }

    pub fn vertex(&self, name: &str) -> Result<usize> {
        self.vertex_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn has_arc(&self, tail: usize, head: usize) -> bool {
        self.arcs.iter().any(|a| a.tail == tail && a.head == head)
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.has_arc(u, v) || self.has_arc(v, u)
    }

    /// N⁺(v) as a set of vertex indices.
    pub fn out_neighbors(&self, v: usize) -> BTreeSet<usize> {
        self.arcs.iter().filter(|a| a.tail == v).map(|a| a.head).collect()
    }

    /// Dense adjacency: `m[u][v]` is true when some arc runs from `u` to `v`.
    pub fn arc_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.vertices.len();
        let mut m = vec![vec![false; n]; n];
        for a in &self.arcs {
            m[a.tail][a.head] = true;
        }
        m
    }

    /// Induced subdigraph on the named vertices, keeping this digraph's vertex order.
    pub fn induced_subdigraph<S: AsRef<str>>(&self, subset: &[S]) -> Result<Digraph> {
        let mut keep = vec![false; self.vertices.len()];
        for s in subset {
            keep[self.vertex(s.as_ref())?] = true;
        }
        Ok(self.induced_by_mask(&keep))
    }

    pub fn induced_by_mask(&self, keep: &[bool]) -> Digraph {
        let mut d = Digraph::new();
        let mut map = vec![usize::MAX; self.vertices.len()];
        for (i, name) in self.vertices.iter().enumerate() {
            if keep[i] {
                map[i] = d.add_vertex(name).expect("names are unique");
            }
        }
        for a in &self.arcs {
            if keep[a.tail] && keep[a.head] {
                d.arc_ids.insert(a.id.clone());
                d.arcs.push(Arc { id: a.id.clone(), tail: map[a.tail], head: map[a.head], provenance: a.provenance.clone() });
            }
        }
        d
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut d = Digraph::new();
        for (lineno, tokens) in records(text) {
            match tokens.as_slice() {
                ["v", name] => {
                    d.add_vertex(name).map_err(|e| at(lineno, e))?;
                }
                ["a", id, t, h] => {
                    d.add_arc(id, t, h, None).map_err(|e| at(lineno, e))?;
                }
                ["a", id, t, h, p] => {
                    d.add_arc(id, t, h, Some(p)).map_err(|e| at(lineno, e))?;
                }
                _ => return Err(Error::Parse { line: lineno, message: format!("unexpected record `{}`", tokens.join(" ")) }),
            }
        }
        Ok(d)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let _ = writeln!(out, "v {v}");
        }
        for a in &self.arcs {
            let _ = write!(out, "a {} {} {}", a.id, self.vertices[a.tail], self.vertices[a.head]);
            if let Some(p) = &a.provenance {
                let _ = write!(out, " {p}");
            }
            out.push('\n');
        }
        out
    }
}

/// L(H): one vertex per edge of `h`, and one edge per (edge pair, shared endpoint),
/// labelled with that endpoint.
pub fn build_line_multigraph(h: &Multigraph) -> Multigraph {
    let mut l = Multigraph::new();
    for e in h.edges() {
        l.add_vertex(&e.id).expect("edge ids are unique");
    }
    for i in 0..h.edge_count() {
        for j in i + 1..h.edge_count() {
            for w in h.common_ends(i, j) {
                let w = h.vertex_name(w);
                let id = format!("{}~{}@{}", h.edge_id(i), h.edge_id(j), w);
                l.add_labeled_edge(&id, h.edge_id(i), h.edge_id(j), Some(w.to_string()))
                    .expect("fresh line-graph edge");
            }
        }
    }
    l
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn admits(self, len: usize) -> bool {
        match self {
            Parity::Odd => len % 2 == 1,
            Parity::Even => len.is_multiple_of(2),
        }
    }
}

/// Every directed cycle as a vertex sequence starting at its smallest vertex
/// index, digons included. Parallel arcs do not produce distinct cycles.
pub fn enumerate_directed_cycles(d: &Digraph, parity: Option<Parity>, budget: Budget) -> Result<Vec<Vec<usize>>> {
    let n = d.vertex_count();
    let m = d.arc_matrix();
    let succ: Vec<Vec<usize>> = (0..n).map(|u| (0..n).filter(|&v| m[u][v]).collect()).collect();
    let mut out = Vec::new();
    let mut found: u128 = 0;
    for start in 0..n {
        let mut path = vec![start];
        let mut on_path = vec![false; n];
        on_path[start] = true;
        // explicit stack of successor cursors
        let mut cursor = vec![0usize];
        while let Some(&top) = path.last() {
            let depth = path.len() - 1;
            if cursor[depth] < succ[top].len() {
                let next = succ[top][cursor[depth]];
                cursor[depth] += 1;
                if next == start {
                    found += 1;
                    budget.check("directed cycles", found)?;
                    if parity.is_none_or(|p| p.admits(path.len())) {
                        out.push(path.clone());
                    }
                } else if next > start && !on_path[next] {
                    on_path[next] = true;
                    path.push(next);
                    cursor.push(0);
                }
            } else {
                on_path[top] = false;
                path.pop();
                cursor.pop();
            }
        }
    }
    Ok(out)
}

/// Rotate a cycle so it starts at its smallest element.
pub fn canonical_cycle(cycle: &[usize]) -> Vec<usize> {
    match cycle.iter().enumerate().min_by_key(|(_, &v)| v) {
        Some((pos, _)) => cycle[pos..].iter().chain(&cycle[..pos]).copied().collect(),
        None => Vec::new(),
    }
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn at(line: usize, e: Error) -> Error {
    Error::Parse { line, message: e.to_string() }
}

/// Non-empty, non-comment lines split into whitespace tokens, with 1-based line numbers.
pub(crate) fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            None
        } else {
            Some((i + 1, t.split_whitespace().collect()))
        }
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn sec5() -> Digraph {
        Digraph::parse(
            "v 1\nv 2\nv 3\nv 4\na a12 1 2\na a21 2 1\na a31 3 1\na a34 3 4\na a42 4 2\n",
        )
        .unwrap()
    }

    fn c3() -> Digraph {
        Digraph::parse("v a\nv b\nv c\na x a b\na y b c\na z c a\n").unwrap()
    }

    fn choose2(n: usize) -> usize {
        n * n.saturating_sub(1) / 2
    }

    #[test]
    fn line_graph_of_path_is_single_edge() {
        let h = Multigraph::parse("v a\nv b\nv c\ne e1 a b\ne e2 b c\n").unwrap();
        let l = build_line_multigraph(&h);
        assert_eq!(l.vertex_count(), 2);
        assert_eq!(l.edge_count(), 1);
        assert_eq!(l.edges()[0].label.as_deref(), Some("b"));
    }

    #[test]
    fn line_graph_of_parallel_pair_has_two_edges() {
        let h = Multigraph::parse("v u\nv v\ne e1 u v\ne e2 u v\n").unwrap();
        let l = build_line_multigraph(&h);
        assert_eq!(l.vertex_count(), 2);
        assert_eq!(l.edge_count(), 2);
        let labels: Vec<_> = l.edges().iter().map(|e| e.label.clone().unwrap()).collect();
        assert_eq!(labels, vec!["u", "v"]);
        assert!(!l.is_simple());
    }

    #[test]
    fn line_graph_of_star_is_triangle() {
        let h = Multigraph::parse("v c\nv x\nv y\nv z\ne a c x\ne b c y\ne d c z\n").unwrap();
        let l = build_line_multigraph(&h);
        assert_eq!(l.vertex_count(), 3);
        // brute force: count shared endpoints per edge pair
        let mut count = 0;
        for i in 0..3 {
            for j in i + 1..3 {
                let (a, b) = (&h.edges()[i], &h.edges()[j]);
                count += [a.u, a.v].iter().filter(|w| b.has_end(**w)).count();
            }
        }
        assert_eq!(l.edge_count(), count);
        assert_eq!(count, 3);
        let sum: usize = (0..h.vertex_count()).map(|v| choose2(h.degree(v))).sum();
        assert_eq!(l.edge_count(), sum);
    }

    #[test]
    fn loops_and_duplicates_rejected() {
        assert!(matches!(Multigraph::parse("v a\ne e a a\n"), Err(Error::Parse { line: 2, .. })));
        assert!(Multigraph::parse("v a\nv a\n").is_err());
        assert!(Digraph::parse("v a\na x a a\n").is_err());
        assert!(Digraph::parse("v a\nv b\na x a b\na x b a\n").is_err());
    }

    #[test]
    fn induced_subdigraphs() {
        let d = sec5();
        let s = d.induced_subdigraph(&["1", "2"]).unwrap();
        let arcs: Vec<_> = s.arcs().iter().map(|a| (s.vertex_name(a.tail), s.vertex_name(a.head))).collect();
        assert_eq!(arcs, vec![("1", "2"), ("2", "1")]);

        let empty = d.induced_subdigraph::<&str>(&[]).unwrap();
        assert_eq!(empty.vertex_count(), 0);
        assert!(empty.arcs().is_empty());

        let t = c3().induced_subdigraph(&["a", "b"]).unwrap();
        assert_eq!(t.arcs().len(), 1);
        assert_eq!((t.arcs()[0].tail, t.arcs()[0].head), (0, 1));

        assert_eq!(d.induced_subdigraph(&["1", "2", "3", "4"]).unwrap(), d);
        assert!(matches!(d.induced_subdigraph(&["9"]), Err(Error::UnknownVertex(_))));
    }

    #[test]
    fn directed_cycles() {
        let cycles = enumerate_directed_cycles(&c3(), None, Budget::default()).unwrap();
        assert_eq!(cycles, vec![vec![0, 1, 2]]);

        let d = sec5();
        let all = enumerate_directed_cycles(&d, None, Budget::default()).unwrap();
        assert_eq!(all, vec![vec![0, 1]]);
        assert!(enumerate_directed_cycles(&d, Some(Parity::Odd), Budget::default()).unwrap().is_empty());

        let single = Digraph::parse("v a\nv b\na x a b\n").unwrap();
        assert!(enumerate_directed_cycles(&single, None, Budget::default()).unwrap().is_empty());
        assert!(enumerate_directed_cycles(&c3(), None, Budget(0)).is_err());
    }

    #[test]
    fn text_round_trip() {
        let d = sec5();
        assert_eq!(Digraph::parse(&d.to_text()).unwrap(), d);
        let h = Multigraph::parse("# comment\nv u\nv v\ne e1 u v\ne e2 u v\n").unwrap();
        assert_eq!(Multigraph::parse(&h.to_text()).unwrap(), h);
    }
}
