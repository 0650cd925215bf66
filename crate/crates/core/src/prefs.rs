use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{records, Multigraph};

/// A multigraph together with a strict order on δ(v) for every vertex.
///
/// `orders[v]` lists edge indices most-preferred first; `e ≺_v f` reads
/// "v prefers e to f".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceSystem {
    graph: Multigraph,
    orders: Vec<Vec<usize>>,
    rank: Vec<Vec<usize>>,
}

impl PreferenceSystem {
    pub fn new(graph: Multigraph, orders: Vec<Vec<usize>>) -> Result<Self> {
        if orders.len() != graph.vertex_count() {
            return Err(Error::Invalid(format!(
                "{} orders for {} vertices",
                orders.len(),
                graph.vertex_count()
            )));
        }
        let m = graph.edge_count();
        let mut rank = vec![vec![usize::MAX; m]; graph.vertex_count()];
        for (v, order) in orders.iter().enumerate() {
            let mut sorted = order.clone();
            sorted.sort_unstable();
            if sorted != graph.incident(v) {
                return Err(Error::InvalidOrder {
                    vertex: graph.vertex_name(v).to_string(),
                    message: "order is not a permutation of the incident edges".into(),
                });
            }
            for (pos, &e) in order.iter().enumerate() {
                rank[v][e] = pos;
            }
        }
        Ok(PreferenceSystem { graph, orders, rank })
    }

    /// Orders given by edge id, most preferred first.
    pub fn from_named(graph: Multigraph, named: &[(&str, Vec<&str>)]) -> Result<Self> {
        let mut orders = vec![Vec::new(); graph.vertex_count()];
        for (v, list) in named {
            let vi = graph.vertex(v)?;
            orders[vi] = list.iter().map(|e| graph.edge(e)).collect::<Result<_>>()?;
        }
        PreferenceSystem::new(graph, orders)
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    pub fn order(&self, v: usize) -> &[usize] {
        &self.orders[v]
    }

    pub fn orders(&self) -> &[Vec<usize>] {
        &self.orders
    }

    pub fn is_simple(&self) -> bool {
        self.graph.is_simple()
    }

    /// Position of `e` in the order at `v`, 0 = most preferred.
    pub fn rank(&self, v: usize, e: usize) -> Option<usize> {
        let r = self.rank[v][e];
        (r != usize::MAX).then_some(r)
    }

    /// `e ≺_v f`.
    pub fn prefers(&self, v: usize, e: usize, f: usize) -> bool {
        self.rank[v][e] < self.rank[v][f]
    }

    /// φ_v(e): edges of δ(v) preferred to `e` at `v`.
    pub fn phi_at(&self, v: usize, e: usize) -> Vec<usize> {
        match self.rank(v, e) {
            Some(r) => {
                let mut out = self.orders[v][..r].to_vec();
                out.sort_unstable();
                out
            }
            None => Vec::new(),
        }
    }

    /// φ(e): `e` together with every edge preferred to it at one of its ends.
    pub fn phi(&self, e: usize) -> Vec<usize> {
        let edge = &self.graph.edges()[e];
        let mut out = vec![e];
        out.extend(self.phi_at(edge.u, e));
        out.extend(self.phi_at(edge.v, e));
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let graph = Multigraph::parse(text)?;
        let mut orders: Vec<Option<Vec<usize>>> = vec![None; graph.vertex_count()];
        for (lineno, tokens) in records(text) {
            if tokens[0] != "p" {
                continue;
            }
            let bad = |message: String| Error::Parse { line: lineno, message };
            if tokens.len() < 3 || tokens[2] != ":" {
                return Err(bad("expected `p <vertex> : <edge> ...`".into()));
            }
            let v = graph.vertex(tokens[1]).map_err(|e| bad(e.to_string()))?;
            if orders[v].is_some() {
                return Err(bad(format!("second order for `{}`", tokens[1])));
            }
            let list = tokens[3..]
                .iter()
                .map(|e| graph.edge(e))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| bad(e.to_string()))?;
            orders[v] = Some(list);
        }
        let orders = orders
            .into_iter()
            .enumerate()
            .map(|(v, o)| match o {
                Some(o) => Ok(o),
                None if graph.degree(v) == 0 => Ok(Vec::new()),
                None => Err(Error::InvalidOrder {
                    vertex: graph.vertex_name(v).to_string(),
                    message: "missing preference line".into(),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        PreferenceSystem::new(graph, orders)
    }

    pub fn to_text(&self) -> String {
        let mut out = self.graph.to_text();
        for (v, order) in self.orders.iter().enumerate() {
            if order.is_empty() {
                continue;
            }
            let _ = write!(out, "p {} :", self.graph.vertex_name(v));
            for &e in order {
                let _ = write!(out, " {}", self.graph.edge_id(e));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_query() {
        let ps = PreferenceSystem::parse(
            "v c\nv x\nv y\nv z\ne a c x\ne b c y\ne d c z\np c : a b d\np x : a\np y : b\np z : d\n",
        )
        .unwrap();
        let c = ps.graph().vertex("c").unwrap();
        let (a, b, d) = (0, 1, 2);
        assert!(ps.prefers(c, a, b));
        assert!(ps.prefers(c, b, d));
        assert_eq!(ps.rank(c, d), Some(2));
        assert_eq!(PreferenceSystem::parse(&ps.to_text()).unwrap(), ps);
    }

    #[test]
    fn rejects_incomplete_orders() {
        assert!(PreferenceSystem::parse("v u\nv v\ne e1 u v\ne e2 u v\np u : e1\np v : e1 e2\n").is_err());
        assert!(PreferenceSystem::parse("v u\nv v\ne e1 u v\np u : e1\n").is_err());
        assert!(PreferenceSystem::parse("v u\nv v\ne e1 u v\np u e1\np v : e1\n").is_err());
    }
}
