//! The parallel-edge gadget: each edge `e = uv` of a parallel class is
//! replaced by a 6-cycle `u0 u1 v2 v0 v1 u2` with hanging edges `u·u0` and
//! `v·v0`, which makes the preference system simple while keeping its
//! fractional stable matchings as a projection.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Budget, Error, Result};
use crate::graph::{records, Multigraph};
use crate::point::FractionalPoint;
use crate::polyhedra::{build_pi, enumerate_vertices, fm_eliminate_all, systems_match, MatchMode, MatchReport};
use crate::prefs::PreferenceSystem;
use crate::rational::Rational;
use crate::stable::fsm_check;

/// Internal gadget vertices in canonical order.
pub const INTERNAL_VERTICES: [&str; 6] = ["u0", "u1", "u2", "v0", "v1", "v2"];

/// Gadget edges in canonical order.
pub const GADGET_EDGES: [&str; 8] = ["u.u0", "v.v0", "u0.u1", "u0.u2", "v0.v1", "v0.v2", "u1.v2", "u2.v1"];

/// Elimination order that projects one gadget back onto its hanging edge `v·v0`.
pub const ELIMINATION_ORDER: [&str; 7] = ["u1.v2", "u2.v1", "u.u0", "u0.u1", "u0.u2", "v0.v1", "v0.v2"];

const DEFAULT_TABLE: &str = include_str!("../../../fixtures/gadget-table.pref");

fn gadget_edges_at(vertex: &str) -> Vec<&'static str> {
    GADGET_EDGES.iter().copied().filter(|e| e.split('.').any(|end| end == vertex)).collect()
}

/// Strict orders at the six internal vertices, over canonical edge names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct InternalOrderTable {
    pub orders: BTreeMap<String, Vec<String>>,
}

impl InternalOrderTable {
    /// Check that every internal vertex orders exactly its incident gadget edges.
    pub fn validate(&self) -> Result<()> {
        let keys: BTreeSet<&str> = self.orders.keys().map(String::as_str).collect();
        if keys != BTreeSet::from(INTERNAL_VERTICES) {
            return Err(Error::InvalidTable("orders must cover exactly u0, u1, u2, v0, v1, v2".into()));
        }
        for (v, order) in &self.orders {
            let mut got: Vec<&str> = order.iter().map(String::as_str).collect();
            got.sort_unstable();
            let mut want = gadget_edges_at(v);
            want.sort_unstable();
            if got != want {
                return Err(Error::InvalidTable(format!("order at {v} must list {}", want.join(" "))));
            }
        }
        Ok(())
    }

    /// `p <vertex> : <edge> ...` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut orders = BTreeMap::new();
        for (line, tokens) in records(text) {
            if tokens[0] != "p" || tokens.len() < 3 || tokens[2] != ":" {
                return Err(Error::Parse { line, message: "expected `p <vertex> : <edge> ...`".into() });
            }
            if orders.insert(tokens[1].to_string(), tokens[3..].iter().map(|s| s.to_string()).collect()).is_some() {
                return Err(Error::Parse { line, message: format!("second order for {}", tokens[1]) });
            }
        }
        let table = InternalOrderTable { orders };
        table.validate()?;
        Ok(table)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in INTERNAL_VERTICES {
            let _ = writeln!(s, "p {v} : {}", self.orders[v].join(" "));
        }
        s
    }

    /// The shipped table, the first one found by [`derive_internal_orders`].
    pub fn default_table() -> Self {
        InternalOrderTable::parse(DEFAULT_TABLE).expect("shipped table is valid")
    }

    /// All 3!·3!·2⁴ = 576 candidate tables in a fixed order.
    pub fn candidates() -> Vec<InternalOrderTable> {
        let per_vertex: Vec<Vec<Vec<String>>> = INTERNAL_VERTICES
            .iter()
            .map(|v| permutations(&gadget_edges_at(v)))
            .collect();
        let mut out = vec![BTreeMap::new()];
        for (v, options) in INTERNAL_VERTICES.iter().zip(&per_vertex) {
            out = out
                .into_iter()
                .flat_map(|partial: BTreeMap<String, Vec<String>>| {
                    options.iter().map(move |o| {
                        let mut next = partial.clone();
                        next.insert(v.to_string(), o.clone());
                        next
                    })
                })
                .collect();
        }
        out.into_iter().map(|orders| InternalOrderTable { orders }).collect()
    }
}

fn permutations(items: &[&str]) -> Vec<Vec<String>> {
    if items.len() <= 1 {
        return vec![items.iter().map(|s| s.to_string()).collect()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.to_string());
            out.push(tail);
        }
    }
    out
}

/// One replaced edge: `edges` follows [`GADGET_EDGES`] and `vertices`
/// follows [`INTERNAL_VERTICES`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gadget {
    pub edge: String,
    pub u: String,
    pub v: String,
    pub vertices: [String; 6],
    pub edges: [String; 8],
}

impl Gadget {
    fn new(edge: &str, u: &str, v: &str) -> Self {
        Gadget {
            edge: edge.to_string(),
            u: u.to_string(),
            v: v.to_string(),
            vertices: INTERNAL_VERTICES.map(|x| format!("{edge}/{x}")),
            edges: GADGET_EDGES.map(|x| format!("{edge}/{x}")),
        }
    }

    /// Expanded id of a canonical gadget edge name.
    pub fn edge_named(&self, canonical: &str) -> &str {
        let i = GADGET_EDGES.iter().position(|e| *e == canonical).expect("canonical gadget edge");
        &self.edges[i]
    }

    fn endpoint(&self, name: &str) -> String {
        match name {
            "u" => self.u.clone(),
            "v" => self.v.clone(),
            internal => format!("{}/{internal}", self.edge),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetExpansion {
    pub original: PreferenceSystem,
    pub expanded: PreferenceSystem,
    pub gadgets: Vec<Gadget>,
}

impl GadgetExpansion {
    pub fn gadget(&self, edge: &str) -> Option<&Gadget> {
        self.gadgets.iter().find(|g| g.edge == edge)
    }

    /// The full elimination order, gadget by gadget.
    pub fn elimination_order(&self) -> Vec<String> {
        self.gadgets
            .iter()
            .flat_map(|g| ELIMINATION_ORDER.iter().map(move |e| g.edge_named(e).to_string()))
            .collect()
    }

    /// Renaming `v·v0 -> e` for every gadget.
    pub fn projection_renaming(&self) -> BTreeMap<String, String> {
        self.gadgets.iter().map(|g| (g.edge_named("v.v0").to_string(), g.edge.clone())).collect()
    }
}

/// Replace every edge lying in a parallel class of size at least two.
pub fn expand(ps: &PreferenceSystem, table: &InternalOrderTable) -> Result<GadgetExpansion> {
    let g = ps.graph();
    let chosen: Vec<&str> = (0..g.edge_count())
        .filter(|&e| g.parallel_class(e).len() > 1)
        .map(|e| g.edge_id(e))
        .collect();
    expand_edges(ps, table, &chosen)
}

/// Replace exactly the listed edges by gadgets.
pub fn expand_edges<S: AsRef<str>>(ps: &PreferenceSystem, table: &InternalOrderTable, edges: &[S]) -> Result<GadgetExpansion> {
    table.validate()?;
    let g = ps.graph();
    let replaced: BTreeSet<usize> = edges.iter().map(|e| g.edge(e.as_ref())).collect::<Result<_>>()?;
    let mut h = Multigraph::new();
    for v in g.vertex_names() {
        h.add_vertex(v)?;
    }
    let mut gadgets = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if replaced.contains(&i) {
            let gadget = Gadget::new(&e.id, g.vertex_name(e.u), g.vertex_name(e.v));
            for v in &gadget.vertices {
                h.add_vertex(v)?;
            }
            for (name, id) in GADGET_EDGES.iter().zip(&gadget.edges) {
                let (a, b) = name.split_once('.').unwrap();
                h.add_edge(id, &gadget.endpoint(a), &gadget.endpoint(b))?;
            }
            gadgets.push(gadget);
        } else {
            h.add_edge(&e.id, g.vertex_name(e.u), g.vertex_name(e.v))?;
        }
    }
    // the hanging edge of a replaced edge at each original endpoint
    let stand_in = |e: usize, w: usize| -> String {
        let edge = &g.edges()[e];
        if !replaced.contains(&e) {
            edge.id.clone()
        } else if w == edge.u {
            format!("{}/u.u0", edge.id)
        } else {
            format!("{}/v.v0", edge.id)
        }
    };
    let mut orders = vec![Vec::new(); h.vertex_count()];
    for w in 0..g.vertex_count() {
        orders[w] = ps.order(w).iter().map(|&e| h.edge(&stand_in(e, w))).collect::<Result<_>>()?;
    }
    for gadget in &gadgets {
        for (k, v) in INTERNAL_VERTICES.iter().enumerate() {
            let vi = h.vertex(&gadget.vertices[k])?;
            orders[vi] = table.orders[*v]
                .iter()
                .map(|e| h.edge(gadget.edge_named(e)))
                .collect::<Result<_>>()?;
        }
    }
    let expanded = PreferenceSystem::new(h, orders)?;
    Ok(GadgetExpansion { original: ps.clone(), expanded, gadgets })
}

/// Extend a point of FSM(original) to the gadget edges.
pub fn lift_point(x: &FractionalPoint, exp: &GadgetExpansion) -> Result<FractionalPoint> {
    let r = fsm_check(&exp.original, x)?;
    if !r.member {
        return Err(Error::NotInFsm { violated: r.violated });
    }
    let g = exp.original.graph();
    let mut out = FractionalPoint::new();
    for e in g.edges() {
        if exp.gadget(&e.id).is_none() {
            out.set(&e.id, x.get(&e.id));
        }
    }
    let one = Rational::one();
    for gadget in &exp.gadgets {
        let ei = g.edge(&gadget.edge)?;
        let u = g.edges()[ei].u;
        let xe = x.get(&gadget.edge);
        let phi_u: Rational = exp.original.phi_at(u, ei).iter().map(|&f| x.get(g.edge_id(f))).sum();
        let both = &xe + &phi_u;
        let values = [
            ("u.u0", xe.clone()),
            ("v.v0", xe.clone()),
            ("u0.u1", &one - &both),
            ("v0.v2", &one - &both),
            ("u0.u2", phi_u.clone()),
            ("v0.v1", phi_u.clone()),
            ("u1.v2", both.clone()),
            ("u2.v1", &one - &phi_u),
        ];
        for (name, value) in values {
            out.set(gadget.edge_named(name), value);
        }
    }
    Ok(out)
}

/// Read each replaced edge off its hanging edges.
pub fn project_point(x: &FractionalPoint, exp: &GadgetExpansion) -> Result<FractionalPoint> {
    let r = fsm_check(&exp.expanded, x)?;
    if !r.member {
        return Err(Error::NotInFsm { violated: r.violated });
    }
    let mut out = FractionalPoint::new();
    for e in exp.original.graph().edges() {
        match exp.gadget(&e.id) {
            None => out.set(&e.id, x.get(&e.id)),
            Some(gadget) => {
                let a = x.get(gadget.edge_named("u.u0"));
                if a != x.get(gadget.edge_named("v.v0")) {
                    return Err(Error::ProjectionMismatch(e.id.clone()));
                }
                out.set(&e.id, a);
            }
        }
    }
    Ok(out)
}

/// Eliminate every gadget in the fixed order and compare the result,
/// after renaming `v·v0 -> e`, with π(original).
pub fn eliminate_gadgets(exp: &GadgetExpansion, mode: MatchMode) -> Result<MatchReport> {
    let pi = build_pi(&exp.expanded);
    let order = exp.elimination_order();
    let steps = fm_eliminate_all(&pi, &order)?;
    let reduced = steps.last().map_or(pi, |s| s.system.clone());
    systems_match(&reduced, &build_pi(&exp.original), &exp.projection_renaming(), mode)
}

/// Why a candidate table was rejected on one corpus instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TableCheck {
    Passed,
    LiftLeavesPolytope { vertex: FractionalPoint, violated: Vec<String> },
    EliminationMismatch(MatchReport),
}

fn lift_failure(ps: &PreferenceSystem, exp: &GadgetExpansion, budget: Budget) -> Result<Option<TableCheck>> {
    for v in enumerate_vertices(&build_pi(ps), budget)?.vertices {
        let lifted = lift_point(&v, exp)?;
        let r = fsm_check(&exp.expanded, &lifted)?;
        if !r.member {
            return Ok(Some(TableCheck::LiftLeavesPolytope { vertex: v, violated: r.violated }));
        }
    }
    Ok(None)
}

/// Check one table against one instance: every FSM vertex must lift into
/// FSM of the expansion, and eliminating the gadgets must give back π.
pub fn check_table(ps: &PreferenceSystem, table: &InternalOrderTable, budget: Budget) -> Result<TableCheck> {
    let exp = expand(ps, table)?;
    if let Some(failure) = lift_failure(ps, &exp, budget)? {
        return Ok(failure);
    }
    let report = eliminate_gadgets(&exp, MatchMode::Implied)?;
    Ok(if report.matched { TableCheck::Passed } else { TableCheck::EliminationMismatch(report) })
}

/// Every candidate table that passes [`check_table`] on the whole corpus,
/// in candidate order. The lift condition is screened on every instance
/// before any elimination runs.
pub fn derive_internal_orders(corpus: &[PreferenceSystem], budget: Budget) -> Result<Vec<InternalOrderTable>> {
    if corpus.is_empty() {
        return Err(Error::Invalid("validation corpus is empty".into()));
    }
    let mut out = Vec::new();
    'tables: for table in InternalOrderTable::candidates() {
        let mut expansions = Vec::with_capacity(corpus.len());
        for ps in corpus {
            let exp = expand(ps, &table)?;
            if lift_failure(ps, &exp, budget)?.is_some() {
                continue 'tables;
            }
            expansions.push(exp);
        }
        for exp in &expansions {
            if !eliminate_gadgets(exp, MatchMode::Implied)?.matched {
                continue 'tables;
            }
        }
        out.push(table);
    }
    if out.is_empty() {
        return Err(Error::NoValidTable);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::named;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn candidate_tables() {
        let all = InternalOrderTable::candidates();
        assert_eq!(all.len(), 576);
        assert_eq!(all.iter().collect::<BTreeSet<_>>().len(), 576);
        assert!(all.iter().all(|t| t.validate().is_ok()));
        assert!(all.contains(&InternalOrderTable::default_table()));
    }

    #[test]
    fn table_text_round_trip_and_validation() {
        let t = InternalOrderTable::default_table();
        assert_eq!(InternalOrderTable::parse(&t.to_text()).unwrap(), t);
        assert!(matches!(
            InternalOrderTable::parse("p u0 : u.u0 u0.u1\n"),
            Err(Error::InvalidTable(_))
        ));
        let swapped = t.to_text().replace("p u1 : u1.v2 u0.u1", "p u1 : u1.v2 u2.v1");
        assert!(InternalOrderTable::parse(&swapped).is_err());
    }

    #[test]
    fn expansion_shape() {
        let exp = expand(&named::parallel_pair(), &InternalOrderTable::default_table()).unwrap();
        let h = exp.expanded.graph();
        assert_eq!(h.vertex_count(), 2 + 12);
        assert_eq!(h.edge_count(), 16);
        assert!(h.is_simple());
        assert_eq!(exp.gadgets.len(), 2);
        assert_eq!(exp.elimination_order().len(), 14);
        assert_eq!(exp.projection_renaming()["e1/v.v0"], "e1");
        let simple = expand(&named::star(), &InternalOrderTable::default_table()).unwrap();
        assert!(simple.gadgets.is_empty());
        assert_eq!(simple.expanded, named::star());
    }

    #[test]
    fn lift_then_project() {
        let ps = named::parallel_pair();
        let exp = expand(&ps, &InternalOrderTable::default_table()).unwrap();
        for (a, b) in [(q(1, 1), q(0, 1)), (q(0, 1), q(1, 1)), (q(1, 3), q(2, 3))] {
            let x = FractionalPoint::from_pairs([("e1", a), ("e2", b)]);
            let y = lift_point(&x, &exp).unwrap();
            assert!(fsm_check(&exp.expanded, &y).unwrap().member);
            assert_eq!(project_point(&y, &exp).unwrap(), x);
        }
        let outside = FractionalPoint::from_pairs([("e1", q(1, 4)), ("e2", q(1, 4))]);
        assert!(matches!(lift_point(&outside, &exp), Err(Error::NotInFsm { .. })));
    }

    #[test]
    fn a_rejected_table_is_reported() {
        let ps = named::parallel_pair();
        let first = &InternalOrderTable::candidates()[0];
        if first != &InternalOrderTable::default_table() {
            assert_ne!(check_table(&ps, first, Budget::default()).unwrap(), TableCheck::Passed);
        }
    }

    #[test]
    fn empty_corpus_is_rejected() {
        assert!(derive_internal_orders(&[], Budget::default()).is_err());
    }
}
