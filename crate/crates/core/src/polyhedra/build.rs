use std::collections::BTreeSet;

use crate::bridge::{enumerate_cliques, CliqueMode};
use crate::error::{Budget, Result};
use crate::graph::Digraph;
use crate::prefs::PreferenceSystem;

use super::{LinearSystem, Relation};

/// σ(D): `dom[v]` rows x(v) + x(N⁺(v)) >= 1, `clique[..]` rows x(Q) <= 1,
/// and `nonneg[v]`, over the vertex names of `d`.
pub fn build_sigma(d: &Digraph, mode: CliqueMode, budget: Budget) -> Result<LinearSystem> {
    let names = d.vertex_names();
    let mut sys = LinearSystem::new(names);
    for v in 0..d.vertex_count() {
        let mut dom = vec![names[v].as_str()];
        dom.extend(d.out_neighbors(v).into_iter().map(|w| names[w].as_str()));
        sys.push_sum(format!("dom[{}]", names[v]), &dom, Relation::Ge, 1)?;
    }
    for q in enumerate_cliques(d, mode, None, budget)? {
        let members: Vec<&str> = q.members.iter().map(|&v| names[v].as_str()).collect();
        sys.push_sum(format!("clique[{}]", members.join(",")), &members, Relation::Le, 1)?;
    }
    for v in names {
        sys.push_sum(format!("nonneg[{v}]"), &[v], Relation::Ge, 0)?;
    }
    Ok(sys)
}

/// π(G,≺): `stab[e]` rows x(φ(e)) >= 1, `match[v]` rows x(δ(v)) <= 1,
/// and `nonneg[e]`, over the edge ids.
pub fn build_pi(ps: &PreferenceSystem) -> LinearSystem {
    let g = ps.graph();
    let ids: Vec<&str> = g.edges().iter().map(|e| e.id.as_str()).collect();
    let mut sys = LinearSystem::new(&ids);
    let push = |sys: &mut LinearSystem, label: String, set: &[usize], rel, rhs| {
        let vars: Vec<&str> = set.iter().map(|&e| ids[e]).collect();
        sys.push_sum(label, &vars, rel, rhs).expect("rows use declared edges");
    };
    for e in 0..g.edge_count() {
        push(&mut sys, format!("stab[{}]", ids[e]), &ps.phi(e), Relation::Ge, 1);
    }
    for v in 0..g.vertex_count() {
        push(&mut sys, format!("match[{}]", g.vertex_name(v)), &g.incident(v), Relation::Le, 1);
    }
    for e in 0..g.edge_count() {
        push(&mut sys, format!("nonneg[{}]", ids[e]), &[e], Relation::Ge, 0);
    }
    sys
}

/// π(G,≺) plus the clique rows it absorbs when σ(D) is read on the root:
/// `sub[v:..]` for every nonempty proper subset of δ(v) and `tri[a,b,c]`
/// for the edge set of every triangle of the root.
pub fn build_sigma_as_prefs(ps: &PreferenceSystem, budget: Budget) -> Result<LinearSystem> {
    let g = ps.graph();
    let ids: Vec<&str> = g.edges().iter().map(|e| e.id.as_str()).collect();
    let mut sys = build_pi(ps);
    let needed: u128 = (0..g.vertex_count()).map(|v| 1u128 << g.degree(v).min(100)).sum();
    budget.check("star subsets", needed)?;
    for v in 0..g.vertex_count() {
        let star = g.incident(v);
        let k = star.len();
        for mask in 1..(1u64 << k).saturating_sub(1) {
            let vars: Vec<&str> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| ids[star[i]]).collect();
            sys.push_sum(format!("sub[{}:{}]", g.vertex_name(v), vars.join(",")), &vars, Relation::Le, 1)?;
        }
    }
    let n = g.vertex_count();
    let adjacent: Vec<BTreeSet<usize>> = (0..n)
        .map(|v| g.incident(v).into_iter().map(|e| g.edges()[e].other(v)).collect())
        .collect();
    for a in 0..n {
        for b in adjacent[a].range(a + 1..) {
            for c in adjacent[*b].range(b + 1..) {
                if !adjacent[a].contains(c) {
                    continue;
                }
                let set: Vec<&str> = g
                    .edges()
                    .iter()
                    .filter(|e| [a, *b, *c].contains(&e.u) && [a, *b, *c].contains(&e.v))
                    .map(|e| e.id.as_str())
                    .collect();
                let label = format!("tri[{},{},{}]", g.vertex_name(a), g.vertex_name(*b), g.vertex_name(*c));
                sys.push_sum(label, &set, Relation::Le, 1)?;
            }
        }
    }
    Ok(sys)
}
