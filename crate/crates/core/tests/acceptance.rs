//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use kernelpoly::bridge::{find_cyclic_preference_cycles, CliqueMode};
use kernelpoly::corpus::{desk_corpus, named, preference_systems, root_multigraphs};
use kernelpoly::gadget::{derive_internal_orders, eliminate_gadgets, ELIMINATION_ORDER, expand, lift_point, project_point, InternalOrderTable};
use kernelpoly::graph::Parity;
use kernelpoly::oracles::{oracle_agreement, verify_main_theorem_with, PolyCache, SweepOptions};
use kernelpoly::polyhedra::{
    build_pi, build_sigma, check_integrality, check_tdi, enumerate_vertices, MatchMode, TdiVerdict, VertexSet,
};
use kernelpoly::stable::{fsm_check, half_integral_decomposition, is_stable_matching, perturb_and_round};
use kernelpoly::{Budget, Digraph, FractionalPoint, PreferenceSystem, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RANDOM_DESK_SYSTEMS: usize = 200;
const CONVEX_SAMPLES: usize = 100;
const SAMPLE_SEED: u64 = 31;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn sec5() -> Digraph {
    Digraph::parse("v 1\nv 2\nv 3\nv 4\na a12 1 2\na a21 2 1\na a31 3 1\na a34 3 4\na a42 4 2\n").expect("valid digraph")
}

fn point(vars: &[&str], vals: &[Rational]) -> FractionalPoint {
    FractionalPoint::from_dense(vars, vals)
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed < limit
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let sys = build_sigma(&sec5(), CliqueMode::All, Budget::default()).expect("σ builds");
    let vs = enumerate_vertices(&sys, Budget::default()).expect("bounded polytope");
    let elapsed = start.elapsed();
    let vars = ["1", "2", "3", "4"];
    let expected: BTreeSet<FractionalPoint> = [
        point(&vars, &[q(1, 1), q(0, 1), q(0, 1), q(1, 1)]),
        point(&vars, &[q(1, 2), q(1, 2), q(0, 1), q(1, 2)]),
        point(&vars, &[q(0, 1), q(1, 1), q(1, 1), q(0, 1)]),
    ]
    .into();
    let got: BTreeSet<FractionalPoint> = vs.vertices.iter().cloned().collect();
    outcome(
        got == expected && vs.len() == 3 && within(elapsed, Duration::from_secs(1)),
        format!("vertices {} in {elapsed:.2?} (limit 1s)", vs.tuples().join(" ")),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let b = Budget::default();
    let sys = build_sigma(&sec5(), CliqueMode::All, b).expect("σ builds");
    let half = point(&["1", "2", "3", "4"], &[q(1, 2), q(1, 2), q(0, 1), q(1, 2)]);
    let k1 = check_integrality(&sys, 1, b).expect("integrality k=1");
    let k2 = check_integrality(&sys, 2, b).expect("integrality k=2");
    let t1 = check_tdi(&sys, 1, 2, b).expect("tdi k=1");
    let t2 = check_tdi(&sys, 2, 2, b).expect("tdi k=2");
    let elapsed = start.elapsed();
    let refuting = t1.failures.first().map(|f| format!("{:?}", f.objective)).unwrap_or_default();
    let pass = !k1.integral
        && k1.witness.as_ref() == Some(&half)
        && k2.integral
        && t1.verdict == TdiVerdict::Fail
        && !t1.failures.is_empty()
        && t2.verdict == TdiVerdict::Pass
        && within(elapsed, Duration::from_secs(30));
    outcome(
        pass,
        format!(
            "k=1 integral={} k=2 integral={} tdi/1 {:?} (objective {refuting}) tdi/2 {:?} over {} objectives, {elapsed:.2?}",
            k1.integral, k2.integral, t1.verdict, t2.verdict, t2.objectives_checked
        ),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let opts = SweepOptions::new(2);
    let mut cache = PolyCache::new();
    let mut roots = 0;
    let mut orientations = 0;
    let mut raw = 0;
    let mut violations = Vec::new();
    for h in root_multigraphs(4) {
        let report = match verify_main_theorem_with(&h, &opts, &mut cache) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("sweep failed on\n{}: {e}", h.to_text())),
        };
        roots += 1;
        orientations += report.orientations.len();
        raw += report.orientations.iter().filter(|o| o.encoding.starts_with("raw:")).count();
        violations.extend(report.violations.into_iter().map(|v| format!("{} {}", v.encoding, v.reason)));
    }
    let elapsed = start.elapsed();
    outcome(
        violations.is_empty() && within(elapsed, Duration::from_secs(600)),
        format!(
            "{roots} roots, {orientations} orientations ({raw} raw), {} cached σ classes, {} violations{}, {elapsed:.2?}",
            cache.len(),
            violations.len(),
            violations.first().map(|v| format!(" e.g. {v}")).unwrap_or_default()
        ),
    )
}

struct DeskInstance {
    ps: PreferenceSystem,
    vertices: VertexSet,
}

fn desk_instances() -> Vec<DeskInstance> {
    desk_corpus(RANDOM_DESK_SYSTEMS)
        .into_iter()
        .map(|ps| {
            let vertices = enumerate_vertices(&build_pi(&ps), Budget::default()).expect("FSM is a polytope");
            DeskInstance { ps, vertices }
        })
        .collect()
}

fn criterion_4(desk: &[DeskInstance]) -> Outcome {
    let mut vertices = 0;
    let mut fractional = 0;
    let mut problems = Vec::new();
    for inst in desk {
        assert!(inst.ps.is_simple() && inst.ps.graph().edge_count() <= 8);
        for x in &inst.vertices.vertices {
            vertices += 1;
            if !x.is_integral_over(2) {
                problems.push(format!("vertex {} is not 1/2-integral", render(x)));
                continue;
            }
            match half_integral_decomposition(&inst.ps, x) {
                Ok(cycles) => {
                    if !cycles.is_empty() {
                        fractional += 1;
                    }
                    let mut seen = BTreeSet::new();
                    let disjoint = cycles.iter().flat_map(|c| c.vertices.iter()).all(|v| seen.insert(v.clone()));
                    let covers: usize = cycles.iter().map(|c| c.edges.len()).sum();
                    let half = x.level_set(&q(1, 2)).len();
                    if !disjoint || covers != half {
                        problems.push(format!("decomposition of {} is not a disjoint cover", render(x)));
                    }
                }
                Err(e) => problems.push(format!("{}: {e}", render(x))),
            }
        }
    }
    outcome(
        problems.is_empty(),
        format!(
            "{} systems, {vertices} FSM vertices ({fractional} fractional), {} problems{}",
            desk.len(),
            problems.len(),
            problems.first().map(|p| format!(" e.g. {p}")).unwrap_or_default()
        ),
    )
}

fn render(x: &FractionalPoint) -> String {
    x.values.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
}

fn random_convex_combination(vs: &VertexSet, rng: &mut ChaCha8Rng) -> FractionalPoint {
    let weights: Vec<i64> = vs.vertices.iter().map(|_| rng.gen_range(0..=20)).collect();
    let total: i64 = weights.iter().sum::<i64>().max(1);
    let mut out = FractionalPoint::new();
    for var in &vs.variables {
        let mut sum = Rational::zero();
        for (w, v) in weights.iter().zip(&vs.vertices) {
            sum += Rational::from_integer(*w) * v.get(var);
        }
        if weights.iter().all(|&w| w == 0) {
            sum = vs.vertices[0].get(var);
        } else {
            sum = sum / Rational::from_integer(total);
        }
        out.set(var, sum);
    }
    out
}

fn criterion_5(table: &InternalOrderTable) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut points = 0;
    let mut problems = Vec::new();
    for ps in [named::parallel_pair(), named::parallel_triple()] {
        let exp = match expand(&ps, table) {
            Ok(e) => e,
            Err(e) => return outcome(false, format!("expansion failed: {e}")),
        };
        let vs = enumerate_vertices(&build_pi(&ps), Budget::default()).expect("FSM is a polytope");
        let samples: Vec<FractionalPoint> = (0..CONVEX_SAMPLES).map(|_| random_convex_combination(&vs, &mut rng)).collect();
        for x in vs.vertices.iter().chain(&samples) {
            points += 1;
            let result = lift_point(x, &exp).and_then(|y| {
                let member = fsm_check(&exp.expanded, &y)?.member;
                let back = project_point(&y, &exp)?;
                Ok((member, back == *x))
            });
            match result {
                Ok((true, true)) => {}
                Ok((member, identity)) => {
                    problems.push(format!("{}: in FSM {member}, project∘lift = id {identity}", render(x)))
                }
                Err(e) => problems.push(format!("{}: {e}", render(x))),
            }
        }
    }
    outcome(
        problems.is_empty(),
        format!(
            "{points} points lifted over parallel pair and triple, {} problems{}",
            problems.len(),
            problems.first().map(|p| format!(" e.g. {p}")).unwrap_or_default()
        ),
    )
}

fn criterion_6(table: &InternalOrderTable) -> Outcome {
    let start = Instant::now();
    let exp = match expand(&named::parallel_pair(), table) {
        Ok(e) => e,
        Err(e) => return outcome(false, format!("expansion failed: {e}")),
    };
    let order_ok = ELIMINATION_ORDER == ["u1.v2", "u2.v1", "u.u0", "u0.u1", "u0.u2", "v0.v1", "v0.v2"];
    let implied = eliminate_gadgets(&exp, MatchMode::Implied);
    let syntactic = eliminate_gadgets(&exp, MatchMode::Syntactic);
    let elapsed = start.elapsed();
    match (implied, syntactic) {
        (Ok(i), Ok(s)) => outcome(
            order_ok && i.matched && i.only_in_a.is_empty() && i.only_in_b.is_empty() && s.only_in_b.is_empty(),
            format!(
                "implied match {} (diff {}+{}), every π row present verbatim: {} ({} redundant rows left by elimination), {elapsed:.2?}",
                i.matched,
                i.only_in_a.len(),
                i.only_in_b.len(),
                s.only_in_b.is_empty(),
                s.only_in_a.len()
            ),
        ),
        (Err(e), _) | (_, Err(e)) => outcome(false, format!("elimination failed: {e}")),
    }
}

fn criterion_7(desk: &[DeskInstance]) -> Outcome {
    let start = Instant::now();
    let b = Budget::default();
    let mut checked = 0;
    let mut objectives = 0;
    let mut problems = Vec::new();
    for inst in desk {
        let odd = find_cyclic_preference_cycles(&inst.ps, Some(Parity::Odd), b).expect("cycle search");
        if !odd.is_empty() {
            continue;
        }
        checked += 1;
        if let Some(x) = inst.vertices.vertices.iter().find(|x| !x.is_integral()) {
            problems.push(format!("fractional vertex {}", render(x)));
            continue;
        }
        match check_tdi(&build_pi(&inst.ps), 1, 2, b) {
            Ok(r) if r.verdict == TdiVerdict::Pass => objectives += r.objectives_checked,
            Ok(r) => problems.push(format!("TDI fails on objective {:?}", r.failures[0].objective)),
            Err(e) => problems.push(format!("TDI check: {e}")),
        }
    }
    let c4 = named::c4_cyclic();
    let half = FractionalPoint::from_pairs(["e12", "e23", "e34", "e41"].map(|e| (e, q(1, 2))));
    let rounding = perturb_and_round(&c4, &half, b)
        .and_then(|r| Ok((is_stable_matching(&c4, &r.matching)?.stable, r.matching)));
    let rounded = match &rounding {
        Ok((true, m)) => format!("C4 rounds to stable {}", m.iter().cloned().collect::<Vec<_>>().join(" ")),
        Ok((false, m)) => {
            problems.push("rounded matching is not stable".into());
            format!("C4 rounds to unstable {m:?}")
        }
        Err(e) => {
            problems.push(format!("rounding failed: {e}"));
            "C4 rounding failed".into()
        }
    };
    let elapsed = start.elapsed();
    outcome(
        problems.is_empty(),
        format!(
            "{checked} systems without odd cyclic cycles, {objectives} objectives, {rounded}, {} problems{}, {elapsed:.2?}",
            problems.len(),
            problems.first().map(|p| format!(" e.g. {p}")).unwrap_or_default()
        ),
    )
}

fn criterion_8(table: &InternalOrderTable, five: bool, six: bool) -> Outcome {
    let start = Instant::now();
    let corpus = preference_systems(named::parallel_pair().graph());
    match derive_internal_orders(&corpus, Budget::default()) {
        Ok(tables) => {
            let first = tables.first() == Some(table);
            outcome(
                !tables.is_empty() && first && five && six,
                format!(
                    "{} of 576 candidates valid over {} parallel-pair systems, shipped table is the first: {first}, passes criteria 5 and 6: {}, {:.2?}",
                    tables.len(),
                    corpus.len(),
                    five && six,
                    start.elapsed()
                ),
            )
        }
        Err(e) => outcome(false, format!("derivation failed: {e}")),
    }
}

fn criterion_9() -> Outcome {
    let b = Budget::default();
    let mut systems = 0;
    let mut mismatches = Vec::new();
    for h in root_multigraphs(4) {
        for ps in preference_systems(&h) {
            systems += 1;
            match oracle_agreement(&ps, b) {
                Ok(r) if r.agree => {}
                Ok(_) => mismatches.push(ps.to_text()),
                Err(e) => mismatches.push(format!("{e}")),
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("{systems} preference systems, {} mismatches", mismatches.len()),
    )
}

fn main() -> ExitCode {
    let mut all = true;
    let mut report = |n: u32, name: &str, o: Outcome| {
        all &= o.pass;
        println!("[{}] criterion {n}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    };
    let table = InternalOrderTable::default_table();
    report(1, "fractional kernel polytope of the four-vertex counterexample", criterion_1());
    report(2, "integrality and bounded TDI of the counterexample", criterion_2());
    report(3, "goodness, kernel-perfectness, integrality and TDI agree on all small roots", criterion_3());
    let desk = desk_instances();
    report(4, "FSM vertices are half-integral with cyclic decompositions", criterion_4(&desk));
    let five = criterion_5(&table);
    let five_pass = five.pass;
    report(5, "gadget lift stays in FSM and projects back", five);
    let six = criterion_6(&table);
    let six_pass = six.pass;
    report(6, "eliminating the gadget recovers π", six);
    report(7, "no odd cyclic cycle gives integrality, TDI and rounding", criterion_7(&desk));
    report(8, "gadget table derivation", criterion_8(&table, five_pass, six_pass));
    report(9, "stable matchings, integral FSM points and kernels coincide", criterion_9());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
