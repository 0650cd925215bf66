//! Command-line front end: file loading, the subcommands, and rendering.
//!
//! Exit codes: 0 for a positive verdict or success, 1 for a negative
//! verdict (always with a certificate), 2 for usage or input errors, and
//! 3 when a budget is exceeded.

pub mod certificate;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use kernelpoly::bridge::{is_good, orientation_from_prefs, prefs_from_orientation, CliqueMode};
use kernelpoly::gadget::{expand, lift_point, project_point, InternalOrderTable};
use kernelpoly::graph::build_line_multigraph;
use kernelpoly::oracles::{enumerate_kernels, is_kernel_perfect, verify_main_theorem};
use kernelpoly::polyhedra::{
    build_pi, build_sigma, check_integrality, check_tdi, enumerate_vertices, fm_eliminate_all, TdiVerdict, VertexSet,
};
use kernelpoly::stable::{fsm_check, is_stable_matching, perturb_and_round};
use kernelpoly::{Budget, Digraph, FractionalPoint, LinearSystem, Multigraph, PreferenceSystem};
use serde_json::{json, Value};

pub use certificate::Certificate;

#[derive(Debug, Parser)]
#[command(name = "kernelpoly", version, about = "Kernels, stable matchings and exact polyhedral certificates")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Cap on enumeration sizes.
    #[arg(long, global = true, default_value_t = Budget::default().0)]
    pub budget: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a digraph is good.
    Good { digraph: PathBuf },
    /// Print the first kernel, or "none".
    Kernel { digraph: PathBuf },
    /// Decide whether every induced subdigraph has a kernel.
    KernelPerfect { digraph: PathBuf },
    /// Build the line multigraph of a root.
    Linegraph { multigraph: PathBuf },
    /// Recover the preference system an orientation of L(root) encodes.
    ToPrefs { root: PathBuf, digraph: PathBuf },
    /// Orient the line multigraph of a preference system.
    ToDigraph { prefs: PathBuf },
    /// Replace every parallel-class edge by a gadget.
    Expand {
        prefs: PathBuf,
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Vertices of the fractional kernel polytope.
    FkVertices { digraph: PathBuf },
    /// Vertices of the fractional stable matching polytope.
    FsmVertices { prefs: PathBuf },
    /// Decide whether every vertex is 1/k-integral.
    Integral {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Bounded check of total dual integrality over 1/k.
    Tdi {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        cbound: u32,
    },
    /// Fourier-Motzkin elimination in the given order.
    Fm {
        system: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        order: Vec<String>,
    },
    /// Lift a point of FSM into the gadget expansion.
    Lift {
        prefs: PathBuf,
        point: PathBuf,
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Round a 1/2-integral point of FSM to a stable matching.
    Round { prefs: PathBuf, point: PathBuf },
    /// Sweep every orientation of L(root) and compare the verdicts.
    Verify {
        root: PathBuf,
        #[arg(long, default_value_t = 2)]
        cbound: u32,
    },
    /// Re-validate a certificate printed by a negative verdict.
    CheckCertificate {
        certificate: PathBuf,
        /// The inputs the certificate refers to.
        inputs: Vec<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] kernelpoly::Error),
    #[error("cannot read `{path}`: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("`{path}`: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use kernelpoly::Error as E;
        match self {
            CliError::Core(E::InstanceTooLarge { .. }) => 3,
            CliError::Core(
                E::Infeasible
                | E::Unbounded
                | E::Degenerate
                | E::NotHalfIntegral
                | E::StructureViolation(_)
                | E::OddCyclicCycle(_),
            ) => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// What a command produced, ready to be written out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

struct Verdict {
    ok: bool,
    json: Value,
    text: String,
    certificate: Option<Certificate>,
    warnings: Vec<String>,
}

impl Verdict {
    fn positive(json: Value, text: String) -> Self {
        Verdict { ok: true, json, text, certificate: None, warnings: Vec::new() }
    }

    fn negative(json: Value, text: String, certificate: Certificate) -> Self {
        Verdict { ok: false, json, text, certificate: Some(certificate), warnings: Vec::new() }
    }
}

pub fn run(cli: &Cli) -> Output {
    match execute(cli) {
        Ok(v) => {
            let mut stdout = String::new();
            if cli.json {
                let mut json = v.json;
                if let (Some(c), Value::Object(map)) = (&v.certificate, &mut json) {
                    map.insert("certificate".into(), serde_json::to_value(c).expect("certificates serialize"));
                }
                stdout = serde_json::to_string_pretty(&json).expect("values serialize");
                stdout.push('\n');
            } else {
                stdout.push_str(&v.text);
                if !stdout.is_empty() && !stdout.ends_with('\n') {
                    stdout.push('\n');
                }
                if let Some(c) = &v.certificate {
                    let _ = writeln!(stdout, "certificate: {}", serde_json::to_string(c).expect("certificates serialize"));
                }
            }
            let stderr = v.warnings.iter().map(|w| format!("warning: {w}\n")).collect();
            Output { code: if v.ok { 0 } else { 1 }, stdout, stderr }
        }
        Err(e) => Output { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn load_digraph(path: &Path) -> CliResult<Digraph> {
    Ok(Digraph::parse(&read(path)?)?)
}

pub fn load_prefs(path: &Path) -> CliResult<PreferenceSystem> {
    Ok(PreferenceSystem::parse(&read(path)?)?)
}

/// A multigraph file, or the graph section of a preference file.
pub fn load_multigraph(path: &Path) -> CliResult<Multigraph> {
    let text = read(path)?;
    if has_record(&text, "p") {
        return Ok(PreferenceSystem::parse(&text)?.graph().clone());
    }
    Ok(Multigraph::parse(&text)?)
}

pub fn load_point(path: &Path) -> CliResult<FractionalPoint> {
    serde_json::from_str(&read(path)?).map_err(|source| CliError::Json { path: path.display().to_string(), source })
}

pub fn load_table(path: Option<&Path>) -> CliResult<InternalOrderTable> {
    match path {
        Some(p) => Ok(InternalOrderTable::parse(&read(p)?)?),
        None => Ok(InternalOrderTable::default_table()),
    }
}

fn has_record(text: &str, tag: &str) -> bool {
    text.lines().any(|l| l.split_whitespace().next() == Some(tag))
}

/// A linear system read directly from JSON, or σ of a digraph, or π of a
/// preference system.
pub fn load_system(path: &Path, budget: Budget) -> CliResult<LinearSystem> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        return Ok(LinearSystem::from_json(&text)?);
    }
    if has_record(&text, "p") {
        return Ok(build_pi(&PreferenceSystem::parse(&text)?));
    }
    if has_record(&text, "a") {
        return Ok(build_sigma(&Digraph::parse(&text)?, CliqueMode::All, budget)?);
    }
    Err(CliError::Usage(format!("`{}` is not a system, digraph or preference file", path.display())))
}

fn render_point(x: &FractionalPoint) -> String {
    x.values.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

fn render_vertices(vs: &VertexSet) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# ({})", vs.variables.join(", "));
    for t in vs.tuples() {
        let _ = writeln!(s, "{t}");
    }
    let _ = writeln!(s, "{} vertices", vs.len());
    s
}

fn to_json<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

fn execute(cli: &Cli) -> CliResult<Verdict> {
    let budget = Budget(cli.budget);
    match &cli.command {
        Command::Good { digraph } => {
            let d = load_digraph(digraph)?;
            let r = is_good(&d, budget)?;
            let json = json!({ "good": r.is_good(), "report": r });
            if r.is_good() {
                Ok(Verdict::positive(json, "good".into()))
            } else {
                let text = format!(
                    "not good ({:?})\nclique: {}\ncycle: {}",
                    r.verdict,
                    r.clique.as_deref().map(|c| c.join(" ")).unwrap_or_default(),
                    r.cycle.as_deref().map(|c| c.join(" ")).unwrap_or_default()
                );
                Ok(Verdict::negative(json, text, Certificate::NotGood { report: r }))
            }
        }
        Command::Kernel { digraph } => {
            let d = load_digraph(digraph)?;
            match enumerate_kernels(&d, budget)?.into_iter().next() {
                Some(k) => {
                    let text = k.iter().cloned().collect::<Vec<_>>().join(" ");
                    Ok(Verdict::positive(json!({ "kernel": k }), text))
                }
                None => Ok(Verdict::negative(json!({ "kernel": null }), "none".into(), Certificate::NoKernel)),
            }
        }
        Command::KernelPerfect { digraph } => {
            let d = load_digraph(digraph)?;
            let r = is_kernel_perfect(&d, budget)?;
            match r.witness.clone() {
                None => Ok(Verdict::positive(to_json(&r), "kernel-perfect".into())),
                Some(w) => {
                    let text = format!("not kernel-perfect\nkernel-free induced subdigraph: {}", w.iter().cloned().collect::<Vec<_>>().join(" "));
                    Ok(Verdict::negative(to_json(&r), text, Certificate::KernelFree { subset: w }))
                }
            }
        }
        Command::Linegraph { multigraph } => {
            let h = load_multigraph(multigraph)?;
            let l = build_line_multigraph(&h);
            let edges: Vec<Value> = l
                .edges()
                .iter()
                .map(|e| json!({ "id": e.id, "u": l.vertex_name(e.u), "v": l.vertex_name(e.v), "label": e.label }))
                .collect();
            Ok(Verdict::positive(json!({ "vertices": l.vertex_names(), "edges": edges }), l.to_text()))
        }
        Command::ToPrefs { root, digraph } => {
            let h = load_multigraph(root)?;
            let d = load_digraph(digraph)?;
            match prefs_from_orientation(&h, &d) {
                Ok(ps) => Ok(Verdict::positive(json!({ "prefs": ps.to_text() }), ps.to_text())),
                Err(kernelpoly::Error::NotCliqueAcyclic { vertex, cycle }) => {
                    let text = format!("not clique-acyclic at {vertex}: {}", cycle.join(" "));
                    let json = json!({ "prefs": null, "vertex": vertex, "cycle": cycle });
                    Ok(Verdict::negative(json, text, Certificate::CyclicTournament { vertex, cycle }))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::ToDigraph { prefs } => {
            let d = orientation_from_prefs(&load_prefs(prefs)?);
            Ok(Verdict::positive(json!({ "digraph": d.to_text() }), d.to_text()))
        }
        Command::Expand { prefs, table } => {
            let ps = load_prefs(prefs)?;
            let exp = expand(&ps, &load_table(table.as_deref())?)?;
            let text = exp.expanded.to_text();
            Ok(Verdict::positive(json!({ "expanded": text, "gadgets": exp.gadgets }), text))
        }
        Command::FkVertices { digraph } => {
            let sys = build_sigma(&load_digraph(digraph)?, CliqueMode::All, budget)?;
            let vs = enumerate_vertices(&sys, budget)?;
            Ok(Verdict::positive(to_json(&vs), render_vertices(&vs)))
        }
        Command::FsmVertices { prefs } => {
            let vs = enumerate_vertices(&build_pi(&load_prefs(prefs)?), budget)?;
            Ok(Verdict::positive(to_json(&vs), render_vertices(&vs)))
        }
        Command::Integral { input, k } => {
            let sys = load_system(input, budget)?;
            let r = check_integrality(&sys, *k, budget)?;
            let mut text = render_vertices(&r.vertices);
            match r.witness.clone() {
                None => {
                    let _ = write!(text, "every vertex is 1/{k}-integral");
                    Ok(Verdict::positive(to_json(&r), text))
                }
                Some(w) => {
                    let _ = write!(text, "not 1/{k}-integral: {}", w.tuple(&r.vertices.variables));
                    Ok(Verdict::negative(to_json(&r), text, Certificate::NonIntegral { k: *k, point: w }))
                }
            }
        }
        Command::Tdi { input, k, cbound } => {
            let sys = load_system(input, budget)?;
            let r = check_tdi(&sys, *k, *cbound, budget)?;
            let mut text = format!("{} objectives in [-{cbound}, {cbound}] checked\n", r.objectives_checked);
            match (r.verdict, r.failures.first()) {
                (TdiVerdict::Fail, Some(f)) => {
                    let obj: Vec<String> = f.objective.iter().map(|(v, c)| format!("{v}:{c}")).collect();
                    let _ = write!(
                        text,
                        "not TDI/{k}: objective {} has optimum {} but no 1/{k}-integral optimal dual\noptimal vertex: {}\ntight rows: {}",
                        obj.join(" "),
                        f.optimum,
                        render_point(&f.vertex),
                        f.tight_rows.join(" ")
                    );
                    let cert = Certificate::TdiFailure { k: *k, objective: f.objective.clone(), optimum: f.optimum.clone() };
                    Ok(Verdict::negative(to_json(&r), text, cert))
                }
                _ => {
                    let _ = write!(text, "no failing objective found (bounded check)");
                    Ok(Verdict::positive(to_json(&r), text))
                }
            }
        }
        Command::Fm { system, order } => {
            let text = read(system)?;
            let sys = LinearSystem::from_json(&text)?;
            let steps = fm_eliminate_all(&sys, order)?;
            let last = steps.last().map(|s| s.system.clone()).unwrap_or(sys);
            let warnings: Vec<String> = steps.iter().filter_map(|s| s.warning.clone()).collect();
            let mut out = String::new();
            let _ = writeln!(out, "# variables: {}", last.variables.join(" "));
            for row in &last.rows {
                let _ = writeln!(out, "{}: {}", row.label, row.render());
            }
            let _ = write!(out, "{} rows", last.rows.len());
            let mut v = Verdict::positive(json!({ "system": last, "warnings": warnings }), out);
            v.warnings = warnings;
            Ok(v)
        }
        Command::Lift { prefs, point, table } => {
            let ps = load_prefs(prefs)?;
            let x = load_point(point)?;
            if let Some(v) = outside_fsm(&ps, &x)? {
                return Ok(v);
            }
            let table = load_table(table.as_deref())?;
            let exp = expand(&ps, &table)?;
            let y = lift_point(&x, &exp)?;
            let check = fsm_check(&exp.expanded, &y)?;
            let identity = check.member && project_point(&y, &exp)? == x;
            let json = json!({ "point": y, "in_expanded_fsm": check.member, "projection_identity": identity });
            let text = format!("{}\nin expanded FSM: {}\nproject(lift(x)) = x: {}", render_point(&y), check.member, identity);
            if check.member {
                Ok(Verdict::positive(json, text))
            } else {
                let cert = Certificate::LiftLeavesFsm { point: x, table: table.to_text(), violated: check.violated };
                Ok(Verdict::negative(json, text, cert))
            }
        }
        Command::Round { prefs, point } => {
            let ps = load_prefs(prefs)?;
            let x = load_point(point)?;
            if let Some(v) = outside_fsm(&ps, &x)? {
                return Ok(v);
            }
            let r = perturb_and_round(&ps, &x, budget)?;
            let stable = is_stable_matching(&ps, &r.matching)?;
            let mut text = String::new();
            for (i, s) in r.steps.iter().enumerate() {
                let _ = writeln!(
                    text,
                    "step {}: direction {:+} epsilon {}{} -> {}",
                    i + 1,
                    s.direction,
                    s.epsilon,
                    if s.face_vertex { " (face vertex)" } else { "" },
                    render_point(&s.point)
                );
            }
            let _ = write!(text, "stable matching: {}", r.matching.iter().cloned().collect::<Vec<_>>().join(" "));
            let json = json!({ "rounding": r, "stable": stable.stable });
            Ok(Verdict::positive(json, text))
        }
        Command::Verify { root, cbound } => {
            let h = load_multigraph(root)?;
            let r = verify_main_theorem(&h, *cbound, budget)?;
            let mut text = r.summary_table();
            for v in &r.violations {
                let _ = writeln!(text, "violation {}: {}", v.encoding, v.reason);
            }
            if r.holds() {
                Ok(Verdict::positive(to_json(&r), text))
            } else {
                let cert = Certificate::TheoremViolations { c_bound: *cbound, violations: r.violations.clone() };
                Ok(Verdict::negative(to_json(&r), text, cert))
            }
        }
        Command::CheckCertificate { certificate, inputs } => {
            let cert = Certificate::from_output(&read(certificate)?)
                .map_err(|source| CliError::Json { path: certificate.display().to_string(), source })?;
            let valid = cert.check(inputs, budget)?;
            let json = json!({ "kind": cert.kind(), "valid": valid });
            let text = format!("{} certificate {}", cert.kind(), if valid { "valid" } else { "rejected" });
            Ok(Verdict { ok: valid, json, text, certificate: None, warnings: Vec::new() })
        }
    }
}

fn outside_fsm(ps: &PreferenceSystem, x: &FractionalPoint) -> CliResult<Option<Verdict>> {
    let r = fsm_check(ps, x)?;
    if r.member {
        return Ok(None);
    }
    let text = format!("point is not in FSM; violated: {}", r.violated.join(" "));
    let json = json!({ "in_fsm": false, "violated": r.violated });
    Ok(Some(Verdict::negative(json, text, Certificate::NotInFsm { point: x.clone(), violated: r.violated })))
}
