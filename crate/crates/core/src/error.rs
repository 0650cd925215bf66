use thiserror::Error;

/// Errors raised across the toolkit.
///
/// Variants carry enough context to print a useful diagnostic; certificates
/// for negative verdicts live in the report types, not here.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("loop on vertex `{0}` is not allowed")]
    Loop(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("`{vertex}` is not an endpoint of edge `{edge}`")]
    NotAnEndpoint { edge: String, vertex: String },
    #[error("instance too large: {what} needs {needed}, budget is {budget}")]
    InstanceTooLarge { what: String, needed: u128, budget: u64 },
    #[error("invalid preference order at `{vertex}`: {message}")]
    InvalidOrder { vertex: String, message: String },
    #[error("tournament at `{vertex}` is not acyclic: {}", cycle.join(" "))]
    NotCliqueAcyclic { vertex: String, cycle: Vec<String> },
    #[error("arc `{0}` joins edges with two common ends but carries no provenance")]
    AmbiguousAttribution(String),
    #[error("no arc attributed to `{vertex}` between `{}` and `{}`", pair.0, pair.1)]
    IncompleteTournament { vertex: String, pair: (String, String) },
    #[error("arc `{arc}` does not join two edges sharing `{vertex}`")]
    BadArc { arc: String, vertex: String },
    #[error("system is infeasible")]
    Infeasible,
    #[error("system is unbounded")]
    Unbounded,
    #[error("point is not in the fractional stable matching polytope: {}", violated.join(", "))]
    NotInFsm { violated: Vec<String> },
    #[error("gadget `{0}`: hanging edge values differ")]
    ProjectionMismatch(String),
    #[error("invalid internal order table: {0}")]
    InvalidTable(String),
    #[error("no internal order table passed validation")]
    NoValidTable,
    #[error("point is not 1/2-integral")]
    NotHalfIntegral,
    #[error("half-integral support is not a union of cyclic-preference cycles: {0}")]
    StructureViolation(String),
    #[error("cycle of odd length {0}")]
    OddCycle(usize),
    #[error("cycle labeling does not follow its preferences: {0}")]
    InconsistentLabeling(String),
    #[error("odd cycle with cyclic preferences: {}", .0.join(" "))]
    OddCyclicCycle(Vec<String>),
    #[error("perturbation is blocked in both directions")]
    Degenerate,
    #[error("coefficient matrix must be integral for {0}")]
    NonIntegral(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Global cap on enumeration sizes (subsets, cycles, bases, search nodes).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(10_000_000)
    }
}

impl Budget {
    pub fn check(&self, what: &str, needed: u128) -> Result<()> {
        if needed > self.0 as u128 {
            Err(Error::InstanceTooLarge {
                what: what.to_string(),
                needed,
                budget: self.0,
            })
        } else {
            Ok(())
        }
    }
}
