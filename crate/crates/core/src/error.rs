use thiserror::Error;

/// A violated instance invariant, naming the offending identifier.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("identifier `{0}` is declared more than once")]
    DuplicateIdentifier(String),
    #[error("`{owner}` refers to undeclared identifier `{item}`")]
    UnknownIdentifier { owner: String, item: String },
    #[error("edge ({agent}, {program}) is not listed by both sides")]
    NonMutualEdge { agent: String, program: String },
    #[error("`{owner}` lists `{item}` more than once")]
    DuplicateInList { owner: String, item: String },
    #[error("agent `{0}` has an empty preference list")]
    EmptyAgentList(String),
    #[error("program `{program}` has negative cost {cost}")]
    NegativeCost { program: String, cost: i64 },
    #[error("program `{program}` has non-positive quota {quota}")]
    ZeroQuota { program: String, quota: i64 },
    #[error("expected {expected} {what}, got {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("matching covers {found} agents but the instance has {expected}")]
    WrongAgentCount { expected: usize, found: usize },
    #[error("pair ({agent}, {program}) is not an acceptable edge")]
    NotAcceptable { agent: String, program: String },
    #[error("program `{program}` holds {size} agents but its quota is {quota}")]
    QuotaViolated {
        program: String,
        size: usize,
        quota: u32,
    },
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("unknown program `{0}`")]
    UnknownProgram(String),
    #[error("agent `{0}` is assigned more than once")]
    DuplicateAgent(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("search space of {required} candidates exceeds the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
    #[error("round-1 matching is not stable: {0}")]
    NotStable(String),
    #[error("invalid matching: {0}")]
    Matching(#[from] MatchingError),
    #[error("invalid instance: {0}")]
    Validation(#[from] ValidationError),
    #[error("internal invariant violated: {0}")]
    InvariantViolated(String),
}
