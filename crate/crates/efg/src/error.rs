use thiserror::Error;

/// Errors raised while reading or constructing a game.
#[derive(Debug, Error)]
pub enum GameError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown node id `{0}`")]
    UnknownNode(String),
    #[error("unknown infoset id `{0}`")]
    UnknownInfoset(String),
    #[error("node `{node}`: {reason}")]
    BadNode { node: String, reason: String },
    #[error("infoset `{infoset}`: {reason}")]
    BadInfoset { infoset: String, reason: String },
    #[error("nodes do not form a rooted tree: {0}")]
    NotATree(String),
    #[error("chance probabilities at `{node}` sum to {sum}, not 1")]
    ChanceSum { node: String, sum: f64 },
    #[error("perfect recall violated at infoset `{0}` (run validation for details)")]
    PerfectRecall(String),
    #[error("invalid probability `{0}`")]
    BadProbability(String),
}

/// Errors raised by the solvers and verifiers.
#[derive(Debug, Error)]
pub enum SolveError {
    #[error("maximum iteration count {max_iters} exceeded at t = {t}")]
    MaxIterations { max_iters: usize, t: f64 },
    #[error("predictor step underflow (step {step:.3e}) at t = {t}")]
    StepUnderflow { step: f64, t: f64 },
    #[error("time limit exceeded at t = {t} after {iterations} iterations")]
    Timeout { t: f64, iterations: usize },
    #[error("singular system while computing the path tangent at t = {t}")]
    SingularTangent { t: f64 },
    #[error("pure-strategy enumeration cap exceeded: player {player} has {count} pure strategies (cap {cap})")]
    EnumerationCap { player: usize, count: u128, cap: u128 },
    #[error("profile does not match the game: {0}")]
    DimensionMismatch(String),
}
