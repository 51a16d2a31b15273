use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid order k = {k} for dimension {n} (need 1 <= k <= {n})")]
    InvalidOrder { k: usize, n: usize },

    #[error("tuple {tuple:?} is not a member of Q({k}, {n})")]
    NotAMember {
        tuple: Vec<usize>,
        k: usize,
        n: usize,
    },

    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: &'static str, detail: String },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is singular to working precision (pivot {pivot})")]
    SingularMatrix { pivot: usize },

    #[error(
        "generalized Schur iteration did not converge after {iterations} sweeps \
         (active block {lo}..={hi}, subdiagonal magnitude {subdiagonal:.3e})"
    )]
    ConvergenceFailure {
        iterations: usize,
        lo: usize,
        hi: usize,
        subdiagonal: f64,
    },

    #[error("singular pencil: diagonal pair {index} of the generalized Schur form is numerically (0, 0)")]
    SingularPencil { index: usize },

    #[error("ill-conditioned Drazin core: condition {condition:.3e} exceeds bound {bound:.3e} (index {index}, core rank {rank})")]
    IllConditionedCore {
        condition: f64,
        bound: f64,
        index: usize,
        rank: usize,
    },

    #[error("input pair {index} is not an eigenpair (residual {residual:.3e})")]
    NotAnEigenpair { index: usize, residual: f64 },

    #[error("system is not tractable: the pencil (A, B) is singular")]
    Untractable,

    #[error("inconsistent initial condition{}: orthogonal distance {distance:.6e} to the consistent subspace", column_label(.column))]
    Inconsistent {
        column: Option<usize>,
        distance: f64,
    },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
}

fn column_label(column: &Option<usize>) -> String {
    match column {
        Some(c) => format!(" in column {c}"),
        None => String::new(),
    }
}
