use thiserror::Error;

use crate::expr::EvalError;

/// Failures of pointwise geometric evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("metric is not symmetric at {point:?}: g[{i}][{j}] - g[{j}][{i}] = {difference:e}")]
    AsymmetricMetric {
        point: Vec<f64>,
        i: usize,
        j: usize,
        difference: f64,
    },
    #[error("metric is not positive definite at {point:?} (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { point: Vec<f64>, min_eigenvalue: f64 },
    #[error("embedding Jacobian is rank deficient at {point:?}; singular values {singular_values:?}")]
    RankDeficient {
        point: Vec<f64>,
        singular_values: Vec<f64>,
    },
    #[error("normal frame pivot e{pivot} degenerates at {point:?}")]
    NormalPivotLost { point: Vec<f64>, pivot: usize },
    #[error("rank decision is ambiguous at {point:?}; decision spectrum {singular_values:?}")]
    RankAmbiguous {
        point: Vec<f64>,
        singular_values: Vec<f64>,
    },
    #[error("vector field is not normal at {point:?} (tangential residual {residual:e})")]
    NotNormal { point: Vec<f64>, residual: f64 },
    #[error("frame field loses rank at {point:?} (sigma_min/sigma_max = {ratio:e})")]
    FrameRankDrop { point: Vec<f64>, ratio: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}
