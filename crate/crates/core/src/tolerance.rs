//! Fixed numerical thresholds shared by every check.

/// Central finite-difference step for procedurally defined fields.
pub const FD_STEP: f64 = 1e-5;

/// Relative singular-value threshold for rank decisions.
pub const RANK_REL: f64 = 1e-8;
/// Absolute floor under which a singular value always counts as zero.
pub const RANK_ABS: f64 = 1e-12;
/// Singular values in `[AMBIGUOUS_LO, AMBIGUOUS_HI] * sigma_max` make a rank decision ambiguous.
pub const AMBIGUOUS_LO: f64 = 1e-10;
pub const AMBIGUOUS_HI: f64 = 1e-6;

/// Smallest metric eigenvalue accepted as positive definite.
pub const METRIC_MIN_EIGENVALUE: f64 = 1e-10;
pub const METRIC_SYMMETRY: f64 = 1e-12;

pub const COMPATIBILITY: f64 = 1e-10;
pub const PARALLEL: f64 = 1e-8;
pub const OMEGA_SKEW: f64 = 1e-12;
pub const FAMILY: f64 = 1e-8;

pub const FRAME_ORTHONORMALITY: f64 = 1e-10;
/// Projected ambient basis vectors shorter than this are skipped when building normal frames.
pub const NORMAL_SKIP: f64 = 1e-8;
pub const NORMALITY: f64 = 1e-8;
pub const H_SYMMETRY: f64 = 1e-8;
pub const GAUSS_SPLIT: f64 = 1e-8;
pub const DUALITY: f64 = 1e-6;
pub const TOTALLY_GEODESIC: f64 = 1e-6;

pub const SEMI_INVARIANT: f64 = 1e-6;
pub const PROJECTOR: f64 = 1e-10;
pub const PHI_OMEGA: f64 = 1e-10;
pub const PHI_ON_DPERP: f64 = 1e-8;
pub const PRINCIPAL_ANGLE: f64 = 1e-6;
pub const LAGRANGIAN: f64 = 1e-8;

/// Residuals at or below this count as "holds" for theorem conditions.
pub const HOLDS: f64 = 1e-5;
/// Residuals at or above this count as "fails"; in between is indeterminate.
pub const FAILS: f64 = 1e-3;
pub const NIJENHUIS_IDENTITY: f64 = 1e-6;
pub const H_PHI_IDENTITY: f64 = 1e-5;
pub const CHAIN_IDENTITY: f64 = 1e-5;
pub const WEINGARTEN_COMMUTATOR: f64 = 1e-5;
