//! Small dense linear-algebra helpers over a (possibly non-Euclidean) inner product.

use nalgebra::{DMatrix, DVector};

use crate::tolerance::{RANK_ABS, RANK_REL};

/// Singular value decomposition with singular values sorted in descending order.
pub struct SortedSvd {
    pub u: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<f64>,
}

pub fn sorted_svd(a: &DMatrix<f64>) -> SortedSvd {
    let (rows, cols) = a.shape();
    let k = rows.min(cols);
    if k == 0 {
        return SortedSvd {
            u: DMatrix::zeros(rows, 0),
            singular_values: Vec::new(),
            v: DMatrix::zeros(cols, 0),
        };
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    SortedSvd {
        u: DMatrix::from_fn(rows, k, |r, c| u[(r, order[c])]),
        singular_values: order.iter().map(|&i| svd.singular_values[i]).collect(),
        v: DMatrix::from_fn(cols, k, |r, c| v_t[(order[c], r)]),
    }
}

/// Number of singular values above `max(RANK_REL * sigma_max, RANK_ABS)`.
pub fn numeric_rank(sorted_singular_values: &[f64]) -> usize {
    let Some(&max) = sorted_singular_values.first() else {
        return 0;
    };
    let cut = (RANK_REL * max).max(RANK_ABS);
    sorted_singular_values.iter().filter(|&&s| s > cut).count()
}

/// Largest singular value.
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    sorted_svd(a).singular_values[0]
}

pub fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Inner product `⟨a, b⟩ = aᵀ G b` with `G = L Lᵀ` cached.
#[derive(Debug, Clone)]
pub struct InnerProduct {
    gram: DMatrix<f64>,
    lower: DMatrix<f64>,
}

impl InnerProduct {
    /// Returns `None` unless `gram` is symmetric positive definite.
    pub fn new(gram: DMatrix<f64>) -> Option<Self> {
        let lower = gram.clone().cholesky()?.l();
        Some(Self { gram, lower })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self {
            gram: DMatrix::identity(dim, dim),
            lower: DMatrix::identity(dim, dim),
        }
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn dot(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        (a.transpose() * &self.gram * b)[(0, 0)]
    }

    pub fn norm(&self, v: &DVector<f64>) -> f64 {
        self.dot(v, v).max(0.0).sqrt()
    }

    /// Coordinates in which this inner product becomes Euclidean: `Lᵀ v`.
    pub fn whiten(&self, vectors: &DMatrix<f64>) -> DMatrix<f64> {
        self.lower.transpose() * vectors
    }

    fn unwhiten(&self, vectors: &DMatrix<f64>) -> DMatrix<f64> {
        let lt = self.lower.transpose();
        lt.solve_upper_triangular(vectors)
            .expect("Cholesky factor is nonsingular")
    }

    /// Orthonormal basis (as columns) for the span of `vectors`, with
    /// numerically dependent directions dropped.
    pub fn orthonormal_span(&self, vectors: &DMatrix<f64>) -> DMatrix<f64> {
        if vectors.ncols() == 0 {
            return DMatrix::zeros(self.dim(), 0);
        }
        let svd = sorted_svd(&self.whiten(vectors));
        let rank = numeric_rank(&svd.singular_values);
        self.unwhiten(&svd.u.columns(0, rank).into_owned())
    }

    /// Orthogonal projection onto the span of the orthonormal columns of `basis`.
    pub fn project(&self, basis: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
        if basis.ncols() == 0 {
            return DVector::zeros(v.len());
        }
        basis * (basis.transpose() * &self.gram * v)
    }

    /// Coordinates of `v` against the orthonormal columns of `basis`.
    pub fn coordinates(&self, basis: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
        basis.transpose() * &self.gram * v
    }

    /// Orthonormal basis of the complement of `sub` inside `space` (both orthonormal columns).
    pub fn complement_within(&self, space: &DMatrix<f64>, sub: &DMatrix<f64>) -> DMatrix<f64> {
        let w = space.ncols();
        if w == 0 {
            return DMatrix::zeros(self.dim(), 0);
        }
        let coords = space.transpose() * &self.gram * sub;
        let projector = DMatrix::identity(w, w) - &coords * coords.transpose();
        let svd = sorted_svd(&projector);
        let keep = svd.singular_values.iter().filter(|&&s| s > 0.5).count();
        space * svd.u.columns(0, keep)
    }

    /// Max over pairs of `|⟨a_i, b_j⟩ - δ_ij|`: deviation of `basis` from orthonormality.
    pub fn orthonormality_defect(&self, basis: &DMatrix<f64>) -> f64 {
        let k = basis.ncols();
        let gram = basis.transpose() * &self.gram * basis;
        (gram - DMatrix::identity(k, k)).abs().max()
    }

    /// Largest principal angle (radians) between the spans of two orthonormal bases.
    ///
    /// Subspaces of different dimension are a right angle apart; two zero
    /// subspaces coincide.
    pub fn max_principal_angle(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        if a.ncols() != b.ncols() {
            return std::f64::consts::FRAC_PI_2;
        }
        if a.ncols() == 0 {
            return 0.0;
        }
        let residual = a - b * (b.transpose() * &self.gram * a);
        let sine = spectral_norm(&self.whiten(&residual)).min(1.0);
        sine.asin()
    }
}

/// Columns of `m` gathered into a matrix.
pub fn columns_to_matrix(rows: usize, columns: &[DVector<f64>]) -> DMatrix<f64> {
    if columns.is_empty() {
        return DMatrix::zeros(rows, 0);
    }
    DMatrix::from_columns(columns)
}
