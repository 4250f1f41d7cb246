//! Second-order forward-mode jets.
//!
//! A [`Jet2`] carries a value, its gradient with respect to `k` active
//! directions and (optionally) the symmetric Hessian, stored as a packed
//! upper triangle. Arithmetic propagates all three exactly, so derivatives
//! carry no truncation error.

use std::fmt;

/// Highest derivative order a jet tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetOrder {
    First,
    Second,
}

#[derive(Clone, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub gradient: Vec<f64>,
    /// Packed upper triangle, row-major; empty for first-order jets.
    hessian: Vec<f64>,
}

#[inline]
fn packed_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * (i + 1) / 2 + j
}

impl Jet2 {
    pub fn constant(value: f64, dim: usize, order: JetOrder) -> Self {
        let hessian = match order {
            JetOrder::First => Vec::new(),
            JetOrder::Second => vec![0.0; dim * (dim + 1) / 2],
        };
        Self {
            value,
            gradient: vec![0.0; dim],
            hessian,
        }
    }

    /// The coordinate function along direction `index`, seeded with unit gradient.
    pub fn variable(value: f64, index: usize, dim: usize, order: JetOrder) -> Self {
        let mut jet = Self::constant(value, dim, order);
        jet.gradient[index] = 1.0;
        jet
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn order(&self) -> JetOrder {
        if self.hessian.is_empty() && !self.gradient.is_empty() {
            JetOrder::First
        } else {
            JetOrder::Second
        }
    }

    fn has_hessian(&self) -> bool {
        !self.hessian.is_empty()
    }

    /// Hessian entry `∂²/∂i∂j`; zero for first-order jets.
    pub fn hessian(&self, i: usize, j: usize) -> f64 {
        if self.has_hessian() {
            self.hessian[packed_index(self.dim(), i, j)]
        } else {
            0.0
        }
    }

    /// Dense symmetric Hessian.
    pub fn hessian_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.hessian(i, j)).collect())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.gradient.iter().all(|g| g.is_finite())
            && self.hessian.iter().all(|h| h.is_finite())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            value: self.value + other.value,
            gradient: zip_with(&self.gradient, &other.gradient, |a, b| a + b),
            hessian: zip_with(&self.hessian, &other.hessian, |a, b| a + b),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            value: self.value - other.value,
            gradient: zip_with(&self.gradient, &other.gradient, |a, b| a - b),
            hessian: zip_with(&self.hessian, &other.hessian, |a, b| a - b),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            value: -self.value,
            gradient: self.gradient.iter().map(|g| -g).collect(),
            hessian: self.hessian.iter().map(|h| -h).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            value: c * self.value,
            gradient: self.gradient.iter().map(|g| c * g).collect(),
            hessian: self.hessian.iter().map(|h| c * h).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (self.value, other.value);
        let gradient = zip_with(&self.gradient, &other.gradient, |ga, gb| a * gb + b * ga);
        let hessian = if self.has_hessian() && other.has_hessian() {
            let n = self.dim();
            let mut h = Vec::with_capacity(self.hessian.len());
            for i in 0..n {
                for j in i..n {
                    let k = packed_index(n, i, j);
                    h.push(
                        a * other.hessian[k]
                            + b * self.hessian[k]
                            + self.gradient[i] * other.gradient[j]
                            + self.gradient[j] * other.gradient[i],
                    );
                }
            }
            h
        } else {
            Vec::new()
        };
        Self {
            value: a * b,
            gradient,
            hessian,
        }
    }

    /// Composition with a scalar function given its value and first two
    /// derivatives at `self.value`.
    pub fn chain(&self, f: f64, df: f64, d2f: f64) -> Self {
        let gradient: Vec<f64> = self.gradient.iter().map(|g| df * g).collect();
        let hessian = if self.has_hessian() {
            let n = self.dim();
            let mut h = Vec::with_capacity(self.hessian.len());
            for i in 0..n {
                for j in i..n {
                    let k = packed_index(n, i, j);
                    h.push(df * self.hessian[k] + d2f * self.gradient[i] * self.gradient[j]);
                }
            }
            h
        } else {
            Vec::new()
        };
        Self {
            value: f,
            gradient,
            hessian,
        }
    }

    pub fn recip(&self) -> Self {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.recip())
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, exponent: i64) -> Self {
        let mut result = Self::constant(1.0, self.dim(), self.order_hint());
        let mut base = self.clone();
        let mut e = exponent.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        if exponent < 0 {
            result.recip()
        } else {
            result
        }
    }

    fn order_hint(&self) -> JetOrder {
        if self.has_hessian() || self.dim() == 0 {
            JetOrder::Second
        } else {
            JetOrder::First
        }
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Self {
        let v = self.value;
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    pub fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * s * s))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn tan(&self) -> Self {
        let t = self.value.tan();
        let sec2 = 1.0 + t * t;
        self.chain(t, sec2, 2.0 * t * sec2)
    }

    pub fn sinh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(s, c, s)
    }

    pub fn cosh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(c, s, c)
    }
}

fn zip_with(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect()
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet2")
            .field("value", &self.value)
            .field("gradient", &self.gradient)
            .field("hessian", &self.hessian_matrix())
            .finish()
    }
}
