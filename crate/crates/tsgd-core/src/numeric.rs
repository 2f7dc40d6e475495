//! Dense vectors, a deterministic RNG, and a finite-difference gradient oracle.
//!
//! Everything here is 64-bit floating point and nothing clamps non-finite
//! values: NaN/inf propagate so that divergence stays observable upstream.

use crate::error::{Error, Result};

/// A fixed-length dense vector of `f64`.
///
/// Length is set at construction; binary operations require equal lengths.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    values: Vec<f64>,
}

impl Vector {
    pub fn new(values: Vec<f64>) -> Self {
        Vector { values }
    }

    pub fn zeros(len: usize) -> Self {
        Vector {
            values: vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    /// True iff every entry is finite.
    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Returns `self + s * other` without modifying either input.
    pub fn add_scaled(&self, other: &Vector, s: f64) -> Result<Vector> {
        if self.len() != other.len() {
            return Err(Error::Dimension {
                what: "add_scaled",
                expected: self.len(),
                got: other.len(),
            });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + s * b)
            .collect();
        Ok(Vector { values })
    }

    /// Squared Euclidean norm.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// In-place accumulate `self += s * other`. Lengths must already agree.
    pub(crate) fn axpy(&mut self, other: &Vector, s: f64) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
    }

    /// In-place scale `self *= s`.
    pub(crate) fn scale(&mut self, s: f64) {
        for a in &mut self.values {
            *a *= s;
        }
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

impl std::ops::IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.values[i]
    }
}

impl From<Vec<f64>> for Vector {
    fn from(values: Vec<f64>) -> Self {
        Vector { values }
    }
}

/// Deterministic pseudo-random generator (SplitMix64).
///
/// A counter-based generator: the same seed yields the same sequence on
/// every platform, which is what replayable experiments need. Statistical
/// quality is adequate for initialization and synthetic noise.
#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Gaussian draw via Box-Muller. Always consumes exactly two draws.
    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        // u1 in (0, 1] so the log never sees zero.
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.next_f64();
        let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        mean + sd * z
    }

    /// Derive an independent child generator from this one's stream.
    pub fn split(&mut self) -> Rng {
        Rng::new(self.next_u64())
    }
}

/// Central-difference gradient of `f` at `x` with step `h`.
///
/// Errors if any probe evaluation is non-finite, naming the coordinate.
pub fn finite_diff_grad<F>(f: F, x: &Vector, h: f64) -> Result<Vector>
where
    F: Fn(&Vector) -> f64,
{
    if h <= 0.0 {
        return Err(Error::Domain(format!("finite_diff_grad step h must be > 0, got {h}")));
    }
    let mut probe = x.clone();
    let mut grad = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        probe[j] = x[j] + h;
        let f_plus = f(&probe);
        probe[j] = x[j] - h;
        let f_minus = f(&probe);
        probe[j] = x[j];
        if !f_plus.is_finite() || !f_minus.is_finite() {
            return Err(Error::Numeric(format!(
                "finite_diff_grad probe at coordinate {j} evaluated to a non-finite value"
            )));
        }
        grad.push((f_plus - f_minus) / (2.0 * h));
    }
    Ok(Vector::new(grad))
}

/// Relative error with a unit floor, used by gradient checks.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}
