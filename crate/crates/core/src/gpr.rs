//! Gaussian-process regression with the dot-product kernel
//! `k(x, y) = x·y + sigma0²`, one shared Gram factorization for all targets.
//!
//! Features are fixed-point integer vectors so that kernels of summed
//! embeddings equal the explicit double sum over their parts bit for bit.

use std::cell::Cell;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

pub const FEATURE_FRAC_BITS: i32 = 40;
const ONE: f64 = (1u64 << FEATURE_FRAC_BITS) as f64;

pub const DEFAULT_SIGMA0: f64 = 0.0;
pub const DEFAULT_NOISE: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GprError {
    #[error("no training points")]
    Empty,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid hyperparameter {name}={value}")]
    InvalidHyperparameter { name: &'static str, value: f64 },
    #[error("gram matrix is not positive definite")]
    Factorization,
}

/// Fixed-point vector with `FEATURE_FRAC_BITS` fractional bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Feature(pub Vec<i64>);

impl Feature {
    pub fn zeros(d: usize) -> Self {
        Feature(vec![0; d])
    }

    pub fn from_f64(v: &[f64]) -> Self {
        Feature(v.iter().map(|x| (x * ONE).round() as i64).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&x| x as f64 / ONE).collect()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn add_assign(&mut self, other: &Feature) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    /// Exact elementwise sum; order of `parts` cannot matter.
    pub fn sum<'a, I: IntoIterator<Item = &'a Feature>>(d: usize, parts: I) -> Self {
        let mut out = Feature::zeros(d);
        for p in parts {
            out.add_assign(p);
        }
        out
    }

    /// Raw integer dot product at scale `2^(2*FEATURE_FRAC_BITS)`.
    pub fn dot_raw(&self, other: &Feature) -> i128 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum()
    }

    pub fn dot(&self, other: &Feature) -> f64 {
        raw_to_f64(self.dot_raw(other))
    }
}

/// Converts a [`Feature::dot_raw`] result to a real number.
pub fn raw_to_f64(raw: i128) -> f64 {
    raw as f64 / (ONE * ONE)
}

/// `x·y + sigma0²`.
pub fn kernel(x: &Feature, y: &Feature, sigma0: f64) -> f64 {
    x.dot(y) + sigma0 * sigma0
}

thread_local! {
    static FACTORIZATIONS: Cell<u64> = const { Cell::new(0) };
}

/// Gram factorizations performed on this thread so far.
pub fn factorization_count() -> u64 {
    FACTORIZATIONS.with(|c| c.get())
}

#[derive(Debug, Clone)]
pub struct GprModel {
    features: Vec<Feature>,
    sigma0: f64,
    noise: f64,
    n_targets: usize,
    /// `(K + noise·I)⁻¹ Y`, m×n.
    alpha: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl GprModel {
    pub fn fit(
        features: &[Feature],
        targets: &[Vec<f64>],
        sigma0: f64,
        noise: f64,
    ) -> Result<Self, GprError> {
        let m = features.len();
        if m == 0 {
            return Err(GprError::Empty);
        }
        if targets.len() != m {
            return Err(GprError::DimensionMismatch { expected: m, got: targets.len() });
        }
        if !(sigma0 >= 0.0 && sigma0.is_finite()) {
            return Err(GprError::InvalidHyperparameter { name: "sigma0", value: sigma0 });
        }
        if !(noise > 0.0 && noise.is_finite()) {
            return Err(GprError::InvalidHyperparameter { name: "noise", value: noise });
        }
        let d = features[0].dim();
        if let Some(f) = features.iter().find(|f| f.dim() != d) {
            return Err(GprError::DimensionMismatch { expected: d, got: f.dim() });
        }
        let n = targets[0].len();
        if let Some(t) = targets.iter().find(|t| t.len() != n) {
            return Err(GprError::DimensionMismatch { expected: n, got: t.len() });
        }

        let mut k = DMatrix::from_fn(m, m, |i, j| kernel(&features[i], &features[j], sigma0));
        for i in 0..m {
            k[(i, i)] += noise;
        }
        FACTORIZATIONS.with(|c| c.set(c.get() + 1));
        let chol = Cholesky::new(k).ok_or(GprError::Factorization)?;
        let y = DMatrix::from_fn(m, n, |i, j| targets[i][j]);
        let alpha = chol.solve(&y);
        Ok(Self {
            features: features.to_vec(),
            sigma0,
            noise,
            n_targets: n,
            alpha,
            chol,
        })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features[0].dim()
    }

    pub fn n_targets(&self) -> usize {
        self.n_targets
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    /// Lower Cholesky factor of `K + noise·I`.
    pub fn gram_factor(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    /// Posterior mean per target dimension, unclipped.
    pub fn predict_raw(&self, x: &Feature) -> Result<Vec<f64>, GprError> {
        if x.dim() != self.dim() {
            return Err(GprError::DimensionMismatch { expected: self.dim(), got: x.dim() });
        }
        let ks = DVector::from_iterator(
            self.len(),
            self.features.iter().map(|f| kernel(f, x, self.sigma0)),
        );
        Ok((self.alpha.transpose() * ks).iter().copied().collect())
    }

    /// Posterior mean clipped to `[0, 1]`.
    pub fn predict(&self, x: &Feature) -> Result<Vec<f64>, GprError> {
        Ok(self.predict_raw(x)?.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_closed_form() {
        let x = Feature::from_f64(&[1.0, 0.0]);
        let m = GprModel::fit(std::slice::from_ref(&x), &[vec![0.5]], 0.0, 1e-8).unwrap();
        let p = m.predict(&x).unwrap()[0];
        assert!((p - 0.5 / (1.0 + 1e-8)).abs() < 1e-12);
        assert!((p - 0.5).abs() < 1e-6);
    }

    #[test]
    fn duplicate_rows_fit() {
        let x = Feature::from_f64(&[0.6, 0.8]);
        let m = GprModel::fit(&[x.clone(), x.clone()], &[vec![0.3], vec![0.3]], 0.0, 1e-2).unwrap();
        assert!(m.predict(&x).unwrap()[0] > 0.29);
    }

    #[test]
    fn zero_feature_predicts_zero() {
        let xs = [Feature::from_f64(&[1.0, 0.0]), Feature::from_f64(&[0.0, 1.0])];
        let m = GprModel::fit(&xs, &[vec![0.9, 0.2], vec![0.4, 0.7]], 0.0, 1e-2).unwrap();
        assert_eq!(m.predict(&Feature::zeros(2)).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn predictions_are_clipped() {
        let x = Feature::from_f64(&[1.0]);
        let m = GprModel::fit(&[x], &[vec![1.0]], 0.0, 1e-6).unwrap();
        let far = Feature::from_f64(&[5.0]);
        assert!(m.predict_raw(&far).unwrap()[0] > 1.0);
        assert_eq!(m.predict(&far).unwrap(), vec![1.0]);
        assert_eq!(m.predict(&Feature::from_f64(&[-5.0])).unwrap(), vec![0.0]);
    }

    #[test]
    fn one_factorization_for_all_targets() {
        let xs = [Feature::from_f64(&[1.0, 0.5]), Feature::from_f64(&[0.2, 1.0])];
        let before = factorization_count();
        GprModel::fit(&xs, &[vec![0.1, 0.2, 0.3, 0.4], vec![0.5, 0.6, 0.7, 0.8]], 0.0, 1e-2).unwrap();
        assert_eq!(factorization_count() - before, 1);
    }

    #[test]
    fn errors() {
        let x = Feature::from_f64(&[1.0, 0.0]);
        assert_eq!(GprModel::fit(&[], &[], 0.0, 1e-2).unwrap_err(), GprError::Empty);
        assert!(matches!(
            GprModel::fit(std::slice::from_ref(&x), &[vec![0.5]], 0.0, 0.0),
            Err(GprError::InvalidHyperparameter { .. })
        ));
        let m = GprModel::fit(&[x], &[vec![0.5]], 0.0, 1e-2).unwrap();
        assert!(matches!(
            m.predict(&Feature::zeros(3)),
            Err(GprError::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn summed_kernel_equals_double_sum() {
        let parts_a: Vec<Feature> = [[0.6, 0.8], [0.0, 1.0], [-0.28, 0.96]]
            .iter()
            .map(|v| Feature::from_f64(v))
            .collect();
        let parts_b: Vec<Feature> = [[1.0, 0.0], [0.8, -0.6]].iter().map(|v| Feature::from_f64(v)).collect();
        let fa = Feature::sum(2, &parts_a);
        let fb = Feature::sum(2, &parts_b);
        let double: i128 = parts_a
            .iter()
            .flat_map(|p| parts_b.iter().map(move |q| p.dot_raw(q)))
            .sum();
        assert_eq!(fa.dot(&fb).to_bits(), raw_to_f64(double).to_bits());
        let rev = Feature::sum(2, parts_a.iter().rev());
        assert_eq!(rev, fa);
    }
}
