//! Canonical single-particle strategies and the states they prepare.
//!
//! A strategy is a product input state `sum_i sqrt(p_i) |i>|chi>` together with,
//! for every site, the image `chi_i = U_i chi` of the internal reference state
//! under the site's input-1 unitary. The input-0 unitary is the identity and
//! `chi` is pinned to the first computational basis vector, so the images carry
//! everything the winning probability depends on.

use nalgebra::DVector;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Normalization slack for weights and encoded states.
pub const STRATEGY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStrategy {
    n_inputs: usize,
    internal_dim: usize,
    weights: Vec<f64>,
    encoded_states: Vec<Vec<Complex64>>,
}

impl QuantumStrategy {
    pub fn new(n_inputs: usize, internal_dim: usize, weights: Vec<f64>, encoded_states: Vec<Vec<Complex64>>) -> Result<Self> {
        if n_inputs == 0 || internal_dim == 0 {
            return Err(Error::invalid("strategies need N >= 1 and d >= 1"));
        }
        if weights.len() != n_inputs || encoded_states.len() != n_inputs {
            return Err(Error::invalid(format!("expected {n_inputs} weights and {n_inputs} encoded states")));
        }
        if weights.iter().any(|&p| p.is_nan() || p < 0.0) {
            return Err(Error::invalid("weights must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > STRATEGY_TOL {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        for (i, state) in encoded_states.iter().enumerate() {
            if state.len() != internal_dim {
                return Err(Error::invalid(format!("encoded state {} has dimension {}, expected {internal_dim}", i + 1, state.len())));
            }
            let norm: f64 = state.iter().map(|c| c.norm_sqr()).sum();
            if (norm - 1.0).abs() > STRATEGY_TOL {
                return Err(Error::invalid(format!("encoded state {} has squared norm {norm}", i + 1)));
            }
        }
        Ok(Self { n_inputs, internal_dim, weights, encoded_states })
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_parts_unchecked(n_inputs: usize, internal_dim: usize, weights: Vec<f64>, encoded_states: Vec<Vec<Complex64>>) -> Self {
        Self { n_inputs, internal_dim, weights, encoded_states }
    }

    /// Uniform weights and the same image at every site.
    pub fn symmetric(n_inputs: usize, image: Vec<Complex64>) -> Result<Self> {
        let d = image.len();
        Self::new(n_inputs, d, vec![1.0 / n_inputs as f64; n_inputs], vec![image; n_inputs])
    }

    /// Every site maps `chi` to itself: the inputs leave no trace.
    pub fn trivial(n_inputs: usize, internal_dim: usize) -> Result<Self> {
        Self::symmetric(n_inputs, reference_state(internal_dim))
    }

    /// The two-dimensional symmetric family `chi' = (e^{i phi} cos t, e^{i psi} sin t)`.
    pub fn symmetric_qubit(n_inputs: usize, theta: f64, phi: f64, psi: f64) -> Result<Self> {
        // A negative radius in from_polar still yields the intended entry.
        let image = vec![Complex64::from_polar(theta.cos(), phi), Complex64::from_polar(theta.sin(), psi)];
        Self::symmetric(n_inputs, image)
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn internal_dim(&self) -> usize {
        self.internal_dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn encoded_states(&self) -> &[Vec<Complex64>] {
        &self.encoded_states
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n_inputs": self.n_inputs,
            "internal_dim": self.internal_dim,
            "weights": self.weights,
            "encoded_states": self
                .encoded_states
                .iter()
                .map(|s| s.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        #[derive(serde::Deserialize)]
        struct Raw {
            n_inputs: usize,
            internal_dim: usize,
            weights: Vec<f64>,
            encoded_states: Vec<Vec<[f64; 2]>>,
        }
        let raw: Raw = serde_json::from_str(s)?;
        let states = raw
            .encoded_states
            .into_iter()
            .map(|s| s.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .collect();
        Self::new(raw.n_inputs, raw.internal_dim, raw.weights, states)
    }
}

/// `chi`, the first computational basis vector of the internal space.
pub fn reference_state(internal_dim: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); internal_dim];
    v[0] = Complex64::new(1.0, 0.0);
    v
}

/// `psi_x = sum_i sqrt(p_i) |i> |chi_i^{(x_i)}>`, site-major with `d` entries per site.
pub fn encoded_pure_state(s: &QuantumStrategy, x: usize) -> DVector<Complex64> {
    let d = s.internal_dim;
    let mut out = DVector::zeros(s.n_inputs * d);
    for i in 0..s.n_inputs {
        let amp = s.weights[i].sqrt();
        if (x >> i) & 1 == 1 {
            for (k, c) in s.encoded_states[i].iter().enumerate() {
                out[i * d + k] = c * amp;
            }
        } else {
            out[i * d] = Complex64::new(amp, 0.0);
        }
    }
    out
}
