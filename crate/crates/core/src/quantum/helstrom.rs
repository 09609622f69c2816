//! Two-state discrimination and the behaviors of Helstrom-optimal measurements.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::behavior::FloatBehavior;
use crate::error::{Error, Result};
use crate::games::OracleGame;

use super::strategy::{encoded_pure_state, QuantumStrategy};

/// Slack used when validating density matrices.
pub const DENSITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminationInstance {
    pub q0: f64,
    pub q1: f64,
    pub sigma0: DMatrix<Complex64>,
    pub sigma1: DMatrix<Complex64>,
}

impl DiscriminationInstance {
    pub fn new(q0: f64, q1: f64, sigma0: DMatrix<Complex64>, sigma1: DMatrix<Complex64>) -> Result<Self> {
        if q0 < 0.0 || q1 < 0.0 || (q0 + q1 - 1.0).abs() > DENSITY_TOL {
            return Err(Error::invalid(format!("priors ({q0}, {q1}) are not a distribution")));
        }
        if !sigma0.is_square() || sigma0.shape() != sigma1.shape() {
            return Err(Error::invalid("states must be square matrices of equal size"));
        }
        for sigma in [&sigma0, &sigma1] {
            check_hermitian(sigma)?;
            let trace = sigma.trace();
            if (trace.re - 1.0).abs() > DENSITY_TOL || trace.im.abs() > DENSITY_TOL {
                return Err(Error::invalid(format!("state has trace {trace}")));
            }
            let min = sigma.clone().symmetric_eigenvalues().min();
            if min < -DENSITY_TOL {
                return Err(Error::invalid(format!("state has eigenvalue {min}")));
            }
        }
        Ok(Self { q0, q1, sigma0, sigma1 })
    }

    /// `M = q1 sigma1 - q0 sigma0`.
    pub fn operator(&self) -> DMatrix<Complex64> {
        &self.sigma1 * Complex64::from(self.q1) - &self.sigma0 * Complex64::from(self.q0)
    }
}

fn check_hermitian(m: &DMatrix<Complex64>) -> Result<()> {
    let defect = (m - m.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
    if defect > DENSITY_TOL {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

fn projector(v: &DVector<Complex64>) -> DMatrix<Complex64> {
    v * v.adjoint()
}

/// `sigma_a = (1/q_a) sum_{v(x)=a} q_x |psi_x><psi_x|`.
pub fn build_discrimination(s: &QuantumStrategy, g: &OracleGame<f64>) -> Result<DiscriminationInstance> {
    if g.n_inputs != s.n_inputs() {
        return Err(Error::invalid("strategy and game disagree on N"));
    }
    let dim = s.n_inputs() * s.internal_dim();
    let mut sigma = [DMatrix::zeros(dim, dim), DMatrix::zeros(dim, dim)];
    let mut q = [0.0; 2];
    for (x, &w) in g.weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let a = usize::from(g.target.eval(x));
        q[a] += w;
        sigma[a] += projector(&encoded_pure_state(s, x)) * Complex64::from(w);
    }
    for (a, qa) in q.iter().enumerate() {
        if *qa <= 0.0 {
            return Err(Error::EmptyOutcome(a as u8));
        }
    }
    let [s0, s1] = sigma;
    let total = q[0] + q[1];
    DiscriminationInstance::new(q[0] / total, q[1] / total, s0 / Complex64::from(q[0]), s1 / Complex64::from(q[1]))
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &DMatrix<Complex64>) -> Result<f64> {
    check_hermitian(m)?;
    Ok(m.clone().symmetric_eigenvalues().iter().map(|l| l.abs()).sum())
}

/// `1/2 + ||q1 sigma1 - q0 sigma0||_1 / 2`.
pub fn helstrom_value(inst: &DiscriminationInstance) -> Result<f64> {
    Ok(0.5 + 0.5 * trace_norm(&inst.operator())?)
}

/// `P(a|x) = <psi_x| Pi_a |psi_x>` for the Helstrom measurement, whose outcome-1
/// projector spans the eigenvectors of `M` with nonnegative eigenvalue.
///
/// Eigenvalues within `1e-12` of zero count as nonnegative. That choice only
/// matters where `M` is singular on the support of some `psi_x`.
pub fn strategy_behavior(s: &QuantumStrategy, g: &OracleGame<f64>) -> Result<FloatBehavior> {
    let inst = build_discrimination(s, g)?;
    let eig = inst.operator().symmetric_eigen();
    let keep: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&k| eig.eigenvalues[k] >= -1e-12).collect();
    let n = s.n_inputs();
    let table = (0..1usize << n)
        .map(|x| {
            let psi = encoded_pure_state(s, x);
            let p: f64 = keep.iter().map(|&k| eig.eigenvectors.column(k).dotc(&psi).norm_sqr()).sum();
            p.clamp(0.0, 1.0)
        })
        .collect();
    FloatBehavior::new(n, table)
}

/// Fingerprinting operator `M = (sum_i |psi_{e_i}><psi_{e_i}| - |psi><psi|)/(N+1)`
/// built without touching the other `2^N - N - 1` inputs.
pub fn fingerprinting_operator(s: &QuantumStrategy) -> DMatrix<Complex64> {
    let n = s.n_inputs();
    let mut m = -projector(&encoded_pure_state(s, 0));
    for i in 0..n {
        m += projector(&encoded_pure_state(s, 1 << i));
    }
    m / Complex64::from(n as f64 + 1.0)
}

/// Winning probability of the Helstrom-optimal measurement in the fingerprinting game.
pub fn fingerprinting_value(s: &QuantumStrategy) -> f64 {
    let m = fingerprinting_operator(s);
    0.5 + 0.5 * m.symmetric_eigenvalues().iter().map(|l| l.abs()).sum::<f64>()
}

/// `fingerprinting_value - N/(N+1)`.
pub fn fingerprinting_violation(s: &QuantumStrategy) -> f64 {
    let n = s.n_inputs() as f64;
    fingerprinting_value(s) - n / (n + 1.0)
}
