//! Closed forms for symmetric qubit strategies in the fingerprinting game.
//!
//! With uniform weights and a common image `chi' = (e^{i phi} cos t, e^{i psi} sin t)`
//! the discrimination operator is block circulant with `2 x 2` blocks `A` on
//! the diagonal and `B` everywhere else, scaled by `1/(N(N+1))`.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::exact::{rat, Rational};

/// Diagonal block `A` (without the prefactor).
pub fn block_a(n: usize, theta: f64, phi: f64, psi: f64) -> Matrix2<Complex64> {
    let (s, c) = theta.sin_cos();
    let off = Complex64::from_polar(s * c, phi - psi);
    Matrix2::new(Complex64::from(c * c + n as f64 - 2.0), off, off.conj(), Complex64::from(s * s))
}

/// Off-diagonal block `B` (without the prefactor).
pub fn block_b(n: usize, theta: f64, phi: f64, psi: f64) -> Matrix2<Complex64> {
    let s = theta.sin();
    let top = 2.0 * theta.cos() * phi.cos() + n as f64 - 3.0;
    Matrix2::new(Complex64::from(top), Complex64::from_polar(s, -psi), Complex64::from_polar(s, psi), Complex64::from(0.0))
}

/// The full `2N x 2N` operator including the `1/(N(N+1))` prefactor.
pub fn symmetric_m(n: usize, theta: f64, phi: f64, psi: f64) -> DMatrix<Complex64> {
    let a = block_a(n, theta, phi, psi);
    let b = block_b(n, theta, phi, psi);
    let scale = 1.0 / (n as f64 * (n as f64 + 1.0));
    DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let block = if r / 2 == c / 2 { &a } else { &b };
        block[(r % 2, c % 2)] * scale
    })
}

fn lambda_pm(n: usize, theta: f64, phi: f64) -> (f64, f64) {
    let nf = n as f64;
    let cc = theta.cos() * phi.cos();
    let mid = (nf - 1.0) / 2.0 * (2.0 * cc + nf - 2.0);
    let root = 0.5 * ((nf - 1.0).powi(2) * (2.0 * cc + nf - 2.0).powi(2) + 4.0 * nf * theta.sin().powi(2)).sqrt();
    (mid + root, mid - root)
}

/// Eigenvalues of [`symmetric_m`] sorted ascending, prefactor included:
/// `0` and `2 - 2 cos t cos phi` with multiplicity `N-1` each, and `lambda_+-`.
pub fn block_circulant_eigenvalues(n: usize, theta: f64, phi: f64) -> Vec<f64> {
    let nf = n as f64;
    let scale = 1.0 / (nf * (nf + 1.0));
    let (plus, minus) = lambda_pm(n, theta, phi);
    let middle = 2.0 - 2.0 * theta.cos() * phi.cos();
    let mut out = Vec::with_capacity(2 * n);
    out.extend(std::iter::repeat_n(0.0, n - 1));
    out.extend(std::iter::repeat_n(middle * scale, n - 1));
    out.push(plus * scale);
    out.push(minus * scale);
    out.sort_by(f64::total_cmp);
    out
}

/// `||M_s||_1`; independent of the phase `psi`.
pub fn trace_norm_ms_closed_form(n: usize, theta: f64, phi: f64) -> f64 {
    let nf = n as f64;
    let cc = theta.cos() * phi.cos();
    let root = (4.0 * nf * theta.sin().powi(2) + (nf - 1.0).powi(2) * (2.0 * cc + nf - 2.0).powi(2)).sqrt();
    ((nf - 1.0) * (2.0 - 2.0 * cc) + root) / (nf * (nf + 1.0))
}

/// Maximizer of the closed-form trace norm; `phi = 0` in every case.
pub fn optimal_theta(n: usize) -> f64 {
    if n <= 3 {
        std::f64::consts::PI
    } else {
        let nf = n as f64;
        ((1.0 - nf) / (nf * nf - 3.0 * nf + 1.0)).acos()
    }
}

/// Best fingerprinting violation of symmetric strategies, as an exact rational.
///
/// Panics for `n < 2`.
pub fn theorem1_delta_exact(n: usize) -> Rational {
    assert!(n >= 2, "the fingerprinting game needs N >= 2");
    match n {
        2 => rat(1, 3),
        3 => rat(1, 6),
        _ => {
            let n = n as i64;
            rat(1, (n + 1) * (n * n - 3 * n + 1))
        }
    }
}

pub fn theorem1_delta(n: usize) -> f64 {
    crate::exact::to_f64(&theorem1_delta_exact(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn dense_eigs(n: usize, t: f64, p: f64, s: f64) -> Vec<f64> {
        let mut v: Vec<f64> = symmetric_m(n, t, p, s).symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn closed_forms_match_dense_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.random_range(2..=10);
            let (t, p, s) = (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
            let dense = dense_eigs(n, t, p, s);
            let closed = block_circulant_eigenvalues(n, t, p);
            for (a, b) in dense.iter().zip(&closed) {
                assert!((a - b).abs() < 1e-10, "{dense:?} vs {closed:?}");
            }
            let norm: f64 = dense.iter().map(|l| l.abs()).sum();
            assert!((norm - trace_norm_ms_closed_form(n, t, p)).abs() < 1e-10);
        }
    }

    #[test]
    fn lambda_pm_match_characteristic_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let n = rng.random_range(2..=10);
            let (t, p, s) = (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
            let sum = block_a(n, t, p, s) + block_b(n, t, p, s) * Complex64::from(n as f64 - 1.0);
            let (plus, minus) = lambda_pm(n, t, p);
            assert!((sum.trace().re - (plus + minus)).abs() < 1e-10);
            assert!((sum.determinant().re - plus * minus).abs() < 1e-9);
            assert!(minus <= 1e-12 && plus >= -1e-12);
        }
    }

    #[test]
    fn single_negative_eigenvalue_for_generic_theta() {
        let eig = block_circulant_eigenvalues(5, 1.3, 0.4);
        assert_eq!(eig.iter().filter(|l| **l < -1e-12).count(), 1);
    }

    #[test]
    fn trivial_and_optimal_values() {
        for n in 2..=8 {
            // theta = 0, phi = 0: chi' = chi and the trace norm is the prior gap.
            let nf = n as f64;
            assert!((trace_norm_ms_closed_form(n, 0.0, 0.0) - (nf - 1.0) / (nf + 1.0)).abs() < 1e-14);
            let best = 0.5 + 0.5 * trace_norm_ms_closed_form(n, optimal_theta(n), 0.0) - nf / (nf + 1.0);
            assert!((best - theorem1_delta(n)).abs() < 1e-12, "N={n}");
        }
        assert!((optimal_theta(4) - (-0.6f64).acos()).abs() < 1e-15);
        assert_eq!(theorem1_delta_exact(4), rat(1, 25));
    }

    #[test]
    fn optimal_theta_maximizes_grid() {
        for n in 5..=8 {
            let steps = 400;
            let mut best = f64::MIN;
            let mut best_theta = 0.0;
            for i in 0..=steps {
                let t = PI * i as f64 / steps as f64;
                for j in 0..=40 {
                    let v = trace_norm_ms_closed_form(n, t, PI * j as f64 / 40.0);
                    best = best.max(v);
                }
                if trace_norm_ms_closed_form(n, t, 0.0) >= best - 1e-14 {
                    best_theta = t;
                }
            }
            assert!(trace_norm_ms_closed_form(n, optimal_theta(n), 0.0) >= best - 1e-12);
            // Golden-section refinement in theta at phi = 0.
            let (mut lo, mut hi) = (best_theta - PI / steps as f64, best_theta + PI / steps as f64);
            let g = (5f64.sqrt() - 1.0) / 2.0;
            for _ in 0..200 {
                let a = hi - g * (hi - lo);
                let b = lo + g * (hi - lo);
                if trace_norm_ms_closed_form(n, a, 0.0) > trace_norm_ms_closed_form(n, b, 0.0) {
                    hi = b;
                } else {
                    lo = a;
                }
            }
            assert!((0.5 * (lo + hi) - optimal_theta(n)).abs() < 1e-6, "N={n}");
        }
    }
}
