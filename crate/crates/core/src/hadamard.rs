//! Walsh–Hadamard spectra of behavior projections.
//!
//! Sylvester ordering: coefficient `j` multiplies `(-1)^{popcount(j & k)}`,
//! so bit `i` of the mask `j` refers to input `x_{i+1}`.

use std::ops::{Add, Sub};

use crate::behavior::Behavior;
use crate::scalar::Scalar;

/// In-place unnormalized fast Walsh–Hadamard transform, `O(n log n)`.
pub fn fwht_in_place<T>(values: &mut [T])
where
    T: Clone + Add<Output = T> + Sub<Output = T>,
{
    let n = values.len();
    assert!(n.is_power_of_two(), "length must be a power of two");
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let a = values[i].clone();
                let b = values[i + h].clone();
                values[i] = a.clone() + b.clone();
                values[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub n_inputs: usize,
    pub coefficients: Vec<f64>,
}

impl Spectrum {
    /// Applies the normalized transform again; the matrix is an involution.
    pub fn inverse(&self) -> Vec<f64> {
        normalized_transform(&self.coefficients)
    }

    /// Largest weight of a mask whose coefficient exceeds `tol` in magnitude.
    pub fn degree(&self, tol: f64) -> usize {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() > tol)
            .map(|(j, _)| j.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }
}

/// `y = H P'` with `H_{i,j} = 2^{-N/2} (-1)^{popcount(i & j)}`.
pub fn hadamard_spectrum<T: Scalar>(b: &Behavior<T>) -> Spectrum {
    let p1: Vec<f64> = b.p1_table().iter().map(Scalar::to_f64_lossy).collect();
    Spectrum { n_inputs: b.n_inputs(), coefficients: normalized_transform(&p1) }
}

pub fn normalized_transform(values: &[f64]) -> Vec<f64> {
    let mut out = values.to_vec();
    fwht_in_place(&mut out);
    let scale = (values.len() as f64).sqrt().recip();
    for v in &mut out {
        *v *= scale;
    }
    out
}

/// Unnormalized transform `sum_k (-1)^{popcount(j & k)} P(1|k)` in the behavior's own
/// arithmetic; vanishing pattern matches the normalized spectrum exactly.
pub fn unnormalized_spectrum<T: Scalar>(b: &Behavior<T>) -> Vec<T> {
    let mut out = b.p1_table().to_vec();
    fwht_in_place(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::FloatBehavior;

    /// Dense matrix-vector product, straight from the definition.
    fn dense_hadamard(values: &[f64]) -> Vec<f64> {
        let n = values.len();
        let scale = (n as f64).sqrt().recip();
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        let sign = if (j & k).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                        sign * values[k]
                    })
                    .sum::<f64>()
                    * scale
            })
            .collect()
    }

    #[test]
    fn constant_behavior_has_only_the_empty_mask() {
        let c = 0.3;
        let s = hadamard_spectrum(&FloatBehavior::constant(2, c).unwrap());
        assert!((s.coefficients[0] - 2.0 * c).abs() < 1e-15);
        assert!(s.coefficients[1..].iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn xor_spectrum() {
        let b = FloatBehavior::new(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let s = hadamard_spectrum(&b);
        let expected = dense_hadamard(b.p1_table());
        assert_eq!(expected, vec![1.0, 0.0, 0.0, -1.0]);
        for (a, e) in s.coefficients.iter().zip(&expected) {
            assert!((a - e).abs() < 1e-15);
        }
    }

    #[test]
    fn dictator_spectrum_has_weight_at_most_one() {
        // Table (0,0,1,1): x_2 is the high bit here.
        let b = FloatBehavior::new(2, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        let s = hadamard_spectrum(&b);
        assert!(s.coefficients[3].abs() < 1e-15);
        assert_eq!(s.degree(1e-12), 1);
        let dense = dense_hadamard(b.p1_table());
        for (a, e) in s.coefficients.iter().zip(&dense) {
            assert!((a - e).abs() < 1e-15);
        }
    }

    #[test]
    fn fast_matches_dense_definition() {
        let values: Vec<f64> = (0..32).map(|i| ((i * 37 % 11) as f64) / 11.0).collect();
        let fast = normalized_transform(&values);
        let dense = dense_hadamard(&values);
        for (a, e) in fast.iter().zip(&dense) {
            assert!((a - e).abs() < 1e-12);
        }
    }
}
