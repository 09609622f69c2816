//! Sorkin-type interference sums and membership in the sets `J_{N,K}`.

use crate::behavior::Behavior;
use crate::error::{Error, Result};
use crate::hadamard::{hadamard_spectrum, unnormalized_spectrum};
use crate::scalar::Scalar;

/// Default tolerance for float interference tests.
pub const DEFAULT_TOL: f64 = 1e-9;

/// `sum over settings of the subset bits (others fixed to 0) of (-1)^{sum x} P(0|x)`.
///
/// `subset` holds 1-based input indices.
pub fn sorkin_sum<T: Scalar>(b: &Behavior<T>, subset: &[usize]) -> Result<T> {
    if subset.is_empty() {
        return Err(Error::invalid("interference subset must be nonempty"));
    }
    let mut mask = 0usize;
    for &j in subset {
        if j == 0 || j > b.n_inputs() {
            return Err(Error::invalid(format!("input index {j} outside 1..={}", b.n_inputs())));
        }
        let bit = 1usize << (j - 1);
        if mask & bit != 0 {
            return Err(Error::invalid(format!("input index {j} repeated")));
        }
        mask |= bit;
    }
    Ok(subset_sum(b, mask))
}

fn subset_sum<T: Scalar>(b: &Behavior<T>, mask: usize) -> T {
    // Enumerate submasks of `mask`.
    let mut total = T::zero();
    let mut sub = mask;
    loop {
        let term = b.p0(sub);
        if sub.count_ones().is_multiple_of(2) {
            total = total + term;
        } else {
            total = total - term;
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & mask;
    }
    total
}

/// Smallest `K` with every spectrum coefficient of mask weight `> K` at most `tol`.
pub fn interference_order<T: Scalar>(b: &Behavior<T>, tol: f64) -> usize {
    hadamard_spectrum(b).degree(tol)
}

/// Exact order from the unnormalized transform in the behavior's own arithmetic.
pub fn interference_order_exact<T: Scalar>(b: &Behavior<T>) -> usize {
    unnormalized_spectrum(b)
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_negligible())
        .map(|(j, _)| j.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

pub fn is_member_j<T: Scalar>(b: &Behavior<T>, k: usize, tol: f64) -> bool {
    interference_order(b, tol) <= k
}

pub fn is_member_j_exact<T: Scalar>(b: &Behavior<T>, k: usize) -> bool {
    interference_order_exact(b) <= k
}

/// Largest `|sorkin_sum|` over all subsets of size greater than `k`.
pub fn max_sorkin_above<T: Scalar>(b: &Behavior<T>, k: usize) -> f64 {
    (1usize..b.len())
        .filter(|m| m.count_ones() as usize > k)
        .map(|m| subset_sum(b, m).to_f64_lossy().abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::{FloatBehavior, RationalBehavior};
    use crate::boolean::BooleanFunction;
    use crate::exact::{int, rat};

    #[test]
    fn constant_sums_vanish() {
        let b = FloatBehavior::constant(3, 0.37).unwrap();
        for subset in [vec![1], vec![2, 3], vec![1, 2, 3]] {
            assert!(sorkin_sum(&b, &subset).unwrap().abs() < 1e-15);
        }
        assert_eq!(interference_order(&b, DEFAULT_TOL), 0);
    }

    #[test]
    fn and_gate_pair_sum() {
        // P(0|x) = 1 - x1 x2: terms 1 - 1 - 1 + 0 = -1.
        let b = RationalBehavior::new(2, vec![int(0), int(0), int(0), int(1)]).unwrap();
        assert_eq!(sorkin_sum(&b, &[1, 2]).unwrap(), int(-1));
    }

    #[test]
    fn product_form_behavior() {
        // P(0|x) = g1(x1) g2(x2) g3(x3)
        let g = [(rat(1, 2), rat(1, 3)), (rat(1, 5), rat(3, 4)), (rat(2, 3), rat(1, 7))];
        let b = RationalBehavior::from_fn(3, |x| {
            let mut p0 = int(1);
            for (j, (g0, g1)) in g.iter().enumerate() {
                p0 *= if x >> j & 1 == 1 { g1.clone() } else { g0.clone() };
            }
            int(1) - p0
        })
        .unwrap();
        // Pair {1,2} with x3 = 0: g3(0) (g1(0)-g1(1)) (g2(0)-g2(1)).
        let expected = rat(2, 3) * (rat(1, 2) - rat(1, 3)) * (rat(1, 5) - rat(3, 4));
        assert_eq!(sorkin_sum(&b, &[1, 2]).unwrap(), expected);
        assert_ne!(expected, int(0));
        // A second-order behavior has vanishing triple sums.
        let second = RationalBehavior::from_fn(3, |x| {
            let x1 = (x & 1) as i64;
            let x2 = (x >> 1 & 1) as i64;
            let x3 = (x >> 2 & 1) as i64;
            rat(1 + x1 + x2 * x3 + x1 * x3, 5)
        })
        .unwrap();
        assert_eq!(sorkin_sum(&second, &[1, 2, 3]).unwrap(), int(0));
        assert!(is_member_j_exact(&second, 2));
        assert!(!is_member_j_exact(&second, 1));
    }

    #[test]
    fn parity_has_full_order() {
        let b = FloatBehavior::new(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(interference_order(&b, DEFAULT_TOL), 2);
        assert!(!is_member_j(&b, 1, DEFAULT_TOL));
        assert!(is_member_j(&b, 2, DEFAULT_TOL));
    }

    #[test]
    fn junta_order_bounded_by_support() {
        let f = BooleanFunction::from_fn(4, |x| (x & 1 == 1) && (x >> 2 & 1 == 1)).unwrap();
        let b = RationalBehavior::deterministic(&f);
        assert_eq!(interference_order_exact(&b), 2);
    }

    #[test]
    fn rejects_bad_subsets() {
        let b = FloatBehavior::constant(2, 0.5).unwrap();
        assert!(sorkin_sum(&b, &[]).is_err());
        assert!(sorkin_sum(&b, &[3]).is_err());
        assert!(sorkin_sum(&b, &[1, 1]).is_err());
    }
}
