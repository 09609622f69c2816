use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

use crate::exact::Rational;

/// Arithmetic shared by the float and exact-rational flavors of the toolkit.
///
/// `zero_tolerance` is the magnitude below which a value counts as zero:
/// exactly zero for rationals, a small absolute epsilon for floats.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + Debug + Send + Sync + FromPrimitive + ToPrimitive
{
    fn zero_tolerance() -> Self;

    fn is_negligible(&self) -> bool {
        self.abs() <= Self::zero_tolerance()
    }

    fn from_int(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("integer conversion")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Shortest textual form: `p/q` for rationals, round-trip decimal for floats.
    fn render(&self) -> String;
}

impl Scalar for f64 {
    fn zero_tolerance() -> Self {
        1e-9
    }

    fn render(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for Rational {
    fn zero_tolerance() -> Self {
        Rational::from_integer(0.into())
    }

    fn render(&self) -> String {
        crate::exact::format_rational(self)
    }
}
