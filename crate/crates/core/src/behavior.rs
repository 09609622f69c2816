//! Conditional probability tables `P(a|x)` over all `N`-bit inputs.
//!
//! Input `x = (x_1, ..., x_N)` is stored at the integer index whose bit `j-1`
//! holds `x_j`. Only `P(1|x)` is stored; `P(0|x) = 1 - P(1|x)`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::boolean::BooleanFunction;
use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::scalar::Scalar;

/// Largest supported input count; tables are dense.
pub const MAX_INPUTS: usize = 20;

/// Normalization slack for float behaviors.
pub const FLOAT_NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Behavior<T> {
    n_inputs: usize,
    p1: Vec<T>,
}

pub type FloatBehavior = Behavior<f64>;
pub type RationalBehavior = Behavior<Rational>;

impl<T: Scalar> Behavior<T> {
    /// Builds a behavior from the `P(1|x)` column, indexed by `x`.
    pub fn new(n_inputs: usize, p1: Vec<T>) -> Result<Self> {
        check_inputs(n_inputs)?;
        if p1.len() != 1 << n_inputs {
            return Err(Error::invalid(format!(
                "expected {} entries for N = {n_inputs}, got {}",
                1usize << n_inputs,
                p1.len()
            )));
        }
        let slack = if T::zero_tolerance().is_zero() {
            T::zero()
        } else {
            T::from_f64(FLOAT_NORMALIZATION_TOL).expect("float tolerance")
        };
        for (x, p) in p1.iter().enumerate() {
            if *p < -slack.clone() || *p > T::one() + slack.clone() {
                return Err(Error::invalid(format!("P(1|{x}) = {p:?} outside [0, 1]")));
            }
        }
        Ok(Self { n_inputs, p1 })
    }

    pub fn from_fn(n_inputs: usize, f: impl Fn(usize) -> T) -> Result<Self> {
        check_inputs(n_inputs)?;
        Self::new(n_inputs, (0..1usize << n_inputs).map(f).collect())
    }

    pub fn constant(n_inputs: usize, p1: T) -> Result<Self> {
        Self::from_fn(n_inputs, |_| p1.clone())
    }

    /// The vertex `P(a|x) = [a = f(x)]`.
    pub fn deterministic(f: &BooleanFunction) -> Self {
        let p1 = (0..f.len())
            .map(|x| if f.eval(x) { T::one() } else { T::zero() })
            .collect();
        Self { n_inputs: f.n_inputs(), p1 }
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn len(&self) -> usize {
        self.p1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p1.is_empty()
    }

    /// The projection `P'`: components `P(1|x)` in index order.
    pub fn p1_table(&self) -> &[T] {
        &self.p1
    }

    pub fn p1(&self, x: usize) -> T {
        self.p1[x].clone()
    }

    pub fn p0(&self, x: usize) -> T {
        T::one() - self.p1[x].clone()
    }

    pub fn prob(&self, a: u8, x: usize) -> T {
        if a == 0 {
            self.p0(x)
        } else {
            self.p1(x)
        }
    }

    /// `Some(f)` if every entry is exactly 0 or 1 (up to the scalar's zero tolerance).
    pub fn as_deterministic(&self) -> Option<BooleanFunction> {
        let mut bits = Vec::with_capacity(self.p1.len());
        for p in &self.p1 {
            if p.is_negligible() {
                bits.push(false);
            } else if (p.clone() - T::one()).is_negligible() {
                bits.push(true);
            } else {
                return None;
            }
        }
        Some(BooleanFunction::from_bits(self.n_inputs, &bits).expect("length matches"))
    }

    pub fn to_float(&self) -> FloatBehavior {
        Behavior { n_inputs: self.n_inputs, p1: self.p1.iter().map(Scalar::to_f64_lossy).collect() }
    }

    /// One row per input: `index,bits,p0,p1`. Bits are printed `x_1 x_2 ... x_N`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,bits,p0,p1\n");
        for x in 0..self.len() {
            let _ = writeln!(
                out,
                "{x},{},{},{}",
                bit_string(x, self.n_inputs),
                self.p0(x).render(),
                self.p1(x).render()
            );
        }
        out
    }
}

impl<T> Behavior<T> {
    pub(crate) fn from_parts_unchecked(n_inputs: usize, p1: Vec<T>) -> Self {
        Self { n_inputs, p1 }
    }

    pub fn into_p1(self) -> Vec<T> {
        self.p1
    }
}

impl RationalBehavior {
    pub fn to_json_value(&self) -> Value {
        let p1: Vec<Value> = self.p1.iter().map(|p| Value::String(exact::format_rational(p))).collect();
        serde_json::json!({ "n_inputs": self.n_inputs, "p1": p1 })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: BehaviorJson = serde_json::from_str(s)?;
        let p1 = raw
            .p1
            .iter()
            .map(|v| match v {
                Value::String(s) => exact::parse_rational(s),
                Value::Number(n) => {
                    let f = n.as_f64().ok_or_else(|| Error::Parse(format!("bad number {n}")))?;
                    exact::from_f64(f).ok_or_else(|| Error::Parse(format!("non-finite {f}")))
                }
                other => Err(Error::Parse(format!("expected number or \"p/q\" string, got {other}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(raw.n_inputs, p1)
    }
}

impl FloatBehavior {
    pub fn to_json_value(&self) -> Value {
        serde_json::json!({ "n_inputs": self.n_inputs, "p1": self.p1 })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(RationalBehavior::from_json_str(s)?.to_float())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct BehaviorJson {
    n_inputs: usize,
    p1: Vec<Value>,
}

fn check_inputs(n: usize) -> Result<()> {
    if n == 0 || n > MAX_INPUTS {
        return Err(Error::invalid(format!("n_inputs must be in 1..={MAX_INPUTS}, got {n}")));
    }
    Ok(())
}

/// `x_1 ... x_N` as a string of 0/1 characters.
pub fn bit_string(x: usize, n: usize) -> String {
    (0..n).map(|j| if x >> j & 1 == 1 { '1' } else { '0' }).collect()
}

/// Integer index of the input with `x_j = bits[j-1]`.
pub fn index_of(bits: &[bool]) -> usize {
    bits.iter().enumerate().fold(0, |acc, (j, &b)| acc | (usize::from(b) << j))
}
