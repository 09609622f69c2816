//! Hyperplanes over behaviors as oracle games.
//!
//! A hyperplane `sum_x b1_x P(1|x) + b0_x P(0|x) = B` is rewritten as the
//! winning probability of computing `v(x)` on inputs drawn with weights `q_x`.
//! Only maximization is modeled; minimizing a left-hand side is the same
//! problem with the two output labels exchanged.

use serde_json::{json, Value};

use crate::behavior::Behavior;
use crate::boolean::BooleanFunction;
use crate::error::{Error, Result};
use crate::exact;
use crate::exec::Exec;
use crate::juntas;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane<T> {
    pub n_inputs: usize,
    pub b0: Vec<T>,
    pub b1: Vec<T>,
    pub offset: T,
}

impl<T: Scalar> Hyperplane<T> {
    pub fn new(n_inputs: usize, b0: Vec<T>, b1: Vec<T>, offset: T) -> Result<Self> {
        let len = 1usize << n_inputs;
        if b0.len() != len || b1.len() != len {
            return Err(Error::invalid(format!("hyperplane coefficients need {len} entries each")));
        }
        Ok(Self { n_inputs, b0, b1, offset })
    }

    /// The fingerprinting facet written directly in `b` coefficients.
    pub fn fingerprinting(n_inputs: usize) -> Result<Self> {
        let len = 1usize << n_inputs;
        let w = T::one() / T::from_int(n_inputs as i64 + 1);
        let mut b0 = vec![T::zero(); len];
        let mut b1 = vec![T::zero(); len];
        b0[0] = w.clone();
        for j in 0..n_inputs {
            b1[1 << j] = w.clone();
        }
        let offset = T::from_int(n_inputs as i64) * w;
        Self::new(n_inputs, b0, b1, offset)
    }

    /// `sum_x b1_x P(1|x) + b0_x P(0|x)`.
    pub fn lhs(&self, beh: &Behavior<T>) -> T {
        (0..beh.len()).fold(T::zero(), |acc, x| {
            acc + self.b1[x].clone() * beh.p1(x) + self.b0[x].clone() * beh.p0(x)
        })
    }

    /// `(D, S)` with `D = sum_x |b1_x - b0_x|` and `S = sum_x min(b0_x, b1_x)`;
    /// the game value of the induced game is `(lhs - S) / D`.
    pub fn normalization(&self) -> (T, T) {
        self.b0.iter().zip(&self.b1).fold((T::zero(), T::zero()), |(d, s), (b0, b1)| {
            let lo = if b0 < b1 { b0.clone() } else { b1.clone() };
            (d + (b1.clone() - b0.clone()).abs(), s + lo)
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleGame<T> {
    pub n_inputs: usize,
    /// `v(x)`: the output that wins on input `x`.
    pub target: BooleanFunction,
    /// `q_x = q^{(v(x))}_x`; nonnegative, summing to one.
    pub weights: Vec<T>,
    /// Right-hand side `C`; the classical bound for facet games.
    pub constant: T,
}

impl<T: Scalar> OracleGame<T> {
    pub fn new(target: BooleanFunction, weights: Vec<T>, constant: T) -> Result<Self> {
        let n_inputs = target.n_inputs();
        if weights.len() != target.len() {
            return Err(Error::invalid("one weight per input required"));
        }
        if weights.iter().any(|w| *w < -T::zero_tolerance()) {
            return Err(Error::invalid("game weights must be nonnegative"));
        }
        let total = weights.iter().fold(T::zero(), |acc, w| acc + w.clone());
        let slack = if T::zero_tolerance().is_zero() { T::zero() } else { T::from_f64(1e-12).unwrap() };
        if (total.clone() - T::one()).abs() > slack {
            return Err(Error::invalid(format!("game weights sum to {total:?}, not 1")));
        }
        Ok(Self { n_inputs, target, weights, constant })
    }

    /// Total weight on inputs whose winning output is `a`.
    pub fn prior(&self, a: u8) -> T {
        (0..self.weights.len())
            .filter(|&x| u8::from(self.target.eval(x)) == a)
            .fold(T::zero(), |acc, x| acc + self.weights[x].clone())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n_inputs": self.n_inputs,
            "v_truth_table_hex": self.target.to_hex(),
            "weights": self.weights.iter().map(Scalar::render).collect::<Vec<_>>(),
            "bound": self.constant.render(),
        })
    }
}

impl OracleGame<exact::Rational> {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s)?;
        let n = v["n_inputs"].as_u64().ok_or_else(|| Error::Parse("missing n_inputs".into()))? as usize;
        let hex = v["v_truth_table_hex"].as_str().ok_or_else(|| Error::Parse("missing v_truth_table_hex".into()))?;
        let target = BooleanFunction::from_hex(n, hex)?;
        let parse = |v: &Value| match v {
            Value::String(s) => exact::parse_rational(s),
            Value::Number(n) => exact::from_f64(n.as_f64().unwrap_or(f64::NAN)).ok_or_else(|| Error::Parse(format!("bad number {n}"))),
            other => Err(Error::Parse(format!("bad weight {other}"))),
        };
        let weights = v["weights"]
            .as_array()
            .ok_or_else(|| Error::Parse("missing weights".into()))?
            .iter()
            .map(parse)
            .collect::<Result<Vec<_>>>()?;
        let bound = parse(&v["bound"])?;
        Self::new(target, weights, bound)
    }
}

/// `v(x) = 0` iff `b0_x > b1_x`; ties go to `v(x) = 1` and carry zero weight.
pub fn hyperplane_to_game<T: Scalar>(h: &Hyperplane<T>) -> Result<OracleGame<T>> {
    let (denominator, min_sum) = h.normalization();
    if denominator.is_negligible() {
        return Err(Error::DegenerateHyperplane);
    }
    let target = BooleanFunction::from_fn(h.n_inputs, |x| h.b0[x] <= h.b1[x])?;
    let weights = h
        .b0
        .iter()
        .zip(&h.b1)
        .map(|(b0, b1)| (b1.clone() - b0.clone()).abs() / denominator.clone())
        .collect();
    let constant = (h.offset.clone() - min_sum) / denominator;
    OracleGame::new(target, weights, constant)
}

/// `sum_x q_x P(v(x)|x)`.
pub fn game_value<T: Scalar>(g: &OracleGame<T>, beh: &Behavior<T>) -> T {
    (0..beh.len()).fold(T::zero(), |acc, x| {
        let w = &g.weights[x];
        if w.is_zero() {
            acc
        } else {
            acc + w.clone() * beh.prob(u8::from(g.target.eval(x)), x)
        }
    })
}

/// Fingerprinting game: weight `1/(N+1)` on the all-zero input (win with 0)
/// and on each weight-one input (win with 1), bound `N/(N+1)`.
///
/// The target is `OR`: it is the function the weighted inputs pin down, and the
/// one `hyperplane_to_game` derives from the facet under the tie rule.
pub fn fingerprinting_game<T: Scalar>(n: usize) -> Result<OracleGame<T>> {
    if n == 0 {
        return Err(Error::invalid("fingerprinting game needs N >= 1"));
    }
    let w = T::one() / T::from_int(n as i64 + 1);
    let mut weights = vec![T::zero(); 1 << n];
    weights[0] = w.clone();
    for j in 0..n {
        weights[1 << j] = w.clone();
    }
    let bound = T::from_int(n as i64) * w;
    OracleGame::new(BooleanFunction::or_all(n)?, weights, bound)
}

/// `game_value - bound`; positive values are violations.
pub fn violation<T: Scalar>(g: &OracleGame<T>, beh: &Behavior<T>, bound: &T) -> T {
    game_value(g, beh) - bound.clone()
}

/// Best value over the vertices of `C_{N,K}`, with a maximizing junta.
pub fn classical_bound<T: Scalar>(g: &OracleGame<T>, k: usize, junta_budget: u128, exec: Exec) -> Result<(T, BooleanFunction)> {
    let vertices = juntas::enumerate_k_juntas(g.n_inputs, k, junta_budget, exec)?;
    let mut best: Option<(T, BooleanFunction)> = None;
    for f in vertices {
        let v = game_value(g, &Behavior::deterministic(&f));
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, f));
        }
    }
    best.ok_or_else(|| Error::Internal("no vertices".into()))
}
