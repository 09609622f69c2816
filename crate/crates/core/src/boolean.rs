//! Truth tables over `{0,1}^N` with the same index convention as behaviors.

use std::cmp::Ordering;
use std::fmt;

use crate::behavior::MAX_INPUTS;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    n_inputs: usize,
    words: Vec<u64>,
}

impl BooleanFunction {
    pub fn zero(n_inputs: usize) -> Result<Self> {
        if n_inputs > MAX_INPUTS {
            return Err(Error::invalid(format!("n_inputs must be at most {MAX_INPUTS}, got {n_inputs}")));
        }
        let len = 1usize << n_inputs;
        Ok(Self { n_inputs, words: vec![0; len.div_ceil(64)] })
    }

    pub fn from_fn(n_inputs: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        let mut out = Self::zero(n_inputs)?;
        for x in 0..out.len() {
            if f(x) {
                out.set(x, true);
            }
        }
        Ok(out)
    }

    pub fn from_bits(n_inputs: usize, bits: &[bool]) -> Result<Self> {
        if bits.len() != 1usize << n_inputs {
            return Err(Error::invalid(format!(
                "truth table length {} does not match 2^{n_inputs}",
                bits.len()
            )));
        }
        Self::from_fn(n_inputs, |x| bits[x])
    }

    /// Small tables (`N <= 6`) packed into one word, bit `x` holding `f(x)`.
    pub fn from_word(n_inputs: usize, word: u64) -> Result<Self> {
        if n_inputs > 6 {
            return Err(Error::invalid("from_word needs n_inputs <= 6"));
        }
        let len = 1usize << n_inputs;
        let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        Ok(Self { n_inputs, words: vec![word & mask] })
    }

    /// The dictator `x_j` (1-based variable index).
    pub fn variable(n_inputs: usize, j: usize) -> Result<Self> {
        if j == 0 || j > n_inputs {
            return Err(Error::invalid(format!("variable index {j} outside 1..={n_inputs}")));
        }
        Self::from_fn(n_inputs, |x| x >> (j - 1) & 1 == 1)
    }

    pub fn parity(n_inputs: usize) -> Result<Self> {
        Self::from_fn(n_inputs, |x| x.count_ones() % 2 == 1)
    }

    pub fn and_all(n_inputs: usize) -> Result<Self> {
        let full = (1usize << n_inputs) - 1;
        Self::from_fn(n_inputs, |x| x == full)
    }

    pub fn or_all(n_inputs: usize) -> Result<Self> {
        Self::from_fn(n_inputs, |x| x != 0)
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    /// Number of table entries, `2^N`.
    pub fn len(&self) -> usize {
        1 << self.n_inputs
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn eval(&self, x: usize) -> bool {
        self.words[x / 64] >> (x % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: usize, value: bool) {
        let bit = 1u64 << (x % 64);
        if value {
            self.words[x / 64] |= bit;
        } else {
            self.words[x / 64] &= !bit;
        }
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_constant(&self) -> bool {
        let w = self.weight();
        w == 0 || w == self.len()
    }

    pub fn negate(&self) -> Self {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.mask_tail();
        out
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Hex form of the integer `sum_x f(x) 2^x`, most significant digit first,
    /// padded to `ceil(2^N / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.len().div_ceil(4);
        (0..digits)
            .rev()
            .map(|d| {
                let mut nibble = 0u32;
                for b in 0..4 {
                    let x = d * 4 + b;
                    if x < self.len() && self.eval(x) {
                        nibble |= 1 << b;
                    }
                }
                char::from_digit(nibble, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(n_inputs: usize, hex: &str) -> Result<Self> {
        let mut out = Self::zero(n_inputs)?;
        let digits: Vec<u32> = hex
            .trim()
            .trim_start_matches("0x")
            .chars()
            .map(|c| c.to_digit(16).ok_or_else(|| Error::Parse(format!("bad hex digit {c:?}"))))
            .collect::<Result<_>>()?;
        if digits.len() != out.len().div_ceil(4) {
            return Err(Error::Parse(format!(
                "expected {} hex digits for N = {n_inputs}, got {}",
                out.len().div_ceil(4),
                digits.len()
            )));
        }
        for (d, nibble) in digits.iter().rev().enumerate() {
            for b in 0..4 {
                let x = d * 4 + b;
                let bit = nibble >> b & 1 == 1;
                if x >= out.len() {
                    if bit {
                        return Err(Error::Parse("hex string sets bits beyond 2^N".into()));
                    }
                    continue;
                }
                out.set(x, bit);
            }
        }
        Ok(out)
    }

    fn mask_tail(&mut self) {
        let len = self.len();
        if len < 64 {
            self.words[0] &= (1u64 << len) - 1;
        }
    }
}

/// Lexicographic order on the bit sequence `f(0), f(1), ...`, after `N`.
impl Ord for BooleanFunction {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n_inputs.cmp(&other.n_inputs).then_with(|| {
            for (a, b) in self.words.iter().zip(&other.words) {
                match a.reverse_bits().cmp(&b.reverse_bits()) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for BooleanFunction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BooleanFunction(N={}, 0x{})", self.n_inputs, self.to_hex())
    }
}
