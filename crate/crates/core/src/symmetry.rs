//! Hyperoctahedral relabelings of inputs and the output inversion symmetry.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::behavior::Behavior;
use crate::boolean::BooleanFunction;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `b = pi ⋉ (s_1, ..., s_N)` acting as `x_i -> s_i(x_{pi(i)})`.
///
/// Stored 0-based: `permutation[i]` is `pi(i+1) - 1`, `flips[i]` is `s_{i+1} = NOT`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HyperoctahedralElement {
    permutation: Vec<usize>,
    flips: Vec<bool>,
}

impl HyperoctahedralElement {
    pub fn new(permutation: Vec<usize>, flips: Vec<bool>) -> Result<Self> {
        let n = permutation.len();
        if flips.len() != n {
            return Err(Error::invalid("permutation and flips differ in length"));
        }
        let mut seen = vec![false; n];
        for &p in &permutation {
            if p >= n || seen[p] {
                return Err(Error::invalid(format!("{permutation:?} is not a bijection on 0..{n}")));
            }
            seen[p] = true;
        }
        Ok(Self { permutation, flips })
    }

    pub fn identity(n: usize) -> Self {
        Self { permutation: (0..n).collect(), flips: vec![false; n] }
    }

    pub fn permutation(permutation: Vec<usize>) -> Result<Self> {
        let n = permutation.len();
        Self::new(permutation, vec![false; n])
    }

    pub fn flips(flips: Vec<bool>) -> Self {
        Self { permutation: (0..flips.len()).collect(), flips }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut permutation: Vec<usize> = (0..n).collect();
        permutation.shuffle(rng);
        let flips = (0..n).map(|_| rng.random_bool(0.5)).collect();
        Self { permutation, flips }
    }

    pub fn n_inputs(&self) -> usize {
        self.permutation.len()
    }

    /// Index of the input `y` with `y_i = s_i(x_{pi(i)})`.
    pub fn map_input(&self, x: usize) -> usize {
        self.permutation
            .iter()
            .zip(&self.flips)
            .enumerate()
            .fold(0, |acc, (i, (&p, &s))| acc | (((x >> p & 1) ^ usize::from(s)) << i))
    }

    /// The element `c` with `c f = self (other f)`.
    pub fn compose(&self, other: &Self) -> Self {
        // (self (other f))(x) = (other f)(y) with y = self.map(x)
        //                     = f(z) with z = other.map(y).
        let n = self.n_inputs();
        let mut permutation = vec![0; n];
        let mut flips = vec![false; n];
        for i in 0..n {
            let j = other.permutation[i];
            permutation[i] = self.permutation[j];
            flips[i] = other.flips[i] ^ self.flips[j];
        }
        Self { permutation, flips }
    }

    pub fn inverse(&self) -> Self {
        let n = self.n_inputs();
        let mut permutation = vec![0; n];
        let mut flips = vec![false; n];
        for i in 0..n {
            let p = self.permutation[i];
            permutation[p] = i;
            flips[p] = self.flips[i];
        }
        Self { permutation, flips }
    }

    pub fn is_self_inverse(&self) -> bool {
        self.inverse() == *self
    }

    pub fn apply_function(&self, f: &BooleanFunction) -> Result<BooleanFunction> {
        self.check(f.n_inputs())?;
        BooleanFunction::from_fn(f.n_inputs(), |x| f.eval(self.map_input(x)))
    }

    /// `R_b`: `P(a|x) -> P(a | s_1(x_{pi(1)}), ..., s_N(x_{pi(N)}))`.
    pub fn apply<T: Scalar>(&self, beh: &Behavior<T>) -> Result<Behavior<T>> {
        self.check(beh.n_inputs())?;
        let p1 = (0..beh.len()).map(|x| beh.p1(self.map_input(x))).collect();
        Ok(Behavior::from_parts_unchecked(beh.n_inputs(), p1))
    }

    fn check(&self, n: usize) -> Result<()> {
        if n != self.n_inputs() {
            return Err(Error::invalid(format!(
                "group element acts on {} inputs, object has {n}",
                self.n_inputs()
            )));
        }
        Ok(())
    }
}

pub fn apply_symmetry<T: Scalar>(b: &HyperoctahedralElement, beh: &Behavior<T>) -> Result<Behavior<T>> {
    b.apply(beh)
}

/// `P(a|x) -> 1 - P(a|x)`, swapping the roles of the two outputs.
pub fn apply_inversion<T: Scalar>(beh: &Behavior<T>) -> Behavior<T> {
    let p1 = (0..beh.len()).map(|x| beh.p0(x)).collect();
    Behavior::from_parts_unchecked(beh.n_inputs(), p1)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
    }
    out
}

/// Orbit average of `beh` over all input permutations (`N <= 7`).
pub fn symmetrize<T: Scalar>(beh: &Behavior<T>) -> Result<Behavior<T>> {
    let n = beh.n_inputs();
    if n > 7 {
        return Err(Error::Budget { what: "permutation orbit", required: n as u128, budget: 7 });
    }
    let perms = permutations(n);
    let count = T::from_int(perms.len() as i64);
    let mut acc = vec![T::zero(); beh.len()];
    for p in perms {
        let image = HyperoctahedralElement::permutation(p)?.apply(beh)?;
        for (a, v) in acc.iter_mut().zip(image.p1_table()) {
            *a = a.clone() + v.clone();
        }
    }
    let p1 = acc.into_iter().map(|v| v / count.clone()).collect();
    Ok(Behavior::from_parts_unchecked(n, p1))
}
