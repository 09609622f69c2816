//! Enumeration and counting of K-juntas, plus the Boolean Fourier degree.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::boolean::BooleanFunction;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hadamard::fwht_in_place;

/// Cap on the enumeration work estimate `2^{2^K} * C(N, K)`.
pub const DEFAULT_JUNTA_BUDGET: u128 = 4096;

/// Largest `N` for which the degree-versus-junta scan walks all `2^{2^N}` functions.
pub const MAX_DEGREE_SCAN_INPUTS: usize = 4;

/// Sorted 1-based indices of the variables `f` actually depends on.
pub fn effective_variables(f: &BooleanFunction) -> Vec<usize> {
    (0..f.n_inputs())
        .filter(|&j| {
            let bit = 1usize << j;
            (0..f.len()).any(|x| x & bit == 0 && f.eval(x) != f.eval(x | bit))
        })
        .map(|j| j + 1)
        .collect()
}

pub fn is_k_junta(f: &BooleanFunction, k: usize) -> bool {
    effective_variables(f).len() <= k
}

/// Work estimate used against the budget: `2^{2^K} * C(N, K)`.
pub fn enumeration_cost(n: usize, k: usize) -> u128 {
    if k >= 7 {
        return u128::MAX;
    }
    let per_support = 1u128 << (1u32 << k);
    per_support.saturating_mul(binomial(n, k))
}

/// Every Boolean function on `n` inputs with at most `k` effective variables,
/// sorted by truth table.
pub fn enumerate_k_juntas(n: usize, k: usize, budget: u128, exec: Exec) -> Result<Vec<BooleanFunction>> {
    if k > n {
        return Err(Error::invalid(format!("K = {k} exceeds N = {n}")));
    }
    let cost = enumeration_cost(n, k);
    if cost > budget {
        return Err(Error::Budget { what: "junta enumeration", required: cost, budget });
    }
    let supports: Vec<Vec<usize>> = (0..=k).flat_map(|size| combinations(n, size)).collect();
    let per_support = exec.map(supports, |support| exact_support_functions(n, &support));
    let set: BTreeSet<BooleanFunction> = per_support.into_iter().flatten().collect();
    Ok(set.into_iter().collect())
}

/// Functions whose effective variable set is exactly `support` (0-based indices).
fn exact_support_functions(n: usize, support: &[usize]) -> Vec<BooleanFunction> {
    let k = support.len();
    let local_len = 1usize << k;
    let projected: Vec<usize> = (0..1usize << n)
        .map(|x| support.iter().enumerate().fold(0, |acc, (i, &j)| acc | ((x >> j & 1) << i)))
        .collect();
    let mut out = Vec::new();
    for table in 0..(1u64 << local_len) {
        let local = BooleanFunction::from_word(k, table).expect("k <= 6");
        if effective_variables(&local).len() != k {
            continue;
        }
        out.push(BooleanFunction::from_fn(n, |x| local.eval(projected[x])).expect("n checked"));
    }
    out
}

/// Number of `k`-juntas on `n` inputs, by inclusion–exclusion over supports.
pub fn count_k_juntas(n: usize, k: usize) -> BigUint {
    let mut total = BigInt::zero();
    for size in 0..=k.min(n) {
        total += BigInt::from(binomial(n, size)) * count_exact_support(size);
    }
    total.to_biguint().expect("count is nonnegative")
}

/// Functions of `k` variables that depend on all of them.
pub fn count_exact_support(k: usize) -> BigInt {
    let mut sum = BigInt::zero();
    for r in 0..=k {
        let term = BigInt::from(binomial(k, r)) * (BigInt::one() << (1usize << r));
        if (k - r).is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

/// Largest mask weight with a nonzero coefficient in the integer transform of `f`.
pub fn fourier_degree(f: &BooleanFunction) -> usize {
    let mut values: Vec<i64> = (0..f.len()).map(|x| i64::from(f.eval(x))).collect();
    fwht_in_place(&mut values);
    values
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0)
        .map(|(j, _)| j.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeJuntaReport {
    pub n_inputs: usize,
    pub degree_bound: usize,
    /// `K * 2^{K-1}` (zero for `K = 0`).
    pub junta_bound: usize,
    pub functions_scanned: u64,
    pub low_degree_functions: u64,
    pub max_effective_variables: usize,
    /// Low-degree functions with more than `junta_bound` effective variables.
    pub bound_violations: u64,
    /// Low-degree functions that are not `K`-juntas.
    pub non_junta_count: u64,
    /// Hex truth table of the first such function, if any.
    pub non_junta_witness: Option<String>,
}

impl DegreeJuntaReport {
    pub fn holds(&self) -> bool {
        self.bound_violations == 0
    }
}

/// Walks every function on `n <= 4` inputs and checks that degree `<= k`
/// implies at most `k * 2^{k-1}` effective variables.
pub fn check_degree_junta_bound(n: usize, k: usize, exec: Exec) -> Result<DegreeJuntaReport> {
    if n > MAX_DEGREE_SCAN_INPUTS {
        return Err(Error::Budget {
            what: "degree/junta scan inputs",
            required: n as u128,
            budget: MAX_DEGREE_SCAN_INPUTS as u128,
        });
    }
    let junta_bound = if k == 0 { 0 } else { k << (k - 1) };
    let total: u64 = 1u64 << (1u32 << n);
    let chunk = 4096u64;
    let chunks: Vec<(u64, u64)> = (0..total.div_ceil(chunk))
        .map(|c| (c * chunk, ((c + 1) * chunk).min(total)))
        .collect();
    struct Partial {
        low: u64,
        max_eff: usize,
        violations: u64,
        non_junta: u64,
        witness: Option<BooleanFunction>,
    }
    let partials = exec.map(chunks, |(lo, hi)| {
        let mut p = Partial { low: 0, max_eff: 0, violations: 0, non_junta: 0, witness: None };
        for word in lo..hi {
            let f = BooleanFunction::from_word(n, word).expect("n <= 4");
            if fourier_degree(&f) > k {
                continue;
            }
            p.low += 1;
            let eff = effective_variables(&f).len();
            p.max_eff = p.max_eff.max(eff);
            if eff > junta_bound {
                p.violations += 1;
            }
            if eff > k {
                p.non_junta += 1;
                if p.witness.is_none() {
                    p.witness = Some(f);
                }
            }
        }
        p
    });
    let mut report = DegreeJuntaReport {
        n_inputs: n,
        degree_bound: k,
        junta_bound,
        functions_scanned: total,
        low_degree_functions: 0,
        max_effective_variables: 0,
        bound_violations: 0,
        non_junta_count: 0,
        non_junta_witness: None,
    };
    for p in partials {
        report.low_degree_functions += p.low;
        report.max_effective_variables = report.max_effective_variables.max(p.max_eff);
        report.bound_violations += p.violations;
        report.non_junta_count += p.non_junta;
        if report.non_junta_witness.is_none() {
            report.non_junta_witness = p.witness.map(|f| f.to_hex());
        }
    }
    Ok(report)
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// All `size`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(size);
    fn rec(start: usize, n: usize, size: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            if n - i < size - current.len() {
                break;
            }
            current.push(i);
            rec(i + 1, n, size, current, out);
            current.pop();
        }
    }
    rec(0, n, size, &mut current, &mut out);
    out
}
