//! Restart-based maximization of the fingerprinting violation.
//!
//! Strategies are parameterized without constraints. Each encoded state in
//! `C^d` is a point of the real sphere `S^{2d-1}` written in `2d-1`
//! hyperspherical angles (a single phase when `d = 1`). The weights are a
//! softmax over `N` logits with the first pinned to zero. Symmetric modes share
//! one encoded state between all sites, or fix the weights to be uniform.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;

use super::helstrom::fingerprinting_violation;
use super::minimize::{minimize, Backend, LocalOptions};
use super::strategy::QuantumStrategy;

pub const DEFAULT_RESTARTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub symmetric_unitaries: bool,
    pub symmetric_weights: bool,
    pub restarts: usize,
    pub seed: u64,
    pub backend: Backend,
    pub local: LocalOptions,
    pub exec: Exec,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            symmetric_unitaries: false,
            symmetric_weights: false,
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            backend: Backend::default(),
            local: LocalOptions::default(),
            exec: Exec::default(),
        }
    }
}

/// One line of the restart log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartRecord {
    pub restart: usize,
    /// Master seed; the restart draws from stream `restart` of this seed.
    pub seed: u64,
    pub iterations: usize,
    pub evaluations: usize,
    pub delta: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOutcome {
    pub delta: f64,
    pub strategy: QuantumStrategy,
    pub best_restart: usize,
    pub restarts: Vec<RestartRecord>,
}

impl OptimizeOutcome {
    /// JSON lines, one record per restart, in restart order.
    pub fn restart_log(&self) -> String {
        self.restarts
            .iter()
            .map(|r| serde_json::to_string(r).expect("restart records serialize") + "\n")
            .collect()
    }
}

/// Maps unconstrained parameter vectors to strategies.
#[derive(Debug, Clone, PartialEq)]
struct Parameterization {
    n: usize,
    d: usize,
    symmetric_unitaries: bool,
    symmetric_weights: bool,
    fixed_states: Option<Vec<Vec<Complex64>>>,
}

impl Parameterization {
    fn angles_per_state(&self) -> usize {
        2 * self.d - 1
    }

    fn state_params(&self) -> usize {
        match (&self.fixed_states, self.symmetric_unitaries) {
            (Some(_), _) => 0,
            (None, true) => self.angles_per_state(),
            (None, false) => self.n * self.angles_per_state(),
        }
    }

    fn weight_params(&self) -> usize {
        if self.symmetric_weights { 0 } else { self.n - 1 }
    }

    fn len(&self) -> usize {
        self.state_params() + self.weight_params()
    }

    fn decode(&self, params: &[f64]) -> QuantumStrategy {
        let (angles, logits) = params.split_at(self.state_params());
        let states = match &self.fixed_states {
            Some(states) => states.clone(),
            None => {
                let per = self.angles_per_state();
                (0..self.n)
                    .map(|i| {
                        let block = if self.symmetric_unitaries { 0 } else { i };
                        hyperspherical_state(&angles[block * per..(block + 1) * per])
                    })
                    .collect()
            }
        };
        let weights = if self.symmetric_weights { vec![1.0 / self.n as f64; self.n] } else { softmax_pinned(logits) };
        QuantumStrategy::from_parts_unchecked(self.n, self.d, weights, states)
    }

    fn random(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let per = self.angles_per_state();
        let mut out = Vec::with_capacity(self.len());
        for k in 0..self.state_params() {
            let last = k % per == per - 1;
            let upper = if last { 2.0 * std::f64::consts::PI } else { std::f64::consts::PI };
            out.push(rng.random_range(0.0..upper));
        }
        if self.weight_params() > 0 {
            // Dirichlet(1) weights, written as logits relative to the first.
            let draws: Vec<f64> = (0..self.n).map(|_| rng.sample::<f64, _>(Exp1).max(1e-300)).collect();
            out.extend(draws[1..].iter().map(|e| (e / draws[0]).ln()));
        }
        out
    }
}

/// Unit vector of `C^d` from `2d-1` hyperspherical angles on `S^{2d-1}`.
pub fn hyperspherical_state(angles: &[f64]) -> Vec<Complex64> {
    let m = angles.len() + 1;
    let mut real = Vec::with_capacity(m);
    let mut sin_prod = 1.0;
    for a in angles {
        real.push(sin_prod * a.cos());
        sin_prod *= a.sin();
    }
    real.push(sin_prod);
    real.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

/// `p_0 ∝ 1` and `p_i ∝ exp(l_i)` for the remaining sites.
pub fn softmax_pinned(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(0.0, f64::max);
    let exps: Vec<f64> = std::iter::once(-max).chain(logits.iter().map(|l| l - max)).map(f64::exp).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

fn run(param: &Parameterization, opts: &OptimizeOptions) -> Result<OptimizeOutcome> {
    if opts.restarts == 0 {
        return Err(Error::invalid("at least one restart is required"));
    }
    let objective = |x: &[f64]| -fingerprinting_violation(&param.decode(x));
    let results = opts.exec.map((0..opts.restarts).collect(), |restart| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(restart as u64);
        let x0 = param.random(&mut rng);
        let local = minimize(opts.backend, &objective, &x0, &opts.local);
        let record = RestartRecord {
            restart,
            seed: opts.seed,
            iterations: local.iterations,
            evaluations: local.evaluations,
            delta: -local.value,
            converged: local.converged,
        };
        (record, local.x)
    });
    // Highest delta wins; the lowest restart index breaks ties.
    let (best_restart, best_x) = results
        .iter()
        .enumerate()
        .fold((0, &results[0].1), |(bi, bx), (i, (rec, x))| if rec.delta > results[bi].0.delta { (i, x) } else { (bi, bx) });
    let strategy = param.decode(best_x);
    let strategy = QuantumStrategy::new(strategy.n_inputs(), strategy.internal_dim(), strategy.weights().to_vec(), strategy.encoded_states().to_vec())
        .map_err(|e| Error::Internal(format!("optimizer produced an invalid strategy: {e}")))?;
    Ok(OptimizeOutcome {
        delta: results[best_restart].0.delta,
        strategy,
        best_restart,
        restarts: results.into_iter().map(|(r, _)| r).collect(),
    })
}

/// Best fingerprinting violation found for `N` sites and internal dimension `d`.
pub fn optimize_violation(n: usize, d: usize, opts: &OptimizeOptions) -> Result<OptimizeOutcome> {
    if n < 2 || d < 1 {
        return Err(Error::invalid(format!("need N >= 2 and d >= 1, got N={n}, d={d}")));
    }
    let param = Parameterization { n, d, symmetric_unitaries: opts.symmetric_unitaries, symmetric_weights: opts.symmetric_weights, fixed_states: None };
    run(&param, opts)
}

/// Optimizes only the weights, keeping the encoded states fixed.
pub fn optimize_weights(encoded_states: Vec<Vec<Complex64>>, opts: &OptimizeOptions) -> Result<OptimizeOutcome> {
    let n = encoded_states.len();
    let d = encoded_states.first().map_or(0, Vec::len);
    // Validates the states.
    QuantumStrategy::new(n, d.max(1), vec![1.0 / n.max(1) as f64; n], encoded_states.clone())?;
    if n < 2 {
        return Err(Error::invalid("need N >= 2"));
    }
    let param = Parameterization { n, d, symmetric_unitaries: false, symmetric_weights: false, fixed_states: Some(encoded_states) };
    run(&param, opts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionSaturationReport {
    pub n_inputs: usize,
    pub d_low: usize,
    pub d_high: usize,
    pub delta_low: f64,
    pub delta_high: f64,
    /// `delta_high - delta_low`.
    pub difference: f64,
    pub tol: f64,
    pub holds: bool,
}

/// Compares the best violations at `d = N+1` and `d = N+2` under the same
/// restart budget and seed. Beyond `N+1` internal levels nothing new can be
/// gained, so the difference should vanish up to optimizer error.
pub fn lemma3_check(n: usize, tol: f64, opts: &OptimizeOptions) -> Result<DimensionSaturationReport> {
    dimension_gap(n, n + 1, n + 2, tol, opts)
}

/// Best-found violation at `d_high` minus that at `d_low`, both with `opts`.
pub fn dimension_gap(n: usize, d_low: usize, d_high: usize, tol: f64, opts: &OptimizeOptions) -> Result<DimensionSaturationReport> {
    let low = optimize_violation(n, d_low, opts)?.delta;
    let high = optimize_violation(n, d_high, opts)?.delta;
    let difference = high - low;
    Ok(DimensionSaturationReport { n_inputs: n, d_low, d_high, delta_low: low, delta_high: high, difference, tol, holds: difference <= tol })
}
