//! Unconstrained local minimizers used by the restart optimizer.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Nelder–Mead followed by a quasi-Newton polish from its best vertex.
    #[default]
    Hybrid,
    NelderMead,
    /// BFGS with central-difference gradients and backtracking line search.
    Bfgs,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOptions {
    pub max_evaluations: usize,
    /// Stop when the simplex (or step) spread in `f` drops below this.
    pub f_tol: f64,
    pub x_tol: f64,
    pub initial_step: f64,
}

impl Default for LocalOptions {
    fn default() -> Self {
        Self { max_evaluations: 20_000, f_tol: 1e-14, x_tol: 1e-10, initial_step: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

pub fn minimize(backend: Backend, f: &dyn Fn(&[f64]) -> f64, x0: &[f64], opts: &LocalOptions) -> LocalResult {
    match backend {
        Backend::NelderMead => nelder_mead(f, x0, opts),
        Backend::Bfgs => bfgs(f, x0, opts),
        Backend::Hybrid => {
            let first = nelder_mead(f, x0, opts);
            let remaining = LocalOptions { max_evaluations: opts.max_evaluations.saturating_sub(first.evaluations).max(1), ..*opts };
            let polish = bfgs(f, &first.x, &remaining);
            let best = if polish.value <= first.value { polish.clone() } else { first.clone() };
            LocalResult {
                iterations: first.iterations + polish.iterations,
                evaluations: first.evaluations + polish.evaluations,
                converged: first.converged || polish.converged,
                ..best
            }
        }
    }
}

/// Nelder–Mead with dimension-adapted coefficients (Gao and Han).
pub fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], opts: &LocalOptions) -> LocalResult {
    let n = x0.len();
    if n == 0 {
        return LocalResult { x: vec![], value: f(&[]), iterations: 0, evaluations: 1, converged: true };
    }
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        let v = f(x);
        if v.is_nan() { f64::INFINITY } else { v }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let v = eval(&x);
        simplex.push((x, v));
    }
    let mut iterations = 0;
    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let f_spread = simplex[n].1 - simplex[0].1;
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let flat = f_spread <= opts.f_tol * (1.0 + simplex[0].1.abs()) && x_spread <= 1e-6;
        if flat || x_spread <= opts.x_tol {
            converged = true;
            break;
        }
        if evals.get() >= opts.max_evaluations {
            break;
        }
        iterations += 1;
        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / nf).collect();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (c - w)).collect() };
        let xr = along(alpha);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(beta);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = along(gamma);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(-gamma);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < fr.min(simplex[n].1) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = best.iter().zip(&vertex.0).map(|(b, v)| b + delta * (v - b)).collect();
                    let v = eval(&x);
                    *vertex = (x, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    LocalResult { x, value, iterations, evaluations: evals.get(), converged }
}

fn gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64, evals: &mut usize) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            *evals += 2;
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

pub fn bfgs(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], opts: &LocalOptions) -> LocalResult {
    let n = x0.len();
    let h = 1e-6;
    let mut evals = 1;
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    if n == 0 {
        return LocalResult { x, value: fx, iterations: 0, evaluations: evals, converged: true };
    }
    let mut g = gradient(f, &x, h, &mut evals);
    let mut inv_h = identity(n);
    let mut iterations = 0;
    let mut converged = false;
    while evals < opts.max_evaluations {
        if g.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-9 {
            converged = true;
            break;
        }
        iterations += 1;
        let mut dir: Vec<f64> = inv_h.iter().map(|row| -dot(row, &g)).collect();
        let mut slope = dot(&dir, &g);
        if slope >= 0.0 {
            inv_h = identity(n);
            dir = g.iter().map(|v| -v).collect();
            slope = dot(&dir, &g);
        }
        let mut step = 1.0;
        let mut accepted = None;
        while step > 1e-12 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + step * d).collect();
            let ft = f(&trial);
            evals += 1;
            if ft <= fx + 1e-4 * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            converged = true;
            break;
        };
        let g_new = gradient(f, &x_new, h, &mut evals);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let improvement = fx - f_new;
        x = x_new;
        fx = f_new;
        g = g_new;
        let sy = dot(&s, &y);
        if sy > 1e-16 {
            let hy: Vec<f64> = inv_h.iter().map(|row| dot(row, &y)).collect();
            let yhy = dot(&y, &hy);
            let rho = 1.0 / sy;
            for i in 0..n {
                for j in 0..n {
                    inv_h[i][j] += (1.0 + rho * yhy) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }
        if improvement.abs() <= opts.f_tol * (1.0 + fx.abs()) && s.iter().map(|v| v.abs()).fold(0.0, f64::max) <= opts.x_tol {
            converged = true;
            break;
        }
    }
    LocalResult { x, value: fx, iterations, evaluations: evals, converged }
}
