//! Dense two-phase primal simplex with Bland's rule.
//!
//! Solves `maximize c.x subject to A x = b, x >= 0`. Generic over [`Scalar`]:
//! with rationals every pivot is exact; with floats comparisons use the
//! scalar's zero tolerance. Bland's rule rules out cycling in both cases.

use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct LpProblem<T> {
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
    pub c: Vec<T>,
}

#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
    /// Dual vector `y` with `A^T y >= c` and `b.y = objective`.
    pub duals: Vec<T>,
    pub pivots: usize,
}

#[derive(Debug, Clone)]
pub enum LpOutcome<T> {
    Optimal(LpSolution<T>),
    /// `y` with `y^T A <= 0` componentwise and `y.b > 0`.
    Infeasible { farkas: Vec<T> },
    Unbounded,
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    n_orig: usize,
    pivots: usize,
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = T::one() / self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() * inv.clone();
            }
        }
        self.rhs[row] = self.rhs[row].clone() * inv;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for i in 0..self.rows.len() {
            if i == row || self.rows[i][col].is_zero() {
                continue;
            }
            let factor = self.rows[i][col].clone();
            for (v, p) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v = v.clone() - factor.clone() * p.clone();
                }
            }
            self.rows[i][col] = T::zero();
            self.rhs[i] = self.rhs[i].clone() - factor * pivot_rhs.clone();
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// `y = c_B B^{-1}`, read off the artificial columns.
    fn duals(&self, cost: &[T]) -> Vec<T> {
        let m = self.rows.len();
        (0..m)
            .map(|j| {
                (0..m).fold(T::zero(), |acc, i| {
                    let cb = cost[self.basis[i]].clone();
                    if cb.is_zero() {
                        acc
                    } else {
                        acc + cb * self.rows[i][self.n_orig + j].clone()
                    }
                })
            })
            .collect()
    }
}

impl<T: Scalar> LpProblem<T> {
    pub fn solve(&self) -> LpOutcome<T> {
        solve(self)
    }
}

pub fn solve<T: Scalar>(p: &LpProblem<T>) -> LpOutcome<T> {
    let m = p.a.len();
    let n = p.c.len();
    let total = n + m;
    // Flip rows so that b >= 0; remember signs to map certificates back.
    let mut signs = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let flip = p.b[i] < T::zero();
        signs.push(if flip { -T::one() } else { T::one() });
        let mut row: Vec<T> = p.a[i].iter().map(|v| if flip { -v.clone() } else { v.clone() }).collect();
        row.extend((0..m).map(|j| if i == j { T::one() } else { T::zero() }));
        rows.push(row);
        rhs.push(if flip { -p.b[i].clone() } else { p.b[i].clone() });
    }
    let original: Vec<Vec<T>> = rows.clone();
    let mut t = Tableau { rows, rhs, basis: (n..total).collect(), n_orig: n, pivots: 0 };

    // Phase 1: maximize -sum(artificials).
    let mut phase1 = vec![T::zero(); total];
    for c in phase1.iter_mut().skip(n) {
        *c = -T::one();
    }
    run(&mut t, &original, &phase1, total);
    let infeasibility = t
        .basis
        .iter()
        .zip(&t.rhs)
        .filter(|(&b, _)| b >= n)
        .fold(T::zero(), |acc, (_, v)| acc + v.clone());
    if infeasibility > T::zero_tolerance() {
        // Phase-1 duals y' satisfy A'^T y' >= 0 on original columns and b'.y' = -w < 0.
        let y = t.duals(&phase1);
        let farkas = y.into_iter().zip(&signs).map(|(v, s)| -(v * s.clone())).collect();
        return LpOutcome::Infeasible { farkas };
    }
    // Drive remaining artificials out of the basis where possible.
    for i in 0..m {
        if t.basis[i] < n {
            continue;
        }
        if let Some(col) = (0..n).find(|&j| !t.rows[i][j].is_negligible() && !t.basis.contains(&j)) {
            t.pivot(i, col);
        }
    }
    let mut cost = p.c.clone();
    cost.extend((0..m).map(|_| T::zero()));
    if !run(&mut t, &original, &cost, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![T::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs[i].clone();
        }
    }
    let objective = x.iter().zip(&p.c).fold(T::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
    let duals = t.duals(&cost).into_iter().zip(&signs).map(|(v, s)| v * s.clone()).collect();
    LpOutcome::Optimal(LpSolution { x, objective, duals, pivots: t.pivots })
}

/// Primal simplex loop with Bland's rule; `false` on unboundedness.
fn run<T: Scalar>(t: &mut Tableau<T>, original: &[Vec<T>], cost: &[T], allowed: usize) -> bool {
    let m = t.rows.len();
    loop {
        let y = t.duals(cost);
        let mut entering = None;
        for j in 0..allowed {
            if t.basis.contains(&j) {
                continue;
            }
            let reduced = (0..m).fold(cost[j].clone(), |acc, i| {
                if y[i].is_zero() || original[i][j].is_zero() {
                    acc
                } else {
                    acc - y[i].clone() * original[i][j].clone()
                }
            });
            if reduced > T::zero_tolerance() {
                entering = Some(j);
                break;
            }
        }
        let Some(col) = entering else {
            return true;
        };
        let mut best: Option<(usize, T)> = None;
        for i in 0..m {
            let a = t.rows[i][col].clone();
            if a <= T::zero_tolerance() {
                continue;
            }
            let ratio = t.rhs[i].clone() / a;
            let better = match &best {
                None => true,
                Some((bi, br)) => {
                    let diff = ratio.clone() - br.clone();
                    if diff.is_negligible() {
                        t.basis[i] < t.basis[*bi]
                    } else {
                        diff < T::zero()
                    }
                }
            };
            if better {
                best = Some((i, ratio));
            }
        }
        let Some((row, _)) = best else {
            return false;
        };
        t.pivot(row, col);
    }
}
