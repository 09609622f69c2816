//! The symmetrized second-order interference program for the fingerprinting game.
//!
//! Averaging a behavior over input permutations keeps both its fingerprinting
//! value and its membership in `J_{N,2}`, so the optimum over `J_{N,2}` is
//! attained on symmetric behaviors. Their spectra have three free numbers
//! `z = (z0, z1, z2)`, one per Walsh weight, and on inputs of Hamming weight `h`
//!
//! ```text
//! P(1|x) = z0 + (N - 2h) z1 + c(h) z2,    c(h) = N(N-1)/2 - 2h(N-h).
//! ```
//!
//! The sign in `c(h)` comes from counting pairs `{i, j}`: `C(h,2) + C(N-h,2)`
//! pairs have `x_i = x_j` and contribute `+1`, while the `h(N-h)` mixed pairs
//! contribute `-1`.

use serde::Serialize;
use serde_json::{json, Value};

use crate::behavior::RationalBehavior;
use crate::error::{Error, Result};
use crate::exact::{format_rational, int, rat, Rational};
use crate::simplex::{LpOutcome, LpProblem};

/// Largest `N` accepted by the closed forms and the LP (keeps `i128` exact).
pub const MAX_LP_INPUTS: usize = 1000;

/// Spectrum of a permutation-symmetric behavior, one entry per Walsh weight 0, 1, 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricSpectrum {
    pub n_inputs: usize,
    pub z: [Rational; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `P(1|x) >= 0`
    Lower,
    /// `P(1|x) <= 1`
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TightConstraint {
    /// Hamming weight of the inputs the constraint refers to.
    pub h: usize,
    pub side: Side,
}

/// `0 <= coefficients . z <= 1` on inputs of Hamming weight `h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpConstraint {
    pub h: usize,
    pub coefficients: [Rational; 3],
    pub lower: Rational,
    pub upper: Rational,
}

/// `delta = coefficients . z + constant`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpObjective {
    pub coefficients: [Rational; 3],
    pub constant: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpReport {
    pub n_inputs: usize,
    pub delta: Rational,
    pub z: SymmetricSpectrum,
    pub tight: Vec<TightConstraint>,
}

impl LpReport {
    pub fn to_json(&self) -> Value {
        json!({
            "N": self.n_inputs,
            "delta": format_rational(&self.delta),
            "z": self.z.z.iter().map(format_rational).collect::<Vec<_>>(),
            "tight_constraints": self.tight,
        })
    }
}

fn check_n(n: usize) -> Result<()> {
    if !(2..=MAX_LP_INPUTS).contains(&n) {
        return Err(Error::invalid(format!("N must lie in 2..={MAX_LP_INPUTS}, got {n}")));
    }
    Ok(())
}

/// Integer row `(1, N - 2h, c(h))`.
fn row_i128(n: usize, h: usize) -> [i128; 3] {
    let (n, h) = (n as i128, h as i128);
    [1, n - 2 * h, n * (n - 1) / 2 - 2 * h * (n - h)]
}

/// Integer objective `(N-1, N(N-3), N(N-1)(N-5)/2)`; `delta = (o.z - (N-1)) / (N+1)`.
fn objective_i128(n: usize) -> [i128; 3] {
    let n = n as i128;
    [n - 1, n * (n - 3), n * (n - 1) * (n - 5) / 2]
}

fn to_rational3(v: [i128; 3]) -> [Rational; 3] {
    v.map(|x| Rational::from_integer(x.into()))
}

pub fn lp_constraints(n: usize) -> Result<Vec<LpConstraint>> {
    check_n(n)?;
    Ok((0..=n)
        .map(|h| LpConstraint { h, coefficients: to_rational3(row_i128(n, h)), lower: int(0), upper: int(1) })
        .collect())
}

pub fn objective_coefficients(n: usize) -> Result<LpObjective> {
    check_n(n)?;
    let scale = rat(1, n as i64 + 1);
    Ok(LpObjective {
        coefficients: to_rational3(objective_i128(n)).map(|c| c * scale.clone()),
        constant: rat(1 - n as i64, n as i64 + 1),
    })
}

/// `P(1|x)` for `|x| = h`, `h = 0..=N`.
pub fn symmetric_profile(z: &SymmetricSpectrum) -> Vec<Rational> {
    let n = z.n_inputs;
    (0..=n)
        .map(|h| to_rational3(row_i128(n, h)).iter().zip(&z.z).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn objective_value(z: &SymmetricSpectrum) -> Result<Rational> {
    let obj = objective_coefficients(z.n_inputs)?;
    Ok(obj.coefficients.iter().zip(&z.z).map(|(a, b)| a * b).sum::<Rational>() + obj.constant)
}

pub fn is_feasible(z: &SymmetricSpectrum) -> bool {
    symmetric_profile(z).iter().all(|p| *p >= int(0) && *p <= int(1))
}

pub fn tight_constraints(z: &SymmetricSpectrum) -> Vec<TightConstraint> {
    let mut out = Vec::new();
    for (h, p) in symmetric_profile(z).iter().enumerate() {
        if *p == int(0) {
            out.push(TightConstraint { h, side: Side::Lower });
        }
        if *p == int(1) {
            out.push(TightConstraint { h, side: Side::Upper });
        }
    }
    out
}

fn det3(m: &[[i128; 3]; 3]) -> i128 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Exact optimum by enumerating every triple of constraint planes.
///
/// Each nonsingular triple gives a candidate vertex; feasible candidates are
/// compared exactly and the first maximizer in enumeration order is kept.
pub fn solve_second_order_lp(n: usize) -> Result<LpReport> {
    check_n(n)?;
    let planes: Vec<([i128; 3], i128)> = (0..=n).flat_map(|h| [(row_i128(n, h), 0), (row_i128(n, h), 1)]).collect();
    let rows: Vec<[i128; 3]> = (0..=n).map(|h| row_i128(n, h)).collect();
    let obj = objective_i128(n);
    // Best vertex as integer numerators over a positive denominator.
    let mut best: Option<([i128; 3], i128, i128)> = None;
    for i in 0..planes.len() {
        for j in i + 1..planes.len() {
            for k in j + 1..planes.len() {
                let m = [planes[i].0, planes[j].0, planes[k].0];
                let mut det = det3(&m);
                if det == 0 {
                    continue;
                }
                let rhs = [planes[i].1, planes[j].1, planes[k].1];
                let mut num = [0i128; 3];
                for (col, slot) in num.iter_mut().enumerate() {
                    let mut mc = m;
                    for r in 0..3 {
                        mc[r][col] = rhs[r];
                    }
                    *slot = det3(&mc);
                }
                if det < 0 {
                    det = -det;
                    num = num.map(|v| -v);
                }
                let feasible = rows.iter().all(|r| {
                    let v = r[0] * num[0] + r[1] * num[1] + r[2] * num[2];
                    (0..=det).contains(&v)
                });
                if !feasible {
                    continue;
                }
                let value = obj[0] * num[0] + obj[1] * num[1] + obj[2] * num[2];
                if best.is_none_or(|(_, bd, bv)| value * bd > bv * det) {
                    best = Some((num, det, value));
                }
            }
        }
    }
    let (num, det, _) = best.ok_or_else(|| Error::Internal("second-order program has no feasible vertex".into()))?;
    let den = Rational::from_integer(det.into());
    let z = SymmetricSpectrum { n_inputs: n, z: to_rational3(num).map(|v| v / den.clone()) };
    Ok(LpReport { n_inputs: n, delta: objective_value(&z)?, tight: tight_constraints(&z), z })
}

/// The same program through the exact simplex, as an independent check.
///
/// `z` is split into nonnegative parts and every bound gets a slack column.
pub fn solve_second_order_lp_simplex(n: usize) -> Result<(Rational, SymmetricSpectrum)> {
    check_n(n)?;
    let m = n + 1;
    let cols = 6 + 2 * m;
    let mut a = Vec::with_capacity(2 * m);
    let mut b = Vec::with_capacity(2 * m);
    for h in 0..=n {
        let r = to_rational3(row_i128(n, h));
        for (upper, slack_col, slack_sign) in [(true, 6 + h, 1), (false, 6 + m + h, -1)] {
            let mut row = vec![int(0); cols];
            for j in 0..3 {
                row[j] = r[j].clone();
                row[3 + j] = -r[j].clone();
            }
            row[slack_col] = int(slack_sign);
            a.push(row);
            b.push(int(i64::from(upper)));
        }
    }
    let o = objective_coefficients(n)?;
    let mut c = vec![int(0); cols];
    for j in 0..3 {
        c[j] = o.coefficients[j].clone();
        c[3 + j] = -o.coefficients[j].clone();
    }
    match (LpProblem { a, b, c }).solve() {
        LpOutcome::Optimal(sol) => {
            let z = SymmetricSpectrum { n_inputs: n, z: std::array::from_fn(|j| sol.x[j].clone() - sol.x[3 + j].clone()) };
            Ok((sol.objective + o.constant, z))
        }
        LpOutcome::Infeasible { .. } => Err(Error::Internal("second-order program reported infeasible".into())),
        LpOutcome::Unbounded => Err(Error::Internal("second-order program reported unbounded".into())),
    }
}

/// Best fingerprinting violation over all of `J_{N,2}`, without symmetrizing.
///
/// Variables are the `2^N` values `P(1|x)`; every Walsh coefficient of weight
/// above two is forced to zero. Intended as an oracle for small `N`.
pub fn full_space_lp_delta(n: usize) -> Result<Rational> {
    if !(2..=6).contains(&n) {
        return Err(Error::Budget { what: "full-space second-order program inputs", required: n as u128, budget: 6 });
    }
    let len = 1usize << n;
    let cols = 2 * len;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for x in 0..len {
        let mut row = vec![int(0); cols];
        row[x] = int(1);
        row[len + x] = int(1);
        a.push(row);
        b.push(int(1));
    }
    for s in (0..len).filter(|s: &usize| s.count_ones() > 2) {
        let mut row = vec![int(0); cols];
        for (x, slot) in row.iter_mut().take(len).enumerate() {
            *slot = if (x & s).count_ones() % 2 == 0 { int(1) } else { int(-1) };
        }
        a.push(row);
        b.push(int(0));
    }
    // Winning probability is (1 - p_0 + sum_k p_{e_k}) / (N+1).
    let mut c = vec![int(0); cols];
    c[0] = int(-1);
    for k in 0..n {
        c[1 << k] = int(1);
    }
    match (LpProblem { a, b, c }).solve() {
        LpOutcome::Optimal(sol) => Ok((int(1) + sol.objective) / int(n as i64 + 1) - rat(n as i64, n as i64 + 1)),
        _ => Err(Error::Internal("full-space program has no optimum".into())),
    }
}

/// `z* = ((3N^2 - 7N)/2, N - 3, -1) / (2N^2 - 6N + 4)`.
pub fn zstar_closed_form(n: usize) -> Result<SymmetricSpectrum> {
    check_n(n)?;
    let n = n as i64;
    let den = 2 * n * n - 6 * n + 4;
    Ok(SymmetricSpectrum { n_inputs: n as usize, z: [rat(3 * n * n - 7 * n, 2 * den), rat(n - 3, den), rat(-1, den)] })
}

/// The full behavior table of a symmetric spectrum.
pub fn reconstruct_behavior(z: &SymmetricSpectrum) -> Result<RationalBehavior> {
    let profile = symmetric_profile(z);
    RationalBehavior::new(z.n_inputs, (0..1usize << z.n_inputs).map(|x| profile[x.count_ones() as usize].clone()).collect())
}

/// `2 / ((N-2)(N-1)(N+1))`, valid for `N > 3`.
pub fn theorem2_delta(n: usize) -> Result<Rational> {
    if n <= 3 {
        return Err(Error::invalid(format!("the closed-form second-order optimum holds only for N > 3, got N = {n}")));
    }
    check_n(n)?;
    let n = n as i64;
    Ok(rat(2, (n - 2) * (n - 1) * (n + 1)))
}

/// One edge of the feasible region leaving `z*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeCheck {
    pub direction: [Rational; 3],
    /// The constraint that stops being tight along the edge.
    pub released: TightConstraint,
    /// Change of `delta` per unit step.
    pub slope: Rational,
    pub expected_slope: Rational,
    /// `row . direction` for the released constraint.
    pub released_rate: Rational,
    /// Both other tight constraints stay tight along the edge.
    pub keeps_others_tight: bool,
    /// Every sampled positive step is infeasible and every sampled small negative step is feasible.
    pub forces_nonpositive_step: bool,
}

impl EdgeCheck {
    pub fn passes(&self) -> bool {
        self.keeps_others_tight && self.forces_nonpositive_step && self.slope == self.expected_slope && self.slope > int(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborReport {
    pub n_inputs: usize,
    pub tight_at_optimum: Vec<TightConstraint>,
    pub edges: Vec<EdgeCheck>,
}

impl NeighborReport {
    pub fn passes(&self) -> bool {
        let expected = [
            TightConstraint { h: 1, side: Side::Upper },
            TightConstraint { h: 2, side: Side::Upper },
            TightConstraint { h: self.n_inputs, side: Side::Lower },
        ];
        self.tight_at_optimum == expected && self.edges.len() == 3 && self.edges.iter().all(EdgeCheck::passes)
    }
}

/// Re-checks optimality of `z*` edge by edge.
///
/// At `z*` exactly three constraints are tight, so three edges leave it. Along
/// each, `delta` grows for positive steps while the released constraint is
/// violated for positive steps; hence every feasible neighbor has lower value.
pub fn neighbor_optimality_check(n: usize) -> Result<NeighborReport> {
    if n <= 3 {
        return Err(Error::invalid(format!("the edge structure at z* holds only for N > 3, got N = {n}")));
    }
    let zs = zstar_closed_form(n)?;
    let tight_at_optimum = tight_constraints(&zs);
    let obj = objective_coefficients(n)?;
    let ni = n as i64;
    let directions: [([i64; 3], TightConstraint, Rational); 3] = [
        ([-ni * ni + 5 * ni - 8, 2 * (ni - 3), -2], TightConstraint { h: n, side: Side::Lower }, rat(8, ni + 1)),
        ([ni * (ni * ni - 4 * ni + 3), 2 - 2 * ni, 2 - 2 * ni], TightConstraint { h: 2, side: Side::Upper }, rat(4 * ni * (ni - 1), ni + 1)),
        ([-ni * (ni * ni - 7 * ni + 10), 4 * ni - 8, 2 * ni - 4], TightConstraint { h: 1, side: Side::Upper }, rat(4 * ni * (ni * ni - 5 * ni + 6), ni + 1)),
    ];
    let row = |h: usize| to_rational3(row_i128(n, h));
    let dot = |a: &[Rational; 3], b: &[Rational; 3]| a.iter().zip(b).map(|(x, y)| x * y).sum::<Rational>();
    let mut edges = Vec::new();
    for (dir, released, expected_slope) in directions {
        let direction = dir.map(int);
        let keeps_others_tight = tight_at_optimum.iter().filter(|t| **t != released).all(|t| dot(&row(t.h), &direction) == int(0));
        let released_rate = dot(&row(released.h), &direction);
        let slope = dot(&obj.coefficients, &direction);
        let at = |t: &Rational| SymmetricSpectrum { n_inputs: n, z: std::array::from_fn(|j| zs.z[j].clone() + t * &direction[j]) };
        let positive = [rat(1, 1_000_000), rat(1, 1000), rat(1, 10), int(1), int(10)];
        let negative = [rat(-1, 1_000_000_000), rat(-1, 1_000_000_000_000)];
        let forces_nonpositive_step = positive.iter().all(|t| !is_feasible(&at(t))) && negative.iter().all(|t| is_feasible(&at(t)));
        edges.push(EdgeCheck { direction, released, slope, expected_slope, released_rate, keeps_others_tight, forces_nonpositive_step });
    }
    Ok(NeighborReport { n_inputs: n, tight_at_optimum, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolean::BooleanFunction;
    use crate::exec::Exec;
    use crate::games::{fingerprinting_game, game_value};
    use crate::interference::is_member_j_exact;
    use crate::juntas::{enumerate_k_juntas, DEFAULT_JUNTA_BUDGET};
    use crate::membership::membership_c;
    use crate::symmetry::symmetrize;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Brute-force oracle for `c(h)`: sum over pairs of `(-1)^{x_i + x_j}`.
    fn pair_sum(n: usize, h: usize) -> i128 {
        let x = (1usize << h) - 1;
        let mut s = 0;
        for i in 0..n {
            for j in i + 1..n {
                s += if ((x >> i) ^ (x >> j)) & 1 == 0 { 1 } else { -1 };
            }
        }
        s
    }

    #[test]
    fn constraint_rows() {
        for n in 2..=9 {
            for c in lp_constraints(n).unwrap() {
                assert_eq!(c.coefficients[2], int(pair_sum(n, c.h) as i64));
            }
        }
        let rows = lp_constraints(4).unwrap();
        assert_eq!(rows[0].coefficients[2], int(6));
        assert_eq!(rows[4].coefficients[2], int(6));
        assert_eq!(rows[1].coefficients[2], int(0));
    }

    #[test]
    fn objective_examples() {
        assert_eq!(objective_coefficients(5).unwrap().coefficients[2], int(0));
        let four = objective_coefficients(4).unwrap();
        assert_eq!(four.coefficients, [rat(3, 5), rat(4, 5), rat(-6, 5)]);
        assert_eq!(four.constant, rat(-3, 5));
    }

    #[test]
    fn objective_matches_game_value_of_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 2..=6 {
            let z = SymmetricSpectrum { n_inputs: n, z: std::array::from_fn(|_| rat(rng.random_range(-20..20), 97)) };
            let profile = symmetric_profile(&z);
            // Fingerprinting value of the (possibly unphysical) table, computed directly.
            let value = (int(1) - profile[0].clone() + int(n as i64) * profile[1].clone()) / int(n as i64 + 1);
            assert_eq!(objective_value(&z).unwrap(), value - rat(n as i64, n as i64 + 1));
        }
    }

    #[test]
    fn lp_optimum_matches_closed_forms() {
        for n in 4..=30 {
            let report = solve_second_order_lp(n).unwrap();
            assert_eq!(report.delta, theorem2_delta(n).unwrap(), "N={n}");
            assert_eq!(report.z, zstar_closed_form(n).unwrap(), "N={n}");
            assert_eq!(report.tight.len(), 3);
        }
        assert_eq!(theorem2_delta(4).unwrap(), rat(1, 15));
        assert_eq!(theorem2_delta(5).unwrap(), rat(1, 36));
        assert_eq!(theorem2_delta(6).unwrap(), rat(1, 70));
        assert_eq!(theorem2_delta(10).unwrap(), rat(1, 396));
        assert!(theorem2_delta(3).is_err());
    }

    #[test]
    fn simplex_backend_agrees() {
        for n in 2..=14 {
            let (delta, z) = solve_second_order_lp_simplex(n).unwrap();
            let report = solve_second_order_lp(n).unwrap();
            assert_eq!(delta, report.delta, "N={n}");
            assert!(is_feasible(&z));
            assert_eq!(objective_value(&z).unwrap(), delta);
        }
    }

    #[test]
    fn full_space_oracle_agrees_with_symmetric_program() {
        for n in 2..=5 {
            assert_eq!(full_space_lp_delta(n).unwrap(), solve_second_order_lp(n).unwrap().delta, "N={n}");
        }
        assert_eq!(full_space_lp_delta(2).unwrap(), rat(1, 3));
    }

    #[test]
    fn zstar_profile() {
        let z = zstar_closed_form(4).unwrap();
        assert_eq!(z.z, [rat(5, 6), rat(1, 12), rat(-1, 12)]);
        for n in 4..=30i64 {
            let profile = symmetric_profile(&zstar_closed_form(n as usize).unwrap());
            for (h, p) in profile.iter().enumerate() {
                let h = h as i64;
                assert_eq!(*p, rat((n - h) * (h + n - 3), (n - 2) * (n - 1)));
            }
            assert_eq!(int(1) - profile[0].clone(), rat(2, n * n - 3 * n + 2));
            assert_eq!(profile[1], int(1));
            assert_eq!(profile[2], int(1));
            assert_eq!(profile[n as usize], int(0));
        }
    }

    #[test]
    fn reconstruction_is_second_order_but_not_classical() {
        for n in 4..=8 {
            let beh = reconstruct_behavior(&zstar_closed_form(n).unwrap()).unwrap();
            assert!(is_member_j_exact(&beh, 2));
            assert!(beh.as_deterministic().is_none());
        }
        let beh = reconstruct_behavior(&zstar_closed_form(4).unwrap()).unwrap();
        assert_eq!(beh.p0(0), rat(1, 3));
        let cert = membership_c(&beh, 3, DEFAULT_JUNTA_BUDGET, Exec::Sequential).unwrap();
        assert!(!cert.is_member());
    }

    #[test]
    fn symmetrization_preserves_value_and_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 3..=5 {
            let game = fingerprinting_game::<Rational>(n).unwrap();
            let juntas = enumerate_k_juntas(n, 2, 1 << 20, Exec::Sequential).unwrap();
            let zs = if n > 3 { Some(reconstruct_behavior(&zstar_closed_form(n).unwrap()).unwrap()) } else { None };
            for _ in 0..5 {
                let picks: Vec<&BooleanFunction> = (0..3).map(|_| &juntas[rng.random_range(0..juntas.len())]).collect();
                let mut p1 = vec![int(0); 1 << n];
                for f in &picks {
                    for (x, v) in p1.iter_mut().enumerate() {
                        if f.eval(x) {
                            *v += rat(1, 4);
                        }
                    }
                }
                if let Some(zs) = &zs {
                    for (x, v) in p1.iter_mut().enumerate() {
                        *v += zs.p1(x) / int(4);
                    }
                } else {
                    for v in p1.iter_mut() {
                        *v += rat(1, 8);
                    }
                }
                let beh = RationalBehavior::new(n, p1).unwrap();
                assert!(is_member_j_exact(&beh, 2));
                let sym = symmetrize(&beh).unwrap();
                assert_eq!(game_value(&game, &sym), game_value(&game, &beh));
                assert!(is_member_j_exact(&sym, 2));
            }
        }
    }

    #[test]
    fn neighbor_check_passes() {
        for n in 4..=10 {
            let report = neighbor_optimality_check(n).unwrap();
            assert!(report.passes(), "N={n}: {report:?}");
            for e in &report.edges {
                assert_eq!(e.released_rate.clone() * e.released_rate.clone(), int(((4 * n * n - 12 * n + 8) as i64).pow(2)));
            }
        }
        assert!(neighbor_optimality_check(3).is_err());
    }

    #[test]
    fn report_json() {
        let v = solve_second_order_lp(4).unwrap().to_json();
        assert_eq!(v["delta"], "1/15");
        assert_eq!(v["z"][0], "5/6");
        assert_eq!(v["tight_constraints"][0]["side"], "upper");
    }
}
