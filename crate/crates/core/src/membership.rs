//! Convex-combination certificates for membership in `C_{N,K}`.
//!
//! Membership is a feasibility LP over the junta vertices. A feasible point
//! yields weights on vertices; an infeasible one yields a Farkas vector, read
//! as a hyperplane separating the behavior from every vertex.

use serde_json::{json, Value};

use crate::behavior::Behavior;
use crate::boolean::BooleanFunction;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::juntas::{self, effective_variables};
use crate::scalar::Scalar;
use crate::simplex::{LpOutcome, LpProblem};

#[derive(Debug, Clone)]
pub enum Verdict<T> {
    Member {
        /// Vertices with positive weight, in truth-table order.
        weights: Vec<(BooleanFunction, T)>,
        /// Behavior lies on the relative boundary of the polytope.
        boundary: bool,
    },
    NonMember {
        /// `normal . v <= offset` for every vertex, `normal . P' > offset` for the input.
        normal: Vec<T>,
        offset: T,
    },
}

#[derive(Debug, Clone)]
pub struct Certificate<T> {
    pub n_inputs: usize,
    pub k: usize,
    pub verdict: Verdict<T>,
}

impl<T: Scalar> Certificate<T> {
    pub fn is_member(&self) -> bool {
        matches!(self.verdict, Verdict::Member { .. })
    }

    /// Regroups vertex weights by a routing support of `K` inputs: each junta is
    /// charged to the lexicographically first `K`-set containing its effective
    /// variables, and the conditional tables are the normalized mixtures.
    pub fn routing_form(&self) -> Option<Vec<RoutingTerm<T>>> {
        let Verdict::Member { weights, .. } = &self.verdict else {
            return None;
        };
        let mut terms: Vec<RoutingTerm<T>> = Vec::new();
        for (f, w) in weights {
            let support = routing_support(f, self.k);
            let local: Vec<T> = (0..1usize << self.k)
                .map(|local_x| {
                    let x = support.iter().enumerate().fold(0usize, |acc, (i, &j)| acc | ((local_x >> i & 1) << (j - 1)));
                    if f.eval(x) { T::one() } else { T::zero() }
                })
                .collect();
            match terms.iter_mut().find(|t| t.support == support) {
                Some(t) => {
                    for (acc, v) in t.p1.iter_mut().zip(&local) {
                        *acc = acc.clone() + w.clone() * v.clone();
                    }
                    t.weight = t.weight.clone() + w.clone();
                }
                None => terms.push(RoutingTerm {
                    support,
                    weight: w.clone(),
                    p1: local.into_iter().map(|v| w.clone() * v).collect(),
                }),
            }
        }
        for t in &mut terms {
            for v in &mut t.p1 {
                *v = v.clone() / t.weight.clone();
            }
        }
        terms.sort_by(|a, b| a.support.cmp(&b.support));
        Some(terms)
    }

    pub fn to_json(&self) -> Value {
        match &self.verdict {
            Verdict::Member { weights, boundary } => json!({
                "n_inputs": self.n_inputs,
                "k": self.k,
                "member": true,
                "boundary": boundary,
                "weights": weights.iter().map(|(f, w)| json!({"vertex": f.to_hex(), "weight": w.render()})).collect::<Vec<_>>(),
            }),
            Verdict::NonMember { normal, offset } => json!({
                "n_inputs": self.n_inputs,
                "k": self.k,
                "member": false,
                "separating_hyperplane": {
                    "normal": normal.iter().map(Scalar::render).collect::<Vec<_>>(),
                    "offset": offset.render(),
                },
            }),
        }
    }
}

/// One term `q_S P_S(a | x_S)` of a classical routing decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingTerm<T> {
    /// 1-based input indices, increasing.
    pub support: Vec<usize>,
    pub weight: T,
    /// `P_S(1 | x_S)` indexed by the local input (bit `i` holds `x_{support[i]}`).
    pub p1: Vec<T>,
}

fn routing_support(f: &BooleanFunction, k: usize) -> Vec<usize> {
    let mut support = effective_variables(f);
    let mut j = 1;
    while support.len() < k {
        if !support.contains(&j) {
            support.push(j);
        }
        j += 1;
    }
    support.sort_unstable();
    support
}

/// Decides `beh ∈ C_{N,K}`. Rational behaviors get exact certificates; float
/// behaviors run the same simplex with tolerance `1e-9`.
pub fn membership_c<T: Scalar>(beh: &Behavior<T>, k: usize, junta_budget: u128, exec: Exec) -> Result<Certificate<T>> {
    let n = beh.n_inputs();
    let vertices = juntas::enumerate_k_juntas(n, k, junta_budget, exec)?;
    let dim = beh.len();
    let nv = vertices.len();
    let column = |f: &BooleanFunction, x: usize| if f.eval(x) { T::one() } else { T::zero() };

    let mut a: Vec<Vec<T>> = (0..dim).map(|x| vertices.iter().map(|f| column(f, x)).collect()).collect();
    a.push(vec![T::one(); nv]);
    let mut b: Vec<T> = beh.p1_table().to_vec();
    b.push(T::one());
    let feasibility = LpProblem { a: a.clone(), b, c: vec![T::zero(); nv] };

    match feasibility.solve() {
        LpOutcome::Infeasible { farkas } => {
            let offset = -farkas[dim].clone();
            let normal = farkas[..dim].to_vec();
            Ok(Certificate { n_inputs: n, k, verdict: Verdict::NonMember { normal, offset } })
        }
        LpOutcome::Unbounded => Err(Error::DegenerateLp("feasibility program reported unbounded".into())),
        LpOutcome::Optimal(sol) => {
            let weights: Vec<(BooleanFunction, T)> = vertices
                .iter()
                .zip(sol.x)
                .filter(|(_, w)| !w.is_negligible())
                .map(|(f, w)| (f.clone(), w))
                .collect();
            let boundary = on_relative_boundary(beh, &vertices, a)?;
            Ok(Certificate { n_inputs: n, k, verdict: Verdict::Member { weights, boundary } })
        }
    }
}

/// Pushes the behavior away from the vertex centroid `c`: the largest `t` with
/// `c + t (beh - c)` in the hull is `1` exactly on the relative boundary.
fn on_relative_boundary<T: Scalar>(beh: &Behavior<T>, vertices: &[BooleanFunction], mut a: Vec<Vec<T>>) -> Result<bool> {
    let dim = beh.len();
    let nv = T::from_int(vertices.len() as i64);
    let center: Vec<T> = (0..dim)
        .map(|x| vertices.iter().filter(|f| f.eval(x)).fold(T::zero(), |acc, _| acc + T::one()) / nv.clone())
        .collect();
    let direction: Vec<T> = (0..dim).map(|x| beh.p1(x) - center[x].clone()).collect();
    if direction.iter().all(Scalar::is_negligible) {
        return Ok(false);
    }
    for (x, row) in a.iter_mut().enumerate().take(dim) {
        row.push(-direction[x].clone());
    }
    a[dim].push(T::zero());
    let mut b = center;
    b.push(T::one());
    let mut c = vec![T::zero(); vertices.len()];
    c.push(T::one());
    match (LpProblem { a, b, c }).solve() {
        LpOutcome::Optimal(sol) => Ok((sol.objective - T::one()).is_negligible()),
        LpOutcome::Unbounded => Err(Error::DegenerateLp("boundary program unbounded for a nonzero direction".into())),
        LpOutcome::Infeasible { .. } => Err(Error::DegenerateLp("boundary program infeasible at the centroid".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::RationalBehavior;
    use crate::exact::{int, rat, Rational};
    use crate::juntas::DEFAULT_JUNTA_BUDGET;

    fn check_separation(cert: &Certificate<Rational>, beh: &RationalBehavior) {
        let Verdict::NonMember { normal, offset } = &cert.verdict else { panic!("expected non-member") };
        let lhs: Rational = normal.iter().zip(beh.p1_table()).map(|(a, b)| a * b).sum();
        assert!(lhs > *offset);
        for f in juntas::enumerate_k_juntas(cert.n_inputs, cert.k, DEFAULT_JUNTA_BUDGET, Exec::Sequential).unwrap() {
            let v = RationalBehavior::deterministic(&f);
            let val: Rational = normal.iter().zip(v.p1_table()).map(|(a, b)| a * b).sum();
            assert!(val <= *offset);
        }
    }

    #[test]
    fn vertex_is_a_point_mass() {
        let f = BooleanFunction::variable(3, 2).unwrap();
        let beh = RationalBehavior::deterministic(&f);
        let cert = membership_c(&beh, 1, DEFAULT_JUNTA_BUDGET, Exec::Sequential).unwrap();
        let Verdict::Member { weights, boundary } = &cert.verdict else { panic!() };
        assert_eq!(weights.len(), 1);
        assert_eq!(weights[0], (f, int(1)));
        assert!(*boundary);
    }

    #[test]
    fn uniform_behavior_mixes_constants() {
        let beh = RationalBehavior::constant(3, rat(1, 2)).unwrap();
        let cert = membership_c(&beh, 0, DEFAULT_JUNTA_BUDGET, Exec::Sequential).unwrap();
        let Verdict::Member { weights, boundary } = &cert.verdict else { panic!() };
        assert_eq!(weights.len(), 2);
        assert!(weights.iter().all(|(_, w)| *w == rat(1, 2)));
        assert!(!boundary);
        // In C_{3,1} the centroid is interior as well.
        let cert = membership_c(&beh, 1, DEFAULT_JUNTA_BUDGET, Exec::Sequential).unwrap();
        assert!(matches!(cert.verdict, Verdict::Member { boundary: false, .. }));
    }

    #[test]
    fn parity_is_outside_c21() {
        let beh = RationalBehavior::deterministic(&BooleanFunction::parity(2).unwrap());
        let cert = membership_c(&beh, 1, DEFAULT_JUNTA_BUDGET, Exec::Sequential).unwrap();
        check_separation(&cert, &beh);
    }

    #[test]
    fn routing_form_reproduces_behavior() {
        // A mixture of 2-juntas, so it lies inside C_{3,2}.
        let fs = [
            (BooleanFunction::variable(3, 1).unwrap(), rat(1, 2)),
            (BooleanFunction::variable(3, 2).unwrap().negate(), rat(1, 3)),
            (BooleanFunction::from_fn(3, |x| x & 0b101 == 0b101).unwrap(), rat(1, 6)),
        ];
        let beh = RationalBehavior::from_fn(3, |x| {
            fs.iter().filter(|(f, _)| f.eval(x)).map(|(_, w)| w.clone()).sum::<Rational>()
        })
        .unwrap();
        let cert = membership_c(&beh, 2, DEFAULT_JUNTA_BUDGET, Exec::Sequential).unwrap();
        assert!(cert.is_member());
        let terms = cert.routing_form().unwrap();
        let total: Rational = terms.iter().map(|t| t.weight.clone()).sum();
        assert_eq!(total, int(1));
        for x in 0..8 {
            let p: Rational = terms
                .iter()
                .map(|t| {
                    let local = t.support.iter().enumerate().fold(0, |acc, (i, &j)| acc | ((x >> (j - 1) & 1) << i));
                    &t.weight * &t.p1[local]
                })
                .sum();
            assert_eq!(p, beh.p1(x));
        }
    }

    #[test]
    fn float_flavor_agrees() {
        let beh = RationalBehavior::deterministic(&BooleanFunction::parity(2).unwrap()).to_float();
        let cert = membership_c(&beh, 1, DEFAULT_JUNTA_BUDGET, Exec::Sequential).unwrap();
        assert!(!cert.is_member());
        let inside = crate::behavior::FloatBehavior::constant(2, 0.25).unwrap();
        assert!(membership_c(&inside, 1, DEFAULT_JUNTA_BUDGET, Exec::Sequential).unwrap().is_member());
    }
}
