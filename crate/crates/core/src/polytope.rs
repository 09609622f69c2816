//! Exact rational geometry of the classical polytopes `C_{N,K}`.
//!
//! Points live in `P'` coordinates: the `2^N` values `P(1|x)`. Facets come
//! from a double description run on the homogenized cone restricted to the
//! affine hull; faces are the closed sets of the vertex–facet incidence.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::behavior::RationalBehavior;
use crate::boolean::BooleanFunction;
use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::exec::Exec;
use crate::juntas::{self, combinations};
use crate::symmetry::HyperoctahedralElement;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolytopeBudget {
    pub max_vertices: usize,
    pub max_affine_dim: usize,
}

impl Default for PolytopeBudget {
    fn default() -> Self {
        Self { max_vertices: 64, max_affine_dim: 8 }
    }
}

/// `normal . x <= offset`, with `normal` a primitive integer vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Facet {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl Facet {
    pub fn slack(&self, point: &[Rational]) -> Rational {
        &self.offset - exact::dot(&self.normal, point)
    }
}

#[derive(Debug, Clone)]
pub struct RationalPolytope {
    ambient_dim: usize,
    vertices: Vec<Vec<Rational>>,
    affine_dim: usize,
    facets: Option<Vec<Facet>>,
    /// `incidence[f]` is the set of vertices on facet `f`.
    incidence: Option<Vec<VertexSet>>,
}

/// Bitset over vertex indices.
pub type VertexSet = Vec<u64>;

impl RationalPolytope {
    pub fn from_vertices(vertices: Vec<Vec<Rational>>) -> Result<Self> {
        let ambient_dim = vertices.first().map(Vec::len).ok_or_else(|| Error::invalid("no vertices"))?;
        if vertices.iter().any(|v| v.len() != ambient_dim) {
            return Err(Error::invalid("vertices differ in dimension"));
        }
        let affine_dim = affine_dimension(&vertices);
        Ok(Self { ambient_dim, vertices, affine_dim, facets: None, incidence: None })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vertices(&self) -> &[Vec<Rational>] {
        &self.vertices
    }

    pub fn affine_dim(&self) -> usize {
        self.affine_dim
    }

    pub fn facets(&self) -> Option<&[Facet]> {
        self.facets.as_deref()
    }

    pub fn incidence(&self) -> Option<&[VertexSet]> {
        self.incidence.as_deref()
    }

    /// Centroid of the vertex list.
    pub fn centroid(&self) -> Vec<Rational> {
        let n = Rational::from_integer(BigInt::from(self.vertices.len()));
        (0..self.ambient_dim)
            .map(|i| self.vertices.iter().map(|v| v[i].clone()).sum::<Rational>() / &n)
            .collect()
    }

    /// JSON report with vertices and facets as rational strings, plus the f-vector.
    pub fn report(&self) -> Result<Value> {
        let vertices: Vec<Vec<String>> =
            self.vertices.iter().map(|v| v.iter().map(exact::format_rational).collect()).collect();
        let facets: Option<Vec<Value>> = self.facets.as_ref().map(|fs| {
            fs.iter()
                .map(|f| {
                    json!({
                        "normal": f.normal.iter().map(exact::format_rational).collect::<Vec<_>>(),
                        "offset": exact::format_rational(&f.offset),
                    })
                })
                .collect()
        });
        let f_vector = if self.facets.is_some() { Some(f_vector(self)?) } else { None };
        Ok(json!({
            "ambient_dim": self.ambient_dim,
            "affine_dim": self.affine_dim,
            "vertices": vertices,
            "facets": facets,
            "f_vector": f_vector,
        }))
    }
}

/// Deterministic behaviors of all `K`-juntas, in truth-table order.
pub fn vertices_of_c(n: usize, k: usize, junta_budget: u128, exec: Exec) -> Result<RationalPolytope> {
    let juntas = juntas::enumerate_k_juntas(n, k, junta_budget, exec)?;
    RationalPolytope::from_vertices(juntas.iter().map(|f| behavior_point(&RationalBehavior::deterministic(f))).collect())
}

pub fn behavior_point(b: &RationalBehavior) -> Vec<Rational> {
    b.p1_table().to_vec()
}

/// Union of the images of the hypercube `C_{K,K} ⊕ 0^{N-K}` under the
/// permutations sending `1..K` onto each `K`-subset of inputs.
pub fn lemma1_hull_vertices(n: usize, k: usize, junta_budget: u128) -> Result<Vec<RationalBehavior>> {
    if k > n {
        return Err(Error::invalid(format!("K = {k} exceeds N = {n}")));
    }
    let cost = juntas::enumeration_cost(n, k);
    if cost > junta_budget {
        return Err(Error::Budget { what: "hypercube embedding", required: cost, budget: junta_budget });
    }
    // Every function on N inputs that reads only x_1..x_K.
    let local_len = 1usize << k;
    let cube: Vec<BooleanFunction> = (0..1u64 << local_len)
        .map(|table| {
            let local = BooleanFunction::from_word(k, table).expect("k <= 6");
            BooleanFunction::from_fn(n, |x| local.eval(x & (local_len - 1))).expect("n valid")
        })
        .collect();
    let mut out = BTreeSet::new();
    for support in combinations(n, k) {
        let mut perm = support.clone();
        perm.extend((0..n).filter(|i| !support.contains(i)));
        let sigma = HyperoctahedralElement::permutation(perm)?;
        for f in &cube {
            out.insert(sigma.apply_function(f)?);
        }
    }
    Ok(out.iter().map(RationalBehavior::deterministic).collect())
}

/// Rank of the difference set `{v_i - v_0}`.
pub fn affine_dimension(vertices: &[Vec<Rational>]) -> usize {
    let Some(base) = vertices.first() else {
        return 0;
    };
    let diffs: Vec<Vec<Rational>> =
        vertices[1..].iter().map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect()).collect();
    exact::rank(&diffs)
}

/// Complete, irredundant facet list by exact double description.
pub fn facet_enumeration(mut p: RationalPolytope, budget: PolytopeBudget) -> Result<RationalPolytope> {
    if p.vertices.len() > budget.max_vertices {
        return Err(Error::Budget {
            what: "facet enumeration vertices",
            required: p.vertices.len() as u128,
            budget: budget.max_vertices as u128,
        });
    }
    if p.affine_dim > budget.max_affine_dim {
        return Err(Error::Budget {
            what: "facet enumeration affine dimension",
            required: p.affine_dim as u128,
            budget: budget.max_affine_dim as u128,
        });
    }
    if p.affine_dim == 0 {
        p.facets = Some(Vec::new());
        p.incidence = Some(Vec::new());
        return Ok(p);
    }
    let chart = AffineChart::new(&p.vertices);
    let projected: Vec<Vec<Rational>> = p.vertices.iter().map(|v| chart.project(v)).collect();
    let rays = double_description(&projected)?;
    let n_vertices = p.vertices.len();
    let mut facets = Vec::with_capacity(rays.len());
    let mut incidence = Vec::with_capacity(rays.len());
    for ray in rays {
        let d = chart.pivots.len();
        let mut normal = vec![Rational::zero(); p.ambient_dim];
        for (i, &col) in chart.pivots.iter().enumerate() {
            normal[col] = Rational::from_integer(ray.coords[i].clone());
        }
        let offset = Rational::from_integer(ray.coords[d].clone());
        let facet = Facet { normal, offset };
        let mut set = empty_set(n_vertices);
        for (i, v) in p.vertices.iter().enumerate() {
            let s = facet.slack(v);
            if s.is_negative() {
                return Err(Error::Internal("facet violated by a vertex".into()));
            }
            if s.is_zero() {
                insert(&mut set, i);
            }
        }
        facets.push(facet);
        incidence.push(set);
    }
    // Deterministic output order: by incidence pattern, then normal.
    let mut order: Vec<usize> = (0..facets.len()).collect();
    order.sort_by(|&a, &b| incidence[b].cmp(&incidence[a]).then_with(|| facets[a].normal.cmp(&facets[b].normal)));
    p.facets = Some(order.iter().map(|&i| facets[i].clone()).collect());
    p.incidence = Some(order.iter().map(|&i| incidence[i].clone()).collect());
    Ok(p)
}

/// Coordinates on the affine hull: the pivot columns of the difference matrix.
struct AffineChart {
    pivots: Vec<usize>,
}

impl AffineChart {
    fn new(vertices: &[Vec<Rational>]) -> Self {
        let base = &vertices[0];
        let mut diffs: Vec<Vec<Rational>> =
            vertices[1..].iter().map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect()).collect();
        let pivots = exact::row_echelon(&mut diffs);
        Self { pivots }
    }

    fn project(&self, v: &[Rational]) -> Vec<Rational> {
        self.pivots.iter().map(|&c| v[c].clone()).collect()
    }
}

struct Ray {
    coords: Vec<BigInt>,
    /// Processed constraint rows at which this ray is tight.
    zeros: VertexSet,
}

/// Extreme rays of `{(a, beta) : a . y_i <= beta for all i}` for full-dimensional points `y_i`.
fn double_description(points: &[Vec<Rational>]) -> Result<Vec<Ray>> {
    let m = points.len();
    let d = points[0].len();
    let dim = d + 1;
    // Constraint rows g_i = (y_i, -1), scaled to integers.
    let rows: Vec<Vec<BigInt>> = points
        .iter()
        .map(|y| {
            let mut g: Vec<Rational> = y.clone();
            g.push(-Rational::from_integer(BigInt::from(1)));
            exact::primitive_integer(&g)
        })
        .collect();
    let rational_rows: Vec<Vec<Rational>> =
        rows.iter().map(|r| r.iter().cloned().map(Rational::from_integer).collect()).collect();

    // Initial simplicial cone from the lexicographically first independent rows.
    let mut basis_rows = Vec::with_capacity(dim);
    let mut acc: Vec<Vec<Rational>> = Vec::new();
    for (i, r) in rational_rows.iter().enumerate() {
        acc.push(r.clone());
        if exact::rank(&acc) == acc.len() {
            basis_rows.push(i);
            if basis_rows.len() == dim {
                break;
            }
        } else {
            acc.pop();
        }
    }
    if basis_rows.len() != dim {
        return Err(Error::Internal("points are not full-dimensional in their chart".into()));
    }
    let g0: Vec<Vec<Rational>> = basis_rows.iter().map(|&i| rational_rows[i].clone()).collect();
    let mut rays = Vec::with_capacity(dim);
    for k in 0..dim {
        // Solve G0 r = -e_k.
        let rhs: Vec<Rational> = (0..dim)
            .map(|i| if i == k { -Rational::from_integer(BigInt::from(1)) } else { Rational::zero() })
            .collect();
        let r = exact::solve(&g0, &rhs).ok_or_else(|| Error::Internal("singular initial basis".into()))?;
        let mut zeros = empty_set(m);
        for (pos, &row) in basis_rows.iter().enumerate() {
            if pos != k {
                insert(&mut zeros, row);
            }
        }
        rays.push(Ray { coords: exact::primitive_integer(&r), zeros });
    }

    let mut processed: Vec<usize> = basis_rows.clone();
    for i in (0..m).filter(|i| !basis_rows.contains(i)) {
        let g = &rows[i];
        let values: Vec<BigInt> = rays.iter().map(|r| int_dot(g, &r.coords)).collect();
        let mut next = Vec::with_capacity(rays.len());
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for (idx, v) in values.iter().enumerate() {
            if v.is_positive() {
                positive.push(idx);
            } else if v.is_negative() {
                negative.push(idx);
            }
        }
        for &p in &positive {
            for &n in &negative {
                let common = intersect(&rays[p].zeros, &rays[n].zeros);
                if count(&common) + 2 < dim {
                    continue;
                }
                if !adjacent_by_rank(&common, &rational_rows, dim) {
                    continue;
                }
                // s_p * r_n - s_n * r_p vanishes on g and stays in the cone.
                let coords: Vec<BigInt> = rays[n]
                    .coords
                    .iter()
                    .zip(&rays[p].coords)
                    .map(|(rn, rp)| &values[p] * rn - &values[n] * rp)
                    .collect();
                let g_content = exact::content(&coords);
                let coords: Vec<BigInt> = coords.into_iter().map(|c| c / &g_content).collect();
                let mut zeros = common;
                insert(&mut zeros, i);
                next.push(Ray { coords, zeros });
            }
        }
        for (idx, ray) in rays.into_iter().enumerate() {
            let v = &values[idx];
            if v.is_positive() {
                continue;
            }
            let mut ray = ray;
            if v.is_zero() {
                insert(&mut ray.zeros, i);
            }
            next.push(ray);
        }
        rays = next;
        processed.push(i);
    }
    debug_assert_eq!(processed.len(), m);
    Ok(rays)
}

/// Two rays are adjacent iff their common tight rows have rank `dim - 2`.
fn adjacent_by_rank(common: &VertexSet, rows: &[Vec<Rational>], dim: usize) -> bool {
    let selected: Vec<Vec<Rational>> = members(common).map(|i| rows[i].clone()).collect();
    exact::rank(&selected) == dim - 2
}

fn int_dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

/// Face counts per dimension `0..affine_dim-1` from the incidence lattice.
pub fn f_vector(p: &RationalPolytope) -> Result<Vec<usize>> {
    let incidence = p.incidence.as_ref().ok_or_else(|| Error::invalid("facets not computed"))?;
    let faces = face_lattice(incidence, p.vertices.len());
    let mut counts = vec![0usize; p.affine_dim];
    for face in &faces {
        let pts: Vec<Vec<Rational>> = members(face).map(|i| p.vertices[i].clone()).collect();
        let dim = affine_dimension(&pts);
        if dim >= p.affine_dim {
            return Err(Error::Internal("proper face with full dimension".into()));
        }
        counts[dim] += 1;
    }
    Ok(counts)
}

/// All nonempty proper faces: intersections of facet vertex sets.
pub fn face_lattice(incidence: &[VertexSet], n_vertices: usize) -> Vec<VertexSet> {
    let mut seen: HashSet<VertexSet> = HashSet::new();
    let mut frontier: Vec<VertexSet> = Vec::new();
    for f in incidence {
        if seen.insert(f.clone()) {
            frontier.push(f.clone());
        }
    }
    while let Some(face) = frontier.pop() {
        for f in incidence {
            let meet = intersect(&face, f);
            if count(&meet) == 0 || meet == face {
                continue;
            }
            if seen.insert(meet.clone()) {
                frontier.push(meet);
            }
        }
    }
    // Vertices are faces even when no facet intersection isolates them in
    // degenerate inputs; for polytopes they always appear.
    for i in 0..n_vertices {
        let mut s = empty_set(n_vertices);
        insert(&mut s, i);
        seen.insert(s);
    }
    let mut out: Vec<VertexSet> = seen.into_iter().collect();
    out.sort();
    out
}

/// `true` when every vertex lies on or inside every facet and each facet is
/// saturated by `affine_dim` affinely independent vertices.
pub fn check_facets(p: &RationalPolytope) -> Result<bool> {
    let facets = p.facets.as_ref().ok_or_else(|| Error::invalid("facets not computed"))?;
    for f in facets {
        let tight: Vec<Vec<Rational>> = p.vertices.iter().filter(|v| f.slack(v).is_zero()).cloned().collect();
        if p.vertices.iter().any(|v| f.slack(v).is_negative()) {
            return Ok(false);
        }
        if tight.len() < p.affine_dim || affine_dimension(&tight) + 1 != p.affine_dim {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn empty_set(n: usize) -> VertexSet {
    vec![0; n.div_ceil(64).max(1)]
}

pub(crate) fn insert(s: &mut VertexSet, i: usize) {
    s[i / 64] |= 1 << (i % 64);
}

pub(crate) fn contains(s: &VertexSet, i: usize) -> bool {
    s[i / 64] >> (i % 64) & 1 == 1
}

fn intersect(a: &VertexSet, b: &VertexSet) -> VertexSet {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

pub(crate) fn count(s: &VertexSet) -> usize {
    s.iter().map(|w| w.count_ones() as usize).sum()
}

pub(crate) fn members(s: &VertexSet) -> impl Iterator<Item = usize> + '_ {
    (0..s.len() * 64).filter(move |&i| contains(s, i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::juntas::DEFAULT_JUNTA_BUDGET;

    fn square() -> RationalPolytope {
        RationalPolytope::from_vertices(vec![
            vec![int(0), int(0)],
            vec![int(1), int(0)],
            vec![int(0), int(1)],
            vec![int(1), int(1)],
        ])
        .unwrap()
    }

    #[test]
    fn square_geometry() {
        let p = facet_enumeration(square(), PolytopeBudget::default()).unwrap();
        assert_eq!(p.affine_dim(), 2);
        assert_eq!(p.facets().unwrap().len(), 4);
        assert_eq!(f_vector(&p).unwrap(), vec![4, 4]);
        assert!(check_facets(&p).unwrap());
    }

    #[test]
    fn lower_dimensional_input() {
        // A triangle embedded in 3-space with a nontrivial affine hull.
        let p = RationalPolytope::from_vertices(vec![
            vec![int(1), int(0), int(0)],
            vec![int(0), int(1), int(0)],
            vec![int(0), int(0), int(1)],
        ])
        .unwrap();
        assert_eq!(p.affine_dim(), 2);
        let p = facet_enumeration(p, PolytopeBudget::default()).unwrap();
        assert_eq!(p.facets().unwrap().len(), 3);
        assert_eq!(f_vector(&p).unwrap(), vec![3, 3]);
        assert!(check_facets(&p).unwrap());
    }

    #[test]
    fn c11_is_a_square() {
        let p = vertices_of_c(1, 1, DEFAULT_JUNTA_BUDGET, Exec::Sequential).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.affine_dim(), 2);
        let p = facet_enumeration(p, PolytopeBudget::default()).unwrap();
        assert_eq!(p.facets().unwrap().len(), 4);
        assert_eq!(f_vector(&p).unwrap(), vec![4, 4]);
    }

    #[test]
    fn c21_is_an_octahedron() {
        let p = vertices_of_c(2, 1, DEFAULT_JUNTA_BUDGET, Exec::Sequential).unwrap();
        assert_eq!(p.vertices().len(), 6);
        assert_eq!(p.affine_dim(), 3);
        let p = facet_enumeration(p, PolytopeBudget::default()).unwrap();
        assert_eq!(p.facets().unwrap().len(), 8);
        assert_eq!(f_vector(&p).unwrap(), vec![6, 12, 8]);
        assert!(check_facets(&p).unwrap());
    }

    #[test]
    fn lemma1_matches_enumeration_for_small_cases() {
        let hull = lemma1_hull_vertices(2, 1, DEFAULT_JUNTA_BUDGET).unwrap();
        let direct = vertices_of_c(2, 1, DEFAULT_JUNTA_BUDGET, Exec::Sequential).unwrap();
        let hull_points: Vec<Vec<Rational>> = hull.iter().map(behavior_point).collect();
        assert_eq!(hull_points, direct.vertices());
        assert_eq!(lemma1_hull_vertices(2, 2, DEFAULT_JUNTA_BUDGET).unwrap().len(), 16);
        assert_eq!(lemma1_hull_vertices(3, 3, DEFAULT_JUNTA_BUDGET).unwrap().len(), 256);
    }

    #[test]
    fn budgets_are_enforced() {
        let p = vertices_of_c(3, 2, DEFAULT_JUNTA_BUDGET, Exec::Sequential).unwrap();
        let tight = PolytopeBudget { max_vertices: 10, max_affine_dim: 8 };
        assert!(matches!(facet_enumeration(p.clone(), tight), Err(Error::Budget { .. })));
        let flat = PolytopeBudget { max_vertices: 64, max_affine_dim: 6 };
        assert!(matches!(facet_enumeration(p, flat), Err(Error::Budget { .. })));
    }
}
