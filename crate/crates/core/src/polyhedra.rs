//! Newton-polyhedron machinery over exact rationals: extremal points, the
//! dual region P(A) = {x >= 0 : <x,nu> >= 1 for nu in A}, its index and
//! minimal face, vertex enumeration, contact sets, and normal-cone tests.
//!
//! Vertex enumeration iterates over rank-n subsets of the constraint system
//! (documented bound: intended for n <= 8 and at most a few dozen generating
//! points). Each candidate system is solved with machine-size fraction
//! arithmetic first and falls back to arbitrary precision on overflow, so
//! results are exact in all cases.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp;
use crate::series::{ExponentVector, Int, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("point set may not contain the origin")]
    ContainsOrigin,
    #[error("point set is empty")]
    Empty,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("vector is not in the dual region (constraint from {0} violated)")]
    NotInDual(String),
    #[error("direction must be strictly positive")]
    NonPositiveDirection,
    #[error("given point is not a vertex of the dual region")]
    NotAVertex,
}

/// Finite set of nonzero lattice points generating a Newton polyhedron.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PointSetJson", into = "PointSetJson")]
pub struct PointSet {
    nvars: usize,
    points: BTreeSet<ExponentVector>,
}

#[derive(Serialize, Deserialize)]
struct PointSetJson {
    nvars: usize,
    points: Vec<Vec<u32>>,
}

impl TryFrom<PointSetJson> for PointSet {
    type Error = String;
    fn try_from(raw: PointSetJson) -> Result<Self, String> {
        PointSet::new(
            raw.nvars,
            raw.points.into_iter().map(ExponentVector::new),
        )
        .map_err(|e| e.to_string())
    }
}

impl From<PointSet> for PointSetJson {
    fn from(ps: PointSet) -> Self {
        PointSetJson {
            nvars: ps.nvars,
            points: ps.points.iter().map(|p| p.entries().to_vec()).collect(),
        }
    }
}

impl PointSet {
    pub fn new<I>(nvars: usize, points: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = ExponentVector>,
    {
        let mut set = BTreeSet::new();
        for p in points {
            if p.dim() != nvars {
                return Err(PolyError::DimensionMismatch(p.dim(), nvars));
            }
            if p.is_zero() {
                return Err(PolyError::ContainsOrigin);
            }
            set.insert(p);
        }
        Ok(PointSet { nvars, points: set })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn points(&self) -> impl Iterator<Item = &ExponentVector> {
        self.points.iter()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &ExponentVector) -> bool {
        self.points.contains(p)
    }
}

/// A vertex of the dual region, with its tight constraints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub coords: Vec<Rat>,
    /// K(A; alpha): points of A met with equality.
    pub contact: Vec<ExponentVector>,
    /// J(alpha): coordinates where alpha vanishes.
    pub zeros: Vec<usize>,
    /// Tight-constraint count m(alpha) = #contact + #zeros.
    pub m: usize,
}

#[derive(Clone, Debug)]
pub struct DualPolyhedron {
    pub nvars: usize,
    pub generators: PointSet,
    /// iota(A): minimal coordinate sum over the dual region.
    pub index: Rat,
    /// Vertices of the minimal-weight face R(A).
    pub r_face: Vec<Vec<Rat>>,
    pub vertices: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConeTest {
    Outside,
    Boundary,
    GenericInterior { exponent: Rat, degree: usize },
}

// ---------------------------------------------------------------------------
// small exact fractions with overflow detection

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Q {
    n: i128,
    d: i128, // always > 0, gcd(n, d) = 1
}

fn gcd128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Q {
    const ZERO: Q = Q { n: 0, d: 1 };

    fn from_int(n: i64) -> Q {
        Q { n: n as i128, d: 1 }
    }

    fn make(n: i128, d: i128) -> Option<Q> {
        if d == 0 {
            return None;
        }
        let (n, d) = if d < 0 { (n.checked_neg()?, d.checked_neg()?) } else { (n, d) };
        let g = gcd128(n, d);
        if g == 0 {
            return Some(Q::ZERO);
        }
        Some(Q { n: n / g, d: d / g })
    }

    fn add(self, o: Q) -> Option<Q> {
        let n = self.n.checked_mul(o.d)?.checked_add(o.n.checked_mul(self.d)?)?;
        Q::make(n, self.d.checked_mul(o.d)?)
    }

    fn sub(self, o: Q) -> Option<Q> {
        self.add(Q { n: o.n.checked_neg()?, d: o.d })
    }

    fn mul(self, o: Q) -> Option<Q> {
        Q::make(self.n.checked_mul(o.n)?, self.d.checked_mul(o.d)?)
    }

    fn div(self, o: Q) -> Option<Q> {
        if o.n == 0 {
            return None;
        }
        Q::make(self.n.checked_mul(o.d)?, self.d.checked_mul(o.n)?)
    }

    fn is_zero(self) -> bool {
        self.n == 0
    }

    fn to_rat(self) -> Rat {
        Rat::new(Int::from(self.n), Int::from(self.d))
    }
}

/// Gauss-Jordan solve of an n x n system over machine fractions.
/// Returns Ok(None) if singular, Err(()) on overflow.
fn solve_q(mat: &[Vec<i64>], rhs: &[i64]) -> Result<Option<Vec<Q>>, ()> {
    let n = mat.len();
    let mut a: Vec<Vec<Q>> = mat
        .iter()
        .zip(rhs)
        .map(|(row, &r)| {
            row.iter()
                .map(|&x| Q::from_int(x))
                .chain(std::iter::once(Q::from_int(r)))
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !a[i][col].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => return Ok(None),
        };
        a.swap(col, piv);
        let pv = a[col][col];
        for j in col..=n {
            a[col][j] = a[col][j].div(pv).ok_or(())?;
        }
        for i in 0..n {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col];
            for j in col..=n {
                let t = f.mul(a[col][j]).ok_or(())?;
                a[i][j] = a[i][j].sub(t).ok_or(())?;
            }
        }
    }
    Ok(Some((0..n).map(|i| a[i][n]).collect()))
}

/// Arbitrary-precision fallback for the same system.
fn solve_big(mat: &[Vec<i64>], rhs: &[i64]) -> Option<Vec<Rat>> {
    let n = mat.len();
    let mut a: Vec<Vec<Rat>> = mat
        .iter()
        .zip(rhs)
        .map(|(row, &r)| {
            row.iter()
                .map(|&x| Rat::from(Int::from(x)))
                .chain(std::iter::once(Rat::from(Int::from(r))))
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, piv);
        let pv = a[col][col].clone();
        for j in col..=n {
            a[col][j] = &a[col][j] / &pv;
        }
        for i in 0..n {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone();
            for j in col..=n {
                let t = &f * &a[col][j];
                a[i][j] = &a[i][j] - t;
            }
        }
    }
    Some((0..n).map(|i| a[i][n].clone()).collect())
}

fn dot_rat(a: &[Rat], b: &[u32]) -> Rat {
    let mut s = Rat::zero();
    for (x, &y) in a.iter().zip(b) {
        if y != 0 {
            s += x * Rat::from(Int::from(y));
        }
    }
    s
}

/// Ext(A): points of A not contained in conv(A \ {nu}) + R_+^n.
pub fn extremal_points(a: &PointSet) -> Result<BTreeSet<ExponentVector>, PolyError> {
    if a.is_empty() {
        return Err(PolyError::Empty);
    }
    let n = a.nvars();
    let pts: Vec<&ExponentVector> = a.points().collect();
    let mut out = BTreeSet::new();
    'outer: for (idx, &p) in pts.iter().enumerate() {
        // cheap dominance prefilter
        for (j, &q) in pts.iter().enumerate() {
            if j != idx && q.entries().iter().zip(p.entries()).all(|(a, b)| a <= b) {
                continue 'outer;
            }
        }
        let others: Vec<&ExponentVector> =
            pts.iter().enumerate().filter(|&(j, _)| j != idx).map(|(_, q)| *q).collect();
        if others.is_empty() {
            out.insert(p.clone());
            continue;
        }
        // feasibility of { lambda >= 0, s >= 0 : sum lambda = 1,
        //                  sum lambda_i a_i + s = p }
        let k = others.len();
        let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(n + 1);
        let mut row0 = vec![Rat::one(); k];
        row0.extend(std::iter::repeat(Rat::zero()).take(n));
        rows.push(row0);
        for coord in 0..n {
            let mut row: Vec<Rat> = others
                .iter()
                .map(|q| Rat::from(Int::from(q.entries()[coord])))
                .collect();
            for s in 0..n {
                row.push(if s == coord { Rat::one() } else { Rat::zero() });
            }
            rows.push(row);
        }
        let mut rhs = vec![Rat::one()];
        rhs.extend(p.entries().iter().map(|&e| Rat::from(Int::from(e))));
        if lp::feasible_point(&rows, &rhs).is_none() {
            out.insert(p.clone());
        }
    }
    Ok(out)
}

/// Computes the dual region P(A), its index, minimal face and all vertices.
pub fn dual(a: &PointSet) -> Result<DualPolyhedron, PolyError> {
    if a.is_empty() {
        return Err(PolyError::Empty);
    }
    let n = a.nvars();
    let ext = extremal_points(a)?;
    let ext: Vec<&ExponentVector> = ext.iter().collect();

    // constraint list: <nu, x> >= 1 for extremal nu, then x_j >= 0
    let mut normals: Vec<Vec<i64>> = Vec::with_capacity(ext.len() + n);
    let mut rhs_all: Vec<i64> = Vec::with_capacity(ext.len() + n);
    for nu in &ext {
        normals.push(nu.entries().iter().map(|&e| i64::from(e)).collect());
        rhs_all.push(1);
    }
    for j in 0..n {
        let mut u = vec![0i64; n];
        u[j] = 1;
        normals.push(u);
        rhs_all.push(0);
    }

    let total = normals.len();
    let mut found: BTreeSet<Vec<Rat>> = BTreeSet::new();
    for subset in (0..total).combinations(n) {
        let mat: Vec<Vec<i64>> = subset.iter().map(|&i| normals[i].clone()).collect();
        let rhs: Vec<i64> = subset.iter().map(|&i| rhs_all[i]).collect();
        let x: Option<Vec<Rat>> = match solve_q(&mat, &rhs) {
            Ok(Some(sol)) => Some(sol.into_iter().map(Q::to_rat).collect()),
            Ok(None) => None,
            Err(()) => solve_big(&mat, &rhs),
        };
        if let Some(x) = x {
            let feasible = x.iter().all(|c| !c.is_negative())
                && ext.iter().all(|nu| dot_rat(&x, nu.entries()) >= Rat::one());
            if feasible {
                found.insert(x);
            }
        }
    }

    let mut vertices = Vec::new();
    for coords in found {
        let contact: Vec<ExponentVector> = a
            .points()
            .filter(|nu| dot_rat(&coords, nu.entries()) == Rat::one())
            .cloned()
            .collect();
        let zeros: Vec<usize> =
            (0..n).filter(|&j| coords[j].is_zero()).collect();
        let m = contact.len() + zeros.len();
        vertices.push(Vertex { coords, contact, zeros, m });
    }

    let index = vertices
        .iter()
        .map(|v| v.coords.iter().sum::<Rat>())
        .min()
        .expect("P(A) has at least one vertex for finite nonempty A");
    let r_face: Vec<Vec<Rat>> = vertices
        .iter()
        .filter(|v| v.coords.iter().sum::<Rat>() == index)
        .map(|v| v.coords.clone())
        .collect();

    Ok(DualPolyhedron { nvars: n, generators: a.clone(), index, r_face, vertices })
}

/// K(A; alpha) for alpha in the dual region.
pub fn contact_set(
    a: &PointSet,
    alpha: &[Rat],
) -> Result<BTreeSet<ExponentVector>, PolyError> {
    if alpha.len() != a.nvars() {
        return Err(PolyError::DimensionMismatch(alpha.len(), a.nvars()));
    }
    if alpha.iter().any(|c| c.is_negative()) {
        return Err(PolyError::NotInDual("x >= 0".into()));
    }
    let mut out = BTreeSet::new();
    for nu in a.points() {
        let v = dot_rat(alpha, nu.entries());
        if v < Rat::one() {
            return Err(PolyError::NotInDual(nu.to_string()));
        }
        if v == Rat::one() {
            out.insert(nu.clone());
        }
    }
    Ok(out)
}

/// Classifies a strictly positive direction gamma relative to the normal cone
/// of the vertex alpha: the unique minimizer of <gamma, .> over P(A) is alpha
/// exactly when gamma lies in the open normal cone.
pub fn normal_cone_test(
    p: &DualPolyhedron,
    alpha: &Vertex,
    gamma: &[Rat],
) -> Result<ConeTest, PolyError> {
    if gamma.len() != p.nvars {
        return Err(PolyError::DimensionMismatch(gamma.len(), p.nvars));
    }
    if gamma.iter().any(|g| !g.is_positive()) {
        return Err(PolyError::NonPositiveDirection);
    }
    if !p.vertices.iter().any(|v| v.coords == alpha.coords) {
        return Err(PolyError::NotAVertex);
    }
    let value = |coords: &[Rat]| -> Rat {
        coords.iter().zip(gamma).map(|(c, g)| c * g).sum()
    };
    // gamma > 0 and P(A) subset R_+^n, so the minimum exists and is attained
    // at a vertex (the optimal face cannot recede).
    let min = p
        .vertices
        .iter()
        .map(|v| value(&v.coords))
        .min()
        .expect("dual polyhedron has vertices");
    let at_alpha = value(&alpha.coords);
    if at_alpha > min {
        return Ok(ConeTest::Outside);
    }
    let minimizers = p.vertices.iter().filter(|v| value(&v.coords) == min).count();
    if minimizers > 1 {
        return Ok(ConeTest::Boundary);
    }
    Ok(ConeTest::GenericInterior { exponent: at_alpha, degree: alpha.m - p.nvars })
}
