//! Toric lattice-point machinery: integer matrices A, the solution monoids
//! T(A;b), the invariant indicator F_A, recursive unitary presentations
//! h = prod_{nu in K} (1 - X^nu)^{-c(nu)} * W, the analytic data attached to
//! I = K u S*(W), and numerical Euler-product values on the dual boundary.
//!
//! The recursion follows the shift identity
//!   (1 - X^alpha) h_{A,b} = sum over proper coordinate subsets of
//!   monomial-shifted subproblem series,
//! with alpha a minimal nonzero element of T(A;0). All case splits are
//! certified by exact rational linear programming, so `InconclusiveBound` is
//! only returned when a certified enumeration range exceeds the caller's
//! budget -- the code never guesses.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::lp::{self, LpOutcome};
use crate::polyhedra::{self, DualPolyhedron, PointSet, PolyError};
use crate::series::{ExponentVector, Int, Rat, SeriesError, SparseSeries};

/// Default enumeration budget (max total degree explored by certified
/// enumerations inside the presentation recursion).
pub const DEFAULT_BOUND: u32 = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ToricError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("matrix rows must all have length {0}")]
    RaggedRows(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("argument coordinates must be >= 1")]
    ZeroCoordinate,
    #[error("certified enumeration range exceeds the budget {bound}")]
    InconclusiveBound { bound: u32 },
    #[error("matrix rows must sum to zero for this operation")]
    RowSumNotZero,
    #[error("operation undefined on the empty presentation (h = 0)")]
    EmptyPresentation,
    #[error("c'({nu}) != 1 on a vertex contact set; presentation is not valid")]
    CprimeViolation { nu: ExponentVector },
    #[error("non-positive Euler factor at p = {prime}")]
    NonPositiveFactor { prime: u64 },
    #[error("alpha violates <alpha, nu> >= 1 on I")]
    AlphaOffBoundary,
}

/// A d x n integer matrix defining the relations prod_i m_i^{a_{j,i}} = 1.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ToricMatrix {
    pub d: usize,
    pub n: usize,
    pub rows: Vec<Vec<i64>>,
}

impl ToricMatrix {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self, ToricError> {
        let d = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n) {
            return Err(ToricError::RaggedRows(n));
        }
        Ok(ToricMatrix { d, n, rows })
    }

    /// The 1 x (n+1) matrix (1, ..., 1, -n): m_1 ... m_n = m_{n+1}^n.
    pub fn an_matrix(n: usize) -> Self {
        let mut row = vec![1i64; n];
        row.push(-(n as i64));
        ToricMatrix { d: 1, n: n + 1, rows: vec![row] }
    }

    pub fn rows_sum_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().sum::<i64>() == 0)
    }

    pub fn apply(&self, nu: &[u32]) -> Vec<i64> {
        assert_eq!(nu.len(), self.n);
        self.rows
            .iter()
            .map(|r| r.iter().zip(nu).map(|(&a, &v)| a * i64::from(v)).sum())
            .collect()
    }

    fn columns(&self, cols: &[usize]) -> ToricMatrix {
        let rows: Vec<Vec<i64>> =
            self.rows.iter().map(|r| cols.iter().map(|&i| r[i]).collect()).collect();
        ToricMatrix { d: self.d, n: cols.len(), rows }
    }
}

/// All nu >= 0 with A nu = b and |nu| <= n, by depth-first search with
/// per-row range pruning.
pub fn kernel_monoid(a: &ToricMatrix, b: &[i64], n: u32) -> BTreeSet<ExponentVector> {
    assert_eq!(b.len(), a.d);
    // per row, suffix min/max coefficient from each column onward
    let mut suf_min = vec![vec![0i64; a.n + 1]; a.d];
    let mut suf_max = vec![vec![0i64; a.n + 1]; a.d];
    for j in 0..a.d {
        for i in (0..a.n).rev() {
            suf_min[j][i] = suf_min[j][i + 1].min(a.rows[j][i].min(0));
            suf_max[j][i] = suf_max[j][i + 1].max(a.rows[j][i].max(0));
        }
    }
    let mut out = BTreeSet::new();
    let mut nu = vec![0u32; a.n];
    let mut residual: Vec<i64> = b.to_vec();
    fn dfs(
        a: &ToricMatrix,
        suf_min: &[Vec<i64>],
        suf_max: &[Vec<i64>],
        i: usize,
        rem: u32,
        nu: &mut Vec<u32>,
        residual: &mut Vec<i64>,
        out: &mut BTreeSet<ExponentVector>,
    ) {
        if (0..a.d).any(|j| {
            let span = i64::from(rem);
            residual[j] < suf_min[j][i] * span || residual[j] > suf_max[j][i] * span
        }) {
            return;
        }
        if i == a.n {
            if residual.iter().all(|&r| r == 0) {
                out.insert(ExponentVector::new(nu.clone()));
            }
            return;
        }
        for v in 0..=rem {
            nu[i] = v;
            for j in 0..a.d {
                residual[j] -= a.rows[j][i] * i64::from(v);
            }
            dfs(a, suf_min, suf_max, i + 1, rem - v, nu, residual, out);
            for j in 0..a.d {
                residual[j] += a.rows[j][i] * i64::from(v);
            }
        }
        nu[i] = 0;
    }
    dfs(a, &suf_min, &suf_max, 0, n, &mut nu, &mut residual, &mut out);
    out
}

/// F_A(m) = 1 iff gcd(m) = 1 and every row relation prod m_i^{a_{j,i}} = 1
/// holds exactly.
pub fn f_a(a: &ToricMatrix, m: &[u64]) -> Result<bool, ToricError> {
    if m.len() != a.n {
        return Err(ToricError::DimensionMismatch(m.len(), a.n));
    }
    if m.iter().any(|&x| x == 0) {
        return Err(ToricError::ZeroCoordinate);
    }
    let g = m.iter().fold(0u64, |acc, &x| num_integer::gcd(acc, x));
    if g != 1 {
        return Ok(false);
    }
    for row in &a.rows {
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for (&e, &mi) in row.iter().zip(m) {
            let base = BigUint::from(mi);
            if e > 0 {
                num *= base.pow(e as u32);
            } else if e < 0 {
                den *= base.pow((-e) as u32);
            }
        }
        if num != den {
            return Ok(false);
        }
    }
    Ok(true)
}

/// h = prod_{nu in K} (1 - X^nu)^{-c(nu)} * W, with the convention that the
/// empty solution set is flagged (h = 0) rather than encoded in W.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub nvars: usize,
    /// K with multiplicities c(nu) >= 1.
    pub factors: BTreeMap<ExponentVector, u64>,
    pub w: SparseSeries,
    pub empty: bool,
}

impl Presentation {
    pub fn one(nvars: usize) -> Self {
        Presentation {
            nvars,
            factors: BTreeMap::new(),
            w: SparseSeries::one(nvars),
            empty: false,
        }
    }

    fn empty(nvars: usize) -> Self {
        Presentation {
            nvars,
            factors: BTreeMap::new(),
            w: SparseSeries::zero(nvars),
            empty: true,
        }
    }

    /// Series expansion to total weight n.
    pub fn expand(&self, n: u32) -> Result<SparseSeries, ToricError> {
        if self.empty {
            return Ok(SparseSeries::zero(self.nvars).with_cutoff(n));
        }
        let mut acc = self.w.truncated(n);
        for (nu, &c) in &self.factors {
            let inv = SparseSeries::one_minus_monomial_pow(
                self.nvars,
                nu,
                &-Int::from(c),
                n,
            );
            acc = acc.mul_trunc(&inv, n)?;
        }
        Ok(acc)
    }
}

/// Exact division of a polynomial by (1 - X^nu), if it divides.
///
/// Terms are grouped into residue classes mu = base + k nu; within a class
/// the quotient coefficients are the partial sums, and divisibility is
/// exactly the vanishing of each class total.
fn divide_once(w: &SparseSeries, nu: &ExponentVector) -> Option<SparseSeries> {
    if nu.is_zero() || w.cutoff().is_some() {
        return None;
    }
    let mut classes: BTreeMap<ExponentVector, BTreeMap<u32, Int>> = BTreeMap::new();
    for (mu, c) in w.terms() {
        let k = mu
            .entries()
            .iter()
            .zip(nu.entries())
            .filter(|&(_, &nv)| nv > 0)
            .map(|(&mv, &nv)| mv / nv)
            .min()
            .expect("nu is nonzero");
        let base = mu.checked_sub(&nu.scale(k)).expect("k is the floor ratio");
        classes.entry(base).or_default().insert(k, c.clone());
    }
    let mut q = SparseSeries::zero(w.nvars());
    for (base, coeffs) in classes {
        let &kmax = coeffs.keys().next_back().expect("nonempty class");
        let mut running = Int::zero();
        for k in 0..=kmax {
            if let Some(c) = coeffs.get(&k) {
                running += c;
            }
            if k == kmax {
                if !running.is_zero() {
                    return None;
                }
            } else if !running.is_zero() {
                q.add_term(base.add(&nu.scale(k)), running.clone());
            }
        }
    }
    Some(q)
}

/// Cancels factors (1 - X^nu) of W against K until none of them divides W.
fn reduce(factors: &mut BTreeMap<ExponentVector, u64>, w: &mut SparseSeries) {
    loop {
        let mut changed = false;
        let keys: Vec<ExponentVector> = factors.keys().cloned().collect();
        for nu in keys {
            while factors.get(&nu).copied().unwrap_or(0) > 0 {
                match divide_once(w, &nu) {
                    Some(q) => {
                        *w = q;
                        let c = factors.get_mut(&nu).expect("present");
                        *c -= 1;
                        if *c == 0 {
                            factors.remove(&nu);
                        }
                        changed = true;
                    }
                    None => break,
                }
            }
        }
        if !changed {
            break;
        }
    }
}

fn embed(nvars: usize, cols: &[usize], local: &[u32]) -> ExponentVector {
    let mut e = vec![0u32; nvars];
    for (&c, &v) in cols.iter().zip(local) {
        e[c] = v;
    }
    ExponentVector::new(e)
}

/// A nonzero integer point of {nu >= 0 : A nu = 0} restricted to `cols`,
/// certified by exact LP, or None when the kernel monoid is trivial.
fn kernel_direction(sub: &ToricMatrix) -> Option<Vec<u32>> {
    let k = sub.n;
    if k == 0 {
        return None;
    }
    let mut rows: Vec<Vec<Rat>> = vec![vec![Rat::one(); k]];
    let mut rhs = vec![Rat::one()];
    for r in &sub.rows {
        rows.push(r.iter().map(|&x| lp::rat(x)).collect());
        rhs.push(Rat::zero());
    }
    let x = lp::feasible_point(&rows, &rhs)?;
    let l = x
        .iter()
        .fold(Int::one(), |acc, c| num_integer::lcm(acc, c.denom().clone()));
    Some(
        x.iter()
            .map(|c| {
                (c * Rat::from(l.clone()))
                    .to_integer()
                    .to_u32()
                    .expect("small vertex coordinates")
            })
            .collect(),
    )
}

struct RecCtx<'a> {
    a: &'a ToricMatrix,
    bound: u32,
    memo: BTreeMap<(Vec<usize>, Vec<i64>), Presentation>,
}

fn present_rec(
    ctx: &mut RecCtx<'_>,
    cols: &[usize],
    b: &[i64],
) -> Result<Presentation, ToricError> {
    let n = ctx.a.n;
    let key = (cols.to_vec(), b.to_vec());
    if let Some(p) = ctx.memo.get(&key) {
        return Ok(p.clone());
    }
    if cols.is_empty() {
        let p = if b.iter().all(|&x| x == 0) {
            Presentation::one(n)
        } else {
            Presentation::empty(n)
        };
        ctx.memo.insert(key, p.clone());
        return Ok(p);
    }
    let sub = ctx.a.columns(cols);
    let p = match kernel_direction(&sub) {
        Some(dir) => present_case1(ctx, cols, b, &sub, &dir)?,
        None => present_case2(ctx, cols, b, &sub)?,
    };
    ctx.memo.insert(key, p.clone());
    Ok(p)
}

/// T(A;0) on the active columns is nontrivial: pick the graded-lex minimal
/// nonzero pivot alpha and apply the shift identity.
fn present_case1(
    ctx: &mut RecCtx<'_>,
    cols: &[usize],
    b: &[i64],
    sub: &ToricMatrix,
    dir: &[u32],
) -> Result<Presentation, ToricError> {
    let n = ctx.a.n;
    let w0: u32 = dir.iter().sum();
    if w0 > ctx.bound {
        return Err(ToricError::InconclusiveBound { bound: ctx.bound });
    }
    let zero_b = vec![0i64; sub.d];
    let alpha_local = kernel_monoid(sub, &zero_b, w0)
        .into_iter()
        .find(|v| !v.is_zero())
        .expect("the scaled LP direction is itself in range");
    let alpha_local = alpha_local.entries().to_vec();
    let alpha_global = embed(n, cols, &alpha_local);

    let supp: Vec<usize> = (0..cols.len()).filter(|&i| alpha_local[i] > 0).collect();
    let mut terms: Vec<(ExponentVector, Presentation)> = Vec::new();
    for mask in 1u64..(1u64 << supp.len()) {
        let c_ids: Vec<usize> =
            supp.iter().enumerate().filter(|&(t, _)| mask >> t & 1 == 1).map(|(_, &i)| i).collect();
        let d_ids: Vec<usize> =
            (0..cols.len()).filter(|i| !c_ids.contains(i)).collect();
        let d_cols: Vec<usize> = d_ids.iter().map(|&i| cols[i]).collect();
        let ranges: Vec<Vec<u32>> =
            c_ids.iter().map(|&i| (0..alpha_local[i]).collect()).collect();
        for nu_c in ranges.into_iter().multi_cartesian_product() {
            // b' = b - A_C nu_C - A_D alpha_D on the original rows
            let mut bp = b.to_vec();
            for (j, bj) in bp.iter_mut().enumerate() {
                for (t, &i) in c_ids.iter().enumerate() {
                    *bj -= ctx.a.rows[j][cols[i]] * i64::from(nu_c[t]);
                }
                for &i in &d_ids {
                    *bj -= ctx.a.rows[j][cols[i]] * i64::from(alpha_local[i]);
                }
            }
            let sub_p = present_rec(ctx, &d_cols, &bp)?;
            if sub_p.empty {
                continue;
            }
            let mut mono = vec![0u32; n];
            for (t, &i) in c_ids.iter().enumerate() {
                mono[cols[i]] = nu_c[t];
            }
            for &i in &d_ids {
                mono[cols[i]] = alpha_local[i];
            }
            terms.push((ExponentVector::new(mono), sub_p));
        }
    }
    if terms.is_empty() {
        return Ok(Presentation::empty(n));
    }

    // combine over the common denominator, then divide the pivot back out
    let mut cmax: BTreeMap<ExponentVector, u64> = BTreeMap::new();
    for (_, p) in &terms {
        for (nu, &c) in &p.factors {
            let e = cmax.entry(nu.clone()).or_insert(0);
            *e = (*e).max(c);
        }
    }
    let mut w = SparseSeries::zero(n);
    for (mono, p) in &terms {
        let mut wj = p.w.mul_poly(&SparseSeries::monomial(mono.clone(), Int::one()))?;
        for (nu, &cm) in &cmax {
            let cj = p.factors.get(nu).copied().unwrap_or(0);
            if cm > cj {
                wj = wj.mul_poly(&SparseSeries::one_minus_monomial_pow_exact(
                    n,
                    nu,
                    cm - cj,
                ))?;
            }
        }
        w = w.add(&wj)?;
    }
    let mut factors = cmax;
    *factors.entry(alpha_global).or_insert(0) += 1;
    reduce(&mut factors, &mut w);
    if w.is_zero() {
        return Ok(Presentation::empty(n));
    }
    Ok(Presentation { nvars: n, factors, w, empty: false })
}

/// T(A;0) on the active columns is trivial, so {nu >= 0 : A nu = b} is a
/// bounded polytope; an exact LP maximum of |nu| certifies the enumeration
/// range and the solution set is listed outright.
fn present_case2(
    ctx: &mut RecCtx<'_>,
    cols: &[usize],
    b: &[i64],
    sub: &ToricMatrix,
) -> Result<Presentation, ToricError> {
    let n = ctx.a.n;
    let k = sub.n;
    let rows: Vec<Vec<Rat>> =
        sub.rows.iter().map(|r| r.iter().map(|&x| lp::rat(x)).collect()).collect();
    let rhs: Vec<Rat> = b.iter().map(|&x| lp::rat(x)).collect();
    let c = vec![-Rat::one(); k];
    let maxw = match lp::minimize(&c, &rows, &rhs) {
        LpOutcome::Infeasible => return Ok(Presentation::empty(n)),
        LpOutcome::Unbounded => {
            // impossible with a trivial kernel; fail loudly rather than guess
            return Err(ToricError::InconclusiveBound { bound: ctx.bound });
        }
        LpOutcome::Optimal { value, .. } => (-value).floor().to_integer(),
    };
    let maxw = maxw.to_u32().ok_or(ToricError::InconclusiveBound { bound: ctx.bound })?;
    if maxw > ctx.bound {
        return Err(ToricError::InconclusiveBound { bound: ctx.bound });
    }
    let sols = kernel_monoid(sub, b, maxw);
    if sols.is_empty() {
        return Ok(Presentation::empty(n));
    }
    let mut w = SparseSeries::zero(n);
    for s in sols {
        w.add_term(embed(n, cols, s.entries()), Int::one());
    }
    Ok(Presentation { nvars: n, factors: BTreeMap::new(), w, empty: false })
}

/// Unitary presentation of h_{A,b} = sum_{A nu = b} X^nu.
pub fn presentation_hab(
    a: &ToricMatrix,
    b: &[i64],
    bound: u32,
) -> Result<Presentation, ToricError> {
    if b.len() != a.d {
        return Err(ToricError::DimensionMismatch(b.len(), a.d));
    }
    let mut ctx = RecCtx { a, bound, memo: BTreeMap::new() };
    let cols: Vec<usize> = (0..a.n).collect();
    present_rec(&mut ctx, &cols, b)
}

/// Unitary presentation of h_A = (1 - X_1 ... X_n) h_{A,0}, the generating
/// function of the solutions with some vanishing coordinate. Requires zero
/// row sums (so that (1,...,1) solves A nu = 0).
pub fn presentation(a: &ToricMatrix, bound: u32) -> Result<Presentation, ToricError> {
    if !a.rows_sum_zero() {
        return Err(ToricError::RowSumNotZero);
    }
    let base = presentation_hab(a, &vec![0i64; a.d], bound)?;
    if base.empty {
        return Ok(base);
    }
    let mut all_ones = SparseSeries::one(a.n);
    all_ones.add_term(ExponentVector::new(vec![1; a.n]), -Int::one());
    let mut w = base.w.mul_poly(&all_ones)?;
    let mut factors = base.factors;
    reduce(&mut factors, &mut w);
    if w.is_zero() {
        return Ok(Presentation::empty(a.n));
    }
    Ok(Presentation { nvars: a.n, factors, w, empty: false })
}

/// true iff the presentation expands to sum of X^nu over solutions of
/// A nu = 0 with some zero coordinate, up to weight n.
pub fn verify_presentation(
    p: &Presentation,
    a: &ToricMatrix,
    n: u32,
) -> Result<bool, ToricError> {
    if p.nvars != a.n {
        return Err(ToricError::DimensionMismatch(p.nvars, a.n));
    }
    let mut expected = SparseSeries::zero(a.n).with_cutoff(n);
    for nu in kernel_monoid(a, &vec![0i64; a.d], n) {
        if nu.entries().iter().any(|&v| v == 0) {
            expected.add_term(nu, Int::one());
        }
    }
    let got = p.expand(n)?.truncated(n);
    Ok(got.sub(&expected.truncated(n))?.is_zero())
}

// ---------------------------------------------------------------------------
// closed forms for the power-relation matrices A_n

fn binom(a: u64, b: u64) -> u64 {
    if b > a {
        return 0;
    }
    let mut r = 1u64;
    for i in 0..b {
        r = r * (a - i) / (i + 1);
    }
    r
}

/// Combinatorial data attached to A_n: the residue set D_n, the contact
/// candidates J_n, the degree d_n, the scale t(n), and the apex alpha*.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnData {
    pub n: usize,
    /// d_n = C(2n-1, n) - n - 1.
    pub d_n: u64,
    /// t(n) = d_n + 1.
    pub t_n: u64,
    /// D_n = { r in {0..n-1}^n : n | |r| }.
    pub d_set: Vec<Vec<u32>>,
    /// J_n = { r + e_{n+1} : r in {0..n}^n, |r| = n } minus the all-ones point.
    pub j_n: Vec<ExponentVector>,
    /// alpha* = (1/n, ..., 1/n, 0), the apex of the minimal face.
    pub alpha_star: Vec<Rat>,
}

pub fn an_data(n: usize) -> AnData {
    assert!(n >= 2);
    let nu = n as u32;
    let d_n = binom(2 * n as u64 - 1, n as u64) - n as u64 - 1;
    let d_set: Vec<Vec<u32>> = std::iter::repeat(0..nu)
        .take(n)
        .multi_cartesian_product()
        .filter(|r| r.iter().sum::<u32>() % nu == 0)
        .collect();
    let ones = ExponentVector::new(vec![1; n + 1]);
    let j_n: Vec<ExponentVector> = std::iter::repeat(0..=nu)
        .take(n)
        .multi_cartesian_product()
        .filter(|r| r.iter().sum::<u32>() == nu)
        .map(|mut r| {
            r.push(1);
            ExponentVector::new(r)
        })
        .filter(|v| *v != ones)
        .collect();
    let mut alpha_star = vec![lp::rat_frac(1, n as i64); n];
    alpha_star.push(Rat::zero());
    AnData { n, d_n, t_n: d_n + 1, d_set, j_n, alpha_star }
}

/// The closed-form presentation of h_{A_n}: K = { n e_i + e_{n+1} }, c = 1,
/// W = (1 - X_1 ... X_{n+1}) sum_{r in D_n} X^{(r, |r|/n)}.
pub fn presentation_an(n: usize) -> (Presentation, AnData) {
    let data = an_data(n);
    let nu = n as u32;
    let mut w_raw = SparseSeries::zero(n + 1);
    for r in &data.d_set {
        let s: u32 = r.iter().sum();
        let mut e = r.clone();
        e.push(s / nu);
        w_raw.add_term(ExponentVector::new(e), Int::one());
    }
    let mut all_ones = SparseSeries::one(n + 1);
    all_ones.add_term(ExponentVector::new(vec![1; n + 1]), -Int::one());
    let w = w_raw.mul_poly(&all_ones).expect("exact polynomials");
    let mut factors = BTreeMap::new();
    for i in 0..n {
        let mut e = vec![0u32; n + 1];
        e[i] = nu;
        e[n] = 1;
        factors.insert(ExponentVector::new(e), 1u64);
    }
    (Presentation { nvars: n + 1, factors, w, empty: false }, data)
}

// ---------------------------------------------------------------------------
// analytic data on I = K u S*(W)

/// One dual vertex with its contact data and the attached log-power degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexRecord {
    pub alpha: Vec<Rat>,
    pub contact: Vec<ExponentVector>,
    pub zeros: Vec<usize>,
    /// m(alpha) - n.
    pub degree: usize,
}

#[derive(Clone, Debug)]
pub struct AnalyticData {
    pub i_set: PointSet,
    pub dual: DualPolyhedron,
    /// c'(nu) on I: c on K only, the W-coefficient on S*(W) only, the sum on
    /// the intersection.
    pub cprime: BTreeMap<ExponentVector, Int>,
    pub ca: u64,
    pub iota: Rat,
    pub vertices: Vec<VertexRecord>,
}

/// Half the number of sign vectors in {+-1}^n satisfying every row relation;
/// meaningful for zero-row-sum matrices (where the count is even).
pub fn c_constant(a: &ToricMatrix) -> u64 {
    assert!(a.n < 30, "sign enumeration is exponential in the column count");
    let mut count = 0u64;
    for mask in 0u64..(1u64 << a.n) {
        let ok = a.rows.iter().all(|r| {
            let s: i64 = (0..a.n).filter(|&i| mask >> i & 1 == 1).map(|i| r[i]).sum();
            s % 2 == 0
        });
        if ok {
            count += 1;
        }
    }
    assert!(count % 2 == 0, "sign count must be even (zero row sums)");
    count / 2
}

pub fn analytic_data(
    p: &Presentation,
    a: &ToricMatrix,
) -> Result<AnalyticData, ToricError> {
    if p.empty {
        return Err(ToricError::EmptyPresentation);
    }
    if p.nvars != a.n {
        return Err(ToricError::DimensionMismatch(p.nvars, a.n));
    }
    let mut pts: BTreeSet<ExponentVector> = p.w.support(true);
    pts.extend(p.factors.keys().cloned());
    let i_set = PointSet::new(p.nvars, pts)?;
    let dual = polyhedra::dual(&i_set)?;

    let mut cprime: BTreeMap<ExponentVector, Int> = BTreeMap::new();
    for nu in i_set.points() {
        let c = Int::from(p.factors.get(nu).copied().unwrap_or(0));
        let u = p.w.coeff(nu);
        cprime.insert(nu.clone(), c + u);
    }
    for v in &dual.vertices {
        for nu in &v.contact {
            if cprime.get(nu) != Some(&Int::one()) {
                return Err(ToricError::CprimeViolation { nu: nu.clone() });
            }
        }
    }
    let vertices: Vec<VertexRecord> = dual
        .vertices
        .iter()
        .map(|v| VertexRecord {
            alpha: v.coords.clone(),
            contact: v.contact.clone(),
            zeros: v.zeros.clone(),
            degree: v.m - p.nvars,
        })
        .collect();
    let iota = dual.index.clone();
    let ca = c_constant(a);
    Ok(AnalyticData { i_set, dual, cprime, ca, iota, vertices })
}

/// Numerical Euler-product value on the dual boundary, with a crude tail
/// bound.
#[derive(Clone, Debug)]
pub struct EulerValue {
    pub value: f64,
    /// Heuristic bound on |log(full product / partial product)|.
    pub tail_bound: f64,
    pub contact_count: usize,
    pub primes_used: usize,
}

/// prod_{p <= pcut} (1 - 1/p)^{#K(I,alpha)} W(p^-alpha)
/// prod_{nu in K} (1 - p^{-<nu,alpha>})^{-c(nu)}, each factor checked
/// positive. The tail bound calibrates |log f_p| ~ C p^{-u} on the largest
/// sampled primes and integrates the tail; it is reported, never asserted.
pub fn h_alpha_value(
    p: &Presentation,
    alpha: &[Rat],
    pcut: u64,
) -> Result<EulerValue, ToricError> {
    if p.empty {
        return Err(ToricError::EmptyPresentation);
    }
    if alpha.len() != p.nvars {
        return Err(ToricError::DimensionMismatch(alpha.len(), p.nvars));
    }
    let mut pts: BTreeSet<ExponentVector> = p.w.support(true);
    pts.extend(p.factors.keys().cloned());
    if alpha.iter().any(|c| c.is_negative()) {
        return Err(ToricError::AlphaOffBoundary);
    }
    let pair = |nu: &ExponentVector| -> Rat {
        nu.entries().iter().zip(alpha).map(|(&e, c)| c * lp::rat(i64::from(e))).sum()
    };
    let mut contact_count = 0usize;
    let mut gap: Option<Rat> = None;
    for nu in &pts {
        let v = pair(nu);
        if v < Rat::one() {
            return Err(ToricError::AlphaOffBoundary);
        }
        if v == Rat::one() {
            contact_count += 1;
        } else {
            let g = v - Rat::one();
            gap = Some(match gap {
                None => g,
                Some(old) => old.min(g),
            });
        }
    }

    // precompute float exponents of W terms and K factors
    let w_terms: Vec<(f64, f64)> = p
        .w
        .terms()
        .map(|(mu, c)| (pair(mu).to_f64().expect("finite"), c.to_f64().expect("finite")))
        .collect();
    let k_factors: Vec<(f64, f64)> = p
        .factors
        .iter()
        .map(|(nu, &c)| (pair(nu).to_f64().expect("finite"), c as f64))
        .collect();
    let kc = contact_count as f64;

    let primes = crate::counting::primes_up_to(pcut);
    let mut log_value = 0.0f64;
    let mut sampled: Vec<(u64, f64)> = Vec::new();
    for &q in &primes {
        let qf = q as f64;
        let mut f = (1.0 - 1.0 / qf).powf(kc);
        let mut wv = 0.0f64;
        for &(e, c) in &w_terms {
            wv += c * qf.powf(-e);
        }
        f *= wv;
        for &(e, c) in &k_factors {
            f /= (1.0 - qf.powf(-e)).powf(c);
        }
        if !(f > 0.0) {
            return Err(ToricError::NonPositiveFactor { prime: q });
        }
        log_value += f.ln();
        sampled.push((q, f.ln().abs()));
    }

    let u = match gap {
        None => 2.0,
        Some(g) => (1.0 + g.to_f64().expect("finite")).min(2.0),
    };
    let tail_bound = if primes.is_empty() || u <= 1.0 {
        f64::INFINITY
    } else {
        let c_est = sampled
            .iter()
            .rev()
            .take(20)
            .map(|&(q, l)| l * (q as f64).powf(u))
            .fold(0.0f64, f64::max);
        let pf = pcut as f64;
        2.0 * c_est * pf.powf(1.0 - u) / (u - 1.0)
    };
    Ok(EulerValue {
        value: log_value.exp(),
        tail_bound,
        contact_count,
        primes_used: primes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{rat, rat_frac};

    fn ev(e: &[u32]) -> ExponentVector {
        ExponentVector::new(e.to_vec())
    }

    #[test]
    fn kernel_monoid_examples() {
        let a = ToricMatrix::new(vec![vec![1, -1]]).unwrap();
        let t = kernel_monoid(&a, &[0], 6);
        let expect: BTreeSet<ExponentVector> =
            [&[0, 0][..], &[1, 1], &[2, 2], &[3, 3]].iter().map(|e| ev(e)).collect();
        assert_eq!(t, expect);

        let a3 = ToricMatrix::an_matrix(3);
        let t = kernel_monoid(&a3, &[0], 4);
        assert!(t.contains(&ev(&[1, 1, 1, 1])));
        assert!(t.contains(&ev(&[0, 1, 2, 1])));
        assert!(t.contains(&ev(&[2, 1, 0, 1])));

        let a = ToricMatrix::new(vec![vec![1, 1]]).unwrap();
        let t = kernel_monoid(&a, &[-1], 10);
        assert!(t.is_empty());
    }

    #[test]
    fn f_a_examples() {
        let a3 = ToricMatrix::an_matrix(3);
        assert!(f_a(&a3, &[1, 1, 1, 1]).unwrap());
        assert!(f_a(&a3, &[1, 2, 4, 2]).unwrap());
        assert!(!f_a(&a3, &[2, 2, 2, 2]).unwrap());
        assert!(!f_a(&a3, &[1, 2, 3, 2]).unwrap());
        assert_eq!(f_a(&a3, &[0, 1, 1, 1]), Err(ToricError::ZeroCoordinate));
    }

    #[test]
    fn divide_once_examples() {
        // (1 - x)(1 + x + x^2) = 1 - x^3
        let mut w = SparseSeries::one(1);
        w.add_term(ev(&[3]), -Int::one());
        let q = divide_once(&w, &ev(&[1])).unwrap();
        let mut want = SparseSeries::one(1);
        want.add_term(ev(&[1]), Int::one());
        want.add_term(ev(&[2]), Int::one());
        assert_eq!(q, want);
        // 1 - x^3 is not divisible by 1 - x^2
        assert!(divide_once(&w, &ev(&[2])).is_none());
    }

    #[test]
    fn diagonal_presentation() {
        let a = ToricMatrix::new(vec![vec![1, -1]]).unwrap();
        let p = presentation_hab(&a, &[0], DEFAULT_BOUND).unwrap();
        assert!(!p.empty);
        assert_eq!(p.factors, [(ev(&[1, 1]), 1u64)].into_iter().collect());
        assert!(p.w.is_one());
        // the restricted variant divides the diagonal factor back out
        let q = presentation(&a, DEFAULT_BOUND).unwrap();
        assert!(q.factors.is_empty());
        assert!(q.w.is_one());
    }

    #[test]
    fn empty_target_presentation() {
        let a = ToricMatrix::new(vec![vec![1, 1]]).unwrap();
        let p = presentation_hab(&a, &[-1], DEFAULT_BOUND).unwrap();
        assert!(p.empty);
        assert!(p.expand(6).unwrap().is_zero());
    }

    #[test]
    fn bounded_target_presentation() {
        // x + y = 2: the three lattice points on a segment
        let a = ToricMatrix::new(vec![vec![1, 1]]).unwrap();
        let p = presentation_hab(&a, &[2], DEFAULT_BOUND).unwrap();
        assert!(!p.empty);
        assert!(p.factors.is_empty());
        assert_eq!(p.w.num_terms(), 3);
    }

    #[test]
    fn a3_presentations_agree() {
        let a3 = ToricMatrix::an_matrix(3);
        let generic = presentation(&a3, DEFAULT_BOUND).unwrap();
        let (closed, _) = presentation_an(3);
        assert!(verify_presentation(&generic, &a3, 8).unwrap());
        assert!(verify_presentation(&closed, &a3, 8).unwrap());
        let lhs = generic.expand(8).unwrap();
        let rhs = closed.expand(8).unwrap();
        assert!(lhs.sub(&rhs).unwrap().is_zero());
    }

    #[test]
    fn an_data_small() {
        let d3 = an_data(3);
        assert_eq!(d3.d_set.len(), 9);
        assert_eq!(d3.d_n, 6);
        assert_eq!(d3.t_n, 7);
        assert_eq!(d3.j_n.len(), 9);
        let d4 = an_data(4);
        assert_eq!(d4.d_n, 30);
        assert_eq!(d4.j_n.len(), 34);
    }

    #[test]
    fn w3_texture() {
        let (p, _) = presentation_an(3);
        assert_eq!(p.w.constant_term(), Int::one());
        // the all-ones monomial cancels between the two expansion layers
        assert_eq!(p.w.coeff(&ev(&[1, 1, 1, 1])), Int::zero());
        for nu in p.factors.keys() {
            assert!(divide_once(&p.w, nu).is_none(), "unitary condition");
        }
    }

    #[test]
    fn corrupted_presentation_fails_verification() {
        let (mut p, _) = presentation_an(3);
        p.w.add_term(ev(&[1, 0, 0, 0]), Int::one());
        let a3 = ToricMatrix::an_matrix(3);
        assert!(!verify_presentation(&p, &a3, 8).unwrap());
    }

    #[test]
    fn c_constant_examples() {
        assert_eq!(c_constant(&ToricMatrix::an_matrix(3)), 4);
        assert_eq!(c_constant(&ToricMatrix::an_matrix(4)), 8);
        assert_eq!(c_constant(&ToricMatrix::new(vec![vec![1, -1]]).unwrap()), 1);
    }

    #[test]
    fn analytic_data_diagonal() {
        let a = ToricMatrix::new(vec![vec![1, -1]]).unwrap();
        let p = presentation_hab(&a, &[0], DEFAULT_BOUND).unwrap();
        let d = analytic_data(&p, &a).unwrap();
        assert_eq!(d.i_set.len(), 1);
        assert_eq!(d.iota, rat(1));
        assert_eq!(d.cprime.get(&ev(&[1, 1])), Some(&Int::one()));
    }

    #[test]
    fn analytic_data_a3() {
        let (p, data) = presentation_an(3);
        let a3 = ToricMatrix::an_matrix(3);
        let d = analytic_data(&p, &a3).unwrap();
        assert_eq!(d.iota, rat(1));
        assert_eq!(d.ca, 4);
        let contact =
            polyhedra::contact_set(&d.i_set, &data.alpha_star).unwrap();
        assert_eq!(contact.len(), 9);
        let j_set: BTreeSet<ExponentVector> = data.j_n.iter().cloned().collect();
        assert_eq!(contact, j_set);
        // alpha* is a vertex of the minimal face with degree d_3
        let v = d
            .vertices
            .iter()
            .find(|v| v.alpha == data.alpha_star)
            .expect("alpha* among the dual vertices");
        assert_eq!(v.degree, 6);
        assert_eq!(v.zeros, vec![3]);
    }

    #[test]
    fn h_alpha_trivial_product_is_one() {
        let a = ToricMatrix::new(vec![vec![1, -1]]).unwrap();
        let p = presentation_hab(&a, &[0], DEFAULT_BOUND).unwrap();
        let v = h_alpha_value(&p, &[rat_frac(1, 2), rat_frac(1, 2)], 1000).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
        assert!(v.tail_bound < 1e-9);
        assert_eq!(v.contact_count, 1);
    }

    #[test]
    fn h_alpha_a3_positive() {
        let (p, data) = presentation_an(3);
        let v = h_alpha_value(&p, &data.alpha_star, 1000).unwrap();
        assert!(v.value > 0.0);
        assert_eq!(v.contact_count, 9);
        assert!(v.tail_bound.is_finite());
    }

    #[test]
    fn random_zero_sum_presentations_verify() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut done = 0;
        while done < 10 {
            // 1x3 zero-sum rows with small entries
            let x = rng.gen_range(-2i64..=2);
            let y = rng.gen_range(-2i64..=2);
            let row = vec![x, y, -(x + y)];
            if row.iter().all(|&v| v == 0) {
                continue;
            }
            let a = ToricMatrix::new(vec![row]).unwrap();
            let p = presentation(&a, DEFAULT_BOUND).unwrap();
            assert!(verify_presentation(&p, &a, 8).unwrap());
            done += 1;
        }
    }
}
