//! Cyclotomic factorization of integer series and its consequences: the
//! zeta-factor translation, the cyclotomicity decision, and natural-boundary
//! descriptors for the associated Euler products.
//!
//! Everything rests on one identity: an integer series h with h(0) = 1 has a
//! unique expansion h = prod_m (1 - X^m)^{e(m)} with integer e(m), computed
//! weight by weight from log h.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::groupzeta;
use crate::polyhedra::{self, PointSet};
use crate::series::{ExponentVector, Int, Rat, SeriesError, SparseSeries};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EulerError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("non-integral exponent e({0}) = {1}; input had non-integer structure or internal bug")]
    NonIntegralExponent(ExponentVector, Rat),
    #[error("requested weight {requested} exceeds factorization cutoff {cutoff}")]
    CutoffExceeded { requested: u32, cutoff: u32 },
    #[error("prime variable index {0} out of range for {1} variables")]
    BadPrimeVar(usize, usize),
}

/// h = prod_{|m| <= cutoff} (1 - X^m)^{e(m)} modulo weight cutoff+1.
/// The zeta translation exposes gamma(m) = -e(m).
#[derive(Clone, Debug)]
pub struct CyclotomicFactorization {
    pub nvars: usize,
    pub prime_var: Option<usize>,
    pub cutoff: u32,
    pub exponents: BTreeMap<ExponentVector, Int>,
    /// h * prod (1 - X^m)^{-e(m)}; must equal 1 to the cutoff (kept for audit).
    pub residual: SparseSeries,
}

/// One factor zeta(<m', s> - k)^gamma of the translated Euler product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaFactor {
    /// Coefficients of s over the non-prime variables.
    pub linear: Vec<u32>,
    /// Shift k coming from the prime-variable degree.
    pub shift: u32,
    pub gamma: Int,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CyclotomicVerdict {
    /// Proof: the certificate reproduces h as an exact polynomial identity.
    Cyclotomic { certificate: Vec<(ExponentVector, Int)> },
    /// Evidence at the bound: nonzero exponents persist past any plausible
    /// finite certificate.
    NonCyclotomicUpTo { bound: u32, witness: ExponentVector },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundaryVariant {
    /// V(h; delta): includes the positivity constraints sigma_i > delta.
    V,
    /// V#(h; delta): halfspaces only.
    Vsharp,
}

#[derive(Clone, Debug)]
pub struct Halfspace {
    /// Exponent over the non-prime variables; constraint <nu, sigma> > k + delta.
    pub nu: Vec<u32>,
    pub k: u32,
}

#[derive(Clone, Debug)]
pub struct BoundaryDescriptor {
    pub variant: BoundaryVariant,
    pub halfspaces: Vec<Halfspace>,
    /// With the V variant, the constraints sigma_i > delta are implied.
    pub include_positivity: bool,
    /// Scalar abscissas for bivariate h with a designated prime variable.
    pub beta0: Option<Rat>,
    pub beta1: Option<Rat>,
}

/// Weight-graded recursion for the exponents e(m).
///
/// With c = log h, every weight-w coefficient satisfies
/// c_w = -sum_{j >= 1, j | w} e(w/j)/j, so processing weights upward gives
/// e(w) directly once lighter contributions are subtracted.
pub fn factorize(
    h: &SparseSeries,
    n: u32,
    prime_var: Option<usize>,
) -> Result<CyclotomicFactorization, EulerError> {
    if let Some(p) = prime_var {
        if p >= h.nvars() {
            return Err(EulerError::BadPrimeVar(p, h.nvars()));
        }
    }
    let log = h.log_series(n)?;
    let mut work: BTreeMap<ExponentVector, Rat> =
        log.into_iter().map(|(m, c)| (m, -c)).collect();
    let mut exponents: BTreeMap<ExponentVector, Int> = BTreeMap::new();
    // BTreeMap iterates graded-lex, i.e. weights ascending; pop minima.
    while let Some((m, r)) = work.pop_first() {
        if r.is_zero() {
            continue;
        }
        if !r.is_integer() {
            return Err(EulerError::NonIntegralExponent(m, r));
        }
        let e = r.to_integer();
        // subtract e(m)/j at j*m for all higher multiples in range
        let w = m.weight();
        let mut j = 2u32;
        while u64::from(j) * u64::from(w) <= u64::from(n) {
            let key = m.scale(j);
            let entry = work.entry(key).or_insert_with(Rat::zero);
            *entry -= Rat::new(e.clone(), Int::from(j));
            j += 1;
        }
        exponents.insert(m, e);
    }

    let mut inv_product = SparseSeries::one(h.nvars()).with_cutoff(n);
    for (m, e) in &exponents {
        let f = SparseSeries::one_minus_monomial_pow(h.nvars(), m, &(-e), n);
        inv_product = inv_product.mul_trunc(&f, n)?;
    }
    let residual = h.truncated(n).mul_trunc(&inv_product, n)?;
    debug_assert!(residual.is_one(), "residual must be 1: {residual:?}");

    Ok(CyclotomicFactorization { nvars: h.nvars(), prime_var, cutoff: n, exponents, residual })
}

/// prod_{|m| <= n} (1 - X^m)^{e(m)} truncated at weight n.
pub fn reconstruct(f: &CyclotomicFactorization, n: u32) -> Result<SparseSeries, EulerError> {
    if n > f.cutoff {
        return Err(EulerError::CutoffExceeded { requested: n, cutoff: f.cutoff });
    }
    let mut acc = SparseSeries::one(f.nvars).with_cutoff(n);
    for (m, e) in &f.exponents {
        if m.weight() > n {
            continue;
        }
        let factor = SparseSeries::one_minus_monomial_pow(f.nvars, m, e, n);
        acc = acc.mul_trunc(&factor, n)?;
    }
    Ok(acc)
}

/// Default search bound for the cyclotomicity decision.
pub fn default_cyclotomic_bound(h: &SparseSeries) -> u32 {
    4 * h.total_degree().max(1)
}

/// Total certificate workload above which the exact product check is not
/// attempted; genuinely cyclotomic inputs at desk scale stay far below it,
/// while non-cyclotomic inputs blow past it quickly.
const CERT_WORK_CAP: u64 = 4096;

/// Decides whether the polynomial h is a finite product prod (1-X^m)^{e(m)}.
///
/// A `Cyclotomic` verdict is a proof (exact polynomial identity); a
/// `NonCyclotomicUpTo` verdict is evidence at the bound b only.
pub fn cyclotomic_test(h: &SparseSeries, b: u32) -> Result<CyclotomicVerdict, EulerError> {
    let f = factorize(h, b, None)?;
    if f.exponents.is_empty() {
        return Ok(CyclotomicVerdict::Cyclotomic { certificate: vec![] });
    }
    let work: u64 = f
        .exponents
        .iter()
        .map(|(m, e)| {
            let e_mag: u64 = e.magnitude().try_into().unwrap_or(u64::MAX);
            e_mag.saturating_mul(u64::from(m.weight()))
        })
        .fold(0u64, u64::saturating_add);
    let witness = || {
        f.exponents
            .keys()
            .next_back()
            .expect("nonempty exponent map")
            .clone()
    };
    if work > CERT_WORK_CAP {
        return Ok(CyclotomicVerdict::NonCyclotomicUpTo { bound: b, witness: witness() });
    }
    // exact check: h * prod_{e<0}(1-X^m)^{-e} == prod_{e>0}(1-X^m)^{e}
    let mut lhs = h.clone();
    let mut rhs = SparseSeries::one(h.nvars());
    for (m, e) in &f.exponents {
        let c: u64 = e.magnitude().try_into().expect("within work cap");
        let factor = SparseSeries::one_minus_monomial_pow_exact(h.nvars(), m, c);
        if e.is_negative() {
            lhs = lhs.mul_poly(&factor)?;
        } else {
            rhs = rhs.mul_poly(&factor)?;
        }
    }
    if lhs == rhs {
        let certificate = f.exponents.iter().map(|(m, e)| (m.clone(), e.clone())).collect();
        Ok(CyclotomicVerdict::Cyclotomic { certificate })
    } else {
        Ok(CyclotomicVerdict::NonCyclotomicUpTo { bound: b, witness: witness() })
    }
}

/// Translates factorization exponents into zeta factors
/// zeta(<m', s> - k)^{-e(m)}, sorted by (k, graded-lex m').
pub fn zeta_translation(f: &CyclotomicFactorization) -> Vec<ZetaFactor> {
    let mut out: Vec<ZetaFactor> = f
        .exponents
        .iter()
        .map(|(m, e)| {
            let (linear, shift) = split_prime(m, f.prime_var);
            ZetaFactor { linear, shift, gamma: -e.clone() }
        })
        .collect();
    out.sort_by(|a, b| {
        let wa: u32 = a.linear.iter().sum();
        let wb: u32 = b.linear.iter().sum();
        a.shift
            .cmp(&b.shift)
            .then(wa.cmp(&wb))
            .then_with(|| a.linear.cmp(&b.linear))
    });
    out
}

fn split_prime(m: &ExponentVector, prime_var: Option<usize>) -> (Vec<u32>, u32) {
    match prime_var {
        None => (m.entries().to_vec(), 0),
        Some(p) => {
            let mut linear = Vec::with_capacity(m.dim() - 1);
            let mut shift = 0;
            for (i, &e) in m.entries().iter().enumerate() {
                if i == p {
                    shift = e;
                } else {
                    linear.push(e);
                }
            }
            (linear, shift)
        }
    }
}

/// Halfspace description of the convergence/continuation domain: one
/// constraint <nu, sigma> > k + delta per extremal support point at each
/// prime-power level k.
pub fn boundary(
    h: &SparseSeries,
    variant: BoundaryVariant,
    prime_var: Option<usize>,
) -> Result<BoundaryDescriptor, EulerError> {
    if let Some(p) = prime_var {
        if p >= h.nvars() {
            return Err(EulerError::BadPrimeVar(p, h.nvars()));
        }
    }
    let reduced_dim = if prime_var.is_some() { h.nvars() - 1 } else { h.nvars() };
    let mut by_level: BTreeMap<u32, BTreeSet<ExponentVector>> = BTreeMap::new();
    for m in h.support(true) {
        let (nu, k) = split_prime(&m, prime_var);
        let nu = ExponentVector::new(nu);
        if nu.is_zero() {
            // a pure prime power contributes no halfspace in sigma
            continue;
        }
        by_level.entry(k).or_default().insert(nu);
    }
    let mut halfspaces = Vec::new();
    for (k, pts) in &by_level {
        let ps = PointSet::new(reduced_dim, pts.iter().cloned())
            .expect("support points are nonzero");
        let ext = polyhedra::extremal_points(&ps).expect("nonempty level");
        for nu in ext {
            halfspaces.push(Halfspace { nu: nu.entries().to_vec(), k: *k });
        }
    }

    let (beta0, beta1) = if h.nvars() == 2 && prime_var.is_some() {
        let p = prime_var.unwrap();
        let pairs: Vec<(u32, u32)> = h
            .support(true)
            .iter()
            .map(|m| (m.entries()[p], m.entries()[1 - p]))
            .collect();
        match groupzeta::beta_pair(&pairs) {
            Ok(Some((b0, b1))) => (Some(b0), Some(b1)),
            _ => (None, None),
        }
    } else {
        (None, None)
    };

    let include_positivity = matches!(variant, BoundaryVariant::V);
    Ok(BoundaryDescriptor { variant, halfspaces, include_positivity, beta0, beta1 })
}
