//! Group-zeta utilities: leading-pole data extracted from cone-integral
//! numerics, and the two natural-boundary abscissas of uniform bivariate
//! zeta functions.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{Int, Rat, SparseSeries};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupZetaError {
    #[error("cone data must contain at least one pair")]
    EmptyConeData,
    #[error("cone pair ({0}, {1}) has A + B = 0")]
    DegeneratePair(u64, u64),
    #[error("series must be bivariate, got {0} variables")]
    NotBivariate(usize),
    #[error("constant term must be 1")]
    ConstantTermNotOne,
    #[error("term X1^{0} with no X2 part: no finite abscissa")]
    PrimeOnlyTerm(u32),
}

/// Pairs (A_j, B_j) attached to the divisors of a cone-integral resolution;
/// the resolution pipeline producing them is an input boundary.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConeData {
    pub pairs: Vec<(u64, u64)>,
}

impl ConeData {
    pub fn new(pairs: Vec<(u64, u64)>) -> Result<Self, GroupZetaError> {
        if pairs.is_empty() {
            return Err(GroupZetaError::EmptyConeData);
        }
        for &(a, b) in &pairs {
            if a == 0 && b == 0 {
                return Err(GroupZetaError::DegeneratePair(a, b));
            }
        }
        Ok(ConeData { pairs })
    }
}

/// Candidate pole alpha_k = (1 - B_k)/A_k per pair (minus infinity when
/// A_k = 0); returns the maximum and its multiplicity.
pub fn leading_pole(d: &ConeData) -> (Option<Rat>, usize) {
    let alphas: Vec<Option<Rat>> = d
        .pairs
        .iter()
        .map(|&(a, b)| {
            if a == 0 {
                None
            } else {
                Some(Rat::new(Int::from(1) - Int::from(b), Int::from(a)))
            }
        })
        .collect();
    let best = alphas.iter().flatten().max().cloned();
    match best {
        None => (None, 0),
        Some(a0) => {
            let m0 = alphas.iter().flatten().filter(|&a| *a == a0).count();
            (Some(a0), m0)
        }
    }
}

/// The two convergence abscissas of h = 1 + H(X1, X2) where X1 plays the prime p
/// and X2 plays p^{-s}:
///
///   beta0 = max_j deg_{X1} H_j / j   over H = sum_j H_j(X1) X2^j,
///   beta1 = max_k k / ord_{X2} h_k   over H = sum_k h_k(X2) X1^k.
///
/// Returns None when H = 0 (no boundary). The two values always agree; the
/// flag is returned so the equality can be asserted by property tests.
pub fn uniform_boundary(
    h: &SparseSeries,
) -> Result<Option<(Rat, Rat, bool)>, GroupZetaError> {
    if h.nvars() != 2 {
        return Err(GroupZetaError::NotBivariate(h.nvars()));
    }
    if h.constant_term() != Int::from(1) {
        return Err(GroupZetaError::ConstantTermNotOne);
    }
    let pairs: Vec<(u32, u32)> = h
        .support(true)
        .iter()
        .map(|m| (m.entries()[0], m.entries()[1]))
        .collect();
    beta_pair(&pairs).map(|opt| opt.map(|(b0, b1)| {
        let eq = b0 == b1;
        (b0, b1, eq)
    }))
}

/// Core beta computation on support pairs (k, j) with k the prime-variable
/// exponent. Shared with the euler module's boundary descriptor.
pub fn beta_pair(support: &[(u32, u32)]) -> Result<Option<(Rat, Rat)>, GroupZetaError> {
    if support.is_empty() {
        return Ok(None);
    }
    for &(k, j) in support {
        if k >= 1 && j == 0 {
            return Err(GroupZetaError::PrimeOnlyTerm(k));
        }
    }
    // beta0: per X2-degree j, the largest X1-degree n(j), maximize n(j)/j
    let mut beta0 = Rat::zero();
    {
        use std::collections::BTreeMap;
        let mut n_of_j: BTreeMap<u32, u32> = BTreeMap::new();
        for &(k, j) in support {
            if j >= 1 {
                let e = n_of_j.entry(j).or_insert(0);
                *e = (*e).max(k);
            }
        }
        for (j, n) in n_of_j {
            let v = Rat::new(Int::from(n), Int::from(j));
            if v > beta0 {
                beta0 = v;
            }
        }
    }
    // beta1: per X1-degree k >= 1, the order m(k) = min X2-degree, maximize k/m(k)
    let mut beta1 = Rat::zero();
    {
        use std::collections::BTreeMap;
        let mut m_of_k: BTreeMap<u32, u32> = BTreeMap::new();
        for &(k, j) in support {
            if k >= 1 {
                let e = m_of_k.entry(k).or_insert(u32::MAX);
                *e = (*e).min(j);
            }
        }
        for (k, m) in m_of_k {
            let v = Rat::new(Int::from(k), Int::from(m));
            if v > beta1 {
                beta1 = v;
            }
        }
    }
    Ok(Some((beta0, beta1)))
}

/// The degree-6 symplectic local factor used as a worked fixture:
/// h(X, Y) = 1 + (X + X^2 + X^3 + X^4) Y + X^5 Y^2, X the prime variable.
pub fn gsp6_polynomial() -> SparseSeries {
    use crate::series::ExponentVector;
    SparseSeries::from_terms(
        2,
        [
            (vec![0, 0], 1),
            (vec![1, 1], 1),
            (vec![2, 1], 1),
            (vec![3, 1], 1),
            (vec![4, 1], 1),
            (vec![5, 2], 1),
        ]
        .into_iter()
        .map(|(e, c)| (ExponentVector::new(e), Int::from(c))),
    )
    .expect("fixed fixture")
}
