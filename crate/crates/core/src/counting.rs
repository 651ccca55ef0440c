//! Brute-force counting oracles, deliberately independent of the series and
//! presentation machinery they are used to cross-check: box sums of the
//! invariant indicator F_A, the n-th power census behind the A_n asymptotics,
//! Dirichlet-coefficient comparison, and subgroup counting in rank-2 abelian
//! groups together with its two-variable Euler-product identity.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::series::{ExponentVector, Int, SparseSeries};
use crate::toric::{self, Presentation, ToricError, ToricMatrix};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CountError {
    #[error(transparent)]
    Toric(#[from] ToricError),
    #[error("box bounds must all be >= 1")]
    BadBounds,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("arguments must be in canonical form n1 | n2")]
    NotCanonical,
    #[error("group order {order} exceeds the enumeration budget {budget}")]
    BudgetExceeded { order: u64, budget: u64 },
    #[error("exponent a = {0} outside the supported range {{0, 1}}")]
    UnsupportedExponent(u32),
}

/// Inclusive per-coordinate upper bounds of an integer box [1, b_1] x ... .
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BoxSpec {
    pub bounds: Vec<u64>,
}

impl BoxSpec {
    pub fn new(bounds: Vec<u64>) -> Result<Self, CountError> {
        if bounds.is_empty() || bounds.iter().any(|&b| b == 0) {
            return Err(CountError::BadBounds);
        }
        Ok(BoxSpec { bounds })
    }

    /// Bounds floor(t^gamma_i) for a positive direction gamma.
    pub fn from_powers(t: u64, gamma: &[f64]) -> Result<Self, CountError> {
        if t == 0 || gamma.iter().any(|&g| g <= 0.0) {
            return Err(CountError::BadBounds);
        }
        BoxSpec::new(
            gamma.iter().map(|&g| ((t as f64).powf(g).floor() as u64).max(1)).collect(),
        )
    }
}

/// C(A) * sum of F_A over the box, exactly.
pub fn box_count(a: &ToricMatrix, spec: &BoxSpec) -> Result<Int, CountError> {
    if spec.bounds.len() != a.n {
        return Err(CountError::DimensionMismatch(spec.bounds.len(), a.n));
    }
    let ca = toric::c_constant(a);
    let mut m: Vec<u64> = vec![1; a.n];
    let mut total = Int::zero();
    loop {
        if toric::f_a(a, &m)? {
            total += 1;
        }
        // odometer step
        let mut i = 0;
        loop {
            if i == a.n {
                return Ok(total * Int::from(ca));
            }
            if m[i] < spec.bounds[i] {
                m[i] += 1;
                break;
            }
            m[i] = 1;
            i += 1;
        }
    }
}

/// Primes up to `limit` inclusive, by plain sieve.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut is_comp = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !is_comp[p] {
            out.push(p as u64);
            let mut q = p * p;
            while q <= n {
                is_comp[q] = true;
                q += p;
            }
        }
    }
    out
}

/// Smallest-prime-factor table for 0..=limit (entries 0 and 1 are 0).
pub fn spf_sieve(limit: u64) -> Vec<u32> {
    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Prime factorization via a precomputed spf table.
pub fn factorize_u64(mut x: u64, spf: &[u32]) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    while x > 1 {
        let p = u64::from(spf[x as usize]);
        let mut e = 0u32;
        while x % p == 0 {
            x /= p;
            e += 1;
        }
        out.insert(p, e);
    }
    out
}

/// N_inf(U(A_n); t): 2^{n-1} times the number of primitive n-th power
/// relations m_1 ... m_n = c^n with all m_i <= t and gcd(m_1,...,m_n,c) = 1.
///
/// The last coordinate is not enumerated: the exponent residues of the first
/// n-1 factors force m_n = s' j^n where s' completes every prime exponent to
/// a multiple of n.
pub fn nth_power_census(n: u32, t: u64) -> Result<Int, CountError> {
    if n < 2 || t == 0 {
        return Err(CountError::BadBounds);
    }
    let spf = spf_sieve(t);
    let facts: Vec<BTreeMap<u64, u32>> =
        (0..=t).map(|x| if x < 2 { BTreeMap::new() } else { factorize_u64(x, &spf) }).collect();

    fn rec(
        depth: u32,
        n: u32,
        t: u64,
        facts: &[BTreeMap<u64, u32>],
        merged: &mut BTreeMap<u64, u32>,
        ms: &mut Vec<u64>,
        count: &mut u64,
    ) {
        if depth == n - 1 {
            // completion factor s': raise every exponent to the next multiple of n
            let mut s = 1u128;
            for (&p, &e) in merged.iter() {
                let r = (n - e % n) % n;
                for _ in 0..r {
                    s = s.saturating_mul(u128::from(p));
                    if s > u128::from(t) {
                        return;
                    }
                }
            }
            let s = s as u64;
            let mut j = 1u64;
            loop {
                let jn = match j.checked_pow(n) {
                    Some(v) => v,
                    None => break,
                };
                let last = match s.checked_mul(jn) {
                    Some(v) if v <= t => v,
                    _ => break,
                };
                // n-th root of the full product, from the exponent data
                let mut root = 1u64;
                let mut total = merged.clone();
                for (&p, &e) in &facts[last as usize] {
                    *total.entry(p).or_insert(0) += e;
                }
                for (&p, &e) in &total {
                    debug_assert_eq!(e % n, 0);
                    root = root.saturating_mul(p.pow(e / n));
                }
                let mut g = root;
                for &m in ms.iter() {
                    g = num_integer::gcd(g, m);
                }
                g = num_integer::gcd(g, last);
                if g == 1 {
                    *count += 1;
                }
                j += 1;
            }
            return;
        }
        for m in 1..=t {
            for (&p, &e) in &facts[m as usize] {
                *merged.entry(p).or_insert(0) += e;
            }
            ms.push(m);
            rec(depth + 1, n, t, facts, merged, ms, count);
            ms.pop();
            for (&p, &e) in &facts[m as usize] {
                let v = merged.get_mut(&p).expect("just added");
                *v -= e;
                if *v == 0 {
                    merged.remove(&p);
                }
            }
        }
    }

    let mut merged = BTreeMap::new();
    let mut ms = Vec::new();
    let mut count = 0u64;
    rec(0, n, t, &facts, &mut merged, &mut ms, &mut count);
    Ok(Int::from(count) << (n - 1))
}

/// true iff the presentation's series coefficients match F_A on prime-power
/// arguments: for every listed prime p and every exponent vector nu with
/// entries <= e_bound, coeff(X^nu) = F_A(p^{nu_1}, ..., p^{nu_n}).
pub fn dirichlet_compare(
    p: &Presentation,
    a: &ToricMatrix,
    primes: &[u64],
    e_bound: u32,
) -> Result<bool, CountError> {
    if p.nvars != a.n {
        return Err(CountError::DimensionMismatch(p.nvars, a.n));
    }
    let weight = e_bound * a.n as u32;
    let h = p.expand(weight)?;
    let mut nu = vec![0u32; a.n];
    loop {
        let coeff = h.coeff(&ExponentVector::new(nu.clone()));
        for &q in primes {
            let m: Vec<u64> = nu.iter().map(|&e| q.pow(e)).collect();
            let f = if toric::f_a(a, &m)? { Int::one() } else { Int::zero() };
            if coeff != f {
                return Ok(false);
            }
        }
        let mut i = 0;
        loop {
            if i == a.n {
                return Ok(true);
            }
            if nu[i] < e_bound {
                nu[i] += 1;
                break;
            }
            nu[i] = 0;
            i += 1;
        }
    }
}

const SUBGROUP_BUDGET: u64 = 4096;

/// tau_a(Z/n1 + Z/n2) = sum over subgroups H of (#H)^a, by exhaustive
/// closure enumeration over generator pairs.
pub fn subgroup_count(n1: u64, n2: u64, a: u32) -> Result<Int, CountError> {
    if n1 == 0 || n2 == 0 || n2 % n1 != 0 {
        return Err(CountError::NotCanonical);
    }
    let order = n1 * n2;
    if order > SUBGROUP_BUDGET {
        return Err(CountError::BudgetExceeded { order, budget: SUBGROUP_BUDGET });
    }
    let elem_order = |(u, v): (u64, u64)| -> u64 {
        let ou = if u == 0 { 1 } else { n1 / num_integer::gcd(u, n1) };
        let ov = if v == 0 { 1 } else { n2 / num_integer::gcd(v, n2) };
        num_integer::lcm(ou, ov)
    };
    let elements: Vec<(u64, u64)> =
        (0..n1).flat_map(|u| (0..n2).map(move |v| (u, v))).collect();
    let mut subgroups: BTreeSet<Vec<(u64, u64)>> = BTreeSet::new();
    for &g1 in &elements {
        for &g2 in &elements {
            let (o1, o2) = (elem_order(g1), elem_order(g2));
            let mut h = BTreeSet::new();
            for i in 0..o1 {
                for j in 0..o2 {
                    h.insert((
                        (i * g1.0 + j * g2.0) % n1,
                        (i * g1.1 + j * g2.1) % n2,
                    ));
                }
            }
            subgroups.insert(h.into_iter().collect());
        }
    }
    let mut total = Int::zero();
    for h in &subgroups {
        total += Int::from(h.len() as u64).pow(a);
    }
    Ok(total)
}

/// Geometric series 1/(1 - r X_var) truncated at total weight n.
fn geometric(var: usize, ratio: &Int, n: u32) -> SparseSeries {
    let mut s = SparseSeries::zero(2).with_cutoff(n);
    let mut c = Int::one();
    for k in 0..=n {
        s.add_term(ExponentVector::new(if var == 0 { vec![k, 0] } else { vec![0, k] }), c.clone());
        c *= ratio;
    }
    s
}

/// Local factor at p of the two-variable subgroup zeta function of rank-2
/// abelian p-groups, as a series in (x, y) = (p^{-s1}, p^{-s2}):
///
///   (1 + p^a x - (p^a + 1) p^a x y)
///   / ((1-x)(1-p^{2a}x)(1-p^{a+1}x)(1-y)(1-p^a y)).
///
/// The coefficient of x^i y^j is tau_a(Z/p^i + Z/p^{i+j}).
pub fn abelian_local_factor(p: u64, a: u32, n: u32) -> SparseSeries {
    let pa = Int::from(p).pow(a);
    let mut num = SparseSeries::one(2).with_cutoff(n);
    num.add_term(ExponentVector::new(vec![1, 0]), pa.clone());
    num.add_term(ExponentVector::new(vec![1, 1]), -(&pa + Int::one()) * &pa);
    let mut out = num;
    for (var, ratio) in [
        (0, Int::one()),
        (0, Int::from(p).pow(2 * a)),
        (0, Int::from(p).pow(a + 1)),
        (1, Int::one()),
        (1, pa),
    ] {
        out = out
            .mul_trunc(&geometric(var, &ratio, n), n)
            .expect("two-variable series");
    }
    out
}

/// Verifies the Euler product against the subgroup-count oracle: for every
/// canonical pair n1 | n2 <= x, the global Dirichlet coefficient at
/// (d, m) = (n1, n2/n1) must equal tau_a(Z/n1 + Z/n2).
pub fn abelian_euler_check(a: u32, x: u64) -> Result<bool, CountError> {
    if a > 1 {
        return Err(CountError::UnsupportedExponent(a));
    }
    if x == 0 {
        return Err(CountError::BadBounds);
    }
    let emax = 64 - x.leading_zeros(); // >= log2(x)
    let n = 2 * emax + 2;
    let spf = spf_sieve(x.max(2));
    let locals: BTreeMap<u64, SparseSeries> = primes_up_to(x)
        .into_iter()
        .map(|p| (p, abelian_local_factor(p, a, n)))
        .collect();
    let coeff_at = |d: u64, m: u64| -> Int {
        let fd = factorize_u64(d, &spf);
        let fm = factorize_u64(m, &spf);
        let primes: BTreeSet<u64> = fd.keys().chain(fm.keys()).copied().collect();
        let mut acc = Int::one();
        for p in primes {
            let i = fd.get(&p).copied().unwrap_or(0);
            let j = fm.get(&p).copied().unwrap_or(0);
            acc *= locals[&p].coeff(&ExponentVector::new(vec![i, j]));
        }
        acc
    };
    for n2 in 1..=x {
        for n1 in 1..=n2 {
            if n2 % n1 != 0 {
                continue;
            }
            let expected = subgroup_count(n1, n2, a)?;
            let got = coeff_at(n1, n2 / n1);
            if got != expected {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_count_trivial() {
        let a3 = ToricMatrix::an_matrix(3);
        let b = BoxSpec::new(vec![1, 1, 1, 1]).unwrap();
        assert_eq!(box_count(&a3, &b).unwrap(), Int::from(4));
    }

    #[test]
    fn box_count_monotone() {
        let a3 = ToricMatrix::an_matrix(3);
        let small = box_count(&a3, &BoxSpec::new(vec![3, 3, 3, 3]).unwrap()).unwrap();
        let big = box_count(&a3, &BoxSpec::new(vec![4, 4, 4, 4]).unwrap()).unwrap();
        assert!(big >= small);
    }

    #[test]
    fn census_small_values() {
        assert_eq!(nth_power_census(3, 1).unwrap(), Int::from(4));
        assert_eq!(nth_power_census(3, 2).unwrap(), Int::from(4));
    }

    #[test]
    fn sieves_agree() {
        let ps = primes_up_to(50);
        assert_eq!(ps.first(), Some(&2));
        assert_eq!(ps.len(), 15);
        let spf = spf_sieve(50);
        assert_eq!(spf[49], 7);
        assert_eq!(
            factorize_u64(48, &spf),
            [(2u64, 4u32), (3, 1)].into_iter().collect()
        );
    }

    #[test]
    fn subgroup_fixtures() {
        assert_eq!(subgroup_count(2, 2, 0).unwrap(), Int::from(5));
        assert_eq!(subgroup_count(1, 1, 0).unwrap(), Int::from(1));
        assert_eq!(subgroup_count(1, 12, 0).unwrap(), Int::from(6));
        // Z/p + Z/p^2 has 2p + 4 subgroups
        assert_eq!(subgroup_count(2, 4, 0).unwrap(), Int::from(8));
        assert_eq!(subgroup_count(3, 9, 0).unwrap(), Int::from(10));
        // tau_1 of Z/p: 1 + p
        assert_eq!(subgroup_count(1, 5, 1).unwrap(), Int::from(6));
        assert_eq!(subgroup_count(2, 2, 1).unwrap(), Int::from(1 + 3 * 2 + 4));
    }

    #[test]
    fn subgroup_self_duality() {
        for (n1, n2) in [(2u64, 4u64), (2, 8), (4, 4), (3, 9), (2, 12)] {
            let mut by_order: BTreeMap<u64, u64> = BTreeMap::new();
            // re-enumerate via subgroup_count machinery at a = 0 per order:
            // cheap duplicate of the closure loop kept local to the test
            let order = n1 * n2;
            let elem_order = |(u, v): (u64, u64)| -> u64 {
                let ou = if u == 0 { 1 } else { n1 / num_integer::gcd(u, n1) };
                let ov = if v == 0 { 1 } else { n2 / num_integer::gcd(v, n2) };
                num_integer::lcm(ou, ov)
            };
            let elements: Vec<(u64, u64)> =
                (0..n1).flat_map(|u| (0..n2).map(move |v| (u, v))).collect();
            let mut subgroups: BTreeSet<Vec<(u64, u64)>> = BTreeSet::new();
            for &g1 in &elements {
                for &g2 in &elements {
                    let (o1, o2) = (elem_order(g1), elem_order(g2));
                    let mut h = BTreeSet::new();
                    for i in 0..o1 {
                        for j in 0..o2 {
                            h.insert((
                                (i * g1.0 + j * g2.0) % n1,
                                (i * g1.1 + j * g2.1) % n2,
                            ));
                        }
                    }
                    subgroups.insert(h.into_iter().collect());
                }
            }
            for h in &subgroups {
                *by_order.entry(h.len() as u64).or_insert(0) += 1;
            }
            for (&d, &cnt) in &by_order {
                assert_eq!(by_order.get(&(order / d)), Some(&cnt), "order {d} of {order}");
            }
        }
    }

    #[test]
    fn local_factor_small_coeffs() {
        // a = 0, coefficient of x^0 y^1 is tau_0(Z/p) = 2
        for p in [2u64, 3, 5] {
            let f = abelian_local_factor(p, 0, 8);
            assert_eq!(f.coeff(&ExponentVector::new(vec![0, 0])), Int::one());
            assert_eq!(f.coeff(&ExponentVector::new(vec![0, 1])), Int::from(2));
            // x^1 y^0: tau_0(Z/p + Z/p) = p + 3
            assert_eq!(f.coeff(&ExponentVector::new(vec![1, 0])), Int::from(p + 3));
            // x^1 y^1: tau_0(Z/p + Z/p^2) = 2p + 4
            assert_eq!(
                f.coeff(&ExponentVector::new(vec![1, 1])),
                Int::from(2 * p + 4)
            );
        }
        // a = 1: x^1 y^0 is tau_1(Z/p + Z/p) = 1 + p + 2p^2
        for p in [2u64, 3] {
            let f = abelian_local_factor(p, 1, 8);
            assert_eq!(
                f.coeff(&ExponentVector::new(vec![1, 0])),
                Int::from(1 + p + 2 * p * p)
            );
            assert_eq!(f.coeff(&ExponentVector::new(vec![0, 1])), Int::from(1 + p));
        }
    }

    #[test]
    fn abelian_check_tiny() {
        assert!(abelian_euler_check(0, 1).unwrap());
        assert!(abelian_euler_check(0, 6).unwrap());
        assert!(abelian_euler_check(1, 4).unwrap());
    }

    #[test]
    fn dirichlet_compare_diagonal() {
        let a = ToricMatrix::new(vec![vec![1, -1]]).unwrap();
        let p = toric::presentation(&a, toric::DEFAULT_BOUND).unwrap();
        assert!(dirichlet_compare(&p, &a, &[2], 6).unwrap());
    }
}
