//! Sparse multivariate polynomial / truncated series arithmetic over the
//! integers, with exact-rational logarithms.
//!
//! Terms are kept in graded-lexicographic order so every serialization and
//! iteration is deterministic. A series may carry a `cutoff`: coefficients of
//! total weight above it are unknown and operations propagate the tightest
//! bound instead of silently producing wrong high-weight terms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Int = BigInt;
pub type Rat = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("constant term is not 1")]
    ConstantTermNotOne,
    #[error("operation requires an exact polynomial but a cutoff {0} is set")]
    Truncated(u32),
    #[error("requested weight {requested} exceeds known cutoff {cutoff}")]
    CutoffExceeded { requested: u32, cutoff: u32 },
}

/// Exponent vector of a monomial; ordered by total weight, then
/// lexicographically (graded-lex).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(entries: Vec<u32>) -> Self {
        ExponentVector(entries)
    }

    pub fn zero(nvars: usize) -> Self {
        ExponentVector(vec![0; nvars])
    }

    /// The i-th unit vector in `nvars` variables.
    pub fn unit(nvars: usize, i: usize) -> Self {
        let mut v = vec![0; nvars];
        v[i] = 1;
        ExponentVector(v)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: u32) -> Self {
        ExponentVector(self.0.iter().map(|&e| e * k).collect())
    }

    /// Componentwise division by `j`, if every entry is divisible.
    pub fn checked_div(&self, j: u32) -> Option<Self> {
        if j == 0 {
            return None;
        }
        let mut out = Vec::with_capacity(self.0.len());
        for &e in &self.0 {
            if e % j != 0 {
                return None;
            }
            out.push(e / j);
        }
        Some(ExponentVector(out))
    }

    /// Componentwise subtraction, if the result stays nonnegative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if self.dim() != other.dim() {
            return None;
        }
        let mut out = Vec::with_capacity(self.0.len());
        for (&a, &b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(ExponentVector(out))
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Integer-coefficient sparse series. `cutoff == None` means the value is an
/// exact polynomial.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparseSeries {
    nvars: usize,
    terms: BTreeMap<ExponentVector, Int>,
    cutoff: Option<u32>,
}

impl SparseSeries {
    pub fn zero(nvars: usize) -> Self {
        SparseSeries { nvars, terms: BTreeMap::new(), cutoff: None }
    }

    pub fn one(nvars: usize) -> Self {
        Self::monomial(ExponentVector::zero(nvars), Int::one())
    }

    pub fn monomial(exp: ExponentVector, coeff: Int) -> Self {
        let nvars = exp.dim();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        SparseSeries { nvars, terms, cutoff: None }
    }

    pub fn from_terms<I>(nvars: usize, it: I) -> Result<Self, SeriesError>
    where
        I: IntoIterator<Item = (ExponentVector, Int)>,
    {
        let mut s = SparseSeries::zero(nvars);
        for (e, c) in it {
            if e.dim() != nvars {
                return Err(SeriesError::DimensionMismatch(e.dim(), nvars));
            }
            s.add_term(e, c);
        }
        Ok(s)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn cutoff(&self) -> Option<u32> {
        self.cutoff
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Int)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(e, c)| e.is_zero() && c.is_one())
    }

    pub fn coeff(&self, exp: &ExponentVector) -> Int {
        self.terms.get(exp).cloned().unwrap_or_else(Int::zero)
    }

    pub fn constant_term(&self) -> Int {
        self.coeff(&ExponentVector::zero(self.nvars))
    }

    /// Largest total weight among stored terms (0 for the zero series).
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.weight()).max().unwrap_or(0)
    }

    /// Adds `coeff` to the term at `exp`, dropping the entry if it cancels.
    pub fn add_term(&mut self, exp: ExponentVector, coeff: Int) {
        debug_assert_eq!(exp.dim(), self.nvars);
        if coeff.is_zero() {
            return;
        }
        if let Some(b) = self.cutoff {
            if exp.weight() > b {
                return;
            }
        }
        let entry = self.terms.entry(exp.clone()).or_insert_with(Int::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn with_cutoff(mut self, cutoff: u32) -> Self {
        self.terms.retain(|e, _| e.weight() <= cutoff);
        self.cutoff = Some(cutoff);
        self
    }

    /// Drops terms of weight > n without recording a cutoff change beyond the
    /// tightest of (existing, n).
    pub fn truncated(&self, n: u32) -> Self {
        let b = self.cutoff.map_or(n, |c| c.min(n));
        self.clone().with_cutoff(b)
    }

    /// Support S(h); with `strict`, S*(h) = S(h) \ {0}.
    pub fn support(&self, strict: bool) -> BTreeSet<ExponentVector> {
        self.terms
            .keys()
            .filter(|e| !(strict && e.is_zero()))
            .cloned()
            .collect()
    }

    pub fn neg(&self) -> Self {
        SparseSeries {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            cutoff: self.cutoff,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        if self.nvars != other.nvars {
            return Err(SeriesError::DimensionMismatch(self.nvars, other.nvars));
        }
        let cutoff = match (self.cutoff, other.cutoff) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b),
            (None, None) => None,
        };
        let mut out = SparseSeries { nvars: self.nvars, terms: self.terms.clone(), cutoff };
        if let Some(b) = cutoff {
            out.terms.retain(|e, _| e.weight() <= b);
        }
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    /// Product truncated to total weight ≤ n; the result records the tightest
    /// of (n, implied cutoffs).
    pub fn mul_trunc(&self, other: &Self, n: u32) -> Result<Self, SeriesError> {
        if self.nvars != other.nvars {
            return Err(SeriesError::DimensionMismatch(self.nvars, other.nvars));
        }
        let mut bound = n;
        if let Some(c) = self.cutoff {
            bound = bound.min(c);
        }
        if let Some(c) = other.cutoff {
            bound = bound.min(c);
        }
        let mut terms: BTreeMap<ExponentVector, Int> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            let wa = ea.weight();
            if wa > bound {
                continue;
            }
            for (eb, cb) in &other.terms {
                if wa + eb.weight() > bound {
                    continue;
                }
                let e = ea.add(eb);
                let entry = terms.entry(e).or_insert_with(Int::zero);
                *entry += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(SparseSeries { nvars: self.nvars, terms, cutoff: Some(bound) })
    }

    /// Exact polynomial product; both operands must be exact polynomials.
    pub fn mul_poly(&self, other: &Self) -> Result<Self, SeriesError> {
        if let Some(c) = self.cutoff.or(other.cutoff) {
            return Err(SeriesError::Truncated(c));
        }
        if self.nvars != other.nvars {
            return Err(SeriesError::DimensionMismatch(self.nvars, other.nvars));
        }
        let mut terms: BTreeMap<ExponentVector, Int> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let entry = terms.entry(ea.add(eb)).or_insert_with(Int::zero);
                *entry += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(SparseSeries { nvars: self.nvars, terms, cutoff: None })
    }

    /// Multiplicative inverse modulo weight n+1; requires constant term 1.
    pub fn invert_unit(&self, n: u32) -> Result<Self, SeriesError> {
        if !self.constant_term().is_one() {
            return Err(SeriesError::ConstantTermNotOne);
        }
        // 1/(1+u) = sum (-u)^j; u has weight >= 1 so the sum is finite mod n+1.
        let mut u = self.clone().with_cutoff(n);
        u.terms.remove(&ExponentVector::zero(self.nvars));
        let mut acc = SparseSeries::one(self.nvars).with_cutoff(n);
        let mut pow = SparseSeries::one(self.nvars).with_cutoff(n);
        let minw = u.terms.keys().map(|e| e.weight()).min().unwrap_or(n + 1);
        if minw == 0 {
            unreachable!("constant removed above");
        }
        let mut j = 0u32;
        loop {
            j += 1;
            if j.saturating_mul(minw) > n {
                break;
            }
            pow = pow.mul_trunc(&u, n)?;
            if pow.is_zero() {
                break;
            }
            let signed = if j % 2 == 1 { pow.neg() } else { pow.clone() };
            acc = acc.add(&signed)?;
        }
        Ok(acc)
    }

    /// Coefficients of log h up to total weight n, as exact rationals.
    pub fn log_series(&self, n: u32) -> Result<BTreeMap<ExponentVector, Rat>, SeriesError> {
        if !self.constant_term().is_one() {
            return Err(SeriesError::ConstantTermNotOne);
        }
        let mut u = self.clone().with_cutoff(n);
        u.terms.remove(&ExponentVector::zero(self.nvars));
        let minw = u.terms.keys().map(|e| e.weight()).min().unwrap_or(n + 1);
        let mut acc: BTreeMap<ExponentVector, Rat> = BTreeMap::new();
        let mut pow = SparseSeries::one(self.nvars).with_cutoff(n);
        let mut j = 0u32;
        loop {
            j += 1;
            if j.saturating_mul(minw) > n {
                break;
            }
            pow = pow.mul_trunc(&u, n)?;
            if pow.is_zero() {
                break;
            }
            // (-1)^{j+1} / j
            let sign = if j % 2 == 1 { Int::one() } else { -Int::one() };
            let factor = Rat::new(sign, Int::from(j));
            for (e, c) in pow.terms() {
                let entry = acc.entry(e.clone()).or_insert_with(Rat::zero);
                *entry += Rat::from(c.clone()) * &factor;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(acc)
    }

    /// (1 - X^m)^e truncated at weight n, for any integer e.
    pub fn one_minus_monomial_pow(
        nvars: usize,
        m: &ExponentVector,
        e: &Int,
        n: u32,
    ) -> Self {
        assert_eq!(m.dim(), nvars);
        assert!(!m.is_zero(), "exponent of a cyclotomic-type factor must be nonzero");
        let w = m.weight();
        let mut terms: BTreeMap<ExponentVector, Int> = BTreeMap::new();
        if e.is_negative() {
            // (1 - t)^{-c} = sum_k C(k+c-1, c-1) t^k
            let c = (-e).clone();
            let mut k = 0u32;
            let mut coeff = Int::one();
            loop {
                if u64::from(k) * u64::from(w) > u64::from(n) {
                    break;
                }
                terms.insert(m.scale(k), coeff.clone());
                // next binomial: C(k+c, c-1) = C(k+c-1, c-1) * (k+c) / (k+1)
                coeff = coeff * (Int::from(k + 1) + &c - Int::one()) / Int::from(k + 1);
                k += 1;
            }
        } else {
            // finite binomial expansion of (1 - t)^c
            let mut coeff = Int::one();
            let mut k = Int::zero();
            loop {
                let kk: u32 = match u32::try_from(&k) {
                    Ok(v) => v,
                    Err(_) => break,
                };
                if &k > e || u64::from(kk) * u64::from(w) > u64::from(n) {
                    break;
                }
                let signed = if kk % 2 == 1 { -coeff.clone() } else { coeff.clone() };
                terms.insert(m.scale(kk), signed);
                coeff = coeff * (e - &k) / (&k + Int::one());
                k += Int::one();
            }
        }
        terms.retain(|_, c| !c.is_zero());
        SparseSeries { nvars, terms, cutoff: Some(n) }
    }

    /// Exact (1 - X^m)^c for c >= 0 as a polynomial.
    pub fn one_minus_monomial_pow_exact(nvars: usize, m: &ExponentVector, c: u64) -> Self {
        let mut acc = SparseSeries::one(nvars);
        let factor = {
            let mut f = SparseSeries::one(nvars);
            f.add_term(m.clone(), -Int::one());
            f
        };
        for _ in 0..c {
            acc = acc.mul_poly(&factor).expect("exact polynomials");
        }
        acc
    }
}

/// Exponential of a rational coefficient map, truncated at weight n.
/// Inverse of `log_series`; used by the round-trip oracle.
pub fn exp_series(
    nvars: usize,
    v: &BTreeMap<ExponentVector, Rat>,
    n: u32,
) -> BTreeMap<ExponentVector, Rat> {
    let v: BTreeMap<ExponentVector, Rat> = v
        .iter()
        .filter(|(e, c)| !e.is_zero() && e.weight() <= n && !c.is_zero())
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect();
    let minw = v.keys().map(|e| e.weight()).min().unwrap_or(n + 1);
    let mut acc: BTreeMap<ExponentVector, Rat> = BTreeMap::new();
    acc.insert(ExponentVector::zero(nvars), Rat::one());
    let mut pow = acc.clone();
    let mut factorial = Int::one();
    let mut j = 0u32;
    loop {
        j += 1;
        if j.saturating_mul(minw) > n {
            break;
        }
        pow = rat_mul_trunc(&pow, &v, n);
        if pow.is_empty() {
            break;
        }
        factorial *= Int::from(j);
        let inv = Rat::new(Int::one(), factorial.clone());
        for (e, c) in &pow {
            let entry = acc.entry(e.clone()).or_insert_with(Rat::zero);
            *entry += c * &inv;
        }
    }
    acc.retain(|_, c| !c.is_zero());
    acc
}

/// Truncated product of two rational coefficient maps.
pub fn rat_mul_trunc(
    a: &BTreeMap<ExponentVector, Rat>,
    b: &BTreeMap<ExponentVector, Rat>,
    n: u32,
) -> BTreeMap<ExponentVector, Rat> {
    let mut out: BTreeMap<ExponentVector, Rat> = BTreeMap::new();
    for (ea, ca) in a {
        if ea.weight() > n {
            continue;
        }
        for (eb, cb) in b {
            if ea.weight() + eb.weight() > n {
                continue;
            }
            let entry = out.entry(ea.add(eb)).or_insert_with(Rat::zero);
            *entry += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

// ---------------------------------------------------------------------------
// JSON form: {"nvars": n, "terms": [{"exp": [...], "coeff": "±digits"}]}
// Terms serialize in graded-lex order; coefficients as decimal strings.

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    nvars: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    cutoff: Option<u32>,
    terms: Vec<TermJson>,
}

impl Serialize for SparseSeries {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| TermJson { exp: e.entries().to_vec(), coeff: c.to_string() })
            .collect();
        SeriesJson { nvars: self.nvars, cutoff: self.cutoff, terms }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SparseSeries {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = SeriesJson::deserialize(de)?;
        let mut s = SparseSeries::zero(raw.nvars);
        if let Some(b) = raw.cutoff {
            s.cutoff = Some(b);
        }
        for t in raw.terms {
            if t.exp.len() != raw.nvars {
                return Err(D::Error::custom(format!(
                    "exponent of dimension {} in a series of {} variables",
                    t.exp.len(),
                    raw.nvars
                )));
            }
            let c: Int = t
                .coeff
                .parse()
                .map_err(|e| D::Error::custom(format!("bad coefficient {:?}: {e}", t.coeff)))?;
            s.add_term(ExponentVector::new(t.exp), c);
        }
        Ok(s)
    }
}
