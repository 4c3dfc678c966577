//! Dense truncated formal power series over Z or Z/M.
//!
//! A [`TruncatedSeries`] holds coefficients c_0..c_order of a series known
//! modulo q^(order+1).  The coefficient ring is a runtime value
//! ([`CoefficientRing`]): either exact integers or integers modulo M >= 2,
//! so the exact and modular computation paths share one implementation.
//! Residues are stored canonically in [0, M).
//!
//! Internally a modular ring with M <= 2^32 keeps its coefficients in
//! machine words (products fit in u64 and Cauchy convolutions accumulate in
//! u128 without overflow); larger moduli fall back to big integers.  The
//! word path is what makes the long congruence-verification tables cheap.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Largest modulus kept in machine words: residues below 2^32 multiply
/// within u64, and u128 sums of u64 terms cannot overflow for any series
/// length this crate allows.
const WORD_MODULUS_MAX: u64 = 1 << 32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch { left: String, right: String },
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(BigUint),
    #[error("coefficient index {index} exceeds truncation order {order}")]
    CoefficientOutOfRange { index: usize, order: usize },
    #[error("a series needs at least the constant coefficient")]
    EmptyCoefficients,
    #[error("operation requires the exact integer ring")]
    ExactRingRequired,
}

/// Coefficient ring: exact integers or Z/M.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientRing {
    repr: RingRepr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum RingRepr {
    Exact,
    /// Z/M with M <= 2^32, residues in machine words.
    Word { m: u64 },
    /// Z/M with arbitrary M.
    Big { m: BigUint },
}

impl CoefficientRing {
    /// The exact integer ring Z.
    pub fn exact() -> Self {
        CoefficientRing { repr: RingRepr::Exact }
    }

    /// The modular ring Z/M, M >= 2.
    pub fn modular(m: BigUint) -> Result<Self, SeriesError> {
        if m < BigUint::from(2u32) {
            return Err(SeriesError::InvalidModulus(m));
        }
        let repr = match m.to_u64() {
            Some(w) if w <= WORD_MODULUS_MAX => RingRepr::Word { m: w },
            _ => RingRepr::Big { m },
        };
        Ok(CoefficientRing { repr })
    }

    /// Convenience constructor for machine-word moduli.
    pub fn modular_u64(m: u64) -> Result<Self, SeriesError> {
        Self::modular(BigUint::from(m))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, RingRepr::Exact)
    }

    /// The modulus, or None for the exact ring.
    pub fn modulus(&self) -> Option<BigUint> {
        match &self.repr {
            RingRepr::Exact => None,
            RingRepr::Word { m } => Some(BigUint::from(*m)),
            RingRepr::Big { m } => Some(m.clone()),
        }
    }

    fn describe(&self) -> String {
        match &self.repr {
            RingRepr::Exact => "Z".to_string(),
            RingRepr::Word { m } => format!("Z/{m}"),
            RingRepr::Big { m } => format!("Z/{m}"),
        }
    }

    fn mismatch(&self, other: &Self) -> SeriesError {
        SeriesError::RingMismatch { left: self.describe(), right: other.describe() }
    }

    /// Canonical residue of x: x itself in Z, x mod M in [0, M) otherwise.
    pub fn reduce(&self, x: &BigInt) -> BigInt {
        match &self.repr {
            RingRepr::Exact => x.clone(),
            RingRepr::Word { m } => x.mod_floor(&BigInt::from(*m)),
            RingRepr::Big { m } => x.mod_floor(&BigInt::from(m.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum CoeffData {
    Int(Vec<BigInt>),
    Word(Vec<u64>),
    Big(Vec<BigUint>),
}

impl CoeffData {
    fn len(&self) -> usize {
        match self {
            CoeffData::Int(v) => v.len(),
            CoeffData::Word(v) => v.len(),
            CoeffData::Big(v) => v.len(),
        }
    }
}

/// A formal power series truncated at q^(order+1): exactly order+1 stored
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    ring: CoefficientRing,
    coeffs: CoeffData,
}

impl TruncatedSeries {
    fn fresh(ring: &CoefficientRing, len: usize) -> CoeffData {
        match &ring.repr {
            RingRepr::Exact => CoeffData::Int(vec![BigInt::zero(); len]),
            RingRepr::Word { .. } => CoeffData::Word(vec![0; len]),
            RingRepr::Big { .. } => CoeffData::Big(vec![BigUint::zero(); len]),
        }
    }

    /// The zero series truncated at the given order.
    pub fn zero(ring: &CoefficientRing, order: usize) -> Self {
        let coeffs = Self::fresh(ring, order + 1);
        TruncatedSeries { ring: ring.clone(), coeffs }
    }

    /// The constant series 1.
    pub fn one(ring: &CoefficientRing, order: usize) -> Self {
        let mut s = Self::zero(ring, order);
        match &mut s.coeffs {
            CoeffData::Int(v) => v[0] = BigInt::one(),
            CoeffData::Word(v) => v[0] = 1,
            CoeffData::Big(v) => v[0] = BigUint::one(),
        }
        s
    }

    /// Build a series from integer coefficients (index k = coefficient of
    /// q^k), reducing into the ring.  The order is coeffs.len() - 1.
    pub fn from_bigint_coeffs(ring: &CoefficientRing, coeffs: &[BigInt]) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::EmptyCoefficients);
        }
        let data = match &ring.repr {
            RingRepr::Exact => CoeffData::Int(coeffs.to_vec()),
            RingRepr::Word { m } => {
                let mb = BigInt::from(*m);
                CoeffData::Word(coeffs.iter().map(|c| c.mod_floor(&mb).to_u64().unwrap()).collect())
            }
            RingRepr::Big { m } => {
                let mb = BigInt::from(m.clone());
                CoeffData::Big(
                    coeffs.iter().map(|c| c.mod_floor(&mb).to_biguint().unwrap()).collect(),
                )
            }
        };
        Ok(TruncatedSeries { ring: ring.clone(), coeffs: data })
    }

    /// Convenience for tests and small literals.
    pub fn from_i64_coeffs(ring: &CoefficientRing, coeffs: &[i64]) -> Result<Self, SeriesError> {
        let big: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
        Self::from_bigint_coeffs(ring, &big)
    }

    pub fn ring(&self) -> &CoefficientRing {
        &self.ring
    }

    /// Truncation order: coefficients of q^0 .. q^order are stored.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of q^k as a canonical integer (the residue itself for
    /// modular rings).
    pub fn coefficient(&self, k: usize) -> Result<BigInt, SeriesError> {
        if k > self.order() {
            return Err(SeriesError::CoefficientOutOfRange { index: k, order: self.order() });
        }
        Ok(match &self.coeffs {
            CoeffData::Int(v) => v[k].clone(),
            CoeffData::Word(v) => BigInt::from(v[k]),
            CoeffData::Big(v) => BigInt::from(v[k].clone()),
        })
    }

    /// All stored coefficients as canonical integers.
    pub fn coefficients(&self) -> Vec<BigInt> {
        (0..=self.order()).map(|k| self.coefficient(k).unwrap()).collect()
    }

    /// Index of the lowest nonzero coefficient, or None for the zero series
    /// (zero as far as the truncation can see).
    pub fn valuation(&self) -> Option<usize> {
        match &self.coeffs {
            CoeffData::Int(v) => v.iter().position(|c| !c.is_zero()),
            CoeffData::Word(v) => v.iter().position(|&c| c != 0),
            CoeffData::Big(v) => v.iter().position(|c| !c.is_zero()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    /// Copy truncated at a lower order.
    pub fn truncated(&self, order: usize) -> Self {
        let order = order.min(self.order());
        let coeffs = match &self.coeffs {
            CoeffData::Int(v) => CoeffData::Int(v[..=order].to_vec()),
            CoeffData::Word(v) => CoeffData::Word(v[..=order].to_vec()),
            CoeffData::Big(v) => CoeffData::Big(v[..=order].to_vec()),
        };
        TruncatedSeries { ring: self.ring.clone(), coeffs }
    }

    /// Reinterpret an exact series in another ring by reducing every
    /// coefficient.  Only defined from the exact ring.
    pub fn reduced(&self, ring: &CoefficientRing) -> Result<Self, SeriesError> {
        if !self.ring.is_exact() {
            return Err(SeriesError::ExactRingRequired);
        }
        Self::from_bigint_coeffs(ring, &self.coefficients())
    }

    fn check_ring(&self, other: &Self) -> Result<(), SeriesError> {
        if self.ring != other.ring {
            return Err(self.ring.mismatch(&other.ring));
        }
        Ok(())
    }

    /// Sum, truncated at the smaller order.
    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_ring(other)?;
        let order = self.order().min(other.order());
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (CoeffData::Int(a), CoeffData::Int(b)) => {
                CoeffData::Int((0..=order).map(|i| &a[i] + &b[i]).collect())
            }
            (CoeffData::Word(a), CoeffData::Word(b)) => {
                let m = self.word_modulus();
                CoeffData::Word((0..=order).map(|i| (a[i] + b[i]) % m).collect())
            }
            (CoeffData::Big(a), CoeffData::Big(b)) => {
                let m = self.big_modulus();
                CoeffData::Big((0..=order).map(|i| (&a[i] + &b[i]) % m).collect())
            }
            _ => unreachable!("ring equality implies matching representation"),
        };
        Ok(TruncatedSeries { ring: self.ring.clone(), coeffs })
    }

    /// Difference, truncated at the smaller order.
    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_ring(other)?;
        let order = self.order().min(other.order());
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (CoeffData::Int(a), CoeffData::Int(b)) => {
                CoeffData::Int((0..=order).map(|i| &a[i] - &b[i]).collect())
            }
            (CoeffData::Word(a), CoeffData::Word(b)) => {
                let m = self.word_modulus();
                CoeffData::Word((0..=order).map(|i| (a[i] + m - b[i]) % m).collect())
            }
            (CoeffData::Big(a), CoeffData::Big(b)) => {
                let m = self.big_modulus();
                CoeffData::Big((0..=order).map(|i| (&a[i] + m - &b[i]) % m).collect())
            }
            _ => unreachable!("ring equality implies matching representation"),
        };
        Ok(TruncatedSeries { ring: self.ring.clone(), coeffs })
    }

    fn word_modulus(&self) -> u64 {
        match &self.ring.repr {
            RingRepr::Word { m } => *m,
            _ => unreachable!(),
        }
    }

    fn big_modulus(&self) -> &BigUint {
        match &self.ring.repr {
            RingRepr::Big { m } => m,
            _ => unreachable!(),
        }
    }

    /// Cauchy product, truncated at the smaller order.  Leading zero runs of
    /// both factors are skipped, so multiplying a series of valuation k costs
    /// only the coefficients that can still land below the truncation order.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_ring(other)?;
        let order = self.order().min(other.order());
        let (va, vb) = match (self.valuation(), other.valuation()) {
            (Some(va), Some(vb)) => (va, vb),
            _ => return Ok(Self::zero(&self.ring, order)),
        };
        if va + vb > order {
            return Ok(Self::zero(&self.ring, order));
        }
        let mut out = Self::fresh(&self.ring, order + 1);
        match (&self.coeffs, &other.coeffs, &mut out) {
            (CoeffData::Word(a), CoeffData::Word(b), CoeffData::Word(c)) => {
                let m = self.word_modulus() as u128;
                for t in (va + vb)..=order {
                    let lo = va.max(t.saturating_sub(b.len() - 1));
                    let hi = (t - vb).min(a.len() - 1);
                    let mut acc: u128 = 0;
                    for i in lo..=hi {
                        acc += (a[i] as u128) * (b[t - i] as u128);
                    }
                    c[t] = (acc % m) as u64;
                }
            }
            (CoeffData::Int(a), CoeffData::Int(b), CoeffData::Int(c)) => {
                for t in (va + vb)..=order {
                    let lo = va.max(t.saturating_sub(b.len() - 1));
                    let hi = (t - vb).min(a.len() - 1);
                    let mut acc = BigInt::zero();
                    for i in lo..=hi {
                        acc += &a[i] * &b[t - i];
                    }
                    c[t] = acc;
                }
            }
            (CoeffData::Big(a), CoeffData::Big(b), CoeffData::Big(c)) => {
                let m = self.big_modulus();
                for t in (va + vb)..=order {
                    let lo = va.max(t.saturating_sub(b.len() - 1));
                    let hi = (t - vb).min(a.len() - 1);
                    let mut acc = BigUint::zero();
                    for i in lo..=hi {
                        acc += &a[i] * &b[t - i];
                    }
                    c[t] = acc % m;
                }
            }
            _ => unreachable!("ring equality implies matching representation"),
        }
        Ok(TruncatedSeries { ring: self.ring.clone(), coeffs: out })
    }

    /// Multiply by (1-q)^e for any sign of e, in O(|e| * order) ring
    /// operations: each positive step is an in-place convolution with 1-q,
    /// each negative step the inverse prefix-sum pass.  This is what keeps
    /// the xi pipeline quadratic instead of cubic in the table length.
    pub fn mul_one_minus_q_pow(mut self, e: i64) -> Self {
        let len = self.coeffs.len();
        if e >= 0 {
            for _ in 0..e {
                match &mut self.coeffs {
                    CoeffData::Int(v) => {
                        for i in (1..len).rev() {
                            let prev = v[i - 1].clone();
                            v[i] -= prev;
                        }
                    }
                    CoeffData::Word(v) => {
                        let m = match &self.ring.repr {
                            RingRepr::Word { m } => *m,
                            _ => unreachable!(),
                        };
                        for i in (1..len).rev() {
                            v[i] = (v[i] + m - v[i - 1]) % m;
                        }
                    }
                    CoeffData::Big(v) => {
                        let m = match &self.ring.repr {
                            RingRepr::Big { m } => m.clone(),
                            _ => unreachable!(),
                        };
                        for i in (1..len).rev() {
                            let prev = v[i - 1].clone();
                            v[i] = (&v[i] + &m - prev) % &m;
                        }
                    }
                }
            }
        } else {
            for _ in 0..e.unsigned_abs() {
                match &mut self.coeffs {
                    CoeffData::Int(v) => {
                        for i in 1..len {
                            let prev = v[i - 1].clone();
                            v[i] += prev;
                        }
                    }
                    CoeffData::Word(v) => {
                        let m = match &self.ring.repr {
                            RingRepr::Word { m } => *m,
                            _ => unreachable!(),
                        };
                        for i in 1..len {
                            v[i] = (v[i] + v[i - 1]) % m;
                        }
                    }
                    CoeffData::Big(v) => {
                        let m = match &self.ring.repr {
                            RingRepr::Big { m } => m.clone(),
                            _ => unreachable!(),
                        };
                        for i in 1..len {
                            let prev = v[i - 1].clone();
                            v[i] = (&v[i] + prev) % &m;
                        }
                    }
                }
            }
        }
        self
    }
}

/// (1-q)^e truncated at the given order, for e of either sign; the
/// coefficient of q^k is binomial(e, k) * (-1)^k.
pub fn binomial_series(e: i64, ring: &CoefficientRing, order: usize) -> TruncatedSeries {
    TruncatedSeries::one(ring, order).mul_one_minus_q_pow(e)
}

/// The q-Pochhammer symbol (q; q)_n = prod_{j=1..n} (1 - q^j), truncated.
/// Factors with j beyond the truncation order are invisible and skipped.
pub fn q_pochhammer(n: u64, ring: &CoefficientRing, order: usize) -> TruncatedSeries {
    let mut s = TruncatedSeries::one(ring, order);
    let len = order + 1;
    for j in 1..=n {
        let j = j as usize;
        if j > order {
            break;
        }
        match &mut s.coeffs {
            CoeffData::Int(v) => {
                for i in (j..len).rev() {
                    let prev = v[i - j].clone();
                    v[i] -= prev;
                }
            }
            CoeffData::Word(v) => {
                let m = match &s.ring.repr {
                    RingRepr::Word { m } => *m,
                    _ => unreachable!(),
                };
                for i in (j..len).rev() {
                    v[i] = (v[i] + m - v[i - j]) % m;
                }
            }
            CoeffData::Big(v) => {
                let m = match &s.ring.repr {
                    RingRepr::Big { m } => m.clone(),
                    _ => unreachable!(),
                };
                for i in (j..len).rev() {
                    let prev = v[i - j].clone();
                    v[i] = (&v[i] + &m - prev) % &m;
                }
            }
        }
    }
    s
}

impl fmt::Display for TruncatedSeries {
    /// Renders like "1 - q + 2*q^3 + O(q^11)".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, c) in self.coefficients().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if wrote {
                write!(f, " {sign} ")?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let unit_mag = mag.is_one();
            match (k, unit_mag) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{mag}*q")?,
                (_, true) => write!(f, "q^{k}")?,
                (_, false) => write!(f, "{mag}*q^{k}")?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order() + 1)
    }
}
