//! Congruence families for xi_{r,s}: prediction, verification, search.
//!
//! Everything starts from the pentagonal residues S(p) = { n(3n-1)/2 mod p }
//! and their translates S(p, r, s) = { r*t + s mod p : t in S(p) }.  Writing
//! max S for the largest element, the families
//!
//! ```text
//! xi_{r,s}(p^lambda * m - j) == 0  (mod p^lambda),   1 <= j <= p-1-max S
//! ```
//!
//! hold for every prime p with p coprime to r.  For p >= 5 the set can be
//! shrunk: S*(p, r, s) drops the distinguished residue i0 = s - r/24 mod p,
//! which widens the j-range.  The shrunken prediction is proved for
//! lambda = 1 outright, and for all lambda when the second p-adic digit of
//! s - r/24 is not p-1.
//!
//! [`predict`] emits the justified families with the strongest guarantee
//! backing each j; [`verify`] tests a family against a modular table;
//! [`search`] screens all progressions empirically; [`crt_closure`] expands
//! a family list into every (alpha, beta, rho) progression it implies, so
//! search results can be compared against predictions.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{checked_pow, factorize, is_prime, mod_inverse};
use crate::padic;
use crate::series::CoefficientRing;
use crate::xi::{xi_table, XiRequest, XiTable};

/// Default guard against runaway table sizes, in series coefficients.
pub const DEFAULT_SERIES_LIMIT: usize = 5000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CongruenceError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = {p} divides r = {r}; the pentagonal translate is undefined")]
    PDividesR { p: u64, r: i64 },
    #[error("r0 must be nonzero")]
    ZeroR,
    #[error("lambda must be at least 1")]
    ZeroLambda,
    #[error("p^lambda overflows a machine word")]
    ParameterOverflow,
    #[error("verification needs a table of {required} coefficients, over the limit of {limit}")]
    SeriesLimit { required: usize, limit: usize },
}

/// S(p): the pentagonal numbers n(3n-1)/2 mod p over a full period
/// n = 0..2p-1, sorted and deduplicated.
pub fn pentagonal_residues(p: u64) -> Result<Vec<u64>, CongruenceError> {
    if !is_prime(p) {
        return Err(CongruenceError::NotPrime(p));
    }
    let set: BTreeSet<u64> = (0..2 * (p as u128))
        .map(|n| (((3 * n * n - n) / 2) % p as u128) as u64)
        .collect();
    Ok(set.into_iter().collect())
}

/// The residue sets governing a (p, r, s) triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueSetReport {
    pub p: u64,
    pub r: i64,
    pub s: i64,
    /// S(p, r, s) = { j : j - s == r * n(3n-1)/2 mod p }, sorted.
    pub s_set: Vec<u64>,
    /// S*(p, r, s) = S with the distinguished residue removed; only
    /// defined for p >= 5 (it needs 1/24 mod p).
    pub s_star: Option<Vec<u64>>,
    /// The distinguished residue i0 = s - r/24 mod p.
    pub i0: Option<u64>,
    /// Whether digit_1(s - r/24; p) != p - 1, the condition under which the
    /// shrunken set powers prime-power families.
    pub digit_ok: Option<bool>,
}

/// Like [`residue_report`], but optionally keeping a distinguished residue
/// i0 = 0 in S* (`remove_zero_i0 = false`).  The two conventions only
/// differ when s == r/24 mod p; the crate's default removes i0
/// unconditionally, this switch preserves the other reading for
/// comparison.
pub fn residue_report_opts(
    p: u64,
    r: i64,
    s: i64,
    remove_zero_i0: bool,
) -> Result<ResidueSetReport, CongruenceError> {
    if !is_prime(p) {
        return Err(CongruenceError::NotPrime(p));
    }
    if r.rem_euclid(p as i64) == 0 {
        return Err(CongruenceError::PDividesR { p, r });
    }
    let pi = p as i128;
    let set: BTreeSet<u64> = (0..2 * (p as u128))
        .map(|n| {
            let g = (((3 * n * n - n) / 2) % p as u128) as i128;
            (r as i128 * g + s as i128).rem_euclid(pi) as u64
        })
        .collect();
    let s_set: Vec<u64> = set.iter().copied().collect();
    let (mut s_star, mut i0, mut digit_ok) = (None, None, None);
    if p >= 5 {
        let inv24 = mod_inverse(24 % p, p).expect("24 coprime to p >= 5") as i128;
        let distinguished = (s as i128 - r as i128 * inv24).rem_euclid(pi) as u64;
        debug_assert!(set.contains(&distinguished), "i0 is always a pentagonal translate");
        let star: Vec<u64> = if remove_zero_i0 || distinguished != 0 {
            s_set.iter().copied().filter(|&t| t != distinguished).collect()
        } else {
            s_set.clone()
        };
        // digit_1 of s - r/24 = (24 s - r) / 24
        let num = BigInt::from(s) * 24 - BigInt::from(r);
        let d1 = padic::digit(&num, &BigInt::from(24), p, 1).expect("p >= 5 is coprime to 24");
        s_star = Some(star);
        i0 = Some(distinguished);
        digit_ok = Some(d1 != p - 1);
    }
    Ok(ResidueSetReport { p, r, s, s_set, s_star, i0, digit_ok })
}

/// Residue sets for (p, r, s) with p coprime to r, removing i0 from S*
/// unconditionally.
pub fn residue_report(p: u64, r: i64, s: i64) -> Result<ResidueSetReport, CongruenceError> {
    residue_report_opts(p, r, s, true)
}

/// What backs a predicted family, strongest applicable first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Guarantee {
    /// Andrews–Sellers: r = 1, s = 0, mod p, from the full set S(p).
    AndrewsSellers,
    /// Prime-power extension for r = 1, s = 0 via the shrunken set S*(p).
    AndrewsSellersPrimePower,
    /// Garvan: general (r, s) with 0 <= s < p, mod p, via S*(p, r, s).
    Garvan,
    /// Prime powers from the full set S(p, r, s); any p, unconditional.
    FullResidueSet,
    /// Prime powers from S*(p, r, s) under the digit condition.
    ReducedResidueSet,
    /// p^lambda divides r and j is coprime to p.
    PDividesR,
    /// Found by search; no proof attached.
    Empirical,
}

/// A congruence family xi_{r,s}(p^lambda * m - j) == 0 (mod p^lambda).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceFamily {
    pub p: u64,
    pub r: i64,
    pub s: i64,
    pub lambda: u32,
    pub j: u64,
    pub guaranteed_by: Guarantee,
}

impl CongruenceFamily {
    pub fn new(
        p: u64,
        r: i64,
        s: i64,
        lambda: u32,
        j: u64,
        guaranteed_by: Guarantee,
    ) -> Result<Self, CongruenceError> {
        if !is_prime(p) {
            return Err(CongruenceError::NotPrime(p));
        }
        if r == 0 {
            return Err(CongruenceError::ZeroR);
        }
        if lambda == 0 {
            return Err(CongruenceError::ZeroLambda);
        }
        assert!(j >= 1 && j <= p - 1, "family offset j must lie in 1..=p-1");
        Ok(CongruenceFamily { p, r, s, lambda, j, guaranteed_by })
    }
}

/// Predict every family xi_{r,s}(p^lambda * m - j) == 0 (mod p^lambda)
/// justified for this (p, r, s, lambda), sorted by j, each tagged with the
/// strongest guarantee that covers it.  Where the full set S and the
/// shrunken set S* both justify a j, the unconditional S-based tag wins.
pub fn predict(p: u64, r: i64, s: i64, lambda: u32) -> Result<Vec<CongruenceFamily>, CongruenceError> {
    if lambda == 0 {
        return Err(CongruenceError::ZeroLambda);
    }
    let report = residue_report(p, r, s)?;
    let mut families = Vec::new();
    let max_s = *report.s_set.last().expect("S is never empty");
    let jmax_full = p - 1 - max_s; // may be 0: empty range
    for j in 1..=jmax_full {
        let tag = if lambda == 1 && r == 1 && s == 0 {
            Guarantee::AndrewsSellers
        } else {
            Guarantee::FullResidueSet
        };
        families.push(CongruenceFamily { p, r, s, lambda, j, guaranteed_by: tag });
    }
    if let (Some(star), Some(digit_ok)) = (&report.s_star, report.digit_ok) {
        let max_star = *star.last().expect("S* keeps at least the square classes");
        let jmax_star = p - 1 - max_star;
        for j in (jmax_full + 1)..=jmax_star {
            let tag = if lambda == 1 && s >= 0 && (s as u64) < p {
                Guarantee::Garvan
            } else if r == 1 && s == 0 {
                Guarantee::AndrewsSellersPrimePower
            } else if digit_ok {
                Guarantee::ReducedResidueSet
            } else {
                continue; // nothing covers this j at this lambda
            };
            families.push(CongruenceFamily { p, r, s, lambda, j, guaranteed_by: tag });
        }
    }
    Ok(families)
}

/// The family bundle for p^lambda dividing r: with r = p^lambda * r0,
/// xi_r(p*m - j) == 0 (mod p^lambda) for every j coprime to p.  Note the
/// progression steps by p, not p^lambda — denser than the families
/// [`predict`] emits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PDividesRFamily {
    pub p: u64,
    pub r0: i64,
    pub lambda: u32,
    /// r = p^lambda * r0.
    pub r: i64,
    /// p^lambda, the modulus of the congruence.
    pub modulus: u64,
    /// The canonical offsets 1..=p-1 (every j coprime to p reduces to one).
    pub js: Vec<u64>,
}

pub fn predict_p_divides_r(p: u64, r0: i64, lambda: u32) -> Result<PDividesRFamily, CongruenceError> {
    if !is_prime(p) {
        return Err(CongruenceError::NotPrime(p));
    }
    if r0 == 0 {
        return Err(CongruenceError::ZeroR);
    }
    if lambda == 0 {
        return Err(CongruenceError::ZeroLambda);
    }
    let modulus = checked_pow(p, lambda).ok_or(CongruenceError::ParameterOverflow)?;
    let r = (modulus as i64).checked_mul(r0).ok_or(CongruenceError::ParameterOverflow)?;
    Ok(PDividesRFamily { p, r0, lambda, r, modulus, js: (1..p).collect() })
}

impl PDividesRFamily {
    /// The ordinary families this bundle implies: restricting the dense
    /// progression p*m - j to p^lambda * m - j gives one family per
    /// offset.
    pub fn congruence_families(&self) -> Vec<CongruenceFamily> {
        self.js
            .iter()
            .map(|&j| CongruenceFamily {
                p: self.p,
                r: self.r,
                s: 0,
                lambda: self.lambda,
                j,
                guaranteed_by: Guarantee::PDividesR,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum VerificationOutcome {
    Verified,
    Refuted {
        /// Smallest m with a nonzero residue.
        m: u64,
        #[serde(serialize_with = "crate::ser::bigint_string")]
        residue: BigInt,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationResult {
    pub family: CongruenceFamily,
    pub m_max: u64,
    pub outcome: VerificationOutcome,
}

impl VerificationResult {
    pub fn verified(&self) -> bool {
        matches!(self.outcome, VerificationOutcome::Verified)
    }
}

/// Check a family numerically for m = 1..=m_max with one modular table of
/// p^lambda * m_max coefficients.  `series_limit` guards against runaway
/// sizes.
pub fn verify(
    family: &CongruenceFamily,
    m_max: u64,
    series_limit: usize,
) -> Result<VerificationResult, CongruenceError> {
    let table = verification_table(family, m_max, series_limit)?;
    Ok(verify_against(family, m_max, &table))
}

/// The modular table that [`verify`] scans; shared by callers that check
/// several offsets of the same (p, r, s, lambda).
pub fn verification_table(
    family: &CongruenceFamily,
    m_max: u64,
    series_limit: usize,
) -> Result<XiTable, CongruenceError> {
    let step = checked_pow(family.p, family.lambda).ok_or(CongruenceError::ParameterOverflow)?;
    let required = step.checked_mul(m_max).ok_or(CongruenceError::ParameterOverflow)? as usize;
    if required > series_limit {
        return Err(CongruenceError::SeriesLimit { required, limit: series_limit });
    }
    let modulus = BigUint::from(family.p).pow(family.lambda);
    let ring = CoefficientRing::modular(modulus).expect("p^lambda >= 2");
    let request = XiRequest::new(family.r, family.s, required - 1, ring)
        .map_err(|_| CongruenceError::ZeroR)?;
    Ok(xi_table(&request))
}

/// Scan an already-computed table for the family's residues.
pub fn verify_against(family: &CongruenceFamily, m_max: u64, table: &XiTable) -> VerificationResult {
    let step = checked_pow(family.p, family.lambda).expect("checked by verification_table");
    for m in 1..=m_max {
        let residue = table.value((step * m - family.j) as usize);
        if !residue.is_zero() {
            return VerificationResult {
                family: family.clone(),
                m_max,
                outcome: VerificationOutcome::Refuted { m, residue },
            };
        }
    }
    VerificationResult { family: family.clone(), m_max, outcome: VerificationOutcome::Verified }
}

/// An empirically observed congruence xi(alpha m + beta) == 0 (mod rho)
/// for every sampled m.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct EmpiricalCongruence {
    pub alpha: u64,
    pub beta: u64,
    pub rho: u64,
    /// Largest index sampled.
    pub n_max: usize,
}

/// Screen every progression alpha <= alpha_max, 0 <= beta < alpha against
/// every modulus 2 <= rho <= rho_max on the plain Fishburn numbers up to
/// n_max, in parallel over rho.  Results come back sorted by
/// (alpha, beta, rho).  Requires n_max >= 2 * alpha_max so each progression
/// is sampled at least twice.
pub fn search(alpha_max: u64, rho_max: u64, n_max: usize) -> Vec<EmpiricalCongruence> {
    assert!(alpha_max >= 1 && rho_max >= 2, "empty search bounds");
    assert!(n_max >= 2 * alpha_max as usize, "need at least two samples per progression");
    let mut hits: Vec<EmpiricalCongruence> = (2..=rho_max)
        .into_par_iter()
        .flat_map_iter(|rho| {
            let ring = CoefficientRing::modular_u64(rho).expect("rho >= 2");
            let request = XiRequest::new(1, 0, n_max, ring).expect("r = 1");
            let residues: Vec<bool> =
                xi_table(&request).values().iter().map(|v| v.is_zero()).collect();
            let mut found = Vec::new();
            for alpha in 1..=alpha_max {
                for beta in 0..alpha {
                    if (beta as usize..=n_max).step_by(alpha as usize).all(|n| residues[n]) {
                        found.push(EmpiricalCongruence { alpha, beta, rho, n_max });
                    }
                }
            }
            found
        })
        .collect();
    hits.sort();
    hits
}

/// Every progression triple (alpha, beta, rho) with alpha <= alpha_max and
/// 2 <= rho <= rho_max implied by the given families: for each prime power
/// p^e dividing rho there must be a family (p, lambda >= e, j) whose
/// progression contains alpha m + beta, i.e. p^lambda | alpha and
/// beta == -j (mod p^lambda).  Composite rho are assembled from their
/// prime-power parts (the congruences combine by CRT).  All families are
/// assumed to concern the same sequence.
pub fn crt_closure(
    families: &[CongruenceFamily],
    alpha_max: u64,
    rho_max: u64,
) -> BTreeSet<(u64, u64, u64)> {
    let mut out = BTreeSet::new();
    for rho in 2..=rho_max {
        let parts = factorize(rho);
        for alpha in 1..=alpha_max {
            'beta: for beta in 0..alpha {
                for &(p, e) in &parts {
                    let covered = families.iter().any(|f| {
                        if f.p != p || f.lambda < e {
                            return false;
                        }
                        let Some(step) = checked_pow(p, f.lambda) else { return false };
                        alpha % step == 0 && beta % step == (step - f.j) % step
                    });
                    if !covered {
                        continue 'beta;
                    }
                }
                out.insert((alpha, beta, rho));
            }
        }
    }
    out
}

/// All predicted plain-Fishburn families (r = 1, s = 0) with p^lambda up to
/// `bound` — the prediction side of a search comparison.
pub fn predicted_plain_families(bound: u64) -> Vec<CongruenceFamily> {
    let mut families = Vec::new();
    for p in 2..=bound {
        if !is_prime(p) {
            continue;
        }
        let mut lambda = 1u32;
        while checked_pow(p, lambda).is_some_and(|pl| pl <= bound) {
            families.extend(predict(p, 1, 0, lambda).expect("p prime, r = 1"));
            lambda += 1;
        }
    }
    families
}

// ============================================================
// Spot checks for the supporting lemmas
// ============================================================

/// Outcome of the scaled-r lemma check: if binomial(s, p^2 - j) == 0
/// (mod p), then xi_{p^2 r, s}(p^lambda m - j) == 0 (mod p^(lambda-1)).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScaledRSample {
    pub j: u64,
    /// binomial(s, p^2 - j) == 0 (mod p); the check only applies when this
    /// holds.
    pub hypothesis_holds: bool,
    pub m_checked: u64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScaledRCheck {
    /// p^(lambda-1); a modulus of 1 makes the claim vacuous.
    pub modulus: u64,
    pub vacuous: bool,
    pub samples: Vec<ScaledRSample>,
}

/// One sampled n of the power-valuation lemma: (1 - (1-q)^{r p})^n reduced
/// mod p^lambda has q-valuation at least p n - (p-1)(lambda-1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerValuationSample {
    pub n: u32,
    pub bound: i64,
    /// None when the whole truncated series vanished (valuation beyond the
    /// window, which passes).
    pub valuation: Option<usize>,
    pub passed: bool,
}

/// Aggregate result of the binomial-vanishing lemma: binomial(p a + i,
/// p^lambda m - j) == 0 (mod p^lambda) for 0 < j < p - i.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BinomialVanishingCheck {
    pub samples: usize,
    pub failures: Vec<BinomialVanishingFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BinomialVanishingFailure {
    pub a: i64,
    pub i: u64,
    pub j: u64,
    pub m: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaChecksReport {
    pub p: u64,
    pub r: i64,
    pub s: i64,
    pub lambda: u32,
    pub scaled_r: ScaledRCheck,
    pub power_valuation: Vec<PowerValuationSample>,
    pub binomial_vanishing: BinomialVanishingCheck,
}

impl LemmaChecksReport {
    pub fn all_passed(&self) -> bool {
        self.scaled_r.samples.iter().all(|s| s.passed)
            && self.power_valuation.iter().all(|s| s.passed)
            && self.binomial_vanishing.failures.is_empty()
    }
}

/// Machine-check the three supporting lemmas on a sampled grid.  The
/// budget scales the number of m, n and a values tried; table sizes stay
/// under [`DEFAULT_SERIES_LIMIT`].
pub fn lemma_checks(
    p: u64,
    r: i64,
    s: i64,
    lambda: u32,
    sample_budget: u64,
) -> Result<LemmaChecksReport, CongruenceError> {
    if !is_prime(p) {
        return Err(CongruenceError::NotPrime(p));
    }
    if r == 0 {
        return Err(CongruenceError::ZeroR);
    }
    if lambda == 0 {
        return Err(CongruenceError::ZeroLambda);
    }
    let budget = sample_budget.max(1);
    let p_lambda = checked_pow(p, lambda).ok_or(CongruenceError::ParameterOverflow)?;

    // (a) scaled r: hypothesis binomial(s, p^2 - j) == 0 (mod p)
    let scaled_modulus = checked_pow(p, lambda - 1).ok_or(CongruenceError::ParameterOverflow)?;
    let vacuous = scaled_modulus == 1;
    let mut samples = Vec::new();
    if p * p <= i64::MAX as u64 {
        let m_budget = budget.min((DEFAULT_SERIES_LIMIT as u64 / p_lambda).max(1)).max(1);
        let scaled_r = (p as i64 * p as i64).checked_mul(r).ok_or(CongruenceError::ParameterOverflow)?;
        let table = if vacuous {
            None
        } else {
            let ring = CoefficientRing::modular_u64(scaled_modulus).expect("p^(lambda-1) >= 2");
            let request = XiRequest::new(scaled_r, s, (p_lambda * m_budget - 1) as usize, ring)
                .expect("scaled r nonzero");
            Some(xi_table(&request))
        };
        for j in 1..p {
            let hypothesis_holds = padic::binom_valuation(s, p * p - j, p)
                .expect("p prime")
                .at_least(1);
            if !hypothesis_holds {
                samples.push(ScaledRSample { j, hypothesis_holds, m_checked: 0, passed: true });
                continue;
            }
            let passed = match &table {
                None => true, // modulus 1
                Some(t) => {
                    (1..=m_budget).all(|m| t.value((p_lambda * m - j) as usize).is_zero())
                }
            };
            samples.push(ScaledRSample {
                j,
                hypothesis_holds,
                m_checked: if vacuous { 0 } else { m_budget },
                passed,
            });
        }
    }
    let scaled_r_check = ScaledRCheck { modulus: scaled_modulus, vacuous, samples };

    // (b) power valuation of (1 - (1-q)^{r p})^n mod p^lambda
    let ring = CoefficientRing::modular(BigUint::from(p).pow(lambda)).expect("p^lambda >= 2");
    let mut power_valuation = Vec::new();
    let n_lo = lambda;
    let n_hi = lambda + (budget.min(8) as u32) - 1;
    for n in n_lo..=n_hi {
        let order = (p as usize) * (n as usize) + 1;
        if order > DEFAULT_SERIES_LIMIT {
            break;
        }
        let rp = r.checked_mul(p as i64).ok_or(CongruenceError::ParameterOverflow)?;
        let base = crate::series::TruncatedSeries::one(&ring, order)
            .sub(&crate::series::binomial_series(rp, &ring, order))
            .expect("same ring");
        let mut pow = crate::series::TruncatedSeries::one(&ring, order);
        for _ in 0..n {
            pow = pow.mul(&base).expect("same ring");
        }
        let bound = p as i64 * n as i64 - (p as i64 - 1) * (lambda as i64 - 1);
        let valuation = pow.valuation();
        let passed = match valuation {
            Some(v) => v as i64 >= bound,
            None => true, // vanished within the window: valuation > order >= bound
        };
        power_valuation.push(PowerValuationSample { n, bound, valuation, passed });
    }

    // (c) binomial(p a + i, p^lambda m - j) == 0 (mod p^lambda), 0 < j < p-i
    let mut checked = 0usize;
    let mut failures = Vec::new();
    let a_span = budget.min(4) as i64;
    for a in -a_span..=a_span {
        for i in 0..p {
            for j in 1..p.saturating_sub(i) {
                for m in 1..=budget.min(3) {
                    let n = p as i64 * a + i as i64;
                    let k = p_lambda * m - j;
                    checked += 1;
                    let ok = padic::binom_valuation(n, k, p)
                        .expect("p prime")
                        .at_least(lambda as i64);
                    if !ok {
                        failures.push(BinomialVanishingFailure { a, i, j, m });
                    }
                }
            }
        }
    }
    let binomial_vanishing = BinomialVanishingCheck { samples: checked, failures };

    Ok(LemmaChecksReport {
        p,
        r,
        s,
        lambda,
        scaled_r: scaled_r_check,
        power_valuation,
        binomial_vanishing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pentagonal_residue_examples() {
        assert_eq!(pentagonal_residues(5).unwrap(), [0, 1, 2]);
        assert_eq!(pentagonal_residues(7).unwrap(), [0, 1, 2, 5]);
        assert_eq!(pentagonal_residues(2).unwrap(), [0, 1]);
        assert_eq!(pentagonal_residues(6), Err(CongruenceError::NotPrime(6)));
    }

    #[test]
    fn residue_sets_are_translates_of_pentagonal_residues() {
        for p in (2..=50).filter(|&p| is_prime(p)) {
            let pent = pentagonal_residues(p).unwrap();
            for r in -30i64..=30 {
                if r.rem_euclid(p as i64) == 0 {
                    continue;
                }
                for s in 0..p as i64 {
                    let report = residue_report(p, r, s).unwrap();
                    let translated: BTreeSet<u64> = pent
                        .iter()
                        .map(|&t| (r as i128 * t as i128 + s as i128).rem_euclid(p as i128) as u64)
                        .collect();
                    let want: Vec<u64> = translated.into_iter().collect();
                    assert_eq!(report.s_set, want, "p={p} r={r} s={s}");
                }
            }
        }
    }

    #[test]
    fn residue_report_published_triples() {
        let rep = residue_report(5, 23, 0).unwrap();
        assert_eq!(rep.s_set, [0, 1, 3]);
        assert_eq!(rep.s_star.unwrap(), [0, 1]);
        assert_eq!(rep.i0, Some(3));
        assert_eq!(rep.digit_ok, Some(false));

        let rep = residue_report(7, 23, 0).unwrap();
        assert_eq!(rep.s_set, [0, 2, 3, 4]);
        assert_eq!(rep.s_star.unwrap(), [0, 2, 3]);
        assert_eq!(rep.digit_ok, Some(false));

        let rep = residue_report(5, -1, 0).unwrap();
        assert_eq!(rep.s_set, [0, 3, 4]);
        assert_eq!(rep.s_star.unwrap(), [0, 3]);
        assert_eq!(rep.digit_ok, Some(false));

        let rep = residue_report(5, -1, 2).unwrap();
        assert_eq!(rep.s_star.unwrap(), [0, 2]);
        assert_eq!(rep.digit_ok, Some(true));

        let rep = residue_report(23, 1, 0).unwrap();
        assert_eq!(rep.i0, Some(22));

        assert_eq!(residue_report(5, 10, 0), Err(CongruenceError::PDividesR { p: 5, r: 10 }));
    }

    #[test]
    fn small_primes_have_no_shrunken_set() {
        let rep = residue_report(3, 1, 0).unwrap();
        assert_eq!(rep.s_star, None);
        assert_eq!(rep.i0, None);
        assert_eq!(rep.digit_ok, None);
    }

    #[test]
    fn zero_i0_convention_flag() {
        // p=5, r=1, s=4: i0 = 4 - 1/24 = 4 - 4 = 0 mod 5
        let uniform = residue_report_opts(5, 1, 4, true).unwrap();
        assert_eq!(uniform.i0, Some(0));
        assert_eq!(uniform.s_star.unwrap(), [1, 4]);
        let literal = residue_report_opts(5, 1, 4, false).unwrap();
        assert_eq!(literal.s_star.unwrap(), literal.s_set);
    }

    #[test]
    fn digit_condition_holds_for_plain_fishburn() {
        for p in (5..=97).filter(|&p| is_prime(p)) {
            assert_eq!(residue_report(p, 1, 0).unwrap().digit_ok, Some(true), "p = {p}");
        }
    }

    fn offsets(families: &[CongruenceFamily]) -> Vec<u64> {
        families.iter().map(|f| f.j).collect()
    }

    #[test]
    fn predictions_match_published_offset_lists() {
        // mod-p offsets for the plain Fishburn numbers
        let published: [(u64, &[u64]); 6] =
            [(5, &[1, 2]), (7, &[1]), (11, &[1, 2, 3]), (17, &[1]), (19, &[1, 2]), (23, &[1, 2, 3, 4, 5])];
        for (p, js) in published {
            assert_eq!(offsets(&predict(p, 1, 0, 1).unwrap()), js, "p = {p}");
            // digit condition holds, so the same offsets survive at higher powers
            assert_eq!(offsets(&predict(p, 1, 0, 3).unwrap()), js, "p = {p}, lambda = 3");
        }
    }

    #[test]
    fn shrunken_set_predictions_depend_on_digit_condition() {
        // (5, 23, 0): at lambda = 1 the shrunken set gives j in {1,2,3} ...
        let fams = predict(5, 23, 0, 1).unwrap();
        assert_eq!(offsets(&fams), [1, 2, 3]);
        assert_eq!(fams[0].guaranteed_by, Guarantee::FullResidueSet);
        assert_eq!(fams[1].guaranteed_by, Guarantee::Garvan);
        // ... but the digit condition fails, so higher powers keep only the
        // full-set family
        let fams = predict(5, 23, 0, 2).unwrap();
        assert_eq!(offsets(&fams), [1]);
        assert_eq!(fams[0].guaranteed_by, Guarantee::FullResidueSet);
        // same story for (7, 23, 0): the Garvan offset 3 drops out at
        // lambda = 2 (and indeed xi_23(49 - 3) is 42 mod 49)
        assert_eq!(offsets(&predict(7, 23, 0, 1).unwrap()), [1, 2, 3]);
        assert_eq!(offsets(&predict(7, 23, 0, 2).unwrap()), [1, 2]);
        // (5, 3, 0) has digit_ok, so the shrunken offsets survive at higher
        // powers (S = {0,1,3} with i0 = 3, S* = {0,1})
        assert_eq!(offsets(&predict(5, 3, 0, 1).unwrap()), [1, 2, 3]);
        let fams = predict(5, 3, 0, 2).unwrap();
        assert_eq!(offsets(&fams), [1, 2, 3]);
        assert_eq!(fams[0].guaranteed_by, Guarantee::FullResidueSet);
        assert_eq!(fams[1].guaranteed_by, Guarantee::ReducedResidueSet);
        assert_eq!(fams[2].guaranteed_by, Guarantee::ReducedResidueSet);
        // and the extra offsets really do hold mod 25 (while j = 4 does not)
        for (j, verified) in [(1, true), (2, true), (3, true), (4, false)] {
            let fam =
                CongruenceFamily::new(5, 3, 0, 2, j, Guarantee::Empirical).unwrap();
            let res = verify(&fam, 4, DEFAULT_SERIES_LIMIT).unwrap();
            assert_eq!(res.verified(), verified, "j = {j}");
        }
    }

    #[test]
    fn prime_power_tags_for_plain_fishburn() {
        let fams = predict(23, 1, 0, 2).unwrap();
        assert_eq!(offsets(&fams), [1, 2, 3, 4, 5]);
        assert_eq!(fams[0].guaranteed_by, Guarantee::AndrewsSellersPrimePower);
        let fams = predict(23, 1, 0, 1).unwrap();
        assert_eq!(fams[0].guaranteed_by, Guarantee::Garvan);
        let fams = predict(5, 1, 0, 2).unwrap();
        assert_eq!(fams[0].guaranteed_by, Guarantee::FullResidueSet);
    }

    #[test]
    fn p_divides_r_bundle() {
        let fam = predict_p_divides_r(5, 1, 1).unwrap();
        assert_eq!((fam.r, fam.modulus), (5, 5));
        assert_eq!(fam.js, [1, 2, 3, 4]);
        let fam = predict_p_divides_r(5, 1, 2).unwrap();
        assert_eq!((fam.r, fam.modulus), (25, 25));
        assert_eq!(fam.congruence_families().len(), 4);
        assert_eq!(predict_p_divides_r(5, 0, 1), Err(CongruenceError::ZeroR));
    }

    #[test]
    fn verify_confirms_and_refutes() {
        let fam = CongruenceFamily::new(5, 1, 0, 1, 1, Guarantee::AndrewsSellers).unwrap();
        let res = verify(&fam, 20, DEFAULT_SERIES_LIMIT).unwrap();
        assert!(res.verified());

        // xi_23(25 - 3) = xi_23(22) has residue 10 mod 25
        let fam = CongruenceFamily::new(5, 23, 0, 2, 3, Guarantee::Empirical).unwrap();
        let res = verify(&fam, 3, DEFAULT_SERIES_LIMIT).unwrap();
        assert_eq!(
            res.outcome,
            VerificationOutcome::Refuted { m: 1, residue: BigInt::from(10) }
        );

        let fam = CongruenceFamily::new(5, 23, 0, 2, 2, Guarantee::Empirical).unwrap();
        let res = verify(&fam, 3, DEFAULT_SERIES_LIMIT).unwrap();
        assert_eq!(
            res.outcome,
            VerificationOutcome::Refuted { m: 1, residue: BigInt::from(5) }
        );
    }

    #[test]
    fn verify_respects_the_series_limit() {
        let fam = CongruenceFamily::new(5, 1, 0, 3, 1, Guarantee::FullResidueSet).unwrap();
        assert_eq!(
            verify(&fam, 100, 5000),
            Err(CongruenceError::SeriesLimit { required: 12500, limit: 5000 })
        );
    }

    #[test]
    fn closure_contains_refinements_and_products() {
        let fams: Vec<CongruenceFamily> = predict(5, 1, 0, 1)
            .unwrap()
            .into_iter()
            .chain(predict(7, 1, 0, 1).unwrap())
            .collect();
        let closure = crt_closure(&fams, 35, 35);
        // direct families
        assert!(closure.contains(&(5, 3, 5))); // j = 2
        assert!(closure.contains(&(5, 4, 5))); // j = 1
        // refinement to a longer progression
        assert!(closure.contains(&(10, 4, 5)));
        assert!(closure.contains(&(10, 9, 5)));
        // CRT combination of the 5- and 7-families
        assert!(closure.contains(&(35, 34, 35)));
        // not implied: wrong residue class
        assert!(!closure.contains(&(5, 2, 5)));
        // not implied: rho has a prime power no family covers
        assert!(!closure.contains(&(10, 4, 10)));
        assert!(!closure.contains(&(5, 4, 25)));
    }

    #[test]
    fn search_finds_the_mod_5_families() {
        let hits = search(10, 10, 200);
        let closure = crt_closure(&predicted_plain_families(10), 10, 10);
        let found: BTreeSet<(u64, u64, u64)> =
            hits.iter().map(|h| (h.alpha, h.beta, h.rho)).collect();
        assert!(found.contains(&(5, 3, 5)));
        assert!(found.contains(&(5, 4, 5)));
        assert!(found.contains(&(7, 6, 7)));
        // predicted families are all found empirically
        assert!(closure.is_subset(&found), "missing: {:?}", closure.difference(&found));
    }

    #[test]
    fn lemma_checks_pass_on_small_grids() {
        // binomial(1, 24) = 0, so the scaled-r hypothesis applies at j = 1
        let report = lemma_checks(5, 1, 1, 2, 3).unwrap();
        assert!(report.all_passed());
        assert_eq!(report.scaled_r.modulus, 5);
        let j1 = &report.scaled_r.samples[0];
        assert!(j1.hypothesis_holds && j1.passed && j1.m_checked > 0);
        // the power-valuation bound p*n - (p-1)(lambda-1)
        for s in &report.power_valuation {
            assert_eq!(s.bound, 5 * s.n as i64 - 4);
        }
        assert!(report.binomial_vanishing.samples > 0);

        let report = lemma_checks(7, -1, 0, 1, 2).unwrap();
        assert!(report.all_passed());
        assert!(report.scaled_r.vacuous);
    }
}
