//! Tables of generalized Fishburn numbers xi_{r,s}(n).
//!
//! The generating identity
//!
//! ```text
//! sum_n xi_{r,s}(n) q^n = (1-q)^s sum_{k>=0} prod_{j=1..k} (1 - (1-q)^{r j})
//! ```
//!
//! turns into a finite computation because the k-th product has q-valuation
//! at least k: truncated at q^(n_max+1), terms beyond k = n_max vanish.  The
//! pipeline keeps (1-q)^{r k} up to date with O(|r|) cheap passes per step
//! and multiplies the running product by 1 - (1-q)^{r k}, whose valuation is
//! exactly 1 (lowest coefficient r k).  In a modular ring the running
//! product often becomes identically zero early — every later term is then
//! a multiple of it — so the loop stops as soon as that happens.
//!
//! The module also carries the two independent cross-checks (the binomial
//! recombination of xi_{r,s} from xi_{r,0}, and the brute-force ascent
//! sequence counter) and a plain-text cache for exact tables.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::series::{CoefficientRing, SeriesError, TruncatedSeries};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum XiError {
    #[error("r must be nonzero")]
    ZeroR,
    #[error("recombination needs s >= 0, got {0}")]
    NegativeS(i64),
    #[error("recombination needs a base table with s = 0, got s = {0}")]
    BaseTableNotPlain(i64),
    #[error("ascent-sequence enumeration is exponential; n = {0} exceeds the cap of 14")]
    AscentRange(usize),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Error)]
pub enum CacheError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad cache header {found:?}; expected \"XICACHE 1\"")]
    BadHeader { found: String },
    #[error("cache file corrupt at line {line}: {reason}")]
    Corrupt { line: usize, reason: String },
    #[error("cache holds the table for r={found_r} s={found_s}, not r={want_r} s={want_s}")]
    WrongTable { want_r: i64, want_s: i64, found_r: i64, found_s: i64 },
    #[error("the cache stores exact tables only; modular tables must be recomputed")]
    ModularTable,
}

/// What to compute: the table of xi_{r,s}(n) for 0 <= n <= n_max in the
/// given ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XiRequest {
    r: i64,
    s: i64,
    n_max: usize,
    ring: CoefficientRing,
}

impl XiRequest {
    pub fn new(r: i64, s: i64, n_max: usize, ring: CoefficientRing) -> Result<Self, XiError> {
        if r == 0 {
            return Err(XiError::ZeroR);
        }
        Ok(XiRequest { r, s, n_max, ring })
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn ring(&self) -> &CoefficientRing {
        &self.ring
    }
}

/// A computed table; values are the series coefficients, canonical residues
/// in a modular ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XiTable {
    request: XiRequest,
    series: TruncatedSeries,
}

impl XiTable {
    pub fn request(&self) -> &XiRequest {
        &self.request
    }

    /// xi_{r,s}(n) as a canonical integer.
    pub fn value(&self, n: usize) -> BigInt {
        self.series.coefficient(n).expect("n is within the table")
    }

    pub fn values(&self) -> Vec<BigInt> {
        self.series.coefficients()
    }
}

/// sum_{k=0..terms} prod_{j=1..k} (1 - (1-q)^{r j}) as a series truncated
/// at the given order.  This is the strange series evaluated at (1-q)^r,
/// truncated after `terms` summands.
pub fn strange_at_one_minus_q_pow(
    r: i64,
    terms: usize,
    ring: &CoefficientRing,
    order: usize,
) -> TruncatedSeries {
    let one = TruncatedSeries::one(ring, order);
    let mut sum = one.clone();
    let mut product = one.clone();
    let mut power = one.clone(); // (1-q)^{r k}
    for k in 1..=terms {
        power = power.mul_one_minus_q_pow(r);
        let factor = one.sub(&power).expect("same ring");
        // The factor's constant term cancels exactly; its q-coefficient is
        // r*k, so over Z the valuation is exactly 1.
        assert!(factor.coefficient(0).expect("order >= 0").is_zero());
        debug_assert!(
            !ring.is_exact()
                || factor.coefficient(1).expect("order >= 1")
                    == BigInt::from(r) * BigInt::from(k as u64)
        );
        product = product.mul(&factor).expect("same ring");
        if product.is_zero() {
            // all remaining terms are multiples of this zero
            break;
        }
        sum = sum.add(&product).expect("same ring");
    }
    sum
}

/// Compute the table for a request.
pub fn xi_table(request: &XiRequest) -> XiTable {
    let order = request.n_max;
    let sum = strange_at_one_minus_q_pow(request.r, order, &request.ring, order);
    let series = sum.mul_one_minus_q_pow(request.s);
    XiTable { request: request.clone(), series }
}

/// Recombine xi_{r,s} from the plain table xi_{r,0} by the binomial sum
///
/// ```text
/// xi_{r,s}(n) = sum_{j=0..s} binomial(s, j) (-1)^j xi_{r,0}(n - j)
/// ```
///
/// (terms with n - j < 0 vanish).  Only s >= 0 makes sense here.  This is
/// deliberately a different code path from [`xi_table`], so the two can
/// check each other.
pub fn xi_rs_from_xi_r(base: &XiTable, s: i64) -> Result<XiTable, XiError> {
    if s < 0 {
        return Err(XiError::NegativeS(s));
    }
    if base.request.s != 0 {
        return Err(XiError::BaseTableNotPlain(base.request.s));
    }
    let n_max = base.request.n_max;
    let plain = base.values();
    // binomial(s, j) * (-1)^j, updated incrementally
    let mut weights = Vec::with_capacity(s as usize + 1);
    let mut c = BigInt::one();
    for j in 0..=s {
        weights.push(if j % 2 == 0 { c.clone() } else { -c.clone() });
        c = c * (s - j) / (j + 1);
    }
    let values: Vec<BigInt> = (0..=n_max)
        .map(|n| {
            weights
                .iter()
                .enumerate()
                .take(n + 1)
                .map(|(j, w)| w * &plain[n - j])
                .sum()
        })
        .collect();
    let request = XiRequest::new(base.request.r, s, n_max, base.request.ring.clone())?;
    let series = TruncatedSeries::from_bigint_coeffs(&request.ring, &values)?;
    Ok(XiTable { request, series })
}

/// Count ascent sequences of length n by exhaustive enumeration: x_1 = 0
/// and 0 <= x_{i+1} <= 1 + asc(x_1..x_i).  For r = 1, s = 0 this equals
/// xi(n), which makes it a slow but independent oracle.  Capped at n = 14.
pub fn ascent_sequence_count(n: usize) -> Result<u64, XiError> {
    if n > 14 {
        return Err(XiError::AscentRange(n));
    }
    if n == 0 {
        return Ok(1);
    }
    fn dfs(remaining: usize, last: u32, ascents: u32) -> u64 {
        if remaining == 0 {
            return 1;
        }
        let mut total = 0;
        for x in 0..=(ascents + 1) {
            total += dfs(remaining - 1, x, ascents + u32::from(x > last));
        }
        total
    }
    Ok(dfs(n - 1, 0, 0))
}

// ============================================================
// Cache for exact tables
// ============================================================
//
// Plain text, one value per line:
//
//     XICACHE 1
//     r=<int> s=<int>
//     0 1
//     1 1
//     ...
//
// Writes go through a temporary file in the same directory followed by an
// atomic rename, so a crash never leaves a half-written cache behind.

const CACHE_MAGIC: &str = "XICACHE 1";

/// Store an exact table at `path`.
pub fn cache_store(path: &Path, table: &XiTable) -> Result<(), CacheError> {
    if !table.request.ring.is_exact() {
        return Err(CacheError::ModularTable);
    }
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    writeln!(tmp, "{CACHE_MAGIC}")?;
    writeln!(tmp, "r={} s={}", table.request.r, table.request.s)?;
    for (n, v) in table.values().iter().enumerate() {
        writeln!(tmp, "{n} {v}")?;
    }
    tmp.flush()?;
    tmp.persist(path).map_err(|e| CacheError::Io(e.error))?;
    Ok(())
}

/// Load the exact table for the request's (r, s) from `path`.  The stored
/// n_max wins: the caller checks whether the table is long enough.  A
/// request in a modular ring is refused — the cache holds exact values
/// only.
pub fn cache_load(path: &Path, request: &XiRequest) -> Result<XiTable, CacheError> {
    if !request.ring.is_exact() {
        return Err(CacheError::ModularTable);
    }
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, magic) = lines.next().ok_or_else(|| CacheError::BadHeader { found: String::new() })?;
    if magic != CACHE_MAGIC {
        return Err(CacheError::BadHeader { found: magic.to_string() });
    }
    let (_, params) = lines
        .next()
        .ok_or(CacheError::Corrupt { line: 2, reason: "missing r= s= line".to_string() })?;
    let (found_r, found_s) = parse_params(params)
        .ok_or_else(|| CacheError::Corrupt { line: 2, reason: format!("bad parameters {params:?}") })?;
    if found_r != request.r || found_s != request.s {
        return Err(CacheError::WrongTable {
            want_r: request.r,
            want_s: request.s,
            found_r,
            found_s,
        });
    }
    let mut values = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let corrupt = |reason: String| CacheError::Corrupt { line: lineno, reason };
        let (n_str, v_str) = line
            .split_once(' ')
            .ok_or_else(|| corrupt(format!("expected \"<n> <value>\", got {line:?}")))?;
        let n: usize =
            n_str.parse().map_err(|_| corrupt(format!("bad index {n_str:?}")))?;
        if n != values.len() {
            return Err(corrupt(format!("index {n} out of order; expected {}", values.len())));
        }
        let v = BigInt::from_str(v_str.trim())
            .map_err(|_| corrupt(format!("bad value {v_str:?}")))?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(CacheError::Corrupt { line: 3, reason: "no table rows".to_string() });
    }
    let ring = CoefficientRing::exact();
    let request = XiRequest::new(found_r, found_s, values.len() - 1, ring.clone())
        .expect("r was nonzero when stored");
    let series = TruncatedSeries::from_bigint_coeffs(&ring, &values)
        .expect("at least one value");
    Ok(XiTable { request, series })
}

fn parse_params(line: &str) -> Option<(i64, i64)> {
    let (r_part, s_part) = line.split_once(' ')?;
    let r = r_part.strip_prefix("r=")?.parse().ok()?;
    let s = s_part.strip_prefix("s=")?.parse().ok()?;
    Some((r, s))
}
