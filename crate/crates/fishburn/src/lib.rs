//! Generalized Fishburn numbers and their prime-power congruences.
//!
//! The sequence xi_{r,s}(n) is defined by the formal expansion
//!
//! ```text
//! sum_{n>=0} xi_{r,s}(n) q^n = (1-q)^s sum_{n>=0} ((1-q)^r; (1-q)^r)_n
//! ```
//!
//! where (x; x)_n is the q-Pochhammer symbol.  For r = 1, s = 0 these are
//! the Fishburn numbers (OEIS A022493), which count ascent sequences and
//! unlabeled (2+2)-free posets.  The crate computes the tables exactly or
//! modulo M, predicts congruence families of the shape
//!
//! ```text
//! xi_{r,s}(p^lambda * m - j) == 0  (mod p^lambda)
//! ```
//!
//! from pentagonal residue sets, verifies them numerically, searches for
//! congruences empirically, and machine-checks the dissection lemmas the
//! proofs rest on.
//!
//! Modules:
//! * [`series`] — truncated formal power series over Z or Z/M ([`series::TruncatedSeries`]).
//! * [`poly`] — exact integer polynomials and polynomial division ([`poly::IntPolynomial`]).
//! * [`padic`] — p-adic digits of rationals and carry-counting binomial valuations.
//! * [`xi`] — xi_{r,s} tables, the ascent-sequence oracle, and the table cache.
//! * [`congruence`] — residue sets, congruence prediction/verification/search.
//! * [`dissect`] — p-dissection of the truncated strange series and lemma checks.

pub mod arith;
pub mod congruence;
pub mod dissect;
pub mod padic;
pub mod poly;
mod ser;
pub mod series;
pub mod xi;
