//! Small helpers around [`num_rational::Rational64`]: parsing and printing in
//! the `p/q` wire format, floor-to-integer, and canonical mod-2 reduction.

use num_rational::Rational64;
use num_traits::{One, Signed};

/// Exact rational scalar used across the crate. i64 numerator/denominator is
/// ample for desk-scale inputs (iterate counts up to ~1e7, denominators up to
/// ~1e4 leave many orders of magnitude of headroom).
pub type Rat = Rational64;

/// Shorthand constructor. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num, den)
}

/// Error from [`parse_rat`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed rational {input:?}: expected `p` or `p/q` with nonzero q")]
pub struct ParseRatError {
    pub input: String,
}

/// Parse `p` or `p/q` (optionally signed, no whitespace, no decimals).
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let err = || ParseRatError {
        input: s.to_string(),
    };
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: i64 = num_str.parse().map_err(|_| err())?;
    let den: i64 = den_str.parse().map_err(|_| err())?;
    if den == 0 {
        return Err(err());
    }
    Ok(Rat::new(num, den))
}

/// Render as `p` (denominator 1) or `p/q`, reduced, `-` prefix when negative.
/// This is exactly `Rational64`'s `Display`, kept behind a named function so
/// every serializer visibly uses the same format.
pub fn fmt_rat(r: &Rat) -> String {
    r.to_string()
}

/// `⌊r⌋` as an i64.
pub fn floor_int(r: &Rat) -> i64 {
    r.floor().to_integer()
}

/// Canonical representative of `r` modulo 2 in the half-open interval
/// `[-1, 1)`: `r - 2*⌊(r+1)/2⌋`.
pub fn canon_mod2(r: &Rat) -> Rat {
    let two = Rat::from_integer(2);
    r - two * (((r + Rat::one()) / two).floor())
}

/// True when `r` is an even integer (i.e. lies in 2ℤ).
pub fn is_even_integer(r: &Rat) -> bool {
    r.is_integer() && r.to_integer() % 2 == 0
}

/// True when `r` is an odd integer.
pub fn is_odd_integer(r: &Rat) -> bool {
    r.is_integer() && r.to_integer() % 2 != 0
}

/// Positive part check for canonical representatives: `0 < r`.
pub fn is_positive(r: &Rat) -> bool {
    r.is_positive()
}

/// `r` scaled by a positive integer `k` (checked against i64 overflow in
/// debug builds through `Rational64`'s own arithmetic).
pub fn times_int(r: &Rat, k: i64) -> Rat {
    r * Rat::from_integer(k)
}
