//! Exact rational arithmetic for hash-code values.
//!
//! Hash equality must be exact: two graphlets share a code if and only if
//! their sorted measure vectors are identical as rationals, so floating
//! point is not an option. Graphlets are tiny (at most `T + 1` nodes), which
//! keeps numerators and denominators far below the `i128` range even for
//! shortest-path counts accumulated over every source.

use num::rational::Ratio;
use num::{One, Zero};

/// Exact rational value used by betweenness and clustering measures.
pub type Rational = Ratio<i128>;

/// Builds a reduced rational from a numerator/denominator pair.
pub fn rational(numer: i128, denom: i128) -> Rational {
    Ratio::new(numer, denom)
}

/// Rational zero.
pub fn zero() -> Rational {
    Rational::zero()
}

/// Rational one.
pub fn one() -> Rational {
    Rational::one()
}

/// Converts an integer measure value (degree, core number) to a rational.
pub fn from_integer(v: u32) -> Rational {
    Rational::from_integer(v as i128)
}

/// Canonical `numer/denom` text form in lowest terms, e.g. `"3/1"`, `"2/3"`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
