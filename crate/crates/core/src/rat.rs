//! Exact rational values with the `{"num": .., "den": ..}` wire format.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

pub type Rational = Ratio<i64>;

/// Serialization shim: rationals travel as explicit numerator/denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatJson {
    pub num: i64,
    pub den: i64,
}

impl From<Rational> for RatJson {
    fn from(r: Rational) -> Self {
        Self {
            num: *r.numer(),
            den: *r.denom(),
        }
    }
}

impl From<RatJson> for Rational {
    fn from(r: RatJson) -> Self {
        Rational::new(r.num, r.den)
    }
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
