//! Exact counting of integer arguments where a univariate integer-coefficient
//! polynomial is small: |p(x)| <= m over x in [lo, hi].
//!
//! Float root isolation of p -+ m proposes boundary neighborhoods; statuses
//! of the certain stretches between them are decided by one exact evaluation
//! each, and every integer near a proposed boundary is checked exactly.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::measure::real_roots_in;

/// Exact evaluator for a univariate polynomial with big-integer coefficients
/// (low-to-high).
pub struct ExactPoly {
    coeffs: Vec<BigInt>,
    /// i128 mirror when all coefficients fit.
    small: Option<Vec<i128>>,
}

impl ExactPoly {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        use num_traits::ToPrimitive;
        let small = coeffs
            .iter()
            .map(|c| c.to_i128())
            .collect::<Option<Vec<i128>>>()
            .filter(|v| v.iter().all(|&c| c.abs() < i128::MAX / 4));
        Self { coeffs, small }
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(crate::forms::coeff_to_f64)
            .collect()
    }

    /// |p(x)| <= m, exactly. The i128 fast path guards against overflow by
    /// falling back to big integers whenever intermediate magnitudes could
    /// approach the type limit.
    pub fn abs_le(&self, x: i64, m: &BigInt) -> bool {
        if let Some(small) = &self.small {
            if x.unsigned_abs() <= 1 << 20 {
                let mut acc: i128 = 0;
                let mut overflow = false;
                for &c in small.iter().rev() {
                    match acc
                        .checked_mul(x as i128)
                        .and_then(|v| v.checked_add(c))
                    {
                        Some(v) if v.abs() < i128::MAX / 4 => acc = v,
                        _ => {
                            overflow = true;
                            break;
                        }
                    }
                }
                if !overflow {
                    if let Some(ms) = to_i128(m) {
                        return acc.abs() <= ms;
                    }
                }
            }
        }
        let x_big = BigInt::from(x);
        let mut acc = BigInt::from(0);
        for c in self.coeffs.iter().rev() {
            acc = acc * &x_big + c;
        }
        acc.abs() <= m.abs()
    }
}

fn to_i128(v: &BigInt) -> Option<i128> {
    use num_traits::ToPrimitive;
    v.to_i128()
}

/// Count of integers x in [lo, hi] with |p(x)| <= m.
pub fn count_abs_le(p: &ExactPoly, m: &BigInt, lo: i64, hi: i64) -> u64 {
    if lo > hi {
        return 0;
    }
    let mf = crate::forms::coeff_to_f64(m);
    let span = (hi - lo) as f64;
    // boundary candidates from the real roots of p -+ m
    let base = p.coeffs_f64();
    let mut plus = base.clone();
    plus[0] -= mf;
    let mut minus = base;
    minus[0] += mf;
    let mut candidates: Vec<f64> = Vec::new();
    candidates.extend(real_roots_in(&plus, lo as f64 - 2.0, hi as f64 + 2.0));
    candidates.extend(real_roots_in(&minus, lo as f64 - 2.0, hi as f64 + 2.0));
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * span.max(1.0));

    // integers near any candidate get checked one by one
    let mut uncertain: Vec<i64> = Vec::new();
    for &c in &candidates {
        let base = c.floor() as i64;
        for u in base - 2..=base + 2 {
            if u >= lo && u <= hi {
                uncertain.push(u);
            }
        }
    }
    uncertain.push(lo);
    uncertain.push(hi);
    uncertain.sort_unstable();
    uncertain.dedup();

    let mut count = 0u64;
    for &u in &uncertain {
        if p.abs_le(u, m) {
            count += 1;
        }
    }
    // certain stretches between consecutive uncertain integers have constant
    // status; one exact probe decides each
    for w in uncertain.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a >= 2 {
            let probe = a + 1;
            if p.abs_le(probe, m) {
                count += (b - a - 1) as u64;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(coeffs: &[i64]) -> ExactPoly {
        ExactPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    fn brute(coeffs: &[i64], m: i64, lo: i64, hi: i64) -> u64 {
        let mut n = 0;
        for x in lo..=hi {
            let mut acc: i128 = 0;
            for &c in coeffs.iter().rev() {
                acc = acc * x as i128 + c as i128;
            }
            if acc.abs() <= m as i128 {
                n += 1;
            }
        }
        n
    }

    #[test]
    fn matches_brute_force_on_random_polynomials() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..400 {
            let deg = rng.gen_range(1..=6);
            let mut coeffs: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-9..=9)).collect();
            if coeffs.iter().all(|&c| c == 0) {
                coeffs[0] = 1;
            }
            let m = rng.gen_range(0..=200);
            let lo = rng.gen_range(-60..=0);
            let hi = rng.gen_range(0..=60);
            let got = count_abs_le(&poly(&coeffs), &BigInt::from(m), lo, hi);
            let want = brute(&coeffs, m, lo, hi);
            assert_eq!(got, want, "coeffs {coeffs:?} m {m} on [{lo}, {hi}]");
        }
    }

    #[test]
    fn constant_and_linear_cases() {
        // p = 5: |5| <= 5 everywhere
        assert_eq!(count_abs_le(&poly(&[5]), &BigInt::from(5), -3, 3), 7);
        assert_eq!(count_abs_le(&poly(&[5]), &BigInt::from(4), -3, 3), 0);
        // p = x: |x| <= 2 on [-10, 10] gives 5
        assert_eq!(count_abs_le(&poly(&[0, 1]), &BigInt::from(2), -10, 10), 5);
    }

    #[test]
    fn wide_runs_counted_by_probes() {
        // p = x^2 - 10000: |p| <= 10000 for x in [-141, 141] roughly
        let p = poly(&[-10000, 0, 1]);
        let got = count_abs_le(&p, &BigInt::from(10000), -1000, 1000);
        let want = brute(&[-10000, 0, 1], 10000, -1000, 1000);
        assert_eq!(got, want);
    }
}
