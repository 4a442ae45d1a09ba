//! Exact integer-solution counting: box counts of |F(x)| <= m, the doubling
//! stabilization protocol, primitive decomposition, subspace-restricted
//! counts, count-versus-volume comparison, and the asymptotic scan.
//!
//! Counting is exact: every inequality is decided in integer arithmetic.
//! Binary forms use per-row univariate interval counting, so boxes with
//! side ~10^5 stay cheap; other dimensions enumerate directly.

mod univariate;

pub use univariate::{count_abs_le, ExactPoly};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::DecomposableForm;
use crate::invariants::{
    binomial, compute_a, compute_c, enumerate_i_prime, factorial, finite_type_check,
    restrict_to_subspace, FiniteTypeVerdict, SubspaceBasis,
};
use crate::measure::{box_volume_mc, box_volume_quadrature, VolumeEstimate};
use crate::rat::{to_f64, Rational};

/// Exact count of solutions inside a sup-norm box, with counts split into
/// dyadic sup-norm bands.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountReport {
    pub m: u64,
    pub box_x: i64,
    pub count: u64,
    /// (band upper radius, solutions with sup-norm in the band); bands are
    /// {0}, [1,1], (1,2], (2,4], ... up to box_x.
    pub per_shell: Vec<(i64, u64)>,
    pub stabilized: bool,
    pub solutions_sample: Vec<Vec<i64>>,
    pub doublings_used: u32,
}

fn dyadic_radii(x: i64) -> Vec<i64> {
    let mut radii = vec![0, 1];
    let mut r = 2i64;
    while r < x {
        radii.push(r);
        r *= 2;
    }
    if *radii.last().unwrap() < x {
        radii.push(x);
    }
    radii.dedup();
    radii
}

/// Count of integer points with |F| <= m and sup-norm <= x, exactly.
fn raw_count(form: &DecomposableForm, m: &BigInt, x: i64, cap: u64) -> Result<u64> {
    let n = form.n();
    match n {
        1 => {
            let g = form.integer_form();
            let mut count = 1u64; // origin
            let mut t = 1i64;
            while t <= x {
                if g.evaluate(&[t]).abs() <= m.abs() {
                    count += 2;
                } else {
                    break;
                }
                t += 1;
            }
            Ok(count)
        }
        2 => {
            let g = form.integer_form();
            let d = g.d() as u32;
            let row_points = (2 * x + 1) as u64;
            if row_points.saturating_mul(16) > cap.saturating_mul(64) && x > 1 << 22 {
                return Err(Error::CandidateBudget(cap));
            }
            // half plane y > 0, plus the ray y = 0, x > 0, doubled
            let mut half = 0u64;
            for y in 1..=x {
                // p(t) = F(t, y)
                let coeffs: Vec<BigInt> = (0..=d)
                    .map(|k| {
                        g.monomials()
                            .get(&vec![k, d - k])
                            .map(|c| c * BigInt::from(y).pow(d - k))
                            .unwrap_or_else(BigInt::zero)
                    })
                    .collect();
                let p = ExactPoly::new(coeffs);
                half += count_abs_le(&p, m, -x, x);
            }
            {
                let coeffs: Vec<BigInt> = (0..=d)
                    .map(|k| {
                        if k == d {
                            g.monomials()
                                .get(&vec![d, 0])
                                .cloned()
                                .unwrap_or_else(BigInt::zero)
                        } else {
                            BigInt::zero()
                        }
                    })
                    .collect();
                let p = ExactPoly::new(coeffs);
                half += count_abs_le(&p, m, 1, x);
            }
            Ok(2 * half + 1)
        }
        _ => {
            let total: f64 = (2.0 * x as f64 + 1.0).powi(n as i32);
            if total > cap as f64 {
                return Err(Error::CandidateBudget(cap));
            }
            let g = form.integer_form();
            let terms = g.i128_terms();
            // i128 path only when every term provably fits
            let use_small = terms.as_ref().is_some_and(|t| {
                t.iter().all(|(c, _)| {
                    let bound = (c.unsigned_abs() as f64)
                        * (x.unsigned_abs() as f64).powi(g.d() as i32);
                    bound < 1e35
                }) && m.to_i128().is_some()
            });
            let mut half = 0u64;
            let mut point = vec![0i64; n];
            let m_small = m.to_i128().unwrap_or(0);
            // enumerate points whose first nonzero coordinate is positive
            fn rec(
                idx: usize,
                point: &mut Vec<i64>,
                nonzero_seen: bool,
                x: i64,
                eval: &mut dyn FnMut(&[i64]) -> bool,
                half: &mut u64,
            ) {
                if idx == point.len() {
                    if nonzero_seen && eval(point) {
                        *half += 1;
                    }
                    return;
                }
                let lo = if nonzero_seen { -x } else { 0 };
                for v in lo..=x {
                    point[idx] = v;
                    rec(idx + 1, point, nonzero_seen || v > 0, x, eval, half);
                }
                point[idx] = 0;
            }
            if use_small {
                let terms = terms.unwrap();
                let mut eval = |p: &[i64]| -> bool {
                    let mut acc: i128 = 0;
                    for (c, e) in &terms {
                        let mut t = *c;
                        for (i, &ei) in e.iter().enumerate() {
                            for _ in 0..ei {
                                t *= p[i] as i128;
                            }
                        }
                        acc += t;
                    }
                    acc.abs() <= m_small
                };
                rec(0, &mut point, false, x, &mut eval, &mut half);
            } else {
                let mut eval = |p: &[i64]| -> bool { g.evaluate(p).abs() <= m.abs() };
                rec(0, &mut point, false, x, &mut eval, &mut half);
            }
            Ok(2 * half + 1)
        }
    }
}

fn sample_solutions(form: &DecomposableForm, m: &BigInt, x: i64, cap: usize) -> Vec<Vec<i64>> {
    let n = form.n();
    let r = x.min(6);
    let g = form.integer_form();
    let mut out = Vec::new();
    let mut point = vec![0i64; n];
    fn rec(
        idx: usize,
        point: &mut Vec<i64>,
        r: i64,
        out: &mut Vec<Vec<i64>>,
        g: &crate::forms::IntegerForm,
        m: &BigInt,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        if idx == point.len() {
            if g.evaluate(point).abs() <= m.abs() {
                out.push(point.clone());
            }
            return;
        }
        for v in -r..=r {
            point[idx] = v;
            rec(idx + 1, point, r, out, g, m, cap);
        }
        point[idx] = 0;
    }
    rec(0, &mut point, r, &mut out, g, m, cap);
    out.sort_by_key(|p| p.iter().map(|v| v.abs()).max().unwrap_or(0));
    out.truncate(cap);
    out
}

/// Exact count over the box |x_i| <= x, with dyadic shell decomposition.
pub fn count_box(form: &DecomposableForm, m: u64, x: i64, cap: u64) -> Result<CountReport> {
    if m < 1 {
        return Err(Error::InvalidParameter("need m >= 1".into()));
    }
    if x < 1 {
        return Err(Error::InvalidParameter("need X >= 1".into()));
    }
    let m_big = BigInt::from(m);
    let radii = dyadic_radii(x);
    let mut per_shell = Vec::new();
    let mut prev = 0u64;
    let mut total = 0u64;
    for &r in &radii {
        let c = if r == 0 {
            1
        } else {
            raw_count(form, &m_big, r, cap)?
        };
        per_shell.push((r, c - prev));
        prev = c;
        total = c;
    }
    Ok(CountReport {
        m,
        box_x: x,
        count: total,
        per_shell,
        stabilized: false,
        solutions_sample: sample_solutions(form, &m_big, x, 32),
        doublings_used: 0,
    })
}

/// Doubling protocol: start at x0, double until the count is unchanged for
/// two consecutive doublings or the budget runs out. Requires at least a
/// tested finite-type verdict; refuses otherwise with the witness subspace.
pub fn count_stabilized(
    form: &DecomposableForm,
    m: u64,
    x0: i64,
    max_doublings: u32,
    cap: u64,
) -> Result<CountReport> {
    let m = m.max(1); // inequality values below 1 are normalized up
    let ft = finite_type_check(form, &[]);
    if ft.verdict == FiniteTypeVerdict::NotFiniteType {
        return Err(Error::NotFiniteType(format!("{:?}", ft.witness)));
    }
    let mut x = x0.max(1);
    let m_big = BigInt::from(m);
    let mut counts: Vec<(i64, u64)> = Vec::new();
    let mut doublings = 0u32;
    loop {
        let c = raw_count(form, &m_big, x, cap)?;
        counts.push((x, c));
        let k = counts.len();
        if k >= 3
            && counts[k - 1].1 == counts[k - 2].1
            && counts[k - 2].1 == counts[k - 3].1
        {
            break;
        }
        if doublings >= max_doublings {
            break;
        }
        doublings += 1;
        x *= 2;
    }
    let stabilized = counts.len() >= 3 && {
        let k = counts.len();
        counts[k - 1].1 == counts[k - 2].1 && counts[k - 2].1 == counts[k - 3].1
    };
    let mut report = count_box(form, m, x, cap)?;
    report.stabilized = stabilized;
    report.doublings_used = doublings;
    Ok(report)
}

/// Write x = g x' with x' primitive; g is the gcd of the entries.
pub fn primitive_decompose(x: &[i64]) -> Result<(i64, Vec<i64>)> {
    if x.iter().all(|&v| v == 0) {
        return Err(Error::InvalidParameter("zero vector".into()));
    }
    let g = x.iter().fold(0i64, |acc, &v| acc.gcd(&v));
    Ok((g, x.iter().map(|&v| v / g).collect()))
}

#[derive(Debug, Clone, Serialize)]
pub struct SubspaceCountReport {
    pub report: CountReport,
    /// Restriction vanished identically: every lattice point of the box is a
    /// solution and the count is the full box cardinality.
    pub zero_restriction: bool,
    pub primitive_basis: Vec<Vec<i64>>,
}

/// Count solutions of |F| <= m inside the rational subspace, through the
/// restricted form in fewer variables. The correspondence with ambient
/// integer points is re-verified exactly on the sample.
pub fn count_in_subspace(
    form: &DecomposableForm,
    basis: &SubspaceBasis,
    m: u64,
    x: i64,
    cap: u64,
) -> Result<SubspaceCountReport> {
    let restriction = restrict_to_subspace(form, basis)?;
    match &restriction.form {
        None => {
            let n_prime = restriction.primitive_basis.len();
            let total = (2 * x + 1).pow(n_prime as u32) as u64;
            Ok(SubspaceCountReport {
                report: CountReport {
                    m,
                    box_x: x,
                    count: total,
                    per_shell: Vec::new(),
                    stabilized: false,
                    solutions_sample: Vec::new(),
                    doublings_used: 0,
                },
                zero_restriction: true,
                primitive_basis: restriction.primitive_basis,
            })
        }
        Some(g) => {
            let report = count_box(g, m, x, cap)?;
            // exact bijection spot-check: embedded samples solve the ambient
            // inequality
            let m_big = BigInt::from(m);
            for y in &report.solutions_sample {
                let ambient = restriction.embed(y);
                debug_assert!(form.integer_form().evaluate(&ambient).abs() <= m_big);
            }
            Ok(SubspaceCountReport {
                report,
                zero_restriction: false,
                primitive_basis: restriction.primitive_basis,
            })
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CountVolumeComparison {
    pub exact_count: u64,
    pub volume: VolumeEstimate,
    /// d n (2 B0 + 1)^{n-1}
    pub bound: f64,
    pub ok: bool,
}

/// Exact small-solution count against the volume of the same box, with the
/// discrepancy capped by d n (2 B0 + 1)^{n-1} plus Monte Carlo allowance.
pub fn compare_count_volume(
    form: &DecomposableForm,
    m: u64,
    b0: f64,
    samples: u64,
    seed: u64,
) -> Result<CountVolumeComparison> {
    if b0 < 1.0 {
        return Err(Error::InvalidParameter("need B0 >= 1".into()));
    }
    let count = count_box(form, m, b0.floor() as i64, 500_000_000)?.count;
    let volume = if form.n() == 2 {
        box_volume_quadrature(form, m as f64, b0)?
    } else {
        box_volume_mc(form, m as f64, b0, samples, seed)
    };
    let n = form.n() as f64;
    let d = form.d() as f64;
    let bound = d * n * (2.0 * b0 + 1.0).powf(n - 1.0);
    let diff = (count as f64 - volume.value).abs();
    Ok(CountVolumeComparison {
        exact_count: count,
        volume: volume.clone(),
        bound,
        ok: diff <= bound + 3.0 * volume.std_error + 1e-9,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticRow {
    pub m: u64,
    pub count: u64,
    pub stabilized: bool,
    pub vol_term: f64,
    pub residual: f64,
    /// Explicit diagnostic cap kappa * m^{(n-1)/(d-a)} (1 + log m)^{n-2} H^c.
    pub cap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticScan {
    pub rows: Vec<AsymptoticRow>,
    pub fitted_exponent: Option<f64>,
    pub theoretical_exponent: f64,
}

/// Explicit constant for the diagnostic cap column, assembled from the
/// effective pieces of the count-error chain:
///   - box discrepancy: d n 3^{n-1},
///   - per-shell coverage: |I'| cells x per-cell point cap with the
///     certificate constant kappa5 = n^{n(d-na)/(2a)} folded into the value
///     cap and the shell decay summed in closed form.
/// The inherently ineffective subspace contribution is not modeled; the
/// column is reported, not asserted.
fn scan_kappa(form: &DecomposableForm) -> Result<f64> {
    let f = form.factorization();
    let n = f.n() as f64;
    let d = f.d() as f64;
    let a = compute_a(f).ok_or(Error::UndefinedA)?;
    let av = to_f64(a);
    let nf = factorial(f.n()) as f64;
    let half_pow = n.powf(n / 2.0);
    let kappa5 = n.powf(n * (d - n * av) / (2.0 * av));
    let tuples = enumerate_i_prime(f).len() as f64;
    // sum over shells of (l + 2)^{n-2} e^{-l/(n-1)}
    let mut s = 0.0;
    let mut l = 0u32;
    loop {
        let term = (l as f64 + 2.0).powf(n - 2.0) * (-(l as f64) / (n - 1.0)).exp();
        s += term;
        l += 1;
        if term < 1e-12 * s || l > 10_000 {
            break;
        }
    }
    let cell_points = 3f64.powf(n) * 2f64.powf(n * (n - 1.0) / 2.0) * nf;
    let cell_volume = 2f64.powf(n) * nf;
    let side_cap = std::f64::consts::E.powf(n + 1.0) * nf * half_pow * kappa5;
    let covering = tuples * n.powi(3) * s * (cell_points + cell_volume) * side_cap;
    Ok(d * n * 3f64.powf(n - 1.0) + covering)
}

/// For each m: stabilized count, volume term m^{n/d} V(F), residual and the
/// diagnostic cap; plus a least-squares fit of the residual growth exponent.
pub fn asymptotic_scan(
    form: &DecomposableForm,
    m_list: &[u64],
    vf: &VolumeEstimate,
    x0: i64,
    max_doublings: u32,
    cap: u64,
) -> Result<AsymptoticScan> {
    let f = form.factorization();
    let n = f.n() as f64;
    let d = f.d() as f64;
    let a = compute_a(f).ok_or(Error::UndefinedA)?;
    let av = to_f64(a);
    let disc_nonzero = enumerate_i_prime(f).len() as u64 == binomial(f.d(), f.n());
    let c = compute_c(f, a, disc_nonzero)?;
    let kappa = scan_kappa(form)?;
    let theoretical = (n - 1.0) / (d - av);
    let mut rows = Vec::new();
    for &m in m_list {
        let report = count_stabilized(form, m, x0, max_doublings, cap)?;
        let vol_term = (m as f64).powf(n / d) * vf.value;
        let residual = (report.count as f64 - vol_term).abs();
        let cap_value = kappa
            * (m as f64).powf(theoretical)
            * (1.0 + (m as f64).ln()).powf(n - 2.0)
            * f.height().powf(to_f64(c));
        rows.push(AsymptoticRow {
            m,
            count: report.count,
            stabilized: report.stabilized,
            vol_term,
            residual,
            cap: cap_value,
        });
    }
    // least-squares slope of log residual vs log m over usable rows
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.stabilized && r.residual > 0.0)
        .map(|r| ((r.m as f64).ln(), r.residual.ln()))
        .collect();
    let fitted_exponent = if pts.len() >= 2 {
        let n_pts = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let denom = n_pts * sxx - sx * sx;
        (denom.abs() > 1e-12).then(|| (n_pts * sxy - sx * sy) / denom)
    } else {
        None
    };
    Ok(AsymptoticScan {
        rows,
        fitted_exponent,
        theoretical_exponent: theoretical,
    })
}

/// Check g^d <= m for a solution x with |F(x)| >= 1 (primitive part scaling).
pub fn primitive_power_bound_holds(form: &DecomposableForm, x: &[i64], m: u64) -> bool {
    let val = form.integer_form().evaluate(x).abs();
    if val < BigInt::from(1) {
        return true; // zeros are exempt
    }
    let Ok((g, _)) = primitive_decompose(x) else {
        return true;
    };
    BigInt::from(g).pow(form.d() as u32) <= BigInt::from(m)
}

#[cfg(test)]
mod tests;
