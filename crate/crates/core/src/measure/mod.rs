//! Solution-set volumes: the normalized volume V(F) by spherical
//! integration, box and shell volumes, and the witness constructions
//! showing V(F) infinite.
//!
//! All Monte Carlo here is seeded and accumulated in a fixed order, so a
//! fixed seed reproduces results bit-for-bit in a single thread.

mod quad;
mod witness;

pub use quad::{adaptive_simpson, real_roots_in, tanh_sinh};
pub use witness::{degenerate_directions, infinitude_witness, realify_span, InfinitudeWitness};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::DecomposableForm;
use crate::geometry::unit_ball_volume;
use crate::invariants::{
    binomial, classify_volume, compute_a, compute_c, enumerate_i_prime, factorial,
    Classification,
};
use crate::rat::to_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VolumeMethod {
    SphereMC,
    BoxMC,
    Quadrature1D,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub method: VolumeMethod,
    pub divergent_flag: bool,
}

/// Surface area of the unit sphere in R^n.
fn sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

fn sample_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| {
                // Box-Muller
                let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
                let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                (-2.0 * u1.ln()).sqrt() * u2.cos()
            })
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

/// V(F) = vol{ x : |F(x)| <= 1 } via the polar identity
/// V(F) = (1/n) * integral over the unit sphere of |F(u)|^{-n/d}.
///
/// Monte Carlo over the uniform sphere measure. The divergence heuristic
/// splits the sample in two halves; when the top 0.1% of integrand values
/// carries more than half of the estimate in both halves the integrand is
/// flagged as non-integrable.
pub fn volume_vf_mc(form: &DecomposableForm, samples: u64, seed: u64) -> VolumeEstimate {
    let n = form.n();
    let d = form.d();
    let g = form.integer_form();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exponent = -(n as f64) / d as f64;
    let mut values: Vec<f64> = Vec::with_capacity(samples as usize);
    let mut nonfinite = 0u64;
    for _ in 0..samples {
        let u = sample_direction(&mut rng, n);
        let fu = g.evaluate_f64(&u).abs();
        let v = fu.powf(exponent);
        if v.is_finite() {
            values.push(v);
        } else {
            nonfinite += 1;
            values.push(0.0);
        }
    }
    let scale = sphere_area(n) / n as f64;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / (values.len().max(2) - 1) as f64;
    let std_error = scale * (var / values.len() as f64).sqrt();

    let top_heavy = |half: &[f64]| -> bool {
        let mut sorted = half.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let total: f64 = sorted.iter().sum();
        if total == 0.0 {
            return false;
        }
        let top = (half.len() as f64 * 1e-3).ceil() as usize;
        let top_sum: f64 = sorted.iter().rev().take(top.max(1)).sum();
        top_sum > 0.5 * total
    };
    let half = values.len() / 2;
    let divergent =
        nonfinite > 0 || (top_heavy(&values[..half]) && top_heavy(&values[half..]));

    VolumeEstimate {
        value: scale * mean,
        std_error,
        samples,
        method: VolumeMethod::SphereMC,
        divergent_flag: divergent,
    }
}

/// Deterministic V(F) for binary forms: split the circle at the zero
/// directions of F and integrate |F(cos t, sin t)|^{-2/d} with tanh-sinh on
/// each arc. Absolute error target `tol`.
pub fn volume_vf_quadrature(form: &DecomposableForm, tol: f64) -> Result<VolumeEstimate> {
    if form.n() != 2 {
        return Err(Error::InvalidParameter(
            "circle quadrature needs a binary form".into(),
        ));
    }
    let g = form.integer_form();
    let d = form.d() as f64;
    let f = |t: f64| -> f64 { g.evaluate_f64(&[t.cos(), t.sin()]).abs() };
    // locate zero directions by dense scan + bisection on sign changes of F
    let fsigned = |t: f64| -> f64 { g.evaluate_f64(&[t.cos(), t.sin()]) };
    let n_scan = 4096;
    let mut cuts: Vec<f64> = Vec::new();
    let step = std::f64::consts::TAU / n_scan as f64;
    let mut prev = fsigned(0.0);
    let scale = (0..n_scan)
        .map(|i| f(i as f64 * step))
        .fold(0.0f64, f64::max);
    for i in 1..=n_scan {
        let t = i as f64 * step;
        let cur = fsigned(t);
        if prev == 0.0 {
            cuts.push(t - step);
        } else if prev.signum() != cur.signum() && cur != 0.0 {
            // bisect
            let (mut a, mut b) = (t - step, t);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if fsigned(m).signum() == prev.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            cuts.push(0.5 * (a + b));
        } else {
            // tangential near-zero: split at a deep local minimum of |F|
            let fm = f(t - 0.5 * step);
            if fm < 1e-10 * scale && fm <= f(t - step) && fm <= f(t) {
                cuts.push(t - 0.5 * step);
            }
        }
        prev = cur;
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);

    let integrand = |t: f64| -> f64 { f(t).powf(-2.0 / d) };
    // local behavior |g| ~ c s^ord just inside a segment endpoint; the tip
    // integral of (c s^ord)^{-2/d} over (0, delta) is closed-form
    let tip = |at: f64, sign: f64| -> Option<(f64, f64)> {
        let probe = 1e-4;
        let g1 = f(at + sign * probe);
        let g2 = f(at + sign * probe / 2.0);
        if g1 <= 0.0 || g2 <= 0.0 {
            return None;
        }
        let ord = (g1 / g2).log2().round().max(1.0);
        if 2.0 * ord >= d {
            return None; // non-integrable tip
        }
        let delta = 10f64.powf(-10.0 / ord).min(1e-4);
        let c_eff = f(at + sign * delta) / delta.powf(ord);
        let exponent = 1.0 - 2.0 * ord / d;
        let mass = c_eff.powf(-2.0 / d) * delta.powf(exponent) / exponent;
        Some((delta, mass))
    };
    let mut total = 0.0;
    let mut err_total = 0.0;
    let segments: Vec<(f64, f64)> = if cuts.is_empty() {
        vec![(0.0, std::f64::consts::TAU)]
    } else {
        let mut seg = Vec::new();
        for w in cuts.windows(2) {
            seg.push((w[0], w[1]));
        }
        seg.push((
            *cuts.last().unwrap(),
            cuts[0] + std::f64::consts::TAU,
        ));
        seg
    };
    let per_tol = tol / segments.len() as f64;
    for (a, b) in segments {
        let (mut lo, mut hi) = (a, b);
        if !cuts.is_empty() {
            // singular tips at both endpoints: peel them analytically
            let Some((da, ma)) = tip(a, 1.0) else {
                return Ok(VolumeEstimate {
                    value: f64::INFINITY,
                    std_error: f64::INFINITY,
                    samples: 0,
                    method: VolumeMethod::Quadrature1D,
                    divergent_flag: true,
                });
            };
            let Some((db, mb)) = tip(b, -1.0) else {
                return Ok(VolumeEstimate {
                    value: f64::INFINITY,
                    std_error: f64::INFINITY,
                    samples: 0,
                    method: VolumeMethod::Quadrature1D,
                    divergent_flag: true,
                });
            };
            lo += da;
            hi -= db;
            total += ma + mb;
            err_total += (ma + mb) * 1e-6;
        }
        if hi > lo {
            let (v, e) = tanh_sinh(integrand, lo, hi, per_tol * 1e-3);
            if !v.is_finite() {
                return Ok(VolumeEstimate {
                    value: f64::INFINITY,
                    std_error: f64::INFINITY,
                    samples: 0,
                    method: VolumeMethod::Quadrature1D,
                    divergent_flag: true,
                });
            }
            total += v;
            err_total += e;
        }
    }
    Ok(VolumeEstimate {
        value: 0.5 * total,
        std_error: 0.5 * err_total,
        samples: 0,
        method: VolumeMethod::Quadrature1D,
        divergent_flag: false,
    })
}

/// Best-effort V(F): quadrature for n = 2, Monte Carlo otherwise; flags
/// divergence instead of returning a value when the classification is not
/// finite volume.
pub fn volume_vf(form: &DecomposableForm, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    let class = classify_volume(form);
    if class == Classification::InfiniteVolume {
        let mut est = volume_vf_mc(form, samples.min(20_000), seed);
        est.divergent_flag = true;
        return Ok(est);
    }
    if form.n() == 2 {
        volume_vf_quadrature(form, 1e-6)
    } else {
        Ok(volume_vf_mc(form, samples, seed))
    }
}

/// Monte Carlo volume of { |F(x)| <= m, |x_i| <= b0 }.
pub fn box_volume_mc(
    form: &DecomposableForm,
    m: f64,
    b0: f64,
    samples: u64,
    seed: u64,
) -> VolumeEstimate {
    let n = form.n();
    let g = form.integer_form();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-b0..b0)).collect();
        if g.evaluate_f64(&x).abs() <= m {
            hits += 1;
        }
    }
    let box_vol = (2.0 * b0).powi(n as i32);
    let p = hits as f64 / samples as f64;
    VolumeEstimate {
        value: p * box_vol,
        std_error: box_vol * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        method: VolumeMethod::BoxMC,
        divergent_flag: false,
    }
}

/// Deterministic box volume for binary forms: for each x the inner set
/// { y : |F(x, y)| <= m, |y| <= b0 } is a union of intervals cut out by the
/// real roots of F(x, .) -+ m; its length is integrated adaptively over x.
pub fn box_volume_quadrature(form: &DecomposableForm, m: f64, b0: f64) -> Result<VolumeEstimate> {
    if form.n() != 2 {
        return Err(Error::InvalidParameter(
            "slice quadrature needs a binary form".into(),
        ));
    }
    let g = form.integer_form();
    let d = g.d();
    let inner_len = |x: f64| -> f64 {
        // coefficients of p(y) = F(x, y), low-to-high in y
        let mut coeffs = vec![0.0f64; d + 1];
        for (e, c) in g.monomials() {
            let k = e[1] as usize;
            coeffs[k] += crate::forms::coeff_to_f64(c) * x.powi(e[0] as i32);
        }
        let mut cuts = vec![-b0, b0];
        let mut plus = coeffs.clone();
        plus[0] -= m;
        let mut minus = coeffs.clone();
        minus[0] += m;
        let eval = move |y: f64| coeffs.iter().rev().fold(0.0, |a, &ci| a * y + ci);
        cuts.extend(real_roots_in(&plus, -b0, b0));
        cuts.extend(real_roots_in(&minus, -b0, b0));
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut len = 0.0;
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if eval(mid).abs() <= m {
                len += w[1] - w[0];
            }
        }
        len
    };
    let value = adaptive_simpson(inner_len, -b0, b0, 1e-7);
    Ok(VolumeEstimate {
        value,
        std_error: 1e-6 * value.max(1.0),
        samples: 0,
        method: VolumeMethod::Quadrature1D,
        divergent_flag: false,
    })
}

/// Norm shell geometry: B_l = e^l B0, C_l = e^{l+1} B0, together with the
/// paper-scale decay quantity A_l = e^{(n a - d) l / a} A_0,
/// A_0 = m^{1/a} B0^{(n a - d)/a} H^{c}.
#[derive(Debug, Clone, Serialize)]
pub struct ShellSpec {
    pub b0: f64,
    pub l: u32,
    pub b_l: f64,
    pub c_l: f64,
    pub a_l: f64,
}

pub fn shell_spec(form: &DecomposableForm, m: f64, b0: f64, l: u32) -> Result<ShellSpec> {
    if b0 < 1.0 {
        return Err(Error::InvalidParameter("need B0 >= 1".into()));
    }
    let f = form.factorization();
    let a = compute_a(f).ok_or(Error::UndefinedA)?;
    let disc_nonzero = enumerate_i_prime(f).len() as u64 == binomial(f.d(), f.n());
    let c = compute_c(f, a, disc_nonzero)?;
    let av = to_f64(a);
    let (n, d) = (f.n() as f64, f.d() as f64);
    let a0 = m.powf(1.0 / av) * b0.powf((n * av - d) / av) * f.height().powf(to_f64(c));
    Ok(ShellSpec {
        b0,
        l,
        b_l: b0 * (l as f64).exp(),
        c_l: b0 * (l as f64 + 1.0).exp(),
        a_l: ((n * av - d) * l as f64 / av).exp() * a0,
    })
}

/// Explicit per-shell volume cap assembled from the covering chain: tuple
/// count x cell count x per-cell volume, with the certificate constant
/// kappa = n^{n(d-na)/(2a)} folded into the value cap.
pub fn shell_volume_cap(form: &DecomposableForm, m: f64, b0: f64, l: u32) -> Result<f64> {
    let f = form.factorization();
    let spec = shell_spec(form, m, b0, l)?;
    let a = compute_a(f).ok_or(Error::UndefinedA)?;
    let av = to_f64(a);
    let (n, d) = (f.n() as f64, f.d() as f64);
    let nf = factorial(f.n()) as f64;
    let half_pow = n.powf(n / 2.0);
    let kappa = n.powf(n * (d - n * av) / (2.0 * av));
    let a_eff = kappa * spec.a_l;
    let tuples = enumerate_i_prime(f).len() as f64;
    let log_arg = spec.b_l * spec.c_l.powi(f.n() as i32 - 1) / (nf * half_pow * a_eff);
    let cells = if log_arg > 1.0 {
        (n.powi(3) * log_arg.ln().powi(f.n() as i32 - 2)).max(nf)
    } else {
        nf
    };
    let side_product_cap =
        std::f64::consts::E.powi(f.n() as i32) * nf * half_pow * spec.c_l * a_eff / spec.b_l;
    let cell_volume = 2f64.powi(f.n() as i32) * nf * side_product_cap;
    Ok(tuples * cells * cell_volume)
}

/// Per-shell Monte Carlo volumes of { |F| <= m } within B_l <= ||x|| <= C_l.
pub fn shell_volumes(
    form: &DecomposableForm,
    m: f64,
    b0: f64,
    l_max: u32,
    samples: u64,
    seed: u64,
) -> Result<Vec<(ShellSpec, VolumeEstimate)>> {
    if b0 < 1.0 || m <= 0.0 {
        return Err(Error::InvalidParameter("need m > 0 and B0 >= 1".into()));
    }
    let n = form.n();
    let g = form.integer_form();
    let mut out = Vec::new();
    for l in 0..=l_max {
        let spec = shell_spec(form, m, b0, l)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(l as u64));
        let bn = spec.b_l.powi(n as i32);
        let cn = spec.c_l.powi(n as i32);
        let annulus = unit_ball_volume(n) * (cn - bn);
        let mut hits = 0u64;
        for _ in 0..samples {
            let dir = sample_direction(&mut rng, n);
            let u: f64 = rng.gen_range(0.0..1.0);
            let r = (bn + u * (cn - bn)).powf(1.0 / n as f64);
            let x: Vec<f64> = dir.iter().map(|v| v * r).collect();
            if g.evaluate_f64(&x).abs() <= m {
                hits += 1;
            }
        }
        let p = hits as f64 / samples as f64;
        out.push((
            spec,
            VolumeEstimate {
                value: p * annulus,
                std_error: annulus * (p * (1.0 - p) / samples as f64).sqrt(),
                samples,
                method: VolumeMethod::BoxMC,
                divergent_flag: false,
            },
        ));
    }
    Ok(out)
}
