//! Deterministic quadrature: tanh-sinh for endpoint singularities, adaptive
//! Simpson for smooth integrands, and univariate polynomial root location.

use nalgebra::DMatrix;

/// Tanh-sinh (double exponential) quadrature on [a, b]. Handles integrable
/// endpoint singularities. Returns (value, error_estimate).
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    if half == 0.0 {
        return (0.0, 0.0);
    }
    let g = |t: f64| -> (f64, f64) {
        // x = mid + half * tanh(pi/2 sinh t); w = half * (pi/2) cosh t / cosh^2(..)
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let x = mid + half * u.tanh();
        let c = u.cosh();
        let w = half * std::f64::consts::FRAC_PI_2 * t.cosh() / (c * c);
        (x, w)
    };
    let t_max = 4.0;
    let mut h = 1.0;
    let mut prev = f64::NAN;
    let mut value = 0.0;
    for level in 0..14 {
        if level == 0 {
            let mut acc = 0.0;
            let mut t = -t_max;
            while t <= t_max + 1e-12 {
                let (x, w) = g(t);
                if x > a && x < b && w.is_finite() {
                    let fx = f(x);
                    if fx.is_finite() {
                        acc += w * fx;
                    }
                }
                t += h;
            }
            value = acc * h;
        } else {
            // refine: add midpoints of the previous grid
            h *= 0.5;
            let mut acc = 0.0;
            let mut t = -t_max + h;
            while t <= t_max + 1e-12 {
                let (x, w) = g(t);
                if x > a && x < b && w.is_finite() {
                    let fx = f(x);
                    if fx.is_finite() {
                        acc += w * fx;
                    }
                }
                t += 2.0 * h;
            }
            value = value * 0.5 + acc * h;
        }
        if level >= 3 {
            let err = (value - prev).abs();
            if err <= tol * (1.0 + value.abs()) {
                return (value, err);
            }
        }
        prev = value;
    }
    (value, (value - prev).abs())
}

/// Adaptive Simpson on [a, b] with absolute tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fa = f(a);
        let fm = f(m);
        let fb = f(b);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), fa, fm, fb)
    }
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, left, fa, flm, fm, tol * 0.5, depth - 1)
                + rec(f, m, b, right, fm, frm, fb, tol * 0.5, depth - 1)
        }
    }
    let (whole, fa, fm, fb) = simpson(&f, a, b);
    rec(&f, a, b, whole, fa, fm, fb, tol, 18)
}

/// Real roots of a polynomial (coefficients low-to-high) inside [lo, hi],
/// by companion-matrix eigenvalues with Newton polish.
pub fn real_roots_in(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    // strip trailing (leading-degree) zeros
    let mut c = coeffs.to_vec();
    while c.last().is_some_and(|&x| x == 0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    // factor out roots at zero: a fully shifted companion matrix is
    // nilpotent and stalls the Schur iteration
    let mut zero_root = false;
    while c.first().is_some_and(|&x| x == 0.0) {
        c.remove(0);
        zero_root = true;
    }
    if c.len() <= 1 {
        return if zero_root && lo <= 0.0 && hi >= 0.0 {
            vec![0.0]
        } else {
            Vec::new()
        };
    }
    let deg = c.len() - 1;
    let lead = c[deg];
    let comp = DMatrix::from_fn(deg, deg, |i, j| {
        if j == deg - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eig = comp.complex_eigenvalues();
    let eval = |x: f64| -> f64 { c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci) };
    let dcoeffs: Vec<f64> = c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &ci)| ci * i as f64)
        .collect();
    let deval = |x: f64| -> f64 { dcoeffs.iter().rev().fold(0.0, |acc, &ci| acc * x + ci) };
    let span = (hi - lo).abs().max(1.0);
    let mut out: Vec<f64> = Vec::new();
    if zero_root && lo <= 0.0 && hi >= 0.0 {
        out.push(0.0);
    }
    for z in eig.iter() {
        if z.im.abs() > 1e-7 * span.max(z.re.abs()) {
            continue;
        }
        let mut x = z.re;
        for _ in 0..40 {
            let d = deval(x);
            if d == 0.0 {
                break;
            }
            let step = eval(x) / d;
            x -= step;
            if step.abs() < 1e-14 * span {
                break;
            }
        }
        if x >= lo - 1e-9 * span && x <= hi + 1e-9 * span {
            out.push(x.clamp(lo, hi));
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-11 * span);
    out
}
