//! Convex-cell coverings of the solution set of
//!   prod |K_i(x)| / |det K| <= A  within a norm window.
//!
//! For every ordering of the input forms, sequential orthonormalization
//! yields unit forms with |det| = 1; geometric step sizes then tile the value
//! range into cells { |K'_i(y)| <= a_i } whose count and side products obey
//! closed-form caps.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::factorial;
use crate::linalg::{self, C64};

/// A cell of the covering: orthonormal unit forms and box bounds.
#[derive(Debug, Clone, Serialize)]
pub struct ConvexCell {
    /// n pairwise orthogonal unit coefficient vectors (|det| = 1).
    pub forms: Vec<Vec<[f64; 2]>>,
    pub bounds: Vec<f64>,
}

impl ConvexCell {
    pub fn new(forms: Vec<Vec<C64>>, bounds: Vec<f64>) -> Self {
        Self {
            forms: forms
                .iter()
                .map(|f| f.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
            bounds,
        }
    }

    pub fn n(&self) -> usize {
        self.bounds.len()
    }

    pub fn forms_complex(&self) -> Vec<Vec<C64>> {
        self.forms
            .iter()
            .map(|f| f.iter().map(|p| C64::new(p[0], p[1])).collect())
            .collect()
    }

    /// Membership with absolute slack 1e-12 * a_i per constraint.
    pub fn contains(&self, y: &[f64]) -> bool {
        self.forms.iter().zip(&self.bounds).all(|(f, &a)| {
            let v: C64 = f
                .iter()
                .zip(y)
                .map(|(p, &yi)| C64::new(p[0], p[1]) * yi)
                .sum();
            v.norm() <= a * (1.0 + 1e-12)
        })
    }

    pub fn side_product(&self) -> f64 {
        self.bounds.iter().product()
    }
}

/// Parameters of the covering construction. `inner_radius` present selects
/// the annulus variant (solutions with B <= ||x|| <= C); absent, the full
/// ball ||x|| <= C.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoveringParams {
    /// A: cap on prod |K_i(x)| / |det|.
    pub value_cap: f64,
    /// B: lower norm bound (annulus variant only).
    pub inner_radius: Option<f64>,
    /// C: upper norm bound.
    pub outer_radius: f64,
    /// D: geometric step, > 1.
    pub step: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoveringFamily {
    pub cells: Vec<ConvexCell>,
    pub params: CoveringParams,
    /// Strict upper bound on every cell's side product.
    pub bound_product: f64,
    /// Closed-form cap on the family size.
    pub cell_count_cap: f64,
}

impl CoveringFamily {
    pub fn covers(&self, y: &[f64]) -> bool {
        self.cells.iter().any(|c| c.contains(y))
    }
}

/// All nonnegative integer n-tuples summing to `total`, optionally with one
/// pinned zero coordinate.
pub fn exponent_tuples(n: usize, total: u32, pinned_zero: Option<usize>) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fn rec(
        idx: usize,
        remaining: u32,
        n: usize,
        pinned: Option<usize>,
        current: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if idx == n {
            if remaining == 0 {
                out.push(current.clone());
            }
            return;
        }
        if Some(idx) == pinned {
            current[idx] = 0;
            rec(idx + 1, remaining, n, pinned, current, out);
            return;
        }
        for v in 0..=remaining {
            current[idx] = v;
            rec(idx + 1, remaining - v, n, pinned, current, out);
        }
        current[idx] = 0;
    }
    rec(0, total, n, pinned_zero, &mut current, &mut out);
    out
}

/// Build the covering family for n independent forms.
pub fn build_covering(forms: &[Vec<C64>], params: CoveringParams) -> Result<CoveringFamily> {
    let n = forms.len();
    if n < 2 || forms.iter().any(|f| f.len() != n) {
        return Err(Error::InvalidParameter(
            "need n >= 2 forms in n variables".into(),
        ));
    }
    let CoveringParams {
        value_cap: a,
        inner_radius,
        outer_radius: c,
        step: d,
    } = params;
    if !(a > 0.0 && c > 0.0) {
        return Err(Error::InvalidParameter("A and C must be positive".into()));
    }
    if d <= 1.0 {
        return Err(Error::InvalidParameter("D must exceed 1".into()));
    }
    if let Some(b) = inner_radius {
        if !(b > 0.0 && b < c) {
            return Err(Error::InvalidParameter("need 0 < B < C".into()));
        }
    }
    let tol = 1e-9;
    if linalg::rank(&forms.to_vec(), tol) != n {
        return Err(Error::DependentForms);
    }

    let nf = factorial(n) as f64;
    let n_f = n as f64;
    let half_pow = n_f.powf(n_f / 2.0);
    let (q, total, bound_product, cell_count_cap) = match inner_radius {
        Some(b) => {
            let q = (b * c.powi(n as i32 - 1)
                / (d.powi(n as i32 - 1) * nf * half_pow * a))
                .log(d);
            // greatest-integer choice keeps the side product under
            // D^n n! n^{n/2} C A / B
            let total = if q >= 0.0 { q.floor() as u32 } else { 0 };
            let cap = if q >= 0.0 {
                let l = (b * c.powi(n as i32 - 1) / (nf * half_pow * a)).log(d);
                n_f.powi(3) * l.powi(n as i32 - 2)
            } else {
                nf
            };
            (
                q,
                total,
                d.powi(n as i32) * nf * half_pow * c * a / b,
                cap,
            )
        }
        None => {
            let q = (c.powi(n as i32) / (d.powi(n as i32) * nf * a)).log(d);
            // least integer strictly above Q keeps the side product strictly
            // under D^n n! A, which the floor choice would overshoot
            let total = if q >= 0.0 { q.floor() as u32 + 1 } else { 0 };
            let cap = if q >= 0.0 {
                let l = (c.powi(n as i32) / (nf * a)).log(d);
                n_f * l.powi(n as i32 - 1)
            } else {
                nf
            };
            (q, total, d.powi(n as i32) * nf * a, cap)
        }
    };

    let mut cells = Vec::new();
    let indices: Vec<usize> = (0..n).collect();
    for perm in permutations(&indices) {
        let ordered: Vec<Vec<C64>> = perm.iter().map(|&i| forms[i].clone()).collect();
        let Some(ortho) = linalg::gram_schmidt(&ordered, tol) else {
            return Err(Error::DependentForms);
        };
        let mut seen_z: Vec<Vec<u32>> = Vec::new();
        let mut push = |z: Vec<u32>, seen_z: &mut Vec<Vec<u32>>| {
            if seen_z.contains(&z) {
                return;
            }
            let bounds: Vec<f64> = z.iter().map(|&zi| d.powi(-(zi as i32)) * c).collect();
            cells.push(ConvexCell::new(ortho.clone(), bounds));
            seen_z.push(z);
        };
        if q < 0.0 {
            push(vec![0; n], &mut seen_z);
        } else {
            match inner_radius {
                Some(_) => {
                    for i0 in 0..n {
                        for z in exponent_tuples(n, total, Some(i0)) {
                            push(z, &mut seen_z);
                        }
                    }
                }
                None => {
                    for z in exponent_tuples(n, total, None) {
                        push(z, &mut seen_z);
                    }
                }
            }
        }
    }

    Ok(CoveringFamily {
        cells,
        params,
        bound_product,
        cell_count_cap,
    })
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}
