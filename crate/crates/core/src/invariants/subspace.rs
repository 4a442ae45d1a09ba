//! Restriction of a form to rational subspaces and the finite-type check.
//!
//! A subspace basis is saturated to the primitive lattice it spans inside
//! Z^n and completed to a unimodular basis, so integer points of the
//! subspace correspond bijectively to Z^{n'}. The finite-type check
//! classifies the form on the full space and on a family of tested
//! subspaces; it is sound for rejection but, except for n = 2 where rational
//! zero lines can be decided exactly, incomplete for acceptance.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{substitute_linear, DecomposableForm, Factorization};
use crate::intmat;
use crate::invariants::{classify_volume, Classification};
use crate::linalg::{self, C64};

/// Integer row vectors spanning a rational subspace, 1 <= n' < n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceBasis {
    pub rows: Vec<Vec<i64>>,
}

impl SubspaceBasis {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::RankDeficientBasis);
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) || rows.len() >= n {
            return Err(Error::RankDeficientBasis);
        }
        if intmat::rank(&rows) != rows.len() {
            return Err(Error::RankDeficientBasis);
        }
        Ok(Self { rows })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.rows[0].len()
    }
}

/// Result of restricting a form to a subspace.
#[derive(Debug, Clone)]
pub struct SubspaceRestriction {
    /// Primitive basis of the saturated lattice W ∩ Z^n; integer points of W
    /// are exactly the integer combinations of these rows.
    pub primitive_basis: Vec<Vec<i64>>,
    /// The restricted form in n' variables, or None when the restriction is
    /// identically zero.
    pub form: Option<DecomposableForm>,
}

impl SubspaceRestriction {
    /// Map coordinates y in Z^{n'} to the ambient point.
    pub fn embed(&self, y: &[i64]) -> Vec<i64> {
        let n = self.primitive_basis[0].len();
        let mut x = vec![0i64; n];
        for (yi, row) in y.iter().zip(&self.primitive_basis) {
            for (xi, &ri) in x.iter_mut().zip(row) {
                *xi += yi * ri;
            }
        }
        x
    }
}

/// Restrict a form to the rational subspace spanned by `basis`.
pub fn restrict_to_subspace(
    form: &DecomposableForm,
    basis: &SubspaceBasis,
) -> Result<SubspaceRestriction> {
    if basis.ambient() != form.n() {
        return Err(Error::Parse(format!(
            "basis lives in {} variables, form in {}",
            basis.ambient(),
            form.n()
        )));
    }
    let (primitive, _) = intmat::saturate_and_complete(&basis.rows)?;
    let n_new = primitive.len();
    // substitution matrix: X_i = sum_j primitive[j][i] * Y_j
    let m: Vec<Vec<i64>> = (0..form.n())
        .map(|i| (0..n_new).map(|j| primitive[j][i]).collect())
        .collect();
    let restricted_int = match substitute_linear(form.integer_form(), &m) {
        Ok(g) => g,
        Err(Error::ZeroRestriction) => {
            return Ok(SubspaceRestriction {
                primitive_basis: primitive,
                form: None,
            })
        }
        Err(e) => return Err(e),
    };
    let f = form.factorization();
    let restricted_factors: Vec<Vec<C64>> = f
        .factors()
        .iter()
        .map(|l| {
            (0..n_new)
                .map(|j| {
                    l.iter()
                        .zip(&primitive[j])
                        .map(|(c, &w)| c * w as f64)
                        .sum::<C64>()
                })
                .collect()
        })
        .collect();
    let factorization = Factorization::new(restricted_factors, f.tol())?;
    let restricted = DecomposableForm::from_factorization(
        format!("{}|W", form.label()),
        factorization,
        Some(&restricted_int),
    )?;
    Ok(SubspaceRestriction {
        primitive_basis: primitive,
        form: Some(restricted),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiniteTypeVerdict {
    /// Finite volume on the full space and on every rational subspace
    /// (decided exactly; available for n = 2).
    FiniteType,
    /// All tested subspaces pass; completeness is not claimed.
    FiniteTypeOnTestedSubspaces,
    /// Some tested subspace (or the full space) has infinite volume.
    NotFiniteType,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceDetail {
    pub basis: Vec<Vec<i64>>,
    pub outcome: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiniteTypeReport {
    pub verdict: FiniteTypeVerdict,
    pub full_space: Classification,
    pub details: Vec<SubspaceDetail>,
    /// Basis of a failing subspace when the verdict is NotFiniteType; empty
    /// rows mean the full space itself fails.
    pub witness: Option<Vec<Vec<i64>>>,
}

/// Canonical key for deduplicating subspaces: the reduced row echelon form
/// over Q, rescaled to primitive integer rows.
fn canonical_key(rows: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let n = rows[0].len();
    let mut a: Vec<Vec<num_rational::Ratio<i128>>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| num_rational::Ratio::from_integer(x as i128))
                .collect()
        })
        .collect();
    let zero = num_rational::Ratio::from_integer(0i128);
    let mut pivot_row = 0usize;
    for col in 0..n {
        let Some(p) = (pivot_row..a.len()).find(|&r| a[r][col] != zero) else {
            continue;
        };
        a.swap(pivot_row, p);
        let inv = a[pivot_row][col].recip();
        for x in a[pivot_row].iter_mut() {
            *x *= inv;
        }
        for r in 0..a.len() {
            if r != pivot_row && a[r][col] != zero {
                let f = a[r][col];
                for c in 0..n {
                    let v = a[pivot_row][c];
                    a[r][c] -= f * v;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == a.len() {
            break;
        }
    }
    a.truncate(pivot_row);
    if a.is_empty() {
        return None;
    }
    let mut out = Vec::new();
    for row in a {
        let lcm = row
            .iter()
            .map(|r| *r.denom())
            .fold(1i128, num_integer::lcm);
        let ints: Vec<i128> = row.iter().map(|r| r.numer() * (lcm / r.denom())).collect();
        let g = ints
            .iter()
            .map(|x| x.abs())
            .fold(0i128, num_integer::gcd)
            .max(1);
        out.push(ints.iter().map(|&x| (x / g) as i64).collect());
    }
    Some(out)
}

/// Try to express a real kernel direction as a small integer vector that the
/// factors in `subset` actually annihilate at the working tolerance.
fn rationalize_kernel(
    f: &Factorization,
    subset: &[usize],
    v: &[f64],
) -> Option<Vec<i64>> {
    let scale = v.iter().cloned().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    let unit: Vec<f64> = v.iter().map(|x| x / scale).collect();
    for q in 1..=64i64 {
        let candidate: Vec<i64> = unit.iter().map(|x| (x * q as f64).round() as i64).collect();
        if candidate.iter().all(|&c| c == 0) {
            continue;
        }
        let approx: Vec<f64> = candidate.iter().map(|&c| c as f64 / q as f64).collect();
        let err: f64 = unit
            .iter()
            .zip(&approx)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if err > 1e-9 {
            continue;
        }
        let g = candidate
            .iter()
            .map(|x| x.abs())
            .fold(0i64, num_integer::gcd)
            .max(1);
        let primitive: Vec<i64> = candidate.iter().map(|x| x / g).collect();
        let xf: Vec<f64> = primitive.iter().map(|&x| x as f64).collect();
        let norm_x = xf.iter().map(|x| x * x).sum::<f64>().sqrt();
        let ok = subset.iter().all(|&i| {
            let l = f.factor(i);
            linalg::eval_form(l, &xf).norm() <= f.tol().max(1e-10) * linalg::norm(l) * norm_x
        });
        if ok {
            return Some(primitive);
        }
    }
    None
}

/// Real kernel basis of the stacked factor constraints (Re and Im rows).
fn kernel_directions(f: &Factorization, subset: &[usize]) -> Vec<Vec<f64>> {
    let n = f.n();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for &i in subset {
        rows.push(f.factor(i).iter().map(|z| z.re).collect());
        rows.push(f.factor(i).iter().map(|z| z.im).collect());
    }
    let m = DMatrix::from_fn(rows.len(), n, |r, c| rows[r][c]);
    let svd = m.svd(false, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let v_t = svd.v_t.unwrap();
    let mut out = Vec::new();
    for r in 0..v_t.nrows().min(svd.singular_values.len()) {
        if svd.singular_values[r] <= f.tol().max(1e-12) * smax.max(1.0) {
            out.push(v_t.row(r).iter().cloned().collect());
        }
    }
    // rows of v_t beyond the singular value count are exact null directions
    for r in svd.singular_values.len()..v_t.nrows() {
        out.push(v_t.row(r).iter().cloned().collect());
    }
    out
}

/// Exact scan for rational zero lines of a binary integer form, by the
/// rational root bound on the dehomogenized polynomial. Returns None when the
/// divisor enumeration would be too large to finish.
fn binary_rational_zero_line(form: &DecomposableForm) -> Option<Option<Vec<i64>>> {
    let g = form.integer_form();
    let d = g.d() as u32;
    // coefficient of X1^k X2^(d-k)
    let coeff = |k: u32| -> BigInt {
        g.monomials()
            .get(&vec![k, d - k])
            .cloned()
            .unwrap_or_else(BigInt::zero)
    };
    if coeff(d).is_zero() {
        // X2 divides F: F vanishes on span(e1)
        return Some(Some(vec![1, 0]));
    }
    if coeff(0).is_zero() {
        return Some(Some(vec![0, 1]));
    }
    let lead = coeff(d).abs().to_i64()?;
    let trail = coeff(0).abs().to_i64()?;
    if lead > 1_000_000_000_000 || trail > 1_000_000_000_000 {
        return None;
    }
    let divisors = |x: i64| -> Option<Vec<i64>> {
        let mut out = Vec::new();
        let mut i = 1i64;
        while i * i <= x {
            if x % i == 0 {
                out.push(i);
                out.push(x / i);
            }
            i += 1;
            if out.len() > 4096 {
                return None;
            }
        }
        Some(out)
    };
    let ps = divisors(trail)?;
    let qs = divisors(lead)?;
    for &p in &ps {
        for &q in &qs {
            if num_integer::gcd(p, q) != 1 {
                continue;
            }
            for s in [1i64, -1] {
                if g.evaluate(&[s * p, q]).is_zero() {
                    return Some(Some(vec![s * p, q]));
                }
            }
        }
    }
    Some(None)
}

/// Classify the form on the full space and on tested rational subspaces:
/// every coordinate subspace, every rational kernel intersection of factor
/// subsets detectable at the working tolerance, and the caller's extras.
pub fn finite_type_check(
    form: &DecomposableForm,
    extra: &[SubspaceBasis],
) -> FiniteTypeReport {
    let n = form.n();
    let full = classify_volume(form);
    let mut details = Vec::new();
    if full == Classification::InfiniteVolume {
        return FiniteTypeReport {
            verdict: FiniteTypeVerdict::NotFiniteType,
            full_space: full,
            details,
            witness: Some(Vec::new()),
        };
    }

    let mut seen: Vec<Vec<Vec<i64>>> = Vec::new();
    let mut candidates: Vec<Vec<Vec<i64>>> = Vec::new();
    let mut push_candidate = |rows: Vec<Vec<i64>>, seen: &mut Vec<Vec<Vec<i64>>>| {
        if rows.is_empty() || rows.len() >= n {
            return;
        }
        if let Some(key) = canonical_key(&rows) {
            if key.len() < n && !seen.contains(&key) {
                seen.push(key.clone());
                candidates.push(key);
            }
        }
    };

    // coordinate subspaces
    for mask in 1u32..(1 << n) - 1 {
        let rows: Vec<Vec<i64>> = (0..n)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| {
                let mut e = vec![0i64; n];
                e[i] = 1;
                e
            })
            .collect();
        push_candidate(rows, &mut seen);
    }

    // rational kernels of factor subsets
    let f = form.factorization();
    let d = f.d();
    if d <= 12 {
        for mask in 1u32..(1 << d) {
            let subset: Vec<usize> = (0..d).filter(|&i| mask & (1 << i) != 0).collect();
            let dirs = kernel_directions(f, &subset);
            if dirs.is_empty() {
                continue;
            }
            let rational: Vec<Vec<i64>> = dirs
                .iter()
                .filter_map(|v| rationalize_kernel(f, &subset, v))
                .collect();
            for v in &rational {
                push_candidate(vec![v.clone()], &mut seen);
            }
            if rational.len() > 1 {
                push_candidate(rational, &mut seen);
            }
        }
    }

    for b in extra {
        push_candidate(b.rows.clone(), &mut seen);
    }

    let mut all_pass = true;
    let mut witness = None;
    for rows in candidates {
        let Ok(basis) = SubspaceBasis::new(rows.clone()) else {
            continue;
        };
        let outcome = match restrict_to_subspace(form, &basis) {
            Ok(r) => match &r.form {
                None => {
                    all_pass = false;
                    if witness.is_none() {
                        witness = Some(rows.clone());
                    }
                    "identically zero".to_string()
                }
                Some(g) => match classify_volume(g) {
                    Classification::InfiniteVolume => {
                        all_pass = false;
                        if witness.is_none() {
                            witness = Some(rows.clone());
                        }
                        "InfiniteVolume".to_string()
                    }
                    c => format!("{c:?}"),
                },
            },
            Err(e) => format!("error: {e}"),
        };
        details.push(SubspaceDetail {
            basis: rows,
            outcome,
        });
    }

    if !all_pass {
        return FiniteTypeReport {
            verdict: FiniteTypeVerdict::NotFiniteType,
            full_space: full,
            details,
            witness,
        };
    }

    // For n = 2 the only nontrivial rational subspaces are lines; a line
    // restriction has infinite volume exactly when F vanishes on it, which
    // the rational root bound decides exactly.
    if n == 2 {
        match binary_rational_zero_line(form) {
            Some(None) => {
                return FiniteTypeReport {
                    verdict: FiniteTypeVerdict::FiniteType,
                    full_space: full,
                    details,
                    witness: None,
                }
            }
            Some(Some(line)) => {
                return FiniteTypeReport {
                    verdict: FiniteTypeVerdict::NotFiniteType,
                    full_space: full,
                    details,
                    witness: Some(vec![line]),
                }
            }
            None => {}
        }
    }

    FiniteTypeReport {
        verdict: FiniteTypeVerdict::FiniteTypeOnTestedSubspaces,
        full_space: full,
        details,
        witness: None,
    }
}
