//! Representation, exact expansion, evaluation and unimodular equivalence of
//! decomposable forms F = L_1 * ... * L_d.
//!
//! The factorization (complex f64 coefficient vectors) is the source of truth
//! for all invariant and geometric computations; the expanded integer form is
//! the single source of truth for integer-point evaluation. Expansion is
//! accepted only when every coefficient is within tolerance of an integer,
//! otherwise construction fails; there is no silent rounding.

mod parse;
mod poly;
mod reduce;

pub use parse::{parse_form, parse_form_str};
pub use poly::substitute_linear;
pub use reduce::reduce_height_heuristic;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::intmat;
use crate::linalg::{self, C64};

pub const DEFAULT_TOL: f64 = 1e-8;

/// A multiset of d complex linear factors in n variables.
#[derive(Debug, Clone)]
pub struct Factorization {
    n: usize,
    d: usize,
    factors: Vec<Vec<C64>>,
    tol: f64,
    conjugate_closed: bool,
}

impl Factorization {
    pub fn new(factors: Vec<Vec<C64>>, tol: f64) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Parse("a form needs at least one factor".into()));
        }
        let n = factors[0].len();
        if n == 0 {
            return Err(Error::Parse("factors need at least one variable".into()));
        }
        for (i, f) in factors.iter().enumerate() {
            if f.len() != n {
                return Err(Error::Parse(format!(
                    "factor {i} has {} entries, expected {n}",
                    f.len()
                )));
            }
            if linalg::norm(f) == 0.0 {
                return Err(Error::ZeroFactor(i));
            }
        }
        let d = factors.len();
        let conjugate_closed = conjugate_closed(&factors, tol);
        Ok(Self {
            n,
            d,
            factors,
            tol,
            conjugate_closed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn conjugate_closed(&self) -> bool {
        self.conjugate_closed
    }

    pub fn factors(&self) -> &[Vec<C64>] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &[C64] {
        &self.factors[i]
    }

    /// Height: the product of the L2 norms of the factor coefficient vectors.
    pub fn height(&self) -> f64 {
        self.factors.iter().map(|f| linalg::norm(f)).product()
    }

    /// log of the height, stable when the plain product would overflow.
    pub fn log_height(&self) -> f64 {
        self.factors.iter().map(|f| linalg::norm(f).ln()).sum()
    }

    /// Per-factor moduli |L_i(x)| at a real point, and their product.
    pub fn evaluate_factors(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let moduli: Vec<f64> = self
            .factors
            .iter()
            .map(|f| linalg::eval_form(f, x).norm())
            .collect();
        let product = moduli.iter().product();
        (moduli, product)
    }

    /// Coefficient vectors mapped by L -> L * T.
    pub fn compose(&self, t: &UnimodularMap) -> Result<Self> {
        let m = t.entries();
        let factors = self
            .factors
            .iter()
            .map(|f| {
                (0..self.n)
                    .map(|j| {
                        (0..self.n)
                            .map(|i| f[i] * m[i][j] as f64)
                            .sum::<C64>()
                    })
                    .collect()
            })
            .collect();
        Self::new(factors, self.tol)
    }
}

fn conjugate_closed(factors: &[Vec<C64>], tol: f64) -> bool {
    let mut used = vec![false; factors.len()];
    'outer: for f in factors {
        let conj = linalg::conjugate(f);
        let nf = linalg::norm(f).max(1.0);
        for (j, g) in factors.iter().enumerate() {
            if used[j] {
                continue;
            }
            let dist: f64 = conj
                .iter()
                .zip(g)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if dist <= tol.max(1e-12) * nf {
                used[j] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Homogeneous integer form as exact big-integer monomial coefficients,
/// keyed by exponent multi-index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerForm {
    n: usize,
    d: usize,
    monomials: BTreeMap<Vec<u32>, BigInt>,
}

impl IntegerForm {
    pub fn new(n: usize, d: usize, monomials: BTreeMap<Vec<u32>, BigInt>) -> Result<Self> {
        let monomials: BTreeMap<Vec<u32>, BigInt> = monomials
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        if monomials.is_empty() {
            return Err(Error::ZeroForm);
        }
        for (e, _) in &monomials {
            if e.len() != n || e.iter().map(|&x| x as usize).sum::<usize>() != d {
                return Err(Error::Parse(format!(
                    "exponent {e:?} is not homogeneous of degree {d} in {n} variables"
                )));
            }
        }
        Ok(Self { n, d, monomials })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn monomials(&self) -> &BTreeMap<Vec<u32>, BigInt> {
        &self.monomials
    }

    /// Exact value at an integer point.
    pub fn evaluate(&self, x: &[i64]) -> BigInt {
        assert_eq!(x.len(), self.n);
        // powers[i][k] = x_i^k
        let powers: Vec<Vec<BigInt>> = x
            .iter()
            .map(|&xi| {
                let mut p = Vec::with_capacity(self.d + 1);
                p.push(BigInt::from(1));
                for k in 1..=self.d {
                    let prev = p[k - 1].clone();
                    p.push(prev * xi);
                }
                p
            })
            .collect();
        let mut acc = BigInt::zero();
        for (e, c) in &self.monomials {
            let mut term = c.clone();
            for (i, &ei) in e.iter().enumerate() {
                if ei > 0 {
                    term *= &powers[i][ei as usize];
                }
            }
            acc += term;
        }
        acc
    }

    /// Approximate value at a real point.
    pub fn evaluate_f64(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.monomials {
            let mut term = c.to_f64().unwrap_or(f64::NAN);
            for (i, &ei) in e.iter().enumerate() {
                term *= x[i].powi(ei as i32);
            }
            acc += term;
        }
        acc
    }

    /// gcd of all monomial coefficients.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.monomials.values() {
            g = g.gcd(c);
        }
        g.abs()
    }

    /// Coefficients as i128 terms when they all fit, for fast evaluation.
    pub fn i128_terms(&self) -> Option<Vec<(i128, Vec<u32>)>> {
        self.monomials
            .iter()
            .map(|(e, c)| c.to_i128().map(|v| (v, e.clone())))
            .collect()
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.monomials
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

/// Kahan-Babuska compensated accumulator for one complex coefficient.
#[derive(Clone, Copy, Default)]
struct CompensatedC64 {
    sum: C64,
    comp: C64,
}

impl CompensatedC64 {
    fn add(&mut self, v: C64) {
        let add_part = |s: &mut f64, c: &mut f64, x: f64| {
            let t = *s + x;
            if s.abs() >= x.abs() {
                *c += (*s - t) + x;
            } else {
                *c += (x - t) + *s;
            }
            *s = t;
        };
        add_part(&mut self.sum.re, &mut self.comp.re, v.re);
        add_part(&mut self.sum.im, &mut self.comp.im, v.im);
    }

    fn value(&self) -> C64 {
        self.sum + self.comp
    }
}

/// Expand the factor product to floating-point monomial coefficients.
fn expand_to_complex(f: &Factorization) -> BTreeMap<Vec<u32>, C64> {
    let n = f.n();
    let mut poly: BTreeMap<Vec<u32>, CompensatedC64> = BTreeMap::new();
    poly.insert(vec![0u32; n], {
        let mut c = CompensatedC64::default();
        c.add(C64::new(1.0, 0.0));
        c
    });
    for factor in f.factors() {
        let mut next: BTreeMap<Vec<u32>, CompensatedC64> = BTreeMap::new();
        for (e, c) in &poly {
            let cv = c.value();
            for (i, &coeff) in factor.iter().enumerate() {
                if coeff == C64::new(0.0, 0.0) {
                    continue;
                }
                let mut e2 = e.clone();
                e2[i] += 1;
                next.entry(e2).or_default().add(cv * coeff);
            }
        }
        poly = next;
    }
    poly.into_iter().map(|(e, c)| (e, c.value())).collect()
}

/// Expand a factorization and round to an integer form.
///
/// Every coefficient must be within `tol * max(1, max |coeff|)` of an
/// integer (with zero imaginary part at the same threshold).
pub fn expand(f: &Factorization) -> Result<IntegerForm> {
    let complex = expand_to_complex(f);
    let max_mag = complex
        .values()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let tol_abs = f.tol() * max_mag;
    let mut residual = 0.0f64;
    let mut monomials = BTreeMap::new();
    for (e, c) in complex {
        let nearest = c.re.round();
        residual = residual.max(c.im.abs()).max((c.re - nearest).abs());
        if nearest != 0.0 {
            if nearest.abs() > 9e15 {
                return Err(Error::Parse(
                    "expanded coefficient too large for exact rounding".into(),
                ));
            }
            monomials.insert(e, BigInt::from(nearest as i64));
        }
    }
    if residual > tol_abs {
        return Err(Error::NotIntegerForm {
            residual,
            tol: tol_abs,
        });
    }
    IntegerForm::new(f.n(), f.d(), monomials)
}

/// An n x n integer matrix with determinant +-1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnimodularMap {
    entries: Vec<Vec<i64>>,
}

impl UnimodularMap {
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("unimodular map must be square".into()));
        }
        let d = intmat::det(&entries);
        if d != 1 && d != -1 {
            return Err(Error::NotUnimodular(d.clamp(i64::MIN as i128, i64::MAX as i128) as i64));
        }
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: (0..n)
                .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
                .collect(),
        }
    }

    /// Elementary map X_i <- X_i + s * X_j.
    pub fn elementary(n: usize, i: usize, j: usize, s: i64) -> Self {
        let mut m = Self::identity(n);
        m.entries[i][j] = s;
        m
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn inverse(&self) -> Self {
        Self {
            entries: intmat::inverse_unimodular(&self.entries)
                .expect("a unimodular map always has an integer inverse"),
        }
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        intmat::mat_vec(&self.entries, x)
    }
}

/// A validated pair: factorization plus the exact integer form it expands to.
#[derive(Debug, Clone)]
pub struct DecomposableForm {
    factorization: Factorization,
    integer_form: IntegerForm,
    label: String,
}

impl DecomposableForm {
    /// Expand, round and (optionally) check against an expected integer form.
    pub fn from_factorization(
        label: impl Into<String>,
        factorization: Factorization,
        expected: Option<&IntegerForm>,
    ) -> Result<Self> {
        let integer_form = expand(&factorization)?;
        if let Some(want) = expected {
            if integer_form != *want {
                return Err(Error::ExpectedFormMismatch(format!(
                    "expanded {:?} != expected {:?}",
                    integer_form.monomials(),
                    want.monomials()
                )));
            }
        }
        Ok(Self {
            factorization,
            integer_form,
            label: label.into(),
        })
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    pub fn integer_form(&self) -> &IntegerForm {
        &self.integer_form
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n(&self) -> usize {
        self.factorization.n()
    }

    pub fn d(&self) -> usize {
        self.factorization.d()
    }

    /// G = F o T: factors mapped by L -> L T, integer form recomputed exactly
    /// by substituting the map into the expanded form.
    pub fn compose_unimodular(&self, t: &UnimodularMap) -> Result<Self> {
        if t.n() != self.n() {
            return Err(Error::Parse(format!(
                "map size {} does not match form in {} variables",
                t.n(),
                self.n()
            )));
        }
        let factorization = self.factorization.compose(t)?;
        let expected = substitute_linear(&self.integer_form, t.entries())?;
        Self::from_factorization(self.label.clone(), factorization, Some(&expected))
    }
}

/// Exact value F(x) through the integer form.
pub fn evaluate_int(g: &IntegerForm, x: &[i64]) -> BigInt {
    g.evaluate(x)
}

pub fn coeff_to_f64(c: &BigInt) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}
