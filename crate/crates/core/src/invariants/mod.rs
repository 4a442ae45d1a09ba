//! Combinatorial invariants of a factorization: the independent-tuple sets
//! I(F), I'(F), the conjugate-chained subset J(F), the occurrence counts
//! b(L_i), the span-growth ratio a(F), the error exponent c(F), the
//! semi-discriminant, and the finite-volume classification they decide.

mod subspace;

pub use subspace::{
    finite_type_check, restrict_to_subspace, FiniteTypeReport, FiniteTypeVerdict,
    SubspaceBasis, SubspaceRestriction,
};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{DecomposableForm, Factorization};
pub use crate::linalg::{rank_span, SpanTester};
use crate::linalg::{self, C64};
use crate::rat::{RatJson, Rational};

/// Ordered n-tuple of factor indices with linearly independent coefficient
/// vectors.
pub type IndexTuple = Vec<usize>;

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn combinations(d: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    fn rec(start: usize, d: usize, n: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        let remaining = n - current.len();
        for i in start..=d.saturating_sub(remaining) {
            current.push(i);
            rec(i + 1, d, n, current, out);
            current.pop();
        }
    }
    rec(0, d, n, &mut current, &mut out);
    out
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

/// Ascending-index tuples of linearly independent coefficient vectors.
pub fn enumerate_i_prime(f: &Factorization) -> Vec<IndexTuple> {
    let tol = f.tol();
    combinations(f.d(), f.n())
        .into_iter()
        .filter(|idx| {
            let rows: Vec<Vec<C64>> = idx.iter().map(|&i| f.factor(i).to_vec()).collect();
            linalg::rank(&rows, tol) == f.n()
        })
        .collect()
}

/// All ordered tuples of linearly independent coefficient vectors.
pub fn enumerate_i(f: &Factorization) -> Vec<IndexTuple> {
    enumerate_i_prime(f)
        .iter()
        .flat_map(|s| permutations(s))
        .collect()
}

/// Whether an ordered tuple satisfies the conjugate-or-span chain: for each
/// j < n, either the next vector is proportional to the conjugate of the
/// current one, or that conjugate already lies in the span of the prefix.
pub fn in_j_chain(f: &Factorization, tuple: &[usize]) -> bool {
    let tol = f.tol();
    for j in 0..tuple.len() - 1 {
        let conj = linalg::conjugate(f.factor(tuple[j]));
        if linalg::proportional(f.factor(tuple[j + 1]), &conj, tol) {
            continue;
        }
        let prefix: Vec<Vec<C64>> = tuple[..=j].iter().map(|&i| f.factor(i).to_vec()).collect();
        if linalg::rank_span(&prefix, tol).contains(&conj) {
            continue;
        }
        return false;
    }
    true
}

/// The tuples of I(F) satisfying the conjugate-or-span chain.
pub fn enumerate_j(f: &Factorization) -> Vec<IndexTuple> {
    enumerate_i(f)
        .into_iter()
        .filter(|t| in_j_chain(f, t))
        .collect()
}

/// Occurrence count of each factor across I(F), and the maximum b(F).
pub fn b_values(f: &Factorization) -> (Vec<u64>, u64) {
    let i_prime = enumerate_i_prime(f);
    let nf = factorial(f.n());
    let mut per = vec![0u64; f.d()];
    for subset in &i_prime {
        for &i in subset {
            per[i] += nf;
        }
    }
    let max = per.iter().copied().max().unwrap_or(0);
    (per, max)
}

/// Number of factors lying in the span of the given prefix vectors.
fn span_count(f: &Factorization, prefix: &[usize]) -> usize {
    let rows: Vec<Vec<C64>> = prefix.iter().map(|&i| f.factor(i).to_vec()).collect();
    let tester = linalg::rank_span(&rows, f.tol());
    (0..f.d())
        .filter(|&i| tester.contains(f.factor(i)))
        .count()
}

/// a(F): the maximum over J(F) and prefix lengths j < n of
/// (number of factors in the span of the first j vectors) / j.
/// Undefined exactly when I(F) is empty.
pub fn compute_a(f: &Factorization) -> Option<Rational> {
    let j_tuples = enumerate_j(f);
    if j_tuples.is_empty() {
        return None;
    }
    let mut best: Option<Rational> = None;
    for tuple in &j_tuples {
        for j in 1..f.n() {
            let count = span_count(f, &tuple[..j]);
            let r = Rational::new(count as i64, j as i64);
            if best.map_or(true, |b| r > b) {
                best = Some(r);
            }
        }
    }
    // n = 1 has no prefix lengths to scan; a single nonzero factor set still
    // defines a(F) = d (all factors proportional). Not reachable from parsed
    // forms, which require n >= 2.
    if f.n() == 1 {
        return Some(Rational::new(f.d() as i64, 1));
    }
    best
}

/// c(F): the exponent on the height in the error terms.
pub fn compute_c(f: &Factorization, a: Rational, disc_nonzero: bool) -> Result<Rational> {
    if disc_nonzero {
        let v = binomial(f.d() - 1, f.n() - 1) as i64 - 1;
        return Ok(Rational::new(v, 1));
    }
    let (_, b_max) = b_values(f);
    if a <= Rational::new(0, 1) {
        return Err(Error::UndefinedA);
    }
    let d = Rational::new(f.d() as i64, 1);
    let n1 = Rational::new(f.n() as i64 - 1, 1);
    let b = Rational::new(b_max as i64, 1);
    let nf = Rational::new(factorial(f.n()) as i64, 1);
    Ok(b / (nf * a) * (d - n1 * a) - a.recip())
}

/// Semi-discriminant S(F) (product of tuple determinants over I(F)) and the
/// modulus of its factor-norm-normalized value, also in log form for scales
/// where the plain product under- or overflows.
#[derive(Debug, Clone, Copy)]
pub struct SemiDiscriminant {
    pub s: C64,
    pub ns_mod: f64,
    pub log_ns_mod: f64,
}

pub fn semi_discriminants(f: &Factorization) -> SemiDiscriminant {
    let tuples = enumerate_i(f);
    if tuples.is_empty() {
        return SemiDiscriminant {
            s: C64::new(0.0, 0.0),
            ns_mod: 0.0,
            log_ns_mod: f64::NEG_INFINITY,
        };
    }
    let norms: Vec<f64> = f.factors().iter().map(|v| linalg::norm(v)).collect();
    let mut s = C64::new(1.0, 0.0);
    let mut log_ns = 0.0f64;
    for tuple in &tuples {
        let rows: Vec<Vec<C64>> = tuple.iter().map(|&i| f.factor(i).to_vec()).collect();
        let det = linalg::det_rows(&rows);
        s *= det;
        let norm_prod_log: f64 = tuple.iter().map(|&i| norms[i].ln()).sum();
        log_ns += det.norm().ln() - norm_prod_log;
    }
    SemiDiscriminant {
        s,
        ns_mod: log_ns.exp(),
        log_ns_mod: log_ns,
    }
}

/// Hadamard ratios |det| / prod of norms, one per ascending tuple; each lies
/// in (0, 1].
pub fn hadamard_ratios(f: &Factorization) -> Result<Vec<f64>> {
    let i_prime = enumerate_i_prime(f);
    if i_prime.is_empty() {
        return Err(Error::EmptyTupleSet);
    }
    let norms: Vec<f64> = f.factors().iter().map(|v| linalg::norm(v)).collect();
    Ok(i_prime
        .iter()
        .map(|tuple| {
            let rows: Vec<Vec<C64>> = tuple.iter().map(|&i| f.factor(i).to_vec()).collect();
            let det = linalg::det_rows(&rows).norm();
            let denom: f64 = tuple.iter().map(|&i| norms[i]).product();
            det / denom
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    FiniteVolume,
    InfiniteVolume,
    ExceptionalDefiniteQuadratic,
}

/// Whether F is (up to sign) a power of a positive definite binary quadratic:
/// two variables, no factor with real direction, and every factor
/// proportional to one fixed factor or its conjugate.
fn is_definite_quadratic_power(form: &DecomposableForm) -> bool {
    let f = form.factorization();
    if f.n() != 2 {
        return false;
    }
    let tol = f.tol();
    if f.factors().iter().any(|v| linalg::is_real_direction(v, tol)) {
        return false;
    }
    let first = f.factor(0);
    let first_conj = linalg::conjugate(first);
    if !f.factors().iter().all(|v| {
        linalg::proportional(v, first, tol) || linalg::proportional(v, &first_conj, tol)
    }) {
        return false;
    }
    // Reachable cases always have F(1,0) != 0; |F| is then a definite
    // quadratic power regardless of the global sign.
    !form.integer_form().evaluate(&[1, 0]).is_zero()
}

/// Finite-volume decision: the solution volume is finite exactly when a(F)
/// is defined and less than d/n, except for definite binary quadratic powers.
pub fn classify_volume(form: &DecomposableForm) -> Classification {
    let f = form.factorization();
    if f.n() == 1 {
        // a one-variable nonzero form c X^d always has finite volume
        return Classification::FiniteVolume;
    }
    if is_definite_quadratic_power(form) {
        return Classification::ExceptionalDefiniteQuadratic;
    }
    match compute_a(f) {
        Some(a) if a < Rational::new(f.d() as i64, f.n() as i64) => Classification::FiniteVolume,
        Some(_) => Classification::InfiniteVolume,
        None => Classification::InfiniteVolume,
    }
}

/// Minimum of sum x_i b_i over x_i >= 0, prefix sums <= j*A, total = k*A,
/// for nondecreasing b: attained at x_i = A for all i.
pub fn lp_min(b: &[f64], a: f64) -> Result<(f64, Vec<f64>)> {
    if b.is_empty() {
        return Err(Error::InvalidParameter("empty coefficient list".into()));
    }
    if a <= 0.0 {
        return Err(Error::InvalidParameter(format!("A = {a} must be positive")));
    }
    if b.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::UnsortedCoefficients(format!("{b:?}")));
    }
    let witness = vec![a; b.len()];
    debug_assert!(lp_feasible(&witness, b.len(), a, 1e-12));
    Ok((a * b.iter().sum::<f64>(), witness))
}

/// Feasibility of the constraint system behind `lp_min`.
pub fn lp_feasible(x: &[f64], k: usize, a: f64, tol: f64) -> bool {
    if x.len() != k {
        return false;
    }
    let mut prefix = 0.0;
    for (j, &xi) in x.iter().enumerate() {
        if xi < -tol {
            return false;
        }
        prefix += xi;
        if j + 1 < k && prefix > (j + 1) as f64 * a + tol {
            return false;
        }
    }
    (prefix - k as f64 * a).abs() <= tol * (1.0 + k as f64 * a)
}

/// Full invariant report for a form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvariantReport {
    pub label: String,
    pub n: usize,
    pub d: usize,
    pub height: f64,
    pub b_per_factor: Vec<u64>,
    pub b_max: u64,
    pub i_count: u64,
    pub i_prime_count: u64,
    pub a_value: Option<RatJson>,
    pub c_value: Option<RatJson>,
    pub semi_disc: [f64; 2],
    pub norm_semi_disc_mod: f64,
    pub log_norm_semi_disc_mod: f64,
    pub disc_nonzero: bool,
    pub classification: Classification,
}

pub fn build_report(form: &DecomposableForm) -> InvariantReport {
    let f = form.factorization();
    let i_prime = enumerate_i_prime(f);
    let i_prime_count = i_prime.len() as u64;
    let i_count = i_prime_count * factorial(f.n());
    let disc_nonzero = i_prime_count == binomial(f.d(), f.n());
    let (b_per_factor, b_max) = b_values(f);
    let a_value = compute_a(f);
    let c_value = a_value.and_then(|a| compute_c(f, a, disc_nonzero).ok());
    let sd = semi_discriminants(f);
    InvariantReport {
        label: form.label().to_string(),
        n: f.n(),
        d: f.d(),
        height: f.height(),
        b_per_factor,
        b_max,
        i_count,
        i_prime_count,
        a_value: a_value.map(RatJson::from),
        c_value: c_value.map(RatJson::from),
        semi_disc: [sd.s.re, sd.s.im],
        norm_semi_disc_mod: sd.ns_mod,
        log_norm_semi_disc_mod: sd.log_ns_mod,
        disc_nonzero,
        classification: classify_volume(form),
    }
}

#[cfg(test)]
mod tests;
