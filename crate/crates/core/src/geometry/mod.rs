//! Constructive geometry of solutions: the independence floor for linear
//! systems, the greedy span-chain tuple with its product certificate, the
//! minimum-ratio tuple with a height diagnostic, convex-cell coverings, and
//! volume/point-count bounds for cells.

mod cells;
mod covering;

pub use cells::{
    cell_lattice_points, cell_point_count_cap, cell_volume_bound, recursive_point_bound,
    BoxBody, CellBody, Dilated, RecursiveBound, SymmetricConvexBody,
};
pub use covering::{
    build_covering, exponent_tuples, ConvexCell, CoveringFamily, CoveringParams,
};

use crate::error::{Error, Result};
use crate::forms::{DecomposableForm, Factorization};
use crate::invariants::{
    binomial, compute_a, compute_c, enumerate_i_prime, in_j_chain, IndexTuple,
};
use crate::linalg::{self, C64};
use crate::rat::{to_f64, Rational};

/// Euclidean norm of a real vector.
fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Volume of the unit ball in R^n.
pub fn unit_ball_volume(n: usize) -> f64 {
    // pi^{n/2} / Gamma(n/2 + 1)
    let half = n as f64 / 2.0;
    std::f64::consts::PI.powf(half) / gamma_half_integer(n)
}

/// Gamma(n/2 + 1) for integer n.
fn gamma_half_integer(n: usize) -> f64 {
    if n % 2 == 0 {
        let k = n / 2;
        (1..=k).map(|i| i as f64).product::<f64>().max(1.0)
    } else {
        // Gamma(k + 3/2) with k = (n-1)/2: sqrt(pi) * (2k+1)!! / 2^{k+1}
        let k = (n - 1) / 2;
        let mut acc = std::f64::consts::PI.sqrt();
        for i in 0..=k {
            acc *= (2 * i + 1) as f64 / 2.0;
        }
        acc
    }
}

/// Lower bound for the largest normalized value of n independent linear
/// forms at x: max_i |K_i(x)|/||K_i|| >= ||x|| |det| / (n^{n/2} prod ||K_i||).
pub fn independence_floor(forms: &[Vec<C64>], x: &[f64], tol: f64) -> Result<f64> {
    let n = forms.len();
    if n == 0 || forms.iter().any(|f| f.len() != n) {
        return Err(Error::InvalidParameter(
            "need n forms in n variables".into(),
        ));
    }
    if linalg::rank(&forms.to_vec(), tol) != n {
        return Err(Error::DependentForms);
    }
    let det = linalg::det_rows(forms).norm();
    let norms: f64 = forms.iter().map(|f| linalg::norm(f)).product();
    Ok(norm(x) * det / ((n as f64).powf(n as f64 / 2.0) * norms))
}

/// The greedy span-chain selection at a point: recursive minima of the
/// normalized factor values outside the current span, with the conjugate
/// stipulation, plus the per-step span growth counts.
#[derive(Debug, Clone)]
pub struct GreedySelection {
    pub tuple: IndexTuple,
    /// lambda_1 <= ... <= lambda_n
    pub minima: Vec<f64>,
    /// a_1..a_n: factors newly captured by each span extension; sums to d.
    pub span_counts: Vec<usize>,
}

pub fn greedy_tuple(f: &Factorization, x: &[f64]) -> Result<GreedySelection> {
    let n = f.n();
    let d = f.d();
    let tol = f.tol();
    let all: Vec<Vec<C64>> = f.factors().to_vec();
    if linalg::rank(&all, tol) != n {
        return Err(Error::EmptyTupleSet);
    }
    let normalized = |i: usize| -> f64 {
        let l = f.factor(i);
        linalg::eval_form(l, x).norm() / linalg::norm(l)
    };

    let mut tuple: Vec<usize> = Vec::with_capacity(n);
    let mut minima = Vec::with_capacity(n);
    let mut cumulative = Vec::with_capacity(n);
    for step in 0..n {
        let chosen_rows: Vec<Vec<C64>> = tuple.iter().map(|&i| f.factor(i).to_vec()).collect();
        let tester = linalg::rank_span(&chosen_rows, tol);
        let outside: Vec<usize> = (0..d)
            .filter(|&i| !tester.contains(f.factor(i)))
            .collect();

        let pick = if step > 0 {
            let prev_conj = linalg::conjugate(f.factor(tuple[step - 1]));
            if !tester.contains(&prev_conj) {
                // the conjugate stipulation takes precedence over value order
                outside
                    .iter()
                    .copied()
                    .find(|&i| linalg::proportional(f.factor(i), &prev_conj, tol))
                    .ok_or(Error::ConjugateChain(step))?
            } else {
                min_by_value(&outside, &normalized)
            }
        } else {
            min_by_value(&outside, &normalized)
        };
        tuple.push(pick);
        minima.push(normalized(pick));

        let rows: Vec<Vec<C64>> = tuple.iter().map(|&i| f.factor(i).to_vec()).collect();
        let t2 = linalg::rank_span(&rows, tol);
        cumulative.push((0..d).filter(|&i| t2.contains(f.factor(i))).count());
    }
    let mut span_counts = Vec::with_capacity(n);
    let mut prev = 0usize;
    for &c in &cumulative {
        span_counts.push(c - prev);
        prev = c;
    }
    debug_assert!(in_j_chain(f, &tuple));
    debug_assert_eq!(span_counts.iter().sum::<usize>(), d);
    Ok(GreedySelection {
        tuple,
        minima,
        span_counts,
    })
}

fn min_by_value(candidates: &[usize], value: &impl Fn(usize) -> f64) -> usize {
    let mut best = candidates[0];
    let mut best_v = value(best);
    for &i in &candidates[1..] {
        let v = value(i);
        if v < best_v {
            best = i;
            best_v = v;
        }
    }
    best
}

#[derive(Debug, Clone, Copy)]
pub struct CertificateOutcome {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Explicit-constant certificate for the greedy tuple: with a = a(F) < d/n,
/// kappa = n^{n(d - n a)/(2a)} and c = c(F),
///
///   prod_j |L_{i_j}(x)| / |det|  <=  kappa (|F(x)| / ||x||^{d-na})^{1/a} H^c.
pub fn product_bound_certificate(
    form: &DecomposableForm,
    sel: &GreedySelection,
    x: &[f64],
) -> Result<CertificateOutcome> {
    let f = form.factorization();
    let n = f.n() as f64;
    let d = f.d() as f64;
    let a = compute_a(f).ok_or(Error::UndefinedA)?;
    let d_over_n = Rational::new(f.d() as i64, f.n() as i64);
    if a >= d_over_n {
        return Err(Error::NotFiniteVolume(format!("{a}")));
    }
    if norm(x) == 0.0 {
        return Err(Error::InvalidParameter("x must be nonzero".into()));
    }
    let i_prime = enumerate_i_prime(f);
    let disc_nonzero = i_prime.len() as u64 == binomial(f.d(), f.n());
    let c = compute_c(f, a, disc_nonzero)?;

    let rows: Vec<Vec<C64>> = sel.tuple.iter().map(|&i| f.factor(i).to_vec()).collect();
    let det = linalg::det_rows(&rows).norm();
    let prod: f64 = sel
        .tuple
        .iter()
        .map(|&i| linalg::eval_form(f.factor(i), x).norm())
        .product();
    let lhs = prod / det;

    let av = to_f64(a);
    let (_, fabs) = f.evaluate_factors(x);
    let kappa = n.powf(n * (d - n * av) / (2.0 * av));
    let rhs = kappa * (fabs / norm(x).powf(d - n * av)).powf(1.0 / av)
        * f.height().powf(to_f64(c));
    Ok(CertificateOutcome {
        lhs,
        rhs,
        ok: lhs <= rhs * (1.0 + 1e-9),
    })
}

#[derive(Debug, Clone)]
pub struct MinProductTuple {
    pub tuple: IndexTuple,
    pub ratio: f64,
    /// Explicit diagnostic cap kappa' |F(x)|^{n/d} / H^{1/d}; meaningful when
    /// the height is (heuristically) minimal and F has no nonzero integer
    /// zeros.
    pub bound: f64,
    pub diagnostic_ok: bool,
}

/// The ascending tuple minimizing prod_j |L_{i_j}(x)| / |det|, with the
/// diagnostic constant assembled from Minkowski's second theorem
/// (ball-volume constant) and the tuple count:
/// kappa' = 2^n n^{3/2} sqrt(C(d,n)/d) / V_n.
pub fn min_product_tuple(form: &DecomposableForm, x: &[f64]) -> Result<MinProductTuple> {
    let f = form.factorization();
    let i_prime = enumerate_i_prime(f);
    if i_prime.is_empty() {
        return Err(Error::EmptyTupleSet);
    }
    let mut best: Option<(IndexTuple, f64)> = None;
    for tuple in &i_prime {
        let rows: Vec<Vec<C64>> = tuple.iter().map(|&i| f.factor(i).to_vec()).collect();
        let det = linalg::det_rows(&rows).norm();
        let prod: f64 = tuple
            .iter()
            .map(|&i| linalg::eval_form(f.factor(i), x).norm())
            .product();
        let ratio = prod / det;
        if best.as_ref().map_or(true, |(_, r)| ratio < *r) {
            best = Some((tuple.clone(), ratio));
        }
    }
    let (tuple, ratio) = best.unwrap();
    let n = f.n();
    let d = f.d();
    let kappa = 2f64.powi(n as i32) * (n as f64).powf(1.5)
        * (binomial(d, n) as f64 / d as f64).sqrt()
        / unit_ball_volume(n);
    let (_, fabs) = f.evaluate_factors(x);
    let bound = kappa * fabs.powf(n as f64 / d as f64) / f.height().powf(1.0 / d as f64);
    Ok(MinProductTuple {
        tuple,
        ratio,
        bound,
        diagnostic_ok: ratio <= bound * (1.0 + 1e-9),
    })
}
