//! Witness constructions for the infinite-volume case: degenerate direction
//! sets, real bases for their spans, and families of integer points with
//! uniformly bounded |F|.

use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::DecomposableForm;
use crate::invariants::{compute_a, enumerate_j, IndexTuple};
use crate::lattice;
use crate::linalg::{self, C64};
use crate::rat::Rational;

/// Number of factors inside the span of the prefix vectors.
fn span_count(f: &crate::forms::Factorization, prefix: &[usize]) -> usize {
    let rows: Vec<Vec<C64>> = prefix.iter().map(|&i| f.factor(i).to_vec()).collect();
    let t = linalg::rank_span(&rows, f.tol());
    (0..f.d()).filter(|&i| t.contains(f.factor(i))).count()
}

fn find_conjugate_factor(
    f: &crate::forms::Factorization,
    of: usize,
    excluded_span: &linalg::SpanTester,
) -> Option<usize> {
    let conj = linalg::conjugate(f.factor(of));
    (0..f.d()).find(|&i| {
        linalg::proportional(f.factor(i), &conj, f.tol()) && !excluded_span.contains(f.factor(i))
    })
}

/// Conditions on a degenerate direction set: independence, at least k d/n
/// factors in the span, and the conjugate chain.
fn verify_conditions(f: &crate::forms::Factorization, indices: &[usize]) -> bool {
    let k = indices.len();
    let rows: Vec<Vec<C64>> = indices.iter().map(|&i| f.factor(i).to_vec()).collect();
    if linalg::rank(&rows, f.tol()) != k {
        return false;
    }
    // span count: k d / n, compared exactly via integers
    let count = span_count(f, indices);
    if count * f.n() < k * f.d() {
        return false;
    }
    for j in 0..k {
        let prefix: Vec<Vec<C64>> = indices[..=j].iter().map(|&i| f.factor(i).to_vec()).collect();
        let t = linalg::rank_span(&prefix, f.tol());
        let conj = linalg::conjugate(f.factor(indices[j]));
        if !t.contains(&conj) {
            if j + 1 >= k {
                return false;
            }
            if !linalg::proportional(f.factor(indices[j + 1]), &conj, f.tol()) {
                return false;
            }
        }
    }
    true
}

/// A set of k < n factor indices whose span is linearly independent,
/// captures at least k d / n of the factors, and obeys the conjugate chain.
/// Exists exactly when the solution volume is infinite (and the form is not
/// the excluded definite-quadratic power).
pub fn degenerate_directions(form: &DecomposableForm) -> Result<(usize, Vec<usize>)> {
    let f = form.factorization();
    let n = f.n();
    let d = f.d();
    if crate::invariants::classify_volume(form) != crate::invariants::Classification::InfiniteVolume
    {
        return Err(Error::FiniteVolume);
    }
    let a = compute_a(f);
    if let Some(a) = a {
        if a < Rational::new(d as i64, n as i64) {
            return Err(Error::FiniteVolume);
        }
    }

    let indices: Vec<usize> = match a {
        None => {
            // rank-deficient factor set: greedy independent growth with the
            // conjugate stipulation
            let mut chosen: Vec<usize> = vec![0];
            loop {
                let rows: Vec<Vec<C64>> =
                    chosen.iter().map(|&i| f.factor(i).to_vec()).collect();
                let t = linalg::rank_span(&rows, f.tol());
                let candidates: Vec<usize> =
                    (0..d).filter(|&i| !t.contains(f.factor(i))).collect();
                if candidates.is_empty() {
                    break;
                }
                let last = *chosen.last().unwrap();
                let conj = linalg::conjugate(f.factor(last));
                let pick = if !t.contains(&conj) {
                    candidates
                        .iter()
                        .copied()
                        .find(|&i| linalg::proportional(f.factor(i), &conj, f.tol()))
                        .unwrap_or(candidates[0])
                } else {
                    candidates[0]
                };
                chosen.push(pick);
            }
            chosen
        }
        Some(a) => {
            // find a chain tuple and the least prefix with span count >= j d/n
            let mut found: Option<(IndexTuple, usize)> = None;
            'outer: for tuple in enumerate_j(f) {
                for j in 1..n {
                    let count = span_count(f, &tuple[..j]);
                    if count * n >= j * d {
                        found = Some((tuple, j));
                        break 'outer;
                    }
                }
            }
            let (tuple, j0) = found.ok_or(Error::NotFiniteVolume(format!("{a}")))?;
            let prefix: Vec<Vec<C64>> =
                tuple[..j0].iter().map(|&i| f.factor(i).to_vec()).collect();
            let t = linalg::rank_span(&prefix, f.tol());
            let conj_last = linalg::conjugate(f.factor(tuple[j0 - 1]));
            if t.contains(&conj_last) {
                tuple[..j0].to_vec()
            } else if j0 == 1 {
                let empty_rows: Vec<Vec<C64>> = Vec::new();
                let empty = linalg::rank_span(&empty_rows, f.tol());
                let partner = find_conjugate_factor(f, tuple[0], &empty)
                    .ok_or(Error::ConjugateChain(1))?;
                vec![tuple[0], partner]
            } else {
                // factors newly captured at step j0; swap one in if its
                // conjugate stays inside the span
                let smaller: Vec<Vec<C64>> =
                    tuple[..j0 - 1].iter().map(|&i| f.factor(i).to_vec()).collect();
                let t_small = linalg::rank_span(&smaller, f.tol());
                let fresh: Vec<usize> = (0..d)
                    .filter(|&i| t.contains(f.factor(i)) && !t_small.contains(f.factor(i)))
                    .collect();
                let mut replacement = None;
                for &i in &fresh {
                    let conj = linalg::conjugate(f.factor(i));
                    if t.contains(&conj) {
                        replacement = Some(i);
                        break;
                    }
                }
                match replacement {
                    Some(i) => {
                        let mut v = tuple[..j0 - 1].to_vec();
                        v.push(i);
                        v
                    }
                    None => {
                        let partner = find_conjugate_factor(f, tuple[j0 - 1], &t)
                            .ok_or(Error::ConjugateChain(j0))?;
                        let mut v = tuple[..j0].to_vec();
                        v.push(partner);
                        v
                    }
                }
            }
        }
    };

    if indices.len() >= n || !verify_conditions(f, &indices) {
        return Err(Error::ConjugateChain(indices.len()));
    }
    Ok((indices.len(), indices))
}

/// Real vectors sharing the complex span of the chain-condition factors:
/// walk the chain taking real or imaginary parts so each step preserves the
/// span.
pub fn realify_span(form: &DecomposableForm, indices: &[usize]) -> Result<Vec<Vec<f64>>> {
    let f = form.factorization();
    let k = indices.len();
    let tol = f.tol();
    let mut real_basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut l = 0usize;
    while l < k {
        let current = f.factor(indices[l]);
        let complex_prefix: Vec<Vec<C64>> =
            indices[..=l].iter().map(|&i| f.factor(i).to_vec()).collect();
        let conj = linalg::conjugate(current);
        let prefix_span = linalg::rank_span(&complex_prefix, tol);
        let spans_match = |candidate: &[Vec<f64>]| -> bool {
            let mut stacked: Vec<Vec<C64>> = complex_prefix.clone();
            for r in candidate {
                stacked.push(linalg::to_complex(r));
            }
            let target = candidate.len();
            linalg::rank(&stacked, tol) == target
                && linalg::rank(
                    &candidate
                        .iter()
                        .map(|r| linalg::to_complex(r))
                        .collect::<Vec<_>>(),
                    tol,
                ) == target
        };
        if prefix_span.contains(&conj) {
            // one real vector extends the span; the proof picks Re unless
            // conj(L) = -L modulo the previous span, where Im is needed
            let mut ok = false;
            for candidate in [linalg::re_part(current), linalg::im_part(current)] {
                let mut trial = real_basis.clone();
                trial.push(candidate);
                if spans_match(&trial) {
                    real_basis = trial;
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Err(Error::ConjugateChain(l));
            }
            l += 1;
        } else {
            // chain condition: the next factor is the conjugate; take both parts
            if l + 1 >= k
                || !linalg::proportional(f.factor(indices[l + 1]), &conj, tol)
            {
                return Err(Error::ConjugateChain(l));
            }
            let mut trial = real_basis.clone();
            trial.push(linalg::re_part(current));
            trial.push(linalg::im_part(current));
            if !spans_match(&trial) {
                return Err(Error::ConjugateChain(l));
            }
            real_basis = trial;
            l += 2;
        }
    }
    Ok(real_basis)
}

/// A family of integer points with |F(x)| <= n^d H(F), strictly increasing
/// in sup-norm.
#[derive(Debug, Clone, Serialize)]
pub struct InfinitudeWitness {
    pub k: usize,
    pub indices: Vec<usize>,
    pub real_span: Vec<Vec<f64>>,
    pub ortho_basis: Vec<Vec<f64>>,
    pub points: Vec<Vec<i64>>,
    pub bound: f64,
}

fn sup_norm(x: &[i64]) -> i64 {
    x.iter().map(|v| v.abs()).max().unwrap_or(0)
}

/// Construct witness points by shrinking one side of a volume-2^n box and
/// enumerating the nonzero integer points it must contain.
pub fn infinitude_witness(
    form: &DecomposableForm,
    count: usize,
    norm_target: i64,
    candidate_cap: u64,
) -> Result<InfinitudeWitness> {
    let f = form.factorization();
    if !f.conjugate_closed() {
        return Err(Error::InvalidParameter(
            "witness construction needs a conjugate-closed factorization".into(),
        ));
    }
    let n = f.n();
    let (k, indices) = degenerate_directions(form)?;
    let real_span = realify_span(form, &indices)?;
    // orthonormal basis: span first, then completion
    let span_ortho = real_gram_schmidt(&real_span)?;
    let ortho_basis = linalg::complete_orthonormal_real(&span_ortho, n);
    let bound = (n as f64).powi(form.d() as i32) * f.height();
    let bound_int = BigInt::from(bound.ceil() as i128);

    let mut by_norm: std::collections::BTreeMap<i64, Vec<i64>> = std::collections::BTreeMap::new();
    let shrink = 0.72f64;
    let max_steps = 512usize;
    let mut achieved = 0i64;
    for step in 0..max_steps {
        let a = shrink.powi(step as i32);
        let b = a.powf(-(k as f64) / (n - k) as f64);
        if b > 64.0 * norm_target as f64 + 1e6 {
            break;
        }
        // box: |K'_j(x)| <= a (j < k), <= b otherwise. The inflation keeps
        // the volume strictly above 2^n and lets each box carry several
        // distinct witnesses; the exact |F| filter below discards overshoot.
        let lambda = 2.5f64;
        let bounds: Vec<f64> = (0..n)
            .map(|j| if j < k { a * lambda } else { b * lambda })
            .collect();
        // embed standard basis: row i -> (K'_j(e_i) / c_j)_j
        let embedded: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| ortho_basis[j][i] / bounds[j])
                    .collect()
            })
            .collect();
        let radius = (n as f64).sqrt() * (1.0 + 1e-9);
        let candidates = match lattice::enumerate_ball_reduced(&embedded, radius, candidate_cap) {
            Ok(c) => c,
            Err(Error::CandidateBudget(_)) => continue,
            Err(e) => return Err(e),
        };
        for x in candidates {
            if x.iter().all(|&v| v == 0) {
                continue;
            }
            // exact sup-norm box check
            let inside = (0..n).all(|j| {
                let v: f64 = ortho_basis[j]
                    .iter()
                    .zip(&x)
                    .map(|(&o, &xi)| o * xi as f64)
                    .sum();
                v.abs() <= bounds[j] * (1.0 + 1e-12)
            });
            if !inside {
                continue;
            }
            let mut canon = x.clone();
            if let Some(first) = canon.iter().find(|&&v| v != 0) {
                if *first < 0 {
                    for v in canon.iter_mut() {
                        *v = -*v;
                    }
                }
            }
            let val = form.integer_form().evaluate(&canon).abs();
            if val > bound_int.abs() {
                continue;
            }
            let norm = sup_norm(&canon);
            achieved = achieved.max(norm);
            by_norm.entry(norm).or_insert(canon);
        }
        if by_norm.len() >= count && achieved >= norm_target {
            break;
        }
    }

    if by_norm.len() < count || achieved < norm_target {
        return Err(Error::SearchBudget { achieved });
    }
    let points: Vec<Vec<i64>> = by_norm.into_values().collect();
    Ok(InfinitudeWitness {
        k,
        indices,
        real_span,
        ortho_basis,
        points,
        bound,
    })
}

fn real_gram_schmidt(rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let complex: Vec<Vec<C64>> = rows.iter().map(|r| linalg::to_complex(r)).collect();
    let ortho = linalg::gram_schmidt(&complex, 1e-9).ok_or(Error::DependentForms)?;
    Ok(ortho.iter().map(|r| linalg::re_part(r)).collect())
}
