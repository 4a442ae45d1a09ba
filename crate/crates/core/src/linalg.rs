//! Numerical linear algebra over complex coefficient vectors.
//!
//! Rank, span membership, proportionality and conjugate-proportionality all
//! go through one relative singular-value threshold so that every geometric
//! decision in the crate is controlled by a single tolerance knob.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;

/// Hermitian inner product `<a, b> = sum a_i * conj(b_i)`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Value of the linear form with coefficient vector `coeffs` at a real point.
pub fn eval_form(coeffs: &[C64], x: &[f64]) -> C64 {
    coeffs.iter().zip(x).map(|(c, &v)| c * v).sum()
}

fn rows_to_matrix(rows: &[Vec<C64>]) -> DMatrix<C64> {
    let n = rows.first().map(|r| r.len()).unwrap_or(0);
    DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j])
}

/// Span membership tester built from the SVD of a stack of row vectors.
///
/// The rank is the number of singular values above `tol * sigma_max`; the
/// same threshold decides membership queries.
pub struct SpanTester {
    rank: usize,
    /// Orthonormal basis of the row span, one basis vector per row.
    basis: Vec<Vec<C64>>,
    sigma_max: f64,
    tol: f64,
}

impl SpanTester {
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Whether `v` lies in the span at the tolerance the tester was built with.
    pub fn contains(&self, v: &[C64]) -> bool {
        let nv = norm(v);
        if nv == 0.0 {
            return true;
        }
        let mut residual: Vec<C64> = v.to_vec();
        for b in &self.basis {
            let c = inner(&residual, b);
            for (r, bi) in residual.iter_mut().zip(b) {
                *r -= c * bi;
            }
        }
        norm(&residual) <= self.tol * nv.max(self.sigma_max)
    }
}

/// Rank of a set of complex row vectors with an accompanying span tester.
pub fn rank_span(vectors: &[Vec<C64>], tol: f64) -> SpanTester {
    if vectors.is_empty() {
        return SpanTester {
            rank: 0,
            basis: Vec::new(),
            sigma_max: 0.0,
            tol,
        };
    }
    let m = rows_to_matrix(vectors);
    let svd = m.svd(false, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let threshold = tol * sigma_max;
    let v_t = svd
        .v_t
        .expect("svd requested with right singular vectors");
    // rows of V^H are an orthonormal basis of the row space
    let mut basis = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > threshold {
            basis.push(v_t.row(i).iter().cloned().collect::<Vec<_>>());
        }
    }
    SpanTester {
        rank: basis.len(),
        basis,
        sigma_max,
        tol,
    }
}

pub fn rank(vectors: &[Vec<C64>], tol: f64) -> usize {
    rank_span(vectors, tol).rank()
}

/// Whether `a` and `b` are proportional (rank of the stacked pair is 1).
pub fn proportional(a: &[C64], b: &[C64], tol: f64) -> bool {
    if norm(a) == 0.0 || norm(b) == 0.0 {
        return false;
    }
    rank(&[a.to_vec(), b.to_vec()], tol) == 1
}

pub fn conjugate(v: &[C64]) -> Vec<C64> {
    v.iter().map(|z| z.conj()).collect()
}

/// Whether the vector has (up to phase) real direction: v proportional to conj(v).
pub fn is_real_direction(v: &[C64], tol: f64) -> bool {
    proportional(v, &conjugate(v), tol)
}

/// Determinant of the n x n matrix whose rows are the given vectors.
pub fn det_rows(rows: &[Vec<C64>]) -> C64 {
    let m = rows_to_matrix(rows);
    assert_eq!(m.nrows(), m.ncols(), "determinant needs a square stack");
    m.determinant()
}

/// Sequential Gram-Schmidt orthonormalization of complex row vectors.
///
/// Returns `None` if some vector is (numerically) dependent on its
/// predecessors: the leftover component must exceed `tol * ||v||`.
pub fn gram_schmidt(rows: &[Vec<C64>], tol: f64) -> Option<Vec<Vec<C64>>> {
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(rows.len());
    for v in rows {
        let mut w = v.clone();
        for b in &out {
            let c = inner(&w, b);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
        let nw = norm(&w);
        if nw <= tol * norm(v) {
            return None;
        }
        for wi in w.iter_mut() {
            *wi /= C64::new(nw, 0.0);
        }
        out.push(w);
    }
    Some(out)
}

/// Extend `rows` (orthonormal real vectors) to a full orthonormal basis of R^n.
pub fn complete_orthonormal_real(rows: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<DVector<f64>> = rows
        .iter()
        .map(|r| DVector::from_column_slice(r))
        .collect();
    for j in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = DVector::zeros(n);
        v[j] = 1.0;
        for b in &basis {
            let c = v.dot(b);
            v -= b * c;
        }
        let nv = v.norm();
        if nv > 1e-8 {
            basis.push(v / nv);
        }
    }
    assert_eq!(basis.len(), n, "completion failed");
    basis.iter().map(|b| b.iter().cloned().collect()).collect()
}

/// Real parts / imaginary parts of a complex vector.
pub fn re_part(v: &[C64]) -> Vec<f64> {
    v.iter().map(|z| z.re).collect()
}

pub fn im_part(v: &[C64]) -> Vec<f64> {
    v.iter().map(|z| z.im).collect()
}

pub fn to_complex(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| C64::new(x, 0.0)).collect()
}
