//! Exact integer matrix utilities: determinants, unimodular inverses and a
//! small Smith-style diagonalization used for lattice saturation and basis
//! completion.

use crate::error::{Error, Result};

/// Determinant by fraction-free (Bareiss) elimination in i128.
pub fn det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let swap = (k + 1..n).find(|&i| a[i][k] != 0);
            match swap {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Exact inverse of a unimodular matrix (integer entries, det = +-1).
pub fn inverse_unimodular(m: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = m.len();
    let d = det(m);
    if d != 1 && d != -1 {
        return Err(Error::NotUnimodular(d as i64));
    }
    let mut inv = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            // cofactor C_ji / det
            let mut minor = Vec::with_capacity(n - 1);
            for r in 0..n {
                if r == j {
                    continue;
                }
                let mut row = Vec::with_capacity(n - 1);
                for c in 0..n {
                    if c == i {
                        continue;
                    }
                    row.push(m[r][c]);
                }
                minor.push(row);
            }
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            inv[i][j] = (sign as i128 * det(&minor) * d) as i64;
        }
    }
    Ok(inv)
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    let mut out = vec![vec![0i64; m]; n];
    for i in 0..n {
        for j in 0..m {
            let mut s = 0i128;
            for l in 0..k {
                s += a[i][l] as i128 * b[l][j] as i128;
            }
            out[i][j] = s as i64;
        }
    }
    out
}

pub fn mat_vec(a: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .map(|(&m, &v)| m as i128 * v as i128)
                .sum::<i128>() as i64
        })
        .collect()
}

/// Diagonalization `U M V = D` by row and column operations, tracking
/// `W = V^{-1}` so that the first `rank` rows of `W` form a primitive basis
/// of the saturation of the row lattice of `M`, and all `n` rows of `W`
/// complete it to a unimodular basis of Z^n.
struct Diagonalized {
    rank: usize,
    w: Vec<Vec<i128>>,
}

fn diagonalize(m: &[Vec<i64>]) -> Diagonalized {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut w: Vec<Vec<i128>> = (0..cols)
        .map(|i| (0..cols).map(|j| i128::from(i == j)).collect())
        .collect();

    // column ops on `a` are mirrored as inverse row ops on `w`
    let mut t = 0usize;
    while t < rows.min(cols) {
        // find a pivot of least absolute value in the remaining block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j] != 0
                    && pivot.map_or(true, |(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        if pj != t {
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            w.swap(t, pj);
        }
        loop {
            let mut clean = true;
            // clear column t by row ops
            for i in t + 1..rows {
                if a[i][t] != 0 {
                    let q = a[i][t].div_euclid(a[t][t]);
                    if q != 0 {
                        for j in 0..cols {
                            a[i][j] -= q * a[t][j];
                        }
                    }
                    if a[i][t] != 0 {
                        a.swap(t, i);
                        clean = false;
                    }
                }
            }
            // clear row t by column ops (mirrored on w)
            for j in t + 1..cols {
                if a[t][j] != 0 {
                    let q = a[t][j].div_euclid(a[t][t]);
                    if q != 0 {
                        // col_j -= q * col_t  =>  row_t of W += q * row_j of W
                        for i in 0..rows {
                            a[i][j] -= q * a[i][t];
                        }
                        for l in 0..cols {
                            w[t][l] += q * w[j][l];
                        }
                    }
                    if a[t][j] != 0 {
                        for row in a.iter_mut() {
                            row.swap(t, j);
                        }
                        w.swap(t, j);
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        t += 1;
    }
    let rank = (0..rows.min(cols)).take_while(|&i| a[i][i] != 0).count();
    Diagonalized { rank, w }
}

/// Saturation and completion of the lattice spanned by integer row vectors.
///
/// Returns `(primitive, completion)` where `primitive` is a basis of
/// `span_Q(rows) ∩ Z^n` (`rank` rows) and `completion` is a unimodular
/// `n x n` matrix whose first `rank` rows are `primitive`.
pub fn saturate_and_complete(rows: &[Vec<i64>]) -> Result<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    if rows.is_empty() {
        return Err(Error::RankDeficientBasis);
    }
    let n = rows[0].len();
    let d = diagonalize(rows);
    let to_i64 = |v: &Vec<i128>| -> Vec<i64> { v.iter().map(|&x| x as i64).collect() };
    let completion: Vec<Vec<i64>> = d.w.iter().map(to_i64).collect();
    debug_assert_eq!(completion.len(), n);
    let primitive = completion[..d.rank].to_vec();
    Ok((primitive, completion))
}

/// Rank of an integer matrix (exact).
pub fn rank(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    diagonalize(rows).rank
}
