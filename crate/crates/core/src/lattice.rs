//! Lattice tooling: LLL basis reduction and exhaustive enumeration of all
//! lattice vectors inside a Euclidean ball, with a hard candidate budget.
//!
//! Enumeration works on coefficient vectors: for basis rows b_1..b_k the
//! lattice is { sum z_i b_i : z in Z^k } and results are returned as the
//! integer coefficient vectors z.

use crate::error::{Error, Result};

/// Gram-Schmidt data for a real basis given as rows.
struct Gso {
    mu: Vec<Vec<f64>>,
    norms_sq: Vec<f64>,
}

fn gso(basis: &[Vec<f64>]) -> Gso {
    let k = basis.len();
    let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut mu = vec![vec![0.0; k]; k];
    let mut norms_sq = vec![0.0; k];
    for i in 0..k {
        let mut v = basis[i].clone();
        for j in 0..i {
            let denom = norms_sq[j];
            let m = if denom == 0.0 {
                0.0
            } else {
                dot(&basis[i], &ortho[j]) / denom
            };
            mu[i][j] = m;
            for (vi, oi) in v.iter_mut().zip(&ortho[j]) {
                *vi -= m * oi;
            }
        }
        norms_sq[i] = dot(&v, &v);
        ortho.push(v);
    }
    Gso { mu, norms_sq }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// LLL-reduced basis together with the unimodular coefficient transform:
/// `reduced[i] = sum_j transform[i][j] * original[j]`.
pub struct Reduced {
    pub basis: Vec<Vec<f64>>,
    pub transform: Vec<Vec<i64>>,
}

/// Floating-point LLL with Lovasz parameter `delta`.
pub fn lll_reduce(original: &[Vec<f64>], delta: f64) -> Reduced {
    let k = original.len();
    let mut basis: Vec<Vec<f64>> = original.to_vec();
    let mut transform: Vec<Vec<i64>> = (0..k)
        .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
        .collect();
    if k <= 1 {
        return Reduced { basis, transform };
    }
    let mut g = gso(&basis);
    let mut i = 1usize;
    let mut steps = 0u64;
    while i < k {
        steps += 1;
        if steps > 100_000 {
            break; // f64 stagnation guard
        }
        // size reduction
        for j in (0..i).rev() {
            let r = g.mu[i][j].round();
            if r != 0.0 {
                let ri = r as i64;
                for l in 0..basis[0].len() {
                    basis[i][l] -= r * basis[j][l];
                }
                for l in 0..k {
                    transform[i][l] -= ri * transform[j][l];
                }
                g = gso(&basis);
            }
        }
        if g.norms_sq[i] >= (delta - g.mu[i][i - 1] * g.mu[i][i - 1]) * g.norms_sq[i - 1] {
            i += 1;
        } else {
            basis.swap(i, i - 1);
            transform.swap(i, i - 1);
            g = gso(&basis);
            i = i.max(2) - 1;
        }
    }
    Reduced { basis, transform }
}

fn enumerate_rec(
    level: usize,
    z: &mut Vec<i64>,
    budget: f64,
    g: &Gso,
    out: &mut Vec<Vec<i64>>,
    visited: &mut u64,
    cap: u64,
) -> Result<()> {
    let i = level;
    // center of the allowed interval: -sum_{j>i} mu[j][i] z_j
    let mut center = 0.0;
    for j in i + 1..z.len() {
        center += g.mu[j][i] * z[j] as f64;
    }
    let span = (budget / g.norms_sq[i]).max(0.0).sqrt();
    let lo = (-center - span).ceil() as i64;
    let hi = (-center + span).floor() as i64;
    for v in lo..=hi {
        *visited += 1;
        if *visited > cap {
            return Err(Error::CandidateBudget(cap));
        }
        z[i] = v;
        let used = (v as f64 + center) * (v as f64 + center) * g.norms_sq[i];
        let rem = budget - used;
        if rem < -1e-9 {
            continue;
        }
        if i == 0 {
            out.push(z.clone());
        } else {
            enumerate_rec(i - 1, z, rem.max(0.0), g, out, visited, cap)?;
        }
    }
    z[i] = 0;
    Ok(())
}

/// All integer coefficient vectors z with || sum z_i b_i || <= radius,
/// including the zero vector. Fails once more than `cap` enumeration nodes
/// are visited.
pub fn enumerate_ball(basis: &[Vec<f64>], radius: f64, cap: u64) -> Result<Vec<Vec<i64>>> {
    let k = basis.len();
    if k == 0 {
        return Ok(vec![vec![]]);
    }
    let g = gso(basis);
    if g.norms_sq.iter().any(|&x| x <= 0.0) {
        return Err(Error::DependentForms);
    }
    let r_sq = radius * radius * (1.0 + 1e-12);
    let mut out = Vec::new();
    let mut z = vec![0i64; k];
    let mut visited = 0u64;
    enumerate_rec(k - 1, &mut z, r_sq, &g, &mut out, &mut visited, cap)?;
    Ok(out)
}

/// Enumerate coefficient vectors after LLL reduction, mapping results back to
/// the original basis. Far cheaper than raw enumeration for skewed bases.
pub fn enumerate_ball_reduced(basis: &[Vec<f64>], radius: f64, cap: u64) -> Result<Vec<Vec<i64>>> {
    let red = lll_reduce(basis, 0.99);
    let zs = enumerate_ball(&red.basis, radius, cap)?;
    // z (reduced coords) -> z * transform (original coords)
    let k = basis.len();
    Ok(zs
        .into_iter()
        .map(|z| {
            (0..k)
                .map(|j| (0..k).map(|i| z[i] * red.transform[i][j]).sum())
                .collect()
        })
        .collect())
}
