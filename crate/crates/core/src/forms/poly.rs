//! Exact multivariate polynomial arithmetic over big integers, used to push
//! integer forms through linear substitutions without float error.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::forms::IntegerForm;

type Poly = BTreeMap<Vec<u32>, BigInt>;

fn poly_mul(a: &Poly, b: &Poly, nvars: usize) -> Poly {
    let mut out: Poly = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let mut e = vec![0u32; nvars];
            for i in 0..nvars {
                e[i] = ea[i] + eb[i];
            }
            let entry = out.entry(e).or_insert_with(BigInt::zero);
            *entry += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn poly_pow(base: &Poly, mut exp: u32, nvars: usize) -> Poly {
    let mut result: Poly = BTreeMap::new();
    result.insert(vec![0u32; nvars], BigInt::from(1));
    let mut sq = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            result = poly_mul(&result, &sq, nvars);
        }
        exp >>= 1;
        if exp > 0 {
            sq = poly_mul(&sq, &sq, nvars);
        }
    }
    result
}

/// Substitute X_i = sum_j M[i][j] * Y_j into `g`, expanding exactly.
///
/// `m` has one row per original variable and one column per new variable.
/// The result may be identically zero, reported as an error so callers must
/// decide how to treat a vanishing restriction.
pub fn substitute_linear(g: &IntegerForm, m: &[Vec<i64>]) -> Result<IntegerForm> {
    let n = g.n();
    if m.len() != n {
        return Err(Error::Parse(format!(
            "substitution has {} rows, form has {n} variables",
            m.len()
        )));
    }
    let n_new = m[0].len();
    if n_new == 0 || m.iter().any(|r| r.len() != n_new) {
        return Err(Error::Parse("ragged substitution matrix".into()));
    }
    // linear polynomial for each original variable
    let lines: Vec<Poly> = (0..n)
        .map(|i| {
            let mut p: Poly = BTreeMap::new();
            for j in 0..n_new {
                if m[i][j] != 0 {
                    let mut e = vec![0u32; n_new];
                    e[j] = 1;
                    p.insert(e, BigInt::from(m[i][j]));
                }
            }
            p
        })
        .collect();

    let mut acc: Poly = BTreeMap::new();
    for (e, c) in g.monomials() {
        let mut term: Poly = BTreeMap::new();
        term.insert(vec![0u32; n_new], c.clone());
        for (i, &ei) in e.iter().enumerate() {
            if ei > 0 {
                if lines[i].is_empty() {
                    term.clear();
                    break;
                }
                term = poly_mul(&term, &poly_pow(&lines[i], ei, n_new), n_new);
            }
        }
        for (e2, c2) in term {
            let entry = acc.entry(e2).or_insert_with(BigInt::zero);
            *entry += c2;
        }
    }
    acc.retain(|_, c| !c.is_zero());
    if acc.is_empty() {
        return Err(Error::ZeroRestriction);
    }
    IntegerForm::new(n_new, g.d(), acc)
}
