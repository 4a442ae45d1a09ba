//! Heuristic height reduction by greedy descent over elementary unimodular
//! column operations. The result is equivalent to the input and has height no
//! larger; it is not certified minimal.

use crate::error::Result;
use crate::forms::{DecomposableForm, UnimodularMap};

/// Greedy descent: at each step try every X_i <- X_i +- X_j, apply the best
/// strictly improving one, stop when none improves or the budget runs out.
pub fn reduce_height_heuristic(form: &DecomposableForm, budget: usize) -> Result<DecomposableForm> {
    let n = form.n();
    let mut current = form.clone();
    let mut height = current.factorization().height();
    for _ in 0..budget {
        let mut best: Option<(f64, UnimodularMap)> = None;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for s in [-1i64, 1] {
                    let t = UnimodularMap::elementary(n, i, j, s);
                    let candidate = current.factorization().compose(&t)?;
                    let h = candidate.height();
                    if h < height * (1.0 - 1e-12)
                        && best.as_ref().map_or(true, |(bh, _)| h < *bh)
                    {
                        best = Some((h, t));
                    }
                }
            }
        }
        match best {
            Some((h, t)) => {
                current = current.compose_unimodular(&t)?;
                height = h;
            }
            None => break,
        }
    }
    Ok(current)
}
