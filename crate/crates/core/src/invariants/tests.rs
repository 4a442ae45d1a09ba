use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::*;
use crate::forms::{expand, DecomposableForm, Factorization, UnimodularMap, DEFAULT_TOL};
use crate::linalg::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn real(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| c(x, 0.0)).collect()
}

fn form_from(label: &str, factors: Vec<Vec<C64>>) -> DecomposableForm {
    let f = Factorization::new(factors, DEFAULT_TOL).unwrap();
    DecomposableForm::from_factorization(label, f, None).unwrap()
}

pub(crate) fn xy() -> DecomposableForm {
    form_from("xy", vec![real(&[1.0, 0.0]), real(&[0.0, 1.0])])
}

pub(crate) fn thue_cbrt2() -> DecomposableForm {
    let a = 2f64.cbrt();
    let w = C64::new(-0.5, 3f64.sqrt() / 2.0);
    form_from(
        "thue_cbrt2",
        vec![
            vec![c(1.0, 0.0), c(-a, 0.0)],
            vec![c(1.0, 0.0), -w * a],
            vec![c(1.0, 0.0), -w.conj() * a],
        ],
    )
}

pub(crate) fn x1sq_x2_x3() -> DecomposableForm {
    form_from(
        "x1sq_x2_x3",
        vec![
            real(&[1.0, 0.0, 0.0]),
            real(&[1.0, 0.0, 0.0]),
            real(&[0.0, 1.0, 0.0]),
            real(&[0.0, 0.0, 1.0]),
        ],
    )
}

pub(crate) fn sum_squares_power(k: usize) -> DecomposableForm {
    let mut factors = Vec::new();
    for _ in 0..k {
        factors.push(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        factors.push(vec![c(1.0, 0.0), c(0.0, -1.0)]);
    }
    form_from("definite_quad_power", factors)
}

pub(crate) fn pell_quartic() -> DecomposableForm {
    let s = 2f64.sqrt();
    form_from(
        "pell_quartic",
        vec![
            real(&[1.0, -s]),
            real(&[1.0, -s]),
            real(&[1.0, s]),
            real(&[1.0, s]),
        ],
    )
}

#[test]
fn tuples_of_basis_covector_product() {
    let f = xy();
    let i = enumerate_i(f.factorization());
    assert_eq!(i.len(), 2);
    assert!(i.contains(&vec![0, 1]) && i.contains(&vec![1, 0]));
    let ip = enumerate_i_prime(f.factorization());
    assert_eq!(ip, vec![vec![0, 1]]);
}

#[test]
fn tuples_of_x1sq_x2_x3_by_brute_force() {
    let f = x1sq_x2_x3();
    let ip = enumerate_i_prime(f.factorization());
    assert_eq!(ip.len(), 2);
    assert!(ip.contains(&vec![0, 2, 3]) && ip.contains(&vec![1, 2, 3]));
}

#[test]
fn rank_deficient_factors_give_no_tuples() {
    let f = Factorization::new(
        vec![real(&[1.0, 0.0]), real(&[2.0, 0.0]), real(&[-3.0, 0.0])],
        DEFAULT_TOL,
    )
    .unwrap();
    assert!(enumerate_i(&f).is_empty());
    assert!(compute_a(&f).is_none());
}

#[test]
fn b_values_examples() {
    let (b, bmax) = b_values(xy().factorization());
    assert_eq!(b, vec![2, 2]);
    assert_eq!(bmax, 2);

    // the repeated-factor example has non-constant b
    let (b, bmax) = b_values(x1sq_x2_x3().factorization());
    assert_eq!(b[0], b[1]);
    assert!(b[2] > b[0]);
    assert_eq!(bmax, b[2]);

    // nonzero discriminant: every factor occurs equally often
    let (b, bmax) = b_values(thue_cbrt2().factorization());
    assert!(b.iter().all(|&x| x == bmax));
}

#[test]
fn j_equals_i_for_real_factorizations() {
    let f = x1sq_x2_x3();
    let i = enumerate_i(f.factorization());
    let j = enumerate_j(f.factorization());
    assert_eq!(i.len(), j.len());
}

#[test]
fn j_for_conjugate_pair() {
    let f = sum_squares_power(1);
    let j = enumerate_j(f.factorization());
    assert_eq!(j.len(), 2);
}

#[test]
fn j_nonempty_for_cbrt2() {
    assert!(!enumerate_j(thue_cbrt2().factorization()).is_empty());
}

#[test]
fn a_of_cbrt2_is_one() {
    assert_eq!(compute_a(thue_cbrt2().factorization()), Some(Rational::new(1, 1)));
}

#[test]
fn a_of_x1sq_x2() {
    let f = form_from(
        "x1sq_x2",
        vec![real(&[1.0, 0.0]), real(&[1.0, 0.0]), real(&[0.0, 1.0])],
    );
    assert_eq!(compute_a(f.factorization()), Some(Rational::new(2, 1)));
}

#[test]
fn c_for_nonzero_discriminant() {
    let f = thue_cbrt2();
    let a = compute_a(f.factorization()).unwrap();
    let c = compute_c(f.factorization(), a, true).unwrap();
    assert_eq!(c, Rational::new(1, 1));
}

#[test]
fn c_formula_for_degenerate_branch() {
    // x1^2 x2: b(F) = 4, n = 2, d = 3, a = 2:
    // c = (4 / (2! * 2)) (3 - 2) - 1/2 = 1/2
    let f = form_from(
        "x1sq_x2",
        vec![real(&[1.0, 0.0]), real(&[1.0, 0.0]), real(&[0.0, 1.0])],
    );
    let a = compute_a(f.factorization()).unwrap();
    let c = compute_c(f.factorization(), a, false).unwrap();
    assert_eq!(c, Rational::new(1, 2));
}

#[test]
fn semi_discriminant_of_xy() {
    let sd = semi_discriminants(xy().factorization());
    assert!((sd.s - c(-1.0, 0.0)).norm() < 1e-12);
    assert!((sd.ns_mod - 1.0).abs() < 1e-12);
    // |NS| >= H^{-b}: here H = 1, b = 2
    assert!(sd.ns_mod >= 1.0 - 1e-9);
}

#[test]
fn semi_discriminant_zero_when_no_tuples() {
    let f = Factorization::new(vec![real(&[1.0, 0.0]), real(&[2.0, 0.0])], DEFAULT_TOL).unwrap();
    let sd = semi_discriminants(&f);
    assert_eq!(sd.s, c(0.0, 0.0));
}

#[test]
fn semi_discriminant_bound_for_cbrt2() {
    let f = thue_cbrt2();
    let sd = semi_discriminants(f.factorization());
    let (_, bmax) = b_values(f.factorization());
    let bound = -(bmax as f64) * f.factorization().log_height();
    assert!(sd.log_ns_mod >= bound - 1e-9);
}

#[test]
fn ns_invariant_under_factor_rescaling() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let f = thue_cbrt2();
    let base = semi_discriminants(f.factorization());
    for _ in 0..20 {
        let factors: Vec<Vec<C64>> = f
            .factorization()
            .factors()
            .iter()
            .map(|v| {
                let r = rng.gen_range(0.2..4.0);
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                let alpha = C64::new(r * phase.cos(), r * phase.sin());
                v.iter().map(|z| z * alpha).collect()
            })
            .collect();
        let g = Factorization::new(factors, DEFAULT_TOL).unwrap();
        let sd = semi_discriminants(&g);
        assert!(
            (sd.log_ns_mod - base.log_ns_mod).abs() <= 1e-9 * base.log_ns_mod.abs().max(1.0)
        );
    }
}

#[test]
fn hadamard_ratios_examples() {
    let ortho = Factorization::new(vec![real(&[1.0, 0.0]), real(&[0.0, 1.0])], DEFAULT_TOL).unwrap();
    let r = hadamard_ratios(&ortho).unwrap();
    assert_eq!(r.len(), 1);
    assert!((r[0] - 1.0).abs() < 1e-12);

    let sum_sq = sum_squares_power(1);
    let r = hadamard_ratios(sum_sq.factorization()).unwrap();
    assert!((r[0] - 1.0).abs() < 1e-12);

    let dependent =
        Factorization::new(vec![real(&[1.0, 0.0]), real(&[2.0, 0.0])], DEFAULT_TOL).unwrap();
    assert!(hadamard_ratios(&dependent).is_err());
}

#[test]
fn hadamard_ratios_within_bound_for_cbrt2() {
    let f = thue_cbrt2();
    let (_, bmax) = b_values(f.factorization());
    let h = f.factorization().height();
    let lo = h.powf(-(bmax as f64) / factorial(f.n()) as f64);
    for r in hadamard_ratios(f.factorization()).unwrap() {
        assert!(r <= 1.0 + 1e-12);
        assert!(r >= lo - 1e-9);
    }
}

#[test]
fn classification_of_corpus_shapes() {
    assert_eq!(classify_volume(&thue_cbrt2()), Classification::FiniteVolume);
    assert_eq!(classify_volume(&xy()), Classification::InfiniteVolume);
    assert_eq!(
        classify_volume(&sum_squares_power(3)),
        Classification::ExceptionalDefiniteQuadratic
    );
    assert_eq!(
        classify_volume(&x1sq_x2_x3()),
        Classification::InfiniteVolume
    );
    assert_eq!(
        classify_volume(&pell_quartic()),
        Classification::InfiniteVolume
    );
}

#[test]
fn restriction_examples() {
    // x1 x2 (x1 + x2) restricted to span(e1) vanishes identically
    let f = form_from(
        "xy_sum",
        vec![real(&[1.0, 0.0]), real(&[0.0, 1.0]), real(&[1.0, 1.0])],
    );
    let basis = SubspaceBasis::new(vec![vec![1, 0]]).unwrap();
    let r = restrict_to_subspace(&f, &basis).unwrap();
    assert!(r.form.is_none());

    // x1^3 - 2 x2^3 on span(e2): -2 t^3
    let f = thue_cbrt2();
    let basis = SubspaceBasis::new(vec![vec![0, 1]]).unwrap();
    let r = restrict_to_subspace(&f, &basis).unwrap();
    let g = r.form.unwrap();
    assert_eq!(g.n(), 1);
    assert_eq!(g.integer_form().evaluate(&[1]), BigInt::from(-2));
}

#[test]
fn restriction_matches_symbolic_substitution() {
    // three-variable form restricted to the coordinate plane x3 = 0
    let f = x1sq_x2_x3();
    let basis = SubspaceBasis::new(vec![vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
    let r = restrict_to_subspace(&f, &basis).unwrap();
    // x1^2 x2 x3 with x3 = 0 vanishes
    assert!(r.form.is_none());

    // a nonvanishing case: restrict to the plane spanned by e1, e2 + e3
    let basis = SubspaceBasis::new(vec![vec![1, 0, 0], vec![0, 1, 1]]).unwrap();
    let r = restrict_to_subspace(&f, &basis).unwrap();
    let g = r.form.unwrap();
    // F(y1, y2, y2) = y1^2 y2^2
    assert_eq!(g.integer_form().monomials()[&vec![2, 2]], BigInt::from(1));
}

#[test]
fn restriction_embedding_is_exact() {
    let f = thue_cbrt2();
    let basis = SubspaceBasis::new(vec![vec![2, 4]]).unwrap(); // saturates to (1, 2)
    let r = restrict_to_subspace(&f, &basis).unwrap();
    let g = r.form.clone().unwrap();
    for t in -5i64..=5 {
        let x = r.embed(&[t]);
        assert_eq!(g.integer_form().evaluate(&[t]), f.integer_form().evaluate(&x));
    }
}

#[test]
fn finite_type_verdicts() {
    let r = finite_type_check(&thue_cbrt2(), &[]);
    assert_eq!(r.verdict, FiniteTypeVerdict::FiniteType);

    let r = finite_type_check(&xy(), &[]);
    assert_eq!(r.verdict, FiniteTypeVerdict::NotFiniteType);

    // finite volume on the full space but vanishing on span(e1)
    let a = 2f64.cbrt();
    let w = C64::new(-0.5, 3f64.sqrt() / 2.0);
    let f = form_from(
        "x2_times_cbrt2",
        vec![
            real(&[0.0, 1.0]),
            vec![c(1.0, 0.0), c(-a, 0.0)],
            vec![c(1.0, 0.0), -w * a],
            vec![c(1.0, 0.0), -w.conj() * a],
        ],
    );
    assert_eq!(classify_volume(&f), Classification::FiniteVolume);
    let r = finite_type_check(&f, &[]);
    assert_eq!(r.verdict, FiniteTypeVerdict::NotFiniteType);
    let w = r.witness.unwrap();
    assert_eq!(w, vec![vec![1, 0]]);
}

#[test]
fn lp_min_examples() {
    let (v, x) = lp_min(&[3.0], 2.0).unwrap();
    assert_eq!(v, 6.0);
    assert_eq!(x, vec![2.0]);

    let (v, _) = lp_min(&[1.0, 2.0, 4.0], 1.0).unwrap();
    assert!((v - 7.0).abs() < 1e-12);

    // constant b: objective is constant on the feasible set
    let (v, _) = lp_min(&[2.0, 2.0, 2.0], 1.5).unwrap();
    assert!((v - 3.0 * 1.5 * 2.0).abs() < 1e-12);

    assert!(lp_min(&[2.0, 1.0], 1.0).is_err());
    assert!(lp_min(&[1.0, 2.0], 0.0).is_err());
}

/// Brute-force vertex enumeration oracle for the lp_min constraint polytope.
fn lp_min_by_vertex_enumeration(b: &[f64], a: f64) -> f64 {
    use nalgebra::{DMatrix, DVector};
    let k = b.len();
    // constraints: rows of (normal, rhs) with normal . x <= rhs, plus the
    // equality sum x = k a which is active at every vertex.
    let mut ineq: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..k {
        let mut n = vec![0.0; k];
        n[i] = -1.0;
        ineq.push((n, 0.0)); // -x_i <= 0
    }
    for j in 1..k {
        let mut n = vec![0.0; k];
        for x in n.iter_mut().take(j) {
            *x = 1.0;
        }
        ineq.push((n, j as f64 * a));
    }
    let mut best = f64::INFINITY;
    let m = ineq.len();
    // choose k-1 active inequalities to pair with the equality
    let mut choice: Vec<usize> = (0..k - 1).collect();
    loop {
        let mut mat = DMatrix::zeros(k, k);
        let mut rhs = DVector::zeros(k);
        for (r, &ci) in choice.iter().enumerate() {
            for col in 0..k {
                mat[(r, col)] = ineq[ci].0[col];
            }
            rhs[r] = ineq[ci].1;
        }
        for col in 0..k {
            mat[(k - 1, col)] = 1.0;
        }
        rhs[k - 1] = k as f64 * a;
        if let Some(x) = mat.lu().solve(&rhs) {
            let feasible = ineq
                .iter()
                .all(|(n, r)| n.iter().zip(x.iter()).map(|(a, b)| a * b).sum::<f64>() <= r + 1e-9);
            if feasible {
                let val: f64 = b.iter().zip(x.iter()).map(|(bi, xi)| bi * xi).sum();
                best = best.min(val);
            }
        }
        // next combination
        let mut i = k - 1;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if choice[i] + (k - 1 - i) < m {
                choice[i] += 1;
                for j in i + 1..k - 1 {
                    choice[j] = choice[j - 1] + 1;
                }
                break;
            }
        }
        if k == 1 {
            return best;
        }
    }
}

#[test]
fn lp_min_matches_vertex_enumeration() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let k = rng.gen_range(1..=6);
        let mut b: Vec<f64> = (0..k).map(|_| rng.gen_range(-5.0..5.0)).collect();
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let a = rng.gen_range(0.1..3.0);
        let (v, _) = lp_min(&b, a).unwrap();
        let oracle = lp_min_by_vertex_enumeration(&b, a);
        assert!(
            (v - oracle).abs() <= 1e-12 * (1.0 + v.abs().max(oracle.abs())),
            "lp value {v} vs vertex oracle {oracle}"
        );
    }
}

#[test]
fn i_count_identity_and_cap() {
    for f in [xy(), thue_cbrt2(), x1sq_x2_x3(), pell_quartic()] {
        let fa = f.factorization();
        let i = enumerate_i(fa);
        let ip = enumerate_i_prime(fa);
        assert_eq!(i.len() as u64, factorial(fa.n()) * ip.len() as u64);
        assert!(ip.len() as u64 <= binomial(fa.d(), fa.n()));
    }
}

#[test]
fn invariance_under_unimodular_composition() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    for f in [thue_cbrt2(), xy(), sum_squares_power(2)] {
        let base = build_report(&f);
        for _ in 0..10 {
            let t = loop {
                let a = rng.gen_range(-3i64..=3);
                let b = rng.gen_range(-3i64..=3);
                let c_ = rng.gen_range(-3i64..=3);
                let d = rng.gen_range(-3i64..=3);
                if (a * d - b * c_).abs() == 1 {
                    break UnimodularMap::new(vec![vec![a, b], vec![c_, d]]).unwrap();
                }
            };
            let g = f.compose_unimodular(&t).unwrap();
            let rep = build_report(&g);
            assert_eq!(rep.classification, base.classification, "form {}", f.label());
            assert_eq!(rep.a_value, base.a_value);
            assert_eq!(rep.b_max, base.b_max);
            assert_eq!(rep.i_count, base.i_count);
        }
    }
}

#[test]
fn exact_rank_oracle_on_rational_inputs() {
    use rand::{Rng, SeedableRng};
    // exact Gaussian elimination over Q for integer vectors
    fn exact_rank(rows: &[Vec<i64>]) -> usize {
        crate::intmat::rank(rows)
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let k = rng.gen_range(1..=4);
        let n = rng.gen_range(2..=4);
        let rows: Vec<Vec<i64>> = (0..k)
            .map(|_| (0..n).map(|_| rng.gen_range(-3i64..=3)).collect())
            .collect();
        let complex: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c(x as f64, 0.0)).collect())
            .collect();
        assert_eq!(rank_span(&complex, 1e-9).rank(), exact_rank(&rows));
    }
}

#[test]
fn report_serializes_rationals_as_num_den() {
    let rep = build_report(&thue_cbrt2());
    let json = serde_json::to_string(&rep).unwrap();
    assert!(json.contains("\"num\":1"));
    assert!(json.contains("\"den\":1"));
    assert!(json.contains("FiniteVolume"));
    let back: InvariantReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back.a_value, rep.a_value);
}

#[test]
fn expand_keeps_integer_forms_integral() {
    // guard: every fixture used above really is an integer form
    for f in [xy(), thue_cbrt2(), x1sq_x2_x3(), pell_quartic(), sum_squares_power(2)] {
        let redone = expand(f.factorization()).unwrap();
        assert_eq!(&redone, f.integer_form());
    }
    let mut m = BTreeMap::new();
    m.insert(vec![1u32, 1], BigInt::from(1));
    assert!(crate::forms::IntegerForm::new(2, 2, m).is_ok());
}
