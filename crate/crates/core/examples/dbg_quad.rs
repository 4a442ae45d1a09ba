use decompform::forms::{DecomposableForm, Factorization, DEFAULT_TOL};
use decompform::measure::{box_volume_quadrature, volume_vf_quadrature};
use num_complex::Complex64 as C64;
use std::time::Instant;

fn main() {
    let a = 2f64.cbrt();
    let w = C64::new(-0.5, 3f64.sqrt() / 2.0);
    let c = |re: f64, im: f64| C64::new(re, im);
    let f = Factorization::new(
        vec![
            vec![c(1.0, 0.0), c(-a, 0.0)],
            vec![c(1.0, 0.0), -w * a],
            vec![c(1.0, 0.0), -w.conj() * a],
        ],
        DEFAULT_TOL,
    )
    .unwrap();
    let form = DecomposableForm::from_factorization("thue", f, None).unwrap();
    let t = Instant::now();
    let est = volume_vf_quadrature(&form, 1e-6).unwrap();
    let reference = 4.206546315976551_f64;
    println!(
        "A = {} (err {:.2e}, est err {:.2e}) in {:?}",
        est.value,
        (est.value - reference).abs(),
        est.std_error,
        t.elapsed()
    );
    for (m, b) in [(1.0, 2.0), (8.0, 4.0), (10.0, 10.0)] {
        let t = Instant::now();
        let est = box_volume_quadrature(&form, m, b).unwrap();
        println!("box m={m} b={b}: {} in {:?}", est.value, t.elapsed());
    }
}
