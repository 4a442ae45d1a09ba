use decompform::forms::{DecomposableForm, Factorization, DEFAULT_TOL};
use decompform::measure::{degenerate_directions, infinitude_witness, realify_span};
use num_complex::Complex64 as C64;

fn main() {
    let s = 2f64.sqrt();
    let real = |v: &[f64]| -> Vec<C64> { v.iter().map(|&x| C64::new(x, 0.0)).collect() };
    let f = Factorization::new(
        vec![
            real(&[1.0, -s]),
            real(&[1.0, -s]),
            real(&[1.0, s]),
            real(&[1.0, s]),
        ],
        DEFAULT_TOL,
    )
    .unwrap();
    let form = DecomposableForm::from_factorization("pell", f, None).unwrap();
    println!("dd: {:?}", degenerate_directions(&form));
    let (_, idx) = degenerate_directions(&form).unwrap();
    println!("realify: {:?}", realify_span(&form, &idx));
    match infinitude_witness(&form, 40, 500, 10_000_000) {
        Ok(w) => println!("ok: {} points, max norm {:?}", w.points.len(),
            w.points.last()),
        Err(e) => println!("err: {e}"),
    }
}
