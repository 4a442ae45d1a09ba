//! Form-file ingestion.
//!
//! A form file is UTF-8 JSON:
//!
//! ```json
//! {
//!   "label": "thue_cbrt2",
//!   "n": 2,
//!   "d": 3,
//!   "tol": 1e-8,
//!   "factors": [[[1.0, 0.0], [-1.26, 0.0]], ...],
//!   "expected_integer_form": {"3,0": "1", "0,3": "-2"}
//! }
//! ```
//!
//! `factors` holds `d` rows of `n` `[re, im]` pairs. When
//! `expected_integer_form` is present the expansion must match it exactly.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::forms::{DecomposableForm, Factorization, IntegerForm, DEFAULT_TOL};
use crate::linalg::C64;

#[derive(Deserialize)]
struct RawFormFile {
    label: String,
    n: usize,
    d: usize,
    #[serde(default)]
    tol: Option<f64>,
    factors: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    expected_integer_form: Option<BTreeMap<String, String>>,
}

fn parse_expected(
    raw: &BTreeMap<String, String>,
    n: usize,
    d: usize,
) -> Result<IntegerForm> {
    let mut monomials = BTreeMap::new();
    for (key, value) in raw {
        let exps: Vec<u32> = key
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(format!("bad exponent '{s}': {e}")))
            })
            .collect::<Result<_>>()?;
        let coeff: BigInt = value
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad coefficient '{value}': {e}")))?;
        monomials.insert(exps, coeff);
    }
    IntegerForm::new(n, d, monomials)
}

pub fn parse_form_str(source: &str) -> Result<DecomposableForm> {
    let raw: RawFormFile =
        serde_json::from_str(source).map_err(|e| Error::Parse(e.to_string()))?;
    if raw.n < 2 {
        return Err(Error::Parse(format!("n = {} but need n >= 2", raw.n)));
    }
    if raw.d < 1 {
        return Err(Error::Parse("need d >= 1".into()));
    }
    if raw.factors.len() != raw.d {
        return Err(Error::Parse(format!(
            "{} factors given but d = {}",
            raw.factors.len(),
            raw.d
        )));
    }
    if let Some(t) = raw.tol {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Parse(format!("tol = {t} must be a finite nonnegative real")));
        }
    }
    let factors: Vec<Vec<C64>> = raw
        .factors
        .iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != raw.n {
                return Err(Error::Parse(format!(
                    "factor {i} has {} entries, expected n = {}",
                    row.len(),
                    raw.n
                )));
            }
            if row.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
                return Err(Error::Parse(format!("factor {i} has non-finite entries")));
            }
            Ok(row.iter().map(|p| C64::new(p[0], p[1])).collect())
        })
        .collect::<Result<_>>()?;
    let tol = raw.tol.unwrap_or(DEFAULT_TOL);
    let factorization = Factorization::new(factors, tol)?;
    let expected = raw
        .expected_integer_form
        .as_ref()
        .map(|m| parse_expected(m, raw.n, raw.d))
        .transpose()?;
    DecomposableForm::from_factorization(raw.label, factorization, expected.as_ref())
}

pub fn parse_form(path: impl AsRef<Path>) -> Result<DecomposableForm> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Parse(format!("{}: {e}", path.as_ref().display())))?;
    parse_form_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basis_covector_product() {
        let src = r#"{
            "label": "xy", "n": 2, "d": 2,
            "factors": [[[1,0],[0,0]],[[0,0],[1,0]]],
            "expected_integer_form": {"1,1": "1"}
        }"#;
        let f = parse_form_str(src).unwrap();
        assert_eq!(f.label(), "xy");
        assert_eq!(f.d(), 2);
    }

    #[test]
    fn cbrt2_with_expected_form() {
        let a = 2f64.cbrt();
        // -w*a and -conj(w)*a for w a primitive cube root of unity
        let (c, s) = (0.5 * a, a * 3f64.sqrt() / 2.0);
        let src = format!(
            r#"{{
            "label": "thue", "n": 2, "d": 3,
            "factors": [
                [[1,0],[{na},0]],
                [[1,0],[{c},{ns}]],
                [[1,0],[{c},{s}]]
            ],
            "expected_integer_form": {{"3,0": "1", "0,3": "-2"}}
        }}"#,
            na = -a,
            c = c,
            s = s,
            ns = -s,
        );
        let f = parse_form_str(&src).unwrap();
        assert!(f.factorization().conjugate_closed());
    }

    #[test]
    fn zero_factor_is_an_error() {
        let src = r#"{
            "label": "bad", "n": 2, "d": 1,
            "factors": [[[0,0],[0,0]]]
        }"#;
        assert!(matches!(parse_form_str(src), Err(Error::ZeroFactor(0))));
    }

    #[test]
    fn wrong_arity_is_an_error() {
        let src = r#"{
            "label": "bad", "n": 2, "d": 2,
            "factors": [[[1,0],[0,0]]]
        }"#;
        assert!(parse_form_str(src).is_err());
    }

    #[test]
    fn expected_mismatch_is_an_error() {
        let src = r#"{
            "label": "bad", "n": 2, "d": 2,
            "factors": [[[1,0],[0,0]],[[0,0],[1,0]]],
            "expected_integer_form": {"2,0": "1"}
        }"#;
        assert!(matches!(
            parse_form_str(src),
            Err(Error::ExpectedFormMismatch(_))
        ));
    }

    #[test]
    fn malformed_json_is_an_error() {
        assert!(matches!(parse_form_str("{"), Err(Error::Parse(_))));
    }
}
