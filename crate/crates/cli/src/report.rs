//! Shared output helpers: complex formatting, sample statistics, JSON
//! building blocks.

use num_complex::Complex64;
use serde_json::{json, Value};

/// Formats a real number with the shortest representation that
/// round-trips, in scientific notation outside a readable range.
pub fn fmt_real(x: f64) -> String {
    let magnitude = x.abs();
    if x != 0.0 && (magnitude < 1e-4 || magnitude >= 1e17) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Formats a complex number as `a`, `bi`, or `a+bi` / `a-bi`.
pub fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        fmt_real(z.re)
    } else if z.re == 0.0 {
        format!("{}i", fmt_real(z.im))
    } else if z.im < 0.0 {
        format!("{}-{}i", fmt_real(z.re), fmt_real(-z.im))
    } else {
        format!("{}+{}i", fmt_real(z.re), fmt_real(z.im))
    }
}

/// JSON encoding of a complex number as a `[re, im]` pair.
pub fn json_complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// JSON encoding of an optional complex value; `null` when undefined.
pub fn json_complex_opt(z: Option<Complex64>) -> Value {
    match z {
        Some(z) => json_complex(z),
        None => Value::Null,
    }
}

/// Mean and worst absolute deviation from the mean of a sample set.
pub struct MeanDev {
    pub mean: Complex64,
    pub max_dev: f64,
}

/// Computes [`MeanDev`]; `None` on an empty slice.
pub fn mean_dev(values: &[Complex64]) -> Option<MeanDev> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, v| acc + v)
        / n;
    let max_dev = values
        .iter()
        .map(|v| (v - mean).norm())
        .fold(0.0, f64::max);
    Some(MeanDev { mean, max_dev })
}

/// True when `got` equals `expected` within relative tolerance `tol`
/// (absolute near zero).
pub fn close(got: Complex64, expected: Complex64, tol: f64) -> bool {
    (got - expected).norm() <= tol * (1.0 + expected.norm())
}

/// Prints a JSON document to stdout with a trailing newline.
pub fn emit_json(doc: &Value) {
    println!("{}", serde_json::to_string_pretty(doc).expect("serializable"));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_formatting_covers_the_sign_cases() {
        assert_eq!(fmt_complex(Complex64::new(1.5, 0.0)), "1.5");
        assert_eq!(fmt_complex(Complex64::new(0.0, -2.0)), "-2i");
        assert_eq!(fmt_complex(Complex64::new(1.0, 2.0)), "1+2i");
        assert_eq!(fmt_complex(Complex64::new(-1.0, -0.5)), "-1-0.5i");
    }

    #[test]
    fn mean_and_deviation_are_exact_on_constant_samples() {
        let vals = vec![Complex64::new(4.0, 0.0); 5];
        let md = mean_dev(&vals).unwrap();
        assert_eq!(md.mean, Complex64::new(4.0, 0.0));
        assert_eq!(md.max_dev, 0.0);
        assert!(mean_dev(&[]).is_none());
    }
}
