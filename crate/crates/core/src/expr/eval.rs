//! Numeric evaluation over complex points and sampling-based equality.
//!
//! Evaluation is double-precision complex arithmetic on the principal
//! branch throughout: `log` has imaginary part in (-pi, pi], powers with
//! non-integer exponent are `exp(w * log z)`, and integer exponents use
//! exact repeated squaring so they stay branch-free. Zero raised to `w`
//! is zero when `Re(w) > 0` and an error otherwise.

use super::{Expr, ExprRef};
use num::ToPrimitive;
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::Arc;
use thiserror::Error;

/// Numeric values for variables and parameters at one sample point.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Assignment {
    bindings: HashMap<String, Complex64>,
}

impl Assignment {
    /// Empty assignment.
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder-style binding.
    pub fn bind(mut self, name: &str, value: Complex64) -> Self {
        self.bindings.insert(name.to_owned(), value);
        self
    }

    /// In-place binding.
    pub fn set(&mut self, name: &str, value: Complex64) {
        self.bindings.insert(name.to_owned(), value);
    }

    /// Bound value for `name`, if any.
    pub fn get(&self, name: &str) -> Option<Complex64> {
        self.bindings.get(name).copied()
    }

    /// Iterates over bound names and values in unspecified order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, Complex64)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Merges `other` over `self`, with `other` winning on conflicts.
    pub fn overlaid(&self, other: &Assignment) -> Assignment {
        let mut merged = self.clone();
        for (name, value) in other.iter() {
            merged.set(name, value);
        }
        merged
    }
}

/// Evaluation failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("symbol {0:?} has no bound value")]
    UnboundSymbol(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero raised to a power with non-positive real part")]
    ZeroToNonPositivePower,
    #[error("logarithm of zero")]
    LogOfZero,
    #[error("evaluation produced a non-finite value")]
    NonFinite,
}

/// Evaluates `e` at the given point.
pub fn evaluate(e: &ExprRef, at: &Assignment) -> Result<Complex64, EvalError> {
    let mut ctx = EvalContext { at, memo: HashMap::new(), keys: Vec::new() };
    ctx.eval(e)
}

struct EvalContext<'a> {
    at: &'a Assignment,
    memo: HashMap<usize, Result<Complex64, EvalError>>,
    keys: Vec<ExprRef>,
}

impl EvalContext<'_> {
    fn eval(&mut self, e: &ExprRef) -> Result<Complex64, EvalError> {
        let key = Arc::as_ptr(e) as usize;
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let result = self.eval_uncached(e).and_then(finite);
        self.keys.push(e.clone());
        self.memo.insert(key, result.clone());
        result
    }

    fn eval_uncached(&mut self, e: &ExprRef) -> Result<Complex64, EvalError> {
        match &**e {
            Expr::Rat(q) => Ok(Complex64::new(rat_to_f64(q), 0.0)),
            Expr::Cplx(re, im) => Ok(Complex64::new(rat_to_f64(re), rat_to_f64(im))),
            Expr::Var(name) | Expr::Param(name) => self
                .at
                .get(name)
                .ok_or_else(|| EvalError::UnboundSymbol(name.clone())),
            Expr::Sum(terms) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in terms {
                    acc += self.eval(t)?;
                }
                Ok(acc)
            }
            Expr::Prod(factors) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for f in factors {
                    acc *= self.eval(f)?;
                }
                Ok(acc)
            }
            Expr::Pow(base, exponent) => {
                let b = self.eval(base)?;
                // An exact integer exponent evaluates by repeated
                // squaring, which is branch-free and exact for negative
                // bases; everything else takes the principal branch.
                if let Some(n) = exponent.as_integer() {
                    if b.norm_sqr() == 0.0 {
                        return match n {
                            1.. => Ok(Complex64::new(0.0, 0.0)),
                            0 => Err(EvalError::ZeroToNonPositivePower),
                            _ => Err(EvalError::DivisionByZero),
                        };
                    }
                    if let Ok(small) = i32::try_from(n) {
                        return Ok(b.powi(small));
                    }
                }
                let w = self.eval(exponent)?;
                if b.norm_sqr() == 0.0 {
                    return if w.re > 0.0 {
                        Ok(Complex64::new(0.0, 0.0))
                    } else {
                        Err(EvalError::ZeroToNonPositivePower)
                    };
                }
                Ok(b.powc(w))
            }
            Expr::Exp(arg) => Ok(self.eval(arg)?.exp()),
            Expr::Log(arg) => {
                let u = self.eval(arg)?;
                if u.norm_sqr() == 0.0 {
                    return Err(EvalError::LogOfZero);
                }
                Ok(u.ln())
            }
        }
    }
}

fn finite(z: Complex64) -> Result<Complex64, EvalError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(EvalError::NonFinite)
    }
}

fn rat_to_f64(q: &num::BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Residual of one comparison point.
#[derive(Debug, Clone)]
pub struct PointResidual {
    /// Index into the supplied point list.
    pub index: usize,
    /// `|a - b|` at the point.
    pub absolute: f64,
    /// `|a - b| / (1 + max(|a|, |b|))`.
    pub relative: f64,
    /// True if the relative residual is within tolerance.
    pub within: bool,
}

/// Outcome of a sampling-based equality check.
#[derive(Debug, Clone)]
pub struct EqualityCheck {
    /// True when the check is conclusive and every evaluated point agreed.
    pub equal: bool,
    /// True when at least [`MIN_EQUALITY_POINTS`] points evaluated cleanly.
    pub conclusive: bool,
    /// Per-point residuals for the points that evaluated.
    pub residuals: Vec<PointResidual>,
    /// Points skipped because either side failed to evaluate there.
    pub skipped: usize,
}

/// Minimum number of cleanly evaluated points for a conclusive check.
pub const MIN_EQUALITY_POINTS: usize = 3;

/// Compares two expressions numerically at the given points.
///
/// Points where either side fails to evaluate (a pole or branch point of
/// one of the expressions) are skipped. The check is conclusive only when
/// at least [`MIN_EQUALITY_POINTS`] points evaluated; `equal` is true when
/// it is conclusive and every relative residual stayed within `tol`.
pub fn equal_numeric(
    a: &ExprRef,
    b: &ExprRef,
    points: &[Assignment],
    tol: f64,
) -> EqualityCheck {
    let mut residuals = Vec::new();
    let mut skipped = 0usize;
    for (index, point) in points.iter().enumerate() {
        let (va, vb) = match (evaluate(a, point), evaluate(b, point)) {
            (Ok(va), Ok(vb)) => (va, vb),
            _ => {
                skipped += 1;
                continue;
            }
        };
        let absolute = (va - vb).norm();
        let scale = va.norm().max(vb.norm());
        let relative = absolute / (1.0 + scale);
        residuals.push(PointResidual { index, absolute, relative, within: relative <= tol });
    }
    let conclusive = residuals.len() >= MIN_EQUALITY_POINTS;
    let equal = conclusive && residuals.iter().all(|r| r.within);
    EqualityCheck { equal, conclusive, residuals, skipped }
}
