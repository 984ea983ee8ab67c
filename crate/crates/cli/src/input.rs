//! Command-line input handling: equations, parameter bindings, points.

use num_complex::Complex64;
use ode_invariants::expr::{evaluate, parse, Assignment, ExprRef, ParseError, SymbolTable};

/// Errors surfaced to the user, tagged with the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed input: unparsable expression, bad binding, bad point.
    Input(String),
    /// The computation could not produce a verdict (singular samples,
    /// ambiguous zero tests, evaluation failures at every point).
    Numeric(String),
    /// A requested check ran and failed; details are already on stdout.
    CheckFailed,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError::Input(message.into())
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        CliError::Numeric(message.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed => 1,
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

/// An equation right-hand side plus the parameter names discovered in it.
pub struct ParsedEquation {
    pub f: ExprRef,
    pub params: Vec<String>,
}

/// Upper bound on distinct parameters in one expression; past this the
/// input is almost certainly a typo storm, not an equation.
const MAX_PARAMS: usize = 32;

/// Parses `src` over the variables `x, y, p`, treating every other
/// identifier as a parameter.
pub fn parse_equation(src: &str) -> Result<ParsedEquation, CliError> {
    let mut params: Vec<String> = Vec::new();
    loop {
        let table = SymbolTable::xyp().with_params(params.iter().cloned());
        match parse(src, &table) {
            Ok(f) => {
                params.sort();
                return Ok(ParsedEquation { f, params });
            }
            Err(ParseError::UnknownSymbol { name, .. })
                if params.len() < MAX_PARAMS && !params.contains(&name) =>
            {
                params.push(name);
            }
            Err(e) => return Err(CliError::input(format!("cannot parse {src:?}: {e}"))),
        }
    }
}

/// Rewrites shorthand imaginary literals like `4i` or `2.5i` to the
/// explicit products the expression grammar expects.
fn insert_imaginary_products(src: &str) -> String {
    let bytes = src.as_bytes();
    let mut out = String::with_capacity(src.len() + 4);
    for (k, &b) in bytes.iter().enumerate() {
        let after_number = k > 0 && (bytes[k - 1].is_ascii_digit() || bytes[k - 1] == b'.');
        let ends_token = bytes
            .get(k + 1)
            .is_none_or(|n| !n.is_ascii_alphanumeric() && *n != b'_');
        if b == b'i' && after_number && ends_token {
            out.push('*');
        }
        out.push(b as char);
    }
    out
}

/// Parses a constant expression such as `2`, `-1/3`, `4i`, or `1+2i`.
pub fn parse_constant(src: &str) -> Result<Complex64, CliError> {
    let rewritten = insert_imaginary_products(src);
    let e = parse(&rewritten, &SymbolTable::new())
        .map_err(|e| CliError::input(format!("cannot parse constant {src:?}: {e}")))?;
    let v = evaluate(&e, &Assignment::new())
        .map_err(|e| CliError::input(format!("cannot evaluate constant {src:?}: {e}")))?;
    if !v.is_finite() {
        return Err(CliError::input(format!("constant {src:?} is not finite")));
    }
    Ok(v)
}

/// Parses one `--param NAME=VALUE` binding.
pub fn parse_param_binding(spec: &str) -> Result<(String, Complex64), CliError> {
    let (name, value) = spec
        .split_once('=')
        .ok_or_else(|| CliError::input(format!("expected NAME=VALUE, got {spec:?}")))?;
    let name = name.trim();
    let valid = !name.is_empty()
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !name.starts_with(|c: char| c.is_ascii_digit());
    if !valid {
        return Err(CliError::input(format!("invalid parameter name {name:?}")));
    }
    Ok((name.to_string(), parse_constant(value.trim())?))
}

/// Parses an `--at x,y,p` point specification.
pub fn parse_point(spec: &str) -> Result<[Complex64; 3], CliError> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::input(format!(
            "expected three comma-separated coordinates, got {spec:?}"
        )));
    }
    Ok([
        parse_constant(parts[0].trim())?,
        parse_constant(parts[1].trim())?,
        parse_constant(parts[2].trim())?,
    ])
}

/// Builds an assignment from repeated `--param` flags.
pub fn parse_bindings(specs: &[String]) -> Result<Vec<(String, Complex64)>, CliError> {
    let mut out: Vec<(String, Complex64)> = Vec::new();
    for spec in specs {
        let (name, value) = parse_param_binding(spec)?;
        if out.iter().any(|(n, _)| *n == name) {
            return Err(CliError::input(format!("parameter {name:?} bound twice")));
        }
        out.push((name, value));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Parameters of `e` (free symbols that are not `x, y, p`) left unbound
/// by `bound`.
pub fn unbound_params(e: &ExprRef, bound: &Assignment) -> Vec<String> {
    let vars = e.free_vars();
    e.free_symbols()
        .into_iter()
        .filter(|s| !vars.contains(s) && bound.get(s).is_none())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discovers_parameters_left_to_right() {
        let eq = parse_equation("a*exp(-p) + b*x").unwrap();
        assert_eq!(eq.params, vec!["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn rejects_malformed_expressions() {
        assert!(matches!(parse_equation("c*exp("), Err(CliError::Input(_))));
    }

    #[test]
    fn parses_complex_bindings() {
        let (name, v) = parse_param_binding("c=4i").unwrap();
        assert_eq!(name, "c");
        assert_eq!(v, Complex64::new(0.0, 4.0));
        let (_, w) = parse_param_binding("c = 1+2i").unwrap();
        assert_eq!(w, Complex64::new(1.0, 2.0));
    }

    #[test]
    fn rejects_bad_bindings() {
        assert!(parse_param_binding("c").is_err());
        assert!(parse_param_binding("2c=1").is_err());
        assert!(parse_param_binding("c=x+1").is_err());
    }

    #[test]
    fn parses_points() {
        let p = parse_point("0, 1, 1+i").unwrap();
        assert_eq!(p[0], Complex64::new(0.0, 0.0));
        assert_eq!(p[2], Complex64::new(1.0, 1.0));
        assert!(parse_point("1,2").is_err());
    }
}
