use super::*;
use crate::sample::Sampler;
use num_complex::Complex64;
use proptest::prelude::*;
use std::collections::HashMap;

fn syms() -> SymbolTable {
    SymbolTable::xyp().with_params(["c"])
}

fn p(src: &str) -> ExprRef {
    parse(src, &syms()).unwrap()
}

#[test]
fn parses_standard_precedence() {
    // Unary minus binds looser than '^'.
    assert_eq!(p("-x^2"), p("-(x^2)"));
    assert_ne!(p("-x^2"), p("(-x)^2"));
    // '^' is right-associative.
    assert_eq!(p("2^3^2"), Expr::int(512));
    // Subtraction chains left.
    assert_eq!(p("7 - 3 - 2"), Expr::int(2));
    // Division chains left.
    assert_eq!(p("8/2/2"), Expr::int(2));
}

#[test]
fn parses_decimals_exactly() {
    assert_eq!(p("0.125"), Expr::rat(1, 8));
    assert_eq!(p("2.5e-1"), Expr::rat(1, 4));
    assert_eq!(p("1e3"), Expr::int(1000));
}

#[test]
fn parses_imaginary_unit() {
    assert_eq!(p("i^2"), Expr::int(-1));
    assert_eq!(p("i^4"), Expr::int(1));
    assert_eq!(p("(2 + 3*i)*(2 - 3*i)"), Expr::int(13));
}

#[test]
fn rejects_undeclared_symbols() {
    let err = parse("x + q", &syms()).unwrap_err();
    assert!(matches!(err, ParseError::UnknownSymbol { ref name, .. } if name == "q"));
}

#[test]
fn rejects_symbol_used_as_function() {
    let err = parse("x(y)", &syms()).unwrap_err();
    assert!(matches!(err, ParseError::NotAFunction { ref name, .. } if name == "x"));
}

#[test]
fn rejects_trailing_input() {
    assert!(parse("x + ", &syms()).is_err());
    assert!(parse("x y", &syms()).is_err());
    assert!(parse("(x", &syms()).is_err());
}

#[test]
fn normalize_collects_like_terms() {
    assert_eq!(p("x + x + y - 2*x"), Expr::var("y"));
    assert_eq!(p("3*x*y - x*y"), p("2*x*y"));
    assert_eq!(p("x - x"), Expr::int(0));
}

#[test]
fn normalize_collects_like_factors() {
    assert_eq!(p("x^2 * x^(1/2)"), p("x^(5/2)"));
    assert_eq!(p("x * x"), p("x^2"));
    assert_eq!(p("x^3 / x"), p("x^2"));
    assert_eq!(p("exp(x) * exp(y)"), p("exp(x + y)"));
}

#[test]
fn normalize_folds_constants_exactly() {
    assert_eq!(p("2/3 + 1/6"), Expr::rat(5, 6));
    assert_eq!(p("(1/3)^3"), Expr::rat(1, 27));
    assert_eq!(p("5^10"), Expr::int(9765625));
    assert_eq!(p("2*x*3"), p("6*x"));
}

#[test]
fn normalize_keeps_factored_forms() {
    // No distribution: a product of sums stays a product.
    let e = p("(x + y) * (x - y)");
    assert!(matches!(&*e, Expr::Prod(_)), "expected a product, got {e}");
}

#[test]
fn normalize_structural_power_rules_need_integer_exponents() {
    // (x^2)^3 = x^6 holds on every branch.
    assert_eq!(p("(x^2)^3"), p("x^6"));
    // (x^2)^(1/2) is not x: it differs on half the plane.
    let e = p("(x^2)^(1/2)");
    assert!(matches!(&*e, Expr::Pow(_, _)), "expected an unreduced power, got {e}");
}

#[test]
fn expand_distributes() {
    assert_eq!(expand(&p("(x + y)^2")), p("x^2 + 2*x*y + y^2"));
    assert_eq!(expand(&p("(x + y)*(x - y)")), p("x^2 - y^2"));
    assert_eq!(expand(&p("2*(x + y)*(x + 1)")), p("2*x^2 + 2*x + 2*x*y + 2*y"));
    assert_eq!(
        expand(&Expr::sub(p("(x + y)^3"), p("x^3 + 3*x^2*y + 3*x*y^2 + y^3"))),
        Expr::int(0)
    );
}

#[test]
fn differentiates_polynomials() {
    assert_eq!(differentiate(&p("x^3"), "x"), p("3*x^2"));
    assert_eq!(differentiate(&p("6*y*p - 4*y^3"), "y"), p("6*p - 12*y^2"));
    assert_eq!(differentiate(&p("x*y"), "p"), Expr::int(0));
    // Parameters are constants.
    assert_eq!(differentiate(&p("c*x"), "x"), Expr::param("c"));
}

#[test]
fn differentiates_transcendentals() {
    assert_eq!(differentiate(&p("exp(2*x)"), "x"), p("2*exp(2*x)"));
    assert_eq!(differentiate(&p("log(x)"), "x"), p("1/x"));
    assert_eq!(differentiate(&p("c*exp(-p)"), "p"), p("-c*exp(-p)"));
}

#[test]
fn differentiates_general_powers() {
    // d/dx x^x = x^x (log x + 1), checked numerically.
    let e = p("x^x");
    let d = differentiate(&e, "x");
    let expected = p("x^x * (log(x) + 1)");
    let mut sampler = Sampler::from_seed(3);
    let points = sampler.positive_real_assignments(&["x"], 6);
    let check = equal_numeric(&d, &expected, &points, 1e-9);
    assert!(check.equal, "residuals: {:?}", check.residuals);
}

#[test]
fn substitution_is_simultaneous() {
    let mut swap = HashMap::new();
    swap.insert("x".to_owned(), Expr::var("y"));
    swap.insert("y".to_owned(), Expr::var("x"));
    assert_eq!(substitute(&p("x^2 + y"), &swap), p("y^2 + x"));
}

#[test]
fn evaluates_on_principal_branch() {
    let at = Assignment::new();
    let tol = 1e-12;

    let log_neg = evaluate(&Expr::log(Expr::int(-1)), &at).unwrap();
    assert!((log_neg - Complex64::new(0.0, std::f64::consts::PI)).norm() < tol);

    let sqrt_neg = evaluate(&p("(-1)^(1/2)"), &at).unwrap();
    assert!((sqrt_neg - Complex64::new(0.0, 1.0)).norm() < tol);

    // Integer powers of negative bases stay real: no branch excursion.
    let cube = evaluate(&p("(-2)^3"), &at).unwrap();
    assert!((cube - Complex64::new(-8.0, 0.0)).norm() < tol);
}

#[test]
fn evaluation_error_cases() {
    let at = Assignment::new();
    assert_eq!(
        evaluate(&Expr::pow(Expr::int(0), Expr::int(0)), &at),
        Err(EvalError::ZeroToNonPositivePower)
    );
    assert_eq!(
        evaluate(&Expr::ipow(Expr::int(0), -1), &at),
        Err(EvalError::DivisionByZero)
    );
    assert_eq!(evaluate(&Expr::log(Expr::int(0)), &at), Err(EvalError::LogOfZero));
    assert_eq!(
        evaluate(&Expr::var("x"), &at),
        Err(EvalError::UnboundSymbol("x".to_owned()))
    );
    // 0^w with positive real part is 0.
    assert_eq!(
        evaluate(&p("0^(3/2)"), &at),
        Ok(Complex64::new(0.0, 0.0))
    );
}

#[test]
fn equality_check_needs_enough_points() {
    let mut sampler = Sampler::from_seed(5);
    let points = sampler.annulus_assignments(&["x"], 2);
    let check = equal_numeric(&p("x"), &p("x"), &points, 1e-9);
    assert!(!check.conclusive);
    assert!(!check.equal);
}

#[test]
fn display_and_print_agree() {
    let e = p("6*y*p - 4*y^3 + c*(p - y^2)^(3/2)");
    assert_eq!(format!("{e}"), print(&e));
}

/// True when evaluating `e` at `at` feeds a log or a non-integer power
/// an argument within float noise of the negative real axis. Exact
/// constant folding and float evaluation can land on opposite sides of
/// that branch cut, so value-comparison properties skip such points.
fn near_branch_cut(e: &ExprRef, at: &Assignment) -> bool {
    fn on_cut(v: Complex64) -> bool {
        v.re < 0.0 && v.im.abs() <= 1e-9 * v.norm()
    }
    fn near_integer(v: Complex64) -> bool {
        v.im.abs() <= 1e-12 && (v.re - v.re.round()).abs() <= 1e-12
    }
    let risky_base = match &**e {
        Expr::Log(arg) => Some(arg),
        Expr::Pow(base, exponent) => match evaluate(exponent, at) {
            Ok(x) if !near_integer(x) => Some(base),
            _ => None,
        },
        _ => None,
    };
    if let Some(arg) = risky_base {
        if let Ok(v) = evaluate(arg, at) {
            if on_cut(v) {
                return true;
            }
        }
    }
    match &**e {
        Expr::Sum(children) | Expr::Prod(children) => {
            children.iter().any(|c| near_branch_cut(c, at))
        }
        Expr::Pow(a, b) => near_branch_cut(a, at) || near_branch_cut(b, at),
        Expr::Exp(u) | Expr::Log(u) => near_branch_cut(u, at),
        _ => false,
    }
}

/// Leafy strategy over the x, y, p, c alphabet with small exact constants.
fn arb_expr() -> impl Strategy<Value = ExprRef> {
    let leaf = prop_oneof![
        (-4i64..=4).prop_map(Expr::int),
        ((-6i64..=6), (1i64..=4)).prop_map(|(n, d)| Expr::rat(n, d)),
        Just(Expr::var("x")),
        Just(Expr::var("y")),
        Just(Expr::var("p")),
        Just(Expr::param("c")),
        Just(Expr::imag_unit()),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Expr::sum),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Expr::prod),
            (inner.clone(), -3i64..=3).prop_map(|(b, n)| Expr::ipow(b, n)),
            (inner.clone(), prop_oneof![Just((1i64, 2i64)), Just((3, 2)), Just((-1, 2))])
                .prop_map(|(b, (n, d))| Expr::qpow(b, n, d)),
            inner.clone().prop_map(Expr::exp),
            inner.prop_map(Expr::log),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn normalize_is_idempotent(e in arb_expr()) {
        let once = normalize(&e);
        let twice = normalize(&once);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn normalize_preserves_values(e in arb_expr()) {
        let n = normalize(&e);
        let mut sampler = Sampler::from_seed(17);
        for at in sampler.annulus_assignments(&["x", "y", "p", "c"], 6) {
            if near_branch_cut(&e, &at) || near_branch_cut(&n, &at) {
                continue;
            }
            let (a, b) = match (evaluate(&e, &at), evaluate(&n, &at)) {
                (Ok(a), Ok(b)) => (a, b),
                // Normalization may enlarge the domain (dropped zero
                // terms); only the common domain must agree.
                _ => continue,
            };
            let scale = a.norm().max(b.norm());
            if scale > 1e12 {
                continue;
            }
            prop_assert!(
                (a - b).norm() <= 1e-9 * (1.0 + scale),
                "raw {} vs normalized {} at {:?}", a, b, at
            );
        }
    }

    #[test]
    fn expand_preserves_values(e in arb_expr()) {
        let x = expand(&e);
        let mut sampler = Sampler::from_seed(19);
        for at in sampler.annulus_assignments(&["x", "y", "p", "c"], 6) {
            if near_branch_cut(&e, &at) || near_branch_cut(&x, &at) {
                continue;
            }
            let (a, b) = match (evaluate(&e, &at), evaluate(&x, &at)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            let scale = a.norm().max(b.norm());
            if scale > 1e12 {
                continue;
            }
            prop_assert!(
                (a - b).norm() <= 1e-9 * (1.0 + scale),
                "raw {} vs expanded {} at {:?}", a, b, at
            );
        }
    }

    #[test]
    fn print_parse_round_trip(e in arb_expr()) {
        // The round trip is exact on normal forms. Printing a raw tree
        // can group factors into a denominator that hides a zero (such
        // as log(1)), and zero-base powers normalize asymmetrically in
        // the exponent sign, so only normalized output is contractual.
        let n = normalize(&e);
        let text = print(&n);
        let back = parse(&text, &syms())
            .unwrap_or_else(|err| panic!("printed {text:?} failed to parse: {err}"));
        prop_assert_eq!(back, n, "printed as {}", text);
    }

    #[test]
    fn differentiation_is_linear(a in arb_expr(), b in arb_expr()) {
        let lhs = differentiate(&Expr::sum(vec![a.clone(), b.clone()]), "x");
        let rhs = normalize(&Expr::sum(vec![
            differentiate(&a, "x"),
            differentiate(&b, "x"),
        ]));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_matches_finite_differences(e in arb_expr()) {
        let d = differentiate(&e, "x");
        let h = 1e-6;
        let mut sampler = Sampler::from_seed(23);
        for at in sampler.positive_real_assignments(&["x", "y", "p", "c"], 6) {
            // On the cut the centered difference and the principal-branch
            // derivative legitimately disagree; signed zeros decide the
            // side, and different evaluation paths disagree about them.
            if near_branch_cut(&e, &at) || near_branch_cut(&d, &at) {
                continue;
            }
            let x0 = at.get("x").unwrap();
            let hi = at.clone().bind("x", x0 + h);
            let lo = at.clone().bind("x", x0 - h);
            let (fh, fl, dv) = match (evaluate(&e, &hi), evaluate(&e, &lo), evaluate(&d, &at)) {
                (Ok(fh), Ok(fl), Ok(dv)) => (fh, fl, dv),
                _ => continue,
            };
            if fh.norm() > 1e2 || fl.norm() > 1e2 || dv.norm() > 1e4 {
                continue;
            }
            let fd = (fh - fl) / Complex64::new(2.0 * h, 0.0);
            prop_assert!(
                (fd - dv).norm() <= 1e-4 * (1.0 + dv.norm()),
                "finite difference {} vs derivative {} for {}", fd, dv, e
            );
        }
    }
}
