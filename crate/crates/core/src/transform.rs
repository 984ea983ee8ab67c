//! Point transformations of the plane and their action on second-order
//! equations.
//!
//! A pair `xb = phi(x, y)`, `yb = psi(x, y)` carries `y'' = f(x, y, p)`
//! to a new equation `yb'' = fb(xb, yb, pb)`. The slope transforms
//! through the chain rule,
//!
//! ```text
//! pb = (psi_x + psi_y p) / (phi_x + phi_y p)
//! ```
//!
//! and the new right-hand side is the total derivative of that ratio
//! divided by `phi_x + phi_y p`, rewritten in the barred coordinates.
//! [`PointTransformPair::pushforward`] performs the rewrite symbolically;
//! [`check_invariance`] then confirms at sample points that the rational
//! invariants of the old and new equations agree at matched points, which
//! is what makes them invariants rather than mere expressions.

use crate::expr::{
    differentiate, evaluate, normalize, parse, substitute, Assignment,
    EvalError, Expr, ExprRef, SymbolTable,
};
use crate::invariants::{
    parameter_names, rational_invariants, RationalInvariants,
    MIN_DECISION_POINTS,
};
use crate::jet::{JetContext, JetError};
use crate::sample::Sampler;
use std::collections::HashMap;
use thiserror::Error;

/// Sample points used to validate a transformation pair.
const VALIDATION_POINTS: usize = 10;

/// Seed for the validation sampler; fixed so construction is
/// deterministic.
const VALIDATION_SEED: u64 = 17;

/// Temporary name standing for the barred slope during the rewrite.
/// Parsed identifiers are alphanumeric, so this cannot collide with a
/// user symbol.
const SLOPE_MARKER: &str = "p#bar";

/// Failure while building or applying a point transformation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("phi and psi must depend on x and y only, not on the slope p")]
    SlopeDependent,
    #[error(
        "claimed inverse fails to round-trip {coordinate}: relative residual {residual:.3e}"
    )]
    RoundTripFailed { coordinate: &'static str, residual: f64 },
    #[error("transformation Jacobian vanishes at a validation point")]
    SingularJacobian,
    #[error("only {got} of the required {needed} sample points evaluated cleanly")]
    NotEnoughValidPoints { needed: usize, got: usize },
}

/// An invertible point transformation, with its inverse supplied
/// explicitly and checked numerically at construction.
///
/// `phi` and `psi` are expressions in `x, y` for the barred coordinates;
/// `phi_inv` and `psi_inv` are expressions in `x, y` where those names
/// stand for the barred coordinates, recovering the original ones.
#[derive(Debug, Clone)]
pub struct PointTransformPair {
    phi: ExprRef,
    psi: ExprRef,
    phi_inv: ExprRef,
    psi_inv: ExprRef,
}

impl PointTransformPair {
    /// Validates and builds the pair.
    ///
    /// `params` binds any parameters appearing in the four expressions.
    /// Validation draws points with `x, y` in the complex box, rejects the
    /// pair if the Jacobian `phi_x psi_y - phi_y psi_x` vanishes at any
    /// point, and requires the claimed inverses to reproduce `x` and `y`
    /// to within 1e-9 at every point that evaluates cleanly.
    pub fn new(
        phi: ExprRef,
        psi: ExprRef,
        phi_inv: ExprRef,
        psi_inv: ExprRef,
        params: &Assignment,
    ) -> Result<Self, TransformError> {
        let pair = PointTransformPair {
            phi: normalize(&phi),
            psi: normalize(&psi),
            phi_inv: normalize(&phi_inv),
            psi_inv: normalize(&psi_inv),
        };
        for e in [&pair.phi, &pair.psi, &pair.phi_inv, &pair.psi_inv] {
            if e.free_vars().contains("p") {
                return Err(TransformError::SlopeDependent);
            }
        }

        let phi_x = differentiate(&pair.phi, "x");
        let phi_y = differentiate(&pair.phi, "y");
        let psi_x = differentiate(&pair.psi, "x");
        let psi_y = differentiate(&pair.psi, "y");

        let mut sampler = Sampler::from_seed(VALIDATION_SEED);
        let mut validated = 0usize;
        for _ in 0..VALIDATION_POINTS {
            let at = params.overlaid(&sampler.box_assignment(&["x", "y"]));
            let parts = [&phi_x, &psi_y, &phi_y, &psi_x]
                .map(|e| evaluate(e, &at));
            let [px, qy, py, qx] = match parts {
                [Ok(a), Ok(b), Ok(c), Ok(d)] => [a, b, c, d],
                _ => continue,
            };
            let det = px * qy - py * qx;
            let scale = px.norm() * qy.norm() + py.norm() * qx.norm();
            if det.norm() <= 1e-9 * (1.0 + scale) {
                return Err(TransformError::SingularJacobian);
            }

            let (bx, by) = match (evaluate(&pair.phi, &at), evaluate(&pair.psi, &at)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            let mut barred = at.clone();
            barred.set("x", bx);
            barred.set("y", by);
            let (x_back, y_back) = match (
                evaluate(&pair.phi_inv, &barred),
                evaluate(&pair.psi_inv, &barred),
            ) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            let xv = at.get("x").unwrap();
            let yv = at.get("y").unwrap();
            let res_x = (x_back - xv).norm() / (1.0 + xv.norm());
            if res_x > 1e-9 {
                return Err(TransformError::RoundTripFailed {
                    coordinate: "x",
                    residual: res_x,
                });
            }
            let res_y = (y_back - yv).norm() / (1.0 + yv.norm());
            if res_y > 1e-9 {
                return Err(TransformError::RoundTripFailed {
                    coordinate: "y",
                    residual: res_y,
                });
            }
            validated += 1;
        }
        if validated < MIN_DECISION_POINTS {
            return Err(TransformError::NotEnoughValidPoints {
                needed: MIN_DECISION_POINTS,
                got: validated,
            });
        }
        Ok(pair)
    }

    /// The barred abscissa `phi(x, y)`.
    pub fn phi(&self) -> &ExprRef {
        &self.phi
    }

    /// The barred ordinate `psi(x, y)`.
    pub fn psi(&self) -> &ExprRef {
        &self.psi
    }

    /// Inverse of `phi`, in barred coordinates named `x, y`.
    pub fn phi_inv(&self) -> &ExprRef {
        &self.phi_inv
    }

    /// Inverse of `psi`, in barred coordinates named `x, y`.
    pub fn psi_inv(&self) -> &ExprRef {
        &self.psi_inv
    }

    /// The transformed slope `(psi_x + psi_y p) / (phi_x + phi_y p)` as a
    /// function of the original `x, y, p`.
    pub fn slope_map(&self) -> ExprRef {
        let (phi_x, phi_y) = self.phi_partials();
        let (psi_x, psi_y) = self.psi_partials();
        normalize(&Expr::div(
            slope_linear(&psi_x, &psi_y),
            slope_linear(&phi_x, &phi_y),
        ))
    }

    /// Maps an assignment of the original coordinates to the matched
    /// barred assignment: `x, y` go through `phi, psi` and `p` through
    /// the slope map. Other bindings (parameters) are carried over.
    pub fn matched_point(&self, at: &Assignment) -> Result<Assignment, EvalError> {
        let bx = evaluate(&self.phi, at)?;
        let by = evaluate(&self.psi, at)?;
        let bp = evaluate(&self.slope_map(), at)?;
        let mut out = at.clone();
        out.set("x", bx);
        out.set("y", by);
        out.set("p", bp);
        Ok(out)
    }

    /// Right-hand side of the transformed equation, as an expression in
    /// `x, y, p` now meaning the barred coordinates.
    ///
    /// The construction: differentiate the slope map along solutions,
    /// divide by `phi_x + phi_y p`, solve the slope relation for the old
    /// `p`, and substitute the inverse maps for the old `x, y`.
    pub fn pushforward(&self, ctx: &JetContext) -> ExprRef {
        let (phi_x, phi_y) = self.phi_partials();
        let (psi_x, psi_y) = self.psi_partials();
        let q = self.slope_map();
        let g = normalize(&Expr::div(
            ctx.dot_dx(&q),
            slope_linear(&phi_x, &phi_y),
        ));

        // Old slope in terms of x, y and the barred slope: invert the
        // Moebius relation q(p) = pb.
        let pb = Expr::var(SLOPE_MARKER);
        let old_p = Expr::div(
            Expr::sub(psi_x, Expr::prod(vec![pb.clone(), phi_x])),
            Expr::sub(Expr::prod(vec![pb, phi_y]), psi_y),
        );
        let mut slope_subst: HashMap<String, ExprRef> = HashMap::new();
        slope_subst.insert("p".to_owned(), old_p);
        let in_old_xy = substitute(&g, &slope_subst);

        let mut base_subst: HashMap<String, ExprRef> = HashMap::new();
        base_subst.insert("x".to_owned(), self.phi_inv.clone());
        base_subst.insert("y".to_owned(), self.psi_inv.clone());
        base_subst.insert(SLOPE_MARKER.to_owned(), Expr::var("p"));
        substitute(&in_old_xy, &base_subst)
    }

    fn phi_partials(&self) -> (ExprRef, ExprRef) {
        (differentiate(&self.phi, "x"), differentiate(&self.phi, "y"))
    }

    fn psi_partials(&self) -> (ExprRef, ExprRef) {
        (differentiate(&self.psi, "x"), differentiate(&self.psi, "y"))
    }
}

/// `u + v p` for the slope map numerator and denominator.
fn slope_linear(u: &ExprRef, v: &ExprRef) -> ExprRef {
    Expr::sum(vec![
        u.clone(),
        Expr::prod(vec![v.clone(), Expr::var("p")]),
    ])
}

/// Which rational invariant an invariance check compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckedInvariant {
    B1,
    B2,
    B3,
    R12,
}

impl CheckedInvariant {
    /// All four checkable invariants, in display order.
    pub fn all() -> [CheckedInvariant; 4] {
        [
            CheckedInvariant::B1,
            CheckedInvariant::B2,
            CheckedInvariant::B3,
            CheckedInvariant::R12,
        ]
    }

    fn expr_of<'a>(&self, rat: &'a RationalInvariants) -> &'a ExprRef {
        match self {
            CheckedInvariant::B1 => &rat.b1,
            CheckedInvariant::B2 => &rat.b2,
            CheckedInvariant::B3 => &rat.b3,
            CheckedInvariant::R12 => &rat.r12,
        }
    }
}

impl std::fmt::Display for CheckedInvariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            CheckedInvariant::B1 => "B1",
            CheckedInvariant::B2 => "B2",
            CheckedInvariant::B3 => "B3",
            CheckedInvariant::R12 => "R12",
        };
        write!(f, "{name}")
    }
}

impl std::str::FromStr for CheckedInvariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "b1" => Ok(CheckedInvariant::B1),
            "b2" => Ok(CheckedInvariant::B2),
            "b3" => Ok(CheckedInvariant::B3),
            "r12" => Ok(CheckedInvariant::R12),
            _ => Err(format!(
                "unknown invariant {s:?}; expected B1, B2, B3 or R12"
            )),
        }
    }
}

/// Outcome of comparing one invariant across a transformation.
#[derive(Debug, Clone)]
pub struct InvariantComparison {
    /// Which invariant was compared.
    pub invariant: CheckedInvariant,
    /// Points at which both sides evaluated cleanly.
    pub points: usize,
    /// Points dropped because either side failed to evaluate.
    pub skipped: usize,
    /// Largest relative residual across the compared points.
    pub max_relative_residual: f64,
    /// True when every compared point agreed within tolerance.
    pub ok: bool,
}

/// Result of [`check_invariance`] across the requested invariants.
#[derive(Debug, Clone)]
pub struct InvarianceCheck {
    /// One comparison per requested invariant, in request order.
    pub comparisons: Vec<InvariantComparison>,
}

impl InvarianceCheck {
    /// True when every comparison passed.
    pub fn ok(&self) -> bool {
        self.comparisons.iter().all(|c| c.ok)
    }
}

/// Options for [`check_invariance`].
#[derive(Debug, Clone)]
pub struct InvarianceOptions {
    /// Seed for the sample points.
    pub seed: u64,
    /// Number of sample points per invariant.
    pub samples: usize,
    /// Relative tolerance on each comparison.
    pub tol: f64,
}

impl Default for InvarianceOptions {
    fn default() -> Self {
        InvarianceOptions { seed: 0, samples: 8, tol: 1e-6 }
    }
}

/// Compares the requested rational invariants of `ctx` and of its
/// pushforward along `transform` at matched sample points.
///
/// Unbound parameters of the right-hand side are drawn once from the
/// sampler so the check runs on a generic member of the family. Each
/// requested invariant must evaluate cleanly on both sides at a minimum
/// number of points, otherwise the check errs instead of passing
/// vacuously.
pub fn check_invariance(
    ctx: &JetContext,
    transform: &PointTransformPair,
    params: &Assignment,
    which: &[CheckedInvariant],
    options: &InvarianceOptions,
) -> Result<InvarianceCheck, TransformError> {
    let t = ctx.t_values()?;
    let rat = rational_invariants(&t);
    let pushed = JetContext::new(transform.pushforward(ctx));
    let t_barred = pushed.t_values()?;
    let rat_barred = rational_invariants(&t_barred);

    let mut sampler = Sampler::from_seed(options.seed);
    let mut base = params.clone();
    for name in parameter_names(ctx.f()) {
        if base.get(&name).is_none() {
            base.set(&name, sampler.annulus());
        }
    }
    let count = options.samples.max(MIN_DECISION_POINTS);
    let points: Vec<Assignment> = (0..count)
        .map(|_| base.overlaid(&sampler.box_assignment(&["x", "y", "p"])))
        .collect();

    let mut comparisons = Vec::new();
    for inv in which {
        let original = inv.expr_of(&rat);
        let barred = inv.expr_of(&rat_barred);
        let mut compared = 0usize;
        let mut skipped = 0usize;
        let mut worst = 0.0f64;
        for at in &points {
            let matched = match transform.matched_point(at) {
                Ok(m) => m,
                Err(_) => {
                    skipped += 1;
                    continue;
                }
            };
            let (a, b) = match (evaluate(original, at), evaluate(barred, &matched)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => {
                    skipped += 1;
                    continue;
                }
            };
            let rel = (a - b).norm() / (1.0 + a.norm().max(b.norm()));
            worst = worst.max(rel);
            compared += 1;
        }
        if compared < MIN_DECISION_POINTS {
            return Err(TransformError::NotEnoughValidPoints {
                needed: MIN_DECISION_POINTS,
                got: compared,
            });
        }
        comparisons.push(InvariantComparison {
            invariant: *inv,
            points: compared,
            skipped,
            max_relative_residual: worst,
            ok: worst <= options.tol,
        });
    }
    Ok(InvarianceCheck { comparisons })
}

/// A catalog transformation with a short name for reports.
#[derive(Debug, Clone)]
pub struct NamedTransform {
    /// Identifier used in reports and for lookup.
    pub name: &'static str,
    /// The validated pair.
    pub transform: PointTransformPair,
}

/// Built-in transformations used by the verification suites: affine maps,
/// shears, the coordinate swap, a genuinely nonlinear shear and an
/// exponential stretch.
pub fn catalog() -> Vec<NamedTransform> {
    let entries: [(&str, [&str; 4]); 10] = [
        ("identity", ["x", "y", "x", "y"]),
        ("translate_x", ["x + 1", "y", "x - 1", "y"]),
        ("translate_y", ["x", "y + 1", "x", "y - 1"]),
        ("scale_x2", ["2*x", "y", "x/2", "y"]),
        ("scale_y3", ["x", "3*y", "x", "y/3"]),
        ("shear_xy", ["x + y/2", "y", "x - y/2", "y"]),
        ("shear_yx", ["x", "y + x/3", "x", "y - x/3"]),
        ("swap", ["y", "x", "y", "x"]),
        ("quadratic_shear", ["x", "y + x^2", "x", "y - x^2"]),
        // Box points keep |Im y| below pi, so log undoes exp exactly on
        // the principal branch at every validation point.
        ("exp_stretch", ["x", "exp(y)", "x", "log(y)"]),
    ];
    let syms = SymbolTable::xyp();
    let no_params = Assignment::new();
    entries
        .into_iter()
        .map(|(name, [phi, psi, phi_inv, psi_inv])| {
            let parsed = [phi, psi, phi_inv, psi_inv]
                .map(|src| parse(src, &syms).expect("catalog expression parses"));
            let [phi, psi, phi_inv, psi_inv] = parsed;
            NamedTransform {
                name,
                transform: PointTransformPair::new(
                    phi, psi, phi_inv, psi_inv, &no_params,
                )
                .expect("catalog transformation validates"),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{equal_numeric, parse, SymbolTable};

    fn syms() -> SymbolTable {
        SymbolTable::xyp().with_params(["c"])
    }

    fn pe(src: &str) -> ExprRef {
        parse(src, &syms()).unwrap()
    }

    fn pair(phi: &str, psi: &str, phi_inv: &str, psi_inv: &str) -> PointTransformPair {
        PointTransformPair::new(
            pe(phi),
            pe(psi),
            pe(phi_inv),
            pe(psi_inv),
            &Assignment::new(),
        )
        .unwrap()
    }

    fn by_name(name: &str) -> PointTransformPair {
        catalog()
            .into_iter()
            .find(|n| n.name == name)
            .unwrap()
            .transform
    }

    #[test]
    fn rejects_wrong_inverse() {
        let err = PointTransformPair::new(
            pe("x + 1"),
            pe("y"),
            pe("x"),
            pe("y"),
            &Assignment::new(),
        )
        .unwrap_err();
        assert!(matches!(err, TransformError::RoundTripFailed { coordinate: "x", .. }));
    }

    #[test]
    fn rejects_singular_jacobian() {
        let err = PointTransformPair::new(
            pe("x"),
            pe("x"),
            pe("x"),
            pe("y"),
            &Assignment::new(),
        )
        .unwrap_err();
        assert_eq!(err, TransformError::SingularJacobian);
    }

    #[test]
    fn rejects_slope_dependence() {
        let err = PointTransformPair::new(
            pe("x + p"),
            pe("y"),
            pe("x - p"),
            pe("y"),
            &Assignment::new(),
        )
        .unwrap_err();
        assert_eq!(err, TransformError::SlopeDependent);
    }

    #[test]
    fn catalog_builds_and_has_unique_names() {
        let entries = catalog();
        assert_eq!(entries.len(), 10);
        let mut names: Vec<_> = entries.iter().map(|n| n.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), entries.len());
    }

    #[test]
    fn identity_pushforward_is_f_itself() {
        let ctx = JetContext::new(pe("c*exp(-p)"));
        let fb = by_name("identity").pushforward(&ctx);
        assert_eq!(&fb, ctx.f());
    }

    #[test]
    fn quadratic_shear_pushforward_matches_hand_oracle() {
        // yb = y + x^2 sends p to p + 2x and adds 2 to the second
        // derivative: fb = f(x, yb - x^2, pb - 2x) + 2.
        let ctx = JetContext::new(pe("c*exp(-p)"));
        let fb = by_name("quadratic_shear").pushforward(&ctx);
        let oracle = pe("c*exp(-(p - 2*x)) + 2");
        let mut sampler = Sampler::from_seed(29);
        let points = sampler.box_assignments(&["x", "y", "p", "c"], 8);
        let check = equal_numeric(&fb, &oracle, &points, 1e-9);
        assert!(check.equal, "residuals: {:?}", check.residuals);
    }

    #[test]
    fn isotropic_scaling_rescales_f() {
        // xb = 2x, yb = 2y leaves the slope alone and halves f:
        // fb = f(xb/2, yb/2, pb) / 2.
        let ctx = JetContext::new(pe("c*exp(-p) + x*y"));
        let fb = pair("2*x", "2*y", "x/2", "y/2").pushforward(&ctx);
        let oracle = pe("(c*exp(-p) + x*y/4)/2");
        let mut sampler = Sampler::from_seed(31);
        let points = sampler.box_assignments(&["x", "y", "p", "c"], 8);
        let check = equal_numeric(&fb, &oracle, &points, 1e-9);
        assert!(check.equal, "residuals: {:?}", check.residuals);
    }

    #[test]
    fn swap_pushforward_inverts_the_slope() {
        // Swapping axes sends p to 1/p and f to -p^3 f evaluated at the
        // swapped point.
        let ctx = JetContext::new(pe("c*exp(-p)"));
        let fb = by_name("swap").pushforward(&ctx);
        let oracle = pe("-p^3*c*exp(-1/p)");
        let mut sampler = Sampler::from_seed(37);
        let points = sampler.box_assignments(&["x", "y", "p", "c"], 8);
        let check = equal_numeric(&fb, &oracle, &points, 1e-9);
        assert!(check.equal, "residuals: {:?}", check.residuals);
    }

    #[test]
    fn matched_point_applies_the_slope_map() {
        let shear = by_name("quadratic_shear");
        let mut at = Assignment::new();
        at.set("x", num_complex::Complex64::new(0.5, 1.0));
        at.set("y", num_complex::Complex64::new(-1.0, 0.5));
        at.set("p", num_complex::Complex64::new(2.0, -1.0));
        let matched = shear.matched_point(&at).unwrap();
        let x = at.get("x").unwrap();
        let expected_y = at.get("y").unwrap() + x * x;
        let expected_p = at.get("p").unwrap() + 2.0 * x;
        assert!((matched.get("x").unwrap() - x).norm() < 1e-12);
        assert!((matched.get("y").unwrap() - expected_y).norm() < 1e-12);
        assert!((matched.get("p").unwrap() - expected_p).norm() < 1e-12);
    }

    #[test]
    fn rational_invariants_survive_translation() {
        let ctx = JetContext::new(pe("p + exp(p - y)"));
        let check = check_invariance(
            &ctx,
            &by_name("translate_y"),
            &Assignment::new(),
            &CheckedInvariant::all(),
            &InvarianceOptions { seed: 5, samples: 6, tol: 1e-6 },
        )
        .unwrap();
        assert!(check.ok(), "comparisons: {:?}", check.comparisons);
        assert_eq!(check.comparisons.len(), 4);
    }

    #[test]
    fn rational_invariants_survive_nonlinear_shear() {
        let ctx = JetContext::new(pe("p + exp(p - y)"));
        let check = check_invariance(
            &ctx,
            &by_name("quadratic_shear"),
            &Assignment::new(),
            &CheckedInvariant::all(),
            &InvarianceOptions { seed: 7, samples: 6, tol: 1e-6 },
        )
        .unwrap();
        assert!(check.ok(), "comparisons: {:?}", check.comparisons);
    }

    #[test]
    fn pushforward_composes() {
        // Scaling then translating equals the composite map, numerically.
        let ctx = JetContext::new(pe("c*exp(-p)"));
        let first = pair("2*x", "y", "x/2", "y");
        let second = pair("x + 2", "y", "x - 2", "y");
        let composite = pair("2*x + 2", "y", "(x - 2)/2", "y");

        let through_steps =
            second.pushforward(&JetContext::new(first.pushforward(&ctx)));
        let direct = composite.pushforward(&ctx);
        let mut sampler = Sampler::from_seed(41);
        let points = sampler.box_assignments(&["x", "y", "p", "c"], 8);
        let check = equal_numeric(&through_steps, &direct, &points, 1e-9);
        assert!(check.equal, "residuals: {:?}", check.residuals);
    }
}
