//! Relative and absolute invariants of `y'' = f(x, y, p)` under point
//! transformations, and the classifier built on them.
//!
//! Two relative invariants of low order control the coarse classes: `I1`
//! is the fourth `p`-derivative of `f`, and `I2` is a second-order
//! expression in derivatives of `f`. An equation is linearizable exactly
//! when both vanish identically. When `I1` does not vanish, the
//! construction produces seven fifth-order invariants `nu1..nu7` carrying
//! fractional powers of `I1`, three branch-free rational combinations
//! `B1, B2, B3` that square the weight away, and a rational cross-ratio
//! `R12`. The number of independent functions among `B1, B2, B3` (the
//! rank of their Jacobian in `x, y, p`) determines the dimension of the
//! point-symmetry algebra: rank 0, 1, 2 give dimensions 3, 2, 1.
//!
//! Identical vanishing of an expression is decided numerically: the
//! expression is evaluated at seeded random points with every coordinate
//! modulus in [0.5, 2], and a value counts as zero when it is below
//! tolerance relative to the magnitudes of the summands feeding it.
//! Mixed verdicts across points are reported as an error instead of being
//! silently resolved.

use crate::expr::{
    differentiate, evaluate, normalize, Assignment, Expr, ExprRef,
};
use crate::jet::{JetContext, JetError, TValues};
use crate::sample::Sampler;
use nalgebra::Matrix3;
use num_complex::Complex64;
use std::collections::BTreeSet;
use thiserror::Error;

/// Failure in invariant computation or classification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvariantError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(
        "zero test of {expr} is inconsistent: {zero_points} points vanish, \
         {nonzero_points} do not"
    )]
    InconsistentZeroTest { expr: String, zero_points: usize, nonzero_points: usize },
    #[error("only {got} of the required {needed} sample points evaluated cleanly")]
    NotEnoughValidPoints { needed: usize, got: usize },
    #[error("rank votes {votes:?} have no majority")]
    InconsistentRank { votes: Vec<u8> },
}

/// The two low-order relative invariants.
#[derive(Debug, Clone)]
pub struct RelativeInvariants {
    /// Fourth `p`-derivative of `f`; vanishes iff `f` is cubic in `p`.
    pub i1: ExprRef,
    /// Second-order companion; together with `i1` it detects
    /// linearizability.
    pub i2: ExprRef,
}

/// Computes the two relative invariants of the equation.
///
/// `i2` is returned in the factored shape
/// `Dx^2 f33 - 4 Dx f23 - 3 f2 f33 + 6 f22 + f3 (4 f23 - Dx f33)`;
/// the derived quantity `t12` is the same function written term by term,
/// and the two agree numerically everywhere.
pub fn relative_invariants(ctx: &JetContext) -> Result<RelativeInvariants, JetError> {
    let i1 = ctx.partial(0, 0, 4)?;
    let f2 = ctx.partial(0, 1, 0)?;
    let f3 = ctx.partial(0, 0, 1)?;
    let f22 = ctx.partial(0, 2, 0)?;
    let f23 = ctx.partial(0, 1, 1)?;
    let f33 = ctx.partial(0, 0, 2)?;
    let dx_f33 = ctx.dot_dx(&f33);
    let dx2_f33 = ctx.dot_dx(&dx_f33);
    let dx_f23 = ctx.dot_dx(&f23);
    let i2 = normalize(&Expr::sum(vec![
        dx2_f33,
        Expr::prod(vec![Expr::int(-4), dx_f23]),
        Expr::prod(vec![Expr::int(-3), f2, f33]),
        Expr::prod(vec![Expr::int(6), f22]),
        Expr::prod(vec![
            f3,
            Expr::sum(vec![
                Expr::prod(vec![Expr::int(4), f23]),
                Expr::neg(dx_f33),
            ]),
        ]),
    ]));
    Ok(RelativeInvariants { i1, i2 })
}

/// The seven fifth-order invariants `nu1..nu7` over a t-table.
///
/// They carry fractional powers of `t8` and are therefore defined only up
/// to a fifth root of unity; every downstream decision uses their
/// branch-free combinations instead.
pub fn nu_exprs(t: &TValues) -> [ExprRef; 7] {
    let g = |k: usize| t.get(k).clone();
    let nu1 = Expr::prod(vec![Expr::qpow(g(8), 1, 5), g(12)]);
    let nu2 = Expr::prod(vec![Expr::qpow(g(8), -6, 5), n2_core(t)]);
    let nu3 = Expr::prod(vec![Expr::qpow(g(8), -3, 5), n3_core(t)]);
    let nu4 = Expr::prod(vec![Expr::ipow(g(8), -2), n4_core(t)]);
    let nu5 = Expr::prod(vec![
        Expr::qpow(g(8), 1, 5),
        Expr::sub(g(17), Expr::prod(vec![g(16), g(3)])),
    ]);
    let nu6 = Expr::prod(vec![
        Expr::rat(1, 5),
        Expr::qpow(g(8), -6, 5),
        Expr::sum(vec![
            Expr::prod(vec![Expr::int(5), g(16), g(8)]),
            Expr::prod(vec![g(16), g(3), g(10)]),
            Expr::neg(Expr::prod(vec![g(10), g(17)])),
        ]),
    ]);
    let nu7 = Expr::prod(vec![
        Expr::qpow(g(8), -3, 5),
        Expr::sum(vec![
            Expr::prod(vec![Expr::int(2), g(8), g(16), g(5), g(3)]),
            Expr::neg(Expr::prod(vec![g(8), g(16), g(4)])),
            Expr::prod(vec![Expr::int(-2), g(8), g(5), g(17)]),
            Expr::prod(vec![g(8), g(18)]),
            Expr::prod(vec![
                g(11),
                Expr::sub(Expr::prod(vec![g(16), g(3)]), g(17)),
            ]),
        ]),
    ]);
    [nu1, nu2, nu3, nu4, nu5, nu6, nu7].map(|e| normalize(&e))
}

/// Weight-zero eighth-power combinations `beta1..beta3` of the nu's.
pub fn beta_exprs(nu: &[ExprRef; 7]) -> [ExprRef; 3] {
    let b1 = Expr::prod(vec![
        Expr::ipow(nu[1].clone(), 4),
        Expr::qpow(nu[0].clone(), -7, 2),
    ]);
    let b2 = Expr::prod(vec![
        Expr::ipow(nu[2].clone(), 4),
        Expr::qpow(nu[0].clone(), -11, 2),
    ]);
    let b3 = Expr::prod(vec![
        Expr::ipow(nu[3].clone(), 4),
        Expr::ipow(nu[0].clone(), -5),
    ]);
    [b1, b2, b3].map(|e| normalize(&e))
}

/// Weight-zero eighth-power combinations `gamma1..gamma3` over the
/// extended invariants `nu5..nu7`.
pub fn gamma_exprs(nu: &[ExprRef; 7]) -> [ExprRef; 3] {
    let g1 = Expr::prod(vec![
        Expr::ipow(nu[4].clone(), 8),
        Expr::ipow(nu[0].clone(), 2),
    ]);
    let g2 = Expr::prod(vec![
        Expr::ipow(nu[5].clone(), 8),
        Expr::ipow(nu[0].clone(), 3),
    ]);
    let g3 = Expr::prod(vec![
        Expr::ipow(nu[6].clone(), 8),
        Expr::ipow(nu[0].clone(), -1),
    ]);
    [g1, g2, g3].map(|e| normalize(&e))
}

fn n2_core(t: &TValues) -> ExprRef {
    let g = |k: usize| t.get(k).clone();
    Expr::sum(vec![
        Expr::prod(vec![g(12), g(10)]),
        Expr::prod(vec![Expr::int(5), g(8), g(14)]),
    ])
}

fn n3_core(t: &TValues) -> ExprRef {
    let g = |k: usize| t.get(k).clone();
    Expr::sum(vec![
        Expr::prod(vec![Expr::int(5), g(11), g(12)]),
        Expr::prod(vec![
            Expr::sum(vec![
                Expr::prod(vec![Expr::int(7), g(5), g(12)]),
                g(15),
            ]),
            g(8),
        ]),
    ])
}

fn n4_core(t: &TValues) -> ExprRef {
    let g = |k: usize| t.get(k).clone();
    Expr::sum(vec![
        Expr::prod(vec![
            Expr::sum(vec![
                Expr::prod(vec![Expr::int(10), g(5), g(14)]),
                Expr::prod(vec![Expr::int(-5), g(12), g(6)]),
                Expr::prod(vec![Expr::int(5), g(13)]),
            ]),
            Expr::ipow(g(8), 2),
        ]),
        Expr::prod(vec![
            Expr::sum(vec![
                Expr::prod(vec![
                    Expr::sum(vec![
                        Expr::prod(vec![Expr::int(-3), g(5), g(10)]),
                        Expr::prod(vec![Expr::int(-5), g(9)]),
                    ]),
                    g(12),
                ]),
                Expr::prod(vec![g(15), g(10)]),
                Expr::prod(vec![Expr::int(5), g(14), g(11)]),
            ]),
            g(8),
        ]),
    ])
}

/// The branch-free rational invariants.
#[derive(Debug, Clone)]
pub struct RationalInvariants {
    /// Numerator of `nu2` after clearing the `t8` weight.
    pub n2: ExprRef,
    /// Numerator of `nu3` after clearing the `t8` weight.
    pub n3: ExprRef,
    /// Numerator of `nu4` after clearing the `t8` weight.
    pub n4: ExprRef,
    /// `n2^8 / (t8^11 t12^7)`; equals the square of `beta1`.
    pub b1: ExprRef,
    /// `n3^8 / (t8^7 t12^11)`; equals the square of `beta2`.
    pub b2: ExprRef,
    /// `n4^8 / (t8^18 t12^10)`; equals the square of `beta3`.
    pub b3: ExprRef,
    /// `n2^4 t12^2 / (t8^2 n3^4)`; the branch-free ratio whose square
    /// root relates `beta1` and `beta2`.
    pub r12: ExprRef,
}

/// Builds the rational invariants over a t-table.
pub fn rational_invariants(t: &TValues) -> RationalInvariants {
    let t8 = t.get(8).clone();
    let t12 = t.get(12).clone();
    let n2 = normalize(&n2_core(t));
    let n3 = normalize(&n3_core(t));
    let n4 = normalize(&n4_core(t));
    let b1 = normalize(&Expr::prod(vec![
        Expr::ipow(n2.clone(), 8),
        Expr::ipow(t8.clone(), -11),
        Expr::ipow(t12.clone(), -7),
    ]));
    let b2 = normalize(&Expr::prod(vec![
        Expr::ipow(n3.clone(), 8),
        Expr::ipow(t8.clone(), -7),
        Expr::ipow(t12.clone(), -11),
    ]));
    let b3 = normalize(&Expr::prod(vec![
        Expr::ipow(n4.clone(), 8),
        Expr::ipow(t8.clone(), -18),
        Expr::ipow(t12.clone(), -10),
    ]));
    let r12 = normalize(&Expr::prod(vec![
        Expr::ipow(n2.clone(), 4),
        Expr::ipow(t12, 2),
        Expr::ipow(t8, -2),
        Expr::ipow(n3.clone(), -4),
    ]));
    RationalInvariants { n2, n3, n4, b1, b2, b3, r12 }
}

/// Options for the numeric zero test.
#[derive(Debug, Clone)]
pub struct ZeroTestOptions {
    /// Number of sample points.
    pub points: usize,
    /// Relative tolerance against the summand magnitudes.
    pub tol: f64,
}

impl Default for ZeroTestOptions {
    fn default() -> Self {
        ZeroTestOptions { points: 12, tol: 1e-9 }
    }
}

/// Minimum cleanly evaluated points for any sampled decision.
pub const MIN_DECISION_POINTS: usize = 3;

/// Minimum agreeing points for a rank majority.
pub const MIN_RANK_POINTS: usize = 5;

/// Decides whether `e` vanishes identically as a function of the named
/// variables.
///
/// `base` supplies parameter values; the variables are sampled from the
/// annulus with modulus in [0.5, 2]. At each point the value must be
/// below `tol * (1 + s)` where `s` sums the magnitudes of the top-level
/// summands of `e`, so cancellation-limited precision is accounted for.
/// A mixed verdict is an error.
pub fn is_identically_zero(
    e: &ExprRef,
    vars: &[&str],
    base: &Assignment,
    sampler: &mut Sampler,
    options: &ZeroTestOptions,
) -> Result<bool, InvariantError> {
    let mut zero_points = 0usize;
    let mut nonzero_points = 0usize;
    let mut evaluated = 0usize;
    for _ in 0..options.points {
        let point = base.overlaid(&sampler.annulus_assignment(vars));
        let (value, scale) = match sum_with_scale(e, &point) {
            Some(pair) => pair,
            None => continue,
        };
        evaluated += 1;
        if value.norm() <= options.tol * (1.0 + scale) {
            zero_points += 1;
        } else {
            nonzero_points += 1;
        }
    }
    if evaluated < MIN_DECISION_POINTS {
        return Err(InvariantError::NotEnoughValidPoints {
            needed: MIN_DECISION_POINTS,
            got: evaluated,
        });
    }
    if zero_points > 0 && nonzero_points > 0 {
        return Err(InvariantError::InconsistentZeroTest {
            expr: crate::expr::print(e),
            zero_points,
            nonzero_points,
        });
    }
    Ok(nonzero_points == 0)
}

/// Evaluates `e`, returning its value and the sum of the magnitudes of
/// its top-level summands.
fn sum_with_scale(e: &ExprRef, at: &Assignment) -> Option<(Complex64, f64)> {
    if let Expr::Sum(terms) = &**e {
        let mut total = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for term in terms {
            let v = evaluate(term, at).ok()?;
            total += v;
            scale += v.norm();
        }
        Some((total, scale))
    } else {
        let v = evaluate(e, at).ok()?;
        Some((v, v.norm()))
    }
}

/// Coarse class of an equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationClass {
    /// `I1` and `I2` vanish identically: reducible to `y'' = 0`, with the
    /// maximal eight-dimensional symmetry algebra.
    Linearizable,
    /// `I1` vanishes (cubic in `p`) but `I2` does not; the fifth-order
    /// construction does not apply on this branch.
    CubicDegenerate,
    /// `I1` does not vanish but `I2` does; a separate invariant theory
    /// governs this branch.
    SecondClass,
    /// Both relative invariants are nonzero: the generic branch where
    /// `B1, B2, B3` decide the symmetry dimension.
    FirstClass,
}

impl std::fmt::Display for EquationClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            EquationClass::Linearizable => "linearizable",
            EquationClass::CubicDegenerate => "cubic-degenerate",
            EquationClass::SecondClass => "second-class",
            EquationClass::FirstClass => "first-class",
        };
        write!(f, "{name}")
    }
}

/// Dimension of the point-symmetry algebra, when this construction
/// determines it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryDimension {
    /// Dimension decided by the classification.
    Known(u8),
    /// The equation falls on a branch this construction does not decide.
    OutsideScope,
}

impl SymmetryDimension {
    /// The dimension as a number, `None` when outside scope.
    pub fn as_u8(self) -> Option<u8> {
        match self {
            SymmetryDimension::Known(d) => Some(d),
            SymmetryDimension::OutsideScope => None,
        }
    }
}

/// One evaluated sample of the rational invariants.
#[derive(Debug, Clone)]
pub struct BSample {
    /// The point, coordinates and parameters included.
    pub at: Assignment,
    /// Values of `B1, B2, B3`.
    pub b: [Complex64; 3],
}

/// Majority decision on the Jacobian rank of `(B1, B2, B3)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankDecision {
    /// The winning rank.
    pub rank: u8,
    /// Every per-point vote, in sample order.
    pub votes: Vec<u8>,
}

/// Options for [`classify`].
#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    /// Seed for every sampled decision.
    pub seed: u64,
    /// Number of sample points for the invariant values and the rank.
    pub samples: usize,
    /// Relative tolerance for zero tests and rank thresholds.
    pub tol: f64,
    /// Number of points for each identical-vanishing test.
    pub zero_points: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { seed: 0, samples: 8, tol: 1e-9, zero_points: 12 }
    }
}

/// Classification outcome.
#[derive(Debug, Clone)]
pub struct ClassifyReport {
    /// Coarse class from the relative invariants.
    pub class: EquationClass,
    /// True when `I1` vanishes identically.
    pub i1_vanishes: bool,
    /// True when `I2` vanishes identically.
    pub i2_vanishes: bool,
    /// Samples of `B1, B2, B3`; empty off the first-class branch.
    pub b_samples: Vec<BSample>,
    /// Rank decision; `None` off the first-class branch.
    pub rank: Option<RankDecision>,
    /// Symmetry-algebra dimension.
    pub symmetry_dimension: SymmetryDimension,
}

impl ClassifyReport {
    /// If every sampled `B` triple agrees within `tol`, their mean.
    pub fn constant_b(&self, tol: f64) -> Option<[Complex64; 3]> {
        if self.b_samples.is_empty() {
            return None;
        }
        let n = self.b_samples.len() as f64;
        let mut mean = [Complex64::new(0.0, 0.0); 3];
        for sample in &self.b_samples {
            for k in 0..3 {
                mean[k] += sample.b[k] / n;
            }
        }
        for sample in &self.b_samples {
            for k in 0..3 {
                let dev = (sample.b[k] - mean[k]).norm();
                if dev > tol * (1.0 + mean[k].norm()) {
                    return None;
                }
            }
        }
        Some(mean)
    }
}

/// Classifies the equation held by `ctx`.
///
/// Parameters of `f` that `params` leaves unbound are drawn once from the
/// sampler, so the verdict describes a generic member of the family. The
/// decision tree: both relative invariants vanish identically means
/// linearizable (dimension 8); only `I1` vanishing is the cubic branch
/// and only `I2` vanishing the second-class branch, both outside the
/// scope of the fifth-order construction; otherwise `B1, B2, B3` are
/// sampled and the majority Jacobian rank `r` over the sample points
/// gives dimension `3 - r`.
pub fn classify(
    ctx: &JetContext,
    params: &Assignment,
    options: &ClassifyOptions,
) -> Result<ClassifyReport, InvariantError> {
    let mut sampler = Sampler::from_seed(options.seed);
    let t = ctx.t_values()?;

    let mut base = params.clone();
    for name in parameter_names(ctx.f()) {
        if base.get(&name).is_none() {
            base.set(&name, sampler.annulus());
        }
    }

    let zt = ZeroTestOptions { points: options.zero_points, tol: options.tol };
    let xyp = ["x", "y", "p"];
    let i1_vanishes = is_identically_zero(t.get(8), &xyp, &base, &mut sampler, &zt)?;
    let i2_vanishes = is_identically_zero(t.get(12), &xyp, &base, &mut sampler, &zt)?;

    let (class, dimension) = match (i1_vanishes, i2_vanishes) {
        (true, true) => (EquationClass::Linearizable, SymmetryDimension::Known(8)),
        (true, false) => (EquationClass::CubicDegenerate, SymmetryDimension::OutsideScope),
        (false, true) => (EquationClass::SecondClass, SymmetryDimension::OutsideScope),
        (false, false) => (EquationClass::FirstClass, SymmetryDimension::OutsideScope),
    };
    if class != EquationClass::FirstClass {
        return Ok(ClassifyReport {
            class,
            i1_vanishes,
            i2_vanishes,
            b_samples: Vec::new(),
            rank: None,
            symmetry_dimension: dimension,
        });
    }

    let rat = rational_invariants(&t);
    let b = [rat.b1.clone(), rat.b2.clone(), rat.b3.clone()];
    let grads: Vec<[ExprRef; 3]> = b
        .iter()
        .map(|bk| {
            ["x", "y", "p"].map(|v| differentiate(bk, v))
        })
        .collect();

    let count = options.samples.max(MIN_RANK_POINTS);
    let mut b_samples = Vec::new();
    let mut votes = Vec::new();
    for _ in 0..count {
        let at = base.overlaid(&sampler.box_assignment(&["x", "y", "p"]));
        let values = match b.each_ref().map(|bk| evaluate(bk, &at)) {
            [Ok(v1), Ok(v2), Ok(v3)] => [v1, v2, v3],
            _ => continue,
        };
        b_samples.push(BSample { at: at.clone(), b: values });

        let mut entries = [[Complex64::new(0.0, 0.0); 3]; 3];
        let mut ok = true;
        for (r, row) in grads.iter().enumerate() {
            for (cidx, g) in row.iter().enumerate() {
                match evaluate(g, &at) {
                    Ok(v) => entries[r][cidx] = v,
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                break;
            }
        }
        if !ok {
            continue;
        }
        let jac = Matrix3::new(
            entries[0][0], entries[0][1], entries[0][2],
            entries[1][0], entries[1][1], entries[1][2],
            entries[2][0], entries[2][1], entries[2][2],
        );
        let sigma = jac.singular_values();
        let sigma_max = sigma[0];
        let b_scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let threshold = (options.tol * sigma_max).max(1e-9 * (1.0 + b_scale));
        let rank = sigma.iter().filter(|s| **s > threshold).count() as u8;
        votes.push(rank);
    }

    if votes.len() < MIN_RANK_POINTS {
        return Err(InvariantError::NotEnoughValidPoints {
            needed: MIN_RANK_POINTS,
            got: votes.len(),
        });
    }
    let mut counts = [0usize; 4];
    for v in &votes {
        counts[(*v).min(3) as usize] += 1;
    }
    let (winner, winner_count) = counts
        .iter()
        .enumerate()
        .max_by_key(|(rank, count)| (**count, std::cmp::Reverse(*rank)))
        .map(|(rank, count)| (rank as u8, *count))
        .unwrap();
    if winner_count < MIN_RANK_POINTS || winner_count * 2 <= votes.len() {
        return Err(InvariantError::InconsistentRank { votes });
    }

    Ok(ClassifyReport {
        class,
        i1_vanishes,
        i2_vanishes,
        b_samples,
        rank: Some(RankDecision { rank: winner, votes }),
        symmetry_dimension: SymmetryDimension::Known(3 - winner),
    })
}

/// Names of the parameters occurring in `e`.
pub(crate) fn parameter_names(e: &ExprRef) -> BTreeSet<String> {
    let all = e.free_symbols();
    let vars = e.free_vars();
    all.difference(&vars).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{equal_numeric, parse, SymbolTable};
    use crate::jet::JetContext;

    fn syms() -> SymbolTable {
        SymbolTable::xyp().with_params(["c", "alpha"])
    }

    fn ctx(src: &str) -> JetContext {
        JetContext::new(parse(src, &syms()).unwrap())
    }

    fn pe(src: &str) -> ExprRef {
        parse(src, &syms()).unwrap()
    }

    fn classify_src(src: &str, params: Assignment) -> ClassifyReport {
        classify(&ctx(src), &params, &ClassifyOptions::default()).unwrap()
    }

    #[test]
    fn i2_matches_t12_numerically() {
        // The factored and the term-by-term form of the second relative
        // invariant are the same function.
        for src in ["6*y*p - 4*y^3 + c*(p - y^2)^(3/2)", "p + exp(p - y)", "c*exp(-p)"] {
            let c = ctx(src);
            let rel = relative_invariants(&c).unwrap();
            let t = c.t_values().unwrap();
            let mut sampler = Sampler::from_seed(29);
            let points: Vec<Assignment> = (0..8)
                .map(|_| {
                    sampler
                        .annulus_assignment(&["x", "y", "p", "c"])
                })
                .collect();
            let check = equal_numeric(&rel.i2, t.get(12), &points, 1e-9);
            assert!(check.equal, "{src}: residuals {:?}", check.residuals);
        }
    }

    #[test]
    fn exponential_example_rational_numerators() {
        // Hand-derived chain for f = c e^{-p}.
        let c = ctx("c*exp(-p)");
        let t = c.t_values().unwrap();
        let rat = rational_invariants(&t);
        assert_eq!(rat.n2, pe("-16*c^4*exp(-4*p)"));
        assert_eq!(rat.n3, pe("-16*c^5*exp(-5*p)"));
        assert_eq!(rat.n4, pe("41*c^6*exp(-6*p)"));
    }

    #[test]
    fn exponential_example_constant_b() {
        let report = classify_src("c*exp(-p)", Assignment::new().bind("c", 1.0.into()));
        assert_eq!(report.class, EquationClass::FirstClass);
        assert_eq!(report.symmetry_dimension.as_u8(), Some(3));
        assert_eq!(report.rank.as_ref().unwrap().rank, 0);
        let b = report.constant_b(1e-6).expect("B should be constant");
        let expected = [4294967296.0, 4294967296.0, 7984925229121.0];
        for k in 0..3 {
            assert!(
                (b[k] - Complex64::new(expected[k], 0.0)).norm()
                    <= 1e-6 * (1.0 + expected[k]),
                "B{} = {}, expected {}",
                k + 1,
                b[k],
                expected[k]
            );
        }
    }

    #[test]
    fn exponential_example_square_ratio_is_plus_one() {
        // R12 is a perfect square of a rational function; for this family
        // it is identically +1.
        let c = ctx("c*exp(-p)");
        let t = c.t_values().unwrap();
        let rat = rational_invariants(&t);
        let shifted = normalize(&Expr::sub(rat.r12, Expr::int(1)));
        let mut sampler = Sampler::from_seed(31);
        let base = Assignment::new().bind("c", Complex64::new(1.3, 0.4));
        let zero = is_identically_zero(
            &shifted,
            &["x", "y", "p"],
            &base,
            &mut sampler,
            &ZeroTestOptions::default(),
        )
        .unwrap();
        assert!(zero, "R12 - 1 should vanish identically");
    }

    #[test]
    fn b_equals_beta_squared_on_positive_branch() {
        // On real positive t8 the fractional powers are unambiguous and
        // B_k = beta_k^2 exactly.
        let c = ctx("c*exp(-p)");
        let t = c.t_values().unwrap();
        let rat = rational_invariants(&t);
        let nu = nu_exprs(&t);
        let beta = beta_exprs(&nu);
        let mut sampler = Sampler::from_seed(37);
        let points: Vec<Assignment> = sampler
            .positive_real_assignments(&["x", "y", "p", "c"], 6);
        for (b, bt) in [(&rat.b1, &beta[0]), (&rat.b2, &beta[1]), (&rat.b3, &beta[2])] {
            let squared = normalize(&Expr::ipow((*bt).clone(), 2));
            let check = equal_numeric(b, &squared, &points, 1e-6);
            assert!(check.equal, "residuals: {:?}", check.residuals);
        }
    }

    #[test]
    fn power_law_family_closed_forms() {
        // f = c p^((alpha-2)/(alpha-1)) at alpha = 3, c = 1:
        // B1 = B2 = (4096 * 4^4 / 15)^2 and B3 = 179^8 / 50625.
        let params = Assignment::new()
            .bind("c", 1.0.into())
            .bind("alpha", 3.0.into());
        let report = classify_src("c*p^((alpha - 2)/(alpha - 1))", params);
        assert_eq!(report.class, EquationClass::FirstClass);
        assert_eq!(report.symmetry_dimension.as_u8(), Some(3));
        let b = report.constant_b(1e-6).expect("B should be constant");
        let b12 = (4096.0 * 256.0 / 15.0_f64).powi(2);
        let b3 = 179.0_f64.powi(8) / 50625.0;
        for (value, expected) in [(b[0], b12), (b[1], b12), (b[2], b3)] {
            assert!(
                (value - Complex64::new(expected, 0.0)).norm() <= 1e-6 * (1.0 + expected),
                "got {value}, expected {expected}"
            );
        }
    }

    #[test]
    fn power_law_degenerate_member() {
        // alpha = -1 gives f = c p^(3/2) with B1 = B2 = 0, B3 = 625^2.
        let report = classify_src("c*p^(3/2)", Assignment::new().bind("c", 1.0.into()));
        assert_eq!(report.class, EquationClass::FirstClass);
        assert_eq!(report.symmetry_dimension.as_u8(), Some(3));
        let b = report.constant_b(1e-6).expect("B should be constant");
        assert!(b[0].norm() <= 1e-6);
        assert!(b[1].norm() <= 1e-6);
        assert!(
            (b[2] - Complex64::new(390625.0, 0.0)).norm() <= 1e-6 * 390625.0,
            "B3 = {}",
            b[2]
        );
    }

    #[test]
    fn cubic_source_family_b3_depends_on_parameter() {
        // f = 6yp - 4y^3 + c (p - y^2)^(3/2): B1 = B2 = 0 and
        // B3 = (625 c^2 / (16 + c^2))^2 ... with beta3 = 625c^2/(16+c^2),
        // B3 = beta3^2. c = 2 gives beta3 = 125, B3 = 15625.
        let report = classify_src(
            "6*y*p - 4*y^3 + c*(p - y^2)^(3/2)",
            Assignment::new().bind("c", 2.0.into()),
        );
        assert_eq!(report.class, EquationClass::FirstClass);
        assert_eq!(report.symmetry_dimension.as_u8(), Some(3));
        let b = report.constant_b(1e-6).expect("B should be constant");
        assert!(b[0].norm() <= 1e-6);
        assert!(b[1].norm() <= 1e-6);
        assert!(
            (b[2] - Complex64::new(15625.0, 0.0)).norm() <= 1e-6 * 15625.0,
            "B3 = {}",
            b[2]
        );
    }

    #[test]
    fn imaginary_parameter_members_are_second_class() {
        // The same family at c = +-4i drops into the second class: I2
        // vanishes identically while I1 does not.
        for sign in [4.0, -4.0] {
            let report = classify_src(
                "6*y*p - 4*y^3 + c*(p - y^2)^(3/2)",
                Assignment::new().bind("c", Complex64::new(0.0, sign)),
            );
            assert_eq!(report.class, EquationClass::SecondClass, "c = {sign}i");
            assert_eq!(report.symmetry_dimension.as_u8(), None);
        }
    }

    #[test]
    fn linear_equations_classify_linearizable() {
        let report = classify_src("x + y + p", Assignment::new());
        assert_eq!(report.class, EquationClass::Linearizable);
        assert_eq!(report.symmetry_dimension.as_u8(), Some(8));
    }

    #[test]
    fn painleve_type_source_is_cubic_degenerate() {
        // f = y^2 is cubic in p (trivially) with I2 = 12: not
        // linearizable and outside the fifth-order construction.
        let report = classify_src("y^2", Assignment::new());
        assert_eq!(report.class, EquationClass::CubicDegenerate);
        assert_eq!(report.symmetry_dimension.as_u8(), None);
    }

    #[test]
    fn rank_one_example() {
        // f = p + exp(p - y): invariants depend on one function of the
        // coordinates, so the Jacobian rank is 1 and the algebra is
        // two-dimensional.
        let report = classify_src("p + exp(p - y)", Assignment::new());
        assert_eq!(report.class, EquationClass::FirstClass);
        assert_eq!(report.rank.as_ref().unwrap().rank, 1);
        assert_eq!(report.symmetry_dimension.as_u8(), Some(2));
    }

    #[test]
    fn zero_test_sees_through_unexpanded_differences() {
        let e = pe("(x + y)^2 - x^2 - 2*x*y - y^2");
        assert!(!e.is_zero(), "normalization must not have expanded this");
        let mut sampler = Sampler::from_seed(47);
        let zero = is_identically_zero(
            &e,
            &["x", "y", "p"],
            &Assignment::new(),
            &mut sampler,
            &ZeroTestOptions::default(),
        )
        .unwrap();
        assert!(zero);
    }

    #[test]
    fn zero_test_rejects_nonzero_expressions() {
        let mut sampler = Sampler::from_seed(53);
        let zero = is_identically_zero(
            &pe("x + y"),
            &["x", "y", "p"],
            &Assignment::new(),
            &mut sampler,
            &ZeroTestOptions::default(),
        )
        .unwrap();
        assert!(!zero);
    }
}
