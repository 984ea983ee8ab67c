//! Verification suites for the operator side of the construction.
//!
//! Four independent suites cross-check the machinery:
//!
//! * `commutators`: the twelve vector fields of the extended t-system
//!   close under the Lie bracket with the expected structure constants.
//!   This check is exact: coefficient differences are expanded and must
//!   be the zero polynomial.
//! * `inheritance`: each field either annihilates the seven fifth-order
//!   invariants or, for the two scaling fields, acts diagonally with
//!   rational eigenvalues. Residuals are zero-tested numerically over the
//!   abstract t-coordinates.
//! * `zweight`: the invariant monomials in `nu1..nu7` that feed the
//!   classifier all have scaling weight zero, and a deliberately
//!   unbalanced control monomial does not.
//! * `diffops`: the three invariant differentiation operators built from
//!   a concrete equation satisfy the determinant identity
//!   `det(A)^10 t8^5 t12^5 = 5^10` and close pointwise: each commutator
//!   `[Di, Dj]` is a combination of `D1, D2, D3` with point-dependent
//!   coefficients, verified on independent test functions.

use crate::expr::{
    differentiate, evaluate, expand, normalize, parse, Assignment, Expr,
    ExprRef, SymbolTable, Q,
};
use crate::invariants::{
    is_identically_zero, nu_exprs, ZeroTestOptions, MIN_DECISION_POINTS,
};
use crate::jet::{JetContext, JetError, TValues};
use crate::sample::Sampler;
use nalgebra::{Matrix3, Vector3};
use num::Zero;
use num_complex::Complex64;

/// The abstract t-coordinate names, in order.
pub const T_NAMES: [&str; 18] = [
    "t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8", "t9", "t10", "t11",
    "t12", "t13", "t14", "t15", "t16", "t17", "t18",
];

/// Scaling weights of `nu1..nu7`. A monomial in the nus is invariant
/// under both scaling flows exactly when its total weight vanishes; the
/// weights are minus five times the eigenvalues in the inheritance table.
pub const NU_WEIGHTS: [i64; 7] = [8, 7, 11, 10, -2, -3, 1];

/// Eigenvalues of the two diagonal fields on `nu1..nu7`, as `(num, den)`.
const DIAGONAL_EIGENVALUES: [(i64, i64); 7] =
    [(-8, 5), (-7, 5), (-11, 5), (-2, 1), (2, 5), (3, 5), (-1, 5)];

/// Indices (into [`t_system_fields`]) of the fields with diagonal action.
const DIAGONAL_FIELDS: [usize; 2] = [2, 7];

/// A vector field on the eighteen-dimensional t-space, given by its
/// coefficients against `d/dt1 .. d/dt18`.
#[derive(Debug, Clone)]
pub struct TVectorField {
    /// Short name used in reports.
    pub name: &'static str,
    /// Coefficient of `d/dtk` at index `k - 1`.
    pub coeffs: [ExprRef; 18],
}

/// Sparse table of the twelve symmetry generators of the extended
/// t-system: the lifted point-symmetry generators `X1..X6` followed by
/// the complementary generators `T1..T6`. Entries are 1-based slots.
const FIELD_TABLE: [(&str, &[(usize, &str)]); 12] = [
    ("X1", &[(2, "1")]),
    ("X2", &[(3, "1"), (17, "t16")]),
    (
        "X3",
        &[
            (3, "t3"),
            (4, "t4"),
            (6, "-t6"),
            (7, "-2*t7"),
            (8, "-3*t8"),
            (9, "-4*t9"),
            (10, "-4*t10"),
            (11, "-3*t11"),
            (12, "-t12"),
            (13, "-2*t13"),
            (14, "-2*t14"),
            (15, "-t15"),
            (17, "t17"),
            (18, "t18"),
        ],
    ),
    ("X4", &[(4, "1"), (18, "t16")]),
    (
        "X5",
        &[
            (4, "2*t3"),
            (5, "2"),
            (9, "-t10"),
            (11, "-3*t8"),
            (13, "-t14"),
            (15, "t12"),
            (18, "t17 + t16*t3"),
        ],
    ),
    (
        "X6",
        &[
            (4, "t3^2"),
            (5, "2*t3"),
            (6, "2"),
            (9, "-3*t8 - t3*t10"),
            (11, "-3*t3*t8"),
            (13, "-t3*t14 - t12"),
            (15, "t3*t12"),
            (18, "t17*t3"),
        ],
    ),
    ("T1", &[(1, "1")]),
    (
        "T2",
        &[
            (3, "-t3"),
            (4, "-2*t4"),
            (5, "-t5"),
            (7, "t7"),
            (8, "2*t8"),
            (9, "2*t9"),
            (10, "3*t10"),
            (11, "t11"),
            (12, "-2*t12"),
            (13, "-2*t13"),
            (14, "-t14"),
            (15, "-3*t15"),
            (16, "t16"),
            (18, "-t18"),
        ],
    ),
    (
        "T3",
        &[
            (3, "-t3^2"),
            (4, "-3*t4*t3"),
            (5, "-t5*t3 - 3*t4"),
            (6, "-4*t5 + t3*t6"),
            (7, "-3*t6 + 3*t3*t7"),
            (8, "5*t3*t8"),
            (9, "-t11 + t4*t10 + 6*t3*t9"),
            (10, "5*t8 + 7*t3*t10"),
            (11, "5*t4*t8 + 4*t3*t11"),
            (12, "-t3*t12"),
            (13, "t5*t12 + t4*t14 - t15"),
            (14, "t3*t14 - t12"),
            (15, "-4*t4*t12 - 2*t3*t15"),
            (16, "t17"),
            (18, "-2*t18*t3"),
        ],
    ),
    (
        "T4",
        &[
            (4, "-t3"),
            (5, "-1"),
            (11, "2*t8"),
            (15, "-3*t12"),
            (18, "-t16*t3"),
        ],
    ),
    (
        "T5",
        &[
            (4, "-2*t3^2"),
            (5, "-4*t3"),
            (6, "-4"),
            (9, "t3*t10 + 2*t8"),
            (11, "7*t3*t8"),
            (13, "t3*t14 - 2*t12"),
            (15, "-7*t3*t12"),
            (18, "-t16*t3^2 - t17*t3"),
        ],
    ),
    (
        "T6",
        &[
            (4, "-t3^3"),
            (5, "-3*t3^2"),
            (6, "-6*t3"),
            (7, "-6"),
            (9, "t3^2*t10 + 5*t3*t8"),
            (11, "5*t3^2*t8"),
            (13, "-t3*t12 + t3^2*t14"),
            (15, "-4*t3^2*t12"),
            (18, "-t17*t3^2"),
        ],
    ),
];

/// Nonzero brackets among the twelve fields: `[a, b]` equals the listed
/// integer combination of fields. Pairs not listed bracket to zero.
/// Indices are 0-based into the [`t_system_fields`] order.
const BRACKET_TABLE: [((usize, usize), &[(i64, usize)]); 23] = [
    ((1, 2), &[(1, 1)]),
    ((1, 4), &[(2, 3)]),
    ((1, 5), &[(1, 4)]),
    ((1, 7), &[(-1, 1)]),
    ((1, 8), &[(1, 7), (-1, 2)]),
    ((1, 9), &[(-1, 3)]),
    ((1, 10), &[(-1, 4), (2, 9)]),
    ((1, 11), &[(-1, 5), (1, 10)]),
    ((2, 3), &[(-1, 3)]),
    ((2, 5), &[(1, 5)]),
    ((2, 8), &[(1, 8)]),
    ((2, 10), &[(1, 10)]),
    ((2, 11), &[(2, 11)]),
    ((3, 7), &[(-2, 3)]),
    ((3, 8), &[(1, 9), (-1, 4)]),
    ((4, 7), &[(-1, 4)]),
    ((4, 8), &[(-2, 5), (1, 10)]),
    ((5, 8), &[(1, 11)]),
    ((7, 8), &[(-1, 8)]),
    ((7, 9), &[(1, 9)]),
    ((7, 11), &[(-1, 11)]),
    ((8, 9), &[(1, 10)]),
    ((8, 10), &[(2, 11)]),
];

/// The twelve symmetry generators of the extended t-system.
pub fn t_system_fields() -> Vec<TVectorField> {
    let syms = SymbolTable::abstract_t();
    FIELD_TABLE
        .iter()
        .map(|(name, entries)| {
            let mut coeffs: [ExprRef; 18] = std::array::from_fn(|_| Expr::int(0));
            for (slot, src) in *entries {
                coeffs[slot - 1] = parse(src, &syms).expect("field coefficient parses");
            }
            TVectorField { name, coeffs }
        })
        .collect()
}

/// Applies the field to a scalar expression over the t-coordinates.
pub fn apply_field(field: &TVectorField, e: &ExprRef) -> ExprRef {
    let grad = t_gradient(e);
    apply_with_gradient(field, &grad)
}

/// Gradient of `e` with respect to `t1..t18`.
fn t_gradient(e: &ExprRef) -> [ExprRef; 18] {
    std::array::from_fn(|idx| differentiate(e, T_NAMES[idx]))
}

fn apply_with_gradient(field: &TVectorField, grad: &[ExprRef; 18]) -> ExprRef {
    let terms: Vec<ExprRef> = field
        .coeffs
        .iter()
        .zip(grad.iter())
        .filter(|(c, g)| !c.is_zero() && !g.is_zero())
        .map(|(c, g)| Expr::prod(vec![c.clone(), g.clone()]))
        .collect();
    normalize(&Expr::sum(terms))
}

/// Coefficients of the Lie bracket `[a, b]` as a field on t-space.
pub fn field_commutator(a: &TVectorField, b: &TVectorField) -> [ExprRef; 18] {
    std::array::from_fn(|idx| {
        normalize(&Expr::sub(
            apply_field(a, &b.coeffs[idx]),
            apply_field(b, &a.coeffs[idx]),
        ))
    })
}

/// One labelled check inside a suite.
#[derive(Debug, Clone)]
pub struct CheckLine {
    /// What was checked.
    pub label: String,
    /// Whether it held.
    pub passed: bool,
    /// Residual magnitudes or the reason for failure; empty when there is
    /// nothing to add.
    pub detail: String,
}

/// Outcome of one verification suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    /// Suite name as used by the command line.
    pub name: &'static str,
    /// Every check, in execution order.
    pub lines: Vec<CheckLine>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport { name, lines: Vec::new() }
    }

    fn record(&mut self, label: String, passed: bool, detail: String) {
        self.lines.push(CheckLine { label, passed, detail });
    }

    /// True when every line passed.
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|line| line.passed)
    }
}

/// Checks all 66 brackets of the twelve fields against the structure
/// constants, exactly.
pub fn verify_commutators() -> SuiteReport {
    let fields = t_system_fields();
    let mut report = SuiteReport::new("commutators");
    for i in 0..fields.len() {
        for j in (i + 1)..fields.len() {
            let actual = field_commutator(&fields[i], &fields[j]);
            let expected_combo = BRACKET_TABLE
                .iter()
                .find(|((a, b), _)| (*a, *b) == (i, j))
                .map(|(_, combo)| *combo)
                .unwrap_or(&[]);
            let label = format!(
                "[{}, {}] = {}",
                fields[i].name,
                fields[j].name,
                describe_combo(expected_combo, &fields),
            );
            let mut bad_slot = None;
            for slot in 0..18 {
                let expected = Expr::sum(
                    expected_combo
                        .iter()
                        .map(|(c, k)| {
                            Expr::prod(vec![
                                Expr::int(*c),
                                fields[*k].coeffs[slot].clone(),
                            ])
                        })
                        .collect(),
                );
                let diff = expand(&Expr::sub(actual[slot].clone(), expected));
                if !diff.is_zero() {
                    bad_slot = Some(slot);
                    break;
                }
            }
            match bad_slot {
                None => report.record(label, true, String::new()),
                Some(slot) => report.record(
                    label,
                    false,
                    format!("coefficient of d/dt{} differs", slot + 1),
                ),
            }
        }
    }
    report
}

fn describe_combo(combo: &[(i64, usize)], fields: &[TVectorField]) -> String {
    if combo.is_empty() {
        return "0".to_owned();
    }
    let mut out = String::new();
    for (idx, (c, k)) in combo.iter().enumerate() {
        let name = fields[*k].name;
        let piece = match (*c, idx) {
            (1, 0) => name.to_owned(),
            (-1, 0) => format!("-{name}"),
            (c, 0) => format!("{c} {name}"),
            (1, _) => format!(" + {name}"),
            (-1, _) => format!(" - {name}"),
            (c, _) if c < 0 => format!(" - {} {name}", -c),
            (c, _) => format!(" + {c} {name}"),
        };
        out.push_str(&piece);
    }
    out
}

/// Checks the action of every field on `nu1..nu7` over the abstract
/// t-coordinates: annihilation, except for the two scaling fields which
/// must act diagonally with the tabulated eigenvalues.
pub fn verify_inheritance(seed: u64) -> SuiteReport {
    let fields = t_system_fields();
    let nus = nu_exprs(&TValues::abstract_vars());
    let grads: Vec<[ExprRef; 18]> = nus.iter().map(t_gradient).collect();

    let mut report = SuiteReport::new("inheritance");
    let mut sampler = Sampler::from_seed(seed);
    let options = ZeroTestOptions { points: 20, tol: 1e-9 };
    let base = Assignment::new();
    for (fidx, field) in fields.iter().enumerate() {
        for (nidx, nu) in nus.iter().enumerate() {
            let eigen = if DIAGONAL_FIELDS.contains(&fidx) {
                let (n, d) = DIAGONAL_EIGENVALUES[nidx];
                Some(Q::new(n.into(), d.into()))
            } else {
                None
            };
            let applied = apply_with_gradient(field, &grads[nidx]);
            let residual = match &eigen {
                None => applied,
                Some(q) => normalize(&Expr::sub(
                    applied,
                    Expr::prod(vec![Expr::from_q(q.clone()), nu.clone()]),
                )),
            };
            let label = match &eigen {
                None => format!("{} nu{} = 0", field.name, nidx + 1),
                Some(q) => format!("{} nu{} = ({}) nu{}", field.name, nidx + 1, q, nidx + 1),
            };
            match is_identically_zero(&residual, &T_NAMES, &base, &mut sampler, &options) {
                Ok(true) => report.record(label, true, String::new()),
                Ok(false) => {
                    report.record(label, false, "residual does not vanish".to_owned())
                }
                Err(err) => report.record(label, false, err.to_string()),
            }
        }
    }
    report
}

/// A monomial `nu1^e1 .. nu7^e7` with rational exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NuMonomial {
    /// Exponent of `nu_k` at index `k - 1`.
    pub exponents: [Q; 7],
}

impl NuMonomial {
    /// Monomial from `(numerator, denominator)` exponent pairs.
    pub fn new(exponents: [(i64, i64); 7]) -> Self {
        NuMonomial {
            exponents: exponents.map(|(n, d)| Q::new(n.into(), d.into())),
        }
    }

    /// Total scaling weight under [`NU_WEIGHTS`].
    pub fn weight(&self) -> Q {
        self.exponents
            .iter()
            .zip(NU_WEIGHTS)
            .map(|(e, w)| e * Q::from_integer(w.into()))
            .fold(Q::zero(), |acc, term| acc + term)
    }
}

/// The six invariant monomials the classifier relies on, by name.
pub fn invariant_monomials() -> [(&'static str, NuMonomial); 6] {
    let z = (0, 1);
    [
        ("beta1", NuMonomial::new([(-7, 2), (4, 1), z, z, z, z, z])),
        ("beta2", NuMonomial::new([(-11, 2), z, (4, 1), z, z, z, z])),
        ("beta3", NuMonomial::new([(-5, 1), z, z, (4, 1), z, z, z])),
        ("gamma1", NuMonomial::new([(2, 1), z, z, z, (8, 1), z, z])),
        ("gamma2", NuMonomial::new([(3, 1), z, z, z, z, (8, 1), z])),
        ("gamma3", NuMonomial::new([(-1, 1), z, z, z, z, z, (8, 1)])),
    ]
}

/// Checks that every invariant monomial has weight zero, that the weights
/// agree with the diagonal eigenvalues, and that an unbalanced control
/// monomial is caught.
pub fn verify_scaling_weights() -> SuiteReport {
    let mut report = SuiteReport::new("zweight");
    for (name, monomial) in invariant_monomials() {
        let w = monomial.weight();
        report.record(
            format!("weight({name}) = 0"),
            w.is_zero(),
            if w.is_zero() { String::new() } else { format!("weight is {w}") },
        );
    }
    let control = NuMonomial::new([(-3, 1), (4, 1), (0, 1), (0, 1), (0, 1), (0, 1), (0, 1)]);
    let w = control.weight();
    let expected = Q::from_integer(4.into());
    report.record(
        "weight(nu2^4 nu1^-3) = 4".to_owned(),
        w == expected,
        if w == expected { String::new() } else { format!("weight is {w}") },
    );
    for (idx, (n, d)) in DIAGONAL_EIGENVALUES.iter().enumerate() {
        let eigen = Q::new((*n).into(), (*d).into());
        let implied = Q::from_integer((-5).into()) * &eigen;
        let tabled = Q::from_integer(NU_WEIGHTS[idx].into());
        report.record(
            format!("weight(nu{}) = -5 eigenvalue(nu{})", idx + 1, idx + 1),
            implied == tabled,
            if implied == tabled {
                String::new()
            } else {
                format!("-5 * {eigen} = {implied}, table says {tabled}")
            },
        );
    }
    report
}

/// A first-order operator `kx d/dx + ky d/dy + kp d/dp`.
#[derive(Debug, Clone)]
pub struct XYPVectorField {
    /// Coefficient of `d/dx`.
    pub kx: ExprRef,
    /// Coefficient of `d/dy`.
    pub ky: ExprRef,
    /// Coefficient of `d/dp`.
    pub kp: ExprRef,
}

impl XYPVectorField {
    /// Applies the operator to a scalar expression.
    pub fn apply(&self, e: &ExprRef) -> ExprRef {
        normalize(&Expr::sum(vec![
            Expr::prod(vec![self.kx.clone(), differentiate(e, "x")]),
            Expr::prod(vec![self.ky.clone(), differentiate(e, "y")]),
            Expr::prod(vec![self.kp.clone(), differentiate(e, "p")]),
        ]))
    }

    /// Lie bracket with another operator.
    pub fn commutator(&self, other: &XYPVectorField) -> XYPVectorField {
        XYPVectorField {
            kx: normalize(&Expr::sub(self.apply(&other.kx), other.apply(&self.kx))),
            ky: normalize(&Expr::sub(self.apply(&other.ky), other.apply(&self.ky))),
            kp: normalize(&Expr::sub(self.apply(&other.kp), other.apply(&self.kp))),
        }
    }
}

/// The three invariant differentiation operators of the equation held by
/// `ctx`, valid where `t8` and `t12` do not vanish.
///
/// `D1` rescales `d/dp`, `D2` rescales the total derivative, and `D3`
/// combines both with first derivatives of `t8`; the scalar prefactors
/// carry the powers of `t8` and `nu1` that make the operators map
/// invariants to invariants.
pub fn invariant_diff_ops(ctx: &JetContext) -> Result<[XYPVectorField; 3], JetError> {
    let t = ctx.t_values()?;
    let g = |k: usize| t.get(k).clone();
    let nu1 = normalize(&Expr::prod(vec![Expr::qpow(g(8), 1, 5), g(12)]));

    let d1_scale = Expr::prod(vec![
        Expr::qpow(g(8), -2, 5),
        Expr::qpow(nu1.clone(), 1, 8),
    ]);
    let d1 = XYPVectorField {
        kx: Expr::int(0),
        ky: Expr::int(0),
        kp: normalize(&d1_scale),
    };

    let d2_scale = Expr::prod(vec![
        Expr::qpow(g(8), 1, 5),
        Expr::qpow(nu1.clone(), -3, 8),
    ]);
    let d2 = XYPVectorField {
        kx: normalize(&d2_scale),
        ky: normalize(&Expr::prod(vec![d2_scale.clone(), Expr::var("p")])),
        kp: normalize(&Expr::prod(vec![d2_scale.clone(), g(4)])),
    };

    let d3_scale = Expr::prod(vec![
        Expr::qpow(g(8), -6, 5),
        Expr::qpow(nu1, -1, 4),
    ]);
    let d3 = XYPVectorField {
        kx: normalize(&Expr::prod(vec![d3_scale.clone(), g(10)])),
        ky: normalize(&Expr::prod(vec![
            d3_scale.clone(),
            Expr::sum(vec![
                Expr::prod(vec![Expr::int(5), g(8)]),
                Expr::prod(vec![Expr::var("p"), g(10)]),
            ]),
        ])),
        kp: normalize(&Expr::prod(vec![
            d3_scale,
            Expr::sum(vec![
                Expr::prod(vec![Expr::int(10), g(5), g(8)]),
                Expr::prod(vec![g(4), g(10)]),
                Expr::prod(vec![Expr::int(5), g(11)]),
            ]),
        ])),
    };
    Ok([d1, d2, d3])
}

/// Right-hand sides used to exercise the operator checks; both keep `t8`,
/// `t12` and `nu1` positive at positive real sample points.
const DIFF_OP_EQUATIONS: [&str; 2] = ["exp(-p)", "exp(p) + p^5"];

/// Test functions for the pointwise closure of the operator brackets.
const CLOSURE_PROBES: [&str; 2] = ["x*y + p^2", "exp(x) + y*p"];

const DIFF_OP_POINTS: usize = 8;
const DIFF_OP_TOL: f64 = 1e-6;

/// Checks the determinant identity and the pointwise closure of the
/// operator brackets on the catalog equations.
pub fn verify_diff_ops(seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("diffops");
    let syms = SymbolTable::xyp();
    let mut sampler = Sampler::from_seed(seed);
    for src in DIFF_OP_EQUATIONS {
        let ctx = JetContext::new(parse(src, &syms).expect("test equation parses"));
        match invariant_diff_ops(&ctx) {
            Ok(ops) => {
                check_determinant(&mut report, src, &ctx, &ops, &mut sampler);
                check_closure(&mut report, src, &ops, &mut sampler, &syms);
            }
            Err(err) => {
                report.record(
                    format!("operators build for f = {src}"),
                    false,
                    err.to_string(),
                );
            }
        }
    }
    report
}

fn operator_matrix_at(
    ops: &[XYPVectorField; 3],
    at: &Assignment,
) -> Option<Matrix3<Complex64>> {
    let mut entries = [[Complex64::zero(); 3]; 3];
    for (col, op) in ops.iter().enumerate() {
        for (row, coeff) in [&op.kx, &op.ky, &op.kp].into_iter().enumerate() {
            entries[row][col] = evaluate(coeff, at).ok()?;
        }
    }
    Some(Matrix3::new(
        entries[0][0], entries[0][1], entries[0][2],
        entries[1][0], entries[1][1], entries[1][2],
        entries[2][0], entries[2][1], entries[2][2],
    ))
}

fn check_determinant(
    report: &mut SuiteReport,
    src: &str,
    ctx: &JetContext,
    ops: &[XYPVectorField; 3],
    sampler: &mut Sampler,
) {
    let label = format!("det(A)^10 t8^5 t12^5 = 5^10 for f = {src}");
    let t = match ctx.t_values() {
        Ok(t) => t,
        Err(err) => {
            report.record(label, false, err.to_string());
            return;
        }
    };
    let expected = Complex64::new(9_765_625.0, 0.0);
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for _ in 0..DIFF_OP_POINTS {
        let at = sampler.positive_real_assignment(&["x", "y", "p"]);
        let matrix = match operator_matrix_at(ops, &at) {
            Some(m) => m,
            None => continue,
        };
        let (t8v, t12v) = match (evaluate(t.get(8), &at), evaluate(t.get(12), &at)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        let value = matrix.determinant().powi(10) * t8v.powi(5) * t12v.powi(5);
        worst = worst.max((value - expected).norm() / expected.norm());
        checked += 1;
    }
    if checked < MIN_DECISION_POINTS {
        report.record(
            label,
            false,
            format!("only {checked} points evaluated cleanly"),
        );
    } else {
        report.record(
            label,
            worst <= DIFF_OP_TOL,
            format!("max relative error {worst:.3e} over {checked} points"),
        );
    }
}

fn check_closure(
    report: &mut SuiteReport,
    src: &str,
    ops: &[XYPVectorField; 3],
    sampler: &mut Sampler,
    syms: &SymbolTable,
) {
    let probes: Vec<ExprRef> = CLOSURE_PROBES
        .iter()
        .map(|probe| parse(probe, syms).expect("probe parses"))
        .collect();
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let label = format!("[D{}, D{}] in span(D1, D2, D3) for f = {src}", i + 1, j + 1);
        let bracket = ops[i].commutator(&ops[j]);
        let bracket_probes: Vec<ExprRef> =
            probes.iter().map(|h| bracket.apply(h)).collect();
        let op_probes: Vec<[ExprRef; 3]> = probes
            .iter()
            .map(|h| std::array::from_fn(|k| ops[k].apply(h)))
            .collect();

        let mut checked = 0usize;
        let mut worst = 0.0f64;
        let mut failed = false;
        'points: for _ in 0..DIFF_OP_POINTS {
            let at = sampler.positive_real_assignment(&["x", "y", "p"]);
            let matrix = match operator_matrix_at(ops, &at) {
                Some(m) => m,
                None => continue,
            };
            let rhs = match [&bracket.kx, &bracket.ky, &bracket.kp]
                .map(|c| evaluate(c, &at))
            {
                [Ok(a), Ok(b), Ok(c)] => Vector3::new(a, b, c),
                _ => continue,
            };
            let lambda = match matrix.lu().solve(&rhs) {
                Some(l) => l,
                None => continue,
            };
            for (h_idx, bracket_h) in bracket_probes.iter().enumerate() {
                let lhs = match evaluate(bracket_h, &at) {
                    Ok(v) => v,
                    Err(_) => continue 'points,
                };
                let mut combo = Complex64::zero();
                let mut scale = lhs.norm();
                let mut clean = true;
                for k in 0..3 {
                    match evaluate(&op_probes[h_idx][k], &at) {
                        Ok(v) => {
                            combo += lambda[k] * v;
                            scale += (lambda[k] * v).norm();
                        }
                        Err(_) => {
                            clean = false;
                            break;
                        }
                    }
                }
                if !clean {
                    continue 'points;
                }
                let rel = (lhs - combo).norm() / (1.0 + scale);
                worst = worst.max(rel);
                if rel > DIFF_OP_TOL {
                    failed = true;
                }
            }
            checked += 1;
        }
        if checked < MIN_DECISION_POINTS {
            report.record(
                label,
                false,
                format!("only {checked} points evaluated cleanly"),
            );
        } else {
            report.record(
                label,
                !failed,
                format!("max relative residual {worst:.3e} over {checked} points"),
            );
        }
    }
}

/// Runs every suite with one seed.
pub fn verify_all(seed: u64) -> Vec<SuiteReport> {
    vec![
        verify_commutators(),
        verify_inheritance(seed),
        verify_scaling_weights(),
        verify_diff_ops(seed),
    ]
}
