//! Immutable symbolic expression trees over declared variables and
//! parameters, with exact rational constants.
//!
//! Expressions are shared through [`ExprRef`] (an `Arc`), are immutable
//! after construction, and are safe to use across threads. All operations
//! are pure functions of their inputs. Structural equality and hashing are
//! exact and usable as memoization keys.
//!
//! Construction through [`Expr`]'s helpers builds raw trees; [`normalize`]
//! produces the canonical form every downstream consumer works with:
//! flattened sums and products, exactly folded constants, like factors
//! collected into powers (`b^r * b^s -> b^(r+s)`), zero terms and unit
//! factors dropped. Normalization never distributes products over sums and
//! never attempts rational-function GCD cancellation.

mod calculus;
mod eval;
mod normal;
mod parse;
mod print;

pub use calculus::{differentiate, substitute};
pub use eval::{equal_numeric, evaluate, Assignment, EqualityCheck, EvalError, PointResidual};
pub use normal::{expand, normalize};
pub use parse::{parse, ParseError};
pub use print::print;

use num::BigRational;
use num::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::sync::Arc;

/// Exact rational scalar used for all constants.
pub type Q = BigRational;

/// Shared handle to an immutable expression node.
pub type ExprRef = Arc<Expr>;

/// A node of a symbolic expression tree.
///
/// Rational constants are kept in lowest terms with arbitrary-precision
/// integers; complex literal constants carry exact rational real and
/// imaginary parts (the imaginary part is nonzero after normalization,
/// otherwise the node folds to `Rat`). Variables are subject to
/// differentiation; parameters are treated as constants by it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    /// Exact rational constant.
    Rat(Q),
    /// Complex literal `re + im*i` with exact rational parts.
    Cplx(Q, Q),
    /// Variable, e.g. `x`, `y`, `p` or an abstract `t8`.
    Var(String),
    /// Parameter: a named constant such as `c` or `alpha`.
    Param(String),
    /// Sum of two or more terms.
    Sum(Vec<ExprRef>),
    /// Product of two or more factors.
    Prod(Vec<ExprRef>),
    /// Power with arbitrary expression base and exponent.
    Pow(ExprRef, ExprRef),
    /// Natural exponential.
    Exp(ExprRef),
    /// Natural logarithm (principal branch at evaluation time).
    Log(ExprRef),
}

impl Expr {
    /// Integer constant.
    pub fn int(n: i64) -> ExprRef {
        Arc::new(Expr::Rat(Q::from_integer(n.into())))
    }

    /// Rational constant `n/d`. Panics if `d == 0`.
    pub fn rat(n: i64, d: i64) -> ExprRef {
        assert!(d != 0, "rational constant with zero denominator");
        Arc::new(Expr::Rat(Q::new(n.into(), d.into())))
    }

    /// Rational constant from a `Q`.
    pub fn from_q(q: Q) -> ExprRef {
        Arc::new(Expr::Rat(q))
    }

    /// Complex literal with exact rational parts.
    pub fn complex(re: Q, im: Q) -> ExprRef {
        if im.is_zero() {
            Arc::new(Expr::Rat(re))
        } else {
            Arc::new(Expr::Cplx(re, im))
        }
    }

    /// The imaginary unit.
    pub fn imag_unit() -> ExprRef {
        Arc::new(Expr::Cplx(Q::zero(), Q::one()))
    }

    /// Variable reference.
    pub fn var(name: &str) -> ExprRef {
        Arc::new(Expr::Var(name.to_owned()))
    }

    /// Parameter reference.
    pub fn param(name: &str) -> ExprRef {
        Arc::new(Expr::Param(name.to_owned()))
    }

    /// Sum of the given terms (raw; normalize to canonicalize).
    pub fn sum(terms: Vec<ExprRef>) -> ExprRef {
        match terms.len() {
            0 => Expr::int(0),
            1 => terms.into_iter().next().unwrap(),
            _ => Arc::new(Expr::Sum(terms)),
        }
    }

    /// Product of the given factors (raw; normalize to canonicalize).
    pub fn prod(factors: Vec<ExprRef>) -> ExprRef {
        match factors.len() {
            0 => Expr::int(1),
            1 => factors.into_iter().next().unwrap(),
            _ => Arc::new(Expr::Prod(factors)),
        }
    }

    /// Power `base^exponent`.
    pub fn pow(base: ExprRef, exponent: ExprRef) -> ExprRef {
        Arc::new(Expr::Pow(base, exponent))
    }

    /// Power with integer exponent.
    pub fn ipow(base: ExprRef, exponent: i64) -> ExprRef {
        Expr::pow(base, Expr::int(exponent))
    }

    /// Power with rational exponent `n/d`.
    pub fn qpow(base: ExprRef, n: i64, d: i64) -> ExprRef {
        Expr::pow(base, Expr::rat(n, d))
    }

    /// Natural exponential `exp(arg)`.
    pub fn exp(arg: ExprRef) -> ExprRef {
        Arc::new(Expr::Exp(arg))
    }

    /// Natural logarithm `log(arg)`.
    pub fn log(arg: ExprRef) -> ExprRef {
        Arc::new(Expr::Log(arg))
    }

    /// Negation, represented as `(-1) * e`.
    pub fn neg(e: ExprRef) -> ExprRef {
        Expr::prod(vec![Expr::int(-1), e])
    }

    /// Difference `a - b`.
    pub fn sub(a: ExprRef, b: ExprRef) -> ExprRef {
        Expr::sum(vec![a, Expr::neg(b)])
    }

    /// Quotient, represented as `a * b^(-1)`.
    pub fn div(a: ExprRef, b: ExprRef) -> ExprRef {
        Expr::prod(vec![a, Expr::ipow(b, -1)])
    }

    /// The exact rational value if this node is a rational constant.
    pub fn as_rat(&self) -> Option<&Q> {
        match self {
            Expr::Rat(q) => Some(q),
            _ => None,
        }
    }

    /// The exact integer value if this node is an integer constant that
    /// fits in `i64`.
    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Expr::Rat(q) if q.is_integer() => num::ToPrimitive::to_i64(&q.to_integer()),
            _ => None,
        }
    }

    /// True if this node is the rational constant zero.
    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Rat(q) if q.is_zero())
    }

    /// True if this node is the rational constant one.
    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Rat(q) if q.is_one())
    }

    /// True for `Rat` and `Cplx` nodes.
    pub fn is_constant(&self) -> bool {
        matches!(self, Expr::Rat(_) | Expr::Cplx(_, _))
    }

    /// True if the rational constant is negative (used by the printer).
    pub fn is_negative_rat(&self) -> bool {
        matches!(self, Expr::Rat(q) if q.is_negative())
    }

    /// All free symbol names (variables and parameters), sorted.
    pub fn free_symbols(self: &Arc<Self>) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        collect_symbols(self, true, true, &mut out);
        out
    }

    /// All free variable names, sorted. Parameters are excluded.
    pub fn free_vars(self: &Arc<Self>) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        collect_symbols(self, true, false, &mut out);
        out
    }

    /// True if the expression contains no `Var` node, i.e. it is constant
    /// with respect to every variable (parameters allowed).
    pub fn is_variable_free(self: &Arc<Self>) -> bool {
        self.free_vars().is_empty()
    }
}

fn collect_symbols(e: &ExprRef, vars: bool, params: bool, out: &mut BTreeSet<String>) {
    match &**e {
        Expr::Rat(_) | Expr::Cplx(_, _) => {}
        Expr::Var(name) => {
            if vars {
                out.insert(name.clone());
            }
        }
        Expr::Param(name) => {
            if params {
                out.insert(name.clone());
            }
        }
        Expr::Sum(children) | Expr::Prod(children) => {
            for c in children {
                collect_symbols(c, vars, params, out);
            }
        }
        Expr::Pow(b, x) => {
            collect_symbols(b, vars, params, out);
            collect_symbols(x, vars, params, out);
        }
        Expr::Exp(u) | Expr::Log(u) => collect_symbols(u, vars, params, out),
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", print::print_node(self))
    }
}

/// Declared symbols for parsing: which identifiers are variables and which
/// are parameters. The identifier `i` is reserved for the imaginary unit
/// and `exp`/`log` for the built-in functions; none of them can be
/// declared.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    vars: BTreeSet<String>,
    params: BTreeSet<String>,
}

impl SymbolTable {
    /// Empty table.
    pub fn new() -> Self {
        Self::default()
    }

    /// The standard jet-coordinate table with variables `x`, `y`, `p`.
    pub fn xyp() -> Self {
        Self::new().with_vars(["x", "y", "p"])
    }

    /// Table with variables `t1` through `t18` for work over abstract
    /// t-variables.
    pub fn abstract_t() -> Self {
        let mut table = Self::new();
        for k in 1..=18 {
            table.vars.insert(format!("t{k}"));
        }
        table
    }

    /// Adds variables.
    pub fn with_vars<I: IntoIterator<Item = S>, S: Into<String>>(mut self, names: I) -> Self {
        for n in names {
            self.vars.insert(n.into());
        }
        self
    }

    /// Adds parameters.
    pub fn with_params<I: IntoIterator<Item = S>, S: Into<String>>(mut self, names: I) -> Self {
        for n in names {
            self.params.insert(n.into());
        }
        self
    }

    /// True if `name` is a declared variable.
    pub fn is_var(&self, name: &str) -> bool {
        self.vars.contains(name)
    }

    /// True if `name` is a declared parameter.
    pub fn is_param(&self, name: &str) -> bool {
        self.params.contains(name)
    }

    /// Declared variable names.
    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.vars.iter().map(|s| s.as_str())
    }

    /// Declared parameter names.
    pub fn params(&self) -> impl Iterator<Item = &str> {
        self.params.iter().map(|s| s.as_str())
    }
}

#[cfg(test)]
mod tests;
