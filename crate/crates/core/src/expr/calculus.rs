//! Symbolic differentiation and simultaneous substitution.
//!
//! Both operations treat parameters as constants, memoize on shared
//! subtrees so DAG-shaped expressions cost linear work, and return
//! normalized results.

use super::{normalize, Expr, ExprRef};
use std::collections::HashMap;
use std::sync::Arc;

/// Partial derivative of `e` with respect to the variable `var`.
///
/// Power rule: when the exponent does not involve `var`, the branch-safe
/// form `x * b^(x-1) * b'` applies; otherwise the general form
/// `b^x * (x' * log b + x * b'/b)`.
pub fn differentiate(e: &ExprRef, var: &str) -> ExprRef {
    let mut ctx = DiffContext {
        var,
        memo: HashMap::new(),
        depends: HashMap::new(),
        keys: Vec::new(),
    };
    let raw = ctx.diff(e);
    normalize(&raw)
}

/// Simultaneous substitution of variables and parameters by name. All
/// replacements happen against the original expression: substituting
/// `{x -> y, y -> x}` swaps the two symbols.
pub fn substitute(e: &ExprRef, bindings: &HashMap<String, ExprRef>) -> ExprRef {
    let mut ctx = SubstContext { bindings, memo: HashMap::new(), keys: Vec::new() };
    let raw = ctx.subst(e);
    normalize(&raw)
}

struct DiffContext<'a> {
    var: &'a str,
    memo: HashMap<usize, ExprRef>,
    depends: HashMap<usize, bool>,
    keys: Vec<ExprRef>,
}

impl DiffContext<'_> {
    fn diff(&mut self, e: &ExprRef) -> ExprRef {
        let key = Arc::as_ptr(e) as usize;
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let result = self.diff_uncached(e);
        self.keys.push(e.clone());
        self.memo.insert(key, result.clone());
        result
    }

    fn diff_uncached(&mut self, e: &ExprRef) -> ExprRef {
        match &**e {
            Expr::Rat(_) | Expr::Cplx(_, _) | Expr::Param(_) => Expr::int(0),
            Expr::Var(name) => {
                if name == self.var {
                    Expr::int(1)
                } else {
                    Expr::int(0)
                }
            }
            Expr::Sum(terms) => {
                let parts: Vec<ExprRef> = terms
                    .iter()
                    .map(|t| self.diff(t))
                    .filter(|d| !d.is_zero())
                    .collect();
                Expr::sum(parts)
            }
            Expr::Prod(factors) => {
                let mut parts: Vec<ExprRef> = Vec::new();
                for (k, factor) in factors.iter().enumerate() {
                    let d = self.diff(factor);
                    if d.is_zero() {
                        continue;
                    }
                    let mut term: Vec<ExprRef> = Vec::with_capacity(factors.len());
                    for (j, other) in factors.iter().enumerate() {
                        term.push(if j == k { d.clone() } else { other.clone() });
                    }
                    parts.push(Expr::prod(term));
                }
                Expr::sum(parts)
            }
            Expr::Pow(base, exponent) => {
                let db = self.diff(base);
                if !self.depends_on(exponent) {
                    if db.is_zero() {
                        return Expr::int(0);
                    }
                    let reduced = Expr::sum(vec![exponent.clone(), Expr::int(-1)]);
                    return Expr::prod(vec![
                        exponent.clone(),
                        Expr::pow(base.clone(), reduced),
                        db,
                    ]);
                }
                let dx = self.diff(exponent);
                let mut bracket: Vec<ExprRef> = Vec::new();
                if !dx.is_zero() {
                    bracket.push(Expr::prod(vec![dx, Expr::log(base.clone())]));
                }
                if !db.is_zero() {
                    bracket.push(Expr::prod(vec![
                        exponent.clone(),
                        db,
                        Expr::ipow(base.clone(), -1),
                    ]));
                }
                if bracket.is_empty() {
                    return Expr::int(0);
                }
                Expr::prod(vec![e.clone(), Expr::sum(bracket)])
            }
            Expr::Exp(arg) => {
                let du = self.diff(arg);
                if du.is_zero() {
                    return Expr::int(0);
                }
                Expr::prod(vec![e.clone(), du])
            }
            Expr::Log(arg) => {
                let du = self.diff(arg);
                if du.is_zero() {
                    return Expr::int(0);
                }
                Expr::prod(vec![du, Expr::ipow(arg.clone(), -1)])
            }
        }
    }

    /// True if the subtree mentions the differentiation variable.
    fn depends_on(&mut self, e: &ExprRef) -> bool {
        let key = Arc::as_ptr(e) as usize;
        if let Some(hit) = self.depends.get(&key) {
            return *hit;
        }
        let result = match &**e {
            Expr::Rat(_) | Expr::Cplx(_, _) | Expr::Param(_) => false,
            Expr::Var(name) => name == self.var,
            Expr::Sum(children) | Expr::Prod(children) => {
                children.iter().any(|c| self.depends_on(c))
            }
            Expr::Pow(b, x) => self.depends_on(b) || self.depends_on(x),
            Expr::Exp(u) | Expr::Log(u) => self.depends_on(u),
        };
        self.keys.push(e.clone());
        self.depends.insert(key, result);
        result
    }
}

struct SubstContext<'a> {
    bindings: &'a HashMap<String, ExprRef>,
    memo: HashMap<usize, ExprRef>,
    keys: Vec<ExprRef>,
}

impl SubstContext<'_> {
    fn subst(&mut self, e: &ExprRef) -> ExprRef {
        let key = Arc::as_ptr(e) as usize;
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let result = match &**e {
            Expr::Rat(_) | Expr::Cplx(_, _) => e.clone(),
            Expr::Var(name) | Expr::Param(name) => match self.bindings.get(name) {
                Some(replacement) => replacement.clone(),
                None => e.clone(),
            },
            Expr::Sum(terms) => {
                Expr::sum(terms.iter().map(|t| self.subst(t)).collect())
            }
            Expr::Prod(factors) => {
                Expr::prod(factors.iter().map(|f| self.subst(f)).collect())
            }
            Expr::Pow(b, x) => Expr::pow(self.subst(b), self.subst(x)),
            Expr::Exp(u) => Expr::exp(self.subst(u)),
            Expr::Log(u) => Expr::log(self.subst(u)),
        };
        self.keys.push(e.clone());
        self.memo.insert(key, result.clone());
        result
    }
}
