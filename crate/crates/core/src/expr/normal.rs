//! Canonical normal form and polynomial expansion.
//!
//! `normalize` flattens nested sums and products, folds constant
//! subexpressions exactly, collects like terms and like factors, and
//! applies a small set of value-preserving rewrites. It never distributes
//! products over sums, so factored input stays factored. `expand`
//! additionally multiplies out products of sums and small integer powers
//! of sums, producing the distributed polynomial normal form used for
//! exact identity checks.

use super::{Expr, ExprRef, Q};
use num::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// Normalizes an expression to its canonical form.
///
/// Idempotent: `normalize(&normalize(e)) == normalize(e)`. Preserves the
/// value at every point of the common domain of definition.
pub fn normalize(e: &ExprRef) -> ExprRef {
    Normalizer::default().norm(e)
}

/// Expands products over sums and small integer powers of sums, then
/// normalizes. Intended for polynomial expressions where a distributed
/// form makes equality checks purely structural.
pub fn expand(e: &ExprRef) -> ExprRef {
    let expanded = Expander::default().expand(e);
    normalize(&expanded)
}

/// Exact complex-rational scalar used for constant folding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct CQ {
    pub re: Q,
    pub im: Q,
}

impl CQ {
    pub fn zero() -> Self {
        CQ { re: Q::zero(), im: Q::zero() }
    }

    pub fn one() -> Self {
        CQ { re: Q::one(), im: Q::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn add(&self, other: &CQ) -> CQ {
        CQ { re: &self.re + &other.re, im: &self.im + &other.im }
    }

    pub fn mul(&self, other: &CQ) -> CQ {
        CQ {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }

    /// Exact reciprocal; `None` for zero.
    pub fn recip(&self) -> Option<CQ> {
        let denom = &self.re * &self.re + &self.im * &self.im;
        if denom.is_zero() {
            return None;
        }
        Some(CQ { re: &self.re / &denom, im: -(&self.im / &denom) })
    }

    /// Exact integer power; `None` when inverting zero.
    pub fn powi(&self, n: i64) -> Option<CQ> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        let mut result = CQ::one();
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        Some(result)
    }

    pub fn from_expr(e: &Expr) -> Option<CQ> {
        match e {
            Expr::Rat(q) => Some(CQ { re: q.clone(), im: Q::zero() }),
            Expr::Cplx(re, im) => Some(CQ { re: re.clone(), im: im.clone() }),
            _ => None,
        }
    }

    pub fn to_expr(&self) -> ExprRef {
        Expr::complex(self.re.clone(), self.im.clone())
    }
}

/// Constant folding of integer powers is capped so pathological inputs
/// cannot force gigantic exact integers during normalization.
const POW_FOLD_CAP: i64 = 4096;

/// Per-call normalizer. The memo is keyed by node address; `keys` owns a
/// clone of every memoized node so an address can never be reused by a
/// fresh allocation while the memo is alive.
#[derive(Default)]
struct Normalizer {
    memo: HashMap<usize, ExprRef>,
    keys: Vec<ExprRef>,
}

impl Normalizer {
    fn norm(&mut self, e: &ExprRef) -> ExprRef {
        let key = Arc::as_ptr(e) as usize;
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let result = self.norm_uncached(e);
        self.keys.push(e.clone());
        self.memo.insert(key, result.clone());
        result
    }

    fn norm_uncached(&mut self, e: &ExprRef) -> ExprRef {
        match &**e {
            Expr::Rat(_) | Expr::Var(_) | Expr::Param(_) => e.clone(),
            Expr::Cplx(re, im) => {
                if im.is_zero() {
                    Arc::new(Expr::Rat(re.clone()))
                } else {
                    e.clone()
                }
            }
            Expr::Sum(terms) => {
                let normed: Vec<ExprRef> = terms.iter().map(|t| self.norm(t)).collect();
                self.norm_sum(normed)
            }
            Expr::Prod(factors) => {
                let normed: Vec<ExprRef> = factors.iter().map(|f| self.norm(f)).collect();
                self.norm_prod(normed)
            }
            Expr::Pow(base, exponent) => {
                let b = self.norm(base);
                let x = self.norm(exponent);
                self.norm_pow(b, x)
            }
            Expr::Exp(arg) => {
                let u = self.norm(arg);
                norm_exp(u)
            }
            Expr::Log(arg) => {
                let u = self.norm(arg);
                norm_log(u)
            }
        }
    }

    /// Canonical sum of already-normalized terms: flatten, fold constants,
    /// group terms by their non-constant core, order deterministically.
    fn norm_sum(&mut self, terms: Vec<ExprRef>) -> ExprRef {
        let mut constant = CQ::zero();
        let mut by_core: BTreeMap<ExprRef, CQ> = BTreeMap::new();

        let mut queue: Vec<ExprRef> = terms;
        queue.reverse();
        while let Some(term) = queue.pop() {
            if let Expr::Sum(inner) = &*term {
                for t in inner.iter().rev() {
                    queue.push(t.clone());
                }
                continue;
            }
            let (coeff, core) = split_coefficient(&term);
            match core {
                None => constant = constant.add(&coeff),
                Some(core) => {
                    let entry = by_core.entry(core).or_insert_with(CQ::zero);
                    *entry = entry.add(&coeff);
                }
            }
        }

        let mut out: Vec<ExprRef> = Vec::with_capacity(by_core.len() + 1);
        if !constant.is_zero() {
            out.push(constant.to_expr());
        }
        for (core, coeff) in by_core {
            if coeff.is_zero() {
                continue;
            }
            out.push(attach_coefficient(coeff, core));
        }
        match out.len() {
            0 => Expr::int(0),
            1 => out.into_iter().next().unwrap(),
            _ => Arc::new(Expr::Sum(out)),
        }
    }

    /// Canonical product of already-normalized factors: flatten, fold
    /// constants, merge exponential factors, and collect powers of a
    /// common base by summing exponents. A merge can mint a factor that
    /// belongs in a different bucket (an integer power of an exponential
    /// becomes a bare exponential, a collapsed power changes its base),
    /// so merging repeats until the factor list is stable.
    fn norm_prod(&mut self, factors: Vec<ExprRef>) -> ExprRef {
        let mut factors = factors;
        let mut rounds = 0;
        loop {
            let (result, rescan) = self.norm_prod_once(factors);
            if !rescan {
                return result;
            }
            match &*result {
                Expr::Prod(inner) if rounds < 8 => {
                    rounds += 1;
                    factors = inner.clone();
                }
                Expr::Prod(_) => {
                    debug_assert!(false, "product merging failed to stabilize");
                    return result;
                }
                // A lone factor has nothing left to interact with.
                _ => return result,
            }
        }
    }

    /// One bucketing-and-merging pass. The flag reports whether a merged
    /// factor landed outside the bucket it was built from, meaning
    /// another pass could still combine it with its neighbors.
    fn norm_prod_once(&mut self, factors: Vec<ExprRef>) -> (ExprRef, bool) {
        let mut constant = CQ::one();
        let mut by_base: BTreeMap<ExprRef, Vec<ExprRef>> = BTreeMap::new();
        let mut exp_args: Vec<ExprRef> = Vec::new();
        let mut rescan = false;

        let mut queue: Vec<ExprRef> = factors;
        queue.reverse();
        while let Some(factor) = queue.pop() {
            match &*factor {
                Expr::Prod(inner) => {
                    for f in inner.iter().rev() {
                        queue.push(f.clone());
                    }
                }
                Expr::Rat(_) | Expr::Cplx(_, _) => {
                    let c = CQ::from_expr(&factor).unwrap();
                    if c.is_zero() {
                        return (Expr::int(0), false);
                    }
                    constant = constant.mul(&c);
                }
                Expr::Exp(arg) => exp_args.push(arg.clone()),
                Expr::Pow(base, exponent) => {
                    by_base.entry(base.clone()).or_default().push(exponent.clone());
                }
                _ => {
                    by_base.entry(factor.clone()).or_default().push(Expr::int(1));
                }
            }
        }

        let mut out: Vec<ExprRef> = Vec::with_capacity(by_base.len() + 1);
        for (base, exponents) in by_base {
            let total = if exponents.len() == 1 {
                exponents.into_iter().next().unwrap()
            } else {
                let normalized: Vec<ExprRef> =
                    exponents.iter().map(|x| self.norm(x)).collect();
                self.norm_sum(normalized)
            };
            if total.is_zero() {
                continue;
            }
            let factor = if total.is_one() {
                base.clone()
            } else {
                self.norm_pow(base.clone(), total)
            };
            match CQ::from_expr(&factor) {
                Some(c) => {
                    if c.is_zero() {
                        return (Expr::int(0), false);
                    }
                    constant = constant.mul(&c);
                }
                None => {
                    let stable = match &*factor {
                        Expr::Exp(_) | Expr::Prod(_) => false,
                        Expr::Pow(b, _) => *b == base,
                        _ => factor == base,
                    };
                    rescan |= !stable;
                    out.push(factor);
                }
            }
        }
        if !exp_args.is_empty() {
            let merged = norm_exp(self.norm_sum(exp_args));
            match CQ::from_expr(&merged) {
                Some(c) => {
                    if c.is_zero() {
                        return (Expr::int(0), false);
                    }
                    constant = constant.mul(&c);
                }
                None => {
                    // exp(log v) unwrapping can hand back any shape.
                    rescan |= !matches!(&*merged, Expr::Exp(_));
                    out.push(merged);
                }
            }
        }

        out.sort();
        // Scalar coefficients never distribute over sum factors: the
        // rewrite is not confluent under flattening (a nested scalar
        // times a lone sum would distribute while the flat product keeps
        // the scalar beside its siblings), so factored stays factored.
        if !constant.is_one() || out.is_empty() {
            out.insert(0, constant.to_expr());
        }
        let result = match out.len() {
            0 => Expr::int(1),
            1 => out.into_iter().next().unwrap(),
            _ => Arc::new(Expr::Prod(out)),
        };
        (result, rescan)
    }

    /// Power rules for normalized `base` and `exponent`. Structural
    /// rewrites through products, powers, and exponentials apply only for
    /// integer exponents, where they hold on every branch.
    fn norm_pow(&mut self, base: ExprRef, exponent: ExprRef) -> ExprRef {
        if exponent.is_zero() {
            // b^0 -> 1; evaluation handles literal 0^0 as an error, but as
            // a symbolic rewrite the unit convention is standard.
            return Expr::int(1);
        }
        if exponent.is_one() {
            return base;
        }
        if base.is_one() {
            return Expr::int(1);
        }
        if base.is_zero() {
            // 0^w -> 0 only when the exponent is a constant with positive
            // real part; otherwise the power stays unevaluated and
            // evaluation reports the error.
            if let Some(c) = CQ::from_expr(&exponent) {
                if c.re.is_positive() {
                    return Expr::int(0);
                }
            }
            return Arc::new(Expr::Pow(base, exponent));
        }

        if let Some(n) = exponent.as_integer() {
            if let Some(c) = CQ::from_expr(&base) {
                if n.abs() <= POW_FOLD_CAP {
                    if let Some(folded) = c.powi(n) {
                        return folded.to_expr();
                    }
                }
            }
            match &*base {
                Expr::Pow(inner_base, inner_exp) => {
                    let merged =
                        self.norm(&Expr::prod(vec![inner_exp.clone(), Expr::int(n)]));
                    return self.norm_pow(inner_base.clone(), merged);
                }
                Expr::Prod(factors) => {
                    let powered: Vec<ExprRef> = factors
                        .iter()
                        .map(|f| self.norm_pow(f.clone(), Expr::int(n)))
                        .collect();
                    return self.norm_prod(powered);
                }
                Expr::Exp(arg) => {
                    let scaled = self.norm(&Expr::prod(vec![Expr::int(n), arg.clone()]));
                    return norm_exp(scaled);
                }
                _ => {}
            }
        }
        Arc::new(Expr::Pow(base, exponent))
    }
}

/// `exp` rewrites for a normalized argument.
fn norm_exp(arg: ExprRef) -> ExprRef {
    if arg.is_zero() {
        return Expr::int(1);
    }
    if let Expr::Log(inner) = &*arg {
        // exp(log v) = v wherever log v is defined.
        return inner.clone();
    }
    Arc::new(Expr::Exp(arg))
}

/// `log` rewrites for a normalized argument. `log(exp(u))` is not folded:
/// it differs from `u` off the principal strip.
fn norm_log(arg: ExprRef) -> ExprRef {
    if arg.is_one() {
        return Expr::int(0);
    }
    Arc::new(Expr::Log(arg))
}

/// Splits a normalized non-sum term into a constant coefficient and the
/// remaining core, `None` core meaning the term is constant.
fn split_coefficient(term: &ExprRef) -> (CQ, Option<ExprRef>) {
    if let Some(c) = CQ::from_expr(term) {
        return (c, None);
    }
    if let Expr::Prod(factors) = &**term {
        let mut coeff = CQ::one();
        let mut rest: Vec<ExprRef> = Vec::with_capacity(factors.len());
        for f in factors {
            match CQ::from_expr(f) {
                Some(c) => coeff = coeff.mul(&c),
                None => rest.push(f.clone()),
            }
        }
        let core = match rest.len() {
            0 => None,
            1 => Some(rest.into_iter().next().unwrap()),
            _ => Some(Arc::new(Expr::Prod(rest))),
        };
        return (coeff, core);
    }
    (CQ::one(), Some(term.clone()))
}

/// Rebuilds `coeff * core` in canonical shape.
fn attach_coefficient(coeff: CQ, core: ExprRef) -> ExprRef {
    if coeff.is_one() {
        return core;
    }
    let c = coeff.to_expr();
    if let Expr::Prod(factors) = &*core {
        let mut out = Vec::with_capacity(factors.len() + 1);
        out.push(c);
        out.extend(factors.iter().cloned());
        return Arc::new(Expr::Prod(out));
    }
    Arc::new(Expr::Prod(vec![c, core]))
}

/// Integer powers of sums are multiplied out only up to this exponent.
const EXPAND_POW_CAP: i64 = 16;

/// Per-call expander with the same address-keyed memo discipline as the
/// normalizer.
#[derive(Default)]
struct Expander {
    memo: HashMap<usize, ExprRef>,
    keys: Vec<ExprRef>,
}

impl Expander {
    fn expand(&mut self, e: &ExprRef) -> ExprRef {
        let key = Arc::as_ptr(e) as usize;
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let result = self.expand_uncached(e);
        self.keys.push(e.clone());
        self.memo.insert(key, result.clone());
        result
    }

    fn expand_uncached(&mut self, e: &ExprRef) -> ExprRef {
        match &**e {
            Expr::Rat(_) | Expr::Cplx(_, _) | Expr::Var(_) | Expr::Param(_) => e.clone(),
            Expr::Sum(terms) => {
                let expanded: Vec<ExprRef> = terms.iter().map(|t| self.expand(t)).collect();
                normalize(&Expr::sum(expanded))
            }
            Expr::Prod(factors) => {
                let expanded: Vec<ExprRef> = factors.iter().map(|f| self.expand(f)).collect();
                self.distribute(expanded)
            }
            Expr::Pow(base, exponent) => {
                let b = self.expand(base);
                let x = self.expand(exponent);
                if let Some(n) = x.as_integer() {
                    if n >= 2 && n <= EXPAND_POW_CAP && has_sum_factor(&b) {
                        let copies = vec![b; n as usize];
                        return self.distribute(copies);
                    }
                }
                normalize(&Expr::pow(b, x))
            }
            Expr::Exp(arg) => normalize(&Expr::exp(self.expand(arg))),
            Expr::Log(arg) => normalize(&Expr::log(self.expand(arg))),
        }
    }

    /// Multiplies a list of expanded factors, distributing over any sum
    /// factors, and returns the normalized sum of products.
    fn distribute(&mut self, factors: Vec<ExprRef>) -> ExprRef {
        let mut flat: Vec<ExprRef> = Vec::with_capacity(factors.len());
        let mut queue: Vec<ExprRef> = factors;
        queue.reverse();
        while let Some(factor) = queue.pop() {
            if let Expr::Prod(inner) = &*factor {
                for f in inner.iter().rev() {
                    queue.push(f.clone());
                }
            } else {
                flat.push(factor);
            }
        }

        let mut terms: Vec<Vec<ExprRef>> = vec![Vec::new()];
        for factor in flat {
            match &*factor {
                Expr::Sum(summands) => {
                    let mut next = Vec::with_capacity(terms.len() * summands.len());
                    for partial in &terms {
                        for s in summands {
                            let mut t = partial.clone();
                            t.push(s.clone());
                            next.push(t);
                        }
                    }
                    terms = next;
                }
                _ => {
                    for t in &mut terms {
                        t.push(factor.clone());
                    }
                }
            }
        }
        let summands: Vec<ExprRef> =
            terms.into_iter().map(Expr::prod).collect();
        normalize(&Expr::sum(summands))
    }
}

/// True when the expression is a sum or a product with a sum factor, i.e.
/// repeated multiplication can distribute an integer power of it.
fn has_sum_factor(e: &ExprRef) -> bool {
    match &**e {
        Expr::Sum(_) => true,
        Expr::Prod(factors) => factors.iter().any(|f| matches!(&**f, Expr::Sum(_))),
        _ => false,
    }
}
