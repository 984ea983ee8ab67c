//! Jet calculus for `y'' = f(x, y, p)` with `p = y'`.
//!
//! Everything downstream is built from mixed partial derivatives of `f`
//! and from the total derivative along solutions,
//!
//! ```text
//! Dx = d/dx + p d/dy + f d/dp
//! ```
//!
//! [`JetContext`] owns the right-hand side `f`, memoizes its mixed
//! partials, and produces the derived-quantity table `t1..t18` and the
//! table of total derivatives of low-order partials used by the
//! fifth-order invariants. The placeholders `t16, t17, t18` are the named
//! parameters `K`, `L`, `M`: they stand for quantities of the extended
//! system that the invariant formulas treat as independent inputs.

use crate::expr::{differentiate, normalize, Expr, ExprRef};
use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;
use thiserror::Error;

/// Highest total order of a mixed partial the context will compute.
pub const MAX_PARTIAL_ORDER: u8 = 7;

/// Jet-calculus failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error(
        "mixed partial of order {requested} exceeds the supported cap {cap}"
    )]
    PartialOrderTooHigh { requested: u8, cap: u8 },
}

/// Symbolic context for one right-hand side `f(x, y, p)`.
#[derive(Debug)]
pub struct JetContext {
    f: ExprRef,
    partials: Mutex<HashMap<(u8, u8, u8), ExprRef>>,
}

impl JetContext {
    /// Context for the equation `y'' = f`. The right-hand side is
    /// normalized once here.
    pub fn new(f: ExprRef) -> Self {
        JetContext { f: normalize(&f), partials: Mutex::new(HashMap::new()) }
    }

    /// The normalized right-hand side.
    pub fn f(&self) -> &ExprRef {
        &self.f
    }

    /// Mixed partial `d^a/dx^a d^b/dy^b d^c/dp^c` of `f`, memoized.
    pub fn partial(&self, x_order: u8, y_order: u8, p_order: u8) -> Result<ExprRef, JetError> {
        let requested = x_order as u16 + y_order as u16 + p_order as u16;
        if requested > MAX_PARTIAL_ORDER as u16 {
            return Err(JetError::PartialOrderTooHigh {
                requested: requested as u8,
                cap: MAX_PARTIAL_ORDER,
            });
        }
        Ok(self.partial_unchecked(x_order, y_order, p_order))
    }

    fn partial_unchecked(&self, a: u8, b: u8, c: u8) -> ExprRef {
        if (a, b, c) == (0, 0, 0) {
            return self.f.clone();
        }
        if let Some(hit) = self.partials.lock().unwrap().get(&(a, b, c)) {
            return hit.clone();
        }
        // Reduce along x first, then y, then p, so each mixed partial is
        // derived from a single memoized parent.
        let (parent, var) = if a > 0 {
            ((a - 1, b, c), "x")
        } else if b > 0 {
            ((a, b - 1, c), "y")
        } else {
            ((a, b, c - 1), "p")
        };
        let lower = self.partial_unchecked(parent.0, parent.1, parent.2);
        let result = differentiate(&lower, var);
        self.partials
            .lock()
            .unwrap()
            .insert((a, b, c), result.clone());
        result
    }

    /// Total derivative along solutions:
    /// `Dx e = e_x + p e_y + f e_p`.
    pub fn dot_dx(&self, e: &ExprRef) -> ExprRef {
        let ex = differentiate(e, "x");
        let ey = differentiate(e, "y");
        let ep = differentiate(e, "p");
        normalize(&Expr::sum(vec![
            ex,
            Expr::prod(vec![Expr::var("p"), ey]),
            Expr::prod(vec![self.f.clone(), ep]),
        ]))
    }

    /// `Dx` applied `count` times.
    pub fn dot_dx_iter(&self, e: &ExprRef, count: u8) -> ExprRef {
        let mut acc = e.clone();
        for _ in 0..count {
            acc = self.dot_dx(&acc);
        }
        acc
    }

    /// Table of total derivatives of the low-order partials of `f`.
    ///
    /// Key `(i, j)` holds `Dx^i` of the `j`-th entry (1-based) of the
    /// fixed list
    ///
    /// ```text
    /// f, f2, f3, f22, f23, f33, f222, f223, f233, f333,
    /// f2222, f2223, f2233, f2333, f3333
    /// ```
    ///
    /// with subscript 2 meaning `d/dy` and 3 meaning `d/dp`. The rows
    /// shorten as the order grows: `i = 1` covers all 15 entries, `i = 2`
    /// the first 10, `i = 3` the first 6, `i = 4` the first 3, and
    /// `i = 5` only `f`, for 35 entries in total.
    pub fn d_table(&self) -> Result<BTreeMap<(u8, u8), ExprRef>, JetError> {
        let orders: [(u8, u8); 15] = [
            (0, 0),
            (1, 0),
            (0, 1),
            (2, 0),
            (1, 1),
            (0, 2),
            (3, 0),
            (2, 1),
            (1, 2),
            (0, 3),
            (4, 0),
            (3, 1),
            (2, 2),
            (1, 3),
            (0, 4),
        ];
        let row_lengths: [(u8, usize); 5] = [(1, 15), (2, 10), (3, 6), (4, 3), (5, 1)];

        let mut table = BTreeMap::new();
        // Dx^i is built incrementally per column so each column costs one
        // extra total derivative per row it appears in.
        let mut current: Vec<ExprRef> = orders
            .iter()
            .map(|&(b, c)| self.partial(0, b, c))
            .collect::<Result<_, _>>()?;
        for (i, len) in row_lengths {
            for (j, value) in current.iter_mut().take(len).enumerate() {
                *value = self.dot_dx(value);
                table.insert((i, j as u8 + 1), value.clone());
            }
        }
        Ok(table)
    }

    /// The derived-quantity table `t1..t18` for this equation.
    pub fn t_values(&self) -> Result<TValues, JetError> {
        let f = self.f.clone();
        let f2 = self.partial(0, 1, 0)?;
        let f3 = self.partial(0, 0, 1)?;
        let f22 = self.partial(0, 2, 0)?;
        let f23 = self.partial(0, 1, 1)?;
        let f33 = self.partial(0, 0, 2)?;
        let f333 = self.partial(0, 0, 3)?;
        let t8 = self.partial(0, 0, 4)?;
        let t9 = self.partial(0, 1, 4)?;
        let t10 = self.partial(0, 0, 5)?;
        let t11 = self.dot_dx(&t8);

        let dx_f33 = self.dot_dx(&f33);
        let dx2_f33 = self.dot_dx(&dx_f33);
        let dx_f23 = self.dot_dx(&f23);
        let t12 = normalize(&Expr::sum(vec![
            Expr::prod(vec![Expr::int(4), f3.clone(), f23]),
            Expr::neg(Expr::prod(vec![f3.clone(), dx_f33])),
            Expr::neg(Expr::prod(vec![Expr::int(3), f33.clone(), f2])),
            Expr::prod(vec![Expr::int(6), f22]),
            dx2_f33,
            Expr::neg(Expr::prod(vec![Expr::int(4), dx_f23])),
        ]));
        let t13 = differentiate(&t12, "y");
        let t14 = differentiate(&t12, "p");
        let t15 = normalize(&Expr::sum(vec![
            Expr::prod(vec![f3, t12.clone()]),
            self.dot_dx(&t12),
        ]));

        Ok(TValues {
            t: [
                Expr::var("x"),
                Expr::var("y"),
                Expr::var("p"),
                f,
                self.partial(0, 0, 1)?,
                f33,
                f333,
                t8,
                t9,
                t10,
                t11,
                t12,
                t13,
                t14,
                t15,
                Expr::param("K"),
                Expr::param("L"),
                Expr::param("M"),
            ],
        })
    }
}

/// The eighteen derived quantities `t1..t18` of one equation, as
/// expressions in `x, y, p` (and the parameters of `f`, plus `K, L, M`).
#[derive(Debug, Clone)]
pub struct TValues {
    t: [ExprRef; 18],
}

impl TValues {
    /// `t_k`, 1-based. Panics if `k` is outside `1..=18`.
    pub fn get(&self, k: usize) -> &ExprRef {
        assert!((1..=18).contains(&k), "t-index {k} out of range");
        &self.t[k - 1]
    }

    /// All eighteen values in order.
    pub fn all(&self) -> &[ExprRef; 18] {
        &self.t
    }

    /// The abstract table: `t_k` is the free variable `tk`.
    pub fn abstract_vars() -> TValues {
        TValues {
            t: std::array::from_fn(|idx| Expr::var(&format!("t{}", idx + 1))),
        }
    }

    /// Substitution map sending the abstract variable `tk` to this
    /// table's `t_k`.
    pub fn substitution(&self) -> HashMap<String, ExprRef> {
        self.t
            .iter()
            .enumerate()
            .map(|(idx, value)| (format!("t{}", idx + 1), value.clone()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{equal_numeric, parse, SymbolTable};
    use crate::sample::Sampler;

    fn syms() -> SymbolTable {
        SymbolTable::xyp().with_params(["c"])
    }

    fn ctx(src: &str) -> JetContext {
        JetContext::new(parse(src, &syms()).unwrap())
    }

    fn pe(src: &str) -> ExprRef {
        parse(src, &syms()).unwrap()
    }

    #[test]
    fn partial_reduction_matches_direct_differentiation() {
        let c = ctx("6*y*p - 4*y^3 + c*(p - y^2)^(3/2)");
        let via_table = c.partial(0, 1, 2).unwrap();
        let direct = differentiate(
            &differentiate(&differentiate(c.f(), "p"), "p"),
            "y",
        );
        // Mixed partials commute; both routes normalize identically or at
        // worst agree numerically.
        let mut sampler = Sampler::from_seed(41);
        let points = sampler.positive_real_assignments(&["x", "y", "p", "c"], 8);
        let check = equal_numeric(&via_table, &direct, &points, 1e-9);
        assert!(check.equal, "residuals: {:?}", check.residuals);
    }

    #[test]
    fn partial_order_cap() {
        let c = ctx("c*exp(-p)");
        assert!(c.partial(0, 0, 7).is_ok());
        assert_eq!(
            c.partial(8, 0, 0),
            Err(JetError::PartialOrderTooHigh { requested: 8, cap: 7 })
        );
        assert_eq!(
            c.partial(0, 3, 5),
            Err(JetError::PartialOrderTooHigh { requested: 8, cap: 7 })
        );
    }

    #[test]
    fn total_derivative_satisfies_leibniz() {
        let c = ctx("6*y*p - 4*y^3 + c*(p - y^2)^(3/2)");
        let u = pe("x*p + y^2");
        let v = pe("exp(x) + p");
        let lhs = c.dot_dx(&Expr::prod(vec![u.clone(), v.clone()]));
        let rhs = normalize(&Expr::sum(vec![
            Expr::prod(vec![c.dot_dx(&u), v.clone()]),
            Expr::prod(vec![u, c.dot_dx(&v)]),
        ]));
        let mut sampler = Sampler::from_seed(43);
        let points = sampler.positive_real_assignments(&["x", "y", "p", "c"], 8);
        let check = equal_numeric(&lhs, &rhs, &points, 1e-9);
        assert!(check.equal, "residuals: {:?}", check.residuals);
    }

    #[test]
    fn exponential_example_t_chain() {
        // f = c e^{-p}: every t-value reduces to a monomial in c e^{-p},
        // derived by hand from the defining formulas.
        let c = ctx("c*exp(-p)");
        let t = c.t_values().unwrap();
        assert_eq!(t.get(4), &pe("c*exp(-p)"));
        assert_eq!(t.get(5), &pe("-c*exp(-p)"));
        assert_eq!(t.get(8), &pe("c*exp(-p)"));
        assert_eq!(t.get(9), &Expr::int(0));
        assert_eq!(t.get(10), &pe("-c*exp(-p)"));
        assert_eq!(t.get(11), &pe("-c^2*exp(-2*p)"));
        assert_eq!(t.get(12), &pe("c^3*exp(-3*p)"));
        assert_eq!(t.get(13), &Expr::int(0));
        assert_eq!(t.get(14), &pe("-3*c^3*exp(-3*p)"));
        assert_eq!(t.get(15), &pe("-4*c^4*exp(-4*p)"));
    }

    #[test]
    fn coordinate_and_placeholder_t_values() {
        let c = ctx("c*exp(-p)");
        let t = c.t_values().unwrap();
        assert_eq!(t.get(1), &Expr::var("x"));
        assert_eq!(t.get(2), &Expr::var("y"));
        assert_eq!(t.get(3), &Expr::var("p"));
        assert_eq!(t.get(16), &Expr::param("K"));
        assert_eq!(t.get(17), &Expr::param("L"));
        assert_eq!(t.get(18), &Expr::param("M"));
    }

    #[test]
    fn d_table_shape_and_values() {
        let c = ctx("c*exp(-p)");
        let table = c.d_table().unwrap();
        assert_eq!(table.len(), 35);
        for (i, len) in [(1u8, 15u8), (2, 10), (3, 6), (4, 3), (5, 1)] {
            for j in 1..=len {
                assert!(table.contains_key(&(i, j)), "missing ({i}, {j})");
            }
        }
        // Column 1 is Dx^i f. For f = c e^{-p}: Dx f = -c^2 e^{-2p} and
        // Dx^2 f = 2 c^3 e^{-3p}.
        assert_eq!(table[&(1, 1)], pe("-c^2*exp(-2*p)"));
        assert_eq!(table[&(2, 1)], pe("2*c^3*exp(-3*p)"));
        // Column 15 is Dx of f3333 = Dx f8; same value as t11.
        assert_eq!(table[&(1, 15)], c.t_values().unwrap().get(11).clone());
    }

    #[test]
    fn cubic_right_hand_sides_have_vanishing_t8() {
        let c = ctx("y + x*p + 3*p^2 - p^3");
        assert_eq!(c.partial(0, 0, 4).unwrap(), Expr::int(0));
        let t = c.t_values().unwrap();
        assert_eq!(t.get(8), &Expr::int(0));
    }

    #[test]
    fn abstract_table_round_trip() {
        let t = TValues::abstract_vars();
        assert_eq!(t.get(1), &Expr::var("t1"));
        assert_eq!(t.get(18), &Expr::var("t18"));
        let subs = t.substitution();
        assert_eq!(subs.len(), 18);
        assert_eq!(subs["t7"], Expr::var("t7"));
    }
}
