//! Symbolic classification of scalar second-order ODEs `y'' = f(x, y, y')`
//! under point transformations.
//!
//! The crate is organized in three layers:
//!
//! * [`expr`] and [`sample`]: an exact symbolic expression engine
//!   (arbitrary-precision rational and complex-rational constants,
//!   normalization, differentiation, substitution, parsing, printing,
//!   principal-branch numeric evaluation) plus seeded sampling of
//!   evaluation points.
//! * [`jet`] and [`invariants`]: the jet calculus of the total derivative
//!   along solutions, the table of derived quantities `t1..t18`, the two
//!   second-order relative invariants, the seven fifth-order invariants
//!   `nu1..nu7`, their rationalized branch-free combinations `B1, B2, B3`
//!   and `R12`, and the classifier that reports the symmetry-algebra
//!   dimension from the rank of the invariant map.
//! * [`transform`] and [`opverify`]: pushforward of an equation along a
//!   point transformation with invariance checking, and structural
//!   verification of the symmetry-operator system (commutator table,
//!   inheritance of the invariants, scaling weights, the invariant
//!   differentiation operators and their structure relations).
//!
//! ```
//! use ode_invariants::expr::{parse, Assignment, SymbolTable};
//! use ode_invariants::invariants::{classify, ClassifyOptions};
//! use ode_invariants::jet::JetContext;
//!
//! let syms = SymbolTable::xyp().with_params(["c"]);
//! let f = parse("c*exp(-p)", &syms).unwrap();
//! let ctx = JetContext::new(f);
//! let params = Assignment::new().bind("c", 1.0.into());
//! let report = classify(&ctx, &params, &ClassifyOptions::default()).unwrap();
//! assert_eq!(report.symmetry_dimension.as_u8(), Some(3));
//! ```

pub mod expr;
pub mod invariants;
pub mod jet;
pub mod opverify;
pub mod sample;
pub mod transform;
