//! Dunkl-generalized q-Szasz-Mirakjan-Kantorovich-Stancu operators.
//!
//! The crate is organized bottom-up:
//! - [`qcalc`]: q-integers, q-factorials, q-binomials, q-Pochhammer products,
//!   and Jackson q-integration on `[0,a]` and `[a,b]`.
//! - [`dunkl`]: the parity function, the q-deformed Dunkl gamma recursion,
//!   the classical Dunkl gamma, and the two q-Dunkl exponentials.
//! - [`operator`]: the univariate operator kernel, its evaluation, and the
//!   closed-form moment formulas and bounds it is audited against.
//! - [`bounds`]: moduli of continuity, weighted norms, Lipschitz checks, and
//!   the quantitative error bounds driven by the second central moment.
//! - [`bivariate`]: the tensor-product bivariate operator and its audits.
//! - [`function`] / [`registry`]: evaluable test functions with analytic
//!   derivative and smoothness metadata.
//!
//! Every closed form carries a numeric audit path: the operator series plus
//! Jackson quadrature is treated as ground truth and disagreements are
//! surfaced as [`operator::MomentReport`] discrepancies rather than silently
//! clamped.

pub mod bivariate;
pub mod bounds;
pub mod dunkl;
pub mod error;
pub mod function;
pub mod grid;
pub mod operator;
pub mod qcalc;
pub mod registry;

pub use error::{Error, Result};
pub use qcalc::{QValue, TruncationPolicy};
