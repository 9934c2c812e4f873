//! Exact set upper and lower tolerances for combinatorial sum problems.

pub mod csp;
pub mod error;
pub mod lp;
pub mod mst;
pub mod oracle;
pub mod subset;
pub mod tolerance;
pub mod value;

pub use csp::{objective_of, solve, CspInstance, ExplicitCsp, Solved};
pub use error::{Error, Result};
pub use lp::{check_feasible, solve_lp, LinearProgram, LpOutcome, LpStatus, Relation};
pub use subset::Subset;
pub use value::{ExtendedValue, Rational};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/problems.md")]
    mod problems {}
    #[doc = include_str!("../../../book/src/single.md")]
    mod single {}
    #[doc = include_str!("../../../book/src/set-upper.md")]
    mod set_upper {}
    #[doc = include_str!("../../../book/src/set-lower.md")]
    mod set_lower {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/spanning-trees.md")]
    mod spanning_trees {}
    #[doc = include_str!("../../../book/src/lp.md")]
    mod lp {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
