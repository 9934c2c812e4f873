//! Single and set tolerances for any [`CspInstance`](crate::CspInstance).
//!
//! The upper tolerance of a set `E` is the largest total cost increase that
//! can be spread over `E` while every optimal solution stays optimal; the
//! lower tolerance is the largest total decrease that leaves the optimal
//! value unchanged. Both reduce to linear programs whose right-hand sides are
//! restricted optima `f_c(D~(X; I))`, obtained from constrained solves.
//!
//! All computations run through an [`Engine`], which caches constrained
//! solves and counts how many distinct ones were needed. The free functions
//! in this module create a fresh engine per call.

mod bounds;
mod closed;
mod engine;

use serde::Serialize;

use crate::value::{ExtendedValue, Rational};

pub use bounds::{bounds_report, BoundsReport};
pub use closed::{closed_lower_2, closed_lower_3, closed_upper_2, closed_upper_3};
pub use engine::{
    all_subsets_lower, restricted_values, set_lower_ell, set_lower_ill, set_lower_tll,
    set_upper_eul, single_lower, single_upper, AllSubsetsLower, Engine, RestrictedValueTable,
    DEFAULT_ALL_SUBSETS_CAP,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    SingleFormula,
    Eul,
    Ell,
    Ill,
    Tll,
    ClosedForm2,
    ClosedForm3,
    MstFormula,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::SingleFormula => "single",
            Method::Eul => "eul",
            Method::Ell => "ell",
            Method::Ill => "ill",
            Method::Tll => "tll",
            Method::ClosedForm2 => "closed2",
            Method::ClosedForm3 => "closed3",
            Method::MstFormula => "mst",
        }
    }
}

/// Which lower-tolerance LP drives the all-subsets computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LowerMethod {
    Ill,
    Tll,
    /// Builds a fresh ELL for every subset; the reference for solve counts.
    EllNaive,
}

/// A computed tolerance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToleranceReport {
    pub value: ExtendedValue,
    pub method: Method,
    /// Distribution of `value` over the members of `E`, in increasing index
    /// order.
    pub witness: Option<Vec<Rational>>,
    /// Distinct constrained solves performed for this report.
    pub solves_used: usize,
    /// Closed forms record the case that applied, e.g. `"(b)"`.
    pub case: Option<&'static str>,
}

impl ToleranceReport {
    pub(crate) fn new(value: ExtendedValue, method: Method, solves_used: usize) -> Self {
        ToleranceReport {
            value,
            method,
            witness: None,
            solves_used,
            case: None,
        }
    }
}
