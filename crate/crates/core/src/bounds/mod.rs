//! Closed-form verifications: binomial and Poisson tails, the site/bond
//! parameters of the projected exploration with their threshold checks, and
//! the inequality system of the planar comparison.

pub mod exact;
mod tails;
mod theorem1;
mod theorem3;

pub use exact::{decimal_from_f64, parse_decimal, Exact};
pub use tails::{binom_cdf, binom_cdf_exact, binom_upper_tail, poisson_cdf};
pub use theorem1::{
    branching_lower_bound, chen_lower_bounds, classify_case, poisson_limit, s_b_at, s_b_of,
    verify_theorem1, verify_theorem1_table, BoundParams, BoundReport, BoundRow, CaseKind, Method,
    SiteBond, DIRECT_LIMIT, FLOAT_GUARD, MAIN_THRESHOLDS, TABLE_CASES, TABLE_THRESHOLDS,
};
pub use theorem3::{verify_theorem3_inequalities, InequalityVerdict};
