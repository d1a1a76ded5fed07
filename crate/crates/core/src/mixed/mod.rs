//! Mixed site-bond percolation on the square lattice: the upper bound on the
//! critical curve, its differential equation, the regions certified
//! supercritical, and Monte Carlo estimates of crossing probabilities and
//! pivotal sums.

mod curve;
mod sim;

pub use curve::{
    bond_threshold_estimate, classify_region, crossover_solve, emit_curve, ode_integrate, sc_upper,
    CurvePoint, MixedParams, Region, BOND_THRESHOLD_ESTIMATES, ODE_LOCAL_TOLERANCE,
    WIERMAN_SITE_BOUND, ZIFF_SITE_ESTIMATE,
};
pub use sim::{
    pivotality_estimate, ratio_factor, russo_check, theta_n_mixed, Ball, MixedThetaEstimate,
    PivotalityEstimate, RussoCheck,
};
