//! Model-independent experiment engine: admissibility of magnetic families,
//! averages over parameter balls, and the restriction pipeline.

mod average;
mod family;
mod restriction;

pub use average::{average_over_ball, two_sided_band, AverageProfile, Band, DEFAULT_BAND_BOUND};
pub use family::{
    admissibility_check, jacobian_du, AdmissibilityReport, ComponentFn, JacobianFn, MagneticFamily,
    OperatorSymbol, DEFAULT_ADMISSIBILITY_THRESHOLD, DEFAULT_STEP,
};
pub use restriction::{
    fubini_check, good_set_fraction, iterated_both_orders, restriction_integral, Curve,
    IteratedIntegrals, RestrictionReport, FUBINI_TOLERANCE,
};
