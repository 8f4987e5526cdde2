//! The deformation `F_t = z - tH`, its inverse `G_t = z + tN_t`, the formal
//! flow of `F`, and identity checks built on them.

mod checks;
mod deform;
mod pseries;

pub use checks::{
    check_bcw_quadratic_nilpotent, check_euler_identities, check_gpde, check_lemma31, check_newp,
    check_prop310, polynomiality_probe, symmetry_detector, PolynomialityProbe,
};
pub use deform::{
    deformation_inverse, deformed_map, formal_flow, pde_residual, power_map, DeformedInverse,
    FlowSeries,
};
pub use pseries::{param_monomial, PMap, PMatrix, PSeries, ParamPoly};
