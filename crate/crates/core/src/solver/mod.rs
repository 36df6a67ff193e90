//! Numerical oracles: global distance by shooting and the corner probes.

pub mod corner;
pub mod shooting;

pub use corner::{
    corner_coeffs, corner_curve, corner_decrease_probe, semiconvexity_probe, CornerCurveParams,
    CornerSample, SemiconvexitySample,
};
pub use shooting::{distance, length_lower_bound, ShootingConfig, ShootingResult};
