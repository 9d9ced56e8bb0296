//! Numerical dynamics of the quadratic families with an irrationally
//! indifferent fixed point at the origin: orbits, the covering map `tau`,
//! lifted near-translations, fitted Fatou coordinates satisfying the Abel
//! equation, the `chi` lift between renormalization levels, and a pointwise
//! near-parabolic return map.

mod chi;
mod complex;
mod fatou;
mod maps;
mod orbit;
mod renorm;
mod tau;
mod tower;

pub use chi::{chi_lift, chi_shift, ChiLift};
pub use complex::ComplexHP;
pub use fatou::{fatou_inverse, fit_fatou, FatouChart, FatouFitParams, WBand};
pub use maps::{
    apply_map, conj_s, critical_point, critical_value, exp_map, exp_map_inverse,
    sigma_fixed_point, MapFamily, MapSpec,
};
pub use orbit::{postcritical_orbit, read_orbit_binary, OrbitData, OrbitSample};
pub use renorm::{renormalized_return_map, ReturnMapResult};
pub use tower::RenormTower;
pub use tau::{lift_f, tau, tau_inverse};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("tau has a pole at w = {re} + {im}i")]
    PoleAt { re: f64, im: f64 },
    #[error("tau inverse undefined at z in {{0, sigma}}")]
    BranchUndefined,
    #[error("branch continuity lost at step {step}")]
    BranchLoss { step: usize },
    #[error("lifted map is not a near-translation: max |F(w)-w-1| = {max_dev}")]
    NotNearTranslation { max_dev: f64 },
    #[error("Newton iteration diverged after {iterations} steps")]
    NewtonDiverged { iterations: usize },
    #[error("point outside the chart's certified region")]
    OutsideChart,
    #[error("orbit did not return within {k_max} iterations")]
    NoReturnWithin { k_max: usize },
    #[error("orbit left the chart's certified region at step {step}")]
    LeftChart { step: usize },
    #[error("cannot reach the chi anchor from the requested point")]
    AnchorUnreachable,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("format: {0}")]
    Format(String),
}
