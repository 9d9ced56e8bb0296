//! High-precision arithmetic of irrational rotation numbers, a McMullen-style
//! Hausdorff-dimension lower-bound engine for nested box families, and the
//! numerical dynamics of quadratic maps with an irrationally indifferent
//! fixed point (orbits, perturbed Fatou coordinates, coordinate-change lifts).
//!
//! The crate is organized in three largely independent modules:
//!
//! * [`arithmetic`] — modified (nearest-integer) continued fractions, the
//!   Brjuno sum, the Herman iterated-map test, and the jagged/spiky
//!   digit-growth classifiers, all running in log domain so that
//!   doubly-exponential digit growth never overflows.
//! * [`nestdim`] — nested families of area-disjoint boxes, densities,
//!   the dimension lower bound `2 - limsup(sum |log delta|)/|log d|`,
//!   the associated martingale measure, and a grid-based nest extractor
//!   plus box-counting estimator for planar point clouds.
//! * [`dynamics`] — the quadratic families `P` and `Q`, post-critical
//!   orbits, the covering map `tau`, lifted near-translations, numerically
//!   fitted Fatou coordinates satisfying the Abel equation, the `chi`
//!   lift, and a pointwise near-parabolic return map.
//!
//! Shared plumbing: [`ext`] provides `ExtReal`, a signed high-precision real
//! with unbounded exponent (a lazy tower of exponentials over MPFR floats),
//! which backs every log-domain computation in [`arithmetic`].

pub mod arithmetic;
pub mod dynamics;
pub mod ext;
pub mod nestdim;

pub use ext::ExtReal;

/// Default working precision (bits) for rotation-number arithmetic.
pub const DEFAULT_ARITH_PREC: u32 = 256;
/// Default working precision (bits) for map dynamics.
pub const DEFAULT_DYN_PREC: u32 = 128;
/// Default truncation depth for continued-fraction expansions.
pub const DEFAULT_CF_DEPTH: usize = 64;
