//! Pointwise near-parabolic return map: lift a point through the modified
//! exponential into the chart, push it forward with the map until the Abel
//! coordinate has crossed one strip width, and project back. Near zero this
//! realizes a rotation by `e^{-2 pi i / alpha}` in the renormalized
//! coordinate.

use super::complex::ComplexHP;
use super::fatou::FatouChart;
use super::maps::exp_map;
use super::maps::exp_map_inverse;
use super::tau::lift_f;
use super::DynamicsError;
use rug::{ops::CompleteRound, Float};

#[derive(Clone, Debug)]
pub struct ReturnMapResult {
    pub w_prime: ComplexHP,
    pub k_used: usize,
    /// Final unwrapped Abel coordinate (diagnostic).
    pub zeta_final: ComplexHP,
    pub zeta_start: ComplexHP,
}

/// Apply the renormalized return map to `w != 0`.
///
/// The fiber representative `zeta` is chosen with `Re` in `[1/2, 3/2)`. The
/// orbit is tracked in the lifted plane (the fitted coordinate is periodic,
/// so it continues across strips); the return fires at the first step whose
/// unwrapped `Re Phi` passes `1/alpha - k_surrogate + 1/2`, a stand-in for
/// the smallest admissible return time. The result is projected by the
/// modified exponential, which absorbs integer translations.
pub fn renormalized_return_map(
    chart: &FatouChart,
    w: &ComplexHP,
    k_max: usize,
    k_surrogate: usize,
) -> Result<ReturnMapResult, DynamicsError> {
    let prec = w.prec();
    assert!(!w.norm_sq().is_zero(), "w = 0 is excluded");
    let alpha = chart.map.alpha.to_f64();

    // fiber representative with Re in [1/2, 3/2): principal Re is in
    // (-1/2, 1/2], so shifting by ceil(1/2 - Re) lands the window
    let principal = exp_map_inverse(w);
    let k0 = (0.5 - principal.re.to_f64()).ceil();
    let zeta0 = principal.add_f64(k0, 0.0);

    // into the lifted plane
    let mut w_t = chart.phi_inv_w(&zeta0)?;
    if !chart.in_extended(&w_t) {
        return Err(DynamicsError::OutsideChart);
    }

    let window_lo = 1.0 / alpha - k_surrogate as f64 + 0.5;
    for step in 1..=k_max {
        w_t = lift_f(&chart.map, &chart.sigma, &w_t).map_err(|e| match e {
            DynamicsError::BranchLoss { .. } => DynamicsError::LeftChart { step },
            other => other,
        })?;
        if !chart.in_extended(&w_t) {
            return Err(DynamicsError::LeftChart { step });
        }
        let zeta_t = chart.phi_w(&w_t);
        if zeta_t.re.to_f64() >= window_lo {
            // project through the principal strip: the orbit advanced by m
            // deck translations (m full loops of the covering), and the
            // non-integer strip width 1/alpha is what turns the projection
            // into the e^{-2 pi i / alpha} rotation near zero
            let alpha_hp = &chart.map.alpha;
            let m = (w_t.re.to_f64() * alpha).floor();
            let period = (1u32 / alpha_hp).complete(prec);
            let w_p = ComplexHP::new(
                (&w_t.re - &(period * Float::with_val(prec, m))).complete(prec),
                w_t.im.clone(),
            );
            let zeta_p = chart.phi_w(&w_p);
            return Ok(ReturnMapResult {
                w_prime: exp_map(&zeta_p),
                k_used: step,
                zeta_final: zeta_t,
                zeta_start: zeta0,
            });
        }
    }
    Err(DynamicsError::NoReturnWithin { k_max })
}
