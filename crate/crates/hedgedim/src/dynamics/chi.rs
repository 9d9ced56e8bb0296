//! The lift `chi` of `Phi^{-1}` (or its conjugate) through the modified
//! exponential: `Exp(chi(zeta)) = Phi^{-1}(zeta)`, anchored by `chi(1) = 1`
//! and continued along explicit paths. Integer translates `chi + j` give
//! the other branches.

use super::complex::ComplexHP;
use super::fatou::FatouChart;
use super::maps::exp_map_inverse;
use super::DynamicsError;
use crate::arithmetic::Sign;
use rug::Float;

/// A branch of the inverse `Exp`-projection of a chart's `Phi^{-1}`.
/// `eps` selects the holomorphic (`-1`) or anti-holomorphic (`+1`,
/// conjugated `Phi^{-1}`) lift.
#[derive(Clone, Debug)]
pub struct ChiLift {
    pub chart: FatouChart,
    pub eps: Sign,
}

impl ChiLift {
    pub fn new(chart: FatouChart, eps: Sign) -> Self {
        ChiLift { chart, eps }
    }

    fn principal(&self, zeta: &ComplexHP) -> Result<ComplexHP, DynamicsError> {
        let z = self.chart.phi_inv(zeta)?;
        let z = match self.eps {
            Sign::Neg => z,
            Sign::Pos => z.conj(),
        };
        Ok(exp_map_inverse(&z))
    }
}

/// Evaluate the lift at `zeta`, continuing the branch along the straight
/// path from `path_from` (use `1` to start at the anchor, where
/// `chi(1) = 1`). Steps are kept fine enough that consecutive lifted values
/// move by less than 1/2 in the real direction; a larger observed jump is
/// reported as `BranchLoss`.
pub fn chi_lift(
    lift: &ChiLift,
    zeta: &ComplexHP,
    path_from: &ComplexHP,
) -> Result<ComplexHP, DynamicsError> {
    let prec = zeta.prec();
    let alpha = lift.chart.map.alpha.to_f64();

    // branch value at the path start: the anchor when starting at 1
    let one = ComplexHP::from_f64(prec, 1.0, 0.0);
    let start_is_anchor = path_from.sub(&one).abs().to_f64() < 1e-12;
    let mut chi_prev = if start_is_anchor {
        one.clone()
    } else {
        // continue from the anchor to the start first
        chi_lift(lift, path_from, &one)?
    };

    let delta = zeta.sub(path_from);
    let dist = delta.abs().to_f64();
    if dist == 0.0 {
        return Ok(chi_prev);
    }
    // |chi'| ~ alpha high up but grows near the band bottom; step so that
    // the lifted move stays well under the half-period of the covering
    let steps = (dist * (4.0 * alpha).max(0.5)).ceil() as usize + 1;
    for s in 1..=steps {
        let t = s as f64 / steps as f64;
        let p = path_from.add(&delta.scale(&Float::with_val(prec, t)));
        let principal = lift.principal(&p)?;
        // choose the integer translate closest to the previous value
        let k = (chi_prev.re.to_f64() - principal.re.to_f64()).round();
        let chi_here = principal.add_f64(k, 0.0);
        let jump = chi_here.sub(&chi_prev).abs().to_f64();
        if jump >= 0.5 {
            return Err(DynamicsError::BranchLoss { step: s });
        }
        chi_prev = chi_here;
    }
    Ok(chi_prev)
}

/// `chi_{n,j} = chi_n + j`, exact integer translation.
pub fn chi_shift(chi_value: &ComplexHP, j: i64) -> ComplexHP {
    chi_value.add_f64(j as f64, 0.0)
}
