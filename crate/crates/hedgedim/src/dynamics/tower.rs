//! Pointwise renormalization tower. Level 0 is the base map; the level-1
//! map is the near-parabolic return map of the level-0 chart, conjugated by
//! `s(z) = conj(z)` when the connecting sign is `+1`, so that its rotation
//! number at the origin is the tail `alpha_1` of the modified expansion.
//!
//! Deeper levels would need a fitted chart of the sampled return map (the
//! renormalized map is only available pointwise and is not one of the two
//! closed-form families); they are exposed through repeated construction by
//! callers and are best-effort only.

use super::complex::ComplexHP;
use super::fatou::FatouChart;
use super::maps::conj_s;
use super::renorm::renormalized_return_map;
use super::DynamicsError;
use crate::arithmetic::Sign;

#[derive(Clone, Debug)]
pub struct RenormTower {
    pub base_chart: FatouChart,
    /// `eps_1`: connects level 0 to level 1.
    pub eps1: Sign,
    pub k_surrogate: usize,
}

impl RenormTower {
    pub fn new(base_chart: FatouChart, eps1: Sign, k_surrogate: usize) -> Self {
        RenormTower {
            base_chart,
            eps1,
            k_surrogate,
        }
    }

    /// One application of the level-1 map `f_1 = R f_0` (or `s o R f_0 o s`
    /// when `eps_1 = +1`), evaluated pointwise through the chart.
    pub fn level1_apply(&self, w: &ComplexHP, k_max: usize) -> Result<ComplexHP, DynamicsError> {
        match self.eps1 {
            Sign::Neg => {
                let r = renormalized_return_map(&self.base_chart, w, k_max, self.k_surrogate)?;
                Ok(r.w_prime)
            }
            Sign::Pos => {
                let r = renormalized_return_map(
                    &self.base_chart,
                    &conj_s(w),
                    k_max,
                    self.k_surrogate,
                )?;
                Ok(conj_s(&r.w_prime))
            }
        }
    }

    /// Measured rotation of the level-1 map near the origin (radians),
    /// averaged over `directions` probes at radius `r`.
    pub fn level1_rotation(
        &self,
        r: f64,
        directions: usize,
        k_max: usize,
    ) -> Result<f64, DynamicsError> {
        let prec = self.base_chart.map.precision;
        let mut sum = 0.0;
        let mut base: Option<f64> = None;
        for d in 0..directions {
            let phase = std::f64::consts::TAU * d as f64 / directions as f64;
            let w = ComplexHP::from_f64(prec, r * phase.cos(), r * phase.sin());
            let image = self.level1_apply(&w, k_max)?;
            let arg = image.div(&w).arg().to_f64();
            // unwrap against the first probe to average on the circle
            let arg = match base {
                None => {
                    base = Some(arg);
                    arg
                }
                Some(b) => {
                    let mut a = arg;
                    while a - b > std::f64::consts::PI {
                        a -= std::f64::consts::TAU;
                    }
                    while b - a > std::f64::consts::PI {
                        a += std::f64::consts::TAU;
                    }
                    a
                }
            };
            sum += arg;
        }
        Ok(sum / directions as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::realize;
    use crate::dynamics::fatou::{fit_fatou, FatouFitParams};
    use crate::dynamics::maps::{MapFamily, MapSpec};
    use rug::Float;

    /// The tower identity: f_1'(0) = e^{2 pi i alpha_1} where alpha_1 is
    /// the tail of the modified expansion. For a constant-digit sequence
    /// alpha_1 = alpha_0, so the measured level-1 rotation must match the
    /// base rotation number itself.
    #[test]
    fn level1_rotation_is_alpha_tail() {
        let prec_a = 256;
        // constant all-minus digits 12: high type, alpha_1 = alpha_0
        let entries: Vec<_> = (0..40)
            .map(|_| crate::arithmetic::DigitEntry {
                a: crate::arithmetic::LogReal::from_u64(prec_a, 12),
                eps_next: Sign::Neg,
            })
            .collect();
        let seq12 = crate::arithmetic::DigitSequence {
            a_minus1: 0,
            eps0: Sign::Pos,
            entries,
            canonical: true,
            prec: prec_a,
        };
        let alpha = Float::with_val(128, realize(&seq12, 40).unwrap().midpoint());
        let alpha_f = alpha.to_f64();
        let map = MapSpec::new(MapFamily::Q, alpha, 128);
        let mut params = FatouFitParams::for_alpha(alpha_f, 300, 1e-6);
        params.im_lo = 0.6;
        let chart = fit_fatou(&map, &params).unwrap();

        // eps_1 = -1 for the all-minus constant sequence
        let tower = RenormTower::new(chart, Sign::Neg, 2);
        let k_max = (1.0 / alpha_f) as usize + 10;
        let rot = tower.level1_rotation(1e-6, 4, k_max).unwrap();
        // alpha_1 = alpha_0 for constant digits; rotation mod 2 pi
        let expect = std::f64::consts::TAU * alpha_f;
        let mut diff = (rot - expect).rem_euclid(std::f64::consts::TAU);
        if diff > std::f64::consts::PI {
            diff -= std::f64::consts::TAU;
        }
        assert!(diff.abs() < 1e-3, "rotation {rot} vs 2 pi alpha_1 {expect}");
    }
}
