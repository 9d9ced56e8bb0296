//! The universal covering `tau(w) = sigma / (1 - e^{-2 pi i alpha w})` from
//! the plane to the sphere minus `{0, sigma}`, its inverse with explicit
//! strip selection, and the lift `F` of the map through `tau` normalized by
//! `F(w) - w -> 1` as `Im w -> +infinity`.

use super::complex::{two_pi, ComplexHP};
use super::maps::{apply_map, MapSpec};
use super::DynamicsError;
use rug::{ops::CompleteRound, Float};

/// `e^{-2 pi i alpha w}`.
fn deck(alpha: &Float, w: &ComplexHP) -> ComplexHP {
    let prec = w.prec().max(alpha.prec());
    let tp = two_pi(prec);
    // -2 pi i alpha (x + i y) = 2 pi alpha y - 2 pi i alpha x
    let ax = (&w.re * alpha).complete(prec);
    let ay = (&w.im * alpha).complete(prec);
    ComplexHP::new((&ay * &tp).complete(prec), -((&ax * &tp).complete(prec))).exp()
}

/// `tau(w) = sigma / (1 - e^{-2 pi i alpha w})`, period `1/alpha`,
/// `tau -> 0` as `Im w -> +inf` and `tau -> sigma` as `Im w -> -inf`.
pub fn tau(alpha: &Float, sigma: &ComplexHP, w: &ComplexHP) -> Result<ComplexHP, DynamicsError> {
    let prec = w.prec();
    let one = ComplexHP::from_f64(prec, 1.0, 0.0);
    let den = one.sub(&deck(alpha, w));
    if den.norm_sq().is_zero() {
        return Err(DynamicsError::PoleAt {
            re: w.re.to_f64(),
            im: w.im.to_f64(),
        });
    }
    Ok(sigma.div(&den))
}

/// Inverse of `tau` with the representative chosen in the strip
/// `Re w in [strip_index/alpha, (strip_index+1)/alpha)`.
pub fn tau_inverse(
    alpha: &Float,
    sigma: &ComplexHP,
    z: &ComplexHP,
    strip_index: i64,
) -> Result<ComplexHP, DynamicsError> {
    let prec = z.prec().max(alpha.prec());
    if z.norm_sq().is_zero() {
        return Err(DynamicsError::BranchUndefined);
    }
    let one = ComplexHP::from_f64(prec, 1.0, 0.0);
    let q = one.sub(&sigma.div(z)); // e^{-2 pi i alpha w}
    if q.norm_sq().is_zero() {
        return Err(DynamicsError::BranchUndefined);
    }
    let lq = q.ln();
    let tp = two_pi(prec);
    let denom = (&tp * alpha).complete(prec);
    // w0 = (-Arg q + i ln|q|)/(2 pi alpha), Re w0 in (-1/(2 alpha), 1/(2 alpha)]
    let w0 = ComplexHP::new(
        (-&lq.im).complete(prec) / &denom,
        (&lq.re / &denom).complete(prec),
    );
    // shift into the requested strip
    let pos = (&w0.re * alpha).complete(prec);
    let k = Float::with_val(prec, strip_index) - pos.floor();
    let shift = k / alpha;
    Ok(ComplexHP::new(
        (&w0.re + &shift).complete(prec),
        w0.im.clone(),
    ))
}

/// One step of the lifted map: `F(w) = tau^{-1}(f(tau(w)))` with the branch
/// chosen nearest to `w + 1` (valid while `F` is a near-translation; the
/// choice is ambiguous once `|F(w) - w - 1|` reaches `1/(2 alpha)`, reported
/// as `BranchLoss`).
pub fn lift_f(map: &MapSpec, sigma: &ComplexHP, w: &ComplexHP) -> Result<ComplexHP, DynamicsError> {
    let prec = w.prec();
    let alpha = &map.alpha;
    let z = tau(alpha, sigma, w)?;
    let fz = apply_map(map, &z);
    let w0 = tau_inverse(alpha, sigma, &fz, 0)?;
    // candidate branch k minimizing |(w0 + k/alpha) - (w + 1)|
    let target = w.add_f64(1.0, 0.0);
    let k = ((&target.re - &w0.re).complete(prec) * alpha).round();
    let shift = (&k / alpha).complete(prec);
    let f_w = ComplexHP::new((&w0.re + &shift).complete(prec), w0.im.clone());
    let dev = f_w.sub(&target).abs();
    let half_period = (1u32 / alpha).complete(prec) / 2u32;
    if dev >= half_period {
        return Err(DynamicsError::BranchLoss { step: 0 });
    }
    Ok(f_w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::maps::{sigma_fixed_point, MapFamily};

    fn setup(alpha: f64) -> (MapSpec, ComplexHP) {
        let m = MapSpec::new(MapFamily::Q, Float::with_val(128, alpha), 128);
        let s = sigma_fixed_point(&m);
        (m, s)
    }

    #[test]
    fn tau_periodicity() {
        let (m, s) = setup(0.084);
        let w = ComplexHP::from_f64(128, 3.7, 2.2);
        let period = 1.0 / 0.084;
        let t1 = tau(&m.alpha, &s, &w).unwrap();
        let t2 = tau(&m.alpha, &s, &w.add_f64(period, 0.0)).unwrap();
        // period is inexact in f64; tolerance reflects d tau/dw there
        assert!(t1.sub(&t2).abs().to_f64() < 1e-12);
        // exact period: shift by (1/alpha) at full precision
        let shift = (1u32 / &m.alpha).complete(128);
        let w2 = ComplexHP::new(w.re.clone() + &shift, w.im.clone());
        let t3 = tau(&m.alpha, &s, &w2).unwrap();
        assert!(t1.sub(&t3).abs().to_f64() < 1e-34);
    }

    #[test]
    fn tau_limits_at_infinity() {
        let (m, s) = setup(0.05);
        // high in the cylinder: tau tiny
        let w = ComplexHP::from_f64(128, 1.0, 300.0);
        let t = tau(&m.alpha, &s, &w).unwrap();
        assert!(t.abs().to_f64() < 1e-40);
        // low: tau -> sigma
        let w = ComplexHP::from_f64(128, 1.0, -300.0);
        let t = tau(&m.alpha, &s, &w).unwrap();
        assert!(t.sub(&s).abs().to_f64() < 1e-40);
    }

    #[test]
    fn tau_round_trip_in_strips() {
        let (m, s) = setup(0.0839);
        for strip in [-1i64, 0, 2] {
            let w = ComplexHP::from_f64(128, 4.3, 1.7);
            let z = tau(&m.alpha, &s, &w).unwrap();
            let back = tau_inverse(&m.alpha, &s, &z, strip).unwrap();
            // back in the requested strip
            let pos = (back.re.to_f64() * 0.0839).floor() as i64;
            assert_eq!(pos, strip);
            // and tau(back) = z
            let z2 = tau(&m.alpha, &s, &back).unwrap();
            assert!(z.sub(&z2).abs().to_f64() < 1e-30);
        }
    }

    #[test]
    fn tau_inverse_rejects_branch_points() {
        let (m, s) = setup(0.05);
        assert!(matches!(
            tau_inverse(&m.alpha, &s, &ComplexHP::zero(128), 0),
            Err(DynamicsError::BranchUndefined)
        ));
        assert!(matches!(
            tau_inverse(&m.alpha, &s, &s, 0),
            Err(DynamicsError::BranchUndefined)
        ));
    }

    #[test]
    fn lift_is_near_translation_high_up() {
        let (m, s) = setup(0.0839);
        let w = ComplexHP::from_f64(128, 2.0, 60.0);
        let fw = lift_f(&m, &s, &w).unwrap();
        let dev = fw.sub(&w.add_f64(1.0, 0.0)).abs().to_f64();
        assert!(dev < 1e-8, "dev = {dev}");
        // commutation: tau(F(w)) = f(tau(w))
        let lhs = tau(&m.alpha, &s, &fw).unwrap();
        let rhs = apply_map(&m, &tau(&m.alpha, &s, &w).unwrap());
        assert!(lhs.sub(&rhs).abs().to_f64() < 1e-30);
    }

    #[test]
    fn lift_commutes_with_period() {
        let (m, s) = setup(0.0839);
        let prec = 128;
        let w = ComplexHP::from_f64(prec, 1.3, 8.0);
        let shift = (1u32 / &m.alpha).complete(prec);
        let w_shift = ComplexHP::new(w.re.clone() + &shift, w.im.clone());
        let a = lift_f(&m, &s, &w).unwrap();
        let b = lift_f(&m, &s, &w_shift).unwrap();
        let d = b.sub(&a).sub(&ComplexHP::new(shift, Float::with_val(prec, 0)));
        assert!(d.abs().to_f64() < 1e-28, "{}", d.abs().to_f64());
    }
}
