//! The two quadratic families and their distinguished points.
//!
//! `P(z) = e^{2 pi i a} z + z^2` and the normalized
//! `Q(z) = e^{2 pi i a} z + (27/16) e^{4 pi i a} z^2`, whose critical value
//! is `-4/27` for every rotation number.

use super::complex::{two_pi, ComplexHP};
use rug::{ops::CompleteRound, Float};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapFamily {
    P,
    Q,
}

/// A concrete map: family, rotation number, working precision.
#[derive(Clone, Debug)]
pub struct MapSpec {
    pub family: MapFamily,
    pub alpha: Float,
    pub precision: u32,
}

impl MapSpec {
    pub fn new(family: MapFamily, alpha: Float, precision: u32) -> Self {
        let alpha = Float::with_val(precision, alpha);
        MapSpec {
            family,
            alpha,
            precision,
        }
    }

    /// `e^{2 pi i alpha}`.
    pub fn lambda(&self) -> ComplexHP {
        let t = two_pi(self.precision) * &self.alpha;
        ComplexHP::cis(&t)
    }

    /// `e^{-2 pi i alpha}`.
    pub fn lambda_inv(&self) -> ComplexHP {
        self.lambda().conj()
    }

    /// Quadratic coefficient: `(27/16) lambda^2` for Q, `1` for P.
    pub fn quad_coeff(&self) -> ComplexHP {
        let prec = self.precision;
        match self.family {
            MapFamily::P => ComplexHP::from_f64(prec, 1.0, 0.0),
            MapFamily::Q => {
                let l = self.lambda();
                let c = Float::with_val(prec, 27) / 16u32;
                l.mul(&l).scale(&c)
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "family": match self.family { MapFamily::P => "P", MapFamily::Q => "Q" },
            "alpha": self.alpha.to_string_radix(10, None),
            "alpha_f64": self.alpha.to_f64(),
            "precision": self.precision,
        })
    }
}

/// One application of the map: `z (lambda + c z)`.
pub fn apply_map(map: &MapSpec, z: &ComplexHP) -> ComplexHP {
    let t = map.lambda().add(&map.quad_coeff().mul(z));
    z.mul(&t)
}

/// The distinguished critical point: `-(8/27) e^{-2 pi i a}` for Q,
/// `-lambda/2` for P.
pub fn critical_point(map: &MapSpec) -> ComplexHP {
    let prec = map.precision;
    match map.family {
        MapFamily::Q => {
            let s = Float::with_val(prec, -8) / 27u32;
            map.lambda_inv().scale(&s)
        }
        MapFamily::P => {
            let s = Float::with_val(prec, -0.5);
            map.lambda().scale(&s)
        }
    }
}

/// The critical value: exactly `-4/27` for Q (independent of alpha),
/// `-lambda^2/4` for P.
pub fn critical_value(map: &MapSpec) -> ComplexHP {
    let prec = map.precision;
    match map.family {
        MapFamily::Q => {
            let v = Float::with_val(prec, -4) / 27u32;
            ComplexHP::new(v, Float::with_val(prec, 0))
        }
        MapFamily::P => {
            let l = map.lambda();
            let s = Float::with_val(prec, -0.25);
            l.mul(&l).scale(&s)
        }
    }
}

/// The nonzero fixed point near the origin, in closed form:
/// `sigma = (16/27)(1 - lambda) e^{-4 pi i a}` for Q, `1 - lambda` for P.
/// Verified to satisfy `|f(sigma) - sigma|` at ulp scale.
pub fn sigma_fixed_point(map: &MapSpec) -> ComplexHP {
    let prec = map.precision;
    let one = ComplexHP::from_f64(prec, 1.0, 0.0);
    let sigma = match map.family {
        MapFamily::Q => {
            let s = Float::with_val(prec, 16) / 27u32;
            let li = map.lambda_inv();
            one.sub(&map.lambda()).mul(&li).mul(&li).scale(&s)
        }
        MapFamily::P => one.sub(&map.lambda()),
    };
    debug_assert!({
        let resid = apply_map(map, &sigma).sub(&sigma).abs();
        let scale = sigma.abs().max(&Float::with_val(prec, 1e-30));
        resid / scale < Float::with_val(prec, Float::i_exp(1, 8 - prec as i32))
    });
    sigma
}

/// The modified exponential `Exp(zeta) = -(4/27) e^{2 pi i zeta}`, which
/// projects the Abel-coordinate cylinder and maps integers to the critical
/// value.
pub fn exp_map(zeta: &ComplexHP) -> ComplexHP {
    let prec = zeta.prec();
    let tp = two_pi(prec);
    // 2 pi i zeta = (-2 pi Im, 2 pi Re)
    let arg = ComplexHP::new(
        (-&zeta.im).complete(prec) * &tp,
        (&zeta.re * &tp).complete(prec),
    );
    let s = Float::with_val(prec, -4) / 27u32;
    arg.exp().scale(&s)
}

/// Principal inverse of the modified exponential: the representative with
/// `Re` in `(-1/2, 1/2]`. Fibers differ by integer translations.
pub fn exp_map_inverse(w: &ComplexHP) -> ComplexHP {
    let prec = w.prec();
    let s = Float::with_val(prec, -27) / 4u32;
    let q = w.scale(&s); // -(27/4) w = e^{2 pi i zeta}
    let lq = q.ln();
    let tp = two_pi(prec);
    // zeta = Log(q)/(2 pi i) = (Arg q - i ln|q|)/(2 pi)
    ComplexHP::new(
        (&lq.im / &tp).complete(prec),
        (-&lq.re).complete(prec) / &tp,
    )
}

/// Complex conjugation `s(z) = conj(z)`, the anti-holomorphic involution
/// used to flip rotation numbers.
pub fn conj_s(z: &ComplexHP) -> ComplexHP {
    z.conj()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q_map(alpha: f64) -> MapSpec {
        MapSpec::new(MapFamily::Q, Float::with_val(128, alpha), 128)
    }

    #[test]
    fn origin_is_fixed() {
        let m = q_map(0.23);
        let z = ComplexHP::zero(128);
        let f = apply_map(&m, &z);
        assert_eq!(f.to_f64(), (0.0, 0.0));
    }

    #[test]
    fn q_critical_value_is_universal() {
        // Q(cp) = -4/27 to deep precision for arbitrary alpha
        for i in 0..20 {
            let alpha = 0.017 + 0.047 * i as f64;
            let m = q_map(alpha);
            let cv = apply_map(&m, &critical_point(&m));
            let expect = critical_value(&m); // exact -4/27 at full precision
            let d = cv.sub(&expect).abs().to_f64();
            assert!(d < 1e-36, "alpha={alpha}: {d}");
            let cp_mod = critical_point(&m).abs();
            let expect_mod = Float::with_val(128, 8) / 27u32;
            assert!((cp_mod - expect_mod).abs().to_f64() < 1e-36);
        }
    }

    #[test]
    fn q_alpha_zero_closed_forms() {
        let m = q_map(0.0);
        assert_eq!(critical_point(&m).to_f64().0, -8.0 / 27.0);
        assert_eq!(critical_value(&m).to_f64(), (-4.0 / 27.0, 0.0));
    }

    #[test]
    fn p_critical_data() {
        // P at alpha = 1/2: lambda = -1: cp = 1/2, cv = -1/4
        let m = MapSpec::new(MapFamily::P, Float::with_val(128, 0.5), 128);
        let cp = critical_point(&m);
        let cv = critical_value(&m);
        assert!((cp.re.to_f64() - 0.5).abs() < 1e-30);
        assert!(cp.im.to_f64().abs() < 1e-30);
        assert!((cv.re.to_f64() + 0.25).abs() < 1e-30);
        // and cv = P(cp) in general
        for alpha in [0.1, 0.37, 0.72] {
            let m = MapSpec::new(MapFamily::P, Float::with_val(128, alpha), 128);
            let d = apply_map(&m, &critical_point(&m))
                .sub(&critical_value(&m))
                .abs()
                .to_f64();
            assert!(d < 1e-35);
        }
    }

    #[test]
    fn sigma_closed_forms() {
        // Q at alpha = 1/4: sigma = (16/27)(i - 1)
        let m = q_map(0.25);
        let s = sigma_fixed_point(&m);
        let (re, im) = s.to_f64();
        assert!((re + 16.0 / 27.0).abs() < 1e-30, "{re}");
        assert!((im - 16.0 / 27.0).abs() < 1e-30, "{im}");
        // P at alpha = 1/2: sigma = 2
        let m = MapSpec::new(MapFamily::P, Float::with_val(128, 0.5), 128);
        let s = sigma_fixed_point(&m);
        assert!((s.re.to_f64() - 2.0).abs() < 1e-30);
        // |sigma| ~ (16/27) 2 pi alpha for small alpha
        let m = q_map(1e-4);
        let s = sigma_fixed_point(&m).abs().to_f64();
        let slope = s / 1e-4;
        assert!((slope - 16.0 / 27.0 * std::f64::consts::TAU).abs() < 0.01, "{slope}");
    }

    #[test]
    fn exp_map_values() {
        let prec = 128;
        // Exp(0) = -4/27
        let z = exp_map(&ComplexHP::zero(prec));
        assert!((z.re.to_f64() + 4.0 / 27.0).abs() < 1e-30);
        // Exp(1/2) = +4/27
        let z = exp_map(&ComplexHP::from_f64(prec, 0.5, 0.0));
        assert!((z.re.to_f64() - 4.0 / 27.0).abs() < 1e-30);
        // period 1
        let zeta = ComplexHP::from_f64(prec, 0.37, 1.4);
        let d = exp_map(&zeta)
            .sub(&exp_map(&zeta.add_f64(1.0, 0.0)))
            .abs()
            .to_f64();
        assert!(d < 1e-35);
        // principal inverse round trip
        let back = exp_map_inverse(&exp_map(&zeta));
        assert!((back.re.to_f64() - 0.37).abs() < 1e-30);
        assert!((back.im.to_f64() - 1.4).abs() < 1e-30);
    }

    #[test]
    fn conjugation_flips_alpha() {
        // s o Q_a o s = Q_{-a}
        let m = q_map(0.3);
        let m_neg = MapSpec::new(MapFamily::Q, Float::with_val(128, -0.3), 128);
        let z = ComplexHP::from_f64(128, 0.11, -0.07);
        let lhs = conj_s(&apply_map(&m, &conj_s(&z)));
        let rhs = apply_map(&m_neg, &z);
        assert!(lhs.sub(&rhs).abs().to_f64() < 1e-35);
        // involution
        let d = conj_s(&conj_s(&z)).sub(&z).abs().to_f64();
        assert_eq!(d, 0.0);
    }
}
