//! Complex numbers over MPFR floats at explicit precision.

use rug::{ops::CompleteRound, Float};

#[derive(Clone, Debug)]
pub struct ComplexHP {
    pub re: Float,
    pub im: Float,
}

impl ComplexHP {
    pub fn new(re: Float, im: Float) -> Self {
        ComplexHP { re, im }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        ComplexHP {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_f64(prec, 0.0, 0.0)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec().max(other.prec());
        ComplexHP {
            re: (&self.re + &other.re).complete(prec),
            im: (&self.im + &other.im).complete(prec),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let prec = self.prec().max(other.prec());
        ComplexHP {
            re: (&self.re - &other.re).complete(prec),
            im: (&self.im - &other.im).complete(prec),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.prec().max(other.prec());
        let re = (&self.re * &other.re).complete(prec) - (&self.im * &other.im).complete(prec);
        let im = (&self.re * &other.im).complete(prec) + (&self.im * &other.re).complete(prec);
        ComplexHP { re, im }
    }

    pub fn div(&self, other: &Self) -> Self {
        let prec = self.prec().max(other.prec());
        let d = other.norm_sq();
        let re = ((&self.re * &other.re).complete(prec) + (&self.im * &other.im).complete(prec)) / &d;
        let im = ((&self.im * &other.re).complete(prec) - (&self.re * &other.im).complete(prec)) / &d;
        ComplexHP { re, im }
    }

    pub fn neg(&self) -> Self {
        let prec = self.prec();
        ComplexHP {
            re: (-&self.re).complete(prec),
            im: (-&self.im).complete(prec),
        }
    }

    pub fn conj(&self) -> Self {
        let prec = self.prec();
        ComplexHP {
            re: self.re.clone(),
            im: (-&self.im).complete(prec),
        }
    }

    pub fn scale(&self, s: &Float) -> Self {
        let prec = self.prec().max(s.prec());
        ComplexHP {
            re: (&self.re * s).complete(prec),
            im: (&self.im * s).complete(prec),
        }
    }

    pub fn add_f64(&self, re: f64, im: f64) -> Self {
        let prec = self.prec();
        ComplexHP {
            re: (&self.re + re).complete(prec),
            im: (&self.im + im).complete(prec),
        }
    }

    pub fn norm_sq(&self) -> Float {
        let prec = self.prec();
        (&self.re * &self.re).complete(prec) + (&self.im * &self.im).complete(prec)
    }

    pub fn abs(&self) -> Float {
        self.norm_sq().sqrt()
    }

    pub fn arg(&self) -> Float {
        self.im.clone().atan2(&self.re)
    }

    /// `e^z = e^re (cos im + i sin im)`.
    pub fn exp(&self) -> Self {
        let prec = self.prec();
        let m = self.re.clone().exp();
        let (s, c) = self.im.clone().sin_cos(Float::new(prec));
        ComplexHP {
            re: (&m * &c).complete(prec),
            im: (&m * &s).complete(prec),
        }
    }

    /// Principal log: `ln|z| + i Arg z`, `Arg` in `(-pi, pi]`.
    pub fn ln(&self) -> Self {
        let prec = self.prec();
        let r = self.norm_sq().ln() / 2u32;
        ComplexHP {
            re: Float::with_val(prec, r),
            im: self.arg(),
        }
    }

    /// `e^{i t}` for real `t`.
    pub fn cis(t: &Float) -> Self {
        let prec = t.prec();
        let (s, c) = t.clone().sin_cos(Float::new(prec));
        ComplexHP { re: c, im: s }
    }

    pub fn dist(&self, other: &Self) -> Float {
        self.sub(other).abs()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

pub(crate) fn two_pi(prec: u32) -> Float {
    Float::with_val(prec, rug::float::Constant::Pi) * 2u32
}
