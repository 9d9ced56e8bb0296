//! Signed high-precision reals with unbounded exponent.
//!
//! MPFR floats cap out near `2^(2^30)`. The digit rules studied here (for
//! example `a_{n+1} = floor(e^{e^{a_n}})`) blow through that cap after two or
//! three levels, so [`ExtReal`] stores a magnitude either directly as an MPFR
//! float or lazily as `exp` of another `ExtReal`. All arithmetic descends
//! through the exponential tower and bottoms out in ordinary MPFR operations;
//! nothing is ever materialized beyond the float range.
//!
//! Precision semantics: the mantissa at the top of the tower carries the
//! working precision. Quantities deep in a tower are therefore accurate in a
//! *relative-log* sense (their iterated logarithms are accurate to working
//! precision), which is exactly what the log-domain comparisons in
//! [`crate::arithmetic`] need.

use rug::{ops::CompleteRound, Float};
use std::cmp::Ordering;
use std::fmt;

/// `exp(e)` collapses to a plain float when `|e| <= COLLAPSE_LOG`.
/// `exp(1e8)` has binary exponent ~1.44e8, far inside MPFR's range, and the
/// margin leaves room for products of collapsed values.
const COLLAPSE_LOG: f64 = 1.0e8;

/// `to_float` refuses magnitudes with `|log|` beyond this (exponent would
/// approach MPFR's 2^30 limit).
const FLOAT_LOG_LIMIT: f64 = 7.0e8;

#[derive(Clone, Debug)]
enum Mag {
    /// Magnitude held directly; always finite and > 0.
    Flat(Float),
    /// Magnitude is `exp` of the inner value (inner may be negative:
    /// `exp` of a hugely negative number encodes a hugely tiny magnitude).
    Exp(Box<ExtReal>),
}

/// A signed real number of unbounded magnitude at explicit precision.
#[derive(Clone, Debug)]
pub struct ExtReal {
    /// -1, 0, +1
    sign: i8,
    mag: Mag,
}

impl ExtReal {
    pub fn zero(prec: u32) -> Self {
        ExtReal {
            sign: 0,
            mag: Mag::Flat(Float::with_val(prec, 0)),
        }
    }

    pub fn from_float(x: Float) -> Self {
        assert!(x.is_finite(), "ExtReal::from_float requires a finite float");
        if x.is_zero() {
            let prec = x.prec();
            return Self::zero(prec);
        }
        let sign = if x.is_sign_negative() { -1 } else { 1 };
        ExtReal {
            sign,
            mag: Mag::Flat(x.abs()),
        }
    }

    pub fn from_f64(prec: u32, v: f64) -> Self {
        Self::from_float(Float::with_val(prec, v))
    }

    pub fn from_u64(prec: u32, v: u64) -> Self {
        Self::from_float(Float::with_val(prec, v))
    }

    pub fn from_i64(prec: u32, v: i64) -> Self {
        Self::from_float(Float::with_val(prec, v))
    }

    pub fn prec(&self) -> u32 {
        match &self.mag {
            Mag::Flat(f) => f.prec(),
            Mag::Exp(e) => e.prec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn is_positive(&self) -> bool {
        self.sign > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign < 0
    }

    pub fn signum(&self) -> i8 {
        self.sign
    }

    /// Height of the exponential tower (0 for plain floats).
    pub fn tower_height(&self) -> usize {
        match &self.mag {
            Mag::Flat(_) => 0,
            Mag::Exp(e) => 1 + e.tower_height(),
        }
    }

    /// Natural log of |self|. Panics on zero.
    pub fn ln_mag(&self) -> ExtReal {
        assert!(self.sign != 0, "ln_mag of zero");
        match &self.mag {
            Mag::Flat(f) => {
                let prec = f.prec();
                ExtReal::from_float(Float::with_val(prec, f.ln_ref()))
            }
            Mag::Exp(e) => (**e).clone(),
        }
    }

    /// `exp(x)`, exact in the tower sense: collapses to a flat float when the
    /// argument is small enough, otherwise records one more tower level.
    pub fn exp(&self) -> ExtReal {
        if self.sign == 0 {
            return ExtReal::from_u64(self.prec(), 1);
        }
        if let Mag::Flat(f) = &self.mag {
            let mag = f.to_f64();
            if mag <= COLLAPSE_LOG {
                let prec = f.prec();
                let arg = if self.sign < 0 {
                    (-f).complete(prec)
                } else {
                    f.clone()
                };
                return ExtReal::from_float(arg.exp());
            }
        }
        ExtReal {
            sign: 1,
            mag: Mag::Exp(Box::new(self.clone())),
        }
    }

    pub fn neg(&self) -> ExtReal {
        let mut r = self.clone();
        r.sign = -r.sign;
        r
    }

    pub fn abs(&self) -> ExtReal {
        let mut r = self.clone();
        if r.sign < 0 {
            r.sign = 1;
        }
        r
    }

    /// Compare |self| with |other|.
    pub fn cmp_mag(&self, other: &ExtReal) -> Ordering {
        if self.sign == 0 || other.sign == 0 {
            return self.sign.abs().cmp(&other.sign.abs());
        }
        match (&self.mag, &other.mag) {
            (Mag::Flat(a), Mag::Flat(b)) => a.partial_cmp(b).unwrap_or(Ordering::Equal),
            _ => self.ln_mag().cmp_ext(&other.ln_mag()),
        }
    }

    /// Total order on values.
    pub fn cmp_ext(&self, other: &ExtReal) -> Ordering {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => {}
            ord => return ord,
        }
        match self.sign {
            0 => Ordering::Equal,
            1 => self.cmp_mag(other),
            _ => other.cmp_mag(self),
        }
    }

    pub fn ge_ext(&self, other: &ExtReal) -> bool {
        self.cmp_ext(other) != Ordering::Less
    }

    /// One-sided comparison with slack: true when `self >= other` outright,
    /// or when the two magnitudes are indistinguishable to within
    /// `2^log2_slack` ulps at the top of their exponential towers. For tower
    /// values this is the only meaningful notion of "equal to working
    /// precision": a relative-in-value slack below the ulp of the topmost
    /// log is unresolvable by construction.
    pub fn ge_within(&self, other: &ExtReal, log2_slack: u32) -> bool {
        if self.ge_ext(other) {
            return true;
        }
        if self.sign <= 0 || other.sign <= 0 {
            return false;
        }
        Self::mag_eq_within(self, other, log2_slack)
    }

    fn mag_eq_within(a: &ExtReal, b: &ExtReal, log2_slack: u32) -> bool {
        match (&a.mag, &b.mag) {
            (Mag::Flat(fa), Mag::Flat(fb)) => {
                let prec = fa.prec().max(fb.prec());
                let hi = if fa > fb { fa } else { fb };
                let tol_exp = hi.get_exp().unwrap_or(0) as i64 - prec as i64 + log2_slack as i64;
                if tol_exp < -(1 << 29) {
                    return fa == fb;
                }
                let tol = Float::with_val(prec, Float::i_exp(1, tol_exp as i32));
                let diff = (fa - fb).complete(prec).abs();
                diff <= tol
            }
            // mixed shapes: compare one level down the tower
            _ => {
                if a.sign == 0 || b.sign == 0 {
                    return a.sign == b.sign;
                }
                let la = a.ln_mag();
                let lb = b.ln_mag();
                if la.sign != lb.sign {
                    return false;
                }
                Self::mag_eq_within(&la.abs(), &lb.abs(), log2_slack)
            }
        }
    }

    pub fn mul(&self, other: &ExtReal) -> ExtReal {
        let prec = self.prec().max(other.prec());
        let sign = self.sign * other.sign;
        if sign == 0 {
            return ExtReal::zero(prec);
        }
        if let (Mag::Flat(a), Mag::Flat(b)) = (&self.mag, &other.mag) {
            // stay flat when the product cannot overflow
            let ea = a.get_exp().unwrap_or(0) as i64;
            let eb = b.get_exp().unwrap_or(0) as i64;
            if ea.abs() + eb.abs() < (1i64 << 29) {
                let mut r = ExtReal::from_float((a * b).complete(prec));
                r.sign = sign;
                return r;
            }
        }
        let l = self.ln_mag().add(&other.ln_mag());
        let mut r = l.exp();
        r.sign = sign;
        r
    }

    pub fn div(&self, other: &ExtReal) -> ExtReal {
        let prec = self.prec().max(other.prec());
        assert!(other.sign != 0, "ExtReal division by zero");
        if self.sign == 0 {
            return ExtReal::zero(prec);
        }
        let sign = self.sign * other.sign;
        if let (Mag::Flat(a), Mag::Flat(b)) = (&self.mag, &other.mag) {
            let ea = a.get_exp().unwrap_or(0) as i64;
            let eb = b.get_exp().unwrap_or(0) as i64;
            if ea.abs() + eb.abs() < (1i64 << 29) {
                let mut r = ExtReal::from_float((a / b).complete(prec));
                r.sign = sign;
                return r;
            }
        }
        let l = self.ln_mag().sub(&other.ln_mag());
        let mut r = l.exp();
        r.sign = sign;
        r
    }

    pub fn add(&self, other: &ExtReal) -> ExtReal {
        let prec = self.prec().max(other.prec());
        if self.sign == 0 {
            return other.clone();
        }
        if other.sign == 0 {
            return self.clone();
        }
        if self.sign == other.sign {
            let mut r = Self::add_mag(self, other, prec);
            r.sign = self.sign;
            return r;
        }
        // opposite signs: subtract the smaller magnitude from the larger
        match self.cmp_mag(other) {
            Ordering::Equal => ExtReal::zero(prec),
            Ordering::Greater => {
                let mut r = Self::sub_mag(self, other, prec);
                r.sign = self.sign;
                r
            }
            Ordering::Less => {
                let mut r = Self::sub_mag(other, self, prec);
                r.sign = other.sign;
                r
            }
        }
    }

    pub fn sub(&self, other: &ExtReal) -> ExtReal {
        self.add(&other.neg())
    }

    /// |a| + |b| as a positive magnitude (sign set by caller).
    fn add_mag(a: &ExtReal, b: &ExtReal, prec: u32) -> ExtReal {
        if let (Mag::Flat(fa), Mag::Flat(fb)) = (&a.mag, &b.mag) {
            let ea = fa.get_exp().unwrap_or(0) as i64;
            let eb = fb.get_exp().unwrap_or(0) as i64;
            if ea.abs().max(eb.abs()) < (1i64 << 29) {
                return ExtReal::from_float((fa + fb).complete(prec));
            }
        }
        let (hi, lo) = if a.cmp_mag(b) == Ordering::Less {
            (b, a)
        } else {
            (a, b)
        };
        // hi*(1 + lo/hi): correction = ln(1 + exp(d)) with d = ln lo - ln hi <= 0
        let d = lo.ln_mag().sub(&hi.ln_mag());
        match Self::small_log_ratio(&d, prec) {
            None => hi.abs(),
            Some(r) => {
                let corr = r.exp().ln_1p();
                let l = hi.ln_mag().add(&ExtReal::from_float(corr));
                l.exp()
            }
        }
    }

    /// |a| - |b| for |a| > |b| as a positive magnitude (or zero when the
    /// difference is below working precision).
    fn sub_mag(a: &ExtReal, b: &ExtReal, prec: u32) -> ExtReal {
        if let (Mag::Flat(fa), Mag::Flat(fb)) = (&a.mag, &b.mag) {
            let ea = fa.get_exp().unwrap_or(0) as i64;
            let eb = fb.get_exp().unwrap_or(0) as i64;
            if ea.abs().max(eb.abs()) < (1i64 << 29) {
                return ExtReal::from_float((fa - fb).complete(prec));
            }
        }
        let d = b.ln_mag().sub(&a.ln_mag());
        match Self::small_log_ratio(&d, prec) {
            None => a.abs(),
            Some(r) => {
                let ratio = r.exp(); // in (0, 1]
                let one_minus = (1u32 - &ratio).complete(prec);
                if one_minus.is_zero() || one_minus.is_sign_negative() {
                    return ExtReal::zero(prec);
                }
                let corr = one_minus.ln();
                let l = a.ln_mag().add(&ExtReal::from_float(corr));
                l.exp()
            }
        }
    }

    /// For `d = ln(lo/hi) <= 0`: returns `d` as a plain float when the ratio
    /// is above the absorption threshold, `None` when `lo` is negligible.
    fn small_log_ratio(d: &ExtReal, prec: u32) -> Option<Float> {
        debug_assert!(d.sign <= 0);
        if d.sign == 0 {
            return Some(Float::with_val(prec, 0));
        }
        let absorb = (prec as f64 + 64.0) * std::f64::consts::LN_2;
        match &d.mag {
            Mag::Flat(f) => {
                if f.to_f64() > absorb {
                    None
                } else {
                    Some((-f).complete(prec))
                }
            }
            // magnitude of ln-ratio beyond float range: hopelessly negligible
            Mag::Exp(_) => None,
        }
    }

    /// The value as an MPFR float, if it fits the float exponent range.
    pub fn to_float(&self, prec: u32) -> Option<Float> {
        if self.sign == 0 {
            return Some(Float::with_val(prec, 0));
        }
        let mag = match &self.mag {
            Mag::Flat(f) => Float::with_val(prec, f),
            Mag::Exp(e) => {
                let inner = e.to_float(prec + 16)?;
                let v = inner.to_f64();
                if !(-FLOAT_LOG_LIMIT..=FLOAT_LOG_LIMIT).contains(&v) {
                    return None;
                }
                Float::with_val(prec, inner.exp_ref())
            }
        };
        Some(if self.sign < 0 { -mag } else { mag })
    }

    pub fn to_f64(&self) -> f64 {
        match self.to_float(64) {
            Some(f) => f.to_f64(),
            None => {
                // infinite in f64 terms, signed by the tower
                let inner_sign = match &self.mag {
                    Mag::Exp(e) => e.sign,
                    Mag::Flat(_) => 1,
                };
                if inner_sign < 0 {
                    0.0
                } else if self.sign < 0 {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Round toward negative infinity when a meaningful fractional part is
    /// resolvable at working precision; identity otherwise (the ulp of a
    /// huge value already exceeds 1).
    pub fn floor(&self) -> ExtReal {
        if self.sign == 0 {
            return self.clone();
        }
        if let Mag::Flat(f) = &self.mag {
            if (f.get_exp().unwrap_or(0) as i64) < f.prec() as i64 {
                let prec = f.prec();
                let v = if self.sign < 0 {
                    (-f).complete(prec)
                } else {
                    f.clone()
                };
                return ExtReal::from_float(v.floor());
            }
        }
        self.clone()
    }

    /// Serialize: plain decimal string for modestly sized values, otherwise
    /// a nested `{"log": ...}` object (natural log, recursively encoded).
    /// Decimal strings carry enough digits for exact binary round-trips.
    pub fn to_json(&self) -> serde_json::Value {
        if self.sign == 0 {
            return serde_json::Value::String("0".to_string());
        }
        if let Mag::Flat(f) = &self.mag {
            let e = f.get_exp().unwrap_or(0);
            if e.abs() < 140 {
                let digits = (f.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 4;
                let s = self
                    .to_float(f.prec())
                    .expect("flat value must convert")
                    .to_string_radix(10, Some(digits));
                return serde_json::Value::String(s);
            }
        }
        let ln = self.ln_mag();
        let mut m = serde_json::Map::new();
        m.insert("log".to_string(), ln.to_json());
        if self.sign < 0 {
            m.insert("sign".to_string(), serde_json::json!(-1));
        }
        serde_json::Value::Object(m)
    }

    /// Parse the encoding produced by [`Self::to_json`]. The `{"log": …}`
    /// form is rebuilt structurally (`exp` of the parsed log), so round
    /// trips are bit-exact.
    pub fn from_json(v: &serde_json::Value, prec: u32) -> Result<Self, String> {
        match v {
            serde_json::Value::String(s) => {
                let f = Float::parse(s).map_err(|e| e.to_string())?;
                Ok(ExtReal::from_float(Float::with_val(prec, f)))
            }
            serde_json::Value::Number(n) => {
                let f = n.as_f64().ok_or("unrepresentable number")?;
                Ok(ExtReal::from_f64(prec, f))
            }
            serde_json::Value::Object(m) => {
                let inner = Self::from_json(m.get("log").ok_or("expected log field")?, prec)?;
                let val = inner.exp();
                let sign = m.get("sign").and_then(|s| s.as_i64()).unwrap_or(1);
                Ok(if sign < 0 { val.neg() } else { val })
            }
            _ => Err("unsupported numeric encoding".to_string()),
        }
    }

    /// Upper bound, in bits, on how much relative error in the value is
    /// amplified by the exponential tower: the sum over tower levels of the
    /// binary exponent of each level's flat top. A value `exp(L)` with
    /// `L ~ 2^k` known to `p` bits has relative error about `2^(k-p)`.
    pub fn log_amplification_bits(&self) -> i64 {
        match &self.mag {
            Mag::Flat(_) => 0,
            Mag::Exp(e) => {
                let top = match &e.mag {
                    Mag::Flat(f) => f.get_exp().unwrap_or(0).max(0) as i64,
                    // log itself beyond float range: nothing in the value
                    // domain is resolvable at any working precision
                    Mag::Exp(_) => 1 << 40,
                };
                top.saturating_add(e.log_amplification_bits())
            }
        }
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_ext(other) == Ordering::Equal
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_ext(other))
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == 0 {
            return write!(f, "0");
        }
        match &self.mag {
            Mag::Flat(m) => {
                let v = m.to_f64();
                if self.sign < 0 {
                    write!(f, "-{v:e}")
                } else {
                    write!(f, "{v:e}")
                }
            }
            Mag::Exp(e) => {
                if self.sign < 0 {
                    write!(f, "-exp({e})")
                } else {
                    write!(f, "exp({e})")
                }
            }
        }
    }
}
