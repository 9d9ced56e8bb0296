//! The modified (nearest-integer) continued-fraction expansion
//! `1/alpha_n = a_n + eps_{n+1} * alpha_{n+1}` with `alpha_n` in `(0, 1/2)`,
//! `a_n >= 2` and `eps` in `{+1, -1}`, plus reconstruction, canonicity
//! validation, and the named example digit rules.

use super::{ArithmeticError, LogReal, Sign};
use crate::ext::ExtReal;
use rug::{ops::CompleteRound, Float};
use std::cmp::Ordering;

/// One expansion level: the digit `a_n` paired with the sign `eps_{n+1}`
/// that connects it to the next tail.
#[derive(Clone, Debug)]
pub struct DigitEntry {
    pub a: LogReal,
    pub eps_next: Sign,
}

/// The expansion `{a_-1, eps_0, (a_n, eps_{n+1})_n}`. Digits are held as
/// [`LogReal`] so generated rules with doubly-exponential growth fit.
#[derive(Clone, Debug)]
pub struct DigitSequence {
    pub a_minus1: i64,
    pub eps0: Sign,
    pub entries: Vec<DigitEntry>,
    /// True when every tail `alpha_n` reconstructed from the digits lies in
    /// `(0, 1/2)`.
    pub canonical: bool,
    pub prec: u32,
}

impl DigitSequence {
    pub fn depth(&self) -> usize {
        self.entries.len()
    }

    /// Digit `a_n` for `n >= 0`.
    pub fn digit(&self, n: usize) -> &LogReal {
        &self.entries[n].a
    }

    /// Sign `eps_{n}` for `n >= 0` (note `eps_0` is stored separately).
    pub fn eps(&self, n: usize) -> Sign {
        if n == 0 {
            self.eps0
        } else {
            self.entries[n - 1].eps_next
        }
    }

    /// The tail values `1/alpha_n` (and `log(1/alpha_n)`) reconstructed from
    /// the digits with the truncation tail set to zero. Entry `n` of the
    /// result describes `alpha_n`; levels past the last digit are omitted.
    pub fn tails(&self) -> Vec<AlphaTail> {
        let prec = self.prec;
        let d = self.depth();
        let mut inv = vec![ExtReal::zero(prec); d];
        // backward: 1/alpha_n = a_n + eps_{n+1} * alpha_{n+1}
        for n in (0..d).rev() {
            let a = self.entries[n].a.value();
            if n + 1 == d {
                inv[n] = a;
            } else {
                let alpha_next = ExtReal::from_u64(prec, 1).div(&inv[n + 1]);
                let signed = if self.entries[n].eps_next == Sign::Neg {
                    alpha_next.neg()
                } else {
                    alpha_next
                };
                inv[n] = a.add(&signed);
            }
        }
        inv.into_iter()
            .enumerate()
            .map(|(n, inv_alpha)| {
                let log_inv = LogReal::from_ext(&inv_alpha.ln_mag());
                let value_if_small = ExtReal::from_u64(prec, 1)
                    .div(&inv_alpha)
                    .to_float(prec);
                AlphaTail {
                    level: n,
                    log_inv_alpha: log_inv,
                    value_if_small,
                }
            })
            .collect()
    }

    /// `log(1/alpha_n)` for every level, as plain `ExtReal`s.
    pub fn log_inv_alphas(&self) -> Vec<ExtReal> {
        self.tails()
            .iter()
            .map(|t| t.log_inv_alpha.value())
            .collect()
    }

    /// JSON form: `{"a_minus1":…, "eps0":…, "entries":[{"a":…, "eps":…}],
    /// "canonical":…, "precision":…}` with string-encoded digit values.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "a_minus1": self.a_minus1,
            "eps0": self.eps0.as_i8(),
            "entries": self.entries.iter().map(|e| serde_json::json!({
                "a": e.a.to_json(),
                "eps": e.eps_next.as_i8(),
            })).collect::<Vec<_>>(),
            "canonical": self.canonical,
            "precision": self.prec,
        })
    }

    /// Parse the JSON form produced by [`Self::to_json`]. Digit values may be
    /// decimal strings or nested `{"log": …}` objects.
    pub fn from_json(v: &serde_json::Value) -> Result<Self, String> {
        let prec = v
            .get("precision")
            .and_then(|p| p.as_u64())
            .unwrap_or(crate::DEFAULT_ARITH_PREC as u64) as u32;
        let a_minus1 = v
            .get("a_minus1")
            .and_then(|a| a.as_i64())
            .ok_or("missing a_minus1")?;
        let eps0 = Sign::try_from(
            v.get("eps0").and_then(|e| e.as_i64()).ok_or("missing eps0")? as i8,
        )?;
        let entries = v
            .get("entries")
            .and_then(|e| e.as_array())
            .ok_or("missing entries")?
            .iter()
            .map(|e| -> Result<DigitEntry, String> {
                let a = parse_logreal(e.get("a").ok_or("missing digit value")?, prec)?;
                let eps = Sign::try_from(
                    e.get("eps").and_then(|s| s.as_i64()).ok_or("missing eps")? as i8,
                )?;
                Ok(DigitEntry { a, eps_next: eps })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let canonical = v
            .get("canonical")
            .and_then(|c| c.as_bool())
            .unwrap_or(false);
        Ok(DigitSequence {
            a_minus1,
            eps0,
            entries,
            canonical,
            prec,
        })
    }
}

fn parse_logreal(v: &serde_json::Value, prec: u32) -> Result<LogReal, String> {
    Ok(LogReal::from_ext(&ExtReal::from_json(v, prec)?))
}

/// One reconstructed tail level.
#[derive(Clone, Debug)]
pub struct AlphaTail {
    pub level: usize,
    /// `log(1/alpha_n)`, stored sign + log-magnitude.
    pub log_inv_alpha: LogReal,
    /// `alpha_n` when it fits the float range.
    pub value_if_small: Option<Float>,
}

/// Nearest integer, the distance sign, and the distance, with an ambiguity
/// check against the accumulated error radius.
fn nearest_int(
    v: &Float,
    err: &Float,
    level: usize,
) -> Result<(Float, Sign, Float), ArithmeticError> {
    let prec = v.prec();
    let n = v.clone().round();
    let delta = (v - &n).complete(prec);
    // ambiguous when within err of a half-integer boundary; a bit-exact tie
    // is the representable rational n - 1/2 and proceeds (ties away from
    // zero), terminating rationally one level down
    let half_dist = (Float::with_val(prec, 0.5) - delta.clone().abs()).abs();
    if half_dist <= *err && !half_dist.is_zero() {
        return Err(ArithmeticError::PrecisionExhausted { level });
    }
    let eps = if delta.is_sign_negative() {
        Sign::Neg
    } else {
        Sign::Pos
    };
    Ok((n, eps, delta.abs()))
}

/// Expand `x` to `depth` digits of the modified continued fraction.
///
/// Maintains a forward error radius (amplified by `1/alpha^2` per level) and
/// aborts with `PrecisionExhausted` when the nearest-integer choice becomes
/// ambiguous, or `RationalTermination` when a tail vanishes within error.
pub fn modified_cf(x: &Float, depth: usize) -> Result<DigitSequence, ArithmeticError> {
    assert!(depth >= 1, "depth must be at least 1");
    assert!(x.is_finite(), "input must be finite");
    let prec = x.prec();

    // initial error: 1 ulp of x (callers hand us a rounded value)
    let mut err = Float::with_val(32, Float::i_exp(1, x.get_exp().unwrap_or(0) - prec as i32));

    let (a_m1, eps0, mut alpha) = nearest_int(x, &err, 0)?;
    let a_minus1 = a_m1
        .to_integer()
        .and_then(|i| i.to_i64())
        .ok_or(ArithmeticError::Overflow { level: 0 })?;
    if alpha <= err {
        return Err(ArithmeticError::RationalTermination { level: 0 });
    }

    let mut entries = Vec::with_capacity(depth);
    for n in 0..depth {
        // error amplification through 1/alpha: |d(1/a)| = da/a^2
        let inv = (1u32 / &alpha).complete(prec);
        let amp = Float::with_val(32, &inv) * Float::with_val(32, &inv);
        err = err * amp + Float::with_val(32, Float::i_exp(1, inv.get_exp().unwrap_or(0) - prec as i32));
        let (a_n, eps_next, alpha_next) = nearest_int(&inv, &err, n)?;
        entries.push(DigitEntry {
            a: LogReal::from_ext(&ExtReal::from_float(a_n)),
            eps_next,
        });
        if alpha_next <= err {
            if entries.len() == depth {
                // requested digits all produced; terminating tail is fine
                break;
            }
            return Err(ArithmeticError::RationalTermination { level: n + 1 });
        }
        alpha = alpha_next;
    }

    Ok(DigitSequence {
        a_minus1,
        eps0,
        entries,
        canonical: true,
        prec,
    })
}

/// Result of evaluating a finite expansion.
#[derive(Clone, Debug)]
pub enum Realized {
    /// Truncation uncertainty below 4 ulp: a single value.
    Exact(Float),
    /// Bounds obtained by letting the unknown tail range over `(0, 1/2)`.
    Interval { lo: Float, hi: Float },
}

impl Realized {
    pub fn midpoint(&self) -> Float {
        match self {
            Realized::Exact(v) => v.clone(),
            Realized::Interval { lo, hi } => {
                let prec = lo.prec();
                (lo + hi).complete(prec) / 2u32
            }
        }
    }

    pub fn contains(&self, x: &Float, slack_ulps: u32) -> bool {
        match self {
            Realized::Exact(v) => {
                let prec = v.prec();
                let tol = Float::with_val(
                    prec,
                    Float::i_exp(
                        i64::from(slack_ulps) as i32,
                        v.get_exp().unwrap_or(0) - prec as i32,
                    ),
                );
                (v - x).complete(prec).abs() <= tol
            }
            Realized::Interval { lo, hi } => x >= lo && x <= hi,
        }
    }
}

fn eval_with_tail(seq: &DigitSequence, depth: usize, tail: &ExtReal) -> ExtReal {
    let prec = seq.prec;
    let one = ExtReal::from_u64(prec, 1);
    // innermost denominator: a_{depth-1} + eps_depth * tail
    let mut t = {
        let a = seq.entries[depth - 1].a.value();
        let signed = if seq.entries[depth - 1].eps_next == Sign::Neg {
            tail.neg()
        } else {
            tail.clone()
        };
        a.add(&signed)
    };
    for n in (0..depth - 1).rev() {
        let a = seq.entries[n].a.value();
        let term = one.div(&t);
        let signed = if seq.entries[n].eps_next == Sign::Neg {
            term.neg()
        } else {
            term
        };
        t = a.add(&signed);
    }
    let head = ExtReal::from_i64(prec, seq.a_minus1);
    let term = one.div(&t);
    let signed = if seq.eps0 == Sign::Neg {
        term.neg()
    } else {
        term
    };
    head.add(&signed)
}

/// Evaluate the finite continued fraction through `depth` digits.
///
/// The unknown tail `alpha_depth` ranges over `(0, 1/2)`; both endpoint
/// evaluations are taken and returned as an interval unless they agree to
/// 4 ulp, in which case the value is reported as exact. Huge digits absorb
/// their tails automatically, so deep truncations collapse to `Exact`.
pub fn realize(seq: &DigitSequence, depth: usize) -> Result<Realized, ArithmeticError> {
    if depth == 0 || depth > seq.depth() {
        return Err(ArithmeticError::DepthInsufficient {
            requested: depth,
            available: seq.depth(),
        });
    }
    let prec = seq.prec;
    let zero = ExtReal::zero(prec);
    let half = ExtReal::from_f64(prec, 0.5);
    let v0 = eval_with_tail(seq, depth, &zero);
    let v1 = eval_with_tail(seq, depth, &half);
    let f0 = v0
        .to_float(prec)
        .ok_or(ArithmeticError::Overflow { level: depth })?;
    let f1 = v1
        .to_float(prec)
        .ok_or(ArithmeticError::Overflow { level: depth })?;
    let (lo, hi) = if f0 <= f1 { (f0, f1) } else { (f1, f0) };
    let width = (&hi - &lo).complete(prec);
    let tol = Float::with_val(
        prec,
        Float::i_exp(4, lo.get_exp().unwrap_or(0) - prec as i32),
    );
    if width <= tol {
        Ok(Realized::Exact(lo))
    } else {
        Ok(Realized::Interval { lo, hi })
    }
}

/// Canonicity check result: whether every reconstructed tail lies in
/// `(0, 1/2)` and the first level violating it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalReport {
    pub canonical: bool,
    pub first_violation: Option<usize>,
}

/// Check `alpha_n` in `(0, 1/2)` for every level, by interval evaluation of
/// `1/alpha_n = a_n + eps_{n+1} alpha_{n+1}` with the truncation tail ranging
/// over `[0, 1/2]`. A level is flagged when its interval is not strictly
/// inside `(2, infinity)` for `1/alpha_n` (equivalently `alpha_n < 1/2`
/// fails for some admissible tail).
pub fn validate_canonical(seq: &DigitSequence) -> CanonicalReport {
    let prec = seq.prec;
    let d = seq.depth();
    let two = ExtReal::from_u64(prec, 2);
    let one = ExtReal::from_u64(prec, 1);
    // interval [lo, hi] for 1/alpha_n, propagated backward
    let mut lo = vec![ExtReal::zero(prec); d];
    let mut hi = vec![ExtReal::zero(prec); d];
    for n in (0..d).rev() {
        let a = seq.entries[n].a.value();
        let (alpha_lo, alpha_hi) = if n + 1 == d {
            (ExtReal::zero(prec), ExtReal::from_f64(prec, 0.5))
        } else {
            // alpha_{n+1} interval from 1/alpha_{n+1} interval; positive
            let a_lo = if hi[n + 1].is_zero() {
                ExtReal::zero(prec)
            } else {
                one.div(&hi[n + 1])
            };
            let a_hi = if lo[n + 1].is_zero() || !lo[n + 1].is_positive() {
                ExtReal::from_f64(prec, 0.5)
            } else {
                one.div(&lo[n + 1])
            };
            (a_lo, a_hi)
        };
        match seq.entries[n].eps_next {
            Sign::Pos => {
                lo[n] = a.add(&alpha_lo);
                hi[n] = a.add(&alpha_hi);
            }
            Sign::Neg => {
                lo[n] = a.sub(&alpha_hi);
                hi[n] = a.sub(&alpha_lo);
            }
        }
    }
    for n in 0..d {
        // need 1/alpha_n > 2 (alpha_n < 1/2). The truncation tail ranges
        // over the open interval (0, 1/2), so hitting the bound exactly at
        // an endpoint is not a violation.
        if lo[n].cmp_ext(&two) == Ordering::Less {
            return CanonicalReport {
                canonical: false,
                first_violation: Some(n),
            };
        }
    }
    CanonicalReport {
        canonical: true,
        first_violation: None,
    }
}

fn constant_sequence(prec: u32, a: u64, eps: Sign, a_minus1: i64, eps0: Sign, depth: usize) -> DigitSequence {
    let entries = (0..depth)
        .map(|_| DigitEntry {
            a: LogReal::from_u64(prec, a),
            eps_next: eps,
        })
        .collect();
    let mut seq = DigitSequence {
        a_minus1,
        eps0,
        entries,
        canonical: false,
        prec,
    };
    seq.canonical = validate_canonical(&seq).canonical;
    seq
}

/// `a_n = 3`, `eps = -1` for all `n`: the self-similar expansion of
/// `(3 - sqrt 5)/2`.
pub fn golden_sequence(prec: u32, depth: usize) -> DigitSequence {
    constant_sequence(prec, 3, Sign::Neg, 0, Sign::Pos, depth)
}

/// `a_n = 2`, `eps = +1` for all `n`: the expansion of `sqrt 2 - 1`.
pub fn sqrt2_sequence(prec: u32, depth: usize) -> DigitSequence {
    constant_sequence(prec, 2, Sign::Pos, 0, Sign::Pos, depth)
}

/// All-minus digit rule `a_{n+1} = floor(e^{e^{a_n}})`, seeded at `a0`
/// (use 3 for a canonical head; 2 reproduces the literature seed, which is
/// non-canonical at level 0).
pub fn jagged_example_sequence(prec: u32, a0: u64, depth: usize) -> DigitSequence {
    let mut entries = Vec::with_capacity(depth);
    let mut a = ExtReal::from_u64(prec, a0);
    for _ in 0..depth {
        entries.push(DigitEntry {
            a: LogReal::from_ext(&a),
            eps_next: Sign::Neg,
        });
        a = a.exp().exp().floor();
    }
    let mut seq = DigitSequence {
        a_minus1: 1,
        eps0: Sign::Neg,
        entries,
        canonical: false,
        prec,
    };
    seq.canonical = validate_canonical(&seq).canonical;
    seq
}

/// The witnesses `u_n = e^{a_n} / (a_n log a_n)` for the jagged example rule
/// (so that `a_n^{u_n a_n} = e^{e^{a_n}}`). Because the rule takes a floor,
/// the digit `a_{n+1}` undershoots `a_n^{u_n a_n} + 1/2` by less than one;
/// growth checks against these witnesses hold only to working precision.
/// Use [`jagged_exact_u`] where strict inequalities are required.
pub fn jagged_example_u(seq: &DigitSequence) -> Vec<ExtReal> {
    seq.entries
        .iter()
        .map(|e| {
            let a = e.a.value();
            let ln_a = a.ln_mag();
            a.exp().div(&a.mul(&ln_a))
        })
        .collect()
}

/// Back-solved witnesses `u_n = log(a_{n+1} - 1/2) / (a_n log a_n)`, the
/// largest values for which the growth condition
/// `a_{n+1} >= a_n^{u_n a_n} + 1/2` holds with equality; against these, the
/// divergence inequality chain holds strictly. The final level (which has
/// no successor digit) falls back to the example-rule formula.
pub fn jagged_exact_u(seq: &DigitSequence) -> Vec<ExtReal> {
    let prec = seq.prec;
    let half = ExtReal::from_f64(prec, 0.5);
    let d = seq.depth();
    (0..d)
        .map(|n| {
            let a = seq.digit(n).value();
            let ln_a = a.ln_mag();
            if n + 1 < d {
                let target = seq.digit(n + 1).value().sub(&half);
                target.ln_mag().div(&a.mul(&ln_a))
            } else {
                a.exp().div(&a.mul(&ln_a))
            }
        })
        .collect()
}

/// All-minus digit rule `a_{n+1} = floor(e^{2^n a_n}) + 1`, seeded at `a0`
/// (3 for a canonical head, 2 for the literature seed).
pub fn spiky_example_sequence(prec: u32, a0: u64, depth: usize) -> DigitSequence {
    let mut entries = Vec::with_capacity(depth);
    let one = ExtReal::from_u64(prec, 1);
    let mut a = ExtReal::from_u64(prec, a0);
    for n in 0..depth {
        entries.push(DigitEntry {
            a: LogReal::from_ext(&a),
            eps_next: Sign::Neg,
        });
        let v = ExtReal::from_float(Float::with_val(prec, Float::i_exp(1, n as i32)));
        a = v.mul(&a).exp().floor().add(&one);
    }
    let mut seq = DigitSequence {
        a_minus1: 1,
        eps0: Sign::Neg,
        entries,
        canonical: false,
        prec,
    };
    seq.canonical = validate_canonical(&seq).canonical;
    seq
}

/// The witnesses `v_n = 2^n` for the spiky example rule.
pub fn spiky_example_v(prec: u32, depth: usize) -> Vec<Float> {
    (0..depth)
        .map(|n| Float::with_val(prec, Float::i_exp(1, n as i32)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn float(prec: u32, s: &str) -> Float {
        Float::with_val(prec, Float::parse(s).unwrap())
    }

    #[test]
    fn pi_head_digits() {
        // x = pi: a_-1 = 3, eps0 = +1, then a0 = 7 (+), a1 = 16 (-)
        let pi = Float::with_val(256, rug::float::Constant::Pi);
        let seq = modified_cf(&pi, 2).unwrap();
        assert_eq!(seq.a_minus1, 3);
        assert_eq!(seq.eps0, Sign::Pos);
        assert_eq!(seq.digit(0).to_f64(), 7.0);
        assert_eq!(seq.eps(1), Sign::Pos);
        assert_eq!(seq.digit(1).to_f64(), 16.0);
        assert_eq!(seq.eps(2), Sign::Neg);
        // alpha_1 ~ 0.0625133, alpha_2 ~ 0.003405
        let tails = seq.tails();
        let a1 = tails[1].value_if_small.as_ref().unwrap().to_f64();
        assert!((a1 - 0.0625133).abs() < 1e-4);
    }

    #[test]
    fn pi_minus_3_has_zero_head() {
        let pi = Float::with_val(256, rug::float::Constant::Pi);
        let x = pi - 3u32;
        let seq = modified_cf(&x, 2).unwrap();
        assert_eq!(seq.a_minus1, 0);
        assert_eq!(seq.eps0, Sign::Pos);
        assert_eq!(seq.digit(0).to_f64(), 7.0);
        assert_eq!(seq.digit(1).to_f64(), 16.0);
    }

    #[test]
    fn golden_fixed_point() {
        // x = (3 - sqrt 5)/2 satisfies 1/x = 3 - x: digits all (3, -1)
        let prec = 256;
        let x = (Float::with_val(prec, 3) - Float::with_val(prec, 5).sqrt()) / 2u32;
        // algebraic check of the fixed point
        let resid = (1u32 / x.clone()) - (Float::with_val(prec, 3) - &x);
        assert!(resid.abs().to_f64() < 1e-70);
        let seq = modified_cf(&x, 12).unwrap();
        for n in 0..12 {
            assert_eq!(seq.digit(n).to_f64(), 3.0, "digit {n}");
            assert_eq!(seq.eps(n + 1), Sign::Neg);
        }
    }

    #[test]
    fn sqrt2_fixed_point() {
        // x = sqrt 2 - 1 satisfies 1/x = 2 + x: digits all (2, +1)
        let prec = 256;
        let x = Float::with_val(prec, 2).sqrt() - 1u32;
        let resid = (1u32 / x.clone()) - (Float::with_val(prec, 2) + &x);
        assert!(resid.abs().to_f64() < 1e-70);
        let seq = modified_cf(&x, 12).unwrap();
        for n in 0..12 {
            assert_eq!(seq.digit(n).to_f64(), 2.0);
            assert_eq!(seq.eps(n + 1), Sign::Pos);
        }
    }

    #[test]
    fn rational_termination_at_level_two() {
        // 0.7 = 1 - 0.3; 1/0.3 = 3 + 1/3; 1/(1/3) = 3 exactly
        let x = float(256, "0.7");
        let err = modified_cf(&x, 8).unwrap_err();
        match err {
            ArithmeticError::RationalTermination { level } => assert_eq!(level, 2),
            other => panic!("expected RationalTermination, got {other:?}"),
        }
        // the requested-depth-reached case still succeeds
        let seq = modified_cf(&x, 2).unwrap();
        assert_eq!(seq.a_minus1, 1);
        assert_eq!(seq.eps0, Sign::Neg);
        assert_eq!(seq.digit(0).to_f64(), 3.0);
        assert_eq!(seq.eps(1), Sign::Pos);
        assert_eq!(seq.digit(1).to_f64(), 3.0);
    }

    #[test]
    fn half_terminates_rationally() {
        // exact 0.5: the tie is representable, and 1/(1/2) = 2 terminates
        let x = float(256, "0.5");
        let err = modified_cf(&x, 4).unwrap_err();
        assert!(matches!(err, ArithmeticError::RationalTermination { level: 1 }));
    }

    #[test]
    fn error_amplification_exhausts_precision() {
        // the error radius grows like 1/alpha^2 per level; at 32 bits the
        // golden expansion cannot be certified ~10 levels deep
        let prec = 32;
        let x = (Float::with_val(prec, 3) - Float::with_val(prec, 5).sqrt()) / 2u32;
        match modified_cf(&x, 30) {
            Err(ArithmeticError::PrecisionExhausted { level }) => {
                assert!(level > 4 && level < 25, "level {level}");
            }
            other => panic!("expected PrecisionExhausted, got {other:?}"),
        }
    }

    #[test]
    fn realize_golden_thirty() {
        let prec = 256;
        let seq = golden_sequence(prec, 30);
        let v = realize(&seq, 30).unwrap();
        let expect = (Float::with_val(prec, 3) - Float::with_val(prec, 5).sqrt()) / 2u32;
        assert!(v.contains(&expect, 4) || {
            let mid = v.midpoint();
            ((mid - &expect).abs()).to_f64() < 1e-24
        });
        let mid = v.midpoint();
        assert!(((mid - &expect).abs()).to_f64() < 1e-24);
    }

    #[test]
    fn realize_single_entry_truncation() {
        // a_-1 = 0, eps0 = +1, single digit 2 -> 0.5 (tail zero endpoint)
        let prec = 128;
        let seq = DigitSequence {
            a_minus1: 0,
            eps0: Sign::Pos,
            entries: vec![DigitEntry {
                a: LogReal::from_u64(prec, 2),
                eps_next: Sign::Pos,
            }],
            canonical: true,
            prec,
        };
        match realize(&seq, 1).unwrap() {
            Realized::Interval { lo, hi } => {
                assert!((lo.to_f64() - 0.4).abs() < 1e-12); // tail 1/2: 1/2.5
                assert!((hi.to_f64() - 0.5).abs() < 1e-12); // tail 0: 1/2
            }
            Realized::Exact(_) => panic!("single shallow digit cannot be exact"),
        }
    }

    #[test]
    fn digit_round_trip_through_value() {
        // realize a canonical sequence, re-expand, digits must match
        let prec = 256;
        let seq = golden_sequence(prec, 20);
        let x = realize(&seq, 20).unwrap().midpoint();
        let back = modified_cf(&x, 12).unwrap();
        for n in 0..12 {
            assert_eq!(back.digit(n).to_f64(), 3.0);
            assert_eq!(back.eps(n + 1), Sign::Neg);
        }
    }

    #[test]
    fn canonical_validation() {
        let prec = 128;
        assert!(validate_canonical(&golden_sequence(prec, 10)).canonical);
        assert!(validate_canonical(&sqrt2_sequence(prec, 10)).canonical);
        // (a0=2, eps1=-1, a1=8): alpha_0 = 1/(2 - 1/8ish) > 1/2
        let bad = DigitSequence {
            a_minus1: 0,
            eps0: Sign::Pos,
            entries: vec![
                DigitEntry {
                    a: LogReal::from_u64(prec, 2),
                    eps_next: Sign::Neg,
                },
                DigitEntry {
                    a: LogReal::from_u64(prec, 8),
                    eps_next: Sign::Neg,
                },
            ],
            canonical: false,
            prec,
        };
        let rep = validate_canonical(&bad);
        assert!(!rep.canonical);
        assert_eq!(rep.first_violation, Some(0));
    }

    #[test]
    fn jagged_example_digits() {
        let prec = 256;
        let seq = jagged_example_sequence(prec, 3, 6);
        assert_eq!(seq.digit(0).to_f64(), 3.0);
        // a1 = floor(e^{e^3}) = floor(e^{20.0855...}) = 528491311
        assert_eq!(seq.digit(1).to_f64(), 528491311.0);
        // a2 has log = e^{a1}; check log log a2 = a1 approximately
        let loglog = seq.digit(2).log_mag().unwrap().ln_mag();
        assert!((loglog.to_f64() - 528491311.0).abs() < 1.0);
        // digits strictly increase
        for n in 0..5 {
            assert_eq!(
                seq.digit(n + 1).value().cmp_ext(&seq.digit(n).value()),
                Ordering::Greater
            );
        }
        // canonical with seed 3
        assert!(seq.canonical);
        // the classic seed 2 is non-canonical at level 0
        let classic = jagged_example_sequence(prec, 2, 4);
        assert!(!classic.canonical);
        assert_eq!(validate_canonical(&classic).first_violation, Some(0));
    }

    #[test]
    fn spiky_example_digits() {
        let prec = 256;
        let seq = spiky_example_sequence(prec, 2, 5);
        // a1 = floor(e^2)+1 = 8, a2 = floor(e^16)+1 = 8886111
        assert_eq!(seq.digit(0).to_f64(), 2.0);
        assert_eq!(seq.digit(1).to_f64(), 8.0);
        assert_eq!(seq.digit(2).to_f64(), 8886111.0);
        // a3 = floor(e^{4*8886111})+1: log = 35544444
        let log3 = seq.digit(3).log_mag().unwrap();
        assert!((log3.to_f64() - 35544444.0).abs() < 0.5);
    }

    #[test]
    fn json_round_trip() {
        let prec = 256;
        for seq in [
            golden_sequence(prec, 8),
            jagged_example_sequence(prec, 3, 5),
        ] {
            let j = seq.to_json();
            let back = DigitSequence::from_json(&j).unwrap();
            assert_eq!(back.a_minus1, seq.a_minus1);
            assert_eq!(back.eps0, seq.eps0);
            assert_eq!(back.depth(), seq.depth());
            for n in 0..seq.depth() {
                assert_eq!(
                    back.digit(n).value().cmp_ext(&seq.digit(n).value()),
                    Ordering::Equal,
                    "digit {n}"
                );
            }
        }
    }
}
