//! Property tests for the expansion invariants: reconstruction round trips,
//! the per-level identity, and the analytic properties of `h_alpha`.

use hedgedim::arithmetic::{
    h_alpha, modified_cf, realize, validate_canonical, DigitEntry, DigitSequence, LogReal, Sign,
};
use proptest::prelude::*;
use rug::{ops::CompleteRound, Float};

const PREC: u32 = 256;

fn canonical_sequence(digits: &[(u8, bool)]) -> DigitSequence {
    // eps = -1 requires a >= 3 to keep the tail in (0, 1/2)
    let entries: Vec<DigitEntry> = digits
        .iter()
        .map(|&(a, minus)| {
            let a = a.max(2) as u64;
            let (a, eps) = if minus { (a.max(3), Sign::Neg) } else { (a, Sign::Pos) };
            DigitEntry {
                a: LogReal::from_u64(PREC, a),
                eps_next: eps,
            }
        })
        .collect();
    DigitSequence {
        a_minus1: 0,
        eps0: Sign::Pos,
        entries,
        canonical: true,
        prec: PREC,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// realize . modified_cf is the identity on canonical sequences: the
    /// digits reproduce exactly and the value round-trips to 4 ulp.
    #[test]
    fn reconstruction_round_trip(digits in prop::collection::vec((2u8..40, any::<bool>()), 12)) {
        let seq = canonical_sequence(&digits);
        prop_assert!(validate_canonical(&seq).canonical);
        let x = realize(&seq, 12).unwrap().midpoint();
        prop_assert!(x.clone().abs() < 1u32);

        let back = modified_cf(&x, 12).unwrap();
        for n in 0..12 {
            prop_assert_eq!(
                back.digit(n).to_f64(),
                seq.digit(n).to_f64(),
                "digit {} differs", n
            );
            prop_assert_eq!(back.eps(n), seq.eps(n));
        }
        // value round trip: re-realizing the expansion returns x to 4 ulp
        let x2 = realize(&back, 12).unwrap().midpoint();
        let diff = (&x2 - &x).complete(PREC).abs();
        let ulp = Float::with_val(PREC, Float::i_exp(4, x.get_exp().unwrap_or(0) - PREC as i32));
        prop_assert!(diff <= ulp, "diff {:e}", diff.to_f64());
    }

    /// At every level, |1/alpha_n - a_n - eps alpha_{n+1}| <= 4 ulp, with
    /// the true tails recomputed by an independent forward recursion from
    /// the realized value. The log-domain storage path is checked with a
    /// slack that covers its ln/exp round trips.
    #[test]
    fn level_identity(digits in prop::collection::vec((2u8..40, any::<bool>()), 10)) {
        let seq = canonical_sequence(&digits);
        let x = realize(&seq, 10).unwrap().midpoint();

        // oracle tails: alpha_0 = x (head is 0 + x), alpha_{n+1} = |1/alpha_n - a_n|
        let mut alpha = x;
        for n in 0..seq.depth() - 1 {
            let inv = (1u32 / &alpha).complete(PREC);
            let a_n = Float::with_val(PREC, seq.digit(n).to_f64());
            let alpha_next = match seq.eps(n + 1) {
                Sign::Pos => (&inv - &a_n).complete(PREC),
                Sign::Neg => (&a_n - &inv).complete(PREC),
            };
            prop_assert!(alpha_next > 0u32 && alpha_next < 1u32);
            // identity: 1/alpha_n = a_n + eps alpha_{n+1} to 4 ulp
            let rhs = match seq.eps(n + 1) {
                Sign::Pos => (&a_n + &alpha_next).complete(PREC),
                Sign::Neg => (&a_n - &alpha_next).complete(PREC),
            };
            let diff = (inv - &rhs).abs();
            let ulp = Float::with_val(
                PREC,
                Float::i_exp(4, rhs.get_exp().unwrap_or(0) - PREC as i32),
            );
            prop_assert!(diff <= ulp, "level {}", n);
            alpha = alpha_next;
        }

        // log-domain analogue on the stored tails (covers storage round trips)
        let tails = seq.tails();
        for n in 0..seq.depth() - 1 {
            let log_inv = tails[n].log_inv_alpha.value();
            let alpha_next = tails[n + 1].value_if_small.clone().unwrap();
            let a_n = Float::with_val(PREC, seq.digit(n).to_f64());
            let rhs = match seq.eps(n + 1) {
                Sign::Pos => a_n + alpha_next,
                Sign::Neg => a_n - alpha_next,
            };
            let log_rhs = rhs.ln();
            let diff = (log_inv.to_float(PREC).unwrap() - &log_rhs).abs();
            let ulp = Float::with_val(
                PREC,
                Float::i_exp(32, log_rhs.get_exp().unwrap_or(0) - PREC as i32),
            );
            prop_assert!(diff <= ulp, "log-domain level {}", n);
        }
    }

    /// e^y >= h_alpha(y) >= y + 1, and the slope is at least 1 for y >= 0.
    #[test]
    fn h_alpha_sandwich_and_slope(ai in 1u32..49, yi in -200i32..400) {
        let alpha = Float::with_val(PREC, ai) / 100u32;
        let y = Float::with_val(PREC, yi) / 10u32;
        let h = h_alpha(&alpha, &y);
        let ey = y.clone().exp();
        let yp1 = y.clone() + 1u32;
        prop_assert!(h <= ey);
        prop_assert!(h >= yp1);
        if yi >= 0 {
            let dy = Float::with_val(PREC, 1e-20);
            let h2 = h_alpha(&alpha, &(y.clone() + &dy));
            let slope = (h2 - &h) / &dy;
            prop_assert!(slope >= Float::with_val(PREC, 1.0 - 1e-8), "slope {}", slope.to_f64());
        }
    }
}

/// C^1 matching at the junction y = log(1/alpha): both one-sided slopes are
/// 1/alpha, so values straddling the junction differ by (2/alpha) delta up
/// to second order.
#[test]
fn h_alpha_c1_matching() {
    for ai in [5u32, 10, 25, 49] {
        let alpha = Float::with_val(PREC, ai) / 100u32;
        let theta = (1u32 / alpha.clone()).ln();
        let delta = Float::with_val(PREC, 1e-6);
        let above = h_alpha(&alpha, &(theta.clone() + &delta));
        let below = h_alpha(&alpha, &(theta.clone() - &delta));
        let spread = (above - below).abs();
        let bound = (2u32 / alpha.clone()) * &delta * Float::with_val(PREC, 1.0 + 1e-5);
        assert!(spread <= bound, "alpha = {}", ai);
        // junction value and slope
        let at = h_alpha(&alpha, &theta);
        let inv = 1u32 / alpha.clone();
        assert!((at - &inv).abs().to_f64() < 1e-70);
    }
}
