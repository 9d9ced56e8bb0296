//! High-type, jagged and spiky digit-growth checks. Jagged/spiky membership
//! is asymptotic and undecidable from finite data, so every report carries
//! finite-depth evidence only, never a membership verdict.

use super::{ArithmeticError, DigitSequence, Sign};
use crate::ext::ExtReal;
use rug::Float;

/// Comparison slack, in ulps at the tower top, for the growth inequalities.
/// The example rules sit exactly on their defining identities, so equality
/// within working precision must count as satisfied.
const SLACK_ULPS: u32 = 16;

/// True iff every digit `a_n` (n >= 0) is at least `n_min`.
pub fn is_high_type(seq: &DigitSequence, n_min: u64) -> bool {
    seq.entries.iter().all(|e| e.a.ge_u64(n_min))
}

fn require_all_minus(seq: &DigitSequence, depth: usize) -> Result<(), ArithmeticError> {
    if seq.eps0 != Sign::Neg {
        return Err(ArithmeticError::EpsMismatch { level: 0 });
    }
    for n in 0..depth.min(seq.depth()) {
        if seq.entries[n].eps_next != Sign::Neg {
            return Err(ArithmeticError::EpsMismatch { level: n + 1 });
        }
    }
    Ok(())
}

/// Finite-depth evidence for the jagged conditions.
#[derive(Clone, Debug)]
pub struct JaggedReport {
    /// Condition (ii) per level `n < depth-1`:
    /// `a_{n+1} >= a_n^{u_n a_n} + 1/2` checked in log domain within slack.
    pub cond_ii_ok: Vec<bool>,
    /// Partial sums of `u_0 u_1 ... u_n` (condition (i) evidence).
    pub partial_sum_of_products: Vec<ExtReal>,
    /// `u_n log a_n` per level (condition (iv) evidence).
    pub u_log_a: Vec<ExtReal>,
    /// Condition (iii) evidence: digits strictly increase over the window.
    pub digits_increasing: bool,
    pub depth: usize,
}

impl JaggedReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "cond_ii_ok": self.cond_ii_ok,
            "partial_sum_of_products": self.partial_sum_of_products.iter().map(|x| x.to_json()).collect::<Vec<_>>(),
            "u_log_a": self.u_log_a.iter().map(|x| x.to_json()).collect::<Vec<_>>(),
            "digits_increasing": self.digits_increasing,
            "depth": self.depth,
            "note": "finite-depth evidence only; conditions (i),(iii),(iv) are asymptotic",
        })
    }
}

/// Check the jagged digit-growth conditions against a witness sequence `u`
/// to the given depth. Requires the all-minus expansion form.
pub fn jagged_check(
    seq: &DigitSequence,
    u: &[ExtReal],
    depth: usize,
) -> Result<JaggedReport, ArithmeticError> {
    if depth > seq.depth() || u.len() < depth {
        return Err(ArithmeticError::DepthInsufficient {
            requested: depth,
            available: seq.depth().min(u.len()),
        });
    }
    require_all_minus(seq, depth)?;
    let prec = seq.prec;
    let half = ExtReal::from_f64(prec, 0.5);

    let mut cond_ii_ok = Vec::new();
    let mut products = Vec::new();
    let mut u_log_a = Vec::new();
    let mut running = ExtReal::from_u64(prec, 1);
    let mut sum = ExtReal::zero(prec);
    let mut increasing = true;

    for n in 0..depth {
        let a_n = seq.digit(n).value();
        let ln_a = a_n.ln_mag();
        u_log_a.push(u[n].mul(&ln_a));
        running = running.mul(&u[n]);
        sum = sum.add(&running);
        products.push(sum.clone());

        if n + 1 < depth {
            let a_next = seq.digit(n + 1).value();
            if a_next.cmp_ext(&a_n) != std::cmp::Ordering::Greater {
                increasing = false;
            }
            // a_{n+1} >= a_n^{u_n a_n} + 1/2, with the power formed in logs
            let rhs = u[n].mul(&a_n).mul(&ln_a).exp().add(&half);
            cond_ii_ok.push(a_next.ge_within(&rhs, SLACK_ULPS));
        }
    }

    Ok(JaggedReport {
        cond_ii_ok,
        partial_sum_of_products: products,
        u_log_a,
        digits_increasing: increasing,
        depth,
    })
}

/// The divergence witness `log(1/alpha_0) * (1 + sum_{n<depth} u_0...u_n)`,
/// after verifying the level-wise chain
/// `beta_n log(1/alpha_{n+1}) >= u_n beta_{n-1} log(1/alpha_n)` and that the
/// partial Brjuno sum dominates the witness.
pub fn jagged_divergence_witness(
    seq: &DigitSequence,
    u: &[ExtReal],
    depth: usize,
) -> Result<ExtReal, ArithmeticError> {
    if depth + 1 > seq.depth() || u.len() < depth {
        return Err(ArithmeticError::DepthInsufficient {
            requested: depth + 1,
            available: seq.depth().min(u.len() + 1),
        });
    }
    require_all_minus(seq, depth)?;
    let prec = seq.prec;
    let log_inv = seq.log_inv_alphas();

    // terms T_n = beta_{n-1} log(1/alpha_n), built in log domain
    let mut terms = Vec::with_capacity(depth + 1);
    let mut log_beta = ExtReal::zero(prec);
    for (n, l) in log_inv.iter().enumerate().take(depth + 1) {
        terms.push(log_beta.add(&l.ln_mag()).exp());
        log_beta = log_beta.sub(l);
        let _ = n;
    }

    // level-wise inequality T_{n+1} >= u_n T_n
    for n in 0..depth {
        let rhs = u[n].mul(&terms[n]);
        if !terms[n + 1].ge_within(&rhs, SLACK_ULPS) {
            return Err(ArithmeticError::InequalityViolated { level: n });
        }
    }

    // witness = T_0 * (1 + sum of products)
    let mut running = ExtReal::from_u64(prec, 1);
    let mut sum = ExtReal::from_u64(prec, 1);
    for un in u.iter().take(depth) {
        running = running.mul(un);
        sum = sum.add(&running);
    }
    let witness = terms[0].mul(&sum);

    // partial Brjuno sum through T_depth dominates the witness
    let mut partial = ExtReal::zero(prec);
    for t in &terms {
        partial = partial.add(t);
    }
    if !partial.ge_within(&witness, SLACK_ULPS) {
        return Err(ArithmeticError::InequalityViolated { level: depth });
    }

    Ok(witness)
}

/// Per-level eta estimate for the spiky form `a_{n+1} = e^{v_n a_n} + eta_n`.
#[derive(Clone, Debug)]
pub enum EtaEstimate {
    Exact(Float),
    /// `a_{n+1}` and `e^{v_n a_n}` agree beyond working precision; eta is
    /// only known to lie within the bracket (an ulp-scale bound).
    BelowPrecision { lo: ExtReal, hi: ExtReal },
}

/// Finite-depth evidence for the spiky conditions.
#[derive(Clone, Debug)]
pub struct SpikyReport {
    pub eta: Vec<EtaEstimate>,
    /// Per level: `Some(|eta| <= eta_bound)` when eta resolved, else `None`.
    pub eta_within_bound: Vec<Option<bool>>,
    /// Levels where the eta subtraction lost all precision.
    pub precision_loss_levels: Vec<usize>,
    /// Condition (i) evidence: `v` increases over the tail of the window.
    pub v_increasing_tail: bool,
    /// Partial sums of `v_n/(a_0 ... a_{n-1})` for n >= 1 (condition iii).
    pub partial_sums: Vec<Float>,
    /// Ratio-based tail estimate for the partial sums.
    pub tail_estimate: f64,
    pub depth: usize,
}

impl SpikyReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "eta": self.eta.iter().map(|e| match e {
                EtaEstimate::Exact(f) => serde_json::json!({"kind": "exact", "value": f.to_f64(), "decimal": f.to_string_radix(10, None)}),
                EtaEstimate::BelowPrecision { lo, hi } => serde_json::json!({"kind": "below_precision", "lo": lo.to_json(), "hi": hi.to_json()}),
            }).collect::<Vec<_>>(),
            "eta_within_bound": self.eta_within_bound,
            "precision_loss_levels": self.precision_loss_levels,
            "v_increasing_tail": self.v_increasing_tail,
            "partial_sums": self.partial_sums.iter().map(|f| f.to_f64()).collect::<Vec<_>>(),
            "tail_estimate": self.tail_estimate,
            "depth": self.depth,
            "note": "finite-depth evidence only; conditions (i),(iii) are asymptotic",
        })
    }
}

/// Solve `eta_n = a_{n+1} - e^{v_n a_n}` in log domain, check `|eta| <=
/// eta_bound` where resolvable, and report the condition (i)/(iii) evidence.
pub fn spiky_check(
    seq: &DigitSequence,
    v: &[Float],
    eta_bound: f64,
    depth: usize,
) -> Result<SpikyReport, ArithmeticError> {
    if depth + 1 > seq.depth() || v.len() < depth {
        return Err(ArithmeticError::DepthInsufficient {
            requested: depth + 1,
            available: seq.depth().min(v.len() + 1),
        });
    }
    require_all_minus(seq, depth)?;
    let prec = seq.prec;

    let mut eta = Vec::new();
    let mut within = Vec::new();
    let mut loss = Vec::new();
    let bound = ExtReal::from_f64(prec, eta_bound);

    for n in 0..depth {
        let a_next = seq.digit(n + 1).value();
        let vn = ExtReal::from_float(v[n].clone());
        let ln_predicted = vn.mul(&seq.digit(n).value());
        let predicted = ln_predicted.exp();
        let diff = a_next.sub(&predicted);
        // resolvable only when the difference stands above the relative
        // error floor: exp amplifies the log's absolute error, so the floor
        // scales with the binary exponent of v_n * a_n
        let ulp_scale = {
            let amp = match ln_predicted.to_float(32) {
                Some(l) => (l.get_exp().unwrap_or(0).max(0) as i64).min(1 << 24),
                None => 1 << 24,
            };
            let tol_exp = (-(prec as i64) + 16 + amp).min(0) as i32;
            let two_pow = ExtReal::from_float(Float::with_val(prec, Float::i_exp(1, tol_exp)));
            a_next.mul(&two_pow)
        };
        if diff.is_zero() || diff.abs().cmp_ext(&ulp_scale) == std::cmp::Ordering::Less {
            eta.push(EtaEstimate::BelowPrecision {
                lo: ulp_scale.neg(),
                hi: ulp_scale.clone(),
            });
            within.push(None);
            loss.push(n);
        } else {
            match diff.to_float(prec) {
                Some(f) => {
                    within.push(Some(diff.abs().cmp_ext(&bound) != std::cmp::Ordering::Greater));
                    eta.push(EtaEstimate::Exact(f));
                }
                None => {
                    // eta resolvable but enormous: certainly out of bound
                    within.push(Some(false));
                    eta.push(EtaEstimate::BelowPrecision {
                        lo: diff.clone(),
                        hi: diff,
                    });
                }
            }
        }
    }

    // condition (i): v increasing over the tested window tail
    let v_increasing_tail = v.windows(2).take(depth.saturating_sub(1)).all(|w| w[1] > w[0]);

    // condition (iii): sum over n >= 1 of v_n / (a_0 ... a_{n-1})
    let mut partial_sums = Vec::new();
    let mut prod = ExtReal::from_u64(prec, 1);
    let mut sum = Float::with_val(prec, 0);
    let mut last_term = f64::NAN;
    let mut ratio = f64::INFINITY;
    for n in 1..depth {
        prod = prod.mul(&seq.digit(n - 1).value());
        let term = ExtReal::from_float(v[n].clone()).div(&prod);
        let t = term.to_f64();
        if last_term.is_finite() && last_term != 0.0 {
            ratio = t / last_term;
        }
        last_term = t;
        sum += Float::with_val(prec, t);
        partial_sums.push(sum.clone());
    }
    let tail_estimate = if ratio.is_finite() && ratio < 1.0 {
        last_term * ratio / (1.0 - ratio)
    } else if last_term == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };

    Ok(SpikyReport {
        eta,
        eta_within_bound: within,
        precision_loss_levels: loss,
        v_increasing_tail,
        partial_sums: partial_sums
            .into_iter()
            .collect(),
        tail_estimate,
        depth,
    })
}
