//! Partial sums of `B(alpha) = sum beta_{n-1} log(1/alpha_n)` with a
//! one-sided convergence/divergence verdict.

use super::{ArithmeticError, DigitSequence, LogReal};
use crate::ext::ExtReal;
use rug::Float;

#[derive(Clone, Debug, PartialEq)]
pub enum BrjunoVerdict {
    /// Ratio-based tail estimate dropped below the tolerance.
    ConvergedWithin(f64),
    /// A partial sum exceeded the caller's divergence bound.
    DivergesBeyond(f64),
    /// Neither criterion triggered by the requested depth.
    Undetermined(usize),
}

/// Partial sums, log-domain `beta` products, and a verdict.
#[derive(Clone, Debug)]
pub struct BrjunoEvaluation {
    /// `partial_sums[n] = sum_{k<=n} beta_{k-1} log(1/alpha_k)`; truncated at
    /// the level where a divergence bound fires.
    pub partial_sums: Vec<Float>,
    /// `log beta_n = sum_{i<=n} log alpha_i` per retained level.
    pub log_beta: Vec<LogReal>,
    /// Ratio-based estimate of the remaining tail (meaningful for the
    /// converged verdict only).
    pub tail_estimate: f64,
    pub verdict: BrjunoVerdict,
}

impl BrjunoEvaluation {
    pub fn value(&self) -> Option<f64> {
        self.partial_sums.last().map(|f| f.to_f64())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let verdict = match &self.verdict {
            BrjunoVerdict::ConvergedWithin(t) => serde_json::json!({"kind": "converged_within", "tol": t}),
            BrjunoVerdict::DivergesBeyond(b) => serde_json::json!({"kind": "diverges_beyond", "bound": b}),
            BrjunoVerdict::Undetermined(d) => serde_json::json!({"kind": "undetermined", "depth": d}),
        };
        serde_json::json!({
            "partial_sums": self.partial_sums.iter().map(|f| f.to_string_radix(10, None)).collect::<Vec<_>>(),
            "partial_sums_f64": self.partial_sums.iter().map(|f| f.to_f64()).collect::<Vec<_>>(),
            "log_beta": self.log_beta.iter().map(|l| l.to_json()).collect::<Vec<_>>(),
            "tail_estimate": self.tail_estimate,
            "depth": self.partial_sums.len(),
            "verdict": verdict,
        })
    }
}

/// Sum the Brjuno series through level `n_max` (inclusive). Terms are formed
/// in log domain as `exp(log beta_{n-1} + log log(1/alpha_n))` and only then
/// accumulated. Convergence is declared when the last two terms' ratio `r`
/// satisfies `term * r/(1-r) < tol`; divergence when a partial sum exceeds
/// `bound`.
pub fn brjuno_sum(
    seq: &DigitSequence,
    n_max: usize,
    tol: f64,
    bound: f64,
) -> Result<BrjunoEvaluation, ArithmeticError> {
    if n_max >= seq.depth() {
        return Err(ArithmeticError::DepthInsufficient {
            requested: n_max + 1,
            available: seq.depth(),
        });
    }
    let prec = seq.prec;
    let log_inv = seq.log_inv_alphas();

    let mut partial_sums: Vec<Float> = Vec::new();
    let mut log_beta: Vec<LogReal> = Vec::new();
    let mut sum = Float::with_val(prec, 0);
    let mut log_beta_prev = ExtReal::zero(prec); // log beta_{-1} = 0
    let mut prev_term: Option<ExtReal> = None;
    let mut last_ratio = f64::NAN;

    for n in 0..=n_max {
        // term_n = beta_{n-1} * log(1/alpha_n), via logs
        let l_n = &log_inv[n];
        let log_term = log_beta_prev.add(&l_n.ln_mag());
        let term = log_term.exp();

        if let Some(p) = &prev_term {
            last_ratio = term.div(p).to_f64();
        }

        match term.to_float(prec) {
            Some(t) => sum += t,
            None => {
                // term beyond float range: certainly past any finite bound
                sum = Float::with_val(prec, f64::MAX);
            }
        }
        partial_sums.push(sum.clone());

        // log beta_n = log beta_{n-1} + log alpha_n = previous - log(1/alpha_n)
        log_beta_prev = log_beta_prev.sub(l_n);
        log_beta.push(LogReal::from_ext(&log_beta_prev));

        if sum.to_f64() > bound {
            return Ok(BrjunoEvaluation {
                partial_sums,
                log_beta,
                tail_estimate: f64::INFINITY,
                verdict: BrjunoVerdict::DivergesBeyond(bound),
            });
        }
        prev_term = Some(term);
    }

    let tail_estimate = if last_ratio.is_finite() && last_ratio < 1.0 {
        let last = prev_term
            .as_ref()
            .map(|t| t.to_f64())
            .unwrap_or(f64::NAN);
        last * last_ratio / (1.0 - last_ratio)
    } else {
        f64::INFINITY
    };

    let verdict = if tail_estimate.is_finite() && tail_estimate < tol {
        BrjunoVerdict::ConvergedWithin(tol)
    } else {
        BrjunoVerdict::Undetermined(n_max)
    };

    Ok(BrjunoEvaluation {
        partial_sums,
        log_beta,
        tail_estimate,
        verdict,
    })
}

/// Lower and upper bracket for `B(alpha_m)` of a tail sequence: the partial
/// sum through `depth` levels and the partial plus the ratio tail estimate.
/// The upper end is `None` when the terms are not visibly contracting.
pub(crate) fn brjuno_bracket(
    seq: &DigitSequence,
    start_level: usize,
    depth: usize,
) -> Result<(ExtReal, Option<ExtReal>), ArithmeticError> {
    if start_level + depth > seq.depth() {
        return Err(ArithmeticError::DepthInsufficient {
            requested: start_level + depth,
            available: seq.depth(),
        });
    }
    let prec = seq.prec;
    let log_inv = seq.log_inv_alphas();
    let mut sum = ExtReal::zero(prec);
    let mut log_beta = ExtReal::zero(prec);
    let mut last_term = ExtReal::zero(prec);
    let mut ratio = f64::NAN;
    for j in 0..depth {
        let l = &log_inv[start_level + j];
        let term = log_beta.add(&l.ln_mag()).exp();
        if j > 0 && !last_term.is_zero() {
            ratio = term.div(&last_term).to_f64();
        }
        sum = sum.add(&term);
        log_beta = log_beta.sub(l);
        last_term = term;
    }
    let upper = if ratio.is_finite() && ratio < 1.0 {
        let prec_f = prec;
        let tail = last_term.mul(&ExtReal::from_f64(prec_f, ratio / (1.0 - ratio)));
        Some(sum.add(&tail))
    } else {
        None
    };
    Ok((sum, upper))
}
