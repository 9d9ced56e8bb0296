//! The Herman-type condition: for every level `n` there must be a `p >= 1`
//! with `h_{alpha_{n+p-1}} o ... o h_{alpha_n}(0) >= B(alpha_{n+p})`.
//!
//! Brjuno targets are infinite sums, so the comparison is one-sided-safe:
//! success is claimed against an upper bracket (partial sum plus tail
//! estimate), failure against the lower partial sum, and anything in between
//! is reported as indeterminate.

use super::brjuno::brjuno_bracket;
use super::{ArithmeticError, DigitSequence};
use crate::ext::ExtReal;
use rug::{ops::CompleteRound, Float};

/// The piecewise map `h_alpha`: `e^y` below the matching point
/// `y = log(1/alpha)` and the affine continuation `(y + 1 - log(1/alpha))/alpha`
/// above it. `C^1` at the junction with value and slope `1/alpha`.
pub fn h_alpha(alpha: &Float, y: &Float) -> Float {
    let prec = y.prec().max(alpha.prec());
    let theta = (1u32 / alpha).complete(prec).ln(); // log(1/alpha)
    if *y >= theta {
        let num = (y - &theta).complete(prec) + 1u32;
        num / alpha.clone()
    } else {
        y.clone().exp()
    }
}

/// `h_alpha` on extended reals, parametrized by `theta = log(1/alpha)`
/// (deep tails have `alpha` far below the float range while `theta` is
/// always representable). Compositions blow up doubly exponentially, hence
/// the `ExtReal` domain.
pub fn h_alpha_ext(theta: &ExtReal, y: &ExtReal) -> ExtReal {
    let prec = y.prec().max(theta.prec());
    if y.ge_ext(theta) {
        // (y + 1 - theta) / alpha = (y + 1 - theta) * e^theta
        let one = ExtReal::from_u64(prec, 1);
        y.add(&one).sub(theta).mul(&theta.exp())
    } else {
        y.exp()
    }
}

#[derive(Clone, Debug)]
pub enum HermanOutcome {
    /// Composition cleared the upper bracket of the target at this `p`.
    Found { p: usize },
    /// Composition stayed below the lower partial sums for every `p`.
    Failed,
    /// Some comparison landed between the brackets (or a target had no
    /// upper bracket); first such `p` recorded.
    Indeterminate { p: usize },
}

/// Per-level evidence: the last composition value and the target it was
/// compared against (at `found_p`, or at `p_max` for failures).
#[derive(Clone, Debug)]
pub struct HermanLevel {
    pub n: usize,
    pub found_p: Option<usize>,
    pub composition_value: ExtReal,
    pub brjuno_target: ExtReal,
    pub outcome: HermanOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HermanVerdict {
    /// Every tested level found a witness `p`.
    HermanUpTo(usize),
    /// First level where all `p <= p_max` failed one-sided-safely.
    FailsAt { n: usize, p_max: usize },
    /// First level whose comparisons could not be resolved.
    Indeterminate { n: usize },
}

#[derive(Clone, Debug)]
pub struct HermanReport {
    pub per_level: Vec<HermanLevel>,
    pub verdict: HermanVerdict,
    pub p_max: usize,
    pub brjuno_depth: usize,
}

impl HermanReport {
    pub fn to_json(&self) -> serde_json::Value {
        let verdict = match &self.verdict {
            HermanVerdict::HermanUpTo(k) => serde_json::json!({"kind": "herman_up_to", "depth": k}),
            HermanVerdict::FailsAt { n, p_max } => {
                serde_json::json!({"kind": "fails_at", "n": n, "p_max": p_max})
            }
            HermanVerdict::Indeterminate { n } => {
                serde_json::json!({"kind": "indeterminate", "n": n})
            }
        };
        serde_json::json!({
            "verdict": verdict,
            "p_max": self.p_max,
            "brjuno_depth": self.brjuno_depth,
            "levels": self.per_level.iter().map(|l| serde_json::json!({
                "n": l.n,
                "found_p": l.found_p,
                "composition_value": l.composition_value.to_json(),
                "brjuno_target": l.brjuno_target.to_json(),
                "outcome": match &l.outcome {
                    HermanOutcome::Found { p } => serde_json::json!({"kind": "found", "p": p}),
                    HermanOutcome::Failed => serde_json::json!({"kind": "failed"}),
                    HermanOutcome::Indeterminate { p } => serde_json::json!({"kind": "indeterminate", "p": p}),
                },
            })).collect::<Vec<_>>(),
        })
    }
}

/// Search, for each `n < n_levels`, the smallest `p <= p_max` whose
/// composition dominates the (truncated) Brjuno target at level `n+p`.
pub fn herman_test(
    seq: &DigitSequence,
    n_levels: usize,
    p_max: usize,
    brjuno_depth: usize,
) -> Result<HermanReport, ArithmeticError> {
    let needed = n_levels + p_max + brjuno_depth;
    if needed > seq.depth() {
        return Err(ArithmeticError::DepthInsufficient {
            requested: needed,
            available: seq.depth(),
        });
    }
    let prec = seq.prec;
    let tails = seq.tails();

    let mut per_level = Vec::with_capacity(n_levels);
    let mut verdict = HermanVerdict::HermanUpTo(n_levels);

    'levels: for n in 0..n_levels {
        let mut y = ExtReal::zero(prec);
        let mut saw_indeterminate: Option<usize> = None;
        let mut last_target = ExtReal::zero(prec);
        for p in 1..=p_max {
            let theta = tails[n + p - 1].log_inv_alpha.value();
            y = h_alpha_ext(&theta, &y);
            let (lower, upper) = brjuno_bracket(seq, n + p, brjuno_depth)?;
            last_target = lower.clone();
            match upper {
                Some(up) if y.ge_ext(&up) => {
                    per_level.push(HermanLevel {
                        n,
                        found_p: Some(p),
                        composition_value: y.clone(),
                        brjuno_target: up,
                        outcome: HermanOutcome::Found { p },
                    });
                    continue 'levels;
                }
                _ => {
                    // not a certified success; certified failure needs y < lower
                    if y.ge_ext(&lower) && saw_indeterminate.is_none() {
                        saw_indeterminate = Some(p);
                    }
                }
            }
        }
        let outcome = match saw_indeterminate {
            Some(p) => HermanOutcome::Indeterminate { p },
            None => HermanOutcome::Failed,
        };
        per_level.push(HermanLevel {
            n,
            found_p: None,
            composition_value: y,
            brjuno_target: last_target,
            outcome: outcome.clone(),
        });
        if verdict == HermanVerdict::HermanUpTo(n_levels) {
            verdict = match outcome {
                HermanOutcome::Failed => HermanVerdict::FailsAt { n, p_max },
                HermanOutcome::Indeterminate { .. } => HermanVerdict::Indeterminate { n },
                HermanOutcome::Found { .. } => unreachable!(),
            };
        }
    }

    Ok(HermanReport {
        per_level,
        verdict,
        p_max,
        brjuno_depth,
    })
}
