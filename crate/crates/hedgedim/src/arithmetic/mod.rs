//! Modified continued fractions and the arithmetic classifiers of irrational
//! rotation numbers: the Brjuno sum, the Herman iterated-map condition, high
//! type, and the jagged/spiky digit-growth classes.
//!
//! All tail quantities (`alpha_n`, `log(1/alpha_n)`, Brjuno terms) are held
//! in log domain via [`LogReal`] / [`crate::ext::ExtReal`], so digit rules
//! like `a_{n+1} = floor(e^{e^{a_n}})` stay computable many levels deep.

mod brjuno;
mod digits;
mod growth;
mod herman;

pub use brjuno::{brjuno_sum, BrjunoEvaluation, BrjunoVerdict};
pub use digits::{
    golden_sequence, jagged_example_sequence, jagged_example_u, jagged_exact_u, modified_cf,
    realize, spiky_example_sequence, spiky_example_v, sqrt2_sequence, validate_canonical,
    AlphaTail, CanonicalReport, DigitEntry, DigitSequence, Realized,
};
pub use growth::{
    is_high_type, jagged_check, jagged_divergence_witness, spiky_check, EtaEstimate,
    JaggedReport, SpikyReport,
};
pub use herman::{
    h_alpha, h_alpha_ext, herman_test, HermanLevel, HermanOutcome, HermanReport, HermanVerdict,
};

use crate::ext::ExtReal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A sign digit of the expansion, `+1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Neg,
    Pos,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Neg => -1,
            Sign::Pos => 1,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            -1 => Ok(Sign::Neg),
            1 => Ok(Sign::Pos),
            other => Err(format!("sign must be +1 or -1, got {other}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.as_i8()
    }
}

/// Signed value stored through the log of its magnitude, so that digit
/// magnitudes like `e^{e^{a_n}}` never overflow. `sign == 0` encodes zero
/// (conceptually `log_mag = -infinity`).
#[derive(Clone, Debug)]
pub struct LogReal {
    sign: i8,
    log_mag: ExtReal,
}

impl LogReal {
    pub fn zero(prec: u32) -> Self {
        LogReal {
            sign: 0,
            log_mag: ExtReal::zero(prec),
        }
    }

    pub fn from_ext(x: &ExtReal) -> Self {
        if x.is_zero() {
            return LogReal::zero(x.prec());
        }
        LogReal {
            sign: x.signum(),
            log_mag: x.ln_mag(),
        }
    }

    pub fn from_u64(prec: u32, v: u64) -> Self {
        Self::from_ext(&ExtReal::from_u64(prec, v))
    }

    pub fn signum(&self) -> i8 {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Natural log of the magnitude. None for zero.
    pub fn log_mag(&self) -> Option<&ExtReal> {
        if self.sign == 0 {
            None
        } else {
            Some(&self.log_mag)
        }
    }

    /// The represented value.
    pub fn value(&self) -> ExtReal {
        if self.sign == 0 {
            return ExtReal::zero(self.log_mag.prec());
        }
        let v = self.log_mag.exp();
        if self.sign < 0 {
            v.neg()
        } else {
            v
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value().to_f64()
    }

    pub fn cmp_log(&self, other: &LogReal) -> std::cmp::Ordering {
        self.value().cmp_ext(&other.value())
    }

    /// True when the value is at least `n` (digit bound checks).
    pub fn ge_u64(&self, n: u64) -> bool {
        let prec = self.log_mag.prec();
        self.value().ge_ext(&ExtReal::from_u64(prec, n))
    }

    /// Serialize as a decimal string when modest, `{"log": ...}` otherwise.
    pub fn to_json(&self) -> serde_json::Value {
        self.value().to_json()
    }
}

/// Errors raised by the rotation-number arithmetic.
#[derive(Debug, Error)]
pub enum ArithmeticError {
    #[error("expansion terminated rationally at level {level}")]
    RationalTermination { level: usize },
    #[error("precision exhausted at level {level}: nearest-integer choice is ambiguous")]
    PrecisionExhausted { level: usize },
    #[error("requested depth {requested} exceeds available sequence depth {available}")]
    DepthInsufficient { requested: usize, available: usize },
    #[error("all-minus expansion required, found eps=+1 at level {level}")]
    EpsMismatch { level: usize },
    #[error("inequality chain violated at level {level}")]
    InequalityViolated { level: usize },
    #[error("Brjuno target at level {level} cannot be bracketed at this depth")]
    BrjunoUndetermined { level: usize },
    #[error("value at level {level} exceeds the representable output range")]
    Overflow { level: usize },
}
