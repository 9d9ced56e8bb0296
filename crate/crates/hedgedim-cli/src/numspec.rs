//! Parsing of rotation-number specifications: named generators, decimal
//! literals, inline digit JSON, or digit files.

use crate::CliError;
use hedgedim::arithmetic::{
    golden_sequence, jagged_example_sequence, modified_cf, realize, spiky_example_sequence,
    sqrt2_sequence, DigitSequence,
};
use rug::Float;

pub struct ParsedNumber {
    pub seq: DigitSequence,
    pub name: String,
    /// Set when the spec was a literal (the exact input value).
    pub literal: Option<Float>,
}

pub fn parse_number(
    spec: &str,
    prec: u32,
    depth: usize,
    example_seed: u64,
) -> Result<ParsedNumber, CliError> {
    let seed = example_seed;
    let named = |seq: DigitSequence, name: &str| ParsedNumber {
        seq,
        name: name.to_string(),
        literal: None,
    };
    match spec {
        "golden" => Ok(named(golden_sequence(prec, depth), "golden")),
        "sqrt2" => Ok(named(sqrt2_sequence(prec, depth), "sqrt2")),
        "jagged-example" => Ok(named(
            jagged_example_sequence(prec, seed, depth),
            "jagged-example",
        )),
        "spiky-example" => Ok(named(
            spiky_example_sequence(prec, seed, depth),
            "spiky-example",
        )),
        s if s.starts_with("digits:") => {
            let v: serde_json::Value = serde_json::from_str(&s["digits:".len()..])
                .map_err(|e| CliError::usage(format!("bad digit json: {e}")))?;
            let seq = DigitSequence::from_json(&v).map_err(CliError::usage)?;
            Ok(named(seq, "digits"))
        }
        s if s.starts_with('@') => {
            let text = std::fs::read_to_string(&s[1..])
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", &s[1..])))?;
            let v: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| CliError::usage(format!("bad digit json: {e}")))?;
            let seq = DigitSequence::from_json(&v).map_err(CliError::usage)?;
            Ok(named(seq, "digits-file"))
        }
        s => {
            let parsed = Float::parse(s)
                .map_err(|e| CliError::usage(format!("not a number spec: {s:?} ({e})")))?;
            let x = Float::with_val(prec, parsed);
            let seq = modified_cf(&x, depth).map_err(map_arith_err)?;
            Ok(ParsedNumber {
                seq,
                name: s.to_string(),
                literal: Some(x),
            })
        }
    }
}

/// Realize the spec as a rotation number for the dynamics commands.
pub fn alpha_of(parsed: &ParsedNumber, prec: u32) -> Result<Float, CliError> {
    if let Some(x) = &parsed.literal {
        let a = Float::with_val(prec, x.clone().abs());
        let fl = a.clone().floor();
        return Ok(a - fl);
    }
    let depth = parsed.seq.depth();
    let v = realize(&parsed.seq, depth).map_err(map_arith_err)?;
    let a = Float::with_val(prec, v.midpoint().abs());
    let fl = a.clone().floor();
    Ok(a - fl)
}

pub fn map_arith_err(e: hedgedim::arithmetic::ArithmeticError) -> CliError {
    use hedgedim::arithmetic::ArithmeticError::*;
    match e {
        RationalTermination { .. } | BrjunoUndetermined { .. } => {
            CliError::undetermined(e.to_string())
        }
        PrecisionExhausted { .. } | Overflow { .. } | InequalityViolated { .. } => {
            CliError::numeric(e.to_string())
        }
        DepthInsufficient { .. } | EpsMismatch { .. } => CliError::usage(e.to_string()),
    }
}

pub fn map_dyn_err(e: hedgedim::dynamics::DynamicsError) -> CliError {
    use hedgedim::dynamics::DynamicsError::*;
    match e {
        Io(ref io) => CliError::usage(format!("io: {io}")),
        Format(ref f) => CliError::usage(format!("format: {f}")),
        NoReturnWithin { .. } => CliError::undetermined(e.to_string()),
        _ => CliError::numeric(e.to_string()),
    }
}

pub fn map_nest_err(e: hedgedim::nestdim::NestError) -> CliError {
    use hedgedim::nestdim::NestError::*;
    match e {
        EmptyInput | PointOutsideRoot { .. } | ScaleNotNested { .. } | FewerThanTwoScales
        | Io(_) | Parse(_) => CliError::usage(e.to_string()),
        DegenerateDiameter { .. } | ChildlessParent { .. } | InvalidFamily(_) => {
            CliError::numeric(e.to_string())
        }
    }
}
