//! The dimension lower bound `2 - limsup_n (sum_{k=1}^{n+1} |log delta_k|) /
//! |log d_n|`, the martingale measure splitting parent mass by child areas,
//! and a Frostman-style mass check `mu(D(a,r)) <= C r^s` by sampling.

use super::family::NestedFamily;
use super::NestError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Rational;

/// Which upper index the `|log delta|` sum runs to for the quotient at
/// generation `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumConvention {
    /// `sum_{k=1}^{n+1}` — the form used with a nest starting at
    /// generation 0.
    ThroughNPlusOne,
    /// `sum_{k=1}^{n}` — the McMullen-style indexing (the two differ only
    /// in how fast the finite-depth quotients approach the limit).
    ThroughN,
}

/// The computed bound and its diagnostics.
#[derive(Clone, Debug)]
pub struct DimensionBound {
    /// `max(0, min(2, 2 - limsup-surrogate))`.
    pub value: f64,
    /// Raw value before clamping (negative values are diagnostic).
    pub raw: f64,
    /// The quotients `c_n` per generation (index into `dia`).
    pub quotient_tail: Vec<(usize, f64)>,
    /// Trailing-window length used for the limsup surrogate.
    pub window: usize,
    pub convention: SumConvention,
}

impl DimensionBound {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "value": self.value,
            "raw": self.raw,
            "quotient_tail": self.quotient_tail,
            "window": self.window,
            "convention": match self.convention {
                SumConvention::ThroughNPlusOne => "through_n_plus_one",
                SumConvention::ThroughN => "through_n",
            },
        })
    }
}

/// Bound from the declared per-generation constants alone. `delta[k]` is
/// the density bound of generation `k+1` in generation `k` (that is,
/// `delta_{k+1}`), `dia[n]` the diameter bound of generation `n`.
pub fn mcmullen_bound_from_bounds(
    delta: &[f64],
    dia: &[f64],
    window: usize,
    convention: SumConvention,
) -> Result<DimensionBound, NestError> {
    assert!(window >= 1, "window must be at least 1");
    for (n, d) in dia.iter().enumerate().skip(1) {
        if *d >= 1.0 {
            return Err(NestError::DegenerateDiameter { level: n });
        }
    }
    // prefix sums of |log delta_k|, k = 1..=m
    let mut prefix = Vec::with_capacity(delta.len() + 1);
    prefix.push(0.0f64);
    for d in delta {
        prefix.push(prefix.last().unwrap() + d.ln().abs());
    }
    let mut quotients = Vec::new();
    for n in 0..dia.len() {
        let needed = match convention {
            SumConvention::ThroughNPlusOne => n + 1,
            SumConvention::ThroughN => n,
        };
        if needed >= prefix.len() {
            break;
        }
        if dia[n] >= 1.0 || needed == 0 {
            continue; // no quotient at the root / empty sum
        }
        quotients.push((n, prefix[needed] / dia[n].ln().abs()));
    }
    if quotients.is_empty() {
        return Err(NestError::FewerThanTwoScales);
    }
    let tail = &quotients[quotients.len().saturating_sub(window)..];
    let surrogate = tail.iter().map(|&(_, c)| c).fold(f64::NEG_INFINITY, f64::max);
    let raw = 2.0 - surrogate;
    Ok(DimensionBound {
        value: raw.clamp(0.0, 2.0),
        raw,
        quotient_tail: quotients,
        window,
        convention,
    })
}

/// Bound for a materialized family, using its declared `delta`/`dia`.
pub fn mcmullen_bound(family: &NestedFamily, window: usize) -> Result<DimensionBound, NestError> {
    mcmullen_bound_from_bounds(
        &family.delta,
        &family.dia,
        window,
        SumConvention::ThroughNPlusOne,
    )
}

/// Per-generation box masses: the root carries mass 1; children split their
/// parent's mass proportionally to area. All masses are exact rationals.
#[derive(Clone, Debug)]
pub struct MartingaleMeasure {
    /// `masses[k][i]` = mass of box `i` in generation `k`.
    pub masses: Vec<Vec<Rational>>,
}

impl MartingaleMeasure {
    /// Max over generations of |sum of masses - 1| (exactly zero here; kept
    /// as a reported diagnostic).
    pub fn conservation_defect(&self) -> f64 {
        self.masses
            .iter()
            .map(|gen| {
                let total: Rational = gen.iter().cloned().sum();
                (total - Rational::from(1)).abs().to_f64()
            })
            .fold(0.0, f64::max)
    }

    pub fn masses_f64(&self, generation: usize) -> Vec<f64> {
        self.masses[generation].iter().map(|m| m.to_f64()).collect()
    }
}

/// Build the martingale measure. Requires parent links (the family
/// constructors provide them) and at least one child per parent.
pub fn martingale_measure(family: &NestedFamily) -> Result<MartingaleMeasure, NestError> {
    let mut masses: Vec<Vec<Rational>> = Vec::with_capacity(family.depth());
    masses.push(vec![Rational::from(1)]);
    for gen_idx in 1..family.depth() {
        let children = &family.generations[gen_idx];
        let parents = &family.generations[gen_idx - 1];
        let links = family
            .parent_link
            .get(gen_idx - 1)
            .filter(|l| l.len() == children.count())
            .ok_or_else(|| NestError::InvalidFamily("missing parent links".into()))?;

        // area totals per parent
        let mut child_area_sum = vec![Rational::new(); parents.count()];
        for (i, b) in children.boxes.iter().enumerate() {
            child_area_sum[links[i]] += b.area();
        }
        for (p, total) in child_area_sum.iter().enumerate() {
            if *total == 0 {
                return Err(NestError::ChildlessParent {
                    generation: gen_idx - 1,
                    index: p,
                });
            }
        }
        let parent_masses = masses[gen_idx - 1].clone();
        let gen_masses: Vec<Rational> = children
            .boxes
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let p = links[i];
                parent_masses[p].clone() * b.area() / child_area_sum[p].clone()
            })
            .collect();
        masses.push(gen_masses);
    }
    Ok(MartingaleMeasure { masses })
}

/// Result of the sampled Frostman mass check.
#[derive(Clone, Debug)]
pub struct FrostmanReport {
    pub s: f64,
    pub samples: usize,
    pub seed: u64,
    /// max over sampled disks of `mu(D(a,r)) / r^s`, with `mu` estimated
    /// from the deepest-generation masses of boxes meeting the disk (an
    /// upper bound for the limit measure).
    pub max_ratio: f64,
    pub mean_ratio: f64,
}

/// Sample disks `D(a, r)` with `a` uniform over the root box and `r`
/// log-uniform in `[d_last, d_0]`, and measure `mu(D)/r^s`.
pub fn frostman_check(
    measure: &MartingaleMeasure,
    family: &NestedFamily,
    s: f64,
    samples: usize,
    seed: u64,
) -> FrostmanReport {
    let root = &family.generations[0].boxes[0];
    let deepest = family.depth() - 1;
    let boxes = &family.generations[deepest].boxes;
    let masses: Vec<f64> = measure.masses_f64(deepest);
    let r_hi = family.dia.first().copied().unwrap_or(root.diameter());
    let r_lo = family
        .dia
        .last()
        .copied()
        .unwrap_or(r_hi)
        .min(r_hi);

    let ratios: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let a = (
                root.min_corner.0 + rng.gen::<f64>() * root.side,
                root.min_corner.1 + rng.gen::<f64>() * root.side,
            );
            let t = rng.gen::<f64>();
            let r = r_lo * (r_hi / r_lo).powf(t);
            let r_sq = r * r;
            let mut mu = 0.0;
            for (b, m) in boxes.iter().zip(&masses) {
                if b.dist_sq(a) <= r_sq {
                    mu += m;
                }
            }
            mu / r.powf(s)
        })
        .collect();

    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    let mean_ratio = ratios.iter().sum::<f64>() / ratios.len().max(1) as f64;
    FrostmanReport {
        s,
        samples,
        seed,
        max_ratio,
        mean_ratio,
    }
}
