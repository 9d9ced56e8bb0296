//! Grid-based nest extraction from point clouds, the box-counting slope
//! estimator, the four-corner self-similar test family, and point-cloud CSV
//! io.

use super::family::{Generation, GridBox, NestedFamily};
use super::NestError;
use rayon::prelude::*;
use std::collections::{HashMap, HashSet};
use std::io::BufRead;

/// Occupied half-open grid cells of size `scale` anchored at `origin`.
fn occupied_cells(points: &[(f64, f64)], origin: (f64, f64), scale: f64) -> HashSet<(i64, i64)> {
    points
        .par_chunks(65_536)
        .map(|chunk| {
            let mut set = HashSet::new();
            for p in chunk {
                let i = ((p.0 - origin.0) / scale).floor() as i64;
                let j = ((p.1 - origin.1) / scale).floor() as i64;
                set.insert((i, j));
            }
            set
        })
        .reduce(HashSet::new, |mut a, b| {
            a.extend(b);
            a
        })
}

fn validate_scales(points: &[(f64, f64)], scales: &[f64], root: &GridBox) -> Result<Vec<u64>, NestError> {
    if points.is_empty() {
        return Err(NestError::EmptyInput);
    }
    if scales.len() < 2 {
        return Err(NestError::FewerThanTwoScales);
    }
    for (i, p) in points.iter().enumerate() {
        if !root.contains_point(*p) {
            return Err(NestError::PointOutsideRoot { index: i });
        }
    }
    // integer subdivision factors, root included
    let mut factors = Vec::with_capacity(scales.len());
    let mut prev = root.side;
    for (k, s) in scales.iter().enumerate() {
        if *s <= 0.0 || *s > prev {
            return Err(NestError::ScaleNotNested { level: k });
        }
        let f = prev / s;
        if (f - f.round()).abs() > 1e-9 * f {
            return Err(NestError::ScaleNotNested { level: k });
        }
        factors.push(f.round() as u64);
        prev = *s;
    }
    Ok(factors)
}

/// Build the nested family of occupied grid boxes at the given scales.
/// Generation 0 is the root box; generation `k >= 1` consists of the
/// half-open cells at `scales[k-1]` that contain at least one point.
/// `delta[k]` records the minimum child-area density over the parents of
/// generation `k+1`, `dia` the exact per-generation diameters.
pub fn extract_nest(
    points: &[(f64, f64)],
    scales: &[f64],
    root: &GridBox,
) -> Result<NestedFamily, NestError> {
    let factors = validate_scales(points, scales, root)?;
    let origin = root.min_corner;

    let mut generations = vec![Generation {
        index: 0,
        boxes: vec![root.clone()],
    }];
    let mut parent_link: Vec<Vec<usize>> = Vec::new();
    let mut delta = Vec::new();
    let dia: Vec<f64> = std::iter::once(root.diameter())
        .chain(scales.iter().map(|s| s * std::f64::consts::SQRT_2))
        .collect();

    // cell index -> position in the previous generation's box list
    let mut prev_cells: HashMap<(i64, i64), usize> = HashMap::new();
    prev_cells.insert((0, 0), 0);
    let mut prev_count_per_parent: Vec<u64>;

    for (k, s) in scales.iter().enumerate() {
        let mut cells: Vec<(i64, i64)> = occupied_cells(points, origin, *s).into_iter().collect();
        cells.sort_unstable();
        let factor = factors[k] as i64;

        let mut links = Vec::with_capacity(cells.len());
        prev_count_per_parent = vec![0; generations[k].boxes.len()];
        let mut this_cells = HashMap::with_capacity(cells.len());
        for (pos, &(i, j)) in cells.iter().enumerate() {
            let parent_cell = (i.div_euclid(factor), j.div_euclid(factor));
            let parent_pos = *prev_cells
                .get(&parent_cell)
                .expect("every occupied cell lies in an occupied parent cell");
            links.push(parent_pos);
            prev_count_per_parent[parent_pos] += 1;
            this_cells.insert((i, j), pos);
        }

        // delta_{k+1} = min over parents of (children count) * (s_k/s_{k-1})^2
        let ratio_sq = 1.0 / (factors[k] * factors[k]) as f64;
        let min_density = prev_count_per_parent
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| c as f64 * ratio_sq)
            .fold(f64::INFINITY, f64::min);
        delta.push(min_density);

        let boxes: Vec<GridBox> = cells
            .iter()
            .map(|&(i, j)| {
                GridBox::half_open(origin.0 + i as f64 * s, origin.1 + j as f64 * s, *s)
            })
            .collect();
        generations.push(Generation {
            index: k + 1,
            boxes,
        });
        parent_link.push(links);
        prev_cells = this_cells;
    }

    Ok(NestedFamily {
        generations,
        delta,
        dia,
        parent_link,
    })
}

/// Box-counting estimate: least-squares slope of `log N(s)` against
/// `log(1/s)`, with `r^2` and the raw counts.
#[derive(Clone, Debug)]
pub struct BoxCountEstimate {
    pub slope: f64,
    pub r_squared: f64,
    /// `(scale, count)` per level.
    pub counts: Vec<(f64, u64)>,
}

impl BoxCountEstimate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "slope": self.slope,
            "r_squared": self.r_squared,
            "counts": self.counts.iter().map(|&(s, n)| serde_json::json!({
                "scale": s,
                "count": n,
                "log_inv_scale": (1.0 / s).ln(),
                "log_count": (n as f64).ln(),
            })).collect::<Vec<_>>(),
        })
    }
}

pub fn box_count_dimension(
    points: &[(f64, f64)],
    scales: &[f64],
    root: &GridBox,
) -> Result<BoxCountEstimate, NestError> {
    validate_scales(points, scales, root)?;
    let origin = root.min_corner;
    let counts: Vec<(f64, u64)> = scales
        .iter()
        .map(|&s| (s, occupied_cells(points, origin, s).len() as u64))
        .collect();

    let xs: Vec<f64> = counts.iter().map(|&(s, _)| (1.0 / s).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&(_, n)| (n as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };

    Ok(BoxCountEstimate {
        slope,
        r_squared,
        counts,
    })
}

/// The self-similar four-corner family: each box spawns four corner
/// children at a quarter of its side. Density 1/4 per generation, diameters
/// `sqrt2 * 4^-n`; the limit set is a product of two quarter Cantor sets
/// with Hausdorff dimension exactly 1.
pub fn four_corner_family(depth: usize) -> NestedFamily {
    let root = GridBox::half_open(0.0, 0.0, 1.0);
    let mut generations = vec![Generation {
        index: 0,
        boxes: vec![root],
    }];
    let mut parent_link = Vec::new();
    for k in 1..=depth {
        let parents = &generations[k - 1].boxes;
        let mut boxes = Vec::with_capacity(parents.len() * 4);
        let mut links = Vec::with_capacity(parents.len() * 4);
        for (p_idx, p) in parents.iter().enumerate() {
            let s = p.side / 4.0;
            let (x, y) = p.min_corner;
            let off = 3.0 * s;
            for &(dx, dy) in &[(0.0, 0.0), (off, 0.0), (0.0, off), (off, off)] {
                boxes.push(GridBox::half_open(x + dx, y + dy, s));
                links.push(p_idx);
            }
        }
        generations.push(Generation { index: k, boxes });
        parent_link.push(links);
    }
    let delta = vec![0.25; depth];
    let dia = (0..=depth)
        .map(|n| std::f64::consts::SQRT_2 * 0.25f64.powi(n as i32))
        .collect();
    NestedFamily {
        generations,
        delta,
        dia,
        parent_link,
    }
}

/// Read `re,im` pairs, one per line; a header line is skipped if present.
pub fn points_from_csv<R: BufRead>(reader: R) -> Result<Vec<(f64, f64)>, NestError> {
    let mut points = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let mut parts = t.split(',');
        let a = parts.next().unwrap_or("").trim();
        let b = parts.next().unwrap_or("").trim();
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(x), Ok(y)) => points.push((x, y)),
            _ if lineno == 0 => continue, // header
            _ => {
                return Err(NestError::Parse(format!(
                    "line {}: expected 're,im', got {t:?}",
                    lineno + 1
                )))
            }
        }
    }
    if points.is_empty() {
        return Err(NestError::EmptyInput);
    }
    Ok(points)
}

pub fn points_to_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("re,im\n");
    for (x, y) in points {
        out.push_str(&format!("{x},{y}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nestdim::{mcmullen_bound, validate_nesting};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Deterministic sample of the four-corner Cantor product at `depth`.
    pub fn four_corner_sample(depth: usize, per_cell: usize, seed: u64) -> Vec<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = four_corner_family(depth);
        let deepest = &fam.generations[depth].boxes;
        let mut pts = Vec::with_capacity(deepest.len() * per_cell);
        for b in deepest {
            for _ in 0..per_cell {
                pts.push((
                    b.min_corner.0 + rng.gen::<f64>() * b.side,
                    b.min_corner.1 + rng.gen::<f64>() * b.side,
                ));
            }
        }
        pts
    }

    #[test]
    fn four_corner_family_validates() {
        let fam = four_corner_family(6);
        let rep = validate_nesting(&fam);
        assert!(rep.ok, "{:?}", rep.first_violation);
    }

    #[test]
    fn orphan_child_detected() {
        let mut fam = four_corner_family(3);
        // displace one deepest box outside its parent
        fam.generations[3].boxes[0].min_corner = (0.9, 0.9);
        let rep = validate_nesting(&fam);
        assert!(!rep.ok);
        assert!(matches!(
            rep.first_violation,
            Some(crate::nestdim::NestingViolation::OrphanChild { generation: 3, .. })
                | Some(crate::nestdim::NestingViolation::SiblingOverlap { .. })
        ));
    }

    #[test]
    fn overlapping_siblings_detected() {
        let mut fam = four_corner_family(2);
        // move the second generation-1 box onto the first
        fam.generations[1].boxes[1].min_corner = (0.1, 0.0);
        // drop deeper generations so containment stays satisfiable
        fam.generations.truncate(2);
        fam.parent_link.truncate(1);
        // children of moved box no longer relevant; regenerate constraint set
        let rep = validate_nesting(&fam);
        assert!(!rep.ok);
    }

    #[test]
    fn extract_recovers_four_corner_densities() {
        let depth = 6;
        let pts = four_corner_sample(depth, 3, 7);
        let root = GridBox::half_open(0.0, 0.0, 1.0);
        let scales: Vec<f64> = (1..=depth).map(|k| 0.25f64.powi(k as i32)).collect();
        let fam = extract_nest(&pts, &scales, &root).unwrap();
        // every cell of the construction is hit, so delta_k = 4/16 exactly
        for (k, d) in fam.delta.iter().enumerate() {
            assert_eq!(*d, 0.25, "delta at {k}");
        }
        let rep = validate_nesting(&fam);
        assert!(rep.ok, "{:?}", rep.first_violation);
        // at depth 6 the trailing-window surrogate is still conservative;
        // it must stay a lower bound for the true dimension 1
        let b = mcmullen_bound(&fam, 3).unwrap();
        assert!(b.value > 0.5 && b.value < 1.0, "{}", b.value);
    }

    #[test]
    fn extract_single_point() {
        let root = GridBox::half_open(0.0, 0.0, 1.0);
        let pts = vec![(0.3, 0.7)];
        let scales = vec![0.25, 0.0625];
        let fam = extract_nest(&pts, &scales, &root).unwrap();
        assert_eq!(fam.generations[1].count(), 1);
        assert_eq!(fam.generations[2].count(), 1);
        // one box per generation: delta_k = (s_k/s_{k-1})^2 = 1/16
        assert_eq!(fam.delta, vec![1.0 / 16.0, 1.0 / 16.0]);
    }

    #[test]
    fn extract_rejects_bad_input() {
        let root = GridBox::half_open(0.0, 0.0, 1.0);
        assert!(matches!(
            extract_nest(&[], &[0.5, 0.25], &root),
            Err(NestError::EmptyInput)
        ));
        assert!(matches!(
            extract_nest(&[(1.5, 0.0)], &[0.5, 0.25], &root),
            Err(NestError::PointOutsideRoot { index: 0 })
        ));
        assert!(matches!(
            extract_nest(&[(0.5, 0.5)], &[0.4, 0.3], &root),
            Err(NestError::ScaleNotNested { .. })
        ));
    }

    #[test]
    fn box_count_segment_and_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let root = GridBox::half_open(0.0, 0.0, 1.0);
        let scales: Vec<f64> = (3..=9).map(|k| 0.5f64.powi(k)).collect();

        let segment: Vec<(f64, f64)> = (0..20_000)
            .map(|_| (rng.gen::<f64>() * 0.999, 0.31830988))
            .collect();
        let est = box_count_dimension(&segment, &scales, &root).unwrap();
        assert!((est.slope - 1.0).abs() < 0.05, "segment slope {}", est.slope);

        let square: Vec<(f64, f64)> = (0..100_000)
            .map(|_| (rng.gen::<f64>() * 0.999, rng.gen::<f64>() * 0.999))
            .collect();
        let est = box_count_dimension(&square, &scales[..5], &root).unwrap();
        assert!((est.slope - 2.0).abs() < 0.05, "square slope {}", est.slope);
        assert!(est.r_squared > 0.99);
    }

    #[test]
    fn box_count_cantor_product() {
        let depth = 8;
        let pts = four_corner_sample(depth, 2, 99);
        let root = GridBox::half_open(0.0, 0.0, 1.0);
        let scales: Vec<f64> = (1..=depth).map(|k| 0.25f64.powi(k as i32)).collect();
        let est = box_count_dimension(&pts, &scales, &root).unwrap();
        assert!((est.slope - 1.0).abs() < 0.08, "cantor slope {}", est.slope);
    }

    #[test]
    fn csv_round_trip() {
        let pts = vec![(0.5, -0.25), (1e-10, 2.0)];
        let s = points_to_csv(&pts);
        let back = points_from_csv(std::io::Cursor::new(s)).unwrap();
        assert_eq!(back, pts);
    }

    #[test]
    fn bound_and_slope_agree_with_similarity_dimension() {
        // exactly self-similar family: similarity dimension 1. The slope
        // comes from a depth-8 sample; the bound from the analytic
        // constants at a depth where the trailing window has tightened.
        use crate::nestdim::{mcmullen_bound_from_bounds, SumConvention};
        let pts = four_corner_sample(8, 2, 11);
        let root = GridBox::half_open(0.0, 0.0, 1.0);
        let scales: Vec<f64> = (1..=8).map(|k| 0.25f64.powi(k as i32)).collect();
        let est = box_count_dimension(&pts, &scales, &root).unwrap();

        let depth = 22;
        let delta = vec![0.25f64; depth];
        let dia: Vec<f64> = (0..=depth)
            .map(|n| std::f64::consts::SQRT_2 * 0.25f64.powi(n as i32))
            .collect();
        let bound =
            mcmullen_bound_from_bounds(&delta, &dia, 5, SumConvention::ThroughNPlusOne).unwrap();

        assert!((est.slope - 1.0).abs() <= 0.1, "slope {}", est.slope);
        assert!((bound.value - 1.0).abs() <= 0.1, "bound {}", bound.value);
        assert!(bound.value <= est.slope + 0.1);
    }
}
