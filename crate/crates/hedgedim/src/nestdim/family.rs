//! Axis-aligned square boxes, generations, nested families, exact densities
//! and the nesting-condition validator.

use rug::Rational;

fn rat(x: f64) -> Rational {
    Rational::from_f64(x).expect("box coordinates must be finite")
}

/// An axis-aligned square. `half_open` means closed on the min edges and
/// open on the max edges, so grid cells tile without double-counting
/// boundary points.
#[derive(Clone, Debug, PartialEq)]
pub struct GridBox {
    pub min_corner: (f64, f64),
    pub side: f64,
    pub half_open: bool,
}

impl GridBox {
    pub fn new(x: f64, y: f64, side: f64) -> Self {
        assert!(side > 0.0, "box side must be positive");
        GridBox {
            min_corner: (x, y),
            side,
            half_open: false,
        }
    }

    pub fn half_open(x: f64, y: f64, side: f64) -> Self {
        let mut b = Self::new(x, y, side);
        b.half_open = true;
        b
    }

    pub fn area(&self) -> Rational {
        let s = rat(self.side);
        s.clone() * s
    }

    /// Euclidean diameter of the square.
    pub fn diameter(&self) -> f64 {
        self.side * std::f64::consts::SQRT_2
    }

    /// Exact overlap area with another box (boundary contact contributes
    /// zero area, so open/closed edges do not matter here).
    pub fn intersection_area(&self, other: &GridBox) -> Rational {
        let zero = Rational::new();
        let lo_x = rat(self.min_corner.0.max(other.min_corner.0));
        let hi_x = rat((self.min_corner.0 + self.side).min(other.min_corner.0 + other.side));
        if hi_x <= lo_x {
            return zero;
        }
        let lo_y = rat(self.min_corner.1.max(other.min_corner.1));
        let hi_y = rat((self.min_corner.1 + self.side).min(other.min_corner.1 + other.side));
        if hi_y <= lo_y {
            return zero;
        }
        (hi_x - lo_x) * (hi_y - lo_y)
    }

    /// Set containment, exact in the box coordinates and honoring the
    /// open/closed edge conventions of both boxes.
    pub fn contains_box(&self, other: &GridBox) -> bool {
        let (ax, ay) = self.min_corner;
        let (cx, cy) = other.min_corner;
        let a_hi_x = rat(ax) + rat(self.side);
        let a_hi_y = rat(ay) + rat(self.side);
        let c_hi_x = rat(cx) + rat(other.side);
        let c_hi_y = rat(cy) + rat(other.side);
        if rat(cx) < rat(ax) || rat(cy) < rat(ay) {
            return false;
        }
        // a closed child touching a half-open parent's max edge sticks out
        let strict = self.half_open && !other.half_open;
        if strict {
            c_hi_x < a_hi_x && c_hi_y < a_hi_y
        } else {
            c_hi_x <= a_hi_x && c_hi_y <= a_hi_y
        }
    }

    pub fn contains_point(&self, p: (f64, f64)) -> bool {
        let (x, y) = self.min_corner;
        let hx = x + self.side;
        let hy = y + self.side;
        if self.half_open {
            p.0 >= x && p.0 < hx && p.1 >= y && p.1 < hy
        } else {
            p.0 >= x && p.0 <= hx && p.1 >= y && p.1 <= hy
        }
    }

    /// Squared distance from a point to the (closed) box.
    pub fn dist_sq(&self, p: (f64, f64)) -> f64 {
        let dx = (self.min_corner.0 - p.0).max(p.0 - (self.min_corner.0 + self.side)).max(0.0);
        let dy = (self.min_corner.1 - p.1).max(p.1 - (self.min_corner.1 + self.side)).max(0.0);
        dx * dx + dy * dy
    }
}

/// The boxes of one nesting level.
#[derive(Clone, Debug)]
pub struct Generation {
    pub index: usize,
    pub boxes: Vec<GridBox>,
}

impl Generation {
    pub fn count(&self) -> usize {
        self.boxes.len()
    }
}

/// Generations with their per-generation density lower bounds and diameter
/// upper bounds. `delta[k]` is the declared bound for the density of
/// generation `k+1` inside generation `k` (that is, `delta_{k+1}`);
/// `dia[n]` bounds the diameter of generation-`n` boxes.
#[derive(Clone, Debug)]
pub struct NestedFamily {
    pub generations: Vec<Generation>,
    pub delta: Vec<f64>,
    pub dia: Vec<f64>,
    /// `parent_link[k][i]` = index within generation `k` of the parent of
    /// box `i` in generation `k+1` (populated by the constructors here).
    pub parent_link: Vec<Vec<usize>>,
}

impl NestedFamily {
    pub fn depth(&self) -> usize {
        self.generations.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "generations": self.generations.iter().map(|g| serde_json::json!({
                "index": g.index,
                "boxes": g.boxes.iter().map(|b| serde_json::json!([b.min_corner.0, b.min_corner.1, b.side])).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "delta": self.delta,
            "dia": self.dia,
        })
    }

    /// CSV rows `gen,idx,x,y,side,parent_idx` (root row has empty parent).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gen,idx,x,y,side,parent_idx\n");
        for g in &self.generations {
            for (i, b) in g.boxes.iter().enumerate() {
                let parent = if g.index == 0 {
                    String::new()
                } else {
                    self.parent_link
                        .get(g.index - 1)
                        .and_then(|l| l.get(i))
                        .map(|p| p.to_string())
                        .unwrap_or_default()
                };
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    g.index, i, b.min_corner.0, b.min_corner.1, b.side, parent
                ));
            }
        }
        out
    }
}

/// `dens(K, Omega) = area(K ∩ Omega)/area(Omega)`, exact rectangle
/// arithmetic. The boxes of `k` are summed individually; the result is in
/// `[0, 1]` whenever they are pairwise area-disjoint within `omega`.
pub fn density(k: &[GridBox], omega: &GridBox) -> f64 {
    let mut acc = Rational::new();
    for b in k {
        acc += b.intersection_area(omega);
    }
    let q = acc / omega.area();
    q.to_f64()
}

#[derive(Clone, Debug, PartialEq)]
pub enum NestingViolation {
    NotSingleRoot { count: usize },
    OrphanChild { generation: usize, index: usize },
    ChildlessParent { generation: usize, index: usize },
    SiblingOverlap { generation: usize, i: usize, j: usize },
    DeltaExceedsActual { generation: usize, declared: f64, actual: f64 },
    DiameterExceeded { generation: usize, declared: f64, actual: f64 },
}

#[derive(Clone, Debug)]
pub struct NestingReport {
    pub ok: bool,
    pub first_violation: Option<NestingViolation>,
}

/// Check the four nesting conditions plus consistency of the declared
/// `delta`/`dia` bounds. Reports the first violation found.
pub fn validate_nesting(family: &NestedFamily) -> NestingReport {
    let fail = |v: NestingViolation| NestingReport {
        ok: false,
        first_violation: Some(v),
    };

    // (1) single bounded root
    if family.generations.is_empty() || family.generations[0].count() != 1 {
        return fail(NestingViolation::NotSingleRoot {
            count: family.generations.first().map(|g| g.count()).unwrap_or(0),
        });
    }

    for w in family.generations.windows(2) {
        let (parents, children) = (&w[0], &w[1]);
        let links = family.parent_link.get(parents.index);

        // (2) every child contained in some parent
        for (i, c) in children.boxes.iter().enumerate() {
            let linked = links
                .and_then(|l| l.get(i))
                .map(|&p| parents.boxes[p].contains_box(c))
                .unwrap_or(false);
            if !linked && !parents.boxes.iter().any(|p| p.contains_box(c)) {
                return fail(NestingViolation::OrphanChild {
                    generation: children.index,
                    index: i,
                });
            }
        }

        // (3) every parent contains some child
        let mut has_child = vec![false; parents.count()];
        if let Some(l) = links {
            if l.len() == children.count() {
                for &p in l {
                    if p < has_child.len() {
                        has_child[p] = true;
                    }
                }
            }
        }
        for (p_idx, p) in parents.boxes.iter().enumerate() {
            if !has_child[p_idx] && !children.boxes.iter().any(|c| p.contains_box(c)) {
                return fail(NestingViolation::ChildlessParent {
                    generation: parents.index,
                    index: p_idx,
                });
            }
        }
    }

    // (4) area-disjoint siblings
    for g in &family.generations {
        if let Some((i, j)) = find_overlap(&g.boxes) {
            return fail(NestingViolation::SiblingOverlap {
                generation: g.index,
                i,
                j,
            });
        }
    }

    // declared diameters bound the actual ones
    for g in &family.generations {
        if let Some(declared) = family.dia.get(g.index) {
            let actual = g
                .boxes
                .iter()
                .map(GridBox::diameter)
                .fold(0.0f64, f64::max);
            if actual > declared * (1.0 + 1e-12) {
                return fail(NestingViolation::DiameterExceeded {
                    generation: g.index,
                    declared: *declared,
                    actual,
                });
            }
        }
    }

    // declared deltas are lower bounds for the actual min parent density
    for w in family.generations.windows(2) {
        let (parents, children) = (&w[0], &w[1]);
        if let Some(declared) = family.delta.get(parents.index) {
            let mut min_density = f64::INFINITY;
            for p in &parents.boxes {
                let inside: Vec<GridBox> = children
                    .boxes
                    .iter()
                    .filter(|c| p.contains_box(c))
                    .cloned()
                    .collect();
                min_density = min_density.min(density(&inside, p));
            }
            if min_density < declared * (1.0 - 1e-12) {
                return fail(NestingViolation::DeltaExceedsActual {
                    generation: children.index,
                    declared: *declared,
                    actual: min_density,
                });
            }
        }
    }

    NestingReport {
        ok: true,
        first_violation: None,
    }
}

/// First overlapping pair of boxes, or None. Grid generations (equal sides,
/// corners on the side-grid) get an O(n) index check; otherwise a sweep.
fn find_overlap(boxes: &[GridBox]) -> Option<(usize, usize)> {
    if boxes.len() < 2 {
        return None;
    }
    let s = boxes[0].side;
    let aligned = boxes.iter().all(|b| {
        b.side == s && {
            let ix = b.min_corner.0 / s;
            let iy = b.min_corner.1 / s;
            (ix - ix.round()).abs() < 1e-9 && (iy - iy.round()).abs() < 1e-9
        }
    });
    if aligned {
        let mut seen: std::collections::HashMap<(i64, i64), usize> = std::collections::HashMap::new();
        for (i, b) in boxes.iter().enumerate() {
            let key = (
                (b.min_corner.0 / s).round() as i64,
                (b.min_corner.1 / s).round() as i64,
            );
            if let Some(&j) = seen.get(&key) {
                return Some((j, i));
            }
            seen.insert(key, i);
        }
        return None;
    }
    // sweep over x intervals, exact area on candidates
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by(|&a, &b| {
        boxes[a]
            .min_corner
            .0
            .partial_cmp(&boxes[b].min_corner.0)
            .unwrap()
    });
    let mut active: Vec<usize> = Vec::new();
    for &i in &order {
        let b = &boxes[i];
        active.retain(|&j| boxes[j].min_corner.0 + boxes[j].side > b.min_corner.0);
        for &j in &active {
            if boxes[j].intersection_area(b) > 0 {
                return Some((j.min(i), j.max(i)));
            }
        }
        active.push(i);
    }
    None
}
