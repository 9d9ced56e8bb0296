//! Numerically fitted perturbed Fatou coordinates.
//!
//! In the lifted plane the coordinate has the form
//! `L(w) = w + c + sum_{k>=1} a_k E(w)^k` with `E(w) = e^{2 pi i alpha w}`:
//! the correction is periodic, decays as `Im w` grows, and satisfies the
//! Abel equation `L(F(w)) = L(w) + 1` for the lift `F`. The fit proceeds in
//! two stages:
//!
//! 1. collocation: solve the linear least-squares system
//!    `sum_k a_k (E^k(F w) - E^k(w)) = -(F(w) - w - 1)` over a grid spanning
//!    one period and a band of heights (the data are exact one-step values
//!    of `F`);
//! 2. long iteration: `F^K(w) - K` differences between budgets `K` and `2K`
//!    on the validation points give the Richardson error estimate, and the
//!    high band is residual-certified directly.
//!
//! `Phi(cv) = 1` is enforced exactly through the offset `c`. The chart
//! carries a certified band (max Abel residual at or below the tolerance)
//! and an extended band below it whose residual is reported, not certified.

use super::complex::{two_pi, ComplexHP};
use super::maps::{critical_value, sigma_fixed_point, MapSpec};
use super::tau::{lift_f, tau, tau_inverse};
use super::DynamicsError;
use rug::{ops::CompleteRound, Float};

/// A horizontal band in the lifted plane (full period in `Re`).
#[derive(Clone, Copy, Debug)]
pub struct WBand {
    pub im_lo: f64,
    pub im_hi: f64,
}

impl WBand {
    pub fn contains_im(&self, im: f64) -> bool {
        im >= self.im_lo && im <= self.im_hi
    }
}

#[derive(Clone, Debug)]
pub struct FatouFitParams {
    /// Long-iteration budget `K`.
    pub iteration_budget: usize,
    /// Abel-residual tolerance for the certified band.
    pub tol: f64,
    /// Number of Fourier modes in the periodic correction.
    pub modes: usize,
    /// Collocation grid: heights per band and points per period.
    pub rows: usize,
    pub cols_extra: usize,
    /// Bottom of the fitted (extended) band.
    pub im_lo: f64,
    /// Certified band starts here (residuals checked against `tol`).
    pub im_certified: f64,
    /// Top of the declared band.
    pub im_hi: f64,
    /// Validation points (certified band).
    pub validation_points: usize,
    /// Points used for the `K` vs `2K` Richardson comparison.
    pub richardson_points: usize,
}

impl FatouFitParams {
    /// Defaults scaled to the rotation number: more modes for smaller
    /// `alpha` (the per-mode decay at the band bottom is `e^{-2 pi a Im w}`).
    pub fn for_alpha(alpha: f64, iteration_budget: usize, tol: f64) -> Self {
        let im_lo = 1.0;
        let target: f64 = 1e-10;
        let modes = ((target.ln().abs()) / (std::f64::consts::TAU * alpha * im_lo))
            .ceil()
            .clamp(24.0, 320.0) as usize;
        FatouFitParams {
            iteration_budget,
            tol,
            modes,
            rows: 8,
            cols_extra: 8,
            im_lo,
            im_certified: 2.5 / alpha,
            im_hi: 60.0 / alpha,
            validation_points: 100,
            richardson_points: 12,
        }
    }
}

/// A fitted perturbed Fatou coordinate for one map.
#[derive(Clone, Debug)]
pub struct FatouChart {
    pub map: MapSpec,
    pub sigma: ComplexHP,
    pub iteration_budget: usize,
    /// `c` in `L(w) = w + c + sum a_k E^k(w)`; fixes `Phi(cv) = 1` exactly.
    pub normalization_offset: ComplexHP,
    pub coeffs: Vec<ComplexHP>,
    /// Max/mean Abel residual over the certified-band validation set.
    pub abel_residual_max: f64,
    pub abel_residual_mean: f64,
    /// Max Abel residual seen on the extended band (reported, not gated).
    pub abel_residual_extended: f64,
    /// `max |(F^{2K} - 2K) - (F^K - K)|` over the Richardson points.
    pub richardson_err: f64,
    pub valid: bool,
    pub tol: f64,
    /// Residual-certified band.
    pub band: WBand,
    /// Fitted band including the uncertified low strip.
    pub extended_band: WBand,
}

impl FatouChart {
    fn alpha_f(&self) -> &Float {
        &self.map.alpha
    }

    /// `E(w) = e^{2 pi i alpha w}`.
    fn deck(&self, w: &ComplexHP) -> ComplexHP {
        let prec = w.prec();
        let tp = two_pi(prec);
        let ax = (&w.re * self.alpha_f()).complete(prec);
        let ay = (&w.im * self.alpha_f()).complete(prec);
        ComplexHP::new(-((&ay * &tp).complete(prec)), (&ax * &tp).complete(prec)).exp()
    }

    /// The fitted coordinate `L(w)`, defined on the whole band (periodic in
    /// `Re w`, so it continues across every strip).
    pub fn phi_w(&self, w: &ComplexHP) -> ComplexHP {
        let mut acc = w.add(&self.normalization_offset);
        if self.coeffs.is_empty() {
            return acc;
        }
        let e = self.deck(w);
        let mut pw = e.clone();
        for a in &self.coeffs {
            acc = acc.add(&a.mul(&pw));
            pw = pw.mul(&e);
        }
        acc
    }

    /// `dL/dw = 1 + sum a_k (2 pi i k alpha) E^k`.
    pub fn phi_w_deriv(&self, w: &ComplexHP) -> ComplexHP {
        let prec = w.prec();
        let mut acc = ComplexHP::from_f64(prec, 1.0, 0.0);
        if self.coeffs.is_empty() {
            return acc;
        }
        let e = self.deck(w);
        let tp = two_pi(prec);
        let base = (&tp * self.alpha_f()).complete(prec);
        let mut pw = e.clone();
        for (k, a) in self.coeffs.iter().enumerate() {
            let factor = ComplexHP::new(
                Float::with_val(prec, 0),
                Float::with_val(prec, &base * &Float::with_val(prec, (k + 1) as u32)),
            );
            acc = acc.add(&a.mul(&factor).mul(&pw));
            pw = pw.mul(&e);
        }
        acc
    }

    /// `Phi(z) = L(tau^{-1} z)` with the strip-0 representative. Values are
    /// meaningful inside the extended band; the cv anchor below it is exact
    /// by the normalization. Callers gate on [`Self::in_extended`].
    pub fn phi(&self, z: &ComplexHP) -> Result<ComplexHP, DynamicsError> {
        let w = tau_inverse(self.alpha_f(), &self.sigma, z, 0)?;
        Ok(self.phi_w(&w))
    }

    pub fn in_extended(&self, w: &ComplexHP) -> bool {
        self.extended_band.contains_im(w.im.to_f64())
    }

    pub fn in_certified(&self, w: &ComplexHP) -> bool {
        self.band.contains_im(w.im.to_f64())
    }

    /// Newton solve of `L(w) = zeta` from the near-identity initial guess.
    pub fn phi_inv_w(&self, zeta: &ComplexHP) -> Result<ComplexHP, DynamicsError> {
        let prec = zeta.prec();
        let mut w = zeta.sub(&self.normalization_offset);
        let tol = Float::with_val(prec, 1e-30);
        for _ in 0..60 {
            let r = self.phi_w(&w).sub(zeta);
            if r.abs() < tol {
                return Ok(w);
            }
            let d = self.phi_w_deriv(&w);
            w = w.sub(&r.div(&d));
            if !w.is_finite() {
                break;
            }
        }
        Err(DynamicsError::NewtonDiverged { iterations: 60 })
    }

    /// `Phi^{-1}(zeta) = tau(w)` for the Newton solution `w`.
    pub fn phi_inv(&self, zeta: &ComplexHP) -> Result<ComplexHP, DynamicsError> {
        let w = self.phi_inv_w(zeta)?;
        tau(self.alpha_f(), &self.sigma, &w)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "map": self.map.to_json(),
            "sigma": [self.sigma.re.to_string_radix(10, None), self.sigma.im.to_string_radix(10, None)],
            "iteration_budget": self.iteration_budget,
            "normalization_offset": [
                self.normalization_offset.re.to_string_radix(10, None),
                self.normalization_offset.im.to_string_radix(10, None)
            ],
            "normalization_offset_f64": [self.normalization_offset.re.to_f64(), self.normalization_offset.im.to_f64()],
            "modes": self.coeffs.len(),
            "coeffs_f64": self.coeffs.iter().map(|a| {
                let (re, im) = a.to_f64();
                serde_json::json!([re, im])
            }).collect::<Vec<_>>(),
            "abel_residual": {"max": self.abel_residual_max, "mean": self.abel_residual_mean, "extended_max": self.abel_residual_extended},
            "richardson_err": self.richardson_err,
            "valid": self.valid,
            "tol": self.tol,
            "valid_region": {"im_lo": self.band.im_lo, "im_hi": self.band.im_hi},
            "extended_region": {"im_lo": self.extended_band.im_lo, "im_hi": self.extended_band.im_hi},
        })
    }
}

/// Complex f64 helpers for the least-squares stage (the fitted corrections
/// live far above the f64 noise floor; all certification happens at full
/// precision afterwards).
#[derive(Clone, Copy, Debug, Default)]
struct C64 {
    re: f64,
    im: f64,
}

impl C64 {
    fn new(re: f64, im: f64) -> Self {
        C64 { re, im }
    }
    fn mul(self, o: C64) -> C64 {
        C64::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
    fn conj(self) -> C64 {
        C64::new(self.re, -self.im)
    }
    fn add(self, o: C64) -> C64 {
        C64::new(self.re + o.re, self.im + o.im)
    }
    fn sub(self, o: C64) -> C64 {
        C64::new(self.re - o.re, self.im - o.im)
    }
    fn div(self, o: C64) -> C64 {
        let d = o.re * o.re + o.im * o.im;
        C64::new(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )
    }
    fn norm_sq(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

/// Solve the Hermitian-positive system `(A^H A + ridge I) x = A^H b` by
/// Gaussian elimination with partial pivoting.
fn solve_normal_equations(a: &[Vec<C64>], b: &[C64], ridge: f64) -> Vec<C64> {
    let m = a[0].len();
    let mut g = vec![vec![C64::default(); m + 1]; m];
    for i in 0..m {
        for j in 0..m {
            let mut s = C64::default();
            for (row, brow) in a.iter().zip(b) {
                let _ = brow;
                s = s.add(row[i].conj().mul(row[j]));
            }
            if i == j {
                s.re += ridge;
            }
            g[i][j] = s;
        }
        let mut s = C64::default();
        for (row, brow) in a.iter().zip(b) {
            s = s.add(row[i].conj().mul(*brow));
        }
        g[i][m] = s;
    }
    // elimination
    for col in 0..m {
        let (mut best, mut best_v) = (col, g[col][col].norm_sq());
        for r in col + 1..m {
            let v = g[r][col].norm_sq();
            if v > best_v {
                best = r;
                best_v = v;
            }
        }
        g.swap(col, best);
        let piv = g[col][col];
        for r in 0..m {
            if r == col || g[r][col].norm_sq() == 0.0 {
                continue;
            }
            let f = g[r][col].div(piv);
            for c in col..=m {
                let t = f.mul(g[col][c]);
                g[r][c] = g[r][c].sub(t);
            }
        }
    }
    (0..m).map(|i| g[i][m].div(g[i][i])).collect()
}

fn c64_of(z: &ComplexHP) -> C64 {
    let (re, im) = z.to_f64();
    C64::new(re, im)
}

/// Fit the perturbed Fatou coordinate of `map`. Refuses maps whose lift is
/// not a near-translation on the collocation grid (`|F(w)-w-1| > 0.5`).
/// The returned chart satisfies `Phi(cv) = 1` exactly; `valid` records
/// whether the certified band met the residual tolerance.
pub fn fit_fatou(map: &MapSpec, params: &FatouFitParams) -> Result<FatouChart, DynamicsError> {
    let prec = map.precision;
    let alpha = map.alpha.to_f64();
    assert!(alpha > 0.0, "fatou fitting requires alpha > 0");
    let sigma = sigma_fixed_point(map);
    let period = 1.0 / alpha;
    // the strip must leave room for the return window: 1/alpha - k >= 2
    // with the default surrogate k = 2 (maps this far from the parabolic
    // regime have no usable petal)
    if period < 4.0 {
        return Err(DynamicsError::NotNearTranslation { max_dev: f64::INFINITY });
    }

    // --- stage 1: collocation over one period x a band of heights ---
    let m = params.modes;
    let cols = 2 * m + params.cols_extra;
    let h_top = params.im_certified.min(params.im_hi);
    let mut rows_w = Vec::with_capacity(params.rows * cols);
    for r in 0..params.rows {
        let t = r as f64 / (params.rows - 1).max(1) as f64;
        let h = params.im_lo + t * (h_top - params.im_lo);
        for j in 0..cols {
            let x = (j as f64 + 0.5) / cols as f64 * period;
            rows_w.push(ComplexHP::from_f64(prec, x, h));
        }
    }

    let tp = std::f64::consts::TAU;
    let deck64 = |w: &ComplexHP| -> C64 {
        let (x, y) = w.to_f64();
        let mag = (-tp * alpha * y).exp();
        C64::new(mag * (tp * alpha * x).cos(), mag * (tp * alpha * x).sin())
    };

    // the gate: the certified-band bottom row must be a clean
    // near-translation everywhere (a genuinely large alpha fails here)
    let mut gate_dev = 0.0f64;
    for j in 0..cols.min(64) {
        let x = (j as f64 + 0.5) / cols.min(64) as f64 * period;
        let w = ComplexHP::from_f64(prec, x, h_top);
        let dev = match lift_f(map, &sigma, &w) {
            Ok(fw) => fw.sub(&w).add_f64(-1.0, 0.0).abs().to_f64(),
            Err(_) => f64::INFINITY,
        };
        gate_dev = gate_dev.max(dev);
    }
    if gate_dev > 0.5 {
        return Err(DynamicsError::NotNearTranslation { max_dev: gate_dev });
    }

    // collocation data; low rows pass close to the covering's poles where
    // no orbit of interest travels, so oversized deviations are dropped,
    // but a map that is not near-parabolic sheds most of its band
    let mut a_rows: Vec<Vec<C64>> = Vec::with_capacity(rows_w.len());
    let mut b: Vec<C64> = Vec::with_capacity(rows_w.len());
    let mut discarded = 0usize;
    for w in &rows_w {
        let fw = match lift_f(map, &sigma, w) {
            Ok(fw) => fw,
            Err(_) => {
                discarded += 1;
                continue;
            }
        };
        let g = fw.sub(w).add_f64(-1.0, 0.0);
        if g.abs().to_f64() > 0.45 {
            discarded += 1;
            continue;
        }
        let e_w = deck64(w);
        let e_fw = deck64(&fw);
        let mut row = Vec::with_capacity(m);
        let (mut pw, mut pfw) = (e_w, e_fw);
        for _ in 0..m {
            row.push(pfw.sub(pw));
            pw = pw.mul(e_w);
            pfw = pfw.mul(e_fw);
        }
        a_rows.push(row);
        let gc = c64_of(&g);
        b.push(C64::new(-gc.re, -gc.im));
    }
    if std::env::var("HEDGEDIM_FIT_DEBUG").is_ok() {
        eprintln!(
            "fit debug: alpha={alpha} grid={} discarded={discarded} gate_dev={gate_dev}",
            rows_w.len()
        );
    }
    if a_rows.len() < 2 * m || discarded * 4 > rows_w.len() {
        return Err(DynamicsError::NotNearTranslation { max_dev: gate_dev });
    }
    let coeffs64 = solve_normal_equations(&a_rows, &b, 1e-14);
    let coeffs: Vec<ComplexHP> = coeffs64
        .iter()
        .map(|c| ComplexHP::from_f64(prec, c.re, c.im))
        .collect();

    // --- normalization: Phi(cv) = 1 exactly ---
    let cv = critical_value(map);
    let w_cv = tau_inverse(&map.alpha, &sigma, &cv, 0)?;
    let mut chart = FatouChart {
        map: map.clone(),
        sigma,
        iteration_budget: params.iteration_budget,
        normalization_offset: ComplexHP::zero(prec),
        coeffs,
        abel_residual_max: f64::NAN,
        abel_residual_mean: f64::NAN,
        abel_residual_extended: f64::NAN,
        richardson_err: f64::NAN,
        valid: false,
        tol: params.tol,
        band: WBand {
            im_lo: params.im_certified,
            im_hi: params.im_hi,
        },
        extended_band: WBand {
            im_lo: params.im_lo,
            im_hi: params.im_hi,
        },
    };
    let l_cv = chart.phi_w(&w_cv); // offset currently zero
    let one = ComplexHP::from_f64(prec, 1.0, 0.0);
    chart.normalization_offset = one.sub(&l_cv);

    // --- stage 2: validation and long-iteration error estimate ---
    // validation points spread over the certified band
    let v_lo = params.im_certified;
    let v_hi = (10.0 / alpha).max(v_lo * 1.5).min(params.im_hi);
    let n_val = params.validation_points.max(4);
    let mut max_res = 0.0f64;
    let mut sum_res = 0.0f64;
    for i in 0..n_val {
        let t = i as f64 / (n_val - 1) as f64;
        let x = (0.17 + 0.61 * ((i * 7919) % n_val) as f64 / n_val as f64) * period;
        let h = v_lo + t * (v_hi - v_lo);
        let w = ComplexHP::from_f64(prec, x, h);
        let fw = lift_f(map, &chart.sigma, &w)?;
        let res = chart.phi_w(&fw).sub(&chart.phi_w(&w)).add_f64(-1.0, 0.0);
        let r = res.abs().to_f64();
        max_res = max_res.max(r);
        sum_res += r;
    }
    chart.abel_residual_max = max_res;
    chart.abel_residual_mean = sum_res / n_val as f64;
    chart.valid = max_res <= params.tol;

    // extended-band residual (reported only; pole-adjacent bottom points
    // that cannot be lifted are skipped, as in the fit)
    let mut ext_max = 0.0f64;
    for i in 0..24 {
        let x = (i as f64 + 0.31) / 24.0 * period;
        let h = params.im_lo + (i as f64 / 23.0) * (v_lo - params.im_lo);
        let w = ComplexHP::from_f64(prec, x, h);
        let fw = match lift_f(map, &chart.sigma, &w) {
            Ok(fw) => fw,
            Err(_) => continue,
        };
        if fw.sub(&w).add_f64(-1.0, 0.0).abs().to_f64() > 0.45 {
            continue;
        }
        let res = chart.phi_w(&fw).sub(&chart.phi_w(&w)).add_f64(-1.0, 0.0);
        ext_max = ext_max.max(res.abs().to_f64());
    }
    chart.abel_residual_extended = ext_max;

    // Richardson comparison of the long-iteration coordinate between K and
    // 2K: the offset cancels in the difference.
    let k_budget = params.iteration_budget;
    let mut rich = 0.0f64;
    for i in 0..params.richardson_points {
        let x = (i as f64 + 0.73) / params.richardson_points as f64 * period;
        let h = v_lo + (i as f64 / params.richardson_points as f64) * (v_hi - v_lo);
        let mut w = ComplexHP::from_f64(prec, x, h);
        let mut at_k = None;
        for step in 0..2 * k_budget {
            w = lift_f(map, &chart.sigma, &w)?;
            if step + 1 == k_budget {
                at_k = Some(w.add_f64(-(k_budget as f64), 0.0));
            }
        }
        let at_2k = w.add_f64(-(2.0 * k_budget as f64), 0.0);
        let d = at_2k.sub(&at_k.expect("set at K")).abs().to_f64();
        rich = rich.max(d);
    }
    chart.richardson_err = rich;

    Ok(chart)
}

/// `Phi^{-1}` as a standalone operation on a fitted chart.
pub fn fatou_inverse(chart: &FatouChart, zeta: &ComplexHP) -> Result<ComplexHP, DynamicsError> {
    chart.phi_inv(zeta)
}
