//! Forward orbits of the critical value, with escape detection and the
//! binary point-cloud format consumed by the dimension pipeline.
//!
//! Binary layout (little endian): magic `HDOR`, version `u32`, precision
//! `u32`, count `u64`, escape radius as a length-prefixed decimal string
//! (`u32` length + UTF-8 bytes), then `count` pairs of `f64` (re, im),
//! then one flag byte: if 1, a full-precision block follows with each
//! coordinate as a length-prefixed decimal string.

use super::complex::ComplexHP;
use super::maps::{critical_value, MapSpec};
use super::DynamicsError;
use rug::{ops::CompleteRound, Float};
use std::io::{Read, Write};

const MAGIC: &[u8; 4] = b"HDOR";
const VERSION: u32 = 1;

/// A sampled forward orbit. `points` holds the double-rounded view; the
/// full-precision points are retained on request (they grow large).
#[derive(Clone, Debug)]
pub struct OrbitSample {
    pub map: MapSpec,
    pub start: ComplexHP,
    pub points: Vec<(f64, f64)>,
    pub full: Option<Vec<ComplexHP>>,
    pub escaped_at: Option<usize>,
    pub escape_radius: f64,
}

impl OrbitSample {
    pub fn to_csv(&self) -> String {
        crate::nestdim::points_to_csv(&self.points)
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<(), DynamicsError> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&self.map.precision.to_le_bytes())?;
        w.write_all(&(self.points.len() as u64).to_le_bytes())?;
        let radius = format!("{}", self.escape_radius);
        w.write_all(&(radius.len() as u32).to_le_bytes())?;
        w.write_all(radius.as_bytes())?;
        for &(re, im) in &self.points {
            w.write_all(&re.to_le_bytes())?;
            w.write_all(&im.to_le_bytes())?;
        }
        match &self.full {
            None => w.write_all(&[0u8])?,
            Some(full) => {
                w.write_all(&[1u8])?;
                for z in full {
                    for part in [&z.re, &z.im] {
                        let s = part.to_string_radix(10, None);
                        w.write_all(&(s.len() as u32).to_le_bytes())?;
                        w.write_all(s.as_bytes())?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Points read back from the binary format.
#[derive(Clone, Debug)]
pub struct OrbitData {
    pub precision: u32,
    pub escape_radius: f64,
    pub points: Vec<(f64, f64)>,
    pub full: Option<Vec<ComplexHP>>,
}

pub fn read_orbit_binary<R: Read>(mut r: R) -> Result<OrbitData, DynamicsError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(DynamicsError::Format("bad magic".into()));
    }
    let mut buf4 = [0u8; 4];
    r.read_exact(&mut buf4)?;
    let version = u32::from_le_bytes(buf4);
    if version != VERSION {
        return Err(DynamicsError::Format(format!("unknown version {version}")));
    }
    r.read_exact(&mut buf4)?;
    let precision = u32::from_le_bytes(buf4);
    let mut buf8 = [0u8; 8];
    r.read_exact(&mut buf8)?;
    let count = u64::from_le_bytes(buf8) as usize;
    r.read_exact(&mut buf4)?;
    let rlen = u32::from_le_bytes(buf4) as usize;
    let mut rbuf = vec![0u8; rlen];
    r.read_exact(&mut rbuf)?;
    let escape_radius: f64 = String::from_utf8(rbuf)
        .map_err(|e| DynamicsError::Format(e.to_string()))?
        .parse()
        .map_err(|_| DynamicsError::Format("bad escape radius".into()))?;
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        r.read_exact(&mut buf8)?;
        let re = f64::from_le_bytes(buf8);
        r.read_exact(&mut buf8)?;
        let im = f64::from_le_bytes(buf8);
        points.push((re, im));
    }
    let mut flag = [0u8; 1];
    r.read_exact(&mut flag)?;
    let full = if flag[0] == 1 {
        let mut full = Vec::with_capacity(count);
        let read_part = |r: &mut R| -> Result<Float, DynamicsError> {
            let mut b4 = [0u8; 4];
            r.read_exact(&mut b4)?;
            let len = u32::from_le_bytes(b4) as usize;
            let mut s = vec![0u8; len];
            r.read_exact(&mut s)?;
            let s = String::from_utf8(s).map_err(|e| DynamicsError::Format(e.to_string()))?;
            let p = Float::parse(&s).map_err(|e| DynamicsError::Format(e.to_string()))?;
            Ok(Float::with_val(precision, p))
        };
        for _ in 0..count {
            let re = read_part(&mut r)?;
            let im = read_part(&mut r)?;
            full.push(ComplexHP::new(re, im));
        }
        Some(full)
    } else {
        None
    };
    Ok(OrbitData {
        precision,
        escape_radius,
        points,
        full,
    })
}

/// Iterate the critical value forward, recording up to `n_points` points or
/// stopping early at escape (`|z| > escape_radius`, overflow included).
/// Escape is recorded, never thrown; escaping points are not stored.
/// Deterministic: identical spec and count give bit-identical samples.
pub fn postcritical_orbit(
    map: &MapSpec,
    n_points: usize,
    escape_radius: f64,
    keep_full: bool,
) -> OrbitSample {
    assert!(n_points >= 1);
    let prec = map.precision;
    let start = critical_value(map);
    let lambda = map.lambda();
    let coeff = map.quad_coeff();
    let r_sq = Float::with_val(prec, escape_radius * escape_radius);

    let mut points = Vec::with_capacity(n_points.min(1 << 22));
    let mut full = if keep_full { Some(Vec::new()) } else { None };
    let mut escaped_at = None;

    let mut z = start.clone();
    // working registers for the in-place quadratic step
    let mut t_re = Float::new(prec);
    let mut t_im = Float::new(prec);
    for k in 0..n_points {
        let n = z.norm_sq();
        if !n.is_finite() || n > r_sq {
            escaped_at = Some(k);
            break;
        }
        points.push((z.re.to_f64(), z.im.to_f64()));
        if let Some(f) = full.as_mut() {
            f.push(z.clone());
        }
        if k + 1 == n_points {
            break;
        }
        // t = lambda + coeff * z
        t_re.assign_round(
            &lambda.re + &((&coeff.re * &z.re).complete(prec) - (&coeff.im * &z.im).complete(prec)),
            rug::float::Round::Nearest,
        );
        t_im.assign_round(
            &lambda.im + &((&coeff.re * &z.im).complete(prec) + (&coeff.im * &z.re).complete(prec)),
            rug::float::Round::Nearest,
        );
        // z = z * t
        let zr = (&z.re * &t_re).complete(prec) - (&z.im * &t_im).complete(prec);
        let zi = (&z.re * &t_im).complete(prec) + (&z.im * &t_re).complete(prec);
        z = ComplexHP::new(zr, zi);
    }

    OrbitSample {
        map: map.clone(),
        start,
        points,
        full,
        escaped_at,
        escape_radius,
    }
}

use rug::ops::AssignRound;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::maps::{apply_map, MapFamily};

    fn q_map(alpha: f64) -> MapSpec {
        MapSpec::new(MapFamily::Q, Float::with_val(128, alpha), 128)
    }

    #[test]
    fn single_point_is_cv() {
        let m = q_map(0.382);
        let o = postcritical_orbit(&m, 1, 10.0, false);
        assert_eq!(o.points.len(), 1);
        assert!((o.points[0].0 + 4.0 / 27.0).abs() < 1e-15);
        assert!(o.escaped_at.is_none());
    }

    #[test]
    fn orbit_steps_match_map() {
        let m = q_map(0.3819660112501051);
        let o = postcritical_orbit(&m, 50, 10.0, true);
        let full = o.full.as_ref().unwrap();
        for k in 0..full.len() - 1 {
            let expect = apply_map(&m, &full[k]);
            let d = expect.sub(&full[k + 1]).abs().to_f64();
            assert!(d < 1e-30, "step {k}: {d}");
        }
    }

    #[test]
    fn golden_orbit_bounded() {
        // bounded-type rotation number: orbit stays within |z| <= 1
        let m = q_map(0.3819660112501051);
        let o = postcritical_orbit(&m, 20_000, 10.0, false);
        assert!(o.escaped_at.is_none());
        let max_mod = o
            .points
            .iter()
            .map(|&(x, y)| (x * x + y * y).sqrt())
            .fold(0.0f64, f64::max);
        assert!(max_mod <= 1.0, "max modulus {max_mod}");
    }

    #[test]
    fn parabolic_orbit_monotone_tail() {
        // alpha = 0: convergence to 0 along the attracting direction
        let m = q_map(0.0);
        let o = postcritical_orbit(&m, 5_000, 10.0, false);
        assert!(o.escaped_at.is_none());
        let mods: Vec<f64> = o
            .points
            .iter()
            .map(|&(x, y)| (x * x + y * y).sqrt())
            .collect();
        for w in mods[100..].windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
        assert!(mods.last().unwrap() < &0.01);
    }

    #[test]
    fn determinism() {
        let m = q_map(0.2587);
        let a = postcritical_orbit(&m, 3_000, 10.0, false);
        let b = postcritical_orbit(&m, 3_000, 10.0, false);
        assert_eq!(a.points, b.points);
    }

    #[test]
    fn binary_round_trip() {
        let m = q_map(0.31);
        let o = postcritical_orbit(&m, 257, 10.0, true);
        let mut buf = Vec::new();
        o.write_binary(&mut buf).unwrap();
        let back = read_orbit_binary(std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(back.precision, 128);
        assert_eq!(back.escape_radius, 10.0);
        assert_eq!(back.points, o.points);
        let full = back.full.unwrap();
        let orig = o.full.as_ref().unwrap();
        for (a, b) in full.iter().zip(orig) {
            assert_eq!(a.re, b.re);
            assert_eq!(a.im, b.im);
        }
    }
}
