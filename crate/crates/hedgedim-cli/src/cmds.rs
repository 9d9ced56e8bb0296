//! Subcommand implementations. Every JSON output embeds the configuration
//! that produced it; numeric fields carry full-precision decimal strings
//! alongside rounded doubles wherever precision matters.

use crate::numspec::{alpha_of, map_arith_err, map_dyn_err, map_nest_err, parse_number};
use crate::{Cli, CliError, Cmd};
use hedgedim::arithmetic::{
    brjuno_sum, herman_test, is_high_type, jagged_check, jagged_divergence_witness,
    jagged_exact_u, spiky_check, spiky_example_v, validate_canonical, BrjunoVerdict,
    HermanVerdict, Sign,
};
use hedgedim::dynamics::{
    chi_lift, exp_map, fit_fatou, postcritical_orbit, read_orbit_binary,
    renormalized_return_map, ChiLift, ComplexHP, FatouChart, FatouFitParams, MapFamily, MapSpec,
};
use hedgedim::nestdim::{
    box_count_dimension, extract_nest, four_corner_family, frostman_check, martingale_measure,
    mcmullen_bound, mcmullen_bound_from_bounds, points_from_csv, GridBox, SumConvention,
};
use std::io::Write;

const DEFAULT_ARITH_PREC: u32 = 256;
const DEFAULT_DYN_PREC: u32 = 128;
const DEFAULT_DEPTH: usize = 64;

fn env_precision() -> Option<u32> {
    std::env::var("HEDGEDIM_PRECISION")
        .ok()
        .and_then(|s| s.parse().ok())
}

fn precision_for(cli: &Cli, dynamic: bool) -> u32 {
    cli.precision
        .or_else(env_precision)
        .unwrap_or(if dynamic { DEFAULT_DYN_PREC } else { DEFAULT_ARITH_PREC })
}

fn family_of(name: &str) -> Result<MapFamily, CliError> {
    match name.to_ascii_lowercase().as_str() {
        "p" => Ok(MapFamily::P),
        "q" => Ok(MapFamily::Q),
        other => Err(CliError::usage(format!("unknown family {other:?}"))),
    }
}

fn emit(cli: &Cli, command: &str, config: serde_json::Value, result: serde_json::Value) -> Result<(), CliError> {
    let mut doc = serde_json::json!({
        "command": command,
        "config": config,
        "result": result,
    });
    if !cli.no_timestamp {
        let ts = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        doc["timestamp"] = serde_json::json!(ts);
    }
    write_out(cli, &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))
}

fn write_out(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::usage(e.to_string()))?;
            Ok(())
        }
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::usage(e.to_string())),
    }
}

fn write_file(path: &str, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::usage(e.to_string()))
}

fn parse_scales(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::usage(format!("bad scale {t:?}: {e}")))
        })
        .collect()
}

fn load_points(path: &str) -> Result<Vec<(f64, f64)>, CliError> {
    if path.ends_with(".bin") {
        let f = std::fs::File::open(path).map_err(|e| CliError::usage(e.to_string()))?;
        let data = read_orbit_binary(std::io::BufReader::new(f)).map_err(map_dyn_err)?;
        Ok(data.points)
    } else {
        let f = std::fs::File::open(path).map_err(|e| CliError::usage(e.to_string()))?;
        points_from_csv(std::io::BufReader::new(f)).map_err(map_nest_err)
    }
}

/// Padded power-of-two bounding square for a point cloud.
fn bounding_root(points: &[(f64, f64)]) -> GridBox {
    let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in points {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    let span = (x_hi - x_lo).max(y_hi - y_lo).max(1e-9);
    let side = 2f64.powi(span.log2().ceil() as i32 + 1);
    GridBox::half_open(
        (x_lo + x_hi) / 2.0 - side / 2.0,
        (y_lo + y_hi) / 2.0 - side / 2.0,
        side,
    )
}

fn dyadic_scales(root_side: f64, levels: usize) -> Vec<f64> {
    (3..3 + levels).map(|k| root_side * 0.5f64.powi(k as i32)).collect()
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::Classify {
            number,
            depth,
            n,
            levels,
            p_max,
            brjuno_depth,
            tol,
            bound,
            example_seed,
        } => {
            let prec = precision_for(cli, false);
            let depth = depth.unwrap_or(DEFAULT_DEPTH);
            let parsed = parse_number(number, prec, depth, *example_seed)?;
            let seq = &parsed.seq;
            let canon = validate_canonical(seq);
            let high = is_high_type(seq, *n);
            let b_depth = (*brjuno_depth).min(seq.depth().saturating_sub(1));
            let brjuno = brjuno_sum(seq, b_depth, *tol, *bound).map_err(map_arith_err)?;
            let herman = {
                let bd = (*brjuno_depth).min(12);
                if seq.depth() >= levels + p_max + bd {
                    Some(herman_test(seq, *levels, *p_max, bd).map_err(map_arith_err)?)
                } else {
                    None
                }
            };
            // growth checks only where the witnesses are known
            let growth = match parsed.name.as_str() {
                "jagged-example" => {
                    let u = jagged_exact_u(seq);
                    let d = seq.depth().min(7);
                    let rep = jagged_check(seq, &u, d).map_err(map_arith_err)?;
                    let witness = jagged_divergence_witness(seq, &u, d.saturating_sub(2))
                        .map_err(map_arith_err)?;
                    serde_json::json!({"jagged": rep.to_json(), "divergence_witness": witness.to_json()})
                }
                "spiky-example" => {
                    let d = seq.depth().saturating_sub(1).min(8);
                    let v = spiky_example_v(prec, d);
                    let rep = spiky_check(seq, &v, 1.0, d).map_err(map_arith_err)?;
                    serde_json::json!({"spiky": rep.to_json()})
                }
                _ => serde_json::Value::Null,
            };
            let result = serde_json::json!({
                "digits": seq.to_json(),
                "canonical": {"ok": canon.canonical, "first_violation": canon.first_violation},
                "high_type": {"n": n, "ok": high},
                "brjuno": brjuno.to_json(),
                "herman": herman.as_ref().map(|h| h.to_json()),
                "growth_evidence": growth,
            });
            let config = serde_json::json!({
                "number": number, "precision": prec, "depth": depth, "n": n,
                "levels": levels, "p_max": p_max, "brjuno_depth": brjuno_depth,
                "tol": tol, "bound": bound, "example_seed": example_seed, "seed": cli.seed,
            });
            emit(cli, "classify", config, result)
        }

        Cmd::Brjuno {
            number,
            depth,
            tol,
            bound,
            example_seed,
        } => {
            let prec = precision_for(cli, false);
            let depth = depth.unwrap_or(DEFAULT_DEPTH);
            let parsed = parse_number(number, prec, depth, *example_seed)?;
            let ev = brjuno_sum(&parsed.seq, depth.min(parsed.seq.depth() - 1), *tol, *bound)
                .map_err(map_arith_err)?;
            let code_3 = matches!(ev.verdict, BrjunoVerdict::Undetermined(_));
            let config = serde_json::json!({
                "number": number, "precision": prec, "depth": depth,
                "tol": tol, "bound": bound, "seed": cli.seed,
            });
            emit(cli, "brjuno", config, ev.to_json())?;
            if code_3 {
                return Err(CliError::undetermined("brjuno verdict undetermined"));
            }
            Ok(())
        }

        Cmd::Herman {
            number,
            levels,
            p_max,
            brjuno_depth,
            depth,
            example_seed,
        } => {
            let prec = precision_for(cli, false);
            let depth = depth.unwrap_or(levels + p_max + brjuno_depth + 4);
            let parsed = parse_number(number, prec, depth, *example_seed)?;
            let rep = herman_test(&parsed.seq, *levels, *p_max, *brjuno_depth)
                .map_err(map_arith_err)?;
            let indeterminate = matches!(rep.verdict, HermanVerdict::Indeterminate { .. });
            let config = serde_json::json!({
                "number": number, "precision": prec, "levels": levels,
                "p_max": p_max, "brjuno_depth": brjuno_depth, "seed": cli.seed,
            });
            emit(cli, "herman", config, rep.to_json())?;
            if indeterminate {
                return Err(CliError::undetermined("herman comparison indeterminate"));
            }
            Ok(())
        }

        Cmd::Orbit {
            number,
            family,
            points,
            escape_radius,
            full,
            depth,
            example_seed,
        } => {
            let prec = precision_for(cli, true);
            let arith_prec = precision_for(cli, false);
            let depth = depth.unwrap_or(DEFAULT_DEPTH);
            let parsed = parse_number(number, arith_prec, depth, *example_seed)?;
            let alpha = alpha_of(&parsed, prec)?;
            let map = MapSpec::new(family_of(family)?, alpha, prec);
            let orbit = postcritical_orbit(&map, *points, *escape_radius, *full);
            let config = serde_json::json!({
                "number": number, "family": family, "precision": prec,
                "points": points, "escape_radius": escape_radius, "full": full,
                "alpha": map.alpha.to_string_radix(10, None), "seed": cli.seed,
            });
            match (&cli.out, cli.format.as_str()) {
                (Some(path), _) if path.ends_with(".bin") => {
                    let mut buf = Vec::new();
                    orbit.write_binary(&mut buf).map_err(map_dyn_err)?;
                    write_file(path, &buf)?;
                    eprintln!(
                        "wrote {} points ({} escaped: {:?})",
                        orbit.points.len(),
                        if orbit.escaped_at.is_some() { "orbit" } else { "never" },
                        orbit.escaped_at
                    );
                    Ok(())
                }
                (_, "csv") => write_out(cli, &orbit.to_csv()),
                _ => {
                    let result = serde_json::json!({
                        "count": orbit.points.len(),
                        "escaped_at": orbit.escaped_at,
                        "max_modulus": orbit.points.iter().map(|&(x, y)| (x*x+y*y).sqrt()).fold(0.0f64, f64::max),
                        "first_points": orbit.points.iter().take(8).collect::<Vec<_>>(),
                    });
                    emit(cli, "orbit", config, result)
                }
            }
        }

        Cmd::Fatou {
            number,
            family,
            k,
            tol,
            im_lo,
            residual_csv,
            depth,
            example_seed,
        } => {
            let prec = precision_for(cli, true);
            let arith_prec = precision_for(cli, false);
            let depth = depth.unwrap_or(DEFAULT_DEPTH);
            let parsed = parse_number(number, arith_prec, depth, *example_seed)?;
            let alpha = alpha_of(&parsed, prec)?;
            let map = MapSpec::new(family_of(family)?, alpha.clone(), prec);
            let alpha_f = alpha.to_f64();

            let fit_one = |budget: usize| -> Result<FatouChart, CliError> {
                let mut params = FatouFitParams::for_alpha(alpha_f, budget, *tol);
                params.im_lo = *im_lo;
                fit_fatou(&map, &params).map_err(map_dyn_err)
            };
            let chart = fit_one(k[0])?;
            if !chart.valid {
                return Err(CliError::numeric(format!(
                    "chart residual {} exceeds tolerance {}",
                    chart.abel_residual_max, tol
                )));
            }

            let mut result = chart.to_json();
            if k.len() > 1 {
                // comparison mode: difference of the two fits on a probe line
                let other = fit_one(k[1])?;
                let mut diffs = Vec::new();
                for i in 0..16 {
                    let w = ComplexHP::from_f64(
                        prec,
                        (i as f64 + 0.5) / 16.0 / alpha_f,
                        3.0 / alpha_f,
                    );
                    let d = chart.phi_w(&w).sub(&other.phi_w(&w)).abs().to_f64();
                    diffs.push(d);
                }
                result["k_comparison"] = serde_json::json!({
                    "budgets": k,
                    "max_diff": diffs.iter().cloned().fold(0.0f64, f64::max),
                    "diffs": diffs,
                });
            }

            if let Some(path) = residual_csv {
                let mut csv = String::from("re_z,im_z,abel_residual\n");
                for i in 0..100 {
                    let h = (2.5 + 7.5 * i as f64 / 99.0) / alpha_f;
                    let x = (0.13 + 0.74 * ((i * 31) % 100) as f64 / 100.0) / alpha_f;
                    let w = ComplexHP::from_f64(prec, x, h);
                    let z = hedgedim::dynamics::tau(&map.alpha, &chart.sigma, &w)
                        .map_err(map_dyn_err)?;
                    let fz = hedgedim::dynamics::apply_map(&map, &z);
                    let res = chart
                        .phi(&fz)
                        .and_then(|a| chart.phi(&z).map(|b| a.sub(&b).add_f64(-1.0, 0.0)))
                        .map_err(map_dyn_err)?;
                    let (re, im) = z.to_f64();
                    csv.push_str(&format!("{re},{im},{}\n", res.abs().to_f64()));
                }
                write_file(path, csv.as_bytes())?;
            }

            let config = serde_json::json!({
                "number": number, "family": family, "precision": prec,
                "k": k, "tol": tol, "im_lo": im_lo, "seed": cli.seed,
                "alpha": map.alpha.to_string_radix(10, None),
            });
            emit(cli, "fatou", config, result)
        }

        Cmd::Chi {
            number,
            family,
            k,
            eps,
            grid,
            depth,
            example_seed,
        } => {
            let prec = precision_for(cli, true);
            let arith_prec = precision_for(cli, false);
            let depth = depth.unwrap_or(DEFAULT_DEPTH);
            let parsed = parse_number(number, arith_prec, depth, *example_seed)?;
            let alpha = alpha_of(&parsed, prec)?;
            let alpha_f = alpha.to_f64();
            let map = MapSpec::new(family_of(family)?, alpha, prec);
            let params = FatouFitParams::for_alpha(alpha_f, *k, 1e-6);
            let chart = fit_fatou(&map, &params).map_err(map_dyn_err)?;
            let eps_sign = Sign::try_from(*eps).map_err(CliError::usage)?;
            let lift = ChiLift::new(chart, eps_sign);

            let parts: Vec<f64> = grid
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| CliError::usage(e.to_string())))
                .collect::<Result<_, _>>()?;
            if parts.len() != 6 {
                return Err(CliError::usage("grid must be RE_LO,RE_HI,IM_LO,IM_HI,NX,NY"));
            }
            let (nx, ny) = (parts[4] as usize, parts[5] as usize);
            let one = ComplexHP::from_f64(prec, 1.0, 0.0);
            let mut rows = Vec::new();
            let mut max_exp_defect = 0.0f64;
            let mut max_band_dev = 0.0f64;
            for i in 0..nx {
                for j in 0..ny {
                    let re = parts[0] + (parts[1] - parts[0]) * i as f64 / (nx - 1).max(1) as f64;
                    let im_units = parts[2] + (parts[3] - parts[2]) * j as f64 / (ny - 1).max(1) as f64;
                    let zeta = ComplexHP::from_f64(prec, re, im_units / alpha_f);
                    let chi = chi_lift(&lift, &zeta, &one).map_err(map_dyn_err)?;
                    let fiber = exp_map(&chi);
                    let target = lift.chart.phi_inv(&zeta).map_err(map_dyn_err)?;
                    let target = match eps_sign {
                        Sign::Neg => target,
                        Sign::Pos => target.conj(),
                    };
                    let defect = fiber.sub(&target).abs().to_f64()
                        / target.abs().to_f64().max(1e-300);
                    max_exp_defect = max_exp_defect.max(defect);
                    let model = alpha_f * (im_units / alpha_f) + (1.0 / alpha_f).ln() / std::f64::consts::TAU;
                    max_band_dev = max_band_dev.max((chi.im.to_f64() - model).abs());
                    let (cre, cim) = chi.to_f64();
                    rows.push(serde_json::json!({
                        "zeta": [re, im_units / alpha_f],
                        "chi": [cre, cim],
                        "exp_defect_rel": defect,
                    }));
                }
            }
            let config = serde_json::json!({
                "number": number, "family": family, "precision": prec, "k": k,
                "eps": eps, "grid": grid, "seed": cli.seed,
            });
            let result = serde_json::json!({
                "anchor": "chi(1) = 1",
                "max_exp_defect_rel": max_exp_defect,
                "imag_band_max_deviation": max_band_dev,
                "points": rows,
            });
            emit(cli, "chi", config, result)
        }

        Cmd::Renorm {
            number,
            family,
            k,
            w_abs,
            directions,
            k_max,
            k_surrogate,
            depth,
            example_seed,
        } => {
            let prec = precision_for(cli, true);
            let arith_prec = precision_for(cli, false);
            let depth = depth.unwrap_or(DEFAULT_DEPTH);
            let parsed = parse_number(number, arith_prec, depth, *example_seed)?;
            let alpha = alpha_of(&parsed, prec)?;
            let alpha_f = alpha.to_f64();
            let map = MapSpec::new(family_of(family)?, alpha, prec);
            let mut params = FatouFitParams::for_alpha(alpha_f, *k, 1e-6);
            params.im_lo = 0.6;
            let chart = fit_fatou(&map, &params).map_err(map_dyn_err)?;
            let k_max = k_max.unwrap_or((1.0 / alpha_f) as usize + 12);

            let expect = -std::f64::consts::TAU / alpha_f;
            let mut rows = Vec::new();
            let mut mean_err = 0.0f64;
            let mut max_err = 0.0f64;
            for d in 0..*directions {
                let phase = std::f64::consts::TAU * d as f64 / *directions as f64;
                let w = ComplexHP::from_f64(prec, w_abs * phase.cos(), w_abs * phase.sin());
                let r = renormalized_return_map(&chart, &w, k_max, *k_surrogate)
                    .map_err(map_dyn_err)?;
                let got = r.w_prime.div(&w).arg().to_f64();
                let mut diff = (got - expect).rem_euclid(std::f64::consts::TAU);
                if diff > std::f64::consts::PI {
                    diff -= std::f64::consts::TAU;
                }
                mean_err += diff;
                max_err = max_err.max(diff.abs());
                rows.push(serde_json::json!({
                    "direction": phase,
                    "k_used": r.k_used,
                    "arg_error": diff,
                    "modulus_ratio": r.w_prime.abs().to_f64() / w_abs,
                }));
            }
            mean_err /= *directions as f64;
            let config = serde_json::json!({
                "number": number, "family": family, "precision": prec, "k": k,
                "w_abs": w_abs, "directions": directions, "k_max": k_max,
                "k_surrogate": k_surrogate, "seed": cli.seed,
            });
            let result = serde_json::json!({
                "expected_rotation": expect,
                "mean_arg_error": mean_err,
                "max_arg_error": max_err,
                "probes": rows,
            });
            emit(cli, "renorm", config, result)
        }

        Cmd::Nest {
            points,
            scales,
            root,
        } => {
            let pts = load_points(points)?;
            let scales = parse_scales(scales)?;
            let root = match root {
                Some(r) => {
                    let v = parse_scales(r)?;
                    if v.len() != 3 {
                        return Err(CliError::usage("root must be X,Y,SIDE"));
                    }
                    GridBox::half_open(v[0], v[1], v[2])
                }
                None => bounding_root(&pts),
            };
            let fam = extract_nest(&pts, &scales, &root).map_err(map_nest_err)?;
            let config = serde_json::json!({
                "points": points, "scales": scales,
                "root": [root.min_corner.0, root.min_corner.1, root.side],
                "seed": cli.seed,
            });
            if cli.format == "csv" {
                write_out(cli, &fam.to_csv())
            } else {
                let result = serde_json::json!({
                    "family": fam.to_json(),
                    "counts": fam.generations.iter().map(|g| g.count()).collect::<Vec<_>>(),
                });
                emit(cli, "nest", config, result)
            }
        }

        Cmd::Dimension {
            points,
            number,
            family,
            orbit_points,
            scales,
            window,
            counts_csv,
            depth,
            example_seed,
        } => {
            let (pts, provenance) = match (points, number) {
                (Some(path), _) => (load_points(path)?, serde_json::json!({"points_file": path})),
                (None, Some(spec)) => {
                    let prec = precision_for(cli, true);
                    let arith_prec = precision_for(cli, false);
                    let depth = depth.unwrap_or(DEFAULT_DEPTH);
                    let parsed = parse_number(spec, arith_prec, depth, *example_seed)?;
                    let alpha = alpha_of(&parsed, prec)?;
                    let map = MapSpec::new(family_of(family)?, alpha.clone(), prec);
                    let orbit = postcritical_orbit(&map, *orbit_points, 10.0, false);
                    (
                        orbit.points,
                        serde_json::json!({
                            "orbit_of": spec, "family": family,
                            "alpha": alpha.to_string_radix(10, None),
                            "points": orbit_points, "precision": prec,
                        }),
                    )
                }
                _ => return Err(CliError::usage("need --points or --number")),
            };
            let root = bounding_root(&pts);
            let scales = match scales {
                Some(s) => parse_scales(s)?,
                None => dyadic_scales(root.side, 7),
            };
            let fam = extract_nest(&pts, &scales, &root).map_err(map_nest_err)?;
            let bound = mcmullen_bound(&fam, *window).map_err(map_nest_err)?;
            let est = box_count_dimension(&pts, &scales, &root).map_err(map_nest_err)?;

            if let Some(path) = counts_csv {
                let mut csv = String::from("log_inv_scale,log_count\n");
                for &(s, n) in &est.counts {
                    csv.push_str(&format!("{},{}\n", (1.0 / s).ln(), (n as f64).ln()));
                }
                write_file(path, csv.as_bytes())?;
            }

            let config = serde_json::json!({
                "source": provenance, "scales": scales, "window": window,
                "root": [root.min_corner.0, root.min_corner.1, root.side],
                "seed": cli.seed,
            });
            let result = serde_json::json!({
                "mcmullen": bound.to_json(),
                "box_count": est.to_json(),
                "nest_counts": fam.generations.iter().map(|g| g.count()).collect::<Vec<_>>(),
                "delta": fam.delta,
                "dia": fam.dia,
            });
            emit(cli, "dimension", config, result)
        }

        Cmd::McmullenDemo {
            depth,
            window,
            materialize_depth,
            frostman_s,
            samples,
        } => {
            // analytic bounds to the requested depth
            let delta = vec![0.25f64; *depth];
            let dia: Vec<f64> = (0..=*depth)
                .map(|n| std::f64::consts::SQRT_2 * 0.25f64.powi(n as i32))
                .collect();
            let through_np1 = mcmullen_bound_from_bounds(&delta, &dia, *window, SumConvention::ThroughNPlusOne)
                .map_err(map_nest_err)?;
            let mcm = mcmullen_bound_from_bounds(&delta, &dia, *window, SumConvention::ThroughN)
                .map_err(map_nest_err)?;

            // materialized family for measure-level checks
            let fam = four_corner_family(*materialize_depth);
            let mu = martingale_measure(&fam).map_err(map_nest_err)?;
            let fr = frostman_check(&mu, &fam, *frostman_s, *samples, cli.seed);
            let fr10 = frostman_check(&mu, &fam, *frostman_s, *samples * 10, cli.seed);

            let config = serde_json::json!({
                "depth": depth, "window": window, "materialize_depth": materialize_depth,
                "frostman_s": frostman_s, "samples": samples, "seed": cli.seed,
            });
            let result = serde_json::json!({
                "bound_through_n_plus_one": through_np1.to_json(),
                "bound_through_n": mcm.to_json(),
                "martingale_conservation_defect": mu.conservation_defect(),
                "frostman": {
                    "s": frostman_s,
                    "max_ratio": fr.max_ratio,
                    "max_ratio_10x": fr10.max_ratio,
                    "stable": (fr10.max_ratio / fr.max_ratio) < 2.0,
                },
            });
            emit(cli, "mcmullen-demo", config, result)
        }
    }
}
