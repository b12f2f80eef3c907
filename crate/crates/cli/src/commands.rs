//! The subcommands. Each returns a [`Report`]: a JSON document, a table and,
//! for the figure commands, a plot.

use crate::config::RunConfig;
use crate::output::{Cell, Layer, LayerKind, Plot, Table};
use boutroux_core::boutroux::{mode_for, period_h, solve_a, solve_t_double_star};
use boutroux_core::curve::{
    a1_of_t, branch_points, discriminant_of_q, BranchMode, CurveParams, Sheets, T_STAR,
};
use boutroux_core::exec::{self, Exec};
use boutroux_core::geometry::{
    droplet_area_over_pi, droplet_boundary, droplet_polar, ArmId, Geometry,
};
use boutroux_core::orthopoly::{
    compare_poly, distance_to_spines, poly_zeros, solve_with, test_points, MonicPoly,
};
use boutroux_core::perturbation::{ltw_comparison, predicted_expansion, solve_elliptic_k};
use boutroux_core::riemann::{circle_dist, QuotientCurve, ThetaContext};
use boutroux_core::Error;
use num_complex::Complex64 as C;
use serde_json::{json, Value};
use std::f64::consts::PI;

/// Angles for area and moment sums; fixed so outputs do not depend on `--grid`.
const MOMENT_ANGLES: usize = 3072;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Config,
    Numerical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: Kind,
    pub command: &'static str,
    pub operation: String,
    pub message: String,
    /// Variant of the library error, for numerical failures.
    pub variant: Option<String>,
}

impl CliError {
    pub fn config(command: &'static str, message: impl Into<String>) -> Self {
        CliError {
            kind: Kind::Config,
            command,
            operation: "config".into(),
            message: message.into(),
            variant: None,
        }
    }

    pub fn numerical(command: &'static str, operation: &str, message: impl Into<String>) -> Self {
        CliError {
            kind: Kind::Numerical,
            command,
            operation: operation.into(),
            message: message.into(),
            variant: None,
        }
    }

    fn from_core(command: &'static str, operation: &str, e: Error) -> Self {
        let dbg = format!("{e:?}");
        let variant = dbg
            .split(|c: char| !c.is_alphanumeric())
            .next()
            .unwrap_or("")
            .to_string();
        CliError {
            kind: Kind::Numerical,
            command,
            operation: operation.into(),
            message: e.to_string(),
            variant: Some(variant),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "error": {
                "kind": match self.kind { Kind::Config => "config", Kind::Numerical => "numerical" },
                "command": self.command,
                "operation": self.operation,
                "message": self.message,
                "variant": self.variant,
            }
        })
    }
}

pub struct Report {
    pub json: Value,
    pub table: Table,
    pub plot: Option<Plot>,
}

/// Error adapter that records where a library call failed.
fn at(command: &'static str, operation: &'static str) -> impl Fn(Error) -> CliError {
    move |e| CliError::from_core(command, operation, e)
}

fn cfg_err(command: &'static str) -> impl Fn(String) -> CliError {
    move |m| CliError::config(command, m)
}

fn cj(z: C) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn pt(z: C) -> (f64, f64) {
    (z.re, z.im)
}

fn supercritical(command: &'static str, t: f64) -> Result<(), CliError> {
    if t <= T_STAR {
        return Err(CliError::config(command, format!("needs t > 1/8, got {t}")));
    }
    Ok(())
}

fn check_residual(command: &'static str, what: &str, r: f64, tol: f64) -> Result<(), CliError> {
    if !(r <= tol) {
        return Err(CliError::numerical(
            command,
            "residual check",
            format!("{what} residual {r:e} exceeds tol-root {tol:e}"),
        ));
    }
    Ok(())
}

/// `A` for a droplet or curve at `t`: `A_1(t)` up to the critical time, `A(t)` after.
fn default_a(command: &'static str, t: f64) -> Result<f64, CliError> {
    if t <= T_STAR {
        a1_of_t(t).map_err(at(command, "a1_of_t"))
    } else {
        Ok(solve_a(t).map_err(at(command, "solve_a"))?.a)
    }
}

fn arm_name(arm: ArmId) -> String {
    match arm {
        ArmId::Spine(j) => format!("spine{j}"),
        ArmId::WhiskerUp(j) => format!("up{j}"),
        ArmId::WhiskerDown(j) => format!("down{j}"),
    }
}

fn sigma1_layers(g: &Geometry) -> Vec<Layer> {
    ArmId::all()
        .into_iter()
        .map(|arm| {
            let color = if matches!(arm, ArmId::Spine(_)) {
                "black"
            } else {
                "#b2182b"
            };
            Layer::new(
                arm_name(arm),
                LayerKind::Line,
                color,
                g.arm_points(arm).into_iter().map(pt).collect(),
            )
        })
        .collect()
}

fn reach(g: &Geometry) -> f64 {
    g.z1().max(g.sheets.bs.z2.norm())
}

fn relative_p_residual(params: &CurveParams, xi: C, z: C) -> f64 {
    let (x, zn) = (xi.norm(), z.norm());
    let scale =
        x.powi(3) + zn * zn * x * x + (1.0 + params.t) * zn * x + zn.powi(3) + params.a.abs();
    params.p(xi, z).norm() / scale.max(f64::MIN_POSITIVE)
}

pub fn curve(cfg: &RunConfig) -> Result<Report, CliError> {
    const CMD: &str = "curve";
    let t = cfg.single_t(0.2).map_err(cfg_err(CMD))?;
    let (a, source, mode) = match cfg.a {
        Some(a) => (a, "given", mode_for(t, a)),
        None if t <= T_STAR => (
            a1_of_t(t).map_err(at(CMD, "a1_of_t"))?,
            "A1",
            BranchMode::Critical,
        ),
        None => {
            let a = solve_a(t).map_err(at(CMD, "solve_a"))?.a;
            (a, "boutroux", mode_for(t, a))
        }
    };
    let params = CurveParams::new(t, a).map_err(at(CMD, "curve_params"))?;
    let bs = branch_points(&params, mode).map_err(at(CMD, "branch_points"))?;
    let c = params.q_coeffs();
    let q_res =
        bs.w.iter()
            .map(|&w| {
                let m = w.norm();
                let scale = ((c[0].abs() * m + c[1].abs()) * m + c[2].abs()) * m + c[3].abs();
                params.discriminant_q(w).norm() / scale
            })
            .fold(0.0, f64::max);
    check_residual(CMD, "discriminant root", q_res, cfg.tol_root)?;

    let sheets = Sheets::new(params, mode).map_err(at(CMD, "sheets"))?;
    let span = 2.0 * bs.scale();
    let mut table = Table::new(&[
        "x", "xi1_re", "xi1_im", "xi2_re", "xi2_im", "xi3_re", "xi3_im", "residual",
    ]);
    let mut p_res: f64 = 0.0;
    for k in 0..cfg.grid {
        let x = bs.z1 + span * (k + 1) as f64 / cfg.grid as f64;
        let z = C::new(x, 0.0);
        let xi = sheets.eval(z).map_err(at(CMD, "sheet_eval"))?;
        let r = xi
            .iter()
            .map(|&s| relative_p_residual(&params, s, z))
            .fold(0.0, f64::max);
        p_res = p_res.max(r);
        let mut row: Vec<Cell> = vec![x.into()];
        for s in xi {
            row.push(s.re.into());
            row.push(s.im.into());
        }
        row.push(r.into());
        table.push(row);
    }
    check_residual(CMD, "sheet sample", p_res, cfg.tol_root)?;

    let closed = (source == "A1").then(|| 0.75 * (1.0 - (1.0 - 8.0 * t).sqrt()).powf(2.0 / 3.0));
    let json = json!({
        "t": t,
        "A": a,
        "A_source": source,
        "discriminant_roots": bs.w.iter().map(|&w| cj(w)).collect::<Vec<_>>(),
        "discriminant_of_q": discriminant_of_q(t, a),
        "z1": bs.z1,
        "z2": cj(bs.z2),
        "z3": cj(bs.z3),
        "branch_points": bs.z_points.iter().map(|&z| cj(z)).collect::<Vec<_>>(),
        "double_root": bs.double_root,
        "z1_closed_form": closed,
        "z1_closed_form_diff": closed.map(|z| (z - bs.z1).abs()),
        "max_discriminant_residual": q_res,
        "max_sheet_residual": p_res,
        "sheet_samples": cfg.grid,
    });
    Ok(Report {
        json,
        table,
        plot: None,
    })
}

pub fn boutroux(cfg: &RunConfig) -> Result<Report, CliError> {
    const CMD: &str = "boutroux";
    supercritical(CMD, cfg.t_min)?;
    let ts: Vec<f64> = (0..cfg.steps)
        .map(|k| cfg.t_min + (cfg.t_max - cfg.t_min) * k as f64 / (cfg.steps - 1) as f64)
        .collect();
    let tol = cfg.tol_quad;
    let rows = exec::map(Exec::Parallel, &ts, |&t| -> Result<_, CliError> {
        let s = solve_a(t).map_err(at(CMD, "solve_a"))?;
        let h = period_h(t, s.a, tol).map_err(at(CMD, "period_h"))?;
        let geom = Geometry::new(t, s.a).map_err(at(CMD, "geometry"))?;
        let ctx = ThetaContext::new(QuotientCurve::new(geom)).map_err(at(CMD, "theta_context"))?;
        Ok((s, h.h, ctx.beta, ctx.tau))
    });
    let t_ss = solve_t_double_star().map_err(at(CMD, "solve_t_double_star"))?;
    let mut table = Table::new(&[
        "t",
        "A",
        "z1",
        "z2_re",
        "z2_im",
        "beta",
        "tau_re",
        "tau_im",
        "h_residual",
    ]);
    let mut a_vals = Vec::new();
    for row in rows {
        let (s, h, beta, tau) = row?;
        a_vals.push(s.a);
        table.push(vec![
            s.t.into(),
            s.a.into(),
            s.branch.z1.into(),
            s.branch.z2.re.into(),
            s.branch.z2.im.into(),
            beta.into(),
            tau.re.into(),
            tau.im.into(),
            h.into(),
        ]);
    }
    let imax = (0..a_vals.len())
        .max_by(|&i, &j| a_vals[i].total_cmp(&a_vals[j]))
        .unwrap_or(0);
    let decreasing = a_vals[imax..].windows(2).all(|w| w[1] < w[0]);
    let json = json!({
        "t_min": cfg.t_min,
        "t_max": cfg.t_max,
        "steps": cfg.steps,
        "tol_quad": tol,
        "t_double_star": t_ss,
        "A_max": a_vals[imax],
        "t_at_A_max": ts[imax],
        "A_decreasing_after_max": decreasing,
        "A_final": a_vals.last().copied(),
    });
    Ok(Report {
        json,
        table,
        plot: None,
    })
}

pub fn whisker(cfg: &RunConfig) -> Result<Report, CliError> {
    const CMD: &str = "whisker";
    let t = cfg.single_t(0.2).map_err(cfg_err(CMD))?;
    supercritical(CMD, t)?;
    let g = Geometry::boutroux(t).map_err(at(CMD, "geometry"))?;
    let hf = g.h_field().map_err(at(CMD, "h_field"))?;
    let interior: Vec<C> = g.upper.points[1..g.upper.points.len() - 1].to_vec();
    let hs = exec::map(Exec::Parallel, &interior, |&p| hf.eval(p));
    let mut max_h: f64 = 0.0;
    for h in hs {
        max_h = max_h.max(h.map_err(at(CMD, "h_eval"))?.abs());
    }
    let conj_err = g
        .upper
        .points
        .iter()
        .zip(&g.lower.points)
        .map(|(u, l)| (u.conj() - l).norm())
        .fold(0.0, f64::max);
    let layers = sigma1_layers(&g);
    let mut table = Table::new(&["arm", "index", "x", "y"]);
    for l in &layers {
        for (i, &(x, y)) in l.pts.iter().enumerate() {
            table.push(vec![l.name.as_str().into(), i.into(), x.into(), y.into()]);
        }
    }
    let beta = g.beta().map_err(at(CMD, "beta"))?;
    let json = json!({
        "t": t,
        "A": g.a,
        "z1": g.z1(),
        "z2": cj(g.sheets.bs.z2),
        "beta": beta,
        "whisker_points": g.upper.len(),
        "whisker_length": g.upper.total_length(),
        "endpoint_approach": g.upper.approach,
        "max_abs_h_along_whisker": max_h,
        "max_abs_h_tracer": g.upper.max_abs_h,
        "conjugation_error": conj_err,
        "boundary_intersections": g.whisker_boundary_intersections(),
    });
    let plot = Plot {
        radius: 1.15 * reach(&g),
        layers,
    };
    Ok(Report {
        json,
        table,
        plot: Some(plot),
    })
}

pub fn droplet(cfg: &RunConfig) -> Result<Report, CliError> {
    const CMD: &str = "droplet";
    let ts = cfg
        .t
        .clone()
        .unwrap_or_else(|| vec![0.125, 0.3, 1.0, 2.0, 3.0, 3.5]);
    let mut table = Table::new(&["t", "theta", "r"]);
    let mut layers = Vec::new();
    let mut summary = Vec::new();
    let mut r_all: f64 = 0.0;
    const COLORS: [&str; 6] = [
        "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02",
    ];
    for (i, &t) in ts.iter().enumerate() {
        let a = default_a(CMD, t)?;
        let b = droplet_boundary(t, a, cfg.grid, Exec::Parallel);
        let res = b
            .theta
            .iter()
            .zip(&b.r)
            .map(|(&th, &r)| droplet_polar(t, a, r, th).abs())
            .fold(0.0, f64::max);
        check_residual(CMD, "droplet radius", res, cfg.tol_root)?;
        let r_max = b.r.iter().copied().fold(0.0, f64::max);
        let r_min = b.r.iter().copied().fold(f64::INFINITY, f64::min);
        r_all = r_all.max(r_max);
        for (&th, &r) in b.theta.iter().zip(&b.r) {
            table.push(vec![t.into(), th.into(), r.into()]);
        }
        let pts = b
            .theta
            .iter()
            .zip(&b.r)
            .map(|(&th, &r)| (r * th.cos(), r * th.sin()))
            .collect();
        layers.push(Layer::new(
            format!("t{i}"),
            LayerKind::Loop,
            COLORS[i % COLORS.len()],
            pts,
        ));
        summary.push(json!({
            "t": t,
            "A": a,
            "area_over_pi": droplet_area_over_pi(t, a, MOMENT_ANGLES, Exec::Parallel),
            "r_min": r_min,
            "r_max": r_max,
            "max_residual": res,
        }));
    }
    let json = json!({ "angles": cfg.grid, "droplets": summary });
    let plot = Plot {
        radius: 1.1 * r_all.max(1e-3),
        layers,
    };
    Ok(Report {
        json,
        table,
        plot: Some(plot),
    })
}

pub fn moments(cfg: &RunConfig) -> Result<Report, CliError> {
    const CMD: &str = "moments";
    let t = cfg.single_t(0.2).map_err(cfg_err(CMD))?;
    supercritical(CMD, t)?;
    let g = Geometry::boutroux(t).map_err(at(CMD, "geometry"))?;
    let mut table = Table::new(&["k", "re", "im", "expected", "residual"]);
    let mut rows = Vec::new();
    for k in 0..=cfg.k_max {
        let m = g
            .harmonic_moment(k, MOMENT_ANGLES, Exec::Parallel)
            .map_err(at(CMD, "harmonic_moment"))?;
        let expected = match k {
            0 => t,
            3 => 1.0,
            _ => 0.0,
        };
        let residual = (m - expected).norm();
        table.push(vec![
            (k as usize).into(),
            m.re.into(),
            m.im.into(),
            expected.into(),
            residual.into(),
        ]);
        rows.push(json!({ "k": k, "moment": cj(m), "expected": expected, "residual": residual }));
    }
    let json = json!({ "t": t, "A": g.a, "angles": MOMENT_ANGLES, "moments": rows });
    Ok(Report {
        json,
        table,
        plot: None,
    })
}

pub fn levelset(cfg: &RunConfig) -> Result<Report, CliError> {
    const CMD: &str = "levelset";
    let t = cfg.single_t(0.2).map_err(cfg_err(CMD))?;
    supercritical(CMD, t)?;
    let g = Geometry::boutroux(t).map_err(at(CMD, "geometry"))?;
    let hf = g.h_field().map_err(at(CMD, "h_field"))?;
    let r = 1.3 * reach(&g);
    // `grid` cells across [-r, r]; centres of [0, r] x [-r, r] inside the
    // sector |arg z| < pi/3.
    let n = cfg.grid;
    let h = 2.0 * r / n as f64;
    let mut cells = Vec::new();
    for i in 0..n / 2 {
        for j in 0..n {
            let z = C::new((i as f64 + 0.5) * h, -r + (j as f64 + 0.5) * h);
            if z.arg().abs() < PI / 3.0 {
                cells.push(z);
            }
        }
    }
    let values = exec::map(Exec::Parallel, &cells, |&z| hf.eval(z).ok());
    let failed = values.iter().filter(|v| v.is_none()).count();
    let mut table = Table::new(&["x", "y", "h", "sign"]);
    let mut layer = Layer::new("sign", LayerKind::Cells(h), "none", Vec::new());
    let (mut pos, mut neg) = (0usize, 0usize);
    for (&z, &v) in cells.iter().zip(&values) {
        let sign = match v {
            Some(x) if x > 0.0 => 1.0,
            Some(x) if x < 0.0 => -1.0,
            _ => 0.0,
        };
        pos += (sign > 0.0) as usize;
        neg += (sign < 0.0) as usize;
        table.push(vec![z.re.into(), z.im.into(), v.into(), sign.into()]);
        layer.pts.push(pt(z));
        layer.values.push(sign);
    }
    let mut layers = vec![layer];
    layers.extend(
        sigma1_layers(&g)
            .into_iter()
            .filter(|l| l.name.ends_with('0')),
    );
    let json = json!({
        "t": t,
        "A": g.a,
        "grid": n,
        "cells": cells.len(),
        "positive": pos,
        "negative": neg,
        "unevaluated": failed,
    });
    Ok(Report {
        json,
        table,
        plot: Some(Plot { radius: r, layers }),
    })
}

pub fn theta(cfg: &RunConfig) -> Result<Report, CliError> {
    const CMD: &str = "theta";
    let t = cfg.single_t(0.2).map_err(cfg_err(CMD))?;
    supercritical(CMD, t)?;
    let ns = cfg.n.clone().unwrap_or_else(|| vec![8, 10, 12, 14]);
    if let Some(n) = ns.iter().find(|&&n| n % 2 == 1) {
        return Err(CliError::config(
            CMD,
            format!("only even n are covered, got {n}"),
        ));
    }
    let ctx = ThetaContext::boutroux(t).map_err(at(CMD, "theta_context"))?;
    let points = test_points(&ctx.qc.geom);
    let mut table = Table::new(&[
        "n",
        "in_n_eps",
        "nu",
        "dist_to_beta_star",
        "sheet",
        "x_n",
        "m11_re",
        "m11_im",
    ]);
    let mut degrees = Vec::new();
    for &n in &ns {
        let admissible = ctx.in_n_epsilon(n, cfg.eps);
        let dist = circle_dist(n as f64 * ctx.beta, ctx.beta_star);
        let spurious = match ctx.spurious_zero(n) {
            Ok(q) => {
                check_residual(
                    CMD,
                    "spurious-zero inversion",
                    circle_dist(q.achieved, q.target),
                    cfg.tol_root,
                )?;
                Some(q)
            }
            Err(Error::NotInIndexSet { .. }) => None,
            Err(e) => return Err(CliError::from_core(CMD, "spurious_zero", e)),
        };
        let mut samples = Vec::new();
        for &z in &points {
            match ctx.m_n11(n, z) {
                Ok(m) => samples.push(json!({ "z": cj(z), "m11": cj(m) })),
                Err(Error::NotInIndexSet { .. }) => {}
                Err(e) => return Err(CliError::from_core(CMD, "m_n11", e)),
            }
        }
        let first = ctx.m_n11(n, points[0]).ok();
        table.push(vec![
            n.into(),
            (admissible as usize).into(),
            ctx.nu(n).into(),
            dist.into(),
            spurious.map_or(Cell::Empty, |q| q.sheet.into()),
            spurious.map(|q| q.x).into(),
            first.map(|m| m.re).into(),
            first.map(|m| m.im).into(),
        ]);
        degrees.push(json!({
            "n": n,
            "in_n_eps": admissible,
            "nu": ctx.nu(n),
            "dist_to_beta_star": dist,
            "spurious_zero": spurious.map(|q| json!({
                "sheet": q.sheet, "w": q.w, "x": q.x, "target": q.target, "achieved": q.achieved,
                "visible": q.sheet == 1,
            })),
            "m11_samples": samples,
        }));
    }
    let json = json!({
        "t": t,
        "A": ctx.qc.a,
        "C": ctx.c,
        "tau": cj(ctx.tau),
        "b_period": cj(ctx.b_period),
        "beta": ctx.beta,
        "beta_star": ctx.beta_star,
        "nu_star": ctx.nu_star(),
        "log2_shift": ctx.log2_shift(),
        "eps": cfg.eps,
        "degrees": degrees,
    });
    Ok(Report {
        json,
        table,
        plot: None,
    })
}

fn zero_residual(p: &MonicPoly, z: C) -> f64 {
    let scale: f64 = p
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm() * z.norm().powi(k as i32))
        .sum();
    if scale == 0.0 {
        return 0.0;
    }
    p.eval(z).norm() / scale
}

pub fn opzeros(cfg: &RunConfig) -> Result<Report, CliError> {
    const CMD: &str = "opzeros";
    let t = cfg.single_t(0.2).map_err(cfg_err(CMD))?;
    let n = cfg.single_n(12).map_err(cfg_err(CMD))?;
    if n % 2 == 1 || n > 16 {
        return Err(CliError::config(
            CMD,
            format!("n must be even and at most 16, got {n}"),
        ));
    }
    let p =
        solve_with(n, t, cfg.tol_quad, Exec::Parallel).map_err(at(CMD, "solve_orthogonality"))?;
    let zeros = poly_zeros(&p);
    let res = zeros
        .iter()
        .map(|&z| zero_residual(&p, z))
        .fold(0.0, f64::max);
    check_residual(CMD, "zero", res, cfg.tol_root)?;
    let poly = json!({
        "coeffs": p.coeffs.iter().map(|&c| cj(c)).collect::<Vec<_>>(),
        "cond": p.cond,
        "ill_conditioned": p.ill_conditioned,
        "moment_residual": p.residual,
        "imag_ratio": p.imag_ratio(),
        "off_class_ratio": p.off_class_ratio(),
        "max_zero_residual": res,
    });
    let mut table = Table::new(&["index", "re", "im", "distance", "near_whisker", "spurious"]);
    let (json, layers, radius) = if t > T_STAR {
        let ctx = ThetaContext::boutroux(t).map_err(at(CMD, "theta_context"))?;
        let r = compare_poly(&ctx, p).map_err(at(CMD, "compare_to_theory"))?;
        for (i, z) in r.zeros.iter().enumerate() {
            table.push(vec![
                i.into(),
                z.re.into(),
                z.im.into(),
                r.distances[i].into(),
                (r.near_whisker[i] as usize).into(),
                (r.spurious[i] as usize).into(),
            ]);
        }
        let g = &ctx.qc.geom;
        let mut layers = sigma1_layers(g);
        let (spur, reg): (Vec<_>, Vec<_>) = (0..r.zeros.len()).partition(|&i| r.spurious[i]);
        let mark = 0.008 * reach(g);
        layers.push(Layer::new(
            "zeros",
            LayerKind::Points(mark),
            "#2166ac",
            reg.iter().map(|&i| pt(r.zeros[i])).collect(),
        ));
        layers.push(Layer::new(
            "spurious",
            LayerKind::Points(mark),
            "#e08214",
            spur.iter().map(|&i| pt(r.zeros[i])).collect(),
        ));
        let far = r.zeros.iter().map(|z| z.norm()).fold(reach(g), f64::max);
        let json = json!({
            "t": t,
            "n": n,
            "A": g.a,
            "polynomial": poly,
            "in_n_eps": ctx.in_n_epsilon(n, cfg.eps),
            "zeros": r.zeros.iter().enumerate().map(|(i, &z)| json!({
                "z": cj(z), "distance": r.distances[i], "near_whisker": r.near_whisker[i], "spurious": r.spurious[i],
            })).collect::<Vec<_>>(),
            "spurious_count": r.spurious_count(),
            "predicted": r.predicted.map(|q| json!({ "sheet": q.sheet, "x": q.x, "w": q.w })),
            "whisker_fraction": r.whisker_fraction,
            "six_beta": 6.0 * ctx.beta,
            "asymptotics": r.asymptotics.iter().map(|a| json!({
                "z": cj(a.z), "scaled": cj(a.scaled), "m11": cj(a.m11), "diff": a.diff, "ratio_err": a.ratio_err,
            })).collect::<Vec<_>>(),
            "max_ratio_err": r.max_ratio_err(),
        });
        (json, layers, 1.15 * far)
    } else {
        // Subcritical: Sigma_1 is the three spines.
        let z1 = 0.75 * (1.0 - (1.0 - 8.0 * t).sqrt()).powf(2.0 / 3.0);
        let d: Vec<f64> = zeros.iter().map(|&z| distance_to_spines(z, z1)).collect();
        for (i, z) in zeros.iter().enumerate() {
            table.push(vec![
                i.into(),
                z.re.into(),
                z.im.into(),
                d[i].into(),
                0usize.into(),
                0usize.into(),
            ]);
        }
        let mut layers: Vec<Layer> = (0..3)
            .map(|j| {
                let e = C::from_polar(z1, 2.0 * PI * j as f64 / 3.0);
                Layer::new(
                    format!("spine{j}"),
                    LayerKind::Line,
                    "black",
                    vec![(0.0, 0.0), pt(e)],
                )
            })
            .collect();
        let far = zeros.iter().map(|z| z.norm()).fold(z1, f64::max);
        layers.push(Layer::new(
            "zeros",
            LayerKind::Points(0.008 * far),
            "#2166ac",
            zeros.iter().map(|&z| pt(z)).collect(),
        ));
        let mean = if d.is_empty() {
            0.0
        } else {
            d.iter().sum::<f64>() / d.len() as f64
        };
        let json = json!({
            "t": t,
            "n": n,
            "z1": z1,
            "polynomial": poly,
            "zeros": zeros.iter().zip(&d).map(|(&z, &d)| json!({ "z": cj(z), "distance": d })).collect::<Vec<_>>(),
            "mean_distance": mean,
            "max_distance": d.iter().copied().fold(0.0, f64::max),
        });
        (json, layers, 1.15 * far.max(1e-3))
    };
    Ok(Report {
        json,
        table,
        plot: Some(Plot { radius, layers }),
    })
}

pub fn perturb(cfg: &RunConfig) -> Result<Report, CliError> {
    const CMD: &str = "perturb";
    let dts = cfg.dt.clone().unwrap_or_else(|| vec![0.02, 0.01, 0.005]);
    let e = solve_elliptic_k().map_err(at(CMD, "solve_elliptic_k"))?;
    check_residual(CMD, "beta period", e.beta_residual.abs(), cfg.tol_root)?;
    let solved = exec::map(Exec::Parallel, &dts, |&dt| solve_a(T_STAR + dt));
    let mut table = Table::new(&[
        "dt", "A", "A_pred", "err_A", "order_A", "z1", "z1_pred", "err_z1", "order_z1",
    ]);
    let mut prev: Option<(f64, f64, f64)> = None;
    let mut rows = Vec::new();
    for (&dt, s) in dts.iter().zip(solved) {
        let s = s.map_err(at(CMD, "solve_a"))?;
        let p = predicted_expansion(&e, dt);
        let (ea, ez) = ((s.a - p.a).abs(), (s.branch.z1 - p.z1).abs());
        let order = |e0: f64, e1: f64, d0: f64| (e0 / e1).ln() / (d0 / dt).ln();
        let (oa, oz) = match prev {
            Some((d0, a0, z0)) => (Some(order(a0, ea, d0)), Some(order(z0, ez, d0))),
            None => (None, None),
        };
        prev = Some((dt, ea, ez));
        table.push(vec![
            dt.into(),
            s.a.into(),
            p.a.into(),
            ea.into(),
            oa.into(),
            s.branch.z1.into(),
            p.z1.into(),
            ez.into(),
            oz.into(),
        ]);
        rows.push(json!({
            "dt": dt, "A": s.a, "A_pred": p.a, "err_A": ea, "order_A": oa,
            "z1": s.branch.z1, "z1_pred": p.z1, "err_z1": ez, "order_z1": oz,
            "z2": cj(s.branch.z2), "z2_pred": cj(p.z2),
        }));
    }
    let l = ltw_comparison(&e);
    let json = json!({
        "k": e.k,
        "x1": e.x1,
        "x2": cj(e.x2),
        "x3": cj(e.x3),
        "beta_residual": e.beta_residual,
        "fingertip": {
            "super_coeff": l.super_coeff,
            "x1_abs": l.x1_abs,
            "super_diff": l.super_diff,
            "sub_coeff": l.sub_coeff,
            "sub_measured": l.sub_measured,
        },
        "expansion": rows,
    });
    Ok(Report {
        json,
        table,
        plot: None,
    })
}
