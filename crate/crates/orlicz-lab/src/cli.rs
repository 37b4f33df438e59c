//! Command-line front-end.
//!
//! Every subcommand resolves its inputs (compact spec strings, inline JSON,
//! or `@file` references), dispatches to the library, and writes a JSON
//! report with the shape `{inputs_echo, results, certificates_used,
//! timings}`. `sweep` writes CSV instead. Exit codes: 0 when all asserted
//! properties hold, 1 when a report was produced but an assertion failed,
//! 2 for usage or input errors.
//!
//! Compact spec strings are `name:key=value,key=value`, e.g. `power:q=2` for
//! a Young function or `power:p=4,n=2` for a growth function. An argument
//! starting with `@` is read from that file; one starting with `{` or `[` is
//! parsed as inline JSON.

use crate::appendix::{appendix_a_embedding, appendix_b_sandwich};
use crate::compose::{
    box_form, diag_empirical_opnorm, diag_opnorm_lower, dilation_opnorm, measure_dilation_constant,
    necessity_certificate, orthogonal_invariance_check, sufficiency_bound, svd_small,
    DiffeoSample, MapSpec,
};
use crate::domain::{BoxN, SimpleFunction};
use crate::error::{Error, Result};
use crate::growth::{log_spaced, psi_monotonicity, CertifyOptions, GrowthFunction, GrowthSpec,
    PSI_DIRECTION_THRESHOLD};
use crate::indicators::{box_indicator_norm, box_norm_asymptotic, halfcylinder_norm, BoxSpec};
use crate::norms::{
    orlicz_morrey_norm, weak_norm_identity, weak_orlicz_morrey_norm, SearchSpec, WindowKind,
};
use crate::young::{YoungFunction, YoungSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::time::Instant;

/// Resolved invocation: one command plus global knobs.
#[derive(Debug, Parser, Serialize)]
#[command(name = "orlicz-lab", version, about = "Orlicz-Morrey norm laboratory")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Report destination; `-` writes to stdout.
    #[arg(long, global = true, default_value = "-")]
    pub output: String,
    /// Tolerance handed to norm computations and assertions.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for generated test families.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Orlicz-Morrey norm of a simple function.
    Norm(NormArgs),
    /// Weak Orlicz-Morrey norm, with optional identity cross-check.
    WeakNorm(WeakNormArgs),
    /// Closed-form norm of a box indicator.
    IndicatorNorm(IndicatorArgs),
    /// Operator-norm bounds for a composition map.
    OpNorm(OpNormArgs),
    /// Growth-function class certificate.
    CertifyPhi(CertifyPhiArgs),
    /// Young-function certificate and inverse sandwich.
    CertifyYoung(CertifyYoungArgs),
    /// Composition-operator sufficiency bound against a test family.
    CheckSufficiency(SufficiencyArgs),
    /// Per-sample necessity certificate for a sampled map.
    CertifyNecessity(NecessityArgs),
    /// The two worked estimates for the exponential preset.
    Appendix(AppendixArgs),
    /// Batch evaluation over parameter ranges; writes CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowArg {
    Ball,
    Cube,
}

#[derive(Debug, Args, Serialize)]
pub struct NormArgs {
    /// Simple function: JSON cells, @file, or `box:lo,hi[;lo,hi...][*value]`.
    #[arg(long)]
    pub function: String,
    /// Young function spec, e.g. `power:q=2` or `appendix-exp:n=1`.
    #[arg(long)]
    pub young: String,
    /// Growth function spec, e.g. `power:p=4,n=2` or `osc-log:exponent=-1,base=2,amp=1`.
    #[arg(long)]
    pub phi: String,
    /// Window family for the supremum search.
    #[arg(long, value_enum)]
    pub window: Option<WindowArg>,
    /// Full search spec as JSON or @file; overridden by --window.
    #[arg(long)]
    pub search: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct WeakNormArgs {
    #[command(flatten)]
    pub base: NormArgs,
    /// Also verify the level-supremum identity for the weak norm.
    #[arg(long, default_value_t = false)]
    pub check_identity: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct IndicatorArgs {
    /// Bounded side lengths, ascending, comma separated.
    #[arg(long)]
    pub a: String,
    /// Ambient dimension.
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub young: String,
    #[arg(long)]
    pub phi: String,
    /// Also evaluate the closed-form asymptotic in this window index.
    #[arg(long)]
    pub asymptotic_k: Option<u32>,
    /// Also compare against the half-cylinder value 1/phi(a_0) (needs k < n).
    #[arg(long, default_value_t = false)]
    pub halfcylinder: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct OpNormArgs {
    /// Map JSON: {"kind":"diag",...}, {"kind":"perm",...}, {"kind":"affine",...}.
    #[arg(long)]
    pub map: String,
    #[arg(long)]
    pub phi: String,
    /// Young function; enables empirical estimates where applicable.
    #[arg(long)]
    pub young: Option<String>,
    /// Test function for orthogonal invariance (defaults to a unit box).
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long, value_enum)]
    pub window: Option<WindowArg>,
}

#[derive(Debug, Args, Serialize)]
pub struct CertifyPhiArgs {
    #[arg(long)]
    pub phi: String,
    #[arg(long, default_value_t = 1e-6)]
    pub grid_min: f64,
    #[arg(long, default_value_t = 1e6)]
    pub grid_max: f64,
    #[arg(long, default_value_t = 48)]
    pub grid_points: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct CertifyYoungArgs {
    #[arg(long)]
    pub young: String,
    /// Number of sandwich sample points (log spaced over the u-range).
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub u_min: f64,
    #[arg(long, default_value_t = 1e6)]
    pub u_max: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SufficiencyArgs {
    #[arg(long)]
    pub map: String,
    #[arg(long)]
    pub young: String,
    #[arg(long)]
    pub phi: String,
    /// JSON array of simple functions; defaults to a seeded box family.
    #[arg(long)]
    pub functions: Option<String>,
    #[arg(long, value_enum)]
    pub window: Option<WindowArg>,
}

#[derive(Debug, Args, Serialize)]
pub struct NecessityArgs {
    /// Samples JSON: {"samples":[{"x":[...],"jacobian":[[...]]}, ...]}.
    #[arg(long)]
    pub samples: String,
    #[arg(long)]
    pub phi: String,
    /// Acceptance band; defaults to 10x the certified class constants.
    #[arg(long)]
    pub band: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AppendixWhich {
    A,
    B,
}

#[derive(Debug, Args, Serialize)]
pub struct AppendixArgs {
    #[arg(long, value_enum)]
    pub which: AppendixWhich,
    #[arg(long)]
    pub function: Option<String>,
    /// Young function (appendix B only; A uses the exponential preset).
    #[arg(long)]
    pub young: Option<String>,
    /// Growth function (appendix B only; must be bounded).
    #[arg(long)]
    pub phi: Option<String>,
    #[arg(long, value_enum)]
    pub window: Option<WindowArg>,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    /// Which check to sweep: `dilation` or `psi`.
    #[arg(long)]
    pub check: String,
    /// Growth spec for `dilation`.
    #[arg(long)]
    pub phi: Option<String>,
    /// Dilation factors: comma list or `start:stop:count` (log spaced).
    #[arg(long)]
    pub c: Option<String>,
    /// Dimension list for `psi` (Morrey families).
    #[arg(long)]
    pub n_list: Option<String>,
    #[arg(long)]
    pub p_list: Option<String>,
    #[arg(long)]
    pub q_list: Option<String>,
    #[arg(long)]
    pub k_list: Option<String>,
    /// Row cap; exceeding it is a usage error.
    #[arg(long, default_value_t = 100_000)]
    pub cap: usize,
}

// ── Argument parsing helpers ────────────────────────────────────────────────

fn read_payload(arg: &str) -> Result<String> {
    if let Some(path) = arg.strip_prefix('@') {
        Ok(std::fs::read_to_string(path)?)
    } else {
        Ok(arg.to_string())
    }
}

fn compact_to_value(s: &str, kind_aliases: &[(&str, &str)], key_aliases: &[(&str, &str)]) -> Result<Value> {
    let (name, rest) = match s.split_once(':') {
        Some((n, r)) => (n.trim(), r.trim()),
        None => (s.trim(), ""),
    };
    if name.is_empty() {
        return Err(Error::usage(format!("empty spec string {s:?}")));
    }
    let kind = kind_aliases
        .iter()
        .find(|(a, _)| *a == name)
        .map(|(_, k)| *k)
        .unwrap_or(name);
    let mut obj = serde_json::Map::new();
    obj.insert("kind".to_string(), Value::String(kind.to_string()));
    if !rest.is_empty() {
        for pair in rest.split(',') {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::usage(format!("expected key=value in spec, got {pair:?}")))?;
            let key = key_aliases
                .iter()
                .find(|(a, _)| *a == k.trim())
                .map(|(_, full)| *full)
                .unwrap_or(k.trim());
            let v = v.trim();
            let value = if !v.contains(['.', 'e', 'E']) && v.parse::<i64>().is_ok() {
                Value::Number(v.parse::<i64>().unwrap().into())
            } else if let Ok(x) = v.parse::<f64>() {
                serde_json::Number::from_f64(x)
                    .map(Value::Number)
                    .ok_or_else(|| Error::usage(format!("non-finite value in spec: {v}")))?
            } else {
                Value::String(v.to_string())
            };
            obj.insert(key.to_string(), value);
        }
    }
    Ok(Value::Object(obj))
}

fn spec_value(arg: &str, kind_aliases: &[(&str, &str)], key_aliases: &[(&str, &str)]) -> Result<Value> {
    let payload = read_payload(arg)?;
    let trimmed = payload.trim();
    if trimmed.starts_with('{') {
        Ok(serde_json::from_str(trimmed)?)
    } else {
        compact_to_value(trimmed, kind_aliases, key_aliases)
    }
}

pub fn parse_young_arg(arg: &str) -> Result<(YoungFunction, Value)> {
    let v = spec_value(arg, &[("appendix", "appendix-exp"), ("flat", "flat-segment")], &[])?;
    let spec: YoungSpec = serde_json::from_value(v.clone())
        .map_err(|e| Error::usage(format!("bad young spec {arg:?}: {e}")))?;
    Ok((spec.build()?, v))
}

pub fn parse_growth_arg(arg: &str) -> Result<(GrowthFunction, Value)> {
    let v = spec_value(
        arg,
        &[
            ("ball", "ball-power"),
            ("powerlog", "power-log"),
            ("osc", "osc-log"),
            ("constant", "const"),
        ],
        &[("e", "exponent")],
    )?;
    let spec: GrowthSpec = serde_json::from_value(v.clone())
        .map_err(|e| Error::usage(format!("bad growth spec {arg:?}: {e}")))?;
    Ok((spec.build()?, v))
}

pub fn parse_function_arg(arg: &str) -> Result<SimpleFunction> {
    let payload = read_payload(arg)?;
    let trimmed = payload.trim();
    if trimmed.starts_with('[') {
        return SimpleFunction::from_json(trimmed);
    }
    if let Some(rest) = trimmed.strip_prefix("box:") {
        let (bounds_part, value) = match rest.split_once('*') {
            Some((b, v)) => (
                b,
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::usage(format!("bad value after '*' in {arg:?}")))?,
            ),
            None => (rest, 1.0),
        };
        let mut bounds = Vec::new();
        for axis in bounds_part.split(';') {
            let (lo, hi) = axis
                .split_once(',')
                .ok_or_else(|| Error::usage(format!("expected lo,hi per axis in {arg:?}")))?;
            let lo = lo.trim().parse::<f64>().map_err(|_| Error::usage("bad bound"))?;
            let hi = hi.trim().parse::<f64>().map_err(|_| Error::usage("bad bound"))?;
            bounds.push((lo, hi));
        }
        let f = SimpleFunction::indicator(BoxN::from_bounds(&bounds)?);
        return f.scaled(value);
    }
    Err(Error::usage(format!(
        "function must be JSON cells, @file, or box:lo,hi[;...][*value]; got {arg:?}"
    )))
}

fn parse_search(search: &Option<String>, window: &Option<WindowArg>) -> Result<SearchSpec> {
    let mut spec = match search {
        Some(s) => serde_json::from_str(read_payload(s)?.trim())
            .map_err(|e| Error::usage(format!("bad search spec: {e}")))?,
        None => SearchSpec::default(),
    };
    if let Some(w) = window {
        spec.window = match w {
            WindowArg::Ball => WindowKind::Ball,
            WindowArg::Cube => WindowKind::Cube,
        };
    }
    Ok(spec)
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    let t = s.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((a, rest)) = t.split_once(':') {
        let (b, count) = rest
            .split_once(':')
            .ok_or_else(|| Error::usage("range needs start:stop:count"))?;
        let a: f64 = a.trim().parse().map_err(|_| Error::usage("bad range start"))?;
        let b: f64 = b.trim().parse().map_err(|_| Error::usage("bad range stop"))?;
        let count: usize = count.trim().parse().map_err(|_| Error::usage("bad range count"))?;
        if !(a > 0.0 && b > a && a.is_finite() && b.is_finite()) {
            return Err(Error::usage("log range needs 0 < start < stop, finite"));
        }
        return Ok(log_spaced(a, b, count));
    }
    let vals = t
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::usage(format!("bad number {x:?}"))))
        .collect::<Result<Vec<f64>>>()?;
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::usage("list entries must be finite"));
    }
    Ok(vals)
}

fn default_growth_certificate(phi_g: &GrowthFunction) -> Result<Value> {
    let cert = phi_g.certify(&log_spaced(1e-6, 1e6, 48), &CertifyOptions::default())?;
    Ok(serde_json::to_value(&cert)?)
}

fn default_young_certificate(phi_y: &YoungFunction) -> Result<Value> {
    let mut grid = log_spaced(1e-4, 1e4, 60);
    grid.insert(0, 0.0);
    let cert = phi_y.certify(&grid, 1e-9)?;
    Ok(serde_json::to_value(&cert)?)
}

// ── Command handlers ────────────────────────────────────────────────────────

struct CommandOutput {
    results: Value,
    certificates: Value,
    pass: bool,
}

fn cmd_norm(args: &NormArgs, tol: f64) -> Result<CommandOutput> {
    let f = parse_function_arg(&args.function)?;
    let (phi_y, _) = parse_young_arg(&args.young)?;
    let (phi_g, _) = parse_growth_arg(&args.phi)?;
    let search = parse_search(&args.search, &args.window)?;
    let est = orlicz_morrey_norm(&f, &phi_y, &phi_g, &search, tol)?;
    Ok(CommandOutput {
        results: json!({ "estimate": est }),
        certificates: json!({
            "growth": default_growth_certificate(&phi_g)?,
            "young": default_young_certificate(&phi_y)?,
        }),
        pass: true,
    })
}

fn cmd_weak_norm(args: &WeakNormArgs, tol: f64) -> Result<CommandOutput> {
    let f = parse_function_arg(&args.base.function)?;
    let (phi_y, _) = parse_young_arg(&args.base.young)?;
    let (phi_g, _) = parse_growth_arg(&args.base.phi)?;
    let search = parse_search(&args.base.search, &args.base.window)?;
    let weak = weak_orlicz_morrey_norm(&f, &phi_y, &phi_g, &search, tol)?;
    let strong = orlicz_morrey_norm(&f, &phi_y, &phi_g, &search, tol)?;
    let weak_le_strong = weak.value <= strong.value * (1.0 + 1e-9);
    let mut pass = weak_le_strong;
    let identity = if args.check_identity {
        let rep = weak_norm_identity(&f, &phi_y, &phi_g, &search, tol)?;
        pass = pass && rep.relative_gap.abs() <= 1e-6;
        Some(rep)
    } else {
        None
    };
    Ok(CommandOutput {
        results: json!({
            "weak": weak,
            "strong": strong,
            "weak_le_strong": weak_le_strong,
            "identity": identity,
        }),
        certificates: json!({
            "growth": default_growth_certificate(&phi_g)?,
            "young": default_young_certificate(&phi_y)?,
        }),
        pass,
    })
}

fn cmd_indicator(args: &IndicatorArgs, tol: f64) -> Result<CommandOutput> {
    let sides = parse_f64_list(&args.a)?;
    let spec = BoxSpec::new(sides, args.n)?;
    let (phi_y, _) = parse_young_arg(&args.young)?;
    let (phi_g, _) = parse_growth_arg(&args.phi)?;
    let rep = box_indicator_norm(&spec, &phi_y, &phi_g, tol)?;
    let mut pass = true;
    let asymptotic = match args.asymptotic_k {
        Some(k) => {
            let a = box_norm_asymptotic(&spec, &phi_y, &phi_g, k)?;
            pass = pass && a.comparable;
            Some(a)
        }
        None => None,
    };
    let halfcyl = if args.halfcylinder {
        let h = halfcylinder_norm(&spec, &phi_y, &phi_g)?;
        pass = pass && h.comparable;
        Some(h)
    } else {
        None
    };
    let certificates = json!({ "growth": rep.certificate });
    Ok(CommandOutput {
        results: json!({
            "value": rep.value,
            "argmax_scale": rep.argmax_scale,
            "regime": rep.regime,
            "details": rep,
            "asymptotic": asymptotic,
            "halfcylinder": halfcyl,
        }),
        certificates,
        pass,
    })
}

fn cmd_op_norm(args: &OpNormArgs, tol: f64) -> Result<CommandOutput> {
    let map_spec: MapSpec = serde_json::from_str(read_payload(&args.map)?.trim())
        .map_err(|e| Error::usage(format!("bad map spec: {e}")))?;
    let map = map_spec.build()?;
    let (phi_g, _) = parse_growth_arg(&args.phi)?;
    let young = match &args.young {
        Some(y) => Some(parse_young_arg(y)?.0),
        None => None,
    };
    let n = map.dim();
    let mut pass = true;

    let uniform_scale = box_form(&map).and_then(|bf| {
        let c = bf.scale[0].abs();
        let uniform = bf.scale.iter().all(|s| (s.abs() - c).abs() <= 1e-12 * c)
            && bf.axis.iter().enumerate().all(|(i, &j)| i == j);
        (uniform && c > 0.0).then_some(c)
    });
    let diag_entries = box_form(&map).and_then(|bf| {
        let diag = bf.axis.iter().enumerate().all(|(i, &j)| i == j)
            && bf.scale.iter().all(|s| *s > 0.0);
        diag.then(|| bf.scale.clone())
    });
    let orthogonal = map.a.orthogonality_residual() <= 1e-10;

    let mut results = serde_json::Map::new();
    let mut certificates = serde_json::Map::new();
    results.insert("k_measure".into(), json!(measure_dilation_constant(&map)?));
    let svd = svd_small(&map.a)?;
    results.insert("singular_values".into(), json!(svd.sigma));

    if let Some(c) = uniform_scale {
        let rep = dilation_opnorm(&phi_g, c, &log_spaced(1e-6, 1e6, 400))?;
        results.insert("dilation".into(), serde_json::to_value(&rep)?);
    }
    if let Some(d) = diag_entries {
        let empirical = match &young {
            Some(y) => Some(diag_empirical_opnorm(&d, y, &phi_g)?),
            None => None,
        };
        let lower = diag_opnorm_lower(&phi_g, &d, empirical.as_ref().map(|e| e.max_ratio))?;
        pass = pass && lower.pass.unwrap_or(true);
        certificates.insert("growth".into(), serde_json::to_value(&lower.certificate)?);
        results.insert("diag_lower".into(), serde_json::to_value(&lower)?);
        results.insert("empirical".into(), serde_json::to_value(&empirical)?);
    } else if orthogonal {
        let y = young
            .as_ref()
            .ok_or_else(|| Error::usage("orthogonal invariance check needs --young"))?;
        let f = match &args.function {
            Some(s) => parse_function_arg(s)?,
            None => {
                let bounds: Vec<(f64, f64)> = (0..n).map(|i| (0.0, 1.0 + i as f64)).collect();
                SimpleFunction::indicator(BoxN::from_bounds(&bounds)?)
            }
        };
        let search = parse_search(&None, &args.window)?;
        let rep = orthogonal_invariance_check(&map.a, &f, y, &phi_g, &search, None)?;
        pass = pass && rep.pass;
        results.insert("orthogonal".into(), serde_json::to_value(&rep)?);
        certificates.insert("growth".into(), default_growth_certificate(&phi_g)?);
    } else {
        // General affine map: report the theoretical upper bound.
        let cert = phi_g.certify(&log_spaced(1e-6, 1e6, 48), &CertifyOptions::default())?;
        if !cert.in_g1_dec() {
            return Err(Error::precondition(
                "upper bound needs an almost-decreasing submultiplicative growth function",
            ));
        }
        let lip = map.lipschitz()?;
        let k = measure_dilation_constant(&map)?;
        let bound = k
            * (cert.almost_decreasing.value
                + cert.submultiplicative.value * phi_g.eval(lip)? * lip.powi(n as i32));
        results.insert("lipschitz".into(), json!(lip));
        results.insert("upper_bound".into(), json!(bound));
        certificates.insert("growth".into(), serde_json::to_value(&cert)?);
    }
    let _ = tol;
    Ok(CommandOutput {
        results: Value::Object(results),
        certificates: Value::Object(certificates),
        pass,
    })
}

fn cmd_certify_phi(args: &CertifyPhiArgs) -> Result<CommandOutput> {
    let (phi_g, _) = parse_growth_arg(&args.phi)?;
    if !(args.grid_min > 0.0 && args.grid_max > args.grid_min) || args.grid_points < 3 {
        return Err(Error::usage("grid needs 0 < min < max and at least 3 points"));
    }
    let grid = log_spaced(args.grid_min, args.grid_max, args.grid_points);
    let cert = phi_g.certify(&grid, &CertifyOptions::default())?;
    let doubling = cert.doubling_constants().ok();
    let results = json!({
        "certificate": cert,
        "in_g_dec": cert.in_g_dec(),
        "in_g1_dec": cert.in_g1_dec(),
        "in_g2_dec": cert.in_g2_dec(),
        "doubling": doubling,
    });
    let certificates = json!({ "growth": cert });
    Ok(CommandOutput {
        results,
        certificates,
        pass: true,
    })
}

fn cmd_certify_young(args: &CertifyYoungArgs) -> Result<CommandOutput> {
    let (phi_y, _) = parse_young_arg(&args.young)?;
    if !(args.u_min > 0.0 && args.u_max > args.u_min) || args.samples < 3 {
        return Err(Error::usage("sandwich needs 0 < u_min < u_max and >= 3 samples"));
    }
    let us = log_spaced(args.u_min, args.u_max, args.samples);
    let sandwich = phi_y.verify_inverse_sandwich(&us, 1e-9)?;
    let mut grid = log_spaced(1e-4, 1e4, 80);
    grid.insert(0, 0.0);
    let cert = phi_y.certify(&grid, 1e-9)?;
    let pass = sandwich.passed() && cert.passed();
    Ok(CommandOutput {
        results: json!({
            "sandwich": sandwich,
            "certificate": cert,
        }),
        certificates: json!({ "young": cert }),
        pass,
    })
}

fn default_test_family(n: usize, seed: u64) -> Result<Vec<SimpleFunction>> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut fns = Vec::new();
    let unit: Vec<(f64, f64)> = (0..n).map(|_| (0.0, 1.0)).collect();
    fns.push(SimpleFunction::indicator(BoxN::from_bounds(&unit)?));
    for _ in 0..3 {
        let bounds: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let lo = rng.gen_range(-4.0..4.0);
                let len = rng.gen_range(0.5..4.0);
                (lo, lo + len)
            })
            .collect();
        let value = rng.gen_range(0.5..4.0);
        fns.push(SimpleFunction::indicator(BoxN::from_bounds(&bounds)?).scaled(value)?);
    }
    Ok(fns)
}

fn cmd_sufficiency(args: &SufficiencyArgs, tol: f64, seed: u64) -> Result<CommandOutput> {
    let map_spec: MapSpec = serde_json::from_str(read_payload(&args.map)?.trim())
        .map_err(|e| Error::usage(format!("bad map spec: {e}")))?;
    let map = map_spec.build()?;
    let (phi_y, _) = parse_young_arg(&args.young)?;
    let (phi_g, _) = parse_growth_arg(&args.phi)?;
    let fns: Vec<SimpleFunction> = match &args.functions {
        Some(s) => {
            let v: Value = serde_json::from_str(read_payload(s)?.trim())?;
            let arr = v
                .as_array()
                .ok_or_else(|| Error::usage("functions must be a JSON array"))?;
            arr.iter()
                .map(|e| SimpleFunction::from_json(&e.to_string()))
                .collect::<Result<Vec<_>>>()?
        }
        None => default_test_family(map.dim(), seed)?,
    };
    let search = parse_search(&None, &args.window)?;
    let rep = sufficiency_bound(&map, &phi_y, &phi_g, &fns, &search, tol.max(1e-10))?;
    let pass = rep.pass;
    let certificates = json!({ "growth": rep.certificate });
    Ok(CommandOutput {
        results: serde_json::to_value(&rep)?,
        certificates,
        pass,
    })
}

fn cmd_necessity(args: &NecessityArgs) -> Result<CommandOutput> {
    let samples: DiffeoSample = serde_json::from_str(read_payload(&args.samples)?.trim())
        .map_err(|e| Error::usage(format!("bad samples: {e}")))?;
    let (phi_g, _) = parse_growth_arg(&args.phi)?;
    let rep = necessity_certificate(&samples, &phi_g, args.band)?;
    let pass = rep.pass;
    let certificates = json!({ "growth": rep.certificate });
    Ok(CommandOutput {
        results: serde_json::to_value(&rep)?,
        certificates,
        pass,
    })
}

fn cmd_appendix(args: &AppendixArgs, tol: f64) -> Result<CommandOutput> {
    let search = parse_search(&None, &args.window)?;
    match args.which {
        AppendixWhich::A => {
            let f = match &args.function {
                Some(s) => parse_function_arg(s)?,
                None => SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0)])?).scaled(0.25)?,
            };
            let rep = appendix_a_embedding(&f, &search)?;
            let pass = rep.pass;
            let young = YoungFunction::appendix_exp(f.dim() as u32)?;
            Ok(CommandOutput {
                results: serde_json::to_value(&rep)?,
                certificates: json!({ "young": default_young_certificate(&young)? }),
                pass,
            })
        }
        AppendixWhich::B => {
            let f = match &args.function {
                Some(s) => parse_function_arg(s)?,
                None => SimpleFunction::indicator(BoxN::from_bounds(&[(0.0, 1.0)])?),
            };
            let (phi_y, _) = match &args.young {
                Some(y) => parse_young_arg(y)?,
                None => (YoungFunction::power(2.0)?, json!(null)),
            };
            let (phi_g, _) = match &args.phi {
                Some(p) => parse_growth_arg(p)?,
                None => (GrowthFunction::osc_log(0.0, 2.0, 1.0)?, json!(null)),
            };
            let rep = appendix_b_sandwich(&f, &phi_y, &phi_g, &search, tol.max(1e-6))?;
            let pass = rep.pass;
            Ok(CommandOutput {
                results: serde_json::to_value(&rep)?,
                certificates: json!({ "young": default_young_certificate(&phi_y)? }),
                pass,
            })
        }
    }
}

// ── Sweeps ──────────────────────────────────────────────────────────────────

fn fmt_f64(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{x:.1}")
    } else {
        format!("{x}")
    }
}

fn sweep_csv(args: &SweepArgs) -> Result<String> {
    match args.check.as_str() {
        "dilation" => {
            let phi_arg = args
                .phi
                .as_ref()
                .ok_or_else(|| Error::usage("sweep dilation needs --phi"))?;
            let (phi_g, _) = parse_growth_arg(phi_arg)?;
            let cs = parse_f64_list(args.c.as_deref().unwrap_or(""))?;
            if cs.len() > args.cap {
                return Err(Error::usage(format!(
                    "sweep size {} exceeds cap {}",
                    cs.len(),
                    args.cap
                )));
            }
            let grid = log_spaced(1e-6, 1e6, 200);
            let rows: Vec<Result<String>> = cs
                .par_iter()
                .map(|&c| {
                    let rep = dilation_opnorm(&phi_g, c, &grid)?;
                    Ok(format!(
                        "{},{},{},{}\n",
                        fmt_f64(c),
                        fmt_f64(rep.lower),
                        fmt_f64(rep.upper),
                        fmt_f64(rep.phi_c)
                    ))
                })
                .collect();
            let mut out = String::from("c,lower,upper,phi_c\n");
            for r in rows {
                out.push_str(&r?);
            }
            Ok(out)
        }
        "psi" => {
            let ns = parse_f64_list(args.n_list.as_deref().unwrap_or(""))?;
            let ps = parse_f64_list(args.p_list.as_deref().unwrap_or(""))?;
            let qs = parse_f64_list(args.q_list.as_deref().unwrap_or(""))?;
            let ks = parse_f64_list(args.k_list.as_deref().unwrap_or(""))?;
            let total = ns.len() * ps.len() * qs.len() * ks.len();
            if total > args.cap {
                return Err(Error::usage(format!(
                    "sweep size {total} exceeds cap {}",
                    args.cap
                )));
            }
            let mut combos = Vec::with_capacity(total);
            for &n in &ns {
                for &p in &ps {
                    for &q in &qs {
                        for &k in &ks {
                            combos.push((n, p, q, k));
                        }
                    }
                }
            }
            let rows: Vec<Result<String>> = combos
                .par_iter()
                .map(|&(n, p, q, k)| {
                    if n < 1.0 || n.fract() != 0.0 || k < 1.0 || k.fract() != 0.0 {
                        return Err(Error::usage("n and k must be positive integers"));
                    }
                    let phi_g = GrowthFunction::morrey(n as usize, p)?;
                    let phi_y = YoungFunction::power(q)?;
                    let profile = psi_monotonicity(
                        &phi_g,
                        &phi_y,
                        k as u32,
                        &[0.25, 1.0, 4.0],
                        &log_spaced(1e-6, 1e6, 36),
                        PSI_DIRECTION_THRESHOLD,
                    )?;
                    let dir = serde_json::to_value(profile.direction)?;
                    Ok(format!(
                        "{},{},{},{},{},{},{}\n",
                        fmt_f64(n),
                        fmt_f64(p),
                        fmt_f64(q),
                        fmt_f64(k),
                        dir.as_str().unwrap_or("unknown"),
                        fmt_f64(profile.increasing_constant),
                        fmt_f64(profile.decreasing_constant)
                    ))
                })
                .collect();
            let mut out =
                String::from("n,p,q,k,direction,increasing_constant,decreasing_constant\n");
            for r in rows {
                out.push_str(&r?);
            }
            Ok(out)
        }
        other => Err(Error::usage(format!(
            "unknown sweep check {other:?}; expected dilation or psi"
        ))),
    }
}

// ── Entry point ─────────────────────────────────────────────────────────────

/// Applies the `ORLICZ_LAB_THREADS` cap to the global thread pool.
pub fn apply_thread_cap() -> Result<()> {
    match std::env::var("ORLICZ_LAB_THREADS") {
        Ok(s) => {
            let k: usize = s
                .trim()
                .parse()
                .map_err(|_| Error::usage(format!("ORLICZ_LAB_THREADS must be a positive integer, got {s:?}")))?;
            if k == 0 {
                return Err(Error::usage("ORLICZ_LAB_THREADS must be at least 1"));
            }
            // Ignore the error if a pool was already installed.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            Ok(())
        }
        Err(_) => Ok(()),
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Norm(_) => "norm",
        Command::WeakNorm(_) => "weak-norm",
        Command::IndicatorNorm(_) => "indicator-norm",
        Command::OpNorm(_) => "op-norm",
        Command::CertifyPhi(_) => "certify-phi",
        Command::CertifyYoung(_) => "certify-young",
        Command::CheckSufficiency(_) => "check-sufficiency",
        Command::CertifyNecessity(_) => "certify-necessity",
        Command::Appendix(_) => "appendix",
        Command::Sweep(_) => "sweep",
    }
}

fn command_args_value(cmd: &Command) -> Result<Value> {
    Ok(match cmd {
        Command::Norm(a) => serde_json::to_value(a)?,
        Command::WeakNorm(a) => serde_json::to_value(a)?,
        Command::IndicatorNorm(a) => serde_json::to_value(a)?,
        Command::OpNorm(a) => serde_json::to_value(a)?,
        Command::CertifyPhi(a) => serde_json::to_value(a)?,
        Command::CertifyYoung(a) => serde_json::to_value(a)?,
        Command::CheckSufficiency(a) => serde_json::to_value(a)?,
        Command::CertifyNecessity(a) => serde_json::to_value(a)?,
        Command::Appendix(a) => serde_json::to_value(a)?,
        Command::Sweep(a) => serde_json::to_value(a)?,
    })
}

fn write_output(path: &str, content: &str) -> Result<()> {
    if path == "-" {
        print!("{content}");
        Ok(())
    } else {
        std::fs::write(path, content)?;
        Ok(())
    }
}

/// Runs one resolved configuration and returns the process exit code.
pub fn run(config: &RunConfig) -> i32 {
    if let Err(e) = apply_thread_cap() {
        eprintln!("{e}");
        return 2;
    }
    if !(config.tol > 0.0 && config.tol.is_finite()) {
        eprintln!("usage error: tol must be positive and finite");
        return 2;
    }
    let started = Instant::now();

    if let Command::Sweep(args) = &config.command {
        return match sweep_csv(args) {
            Ok(csv) => match write_output(&config.output, &csv) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("{e}");
                    2
                }
            },
            Err(e) => {
                eprintln!("{e}");
                2
            }
        };
    }

    let outcome = match &config.command {
        Command::Norm(a) => cmd_norm(a, config.tol),
        Command::WeakNorm(a) => cmd_weak_norm(a, config.tol),
        Command::IndicatorNorm(a) => cmd_indicator(a, config.tol),
        Command::OpNorm(a) => cmd_op_norm(a, config.tol),
        Command::CertifyPhi(a) => cmd_certify_phi(a),
        Command::CertifyYoung(a) => cmd_certify_young(a),
        Command::CheckSufficiency(a) => cmd_sufficiency(a, config.tol, config.seed),
        Command::CertifyNecessity(a) => cmd_necessity(a),
        Command::Appendix(a) => cmd_appendix(a, config.tol),
        Command::Sweep(_) => unreachable!(),
    };
    match outcome {
        Ok(out) => {
            let echo = match command_args_value(&config.command) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("{e}");
                    return 2;
                }
            };
            let report = json!({
                "inputs_echo": {
                    "command": command_name(&config.command),
                    "args": echo,
                    "tol": config.tol,
                    "seed": config.seed,
                },
                "results": out.results,
                "certificates_used": out.certificates,
                "timings": { "total_ms": started.elapsed().as_millis() as u64 },
            });
            let mut text = match serde_json::to_string_pretty(&report) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("{e}");
                    return 2;
                }
            };
            text.push('\n');
            if let Err(e) = write_output(&config.output, &text) {
                eprintln!("{e}");
                return 2;
            }
            if out.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("{e}");
            2
        }
    }
}
