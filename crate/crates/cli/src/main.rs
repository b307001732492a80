//! `revcut`: cut loci, half-period tables, geodesic traces, and
//! self-verification for cylinders of revolution dt^2 + m(t)^2 dtheta^2.
//!
//! Exit codes: 0 success, 1 check failure (failed verification, audit, or
//! hypothesis verdict), 2 usage or domain error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use revcut_core::cutlocus::{self, CutLocusShape, HypothesisReport};
use revcut_core::geodesic::{shoot, StepControl};
use revcut_core::halfperiod;
use revcut_core::lambda::{self, LambdaParams};
use revcut_core::oracle::{self, OracleConfig, VerificationReport};
use revcut_core::surface::{build_surface, SurfaceModel, SurfacePoint, WarpSpec, DEFAULT_T_MAX_SCAN};
use revcut_core::verify::{run_criterion, CriterionResult, VerifyConfig, CRITERION_COUNT};
use revcut_core::{expr, Error};

const EXIT_CHECK_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "revcut", version, about = "Cut loci on cylinders of revolution")]
struct Cli {
    /// JSON config file with default option values (flags take precedence)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write the result here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone, Default)]
struct SurfaceArgs {
    /// Surface: tamura | lambda:<value> | custom:<expression in t>
    #[arg(long, value_name = "SPEC")]
    surface: Option<String>,

    /// Meridian scan horizon for surface validation
    #[arg(long, value_name = "T")]
    t_max_scan: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate nu, xi(nu), phi(nu), ell(nu) as CSV (plus closed-form
    /// columns for lambda-family surfaces)
    PhiTable {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        nu_min: Option<f64>,
        #[arg(long)]
        nu_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Cut locus of a point as JSON; --audit embeds a brute-force report
    CutLocus {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Base point as `t,theta`
        #[arg(long, value_name = "T,THETA", allow_hyphen_values = true)]
        q: Option<String>,
        /// Cross-check the prediction against the geodesic-fan oracle
        #[arg(long)]
        audit: bool,
        /// Compute the cut locus in the universal cover instead
        #[arg(long)]
        cover: bool,
    },
    /// Integrate one geodesic and emit samples as CSV with an event footer
    Trace {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Start point as `t,theta`
        #[arg(long, value_name = "T,THETA", allow_hyphen_values = true)]
        q: Option<String>,
        /// Launch angle from the meridian direction, radians
        #[arg(long, allow_hyphen_values = true)]
        angle: f64,
        /// Arc length to integrate
        #[arg(long)]
        length: f64,
    },
    /// Run the ten-check verification suite; exit 0 iff every check passes
    Verify {
        /// Seed for the randomized samples
        #[arg(long)]
        seed: Option<u64>,
        /// Multiplier on every tolerance gate (1.0 = nominal)
        #[arg(long)]
        tol: Option<f64>,
        /// Comma-separated subset of check ids (default: all)
        #[arg(long, value_name = "IDS")]
        criteria: Option<String>,
    },
    /// Verify the structure-theorem hypotheses; exit 0 iff they hold
    CheckHypotheses {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Tabulate t, m, m', and Gaussian curvature along a meridian as CSV
    CurvatureProfile {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
}

/// Optional defaults loaded from --config; any command-line flag overrides
/// the corresponding field.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    surface: Option<String>,
    t_max_scan: Option<f64>,
    q: Option<String>,
    nu_min: Option<f64>,
    nu_max: Option<f64>,
    steps: Option<usize>,
    seed: Option<u64>,
    tol: Option<f64>,
    out: Option<PathBuf>,
}

fn load_config(path: &Option<PathBuf>) -> Result<FileConfig, String> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", p.display()))
        }
    }
}

fn parse_surface(spec: &str, t_max_scan: f64) -> Result<SurfaceModel, String> {
    let warp = if spec == "tamura" {
        WarpSpec::Tamura
    } else if let Some(v) = spec.strip_prefix("lambda:") {
        let l: f64 = v.parse().map_err(|_| format!("bad lambda value `{v}`"))?;
        WarpSpec::Lambda(LambdaParams::new(l).map_err(|e| e.to_string())?)
    } else if let Some(src) = spec.strip_prefix("custom:") {
        WarpSpec::Custom(expr::parse(src).map_err(|e| e.to_string())?)
    } else {
        return Err(format!(
            "unknown surface `{spec}` (expected tamura, lambda:<value>, or custom:<expr>)"
        ));
    };
    build_surface(warp, t_max_scan).map_err(|e| e.to_string())
}

fn resolve_surface(args: &SurfaceArgs, cfg: &FileConfig) -> Result<SurfaceModel, String> {
    let spec = args
        .surface
        .clone()
        .or_else(|| cfg.surface.clone())
        .ok_or("missing --surface (or `surface` in the config file)")?;
    let horizon = args.t_max_scan.or(cfg.t_max_scan).unwrap_or(DEFAULT_T_MAX_SCAN);
    parse_surface(&spec, horizon)
}

fn parse_point(text: &str) -> Result<SurfacePoint, String> {
    let (t, theta) = text
        .split_once(',')
        .ok_or_else(|| format!("bad point `{text}` (expected `t,theta`)"))?;
    let t: f64 = t.trim().parse().map_err(|_| format!("bad t in `{text}`"))?;
    let theta: f64 = theta.trim().parse().map_err(|_| format!("bad theta in `{text}`"))?;
    Ok(SurfacePoint::new(t, theta))
}

fn resolve_point(flag: &Option<String>, cfg: &FileConfig) -> Result<SurfacePoint, String> {
    let text = flag
        .clone()
        .or_else(|| cfg.q.clone())
        .ok_or("missing --q (or `q` in the config file)")?;
    parse_point(&text)
}

fn emit(out: &Option<PathBuf>, cfg: &FileConfig, payload: &str) -> Result<(), String> {
    match out.as_ref().or(cfg.out.as_ref()) {
        Some(p) => fs::write(p, payload).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_USAGE)
}

fn cmd_phi_table(
    surface: &SurfaceModel,
    nu_min: Option<f64>,
    nu_max: Option<f64>,
    steps: usize,
) -> Result<String, String> {
    let profile = match (nu_min, nu_max) {
        (Some(lo), Some(hi)) => halfperiod::build_profile(surface, lo, hi, steps),
        (None, None) => halfperiod::default_profile(surface, steps),
        _ => return Err("--nu-min and --nu-max must be given together".into()),
    }
    .map_err(|e| e.to_string())?;
    if profile.is_empty() {
        let report =
            cutlocus::check_hypotheses(surface, &profile).map_err(|e| e.to_string())?;
        return Err(format!(
            "empty nu domain (inf m and m(0) coincide numerically); \
             hypothesis check verdict: {}",
            report.verdict
        ));
    }

    let closed = surface.lambda_params();
    let mut out = String::from(match closed {
        Some(_) => "nu,xi,phi,ell,xi_closed,phi_closed\n",
        None => "nu,xi,phi,ell\n",
    });
    for (i, &nu) in profile.nu_grid.iter().enumerate() {
        out.push_str(&format!(
            "{nu},{},{},{}",
            profile.xi_values[i], profile.phi_values[i], profile.ell_values[i]
        ));
        if let Some(p) = closed {
            let xi_c = lambda::xi_closed(p, nu).map_err(|e| e.to_string())?;
            let phi_c = lambda::phi_closed(p, nu).map_err(|e| e.to_string())?;
            out.push_str(&format!(",{xi_c},{phi_c}"));
        }
        out.push('\n');
    }
    Ok(out)
}

#[derive(Serialize)]
struct CutLocusOutput {
    surface: revcut_core::SurfaceDescriptor,
    q: SurfacePoint,
    cover: bool,
    shape: CutLocusShape,
    hypothesis_report: HypothesisReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    audit: Option<VerificationReport>,
}

fn cmd_cut_locus(
    surface: &SurfaceModel,
    q: SurfacePoint,
    cover: bool,
    audit: bool,
) -> Result<(String, bool), String> {
    let profile = halfperiod::default_profile(surface, 40).map_err(|e| e.to_string())?;
    let hypothesis_report =
        cutlocus::check_hypotheses(surface, &profile).map_err(|e| e.to_string())?;
    let shape = if cover {
        cutlocus::cover_cut_locus(surface, q, &profile)
    } else {
        cutlocus::cut_locus(surface, q, &profile)
    }
    .map_err(|e| e.to_string())?;

    let audit_report = if audit {
        Some(oracle::audit_cut_point(surface, q, &shape, &OracleConfig::default())
            .map_err(|e| e.to_string())?)
    } else {
        None
    };
    let audit_passed = audit_report.as_ref().map_or(true, |r| r.passed);

    let output = CutLocusOutput {
        surface: surface.descriptor(),
        q,
        cover,
        shape,
        hypothesis_report,
        audit: audit_report,
    };
    let json = serde_json::to_string_pretty(&output).map_err(|e| e.to_string())?;
    Ok((json + "\n", audit_passed))
}

fn cmd_trace(
    surface: &SurfaceModel,
    q: SurfacePoint,
    angle: f64,
    length: f64,
) -> Result<String, String> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(format!("--length must be positive and finite, got {length}"));
    }
    let trace = shoot(surface, q, angle, length, &StepControl::default()).map_err(|e| match e {
        Error::StepFailure { s } => format!("integration failed at arc length {s}"),
        other => other.to_string(),
    })?;
    Ok(trace.to_csv())
}

#[derive(Serialize)]
struct VerifyOutput {
    seed: u64,
    tol_scale: f64,
    criteria: Vec<CriterionResult>,
    passed: bool,
}

fn cmd_verify(seed: u64, tol: f64, criteria: &Option<String>) -> Result<(String, bool), String> {
    let ids: Vec<usize> = match criteria {
        None => (1..=CRITERION_COUNT).collect(),
        Some(list) => list
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&id| (1..=CRITERION_COUNT).contains(&id))
                    .ok_or_else(|| format!("bad criterion id `{p}`"))
            })
            .collect::<Result<_, _>>()?,
    };
    let cfg = VerifyConfig { seed, tol_scale: tol };
    let criteria: Vec<CriterionResult> = ids
        .iter()
        .map(|&id| run_criterion(id, &cfg).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let passed = criteria.iter().all(|c| c.passed);
    let output = VerifyOutput { seed, tol_scale: tol, criteria, passed };
    let json = serde_json::to_string_pretty(&output).map_err(|e| e.to_string())?;
    Ok((json + "\n", passed))
}

fn cmd_check_hypotheses(surface: &SurfaceModel, steps: usize) -> Result<(String, bool), String> {
    let profile = halfperiod::default_profile(surface, steps).map_err(|e| e.to_string())?;
    let report = cutlocus::check_hypotheses(surface, &profile).map_err(|e| e.to_string())?;
    let verdict = report.verdict;
    let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    Ok((json + "\n", verdict))
}

fn cmd_curvature_profile(
    surface: &SurfaceModel,
    t_max: f64,
    steps: usize,
) -> Result<String, String> {
    if !(t_max > 0.0) || steps < 2 {
        return Err("need --t-max > 0 and --steps >= 2".into());
    }
    let mut out = String::from("t,m,m_prime,gaussian_curvature\n");
    for i in 0..steps {
        let t = -t_max + 2.0 * t_max * (i as f64) / ((steps - 1) as f64);
        let j = surface.m_jet(t).map_err(|e| e.to_string())?;
        let g = surface.gaussian_curvature(t).map_err(|e| e.to_string())?;
        out.push_str(&format!("{t},{},{},{g}\n", j.v, j.d1));
    }
    Ok(out)
}

fn run(cli: Cli) -> ExitCode {
    let cfg = match load_config(&cli.config) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };

    // Each arm produces the payload plus whether the run counts as a passed
    // check (commands without a pass/fail notion always pass).
    let result: Result<(String, bool), String> = match &cli.cmd {
        Command::PhiTable { surface, nu_min, nu_max, steps } => {
            resolve_surface(surface, &cfg).and_then(|s| {
                let steps = steps.or(cfg.steps).unwrap_or(50);
                cmd_phi_table(
                    &s,
                    nu_min.or(cfg.nu_min),
                    nu_max.or(cfg.nu_max),
                    steps,
                )
                .map(|csv| (csv, true))
            })
        }
        Command::CutLocus { surface, q, audit, cover } => resolve_surface(surface, &cfg)
            .and_then(|s| {
                let q = resolve_point(q, &cfg)?;
                cmd_cut_locus(&s, q, *cover, *audit)
            }),
        Command::Trace { surface, q, angle, length } => {
            resolve_surface(surface, &cfg).and_then(|s| {
                let q = resolve_point(q, &cfg)?;
                cmd_trace(&s, q, *angle, *length).map(|csv| (csv, true))
            })
        }
        Command::Verify { seed, tol, criteria } => {
            let seed = seed.or(cfg.seed).unwrap_or(7);
            let tol = tol.or(cfg.tol).unwrap_or(1.0);
            cmd_verify(seed, tol, criteria)
        }
        Command::CheckHypotheses { surface, steps } => {
            resolve_surface(surface, &cfg).and_then(|s| {
                cmd_check_hypotheses(&s, steps.or(cfg.steps).unwrap_or(40))
            })
        }
        Command::CurvatureProfile { surface, t_max, steps } => resolve_surface(surface, &cfg)
            .and_then(|s| {
                let t_max = t_max.unwrap_or(3.0);
                let steps = steps.or(cfg.steps).unwrap_or(121);
                cmd_curvature_profile(&s, t_max, steps).map(|csv| (csv, true))
            }),
    };

    match result {
        Ok((payload, passed)) => {
            if let Err(e) = emit(&cli.out, &cfg, &payload) {
                return usage_error(&e);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILURE)
            }
        }
        Err(e) => usage_error(&e),
    }
}

fn main() -> ExitCode {
    run(Cli::parse())
}
