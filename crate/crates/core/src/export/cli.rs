//! `bicons` command line. Exit status: 0 when every requested check
//! passes, 1 when a check fails (the failing identity is named on stderr)
//! or a computation errors, 2 on a bad configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use super::{
    audit_mesh, auto_vmax, build_mesh, export_profile, mesh_grids, mesh_obj, report_path, to_sorted_json, write_atomic,
    write_json, ProfileFormat,
};
use crate::extrinsic::{glue_profiles, glue_slope_closed_form, gluing_gap, CaseParams};
use crate::intrinsic::{completeness_certificate, shape_and_codazzi, xi01, IntrinsicParams};
use crate::models::CaseTag;
use crate::verify::{run_suites, GridConfig};

#[derive(Parser, Debug, Clone)]
#[command(name = "bicons", version, about = "Complete biconservative surfaces in H3: construction, audit and export")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Family {
    /// extrinsic family constant C̃
    #[arg(long, allow_negative_numbers = true, conflicts_with = "cminus1")]
    pub ctilde: Option<f64>,
    /// intrinsic family constant C₋₁ = (3^{3/4}/16)·C̃
    #[arg(long, allow_negative_numbers = true)]
    pub cminus1: Option<f64>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// κ₀₁ / ξ₀₁ and related constants (a table when no constant is given)
    Roots {
        #[command(flatten)]
        family: Family,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the glued profile curve to CSV or SVG
    Profile {
        #[command(flatten)]
        family: Family,
        /// samples per branch
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(8..))]
        grid: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Glue the two branches and check the gluing conditions
    Glue {
        #[command(flatten)]
        family: Family,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(8..))]
        grid: u32,
        /// gap allowed between the branches at G
        #[arg(long, default_value_t = 1e-8)]
        tol_gap: f64,
        /// distance allowed between the end samples and the ideal endpoints
        #[arg(long, default_value_t = 1e-9)]
        tol_closure: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Triangulate both branch surfaces (half-space coordinates) to OBJ
    Mesh {
        #[command(flatten)]
        family: Family,
        /// nodes per parameter direction and branch
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(8..))]
        grid: u32,
        /// |v| range; full circles for C̃ > 0 and 1.5 otherwise when omitted
        #[arg(long)]
        vmax: Option<f64>,
        #[arg(long, default_value_t = 1e-7)]
        tol_weld: f64,
        /// allowed hyperboloid residual of vertices mapped back
        #[arg(long, default_value_t = 1e-6)]
        tol_vertex: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every finite-difference residual suite
    Verify {
        #[command(flatten)]
        family: Family,
        /// rows of each branch grid (at least 19)
        #[arg(long, default_value_t = 61, value_parser = clap::value_parser!(u32).range(8..))]
        grid: u32,
        #[arg(long, default_value_t = 2001)]
        profile_samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Completeness certificate, curvature and shape checks of the metric
    Intrinsic {
        #[command(flatten)]
        family: Family,
        #[arg(long, default_value_t = 10.0)]
        omega_max: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Serialize)]
struct Report {
    params: BTreeMap<String, Value>,
    suites: BTreeMap<String, Value>,
    artifacts: Vec<String>,
    version: &'static str,
}

impl Report {
    fn new(config: Value) -> Self {
        let mut params = BTreeMap::new();
        params.insert("config".to_string(), config);
        Report {
            params,
            suites: BTreeMap::new(),
            artifacts: Vec::new(),
            version: crate::VERSION,
        }
    }

    fn param(&mut self, k: &str, v: impl Serialize) {
        self.params.insert(k.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    fn suite(&mut self, k: &str, pass: bool, detail: impl Serialize) {
        let mut v = serde_json::to_value(detail).unwrap_or(Value::Null);
        match v.as_object_mut() {
            Some(o) => {
                o.insert("pass".into(), Value::Bool(pass));
            }
            None => v = json!({ "value": v, "pass": pass }),
        }
        self.suites.insert(k.to_string(), v);
    }

    fn failing(&self) -> Vec<&str> {
        self.suites
            .iter()
            .filter(|(_, v)| v.get("pass") == Some(&Value::Bool(false)))
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

enum Failure {
    Config(String),
    Run(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Run(e.to_string())
    }
}

type Outcome = std::result::Result<Report, Failure>;

fn c_tilde_of(f: &Family) -> std::result::Result<f64, Failure> {
    match (f.ctilde, f.cminus1) {
        (Some(c), None) => Ok(c),
        (None, Some(c)) => Ok(16.0 * c / 3f64.powf(0.75)),
        _ => Err(Failure::Config("exactly one of --ctilde, --cminus1 is required".into())),
    }
}

fn c_minus1_of(f: &Family) -> std::result::Result<f64, Failure> {
    Ok(c_tilde_of(f)? * 3f64.powf(0.75) / 16.0)
}

fn check_finite(name: &str, v: f64) -> std::result::Result<(), Failure> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Config(format!("--{name} must be finite")))
    }
}

fn family_params(report: &mut Report, p: &CaseParams) {
    report.param("c_tilde", p.c_tilde);
    report.param("c_minus1", p.c_minus1());
    report.param("case", p.tag);
    report.param("kappa01", p.kappa01);
    report.param("kappa00", p.kappa00);
    report.param("mu01", p.mu01);
    report.param("mu0m1", p.mu0m1);
}

fn artifact(report: &mut Report, path: &Path) {
    report.artifacts.push(path.display().to_string());
}

fn roots(family: &Family) -> Outcome {
    let mut report = Report::new(serde_json::to_value(family)?);
    let mut rows = Vec::new();
    match (family.ctilde, family.cminus1) {
        (Some(_), Some(_)) => return Err(Failure::Config("give only one family constant".into())),
        (Some(c), None) => {
            check_finite("ctilde", c)?;
            let p = CaseParams::new(c)?;
            println!("kappa01 = {:.12}", p.kappa01);
            println!("mu01 = {:.12}", p.mu01);
            println!("mu0m1 = {:.12}", p.mu0m1);
            println!("c_minus1 = {:.12}", p.c_minus1());
            println!("xi01 = {:.12}", xi01(p.c_minus1())?);
            family_params(&mut report, &p);
            report.param("xi01", xi01(p.c_minus1())?);
        }
        (None, Some(c)) => {
            check_finite("cminus1", c)?;
            let ip = IntrinsicParams::new(c)?;
            println!("xi01 = {:.12}", ip.xi01);
            println!("rho1 = {:.12}", ip.rho1);
            report.param("c_minus1", c);
            report.param("xi01", ip.xi01);
            report.param("xi00", ip.xi00);
            report.param("rho1", ip.rho1);
        }
        (None, None) => {
            println!("{:>8} {:>16} {:>16} {:>16}", "C", "kappa01(C~=C)", "xi01(C-1=C)", "rho1(C-1=C)");
            for c in [-1.0, 0.0, 1.0] {
                let k = CaseParams::new(c)?.kappa01;
                let ip = IntrinsicParams::new(c)?;
                println!("{c:>8} {k:>16.12} {:>16.12} {:>16.12}", ip.xi01, ip.rho1);
                rows.push(json!({ "c": c, "kappa01": k, "xi01": ip.xi01, "rho1": ip.rho1 }));
            }
            report.param("table", rows);
        }
    }
    Ok(report)
}

fn glue_report(report: &mut Report, p: &CaseParams, n: usize, tol_gap: f64, tol_closure: f64) -> std::result::Result<crate::extrinsic::GluedProfile, Failure> {
    let g = glue_profiles(p, n)?;
    let gap = gluing_gap(p)?;
    let worst = gap.at_g.max(gap.extrapolated);
    report.suite(
        "gap_at_g",
        worst < tol_gap,
        json!({ "max": worst, "direct": gap.at_g, "extrapolated": gap.extrapolated, "tol": tol_gap, "approach": gap.approach, "rate": gap.rate }),
    );
    let dm = &g.derivative_match;
    report.suite("derivative_match", dm.passes(), dm);
    if p.tag == CaseTag::Positive {
        let cf = glue_slope_closed_form(p)?;
        let err = (dm.branch1[0] - cf).abs().max((dm.branch2[0] - cf).abs());
        report.suite("slope_closed_form", err < 1e-6, json!({ "closed_form": cf, "max": err, "tol": 1e-6 }));
    }
    report.suite("simple", g.is_simple(), json!({ "self_intersection": g.self_intersection }));
    report.suite("upper_half_plane", g.min_y() > 0.0, json!({ "min_y": g.min_y() }));
    report.suite(
        "closed",
        g.closure_gap < tol_closure,
        json!({ "closure_gap": g.closure_gap, "tol": tol_closure, "ideal_endpoints": g.ideal_endpoints }),
    );
    let refl = g.reflection_defect(p);
    report.suite("reflection_symmetry", refl < 1e-9, json!({ "max": refl, "tol": 1e-9 }));
    report.param("gluing_point", g.gluing_point);
    report.param("glue_slope", g.glue_slope);
    report.param("samples", g.samples.len());
    Ok(g)
}

fn run_command(cmd: &Command) -> Outcome {
    match cmd {
        Command::Roots { family, out } => {
            let report = roots(family)?;
            if let Some(path) = out {
                write_json(&report, path)?;
            }
            Ok(report)
        }
        Command::Profile { family, grid, out } => {
            let c = c_tilde_of(family)?;
            check_finite("ctilde", c)?;
            let format = ProfileFormat::from_path(out).map_err(|e| Failure::Config(e.to_string()))?;
            let p = CaseParams::new(c)?;
            let mut report = Report::new(json!({ "command": "profile", "family": family, "grid": grid, "out": out }));
            family_params(&mut report, &p);
            let g = glue_profiles(&p, *grid as usize)?;
            export_profile(&g, format, out)?;
            artifact(&mut report, out);
            report.param("samples", g.samples.len());
            report.param("gluing_point", g.gluing_point);
            write_report(&mut report, out)?;
            Ok(report)
        }
        Command::Glue {
            family,
            grid,
            tol_gap,
            tol_closure,
            out,
        } => {
            let c = c_tilde_of(family)?;
            check_finite("ctilde", c)?;
            let format = out
                .as_ref()
                .map(|o| ProfileFormat::from_path(o).map_err(|e| Failure::Config(e.to_string())))
                .transpose()?;
            let p = CaseParams::new(c)?;
            let mut report = Report::new(json!({
                "command": "glue", "family": family, "grid": grid, "tol_gap": tol_gap,
                "tol_closure": tol_closure, "out": out
            }));
            family_params(&mut report, &p);
            let g = glue_report(&mut report, &p, *grid as usize, *tol_gap, *tol_closure)?;
            if let (Some(path), Some(fmt)) = (out, format) {
                export_profile(&g, fmt, path)?;
                artifact(&mut report, path);
                write_report(&mut report, path)?;
            }
            Ok(report)
        }
        Command::Mesh {
            family,
            grid,
            vmax,
            tol_weld,
            tol_vertex,
            out,
        } => {
            let c = c_tilde_of(family)?;
            check_finite("ctilde", c)?;
            if let Some(v) = vmax {
                if !(v.is_finite() && *v > 0.0) {
                    return Err(Failure::Config("--vmax must be positive".into()));
                }
            }
            let p = CaseParams::new(c)?;
            let v_max = vmax.unwrap_or_else(|| auto_vmax(p.tag));
            let mut report = Report::new(json!({
                "command": "mesh", "family": family, "grid": grid, "vmax": v_max,
                "tol_weld": tol_weld, "tol_vertex": tol_vertex, "out": out
            }));
            family_params(&mut report, &p);
            let n = *grid as usize;
            let grids = mesh_grids(&p, n, n, v_max, 1e-3)?;
            let mesh = build_mesh(&grids, *tol_weld)?;
            let audit = audit_mesh(&mesh)?;
            write_atomic(out, mesh_obj(&mesh).as_bytes())?;
            artifact(&mut report, out);
            report.suite("watertight_seam", audit.watertight_at_seam(), &audit);
            report.suite(
                "vertices_on_hyperboloid",
                audit.max_hyperboloid_residual < *tol_vertex,
                json!({ "max": audit.max_hyperboloid_residual, "tol": tol_vertex }),
            );
            report.suite("positive_height", audit.min_height > 0.0, json!({ "min_height": audit.min_height }));
            write_report(&mut report, out)?;
            Ok(report)
        }
        Command::Verify {
            family,
            grid,
            profile_samples,
            out,
        } => {
            let c = c_tilde_of(family)?;
            check_finite("ctilde", c)?;
            if *grid < 19 {
                return Err(Failure::Config("--grid must be at least 19 for the frame suites".into()));
            }
            if *profile_samples < 8 {
                return Err(Failure::Config("--profile-samples must be at least 8".into()));
            }
            let p = CaseParams::new(c)?;
            let cfg = GridConfig {
                na: *grid as usize,
                ..GridConfig::default()
            };
            let mut report = Report::new(json!({
                "command": "verify", "family": family, "grid": cfg, "profile_samples": profile_samples, "out": out
            }));
            family_params(&mut report, &p);
            let v = run_suites(&p, &cfg, *profile_samples)?;
            for s in &v.suites {
                report.suite(&s.name, s.ok(), s);
            }
            report.suite("seam", v.seam.pass, &v.seam);
            report.param("coefficient", v.coefficient);
            report.param("coefficient_arbitration", &v.arbitration);
            glue_report(&mut report, &p, 200, 1e-8, 1e-9)?;
            match out {
                Some(path) => {
                    write_json(&report, path)?;
                    artifact(&mut report, path);
                }
                None => print!("{}", to_sorted_json(&report)?),
            }
            Ok(report)
        }
        Command::Intrinsic {
            family,
            omega_max,
            samples,
            out,
        } => {
            let c = c_minus1_of(family)?;
            check_finite("cminus1", c)?;
            if !(omega_max.is_finite() && *omega_max > 0.0) || *samples < 2 {
                return Err(Failure::Config("--omega-max must be positive and --samples at least 2".into()));
            }
            let ip = IntrinsicParams::new(c)?;
            let mut report = Report::new(json!({
                "command": "intrinsic", "family": family, "omega_max": omega_max, "samples": samples, "out": out
            }));
            report.param("c_minus1", c);
            report.param("xi01", ip.xi01);
            report.param("xi00", ip.xi00);
            report.param("rho1", ip.rho1);
            match completeness_certificate(&ip, *omega_max, *samples) {
                Ok(cert) => report.suite("completeness", cert.passed, &cert),
                Err(e) => report.suite("completeness", false, json!({ "error": e.to_string() })),
            }
            let mut k_fd: f64 = 0.0;
            let mut codazzi: f64 = 0.0;
            let mut alg: f64 = 0.0;
            for i in 0..100 {
                let w = 0.05 + 2.95 * i as f64 / 99.0;
                for s in [w, -w] {
                    k_fd = k_fd.max((ip.tilde_K(s)? - ip.tilde_K_fd(s, 1e-3)?).abs());
                    let sh = shape_and_codazzi(s, &ip)?;
                    codazzi = codazzi.max(sh.codazzi.abs());
                    alg = alg.max(sh.gauss_defect.abs()).max(sh.trace_defect.abs());
                }
            }
            let k0 = (ip.tilde_K(0.0)? + ip.xi01.powf(8.0 / 3.0) / 9.0 + 1.0).abs();
            let h = 1e-3;
            let dk0 = ((ip.tilde_K(h)? - ip.tilde_K(-h)?) / (2.0 * h)).abs();
            report.suite("curvature_fd", k_fd < 1e-6, json!({ "max": k_fd, "tol": 1e-6 }));
            report.suite("curvature_seam", k0 < 1e-8 && dk0 < 1e-6, json!({ "value_defect": k0, "symmetric_derivative": dk0 }));
            report.suite("shape_algebra", alg < 1e-12, json!({ "max": alg, "tol": 1e-12 }));
            report.suite("codazzi", codazzi < 1e-5, json!({ "max": codazzi, "tol": 1e-5 }));
            if let Some(path) = out {
                write_json(&report, path)?;
                artifact(&mut report, path);
            }
            Ok(report)
        }
    }
}

fn write_report(report: &mut Report, artifact_path: &Path) -> std::result::Result<(), Failure> {
    let rp = report_path(artifact_path);
    report.artifacts.push(rp.display().to_string());
    write_json(report, &rp)?;
    Ok(())
}

/// Execute a parsed command line; returns the process exit status.
pub fn run(cli: &Cli) -> i32 {
    match run_command(&cli.command) {
        Ok(report) => {
            let failing = report.failing();
            if failing.is_empty() {
                0
            } else {
                for f in failing {
                    eprintln!("FAILED: {f}");
                }
                1
            }
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

/// Parse `args` (including the program name) and run; clap's own usage
/// errors map to status 2.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
    }
}
