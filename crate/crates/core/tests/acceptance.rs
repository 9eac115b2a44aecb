//! Acceptance suite: one PASS/FAIL line per criterion, written straight to
//! stdout so it shows up in an ordinary `cargo test` run.

mod common;

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use bicons::export::{mesh_grids, read_obj};
use bicons::extrinsic::{glue_profiles, glue_slope_closed_form, gluing_gap, ArcLengthCurve, CaseParams, NegativeCoefficient};
use bicons::intrinsic::{completeness_certificate, shape_and_codazzi, xi01, IntrinsicParams};
use bicons::models::{from_half_space, isometry_residual, to_half_space, HalfSpacePoint, MinkowskiVec, TangentVec};
use bicons::verify::{first_integral_residual, run_suites, GridConfig, VerifyReport};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

const FAMILIES: [f64; 3] = [-1.0, 0.0, 1.0];

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { pass: true, lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        self.lines.push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
        self.pass &= ok;
    }
}

fn emit(n: usize, title: &str, o: &Outcome, secs: f64) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {n:>2} {}: {title} ({secs:.2} s)", if o.pass { "PASS" } else { "FAIL" });
    for l in &o.lines {
        let _ = writeln!(out, "    {l}");
    }
}

fn c1_roots() -> Outcome {
    let mut o = Outcome::new();
    let x = xi01(0.0).unwrap();
    let e = (x - 3f64.powf(3.0 / 8.0)).abs();
    o.check(e < 1e-10, format!("xi01(C-1=0) - 3^(3/8) = {e:.2e} (< 1e-10)"));
    let k = CaseParams::new(0.0).unwrap().kappa01;
    let e = (k - 1.0 / 3.0).abs();
    o.check(e < 1e-12, format!("kappa01(C~=0) - 1/3 = {e:.2e} (< 1e-12)"));
    let x = xi01(1.0).unwrap();
    o.check(x > 0.75f64.powf(1.5), format!("xi01(C-1=1) = {x:.12} > (3/4)^(3/2)"));
    let k = CaseParams::new(1.0).unwrap().kappa01;
    o.check(k > 9.0 / 4096.0, format!("kappa01(C~=1) = {k:.12} > 9/4096"));
    o
}

fn c2_rho() -> Outcome {
    let mut o = Outcome::new();
    for c in FAMILIES {
        let ip = IntrinsicParams::new(c).unwrap();
        let a = ip.rho1();
        let b = ip.rho1_direct(1e-12).unwrap();
        o.check(a.is_finite() && a < 0.0, format!("C-1={c}: rho1 = {a:.12} finite, negative"));
        o.check((a - b).abs() < 1e-8, format!("C-1={c}: panel vs adaptive rho1 differ by {:.2e} (< 1e-8)", (a - b).abs()));
        let r = [1e-10, 1e-20, 1e-40].map(|x| ip.rho(x).unwrap());
        o.check(
            r[0] < r[1] && r[1] < r[2] && r[2].is_finite(),
            format!("C-1={c}: rho(1e-10, 1e-20, 1e-40) = {:.3}, {:.3}, {:.3} increasing (log growth)", r[0], r[1], r[2]),
        );
        // the literal xi = 1e-40 gives rho ~ 92 since rho grows like ln(1/xi);
        // the scaled test takes xi = (1e-40)^12, below the smallest double
        let ln_xi = 12.0 * 1e-40f64.ln();
        let big = ip.rho_ln(ln_xi).unwrap();
        o.check(big > 1e3, format!("C-1={c}: rho at ln xi = {ln_xi:.1} is {big:.3} (> 1e3)"));
    }
    o
}

/// −Γ″/Γ by a 5-point stencil on the sampled Γ.
fn k_from_gamma(ip: &IntrinsicParams, w: f64) -> f64 {
    let h = 1e-3;
    let g = |t: f64| ip.Gamma(t).unwrap();
    let d2 = (-g(w - 2.0 * h) + 16.0 * g(w - h) - 30.0 * g(w) + 16.0 * g(w + h) - g(w + 2.0 * h)) / (12.0 * h * h);
    -d2 / g(w)
}

fn c3_curvature() -> Outcome {
    let mut o = Outcome::new();
    for c in FAMILIES {
        let ip = IntrinsicParams::new(c).unwrap();
        let worst = (0..100)
            .map(|i| -3.0 + 6.0 * (i as f64 + 0.5) / 100.0)
            .map(|w| (ip.tilde_K(w).unwrap() - k_from_gamma(&ip, w)).abs())
            .fold(0.0, f64::max);
        o.check(worst < 1e-6, format!("C-1={c}: max |K~ + Gamma''/Gamma| over 100 points = {worst:.2e} (< 1e-6)"));
        let x01 = common::xi01(c);
        let e = (ip.tilde_K(0.0).unwrap() - (-x01.powf(8.0 / 3.0) / 9.0 - 1.0)).abs();
        o.check(e < 1e-8, format!("C-1={c}: K~(0) defect {e:.2e} (< 1e-8)"));
        let h = 1e-3;
        let d = ((ip.tilde_K(h).unwrap() - ip.tilde_K(-h).unwrap()) / (2.0 * h)).abs();
        o.check(d < 1e-6, format!("C-1={c}: symmetric dK~/domega at 0 = {d:.2e} (< 1e-6)"));
    }
    o
}

fn c4_completeness() -> Outcome {
    let mut o = Outcome::new();
    for c in FAMILIES {
        let ip = IntrinsicParams::new(c).unwrap();
        let cert = completeness_certificate(&ip, 10.0, 10_000).unwrap();
        let floor = 1.0 / ip.xi01 - 1e-12;
        o.check(cert.min_gamma >= floor, format!("C-1={c}: min Gamma = {:.15} >= 1/xi01 - 1e-12", cert.min_gamma));
        // independent sweep of the same bound
        let sweep = (0..=4000).map(|i| ip.Gamma(-10.0 + 20.0 * i as f64 / 4000.0).unwrap()).fold(f64::INFINITY, f64::min);
        o.check(sweep >= floor, format!("C-1={c}: sweep min Gamma = {sweep:.15}"));
        o.check(cert.seam_residual < 1e-6, format!("C-1={c}: seam geodesic residual {:.2e} (< 1e-6)", cert.seam_residual));
    }
    o
}

fn c5_shape() -> Outcome {
    let mut o = Outcome::new();
    for c in FAMILIES {
        let ip = IntrinsicParams::new(c).unwrap();
        let (mut det, mut tr, mut cod) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..60 {
            let a = 0.05 + 2.95 * i as f64 / 59.0;
            for w in [a, -a] {
                let s = shape_and_codazzi(w, &ip).unwrap();
                let k = ip.tilde_K(w).unwrap();
                det = det.max((s.lambda1 * s.lambda2 - (1.0 + k)).abs() / (1.0 + k).abs().max(1.0));
                tr = tr.max((s.lambda1 + s.lambda2 - 2.0 / 3f64.sqrt() * (-1.0 - k).sqrt()).abs() / (-1.0 - k).sqrt().max(1.0));
                cod = cod.max(s.codazzi.abs());
            }
        }
        o.check(det < 1e-13, format!("C-1={c}: det A - (1+K~) relative {det:.2e} (rounding)"));
        o.check(tr < 1e-13, format!("C-1={c}: trace A - (2/sqrt3)sqrt(-1-K~) relative {tr:.2e} (rounding)"));
        o.check(cod < 1e-5, format!("C-1={c}: Codazzi residual on |omega| in [0.05, 3] = {cod:.2e} (< 1e-5)"));
    }
    o
}

fn c6_model_map() -> Outcome {
    let mut o = Outcome::new();
    let mut runner = TestRunner::deterministic();
    let mut draw = |lo: f64, hi: f64| (lo..hi).new_tree(&mut runner).unwrap().current();
    let (mut iso, mut rt) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let (u, v, w) = (draw(-3.0, 3.0), draw(-3.0, 3.0), draw(-2.0, 2.0).exp());
        let x = from_half_space(&HalfSpacePoint::new(u, v, w).unwrap()).unwrap();
        let mut tangent = || {
            let t = TangentVec::project(x, MinkowskiVec([draw(-1.0, 1.0), draw(-1.0, 1.0), draw(-1.0, 1.0), draw(-1.0, 1.0)]));
            let n = t.dir.norm_sq().sqrt();
            TangentVec::new(x, (1.0 / n) * t.dir).unwrap()
        };
        let (t1, t2) = (tangent(), tangent());
        iso = iso.max(isometry_residual(&x, &t1, &t2));
        let p = to_half_space(&x).unwrap();
        let back = from_half_space(&p).unwrap();
        let d = [(p.u - u).abs() / (1.0 + u.abs()), (p.v - v).abs() / (1.0 + v.abs()), (p.w - w).abs() / w];
        let dx = (back.vec() - x.vec()).max_abs() / x.vec().max_abs();
        rt = rt.max(d.into_iter().fold(dx, f64::max));
    }
    o.check(iso < 1e-8, format!("max isometry residual over 100 unit tangent pairs = {iso:.2e} (< 1e-8)"));
    o.check(rt < 1e-12, format!("max relative roundtrip error = {rt:.2e} (< 1e-12)"));
    o
}

fn c7_first_integral() -> Outcome {
    let mut o = Outcome::new();
    for c in FAMILIES {
        let p = CaseParams::new(c).unwrap();
        for b in [1u8, 2] {
            let curve = ArcLengthCurve::new(&p, b, 0.1 * p.kappa01).unwrap();
            let s = first_integral_residual(&curve.resample(2001), &p).unwrap();
            o.check(s.max < 1e-6, format!("C~={c} branch {b}: (dkappa/du)^2 - P relative residual {:.2e} (< 1e-6)", s.max));
        }
    }
    o
}

fn c8_gluing() -> Outcome {
    let mut o = Outcome::new();
    for c in FAMILIES {
        let p = CaseParams::new(c).unwrap();
        let g = glue_profiles(&p, 200).unwrap();
        let gap = gluing_gap(&p).unwrap();
        let worst = gap.at_g.max(gap.extrapolated);
        o.check(
            worst < 1e-8,
            format!("C~={c}: gap at G {worst:.2e} (< 1e-8); off-limit gap ~ eps^{:.3}", gap.rate),
        );
        let dm = &g.derivative_match;
        o.check(
            dm.gaps[0] < 1e-6 && dm.gaps[1] < 1e-4 && dm.gaps[2] < 1e-2,
            format!("C~={c}: dy/dx order 1..3 gaps {:.1e}, {:.1e}, {:.1e}", dm.gaps[0], dm.gaps[1], dm.gaps[2]),
        );
        if c > 0.0 {
            let cf = glue_slope_closed_form(&p).unwrap();
            let e = (dm.branch1[0] - cf).abs().max((dm.branch2[0] - cf).abs());
            o.check(e < 1e-6, format!("C~={c}: slope vs closed form {e:.2e} (< 1e-6)"));
        }
        o.check(
            g.closure_gap < 1e-9 && g.is_simple() && g.min_y() > 0.0,
            format!(
                "C~={c}: ends on y = 0 (gap {:.1e}), simple = {}, min y = {:.3e}",
                g.closure_gap,
                g.is_simple(),
                g.min_y()
            ),
        );
    }
    o
}

fn stat(r: &VerifyReport, branch: u8, name: &str) -> Option<(f64, f64, bool)> {
    r.suite(&format!("branch{branch}/{name}")).map(|s| (s.max, s.tol, s.ok()))
}

fn require(o: &mut Outcome, r: &VerifyReport, names: &[&str], tol: f64) {
    for name in names {
        for b in [1u8, 2] {
            match stat(r, b, name) {
                Some((max, t, ok)) => o.check(
                    ok && t <= tol && max < tol,
                    format!("C~={} branch{b}/{name}: {max:.2e} (< {tol:e})", r.c_tilde),
                ),
                None => o.check(false, format!("C~={} branch{b}/{name}: missing", r.c_tilde)),
            }
        }
    }
}

fn c9_embedding(reports: &[VerifyReport]) -> Outcome {
    let mut o = Outcome::new();
    for r in reports {
        require(&mut o, r, &["hyperboloid_constraint", "profile_on_hyperboloid"], 1e-8);
        require(&mut o, r, &["biconservative"], 1e-4);
        require(&mut o, r, &["gauss_equation", "mean_curvature_2kappa"], 1e-5);
        if r.c_tilde == 0.0 {
            require(&mut o, r, &["w_zero"], 1e-6);
        } else {
            require(&mut o, r, &["kappa2_relation"], 1e-4);
            for b in [1u8, 2] {
                let ok = stat(r, b, "w_sign").map_or(false, |s| s.2);
                o.check(ok, format!("C~={} branch{b}: sign(W) = sign(C~) at every node", r.c_tilde));
            }
        }
        if r.c_tilde < 0.0 {
            let passing = r.arbitration.as_ref().and_then(|a| a.passing);
            o.check(
                passing == Some(NegativeCoefficient::Four) && r.coefficient == NegativeCoefficient::Four,
                format!("C~={}: coefficient arbitration recorded passing = {passing:?}", r.c_tilde),
            );
        }
    }
    for c in FAMILIES {
        let p = CaseParams::new(c).unwrap();
        let grids = mesh_grids(&p, 60, 60, bicons::export::auto_vmax(p.tag), 1e-3).unwrap();
        let m = grids.iter().map(|g| g.max_constraint_residual()).fold(0.0, f64::max);
        o.check(m < 1e-8, format!("C~={c}: mesh grids hyperboloid constraint {m:.2e} (< 1e-8)"));
    }
    o
}

fn c10_frame(reports: &[VerifyReport]) -> Outcome {
    let mut o = Outcome::new();
    for r in reports {
        require(&mut o, r, &["eq_d11", "eq_d12", "eq_d21", "eq_d22"], 1e-4);
        require(&mut o, r, &["x2_f", "x2_x1f"], 1e-5);
    }
    o
}

fn c11_seam(reports: &[VerifyReport]) -> Outcome {
    let mut o = Outcome::new();
    for r in reports {
        let s = &r.seam;
        o.check(s.min_grad_off_seam > 1e-6, format!("C~={}: min |grad f| off the seam = {:.3e} (> 1e-6)", r.c_tilde, s.min_grad_off_seam));
        o.check(s.seam_symmetric_df < 1e-6, format!("C~={}: seam-symmetric df = {:.2e} (< 1e-6)", r.c_tilde, s.seam_symmetric_df));
    }
    o
}

fn run_cli(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_bicons")).args(args).output().unwrap();
    (out.status.code(), out.stdout)
}

fn deterministic(o: &mut Outcome, label: &str, args: &[&str], files: &[&Path]) {
    let (c1, s1) = run_cli(args);
    let first: Vec<Vec<u8>> = files.iter().map(|f| std::fs::read(f).unwrap_or_default()).collect();
    let (c2, s2) = run_cli(args);
    let second: Vec<Vec<u8>> = files.iter().map(|f| std::fs::read(f).unwrap_or_default()).collect();
    let same = s1 == s2 && first == second && first.iter().all(|b| !b.is_empty());
    o.check(c1 == Some(0) && c2 == Some(0), format!("{label}: exit status {c1:?}, {c2:?}"));
    o.check(same, format!("{label}: byte-identical output and artifacts across runs"));
}

fn c12_cli() -> Outcome {
    let mut o = Outcome::new();
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let s = |p: &Path| p.to_str().unwrap().to_string();

    let roots = d.join("roots.json");
    deterministic(&mut o, "roots", &["roots", "--ctilde", "0", "--out", &s(&roots)], &[&roots]);
    let (_, out) = run_cli(&["roots", "--ctilde", "0"]);
    o.check(
        String::from_utf8_lossy(&out).lines().any(|l| l == "kappa01 = 0.333333333333"),
        "roots --ctilde 0 prints kappa01 = 0.333333333333",
    );

    let svg = d.join("glue.svg");
    deterministic(&mut o, "glue", &["glue", "--ctilde", "1", "--out", &s(&svg)], &[&svg, &d.join("glue.report.json")]);

    let vj = d.join("verify.json");
    deterministic(&mut o, "verify", &["verify", "--ctilde", "-1", "--out", &s(&vj)], &[&vj]);

    for c in ["-1", "0", "1"] {
        let obj = d.join(format!("mesh{c}.obj"));
        let rep = d.join(format!("mesh{c}.report.json"));
        deterministic(&mut o, &format!("mesh C~={c}"), &["mesh", "--ctilde", c, "--grid", "60", "--out", &s(&obj)], &[&obj, &rep]);
        let r: serde_json::Value = serde_json::from_slice(&std::fs::read(&rep).unwrap()).unwrap();
        let w = &r["suites"]["watertight_seam"];
        o.check(
            w["pass"] == true && w["seam_boundary_edges"] == 0 && w["nonmanifold_edges"] == 0,
            format!("mesh C~={c}: watertight across the seam ({} seam boundary edges)", w["seam_boundary_edges"]),
        );
        // every vertex, read back from text, against the hyperboloid and
        // against the grid node it came from
        let mesh = read_obj(&std::fs::read_to_string(&obj).unwrap()).unwrap();
        let p = CaseParams::new(c.parse().unwrap()).unwrap();
        let grids = mesh_grids(&p, 60, 60, bicons::export::auto_vmax(p.tag), 1e-3).unwrap();
        let nodes: Vec<MinkowskiVec> = grids.iter().flat_map(|g| g.points().iter().copied()).collect();
        let (mut on_h, mut to_node) = (0.0f64, 0.0f64);
        for v in &mesh.vertices {
            let x = from_half_space(&HalfSpacePoint::new(v[0], v[1], v[2]).unwrap()).unwrap().vec();
            let [a, b, cc, t] = x.0;
            on_h = on_h.max((a * a + b * b + cc * cc - t * t + 1.0).abs() / (1.0 + t * t));
            let near = nodes.iter().map(|n| (*n - x).max_abs() / (1.0 + n.max_abs())).fold(f64::INFINITY, f64::min);
            to_node = to_node.max(near);
        }
        o.check(on_h < 1e-6, format!("mesh C~={c}: OBJ vertices on the hyperboloid within {on_h:.2e} (< 1e-6)"));
        o.check(to_node < 1e-6, format!("mesh C~={c}: OBJ vertices within {to_node:.2e} of their surface nodes"));
    }
    o
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let mut results: Vec<(usize, bool)> = Vec::new();
    let mut record = |n: usize, title: &str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        emit(n, title, &o, t.elapsed().as_secs_f64());
        results.push((n, o.pass));
    };
    record(1, "roots", &mut c1_roots);
    record(2, "rho1 and divergence of rho", &mut c2_rho);
    record(3, "intrinsic curvature", &mut c3_curvature);
    record(4, "completeness certificate", &mut c4_completeness);
    record(5, "shape candidate and Codazzi", &mut c5_shape);
    record(6, "model map", &mut c6_model_map);
    record(7, "first integral", &mut c7_first_integral);
    record(8, "gluing", &mut c8_gluing);

    let t = Instant::now();
    let reports: Vec<VerifyReport> = FAMILIES
        .iter()
        .map(|&c| run_suites(&CaseParams::new(c).unwrap(), &GridConfig::default(), 2001).unwrap())
        .collect();
    let shared = t.elapsed().as_secs_f64();
    let _ = writeln!(std::io::stdout(), "  (verification grids for criteria 9-11 built in {shared:.2} s)");
    record(9, "embedding audit", &mut || c9_embedding(&reports));
    record(10, "frame equations", &mut || c10_frame(&reports));
    record(11, "glued full surface", &mut || c11_seam(&reports));
    record(12, "command line", &mut c12_cli);

    let total = start.elapsed().as_secs_f64();
    let failed: Vec<usize> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    let _ = writeln!(
        std::io::stdout(),
        "acceptance: {}/12 PASS in {total:.1} s{}",
        12 - failed.len(),
        if failed.is_empty() { String::new() } else { format!(", failing {failed:?}") }
    );
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
    assert!(total < 60.0, "acceptance took {total:.1} s");
}
