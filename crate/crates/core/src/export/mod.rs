//! Artifacts: profile curves (CSV, SVG), surface meshes (OBJ) and JSON
//! reports, all written atomically. The command-line front end lives in
//! [`cli`].

pub mod cli;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::extrinsic::{CaseParams, GluedProfile};
use crate::models::{from_half_space, to_half_space, CaseTag, HalfSpacePoint, HyperboloidPoint};
use crate::verify::{ImmersionGrid, VerifyError};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("vertex {0} is not finite")]
    NonFiniteVertex(usize),
    #[error("unknown profile format for {0}")]
    UnknownFormat(PathBuf),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Model(#[from] crate::models::ModelError),
}

pub type Result<T> = std::result::Result<T, ExportError>;

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| ExportError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp).map_err(io)?;
        f.write_all(bytes).map_err(io)?;
        f.sync_all().map_err(io)?;
    }
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io(e)
    })
}

/// The report path written beside an artifact: `x.csv` → `x.report.json`.
pub fn report_path(artifact: &Path) -> PathBuf {
    artifact.with_extension("report.json")
}

/// Pretty JSON with keys sorted at every level.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json::Value keeps objects in a BTreeMap
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    write_atomic(path, to_sorted_json(value)?.as_bytes())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileFormat {
    Csv,
    Svg,
}

impl ProfileFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("csv") => Ok(ProfileFormat::Csv),
            Some("svg") => Ok(ProfileFormat::Svg),
            _ => Err(ExportError::UnknownFormat(path.to_path_buf())),
        }
    }
}

/// `branch,kappa,x,y`, one row per sample, 17 significant digits.
pub fn profile_csv(profile: &GluedProfile) -> String {
    let mut s = String::from("branch,kappa,x,y\n");
    for p in &profile.samples {
        let _ = writeln!(s, "{},{:.16e},{:.16e},{:.16e}", p.branch, p.kappa, p.x, p.y);
    }
    s
}

fn branch_points(profile: &GluedProfile, branch: u8) -> Vec<(f64, f64)> {
    let g = profile.gluing_point;
    let mut pts: Vec<(f64, f64)> = profile.branch_samples(branch).map(|s| (s.x, s.y)).collect();
    // both strokes run through G
    if branch == 2 {
        pts.insert(0, g);
    }
    pts
}

/// Two paths, `branch1` (red) and `branch2` (blue); y is drawn upwards.
pub fn profile_svg(profile: &GluedProfile) -> String {
    let (x0, y0, x1, y1) = profile.bbox();
    let w = (x1 - x0).max(1e-12);
    let h = (y1 - y0).max(1e-12);
    let (mx, my) = (0.05 * w, 0.05 * h);
    let vb = (x0 - mx, -(y1 + my), w + 2.0 * mx, h + 2.0 * my);
    let stroke = 0.004 * w.max(h);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.9} {:.9} {:.9} {:.9}" width="800" height="{:.0}">"#,
        vb.0,
        vb.1,
        vb.2,
        vb.3,
        800.0 * vb.3 / vb.2
    );
    let _ = writeln!(
        s,
        "<style>.branch1{{stroke:red}}.branch2{{stroke:blue}}path{{fill:none;stroke-width:{stroke:.6}}}</style>"
    );
    for b in [1u8, 2] {
        let mut d = String::new();
        for (k, (x, y)) in branch_points(profile, b).iter().enumerate() {
            let _ = write!(d, "{}{:.9},{:.9}", if k == 0 { "M" } else { " L" }, x, -y);
        }
        let _ = writeln!(s, r#"<path class="branch{b}" d="{d}"/>"#);
    }
    s.push_str("</svg>\n");
    s
}

pub fn export_profile(profile: &GluedProfile, format: ProfileFormat, path: &Path) -> Result<()> {
    let text = match format {
        ProfileFormat::Csv => profile_csv(profile),
        ProfileFormat::Svg => profile_svg(profile),
    };
    write_atomic(path, text.as_bytes())
}

/// Triangle mesh in half-space coordinates (+z is the height).
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    /// grid nodes merged into an earlier vertex
    pub welded: usize,
    /// vertex ids on the image of the seam
    pub seam: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshAudit {
    pub vertices: usize,
    pub faces: usize,
    pub grid_nodes: usize,
    pub welded: usize,
    pub boundary_edges: usize,
    /// boundary edges with both ends on the seam: zero when watertight there
    pub seam_boundary_edges: usize,
    /// edges used by more than two faces
    pub nonmanifold_edges: usize,
    pub min_height: f64,
    /// max |<X,X> + 1| of the vertices mapped back to the hyperboloid
    pub max_hyperboloid_residual: f64,
}

impl MeshAudit {
    pub fn watertight_at_seam(&self) -> bool {
        self.seam_boundary_edges == 0 && self.nonmanifold_edges == 0
    }
}

/// Two branch grids sharing the seam row: branch 1 on r ∈ [0, r_far] (seam
/// is its first row), branch 2 on r ∈ [−r_far, 0] (seam is its last row).
pub fn mesh_grids(params: &CaseParams, na: usize, nv: usize, v_max: f64, kappa_lo_frac: f64) -> Result<[ImmersionGrid; 2]> {
    let r_far = params.r_of_kappa(kappa_lo_frac * params.kappa01);
    let v = (-v_max, v_max);
    let mut g1 = ImmersionGrid::glued(params, (0.0, r_far), v, na, nv)?;
    g1.meta.seam_row = Some(0);
    g1.meta.branch = Some(1);
    let mut g2 = ImmersionGrid::glued(params, (-r_far, 0.0), v, na, nv)?;
    g2.meta.seam_row = Some(na - 1);
    g2.meta.branch = Some(2);
    Ok([g1, g2])
}

/// Default |v| range: full circles for the positive family, a fixed
/// window on the hyperbolas and parabolas otherwise.
pub fn auto_vmax(tag: CaseTag) -> f64 {
    match tag {
        CaseTag::Positive => std::f64::consts::PI,
        _ => 1.5,
    }
}

struct Welder {
    tol: f64,
    cells: HashMap<[i64; 3], Vec<usize>>,
    vertices: Vec<[f64; 3]>,
}

impl Welder {
    fn key(&self, p: &[f64; 3]) -> [i64; 3] {
        p.map(|c| (c / self.tol).floor() as i64)
    }

    fn insert(&mut self, p: [f64; 3]) -> (usize, bool) {
        let k = self.key(&p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.cells.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        for &id in ids {
                            let q = self.vertices[id];
                            let d2 = (0..3).map(|i| (p[i] - q[i]).powi(2)).sum::<f64>();
                            if d2 <= self.tol * self.tol {
                                return (id, true);
                            }
                        }
                    }
                }
            }
        }
        let id = self.vertices.len();
        self.vertices.push(p);
        self.cells.entry(k).or_default().push(id);
        (id, false)
    }
}

/// Convert grids to half-space coordinates, weld coincident nodes (within
/// `weld_tol`) and split each grid quad into two triangles.
pub fn build_mesh(grids: &[ImmersionGrid], weld_tol: f64) -> Result<Mesh> {
    let mut w = Welder {
        tol: weld_tol,
        cells: HashMap::new(),
        vertices: Vec::new(),
    };
    let mut faces = Vec::new();
    let mut welded = 0;
    let mut seam = Vec::new();
    let mut node = 0usize;
    for g in grids {
        let mut ids = Vec::with_capacity(g.len());
        for i in 0..g.na {
            for j in 0..g.nv {
                let h = to_half_space(&HyperboloidPoint::new(g.point(i, j))?)?;
                let p = [h.u, h.v, h.w];
                if p.iter().any(|c| !c.is_finite()) {
                    return Err(ExportError::NonFiniteVertex(node));
                }
                node += 1;
                let (id, merged) = w.insert(p);
                welded += merged as usize;
                if g.meta.seam_row == Some(i) && !seam.contains(&id) {
                    seam.push(id);
                }
                ids.push(id);
            }
        }
        let at = |i: usize, j: usize| ids[i * g.nv + j];
        for i in 0..g.na - 1 {
            for j in 0..g.nv - 1 {
                let (a, b, c, d) = (at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
                for t in [[a, b, c], [a, c, d]] {
                    if t[0] != t[1] && t[1] != t[2] && t[0] != t[2] {
                        faces.push(t);
                    }
                }
            }
        }
    }
    seam.sort_unstable();
    Ok(Mesh {
        vertices: w.vertices,
        faces,
        welded,
        seam,
    })
}

pub fn audit_mesh(mesh: &Mesh) -> Result<MeshAudit> {
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    for f in &mesh.faces {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            *edges.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let on_seam = |v: usize| mesh.seam.binary_search(&v).is_ok();
    let mut boundary = 0;
    let mut seam_boundary = 0;
    let mut nonmanifold = 0;
    for (&(a, b), &n) in &edges {
        if n == 1 {
            boundary += 1;
            if on_seam(a) && on_seam(b) {
                seam_boundary += 1;
            }
        } else if n > 2 {
            nonmanifold += 1;
        }
    }
    let mut min_h = f64::INFINITY;
    let mut worst: f64 = 0.0;
    for (i, v) in mesh.vertices.iter().enumerate() {
        if v.iter().any(|c| !c.is_finite()) {
            return Err(ExportError::NonFiniteVertex(i));
        }
        min_h = min_h.min(v[2]);
        let x = from_half_space(&HalfSpacePoint::new(v[0], v[1], v[2])?)?;
        worst = worst.max(x.constraint_residual());
    }
    Ok(MeshAudit {
        vertices: mesh.vertices.len(),
        faces: mesh.faces.len(),
        grid_nodes: mesh.vertices.len() + mesh.welded,
        welded: mesh.welded,
        boundary_edges: boundary,
        seam_boundary_edges: seam_boundary,
        nonmanifold_edges: nonmanifold,
        min_height: min_h,
        max_hyperboloid_residual: worst,
    })
}

pub fn mesh_obj(mesh: &Mesh) -> String {
    let mut s = String::with_capacity(mesh.vertices.len() * 64 + mesh.faces.len() * 24);
    for v in &mesh.vertices {
        let _ = writeln!(s, "v {:.15e} {:.15e} {:.15e}", v[0], v[1], v[2]);
    }
    for f in &mesh.faces {
        let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    s
}

/// Build, weld and write the mesh of a grid pair; returns the audit.
pub fn export_mesh(grids: &[ImmersionGrid], weld_tol: f64, path: &Path) -> Result<MeshAudit> {
    let mesh = build_mesh(grids, weld_tol)?;
    let audit = audit_mesh(&mesh)?;
    write_atomic(path, mesh_obj(&mesh).as_bytes())?;
    Ok(audit)
}

/// Parse the `v` and `f` lines of an OBJ written by [`mesh_obj`].
pub fn read_obj(text: &str) -> Option<Mesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for line in text.lines() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it.map(|t| t.parse().ok()).collect::<Option<_>>()?;
                vertices.push([*c.first()?, *c.get(1)?, *c.get(2)?]);
            }
            Some("f") => {
                let c: Vec<usize> = it.map(|t| t.parse::<usize>().ok().and_then(|k| k.checked_sub(1))).collect::<Option<_>>()?;
                faces.push([*c.first()?, *c.get(1)?, *c.get(2)?]);
            }
            _ => {}
        }
    }
    Some(Mesh {
        vertices,
        faces,
        welded: 0,
        seam: Vec::new(),
    })
}
