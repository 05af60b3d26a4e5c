//! Job configuration: a TOML file with `[surface]`, `[deformation]`,
//! `[grid]` and `[output]` sections, overridden field by field by flags.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;
use surfkin::grid::Grid;
use surfkin::kinematics::{Deformation, SpatialMap};
use surfkin::surface::{Chart, Domain, Profile};
use surfkin::Vec3;

use crate::CliError;

/// Command-line flags shared by every subcommand.
#[derive(Args, Clone, Debug, Default)]
pub struct JobOptions {
    /// Job file with [surface], [deformation], [grid] and [output] sections.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// plane, annulus, sphere, cylinder, catenoid, torus, helicoid, revolution or custom.
    #[arg(long)]
    pub surface: Option<String>,
    /// Profile ρ(z) of a surface of revolution.
    #[arg(long)]
    pub profile: Option<String>,
    /// Sphere/cylinder radius, catenoid waist, helicoid pitch or torus major radius.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Torus tube radius.
    #[arg(long)]
    pub minor: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub zmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub zmax: Option<f64>,
    /// identity, rotation, bonnet, eversion, conformal-square, scale, twist or map.
    #[arg(long)]
    pub deformation: Option<String>,
    /// Rotation axis as `x,y,z`.
    #[arg(long, allow_hyphen_values = true)]
    pub axis: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub angle: Option<f64>,
    /// Bonnet angle; `bonnet` sweeps seven angles in [0, π] without it.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Cells as NxM.
    #[arg(long)]
    pub grid: Option<String>,
    /// Overrides every check tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Node rows skipped at each edge.
    #[arg(long)]
    pub margin: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Seed for randomized checks.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write `vn` lines in meshes.
    #[arg(long)]
    pub normals: bool,
}

#[derive(Deserialize, Clone, Debug, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSection {
    pub kind: Option<String>,
    pub radius: Option<f64>,
    pub minor: Option<f64>,
    pub profile: Option<String>,
    pub zmin: Option<f64>,
    pub zmax: Option<f64>,
    /// Components of a custom chart in `u, v`.
    pub x: Option<String>,
    pub y: Option<String>,
    pub z: Option<String>,
    pub umin: Option<f64>,
    pub umax: Option<f64>,
    pub vmin: Option<f64>,
    pub vmax: Option<f64>,
}

#[derive(Deserialize, Clone, Debug, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DeformationSection {
    pub kind: Option<String>,
    pub alpha: Option<f64>,
    pub axis: Option<[f64; 3]>,
    pub angle: Option<f64>,
    pub factor: Option<f64>,
    pub rate: Option<f64>,
    /// Spatial map `x, y, z ↦ (…)` for `kind = "map"`.
    pub map: Option<[String; 3]>,
    /// Spatial maps applied afterwards, e.g. `"rotation 0,0,1 0.5"`.
    #[serde(default)]
    pub then: Vec<String>,
}

#[derive(Deserialize, Clone, Debug, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub size: Option<String>,
    pub margin: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Deserialize, Clone, Debug, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub format: Option<String>,
    pub normals: Option<bool>,
}

#[derive(Deserialize, Clone, Debug, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    #[serde(default)]
    pub surface: SurfaceSection,
    #[serde(default)]
    pub deformation: DeformationSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl JobFile {
    pub fn parse(text: &str) -> Result<JobFile, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<JobFile, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A fully resolved job.
#[derive(Clone, Debug, PartialEq)]
pub struct JobConfig {
    pub surface: SurfaceSection,
    pub deformation: DeformationSection,
    pub cells: (usize, usize),
    pub margin: usize,
    pub tol: Option<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub normals: bool,
}

pub const DEFAULT_GRID: (usize, usize) = (64, 64);
pub const DEFAULT_MARGIN: usize = 2;

fn parse_axis(text: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || CliError::Config(format!("axis must look like 0,0,1, got {text:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut a = [0.0; 3];
    for (x, p) in a.iter_mut().zip(parts) {
        *x = p.parse().map_err(|_| bad())?;
    }
    Ok(a)
}

impl JobConfig {
    /// Merges flags over the optional job file.
    pub fn resolve(opts: &JobOptions) -> Result<JobConfig, CliError> {
        let file = match &opts.config {
            Some(p) => JobFile::load(p)?,
            None => JobFile::default(),
        };
        Self::merge(file, opts)
    }

    pub fn merge(file: JobFile, o: &JobOptions) -> Result<JobConfig, CliError> {
        let JobFile { mut surface, mut deformation, grid, output } = file;
        macro_rules! over {
            ($dst:expr, $src:expr) => {
                if let Some(x) = $src.clone() {
                    $dst = Some(x);
                }
            };
        }
        over!(surface.kind, o.surface);
        over!(surface.profile, o.profile);
        over!(surface.radius, o.radius);
        over!(surface.minor, o.minor);
        over!(surface.zmin, o.zmin);
        over!(surface.zmax, o.zmax);
        over!(deformation.kind, o.deformation);
        over!(deformation.angle, o.angle);
        over!(deformation.alpha, o.alpha);
        if let Some(a) = &o.axis {
            deformation.axis = Some(parse_axis(a)?);
        }

        let size = o.grid.clone().or(grid.size);
        let cells = match size {
            Some(s) => Grid::parse_dims(&s).map_err(|e| CliError::Config(e.to_string()))?,
            None => DEFAULT_GRID,
        };
        if cells.0 == 0 || cells.1 == 0 {
            return Err(CliError::Config(format!("grid {}x{} is empty", cells.0, cells.1)));
        }
        let tol = o.tol.or(grid.tol);
        if let Some(t) = tol {
            if !(t > 0.0) {
                return Err(CliError::Config(format!("tolerance must be positive, got {t}")));
            }
        }
        let format = match o.format.clone().or(output.format).as_deref() {
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(f) => return Err(CliError::Config(format!("unknown format {f:?}; expected csv or json"))),
        };
        Ok(JobConfig {
            surface,
            deformation,
            cells,
            margin: o.margin.or(grid.margin).unwrap_or(DEFAULT_MARGIN),
            tol,
            seed: o.seed.or(grid.seed).unwrap_or(0),
            out: o.out.clone().or(output.dir),
            format,
            normals: o.normals || output.normals.unwrap_or(false),
        })
    }

    /// Surface kind, with `default` when neither a kind nor a profile is given.
    pub fn surface_kind(&self, default: &str) -> String {
        match (&self.surface.kind, &self.surface.profile) {
            (Some(k), _) => k.clone(),
            (None, Some(_)) => "revolution".into(),
            (None, None) => default.into(),
        }
    }

    pub fn chart(&self, default_kind: &str) -> Result<Chart, CliError> {
        let s = &self.surface;
        let kind = self.surface_kind(default_kind);
        let r = s.radius;
        if let Some(x) = r {
            if !(x > 0.0) {
                return Err(CliError::Config(format!("radius must be positive, got {x}")));
            }
        }
        let mut chart = match kind.as_str() {
            "plane" => Chart::plane(),
            "annulus" | "polar-plane" => Chart::polar_plane(),
            "sphere" => Chart::sphere(r.unwrap_or(1.0)),
            "cylinder" => Chart::cylinder(r.unwrap_or(1.0)),
            "catenoid" => Chart::catenoid(r.unwrap_or(1.0)),
            "helicoid" => Chart::helicoid(r.unwrap_or(1.0)),
            "torus" => Chart::torus(r.unwrap_or(2.0), s.minor.unwrap_or(0.6)),
            "revolution" => {
                let text = s
                    .profile
                    .as_deref()
                    .ok_or_else(|| CliError::Config("revolution surface needs a profile".into()))?;
                let (z0, z1) = (s.zmin.unwrap_or(0.0), s.zmax.unwrap_or(1.0));
                Chart::revolution(Profile::parse(text)?, z0, z1)?
            }
            "custom" => {
                let part = |p: &Option<String>, name: &str| {
                    p.clone().ok_or_else(|| CliError::Config(format!("custom surface needs `{name}`")))
                };
                let d = Domain::new(
                    s.umin.unwrap_or(-1.0),
                    s.umax.unwrap_or(1.0),
                    s.vmin.unwrap_or(-1.0),
                    s.vmax.unwrap_or(1.0),
                );
                Chart::parse_custom(&part(&s.x, "x")?, &part(&s.y, "y")?, &part(&s.z, "z")?, d)?
            }
            k => return Err(CliError::Config(format!("unknown surface kind {k:?}"))),
        };
        let mut d = chart.domain();
        if matches!(kind.as_str(), "cylinder" | "catenoid" | "helicoid") {
            d.v0 = s.zmin.unwrap_or(d.v0);
            d.v1 = s.zmax.unwrap_or(d.v1);
        }
        if kind != "custom" {
            d.u0 = s.umin.unwrap_or(d.u0);
            d.u1 = s.umax.unwrap_or(d.u1);
            d.v0 = s.vmin.unwrap_or(d.v0);
            d.v1 = s.vmax.unwrap_or(d.v1);
        }
        if !(d.u1 > d.u0 && d.v1 > d.v0) || d.span_u() > 2.0 * TAU || d.span_v() > 2.0 * TAU {
            return Err(CliError::Config(format!("bad parameter domain {d:?}")));
        }
        chart = chart.with_domain(d);
        Ok(chart)
    }

    pub fn grid(&self, chart: &Chart) -> Result<Grid, CliError> {
        Grid::new(self.cells.0, self.cells.1, chart.domain(), self.margin).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn deformation(&self, chart: &Chart, default_kind: &str) -> Result<Deformation, CliError> {
        let d = &self.deformation;
        let kind = d.kind.clone().unwrap_or_else(|| default_kind.into());
        let mut def = match kind.as_str() {
            "identity" => Deformation::identity(),
            "bonnet" => Deformation::bonnet(chart, d.alpha.unwrap_or(0.0))?,
            "eversion" => Deformation::eversion(chart)?,
            "map" => {
                let m = d
                    .map
                    .as_ref()
                    .ok_or_else(|| CliError::Config("map deformation needs `map = [x, y, z]`".into()))?;
                Deformation::spatial(SpatialMap::parse_expr(&m[0], &m[1], &m[2])?)
            }
            other => Deformation::spatial(self.spatial(other)?),
        };
        for step in &d.then {
            def = def.then(parse_step(step)?);
        }
        Ok(def)
    }

    fn spatial(&self, kind: &str) -> Result<SpatialMap, CliError> {
        let d = &self.deformation;
        Ok(match kind {
            "rotation" => {
                let a = d.axis.unwrap_or([0.0, 0.0, 1.0]);
                SpatialMap::rotation(Vec3::new(a[0], a[1], a[2]), d.angle.unwrap_or(0.0))
            }
            "conformal-square" => SpatialMap::ComplexSquare,
            "scale" => SpatialMap::Scale(d.factor.unwrap_or(1.0)),
            "twist" => SpatialMap::ZTwist { rate: d.rate.unwrap_or(1.0) },
            k => return Err(CliError::Config(format!("unknown deformation kind {k:?}"))),
        })
    }
}

/// One composed spatial map: `rotation AX,AY,AZ ANGLE`, `scale F`,
/// `twist RATE`, `translate X,Y,Z`, `conformal-square` or `map EX; EY; EZ`.
pub fn parse_step(text: &str) -> Result<SpatialMap, CliError> {
    let text = text.trim();
    let (head, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    let rest = rest.trim();
    let num = |s: &str| -> Result<f64, CliError> {
        s.trim().parse().map_err(|_| CliError::Config(format!("bad number {s:?} in step {text:?}")))
    };
    Ok(match head {
        "rotation" => {
            let (axis, angle) = rest
                .rsplit_once(char::is_whitespace)
                .ok_or_else(|| CliError::Config(format!("step {text:?} needs an axis and an angle")))?;
            let a = parse_axis(axis)?;
            SpatialMap::rotation(Vec3::new(a[0], a[1], a[2]), num(angle)?)
        }
        "translate" => {
            let a = parse_axis(rest)?;
            SpatialMap::Rigid { q: surfkin::Mat3::identity(), t: Vec3::new(a[0], a[1], a[2]) }
        }
        "scale" => SpatialMap::Scale(num(rest)?),
        "twist" => SpatialMap::ZTwist { rate: num(rest)? },
        "conformal-square" => SpatialMap::ComplexSquare,
        "map" => {
            let parts: Vec<&str> = rest.split(';').collect();
            if parts.len() != 3 {
                return Err(CliError::Config(format!("step {text:?} needs three `;`-separated components")));
            }
            SpatialMap::parse_expr(parts[0], parts[1], parts[2])?
        }
        _ => return Err(CliError::Config(format!("unknown step {text:?}"))),
    })
}
