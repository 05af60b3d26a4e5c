//! The five subcommands as pure functions of a [`JobConfig`].

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surfkin::grid::{Grid, Node, Stat};
use surfkin::kinematics::{
    energy_forms, image_gaussian_curvature, integrability_residuals, kinematics_at, Deformation, ImageSurface,
    SpatialMap,
};
use surfkin::metric_classes::{classify, conformal_curvature_residual, conformal_laws_residuals};
use surfkin::special::{bonnet_check, bonnet_helicoid_rms, eversion_check, evert_chart};
use surfkin::surface::{
    codazzi_residuals, connectors, gauss_residual, gaussian_curvature, metric_gaussian_curvature, shape, Chart,
    ChartKind, Field, FrameSpec,
};
use surfkin::{Error, Vec3};

use crate::config::JobConfig;
use crate::mesh::triangulate;
use crate::report::{Classification, Report, Residual, SCHEMA};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Check,
    Analyze,
    Evert,
    Bonnet,
    ExportMesh,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Analyze => "analyze",
            Command::Evert => "evert",
            Command::Bonnet => "bonnet",
            Command::ExportMesh => "export-mesh",
        }
    }
}

/// Everything a job produces, before it is written anywhere.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub report: Option<Report>,
    /// `(file name, OBJ text)`.
    pub meshes: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

impl Output {
    pub fn passed(&self) -> bool {
        self.report.as_ref().is_none_or(Report::passed)
    }
}

pub mod tol {
    pub const SYMMETRY: f64 = 1e-9;
    pub const GAUSS: f64 = 1e-6;
    pub const CODAZZI: f64 = 1e-5;
    pub const METRIC_K: f64 = 1e-6;
    pub const ORTHOGONAL: f64 = 1e-9;
    pub const CLASSIFY: f64 = 1e-8;
    pub const ENERGY: f64 = 1e-8;
    pub const FORMS: f64 = 1e-6;
    pub const INTEGRABILITY: f64 = 1e-5;
    pub const CURVATURE: f64 = 1e-6;
    pub const SIGN_FLIP: f64 = 1e-5;
    pub const CONFORMAL: f64 = 1e-5;
    pub const HELICOID_RMS: f64 = 1e-6;
}

pub fn run(cmd: Command, cfg: &JobConfig) -> Result<Output, CliError> {
    match cmd {
        Command::Check => Ok(report_only(run_check(cfg)?)),
        Command::Analyze => Ok(report_only(run_analyze(cfg)?)),
        Command::Evert => Ok(report_only(run_evert(cfg)?)),
        Command::Bonnet => Ok(report_only(run_bonnet(cfg)?)),
        Command::ExportMesh => export_mesh(cfg),
    }
}

fn report_only(report: Report) -> Output {
    Output { report: Some(report), meshes: Vec::new(), warnings: Vec::new() }
}

fn collect<T>(rows: Vec<(Node, surfkin::Result<T>)>) -> Result<Vec<(Node, T)>, CliError> {
    rows.into_iter().map(|(n, r)| r.map(|x| (n, x))).collect::<Result<_, _>>().map_err(CliError::from)
}

fn column<const N: usize>(rows: &[(Node, [f64; N])], k: usize) -> Stat {
    Stat::of_abs(rows.iter().map(|(n, r)| (*n, r[k])))
}

fn surface_label(chart: &Chart) -> String {
    let d = chart.domain();
    let params = match chart.kind() {
        ChartKind::Sphere { radius } | ChartKind::Cylinder { radius } => format!("R={radius}"),
        ChartKind::Catenoid { waist } => format!("c={waist}"),
        ChartKind::Helicoid { pitch } => format!("c={pitch}"),
        ChartKind::Torus { major, minor } => format!("R={major},r={minor}"),
        ChartKind::Revolution(p) => format!("rho={}", p.text()),
        ChartKind::Custom(e) => format!("{};{};{}", e[0].source(), e[1].source(), e[2].source()),
        ChartKind::Plane | ChartKind::PolarPlane => String::new(),
    };
    format!("{}({params}) u=[{},{}] v=[{},{}]", chart.name(), d.u0, d.u1, d.v0, d.v1)
}

fn deformation_label(cfg: &JobConfig, default: &str) -> String {
    let d = &cfg.deformation;
    let mut s = d.kind.clone().unwrap_or_else(|| default.into());
    match s.as_str() {
        "bonnet" => s += &format!("(alpha={})", d.alpha.unwrap_or(0.0)),
        "rotation" => s += &format!("(axis={:?},angle={})", d.axis.unwrap_or([0.0, 0.0, 1.0]), d.angle.unwrap_or(0.0)),
        "scale" => s += &format!("({})", d.factor.unwrap_or(1.0)),
        "twist" => s += &format!("({})", d.rate.unwrap_or(1.0)),
        "map" => s += &format!("({})", d.map.as_ref().map(|m| m.join(";")).unwrap_or_default()),
        _ => {}
    }
    for step in &d.then {
        s += " then ";
        s += step.trim();
    }
    s
}

fn new_report(cmd: Command, cfg: &JobConfig, chart: &Chart, deformation: String) -> Report {
    Report {
        schema: SCHEMA,
        command: cmd.name().into(),
        surface: surface_label(chart),
        deformation,
        grid: format!("{}x{}", cfg.cells.0, cfg.cells.1),
        margin: cfg.margin,
        seed: cfg.seed,
        classification: None,
        checks: Vec::new(),
    }
}

/// The three frames every compatibility check is run in.
pub fn check_frames() -> Vec<(String, FrameSpec)> {
    let rot = FrameSpec::Coordinate.rotated(Field::parse("u*v").expect("valid field"));
    vec![
        ("principal".into(), FrameSpec::Principal),
        ("coordinate".into(), FrameSpec::Coordinate),
        ("rotated".into(), rot),
    ]
}

/// Curvature-tensor symmetry, Gauss, Codazzi, connector symmetry and the
/// metric formula for `K`.
pub fn run_check(cfg: &JobConfig) -> Result<Report, CliError> {
    let chart = cfg.chart("sphere")?;
    let grid = cfg.grid(&chart)?;
    let t = |d: f64| cfg.tol.unwrap_or(d);
    let frames = check_frames();
    let mut report = new_report(Command::Check, cfg, &chart, "identity".into());

    let sym = collect(grid.map_interior(|n| {
        let (_, k) = shape(&chart, n.u, n.v);
        Ok([(k - k.transpose()).norm()])
    }))?;
    report.checks.push(Residual::check("curvature-symmetry", &column(&sym, 0), t(tol::SYMMETRY)));

    for (label, spec) in &frames {
        let rows = collect(grid.map_interior(|n| {
            let g = gauss_residual(&chart, spec, n.u, n.v)?;
            let (c1, c2) = codazzi_residuals(&chart, spec, n.u, n.v)?;
            let cs = connectors(&chart, spec, n.u, n.v)?.symmetry_defect(&spec.eval(&chart, n.u, n.v));
            Ok([g, c1.abs().max(c2.abs()), cs])
        }))?;
        report.checks.push(Residual::check(&format!("gauss[{label}]"), &column(&rows, 0), t(tol::GAUSS)));
        report.checks.push(Residual::check(&format!("codazzi[{label}]"), &column(&rows, 1), t(tol::CODAZZI)));
        report.checks.push(Residual::check(
            &format!("connector-symmetry[{label}]"),
            &column(&rows, 2),
            t(tol::SYMMETRY),
        ));
    }

    let metric = grid.map_interior(|n| {
        metric_gaussian_curvature(&chart, n.u, n.v, tol::ORTHOGONAL).map(|k| [k - gaussian_curvature(&chart, n.u, n.v)])
    });
    if metric.iter().any(|(_, r)| matches!(r, Err(Error::NonOrthogonalChart { .. }))) {
        report.checks.push(Residual::skipped("metric-K", "non-orthogonal"));
    } else {
        let rows = collect(metric)?;
        report.checks.push(Residual::check("metric-K", &column(&rows, 0), t(tol::METRIC_K)));
    }
    if let ChartKind::Sphere { radius } = chart.kind() {
        let k0 = 1.0 / (radius * radius);
        let rows = collect(grid.map_interior(|n| Ok([gaussian_curvature(&chart, n.u, n.v) - k0])))?;
        report.checks.push(Residual::check("sphere-K", &column(&rows, 0), t(tol::METRIC_K)));
    }
    Ok(report)
}

/// Pointwise kinematic residuals shared by `analyze`, `evert` and `bonnet`.
struct Survey {
    w_s: Stat,
    w_d: Stat,
    w_b: Stat,
    forms: Stat,
    integrability: Stat,
    k_law: Stat,
    egregium: Stat,
    a3: Stat,
    indifference: Option<Stat>,
    /// Nodes left out of the integrability check.
    isotropic_skipped: usize,
}

/// The integrability conditions are written in the stretch eigenframe, which
/// is not differentiable where an anisotropic stretch becomes isotropic. On
/// maps that are not conformal such nodes are skipped (`conformal = false`).
fn survey(
    def: &Deformation,
    chart: &Chart,
    grid: &Grid,
    turned: Option<&Deformation>,
    conformal: bool,
) -> Result<Survey, CliError> {
    let rows = collect(grid.map_interior(|n| {
        let pk = kinematics_at(def, chart, n.u, n.v)?;
        let e = energy_forms(&pk);
        let integ = if pk.sample.isotropic && !conformal {
            f64::NAN
        } else {
            integrability_residuals(&pk).iter().fold(0.0f64, |m, r| m.max(r.abs()))
        };
        let ks_direct = pk.image_gaussian_curvature_direct();
        let law = image_gaussian_curvature(&pk)? - ks_direct;
        let indiff = match turned {
            Some(d) => {
                let e2 = energy_forms(&kinematics_at(d, chart, n.u, n.v)?);
                (e.w_s - e2.w_s).abs().max((e.w_d - e2.w_d).abs()).max((e.w_b - e2.w_b).abs())
            }
            None => 0.0,
        };
        Ok([
            e.w_s,
            e.w_d,
            e.w_b,
            e.form_defect(),
            integ,
            law,
            ks_direct - pk.gaussian_curvature(),
            pk.rot.a[2].norm(),
            indiff,
        ])
    }))?;
    Ok(Survey {
        w_s: column(&rows, 0),
        w_d: column(&rows, 1),
        w_b: column(&rows, 2),
        forms: column(&rows, 3),
        integrability: Stat::of_abs(rows.iter().filter(|(_, r)| !r[4].is_nan()).map(|(n, r)| (*n, r[4]))),
        isotropic_skipped: rows.iter().filter(|(_, r)| r[4].is_nan()).count(),
        k_law: column(&rows, 5),
        egregium: column(&rows, 6),
        a3: column(&rows, 7),
        indifference: turned.map(|_| column(&rows, 8)),
    })
}

fn random_rotation(seed: u64) -> SpatialMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let s = (1.0 - z * z).sqrt();
    let angle: f64 = rng.random_range(0.0..PI);
    SpatialMap::rotation(Vec3::new(s * phi.cos(), s * phi.sin(), z), angle)
}

/// Classification, energies, integrability and curvature laws of a deformation.
pub fn run_analyze(cfg: &JobConfig) -> Result<Report, CliError> {
    let chart = cfg.chart("sphere")?;
    let grid = cfg.grid(&chart)?;
    let def = cfg.deformation(&chart, "identity")?;
    let t = |d: f64| cfg.tol.unwrap_or(d);
    let mut report = new_report(Command::Analyze, cfg, &chart, deformation_label(cfg, "identity"));

    let class = classify(&def, &chart, &grid, tol::CLASSIFY)?;
    report.classification = Some(Classification {
        conformal: class.conformal,
        isoareal: class.isoareal,
        isometric: class.isometric,
        tol: class.tol,
    });
    let r = &mut report.checks;
    r.push(Residual::flag("conformal", class.conformal, &class.conformal_defect, class.tol));
    r.push(Residual::flag("isoareal", class.isoareal, &class.isoareal_defect, class.tol));
    r.push(Residual::flag("isometric", class.isometric, &Stat::empty(), class.tol));
    r.push(Residual::info("stretch", &class.stretch));

    let turned = def.clone().then(random_rotation(cfg.seed));
    let s = survey(&def, &chart, &grid, Some(&turned), class.conformal)?;
    r.push(Residual::info("energy.w_s", &s.w_s));
    r.push(Residual::info("energy.w_d", &s.w_d));
    r.push(Residual::info("energy.w_b", &s.w_b));
    r.push(Residual::check("energy-forms", &s.forms, t(tol::FORMS)));
    r.push(Residual::check("integrability", &s.integrability, t(tol::INTEGRABILITY)));
    if s.isotropic_skipped > 0 {
        r.push(Residual { count: s.isotropic_skipped, ..Residual::info("integrability-skipped-isotropic", &Stat::empty()) });
    }
    r.push(Residual::check("k-star-law", &s.k_law, t(tol::CURVATURE)));
    r.push(Residual::check_if(class.isometric, "egregium", &s.egregium, t(tol::CURVATURE)));
    r.push(Residual::check_if(class.isometric, "a3", &s.a3, t(tol::CURVATURE)));
    if let Some(ind) = &s.indifference {
        r.push(Residual::check("frame-indifference", ind, t(tol::ENERGY)));
    }

    if class.conformal {
        let frame = FrameSpec::Coordinate;
        let rows = collect(grid.map_interior(|n| {
            let l = conformal_laws_residuals(&def, &chart, &frame, n.u, n.v)?;
            let k = conformal_curvature_residual(&def, &chart, n.u, n.v)?;
            Ok([l.a3, l.spin, l.trace, l.mean_curvature, k.exponential])
        }))?;
        for (k, name) in ["conformal.a3", "conformal.spin", "conformal.trace", "conformal.mean-curvature", "conformal.curvature"]
            .iter()
            .enumerate()
        {
            r.push(Residual::check(name, &column(&rows, k), t(tol::CONFORMAL)));
        }
    } else {
        r.push(Residual::skipped("conformal", "not conformal"));
    }
    Ok(report)
}

/// Eversion of a surface of revolution, with the half catenoid as default.
pub fn run_evert(cfg: &JobConfig) -> Result<Report, CliError> {
    let mut cfg = cfg.clone();
    if cfg.surface.kind.is_none() && cfg.surface.profile.is_none() {
        cfg.surface.profile = Some("cosh(z)".into());
        cfg.surface.zmin = cfg.surface.zmin.or(Some(0.0));
        cfg.surface.zmax = cfg.surface.zmax.or(Some(2.0));
    }
    let chart = cfg.chart("revolution")?;
    let grid = cfg.grid(&chart)?;
    let map = evert_chart(chart)?;
    let chart = &map.chart;
    let t = |d: f64| cfg.tol.unwrap_or(d);
    let mut report = new_report(Command::Evert, &cfg, chart, "eversion".into());
    let e = eversion_check(&map, &grid)?;
    let s = survey(&map.deformation, chart, &grid, None, true)?;
    let r = &mut report.checks;
    r.push(Residual::check("sign-flip", &e.sign_flip, t(tol::SIGN_FLIP)));
    r.push(Residual::check("isometry", &e.isometry, t(tol::CLASSIFY)));
    r.push(Residual::check("kappa1", &e.kappa1, t(tol::CURVATURE)));
    r.push(Residual::check("kappa2", &e.kappa2, t(tol::CURVATURE)));
    r.push(Residual::check("egregium", &e.curvature_defect, t(tol::CURVATURE)));
    r.push(Residual::check("a3", &s.a3, t(tol::CURVATURE)));
    r.push(Residual::check("energy.w_s", &e.w_s, t(tol::ENERGY)));
    r.push(Residual::check("energy.w_d", &e.w_d, t(tol::ENERGY)));
    r.push(Residual::check("energy.w_b", &e.w_b, t(tol::ENERGY)));
    r.push(Residual::check("energy-forms", &s.forms, t(tol::FORMS)));
    r.push(Residual::check("conditions", &e.conditions, t(tol::INTEGRABILITY)));
    r.push(Residual::check("integrability", &s.integrability, t(tol::INTEGRABILITY)));
    r.push(Residual {
        count: e.infinite_contents,
        ..Residual::info("half-turn-nodes", &Stat::empty())
    });
    Ok(report)
}

/// Angles swept by `bonnet` when none is given: `kπ/6`, `k = 0..=6`.
pub fn bonnet_angles() -> Vec<f64> {
    (0..=6).map(|k| k as f64 * PI / 6.0).collect()
}

/// Bonnet transformations of the catenoid.
pub fn run_bonnet(cfg: &JobConfig) -> Result<Report, CliError> {
    let chart = cfg.chart("catenoid")?;
    let grid = cfg.grid(&chart)?;
    let t = |d: f64| cfg.tol.unwrap_or(d);
    let alphas = match cfg.deformation.alpha {
        Some(a) => vec![a],
        None => bonnet_angles(),
    };
    let mut report = new_report(Command::Bonnet, cfg, &chart, "bonnet".into());
    for alpha in alphas {
        let b = bonnet_check(&chart, alpha, &grid)?;
        let s = survey(&bonnet_deformation_of(&chart, alpha)?, &chart, &grid, None, true)?;
        let tag = |name: &str| format!("{name}[alpha={alpha:.6}]");
        let r = &mut report.checks;
        r.push(Residual::check(&tag("energy.w_s"), &b.w_s, t(tol::ENERGY)));
        r.push(Residual::check(&tag("energy.w_d"), &b.w_d, t(tol::ENERGY)));
        r.push(Residual::check(&tag("energy.w_b"), &b.w_b, t(tol::ENERGY)));
        r.push(Residual::check(&tag("mean-curvature"), &b.image_mean_curvature, t(tol::CURVATURE)));
        r.push(Residual::check(&tag("egregium"), &b.curvature_defect, t(tol::CURVATURE)));
        r.push(Residual::check(&tag("isometry"), &b.isometry_defect, t(tol::CLASSIFY)));
        r.push(Residual::check(&tag("drilling"), &b.drilling_defect, t(tol::CLASSIFY)));
        r.push(Residual::check(&tag("energy-forms"), &s.forms, t(tol::FORMS)));
        r.push(Residual::check(&tag("integrability"), &s.integrability, t(tol::INTEGRABILITY)));
        if (alpha - PI / 2.0).abs() < 1e-12 {
            let rms = bonnet_helicoid_rms(&chart, alpha, &grid)?;
            let stat = Stat { max: rms, mean: rms, min: rms, worst: None, count: grid.len() };
            r.push(Residual::check(&tag("helicoid-rms"), &stat, t(tol::HELICOID_RMS)));
        }
    }
    Ok(report)
}

fn bonnet_deformation_of(chart: &Chart, alpha: f64) -> Result<Deformation, CliError> {
    Ok(surfkin::special::bonnet_deformation(chart, alpha)?)
}

/// Source and image meshes.
pub fn export_mesh(cfg: &JobConfig) -> Result<Output, CliError> {
    let chart = cfg.chart("sphere")?;
    let grid = cfg.grid(&chart)?;
    let def = cfg.deformation(&chart, "identity")?;
    let src = triangulate(&chart, &grid, cfg.normals);
    let img = triangulate(&ImageSurface::new(&chart, &def), &grid, cfg.normals);
    let mut warnings = Vec::new();
    for (name, m) in [("source", &src), ("image", &img)] {
        if m.dropped > 0 {
            warnings.push(format!("{name}: dropped {} degenerate faces", m.dropped));
        }
    }
    Ok(Output {
        report: None,
        meshes: vec![("source.obj".into(), src.to_obj("source")), ("image.obj".into(), img.to_obj("image"))],
        warnings,
    })
}
