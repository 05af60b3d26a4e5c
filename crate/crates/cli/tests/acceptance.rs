//! End-to-end acceptance suite: ten criteria, each on 64×64 grids with a
//! two-cell margin unless stated. Prints one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surfkin::grid::Grid;
use surfkin::kinematics::{
    deformation_sample, energy_forms, integrability_residuals, kinematics_at, kinematics_with, surface_polar,
    Deformation, ImageSurface, SpatialMap,
};
use surfkin::metric_classes::{
    classify, conformal_curvature_residual, conformal_laws_residuals, conformal_stretch_sq, theorema_egregium_check,
};
use surfkin::special::{
    bonnet_check, bonnet_deformation, bonnet_helicoid_rms, eversion_check, evert_chart, evert_revolution,
    sphere_rigidity,
};
use surfkin::surface::{gaussian_curvature, shape, Chart, Domain, Field, FrameSpec, Profile};
use surfkin::{Mat3, Vec3};
use surfkin_cli::{jobs, JobConfig, JobFile, JobOptions};

const CELLS: usize = 64;
const MARGIN: usize = 2;

fn grid(chart: &Chart) -> Grid {
    Grid::new(CELLS, CELLS, chart.domain(), MARGIN).unwrap()
}

/// Outcome of one criterion: a verdict and a one-line summary of the worst values.
struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn cli_config(opts: JobOptions) -> JobConfig {
    JobConfig::merge(JobFile::default(), &JobOptions { grid: Some("64x64".into()), margin: Some(MARGIN), ..opts })
        .unwrap()
}

fn revolution_02() -> Chart {
    Chart::revolution(Profile::parse("1 + 0.2*z^2").unwrap(), -1.0, 1.0).unwrap()
}

fn compatibility() -> Verdict {
    let surfaces: [(&str, Option<&str>); 5] = [
        ("sphere", None),
        ("cylinder", None),
        ("catenoid", None),
        ("torus", None),
        ("revolution", Some("1 + 0.2*z^2")),
    ];
    let (mut gauss, mut codazzi) = (0.0f64, 0.0f64);
    let mut frames = 0;
    for (kind, profile) in surfaces {
        let cfg = cli_config(JobOptions {
            surface: Some(kind.into()),
            profile: profile.map(str::to_string),
            zmin: profile.map(|_| -1.0),
            zmax: profile.map(|_| 1.0),
            ..Default::default()
        });
        let r = jobs::run_check(&cfg).unwrap();
        for (label, _) in jobs::check_frames() {
            gauss = gauss.max(r.get(&format!("gauss[{label}]")).unwrap().max.unwrap());
            codazzi = codazzi.max(r.get(&format!("codazzi[{label}]")).unwrap().max.unwrap());
            frames += 1;
        }
    }
    verdict(
        frames == 15 && gauss < 1e-6 && codazzi < 1e-5,
        format!("5 surfaces x 3 frames: max Gauss {gauss:.2e} (< 1e-6), max Codazzi {codazzi:.2e} (< 1e-5)"),
    )
}

fn metric_formula() -> Verdict {
    let kinds = ["plane", "annulus", "sphere", "cylinder", "catenoid", "torus", "helicoid"];
    let mut worst = 0.0f64;
    let mut skipped = 0;
    let mut charts: Vec<JobConfig> = kinds
        .iter()
        .map(|k| cli_config(JobOptions { surface: Some(k.to_string()), ..Default::default() }))
        .collect();
    charts.push(cli_config(JobOptions {
        profile: Some("1 + 0.2*z^2".into()),
        zmin: Some(-1.0),
        zmax: Some(1.0),
        ..Default::default()
    }));
    for cfg in &charts {
        let r = jobs::run_check(cfg).unwrap();
        match r.get("metric-K").unwrap().max {
            Some(m) => worst = worst.max(m),
            None => skipped += 1,
        }
    }
    let mut sphere = 0.0f64;
    for radius in [1.0, 2.5] {
        let r = jobs::run_check(&cli_config(JobOptions {
            surface: Some("sphere".into()),
            radius: Some(radius),
            ..Default::default()
        }))
        .unwrap();
        sphere = sphere.max(r.get("sphere-K").unwrap().max.unwrap());
    }
    verdict(
        skipped == 0 && worst < 1e-6 && sphere < 1e-6,
        format!("8 orthogonal charts: max |K_metric - det| {worst:.2e}; sphere |K - 1/R^2| {sphere:.2e} (< 1e-6)"),
    )
}

fn polar_and_energy_forms() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_f = 0.0f64;
    for _ in 0..1000 {
        let nu = loop {
            let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if v.norm() > 0.1 {
                break v.normalize();
            }
        };
        let y: Vec<f64> = (0..9).map(|_| rng.random_range(-2.0..2.0)).collect();
        let a = Mat3::from_fn(|i, j| y[3 * i + j]);
        let p = Mat3::identity() - nu.outer(nu);
        let f = a.matmul(&p);
        let s = surface_polar(&f, nu).unwrap();
        worst_f = worst_f.max((f - s.r.matmul(&s.u)).norm());
    }
    let mut worst_forms = 0.0f64;
    let mut evaluated = 0usize;
    for (chart, def) in deformation_catalog() {
        let g = grid(&chart);
        for (_, pk) in g.map_interior(|n| kinematics_at(&def, &chart, n.u, n.v).unwrap()) {
            let e = energy_forms(&pk);
            worst_forms = worst_forms.max(e.form_defect());
            evaluated += 1;
        }
    }
    verdict(
        worst_f < 1e-10 && worst_forms < 1e-6,
        format!("1000 random F: max |F - RU| {worst_f:.2e} (< 1e-10); dual forms over {evaluated} points: {worst_forms:.2e} (< 1e-6)"),
    )
}

/// Every deformation the suite constructs, with its source chart.
fn deformation_catalog() -> Vec<(Chart, Deformation)> {
    let mut out = Vec::new();
    let cat = Chart::catenoid(1.0);
    for k in 0..=6 {
        out.push((cat.clone(), bonnet_deformation(&cat, k as f64 * PI / 6.0).unwrap()));
    }
    for m in [
        evert_revolution(Profile::parse("cosh(z)").unwrap(), 0.0, 2.0).unwrap(),
        evert_chart(Chart::cylinder(1.0)).unwrap(),
        evert_chart(Chart::catenoid(1.0).with_domain(Domain::new(0.0, 2.0 * PI, 0.0, 2.0))).unwrap(),
        evert_revolution(Profile::parse("1 + z").unwrap(), 0.0, 1.0).unwrap(),
        evert_revolution(Profile::parse("sqrt(1 - z^2)").unwrap(), -0.8, 0.8).unwrap(),
    ] {
        out.push((m.chart, m.deformation));
    }
    out.push((Chart::polar_plane(), Deformation::spatial(SpatialMap::ComplexSquare)));
    let torus = Chart::torus(2.0, 0.6);
    out.push((torus.clone(), Deformation::spatial(SpatialMap::ZTwist { rate: 0.9 })));
    out.push((
        torus.clone(),
        Deformation::spatial(SpatialMap::parse_expr("x + 0.1*y*z", "y*(1 + 0.2*x)", "z + 0.3*x*x").unwrap()),
    ));
    out.push((
        revolution_02(),
        Deformation::spatial(SpatialMap::Scale(1.3)).then(SpatialMap::rotation(Vec3::new(1.0, 1.0, 0.0), 0.8)),
    ));
    out
}

fn theorema_egregium() -> Verdict {
    let m = evert_revolution(Profile::parse("cosh(z)").unwrap(), 0.0, 2.0).unwrap();
    let g = grid(&m.chart);
    let image = ImageSurface::new(&m.chart, &m.deformation);
    let k_defect = g
        .map_interior(|n| (gaussian_curvature(&image, n.u, n.v) - gaussian_curvature(&m.chart, n.u, n.v)).abs())
        .into_iter()
        .fold(0.0f64, |a, (_, x)| a.max(x));
    let e = theorema_egregium_check(&m.deformation, &m.chart, &g).unwrap();
    verdict(
        k_defect < 1e-6 && e.curvature_defect.max < 1e-6 && e.a3.max < 1e-6,
        format!(
            "half catenoid: max |K* - K| {k_defect:.2e} (image chart), {:.2e} (image normal); max |a3| {:.2e}",
            e.curvature_defect.max, e.a3.max
        ),
    )
}

fn eversion_identities() -> Verdict {
    let maps = [
        ("cylinder", evert_chart(Chart::cylinder(1.0)).unwrap()),
        (
            "catenoid",
            evert_chart(Chart::catenoid(1.0).with_domain(Domain::new(0.0, 2.0 * PI, 0.0, 2.0))).unwrap(),
        ),
    ];
    let (mut flip, mut k1, mut energy) = (0.0f64, 0.0f64, 0.0f64);
    for (_, m) in &maps {
        let r = eversion_check(m, &grid(&m.chart)).unwrap();
        flip = flip.max(r.sign_flip.max);
        k1 = k1.max(r.kappa1.max);
        energy = energy.max(r.w_s.max).max(r.w_d.max).max(r.w_b.max);
    }
    verdict(
        flip < 1e-5 && k1 < 1e-6 && energy < 1e-8,
        format!("cylinder, catenoid: flip residual {flip:.2e} (< 1e-5), |k1* + k1| {k1:.2e} (< 1e-6), energies {energy:.2e} (< 1e-8)"),
    )
}

fn soft_elasticity() -> Verdict {
    let cat = Chart::catenoid(1.0);
    let g = grid(&cat);
    let (mut energy, mut h_star, mut h_chart) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..=6 {
        let alpha = k as f64 * PI / 6.0;
        let r = bonnet_check(&cat, alpha, &g).unwrap();
        energy = energy.max(r.w_s.max).max(r.w_d.max).max(r.w_b.max);
        h_star = h_star.max(r.image_mean_curvature.max);
        let def = bonnet_deformation(&cat, alpha).unwrap();
        let image = ImageSurface::new(&cat, &def);
        for (_, h) in g.map_interior(|n| 0.5 * shape(&image, n.u, n.v).1.trace()) {
            h_chart = h_chart.max(h.abs());
        }
    }
    let rms = bonnet_helicoid_rms(&cat, PI / 2.0, &g).unwrap();
    verdict(
        energy < 1e-8 && h_star < 1e-6 && h_chart < 1e-6 && rms < 1e-6,
        format!("7 angles: energies {energy:.2e} (< 1e-8), |H*| {:.2e} (< 1e-6); helicoid RMS {rms:.2e} (< 1e-6)", h_star.max(h_chart)),
    )
}

fn sphere_rigidity_suite() -> Verdict {
    let cap = Chart::sphere(1.0).with_domain(Domain::new(0.2, 1.0, 0.0, 2.0 * PI));
    let g = grid(&cap);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let mut all_isometric = true;
    for _ in 0..20 {
        let z: f64 = rng.random_range(-1.0..1.0);
        let phi: f64 = rng.random_range(0.0..2.0 * PI);
        let s = (1.0 - z * z).sqrt();
        let axis = Vec3::new(s * phi.cos(), s * phi.sin(), z);
        let def = Deformation::spatial(SpatialMap::rotation(axis, rng.random_range(0.0..PI)));
        let r = sphere_rigidity(&def, &cap, &g, 1e-8).unwrap();
        all_isometric &= r.isometric;
        worst = worst.max(r.h_norm.max);
    }
    let twist = Deformation::spatial(SpatialMap::ZTwist { rate: 0.8 });
    let control = classify(&twist, &cap, &g, 1e-8).unwrap();
    verdict(
        all_isometric && worst < 1e-8 && !control.isometric,
        format!(
            "20 rotations: max |H| {worst:.2e} (< 1e-8); twisted sphere map isometric = {} (conformal defect {:.2e})",
            control.isometric, control.conformal_defect.max
        ),
    )
}

fn conformal_laws() -> Verdict {
    let chart = Chart::polar_plane();
    let def = Deformation::spatial(SpatialMap::ComplexSquare);
    let g = grid(&chart);
    let class = classify(&def, &chart, &g, 1e-8).unwrap();
    let lambda = g
        .map_interior(|n| {
            let s = deformation_sample(&def, &chart, n.u, n.v).unwrap();
            (conformal_stretch_sq(&s.c).sqrt() - 2.0 * n.u).abs()
        })
        .into_iter()
        .fold(0.0f64, |a, (_, x)| a.max(x));
    let frames = [
        FrameSpec::Principal,
        FrameSpec::Coordinate,
        FrameSpec::Coordinate.rotated(Field::parse("u*v").unwrap()),
    ];
    let mut laws = [0.0f64; 4];
    for frame in &frames {
        for (_, (l, k)) in g.map_interior(|n| {
            (
                conformal_laws_residuals(&def, &chart, frame, n.u, n.v).unwrap(),
                conformal_curvature_residual(&def, &chart, n.u, n.v).unwrap(),
            )
        }) {
            for (w, x) in laws.iter_mut().zip([l.a3, l.trace, l.mean_curvature, k.exponential]) {
                *w = w.max(x.abs());
            }
        }
    }
    let [a3, tr, mc, curv] = laws;
    verdict(
        class.conformal && lambda < 1e-8 && laws.iter().all(|&x| x < 1e-5),
        format!(
            "annulus z^2: conformal = {}, |lambda - 2r| {lambda:.2e}; a3 {a3:.2e}, trace {tr:.2e}, H law {mc:.2e}, K law {curv:.2e}",
            class.conformal
        ),
    )
}

fn integrability() -> Verdict {
    let mut worst = 0.0f64;
    let mut skipped = 0usize;
    let mut count = 0usize;
    for (chart, def) in deformation_catalog() {
        let g = grid(&chart);
        let conformal = classify(&def, &chart, &g, 1e-8).unwrap().conformal;
        for (_, pk) in g.map_interior(|n| kinematics_at(&def, &chart, n.u, n.v).unwrap()) {
            // The stretch eigenframe is not differentiable where an
            // anisotropic stretch becomes isotropic.
            if pk.sample.isotropic && !conformal {
                skipped += 1;
                continue;
            }
            worst = integrability_residuals(&pk).iter().fold(worst, |m, r| m.max(r.abs()));
            count += 1;
        }
    }
    let m = evert_revolution(Profile::parse("cosh(z)").unwrap(), 0.0, 2.0).unwrap();
    let beta = surfkin::expr::Expr::parse("0.3*sin(u)*cos(v)", &["u", "v"]).unwrap();
    let g = grid(&m.chart);
    let broken = g
        .map_interior(|n| kinematics_with(&m.deformation, &m.chart, n.u, n.v, Some(&beta)).unwrap())
        .into_iter()
        .map(|(_, pk)| integrability_residuals(&pk).iter().fold(0.0f64, |a, r| a.max(r.abs())))
        .fold(0.0f64, f64::max);
    verdict(
        worst < 1e-5 && broken > 1e-2,
        format!(
            "{} deformations, {count} points ({skipped} isotropic skipped): max {worst:.2e} (< 1e-5); perturbed R {broken:.2e} (> 1e-2)",
            deformation_catalog().len()
        ),
    )
}

fn run_cli(args: &[&str], out: &Path, threads: &str) -> i32 {
    let status = Command::new(env!("CARGO_BIN_EXE_surfkin"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("SURFKIN_THREADS", threads)
        .stderr(std::process::Stdio::null())
        .status()
        .expect("run surfkin");
    status.code().unwrap_or(-1)
}

fn determinism() -> Verdict {
    let jobs: [&[&str]; 7] = [
        &["check", "--surface", "torus", "--format", "csv"],
        &["check", "--surface", "catenoid", "--format", "json"],
        &["analyze", "--surface", "annulus", "--deformation", "conformal-square", "--format", "json", "--seed", "3"],
        &["evert", "--format", "csv"],
        &["bonnet", "--grid", "32x32", "--format", "json"],
        &["export-mesh", "--surface", "catenoid", "--deformation", "eversion", "--normals"],
        &["export-mesh", "--surface", "sphere", "--grid", "16x16"],
    ];
    let base = tempfile::tempdir().unwrap();
    let mut files = 0;
    let mut mismatches = Vec::new();
    for (k, args) in jobs.iter().enumerate() {
        let a = base.path().join(format!("{k}a"));
        let b = base.path().join(format!("{k}b"));
        let (ca, cb) = (run_cli(args, &a, "1"), run_cli(args, &b, "4"));
        if ca != cb || ca != 0 {
            mismatches.push(format!("{} exit {ca}/{cb}", args[0]));
        }
        let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        for name in names {
            files += 1;
            if std::fs::read(a.join(&name)).unwrap() != std::fs::read(b.join(&name)).unwrap_or_default() {
                mismatches.push(format!("{} {}", args[0], name.to_string_lossy()));
            }
        }
    }
    verdict(
        mismatches.is_empty() && files == 9,
        format!("{} jobs, {files} files compared across 1 and 4 threads, mismatches: {mismatches:?}", jobs.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("compatibility", compatibility),
        ("metric formula", metric_formula),
        ("polar and energy forms", polar_and_energy_forms),
        ("theorema egregium", theorema_egregium),
        ("eversion identities", eversion_identities),
        ("soft elasticity", soft_elasticity),
        ("sphere rigidity", sphere_rigidity_suite),
        ("conformal laws", conformal_laws),
        ("integrability", integrability),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let v = f();
        let secs = t0.elapsed().as_secs_f64();
        let tag = if v.pass && secs < 60.0 { "PASS" } else { "FAIL" };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("{tag} {:>2} {name}: {} [{secs:.1} s]", k + 1, v.detail);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
