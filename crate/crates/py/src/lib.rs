//! Python bindings: run surfkin jobs and sample point kinematics.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use surfkin::kinematics::{energy_densities, kinematics_at, polar_in_basis};
use surfkin::surface::sample;
use surfkin::{Mat3, Vec3};
use surfkin_cli::{jobs, CliError, Command, JobConfig, JobFile, JobOptions};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn config(text: &str) -> Result<JobConfig, CliError> {
    JobConfig::merge(JobFile::parse(text)?, &JobOptions::default())
}

fn command(name: &str) -> PyResult<Command> {
    Ok(match name {
        "check" => Command::Check,
        "analyze" => Command::Analyze,
        "evert" => Command::Evert,
        "bonnet" => Command::Bonnet,
        "export-mesh" => Command::ExportMesh,
        _ => return Err(err(format!("unknown command {name:?}"))),
    })
}

fn mat(m: &Mat3) -> [[f64; 3]; 3] {
    [0, 1, 2].map(|i| m.row(i).as_array())
}

/// Runs a job described by TOML text, as the command-line tool would.
///
/// Returns a dict with `passed`, `report` (the JSON report, or None),
/// `meshes` (file name to OBJ text) and `warnings`.
#[pyfunction]
#[pyo3(signature = (command_name, job = ""))]
fn run<'py>(py: Python<'py>, command_name: &str, job: &str) -> PyResult<Bound<'py, PyDict>> {
    let cmd = command(command_name)?;
    let cfg = config(job).map_err(err)?;
    let out = py.detach(|| jobs::run(cmd, &cfg)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("passed", out.passed())?;
    let report = match &out.report {
        Some(r) => Some(py.import("json")?.call_method1("loads", (r.to_json(),))?),
        None => None,
    };
    d.set_item("report", report)?;
    let meshes = PyDict::new(py);
    for (name, text) in &out.meshes {
        meshes.set_item(name, text)?;
    }
    d.set_item("meshes", meshes)?;
    d.set_item("warnings", out.warnings.clone())?;
    Ok(d)
}

/// Geometry of the job's surface at `(u, v)`.
#[pyfunction]
fn surface_point<'py>(py: Python<'py>, job: &str, u: f64, v: f64) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config(job).map_err(err)?;
    let chart = cfg.chart("sphere").map_err(err)?;
    let s = sample(&chart, u, v).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("position", s.r.as_array())?;
    d.set_item("normal", s.nu.as_array())?;
    d.set_item("curvature", mat(&s.curvature))?;
    d.set_item("kappa1", s.kappa1)?;
    d.set_item("kappa2", s.kappa2)?;
    d.set_item("mean_curvature", s.mean_curvature)?;
    d.set_item("gaussian_curvature", s.gaussian_curvature)?;
    d.set_item("umbilic", s.umbilic)?;
    Ok(d)
}

/// Stretch, rotation and energy densities of the job's deformation at `(u, v)`.
#[pyfunction]
fn kinematics<'py>(py: Python<'py>, job: &str, u: f64, v: f64) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config(job).map_err(err)?;
    let chart = cfg.chart("sphere").map_err(err)?;
    let def = cfg.deformation(&chart, "identity").map_err(err)?;
    let pk = kinematics_at(&def, &chart, u, v).map_err(err)?;
    let e = energy_densities(&pk).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("lambda1", pk.sample.lambda1)?;
    d.set_item("lambda2", pk.sample.lambda2)?;
    d.set_item("rotation", mat(&pk.sample.r))?;
    d.set_item("a", pk.rot.a.map(|a| a.as_array()))?;
    d.set_item("image_normal", pk.sample.nu_star.as_array())?;
    d.set_item("w_s", e.w_s)?;
    d.set_item("w_d", e.w_d)?;
    d.set_item("w_b", e.w_b)?;
    Ok(d)
}

/// Polar decomposition `F = RU = VR` of a tangential `F`, given a positive
/// orthonormal source frame `(t1, t2, nu)`.
#[pyfunction]
fn polar<'py>(
    py: Python<'py>,
    f: [[f64; 3]; 3],
    t1: [f64; 3],
    t2: [f64; 3],
    nu: [f64; 3],
) -> PyResult<Bound<'py, PyDict>> {
    let f = Mat3::from_fn(|i, j| f[i][j]);
    let s = polar_in_basis(&f, Vec3::from_array(t1), Vec3::from_array(t2), Vec3::from_array(nu));
    let d = PyDict::new(py);
    d.set_item("r", mat(&s.r))?;
    d.set_item("u", mat(&s.u))?;
    d.set_item("v", mat(&s.v))?;
    d.set_item("lambda1", s.lambda1)?;
    d.set_item("lambda2", s.lambda2)?;
    d.set_item("defect", s.reconstruction_defect())?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "surfkin")]
fn surfkin_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(surface_point, m)?)?;
    m.add_function(wrap_pyfunction!(kinematics, m)?)?;
    m.add_function(wrap_pyfunction!(polar, m)?)?;
    Ok(())
}
