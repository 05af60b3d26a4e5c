//! Gauss and Peterson–Mainardi–Codazzi compatibility, and the metric formula
//! for the Gaussian curvature.

use crate::error::{Error, Result};
use crate::real::{seed, seed2, Real};
use crate::tensor3::{Mat3, Vec3};

use super::calculus::{fd_partials, FdStep};
use super::chart::{shape, tangent_eigen, Surface, Tangent, UMBILIC_REL};
use super::frame::{frame_data, regular_point, ConnectorSet, FrameData, FrameSpec};

/// Determinant of a tangential curvature tensor.
pub fn tangential_det<T: Real>(k: &Mat3<T>) -> T {
    let tr = k.trace();
    (tr * tr - k.matmul(k).trace()) * 0.5
}

/// `K = det ∇ₛν` at a point.
pub fn gaussian_curvature<S: Surface>(s: &S, u: f64, v: f64) -> f64 {
    tangential_det(&shape(s, u, v).1)
}

/// Frame data together with the chart partials of the connectors.
struct Connected {
    at: FrameData,
    cu: ConnectorSet,
    cv: ConnectorSet,
}

fn connected<S: Surface>(s: &S, spec: &FrameSpec, u: f64, v: f64) -> Result<Connected> {
    regular_point(s, u, v)?;
    let (du, dv) = seed(u, v);
    let fd = frame_data(s, spec, du, dv);
    let (c, c_u, c_v) = fd.conn.c.split();
    let (d1, d1u, d1v) = fd.conn.d1.split();
    let (d2, d2u, d2v) = fd.conn.d2.split();
    let at = FrameData {
        tangent: fd.tangent.re(),
        frame: super::frame::Frame { e1: fd.frame.e1.re(), e2: fd.frame.e2.re(), nu: fd.frame.nu.re() },
        conn: ConnectorSet { c, d1, d2 },
    };
    let out = Connected {
        at,
        cu: ConnectorSet { c: c_u, d1: d1u, d2: d2u },
        cv: ConnectorSet { c: c_v, d1: d1v, d2: d2v },
    };
    let finite = [out.cu.c, out.cu.d1, out.cu.d2, out.cv.c, out.cv.d1, out.cv.d2]
        .iter()
        .all(|w| w.is_finite());
    if !finite {
        return Err(Error::Numerical(format!("non-finite connector derivatives at ({u}, {v})")));
    }
    Ok(out)
}

/// Surface curls of `(c, d₁, d₂)`.
fn curls(t: &Tangent, cu: &ConnectorSet, cv: &ConnectorSet) -> [Vec3; 3] {
    [t.curl(cu.c, cv.c), t.curl(cu.d1, cv.d1), t.curl(cu.d2, cv.d2)]
}

fn gauss_from(curl_c: Vec3, nu: Vec3, k: f64) -> f64 {
    curl_c.dot(nu) + k
}

fn codazzi_from(curl: &[Vec3; 3], cs: &ConnectorSet, nu: Vec3) -> (f64, f64) {
    (
        curl[1].dot(nu) - cs.c.cross(cs.d2).dot(nu),
        curl[2].dot(nu) + cs.c.cross(cs.d1).dot(nu),
    )
}

/// `curlₛc·ν + K`.
pub fn gauss_residual<S: Surface>(s: &S, spec: &FrameSpec, u: f64, v: f64) -> Result<f64> {
    let c = connected(s, spec, u, v)?;
    let curl = curls(&c.at.tangent, &c.cu, &c.cv);
    Ok(gauss_from(curl[0], c.at.frame.nu, gaussian_curvature(s, u, v)))
}

/// `(curlₛd₁·ν − c×d₂·ν, curlₛd₂·ν + c×d₁·ν)`.
pub fn codazzi_residuals<S: Surface>(s: &S, spec: &FrameSpec, u: f64, v: f64) -> Result<(f64, f64)> {
    let c = connected(s, spec, u, v)?;
    let curl = curls(&c.at.tangent, &c.cu, &c.cv);
    Ok(codazzi_from(&curl, &c.at.conn, c.at.frame.nu))
}

/// The Codazzi equations in the curvature eigenframe:
/// `(e₂·∇ₛκ₁ − (κ₁−κ₂) e₁·c, e₁·∇ₛκ₂ − (κ₁−κ₂) e₂·c)`.
pub fn codazzi_principal_residuals<S: Surface>(s: &S, u: f64, v: f64) -> Result<(f64, f64)> {
    regular_point(s, u, v)?;
    let (du, dv) = seed(u, v);
    let (td, kd) = shape(s, du, dv);
    let (t1, t2) = td.coordinate_basis();
    let eig = tangent_eigen(&kd, t1, t2, UMBILIC_REL);
    if eig.isotropic {
        return Err(Error::Umbilic { u, v });
    }
    let t = td.re();
    let g1 = t.grad_scalar(eig.l1.du, eig.l1.dv);
    let g2 = t.grad_scalar(eig.l2.du, eig.l2.dv);
    let fd = frame_data(s, &FrameSpec::Principal, u, v);
    let (e1, e2, c) = (fd.frame.e1, fd.frame.e2, fd.conn.c);
    let gap = eig.l1.re - eig.l2.re;
    Ok((e2.dot(g1) - gap * e1.dot(c), e1.dot(g2) - gap * e2.dot(c)))
}

/// Residuals of the three vector identities linking all connectors:
///
/// ```text
/// curlₛc  + d₁×d₂ − c₁ d₁×ν − c₂ d₂×ν
/// curlₛd₁ − c×d₂  − d₁₁ d₁×ν − d₁₂ d₂×ν
/// curlₛd₂ + c×d₁  − d₂₁ d₁×ν − d₂₂ d₂×ν
/// ```
pub fn full_frame_compatibility<S: Surface>(s: &S, spec: &FrameSpec, u: f64, v: f64) -> Result<[Vec3; 3]> {
    let c = connected(s, spec, u, v)?;
    let curl = curls(&c.at.tangent, &c.cu, &c.cv);
    Ok(full_from(&curl, &c.at))
}

fn full_from(curl: &[Vec3; 3], at: &FrameData) -> [Vec3; 3] {
    let (f, k) = (&at.frame, &at.conn);
    let (e1, e2, nu) = (f.e1, f.e2, f.nu);
    let d1n = k.d1.cross(nu);
    let d2n = k.d2.cross(nu);
    [
        curl[0] + k.d1.cross(k.d2) - d1n * k.c.dot(e1) - d2n * k.c.dot(e2),
        curl[1] - k.c.cross(k.d2) - d1n * k.d1.dot(e1) - d2n * k.d1.dot(e2),
        curl[2] + k.c.cross(k.d1) - d1n * k.d2.dot(e1) - d2n * k.d2.dot(e2),
    ]
}

/// Connector data at the stencil point, with `e₁` sign-aligned to `ref_e1`.
fn aligned<S: Surface>(s: &S, spec: &FrameSpec, u: f64, v: f64, ref_e1: Vec3) -> ConnectorSet {
    let fd = frame_data(s, spec, u, v);
    if fd.frame.e1.dot(ref_e1) < 0.0 {
        // (e₁, e₂) → (−e₁, −e₂) keeps c and flips both curvature connectors.
        ConnectorSet { c: fd.conn.c, d1: -fd.conn.d1, d2: -fd.conn.d2 }
    } else {
        fd.conn
    }
}

fn connected_fd<S: Surface>(s: &S, spec: &FrameSpec, u: f64, v: f64, step: FdStep) -> Result<Connected> {
    regular_point(s, u, v)?;
    let at = frame_data(s, spec, u, v);
    let e1 = at.frame.e1;
    let (cu, cv) = fd_partials(
        |a, b| {
            let k = aligned(s, spec, a, b, e1);
            Triple([k.c, k.d1, k.d2])
        },
        u,
        v,
        step,
    );
    let pack = |w: Triple| ConnectorSet { c: w.0[0], d1: w.0[1], d2: w.0[2] };
    Ok(Connected { at, cu: pack(cu), cv: pack(cv) })
}

/// Gauss residual with connector derivatives taken by central differences.
pub fn gauss_residual_fd<S: Surface>(s: &S, spec: &FrameSpec, u: f64, v: f64, step: FdStep) -> Result<f64> {
    let c = connected_fd(s, spec, u, v, step)?;
    let curl = curls(&c.at.tangent, &c.cu, &c.cv);
    Ok(gauss_from(curl[0], c.at.frame.nu, gaussian_curvature(s, u, v)))
}

/// Codazzi residuals with connector derivatives taken by central differences.
pub fn codazzi_residuals_fd<S: Surface>(
    s: &S,
    spec: &FrameSpec,
    u: f64,
    v: f64,
    step: FdStep,
) -> Result<(f64, f64)> {
    let c = connected_fd(s, spec, u, v, step)?;
    let curl = curls(&c.at.tangent, &c.cu, &c.cv);
    Ok(codazzi_from(&curl, &c.at.conn, c.at.frame.nu))
}

/// Three vectors differentiated together.
#[derive(Clone, Copy)]
struct Triple([Vec3; 3]);

impl std::ops::Add for Triple {
    type Output = Triple;
    fn add(self, o: Triple) -> Triple {
        Triple([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl std::ops::Sub for Triple {
    type Output = Triple;
    fn sub(self, o: Triple) -> Triple {
        Triple([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl std::ops::Mul<f64> for Triple {
    type Output = Triple;
    fn mul(self, s: f64) -> Triple {
        Triple([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

/// Gaussian curvature from the metric of an orthogonal chart,
/// `K = −1/(AB) [∂_u(B_u/A) + ∂_v(A_v/B)]` with `A = |r_u|`, `B = |r_v|`.
pub fn metric_gaussian_curvature<S: Surface>(s: &S, u: f64, v: f64, tol: f64) -> Result<f64> {
    let t = regular_point(s, u, v)?;
    let defect = t.ru.dot(t.rv) / (t.ru.norm() * t.rv.norm());
    if defect.abs() > tol {
        return Err(Error::NonOrthogonalChart { u, v, defect });
    }
    let (du, dv) = seed2(u, v);
    let td = Tangent::eval(s, du, dv);
    let a = td.ru.norm();
    let b = td.rv.norm();
    // a, b carry two derivative levels: the inner level gives A_v, B_u as
    // fields, the outer level differentiates those once more.
    let q_u = b.du / a.re;
    let q_v = a.dv / b.re;
    let ab = a.re.re * b.re.re;
    Ok(-(q_u.du + q_v.dv) / ab)
}

/// The connector form of the Gaussian curvature,
/// `K = e₂·∇ₛ(c·e₁) − e₁·∇ₛ(c·e₂) − (c·e₁)² − (c·e₂)²`.
pub fn connector_gaussian_curvature<S: Surface>(s: &S, spec: &FrameSpec, u: f64, v: f64) -> Result<f64> {
    regular_point(s, u, v)?;
    let (du, dv) = seed(u, v);
    let fd = frame_data(s, spec, du, dv);
    let c1 = fd.conn.c.dot(fd.frame.e1);
    let c2 = fd.conn.c.dot(fd.frame.e2);
    let t = fd.tangent.re();
    let (e1, e2) = (fd.frame.e1.re(), fd.frame.e2.re());
    let g1 = t.grad_scalar(c1.du, c1.dv);
    let g2 = t.grad_scalar(c2.du, c2.dv);
    Ok(e2.dot(g1) - e1.dot(g2) - c1.re * c1.re - c2.re * c2.re)
}
