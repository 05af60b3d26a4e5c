use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::real::{seed, Dual};
use crate::surface::{regular_point, tangential_det, Chart, ConnectorSet, Tangent};
use crate::tensor3::{Mat3, Ten3, Vec3};

use super::deformation::Deformation;
use super::polar::{deformation_sample, sample_at, DeformationSample};
use super::rotation::RotationGradient;

/// Everything needed by the kinematic identities at one chart point.
///
/// Derivatives of `R`, `λᵢ`, `uᵢ`, `vᵢ` and `ν*` are exact: the polar
/// decomposition is evaluated once on dual numbers.
#[derive(Clone, Copy, Debug)]
pub struct PointKinematics {
    pub u: f64,
    pub v: f64,
    pub tangent: Tangent,
    pub sample: DeformationSample,
    pub rot: RotationGradient,
    /// `∇ₛν` of the source.
    pub curvature: Mat3,
    /// Connectors of the stretch frame `(u₁, u₂, ν)`.
    pub conn: ConnectorSet,
    pub grad_lambda: [Vec3; 2],
    /// `∇*ₛν*` of the image, from the image chart.
    pub image_curvature: Mat3,
    /// Connectors of `(v₁, v₂, ν*)` on the image, from the image chart.
    pub image_conn: ConnectorSet,
}

impl PointKinematics {
    pub fn gaussian_curvature(&self) -> f64 {
        tangential_det(&self.curvature)
    }

    /// `K*` read off the image chart.
    pub fn image_gaussian_curvature_direct(&self) -> f64 {
        tangential_det(&self.image_curvature)
    }

    pub fn mean_curvature(&self) -> f64 {
        0.5 * self.curvature.trace()
    }

    pub fn image_mean_curvature_direct(&self) -> f64 {
        0.5 * self.image_curvature.trace()
    }
}

fn split_vec(v: Vec3<Dual<f64>>) -> (Vec3, Vec3, Vec3) {
    v.split()
}

/// Evaluates all point data of a deformation.
pub fn kinematics_at(def: &Deformation, chart: &Chart, u: f64, v: f64) -> Result<PointKinematics> {
    kinematics_with(def, chart, u, v, None)
}

/// As [`kinematics_at`], with the polar rotation turned about `ν*` by the
/// angle field `beta(u, v)`. The result no longer comes from a deformation.
pub fn kinematics_with(
    def: &Deformation,
    chart: &Chart,
    u: f64,
    v: f64,
    beta: Option<&Expr>,
) -> Result<PointKinematics> {
    regular_point(chart, u, v)?;
    let base = deformation_sample(def, chart, u, v)?;
    let (du, dv) = seed(u, v);
    let (td, mut sd) = sample_at(chart, def, du, dv);
    if let Some(b) = beta {
        sd = sd.perturb_rotation(b.eval(&[du, dv]));
    }
    let t = td.re();
    let sample = match beta {
        Some(b) => base.perturb_rotation(b.eval(&[u, v])),
        None => base,
    };

    let (r, ru, rv) = sd.r.split();
    let grad_r = Ten3::mat_vec(&ru, t.gu) + Ten3::mat_vec(&rv, t.gv);
    let h = Ten3::left_mul(&r.transpose(), &grad_r);
    if !h.max_abs().is_finite() {
        return Err(Error::Numerical(format!("non-finite rotation gradient at ({u}, {v})")));
    }
    let rot = RotationGradient::from_h(h, [sample.u1, sample.u2, sample.nu], sample.isotropic);

    let (_, nu_u, nu_v) = split_vec(td.nu);
    let curvature = t.grad(nu_u, nu_v);

    let (_, u1u, u1v) = split_vec(sd.u1);
    let (u2, u2u, u2v) = split_vec(sd.u2);
    let pull = |a: Vec3, wu: Vec3, wv: Vec3| t.gu * a.dot(wu) + t.gv * a.dot(wv);
    let conn = ConnectorSet {
        c: pull(u2, u1u, u1v),
        d1: pull(t.nu, u1u, u1v),
        d2: pull(t.nu, u2u, u2v),
    };
    let grad_lambda = [
        t.grad_scalar(sd.lambda1.du, sd.lambda1.dv),
        t.grad_scalar(sd.lambda2.du, sd.lambda2.dv),
    ];

    // Image tangent basis y_u = F r_u, y_v = F r_v and its dual basis.
    let f = sample.f;
    let (yu, yv) = (f.mul_vec(t.ru), f.mul_vec(t.rv));
    let (e, ff, g) = (yu.dot(yu), yu.dot(yv), yv.dot(yv));
    let inv = 1.0 / (e * g - ff * ff);
    let gsu = (yu * g - yv * ff) * inv;
    let gsv = (yv * e - yu * ff) * inv;
    let pull_img = |a: Vec3, wu: Vec3, wv: Vec3| gsu * a.dot(wu) + gsv * a.dot(wv);
    let (ns, nsu, nsv) = split_vec(sd.nu_star);
    let image_curvature = nsu.outer(gsu) + nsv.outer(gsv);
    let (_, v1u, v1v) = split_vec(sd.v1);
    let (v2, v2u, v2v) = split_vec(sd.v2);
    let image_conn = ConnectorSet {
        c: pull_img(v2, v1u, v1v),
        d1: pull_img(ns, v1u, v1v),
        d2: pull_img(ns, v2u, v2v),
    };

    Ok(PointKinematics {
        u,
        v,
        tangent: t,
        sample,
        rot,
        curvature,
        conn,
        grad_lambda,
        image_curvature,
        image_conn,
    })
}

/// Image connectors from source data: `Vc* = R(c + a₃)`, `Vd₁* = R(d₁ − a₂)`,
/// `Vd₂* = R(d₂ + a₁)`.
pub fn image_connectors(pk: &PointKinematics) -> ConnectorSet {
    let s = &pk.sample;
    let a = &pk.rot.a;
    let vp = s.v_pinv();
    let map = |w: Vec3| vp.mul_vec(s.r.mul_vec(w));
    ConnectorSet {
        c: map(pk.conn.c + a[2]),
        d1: map(pk.conn.d1 - a[1]),
        d2: map(pk.conn.d2 + a[0]),
    }
}

/// `K* = [K + (a₁×a₂ − a₁×d₁ − a₂×d₂)·ν] / det U` on the stretch frame.
pub fn image_gaussian_curvature(pk: &PointKinematics) -> Result<f64> {
    let det = pk.sample.det_u();
    if !(det > 1e-12) {
        return Err(Error::DegenerateDeformation {
            u: pk.u,
            v: pk.v,
            detail: format!("det U = {det:e}"),
        });
    }
    let [a1, a2, _] = pk.rot.a;
    let (d1, d2) = (pk.conn.d1, pk.conn.d2);
    let w = a1.cross(a2) - a1.cross(d1) - a2.cross(d2);
    Ok((pk.gaussian_curvature() + w.dot(pk.sample.nu)) / det)
}

/// The three scalar integrability conditions on the stretch frame.
pub fn integrability_residuals(pk: &PointKinematics) -> [f64; 3] {
    let s = &pk.sample;
    let (l1, l2) = (s.lambda1, s.lambda2);
    let (u1, u2) = (s.u1, s.u2);
    let [a1, a2, a3] = pk.rot.a;
    let ConnectorSet { c, d1, d2 } = pk.conn;
    [
        l1 * (d1 - a2).dot(u2) - l2 * (d2 + a1).dot(u1),
        l1 * a3.dot(u2) + (l1 - l2) * c.dot(u2) - pk.grad_lambda[1].dot(u1),
        l2 * a3.dot(u1) + (l2 - l1) * c.dot(u1) + pk.grad_lambda[0].dot(u2),
    ]
}
