use nalgebra::{Matrix3, Quaternion, Rotation3, UnitQuaternion};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::real::Real;
use crate::surface::{
    fd_derivative, regular_point, surface_gradient_tensor, Chart, FdStep, Surface, Tangent, TensorField,
};
use crate::tensor3::{circ_mt, wmat, Mat3, Ten3, Vec3};

use super::deformation::Deformation;
use super::polar::{deformation_sample, sample_at, DeformationSample};

/// Invariant rotation gradient `H = Rᵀ∇ₛR` and its three tangential vectors
/// `H = W(b₁)⊗a₁ + W(b₂)⊗a₂ + W(b₃)⊗a₃` on an orthonormal basis `b`.
#[derive(Clone, Copy, Debug)]
pub struct RotationGradient {
    pub h: Ten3,
    pub a: [Vec3; 3],
    pub basis: [Vec3; 3],
    /// The basis is not a stretch eigenframe because `λ₁ = λ₂`.
    pub fallback_basis: bool,
}

impl RotationGradient {
    pub fn from_h(h: Ten3, basis: [Vec3; 3], fallback_basis: bool) -> Self {
        RotationGradient { h, a: a_vectors(&h, &basis), basis, fallback_basis }
    }

    /// `‖H − Σ W(bᵢ)⊗aᵢ‖`.
    pub fn reconstruction_residual(&self) -> f64 {
        (self.h - reconstruct(&self.basis, &self.a)).norm()
    }

    /// Re-expresses the same `H` on another orthonormal basis.
    pub fn in_basis(&self, basis: [Vec3; 3]) -> Self {
        Self::from_h(self.h, basis, false)
    }
}

/// `aᵢ = ½ W(bᵢ)∘H`, using `W(bᵢ)·W(bⱼ) = 2δᵢⱼ`.
pub fn a_vectors(h: &Ten3, basis: &[Vec3; 3]) -> [Vec3; 3] {
    basis.map(|b| circ_mt(&wmat(b), h) * 0.5)
}

pub fn reconstruct(basis: &[Vec3; 3], a: &[Vec3; 3]) -> Ten3 {
    (0..3).fold(Ten3::zero(), |acc, i| acc + Ten3::mat_vec(&wmat(basis[i]), a[i]))
}

/// The polar rotation field of a deformation, optionally turned about `ν*`
/// by an angle field `β(u, v)`.
pub struct PolarRotation<'a> {
    pub chart: &'a Chart,
    pub def: &'a Deformation,
    pub perturbation: Option<&'a Expr>,
}

impl TensorField for PolarRotation<'_> {
    fn at<T: Real>(&self, u: T, v: T) -> Mat3<T> {
        let (_, s) = sample_at(self.chart, self.def, u, v);
        match self.perturbation {
            Some(beta) => s.perturb_rotation(beta.eval(&[u, v])).r,
            None => s.r,
        }
    }
}

/// `H = Rᵀ∇ₛR` for any rotation field on a surface.
pub fn rotation_field_gradient<S: Surface, M: TensorField>(s: &S, r: &M, u: f64, v: f64) -> Ten3 {
    let grad = surface_gradient_tensor(s, r, u, v);
    Ten3::left_mul(&r.at(u, v).transpose(), &grad)
}

fn stretch_basis(s: &DeformationSample) -> [Vec3; 3] {
    [s.u1, s.u2, s.nu]
}

/// Rotation gradient of a deformation on its stretch frame `(u₁, u₂, ν)`.
pub fn rotation_gradient(def: &Deformation, chart: &Chart, u: f64, v: f64) -> Result<RotationGradient> {
    let s = deformation_sample(def, chart, u, v)?;
    let field = PolarRotation { chart, def, perturbation: None };
    let h = rotation_field_gradient(chart, &field, u, v);
    if !h.max_abs().is_finite() {
        return Err(Error::Numerical(format!("non-finite rotation gradient at ({u}, {v})")));
    }
    Ok(RotationGradient::from_h(h, stretch_basis(&s), s.isotropic))
}

pub(crate) fn to_na(m: &Mat3) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| m.m[i][j])
}

pub(crate) fn from_na(m: &Matrix3<f64>) -> Mat3 {
    Mat3::from_fn(|i, j| m[(i, j)])
}

/// Unit quaternion of a rotation matrix, with non-negative scalar part.
pub fn quaternion_of(r: &Mat3) -> UnitQuaternion<f64> {
    let q = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(to_na(r)));
    if q.w < 0.0 {
        UnitQuaternion::new_unchecked(-q.into_inner())
    } else {
        q
    }
}

pub fn rotation_of(q: &UnitQuaternion<f64>) -> Mat3 {
    from_na(q.to_rotation_matrix().matrix())
}

/// `H` by central differences of the quaternion of `R`.
///
/// Stencil quaternions are sign-aligned with the central one, so the field is
/// differentiated on a continuous branch. With `q' = ½ q (0, ω)` the body
/// angular velocities give `H = Σ W(ω_k) ⊗ g_k`.
pub fn rotation_gradient_fd<S: Surface, M: TensorField>(s: &S, r: &M, u: f64, v: f64, step: FdStep) -> Ten3 {
    let q0 = quaternion_of(&r.at(u, v)).into_inner();
    let aligned = |uu: f64, vv: f64| -> Quaternion<f64> {
        let q = quaternion_of(&r.at(uu, vv)).into_inner();
        if q.dot(&q0) < 0.0 {
            -q
        } else {
            q
        }
    };
    let qu = fd_derivative(|x| aligned(x, v), u, step.hu, step.richardson);
    let qv = fd_derivative(|y| aligned(u, y), v, step.hv, step.richardson);
    let omega = |dq: Quaternion<f64>| {
        let w = q0.conjugate() * dq * 2.0;
        Vec3::new(w.i, w.j, w.k)
    };
    let t = Tangent::eval(s, u, v);
    Ten3::mat_vec(&wmat(omega(qu)), t.gu) + Ten3::mat_vec(&wmat(omega(qv)), t.gv)
}

/// Finite-difference rotation gradient of a deformation, on the stretch frame.
pub fn rotation_gradient_fd_of(def: &Deformation, chart: &Chart, u: f64, v: f64) -> Result<RotationGradient> {
    regular_point(chart, u, v)?;
    let s = deformation_sample(def, chart, u, v)?;
    let field = PolarRotation { chart, def, perturbation: None };
    let h = rotation_gradient_fd(chart, &field, u, v, FdStep::for_domain(&chart.domain()));
    Ok(RotationGradient::from_h(h, stretch_basis(&s), s.isotropic))
}

/// Rodrigues vector and the drilling and bending contents of a rotation.
#[derive(Clone, Copy, Debug)]
pub struct Contents {
    /// `W(a) = (R − Rᵀ)/(1 + tr R)`; `tan(θ/2)` times the axis.
    pub a: Vec3,
    pub a_nu: f64,
    pub d: Vec3,
    pub b: Vec3,
    /// False when `1 + tr R` vanishes and `a` lies at infinity.
    pub finite: bool,
}

/// Below this value of `1 + tr R` the Rodrigues vector is reported as infinite.
pub const RODRIGUES_TOL: f64 = 1e-10;

/// Splits `R = R_b R_d` into a drilling `R_d` about `ν` and a bending `R_b`
/// about a tangential axis.
///
/// The split is done on quaternions: with `q = (w, v)`, `v_ν = v·ν` and
/// `c = √(w² + v_ν²)`, the drilling factor is `(w, v_ν ν)/c`, which stays
/// well defined when `tr R = −1`.
pub fn rodrigues_split(r: &Mat3, nu: Vec3) -> (Mat3, Mat3, Contents) {
    let q = quaternion_of(r);
    let (w, vv) = (q.w, Vec3::new(q.i, q.j, q.k));
    let v_nu = vv.dot(nu);
    let v_t = vv - nu * v_nu;
    let cb = (w * w + v_nu * v_nu).sqrt();
    let (rd, rb) = if cb < 1e-15 {
        (Mat3::identity(), *r)
    } else {
        let (cd, sd) = (w / cb, v_nu / cb);
        let t = v_t * cd + nu.cross(v_t) * sd;
        let qd = UnitQuaternion::new_normalize(Quaternion::new(cd, nu.x * sd, nu.y * sd, nu.z * sd));
        let qb = UnitQuaternion::new_normalize(Quaternion::new(cb, t.x, t.y, t.z));
        (rotation_of(&qd), rotation_of(&qb))
    };
    (rd, rb, contents(r, nu))
}

/// Rodrigues vector and contents; `b = (Pa + a_ν ν × Pa)/(1 + a_ν²)`.
pub fn contents(r: &Mat3, nu: Vec3) -> Contents {
    let den = 1.0 + r.trace();
    if den <= RODRIGUES_TOL {
        let nan = Vec3::new(f64::NAN, f64::NAN, f64::NAN);
        return Contents { a: nan, a_nu: f64::NAN, d: nan, b: nan, finite: false };
    }
    let a = crate::tensor3::axial_unchecked(&(*r - r.transpose())) * (1.0 / den);
    let a_nu = a.dot(nu);
    let pa = a - nu * a_nu;
    let b = (pa + nu.cross(pa) * a_nu) * (1.0 / (1.0 + a_nu * a_nu));
    Contents { a, a_nu, d: nu * a_nu, b, finite: true }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::deformation::{rotation_matrix, SpatialMap};
    use crate::kinematics::polar::rotation_about;
    use crate::surface::{FrameSpec, Profile};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z).normalize()
    }

    #[test]
    fn uniform_rotation_has_no_gradient() {
        let c = Chart::torus(2.0, 0.6);
        let d = Deformation::spatial(SpatialMap::rotation(unit(1.0, 2.0, 0.3), 0.8));
        let g = rotation_gradient(&d, &c, 1.0, 2.5).unwrap();
        assert!(g.h.max_abs() < 1e-12);
        assert!(g.a.iter().all(|a| a.norm() < 1e-12));
    }

    #[test]
    fn exact_and_fd_gradients_agree() {
        let c = Chart::revolution(Profile::parse("cosh(z)").unwrap(), 0.0, 2.0).unwrap();
        let maps = [
            Deformation::eversion(&c).unwrap(),
            Deformation::spatial(SpatialMap::ZTwist { rate: 0.7 }),
            Deformation::spatial(SpatialMap::parse_expr("x + 0.1*y*z", "y*(1 + 0.2*x)", "z + 0.3*x*x").unwrap()),
        ];
        for d in &maps {
            for (u, v) in [(0.5, 0.4), (2.2, 1.3), (4.7, 1.7)] {
                let e = rotation_gradient(d, &c, u, v).unwrap();
                let f = rotation_gradient_fd_of(d, &c, u, v).unwrap();
                assert!((e.h - f.h).max_abs() < 1e-7, "{:e}", (e.h - f.h).max_abs());
                assert!(e.reconstruction_residual() < 1e-12);
                for a in e.a {
                    assert!(a.dot(e.basis[2]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn bonnet_a_vectors_match_closed_form() {
        let c = Chart::catenoid(1.0);
        for alpha in [0.4, 1.3, 2.9] {
            let d = Deformation::bonnet(&c, alpha).unwrap();
            for (u, v) in [(0.7, 0.3), (3.0, -0.6)] {
                let g = rotation_gradient(&d, &c, u, v).unwrap();
                let smp = crate::surface::sample(&c, u, v).unwrap();
                let f = FrameSpec::Principal.eval(&c, u, v);
                let g = g.in_basis([f.e1, f.e2, f.nu]);
                let (k1, k2) = (smp.kappa1, smp.kappa2);
                let (s, co) = (alpha.sin(), alpha.cos());
                let a1 = f.e1 * (k1 * s) + f.e2 * (k2 * (1.0 - co));
                let a2 = f.e1 * (k1 * (co - 1.0)) + f.e2 * (k2 * s);
                assert!((g.a[0] - a1).norm() < 1e-9, "{:?} {:?}", g.a[0], a1);
                assert!((g.a[1] - a2).norm() < 1e-9);
                assert!(g.a[2].norm() < 1e-9);
            }
        }
    }

    #[test]
    fn drilling_rotation_contents() {
        let nu = unit(0.2, -0.4, 1.0);
        for alpha in [0.3, -1.2, 2.5] {
            let r = rotation_about(nu, alpha);
            let (rd, rb, c) = rodrigues_split(&r, nu);
            assert!((rd - r).norm() < 1e-12);
            assert!((rb - Mat3::identity()).norm() < 1e-12);
            assert!((c.a - nu * (alpha / 2.0).tan()).norm() < 1e-12);
            assert!(c.b.norm() < 1e-12);
        }
    }

    #[test]
    fn bending_rotation_contents() {
        let nu = Vec3::E3;
        let e = unit(1.0, 1.0, 0.0);
        let r = rotation_about(e, 0.9);
        let (rd, rb, c) = rodrigues_split(&r, nu);
        assert!((rd - Mat3::identity()).norm() < 1e-12);
        assert!((rb - r).norm() < 1e-12);
        assert!(c.d.norm() < 1e-15);
        let (_, _, c) = rodrigues_split(&Mat3::identity(), nu);
        assert!(c.finite && c.b.norm() == 0.0 && c.d.norm() == 0.0);
    }

    #[test]
    fn half_turn_is_not_finite() {
        let nu = Vec3::E3;
        let r = rotation_about(Vec3::E1, PI);
        let (rd, rb, c) = rodrigues_split(&r, nu);
        assert!(!c.finite);
        assert!((rb.matmul(&rd) - r).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn split_recomposes(ax in -1.0..1.0f64, ay in -1.0..1.0f64, az in -1.0..1.0f64,
                            angle in -3.1..3.1f64, nx in -1.0..1.0f64, ny in -1.0..1.0f64, nz in 0.1..1.0f64) {
            let axis = Vec3::new(ax, ay, az);
            prop_assume!(axis.norm() > 1e-3);
            let nu = unit(nx, ny, nz);
            let r = rotation_matrix(axis, angle);
            let (rd, rb, c) = rodrigues_split(&r, nu);
            prop_assert!((rb.matmul(&rd) - r).norm() < 1e-10);
            prop_assert!((rd.mul_vec(nu) - nu).norm() < 1e-10);
            let (_, axis_b) = quaternion_of(&rb).axis_angle().map(|(a, t)| (t, a.into_inner())).unwrap_or((0.0, Matrix3::identity().column(0).into_owned()));
            if rb.trace() < 3.0 - 1e-9 {
                prop_assert!(Vec3::new(axis_b.x, axis_b.y, axis_b.z).dot(nu).abs() < 1e-8);
            }
            if c.finite {
                let w = wmat(c.a);
                prop_assert!((w - (r - r.transpose()) * (1.0 / (1.0 + r.trace()))).norm() < 1e-9);
                prop_assert!(c.b.dot(nu).abs() < 1e-10);
                let ab = c.b + c.d + c.b.cross(c.d);
                prop_assert!((ab - c.a).norm() < 1e-8 * (1.0 + c.a.norm_sq()));
            }
        }
    }
}
