use crate::error::{Error, Result};
use crate::real::{seed, Real};
use crate::surface::{regular_point, tangent_eigen, Chart, Tangent};
use crate::tensor3::{projector_unchecked, Mat3, Vec3};

use super::deformation::Deformation;

/// Relative gap below which the two principal stretches are treated as equal.
pub const STRETCH_ISOTROPY_REL: f64 = 1e-9;
/// Smallest principal stretch accepted before a deformation counts as degenerate.
pub const MIN_STRETCH: f64 = 1e-12;

/// Deformation gradient and its decompositions at one point.
///
/// `U` and `C` act on the source tangent plane, `V` and `B` on the image one.
#[derive(Clone, Copy, Debug)]
pub struct DeformationSample<T = f64> {
    pub f: Mat3<T>,
    pub c: Mat3<T>,
    pub b: Mat3<T>,
    pub r: Mat3<T>,
    pub u: Mat3<T>,
    pub v: Mat3<T>,
    pub lambda1: T,
    pub lambda2: T,
    pub u1: Vec3<T>,
    pub u2: Vec3<T>,
    pub v1: Vec3<T>,
    pub v2: Vec3<T>,
    pub nu: Vec3<T>,
    pub nu_star: Vec3<T>,
    /// `λ₁ = λ₂`; `u₁, u₂` then fall back to the reference basis.
    pub isotropic: bool,
}

impl<T: Real> DeformationSample<T> {
    /// Replaces `R` by `Q(ν*, β) R`, keeping `U`; used to build fields that are
    /// not rotations of any deformation.
    pub fn perturb_rotation(mut self, beta: T) -> Self {
        let q = rotation_about(self.nu_star, beta);
        self.r = q.matmul(&self.r);
        self.v1 = self.r.mul_vec(self.u1);
        self.v2 = self.r.mul_vec(self.u2);
        self.v = self.r.matmul(&self.u).matmul(&self.r.transpose());
        self
    }

    pub fn det_u(&self) -> T {
        self.lambda1 * self.lambda2
    }
}

impl DeformationSample {
    /// Pseudo-inverse of `V` on the image tangent plane.
    pub fn v_pinv(&self) -> Mat3 {
        self.v1.outer(self.v1) * (1.0 / self.lambda1) + self.v2.outer(self.v2) * (1.0 / self.lambda2)
    }

    /// `max(‖F − RU‖, ‖F − VR‖)`.
    pub fn reconstruction_defect(&self) -> f64 {
        let a = (self.f - self.r.matmul(&self.u)).norm();
        let b = (self.f - self.v.matmul(&self.r)).norm();
        a.max(b)
    }
}

/// Rotation by `angle` about the unit vector `n`.
pub fn rotation_about<T: Real>(n: Vec3<T>, angle: T) -> Mat3<T> {
    let w = crate::tensor3::wmat(n);
    Mat3::identity() + w.scale(angle.sin()) + w.matmul(&w).scale(T::one() - angle.cos())
}

/// `C = FᵀF`, `B = FFᵀ`.
pub fn cauchy_green<T: Real>(f: &Mat3<T>) -> (Mat3<T>, Mat3<T>) {
    (f.transpose().matmul(f), f.matmul(&f.transpose()))
}

/// Polar decomposition of a tangential `F`, with `(t1, t2, ν)` a positive
/// orthonormal frame of the source.
///
/// The image tangent plane gets the basis `s₁ = F t₁/|F t₁|`, `s₂ = ν* × s₁`;
/// in these bases `F` is a 2×2 matrix with positive determinant whose rotation
/// factor is written in closed form, so the whole computation stays smooth and
/// can run on dual numbers.
pub fn polar_in_basis<T: Real>(f: &Mat3<T>, t1: Vec3<T>, t2: Vec3<T>, nu: Vec3<T>) -> DeformationSample<T> {
    let f1 = f.mul_vec(t1);
    let f2 = f.mul_vec(t2);
    let s1 = f1.normalize();
    let nu_star = f1.cross(f2).normalize();
    let s2 = nu_star.cross(s1);
    let (a, b) = (s1.dot(f1), s1.dot(f2));
    let (c, d) = (s2.dot(f1), s2.dot(f2));
    let (p, q) = (a + d, c - b);
    let n = (p * p + q * q).sqrt();
    let (cs, sn) = (p / n, q / n);
    // R maps t₁ ↦ cs s₁ + sn s₂ and t₂ ↦ −sn s₁ + cs s₂.
    let r1 = s1.scale(cs) + s2.scale(sn);
    let r2 = s2.scale(cs) - s1.scale(sn);
    let r = r1.outer(t1) + r2.outer(t2) + nu_star.outer(nu);
    let u = r.transpose().matmul(f).sym();
    let eig = tangent_eigen(&u, t1, t2, STRETCH_ISOTROPY_REL);
    let v = r.matmul(&u).matmul(&r.transpose());
    let (cc, bb) = cauchy_green(f);
    DeformationSample {
        f: *f,
        c: cc,
        b: bb,
        r,
        u,
        v,
        lambda1: eig.l1,
        lambda2: eig.l2,
        u1: eig.p1,
        u2: eig.p2,
        v1: r.mul_vec(eig.p1),
        v2: r.mul_vec(eig.p2),
        nu,
        nu_star,
        isotropic: eig.isotropic,
    }
}

fn any_tangent(nu: Vec3) -> Vec3 {
    let p = projector_unchecked(nu);
    (0..3)
        .map(|k| p.col(k))
        .fold(Vec3::zero(), |best, c| if c.norm_sq() > best.norm_sq() { c } else { best })
        .normalize()
}

/// Polar decomposition `F = RU = VR` of a tangential tensor.
pub fn surface_polar(f: &Mat3, nu: Vec3) -> Result<DeformationSample> {
    let t1 = any_tangent(nu);
    let t2 = nu.cross(t1);
    let s = polar_in_basis(f, t1, t2, nu);
    check_sample(&s, f64::NAN, f64::NAN)?;
    Ok(s)
}

fn check_sample(s: &DeformationSample, u: f64, v: f64) -> Result<()> {
    if !(s.lambda2 >= MIN_STRETCH) || !s.r.is_finite() || !s.nu_star.is_finite() {
        return Err(Error::DegenerateDeformation {
            u,
            v,
            detail: format!("smallest principal stretch {:e}", s.lambda2),
        });
    }
    Ok(())
}

/// Source tangent data and `F = ∇ₛy`, generic so that it can be differentiated.
pub fn gradient_at<T: Real>(chart: &Chart, def: &Deformation, u: T, v: T) -> (Tangent<T>, Mat3<T>) {
    let t = Tangent::eval(chart, u, v);
    let (du, dv) = seed(u, v);
    let (_, yu, yv) = def.apply(chart, du, dv).split();
    let f = t.grad(yu, yv);
    (t, f)
}

/// Polar data on the chart's coordinate basis.
pub fn sample_at<T: Real>(chart: &Chart, def: &Deformation, u: T, v: T) -> (Tangent<T>, DeformationSample<T>) {
    let (t, f) = gradient_at(chart, def, u, v);
    let (t1, t2) = t.coordinate_basis();
    (t, polar_in_basis(&f, t1, t2, t.nu))
}

/// `F = ∇ₛy` at a chart point.
pub fn deformation_gradient(def: &Deformation, chart: &Chart, u: f64, v: f64) -> Result<Mat3> {
    Ok(deformation_sample(def, chart, u, v)?.f)
}

/// All polar and Cauchy–Green data at a chart point.
pub fn deformation_sample(def: &Deformation, chart: &Chart, u: f64, v: f64) -> Result<DeformationSample> {
    regular_point(chart, u, v)?;
    let (_, s) = sample_at(chart, def, u, v);
    if !s.f.is_finite() {
        return Err(Error::Numerical(format!("non-finite deformation gradient at ({u}, {v})")));
    }
    check_sample(&s, u, v)?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::deformation::{rotation_matrix, SpatialMap};
    use crate::surface::{Domain, Profile};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_gives_projector() {
        let c = Chart::torus(2.0, 0.7);
        let s = deformation_sample(&Deformation::identity(), &c, 0.4, 1.3).unwrap();
        let p = projector_unchecked(s.nu);
        assert!((s.f - p).norm() < 1e-14);
        assert!((s.r - Mat3::identity()).norm() < 1e-14);
        assert!((s.u - p).norm() < 1e-14);
        assert!((s.c - p).norm() < 1e-14);
        assert!((s.lambda1 - 1.0).abs() < 1e-14 && (s.lambda2 - 1.0).abs() < 1e-14);
        assert!(s.isotropic);
    }

    #[test]
    fn uniform_rotation() {
        let q = rotation_matrix(Vec3::new(0.3, -1.0, 0.5), 1.1);
        let d = Deformation::spatial(SpatialMap::Rigid { q, t: Vec3::new(1.0, 2.0, 3.0) });
        let c = Chart::sphere(1.5);
        let s = deformation_sample(&d, &c, 1.0, 2.0).unwrap();
        let p = projector_unchecked(s.nu);
        assert!((s.f - q.matmul(&p)).norm() < 1e-13);
        assert!((s.r - q).norm() < 1e-13);
        assert!((s.u - p).norm() < 1e-13);
    }

    #[test]
    fn eversion_gradient_closed_form() {
        let c = Chart::revolution(Profile::parse("cosh(z)").unwrap(), 0.0, 2.0).unwrap();
        let d = Deformation::eversion(&c).unwrap();
        for (u, z) in [(0.3, 0.2), (2.0, 1.1), (4.0, 1.9)] {
            let s = deformation_sample(&d, &c, u, z).unwrap();
            let t = Tangent::eval(&c, u, z);
            let (e1, e2) = t.coordinate_basis();
            let rp = z.sinh();
            let expect = e1.outer(e1)
                + (e2 * (rp * rp - 1.0) + t.nu * (2.0 * rp)).outer(e2) * (1.0 / (1.0 + rp * rp));
            assert!((s.f - expect).norm() < 1e-12, "{}", (s.f - expect).norm());
        }
    }

    #[test]
    fn stretched_plane() {
        let c = Chart::plane();
        let d = Deformation::parse_base("3*u + v", "2*v", "0").unwrap();
        let s = deformation_sample(&d, &c, 0.1, 0.2).unwrap();
        assert!(s.reconstruction_defect() < 1e-14);
        assert!((s.lambda1 * s.lambda2 - 6.0).abs() < 1e-13);
        let (c2, _) = cauchy_green(&s.f);
        assert!((c2 - s.u.matmul(&s.u)).norm() < 1e-13);
        assert!((s.b - s.v.matmul(&s.v)).norm() < 1e-13);
    }

    #[test]
    fn degenerate_map_is_rejected() {
        let c = Chart::plane().with_domain(Domain::new(-1.0, 1.0, -1.0, 1.0));
        let d = Deformation::parse_base("u", "0", "0").unwrap();
        assert!(matches!(deformation_sample(&d, &c, 0.2, 0.3), Err(Error::DegenerateDeformation { .. })));
    }

    fn random_case(seed: u64) -> (Mat3, Vec3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nu = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            .normalize();
        let vals: Vec<f64> = (0..9).map(|_| rng.random_range(-2.0..2.0)).collect();
        let g = Mat3::from_fn(|i, j| vals[3 * i + j]);
        (g.matmul(&projector_unchecked(nu)), nu)
    }

    proptest! {
        #[test]
        fn polar_reconstructs_random_tangential(seed in any::<u64>()) {
            let (f, nu) = random_case(seed);
            let s = match surface_polar(&f, nu) {
                Ok(s) => s,
                Err(_) => return Ok(()),
            };
            prop_assume!(s.lambda1 / s.lambda2 < 1e6);
            prop_assert!(s.reconstruction_defect() < 1e-10 * s.lambda1.max(1.0));
            prop_assert!(s.r.is_orthogonal(1e-10));
            prop_assert!((s.r.det() - 1.0).abs() < 1e-10);
            prop_assert!(s.u.is_symmetric(1e-12));
            prop_assert!(s.u.mul_vec(nu).norm() < 1e-12);
            prop_assert!((s.r.mul_vec(s.u1) - s.v1).norm() < 1e-12);
            prop_assert!(f.mul_vec(s.u1).cross(f.mul_vec(s.u2)).dot(s.nu_star) > 0.0);
        }

        #[test]
        fn perturbation_keeps_rotation(seed in any::<u64>(), beta in -3.0..3.0f64) {
            let (f, nu) = random_case(seed);
            if let Ok(s) = surface_polar(&f, nu) {
                let p = s.perturb_rotation(beta);
                prop_assert!(p.r.is_orthogonal(1e-10));
                prop_assert!((p.r.mul_vec(nu) - s.nu_star).norm() < 1e-10);
                let q = p.r.matmul(&s.r.transpose());
                prop_assert!((q.trace() - 1.0 - 2.0 * beta.cos()).abs() < 1e-9);
            }
        }
    }
}
