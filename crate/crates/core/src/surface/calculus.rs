//! Surface gradient, curl, divergence and Laplacian on a chart.
//!
//! Derivatives are exact: fields are evaluated on dual numbers and pulled back
//! through the dual tangent basis. Finite-difference helpers are kept as an
//! independent route.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::real::{seed, Real};
use crate::tensor3::{skw3, Mat3, Ten3, Vec3};

use super::chart::{shape, Domain, Surface, Tangent};
use super::frame::{FrameSpec, ScalarField, VectorField};

/// Second-rank tensor field on the chart parameters.
pub trait TensorField: Sync {
    fn at<T: Real>(&self, u: T, v: T) -> Mat3<T>;
}

/// How the scalar gradient is pulled back from the chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Pullback {
    /// `(∂_u f/|r_u|) e_u + (∂_v f/|r_v|) e_v`; requires an orthogonal chart.
    Orthogonal { tol: f64 },
    /// Inverse-metric pullback, valid on any chart.
    General,
}

pub fn surface_gradient_scalar<S: Surface, F: ScalarField>(
    s: &S,
    f: &F,
    u: f64,
    v: f64,
    pullback: Pullback,
) -> Result<Vec3> {
    let (du, dv) = seed(u, v);
    let fd = f.at(du, dv);
    let t = Tangent::eval(s, u, v);
    match pullback {
        Pullback::General => Ok(t.grad_scalar(fd.du, fd.dv)),
        Pullback::Orthogonal { tol } => {
            let (a, b) = (t.ru.norm(), t.rv.norm());
            let defect = t.ru.dot(t.rv) / (a * b);
            if defect.abs() > tol {
                return Err(Error::NonOrthogonalChart { u, v, defect });
            }
            Ok(t.ru * (fd.du / (a * a)) + t.rv * (fd.dv / (b * b)))
        }
    }
}

pub fn surface_gradient_vector<S: Surface, W: VectorField>(s: &S, w: &W, u: f64, v: f64) -> Mat3 {
    let (du, dv) = seed(u, v);
    let (_, wu, wv) = w.at(du, dv).split();
    Tangent::eval(s, u, v).grad(wu, wv)
}

pub fn surface_curl<S: Surface, W: VectorField>(s: &S, w: &W, u: f64, v: f64) -> Vec3 {
    let (du, dv) = seed(u, v);
    let (_, wu, wv) = w.at(du, dv).split();
    Tangent::eval(s, u, v).curl(wu, wv)
}

pub fn surface_divergence<S: Surface, W: VectorField>(s: &S, w: &W, u: f64, v: f64) -> f64 {
    let (du, dv) = seed(u, v);
    let (_, wu, wv) = w.at(du, dv).split();
    Tangent::eval(s, u, v).div(wu, wv)
}

/// `Δₛf = divₛ ∇ₛf`.
pub fn surface_laplacian<S: Surface, F: ScalarField>(s: &S, f: &F, u: f64, v: f64) -> f64 {
    surface_divergence(s, &Gradient { surface: s, field: f }, u, v)
}

/// Gradient of a tensor field as a third-rank tensor, `(∇ₛF)_ijk = F_ij;k`.
pub fn surface_gradient_tensor<S: Surface, M: TensorField>(s: &S, f: &M, u: f64, v: f64) -> Ten3 {
    let (du, dv) = seed(u, v);
    let (_, fu, fv) = f.at(du, dv).split();
    let t = Tangent::eval(s, u, v);
    Ten3::mat_vec(&fu, t.gu) + Ten3::mat_vec(&fv, t.gv)
}

/// Defect of the condition for a tangential field to be a surface gradient:
/// `‖skw(∇ₛf) − skw((∇ₛν) f ⊗ ν)‖`.
pub fn scalar_integrability_residual<S: Surface, W: VectorField>(s: &S, f: &W, u: f64, v: f64) -> f64 {
    let g = surface_gradient_vector(s, f, u, v);
    let (t, k) = shape(s, u, v);
    let rhs = k.mul_vec(f.at(u, v)).outer(t.nu);
    (g.skw() - rhs.skw()).norm()
}

/// Defect of the condition for a tensor field `F` with `Fν = 0` to be a
/// surface gradient: `‖skw(∇ₛF) − skw(F(∇ₛν) ⊗ ν)‖`.
pub fn vector_integrability_residual<S: Surface, M: TensorField>(s: &S, f: &M, u: f64, v: f64) -> f64 {
    let g = surface_gradient_tensor(s, f, u, v);
    let (t, k) = shape(s, u, v);
    let rhs = Ten3::mat_vec(&f.at(u, v).matmul(&k), t.nu);
    (skw3(&g) - skw3(&rhs)).norm()
}

/// The unit normal as a field.
pub struct Normal<'a, S>(pub &'a S);

impl<S: Surface> VectorField for Normal<'_, S> {
    fn at<T: Real>(&self, u: T, v: T) -> Vec3<T> {
        Tangent::eval(self.0, u, v).nu
    }
}

/// One axis of a moving frame (0: e₁, 1: e₂, 2: ν).
pub struct FrameAxis<'a, S> {
    pub surface: &'a S,
    pub spec: &'a FrameSpec,
    pub axis: usize,
}

impl<S: Surface> VectorField for FrameAxis<'_, S> {
    fn at<T: Real>(&self, u: T, v: T) -> Vec3<T> {
        self.spec.eval(self.surface, u, v).axis(self.axis)
    }
}

/// Surface gradient of a frame axis, `∇ₛeᵢ`.
pub struct FrameGradient<'a, S> {
    pub surface: &'a S,
    pub spec: &'a FrameSpec,
    pub axis: usize,
}

impl<S: Surface> TensorField for FrameGradient<'_, S> {
    fn at<T: Real>(&self, u: T, v: T) -> Mat3<T> {
        let (du, dv) = seed(u, v);
        let (_, wu, wv) = self.spec.eval(self.surface, du, dv).axis(self.axis).split();
        Tangent::eval(self.surface, u, v).grad(wu, wv)
    }
}

/// `∇ₛf` as a vector field.
pub struct Gradient<'a, S, F> {
    pub surface: &'a S,
    pub field: &'a F,
}

impl<S: Surface, F: ScalarField> VectorField for Gradient<'_, S, F> {
    fn at<T: Real>(&self, u: T, v: T) -> Vec3<T> {
        let (du, dv) = seed(u, v);
        let f = self.field.at(du, dv);
        Tangent::eval(self.surface, u, v).grad_scalar(f.du, f.dv)
    }
}

/// A constant vector field.
pub struct Uniform(pub Vec3);

impl VectorField for Uniform {
    fn at<T: Real>(&self, _u: T, _v: T) -> Vec3<T> {
        Vec3::from_f64(self.0)
    }
}

/// Anything finite differences can be taken of.
pub trait FdValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}
impl<V: Copy + Add<Output = V> + Sub<Output = V> + Mul<f64, Output = V>> FdValue for V {}

/// Parameter steps for central differences.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdStep {
    pub hu: f64,
    pub hv: f64,
    pub richardson: bool,
}

impl FdStep {
    /// `h = 1e-4 · span` in each parameter, with one Richardson level.
    pub fn for_domain(d: &Domain) -> Self {
        FdStep { hu: 1e-4 * d.span_u().abs(), hv: 1e-4 * d.span_v().abs(), richardson: true }
    }
}

fn central<V: FdValue>(f: &impl Fn(f64) -> V, x: f64, h: f64) -> V {
    (f(x + h) - f(x - h)) * (0.5 / h)
}

/// Central difference in one variable, optionally Richardson-extrapolated:
/// `(4 D(h/2) − D(h)) / 3`.
pub fn fd_derivative<V: FdValue>(f: impl Fn(f64) -> V, x: f64, h: f64, richardson: bool) -> V {
    if richardson {
        let coarse = central(&f, x, h);
        let fine = central(&f, x, 0.5 * h);
        fine * (4.0 / 3.0) - coarse * (1.0 / 3.0)
    } else {
        central(&f, x, h)
    }
}

/// Partial derivatives `(∂_u f, ∂_v f)` by central differences.
pub fn fd_partials<V: FdValue>(f: impl Fn(f64, f64) -> V, u: f64, v: f64, step: FdStep) -> (V, V) {
    let fu = fd_derivative(|x| f(x, v), u, step.hu, step.richardson);
    let fv = fd_derivative(|y| f(u, y), v, step.hv, step.richardson);
    (fu, fv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::chart::Chart;
    use crate::surface::frame::Field;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    struct PolarAngle;
    impl ScalarField for PolarAngle {
        fn at<T: Real>(&self, u: T, _v: T) -> T {
            u
        }
    }

    #[test]
    fn constants_have_no_derivatives() {
        let c = Chart::torus(2.0, 0.5);
        let g = surface_gradient_scalar(&c, &Field::Const(3.0), 0.4, 0.2, Pullback::General).unwrap();
        assert_eq!(g, Vec3::zero());
        let w = Uniform(Vec3::new(1.0, -2.0, 0.5));
        assert!(surface_gradient_vector(&c, &w, 0.4, 0.2).norm() == 0.0);
        assert!(surface_curl(&c, &w, 0.4, 0.2).norm() == 0.0);
        assert!(surface_divergence(&c, &w, 0.4, 0.2) == 0.0);
    }

    #[test]
    fn sphere_polar_angle_gradient() {
        let r = 1.5;
        let c = Chart::sphere(r);
        let (u, v) = (1.2, 0.7);
        let g = surface_gradient_scalar(&c, &PolarAngle, u, v, Pullback::Orthogonal { tol: 1e-10 }).unwrap();
        let e_u = Tangent::eval(&c, u, v).ru.normalize();
        assert!((g - e_u * (1.0 / r)).norm() < 1e-14);
        let gg = surface_gradient_scalar(&c, &PolarAngle, u, v, Pullback::General).unwrap();
        assert!((g - gg).norm() < 1e-14);
    }

    #[test]
    fn non_orthogonal_chart_needs_general_pullback() {
        let d = Domain::new(-1.0, 1.0, -1.0, 1.0);
        let c = Chart::parse_custom("u + 0.5*v", "v", "0", d).unwrap();
        let f = Field::parse("u*v").unwrap();
        let r = surface_gradient_scalar(&c, &f, 0.2, 0.3, Pullback::Orthogonal { tol: 1e-8 });
        assert!(matches!(r, Err(Error::NonOrthogonalChart { .. })));
        // x = u + v/2, y = v, so f = (x − y/2) y and ∇f = (y, x − y)
        let g = surface_gradient_scalar(&c, &f, 0.2, 0.3, Pullback::General).unwrap();
        let (x, y) = (0.2 + 0.15, 0.3);
        assert!((g - Vec3::new(y, x - y, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn divergence_of_normal_is_twice_mean_curvature() {
        let r = 0.8;
        let c = Chart::sphere(r);
        assert_relative_eq!(surface_divergence(&c, &Normal(&c), 0.9, 2.0), 2.0 / r, epsilon = 1e-12);
        let g = surface_gradient_vector(&c, &Normal(&c), 0.9, 2.0);
        let nu = Tangent::eval(&c, 0.9, 2.0).nu;
        assert!(g.mul_vec(nu).norm() < 1e-14);
    }

    #[test]
    fn curl_is_axial_of_twice_skew_gradient() {
        let c = Chart::torus(2.0, 0.5);
        let spec = FrameSpec::Coordinate;
        let w = FrameAxis { surface: &c, spec: &spec, axis: 0 };
        let g = surface_gradient_vector(&c, &w, 0.5, 1.0);
        let curl = surface_curl(&c, &w, 0.5, 1.0);
        let ax = crate::tensor3::axial(&(g - g.transpose()), 1e-12).unwrap();
        assert!((ax - curl).norm() < 1e-13);
        assert_relative_eq!(surface_divergence(&c, &w, 0.5, 1.0), g.trace(), epsilon = 1e-14);
    }

    #[test]
    fn sphere_laplacian_of_height() {
        // z = R cos u is a first spherical harmonic: Δz = −2z/R².
        let r = 1.3;
        let c = Chart::sphere(r);
        let f = Field::parse("1.3*cos(u)").unwrap();
        let (u, v) = (0.7, 0.2);
        assert_relative_eq!(surface_laplacian(&c, &f, u, v), -2.0 * r * u.cos() / (r * r), epsilon = 1e-12);
    }

    #[test]
    fn frame_gradients_are_integrable() {
        let charts = [Chart::torus(2.0, 0.5), Chart::catenoid(1.0), Chart::sphere(1.0)];
        let spec = FrameSpec::Principal.rotated(Field::parse("u*v").unwrap());
        for c in &charts {
            for axis in 0..2 {
                let f = FrameGradient { surface: c, spec: &spec, axis };
                let r = vector_integrability_residual(c, &f, 0.9, 0.4);
                assert!(r < 1e-10, "{} {axis}: {r}", c.name());
            }
        }
    }

    #[test]
    fn non_gradient_tensor_fails_integrability() {
        // F = P(ν) on the unit sphere scaled by the polar angle is not a gradient.
        struct Bad<'a>(&'a Chart);
        impl TensorField for Bad<'_> {
            fn at<T: Real>(&self, u: T, v: T) -> Mat3<T> {
                let n = Tangent::eval(self.0, u, v).nu;
                (Mat3::identity() - n.outer(n)).scale(u)
            }
        }
        let c = Chart::sphere(1.0);
        assert!(vector_integrability_residual(&c, &Bad(&c), 1.0, 1.0) > 1e-2);
    }

    #[test]
    fn fd_partials_match_exact() {
        let c = Chart::catenoid(1.0);
        let step = FdStep::for_domain(&c.domain());
        let (u, v) = (0.9, 0.4);
        let (fu, fv) = fd_partials(|a, b| c.position(a, b), u, v, step);
        let t = Tangent::eval(&c, u, v);
        assert!((fu - t.ru).norm() < 1e-10);
        assert!((fv - t.rv).norm() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn gradients_are_curl_free(a in -1.0..1.0f64, b in -1.0..1.0f64, u in 0.4..2.6f64, v in 0.1..6.0f64) {
            let c = Chart::torus(2.0, 0.7);
            let f = Field::parse(&format!("sin({a}*u + v) * cos({b}*v - u)")).unwrap();
            let g = Gradient { surface: &c, field: &f };
            prop_assert!(surface_curl(&c, &g, u, v).dot(Tangent::eval(&c, u, v).nu).abs() < 1e-10);
            prop_assert!(scalar_integrability_residual(&c, &g, u, v) < 1e-10);
        }

        #[test]
        fn gradient_matches_directional_derivative(u in 0.5..2.5f64, v in 0.5..5.5f64, th in 0.0..6.28f64) {
            let c = Chart::torus(2.0, 0.5);
            let f = Field::parse("u^2*sin(v) + exp(0.1*u*v)").unwrap();
            let g = surface_gradient_scalar(&c, &f, u, v, Pullback::General).unwrap();
            let (du, dv) = (th.cos(), th.sin());
            let h = 1e-5;
            let curve = |s: f64| f.eval(u + s * du, v + s * dv);
            let xdot = |s: f64| c.position(u + s * du, v + s * dv);
            let lhs = fd_derivative(curve, 0.0, h, false);
            let tan = fd_derivative(xdot, 0.0, h, false);
            prop_assert!((lhs - g.dot(tan)).abs() < 1e-8);
        }
    }
}
