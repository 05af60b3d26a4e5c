use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::real::{seed, Real};
use crate::tensor3::Vec3;

use super::chart::{shape, tangent_eigen, Surface, Tangent, UMBILIC_REL};

/// Scalar field on the chart parameters.
pub trait ScalarField: Sync {
    fn at<T: Real>(&self, u: T, v: T) -> T;
}

/// Vector field on the chart parameters.
pub trait VectorField: Sync {
    fn at<T: Real>(&self, u: T, v: T) -> Vec3<T>;
}

/// A constant or an expression in `u, v`.
#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    Const(f64),
    Expr(Expr),
}

impl Field {
    pub fn parse(text: &str) -> Result<Field> {
        Ok(Field::Expr(Expr::parse(text, &["u", "v"])?))
    }

    pub fn eval<T: Real>(&self, u: T, v: T) -> T {
        match self {
            Field::Const(c) => T::cst(*c),
            Field::Expr(e) => e.eval(&[u, v]),
        }
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Field::Const(_))
    }
}

impl ScalarField for Field {
    fn at<T: Real>(&self, u: T, v: T) -> T {
        self.eval(u, v)
    }
}

/// Positively oriented orthonormal frame `(e₁, e₂, ν)`.
#[derive(Clone, Copy, Debug)]
pub struct Frame<T = f64> {
    pub e1: Vec3<T>,
    pub e2: Vec3<T>,
    pub nu: Vec3<T>,
}

impl<T: Real> Frame<T> {
    /// In-plane rotation by `alpha` about `ν`.
    pub fn rotate(self, alpha: T) -> Self {
        let (c, s) = (alpha.cos(), alpha.sin());
        Frame {
            e1: self.e1.scale(c) + self.e2.scale(s),
            e2: self.e2.scale(c) - self.e1.scale(s),
            nu: self.nu,
        }
    }

    pub fn axis(&self, i: usize) -> Vec3<T> {
        match i {
            0 => self.e1,
            1 => self.e2,
            _ => self.nu,
        }
    }
}

/// How a moving frame is attached to a chart.
#[derive(Clone, Debug, PartialEq)]
pub enum FrameSpec {
    /// Curvature eigenframe, `κ₁ ≥ κ₂`; the coordinate frame at umbilics.
    Principal,
    /// `e₁ = r_u/|r_u|`, `e₂ = ν × e₁`.
    Coordinate,
    /// A base frame turned by a scalar angle field.
    Rotated(Box<FrameSpec>, Field),
}

impl FrameSpec {
    pub fn rotated(self, alpha: Field) -> FrameSpec {
        FrameSpec::Rotated(Box::new(self), alpha)
    }

    pub fn eval<S: Surface, T: Real>(&self, s: &S, u: T, v: T) -> Frame<T> {
        match self {
            FrameSpec::Coordinate => {
                let t = Tangent::eval(s, u, v);
                let (e1, e2) = t.coordinate_basis();
                Frame { e1, e2, nu: t.nu }
            }
            FrameSpec::Principal => {
                let (t, k) = shape(s, u, v);
                let (t1, t2) = t.coordinate_basis();
                let eig = tangent_eigen(&k, t1, t2, UMBILIC_REL);
                Frame { e1: eig.p1, e2: eig.p2, nu: t.nu }
            }
            FrameSpec::Rotated(base, alpha) => base.eval(s, u, v).rotate(alpha.eval(u, v)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            FrameSpec::Principal => "principal".into(),
            FrameSpec::Coordinate => "coordinate".into(),
            FrameSpec::Rotated(b, Field::Const(c)) => format!("{}+rot({c})", b.label()),
            FrameSpec::Rotated(b, Field::Expr(e)) => format!("{}+rot({})", b.label(), e.source()),
        }
    }
}

/// Spin connector `c` and curvature connectors `d₁, d₂` of a moving frame.
#[derive(Clone, Copy, Debug)]
pub struct ConnectorSet<T = f64> {
    pub c: Vec3<T>,
    pub d1: Vec3<T>,
    pub d2: Vec3<T>,
}

impl ConnectorSet {
    /// `d₁·e₂ − d₂·e₁`, zero by symmetry of the curvature tensor.
    pub fn symmetry_defect(&self, f: &Frame) -> f64 {
        self.d1.dot(f.e2) - self.d2.dot(f.e1)
    }

    pub fn max_normal_component(&self, nu: Vec3) -> f64 {
        [self.c, self.d1, self.d2]
            .iter()
            .map(|w| w.dot(nu).abs())
            .fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(Vec3) -> Vec3) -> ConnectorSet {
        ConnectorSet { c: f(self.c), d1: f(self.d1), d2: f(self.d2) }
    }
}

/// Connectors of the frame turned by `alpha`: `c' = c + ∇ₛα` and the
/// curvature connectors rotate like the frame vectors.
pub fn transform_connectors(cs: &ConnectorSet, alpha: f64, grad_alpha: Vec3) -> ConnectorSet {
    let (c, s) = (alpha.cos(), alpha.sin());
    ConnectorSet {
        c: cs.c + grad_alpha,
        d1: cs.d1 * c + cs.d2 * s,
        d2: cs.d2 * c - cs.d1 * s,
    }
}

/// Tangent data, frame and connectors at one point.
#[derive(Clone, Copy, Debug)]
pub struct FrameData<T = f64> {
    pub tangent: Tangent<T>,
    pub frame: Frame<T>,
    pub conn: ConnectorSet<T>,
}

/// Connectors read off the gliding laws:
/// `c = (∇ₛe₁)ᵀe₂`, `dᵢ = (∇ₛeᵢ)ᵀν`.
pub fn frame_data<S: Surface, T: Real>(s: &S, spec: &FrameSpec, u: T, v: T) -> FrameData<T> {
    let (du, dv) = seed(u, v);
    let fd = spec.eval(s, du, dv);
    let (e1, e1u, e1v) = fd.e1.split();
    let (e2, e2u, e2v) = fd.e2.split();
    let nu = fd.nu.re();
    let t = Tangent::eval(s, u, v);
    let pull = |a: Vec3<T>, wu: Vec3<T>, wv: Vec3<T>| t.gu.scale(a.dot(wu)) + t.gv.scale(a.dot(wv));
    FrameData {
        tangent: t,
        frame: Frame { e1, e2, nu },
        conn: ConnectorSet { c: pull(e2, e1u, e1v), d1: pull(nu, e1u, e1v), d2: pull(nu, e2u, e2v) },
    }
}

/// Checks that `(u, v)` is a regular point of the chart.
pub fn regular_point<S: Surface>(s: &S, u: f64, v: f64) -> Result<Tangent> {
    let t = Tangent::eval(s, u, v);
    let area = t.ru.cross(t.rv).norm();
    let scale = t.ru.norm() * t.rv.norm();
    if !(area > 1e-12 * scale) || !area.is_finite() {
        return Err(Error::Immersion { u, v });
    }
    Ok(t)
}

pub fn connectors<S: Surface>(s: &S, spec: &FrameSpec, u: f64, v: f64) -> Result<ConnectorSet> {
    regular_point(s, u, v)?;
    let fd = frame_data(s, spec, u, v);
    let ok = [fd.conn.c, fd.conn.d1, fd.conn.d2].iter().all(|w| w.is_finite());
    if !ok {
        return Err(Error::Numerical(format!("non-finite connectors at ({u}, {v})")));
    }
    Ok(fd.conn)
}
