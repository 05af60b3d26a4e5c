use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::real::Real;
use crate::surface::{sample, Chart, ChartKind, Surface};
use crate::tensor3::{Mat3, Vec3};

/// A map of space applied after the base deformation.
#[derive(Clone, Debug, PartialEq)]
pub enum SpatialMap {
    /// `x ↦ Q x + t`.
    Rigid { q: Mat3, t: Vec3 },
    /// `x ↦ s x`.
    Scale(f64),
    /// `(x, y, z) ↦ (x² − y², 2xy, z)`, conformal away from the `z` axis.
    ComplexSquare,
    /// `x ↦ Rot_z(rate · z) x`.
    ZTwist { rate: f64 },
    /// Three expressions in `x, y, z`.
    Expr(Box<[Expr; 3]>),
}

impl SpatialMap {
    /// Rotation by `angle` about the unit `axis` (right-hand rule).
    pub fn rotation(axis: Vec3, angle: f64) -> SpatialMap {
        SpatialMap::Rigid { q: rotation_matrix(axis, angle), t: Vec3::zero() }
    }

    pub fn parse_expr(x: &str, y: &str, z: &str) -> Result<SpatialMap> {
        let vars = ["x", "y", "z"];
        Ok(SpatialMap::Expr(Box::new([
            Expr::parse(x, &vars)?,
            Expr::parse(y, &vars)?,
            Expr::parse(z, &vars)?,
        ])))
    }

    pub fn apply<T: Real>(&self, p: Vec3<T>) -> Vec3<T> {
        match self {
            SpatialMap::Rigid { q, t } => Mat3::from_f64(*q).mul_vec(p) + Vec3::from_f64(*t),
            SpatialMap::Scale(s) => p * *s,
            SpatialMap::ComplexSquare => Vec3::new(p.x * p.x - p.y * p.y, p.x * p.y * 2.0, p.z),
            SpatialMap::ZTwist { rate } => {
                let a = p.z * *rate;
                let (c, s) = (a.cos(), a.sin());
                Vec3::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z)
            }
            SpatialMap::Expr(e) => {
                let a = [p.x, p.y, p.z];
                Vec3::new(e[0].eval(&a), e[1].eval(&a), e[2].eval(&a))
            }
        }
    }

    fn is_rigid(&self) -> bool {
        matches!(self, SpatialMap::Rigid { .. })
    }
}

/// Rotation matrix for `angle` about the unit `axis`.
pub fn rotation_matrix(axis: Vec3, angle: f64) -> Mat3 {
    let n = axis.normalize();
    let w = crate::tensor3::wmat(n);
    Mat3::identity() + w * angle.sin() + w.matmul(&w) * (1.0 - angle.cos())
}

/// The part of a deformation written directly in chart parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseMap {
    Identity,
    /// Associate-family map of the catenoid: `cos α X + sin α X*`, with `X*`
    /// the conjugate helicoid, `dX* = ν × dX`.
    Bonnet { alpha: f64 },
    /// `(ρ(z) cos θ, ρ(z) sin θ, z) ↦ (ρ(z) cos θ, ρ(z) sin θ, −z)`.
    Eversion,
    /// Three expressions in `u, v`.
    Expr(Box<[Expr; 3]>),
}

/// How the image point is produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Composed,
}

/// A deformation `y` of a chart: a base map followed by spatial maps.
#[derive(Clone, Debug, PartialEq)]
pub struct Deformation {
    pub base: BaseMap,
    pub post: Vec<SpatialMap>,
}

impl Deformation {
    pub fn identity() -> Self {
        Deformation { base: BaseMap::Identity, post: Vec::new() }
    }

    pub fn spatial(map: SpatialMap) -> Self {
        Deformation { base: BaseMap::Identity, post: vec![map] }
    }

    pub fn then(mut self, map: SpatialMap) -> Self {
        self.post.push(map);
        self
    }

    /// Bonnet transformation by a constant angle.
    ///
    /// Only the catenoid family is constructed; other minimal charts are
    /// reported as unsupported and non-minimal charts are rejected.
    pub fn bonnet(chart: &Chart, alpha: f64) -> Result<Self> {
        if !matches!(chart.kind(), ChartKind::Catenoid { .. }) {
            let h = max_mean_curvature(chart)?;
            if h > 1e-8 {
                return Err(Error::Minimality { max_mean_curvature: h });
            }
            return Err(Error::Unsupported(format!(
                "Bonnet transformation of a {} chart",
                chart.name()
            )));
        }
        Ok(Deformation { base: BaseMap::Bonnet { alpha }, post: Vec::new() })
    }

    /// Pure-bending eversion of a surface of revolution.
    pub fn eversion(chart: &Chart) -> Result<Self> {
        if !chart.is_revolution() {
            return Err(Error::Unsupported(format!(
                "eversion needs a surface of revolution, got a {} chart",
                chart.name()
            )));
        }
        Ok(Deformation { base: BaseMap::Eversion, post: Vec::new() })
    }

    pub fn parse_base(x: &str, y: &str, z: &str) -> Result<Self> {
        let vars = ["u", "v"];
        Ok(Deformation {
            base: BaseMap::Expr(Box::new([
                Expr::parse(x, &vars)?,
                Expr::parse(y, &vars)?,
                Expr::parse(z, &vars)?,
            ])),
            post: Vec::new(),
        })
    }

    pub fn provenance(&self) -> Provenance {
        if self.post.is_empty() {
            Provenance::ClosedForm
        } else {
            Provenance::Composed
        }
    }

    /// True when every stage is a rigid motion.
    pub fn is_rigid(&self) -> bool {
        self.base == BaseMap::Identity && self.post.iter().all(SpatialMap::is_rigid)
    }

    /// Image of the chart point `(u, v)`.
    pub fn apply<T: Real>(&self, chart: &Chart, u: T, v: T) -> Vec3<T> {
        let mut p = match &self.base {
            BaseMap::Identity => chart.position(u, v),
            BaseMap::Bonnet { alpha } => {
                let x = chart.position(u, v);
                let c = match chart.kind() {
                    ChartKind::Catenoid { waist } => *waist,
                    _ => unreachable!("Bonnet map on a non-catenoid chart"),
                };
                let s = (v / c).sinh() * c;
                let conj = Vec3::new(s * u.sin(), -(s * u.cos()), u * c);
                x * alpha.cos() + conj * alpha.sin()
            }
            BaseMap::Eversion => {
                let rho = chart.radius_at(v).expect("eversion on a non-revolution chart");
                Vec3::new(rho * u.cos(), rho * u.sin(), -v)
            }
            BaseMap::Expr(e) => {
                let a = [u, v];
                Vec3::new(e[0].eval(&a), e[1].eval(&a), e[2].eval(&a))
            }
        };
        for m in &self.post {
            p = m.apply(p);
        }
        p
    }
}

/// Largest `|H|` of a chart on a 16×16 sample of its domain.
pub fn max_mean_curvature(chart: &Chart) -> Result<f64> {
    let d = chart.domain();
    let mut h = 0.0f64;
    for i in 0..=16 {
        for j in 0..=16 {
            let u = d.u0 + d.span_u() * (0.02 + 0.96 * i as f64 / 16.0);
            let v = d.v0 + d.span_v() * (0.02 + 0.96 * j as f64 / 16.0);
            h = h.max(sample(chart, u, v)?.mean_curvature.abs());
        }
    }
    Ok(h)
}

/// The deformed chart `(u, v) ↦ y(x(u, v))`.
#[derive(Clone, Copy, Debug)]
pub struct ImageSurface<'a> {
    pub chart: &'a Chart,
    pub def: &'a Deformation,
}

impl<'a> ImageSurface<'a> {
    pub fn new(chart: &'a Chart, def: &'a Deformation) -> Self {
        ImageSurface { chart, def }
    }
}

impl Surface for ImageSurface<'_> {
    fn position<T: Real>(&self, u: T, v: T) -> Vec3<T> {
        self.def.apply(self.chart, u, v)
    }
}
