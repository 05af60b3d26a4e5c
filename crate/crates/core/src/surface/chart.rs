use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::real::{seed, Dual, Real};
use crate::tensor3::{Mat3, Vec3};

/// A parametrised surface `(u, v) ↦ r(u, v)`.
///
/// The position is written once for any [`Real`] scalar; derivatives of
/// every order follow from evaluating it on nested dual numbers.
pub trait Surface: Sync {
    fn position<T: Real>(&self, u: T, v: T) -> Vec3<T>;
}

impl<S: Surface> Surface for &S {
    fn position<T: Real>(&self, u: T, v: T) -> Vec3<T> {
        (**self).position(u, v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Domain {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Self {
        Self { u0, u1, v0, v1 }
    }

    pub fn span_u(&self) -> f64 {
        self.u1 - self.u0
    }

    pub fn span_v(&self) -> f64 {
        self.v1 - self.v0
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        let su = 1e-12 * self.span_u().abs().max(1.0);
        let sv = 1e-12 * self.span_v().abs().max(1.0);
        u >= self.u0 - su && u <= self.u1 + su && v >= self.v0 - sv && v <= self.v1 + sv
    }
}

/// Radius profile `ρ(z)` of a surface of revolution.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    expr: Expr,
}

impl Profile {
    pub fn parse(text: &str) -> Result<Profile> {
        Ok(Profile { expr: Expr::parse(text, &["z"])? })
    }

    pub fn text(&self) -> &str {
        self.expr.source()
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    #[inline]
    pub fn rho<T: Real>(&self, z: T) -> T {
        self.expr.eval(&[z])
    }

    /// `(ρ, ρ', ρ'')` at `z`.
    pub fn derivs(&self, z: f64) -> Result<(f64, f64, f64)> {
        Ok(self.expr.derivs2(z)?)
    }

    /// Checks that `ρ` is finite and positive on `[z0, z1]`.
    pub fn validate(&self, z0: f64, z1: f64) -> Result<()> {
        if !(z0 < z1) {
            return Err(Error::Profile(format!("empty z-range [{z0}, {z1}]")));
        }
        const N: usize = 512;
        for k in 0..=N {
            let z = z0 + (z1 - z0) * k as f64 / N as f64;
            let (r, _, _) = self
                .derivs(z)
                .map_err(|e| Error::Profile(format!("at z = {z}: {e}")))?;
            if !(r > 0.0) {
                return Err(Error::Profile(format!("radius {r} is not positive at z = {z}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChartKind {
    /// `(u, v, 0)`.
    Plane,
    /// `(u cos v, u sin v, 0)`, an annulus for `u > 0`.
    PolarPlane,
    /// Polar angle `u`, azimuth `v`.
    Sphere { radius: f64 },
    /// `(r cos u, r sin u, v)`.
    Cylinder { radius: f64 },
    /// `(c cosh(v/c) cos u, c cosh(v/c) sin u, v)`.
    Catenoid { waist: f64 },
    /// Azimuth `u`, tube angle `v`.
    Torus { major: f64, minor: f64 },
    /// `(c sinh(v/c) cos u, c sinh(v/c) sin u, c u)`.
    Helicoid { pitch: f64 },
    /// `(ρ(v) cos u, ρ(v) sin u, v)`.
    Revolution(Profile),
    /// Three expressions in `u, v`.
    Custom(Box<[Expr; 3]>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    kind: ChartKind,
    domain: Domain,
}

impl Chart {
    pub fn new(kind: ChartKind, domain: Domain) -> Self {
        Self { kind, domain }
    }

    pub fn plane() -> Self {
        Self::new(ChartKind::Plane, Domain::new(-1.0, 1.0, -1.0, 1.0))
    }

    pub fn polar_plane() -> Self {
        Self::new(ChartKind::PolarPlane, Domain::new(0.5, 2.0, 0.0, TAU))
    }

    pub fn sphere(radius: f64) -> Self {
        Self::new(ChartKind::Sphere { radius }, Domain::new(0.3, PI - 0.3, 0.0, TAU))
    }

    pub fn cylinder(radius: f64) -> Self {
        Self::new(ChartKind::Cylinder { radius }, Domain::new(0.0, TAU, -1.0, 1.0))
    }

    pub fn catenoid(waist: f64) -> Self {
        Self::new(ChartKind::Catenoid { waist }, Domain::new(0.0, TAU, -waist, waist))
    }

    pub fn torus(major: f64, minor: f64) -> Self {
        Self::new(ChartKind::Torus { major, minor }, Domain::new(0.0, TAU, 0.0, TAU))
    }

    pub fn helicoid(pitch: f64) -> Self {
        Self::new(ChartKind::Helicoid { pitch }, Domain::new(0.0, TAU, -pitch, pitch))
    }

    pub fn revolution(profile: Profile, z0: f64, z1: f64) -> Result<Self> {
        profile.validate(z0, z1)?;
        Ok(Self::new(ChartKind::Revolution(profile), Domain::new(0.0, TAU, z0, z1)))
    }

    pub fn custom(components: [Expr; 3], domain: Domain) -> Self {
        Self::new(ChartKind::Custom(Box::new(components)), domain)
    }

    /// Parses three component expressions in `u, v`.
    pub fn parse_custom(x: &str, y: &str, z: &str, domain: Domain) -> Result<Self> {
        let vars = ["u", "v"];
        Ok(Self::custom(
            [Expr::parse(x, &vars)?, Expr::parse(y, &vars)?, Expr::parse(z, &vars)?],
            domain,
        ))
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn kind(&self) -> &ChartKind {
        &self.kind
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ChartKind::Plane => "plane",
            ChartKind::PolarPlane => "annulus",
            ChartKind::Sphere { .. } => "sphere",
            ChartKind::Cylinder { .. } => "cylinder",
            ChartKind::Catenoid { .. } => "catenoid",
            ChartKind::Torus { .. } => "torus",
            ChartKind::Helicoid { .. } => "helicoid",
            ChartKind::Revolution(_) => "revolution",
            ChartKind::Custom(_) => "custom",
        }
    }

    /// True for charts of the form `(ρ(v) cos u, ρ(v) sin u, v)`.
    pub fn is_revolution(&self) -> bool {
        matches!(
            self.kind,
            ChartKind::Cylinder { .. } | ChartKind::Catenoid { .. } | ChartKind::Revolution(_)
        )
    }

    /// Radius of the circular section at height `z` for revolution charts.
    pub fn radius_at<T: Real>(&self, z: T) -> Option<T> {
        match &self.kind {
            ChartKind::Cylinder { radius } => Some(T::cst(*radius)),
            ChartKind::Catenoid { waist } => Some((z / *waist).cosh() * *waist),
            ChartKind::Revolution(p) => Some(p.rho(z)),
            _ => None,
        }
    }

    pub fn sample(&self, u: f64, v: f64) -> Result<ChartSample> {
        if !self.domain.contains(u, v) {
            return Err(Error::Precondition(format!(
                "point ({u}, {v}) outside the chart domain"
            )));
        }
        sample(self, u, v)
    }
}

impl Surface for Chart {
    fn position<T: Real>(&self, u: T, v: T) -> Vec3<T> {
        match &self.kind {
            ChartKind::Plane => Vec3::new(u, v, T::zero()),
            ChartKind::PolarPlane => Vec3::new(u * v.cos(), u * v.sin(), T::zero()),
            ChartKind::Sphere { radius } => {
                let s = u.sin() * *radius;
                Vec3::new(s * v.cos(), s * v.sin(), u.cos() * *radius)
            }
            ChartKind::Torus { major, minor } => {
                let rho = v.cos() * *minor + *major;
                Vec3::new(rho * u.cos(), rho * u.sin(), v.sin() * *minor)
            }
            ChartKind::Helicoid { pitch } => {
                let s = (v / *pitch).sinh() * *pitch;
                Vec3::new(s * u.cos(), s * u.sin(), u * *pitch)
            }
            ChartKind::Custom(e) => {
                let a = [u, v];
                Vec3::new(e[0].eval(&a), e[1].eval(&a), e[2].eval(&a))
            }
            ChartKind::Cylinder { .. } | ChartKind::Catenoid { .. } | ChartKind::Revolution(_) => {
                let rho = self.radius_at(v).expect("revolution chart");
                Vec3::new(rho * u.cos(), rho * u.sin(), v)
            }
        }
    }
}

/// Position, tangents, unit normal and the dual tangent basis at a point.
///
/// `g_u, g_v` satisfy `g_u · r_u = 1`, `g_u · r_v = 0` (and symmetrically), so
/// the surface gradient of a field `f` is `∂_u f ⊗ g_u + ∂_v f ⊗ g_v`.
#[derive(Clone, Copy, Debug)]
pub struct Tangent<T = f64> {
    pub r: Vec3<T>,
    pub ru: Vec3<T>,
    pub rv: Vec3<T>,
    pub nu: Vec3<T>,
    pub gu: Vec3<T>,
    pub gv: Vec3<T>,
}

impl<T: Real> Tangent<T> {
    pub fn eval<S: Surface>(s: &S, u: T, v: T) -> Self {
        let (du, dv) = seed(u, v);
        let (r, ru, rv) = s.position(du, dv).split();
        let nu = ru.cross(rv).normalize();
        let e = ru.dot(ru);
        let f = ru.dot(rv);
        let g = rv.dot(rv);
        let inv = (e * g - f * f).recip();
        let gu = (ru.scale(g) - rv.scale(f)).scale(inv);
        let gv = (rv.scale(e) - ru.scale(f)).scale(inv);
        Tangent { r, ru, rv, nu, gu, gv }
    }

    /// Surface gradient of a vector field with chart partials `wu, wv`.
    pub fn grad(&self, wu: Vec3<T>, wv: Vec3<T>) -> Mat3<T> {
        wu.outer(self.gu) + wv.outer(self.gv)
    }

    /// Surface gradient of a scalar field with chart partials `fu, fv`.
    pub fn grad_scalar(&self, fu: T, fv: T) -> Vec3<T> {
        self.gu.scale(fu) + self.gv.scale(fv)
    }

    /// Surface curl from chart partials: `g_u × ∂_u w + g_v × ∂_v w`.
    pub fn curl(&self, wu: Vec3<T>, wv: Vec3<T>) -> Vec3<T> {
        self.gu.cross(wu) + self.gv.cross(wv)
    }

    pub fn div(&self, wu: Vec3<T>, wv: Vec3<T>) -> T {
        self.gu.dot(wu) + self.gv.dot(wv)
    }

    /// Unit tangent along `r_u` and its positive quarter turn `ν × e_u`.
    pub fn coordinate_basis(&self) -> (Vec3<T>, Vec3<T>) {
        let t1 = self.ru.normalize();
        (t1, self.nu.cross(t1))
    }
}

impl<T: Real> Tangent<Dual<T>> {
    pub fn re(&self) -> Tangent<T> {
        Tangent {
            r: self.r.re(),
            ru: self.ru.re(),
            rv: self.rv.re(),
            nu: self.nu.re(),
            gu: self.gu.re(),
            gv: self.gv.re(),
        }
    }
}

/// Tangent data and the curvature tensor `∇ₛν`.
pub fn shape<S: Surface, T: Real>(s: &S, u: T, v: T) -> (Tangent<T>, Mat3<T>) {
    let (du, dv) = seed(u, v);
    let td = Tangent::eval(s, du, dv);
    let t = td.re();
    let (_, nu_u, nu_v) = td.nu.split();
    let k = t.grad(nu_u, nu_v);
    (t, k)
}

/// Relative threshold below which two principal values are treated as equal.
pub const UMBILIC_REL: f64 = 1e-7;

/// Spectral data of a symmetric tangential tensor on an oriented tangent plane.
#[derive(Clone, Copy, Debug)]
pub struct TangentEigen<T = f64> {
    pub l1: T,
    pub l2: T,
    pub p1: Vec3<T>,
    pub p2: Vec3<T>,
    /// The two eigenvalues coincide; `p1, p2` are then the reference basis.
    pub isotropic: bool,
}

/// Eigen-decomposition of `m` restricted to the plane spanned by the
/// orthonormal pair `(t1, t2)`, ordered `l1 ≥ l2`, with `p2 = ν × p1`
/// whenever `t2 = ν × t1`.
pub fn tangent_eigen<T: Real>(m: &Mat3<T>, t1: Vec3<T>, t2: Vec3<T>, rel: f64) -> TangentEigen<T> {
    let a = t1.dot(m.mul_vec(t1));
    let b = (t1.dot(m.mul_vec(t2)) + t2.dot(m.mul_vec(t1))) * 0.5;
    let c = t2.dot(m.mul_vec(t2));
    let mean = (a + c) * 0.5;
    let h = (a - c) * 0.5;
    let disc2 = h * h + b * b;
    let scale = a.value().abs().max(c.value().abs()).max(1.0);
    if 2.0 * disc2.value().sqrt() <= rel * scale {
        return TangentEigen { l1: mean, l2: mean, p1: t1, p2: t2, isotropic: true };
    }
    let disc = disc2.sqrt();
    let theta = b.atan2(h) * 0.5;
    let (ct, st) = (theta.cos(), theta.sin());
    TangentEigen {
        l1: mean + disc,
        l2: mean - disc,
        p1: t1.scale(ct) + t2.scale(st),
        p2: t2.scale(ct) - t1.scale(st),
        isotropic: false,
    }
}

/// All pointwise geometric data of a chart.
#[derive(Clone, Copy, Debug)]
pub struct ChartSample {
    pub u: f64,
    pub v: f64,
    pub r: Vec3,
    pub r_u: Vec3,
    pub r_v: Vec3,
    pub len_u: f64,
    pub len_v: f64,
    /// `r_u · r_v / (|r_u| |r_v|)`.
    pub orthogonality_defect: f64,
    pub e_u: Vec3,
    pub e_v: Vec3,
    pub nu: Vec3,
    pub projector: Mat3,
    /// `∇ₛν`; a sphere of radius `R` has `P(ν)/R`.
    pub curvature: Mat3,
    pub kappa1: f64,
    pub kappa2: f64,
    pub mean_curvature: f64,
    pub gaussian_curvature: f64,
    pub p1: Vec3,
    pub p2: Vec3,
    pub umbilic: bool,
}

impl ChartSample {
    pub fn flip_principal(&mut self) {
        self.p1 = -self.p1;
        self.p2 = -self.p2;
    }
}

/// Samples a surface at `(u, v)`.
pub fn sample<S: Surface>(s: &S, u: f64, v: f64) -> Result<ChartSample> {
    let (t, k) = shape(s, u, v);
    let len_u = t.ru.norm();
    let len_v = t.rv.norm();
    let area = t.ru.cross(t.rv).norm();
    if !(area > 1e-12 * (len_u * len_v).max(f64::MIN_POSITIVE)) || !area.is_finite() {
        return Err(Error::Immersion { u, v });
    }
    if !k.is_finite() || !t.nu.is_finite() {
        return Err(Error::Numerical(format!("non-finite curvature at ({u}, {v})")));
    }
    let (t1, t2) = t.coordinate_basis();
    let eig = tangent_eigen(&k, t1, t2, UMBILIC_REL);
    Ok(ChartSample {
        u,
        v,
        r: t.r,
        r_u: t.ru,
        r_v: t.rv,
        len_u,
        len_v,
        orthogonality_defect: t.ru.dot(t.rv) / (len_u * len_v),
        e_u: t1,
        e_v: t.rv * (1.0 / len_v),
        nu: t.nu,
        projector: crate::tensor3::projector_unchecked(t.nu),
        curvature: k,
        kappa1: eig.l1,
        kappa2: eig.l2,
        mean_curvature: 0.5 * (eig.l1 + eig.l2),
        gaussian_curvature: eig.l1 * eig.l2,
        p1: eig.p1,
        p2: eig.p2,
        umbilic: eig.isotropic,
    })
}
