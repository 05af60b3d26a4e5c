//! Exact deformation families: Bonnet transformations of the catenoid,
//! pure-bending eversions of surfaces of revolution, and sphere rigidity.

use nalgebra::{Matrix3, SVD};

use crate::error::{Error, Result};
use crate::grid::{Grid, Stat};
use crate::kinematics::{
    contents, energy_densities, kinematics_at, rotation_field_gradient, Deformation, ImageSurface,
};
use crate::metric_classes::{classify, collect};
use crate::real::{Dual, Real};
use crate::surface::{
    shape, surface_gradient_scalar, Chart, ChartKind, FrameSpec, Profile, Pullback, ScalarField, Surface,
    Tangent, TensorField,
};
use crate::tensor3::{Mat3, Vec3};

/// Bonnet transformation of the catenoid by a constant angle.
pub fn bonnet_deformation(chart: &Chart, alpha: f64) -> Result<Deformation> {
    Deformation::bonnet(chart, alpha)
}

/// Drilling rotation field `R = Q(ν, α)` about the normal of a surface.
pub struct DrillingField<'a, S, A> {
    pub surface: &'a S,
    pub alpha: &'a A,
}

impl<S: Surface, A: ScalarField> TensorField for DrillingField<'_, S, A> {
    fn at<T: Real>(&self, u: T, v: T) -> Mat3<T> {
        let nu = Tangent::eval(self.surface, u, v).nu;
        crate::kinematics::rotation_about(nu, self.alpha.at(u, v))
    }
}

/// `a₁·e₁ + a₂·e₂` of a drilling field on the principal frame, together with
/// `2H sin α` for comparison.
pub fn drilling_trace<S: Surface, A: ScalarField>(s: &S, alpha: &A, u: f64, v: f64) -> (f64, f64) {
    let field = DrillingField { surface: s, alpha };
    let h = rotation_field_gradient(s, &field, u, v);
    let f = FrameSpec::Principal.eval(s, u, v);
    let g = crate::kinematics::RotationGradient::from_h(h, [f.e1, f.e2, f.nu], false);
    let mean = 0.5 * shape(s, u, v).1.trace();
    (g.a[0].dot(f.e1) + g.a[1].dot(f.e2), 2.0 * mean * alpha.at(u, v).sin())
}

/// Residuals of a Bonnet transformation over a grid interior.
#[derive(Clone, Debug, PartialEq)]
pub struct BonnetReport {
    pub alpha: f64,
    pub w_s: Stat,
    pub w_d: Stat,
    pub w_b: Stat,
    /// `|H*|` from the image chart.
    pub image_mean_curvature: Stat,
    /// `|K* − K|` from the image chart.
    pub curvature_defect: Stat,
    /// `‖C − P‖`.
    pub isometry_defect: Stat,
    /// `‖R − Q(ν, α)‖`: the polar rotation is the drilling rotation.
    pub drilling_defect: Stat,
}

pub fn bonnet_check(chart: &Chart, alpha: f64, grid: &Grid) -> Result<BonnetReport> {
    let def = bonnet_deformation(chart, alpha)?;
    let rows = collect(grid.map_interior(|n| {
        let pk = kinematics_at(&def, chart, n.u, n.v)?;
        let e = energy_densities(&pk)?;
        let s = &pk.sample;
        let drill = (s.r - crate::kinematics::rotation_about(s.nu, alpha)).norm();
        let iso = (s.c - crate::tensor3::projector_unchecked(s.nu)).norm();
        Ok([
            e.w_s,
            e.w_d,
            e.w_b,
            pk.image_mean_curvature_direct(),
            pk.image_gaussian_curvature_direct() - pk.gaussian_curvature(),
            iso,
            drill,
        ])
    }))?;
    let col = |k: usize| Stat::of_abs(rows.iter().map(|(n, r)| (*n, r[k])));
    Ok(BonnetReport {
        alpha,
        w_s: col(0),
        w_d: col(1),
        w_b: col(2),
        image_mean_curvature: col(3),
        curvature_defect: col(4),
        isometry_defect: col(5),
        drilling_defect: col(6),
    })
}

/// Root-mean-square distance between two point sets after the best rigid
/// motion (Kabsch).
pub fn best_fit_rms(a: &[Vec3], b: &[Vec3]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ca = a.iter().fold(Vec3::zero(), |s, p| s + *p) * (1.0 / n);
    let cb = b.iter().fold(Vec3::zero(), |s, p| s + *p) * (1.0 / n);
    let mut h = Matrix3::zeros();
    for (p, q) in a.iter().zip(b) {
        let (p, q) = (*p - ca, *q - cb);
        h += nalgebra::Vector3::new(p.x, p.y, p.z) * nalgebra::RowVector3::new(q.x, q.y, q.z);
    }
    let svd = SVD::new(h, true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let d = (vt.transpose() * u.transpose()).determinant().signum();
    let r = vt.transpose() * Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, d)) * u.transpose();
    let q = crate::kinematics::rotation::from_na(&r);
    let sum: f64 = a.iter().zip(b).map(|(p, t)| (q.mul_vec(*p - ca) - (*t - cb)).norm_sq()).sum();
    (sum / n).sqrt()
}

/// Best-fit RMS between the Bonnet image at `α` and the helicoid of the same
/// parameter, sampled on the grid.
pub fn bonnet_helicoid_rms(chart: &Chart, alpha: f64, grid: &Grid) -> Result<f64> {
    let c = match chart.kind() {
        ChartKind::Catenoid { waist } => *waist,
        _ => return Err(Error::Unsupported("helicoid comparison needs a catenoid".into())),
    };
    let def = bonnet_deformation(chart, alpha)?;
    let hel = Chart::helicoid(c);
    let img: Vec<Vec3> = grid.nodes().map(|n| def.apply(chart, n.u, n.v)).collect();
    let refp: Vec<Vec3> = grid.nodes().map(|n| hel.position(n.u, n.v)).collect();
    Ok(best_fit_rms(&img, &refp))
}

/// Bending angle `α = atan2(2ρ', ρ'² − 1)` of a revolution chart, as a field.
pub struct EversionAngle<'a> {
    pub chart: &'a Chart,
}

impl ScalarField for EversionAngle<'_> {
    fn at<T: Real>(&self, _u: T, v: T) -> T {
        let z = Dual::new(v, T::one(), T::zero());
        let rp = self.chart.radius_at(z).expect("eversion angle on a non-revolution chart").du;
        (rp * 2.0).atan2(rp * rp - 1.0)
    }
}

/// A pure-bending eversion `ρ(z)e_r + z e_z ↦ ρ(z)e_r − z e_z`.
#[derive(Clone, Debug, PartialEq)]
pub struct EversionMap {
    pub chart: Chart,
    pub deformation: Deformation,
}

impl EversionMap {
    /// `α(z)` in `(−π, π]`.
    pub fn alpha(&self, z: f64) -> f64 {
        EversionAngle { chart: &self.chart }.at(0.0, z)
    }

    pub fn angle(&self) -> EversionAngle<'_> {
        EversionAngle { chart: &self.chart }
    }
}

/// Eversion of the surface of revolution with profile `ρ` over `[z0, z1]`.
pub fn evert_revolution(profile: Profile, z0: f64, z1: f64) -> Result<EversionMap> {
    evert_chart(Chart::revolution(profile, z0, z1)?)
}

/// Eversion of any revolution chart (cylinder, catenoid or profile).
pub fn evert_chart(chart: Chart) -> Result<EversionMap> {
    let deformation = Deformation::eversion(&chart)?;
    Ok(EversionMap { chart, deformation })
}

/// Principal curvature `eᵢ · ∇ₛν eᵢ` along the axes of a frame.
pub struct FrameCurvature<'a, S> {
    pub surface: &'a S,
    pub frame: &'a FrameSpec,
    pub axis: usize,
}

impl<S: Surface> ScalarField for FrameCurvature<'_, S> {
    fn at<T: Real>(&self, u: T, v: T) -> T {
        let (_, k) = shape(self.surface, u, v);
        let e = self.frame.eval(self.surface, u, v).axis(self.axis);
        e.dot(k.mul_vec(e))
    }
}

/// Smallest `1 − cos α` for which the eversion conditions are evaluated.
pub const BENDING_ANGLE_TOL: f64 = 1e-8;

/// Residuals of the three eversion conditions, in product form:
/// `(1 − cos α)∇κ₁·e₂ − κ₁(κ₂ − κ₁) sin α`, `∇κ₂·e₁` and `|∇α − 2κ₂e₂|`.
pub fn eversion_condition_residuals<S: Surface, A: ScalarField>(
    s: &S,
    frame: &FrameSpec,
    alpha: &A,
    u: f64,
    v: f64,
) -> Result<[f64; 3]> {
    let a = alpha.at(u, v);
    if 1.0 - a.cos() < BENDING_ANGLE_TOL {
        return Err(Error::BendingAngleSingularity { u, v });
    }
    let f = frame.eval(s, u, v);
    let k1f = FrameCurvature { surface: s, frame, axis: 0 };
    let k2f = FrameCurvature { surface: s, frame, axis: 1 };
    let (k1, k2) = (k1f.at(u, v), k2f.at(u, v));
    let g1 = surface_gradient_scalar(s, &k1f, u, v, Pullback::General)?;
    let g2 = surface_gradient_scalar(s, &k2f, u, v, Pullback::General)?;
    let ga = surface_gradient_scalar(s, alpha, u, v, Pullback::General)?;
    Ok([
        (1.0 - a.cos()) * g1.dot(f.e2) - k1 * (k2 - k1) * a.sin(),
        g2.dot(f.e1),
        (ga - f.e2 * (2.0 * k2)).norm(),
    ])
}

/// Pointwise verification of an eversion over a grid interior.
#[derive(Clone, Debug, PartialEq)]
pub struct EversionReport {
    /// `‖∇*ₛν* + R∇ₛνRᵀ‖`.
    pub sign_flip: Stat,
    /// `‖C − P(ν)‖`.
    pub isometry: Stat,
    /// `|κ₁* + κ₁|`.
    pub kappa1: Stat,
    /// `|κ₂* − κ₂ + ∇ₛα·e₂|`.
    pub kappa2: Stat,
    pub curvature_defect: Stat,
    pub w_s: Stat,
    pub w_d: Stat,
    pub w_b: Stat,
    /// Worst of the three eversion conditions.
    pub conditions: Stat,
    /// Nodes of the whole grid where the Rodrigues vector is at infinity.
    pub infinite_contents: usize,
}

pub fn eversion_check(map: &EversionMap, grid: &Grid) -> Result<EversionReport> {
    let chart = &map.chart;
    let def = &map.deformation;
    let frame = FrameSpec::Coordinate;
    let angle = map.angle();
    let rows = collect(grid.map_interior(|n| {
        let (u, v) = (n.u, n.v);
        let pk = kinematics_at(def, chart, u, v)?;
        let e = energy_densities(&pk)?;
        let s = &pk.sample;
        let r = s.r;
        let flip = (pk.image_curvature + r.matmul(&pk.curvature).matmul(&r.transpose())).norm();
        let iso = (s.c - crate::tensor3::projector_unchecked(s.nu)).norm();
        let f = frame.eval(chart, u, v);
        let (v1, v2) = (r.mul_vec(f.e1), r.mul_vec(f.e2));
        let (k1, k2) = (f.e1.dot(pk.curvature.mul_vec(f.e1)), f.e2.dot(pk.curvature.mul_vec(f.e2)));
        let (ks1, ks2) = (v1.dot(pk.image_curvature.mul_vec(v1)), v2.dot(pk.image_curvature.mul_vec(v2)));
        let ga = surface_gradient_scalar(chart, &angle, u, v, Pullback::General)?;
        let cond = match eversion_condition_residuals(chart, &frame, &angle, u, v) {
            Ok(c) => c.iter().fold(0.0f64, |m, x| m.max(x.abs())),
            Err(Error::BendingAngleSingularity { .. }) => 0.0,
            Err(e) => return Err(e),
        };
        Ok([
            flip,
            iso,
            ks1 + k1,
            ks2 - (k2 - ga.dot(f.e2)),
            pk.image_gaussian_curvature_direct() - pk.gaussian_curvature(),
            e.w_s,
            e.w_d,
            e.w_b,
            cond,
        ])
    }))?;
    let infinite_contents = grid
        .nodes()
        .filter(|n| {
            crate::kinematics::deformation_sample(def, chart, n.u, n.v)
                .map(|s| !contents(&s.r, s.nu).finite)
                .unwrap_or(false)
        })
        .count();
    let col = |k: usize| Stat::of_abs(rows.iter().map(|(n, r)| (*n, r[k])));
    Ok(EversionReport {
        sign_flip: col(0),
        isometry: col(1),
        kappa1: col(2),
        kappa2: col(3),
        curvature_defect: col(4),
        w_s: col(5),
        w_d: col(6),
        w_b: col(7),
        conditions: col(8),
        infinite_contents,
    })
}

/// Rotation gradient size of a sphere-to-sphere map.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereRigidityReport {
    pub h_norm: Stat,
    pub isometric: bool,
    /// Rigidity (`H = 0`) is asserted only for isometries.
    pub applicable: bool,
}

impl SphereRigidityReport {
    pub fn holds(&self, tol: f64) -> bool {
        !self.applicable || self.h_norm.max < tol
    }
}

/// `max ‖H‖` of a deformation of a sphere patch onto a sphere of the same
/// radius about the origin.
pub fn sphere_rigidity(def: &Deformation, chart: &Chart, grid: &Grid, tol: f64) -> Result<SphereRigidityReport> {
    let radius = match chart.kind() {
        ChartKind::Sphere { radius } => *radius,
        _ => return Err(Error::Precondition("sphere rigidity needs a sphere chart".into())),
    };
    let image = ImageSurface::new(chart, def);
    let off = grid
        .nodes()
        .map(|n| (image.position(n.u, n.v).norm() - radius).abs())
        .fold(0.0f64, f64::max);
    if !(off <= tol.max(1e-12) * radius.max(1.0)) {
        return Err(Error::Precondition(format!("image leaves the sphere by {off:e}")));
    }
    let class = classify(def, chart, grid, tol)?;
    let rows = collect(grid.map_interior(|n| Ok(kinematics_at(def, chart, n.u, n.v)?.rot.h.norm())))?;
    Ok(SphereRigidityReport {
        h_norm: Stat::of_abs(rows),
        isometric: class.isometric,
        applicable: class.isometric,
    })
}
