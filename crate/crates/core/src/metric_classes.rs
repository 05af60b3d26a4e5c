//! Conformal, isoareal and isometric deformations and the laws they obey.

use crate::error::Result;
use crate::grid::{Grid, Node, Stat};
use crate::kinematics::{
    deformation_sample, gradient_at, kinematics_at, Deformation, ImageSurface, PointKinematics,
};
use crate::real::Real;
use crate::surface::{
    gaussian_curvature, surface_gradient_scalar, surface_laplacian, Chart, FrameSpec, Pullback, ScalarField,
};
use crate::tensor3::{projector_unchecked, Vec3};

/// Classification flags with the worst defects behind them.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationReport {
    pub conformal: bool,
    pub isoareal: bool,
    pub isometric: bool,
    /// `max ‖C − λ̂²P(ν)‖`.
    pub conformal_defect: Stat,
    /// `max |det U − 1|`.
    pub isoareal_defect: Stat,
    /// `λ̂ = √(½ tr C)` over the grid.
    pub stretch: Stat,
    pub tol: f64,
}

/// `λ̂² = ½ tr C`, the conformal stretch estimate.
pub fn conformal_stretch_sq(c: &crate::tensor3::Mat3) -> f64 {
    0.5 * c.trace()
}

/// Classifies a deformation on the interior nodes of a grid.
pub fn classify(def: &Deformation, chart: &Chart, grid: &Grid, tol: f64) -> Result<ClassificationReport> {
    let rows = grid.map_interior(|n| -> Result<(f64, f64, f64)> {
        let s = deformation_sample(def, chart, n.u, n.v)?;
        let l2 = conformal_stretch_sq(&s.c);
        let conf = (s.c - projector_unchecked(s.nu) * l2).norm();
        Ok((conf, s.det_u() - 1.0, l2.sqrt()))
    });
    let mut vals = Vec::with_capacity(rows.len());
    for (n, r) in rows {
        vals.push((n, r?));
    }
    let conformal_defect = Stat::of_abs(vals.iter().map(|(n, r)| (*n, r.0)));
    let isoareal_defect = Stat::of_abs(vals.iter().map(|(n, r)| (*n, r.1)));
    let stretch = Stat::of(vals.iter().map(|(n, r)| (*n, r.2)));
    let conformal = conformal_defect.max < tol;
    let isoareal = isoareal_defect.max < tol;
    Ok(ClassificationReport {
        conformal,
        isoareal,
        isometric: conformal && isoareal,
        conformal_defect,
        isoareal_defect,
        stretch,
        tol,
    })
}

/// `φ = ln λ̂` as a scalar field on the chart.
pub struct LogStretch<'a> {
    pub chart: &'a Chart,
    pub def: &'a Deformation,
}

impl ScalarField for LogStretch<'_> {
    fn at<T: Real>(&self, u: T, v: T) -> T {
        let (_, f) = gradient_at(self.chart, self.def, u, v);
        let c = f.transpose().matmul(&f);
        (c.trace() * 0.5).ln() * 0.5
    }
}

/// Residuals of the conformal laws at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConformalLaws {
    /// `|a₃ − ν × ∇ₛ ln λ|`.
    pub a3: f64,
    /// `|c* − R(c + ν × ∇ₛ ln λ)/λ|`.
    pub spin: f64,
    /// `|a₁·e₁ + a₂·e₂|`.
    pub trace: f64,
    /// `|2H* − (2H + a₂·e₁ − a₁·e₂)/λ|`, with `H*` from the image chart.
    pub mean_curvature: f64,
}

impl ConformalLaws {
    pub fn max(&self) -> f64 {
        self.a3.max(self.spin).max(self.trace).max(self.mean_curvature)
    }
}

/// Conformal-law residuals, with the `a` vectors of the trace and
/// mean-curvature laws taken on `frame` of the source.
pub fn conformal_laws_residuals(
    def: &Deformation,
    chart: &Chart,
    frame: &FrameSpec,
    u: f64,
    v: f64,
) -> Result<ConformalLaws> {
    let pk = kinematics_at(def, chart, u, v)?;
    let grad_phi = surface_gradient_scalar(chart, &LogStretch { chart, def }, u, v, Pullback::General)?;
    Ok(conformal_laws_at(&pk, grad_phi, frame.eval(chart, u, v)))
}

pub fn conformal_laws_at(pk: &PointKinematics, grad_phi: Vec3, frame: crate::surface::Frame) -> ConformalLaws {
    let s = &pk.sample;
    let nu = s.nu;
    let lambda = conformal_stretch_sq(&s.c).sqrt();
    let rot = pk.rot;
    let a3 = (rot.a[2] - nu.cross(grad_phi)).norm();
    let spin = (pk.image_conn.c - s.r.mul_vec(pk.conn.c + nu.cross(grad_phi)) * (1.0 / lambda)).norm();
    let g = rot.in_basis([frame.e1, frame.e2, frame.nu]);
    let [a1, a2, _] = g.a;
    let trace = (a1.dot(frame.e1) + a2.dot(frame.e2)).abs();
    let h = pk.mean_curvature();
    let hs = pk.image_mean_curvature_direct();
    let mean_curvature = (2.0 * hs - (2.0 * h + a2.dot(frame.e1) - a1.dot(frame.e2)) / lambda).abs();
    ConformalLaws { a3, spin, trace, mean_curvature }
}

/// Both forms of the conformal Gaussian-curvature law at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConformalCurvature {
    /// `K* − (K − Δₛφ)/λ²`.
    pub direct: f64,
    /// `Δₛφ + K* e^{2φ} − K`.
    pub exponential: f64,
    pub lambda: f64,
    pub k: f64,
    pub k_star: f64,
    pub laplacian: f64,
}

impl ConformalCurvature {
    /// `|exponential − λ² direct|`, zero up to rounding.
    pub fn form_mismatch(&self) -> f64 {
        (self.exponential - self.lambda * self.lambda * self.direct).abs()
    }
}

/// Conformal Gaussian-curvature law, with `K*` from the image chart.
pub fn conformal_curvature_residual(def: &Deformation, chart: &Chart, u: f64, v: f64) -> Result<ConformalCurvature> {
    let field = LogStretch { chart, def };
    let phi = field.at(u, v);
    let lap = surface_laplacian(chart, &field, u, v);
    let k = gaussian_curvature(chart, u, v);
    let k_star = gaussian_curvature(&ImageSurface::new(chart, def), u, v);
    deformation_sample(def, chart, u, v)?;
    let lambda = phi.exp();
    Ok(ConformalCurvature {
        direct: k_star - (k - lap) / (lambda * lambda),
        exponential: lap + k_star * (2.0 * phi).exp() - k,
        lambda,
        k,
        k_star,
        laplacian: lap,
    })
}

/// Theorema egregium: `max |K* − K|` and `max |a₃|` over the grid interior.
#[derive(Clone, Debug, PartialEq)]
pub struct EgregiumReport {
    pub curvature_defect: Stat,
    pub a3: Stat,
}

pub fn theorema_egregium_check(def: &Deformation, chart: &Chart, grid: &Grid) -> Result<EgregiumReport> {
    let rows = collect(grid.map_interior(|n| {
        let pk = kinematics_at(def, chart, n.u, n.v)?;
        Ok((pk.image_gaussian_curvature_direct() - pk.gaussian_curvature(), pk.rot.a[2].norm()))
    }))?;
    Ok(EgregiumReport {
        curvature_defect: Stat::of_abs(rows.iter().map(|(n, r)| (*n, r.0))),
        a3: Stat::of_abs(rows.iter().map(|(n, r)| (*n, r.1))),
    })
}

/// Curvature frame-indifference and the rigidity it forces.
#[derive(Clone, Debug, PartialEq)]
pub struct RigidityReport {
    /// `‖∇*ₛν* − R ∇ₛν Rᵀ‖`.
    pub indifference: Stat,
    pub h_norm: Stat,
    pub tol: f64,
}

impl RigidityReport {
    pub fn antecedent(&self) -> bool {
        self.indifference.max < self.tol
    }

    /// Frame-indifferent curvature implies `H = 0`.
    pub fn holds(&self) -> bool {
        !self.antecedent() || self.h_norm.max < self.tol
    }
}

pub fn frame_indifference_rigidity(def: &Deformation, chart: &Chart, grid: &Grid, tol: f64) -> Result<RigidityReport> {
    let rows = collect(grid.map_interior(|n| {
        let pk = kinematics_at(def, chart, n.u, n.v)?;
        let r = pk.sample.r;
        let pushed = r.matmul(&pk.curvature).matmul(&r.transpose());
        Ok(((pk.image_curvature - pushed).norm(), pk.rot.h.norm()))
    }))?;
    Ok(RigidityReport {
        indifference: Stat::of_abs(rows.iter().map(|(n, r)| (*n, r.0))),
        h_norm: Stat::of_abs(rows.iter().map(|(n, r)| (*n, r.1))),
        tol,
    })
}

pub(crate) fn collect<T>(rows: Vec<(Node, Result<T>)>) -> Result<Vec<(Node, T)>> {
    rows.into_iter().map(|(n, r)| r.map(|x| (n, x))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{rotation_matrix, SpatialMap};
    use crate::surface::{Domain, Field, Profile};
    use std::f64::consts::TAU;

    fn annulus() -> Chart {
        Chart::polar_plane().with_domain(Domain::new(0.5, 2.0, 0.0, TAU))
    }

    fn square() -> Deformation {
        Deformation::spatial(SpatialMap::ComplexSquare)
    }

    #[test]
    fn identity_is_isometric() {
        let c = Chart::torus(2.0, 0.5);
        let g = Grid::new(8, 8, c.domain(), 0).unwrap();
        let r = classify(&Deformation::identity(), &c, &g, 1e-10).unwrap();
        assert!(r.conformal && r.isoareal && r.isometric);
        assert!((r.stretch.max - 1.0).abs() < 1e-14 && (r.stretch.min - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_square_is_conformal_with_lambda_2r() {
        let c = annulus();
        let g = Grid::new(16, 16, c.domain(), 0).unwrap();
        let r = classify(&square(), &c, &g, 1e-8).unwrap();
        assert!(r.conformal && !r.isoareal && !r.isometric);
        for n in g.nodes() {
            let s = deformation_sample(&square(), &c, n.u, n.v).unwrap();
            assert!((conformal_stretch_sq(&s.c).sqrt() - 2.0 * n.u).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_square_laws() {
        let c = annulus();
        for (r, t) in [(0.7, 0.3), (1.0, 2.0), (1.8, 5.0)] {
            for frame in [FrameSpec::Principal, FrameSpec::Coordinate.rotated(Field::parse("u*v").unwrap())] {
                let l = conformal_laws_residuals(&square(), &c, &frame, r, t).unwrap();
                assert!(l.max() < 1e-10, "{l:?}");
            }
            let k = conformal_curvature_residual(&square(), &c, r, t).unwrap();
            assert!(k.direct.abs() < 1e-10 && k.exponential.abs() < 1e-10, "{k:?}");
            let pk = kinematics_at(&square(), &c, r, t).unwrap();
            if (r - 1.0).abs() < 1e-12 {
                assert!((pk.rot.a[2].norm() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn conformal_laws_on_a_curved_surface() {
        // The sphere to the plane by stereographic projection, then inverted.
        let c = Chart::sphere(1.0).with_domain(Domain::new(0.5, 2.5, 0.0, TAU));
        let d = Deformation::spatial(SpatialMap::parse_expr("x/(1 - z)", "y/(1 - z)", "0").unwrap());
        for (u, v) in [(0.9, 0.4), (1.7, 3.0)] {
            let l = conformal_laws_residuals(&d, &c, &FrameSpec::Principal, u, v).unwrap();
            assert!(l.max() < 1e-9, "{l:?}");
            let k = conformal_curvature_residual(&d, &c, u, v).unwrap();
            assert!(k.direct.abs() < 1e-8 && k.form_mismatch() < 1e-12, "{k:?}");
        }
    }

    #[test]
    fn uniform_scaling_curvature() {
        let c = Chart::torus(2.0, 0.6);
        let d = Deformation::spatial(SpatialMap::Scale(1.7));
        let k = conformal_curvature_residual(&d, &c, 0.3, 1.0).unwrap();
        assert!((k.k_star - k.k / (1.7 * 1.7)).abs() < 1e-12);
        assert!(k.direct.abs() < 1e-12 && k.laplacian.abs() < 1e-12);
    }

    #[test]
    fn egregium_and_rigidity() {
        let c = Chart::revolution(Profile::parse("cosh(z)").unwrap(), 0.0, 2.0).unwrap();
        let g = Grid::new(12, 12, c.domain(), 2).unwrap();
        let ev = Deformation::eversion(&c).unwrap();
        let e = theorema_egregium_check(&ev, &c, &g).unwrap();
        assert!(e.curvature_defect.max < 1e-10 && e.a3.max < 1e-10);
        let r = frame_indifference_rigidity(&ev, &c, &g, 1e-6).unwrap();
        assert!(!r.antecedent() && r.h_norm.max > 1e-2 && r.holds());

        let q = rotation_matrix(Vec3::new(1.0, 0.2, 0.3), 0.9);
        let t = Chart::torus(2.0, 0.5);
        let rot = Deformation::spatial(SpatialMap::Rigid { q, t: Vec3::zero() });
        let r = frame_indifference_rigidity(&rot, &t, &Grid::new(8, 8, t.domain(), 1).unwrap(), 1e-8).unwrap();
        assert!(r.antecedent() && r.holds());
    }

    #[test]
    fn tightening_tolerance_never_adds_flags() {
        let c = annulus();
        let g = Grid::new(8, 8, c.domain(), 0).unwrap();
        let loose = classify(&square(), &c, &g, 1e3).unwrap();
        let tight = classify(&square(), &c, &g, 1e-12).unwrap();
        assert!(loose.isoareal && !tight.isoareal);
        assert!(tight.conformal <= loose.conformal && tight.isometric <= loose.isometric);
    }
}
