use crate::error::{Error, Result};
use crate::tensor3::{circ_mt, circ_tm, projector_unchecked, wmat, Vec3};

use super::image::PointKinematics;
use super::rotation::{contents, Contents};

/// Pointwise stretching, drilling and bending energy densities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyDensities {
    pub w_s: f64,
    pub w_d: f64,
    pub w_b: f64,
    /// `4|a₃|²`.
    pub w_d_alt: f64,
    /// `4(a₁² + a₂² + 2(a₁·d₂ − a₂·d₁))²`.
    pub w_b_a: f64,
    /// `4[λ₁²|d₁*|² + λ₂²|d₂*|² − |d₁|² − |d₂|²]²`.
    pub w_b_conn: f64,
}

impl EnergyDensities {
    pub fn max(&self) -> f64 {
        self.w_s.max(self.w_d).max(self.w_b)
    }

    /// Largest disagreement between the alternative forms.
    pub fn form_defect(&self) -> f64 {
        let d = (self.w_d - self.w_d_alt).abs() / self.w_d.abs().max(1.0);
        let b1 = (self.w_b - self.w_b_a).abs() / self.w_b.abs().max(1.0);
        let b2 = (self.w_b - self.w_b_conn).abs() / self.w_b.abs().max(1.0);
        d.max(b1).max(b2)
    }
}

/// Tolerance on the agreement of the alternative energy forms.
pub const FORM_TOL: f64 = 1e-6;

/// All energy densities, without the consistency check.
pub fn energy_forms(pk: &PointKinematics) -> EnergyDensities {
    let s = &pk.sample;
    let h = &pk.rot.h;
    let nu = s.nu;
    let w_s = (s.u - projector_unchecked(nu)).norm_sq();
    let wn_h = circ_mt(&wmat(nu), h);
    let w_d = wn_h.norm_sq();
    let inner = h.norm_sq() - 0.5 * wn_h.norm_sq() - 4.0 * nu.dot(circ_tm(h, &pk.curvature));
    let w_b = inner * inner;

    let [a1, a2, a3] = pk.rot.a;
    let w_d_alt = 4.0 * a3.norm_sq();
    // Curvature connectors of the stretch frame, dᵢ = −(∇ₛν)uᵢ.
    let d1 = -pk.curvature.mul_vec(s.u1);
    let d2 = -pk.curvature.mul_vec(s.u2);
    let q = a1.norm_sq() + a2.norm_sq() + 2.0 * (a1.dot(d2) - a2.dot(d1));
    let w_b_a = 4.0 * q * q;
    let ds1: Vec3 = -pk.image_curvature.mul_vec(s.v1);
    let ds2: Vec3 = -pk.image_curvature.mul_vec(s.v2);
    let l = s.lambda1 * s.lambda1 * ds1.norm_sq() + s.lambda2 * s.lambda2 * ds2.norm_sq()
        - d1.norm_sq()
        - d2.norm_sq();
    let w_b_conn = 4.0 * l * l;
    EnergyDensities { w_s, w_d, w_b, w_d_alt, w_b_a, w_b_conn }
}

/// Energy densities, with the alternative forms cross-checked.
pub fn energy_densities(pk: &PointKinematics) -> Result<EnergyDensities> {
    let e = energy_forms(pk);
    let defect = e.form_defect();
    if !(defect <= FORM_TOL) {
        return Err(Error::InternalConsistency { check: "energy forms", defect });
    }
    Ok(e)
}

/// Rodrigues contents of the polar rotation at a point.
pub fn point_contents(pk: &PointKinematics) -> Contents {
    contents(&pk.sample.r, pk.sample.nu)
}
