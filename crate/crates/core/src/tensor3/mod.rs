//! Vectors, second-rank and third-rank tensors on three-dimensional
//! translation space.
//!
//! Index convention: a third-rank tensor stores `T[i][j][k]`, matching the
//! triad ordering `a1 ⊗ a2 ⊗ a3`. When a third-rank tensor is a surface
//! gradient (such as the rotation gradient), the last index `k` is the
//! differentiation slot.

mod ten;

pub use ten::{circ_mt, circ_tm, circ_tv, skw3, Ten3};

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::real::{Dual, Real};

/// Default tolerance used by the structural predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3<T = f64> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    #[inline]
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn from_f64(v: Vec3<f64>) -> Self {
        Self::new(T::cst(v.x), T::cst(v.y), T::cst(v.z))
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn normalize(self) -> Self {
        self.scale(self.norm().recip())
    }

    #[inline]
    pub fn scale(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn map<U: Real>(self, f: impl Fn(T) -> U) -> Vec3<U> {
        Vec3::new(f(self.x), f(self.y), f(self.z))
    }

    pub fn to_f64(self) -> Vec3<f64> {
        Vec3::new(self.x.value(), self.y.value(), self.z.value())
    }

    pub fn as_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// Dyadic product `self ⊗ o`.
    pub fn outer(self, o: Self) -> Mat3<T> {
        let a = self.as_array();
        let b = o.as_array();
        Mat3::from_fn(|i, j| a[i] * b[j])
    }
}

impl Vec3<f64> {
    pub const E1: Vec3 = Vec3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const E2: Vec3 = Vec3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const E3: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

    pub fn basis(i: usize) -> Vec3 {
        [Self::E1, Self::E2, Self::E3][i]
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl<T: Real> Vec3<Dual<T>> {
    /// Value and the two chart partials of a lifted vector.
    pub fn split(self) -> (Vec3<T>, Vec3<T>, Vec3<T>) {
        (
            Vec3::new(self.x.re, self.y.re, self.z.re),
            Vec3::new(self.x.du, self.y.du, self.z.du),
            Vec3::new(self.x.dv, self.y.dv, self.z.dv),
        )
    }

    pub fn re(self) -> Vec3<T> {
        Vec3::new(self.x.re, self.y.re, self.z.re)
    }
}

impl<T: Real> Mat3<Dual<T>> {
    pub fn split(&self) -> (Mat3<T>, Mat3<T>, Mat3<T>) {
        (
            Mat3::from_fn(|i, j| self.m[i][j].re),
            Mat3::from_fn(|i, j| self.m[i][j].du),
            Mat3::from_fn(|i, j| self.m[i][j].dv),
        )
    }

    pub fn re(&self) -> Mat3<T> {
        Mat3::from_fn(|i, j| self.m[i][j].re)
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<f64> for Vec3<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Second-rank tensor, stored row-major: `m[i][j]` is the component `e_i · M e_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3<T = f64> {
    pub m: [[T; 3]; 3],
}

impl<T: Real> Mat3<T> {
    pub fn from_fn(f: impl Fn(usize, usize) -> T) -> Self {
        Self {
            m: [
                [f(0, 0), f(0, 1), f(0, 2)],
                [f(1, 0), f(1, 1), f(1, 2)],
                [f(2, 0), f(2, 1), f(2, 2)],
            ],
        }
    }

    pub fn zero() -> Self {
        Self::from_fn(|_, _| T::zero())
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_f64(a: Mat3<f64>) -> Self {
        Self::from_fn(|i, j| T::cst(a.m[i][j]))
    }

    /// Tensor whose columns are `c0, c1, c2`, i.e. `c0 ⊗ e1 + c1 ⊗ e2 + c2 ⊗ e3`.
    pub fn from_cols(c0: Vec3<T>, c1: Vec3<T>, c2: Vec3<T>) -> Self {
        let c = [c0.as_array(), c1.as_array(), c2.as_array()];
        Self::from_fn(|i, j| c[j][i])
    }

    pub fn col(&self, j: usize) -> Vec3<T> {
        Vec3::new(self.m[0][j], self.m[1][j], self.m[2][j])
    }

    pub fn row(&self, i: usize) -> Vec3<T> {
        Vec3::from_array(self.m[i])
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.m[j][i])
    }

    pub fn trace(&self) -> T {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    pub fn det(&self) -> T {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn mul_vec(&self, v: Vec3<T>) -> Vec3<T> {
        Vec3::new(self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v))
    }

    /// `Mᵀ v`.
    pub fn tr_mul_vec(&self, v: Vec3<T>) -> Vec3<T> {
        Vec3::new(self.col(0).dot(v), self.col(1).dot(v), self.col(2).dot(v))
    }

    pub fn matmul(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| {
            self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j] + self.m[i][2] * o.m[2][j]
        })
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(|i, j| self.m[i][j] * s)
    }

    /// Frobenius inner product `A : B`.
    pub fn ddot(&self, o: &Self) -> T {
        let mut s = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                s = s + self.m[i][j] * o.m[i][j];
            }
        }
        s
    }

    pub fn norm_sq(&self) -> T {
        self.ddot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn sym(&self) -> Self {
        Self::from_fn(|i, j| (self.m[i][j] + self.m[j][i]) * 0.5)
    }

    /// Skew-symmetric part `(M − Mᵀ)/2`.
    pub fn skw(&self) -> Self {
        skw2(self)
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> Mat3<U> {
        Mat3::from_fn(|i, j| f(self.m[i][j]))
    }

    pub fn to_f64(&self) -> Mat3<f64> {
        self.map(|x| x.value())
    }
}

impl Mat3<f64> {
    pub fn is_symmetric(&self, tol: f64) -> bool {
        (*self - self.transpose()).norm() <= tol
    }

    pub fn is_skew(&self, tol: f64) -> bool {
        (*self + self.transpose()).norm() <= tol
    }

    /// `‖MᵀM − I‖ ≤ tol`.
    pub fn is_orthogonal(&self, tol: f64) -> bool {
        (self.transpose().matmul(self) - Mat3::identity()).norm() <= tol
    }

    /// Tangential with respect to the normal `nu`: `M nu = 0`.
    pub fn is_tangential(&self, nu: Vec3, tol: f64) -> bool {
        self.mul_vec(nu).norm() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()))
    }
}

impl<T: Real> Add for Mat3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::from_fn(|i, j| self.m[i][j] + o.m[i][j])
    }
}

impl<T: Real> Sub for Mat3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::from_fn(|i, j| self.m[i][j] - o.m[i][j])
    }
}

impl<T: Real> Neg for Mat3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.m[i][j])
    }
}

impl<T: Real> Mul<f64> for Mat3<T> {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::from_fn(|i, j| self.m[i][j] * s)
    }
}

impl<T: Real> Mul for Mat3<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.matmul(&o)
    }
}

impl<T: Real> Mul<Vec3<T>> for Mat3<T> {
    type Output = Vec3<T>;
    fn mul(self, v: Vec3<T>) -> Vec3<T> {
        self.mul_vec(v)
    }
}

/// `skw(M) = (M − Mᵀ)/2`.
pub fn skw2<T: Real>(m: &Mat3<T>) -> Mat3<T> {
    Mat3::from_fn(|i, j| (m.m[i][j] - m.m[j][i]) * 0.5)
}

/// The skew tensor `W(u)` with `W(u) v = u × v`.
pub fn wmat<T: Real>(u: Vec3<T>) -> Mat3<T> {
    let z = T::zero();
    Mat3 { m: [[z, -u.z, u.y], [u.z, z, -u.x], [-u.y, u.x, z]] }
}

/// Axial vector of the skew part of `w`, without checking skewness.
pub fn axial_unchecked<T: Real>(w: &Mat3<T>) -> Vec3<T> {
    let m = &w.m;
    Vec3::new(
        (m[2][1] - m[1][2]) * 0.5,
        (m[0][2] - m[2][0]) * 0.5,
        (m[1][0] - m[0][1]) * 0.5,
    )
}

/// Axial vector `w` of a skew tensor `W`, so that `W v = w × v`.
///
/// Fails when `‖W + Wᵀ‖` exceeds `tol · max(1, ‖W‖)`.
pub fn axial(w: &Mat3, tol: f64) -> Result<Vec3> {
    let defect = (*w + w.transpose()).norm();
    if defect > tol * w.norm().max(1.0) {
        return Err(Error::NotSkew { defect });
    }
    Ok(axial_unchecked(w))
}

/// Projector `P(ν) = I − ν ⊗ ν` onto the plane orthogonal to the unit vector `ν`.
pub fn projector(nu: Vec3, tol: f64) -> Result<Mat3> {
    let n = nu.norm();
    if (n - 1.0).abs() > tol {
        return Err(Error::NonUnitNormal { norm: n });
    }
    Ok(projector_unchecked(nu))
}

pub fn projector_unchecked<T: Real>(nu: Vec3<T>) -> Mat3<T> {
    Mat3::identity() - nu.outer(nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_vec() -> impl Strategy<Value = Vec3> {
        (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    fn arb_mat() -> impl Strategy<Value = Mat3> {
        proptest::array::uniform9(-3.0..3.0f64)
            .prop_map(|a| Mat3::from_fn(|i, j| a[3 * i + j]))
    }

    #[test]
    fn skw_of_identity_vanishes() {
        assert_eq!(skw2(&Mat3::<f64>::identity()), Mat3::zero());
    }

    #[test]
    fn axial_of_wmat_e3() {
        assert_eq!(axial(&wmat(Vec3::E3), 1e-12).unwrap(), Vec3::E3);
    }

    #[test]
    fn axial_rejects_symmetric_input() {
        let s = Vec3::E1.outer(Vec3::E2).sym();
        assert!(matches!(axial(&s, 1e-9), Err(Error::NotSkew { .. })));
    }

    #[test]
    fn wmat_basics() {
        assert_eq!(wmat(Vec3::<f64>::zero()), Mat3::zero());
        assert_eq!(wmat(Vec3::E1).mul_vec(Vec3::E2), Vec3::E3);
    }

    #[test]
    fn projector_examples() {
        let p = projector(Vec3::E3, 1e-12).unwrap();
        assert_eq!(p.mul_vec(Vec3::E3), Vec3::zero());
        assert_eq!(p.mul_vec(Vec3::E1), Vec3::E1);
        assert!(matches!(
            projector(Vec3::new(0.0, 0.0, 2.0), 1e-9),
            Err(Error::NonUnitNormal { .. })
        ));
    }

    #[test]
    fn predicates() {
        let r = wmat(Vec3::new(0.0, 0.0, 1.0));
        assert!(r.is_skew(DEFAULT_TOL));
        assert!(!r.is_symmetric(DEFAULT_TOL));
        let c = 0.3f64.cos();
        let s = 0.3f64.sin();
        let q = Mat3 { m: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]] };
        assert!(q.is_orthogonal(DEFAULT_TOL));
        assert!(projector(Vec3::E3, 1e-12).unwrap().is_tangential(Vec3::E3, DEFAULT_TOL));
    }

    proptest! {
        #[test]
        fn axial_of_twice_skw_dyad(a in arb_vec(), b in arb_vec()) {
            // Component expansion: (a⊗b − b⊗a) x = a (b·x) − b (a·x) = (b × a) × x.
            let w = skw2(&a.outer(b)) * 2.0;
            let expected = Vec3::new(
                b.y * a.z - b.z * a.y,
                b.z * a.x - b.x * a.z,
                b.x * a.y - b.y * a.x,
            );
            let got = axial(&w, 1e-12).unwrap();
            prop_assert!((got - expected).norm() < 1e-12);
        }

        #[test]
        fn wmat_norm_is_twice_vector_norm(u in arb_vec()) {
            prop_assert!((wmat(u).norm_sq() - 2.0 * u.norm_sq()).abs() < 1e-12);
            prop_assert!((axial(&wmat(u), 1e-12).unwrap() - u).norm() == 0.0);
        }

        #[test]
        fn sym_plus_skw_recovers(m in arb_mat()) {
            prop_assert!((m.sym() + skw2(&m) - m).norm() < 1e-14);
        }

        #[test]
        fn wmat_acts_as_cross(u in arb_vec(), v in arb_vec()) {
            prop_assert!((wmat(u).mul_vec(v) - u.cross(v)).norm() < 1e-12);
        }

        #[test]
        fn projector_trace_is_two(x in arb_vec()) {
            prop_assume!(x.norm() > 1e-3);
            let nu = x.normalize();
            let p = projector(nu, 1e-9).unwrap();
            prop_assert!((p.trace() - 2.0).abs() < 1e-12);
            prop_assert!(p.is_symmetric(1e-14));
            prop_assert!((p.matmul(&p) - p).norm() < 1e-12);
        }
    }
}
