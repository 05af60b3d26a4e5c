use std::ops::{Add, Mul, Neg, Sub};

use super::{Mat3, Vec3};

/// Dense third-rank tensor `T[i][j][k]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ten3 {
    pub t: [[[f64; 3]; 3]; 3],
}

impl Ten3 {
    pub fn zero() -> Self {
        Self { t: [[[0.0; 3]; 3]; 3] }
    }

    pub fn from_fn(f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out.t[i][j][k] = f(i, j, k);
                }
            }
        }
        out
    }

    /// `a ⊗ b ⊗ c`.
    pub fn triad(a: Vec3, b: Vec3, c: Vec3) -> Self {
        Self::from_fn(|i, j, k| a[i] * b[j] * c[k])
    }

    /// `M ⊗ a`, with `(M ⊗ a)_ijk = M_ij a_k`.
    pub fn mat_vec(m: &Mat3, a: Vec3) -> Self {
        Self::from_fn(|i, j, k| m.m[i][j] * a[k])
    }

    /// `a ⊗ M`, with `(a ⊗ M)_ijk = a_i M_jk`.
    pub fn vec_mat(a: Vec3, m: &Mat3) -> Self {
        Self::from_fn(|i, j, k| a[i] * m.m[j][k])
    }

    /// Left contraction `(A T)_ijk = A_ih T_hjk`.
    pub fn left_mul(a: &Mat3, t: &Self) -> Self {
        Self::from_fn(|i, j, k| (0..3).map(|h| a.m[i][h] * t.t[h][j][k]).sum())
    }

    /// The matrix slice `T(·,·,k)` obtained by fixing the last index.
    pub fn slice_k(&self, k: usize) -> Mat3 {
        Mat3::from_fn(|i, j| self.t[i][j][k])
    }

    /// Contraction of the last slot with `a`: `T_ijk a_k`.
    pub fn contract_last(&self, a: Vec3) -> Mat3 {
        Mat3::from_fn(|i, j| (0..3).map(|k| self.t[i][j][k] * a[k]).sum())
    }

    pub fn norm_sq(&self) -> f64 {
        self.t.iter().flatten().flatten().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.t.iter().flatten().flatten().fold(0.0f64, |a, x| a.max(x.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_fn(|i, j, k| self.t[i][j][k] * s)
    }
}

impl Add for Ten3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::from_fn(|i, j, k| self.t[i][j][k] + o.t[i][j][k])
    }
}

impl Sub for Ten3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::from_fn(|i, j, k| self.t[i][j][k] - o.t[i][j][k])
    }
}

impl Neg for Ten3 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl Mul<f64> for Ten3 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

/// Skew part on the last two slots: `2 skw(a1⊗a2⊗a3) = a1⊗a2⊗a3 − a1⊗a3⊗a2`.
pub fn skw3(t: &Ten3) -> Ten3 {
    Ten3::from_fn(|i, j, k| 0.5 * (t.t[i][j][k] - t.t[i][k][j]))
}

/// `A ∘ T = A_ij T_ijk e_k`.
pub fn circ_mt(a: &Mat3, t: &Ten3) -> Vec3 {
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                *o += a.m[i][j] * t.t[i][j][k];
            }
        }
    }
    Vec3::from_array(out)
}

/// `T ∘ A = T_ijk A_jk e_i`.
pub fn circ_tm(t: &Ten3, a: &Mat3) -> Vec3 {
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        for j in 0..3 {
            for k in 0..3 {
                *o += t.t[i][j][k] * a.m[j][k];
            }
        }
    }
    Vec3::from_array(out)
}

/// `T ∘ a = T_ikj a_k e_i ⊗ e_j` (contraction on the middle slot).
pub fn circ_tv(t: &Ten3, a: Vec3) -> Mat3 {
    Mat3::from_fn(|i, j| (0..3).map(|k| t.t[i][k][j] * a[k]).sum())
}
