//! Wavefront OBJ export of a parameter grid.

use std::fmt::Write as _;

use surfkin::grid::Grid;
use surfkin::surface::{Surface, Tangent};
use surfkin::Vec3;

/// Triangles thinner than this, relative to their longest edge squared, are dropped.
pub const DEGENERATE_REL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vec3>,
    pub normals: Option<Vec<Vec3>>,
    /// 0-based vertex indices.
    pub faces: Vec<[usize; 3]>,
    pub dropped: usize,
}

/// Samples a surface on every grid node. Each cell is split along its
/// `(i, j) → (i+1, j+1)` diagonal, oriented with the chart normal.
pub fn triangulate<S: Surface>(s: &S, grid: &Grid, normals: bool) -> Mesh {
    let vertices = grid.map(|n| s.position(n.u, n.v));
    let normals = normals.then(|| grid.map(|n| Tangent::eval(s, n.u, n.v).nu));
    let mut faces = Vec::with_capacity(2 * grid.nu * grid.nv);
    let mut dropped = 0;
    for j in 0..grid.nv {
        for i in 0..grid.nu {
            let p00 = grid.index(i, j);
            let p10 = grid.index(i + 1, j);
            let p11 = grid.index(i + 1, j + 1);
            let p01 = grid.index(i, j + 1);
            for f in [[p00, p10, p11], [p00, p11, p01]] {
                if degenerate(&vertices, f) {
                    dropped += 1;
                } else {
                    faces.push(f);
                }
            }
        }
    }
    Mesh { vertices, normals, faces, dropped }
}

fn degenerate(v: &[Vec3], f: [usize; 3]) -> bool {
    let (a, b, c) = (v[f[0]], v[f[1]], v[f[2]]);
    let (e1, e2) = (b - a, c - a);
    let scale = e1.norm_sq().max(e2.norm_sq()).max((c - b).norm_sq());
    let area2 = e1.cross(e2).norm();
    !(area2 > DEGENERATE_REL * scale) || !area2.is_finite()
}

fn coord(x: f64) -> String {
    // 17 significant digits; -0 is written as 0 so output does not depend on signed zeros.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

impl Mesh {
    pub fn to_obj(&self, name: &str) -> String {
        let mut s = String::with_capacity(64 * (self.vertices.len() + self.faces.len()));
        let _ = writeln!(s, "# surfkin mesh");
        let _ = writeln!(s, "o {name}");
        for p in &self.vertices {
            let _ = writeln!(s, "v {} {} {}", coord(p.x), coord(p.y), coord(p.z));
        }
        if let Some(ns) = &self.normals {
            for n in ns {
                let _ = writeln!(s, "vn {} {} {}", coord(n.x), coord(n.y), coord(n.z));
            }
        }
        for f in &self.faces {
            let [a, b, c] = f.map(|k| k + 1);
            if self.normals.is_some() {
                let _ = writeln!(s, "f {a}//{a} {b}//{b} {c}//{c}");
            } else {
                let _ = writeln!(s, "f {a} {b} {c}");
            }
        }
        s
    }
}
