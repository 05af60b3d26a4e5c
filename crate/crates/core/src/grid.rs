//! Rectangular parameter grids and deterministic parallel evaluation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::surface::Domain;

/// Smallest accepted number of cells per direction.
pub const MIN_CELLS: usize = 8;

/// `n_u × n_v` cells over a domain, i.e. `(n_u + 1)(n_v + 1)` nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub nu: usize,
    pub nv: usize,
    pub domain: Domain,
    /// Rows and columns of nodes skipped at each edge by [`Grid::interior`].
    pub margin: usize,
}

/// Location of a grid node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node {
    pub i: usize,
    pub j: usize,
    pub u: f64,
    pub v: f64,
}

impl Grid {
    pub fn new(nu: usize, nv: usize, domain: Domain, margin: usize) -> Result<Self> {
        if nu < MIN_CELLS || nv < MIN_CELLS {
            return Err(Error::Precondition(format!("grid {nu}x{nv} is below the {MIN_CELLS}x{MIN_CELLS} minimum")));
        }
        if 2 * margin >= nu.min(nv) {
            return Err(Error::Precondition(format!("margin {margin} leaves no interior on a {nu}x{nv} grid")));
        }
        Ok(Grid { nu, nv, domain, margin })
    }

    /// Parses `NxM`.
    pub fn parse_dims(text: &str) -> Result<(usize, usize)> {
        let bad = || Error::Precondition(format!("grid must look like 64x64, got {text:?}"));
        let (a, b) = text.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
    }

    pub fn len(&self) -> usize {
        (self.nu + 1) * (self.nv + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * (self.nu + 1) + i
    }

    pub fn node(&self, k: usize) -> Node {
        let (i, j) = (k % (self.nu + 1), k / (self.nu + 1));
        let d = &self.domain;
        Node {
            i,
            j,
            u: d.u0 + d.span_u() * (i as f64 / self.nu as f64),
            v: d.v0 + d.span_v() * (j as f64 / self.nv as f64),
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = Node> + '_ {
        (0..self.len()).map(|k| self.node(k))
    }

    pub fn is_interior(&self, n: &Node) -> bool {
        let m = self.margin;
        n.i >= m && n.j >= m && n.i + m <= self.nu && n.j + m <= self.nv
    }

    pub fn interior(&self) -> impl Iterator<Item = Node> + '_ {
        self.nodes().filter(|n| self.is_interior(n))
    }

    /// Evaluates `f` on every node in parallel; results are in node order.
    pub fn map<T: Send>(&self, f: impl Fn(Node) -> T + Sync) -> Vec<T> {
        (0..self.len()).into_par_iter().map(|k| f(self.node(k))).collect()
    }

    /// As [`Grid::map`], restricted to interior nodes.
    pub fn map_interior<T: Send>(&self, f: impl Fn(Node) -> T + Sync) -> Vec<(Node, T)> {
        let nodes: Vec<Node> = self.interior().collect();
        nodes.into_par_iter().map(|n| (n, f(n))).collect()
    }
}

/// Max/mean reduction of a residual over grid nodes, in node order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stat {
    pub max: f64,
    pub mean: f64,
    pub min: f64,
    pub worst: Option<Node>,
    pub count: usize,
}

impl Stat {
    pub fn empty() -> Self {
        Stat { max: 0.0, mean: 0.0, min: 0.0, worst: None, count: 0 }
    }

    /// Reduces absolute values; a NaN counts as the worst possible value.
    pub fn of_abs(values: impl IntoIterator<Item = (Node, f64)>) -> Self {
        Self::of(values.into_iter().map(|(n, x)| (n, x.abs())))
    }

    pub fn of(values: impl IntoIterator<Item = (Node, f64)>) -> Self {
        let mut s = Stat { max: f64::NEG_INFINITY, mean: 0.0, min: f64::INFINITY, worst: None, count: 0 };
        let mut sum = 0.0;
        for (n, x) in values {
            let x = if x.is_nan() { f64::INFINITY } else { x };
            if s.worst.is_none() || x > s.max {
                s.max = x;
                s.worst = Some(n);
            }
            s.min = s.min.min(x);
            sum += x;
            s.count += 1;
        }
        if s.count == 0 {
            return Stat::empty();
        }
        s.mean = sum / s.count as f64;
        s
    }
}
