//! Regular symmetric box grids over the group.

use crate::error::{Error, Result};
use crate::group::GroupPoint;
use serde::{Deserialize, Serialize};

/// One axis `[-E, E]` sampled at `samples` equally spaced nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub samples: usize,
    pub half_extent: f64,
}

impl Axis {
    pub fn new(samples: usize, half_extent: f64) -> Result<Self> {
        if samples < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 samples, got {samples}")));
        }
        if !(half_extent.is_finite() && half_extent > 0.0) {
            return Err(Error::InvalidGrid(format!("half extent must be positive, got {half_extent}")));
        }
        Ok(Axis { samples, half_extent })
    }

    /// Axis with the given spacing and `samples` nodes, centred at zero.
    pub fn with_spacing(samples: usize, spacing: f64) -> Result<Self> {
        Axis::new(samples, 0.5 * spacing * (samples as f64 - 1.0))
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / (self.samples as f64 - 1.0)
    }

    /// Coordinate of node `i`; exactly antisymmetric about the centre.
    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        (i as f64 - self.center()) * self.spacing()
    }

    #[inline]
    pub fn center(&self) -> f64 {
        0.5 * (self.samples as f64 - 1.0)
    }

    /// Fractional index of coordinate `x`.
    #[inline]
    pub fn fractional_index(&self, x: f64) -> f64 {
        x / self.spacing() + self.center()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.samples).map(|i| self.node(i)).collect()
    }

    /// Trapezoidal weights.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut w = vec![h; self.samples];
        w[0] = 0.5 * h;
        w[self.samples - 1] = 0.5 * h;
        w
    }

    pub fn scaled(&self, factor: f64) -> Axis {
        Axis { samples: self.samples, half_extent: self.half_extent * factor }
    }

    pub fn has_center_node(&self) -> bool {
        self.samples % 2 == 1
    }

    /// Index range `[lo, hi)` of nodes with `|x| <= frac * half_extent`.
    pub fn interior_range(&self, frac: f64) -> (usize, usize) {
        let lim = frac * self.half_extent * (1.0 + 1e-12);
        let lo = (0..self.samples).find(|&i| self.node(i).abs() <= lim).unwrap_or(0);
        let hi = (0..self.samples).rev().find(|&i| self.node(i).abs() <= lim).map_or(0, |i| i + 1);
        (lo, hi)
    }
}

/// Product grid `[-E_p,E_p]×[-E_q,E_q]×[-E_t,E_t]`. Storage is row-major with `t` fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub p: Axis,
    pub q: Axis,
    pub t: Axis,
}

impl GridSpec {
    pub fn new(samples: [usize; 3], half_extent: [f64; 3]) -> Result<Self> {
        Ok(GridSpec {
            p: Axis::new(samples[0], half_extent[0])?,
            q: Axis::new(samples[1], half_extent[1])?,
            t: Axis::new(samples[2], half_extent[2])?,
        })
    }

    pub fn cube(samples: usize, half_extent: f64) -> Result<Self> {
        GridSpec::new([samples; 3], [half_extent; 3])
    }

    pub fn from_axes(p: Axis, q: Axis, t: Axis) -> Self {
        GridSpec { p, q, t }
    }

    pub fn axes(&self) -> [Axis; 3] {
        [self.p, self.q, self.t]
    }

    pub fn samples(&self) -> [usize; 3] {
        [self.p.samples, self.q.samples, self.t.samples]
    }

    pub fn half_extents(&self) -> [f64; 3] {
        [self.p.half_extent, self.q.half_extent, self.t.half_extent]
    }

    pub fn spacing(&self) -> [f64; 3] {
        [self.p.spacing(), self.q.spacing(), self.t.spacing()]
    }

    pub fn len(&self) -> usize {
        self.p.samples * self.q.samples * self.t.samples
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn columns(&self) -> usize {
        self.p.samples * self.q.samples
    }

    #[inline]
    pub fn index(&self, ip: usize, iq: usize, it: usize) -> usize {
        (ip * self.q.samples + iq) * self.t.samples + it
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> (usize, usize, usize) {
        let nt = self.t.samples;
        let nq = self.q.samples;
        (idx / (nq * nt), (idx / nt) % nq, idx % nt)
    }

    #[inline]
    pub fn point(&self, ip: usize, iq: usize, it: usize) -> GroupPoint {
        GroupPoint::new(self.p.node(ip), self.q.node(iq), self.t.node(it))
    }

    #[inline]
    pub fn point_at(&self, idx: usize) -> GroupPoint {
        let (i, j, k) = self.unravel(idx);
        self.point(i, j, k)
    }

    /// Volume element of an interior node.
    pub fn cell_volume(&self) -> f64 {
        let [a, b, c] = self.spacing();
        a * b * c
    }

    /// Image of the grid under `δ_a`: same sample counts, extents scaled by `(a, a, a²)`.
    pub fn dilated(&self, a: f64) -> GridSpec {
        GridSpec { p: self.p.scaled(a), q: self.q.scaled(a), t: self.t.scaled(a * a) }
    }

    /// Node mask of the interior box `|x_k| <= frac · E_k` on every axis.
    pub fn interior_mask(&self, frac: f64) -> Vec<bool> {
        let r = [self.p.interior_range(frac), self.q.interior_range(frac), self.t.interior_range(frac)];
        let mut mask = vec![false; self.len()];
        for i in r[0].0..r[0].1 {
            for j in r[1].0..r[1].1 {
                for k in r[2].0..r[2].1 {
                    mask[self.index(i, j, k)] = true;
                }
            }
        }
        mask
    }

    pub fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{:?} vs {:?}", self.samples(), other.samples())))
        }
    }
}

/// Fraction of each half extent treated as interior by residual metrics.
pub const INTERIOR_FRACTION: f64 = 0.8;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_nodes() {
        let a = Axis::new(5, 2.0).unwrap();
        assert_eq!(a.spacing(), 1.0);
        assert_eq!(a.nodes(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert!(Axis::new(2, 1.0).is_err());
        assert!(Axis::new(3, 0.0).is_err());
    }

    #[test]
    fn nodes_antisymmetric() {
        for n in [8, 9, 32, 33, 65] {
            let a = Axis::new(n, 6.0).unwrap();
            for i in 0..n {
                assert_eq!(a.node(i), -a.node(n - 1 - i));
            }
        }
    }

    #[test]
    fn index_roundtrip() {
        let g = GridSpec::new([3, 4, 5], [1.0, 1.0, 1.0]).unwrap();
        for idx in 0..g.len() {
            let (i, j, k) = g.unravel(idx);
            assert_eq!(g.index(i, j, k), idx);
        }
    }

    #[test]
    fn interior_is_eighty_percent() {
        let a = Axis::new(11, 5.0).unwrap();
        assert_eq!(a.interior_range(0.8), (1, 10));
        let w: f64 = a.weights().iter().sum();
        assert!((w - 10.0).abs() < 1e-12);
    }
}
