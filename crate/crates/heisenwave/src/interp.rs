//! One-dimensional interpolation stencils shared by resampling and convolution.

use serde::{Deserialize, Serialize};

/// Off-grid reconstruction scheme. Reads outside the grid are zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Interpolation {
    #[default]
    Trilinear,
    /// Tensor-product Catmull-Rom cubic.
    Cubic,
    /// Tensor-product six-point Lagrange.
    Quintic,
}

const SNAP: f64 = 1e-9;

/// Taps of a 1-D stencil: first index (may be negative) and up to six weights.
#[derive(Debug, Clone, Copy)]
pub struct Stencil {
    pub first: isize,
    pub weights: [f64; 6],
    pub len: usize,
}

impl Stencil {
    /// Stencil at fractional index `u` on an axis of `n` nodes, or `None` outside it.
    #[inline]
    pub fn at(u: f64, n: usize, scheme: Interpolation) -> Option<Stencil> {
        let last = (n - 1) as f64;
        if !(u > -SNAP && u < last + SNAP) {
            return None;
        }
        let r = u.round();
        if (u - r).abs() < SNAP {
            return Some(Stencil { first: r as isize, weights: [1.0, 0.0, 0.0, 0.0, 0.0, 0.0], len: 1 });
        }
        let i0 = u.floor();
        let x = u - i0;
        let i0 = i0 as isize;
        Some(match scheme {
            Interpolation::Trilinear => Stencil { first: i0, weights: [1.0 - x, x, 0.0, 0.0, 0.0, 0.0], len: 2 },
            Interpolation::Cubic => {
                let [a, b, c, d] = catmull_rom(x);
                Stencil { first: i0 - 1, weights: [a, b, c, d, 0.0, 0.0], len: 4 }
            }
            Interpolation::Quintic => Stencil { first: i0 - 2, weights: lagrange6(x), len: 6 },
        })
    }

    #[inline]
    pub fn taps(&self) -> impl Iterator<Item = (isize, f64)> + '_ {
        (0..self.len).map(move |k| (self.first + k as isize, self.weights[k]))
    }
}

/// Catmull-Rom weights for taps `-1, 0, 1, 2` at offset `x ∈ [0, 1)`.
#[inline]
pub fn catmull_rom(x: f64) -> [f64; 4] {
    let x2 = x * x;
    let x3 = x2 * x;
    [
        0.5 * (-x3 + 2.0 * x2 - x),
        0.5 * (3.0 * x3 - 5.0 * x2 + 2.0),
        0.5 * (-3.0 * x3 + 4.0 * x2 + x),
        0.5 * (x3 - x2),
    ]
}

/// Lagrange weights for taps `-2..=3` at offset `x ∈ [0, 1)`.
#[inline]
pub fn lagrange6(x: f64) -> [f64; 6] {
    let mut w = [0.0; 6];
    for (k, wk) in w.iter_mut().enumerate() {
        let xk = k as f64 - 2.0;
        let mut num = 1.0;
        let mut den = 1.0;
        for m in 0..6 {
            if m != k {
                let xm = m as f64 - 2.0;
                num *= x - xm;
                den *= xk - xm;
            }
        }
        *wk = num / den;
    }
    w
}
