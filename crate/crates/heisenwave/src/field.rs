//! Complex-valued functions sampled on a [`GridSpec`].

use crate::error::{Error, Result};
use crate::grid::{GridSpec, INTERIOR_FRACTION};
use crate::group::{dilate_point, inverse, multiply, GroupPoint, Scale};
use crate::interp::{Interpolation, Stencil};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Normalisation used by [`SampledField::dilate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// `a⁻⁴ f(δ_{1/a}·)`, preserves the integral.
    L1,
    /// `a⁻² f(δ_{1/a}·)`, preserves the 2-norm.
    L2,
}

impl Normalization {
    pub fn factor(self, a: f64) -> f64 {
        match self {
            Normalization::L1 => a.powi(-4),
            Normalization::L2 => a.powi(-2),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl SampledField {
    pub fn zeros(grid: GridSpec) -> Self {
        SampledField { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_values(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} values for {} nodes", values.len(), grid.len())));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("field values"));
        }
        Ok(SampledField { grid, values })
    }

    pub(crate) fn from_values_unchecked(grid: GridSpec, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        SampledField { grid, values }
    }

    pub fn from_real(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        SampledField::from_values(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(GroupPoint) -> Complex64 + Sync,
    {
        let values = (0..grid.len()).into_par_iter().map(|i| f(grid.point_at(i))).collect();
        SampledField { grid, values }
    }

    pub fn from_real_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(GroupPoint) -> f64 + Sync,
    {
        SampledField::from_fn(grid, |w| Complex64::new(f(w), 0.0))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    #[inline]
    pub fn at(&self, ip: usize, iq: usize, it: usize) -> Complex64 {
        self.values[self.grid.index(ip, iq, it)]
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn map<F: Fn(Complex64) -> Complex64 + Sync>(&self, f: F) -> SampledField {
        SampledField { grid: self.grid, values: self.values.par_iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, c: f64) -> SampledField {
        self.map(|v| v * c)
    }

    pub fn scale_complex(&self, c: Complex64) -> SampledField {
        self.map(|v| v * c)
    }

    /// `α·self + β·other`.
    pub fn combine(&self, alpha: Complex64, other: &SampledField, beta: Complex64) -> Result<SampledField> {
        self.grid.ensure_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&x, &y)| alpha * x + beta * y).collect();
        Ok(SampledField { grid: self.grid, values })
    }

    pub fn add(&self, other: &SampledField) -> Result<SampledField> {
        let one = Complex64::new(1.0, 0.0);
        self.combine(one, other, one)
    }

    pub fn sub(&self, other: &SampledField) -> Result<SampledField> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    pub fn add_assign_scaled(&mut self, other: &SampledField, c: f64) -> Result<()> {
        self.grid.ensure_same(&other.grid)?;
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x += y * c;
        }
        Ok(())
    }

    /// Trapezoidal weight of every node.
    pub fn weights(&self) -> Vec<f64> {
        node_weights(&self.grid)
    }

    /// Trapezoidal approximation of `∫ f dω` (Haar measure is Lebesgue measure).
    pub fn integrate(&self) -> Complex64 {
        weighted_sum(&self.grid, |i| self.values[i])
    }

    /// `⟨f, g⟩ = ∫ f ḡ dω`.
    pub fn inner(&self, other: &SampledField) -> Result<Complex64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(weighted_sum(&self.grid, |i| self.values[i] * other.values[i].conj()))
    }

    pub fn norm_l2(&self) -> f64 {
        weighted_sum(&self.grid, |i| Complex64::new(self.values[i].norm_sqr(), 0.0)).re.sqrt()
    }

    pub fn norm_l1(&self) -> f64 {
        weighted_sum(&self.grid, |i| Complex64::new(self.values[i].norm(), 0.0)).re
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Largest `|f|` over the outermost layer of nodes.
    pub fn boundary_max_abs(&self) -> f64 {
        let [np, nq, nt] = self.grid.samples();
        let mut m: f64 = 0.0;
        for i in 0..np {
            for j in 0..nq {
                for k in 0..nt {
                    if i == 0 || j == 0 || k == 0 || i == np - 1 || j == nq - 1 || k == nt - 1 {
                        m = m.max(self.at(i, j, k).norm());
                    }
                }
            }
        }
        m
    }

    /// Value at an arbitrary point; zero outside the grid.
    pub fn interpolate(&self, w: GroupPoint, scheme: Interpolation) -> Complex64 {
        let g = &self.grid;
        let (Some(sp), Some(sq), Some(st)) = (
            Stencil::at(g.p.fractional_index(w.p), g.p.samples, scheme),
            Stencil::at(g.q.fractional_index(w.q), g.q.samples, scheme),
            Stencil::at(g.t.fractional_index(w.t), g.t.samples, scheme),
        ) else {
            return Complex64::new(0.0, 0.0);
        };
        let [np, nq, nt] = g.samples();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, wi) in sp.taps() {
            if i < 0 || i as usize >= np || wi == 0.0 {
                continue;
            }
            for (j, wj) in sq.taps() {
                if j < 0 || j as usize >= nq || wj == 0.0 {
                    continue;
                }
                let base = g.index(i as usize, j as usize, 0);
                let mut line = Complex64::new(0.0, 0.0);
                for (k, wk) in st.taps() {
                    if k < 0 || k as usize >= nt {
                        continue;
                    }
                    line += self.values[base + k as usize] * wk;
                }
                acc += line * (wi * wj);
            }
        }
        acc
    }

    /// Resample onto another grid.
    pub fn resample(&self, grid: &GridSpec, scheme: Interpolation) -> SampledField {
        SampledField::from_fn(*grid, |w| self.interpolate(w, scheme))
    }

    /// `f̃(ω) = conj(f(ω⁻¹))`; exact because `ω⁻¹ = −ω` maps nodes to nodes.
    pub fn involute(&self) -> SampledField {
        let [np, nq, nt] = self.grid.samples();
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..np {
            for j in 0..nq {
                for k in 0..nt {
                    values.push(self.at(np - 1 - i, nq - 1 - j, nt - 1 - k).conj());
                }
            }
        }
        SampledField { grid: self.grid, values }
    }

    /// `(L_{ω₀} f)(υ) = f(ω₀⁻¹ υ)`, trilinear resampling onto the same grid.
    pub fn left_translate(&self, w0: GroupPoint) -> SampledField {
        self.left_translate_with(w0, Interpolation::Trilinear)
    }

    pub fn left_translate_with(&self, w0: GroupPoint, scheme: Interpolation) -> SampledField {
        if w0 == GroupPoint::IDENTITY {
            return self.clone();
        }
        let w0i = inverse(w0);
        SampledField::from_fn(self.grid, |u| self.interpolate(multiply(w0i, u), scheme))
    }

    /// `a^{-k} f(δ_{1/a} ω)` with `k = 4` (L1) or `k = 2` (L2), trilinear resampling.
    pub fn dilate(&self, a: Scale, norm: Normalization) -> SampledField {
        self.dilate_with(a, norm, Interpolation::Trilinear)
    }

    pub fn dilate_with(&self, a: Scale, norm: Normalization, scheme: Interpolation) -> SampledField {
        let c = norm.factor(a.get());
        let inv = a.recip();
        SampledField::from_fn(self.grid, |w| self.interpolate(dilate_point(inv, w), scheme) * c)
    }

    /// Pointwise `max|f − g| / max|g|`, optionally restricted to the interior box.
    pub fn max_rel_diff(&self, reference: &SampledField, interior_only: bool) -> Result<f64> {
        self.grid.ensure_same(&reference.grid)?;
        let mask = interior_only.then(|| self.grid.interior_mask(INTERIOR_FRACTION));
        let mut num: f64 = 0.0;
        let mut den: f64 = 0.0;
        for i in 0..self.values.len() {
            if mask.as_ref().is_some_and(|m| !m[i]) {
                continue;
            }
            num = num.max((self.values[i] - reference.values[i]).norm());
            den = den.max(reference.values[i].norm());
        }
        Ok(ratio(num, den))
    }

    /// `‖f − g‖₂ / ‖g‖₂` over the interior box.
    pub fn interior_rel_l2(&self, reference: &SampledField) -> Result<f64> {
        self.rel_l2_masked(reference, Some(&self.grid.interior_mask(INTERIOR_FRACTION)))
    }

    /// `‖f − g‖₂ / ‖g‖₂` over the whole grid.
    pub fn rel_l2(&self, reference: &SampledField) -> Result<f64> {
        self.rel_l2_masked(reference, None)
    }

    fn rel_l2_masked(&self, reference: &SampledField, mask: Option<&[bool]>) -> Result<f64> {
        self.grid.ensure_same(&reference.grid)?;
        let w = self.weights();
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..self.values.len() {
            if mask.is_some_and(|m| !m[i]) {
                continue;
            }
            num += w[i] * (self.values[i] - reference.values[i]).norm_sqr();
            den += w[i] * reference.values[i].norm_sqr();
        }
        Ok(ratio(num.sqrt(), den.sqrt()))
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

pub(crate) fn node_weights(grid: &GridSpec) -> Vec<f64> {
    let (wp, wq, wt) = (grid.p.weights(), grid.q.weights(), grid.t.weights());
    let mut w = Vec::with_capacity(grid.len());
    for a in &wp {
        for b in &wq {
            for c in &wt {
                w.push(a * b * c);
            }
        }
    }
    w
}

/// Trapezoidal sum of `f(idx)` over all nodes, accumulated per `(p, q)` column.
pub(crate) fn weighted_sum<F: Fn(usize) -> Complex64 + Sync>(grid: &GridSpec, f: F) -> Complex64 {
    let (wp, wq, wt) = (grid.p.weights(), grid.q.weights(), grid.t.weights());
    let nt = grid.t.samples;
    (0..grid.columns())
        .into_par_iter()
        .map(|c| {
            let (i, j) = (c / grid.q.samples, c % grid.q.samples);
            let base = c * nt;
            let mut s = Complex64::new(0.0, 0.0);
            for (k, w) in wt.iter().enumerate() {
                s += f(base + k) * *w;
            }
            s * (wp[i] * wq[j])
        })
        .reduce(|| Complex64::new(0.0, 0.0), |a, b| a + b)
}
