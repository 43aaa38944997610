//! Analytically sampled functions with known footprint, used as convolution kernels.

use crate::error::Result;
use crate::field::SampledField;
use crate::grid::GridSpec;
use crate::group::{dilate_point, Scale};
use crate::heat::HeatKernelEvaluator;
use crate::interp::Interpolation;

/// A function on the group that can be sampled on any grid.
pub trait GroupKernel: Sync {
    fn sample(&self, grid: &GridSpec) -> Result<SampledField>;
    /// Half extents `[p/q, t]` outside which the function is negligible.
    fn support(&self) -> [f64; 2];
    /// Largest node spacing `[p/q, t]` at which interpolation stays accurate.
    fn resolution(&self) -> [f64; 2];
}

/// Footprint of time-one heat profiles; scales as `(√s, s)`.
pub const HEAT_SUPPORT: [f64; 2] = [7.5, 6.0];
pub const HEAT_RESOLUTION: [f64; 2] = [0.4, 0.2];

/// `c₀ h(·,s) + c₁ ∂_s h(·,s) + c₂ ∂_s² h(·,s)`.
#[derive(Debug, Clone, Copy)]
pub struct HeatProfile<'a> {
    pub evaluator: &'a HeatKernelEvaluator,
    pub s: f64,
    pub coeffs: [f64; 3],
}

impl<'a> HeatProfile<'a> {
    pub fn new(evaluator: &'a HeatKernelEvaluator, s: f64, coeffs: [f64; 3]) -> Self {
        HeatProfile { evaluator, s, coeffs }
    }

    /// `h(·, s)`
    pub fn heat(evaluator: &'a HeatKernelEvaluator, s: f64) -> Self {
        Self::new(evaluator, s, [1.0, 0.0, 0.0])
    }

    /// `φ_b = b⁻⁴ φ(δ_{1/b}·) = −b² ∂_s h(·, b²)`
    pub fn phi_l1(evaluator: &'a HeatKernelEvaluator, b: f64) -> Self {
        Self::new(evaluator, b * b, [0.0, -b * b, 0.0])
    }

    /// `D_b φ = b⁻² φ(δ_{1/b}·) = −b⁴ ∂_s h(·, b²)`
    pub fn phi_l2(evaluator: &'a HeatKernelEvaluator, b: f64) -> Self {
        Self::new(evaluator, b * b, [0.0, -b.powi(4), 0.0])
    }

    /// `ψ_b = h(·, b²) − b² ∂_s h(·, b²)`
    pub fn psi_l1(evaluator: &'a HeatKernelEvaluator, b: f64) -> Self {
        Self::new(evaluator, b * b, [1.0, -b * b, 0.0])
    }

    /// `L²h(·, s) = ∂_s² h(·, s)`
    pub fn laplacian_squared(evaluator: &'a HeatKernelEvaluator, s: f64) -> Self {
        Self::new(evaluator, s, [0.0, 0.0, 1.0])
    }
}

impl GroupKernel for HeatProfile<'_> {
    fn sample(&self, grid: &GridSpec) -> Result<SampledField> {
        self.evaluator.sample_combination(grid, self.s, self.coeffs)
    }

    fn support(&self) -> [f64; 2] {
        [HEAT_SUPPORT[0] * self.s.sqrt(), HEAT_SUPPORT[1] * self.s]
    }

    fn resolution(&self) -> [f64; 2] {
        [HEAT_RESOLUTION[0] * self.s.sqrt(), HEAT_RESOLUTION[1] * self.s]
    }
}

/// `c · f(δ_{1/a} ω)` for a sampled `f`, read by cubic interpolation.
#[derive(Debug, Clone)]
pub struct DilatedSample<'a> {
    pub base: &'a SampledField,
    pub a: Scale,
    pub factor: f64,
}

impl GroupKernel for DilatedSample<'_> {
    fn sample(&self, grid: &GridSpec) -> Result<SampledField> {
        let inv = self.a.recip();
        let c = self.factor;
        Ok(SampledField::from_fn(*grid, |w| self.base.interpolate(dilate_point(inv, w), Interpolation::Cubic) * c))
    }

    fn support(&self) -> [f64; 2] {
        let a = self.a.get();
        let g = self.base.grid();
        [g.p.half_extent.max(g.q.half_extent) * a, g.t.half_extent * a * a]
    }

    fn resolution(&self) -> [f64; 2] {
        let a = self.a.get();
        let g = self.base.grid();
        [g.p.spacing().min(g.q.spacing()) * a, g.t.spacing() * a * a]
    }
}
