//! Continuous wavelet transform, its energy, and the Calderón kernel
//! `K_{ε,A} = ∫_ε^A φ̃_a ∗ φ_a a⁻¹ da`.

use crate::conv::{convolve, convolve_kernel, KernelConvolution, KernelSide, Region, Route};
use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::grid::GridSpec;
use crate::group::Scale;
use crate::heat::HeatKernelEvaluator;
use crate::kernel::{DilatedSample, GroupKernel, HeatProfile};
use crate::wavelet::MexicanHatWavelet;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `q·c·∫ψ` with `q = ½`, `c = ¼`, `∫ψ = 1`.
pub const ADMISSIBILITY_CONSTANT: f64 = 0.125;
/// `c` in `φ_{√a} ∗ φ_{√a} = −c·a·(d/da) ψ_{√(2a)}`.
pub const KEY_IDENTITY_C: f64 = 0.25;
/// `k` in `ψ_{k a}`.
pub const PSI_DILATION_K: f64 = std::f64::consts::SQRT_2;

/// Geometric scales `a_j = a_min ρ^j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleLattice {
    pub a_min: f64,
    pub a_max: f64,
    pub count: usize,
}

impl ScaleLattice {
    pub fn new(a_min: f64, a_max: f64, count: usize) -> Result<Self> {
        if !(a_min.is_finite() && a_min > 0.0 && a_max.is_finite() && a_max > a_min) {
            return Err(Error::InvalidLattice(format!("need 0 < a_min < a_max, got {a_min}, {a_max}")));
        }
        if count < 2 {
            return Err(Error::InvalidLattice(format!("need at least 2 scales, got {count}")));
        }
        Ok(ScaleLattice { a_min, a_max, count })
    }

    /// `ln ρ`.
    pub fn log_step(&self) -> f64 {
        (self.a_max / self.a_min).ln() / (self.count as f64 - 1.0)
    }

    pub fn node(&self, j: usize) -> f64 {
        if j + 1 == self.count {
            self.a_max
        } else {
            self.a_min * (self.log_step() * j as f64).exp()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.count).map(|j| self.node(j)).collect()
    }

    /// Trapezoidal weights in `ln a`, i.e. for the measure `a⁻¹ da`.
    pub fn log_weights(&self) -> Vec<f64> {
        let h = self.log_step();
        (0..self.count).map(|j| if j == 0 || j + 1 == self.count { 0.5 * h } else { h }).collect()
    }

    /// Nodes `lo..=hi` as a lattice of their own.
    pub fn sub_lattice(&self, lo: usize, hi: usize) -> Result<ScaleLattice> {
        if hi >= self.count || hi <= lo {
            return Err(Error::InvalidLattice(format!("bad sub-range {lo}..={hi} of {}", self.count)));
        }
        let mut s = ScaleLattice::new(self.node(lo), self.node(hi), hi - lo + 1)?;
        s.a_min = self.node(lo);
        s.a_max = self.node(hi);
        Ok(s)
    }

    fn spans(&self, eps: f64, a: f64) -> bool {
        (self.a_min / eps - 1.0).abs() < 1e-12 && (self.a_max / a - 1.0).abs() < 1e-12
    }
}

fn check_window(eps: f64, a: f64) -> Result<()> {
    if eps.is_finite() && a.is_finite() && eps > 0.0 && eps <= a {
        Ok(())
    } else {
        Err(Error::InvalidWindow { eps, a })
    }
}

/// `V_φ f(ω, a) = (f ∗ D_a φ̃)(ω)` on each lattice scale.
///
/// Each slab lives on the input field's lattice; its extent covers the support
/// of the product at that scale.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletCoefficients {
    pub grid: GridSpec,
    pub scales: ScaleLattice,
    pub slabs: Vec<SampledField>,
}

impl WaveletCoefficients {
    /// `∫ |V|² dω` per scale.
    pub fn slab_energies(&self) -> Vec<f64> {
        self.slabs.iter().map(|s| s.norm_l2().powi(2)).collect()
    }

    /// Per-node weights of `a⁻⁵ da`: log-trapezoid weight times `a⁻⁴`.
    pub fn measure_weights(&self) -> Vec<f64> {
        self.scales.nodes().iter().zip(self.scales.log_weights()).map(|(a, w)| w * a.powi(-4)).collect()
    }
}

/// Involution of a kernel; exact on the symmetric sampling grids.
struct Involuted<K>(K);

impl<K: GroupKernel> GroupKernel for Involuted<K> {
    fn sample(&self, grid: &GridSpec) -> Result<SampledField> {
        Ok(self.0.sample(grid)?.involute())
    }
    fn support(&self) -> [f64; 2] {
        self.0.support()
    }
    fn resolution(&self) -> [f64; 2] {
        self.0.resolution()
    }
}

/// Relative amplitude at which the input's support is cut when sizing slabs.
pub const SLAB_SUPPORT_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CwtOptions {
    pub region: Region,
    pub route: Route,
}

impl Default for CwtOptions {
    fn default() -> Self {
        CwtOptions { region: Region::Support(SLAB_SUPPORT_THRESHOLD), route: Route::Auto }
    }
}

pub fn cwt(f: &SampledField, scales: &ScaleLattice, ev: &HeatKernelEvaluator) -> Result<WaveletCoefficients> {
    cwt_with(f, scales, ev, CwtOptions::default())
}

pub fn cwt_with(
    f: &SampledField,
    scales: &ScaleLattice,
    ev: &HeatKernelEvaluator,
    opts: CwtOptions,
) -> Result<WaveletCoefficients> {
    let phi = MexicanHatWavelet::new(ev);
    let conv = KernelConvolution { side: KernelSide::Right, region: opts.region, route: opts.route };
    let slabs = scales
        .nodes()
        .into_iter()
        .map(|a| convolve_kernel(f, &Involuted(phi.unitary_profile(a)), conv))
        .collect::<Result<Vec<_>>>()?;
    Ok(WaveletCoefficients { grid: *f.grid(), scales: *scales, slabs })
}

/// `∬ |V_φ f(ω,a)|² a⁻⁵ dω da`, trapezoidal in `ω` and in `ln a`.
pub fn cwt_energy(c: &WaveletCoefficients) -> f64 {
    c.slab_energies().iter().zip(c.measure_weights()).map(|(e, w)| e * w).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Numeric,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalderonKernel {
    pub eps: f64,
    pub a: f64,
    pub field: SampledField,
    pub provenance: Provenance,
}

/// `φ̃ ∗ φ` on a base grid; every scale of the kernel integrand is a dilate of it.
#[derive(Debug, Clone)]
pub struct ScaleIntegrand {
    pub field: SampledField,
}

/// Default base grid for [`ScaleIntegrand`].
pub fn integrand_base_grid() -> GridSpec {
    GridSpec::new([57, 57, 193], [10.5, 10.5, 18.0]).expect("static grid")
}

impl ScaleIntegrand {
    pub fn new(ev: &HeatKernelEvaluator, grid: &GridSpec) -> Result<Self> {
        let phi = MexicanHatWavelet::new(ev).sample(grid)?;
        Ok(ScaleIntegrand { field: convolve(&phi.involute(), &phi)? })
    }

    /// `φ̃_a ∗ φ_a = a⁻⁴ (φ̃ ∗ φ)(δ_{1/a}·)`.
    pub fn at_scale(&self, a: f64) -> Result<DilatedSample<'_>> {
        Ok(DilatedSample { base: &self.field, a: Scale::new(a)?, factor: a.powi(-4) })
    }
}

/// `Σ_j w_j φ̃_{a_j} ∗ φ_{a_j}` sampled on `grid`, `w_j` log-trapezoid weights.
pub fn calderon_kernel_numeric(
    eps: f64,
    a: f64,
    scales: &ScaleLattice,
    grid: &GridSpec,
    integrand: &ScaleIntegrand,
) -> Result<CalderonKernel> {
    check_window(eps, a)?;
    if eps == a {
        return Ok(CalderonKernel { eps, a, field: SampledField::zeros(*grid), provenance: Provenance::Numeric });
    }
    if !scales.spans(eps, a) {
        return Err(Error::InvalidLattice(format!(
            "lattice [{}, {}] does not span window [{eps}, {a}]",
            scales.a_min, scales.a_max
        )));
    }
    let mut field = SampledField::zeros(*grid);
    for (aj, wj) in scales.nodes().into_iter().zip(scales.log_weights()) {
        let term = integrand.at_scale(aj)?.sample(grid)?;
        field.add_assign_scaled(&term, wj)?;
    }
    Ok(CalderonKernel { eps, a, field, provenance: Provenance::Numeric })
}

/// `prefactor · (ψ_{√2 ε} − ψ_{√2 A})` sampled on `grid`.
pub fn calderon_kernel_closed_form_with(
    eps: f64,
    a: f64,
    grid: &GridSpec,
    ev: &HeatKernelEvaluator,
    prefactor: f64,
) -> Result<CalderonKernel> {
    check_window(eps, a)?;
    let lo = HeatProfile::psi_l1(ev, PSI_DILATION_K * eps).sample(grid)?;
    let hi = HeatProfile::psi_l1(ev, PSI_DILATION_K * a).sample(grid)?;
    let field = lo.sub(&hi)?.scale(prefactor);
    Ok(CalderonKernel { eps, a, field, provenance: Provenance::ClosedForm })
}

/// `(1/8)(ψ_{√2 ε} − ψ_{√2 A})`.
pub fn calderon_kernel_closed_form(eps: f64, a: f64, grid: &GridSpec, ev: &HeatKernelEvaluator) -> Result<CalderonKernel> {
    calderon_kernel_closed_form_with(eps, a, grid, ev, ADMISSIBILITY_CONSTANT)
}

/// `g ∗ K_{ε,A}` with the numeric kernel, one scale at a time, on the grid of `g`.
pub fn reconstruct(g: &SampledField, eps: f64, a: f64, scales: &ScaleLattice, integrand: &ScaleIntegrand) -> Result<SampledField> {
    check_window(eps, a)?;
    if eps == a {
        return Ok(SampledField::zeros(*g.grid()));
    }
    if !scales.spans(eps, a) {
        return Err(Error::InvalidLattice(format!(
            "lattice [{}, {}] does not span window [{eps}, {a}]",
            scales.a_min, scales.a_max
        )));
    }
    let opts = KernelConvolution { side: KernelSide::Right, region: Region::Field, route: Route::Auto };
    let mut out = SampledField::zeros(*g.grid());
    for (aj, wj) in scales.nodes().into_iter().zip(scales.log_weights()) {
        let term = convolve_kernel(g, &integrand.at_scale(aj)?, opts)?;
        out.add_assign_scaled(&term, wj)?;
    }
    Ok(out)
}

/// `⟨g, g ∗ K_{ε,A}⟩` with the closed-form kernel.
pub fn kernel_energy_closed_form(g: &SampledField, eps: f64, a: f64, ev: &HeatKernelEvaluator) -> Result<f64> {
    check_window(eps, a)?;
    let opts = KernelConvolution { side: KernelSide::Right, region: Region::Field, route: Route::Auto };
    let lo = convolve_kernel(g, &HeatProfile::psi_l1(ev, PSI_DILATION_K * eps), opts)?;
    let hi = convolve_kernel(g, &HeatProfile::psi_l1(ev, PSI_DILATION_K * a), opts)?;
    let v: Complex64 = g.inner(&lo.sub(&hi)?)?;
    Ok(ADMISSIBILITY_CONSTANT * v.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyIdentityResidual {
    pub a: f64,
    /// `φ_{√a} ∗ φ_{√a}` against `a² L²h(·, 2a)`.
    pub r1: f64,
    /// `a² L²h(·, 2a)` against `−c·a·(d/da) ψ_{√(2a)}`.
    pub r2: f64,
}

/// Residuals of the key identity with [`KEY_IDENTITY_C`].
pub fn key_identity_residual(a: f64, grid: &GridSpec, ev: &HeatKernelEvaluator) -> Result<KeyIdentityResidual> {
    key_identity_residual_with_c(a, grid, ev, KEY_IDENTITY_C)
}

pub fn key_identity_residual_with_c(a: f64, grid: &GridSpec, ev: &HeatKernelEvaluator, c: f64) -> Result<KeyIdentityResidual> {
    Scale::new(a)?;
    let phi = HeatProfile::phi_l1(ev, a.sqrt()).sample(grid)?;
    let lhs = convolve(&phi, &phi)?;
    let mid = HeatProfile::laplacian_squared(ev, 2.0 * a).sample(grid)?.scale(a * a);
    let r1 = lhs.interior_rel_l2(&mid)?;
    let deriv = psi_scale_derivative(a, grid, ev)?;
    let rhs = deriv.scale(-c * a);
    let r2 = mid.interior_rel_l2(&rhs)?;
    Ok(KeyIdentityResidual { a, r1, r2 })
}

/// `(d/da) ψ_{√(2a)}` by a central difference with step `10⁻³ a`.
pub fn psi_scale_derivative(a: f64, grid: &GridSpec, ev: &HeatKernelEvaluator) -> Result<SampledField> {
    let da = 1e-3 * a;
    let up = HeatProfile::psi_l1(ev, (2.0 * (a + da)).sqrt()).sample(grid)?;
    let dn = HeatProfile::psi_l1(ev, (2.0 * (a - da)).sqrt()).sample(grid)?;
    Ok(up.sub(&dn)?.scale(0.5 / da))
}
