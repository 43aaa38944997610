//! The Mexican-hat wavelet `φ = L h(·,1)` and the smoothing function `ψ = h(·,1) + L h(·,1)`.

use crate::error::Result;
use crate::field::SampledField;
use crate::grid::GridSpec;
use crate::group::{dilate_point, homogeneous_norm, GroupPoint, Scale};
use crate::heat::HeatKernelEvaluator;
use crate::kernel::{GroupKernel, HeatProfile};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `h(0, 1)`.
pub const HEAT_ORIGIN: f64 = 0.0625;
/// `φ(0) = −∂_s h(0, 1)`.
pub const PHI_ORIGIN: f64 = 0.125;
/// `ψ(0) = h(0,1) + φ(0)`.
pub const PSI_ORIGIN: f64 = 0.1875;

#[derive(Debug, Clone, Copy)]
pub struct MexicanHatWavelet<'a> {
    pub evaluator: &'a HeatKernelEvaluator,
}

impl<'a> MexicanHatWavelet<'a> {
    pub fn new(evaluator: &'a HeatKernelEvaluator) -> Self {
        MexicanHatWavelet { evaluator }
    }

    /// `φ(ω) = −∂_s h(ω, s)|_{s=1}`.
    pub fn eval(&self, w: GroupPoint) -> Result<f64> {
        Ok(-self.evaluator.heat_time_derivative(w, 1.0, 1)?)
    }

    pub fn sample(&self, grid: &GridSpec) -> Result<SampledField> {
        self.profile(1.0).sample(grid)
    }

    /// `φ_a`, integral-preserving dilate.
    pub fn profile(&self, a: f64) -> HeatProfile<'a> {
        HeatProfile::phi_l1(self.evaluator, a)
    }

    /// `D_a φ`, norm-preserving dilate.
    pub fn unitary_profile(&self, a: f64) -> HeatProfile<'a> {
        HeatProfile::phi_l2(self.evaluator, a)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SmoothingFunction<'a> {
    pub evaluator: &'a HeatKernelEvaluator,
}

impl<'a> SmoothingFunction<'a> {
    pub fn new(evaluator: &'a HeatKernelEvaluator) -> Self {
        SmoothingFunction { evaluator }
    }

    /// `ψ(ω) = h(ω, 1) − ∂_s h(ω, 1)`.
    pub fn eval(&self, w: GroupPoint) -> Result<f64> {
        Ok(self.evaluator.heat_kernel(w, 1.0)? - self.evaluator.heat_time_derivative(w, 1.0, 1)?)
    }

    pub fn sample(&self, grid: &GridSpec) -> Result<SampledField> {
        self.profile(1.0).sample(grid)
    }

    /// `ψ_b`, integral-preserving dilate.
    pub fn profile(&self, b: f64) -> HeatProfile<'a> {
        HeatProfile::psi_l1(self.evaluator, b)
    }
}

/// `pⁱ qʲ tᵏ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub i: u32,
    pub j: u32,
    pub k: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { i: 0, j: 0, k: 0 };
    pub const P: Monomial = Monomial { i: 1, j: 0, k: 0 };
    pub const Q: Monomial = Monomial { i: 0, j: 1, k: 0 };
    pub const T: Monomial = Monomial { i: 0, j: 0, k: 1 };

    pub const fn new(i: u32, j: u32, k: u32) -> Self {
        Monomial { i, j, k }
    }

    /// Degree under `δ_a`: `t` counts twice.
    pub fn homogeneous_degree(&self) -> u32 {
        self.i + self.j + 2 * self.k
    }

    pub fn eval(&self, w: GroupPoint) -> f64 {
        w.p.powi(self.i as i32) * w.q.powi(self.j as i32) * w.t.powi(self.k as i32)
    }

    /// Every monomial of homogeneous degree exactly `d`.
    pub fn of_degree(d: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for k in 0..=d / 2 {
            let rest = d - 2 * k;
            for i in (0..=rest).rev() {
                out.push(Monomial::new(i, rest - i, k));
            }
        }
        out
    }

    /// Every monomial of homogeneous degree below `d`.
    pub fn below_degree(d: u32) -> Vec<Monomial> {
        (0..d).flat_map(Monomial::of_degree).collect()
    }
}

impl std::fmt::Display for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        for (name, e) in [("p", self.i), ("q", self.j), ("t", self.k)] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                e => parts.push(format!("{name}^{e}")),
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Boundary mass above this fraction of the peak flags a moment as truncated.
pub const MOMENT_BOUNDARY_WARN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moment {
    pub monomial: Monomial,
    pub value: Complex64,
    /// Integrand is not negligible on the grid boundary.
    pub boundary_warning: bool,
}

/// `∫ f(ω) pⁱ qʲ tᵏ dω` by the trapezoidal rule.
pub fn moment(f: &SampledField, m: Monomial) -> Moment {
    let g = *f.grid();
    let integrand = SampledField::from_fn(g, |w| Complex64::new(m.eval(w), 0.0)).values().to_vec();
    let prod: Vec<Complex64> = f.values().iter().zip(&integrand).map(|(a, b)| a * b).collect();
    let field = SampledField::from_values_unchecked(g, prod);
    let peak = field.max_abs();
    let boundary_warning = peak > 0.0 && field.boundary_max_abs() >= MOMENT_BOUNDARY_WARN * peak;
    Moment { monomial: m, value: field.integrate(), boundary_warning }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayProfile {
    /// `(N, max |φ|)` on each shell.
    pub shells: Vec<(f64, f64)>,
    /// Least-squares slope of `log max|φ|` against `N²`.
    pub slope: f64,
}

/// Directions on the unit homogeneous sphere `N = 1`.
fn unit_shell(count: usize) -> Vec<GroupPoint> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let th = golden * k as f64;
            let d = GroupPoint::new(r * th.cos(), r * th.sin(), z);
            dilate_point(Scale::new(1.0 / homogeneous_norm(d)).expect("non-zero direction"), d)
        })
        .collect()
}

/// Shell maxima of `|φ|` over points with `N(ω) ∈ [r, r + δ)`, `δ` a third of the smallest radius gap.
pub fn decay_profile(phi: &MexicanHatWavelet, radii: &[f64]) -> Result<DecayProfile> {
    let dirs = unit_shell(2000);
    let gap = radii.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let delta = if gap.is_finite() { gap / 3.0 } else { 0.1 };
    let mut shells = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut m: f64 = 0.0;
        for sub in 0..3 {
            let rr = r + delta * sub as f64 / 3.0;
            let s = Scale::new(rr)?;
            for d in &dirs {
                m = m.max(phi.eval(dilate_point(s, *d))?.abs());
            }
        }
        shells.push((r, m));
    }
    let pts: Vec<(f64, f64)> = shells.iter().filter(|(_, m)| *m > 0.0).map(|&(r, m)| (r * r, m.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(DecayProfile { shells, slope: sxy / sxx })
}
