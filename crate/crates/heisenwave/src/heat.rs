//! Heat kernel of the sub-Laplacian.
//!
//! With `r² = p² + q²`, `τ = t/s`, `ρ² = r²/(4s)`:
//!
//! ```text
//! h(p,q,t; s) = 1/(4π² s²) ∫₀^∞ cos(μτ) · μ/sinh μ · exp(−ρ² μ coth μ) dμ
//! ```
//!
//! Time derivatives are taken under the integral sign. The frequency integral
//! is a trapezoidal rule on `[0, Λ]` with a smooth `tanh` cutoff near `Λ`.

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::grid::GridSpec;
use crate::group::GroupPoint;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

/// Smallest accepted heat time.
pub const MIN_TIME: f64 = 1e-4;
pub const DEFAULT_LAMBDA_EXTENT: f64 = 40.0;
pub const DEFAULT_LAMBDA_NODES: usize = 2048;
/// Absolute change (in time-one units, `s²·h`) tolerated when the node count doubles.
pub const CONVERGENCE_TOL: f64 = 1e-9;

/// Configuration and cached nodes of the frequency quadrature.
#[derive(Debug, Clone)]
pub struct HeatKernelEvaluator {
    lambda_extent: f64,
    lambda_nodes: usize,
    mu: Vec<f64>,
    /// Quadrature weight times cutoff times `μ/sinh μ`.
    wg: Vec<f64>,
    /// `μ coth μ`
    c: Vec<f64>,
    tau_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluatorParams {
    pub lambda_extent: f64,
    pub lambda_nodes: usize,
}

impl Default for HeatKernelEvaluator {
    fn default() -> Self {
        HeatKernelEvaluator::new(DEFAULT_LAMBDA_EXTENT, DEFAULT_LAMBDA_NODES).expect("default quadrature")
    }
}

fn mu_over_sinh(mu: f64) -> f64 {
    if mu < 1e-4 {
        1.0 - mu * mu / 6.0
    } else {
        mu / mu.sinh()
    }
}

fn mu_coth(mu: f64) -> f64 {
    if mu < 1e-4 {
        1.0 + mu * mu / 3.0
    } else {
        mu / mu.tanh()
    }
}

impl HeatKernelEvaluator {
    pub fn new(lambda_extent: f64, lambda_nodes: usize) -> Result<Self> {
        if !(lambda_extent.is_finite() && lambda_extent > 0.0) || lambda_nodes < 8 {
            return Err(Error::InvalidGrid(format!(
                "heat quadrature needs extent > 0 and at least 8 nodes, got {lambda_extent}, {lambda_nodes}"
            )));
        }
        let h = lambda_extent / lambda_nodes as f64;
        let (centre, width) = (0.9 * lambda_extent, 0.02 * lambda_extent);
        let mut mu = Vec::with_capacity(lambda_nodes + 1);
        let mut wg = Vec::with_capacity(lambda_nodes + 1);
        let mut c = Vec::with_capacity(lambda_nodes + 1);
        for k in 0..=lambda_nodes {
            let m = k as f64 * h;
            let trap = if k == 0 || k == lambda_nodes { 0.5 * h } else { h };
            let cutoff = 0.5 * (1.0 - ((m - centre) / width).tanh());
            mu.push(m);
            wg.push(trap * cutoff * mu_over_sinh(m));
            c.push(mu_coth(m));
        }
        // Beyond this reduced time the trapezoidal rule starts to alias, while the
        // kernel itself is below exp(-π τ_max / 2) of its peak.
        let tau_max = 0.25 * 2.0 * PI / h;
        Ok(HeatKernelEvaluator { lambda_extent, lambda_nodes, mu, wg, c, tau_max })
    }

    pub fn params(&self) -> EvaluatorParams {
        EvaluatorParams { lambda_extent: self.lambda_extent, lambda_nodes: self.lambda_nodes }
    }

    pub fn lambda_extent(&self) -> f64 {
        self.lambda_extent
    }

    pub fn lambda_nodes(&self) -> usize {
        self.lambda_nodes
    }

    /// Same extent, twice the nodes.
    pub fn doubled(&self) -> HeatKernelEvaluator {
        HeatKernelEvaluator::new(self.lambda_extent, 2 * self.lambda_nodes).expect("valid doubled quadrature")
    }

    fn check_time(s: f64) -> Result<()> {
        if s.is_finite() && s >= MIN_TIME {
            Ok(())
        } else {
            Err(Error::HeatTimeOutOfRange { got: s, min: MIN_TIME })
        }
    }

    /// Time-one integrals `[I0, I1, I2]` of `s^{k+2} ∂_s^k h` at reduced variables.
    fn reduced(&self, rho2: f64, tau: f64, max_order: usize) -> [f64; 3] {
        let mut out = [0.0; 3];
        if tau.abs() > self.tau_max {
            return out;
        }
        for k in 0..self.mu.len() {
            let a = rho2 * self.c[k];
            if a > 745.0 {
                break;
            }
            let e = self.wg[k] * (-a).exp();
            if e == 0.0 {
                continue;
            }
            let th = self.mu[k] * tau;
            let (sn, cs) = th.sin_cos();
            out[0] += e * cs;
            if max_order >= 1 {
                out[1] += e * ((a - 2.0) * cs + th * sn);
            }
            if max_order >= 2 {
                out[2] += e * ((a * a - 6.0 * a + 6.0 - th * th) * cs + (2.0 * a - 6.0) * th * sn);
            }
        }
        let norm = 1.0 / (4.0 * PI * PI);
        out.map(|v| v * norm)
    }

    fn eval_order(&self, w: GroupPoint, s: f64, order: usize) -> Result<f64> {
        Self::check_time(s)?;
        if !w.is_finite() {
            return Err(Error::NonFinite("group point"));
        }
        let rho2 = (w.p * w.p + w.q * w.q) / (4.0 * s);
        let tau = w.t / s;
        let v = self.reduced(rho2, tau, order)[order];
        Ok(v / s.powi(order as i32 + 2))
    }

    /// `h(ω, s)`.
    pub fn heat_kernel(&self, w: GroupPoint, s: f64) -> Result<f64> {
        self.eval_order(w, s, 0)
    }

    /// `∂_s h` (order 1) or `∂_s² h` (order 2).
    pub fn heat_time_derivative(&self, w: GroupPoint, s: f64, order: u8) -> Result<f64> {
        match order {
            1 | 2 => self.eval_order(w, s, order as usize),
            _ => Err(Error::InvalidGrid(format!("time-derivative order must be 1 or 2, got {order}"))),
        }
    }

    /// Change of `s^{k+2} ∂_s^k h` when the node count doubles.
    pub fn convergence_delta(&self, w: GroupPoint, s: f64, order: u8) -> Result<f64> {
        let o = order as i32;
        let a = self.eval_order(w, s, order as usize)? * s.powi(o + 2);
        let b = self.doubled().eval_order(w, s, order as usize)? * s.powi(o + 2);
        Ok((a - b).abs())
    }

    /// `h(ω, s)`, failing if doubling the quadrature nodes moves it by more than [`CONVERGENCE_TOL`].
    pub fn heat_kernel_checked(&self, w: GroupPoint, s: f64) -> Result<f64> {
        let v = self.heat_kernel(w, s)?;
        let delta = self.convergence_delta(w, s, 0)?;
        if delta > CONVERGENCE_TOL {
            return Err(Error::QuadratureNonConvergence { point: [w.p, w.q, w.t, s], delta });
        }
        Ok(v)
    }

    /// Sample `c₀ h + c₁ ∂_s h + c₂ ∂_s² h` at time `s` on every node of `grid`.
    ///
    /// Evaluates the frequency integral once per distinct `p² + q²` and `|t|`.
    pub fn sample_combination(&self, grid: &GridSpec, s: f64, coeffs: [f64; 3]) -> Result<SampledField> {
        Self::check_time(s)?;
        let max_order = if coeffs[2] != 0.0 {
            2
        } else if coeffs[1] != 0.0 {
            1
        } else {
            0
        };
        let (np, nq, nt) = (grid.p.samples, grid.q.samples, grid.t.samples);

        let mut radii: Vec<f64> = Vec::new();
        let mut radius_index: HashMap<u64, usize> = HashMap::new();
        let mut col_radius = vec![0usize; np * nq];
        for i in 0..np {
            for j in 0..nq {
                let (p, q) = (grid.p.node(i), grid.q.node(j));
                let r2 = p * p + q * q;
                let id = *radius_index.entry(r2.to_bits()).or_insert_with(|| {
                    radii.push(r2);
                    radii.len() - 1
                });
                col_radius[i * nq + j] = id;
            }
        }
        let mut taus: Vec<f64> = Vec::new();
        let mut tau_index: HashMap<u64, usize> = HashMap::new();
        let mut t_tau = vec![0usize; nt];
        for (k, slot) in t_tau.iter_mut().enumerate() {
            let t = grid.t.node(k).abs();
            *slot = *tau_index.entry(t.to_bits()).or_insert_with(|| {
                taus.push(t / s);
                taus.len() - 1
            });
        }

        let n_tau = taus.len();
        let scale = [1.0 / (s * s), 1.0 / (s * s * s), 1.0 / (s * s * s * s)];
        let table: Vec<Vec<f64>> = radii
            .par_iter()
            .map(|&r2| {
                let rho2 = r2 / (4.0 * s);
                let mut row = vec![0.0; n_tau];
                for (m, &tau) in taus.iter().enumerate() {
                    let v = self.reduced(rho2, tau, max_order);
                    row[m] = coeffs[0] * v[0] * scale[0] + coeffs[1] * v[1] * scale[1] + coeffs[2] * v[2] * scale[2];
                }
                row
            })
            .collect();

        let mut values = Vec::with_capacity(grid.len());
        for col in col_radius.iter() {
            let row = &table[*col];
            for &m in &t_tau {
                values.push(Complex64::new(row[m], 0.0));
            }
        }
        SampledField::from_values(*grid, values)
    }

    /// `h(·, s)` on a grid.
    pub fn sample_heat(&self, grid: &GridSpec, s: f64) -> Result<SampledField> {
        self.sample_combination(grid, s, [1.0, 0.0, 0.0])
    }

    /// `∂_s^order h(·, s)` on a grid.
    pub fn sample_time_derivative(&self, grid: &GridSpec, s: f64, order: u8) -> Result<SampledField> {
        match order {
            0 => self.sample_combination(grid, s, [1.0, 0.0, 0.0]),
            1 => self.sample_combination(grid, s, [0.0, 1.0, 0.0]),
            2 => self.sample_combination(grid, s, [0.0, 0.0, 1.0]),
            _ => Err(Error::InvalidGrid(format!("time-derivative order must be 0, 1 or 2, got {order}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_and_central_axis() {
        let ev = HeatKernelEvaluator::default();
        let h0 = ev.heat_kernel(GroupPoint::IDENTITY, 1.0).unwrap();
        assert!((h0 - 1.0 / 16.0).abs() < 1e-13, "{h0}");
        for t in [0.3, 1.0, 2.5] {
            let v = ev.heat_kernel(GroupPoint::new(0.0, 0.0, t), 1.0).unwrap();
            let sech = 1.0 / (PI * t / 2.0).cosh();
            assert!((v - sech * sech / 16.0).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_bad_time() {
        let ev = HeatKernelEvaluator::default();
        assert!(ev.heat_kernel(GroupPoint::IDENTITY, 0.0).is_err());
        assert!(ev.heat_kernel(GroupPoint::IDENTITY, 5e-5).is_err());
        assert!(ev.heat_kernel(GroupPoint::IDENTITY, f64::NAN).is_err());
        assert!(ev.heat_time_derivative(GroupPoint::IDENTITY, 1.0, 3).is_err());
    }

    #[test]
    fn grid_sampler_matches_pointwise() {
        let ev = HeatKernelEvaluator::default();
        let g = GridSpec::new([5, 7, 9], [2.0, 3.0, 4.0]).unwrap();
        for (s, coeffs) in [(1.0, [1.0, 0.0, 0.0]), (0.7, [0.3, -1.0, 0.0]), (2.0, [0.0, 0.5, 2.0])] {
            let f = ev.sample_combination(&g, s, coeffs).unwrap();
            for idx in 0..g.len() {
                let w = g.point_at(idx);
                let expect = coeffs[0] * ev.heat_kernel(w, s).unwrap()
                    + coeffs[1] * ev.heat_time_derivative(w, s, 1).unwrap()
                    + coeffs[2] * ev.heat_time_derivative(w, s, 2).unwrap();
                assert!((f.values()[idx].re - expect).abs() <= 1e-15 * (1.0 + expect.abs()));
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let ev = HeatKernelEvaluator::default();
        let d = 1e-4;
        for w in [GroupPoint::new(0.4, -0.7, 0.9), GroupPoint::new(1.5, 0.2, -0.3), GroupPoint::IDENTITY] {
            let s = 1.0;
            let fd1 = (ev.heat_kernel(w, s + d).unwrap() - ev.heat_kernel(w, s - d).unwrap()) / (2.0 * d);
            let an1 = ev.heat_time_derivative(w, s, 1).unwrap();
            assert!((fd1 - an1).abs() <= 1e-6 * an1.abs(), "{fd1} {an1}");
            let fd2 = (ev.heat_time_derivative(w, s + d, 1).unwrap() - ev.heat_time_derivative(w, s - d, 1).unwrap())
                / (2.0 * d);
            let an2 = ev.heat_time_derivative(w, s, 2).unwrap();
            assert!((fd2 - an2).abs() <= 1e-6 * an2.abs(), "{fd2} {an2}");
        }
    }
}
