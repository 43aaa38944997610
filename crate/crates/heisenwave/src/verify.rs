//! Property suites with measured residuals.
//!
//! Every check compares a residual against a fixed tolerance and passes iff
//! `residual <= tolerance`. Checks of the form "at least" are stated on the
//! negated quantity.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::calculus::sub_laplacian;
use crate::calderon::{
    calderon_kernel_closed_form, calderon_kernel_numeric, cwt, cwt_energy, integrand_base_grid,
    kernel_energy_closed_form, key_identity_residual, psi_scale_derivative, reconstruct, ScaleIntegrand,
    ScaleLattice, ADMISSIBILITY_CONSTANT, PSI_DILATION_K,
};
use crate::conv::convolve;
use crate::error::{Error, Result};
use crate::field::{Normalization, SampledField};
use crate::grid::GridSpec;
use crate::group::{dilate_point, homogeneous_norm, inverse, multiply, GroupPoint, Scale};
use crate::heat::{EvaluatorParams, HeatKernelEvaluator, CONVERGENCE_TOL};
use crate::interp::Interpolation;
use crate::kernel::{GroupKernel, HeatProfile};
use crate::wavelet::{decay_profile, moment, MexicanHatWavelet, Monomial, SmoothingFunction, HEAT_ORIGIN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Group,
    Heat,
    Wavelet,
    Calderon,
    All,
}

impl Suite {
    pub fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Group, Suite::Heat, Suite::Wavelet, Suite::Calderon],
            s => vec![s],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Group => "group",
            Suite::Heat => "heat",
            Suite::Wavelet => "wavelet",
            Suite::Calderon => "calderon",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "group" => Ok(Suite::Group),
            "heat" => Ok(Suite::Heat),
            "wavelet" => Ok(Suite::Wavelet),
            "calderon" => Ok(Suite::Calderon),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidGrid(format!("unknown suite {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    /// The property being measured.
    pub anchor: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(id: impl Into<String>, anchor: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check { id: id.into(), anchor: anchor.into(), residual, tolerance, pass: residual <= tolerance }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<40} residual {:>11.4e}  tol {:>10.3e}  {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.residual,
            self.tolerance,
            self.anchor
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub grid: GridSpec,
    /// Reconstruction and kernel window `[ε, A]`.
    pub window: ScaleLattice,
    /// Wider window for energy and monotonicity checks.
    pub wide_window: ScaleLattice,
    pub evaluator: EvaluatorParams,
    pub seed: u64,
    /// Width of the centred Gaussian test field.
    pub gaussian_sigma: f64,
}

/// Default verification grid: `N × N × (2N − 1)`, extent 6.
pub fn default_grid(n: usize, extent: f64) -> Result<GridSpec> {
    GridSpec::new([n, n, 2 * n - 1], [extent; 3])
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            grid: default_grid(33, 6.0).expect("static grid"),
            window: ScaleLattice::new(0.1, 4.0, 32).expect("static lattice"),
            wide_window: ScaleLattice::new(0.05, 8.0, 32).expect("static lattice"),
            evaluator: HeatKernelEvaluator::default().params(),
            seed: 0x5eed,
            gaussian_sigma: 0.8,
        }
    }
}

impl VerifyConfig {
    pub fn evaluator(&self) -> Result<HeatKernelEvaluator> {
        HeatKernelEvaluator::new(self.evaluator.lambda_extent, self.evaluator.lambda_nodes)
    }

    pub fn gaussian(&self) -> SampledField {
        gaussian(self.grid, self.gaussian_sigma)
    }
}

/// `exp(−|ω|²/(2σ²))` in Euclidean coordinates.
pub fn gaussian(grid: GridSpec, sigma: f64) -> SampledField {
    let k = 0.5 / (sigma * sigma);
    SampledField::from_real_fn(grid, |w| (-(w.p * w.p + w.q * w.q + w.t * w.t) * k).exp())
}

/// Same box with every axis sampled twice as densely.
pub fn refined(grid: &GridSpec) -> Result<GridSpec> {
    let s = grid.samples();
    GridSpec::new([2 * s[0] - 1, 2 * s[1] - 1, 2 * s[2] - 1], grid.half_extents())
}

pub fn run(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for s in suite.parts() {
        out.extend(match s {
            Suite::Group => group_checks(cfg),
            Suite::Heat => heat_checks(cfg)?,
            Suite::Wavelet => wavelet_checks(cfg)?,
            Suite::Calderon => calderon_checks(cfg)?,
            Suite::All => unreachable!(),
        });
    }
    Ok(out)
}

fn ulps(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / (f64::EPSILON * scale.max(f64::MIN_POSITIVE))
}

fn point_ulps(x: GroupPoint, y: GroupPoint, scale: [f64; 3]) -> f64 {
    ulps(x.p, y.p, scale[0]).max(ulps(x.q, y.q, scale[1])).max(ulps(x.t, y.t, scale[2]))
}

fn random_point(rng: &mut ChaCha8Rng, r: f64) -> GroupPoint {
    GroupPoint::new(rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-r..r))
}

/// Magnitudes of the summands making up each coordinate of `x·y·z`.
fn product_scale(xs: &[GroupPoint]) -> [f64; 3] {
    let sp: f64 = xs.iter().map(|x| x.p.abs()).sum();
    let sq: f64 = xs.iter().map(|x| x.q.abs()).sum();
    let st: f64 = xs.iter().map(|x| x.t.abs()).sum::<f64>() + sp * sq;
    [sp, sq, st]
}

pub const GROUP_SAMPLES: usize = 10_000;
pub const GROUP_ULPS: f64 = 8.0;

pub fn group_checks(cfg: &VerifyConfig) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut assoc, mut inv, mut ident, mut auto, mut comp, mut norm): (f64, f64, f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..GROUP_SAMPLES {
        let (x, y, z) = (random_point(&mut rng, 10.0), random_point(&mut rng, 10.0), random_point(&mut rng, 10.0));
        let sc = product_scale(&[x, y, z]);
        assoc = assoc.max(point_ulps(multiply(multiply(x, y), z), multiply(x, multiply(y, z)), sc));
        let sx = product_scale(&[x, x]);
        inv = inv.max(point_ulps(multiply(x, inverse(x)), GroupPoint::IDENTITY, sx));
        inv = inv.max(point_ulps(multiply(inverse(x), x), GroupPoint::IDENTITY, sx));
        ident = ident.max(point_ulps(multiply(x, GroupPoint::IDENTITY), x, product_scale(&[x])));
        let a = Scale::new(rng.gen_range(0.1..10.0)).expect("positive");
        let b = Scale::new(rng.gen_range(0.1..10.0)).expect("positive");
        let lhs = dilate_point(a, multiply(x, y));
        let rhs = multiply(dilate_point(a, x), dilate_point(a, y));
        let s = product_scale(&[x, y]);
        let sa = [a.get() * s[0], a.get() * s[1], a.get() * a.get() * s[2]];
        auto = auto.max(point_ulps(lhs, rhs, sa));
        let ab = Scale::new(a.get() * b.get()).expect("positive");
        let sab = [ab.get() * x.p.abs(), ab.get() * x.q.abs(), ab.get() * ab.get() * x.t.abs()];
        comp = comp.max(point_ulps(dilate_point(a, dilate_point(b, x)), dilate_point(ab, x), sab));
        let n = homogeneous_norm(dilate_point(a, x));
        norm = norm.max(ulps(n, a.get() * homogeneous_norm(x), n));
    }
    vec![
        Check::new("group.associativity", "(xy)z = x(yz), ulps", assoc, GROUP_ULPS),
        Check::new("group.inverse", "x x⁻¹ = x⁻¹ x = e, ulps", inv, GROUP_ULPS),
        Check::new("group.identity", "x e = x, ulps", ident, 0.0),
        Check::new("group.dilation_automorphism", "δ_a(xy) = δ_a(x) δ_a(y), ulps", auto, GROUP_ULPS),
        Check::new("group.dilation_composition", "δ_a δ_b = δ_ab, ulps", comp, GROUP_ULPS),
        Check::new("group.norm_homogeneity", "N(δ_a x) = a N(x), ulps", norm, GROUP_ULPS),
    ]
}

pub fn heat_checks(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let ev = cfg.evaluator()?;
    let g = cfg.grid;
    let mut out = Vec::new();
    let h1 = ev.sample_heat(&g, 1.0)?;

    out.push(Check::new("heat.normalization", "∫h(·,1) = 1", (h1.integrate().re - 1.0).abs(), 2e-3));
    let sym = h1.sub(&h1.involute())?.max_abs();
    out.push(Check::new("heat.inversion_symmetry", "h(ω,s) = h(ω⁻¹,s)", sym, 0.0));
    let min = h1.values().iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    out.push(Check::new("heat.positivity", "−min h(·,1) ≥ −1e−12", -min, 1e-12));
    let origin = ev.heat_kernel(GroupPoint::IDENTITY, 1.0)?;
    out.push(Check::new("heat.origin_value", "h(e,1) = 1/16", (origin - HEAT_ORIGIN).abs(), 1e-9));

    for (s, t) in [(0.5, 0.5), (0.5, 1.0), (1.0, 1.0)] {
        let lhs = convolve(&ev.sample_heat(&g, s)?, &ev.sample_heat(&g, t)?)?;
        let r = lhs.interior_rel_l2(&ev.sample_heat(&g, s + t)?)?;
        out.push(Check::new(format!("heat.semigroup.{s}+{t}"), "h(·,s)∗h(·,t) = h(·,s+t)", r, 1e-2));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x4ea7);
    let (mut homog, mut fd, mut conv): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let two = Scale::new(2.0)?;
    for _ in 0..100 {
        let w = random_point(&mut rng, 2.5);
        let s = rng.gen_range(0.5..2.0);
        let h = ev.heat_kernel(w, s)?;
        let hd = 16.0 * ev.heat_kernel(dilate_point(two, w), 4.0 * s)?;
        homog = homog.max((hd - h).abs() / h.abs());
        let d = 1e-4;
        let cd = (ev.heat_kernel(w, s + d)? - ev.heat_kernel(w, s - d)?) / (2.0 * d);
        let an = ev.heat_time_derivative(w, s, 1)?;
        fd = fd.max((an - cd).abs() / an.abs().max(h.abs() / s));
        conv = conv.max(ev.convergence_delta(w, s, 0)?);
    }
    out.push(Check::new("heat.homogeneity", "2⁴h(δ₂ω,4s) = h(ω,s), relative", homog, 1e-9));
    out.push(Check::new("heat.time_derivative_fd", "∂_s h vs central difference, relative to max(|∂_s h|, h/s)", fd, 1e-6));
    out.push(Check::new("heat.quadrature_convergence", "doubling frequency nodes", conv, CONVERGENCE_TOL));

    let fine = refined(&g)?;
    let hf = ev.sample_heat(&fine, 1.0)?;
    let lh = sub_laplacian(&hf);
    let ds = ev.sample_time_derivative(&fine, 1.0, 1)?.scale(-1.0);
    out.push(Check::new("heat.equation", "L h(·,1) = −∂_s h(·,1)", lh.interior_rel_l2(&ds)?, 1e-2));
    let d1 = ev.sample_time_derivative(&g, 1.0, 1)?;
    out.push(Check::new("heat.time_derivative_integral", "∫∂_s h(·,1) = 0", d1.integrate().norm(), 2e-3));

    for a in [0.5, 2.0] {
        let dil = hf.dilate_with(Scale::new(a)?, Normalization::L1, Interpolation::Quintic);
        let r = dil.max_rel_diff(&ev.sample_heat(&fine, a * a)?, true)?;
        out.push(Check::new(format!("heat.dilation.{a}"), "h(·,1)_a = h(·,a²)", r, 1e-3));
    }
    Ok(out)
}

pub fn wavelet_checks(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let ev = cfg.evaluator()?;
    let g = cfg.grid;
    let mut out = Vec::new();
    let mh = MexicanHatWavelet::new(&ev);
    let phi = mh.sample(&g)?;
    out.push(Check::new("wavelet.phi_integral", "∫φ = 0", phi.integrate().norm(), 2e-3));
    out.push(Check::new("wavelet.phi_involution", "φ̃ = φ", phi.sub(&phi.involute())?.max_abs(), 1e-10));
    for m in Monomial::below_degree(2) {
        let v = moment(&phi, m).value.norm();
        out.push(Check::new(format!("wavelet.moment.{m}"), "vanishing moment of degree < 2", v, 2e-3));
    }
    let radii: Vec<f64> = (0..9).map(|k| 1.0 + 0.25 * k as f64).collect();
    let decay = decay_profile(&mh, &radii)?;
    out.push(Check::new("wavelet.decay_slope", "slope of log max|φ| vs N² ≤ −0.1", decay.slope, -0.1));

    let psi = SmoothingFunction::new(&ev).sample(&g)?;
    out.push(Check::new("wavelet.psi_integral", "∫ψ = 1", (psi.integrate().re - 1.0).abs(), 4e-3));
    let h1 = ev.sample_heat(&g, 1.0)?;
    out.push(Check::new("wavelet.psi_decomposition", "ψ − h(·,1) = φ", psi.sub(&h1)?.sub(&phi)?.max_abs(), 1e-15));

    let fine = refined(&g)?;
    let phi_fine = mh.sample(&fine)?;
    let lh = sub_laplacian(&ev.sample_heat(&fine, 1.0)?);
    out.push(Check::new("wavelet.phi_sub_laplacian", "L h(·,1) = φ", lh.interior_rel_l2(&phi_fine)?, 1e-2));

    for a in [0.5, 2.0] {
        let dil = phi_fine.dilate_with(Scale::new(a)?, Normalization::L1, Interpolation::Quintic);
        let reference = ev.sample_time_derivative(&fine, a * a, 1)?.scale(-a * a);
        out.push(Check::new(format!("wavelet.dilation.{a}"), "φ_a = −a² ∂_s h(·,a²)", dil.max_rel_diff(&reference, true)?, 1e-3));
    }

    let a = 0.5;
    let d = psi_scale_derivative(a, &g, &ev)?;
    let l2 = HeatProfile::laplacian_squared(&ev, 2.0 * a).sample(&g)?.scale(-4.0 * a);
    out.push(Check::new("wavelet.psi_scale_derivative", "(d/da)ψ_√(2a) = −4a L²h(·,2a)", d.interior_rel_l2(&l2)?, 1e-2));
    Ok(out)
}

pub fn calderon_checks(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let ev = cfg.evaluator()?;
    let g = cfg.grid;
    let mut out = Vec::new();

    for a in [0.5, 1.0, 2.0] {
        let k = key_identity_residual(a, &g, &ev)?;
        out.push(Check::new(format!("calderon.key_identity.{a}.r1"), "φ_√a ∗ φ_√a = a² L²h(·,2a)", k.r1, 2e-2));
        out.push(Check::new(format!("calderon.key_identity.{a}.r2"), "a² L²h(·,2a) = −(a/4)(d/da)ψ_√(2a)", k.r2, 2e-2));
    }
    for (a, b) in [(0.5, 0.5), (1.0, 1.0)] {
        let la = ev.sample_time_derivative(&g, a, 1)?;
        let lb = ev.sample_time_derivative(&g, b, 1)?;
        let r = convolve(&la, &lb)?.interior_rel_l2(&ev.sample_time_derivative(&g, a + b, 2)?)?;
        out.push(Check::new(format!("calderon.semigroup_derivative.{a}+{b}"), "Lh(·,a)∗Lh(·,b) = L²h(·,a+b)", r, 2e-2));
    }

    let w = cfg.window;
    let integrand = ScaleIntegrand::new(&ev, &integrand_base_grid())?;
    let numeric = calderon_kernel_numeric(w.a_min, w.a_max, &w, &g, &integrand)?;
    let closed = calderon_kernel_closed_form(w.a_min, w.a_max, &g, &ev)?;
    let r = numeric.field.interior_rel_l2(&closed.field)?;
    out.push(Check::new("calderon.kernel_agreement", "numeric K vs (1/8)(ψ_√2ε − ψ_√2A)", r, 2e-2));
    // each end of the window integrated on a grid matched to its own scale
    let psi_mass = |b: f64| -> Result<f64> {
        let grid = g.dilated(b);
        Ok(HeatProfile::psi_l1(&ev, b).sample(&grid)?.integrate().re)
    };
    let ci = (psi_mass(PSI_DILATION_K * w.a_min)? - 1.0).abs().max((psi_mass(PSI_DILATION_K * w.a_max)? - 1.0).abs());
    out.push(Check::new("calderon.closed_form_integral", "∫ψ_√2ε = ∫ψ_√2A = 1, so ∫K = 0", ci, 4e-3));

    let mid = w.count / 2;
    let lo = w.sub_lattice(0, mid)?;
    let hi = w.sub_lattice(mid, w.count - 1)?;
    let m = w.node(mid);
    let k1 = calderon_kernel_numeric(w.a_min, m, &lo, &g, &integrand)?;
    let k2 = calderon_kernel_numeric(m, w.a_max, &hi, &g, &integrand)?;
    let add = k1.field.add(&k2.field)?.sub(&numeric.field)?.max_abs() / numeric.field.max_abs();
    out.push(Check::new("calderon.window_additivity", "K_ε,m + K_m,A = K_ε,A", add, 1e-12));

    let gf = cfg.gaussian();
    let err = |win: &ScaleLattice| -> Result<f64> {
        let r = reconstruct(&gf, win.a_min, win.a_max, win, &integrand)?;
        r.scale(1.0 / ADMISSIBILITY_CONSTANT).rel_l2(&gf)
    };
    let e1 = err(&w)?;
    let ww = cfg.wide_window;
    let e2 = err(&ww)?;
    out.push(Check::new("calderon.reconstruction", "‖8 g∗K − g‖/‖g‖", e1, 0.05));
    out.push(Check::new("calderon.reconstruction_widening", "wider window error minus narrow", e2 - e1, 0.0));

    let n2 = gf.norm_l2().powi(2);
    let energy = cwt_energy(&cwt(&gf, &ww, &ev)?);
    let ratio = energy / n2;
    out.push(Check::new(
        "calderon.energy_ratio",
        "cwt energy/‖g‖² = 1/8, relative",
        (ratio / ADMISSIBILITY_CONSTANT - 1.0).abs(),
        0.1,
    ));
    let pk = kernel_energy_closed_form(&gf, ww.a_min, ww.a_max, &ev)?;
    out.push(Check::new("calderon.parseval", "cwt energy = ⟨g, g∗K⟩, relative", (energy - pk).abs() / pk.abs(), 0.02));
    Ok(out)
}
