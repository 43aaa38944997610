//! Group convolution `(f ∗ g)(ω) = ∫ f(υ) g(υ⁻¹ω) dυ`.

mod direct;
mod engine;

pub use direct::convolve_direct;

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::grid::{Axis, GridSpec};
use crate::kernel::GroupKernel;
use engine::{twisted, ColumnSide};
use serde::{Deserialize, Serialize};

/// `f ∗ g` for two fields on the same grid, output on that grid.
///
/// Uses the spectral-in-`t` engine; `g` supplies exact columns and `f` is
/// read between nodes by cubic interpolation when the grid has no centre node.
pub fn convolve(f: &SampledField, g: &SampledField) -> Result<SampledField> {
    f.grid().ensure_same(g.grid())?;
    twisted(g, f, ColumnSide::Right, f.grid())
}

/// `f ∗ g` for fields on different grids, evaluated on `out`.
///
/// `out` must share the `t` spacing of `f` (or refine it by an integer factor).
pub fn convolve_onto(f: &SampledField, g: &SampledField, out: &GridSpec) -> Result<SampledField> {
    twisted(g, f, ColumnSide::Right, out)
}

/// Order of the product with an analytic kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelSide {
    /// `f ∗ k`
    Right,
    /// `k ∗ f`
    Left,
}

/// Which operand is integrated column by column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    /// Pick the cheaper admissible route.
    Auto,
    /// Kernel sampled on its own fine lattice supplies the columns.
    KernelColumns,
    /// Field supplies the columns; kernel sampled on a lattice aligned with the field.
    FieldColumns,
}

/// Where the product is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Region {
    /// The grid of the input field.
    Field,
    /// A box on the field's lattice covering the product's support, where the
    /// field's support is taken at the given relative amplitude.
    Support(f64),
}

/// Half extents `[p, q, t]` of the nodes where `|f| ≥ rel · max|f|`.
pub fn effective_extent(f: &SampledField, rel: f64) -> [f64; 3] {
    let g = f.grid();
    let thr = rel * f.max_abs();
    let mut e = [0.0f64; 3];
    for (idx, v) in f.values().iter().enumerate() {
        if v.norm() >= thr && thr > 0.0 {
            let w = g.point_at(idx);
            e[0] = e[0].max(w.p.abs());
            e[1] = e[1].max(w.q.abs());
            e[2] = e[2].max(w.t.abs());
        }
    }
    e
}

/// Axis on the lattice of `like` covering `[-extent, extent]`.
fn lattice_axis(like: &Axis, extent: f64) -> Result<Axis> {
    let h = like.spacing();
    let n = if like.has_center_node() {
        2 * ((extent / h - 1e-9).ceil().max(1.0) as usize) + 1
    } else {
        2 * ((extent / h - 0.5 - 1e-9).ceil().max(0.0) as usize) + 2
    };
    Axis::with_spacing(n.max(3), h)
}

/// Centred axis with spacing `h` (odd node count) covering `[-extent, extent]`.
fn centred_axis(h: f64, extent: f64) -> Result<Axis> {
    let n = 2 * ((extent / h - 1e-9).ceil().max(1.0) as usize) + 1;
    Axis::with_spacing(n, h)
}

fn coarsening(m: usize) -> usize {
    (m / 2).max(1)
}

/// Output grid of `f ∗ k` (either order) for a region choice.
///
/// Support slabs of kernels broader than the field's lattice are sampled on
/// a coarsening of it, at roughly half the kernel's resolution.
pub fn product_grid(f: &SampledField, kernel: &dyn GroupKernel, region: Region) -> Result<GridSpec> {
    let g = f.grid();
    match region {
        Region::Field => Ok(*g),
        Region::Support(rel) => {
            let e = effective_extent(f, rel);
            let [kp, kt] = kernel.support();
            let [rp, rt] = kernel.resolution();
            let ep = e[0] + kp;
            let eq = e[1] + kp;
            let et = e[2] + kt + 0.5 * (e[0] * kp + e[1] * kp);
            let (mp, mt) = lattice_multiples(g, rp, rt);
            if mp >= 1 && mt >= 1 {
                let (cp, ct) = (coarsening(mp), coarsening(mt));
                if cp > 1 || ct > 1 {
                    let axis = |a: &Axis, c: usize, e: f64| {
                        if c > 1 { centred_axis(a.spacing() * c as f64, e) } else { lattice_axis(a, e) }
                    };
                    return Ok(GridSpec::from_axes(axis(&g.p, cp, ep)?, axis(&g.q, cp, eq)?, axis(&g.t, ct, et)?));
                }
            }
            Ok(GridSpec::from_axes(lattice_axis(&g.p, ep)?, lattice_axis(&g.q, eq)?, lattice_axis(&g.t, et)?))
        }
    }
}

/// Field spacings per kernel resolution step, per (p/q, t); even once above 1.
fn lattice_multiples(g: &GridSpec, rp: f64, rt: f64) -> (usize, usize) {
    let m = |r: f64, d: f64| {
        let m = (r / d + 1e-9).floor() as usize;
        if m >= 2 { m - m % 2 } else { m }
    };
    (m(rp, g.p.spacing().max(g.q.spacing())), m(rt, g.t.spacing()))
}

/// Options for [`convolve_kernel`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConvolution {
    pub side: KernelSide,
    pub region: Region,
    pub route: Route,
}

impl Default for KernelConvolution {
    fn default() -> Self {
        KernelConvolution { side: KernelSide::Right, region: Region::Field, route: Route::Auto }
    }
}

/// Product of a sampled field with an analytic kernel at any scale.
///
/// Narrow kernels are sampled on a refinement of the field's lattice and
/// integrated exactly; broad kernels are sampled on a coarsening of it and
/// interpolated, so neither operand is under-resolved.
pub fn convolve_kernel(f: &SampledField, kernel: &dyn GroupKernel, opts: KernelConvolution) -> Result<SampledField> {
    let out = product_grid(f, kernel, opts.region)?;
    convolve_kernel_onto(f, kernel, opts.side, opts.route, &out)
}

/// As [`convolve_kernel`] with an explicit output grid on the field's lattice.
pub fn convolve_kernel_onto(
    f: &SampledField,
    kernel: &dyn GroupKernel,
    side: KernelSide,
    route: Route,
    out: &GridSpec,
) -> Result<SampledField> {
    let g = *f.grid();
    let [kp, kt] = kernel.support();
    let [rp, rt] = kernel.resolution();
    let (dfp, dfq, dft) = (g.p.spacing(), g.q.spacing(), g.t.spacing());
    let ef = effective_extent(f, 1e-15);
    let eo = out.half_extents();
    let twist = 0.5 * (eo[0] * kp + eo[1] * kp);

    let (mp, mt) = lattice_multiples(&g, rp, rt);
    let (mp, mt) = (mp as f64, mt as f64);
    let field_ok = mp >= 1.0 && mt >= 1.0;
    let coarse_out = out.t.spacing() > dft * (1.0 + 1e-9);

    let route = match route {
        Route::Auto => {
            if coarse_out && field_ok {
                Route::FieldColumns
            } else if !field_ok {
                Route::KernelColumns
            } else {
                let kc_cols = (2.0 * kp.min(eo[0] + ef[0]) / (dfp / (dfp / rp).ceil().max(1.0)) + 1.0).powi(2);
                let kc_len = (kt.min(eo[2] + ef[2] + twist) + g.t.half_extent + twist + eo[2]) / dft;
                let fc_cols = ((2.0 * ef[0] / dfp + 1.0) * (2.0 * ef[1] / dfq + 1.0)).max(1.0);
                let fc_len = (g.t.half_extent + kt.min(eo[2] + ef[2] + twist) + twist + eo[2]) / (mt * dft);
                if fc_cols * fc_len < kc_cols * kc_len {
                    Route::FieldColumns
                } else {
                    Route::KernelColumns
                }
            }
        }
        r => r,
    };

    match route {
        Route::KernelColumns | Route::Auto => {
            let fine = |d: f64, r: f64| d / (d / r - 1e-9).ceil().max(1.0);
            let (dp, dq, dt) = (fine(dfp, rp), fine(dfq, rp), fine(dft, rt));
            let ap = kp.min(eo[0] + g.p.half_extent);
            let aq = kp.min(eo[1] + g.q.half_extent);
            let at = kt.min(eo[2] + g.t.half_extent + 0.5 * (eo[0] * aq + eo[1] * ap));
            let ka = GridSpec::from_axes(centred_axis(dp, ap)?, centred_axis(dq, aq)?, centred_axis(dt, at)?);
            let ks = kernel.sample(&ka)?;
            let col_side = match side {
                KernelSide::Right => ColumnSide::Right,
                KernelSide::Left => ColumnSide::Left,
            };
            twisted(&ks, f, col_side, out)
        }
        Route::FieldColumns => {
            if !field_ok {
                return Err(Error::GridMismatch(
                    "kernel is finer than the field lattice; use kernel columns".to_string(),
                ));
            }
            let (bp, bq, bt) = (mp * dfp, mp * dfq, mt * dft);
            let ep = kp.min(eo[0] + ef[0]) + bp;
            let eq = kp.min(eo[1] + ef[1]) + bq;
            let et = kt.min(eo[2] + ef[2] + 0.5 * (eo[0] * ef[1] + eo[1] * ef[0])) + bt;
            let kb = GridSpec::from_axes(centred_axis(bp, ep)?, centred_axis(bq, eq)?, centred_axis(bt, et)?);
            let ks = kernel.sample(&kb)?;
            let col_side = match side {
                KernelSide::Right => ColumnSide::Left,
                KernelSide::Left => ColumnSide::Right,
            };
            twisted(f, &ks, col_side, out)
        }
    }
}
