use crate::error::Result;
use crate::field::{node_weights, SampledField};
use crate::group::{inverse, multiply};
use crate::interp::Interpolation;
use num_complex::Complex64;
use rayon::prelude::*;

/// `(f ∗ g)(ω) = Σ_υ w(υ) f(υ) g(υ⁻¹ω)` over all grid nodes, `g` read by trilinear interpolation.
///
/// Cost is quadratic in the node count; intended for small grids and as a reference.
pub fn convolve_direct(f: &SampledField, g: &SampledField) -> Result<SampledField> {
    f.grid().ensure_same(g.grid())?;
    let grid = *f.grid();
    let w = node_weights(&grid);
    let sources: Vec<(usize, Complex64)> = f
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > 0.0)
        .map(|(i, v)| (i, *v * w[i]))
        .collect();
    let values = (0..grid.len())
        .into_par_iter()
        .map(|o| {
            let om = grid.point_at(o);
            let mut acc = Complex64::new(0.0, 0.0);
            for &(i, fv) in &sources {
                let u = grid.point_at(i);
                acc += fv * g.interpolate(multiply(inverse(u), om), Interpolation::Trilinear);
            }
            acc
        })
        .collect();
    SampledField::from_values(grid, values)
}
