//! Left-invariant vector fields and the sub-Laplacian by finite differences.
//!
//! Interior nodes use central second-order stencils, boundary nodes one-sided
//! second-order stencils.

use crate::field::SampledField;
use crate::grid::GridSpec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VectorFieldDirection {
    /// `∂_p − (q/2) ∂_t`
    X,
    /// `∂_q + (p/2) ∂_t`
    Y,
    /// `∂_t`
    T,
}

#[derive(Clone, Copy)]
enum Ax {
    P,
    Q,
    T,
}

fn stride_and_len(g: &GridSpec, ax: Ax) -> (usize, usize, f64) {
    match ax {
        Ax::P => (g.q.samples * g.t.samples, g.p.samples, g.p.spacing()),
        Ax::Q => (g.t.samples, g.q.samples, g.q.spacing()),
        Ax::T => (1, g.t.samples, g.t.spacing()),
    }
}

fn along(g: &GridSpec, ax: Ax, idx: usize) -> usize {
    let (i, j, k) = g.unravel(idx);
    match ax {
        Ax::P => i,
        Ax::Q => j,
        Ax::T => k,
    }
}

fn first_diff(g: &GridSpec, v: &[Complex64], ax: Ax) -> Vec<Complex64> {
    let (s, n, h) = stride_and_len(g, ax);
    let inv = 1.0 / (2.0 * h);
    (0..v.len())
        .map(|idx| {
            let i = along(g, ax, idx);
            if i == 0 {
                (-3.0 * v[idx] + 4.0 * v[idx + s] - v[idx + 2 * s]) * inv
            } else if i == n - 1 {
                (3.0 * v[idx] - 4.0 * v[idx - s] + v[idx - 2 * s]) * inv
            } else {
                (v[idx + s] - v[idx - s]) * inv
            }
        })
        .collect()
}

fn second_diff(g: &GridSpec, v: &[Complex64], ax: Ax) -> Vec<Complex64> {
    let (s, n, h) = stride_and_len(g, ax);
    let inv = 1.0 / (h * h);
    (0..v.len())
        .map(|idx| {
            let i = along(g, ax, idx);
            if i == 0 {
                if n >= 4 {
                    (2.0 * v[idx] - 5.0 * v[idx + s] + 4.0 * v[idx + 2 * s] - v[idx + 3 * s]) * inv
                } else {
                    (v[idx] - 2.0 * v[idx + s] + v[idx + 2 * s]) * inv
                }
            } else if i == n - 1 {
                if n >= 4 {
                    (2.0 * v[idx] - 5.0 * v[idx - s] + 4.0 * v[idx - 2 * s] - v[idx - 3 * s]) * inv
                } else {
                    (v[idx] - 2.0 * v[idx - s] + v[idx - 2 * s]) * inv
                }
            } else {
                (v[idx + s] - 2.0 * v[idx] + v[idx - s]) * inv
            }
        })
        .collect()
}

pub fn apply_vector_field(dir: VectorFieldDirection, f: &SampledField) -> SampledField {
    let g = *f.grid();
    let v = f.values();
    let dt = first_diff(&g, v, Ax::T);
    let out = match dir {
        VectorFieldDirection::T => dt,
        VectorFieldDirection::X => {
            let dp = first_diff(&g, v, Ax::P);
            (0..v.len()).map(|i| dp[i] - dt[i] * (0.5 * g.point_at(i).q)).collect()
        }
        VectorFieldDirection::Y => {
            let dq = first_diff(&g, v, Ax::Q);
            (0..v.len()).map(|i| dq[i] + dt[i] * (0.5 * g.point_at(i).p)).collect()
        }
    };
    SampledField::from_values_unchecked(g, out)
}

/// `L f = −(X² + Y²) f`, expanded as
/// `−(f_pp + f_qq − q f_pt + p f_qt + ¼(p² + q²) f_tt)` with compact stencils.
pub fn sub_laplacian(f: &SampledField) -> SampledField {
    let g = *f.grid();
    let v = f.values();
    let fpp = second_diff(&g, v, Ax::P);
    let fqq = second_diff(&g, v, Ax::Q);
    let ftt = second_diff(&g, v, Ax::T);
    let ft = first_diff(&g, v, Ax::T);
    let fpt = first_diff(&g, &ft, Ax::P);
    let fqt = first_diff(&g, &ft, Ax::Q);
    let out = (0..v.len())
        .map(|i| {
            let w = g.point_at(i);
            -(fpp[i] + fqq[i] - fpt[i] * w.q + fqt[i] * w.p + ftt[i] * (0.25 * (w.p * w.p + w.q * w.q)))
        })
        .collect();
    SampledField::from_values_unchecked(g, out)
}

/// `−(X(Xf) + Y(Yf))` by composing the first-order fields.
pub fn sub_laplacian_composed(f: &SampledField) -> SampledField {
    use VectorFieldDirection::{X, Y};
    let xx = apply_vector_field(X, &apply_vector_field(X, f));
    let yy = apply_vector_field(Y, &apply_vector_field(Y, f));
    let out = xx.values().iter().zip(yy.values()).map(|(a, b)| -(a + b)).collect();
    SampledField::from_values_unchecked(*f.grid(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use VectorFieldDirection::*;

    fn grid() -> GridSpec {
        GridSpec::new([11, 13, 15], [2.0, 2.5, 3.0]).unwrap()
    }

    fn interior_max_err<F: Fn(crate::group::GroupPoint) -> f64>(f: &SampledField, exact: F) -> f64 {
        let g = *f.grid();
        let mask = g.interior_mask(0.8);
        (0..g.len()).filter(|&i| mask[i]).map(|i| (f.values()[i].re - exact(g.point_at(i))).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn x_of_linear_functions() {
        let f = SampledField::from_real_fn(grid(), |w| w.p);
        assert!(interior_max_err(&apply_vector_field(X, &f), |_| 1.0) < 1e-10);
        let f = SampledField::from_real_fn(grid(), |w| w.t);
        assert!(interior_max_err(&apply_vector_field(X, &f), |w| -0.5 * w.q) < 1e-10);
        assert!(interior_max_err(&apply_vector_field(Y, &f), |w| 0.5 * w.p) < 1e-10);
    }

    #[test]
    fn bracket_gives_t() {
        let f = SampledField::from_real_fn(grid(), |w| w.t * w.t);
        let xy = apply_vector_field(X, &apply_vector_field(Y, &f));
        let yx = apply_vector_field(Y, &apply_vector_field(X, &f));
        let tf = apply_vector_field(T, &f);
        let br = xy.sub(&yx).unwrap();
        assert!(br.interior_rel_l2(&tf).unwrap() < 1e-6);
    }

    #[test]
    fn laplacian_of_quadratic_and_constant() {
        let f = SampledField::from_real_fn(grid(), |w| w.p * w.p + w.q * w.q);
        assert!(interior_max_err(&sub_laplacian(&f), |_| -4.0) < 1e-8);
        assert!(interior_max_err(&sub_laplacian_composed(&f), |_| -4.0) < 1e-8);
        let c = SampledField::from_real_fn(grid(), |_| 3.5);
        assert!(sub_laplacian(&c).values().iter().all(|v| *v == Complex64::new(0.0, 0.0)));
    }
}
