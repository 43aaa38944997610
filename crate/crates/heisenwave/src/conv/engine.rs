//! Group convolution with the `t`-integral done spectrally.
//!
//! For a fixed column `(p', q')` of one operand the `t`-integral of a group
//! convolution is an ordinary 1-D convolution shifted by the symplectic term
//! `½(p q' − q p')`. In frequency that shift is a phase, so each output column
//! accumulates `Â(κ) B̂(κ) e^{−iσκs}` over columns of `A`, and one inverse FFT
//! per output column returns to `t`.
//!
//! `A` contributes exact columns with trapezoidal weights. `B` is read between
//! its `(p, q)` nodes by Catmull-Rom interpolation of its spectrum. All pairs
//! that share the same fractional offset use one pre-shifted copy of `B̂`, so
//! the inner loop is a single tap.

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::grid::GridSpec;
use crate::interp::catmull_rom;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Which side of the product the column operand `A` sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ColumnSide {
    /// `B ∗ A`
    Right,
    /// `A ∗ B`
    Left,
}

impl ColumnSide {
    fn sigma(self) -> f64 {
        match self {
            ColumnSide::Right => 1.0,
            ColumnSide::Left => -1.0,
        }
    }
}

/// Columns of `A` below this fraction of its peak are skipped.
const COLUMN_CUTOFF: f64 = 1e-15;
const FRAC_KEYS: f64 = 1048576.0;

fn smooth_odd_at_least(n: usize) -> usize {
    let mut m = n.max(3) | 1;
    loop {
        let mut r = m;
        for f in [3, 5, 7] {
            while r % f == 0 {
                r /= f;
            }
        }
        if r == 1 {
            return m;
        }
        m += 2;
    }
}

fn frac_key(x: f64) -> i64 {
    let f = x - x.floor();
    ((f * FRAC_KEYS).round() as i64).rem_euclid(FRAC_KEYS as i64)
}

fn snapped_frac(u: f64) -> f64 {
    let f = u - u.floor();
    if !(1e-9..=1.0 - 1e-9).contains(&f) {
        0.0
    } else {
        f
    }
}

struct Columns {
    p: Vec<f64>,
    q: Vec<f64>,
    spec: Vec<Complex64>,
}

/// `B ∗ A` or `A ∗ B` evaluated on the nodes of `out`.
///
/// The `t` spacing of `out` must be `Δt_B / r` for a positive integer `r`.
pub(crate) fn twisted(a: &SampledField, b: &SampledField, side: ColumnSide, out: &GridSpec) -> Result<SampledField> {
    let ga = *a.grid();
    let gb = *b.grid();
    let dtb = gb.t.spacing();
    let refine = dtb / out.t.spacing();
    let r = refine.round();
    if r < 1.0 || (refine - r).abs() > 1e-9 * refine {
        return Err(Error::GridMismatch(format!(
            "output t spacing {} must divide operand spacing {}",
            out.t.spacing(),
            dtb
        )));
    }
    let r = r as usize;
    let sigma = side.sigma();
    let real = a.max_imag() == 0.0 && b.max_imag() == 0.0;

    // Columns of A worth integrating.
    let peak = a.max_abs();
    if peak == 0.0 || b.max_abs() == 0.0 {
        return Ok(SampledField::zeros(*out));
    }
    let nta = ga.t.samples;
    let mut used: Vec<(usize, usize)> = Vec::new();
    for i in 0..ga.p.samples {
        for j in 0..ga.q.samples {
            let base = ga.index(i, j, 0);
            let m = a.values()[base..base + nta].iter().map(|v| v.norm()).fold(0.0, f64::max);
            if m > COLUMN_CUTOFF * peak {
                used.push((i, j));
            }
        }
    }
    let max_ap = used.iter().map(|&(i, _)| ga.p.node(i).abs()).fold(0.0, f64::max);
    let max_aq = used.iter().map(|&(_, j)| ga.q.node(j).abs()).fold(0.0, f64::max);
    let smax = 0.5 * (out.p.half_extent * max_aq + out.q.half_extent * max_ap);

    let period_min = ga.t.half_extent + gb.t.half_extent + smax + out.t.half_extent + 2.0 * dtb;
    let m = smooth_odd_at_least(((period_min / dtb).ceil() as usize).max(gb.t.samples + 1));
    let period = m as f64 * dtb;
    let dk = 2.0 * PI / period;
    let h = (m - 1) / 2;
    let len = if real { h + 1 } else { m };
    let kappa = |l: usize| if l <= h { l as f64 * dk } else { (l as f64 - m as f64) * dk };

    let mut planner = FftPlanner::<f64>::new();

    // Spectrum of every B column, Δt·e^{−iκ t₀}·FFT.
    let fwd = planner.plan_fft_forward(m);
    let ntb = gb.t.samples;
    let tb0 = gb.t.node(0);
    let phase_b: Vec<Complex64> = (0..len).map(|l| Complex64::from_polar(dtb, -kappa(l) * tb0)).collect();
    let nbp = gb.p.samples;
    let nbq = gb.q.samples;
    let mut bspec = vec![Complex64::new(0.0, 0.0); nbp * nbq * len];
    bspec.par_chunks_mut(len).enumerate().for_each(|(c, dst)| {
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        buf[..ntb].copy_from_slice(&b.values()[c * ntb..(c + 1) * ntb]);
        fwd.process(&mut buf);
        for l in 0..len {
            dst[l] = buf[l] * phase_b[l];
        }
    });

    // Spectrum of every used A column by direct DFT, band-limited to A's own Nyquist.
    let wp = ga.p.weights();
    let wq = ga.q.weights();
    let wt = ga.t.weights();
    let nyq_a = PI / ga.t.spacing() * (1.0 - 1e-9);
    let dft: Vec<Complex64> = (0..nta)
        .flat_map(|k| {
            let tk = ga.t.node(k);
            let wk = wt[k];
            (0..len).map(move |l| {
                let kp = kappa(l);
                if kp.abs() > nyq_a {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::from_polar(wk, -kp * tk)
                }
            })
        })
        .collect();
    let cols = {
        let spec: Vec<Vec<Complex64>> = used
            .par_iter()
            .map(|&(i, j)| {
                let base = ga.index(i, j, 0);
                let w = wp[i] * wq[j];
                let mut s = vec![Complex64::new(0.0, 0.0); len];
                for k in 0..nta {
                    let v = a.values()[base + k] * w;
                    if v.re == 0.0 && v.im == 0.0 {
                        continue;
                    }
                    let row = &dft[k * len..(k + 1) * len];
                    for l in 0..len {
                        s[l] += v * row[l];
                    }
                }
                s
            })
            .collect();
        Columns {
            p: used.iter().map(|&(i, _)| ga.p.node(i)).collect(),
            q: used.iter().map(|&(_, j)| ga.q.node(j)).collect(),
            spec: spec.into_iter().flatten().collect(),
        }
    };

    // Group output and A columns by fractional position relative to B's lattice.
    let (dbp, dbq) = (gb.p.spacing(), gb.q.spacing());
    let (cbp, cbq) = (gb.p.center(), gb.q.center());
    let nop = out.p.samples;
    let noq = out.q.samples;
    let mut out_groups: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for c in 0..nop * noq {
        let (po, qo) = (out.p.node(c / noq), out.q.node(c % noq));
        out_groups.entry((frac_key(po / dbp), frac_key(qo / dbq))).or_default().push(c);
    }
    let mut a_groups: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for k in 0..used.len() {
        a_groups.entry((frac_key(cols.p[k] / dbp), frac_key(cols.q[k] / dbq))).or_default().push(k);
    }
    let out_keys: Vec<(i64, i64)> = out_groups.keys().copied().collect();
    let a_keys: Vec<(i64, i64)> = a_groups.keys().copied().collect();
    let out_group_of: HashMap<(i64, i64), usize> = out_keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let mut col_group = vec![0usize; nop * noq];
    for (key, members) in &out_groups {
        for &c in members {
            col_group[c] = out_group_of[key];
        }
    }
    // class -> for each output group, the A groups paired with it
    let mut classes: HashMap<(i64, i64), (f64, f64, Vec<Vec<usize>>)> = HashMap::new();
    for (go, ok) in out_keys.iter().enumerate() {
        let xo = (out_groups[ok][0] / noq, out_groups[ok][0] % noq);
        let (po, qo) = (out.p.node(xo.0), out.q.node(xo.1));
        for (ga_id, ak) in a_keys.iter().enumerate() {
            let k = a_groups[ak][0];
            let up = (po - cols.p[k]) / dbp + cbp;
            let uq = (qo - cols.q[k]) / dbq + cbq;
            let class = (frac_key(up), frac_key(uq));
            let entry =
                classes.entry(class).or_insert_with(|| (snapped_frac(up), snapped_frac(uq), vec![Vec::new(); out_keys.len()]));
            entry.2[go].push(ga_id);
        }
    }
    let a_key_members: Vec<&Vec<usize>> = a_keys.iter().map(|k| &a_groups[k]).collect();

    let mut acc: Vec<Vec<Complex64>> = vec![Vec::new(); nop * noq];
    let sp = nbq + 1;
    for (fp, fq, pairing) in classes.into_values() {
        let shifted = shift_spectrum(&bspec, nbp, nbq, len, fp, fq);
        let shifted = &shifted;
        let pairing = &pairing;
        let cols = &cols;
        let a_key_members = &a_key_members;
        let col_group = &col_group;
        acc.par_iter_mut().enumerate().for_each(|(c, acc_c)| {
            let groups = &pairing[col_group[c]];
            if groups.is_empty() {
                return;
            }
            let (po, qo) = (out.p.node(c / noq), out.q.node(c % noq));
            for &ga_id in groups {
                for &k in a_key_members[ga_id] {
                    let ap = cols.p[k];
                    let aq = cols.q[k];
                    let ip = ((po - ap) / dbp + cbp - fp).round() as isize;
                    let iq = ((qo - aq) / dbq + cbq - fq).round() as isize;
                    if ip < -1 || iq < -1 || ip >= nbp as isize || iq >= nbq as isize {
                        continue;
                    }
                    if acc_c.is_empty() {
                        acc_c.resize(len, Complex64::new(0.0, 0.0));
                    }
                    let row = ((ip + 1) as usize * sp + (iq + 1) as usize) * len;
                    let bs = &shifted[row..row + len];
                    let asp = &cols.spec[k * len..(k + 1) * len];
                    let s = 0.5 * (po * aq - qo * ap);
                    accumulate(acc_c, asp, bs, -sigma * dk * s, h, real);
                }
            }
        });
    }

    // Back to t on the output lattice.
    let mr = m * r;
    let inv = planner.plan_fft_inverse(mr);
    let nto = out.t.samples;
    let to0 = out.t.node(0);
    let phase_o: Vec<Complex64> = (0..len).map(|l| Complex64::from_polar(1.0 / period, kappa(l) * to0)).collect();
    let mut values = vec![Complex64::new(0.0, 0.0); out.len()];
    values.par_chunks_mut(nto).zip(acc.par_iter()).for_each(|(dst, acc_c)| {
        if acc_c.is_empty() {
            return;
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); mr];
        for l in 0..len {
            let v = acc_c[l] * phase_o[l];
            if l <= h {
                buf[l] = v;
                if real && l > 0 {
                    buf[mr - l] = v.conj();
                }
            } else {
                buf[mr - (m - l)] = v;
            }
        }
        inv.process(&mut buf);
        for n in 0..nto {
            dst[n] = if real { Complex64::new(buf[n].re, 0.0) } else { buf[n] };
        }
    });
    Ok(SampledField::from_values_unchecked(*out, values))
}

#[inline]
fn accumulate(acc: &mut [Complex64], a: &[Complex64], b: &[Complex64], theta: f64, h: usize, real: bool) {
    let z = Complex64::from_polar(1.0, theta);
    let mut ph = Complex64::new(1.0, 0.0);
    let pos = h + 1;
    for l in 0..pos.min(acc.len()) {
        acc[l] += a[l] * b[l] * ph;
        ph *= z;
    }
    if !real {
        let m = acc.len();
        let zc = z.conj();
        let mut ph = zc;
        for l in (pos..m).rev() {
            acc[l] += a[l] * b[l] * ph;
            ph *= zc;
        }
    }
}

/// `B̂` read at `(i + fp, j + fq)` for `i ∈ [−1, nbp)`, `j ∈ [−1, nbq)`, zero outside the lattice.
fn shift_spectrum(spec: &[Complex64], nbp: usize, nbq: usize, len: usize, fp: f64, fq: f64) -> Vec<Complex64> {
    let get = |i: isize, j: isize| -> Option<&[Complex64]> {
        if i < 0 || j < 0 || i >= nbp as isize || j >= nbq as isize {
            None
        } else {
            let o = (i as usize * nbq + j as usize) * len;
            Some(&spec[o..o + len])
        }
    };
    let taps = |f: f64| -> Vec<(isize, f64)> {
        if f == 0.0 {
            vec![(0, 1.0)]
        } else {
            let w = catmull_rom(f);
            vec![(-1, w[0]), (0, w[1]), (1, w[2]), (2, w[3])]
        }
    };
    let tq = taps(fq);
    let tp = taps(fp);
    let sq = nbq + 1;
    // Interpolate along q first, rows i in [-2, nbp + 1) so the p taps can read them.
    let rows = nbp + 3;
    let mut half = vec![Complex64::new(0.0, 0.0); rows * sq * len];
    half.par_chunks_mut(sq * len).enumerate().for_each(|(ri, dst)| {
        let i = ri as isize - 2;
        for jj in 0..sq {
            let j = jj as isize - 1;
            let d = &mut dst[jj * len..(jj + 1) * len];
            for &(dj, w) in &tq {
                if let Some(src) = get(i, j + dj) {
                    for l in 0..len {
                        d[l] += src[l] * w;
                    }
                }
            }
        }
    });
    let mut out = vec![Complex64::new(0.0, 0.0); (nbp + 1) * sq * len];
    out.par_chunks_mut(sq * len).enumerate().for_each(|(ii, dst)| {
        let i = ii as isize - 1;
        for &(di, w) in &tp {
            let src_row = i + di + 2;
            if src_row < 0 || src_row >= rows as isize {
                continue;
            }
            let src = &half[src_row as usize * sq * len..(src_row as usize + 1) * sq * len];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s * w;
            }
        }
    });
    out
}
