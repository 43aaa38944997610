use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use heisenwave::calderon::{
    calderon_kernel_closed_form, calderon_kernel_numeric, cwt as run_cwt, cwt_energy, integrand_base_grid, ScaleIntegrand,
    ScaleLattice,
};
use heisenwave::io::{read_hwf1, write_csv, write_hwf1, write_moments_csv};
use heisenwave::verify::{self, Suite, VerifyConfig};
use heisenwave::wavelet::{moment, MexicanHatWavelet, Monomial, SmoothingFunction};
use heisenwave::{Error, GridSpec, HeatKernelEvaluator, Result, SampledField};

use crate::report::{CwtManifest, Environment, SlabEntry, VerificationReport, MANIFEST_SCHEMA, REPORT_SCHEMA};
use crate::{Format, GenKind, GridArgs, SuiteArg, WindowArgs, EXIT_CHECK_FAILED, EXIT_OK};

impl GridArgs {
    pub fn spec(&self) -> Result<GridSpec> {
        let nt = self.t_samples.unwrap_or(2 * self.samples.max(2) - 1);
        GridSpec::new([self.samples, self.samples, nt], [self.extent; 3])
    }
}

impl WindowArgs {
    pub fn lattice(&self) -> Result<ScaleLattice> {
        ScaleLattice::new(self.eps, self.a_max, self.scales)
    }
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Group => Suite::Group,
            SuiteArg::Heat => Suite::Heat,
            SuiteArg::Wavelet => Suite::Wavelet,
            SuiteArg::Calderon => Suite::Calderon,
            SuiteArg::All => Suite::All,
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Format(e.to_string()))
}

pub fn verify(suite: SuiteArg, grid: &GridArgs, window: &WindowArgs, json: bool, out: Option<&Path>) -> Result<u8> {
    let suite = Suite::from(suite);
    let mut cfg = VerifyConfig { grid: grid.spec()?, window: window.lattice()?, ..VerifyConfig::default() };
    if cfg.wide_window.a_min >= cfg.window.a_min || cfg.wide_window.a_max <= cfg.window.a_max {
        cfg.wide_window = ScaleLattice::new(0.5 * cfg.window.a_min, 2.0 * cfg.window.a_max, cfg.window.count)?;
    } else {
        cfg.wide_window.count = cfg.window.count;
    }
    let start = Instant::now();
    let checks = verify::run(suite, &cfg)?;
    let pass = checks.iter().all(|c| c.pass);
    let report = VerificationReport {
        schema: REPORT_SCHEMA.to_string(),
        suite: suite.name().to_string(),
        checks,
        environment: Environment {
            grid: cfg.grid,
            window: cfg.window,
            wide_window: cfg.wide_window,
            evaluator: cfg.evaluator,
            threads: rayon::current_num_threads(),
        },
        wall_time_s: start.elapsed().as_secs_f64(),
        pass,
    };
    let body = if json { to_json(&report)? + "\n" } else { report.text() };
    match out {
        Some(p) => {
            let mut w = create(p)?;
            w.write_all(body.as_bytes())?;
            w.flush()?;
            if !json {
                print!("{body}");
            }
        }
        None => print!("{body}"),
    }
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

/// Slab file for scale `j` next to the manifest.
pub fn slab_path(manifest: &Path, j: usize) -> std::path::PathBuf {
    let stem = manifest.file_stem().and_then(|s| s.to_str()).unwrap_or("cwt");
    manifest.with_file_name(format!("{stem}.scale{j:03}.hwf1"))
}

pub fn cwt(input: &Path, eps: f64, a_max: f64, scales: usize, out: &Path, json: bool) -> Result<u8> {
    let f = read_hwf1(File::open(input).map_err(|e| Error::Io(format!("{}: {e}", input.display())))?)?;
    let g = f.grid();
    let lattice = ScaleLattice::new(eps, a_max, scales)?;
    let ev = HeatKernelEvaluator::default();
    let coeffs = run_cwt(&f, &lattice, &ev)?;
    let weights = coeffs.measure_weights();
    let mut slabs = Vec::with_capacity(coeffs.slabs.len());
    for (j, slab) in coeffs.slabs.iter().enumerate() {
        let path = slab_path(out, j);
        let mut w = create(&path)?;
        write_hwf1(slab, &mut w)?;
        slabs.push(SlabEntry {
            index: j,
            scale: lattice.node(j),
            measure_weight: weights[j],
            file: path.file_name().and_then(|s| s.to_str()).unwrap_or_default().to_string(),
            grid: *slab.grid(),
        });
    }
    let energy = cwt_energy(&coeffs);
    let norm_sq = f.norm_l2().powi(2);
    let ratio = if norm_sq > 0.0 { energy / norm_sq } else { 0.0 };
    let manifest = CwtManifest {
        schema: MANIFEST_SCHEMA.to_string(),
        input: input.display().to_string(),
        input_grid: *g,
        scales: lattice,
        slabs,
        energy,
        norm_sq,
        ratio,
    };
    let mut w = create(out)?;
    w.write_all(to_json(&manifest)?.as_bytes())?;
    w.write_all(b"\n")?;
    w.flush()?;
    if json {
        println!("{}", serde_json::json!({ "energy": energy, "norm_sq": norm_sq, "ratio": ratio }));
    } else {
        println!("energy {energy:.10e}");
        println!("ratio {ratio:.10e}");
    }
    Ok(EXIT_OK)
}

fn write_field(field: &SampledField, format: Format, out: &Path) -> Result<()> {
    let mut w = create(out)?;
    match format {
        Format::Hwf1 => write_hwf1(field, &mut w),
        Format::Csv => write_csv(field, &mut w),
    }
}

pub fn gen(
    kind: GenKind,
    grid: &GridArgs,
    s: f64,
    window: &WindowArgs,
    closed_form: bool,
    format: Format,
    out: &Path,
) -> Result<u8> {
    let g = grid.spec()?;
    let ev = HeatKernelEvaluator::default();
    let field = match kind {
        GenKind::Heat => ev.sample_heat(&g, s)?,
        GenKind::Phi => MexicanHatWavelet::new(&ev).sample(&g)?,
        GenKind::Psi => SmoothingFunction::new(&ev).sample(&g)?,
        GenKind::Kernel => {
            let lattice = window.lattice()?;
            if closed_form {
                calderon_kernel_closed_form(window.eps, window.a_max, &g, &ev)?.field
            } else {
                let integrand = ScaleIntegrand::new(&ev, &integrand_base_grid())?;
                calderon_kernel_numeric(window.eps, window.a_max, &lattice, &g, &integrand)?.field
            }
        }
        GenKind::Moments => {
            let phi = MexicanHatWavelet::new(&ev).sample(&g)?;
            let ms: Vec<_> = Monomial::below_degree(3).into_iter().map(|m| moment(&phi, m)).collect();
            for m in ms.iter().filter(|m| m.boundary_warning) {
                eprintln!("warning: moment {} has a non-negligible integrand on the grid boundary", m.monomial);
            }
            write_moments_csv(&ms, create(out)?)?;
            return Ok(EXIT_OK);
        }
    };
    write_field(&field, format, out)?;
    Ok(EXIT_OK)
}
