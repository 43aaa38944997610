use heisenwave::calderon::ScaleLattice;
use heisenwave::heat::EvaluatorParams;
use heisenwave::verify::Check;
use heisenwave::GridSpec;
use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA: &str = "hwreport/1";
pub const MANIFEST_SCHEMA: &str = "hwcwt/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Environment {
    pub grid: GridSpec,
    pub window: ScaleLattice,
    pub wide_window: ScaleLattice,
    pub evaluator: EvaluatorParams,
    pub threads: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub suite: String,
    pub checks: Vec<Check>,
    pub environment: Environment,
    pub wall_time_s: f64,
    pub pass: bool,
}

impl VerificationReport {
    pub fn text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&c.to_string());
            s.push('\n');
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        s.push_str(&format!(
            "suite {}: {} checks, {} failed, {:.1}s\n",
            self.suite,
            self.checks.len(),
            failed,
            self.wall_time_s
        ));
        s
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlabEntry {
    pub index: usize,
    pub scale: f64,
    pub measure_weight: f64,
    pub file: String,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CwtManifest {
    pub schema: String,
    pub input: String,
    pub input_grid: GridSpec,
    pub scales: ScaleLattice,
    pub slabs: Vec<SlabEntry>,
    pub energy: f64,
    pub norm_sq: f64,
    pub ratio: f64,
}
