//! File formats: JSON state files, run/witness reports, estimate results,
//! and the CSV history/sweep tables.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use gmelab::error::{Error, Result};
use gmelab::estimator::EstimatorResult;
use gmelab::gilbert::{GilbertConfig, GilbertRun};
use gmelab::operator::{ComplexMatrix, DensityMatrix};
use gmelab::partition::{Grouping, PartySpec};
use gmelab::witness::WitnessReport;

/// On-disk state: party structure plus the dense matrix as [re, im] pairs,
/// row-major. Loading runs the full density-matrix checks.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct StateFile {
    pub parties: Vec<String>,
    pub particles_per_party: Vec<usize>,
    /// Local dimension of each particle, flat in canonical order.
    pub dims: Vec<usize>,
    /// "party" or "particle".
    pub grouping: String,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

pub fn grouping_from_str(s: &str) -> Result<Grouping> {
    match s {
        "party" => Ok(Grouping::PerParty),
        "particle" => Ok(Grouping::PerParticle),
        other => Err(Error::UnknownLabel(format!("grouping `{other}`"))),
    }
}

pub fn grouping_to_str(g: Grouping) -> &'static str {
    match g {
        Grouping::PerParty => "party",
        Grouping::PerParticle => "particle",
    }
}

pub fn matrix_to_pairs(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.dim())
        .map(|i| {
            (0..m.dim())
                .map(|j| {
                    let v = m.get(i, j);
                    [v.re, v.im]
                })
                .collect()
        })
        .collect()
}

pub fn matrix_from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
    let dim = rows.len();
    for row in rows {
        if row.len() != dim {
            return Err(Error::DimMismatch {
                left: dim,
                right: row.len(),
            });
        }
    }
    Ok(ComplexMatrix::from_fn(dim, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix, spec: &PartySpec) -> Self {
        Self {
            parties: spec.parties().to_vec(),
            particles_per_party: spec.particles_per_party().to_vec(),
            dims: spec.particle_dims().to_vec(),
            grouping: grouping_to_str(spec.grouping()).to_string(),
            matrix: matrix_to_pairs(rho.matrix()),
        }
    }

    pub fn spec(&self) -> Result<PartySpec> {
        PartySpec::new(
            self.parties.clone(),
            self.particles_per_party.clone(),
            self.dims.clone(),
            grouping_from_str(&self.grouping)?,
        )
    }

    /// Full validation: Hermiticity, trace, positivity.
    pub fn to_density(&self) -> Result<(DensityMatrix, PartySpec)> {
        let spec = self.spec()?;
        let matrix = matrix_from_pairs(&self.matrix)?;
        let rho = DensityMatrix::new(matrix, spec.particle_dims().to_vec())?;
        Ok((rho, spec))
    }

    /// Structural load without the density-matrix checks, for reference
    /// approximations stored at limited precision.
    pub fn to_raw_matrix(&self) -> Result<(ComplexMatrix, PartySpec)> {
        let spec = self.spec()?;
        let matrix = matrix_from_pairs(&self.matrix)?;
        if matrix.dim() != spec.total_dim() {
            return Err(Error::DimMismatch {
                left: matrix.dim(),
                right: spec.total_dim(),
            });
        }
        Ok((matrix, spec))
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ConfigJson {
    pub max_corrections: u64,
    pub max_trials: u64,
    pub record_interval: u64,
    pub seesaw_sweeps: u32,
    pub seesaw_tol: f64,
    pub target_distance: Option<f64>,
}

impl ConfigJson {
    pub fn from_config(c: &GilbertConfig) -> Self {
        Self {
            max_corrections: c.max_corrections,
            max_trials: c.max_trials,
            record_interval: c.record_interval,
            seesaw_sweeps: c.seesaw_sweeps,
            seesaw_tol: c.seesaw_tol,
            target_distance: c.target_distance,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct LambdaRow {
    pub cut: String,
    pub value: f64,
}

/// Full projection report: distances, witness data, and the final
/// approximation.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct RunReport {
    pub schema_version: u32,
    pub class: String,
    pub grouping: String,
    pub seed: u64,
    pub config: ConfigJson,
    pub corrections: u64,
    pub trials: u64,
    pub d_last: f64,
    pub d_est: Option<f64>,
    pub r_star: Option<f64>,
    pub d_wit: f64,
    pub lambda: f64,
    pub lambda_restarts: u32,
    pub lambda_table: Vec<LambdaRow>,
    pub degenerate_witness: bool,
    pub css: Vec<Vec<[f64; 2]>>,
}

impl RunReport {
    pub fn assemble(
        run: &GilbertRun,
        witness: &WitnessReport,
        estimate: Option<&EstimatorResult>,
    ) -> Self {
        Self {
            schema_version: 1,
            class: run.class.label(),
            grouping: grouping_to_str(run.spec.grouping()).to_string(),
            seed: run.config.rng_seed,
            config: ConfigJson::from_config(&run.config),
            corrections: run.corrections_done,
            trials: run.trials_used,
            d_last: run.d_last,
            d_est: estimate.map(|e| e.d_est),
            r_star: estimate.map(|e| e.r_star),
            d_wit: witness.d_wit,
            lambda: witness.lambda,
            lambda_restarts: witness.restarts_used,
            lambda_table: witness
                .per_class_max
                .iter()
                .map(|(cut, value)| LambdaRow {
                    cut: cut.to_string(),
                    value: *value,
                })
                .collect(),
            degenerate_witness: witness.degenerate,
            css: matrix_to_pairs(run.css.matrix()),
        }
    }
}

/// Standalone witness report (state + explicit approximation).
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct WitnessJson {
    pub schema_version: u32,
    pub class: String,
    pub d_last: f64,
    pub d_wit: f64,
    pub lambda: f64,
    pub lambda_restarts: u32,
    pub lambda_table: Vec<LambdaRow>,
    pub degenerate: bool,
    pub witness: Vec<Vec<[f64; 2]>>,
}

impl WitnessJson {
    pub fn assemble(report: &WitnessReport, class: &str) -> Self {
        Self {
            schema_version: 1,
            class: class.to_string(),
            d_last: report.d_last,
            d_wit: report.d_wit,
            lambda: report.lambda,
            lambda_restarts: report.restarts_used,
            lambda_table: report
                .per_class_max
                .iter()
                .map(|(cut, value)| LambdaRow {
                    cut: cut.to_string(),
                    value: *value,
                })
                .collect(),
            degenerate: report.degenerate,
            witness: matrix_to_pairs(&report.witness),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct EstimateJson {
    pub d_est: f64,
    pub a_star: f64,
    pub r_star: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct NegativityJson {
    pub grouping: String,
    pub cuts: Vec<LambdaRow>,
    /// Geometric mean over one-vs-rest cuts; present for three-group specs.
    pub tripartite: Option<f64>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct G3peJson {
    pub mode: String,
    pub measure: String,
    pub triples: usize,
    pub value: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ProtocolBranchJson {
    pub label: String,
    pub measure_prob: f64,
    pub stage_prob: f64,
    pub correction: String,
    pub fidelity: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ProtocolJson {
    pub prob: f64,
    pub prob_rational: String,
    pub fidelity: f64,
    pub branches: Vec<ProtocolBranchJson>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ProtocolsJson {
    pub w_to_ghz: ProtocolJson,
    pub ghz_to_w: ProtocolJson,
}

/// Best small-denominator rational for a probability, as "p/q".
pub fn rational_label(x: f64, max_den: u64) -> String {
    let mut best = (0u64, 1u64);
    let mut best_err = f64::INFINITY;
    for q in 1..=max_den {
        let p = (x * q as f64).round().max(0.0) as u64;
        let err = (x - p as f64 / q as f64).abs();
        if err + 1e-15 < best_err {
            best_err = err;
            best = (p, q);
        }
    }
    format!("{}/{}", best.0, best.1)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> std::io::Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
    text.push('\n');
    std::fs::write(path, text)
}

/// Parses a history CSV with header `correction,d_squared`.
pub fn parse_history_csv(text: &str) -> Result<Vec<(u64, f64)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if i == 0 {
            if line != "correction,d_squared" {
                return Err(Error::InvalidCut(format!(
                    "unexpected history header `{line}`"
                )));
            }
            continue;
        }
        let (c, d) = line.split_once(',').ok_or_else(|| {
            Error::InvalidCut(format!("bad history row `{line}`"))
        })?;
        let c: u64 = c
            .parse()
            .map_err(|_| Error::InvalidCut(format!("bad correction index `{c}`")))?;
        let d: f64 = d
            .parse()
            .map_err(|_| Error::InvalidCut(format!("bad squared distance `{d}`")))?;
        out.push((c, d));
    }
    Ok(out)
}
