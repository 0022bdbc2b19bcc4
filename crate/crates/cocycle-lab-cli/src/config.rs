//! TOML run configuration: schema, validation and conversion into the
//! library's model/measure types. Unknown keys are rejected so typos fail
//! loudly instead of silently running defaults.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use cocycle_lab::{
    CocycleElement, DrivingMeasure, FrequencyComponent, Matrix, MatrixFn, NoiseComponent,
    PotentialFn, SchrodingerModel, TorusPoint, TrigCoeff,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// estimate | spectrum | sweep | stationary | converge | criteria
    pub experiment: String,
    pub model: ModelConfig,
    #[serde(default)]
    pub estimator: EstimatorConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// op1 | op2 | op3 | atoms
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// weighted frequency atoms [[weight, alpha], ...]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub freq_atoms: Option<Vec<(f64, f64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub freq_uniform: Option<(f64, f64)>,
    /// weighted noise atoms [[weight, omega], ...]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_atoms: Option<Vec<(f64, f64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_uniform: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential_mean: Option<f64>,
    /// potential harmonics [[k, cos amplitude, sin amplitude], ...]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub harmonics: Option<Vec<(i64, f64, f64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    /// explicit group-element atoms, for kind = "atoms"
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<AtomConfig>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub weight: f64,
    pub alpha: f64,
    /// row-major square matrix entries
    pub matrix: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimatorConfig {
    pub n: u64,
    pub n_samples: u64,
    pub seed: u64,
    pub theta0: f64,
    /// number of exponents for spectrum runs
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energies: Option<Vec<f64>>,
    pub burn_in: u64,
    pub n_keep: u64,
    pub n_mc: u64,
    pub theta_bins: usize,
    pub angle_bins: usize,
    pub theta_grid: usize,
    pub n_list: Vec<u64>,
    pub eps: f64,
    /// Diophantine scan order and tolerance for criteria runs
    pub order: i64,
    pub tol: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            n: 10_000,
            n_samples: 100,
            seed: 1,
            theta0: 0.0,
            k: 2,
            energies: None,
            burn_in: 10_000,
            n_keep: 1_000_000,
            n_mc: 1_000_000,
            theta_bins: 100,
            angle_bins: 100,
            theta_grid: 64,
            n_list: vec![100, 1_000, 10_000],
            eps: 0.05,
            order: 10,
            tol: 1e-6,
        }
    }
}

pub const EXPERIMENTS: [&str; 6] =
    ["estimate", "spectrum", "sweep", "stationary", "converge", "criteria"];

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).context("config parse failed")?;
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<()> {
    if !EXPERIMENTS.contains(&cfg.experiment.as_str()) {
        bail!(
            "experiment must be one of {} (got {:?})",
            EXPERIMENTS.join(" | "),
            cfg.experiment
        );
    }
    let e = &cfg.estimator;
    if e.n < 1 {
        bail!("estimator.n must be >= 1");
    }
    if e.n_samples < 1 {
        bail!("n_samples must be >= 1");
    }
    if e.k < 1 {
        bail!("estimator.k must be >= 1");
    }
    if !(e.eps > 0.0) {
        bail!("estimator.eps must be > 0");
    }
    if !(e.tol > 0.0) {
        bail!("estimator.tol must be > 0");
    }
    if e.order < 1 {
        bail!("estimator.order must be >= 1");
    }
    if e.theta_bins < 1 || e.angle_bins < 1 || e.theta_grid < 1 {
        bail!("estimator bin and grid sizes must be >= 1");
    }
    if e.n_list.is_empty() || e.n_list.windows(2).any(|w| w[0] >= w[1]) {
        bail!("estimator.n_list must be nonempty and strictly increasing");
    }
    if cfg.experiment == "sweep" {
        let en = e
            .energies
            .as_ref()
            .ok_or_else(|| anyhow!("sweep requires estimator.energies"))?;
        if en.is_empty() || en.windows(2).any(|w| w[0] >= w[1]) {
            bail!("estimator.energies must be nonempty and strictly increasing");
        }
    }
    match cfg.model.kind.as_str() {
        "op1" | "op2" | "op3" | "atoms" => {}
        other => bail!("model.kind must be op1 | op2 | op3 | atoms (got {other:?})"),
    }
    // model-shape errors surface through the library's validation when the
    // measure is built; do it now so bad configs fail before any computation
    driving_measure(cfg)?;
    Ok(())
}

fn potential(m: &ModelConfig) -> PotentialFn {
    let mut coeffs: Vec<TrigCoeff> = Vec::new();
    if let Some(c) = m.potential_mean {
        if c != 0.0 {
            coeffs.push(TrigCoeff {
                k: vec![0],
                cos: c,
                sin: 0.0,
            });
        }
    }
    if let Some(hs) = &m.harmonics {
        for &(k, cos, sin) in hs {
            coeffs.push(TrigCoeff {
                k: vec![k],
                cos,
                sin,
            });
        }
    }
    if coeffs.is_empty() {
        PotentialFn::Constant(m.potential_mean.unwrap_or(0.0))
    } else {
        PotentialFn::TrigPoly { dim: 1, coeffs }
    }
}

fn noise_component(m: &ModelConfig) -> Result<NoiseComponent> {
    match (&m.noise_atoms, &m.noise_uniform) {
        (Some(_), Some(_)) => bail!("model: give noise_atoms or noise_uniform, not both"),
        (Some(a), None) => Ok(NoiseComponent::Atoms(a.clone())),
        (None, Some((lo, hi))) => Ok(NoiseComponent::Uniform { lo: *lo, hi: *hi }),
        (None, None) => bail!("model.kind {:?} requires noise_atoms or noise_uniform", m.kind),
    }
}

fn freq_component(m: &ModelConfig) -> Result<FrequencyComponent> {
    match (&m.freq_atoms, &m.freq_uniform) {
        (Some(_), Some(_)) => bail!("model: give freq_atoms or freq_uniform, not both"),
        (Some(a), None) => Ok(FrequencyComponent::Atoms(
            a.iter()
                .map(|&(w, alpha)| (w, TorusPoint::circle(alpha)))
                .collect(),
        )),
        (None, Some((lo, hi))) => Ok(FrequencyComponent::UniformBox {
            lo: vec![*lo],
            hi: vec![*hi],
        }),
        (None, None) => bail!("model.kind {:?} requires freq_atoms or freq_uniform", m.kind),
    }
}

/// Schrödinger-family model, if the config describes one (kind != atoms).
pub fn schrodinger_model(cfg: &RunConfig) -> Result<Option<SchrodingerModel>> {
    let m = &cfg.model;
    let energy = m.energy.unwrap_or(0.0);
    let v = potential(m);
    let model = match m.kind.as_str() {
        "op1" => SchrodingerModel::Op1 {
            alpha: TorusPoint::circle(
                m.alpha
                    .ok_or_else(|| anyhow!("model.alpha is required for op1"))?,
            ),
            noise: noise_component(m)?,
            potential: v,
            energy,
        },
        "op2" => SchrodingerModel::Op2 {
            freq: freq_component(m)?,
            potential: v,
            energy,
        },
        "op3" => SchrodingerModel::Op3 {
            freq: freq_component(m)?,
            noise: noise_component(m)?,
            potential: v,
            energy,
        },
        _ => return Ok(None),
    };
    Ok(Some(model))
}

/// The driving measure for any model kind, including explicit atoms.
pub fn driving_measure(cfg: &RunConfig) -> Result<DrivingMeasure> {
    if let Some(model) = schrodinger_model(cfg)? {
        return Ok(model.driving_measure()?);
    }
    let atoms = cfg
        .model
        .atoms
        .as_ref()
        .ok_or_else(|| anyhow!("model.atoms is required for kind = \"atoms\""))?;
    let mut elems = Vec::with_capacity(atoms.len());
    for a in atoms {
        let dim = (a.matrix.len() as f64).sqrt().round() as usize;
        let m = Matrix::new(dim, a.matrix.clone())
            .map_err(|e| anyhow!("model.atoms matrix: {e}"))?;
        elems.push((
            a.weight,
            CocycleElement::new(TorusPoint::circle(a.alpha), MatrixFn::Constant(m)),
        ));
    }
    Ok(DrivingMeasure::finite_atoms(elems)?)
}

pub fn model_label(cfg: &RunConfig) -> String {
    cfg.model.kind.clone()
}
