//! Python bindings: driving-measure constructors, Lyapunov estimation, the
//! Furstenberg functional, stationary-measure summaries and the positivity
//! certificates.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use cocycle_lab as core;
use cocycle_lab::{
    DrivingMeasure, FrequencyComponent, NoiseComponent, PotentialFn, SchrodingerModel, TorusPoint,
    TrigCoeff,
};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn potential(harmonics: Vec<(i64, f64, f64)>, mean: f64) -> PotentialFn {
    let mut coeffs: Vec<TrigCoeff> = Vec::new();
    if mean != 0.0 {
        coeffs.push(TrigCoeff {
            k: vec![0],
            cos: mean,
            sin: 0.0,
        });
    }
    for (k, cos, sin) in harmonics {
        coeffs.push(TrigCoeff {
            k: vec![k],
            cos,
            sin,
        });
    }
    if coeffs.is_empty() {
        PotentialFn::Constant(mean)
    } else {
        PotentialFn::TrigPoly { dim: 1, coeffs }
    }
}

fn freq_atoms(atoms: Vec<(f64, f64)>) -> FrequencyComponent {
    FrequencyComponent::Atoms(
        atoms
            .into_iter()
            .map(|(w, a)| (w, TorusPoint::circle(a)))
            .collect(),
    )
}

/// A Lyapunov estimate: value in nats per step with its standard error.
#[pyclass(frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct Estimate {
    value: f64,
    stderr: f64,
    n_steps: u64,
    n_samples: u64,
    seed: u64,
}

impl From<core::LyapunovEstimate> for Estimate {
    fn from(e: core::LyapunovEstimate) -> Self {
        Estimate {
            value: e.value,
            stderr: e.stderr,
            n_steps: e.n_steps,
            n_samples: e.n_samples,
            seed: e.seed,
        }
    }
}

#[pymethods]
impl Estimate {
    fn __repr__(&self) -> String {
        format!(
            "Estimate(value={}, stderr={}, n_steps={}, n_samples={}, seed={})",
            self.value, self.stderr, self.n_steps, self.n_samples, self.seed
        )
    }
}

/// A driving measure on the cocycle group, with estimation methods.
#[pyclass]
struct Measure {
    nu: DrivingMeasure,
    model: Option<SchrodingerModel>,
}

#[pymethods]
impl Measure {
    /// Fixed frequency alpha, random additive noise atoms [(weight, omega)].
    #[staticmethod]
    #[pyo3(signature = (alpha, noise_atoms, harmonics, energy, mean=0.0))]
    fn op1(
        alpha: f64,
        noise_atoms: Vec<(f64, f64)>,
        harmonics: Vec<(i64, f64, f64)>,
        energy: f64,
        mean: f64,
    ) -> PyResult<Self> {
        let model = SchrodingerModel::Op1 {
            alpha: TorusPoint::circle(alpha),
            noise: NoiseComponent::Atoms(noise_atoms),
            potential: potential(harmonics, mean),
            energy,
        };
        Ok(Measure {
            nu: model.driving_measure().map_err(err)?,
            model: Some(model),
        })
    }

    /// Random frequency atoms [(weight, alpha)], fixed matrix part.
    #[staticmethod]
    #[pyo3(signature = (freq_atoms_, harmonics, energy, mean=0.0))]
    fn op2(
        freq_atoms_: Vec<(f64, f64)>,
        harmonics: Vec<(i64, f64, f64)>,
        energy: f64,
        mean: f64,
    ) -> PyResult<Self> {
        let model = SchrodingerModel::Op2 {
            freq: freq_atoms(freq_atoms_),
            potential: potential(harmonics, mean),
            energy,
        };
        Ok(Measure {
            nu: model.driving_measure().map_err(err)?,
            model: Some(model),
        })
    }

    /// Random frequency and random noise.
    #[staticmethod]
    #[pyo3(signature = (freq_atoms_, noise_atoms, harmonics, energy, mean=0.0))]
    fn op3(
        freq_atoms_: Vec<(f64, f64)>,
        noise_atoms: Vec<(f64, f64)>,
        harmonics: Vec<(i64, f64, f64)>,
        energy: f64,
        mean: f64,
    ) -> PyResult<Self> {
        let model = SchrodingerModel::Op3 {
            freq: freq_atoms(freq_atoms_),
            noise: NoiseComponent::Atoms(noise_atoms),
            potential: potential(harmonics, mean),
            energy,
        };
        Ok(Measure {
            nu: model.driving_measure().map_err(err)?,
            model: Some(model),
        })
    }

    /// Finitely many explicit atoms (weight, alpha, row-major square matrix).
    #[staticmethod]
    fn from_atoms(atoms: Vec<(f64, f64, Vec<f64>)>) -> PyResult<Self> {
        let mut elems = Vec::with_capacity(atoms.len());
        for (w, alpha, entries) in atoms {
            let dim = (entries.len() as f64).sqrt().round() as usize;
            let m = core::Matrix::new(dim, entries).map_err(err)?;
            elems.push((
                w,
                core::CocycleElement::new(
                    TorusPoint::circle(alpha),
                    core::MatrixFn::Constant(m),
                ),
            ));
        }
        Ok(Measure {
            nu: DrivingMeasure::finite_atoms(elems).map_err(err)?,
            model: None,
        })
    }

    /// Top Lyapunov exponent by Monte-Carlo over renormalized products.
    #[pyo3(signature = (n, n_samples, seed, theta0=0.0))]
    fn estimate_l1(&self, n: u64, n_samples: u64, seed: u64, theta0: f64) -> PyResult<Estimate> {
        core::estimate_l1(&self.nu, &TorusPoint::circle(theta0), n, n_samples, seed)
            .map(Into::into)
            .map_err(err)
    }

    /// First k exponents from a k-frame iteration.
    #[pyo3(signature = (n, n_samples, k, seed, theta0=0.0))]
    fn spectrum(
        &self,
        n: u64,
        n_samples: u64,
        k: usize,
        seed: u64,
        theta0: f64,
    ) -> PyResult<Vec<Estimate>> {
        core::estimate_spectrum(&self.nu, &TorusPoint::circle(theta0), n, n_samples, k, seed)
            .map(|v| v.into_iter().map(Into::into).collect())
            .map_err(err)
    }

    /// Furstenberg functional along the projective Markov chain.
    #[pyo3(signature = (burn_in, n_mc, seed, theta0=0.0, angle0=0.3))]
    fn furstenberg_functional(
        &self,
        burn_in: u64,
        n_mc: u64,
        seed: u64,
        theta0: f64,
        angle0: f64,
    ) -> PyResult<Estimate> {
        let start = core::ProjChainState::new(
            TorusPoint::circle(theta0),
            core::ProjPoint::from_angle(angle0),
        );
        core::furstenberg_functional_chain(&self.nu, &start, burn_in, n_mc, seed)
            .map(Into::into)
            .map_err(err)
    }

    /// (theta-marginal TV from uniform, stationarity residual) of the
    /// empirical stationary measure.
    #[pyo3(signature = (burn_in, n_keep, theta_bins, angle_bins, seed))]
    fn stationary_summary(
        &self,
        burn_in: u64,
        n_keep: u64,
        theta_bins: usize,
        angle_bins: usize,
        seed: u64,
    ) -> PyResult<(f64, f64)> {
        let start = core::ProjChainState::new(
            TorusPoint::circle(0.0),
            core::ProjPoint::from_angle(0.3),
        );
        let hist = core::empirical_stationary(
            &self.nu, &start, burn_in, n_keep, theta_bins, angle_bins, seed,
        )
        .map_err(err)?;
        let residual = core::stationarity_residual(&self.nu, &hist, n_keep, seed).map_err(err)?;
        Ok((hist.tv_theta_uniform(), residual))
    }

    /// Positivity-criterion certificate; returns a dict with the hypothesis
    /// flags and the verdict string.
    #[pyo3(signature = (order=10, tol=1e-6))]
    fn positivity_report<'py>(
        &self,
        py: Python<'py>,
        order: i64,
        tol: f64,
    ) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
        let model = self
            .model
            .as_ref()
            .ok_or_else(|| PyValueError::new_err("certificates need an op1/op2/op3 model"))?;
        let report = core::positivity_hypotheses_report(model, order, tol).map_err(err)?;
        use pyo3::types::PyDict;
        let d = PyDict::new(py);
        d.set_item("ergodicity", report.ergodicity.passed())?;
        d.set_item("noncompact", report.noncompact)?;
        d.set_item("noncompact_witness_trace", report.noncompact_witness_trace)?;
        d.set_item("strong_irreducibility", report.strong_irreducibility)?;
        d.set_item("irreducibility_witness", report.irreducibility_witness)?;
        d.set_item(
            "verdict",
            match report.verdict {
                core::Verdict::PositivityPredicted => "positivity-predicted",
                core::Verdict::Inconclusive => "inconclusive",
            },
        )?;
        Ok(d)
    }

    /// Top exponent across a strictly increasing energy grid.
    #[pyo3(signature = (energies, n, n_samples, seed))]
    fn sweep(
        &self,
        energies: Vec<f64>,
        n: u64,
        n_samples: u64,
        seed: u64,
    ) -> PyResult<Vec<(f64, Estimate)>> {
        let model = self
            .model
            .as_ref()
            .ok_or_else(|| PyValueError::new_err("sweeps need an op1/op2/op3 model"))?;
        let curve = core::sweep_energy(model, &energies, n, n_samples, seed).map_err(err)?;
        Ok(curve
            .rows
            .into_iter()
            .map(|(e, est)| (e, est.into()))
            .collect())
    }
}

/// Exponent of the zero-potential, zero-noise transfer cocycle at energy E.
#[pyfunction]
fn free_laplacian_reference(energy: f64) -> f64 {
    core::free_laplacian_reference(energy)
}

#[pyfunction]
fn golden_mean() -> f64 {
    core::GOLDEN_MEAN
}

#[pymodule]
fn cocycle_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Measure>()?;
    m.add_class::<Estimate>()?;
    m.add_function(wrap_pyfunction!(free_laplacian_reference, m)?)?;
    m.add_function(wrap_pyfunction!(golden_mean, m)?)?;
    Ok(())
}
