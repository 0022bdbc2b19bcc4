//! Sampleable descriptions of the driving measure on the cocycle group,
//! the three Schrödinger families, and the finite-order ergodicity check.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::cocycle::{CocycleElement, MatrixFn, PotentialFn};
use crate::error::{Error, Result};
use crate::torus::TorusPoint;

const WEIGHT_TOL: f64 = 1e-12;

/// Law of the scalar noise entering P(omega).
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseComponent {
    /// (weight, omega) atoms, weights summing to 1.
    Atoms(Vec<(f64, f64)>),
    Uniform { lo: f64, hi: f64 },
}

impl NoiseComponent {
    pub fn delta(omega: f64) -> Self {
        NoiseComponent::Atoms(vec![(1.0, omega)])
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseComponent::Atoms(atoms) => validate_weights(atoms.iter().map(|a| a.0)),
            NoiseComponent::Uniform { lo, hi } => {
                if lo >= hi || !lo.is_finite() || !hi.is_finite() {
                    Err(Error::InvalidMeasure(format!("bad uniform interval [{lo}, {hi}]")))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            NoiseComponent::Atoms(atoms) => atoms[pick_atom(atoms.iter().map(|a| a.0), rng)].1,
            NoiseComponent::Uniform { lo, hi } => rng.random_range(*lo..*hi),
        }
    }

    /// Two distinct support points, when the law has more than one.
    pub fn two_support_points(&self) -> Option<(f64, f64)> {
        match self {
            NoiseComponent::Atoms(atoms) => {
                let first = atoms.first()?.1;
                atoms
                    .iter()
                    .map(|a| a.1)
                    .find(|&w| (w - first).abs() > 0.0)
                    .map(|second| (first, second))
            }
            NoiseComponent::Uniform { lo, hi } => Some((*lo, *hi)),
        }
    }
}

/// Law of the frequency component on the torus.
#[derive(Debug, Clone, PartialEq)]
pub enum FrequencyComponent {
    Atoms(Vec<(f64, TorusPoint)>),
    /// Uniform on a coordinate box inside the torus.
    UniformBox { lo: Vec<f64>, hi: Vec<f64> },
}

impl FrequencyComponent {
    pub fn delta(alpha: TorusPoint) -> Self {
        FrequencyComponent::Atoms(vec![(1.0, alpha)])
    }

    pub fn torus_dim(&self) -> usize {
        match self {
            FrequencyComponent::Atoms(atoms) => atoms.first().map(|a| a.1.dim()).unwrap_or(0),
            FrequencyComponent::UniformBox { lo, .. } => lo.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FrequencyComponent::Atoms(atoms) => {
                let d = self.torus_dim();
                if atoms.iter().any(|a| a.1.dim() != d) {
                    return Err(Error::InvalidMeasure("frequency atoms of mixed dimension".into()));
                }
                validate_weights(atoms.iter().map(|a| a.0))
            }
            FrequencyComponent::UniformBox { lo, hi } => {
                if lo.len() != hi.len() || lo.is_empty() {
                    return Err(Error::InvalidMeasure("bad frequency box".into()));
                }
                for (&a, &b) in lo.iter().zip(hi) {
                    if !(a < b) || !(0.0..1.0).contains(&a) || !(b <= 1.0) {
                        return Err(Error::InvalidMeasure(format!("bad box edge [{a}, {b}]")));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> TorusPoint {
        match self {
            FrequencyComponent::Atoms(atoms) => {
                atoms[pick_atom(atoms.iter().map(|a| a.0), rng)].1.clone()
            }
            FrequencyComponent::UniformBox { lo, hi } => {
                let coords: Vec<f64> = lo
                    .iter()
                    .zip(hi)
                    .map(|(&a, &b)| rng.random_range(a..b))
                    .collect();
                TorusPoint::new(&coords).expect("box coordinates are finite")
            }
        }
    }

    pub fn atoms(&self) -> Option<&[(f64, TorusPoint)]> {
        match self {
            FrequencyComponent::Atoms(a) => Some(a),
            FrequencyComponent::UniformBox { .. } => None,
        }
    }
}

/// Driving measure on the cocycle group: finitely many atoms, or a product
/// of a frequency law and a noise law over a Schrödinger template.
#[derive(Debug, Clone, PartialEq)]
pub enum DrivingMeasure {
    FiniteAtoms(Vec<(f64, CocycleElement)>),
    ProductForm {
        freq: FrequencyComponent,
        noise: NoiseComponent,
        potential: PotentialFn,
        energy: f64,
    },
}

/// nu = delta_alpha x integral of delta_{P(omega) S_E} d rho(omega):
/// fixed frequency, random additive noise.
pub fn nu_op1(
    alpha: TorusPoint,
    rho: NoiseComponent,
    v: PotentialFn,
    energy: f64,
) -> Result<DrivingMeasure> {
    let m = DrivingMeasure::ProductForm {
        freq: FrequencyComponent::delta(alpha),
        noise: rho,
        potential: v,
        energy,
    };
    m.validate()?;
    Ok(m)
}

/// nu = mu x delta_{S_E}: random frequency, fixed matrix part.
pub fn nu_op2(mu: FrequencyComponent, v: PotentialFn, energy: f64) -> Result<DrivingMeasure> {
    let m = DrivingMeasure::ProductForm {
        freq: mu,
        noise: NoiseComponent::delta(0.0),
        potential: v,
        energy,
    };
    m.validate()?;
    Ok(m)
}

/// nu = mu x integral of delta_{P(omega) S_E} d rho(omega): both random.
pub fn nu_op3(
    mu: FrequencyComponent,
    rho: NoiseComponent,
    v: PotentialFn,
    energy: f64,
) -> Result<DrivingMeasure> {
    let m = DrivingMeasure::ProductForm {
        freq: mu,
        noise: rho,
        potential: v,
        energy,
    };
    m.validate()?;
    Ok(m)
}

impl DrivingMeasure {
    pub fn finite_atoms(atoms: Vec<(f64, CocycleElement)>) -> Result<Self> {
        let m = DrivingMeasure::FiniteAtoms(atoms);
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DrivingMeasure::FiniteAtoms(atoms) => {
                if atoms.is_empty() {
                    return Err(Error::InvalidMeasure("no atoms".into()));
                }
                let (d, m) = (atoms[0].1.torus_dim(), atoms[0].1.matrix_dim());
                if atoms
                    .iter()
                    .any(|a| a.1.torus_dim() != d || a.1.matrix_dim() != m)
                {
                    return Err(Error::InvalidMeasure("atoms of mixed dimension".into()));
                }
                validate_weights(atoms.iter().map(|a| a.0))
            }
            DrivingMeasure::ProductForm { freq, noise, .. } => {
                freq.validate()?;
                noise.validate()
            }
        }
    }

    pub fn torus_dim(&self) -> usize {
        match self {
            DrivingMeasure::FiniteAtoms(atoms) => atoms[0].1.torus_dim(),
            DrivingMeasure::ProductForm { freq, .. } => freq.torus_dim(),
        }
    }

    pub fn matrix_dim(&self) -> usize {
        match self {
            DrivingMeasure::FiniteAtoms(atoms) => atoms[0].1.matrix_dim(),
            DrivingMeasure::ProductForm { .. } => 2,
        }
    }

    /// Draw one group element; a deterministic function of the rng state.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> CocycleElement {
        match self {
            DrivingMeasure::FiniteAtoms(atoms) => {
                atoms[pick_atom(atoms.iter().map(|a| a.0), rng)].1.clone()
            }
            DrivingMeasure::ProductForm {
                freq,
                noise,
                potential,
                energy,
            } => {
                let alpha = freq.sample(rng);
                let omega = noise.sample(rng);
                CocycleElement::new(
                    alpha,
                    MatrixFn::Schroedinger {
                        potential: potential.clone(),
                        energy: *energy,
                        noise: omega,
                    },
                )
            }
        }
    }

    /// Finite decomposition into weighted atoms, when one exists (product
    /// measures with an interval component have none).
    pub fn support_atoms(&self) -> Option<Vec<(f64, CocycleElement)>> {
        match self {
            DrivingMeasure::FiniteAtoms(atoms) => Some(atoms.clone()),
            DrivingMeasure::ProductForm {
                freq,
                noise,
                potential,
                energy,
            } => {
                let fa = freq.atoms()?;
                let na = match noise {
                    NoiseComponent::Atoms(a) => a,
                    NoiseComponent::Uniform { .. } => return None,
                };
                let mut out = Vec::with_capacity(fa.len() * na.len());
                for (wf, alpha) in fa {
                    for (wn, omega) in na {
                        out.push((
                            wf * wn,
                            CocycleElement::new(
                                alpha.clone(),
                                MatrixFn::Schroedinger {
                                    potential: potential.clone(),
                                    energy: *energy,
                                    noise: *omega,
                                },
                            ),
                        ));
                    }
                }
                Some(out)
            }
        }
    }

    /// Marginal law of the frequency (the translation part).
    pub fn frequency_component(&self) -> FrequencyComponent {
        match self {
            DrivingMeasure::FiniteAtoms(atoms) => FrequencyComponent::Atoms(
                atoms.iter().map(|(w, g)| (*w, g.freq.clone())).collect(),
            ),
            DrivingMeasure::ProductForm { freq, .. } => freq.clone(),
        }
    }

    /// Finite-order Diophantine check of the ergodicity condition: for every
    /// 0 < |k|_inf <= order there must be a support frequency with
    /// <k, alpha> farther than `tol` from the integers. A frequency law with
    /// an interval component passes outright (it contains irrationals).
    pub fn ergodicity_certificate(&self, order: i64, tol: f64) -> Result<ErgodicityReport> {
        let freq = self.frequency_component();
        let atoms = match &freq {
            FrequencyComponent::UniformBox { .. } => {
                return Ok(ErgodicityReport {
                    order,
                    tol,
                    failures: Vec::new(),
                    interval_support: true,
                });
            }
            FrequencyComponent::Atoms(a) => a,
        };
        let d = freq.torus_dim();
        let mut failures = Vec::new();
        let mut k = vec![-order; d];
        loop {
            if k.iter().any(|&ki| ki != 0) {
                let ok = atoms.iter().any(|(_, alpha)| {
                    let dot: f64 = k
                        .iter()
                        .zip(alpha.coords())
                        .map(|(&ki, &x)| ki as f64 * x)
                        .sum();
                    let frac = (dot - dot.round()).abs();
                    frac > tol
                });
                if !ok {
                    failures.push(k.clone());
                }
            }
            // odometer over the box [-order, order]^d
            let mut carry = true;
            for ki in k.iter_mut() {
                if *ki < order {
                    *ki += 1;
                    carry = false;
                    break;
                }
                *ki = -order;
            }
            if carry {
                break;
            }
        }
        Ok(ErgodicityReport {
            order,
            tol,
            failures,
            interval_support: false,
        })
    }
}

/// Result of the finite-order ergodicity check.
#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicityReport {
    pub order: i64,
    pub tol: f64,
    /// Frequency vectors k with <k, alpha> within `tol` of the integers for
    /// every support frequency.
    pub failures: Vec<Vec<i64>>,
    pub interval_support: bool,
}

impl ErgodicityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn validate_weights(weights: impl Iterator<Item = f64>) -> Result<()> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for w in weights {
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::InvalidMeasure(format!("nonpositive weight {w}")));
        }
        sum += w;
        count += 1;
    }
    if count == 0 {
        return Err(Error::InvalidMeasure("no atoms".into()));
    }
    if (sum - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::InvalidMeasure(format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}

fn pick_atom(weights: impl Iterator<Item = f64>, rng: &mut ChaCha8Rng) -> usize {
    let ws: Vec<f64> = weights.collect();
    let u: f64 = rng.random_range(0.0..1.0);
    let mut acc = 0.0;
    for (i, w) in ws.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    ws.len() - 1
}

pub const GOLDEN_MEAN: f64 = 0.618033988749894848;
