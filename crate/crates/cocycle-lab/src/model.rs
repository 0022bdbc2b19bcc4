//! The three Schrödinger model families, parametrized by frequency law,
//! noise law, potential and energy.

use crate::cocycle::PotentialFn;
use crate::error::Result;
use crate::measure::{nu_op1, nu_op2, nu_op3, DrivingMeasure, FrequencyComponent, NoiseComponent};
use crate::torus::TorusPoint;

#[derive(Debug, Clone, PartialEq)]
pub enum SchrodingerModel {
    /// Fixed frequency, random additive noise.
    Op1 {
        alpha: TorusPoint,
        noise: NoiseComponent,
        potential: PotentialFn,
        energy: f64,
    },
    /// Random frequency, fixed matrix part.
    Op2 {
        freq: FrequencyComponent,
        potential: PotentialFn,
        energy: f64,
    },
    /// Random frequency and random noise.
    Op3 {
        freq: FrequencyComponent,
        noise: NoiseComponent,
        potential: PotentialFn,
        energy: f64,
    },
}

impl SchrodingerModel {
    pub fn driving_measure(&self) -> Result<DrivingMeasure> {
        match self {
            SchrodingerModel::Op1 {
                alpha,
                noise,
                potential,
                energy,
            } => nu_op1(alpha.clone(), noise.clone(), potential.clone(), *energy),
            SchrodingerModel::Op2 {
                freq,
                potential,
                energy,
            } => nu_op2(freq.clone(), potential.clone(), *energy),
            SchrodingerModel::Op3 {
                freq,
                noise,
                potential,
                energy,
            } => nu_op3(freq.clone(), noise.clone(), potential.clone(), *energy),
        }
    }

    pub fn energy(&self) -> f64 {
        match self {
            SchrodingerModel::Op1 { energy, .. }
            | SchrodingerModel::Op2 { energy, .. }
            | SchrodingerModel::Op3 { energy, .. } => *energy,
        }
    }

    pub fn with_energy(&self, e: f64) -> SchrodingerModel {
        let mut m = self.clone();
        match &mut m {
            SchrodingerModel::Op1 { energy, .. }
            | SchrodingerModel::Op2 { energy, .. }
            | SchrodingerModel::Op3 { energy, .. } => *energy = e,
        }
        m
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SchrodingerModel::Op1 { .. } => "op1",
            SchrodingerModel::Op2 { .. } => "op2",
            SchrodingerModel::Op3 { .. } => "op3",
        }
    }
}
