//! Numerical laboratory for mixed random-quasiperiodic SL(m, R) cocycles:
//! random products of quasiperiodic cocycles, Lyapunov spectrum estimation,
//! stationary measures on the projective bundle, the Furstenberg functional,
//! positivity certificates for the Schrödinger families, and uniform
//! convergence diagnostics.

pub mod cocycle;
pub mod criteria;
pub mod error;
pub mod linalg;
pub mod lyapunov;
pub mod markov;
pub mod measure;
pub mod model;
pub mod rng;
pub mod sweep;
pub mod torus;

pub use cocycle::{iterate, CocycleElement, MatrixFn, PotentialFn, TrigCoeff};
pub use criteria::{positivity_hypotheses_report, CriteriaReport, Verdict};
pub use error::{Error, Result};
pub use linalg::{proj_act, proj_dist, Matrix, ProductState, ProjPoint};
pub use lyapunov::{
    deviation_prob, directional_ln, estimate_l1, estimate_l1_samples, estimate_spectrum,
    finite_scale_ln, uniform_convergence_report, ConvergenceTable, DeviationProb,
    LyapunovEstimate,
};
pub use markov::{
    almost_invariance_check, chain_step, empirical_stationary, furstenberg_functional_chain,
    furstenberg_functional_hist, markov_op_apply, stationarity_residual, AlmostInvarianceRow,
    EmpiricalMeasure, GridFunction, ProjChainState,
};
pub use measure::{
    nu_op1, nu_op2, nu_op3, DrivingMeasure, ErgodicityReport, FrequencyComponent, NoiseComponent,
    GOLDEN_MEAN,
};
pub use model::SchrodingerModel;
pub use sweep::{
    continuity_modulus, free_laplacian_reference, sweep_energy, ContinuityReport, EnergyCurve,
};
pub use torus::{circle_grid, TorusPoint};
