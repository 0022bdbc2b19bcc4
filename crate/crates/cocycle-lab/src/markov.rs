//! The projective Markov chain on T^d x P(R^m), empirical stationary
//! measures, the Furstenberg functional, the torus Markov operator and the
//! almost-invariance diagnostic.
//!
//! Histograms are offered for d = 1, m = 2 only (angle chart on the
//! projective line); higher dimensions go through live-chain averaging.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{proj_act, ProjPoint};
use crate::lyapunov::LyapunovEstimate;
use crate::measure::{DrivingMeasure, FrequencyComponent};
use crate::rng::{self, TAG_ALMOST_INV, TAG_CHAIN, TAG_FUNCTIONAL, TAG_RESIDUAL};
use crate::torus::TorusPoint;

use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct ProjChainState {
    pub theta: TorusPoint,
    pub point: ProjPoint,
}

impl ProjChainState {
    pub fn new(theta: TorusPoint, point: ProjPoint) -> Self {
        ProjChainState { theta, point }
    }
}

/// One transition: draw (alpha, A) ~ nu, move to (theta + alpha, A(theta) p).
pub fn chain_step(
    nu: &DrivingMeasure,
    state: &ProjChainState,
    rng: &mut ChaCha8Rng,
) -> Result<ProjChainState> {
    let g = nu.sample(rng);
    let m = g.evaluate(&state.theta)?;
    Ok(ProjChainState {
        theta: state.theta.translate(&g.freq)?,
        point: proj_act(&m, &state.point)?,
    })
}

/// Occupation histogram over theta bins x angle bins (circle x projective
/// line).
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    pub theta_bins: usize,
    pub angle_bins: usize,
    counts: Vec<u64>,
    total: u64,
    // the recorded states themselves (theta coordinate, projective angle);
    // kept so pushforwards can act on points instead of bin-uniformized
    // mass, which would wash out the fine angular structure
    samples: Vec<(f64, f64)>,
}

impl EmpiricalMeasure {
    pub fn new(theta_bins: usize, angle_bins: usize) -> Self {
        EmpiricalMeasure {
            theta_bins,
            angle_bins,
            counts: vec![0; theta_bins * angle_bins],
            total: 0,
            samples: Vec::new(),
        }
    }

    fn bin_of(&self, s: &ProjChainState) -> usize {
        let it = ((s.theta.coords()[0] * self.theta_bins as f64) as usize).min(self.theta_bins - 1);
        let ia = ((s.point.angle() / PI * self.angle_bins as f64) as usize).min(self.angle_bins - 1);
        it * self.angle_bins + ia
    }

    pub fn record(&mut self, s: &ProjChainState) {
        let b = self.bin_of(s);
        self.counts[b] += 1;
        self.total += 1;
        self.samples.push((s.theta.coords()[0], s.point.angle()));
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn mass(&self, theta_bin: usize, angle_bin: usize) -> f64 {
        self.counts[theta_bin * self.angle_bins + angle_bin] as f64 / self.total as f64
    }

    pub fn theta_marginal(&self) -> Vec<f64> {
        (0..self.theta_bins)
            .map(|it| {
                (0..self.angle_bins)
                    .map(|ia| self.counts[it * self.angle_bins + ia])
                    .sum::<u64>() as f64
                    / self.total as f64
            })
            .collect()
    }

    pub fn angle_marginal(&self) -> Vec<f64> {
        (0..self.angle_bins)
            .map(|ia| {
                (0..self.theta_bins)
                    .map(|it| self.counts[it * self.angle_bins + ia])
                    .sum::<u64>() as f64
                    / self.total as f64
            })
            .collect()
    }

    /// Total-variation distance of the theta marginal from uniform.
    pub fn tv_theta_uniform(&self) -> f64 {
        let u = 1.0 / self.theta_bins as f64;
        0.5 * self
            .theta_marginal()
            .iter()
            .map(|p| (p - u).abs())
            .sum::<f64>()
    }

    pub fn tv_angle_uniform(&self) -> f64 {
        let u = 1.0 / self.angle_bins as f64;
        0.5 * self
            .angle_marginal()
            .iter()
            .map(|p| (p - u).abs())
            .sum::<f64>()
    }

    /// Joint total-variation distance to another histogram on the same bins.
    pub fn tv(&self, other: &EmpiricalMeasure) -> f64 {
        debug_assert_eq!(self.counts.len(), other.counts.len());
        0.5 * self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(&a, &b)| (a as f64 / self.total as f64 - b as f64 / other.total as f64).abs())
            .sum::<f64>()
    }
}

/// Long-run occupation measure of the projective chain after burn-in.
pub fn empirical_stationary(
    nu: &DrivingMeasure,
    start: &ProjChainState,
    burn_in: u64,
    n_keep: u64,
    theta_bins: usize,
    angle_bins: usize,
    seed: u64,
) -> Result<EmpiricalMeasure> {
    if nu.torus_dim() != 1 || nu.matrix_dim() != 2 {
        return Err(Error::Unsupported(
            "stationary histograms need torus dimension 1 and matrix dimension 2".into(),
        ));
    }
    if n_keep < 1 || theta_bins < 1 || angle_bins < 1 {
        return Err(Error::InvalidParameter("empty histogram request".into()));
    }
    let mut rng = rng::rng_at(seed, &[TAG_CHAIN]);
    let mut state = start.clone();
    for _ in 0..burn_in {
        state = chain_step(nu, &state, &mut rng)?;
    }
    let mut hist = EmpiricalMeasure::new(theta_bins, angle_bins);
    for _ in 0..n_keep {
        state = chain_step(nu, &state, &mut rng)?;
        hist.record(&state);
    }
    Ok(hist)
}

/// TV distance between the histogram and its one-step pushforward under the
/// chain, acting on the recorded points themselves. Finite-support measures
/// are pushed exactly (every atom, with its weight); otherwise one element
/// is drawn per point, with at most `n_mc` points used.
pub fn stationarity_residual(
    nu: &DrivingMeasure,
    hist: &EmpiricalMeasure,
    n_mc: u64,
    seed: u64,
) -> Result<f64> {
    if hist.samples.is_empty() {
        return Err(Error::InvalidParameter("empty histogram".into()));
    }
    let mut pushed = vec![0.0f64; hist.counts.len()];
    let atoms = nu.support_atoms();
    let mut rng = rng::rng_at(seed, &[TAG_RESIDUAL]);
    let take = if atoms.is_some() {
        hist.samples.len()
    } else {
        hist.samples.len().min(n_mc.max(1) as usize)
    };
    let mass = 1.0 / take as f64;
    for &(theta, angle) in hist.samples.iter().take(take) {
        let state = ProjChainState::new(TorusPoint::circle(theta), ProjPoint::from_angle(angle));
        match &atoms {
            Some(atoms) => {
                for (w, g) in atoms {
                    let m = g.evaluate(&state.theta)?;
                    let next = ProjChainState {
                        theta: state.theta.translate(&g.freq)?,
                        point: proj_act(&m, &state.point)?,
                    };
                    pushed[hist.bin_of(&next)] += w * mass;
                }
            }
            None => {
                let next = chain_step(nu, &state, &mut rng)?;
                pushed[hist.bin_of(&next)] += mass;
            }
        }
    }
    let total = hist.total as f64;
    Ok(0.5
        * hist
            .counts
            .iter()
            .zip(&pushed)
            .map(|(&c, q)| (c as f64 / total - q).abs())
            .sum::<f64>())
}

/// Monte-Carlo average of log|A(theta) p| with (alpha, A) ~ nu independent
/// of (theta, p) ~ stationary chain. The standard error uses batch means to
/// absorb chain autocorrelation.
pub fn furstenberg_functional_chain(
    nu: &DrivingMeasure,
    start: &ProjChainState,
    burn_in: u64,
    n_mc: u64,
    seed: u64,
) -> Result<LyapunovEstimate> {
    if n_mc < 1 {
        return Err(Error::InvalidParameter("n_mc must be >= 1".into()));
    }
    let mut chain_rng = rng::rng_at(seed, &[TAG_FUNCTIONAL, 0]);
    let mut draw_rng = rng::rng_at(seed, &[TAG_FUNCTIONAL, 1]);
    let mut state = start.clone();
    for _ in 0..burn_in {
        state = chain_step(nu, &state, &mut chain_rng)?;
    }
    let n_batches = 100u64.min(n_mc);
    let per_batch = n_mc / n_batches;
    let mut batch_means = Vec::with_capacity(n_batches as usize);
    let mut grand = 0.0;
    let mut used = 0u64;
    for _ in 0..n_batches {
        let mut acc = 0.0;
        for _ in 0..per_batch {
            let g = nu.sample(&mut draw_rng);
            let m = g.evaluate(&state.theta)?;
            let image = m.mul_vec(state.point.representative());
            let norm = image.iter().map(|x| x * x).sum::<f64>().sqrt();
            acc += norm.ln();
            state = chain_step(nu, &state, &mut chain_rng)?;
        }
        batch_means.push(acc / per_batch as f64);
        grand += acc;
        used += per_batch;
    }
    let mean = grand / used as f64;
    let stderr = if batch_means.len() > 1 {
        let bvar = batch_means
            .iter()
            .map(|b| (b - mean) * (b - mean))
            .sum::<f64>()
            / (batch_means.len() as f64 - 1.0);
        (bvar / batch_means.len() as f64).sqrt()
    } else {
        0.0
    };
    Ok(LyapunovEstimate {
        value: mean,
        stderr,
        n_steps: 1,
        n_samples: used,
        seed,
    })
}

/// Same functional, averaged against a frozen empirical measure instead of a
/// live chain.
pub fn furstenberg_functional_hist(
    nu: &DrivingMeasure,
    hist: &EmpiricalMeasure,
    n_mc: u64,
    seed: u64,
) -> Result<LyapunovEstimate> {
    if n_mc < 1 {
        return Err(Error::InvalidParameter("n_mc must be >= 1".into()));
    }
    use rand::Rng;
    let mut rng = rng::rng_at(seed, &[TAG_FUNCTIONAL, 2]);
    let mut samples = Vec::with_capacity(n_mc as usize);
    for _ in 0..n_mc {
        let u: f64 = rng.random_range(0.0..1.0);
        let target = (u * hist.total() as f64) as u64;
        let mut acc = 0u64;
        let mut bin = hist.counts.len() - 1;
        for (i, &c) in hist.counts.iter().enumerate() {
            acc += c;
            if target < acc {
                bin = i;
                break;
            }
        }
        let it = bin / hist.angle_bins;
        let ia = bin % hist.angle_bins;
        let theta = TorusPoint::circle(
            (it as f64 + rng.random_range(0.0..1.0)) / hist.theta_bins as f64,
        );
        let angle = (ia as f64 + rng.random_range(0.0..1.0)) / hist.angle_bins as f64 * PI;
        let p = ProjPoint::from_angle(angle);
        let g = nu.sample(&mut rng);
        let m = g.evaluate(&theta)?;
        let image = m.mul_vec(p.representative());
        samples.push(image.iter().map(|x| x * x).sum::<f64>().sqrt().ln());
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok(LyapunovEstimate {
        value: mean,
        stderr: (var / n).sqrt(),
        n_steps: 1,
        n_samples: n_mc,
        seed,
    })
}

/// Function on the regular circle grid {i/n}.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("grid function needs finite values".into()));
        }
        Ok(GridFunction { values })
    }

    /// Periodic linear interpolation at x in [0, 1).
    pub fn interp(&self, x: f64) -> f64 {
        let n = self.values.len();
        let pos = (x - x.floor()) * n as f64;
        let i0 = (pos as usize).min(n - 1);
        let frac = pos - i0 as f64;
        let i1 = (i0 + 1) % n;
        (1.0 - frac) * self.values[i0] + frac * self.values[i1]
    }
}

/// Markov operator of the frequency marginal: averaging over a random
/// translation, (Q_mu f)(theta) = integral of f(theta + alpha) d mu(alpha).
pub fn markov_op_apply(mu: &FrequencyComponent, f: &GridFunction) -> Result<GridFunction> {
    if mu.torus_dim() != 1 {
        return Err(Error::Unsupported("grid Markov operator needs torus dimension 1".into()));
    }
    let n = f.values.len();
    let out: Vec<f64> = match mu {
        FrequencyComponent::Atoms(atoms) => (0..n)
            .map(|i| {
                let theta = i as f64 / n as f64;
                atoms
                    .iter()
                    .map(|(w, alpha)| w * f.interp(theta + alpha.coords()[0]))
                    .sum()
            })
            .collect(),
        FrequencyComponent::UniformBox { lo, hi } => {
            let (a, b) = (lo[0], hi[0]);
            let quad = (4 * n).max(256);
            (0..n)
                .map(|i| {
                    let theta = i as f64 / n as f64;
                    // composite trapezoid over the shift interval
                    let h = (b - a) / quad as f64;
                    let mut s = 0.5 * (f.interp(theta + a) + f.interp(theta + b));
                    for j in 1..quad {
                        s += f.interp(theta + a + j as f64 * h);
                    }
                    s * h / (b - a)
                })
                .collect()
        }
    };
    GridFunction::new(out)
}

/// Rows of the almost-invariance diagnostic: the sup over the grid of
/// |L_n - Q_mu L_n|, and n times that gap (bounded when the C/n bound
/// holds).
#[derive(Debug, Clone, PartialEq)]
pub struct AlmostInvarianceRow {
    pub n: u64,
    pub sup_gap: f64,
    pub n_times_sup: f64,
}

/// Coupled estimator of L_n - Q_mu L_n on the grid. One (n+1)-step path
/// started at theta gives both terms: the length-n prefix estimates
/// n L_n(theta), and dropping the first step leaves a length-n word started
/// at theta + alpha with alpha ~ mu, so (S_{n+1} - s_1) estimates
/// n (Q_mu L_n)(theta). Their difference s_1 - (S_{n+1} - S_n) is bounded by
/// the one-step stretch, so the n-scaled gap keeps O(1) sampling noise at
/// every n instead of the sqrt(n) growth of independent per-theta estimates.
pub fn almost_invariance_check(
    nu: &DrivingMeasure,
    grid_size: usize,
    n_list: &[u64],
    n_samples: u64,
    seed: u64,
) -> Result<Vec<AlmostInvarianceRow>> {
    if n_list.is_empty() || n_list.contains(&0) || n_samples < 1 || grid_size < 1 {
        return Err(Error::InvalidParameter("empty almost-invariance request".into()));
    }
    let grid = crate::torus::circle_grid(grid_size);
    let m = nu.matrix_dim();
    n_list
        .par_iter()
        .enumerate()
        .map(|(idx, &n)| {
            let gaps: Vec<f64> = grid
                .par_iter()
                .enumerate()
                .map(|(ti, theta)| {
                    let mut acc = 0.0;
                    for i in 0..n_samples {
                        let mut r =
                            rng::rng_at(seed, &[TAG_ALMOST_INV, idx as u64, ti as u64, i]);
                        let mut state = crate::linalg::ProductState::new(m, 1)?;
                        let mut freq_sum = TorusPoint::zero(theta.dim());
                        let mut s1 = 0.0;
                        let mut sn = 0.0;
                        for step in 0..=n {
                            let g = nu.sample(&mut r);
                            let th = theta.translate(&freq_sum)?;
                            state.renorm_step(&g.evaluate(&th)?)?;
                            freq_sum = freq_sum.translate(&g.freq)?;
                            if step == 0 {
                                s1 = state.log_scales()[0];
                            }
                            if step + 1 == n {
                                sn = state.log_scales()[0];
                            }
                        }
                        let sn1 = state.log_scales()[0];
                        acc += (sn - (sn1 - s1)) / n as f64;
                    }
                    Ok(acc / n_samples as f64)
                })
                .collect::<Result<_>>()?;
            let sup_gap = gaps.iter().map(|g| g.abs()).fold(0.0f64, f64::max);
            Ok(AlmostInvarianceRow {
                n,
                sup_gap,
                n_times_sup: n as f64 * sup_gap,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{CocycleElement, MatrixFn};
    use crate::linalg::Matrix;
    use crate::measure::GOLDEN_MEAN;

    fn delta_measure(alpha: f64, m: Matrix) -> DrivingMeasure {
        DrivingMeasure::finite_atoms(vec![(
            1.0,
            CocycleElement::new(TorusPoint::circle(alpha), MatrixFn::Constant(m)),
        )])
        .unwrap()
    }

    fn start() -> ProjChainState {
        ProjChainState::new(TorusPoint::circle(0.0), ProjPoint::basis(2, 0))
    }

    #[test]
    fn chain_step_identity_fixes_state() {
        let nu = delta_measure(0.0, Matrix::identity(2));
        let mut r = rng::rng_at(0, &[0]);
        let s = chain_step(&nu, &start(), &mut r).unwrap();
        assert_eq!(s, start());
    }

    #[test]
    fn chain_step_half_rotation_alternates() {
        let nu = delta_measure(0.5, Matrix::identity(2));
        let mut r = rng::rng_at(0, &[0]);
        let s1 = chain_step(&nu, &start(), &mut r).unwrap();
        assert_eq!(s1.theta.coords()[0], 0.5);
        let s2 = chain_step(&nu, &s1, &mut r).unwrap();
        assert_eq!(s2.theta.coords()[0], 0.0);
        assert_eq!(s2.point, start().point);
    }

    #[test]
    fn chain_step_rotation_advances_angle() {
        let psi = 0.3;
        let nu = delta_measure(0.0, Matrix::rotation(psi));
        let mut r = rng::rng_at(0, &[0]);
        let mut s = start();
        for k in 1..=5 {
            s = chain_step(&nu, &s, &mut r).unwrap();
            let expected = ProjPoint::from_angle((k as f64 * psi) % PI);
            assert!(crate::linalg::proj_dist(&s.point, &expected) < 1e-12);
        }
    }

    #[test]
    fn irrational_rotation_theta_marginal_uniform() {
        let nu = delta_measure(GOLDEN_MEAN, Matrix::identity(2));
        let hist = empirical_stationary(&nu, &start(), 100, 200_000, 100, 4, 3).unwrap();
        assert!(hist.tv_theta_uniform() < 0.05);
        // p never moves: its marginal is a point mass
        let am = hist.angle_marginal();
        assert!(am.iter().cloned().fold(0.0, f64::max) > 0.999);
    }

    #[test]
    fn projective_irrational_rotation_angle_uniform() {
        let nu = delta_measure(0.0, Matrix::rotation(PI * GOLDEN_MEAN));
        let hist = empirical_stationary(&nu, &start(), 100, 200_000, 4, 100, 5).unwrap();
        assert!(hist.tv_angle_uniform() < 0.05);
    }

    #[test]
    fn parabolic_mass_concentrates_on_fixed_line() {
        let nu = delta_measure(0.0, Matrix::from_rows_2x2(1.0, 1.0, 0.0, 1.0).unwrap());
        let s0 = ProjChainState::new(TorusPoint::circle(0.0), ProjPoint::from_angle(1.0));
        let hist = empirical_stationary(&nu, &s0, 1000, 100_000, 2, 200, 7).unwrap();
        // e_1 is angle 0; angular window of width 0.1 around it
        let am = hist.angle_marginal();
        let cut = (0.1 / PI * 200.0).ceil() as usize;
        let near: f64 = am[..cut].iter().sum::<f64>() + am[200 - cut..].iter().sum::<f64>();
        assert!(near >= 0.9, "mass near fixed line: {near}");
    }

    #[test]
    fn residual_of_exact_invariant_point_mass() {
        let nu = delta_measure(0.0, Matrix::identity(2));
        let mut hist = EmpiricalMeasure::new(10, 10);
        // all mass in one bin; identity dynamics pushes it nowhere
        for _ in 0..1000 {
            hist.record(&start());
        }
        let r = stationarity_residual(&nu, &hist, 20_000, 3).unwrap();
        assert!(r < 1e-12, "residual {r}");
    }

    #[test]
    fn residual_uniform_under_rotation_is_small() {
        let nu = delta_measure(GOLDEN_MEAN, Matrix::identity(2));
        let hist = empirical_stationary(&nu, &start(), 100, 500_000, 50, 2, 3).unwrap();
        let r = stationarity_residual(&nu, &hist, 500_000, 9).unwrap();
        assert!(r < 0.05, "residual {r}");
    }

    #[test]
    fn functional_identity_measure_is_zero() {
        let nu = delta_measure(GOLDEN_MEAN, Matrix::identity(2));
        let est = furstenberg_functional_chain(&nu, &start(), 10, 10_000, 3).unwrap();
        assert!(est.value.abs() < 1e-14);
    }

    #[test]
    fn functional_point_mass_at_expanding_axis() {
        let nu = delta_measure(0.0, Matrix::diagonal(&[2.0, 0.5]).unwrap());
        // chain started at e_1 stays at e_1
        let est = furstenberg_functional_chain(&nu, &start(), 10, 5_000, 3).unwrap();
        assert!((est.value - 2.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn markov_op_preserves_constants_and_delta_zero() {
        let f = GridFunction::new(vec![3.5; 64]).unwrap();
        let mu = FrequencyComponent::Atoms(vec![(1.0, TorusPoint::circle(GOLDEN_MEAN))]);
        let qf = markov_op_apply(&mu, &f).unwrap();
        for v in &qf.values {
            assert!((v - 3.5).abs() < 1e-12);
        }

        let g = GridFunction::new((0..64).map(|i| (i as f64).sin()).collect()).unwrap();
        let d0 = FrequencyComponent::Atoms(vec![(1.0, TorusPoint::circle(0.0))]);
        assert_eq!(markov_op_apply(&d0, &g).unwrap(), g);
    }

    #[test]
    fn markov_op_half_shift_moves_bump() {
        let n = 64;
        let mut vals = vec![0.0; n];
        vals[0] = 1.0;
        let f = GridFunction::new(vals).unwrap();
        let mu = FrequencyComponent::Atoms(vec![(1.0, TorusPoint::circle(0.5))]);
        let qf = markov_op_apply(&mu, &f).unwrap();
        assert!((qf.values[n / 2] - 1.0).abs() < 1e-12);
        assert!(qf.values[0].abs() < 1e-12);
    }

    #[test]
    fn markov_op_is_monotone_and_nonexpansive() {
        let mu = FrequencyComponent::Atoms(vec![
            (0.5, TorusPoint::circle(0.125)),
            (0.5, TorusPoint::circle(GOLDEN_MEAN)),
        ]);
        let f = GridFunction::new((0..64).map(|i| (i as f64 * 0.3).sin()).collect()).unwrap();
        let g = GridFunction::new(f.values.iter().map(|v| v + 0.25).collect()).unwrap();
        let qf = markov_op_apply(&mu, &f).unwrap();
        let qg = markov_op_apply(&mu, &g).unwrap();
        for (a, b) in qf.values.iter().zip(&qg.values) {
            assert!(a <= b);
        }
        let sup_f = f.values.iter().cloned().fold(f64::MIN, f64::max);
        let sup_qf = qf.values.iter().cloned().fold(f64::MIN, f64::max);
        assert!(sup_qf <= sup_f + 1e-12);
    }

    #[test]
    fn almost_invariance_gap_vanishes_for_isometries() {
        let nu = delta_measure(GOLDEN_MEAN, Matrix::identity(2));
        let rows = almost_invariance_check(&nu, 16, &[10, 20], 2, 3).unwrap();
        for row in rows {
            assert!(row.sup_gap < 1e-12);
        }
    }

    #[test]
    fn chain_matches_iterate_plus_proj_act() {
        use crate::cocycle::{iterate, PotentialFn};
        use crate::measure::{nu_op1, NoiseComponent};
        let nu = nu_op1(
            TorusPoint::circle(GOLDEN_MEAN),
            NoiseComponent::Atoms(vec![(0.5, 0.0), (0.5, 1.0)]),
            PotentialFn::cosine(1, 2.0),
            0.4,
        )
        .unwrap();
        // replay the same element draws through both routes
        let mut r = rng::rng_at(5, &[0]);
        let symbols: Vec<_> = (0..20).map(|_| nu.sample(&mut r)).collect();
        let theta0 = TorusPoint::circle(0.3);
        let p0 = ProjPoint::from_angle(0.8);

        let mut state = ProjChainState::new(theta0.clone(), p0.clone());
        for g in &symbols {
            let m = g.evaluate(&state.theta).unwrap();
            state = ProjChainState {
                theta: state.theta.translate(&g.freq).unwrap(),
                point: proj_act(&m, &state.point).unwrap(),
            };
        }

        let (theta_n, prod) = iterate(&symbols, &theta0, 1).unwrap();
        // direct product applied to p0
        let mut v = p0.representative().to_vec();
        let mut freq_sum = TorusPoint::zero(1);
        for g in &symbols {
            let th = theta0.translate(&freq_sum).unwrap();
            v = g.evaluate(&th).unwrap().mul_vec(&v);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in v.iter_mut() {
                *x /= norm;
            }
            freq_sum = freq_sum.translate(&g.freq).unwrap();
        }
        let direct = ProjPoint::new(&v).unwrap();
        assert_eq!(theta_n, state.theta);
        assert!(crate::linalg::proj_dist(&state.point, &direct) < 1e-9);
        let _ = prod;
    }
}
