//! Monte-Carlo estimators for the Lyapunov spectrum, finite-scale exponents
//! on a torus grid, directional exponents, and deviation probabilities.
//!
//! Every sample path owns a generator derived from (master seed, tag,
//! indices), so estimates do not depend on how the work is spread over
//! threads.

use rayon::prelude::*;

use crate::error::Result;
use crate::linalg::{ProductState, ProjPoint};
use crate::measure::DrivingMeasure;
use crate::rng::{self, TAG_DEVIATION, TAG_DIRECTIONAL, TAG_FINITE_SCALE, TAG_L1, TAG_SPECTRUM};
use crate::torus::TorusPoint;

/// Point estimate with its Monte-Carlo standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovEstimate {
    /// nats per step
    pub value: f64,
    /// sample standard deviation / sqrt(n_samples); 0 for a single sample
    pub stderr: f64,
    pub n_steps: u64,
    pub n_samples: u64,
    pub seed: u64,
}

impl LyapunovEstimate {
    fn from_samples(samples: &[f64], n_steps: u64, seed: u64) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let stderr = if samples.len() > 1 {
            let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        LyapunovEstimate {
            value: mean,
            stderr,
            n_steps,
            n_samples: samples.len() as u64,
            seed,
        }
    }
}

/// One n-step renormalized path: per-exponent (1/n) log-stretches.
fn run_path(
    nu: &DrivingMeasure,
    theta0: &TorusPoint,
    n: u64,
    mut state: ProductState,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<Vec<f64>> {
    let mut freq_sum = TorusPoint::zero(theta0.dim());
    for _ in 0..n {
        let g = nu.sample(rng);
        let theta = theta0.translate(&freq_sum)?;
        state.renorm_step(&g.evaluate(&theta)?)?;
        freq_sum = freq_sum.translate(&g.freq)?;
    }
    Ok(state
        .log_scales()
        .iter()
        .map(|&ls| ls / n as f64)
        .collect())
}

fn sample_paths<F>(
    n_samples: u64,
    make_state: F,
    nu: &DrivingMeasure,
    theta0: &TorusPoint,
    n: u64,
    seed: u64,
    path_prefix: &[u64],
) -> Result<Vec<Vec<f64>>>
where
    F: Fn() -> Result<ProductState> + Sync,
{
    (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut path = path_prefix.to_vec();
            path.push(i);
            let mut r = rng::rng_at(seed, &path);
            run_path(nu, theta0, n, make_state()?, &mut r)
        })
        .collect()
}

/// Estimate of the maximal exponent: mean over samples of (1/n) log s_1 of
/// the n-step renormalized product started at theta0.
pub fn estimate_l1(
    nu: &DrivingMeasure,
    theta0: &TorusPoint,
    n: u64,
    n_samples: u64,
    seed: u64,
) -> Result<LyapunovEstimate> {
    let (est, _) = estimate_l1_samples(nu, theta0, n, n_samples, seed)?;
    Ok(est)
}

/// Same as [`estimate_l1`] but also returns the per-path values.
pub fn estimate_l1_samples(
    nu: &DrivingMeasure,
    theta0: &TorusPoint,
    n: u64,
    n_samples: u64,
    seed: u64,
) -> Result<(LyapunovEstimate, Vec<f64>)> {
    check_counts(n, n_samples)?;
    let m = nu.matrix_dim();
    let rows = sample_paths(
        n_samples,
        || ProductState::new(m, 1),
        nu,
        theta0,
        n,
        seed,
        &[TAG_L1],
    )?;
    let samples: Vec<f64> = rows.into_iter().map(|r| r[0]).collect();
    Ok((LyapunovEstimate::from_samples(&samples, n, seed), samples))
}

/// The top k exponents from a renormalized k-frame.
pub fn estimate_spectrum(
    nu: &DrivingMeasure,
    theta0: &TorusPoint,
    n: u64,
    n_samples: u64,
    k: usize,
    seed: u64,
) -> Result<Vec<LyapunovEstimate>> {
    check_counts(n, n_samples)?;
    let m = nu.matrix_dim();
    let rows = sample_paths(
        n_samples,
        || ProductState::new(m, k),
        nu,
        theta0,
        n,
        seed,
        &[TAG_SPECTRUM],
    )?;
    Ok((0..k)
        .map(|j| {
            let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            LyapunovEstimate::from_samples(&col, n, seed)
        })
        .collect())
}

/// Finite-scale exponent L_n(theta) estimated independently at each grid
/// point.
pub fn finite_scale_ln(
    nu: &DrivingMeasure,
    theta_grid: &[TorusPoint],
    n: u64,
    n_samples: u64,
    seed: u64,
) -> Result<Vec<LyapunovEstimate>> {
    check_counts(n, n_samples)?;
    if theta_grid.is_empty() {
        return Err(crate::error::Error::InvalidParameter("empty theta grid".into()));
    }
    let m = nu.matrix_dim();
    theta_grid
        .par_iter()
        .enumerate()
        .map(|(ti, theta)| {
            let samples: Vec<f64> = (0..n_samples)
                .map(|i| {
                    let mut r = rng::rng_at(seed, &[TAG_FINITE_SCALE, ti as u64, i]);
                    run_path(nu, theta, n, ProductState::new(m, 1)?, &mut r).map(|v| v[0])
                })
                .collect::<Result<_>>()?;
            Ok(LyapunovEstimate::from_samples(&samples, n, seed))
        })
        .collect()
}

/// Directional exponent: vector iteration seeded at the projective point p.
pub fn directional_ln(
    nu: &DrivingMeasure,
    theta: &TorusPoint,
    p: &ProjPoint,
    n: u64,
    n_samples: u64,
    seed: u64,
) -> Result<LyapunovEstimate> {
    check_counts(n, n_samples)?;
    let rows = sample_paths(
        n_samples,
        || Ok(ProductState::from_vector(p)),
        nu,
        theta,
        n,
        seed,
        &[TAG_DIRECTIONAL],
    )?;
    let samples: Vec<f64> = rows.into_iter().map(|r| r[0]).collect();
    Ok(LyapunovEstimate::from_samples(&samples, n, seed))
}

/// Empirical probabilities of the deviation events
/// {(1/n) log s_1 < L1 - eps} and {(1/n) log s_1 > L1 + eps}.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationProb {
    pub p_minus: f64,
    pub p_plus: f64,
    pub p_total: f64,
    /// binomial standard error of p_total
    pub stderr: f64,
    pub l1_reference: f64,
    pub n_samples: u64,
}

pub fn deviation_prob(
    nu: &DrivingMeasure,
    theta: &TorusPoint,
    n: u64,
    eps: f64,
    n_samples: u64,
    seed: u64,
    l1_reference: Option<f64>,
) -> Result<DeviationProb> {
    check_counts(n, n_samples)?;
    if !(eps > 0.0) {
        return Err(crate::error::Error::InvalidParameter(format!(
            "deviation threshold must be positive, got {eps}"
        )));
    }
    let l1 = match l1_reference {
        Some(v) => v,
        None => estimate_l1(nu, theta, n, n_samples, rng::derive_seed(seed, &[TAG_DEVIATION, 0]))?.value,
    };
    let m = nu.matrix_dim();
    let rows = sample_paths(
        n_samples,
        || ProductState::new(m, 1),
        nu,
        theta,
        n,
        seed,
        &[TAG_DEVIATION, 1],
    )?;
    let mut below = 0u64;
    let mut above = 0u64;
    for r in &rows {
        if r[0] < l1 - eps {
            below += 1;
        } else if r[0] > l1 + eps {
            above += 1;
        }
    }
    let nf = n_samples as f64;
    let p_minus = below as f64 / nf;
    let p_plus = above as f64 / nf;
    let p_total = p_minus + p_plus;
    Ok(DeviationProb {
        p_minus,
        p_plus,
        p_total,
        stderr: (p_total * (1.0 - p_total) / nf).sqrt(),
        l1_reference: l1,
        n_samples,
    })
}

/// Gap table behind the uniform-convergence diagnostic: sup and mean over
/// the theta grid of |L_n(theta) - L_ref|, for each n, against the
/// grid-averaged largest-n reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub reference: f64,
    pub grid_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: u64,
    pub sup_gap: f64,
    pub mean_gap: f64,
    pub per_theta: Vec<LyapunovEstimate>,
}

pub fn uniform_convergence_report(
    nu: &DrivingMeasure,
    theta_grid: &[TorusPoint],
    n_list: &[u64],
    n_samples: u64,
    seed: u64,
) -> Result<ConvergenceTable> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) || n_list.is_empty() {
        return Err(crate::error::Error::InvalidParameter(
            "n_list must be nonempty and strictly increasing".into(),
        ));
    }
    let mut per_n: Vec<Vec<LyapunovEstimate>> = Vec::with_capacity(n_list.len());
    for (idx, &n) in n_list.iter().enumerate() {
        // distinct seed branch per scale
        let branch = rng::derive_seed(seed, &[idx as u64 + 1]);
        per_n.push(finite_scale_ln(nu, theta_grid, n, n_samples, branch)?);
    }
    let last = per_n.last().expect("n_list nonempty");
    let reference = last.iter().map(|e| e.value).sum::<f64>() / last.len() as f64;
    let rows = n_list
        .iter()
        .zip(per_n)
        .map(|(&n, ests)| {
            let gaps: Vec<f64> = ests.iter().map(|e| (e.value - reference).abs()).collect();
            ConvergenceRow {
                n,
                sup_gap: gaps.iter().cloned().fold(0.0, f64::max),
                mean_gap: gaps.iter().sum::<f64>() / gaps.len() as f64,
                per_theta: ests,
            }
        })
        .collect();
    Ok(ConvergenceTable {
        rows,
        reference,
        grid_size: theta_grid.len(),
    })
}

fn check_counts(n: u64, n_samples: u64) -> Result<()> {
    if n < 1 {
        return Err(crate::error::Error::InvalidParameter("n must be >= 1".into()));
    }
    if n_samples < 1 {
        return Err(crate::error::Error::InvalidParameter(
            "n_samples must be >= 1".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{CocycleElement, MatrixFn, PotentialFn};
    use crate::linalg::Matrix;
    use crate::measure::{nu_op1, DrivingMeasure, NoiseComponent, GOLDEN_MEAN};
    use approx::assert_abs_diff_eq;

    fn constant_measure(m: Matrix) -> DrivingMeasure {
        DrivingMeasure::finite_atoms(vec![(
            1.0,
            CocycleElement::new(TorusPoint::circle(0.0), MatrixFn::Constant(m)),
        )])
        .unwrap()
    }

    fn rotation_measure(alpha: f64) -> DrivingMeasure {
        DrivingMeasure::finite_atoms(vec![(
            1.0,
            CocycleElement::new(
                TorusPoint::circle(alpha),
                MatrixFn::Constant(Matrix::identity(2)),
            ),
        )])
        .unwrap()
    }

    #[test]
    fn constant_diagonal_is_exact() {
        let nu = constant_measure(Matrix::diagonal(&[2.0, 0.5]).unwrap());
        let est = estimate_l1(&nu, &TorusPoint::circle(0.0), 500, 4, 9).unwrap();
        assert_abs_diff_eq!(est.value, 2.0f64.ln(), epsilon = 1e-12);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn isometric_measure_gives_zero() {
        let nu = rotation_measure(GOLDEN_MEAN);
        let est = estimate_l1(&nu, &TorusPoint::circle(0.2), 1000, 3, 1).unwrap();
        assert!(est.value.abs() < 1e-12);
    }

    #[test]
    fn free_laplacian_at_e3() {
        // constant matrix [[-3,-1],[1,0]]; top eigenvalue magnitude (3+sqrt 5)/2
        let nu = nu_op1(
            TorusPoint::circle(GOLDEN_MEAN),
            NoiseComponent::delta(0.0),
            PotentialFn::Constant(0.0),
            3.0,
        )
        .unwrap();
        let est = estimate_l1(&nu, &TorusPoint::circle(0.0), 100_000, 2, 5).unwrap();
        let reference = ((3.0 + 5.0f64.sqrt()) / 2.0f64).ln();
        assert!((est.value - reference).abs() < 1e-3);
    }

    #[test]
    fn spectrum_pairs_to_zero_in_sl2() {
        let nu = nu_op1(
            TorusPoint::circle(GOLDEN_MEAN),
            NoiseComponent::Atoms(vec![(0.5, 0.0), (0.5, 1.0)]),
            PotentialFn::cosine(1, 2.0),
            0.0,
        )
        .unwrap();
        let spec = estimate_spectrum(&nu, &TorusPoint::circle(0.0), 2000, 5, 2, 3).unwrap();
        assert!((spec[0].value + spec[1].value).abs() < 1e-6);
        assert!(spec[0].value > 0.0);
        assert!(spec[1].value < 0.0);
    }

    #[test]
    fn spectrum_of_constant_diagonal() {
        let nu = constant_measure(Matrix::diagonal(&[2.0, 0.5]).unwrap());
        let spec = estimate_spectrum(&nu, &TorusPoint::circle(0.0), 100, 2, 2, 3).unwrap();
        assert_abs_diff_eq!(spec[0].value, 2.0f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(spec[1].value, -(2.0f64.ln()), epsilon = 1e-12);
    }

    #[test]
    fn finite_scale_constant_matrix_is_theta_free() {
        let nu = constant_measure(Matrix::from_rows_2x2(2.0, 1.0, 1.0, 1.0).unwrap());
        let grid = crate::torus::circle_grid(8);
        let ests = finite_scale_ln(&nu, &grid, 200, 2, 17).unwrap();
        for e in &ests {
            assert_abs_diff_eq!(e.value, ests[0].value, epsilon = 1e-12);
        }
    }

    #[test]
    fn finite_scale_isometry_is_zero() {
        let nu = rotation_measure(GOLDEN_MEAN);
        let grid = crate::torus::circle_grid(4);
        for e in finite_scale_ln(&nu, &grid, 100, 2, 17).unwrap() {
            assert!(e.value.abs() < 1e-12);
        }
    }

    #[test]
    fn directional_exponents_of_reducible_diagonal() {
        let nu = constant_measure(Matrix::diagonal(&[2.0, 0.5]).unwrap());
        let theta = TorusPoint::circle(0.0);
        let e1 = directional_ln(&nu, &theta, &ProjPoint::basis(2, 0), 300, 2, 7).unwrap();
        let e2 = directional_ln(&nu, &theta, &ProjPoint::basis(2, 1), 300, 2, 7).unwrap();
        assert_abs_diff_eq!(e1.value, 2.0f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(e2.value, -(2.0f64.ln()), epsilon = 1e-12);
    }

    #[test]
    fn random_sign_diagonal_directional_vanishes() {
        // half diag(2, 1/2), half diag(1/2, 2): e_1 logs are a random walk,
        // so the directional exponent tends to 0 by the SLLN.
        let nu = DrivingMeasure::finite_atoms(vec![
            (
                0.5,
                CocycleElement::new(
                    TorusPoint::circle(0.0),
                    MatrixFn::Constant(Matrix::diagonal(&[2.0, 0.5]).unwrap()),
                ),
            ),
            (
                0.5,
                CocycleElement::new(
                    TorusPoint::circle(0.0),
                    MatrixFn::Constant(Matrix::diagonal(&[0.5, 2.0]).unwrap()),
                ),
            ),
        ])
        .unwrap();
        let est = directional_ln(
            &nu,
            &TorusPoint::circle(0.0),
            &ProjPoint::basis(2, 0),
            100_000,
            8,
            13,
        )
        .unwrap();
        assert!(est.value.abs() < 0.01);
    }

    #[test]
    fn deviation_prob_isometry_is_zero() {
        let nu = rotation_measure(GOLDEN_MEAN);
        let d = deviation_prob(&nu, &TorusPoint::circle(0.1), 200, 0.1, 50, 3, Some(0.0)).unwrap();
        assert_eq!(d.p_total, 0.0);
        assert_eq!(d.p_minus, 0.0);
        assert_eq!(d.p_plus, 0.0);
    }

    #[test]
    fn deviation_prob_constant_is_deterministic() {
        let nu = constant_measure(Matrix::diagonal(&[2.0, 0.5]).unwrap());
        let d =
            deviation_prob(&nu, &TorusPoint::circle(0.0), 100, 0.05, 20, 3, Some(2.0f64.ln()))
                .unwrap();
        assert_eq!(d.p_total, 0.0);
        let d = deviation_prob(&nu, &TorusPoint::circle(0.0), 100, 0.05, 20, 3, Some(0.0)).unwrap();
        assert_eq!(d.p_total, 1.0);
    }

    #[test]
    fn stderr_shrinks_with_samples() {
        let nu = nu_op1(
            TorusPoint::circle(GOLDEN_MEAN),
            NoiseComponent::Atoms(vec![(0.5, 0.0), (0.5, 1.0)]),
            PotentialFn::cosine(1, 2.0),
            0.0,
        )
        .unwrap();
        let theta = TorusPoint::circle(0.0);
        let small = estimate_l1(&nu, &theta, 500, 100, 21).unwrap();
        let big = estimate_l1(&nu, &theta, 500, 400, 22).unwrap();
        let ratio = small.stderr / big.stderr;
        // factor-4 samples should give roughly factor-2 stderr
        assert!(ratio > 1.4 && ratio < 2.6, "ratio {ratio}");
    }

    #[test]
    fn worker_invariance() {
        let nu = nu_op1(
            TorusPoint::circle(GOLDEN_MEAN),
            NoiseComponent::Atoms(vec![(0.5, 0.0), (0.5, 1.0)]),
            PotentialFn::cosine(1, 2.0),
            1.0,
        )
        .unwrap();
        let theta = TorusPoint::circle(0.0);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| estimate_l1(&nu, &theta, 300, 40, 77).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a, b);
    }

    #[test]
    fn subadditivity_direction() {
        let nu = nu_op1(
            TorusPoint::circle(GOLDEN_MEAN),
            NoiseComponent::Atoms(vec![(0.5, 0.0), (0.5, 1.0)]),
            PotentialFn::cosine(1, 2.0),
            0.5,
        )
        .unwrap();
        let theta = TorusPoint::circle(0.0);
        let short = estimate_l1(&nu, &theta, 500, 200, 5).unwrap();
        let long = estimate_l1(&nu, &theta, 1000, 200, 6).unwrap();
        let sigma = (short.stderr * short.stderr + long.stderr * long.stderr).sqrt();
        assert!(long.value <= short.value + 3.0 * sigma);
    }

    #[test]
    fn convergence_report_shape() {
        let nu = rotation_measure(GOLDEN_MEAN);
        let grid = crate::torus::circle_grid(4);
        let table = uniform_convergence_report(&nu, &grid, &[10, 50], 2, 3).unwrap();
        assert_eq!(table.rows.len(), 2);
        for row in &table.rows {
            assert!(row.sup_gap >= row.mean_gap);
            assert!(row.mean_gap >= 0.0);
        }
    }
}
