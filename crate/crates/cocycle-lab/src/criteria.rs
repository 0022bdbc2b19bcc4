//! Computable certificates for the positivity criterion: ergodicity of the
//! frequency law, non-compactness of the monodromy group, and the SL(2)
//! sufficient conditions for strong irreducibility.

use crate::cocycle::PotentialFn;
use crate::error::Result;
use crate::linalg::{proj_dist, Matrix, ProjPoint};
use crate::measure::{DrivingMeasure, ErgodicityReport, NoiseComponent};
use crate::model::SchrodingerModel;
use crate::torus::TorusPoint;

pub const ALGEBRAIC_TOL: f64 = 1e-9;
pub const GRID_SCAN_TOL: f64 = 1e-6;

/// Two generators of the monodromy group at a fixed torus point.
#[derive(Debug, Clone)]
pub struct MonodromyPair {
    pub d1: Matrix,
    pub d2: Matrix,
    pub provenance: String,
    pub theta_used: TorusPoint,
}

/// Monodromy generators of the fixed-frequency random-noise family:
/// D1 = P(w1) P(w2)^-1 and D2 = S_E(theta)^-1 P(w2 - w1) S_E(theta),
/// computed numerically from the transfer matrices.
pub fn monodromy_op1(
    v: &PotentialFn,
    energy: f64,
    omega1: f64,
    omega2: f64,
    theta: &TorusPoint,
) -> Result<MonodromyPair> {
    let p = |w: f64| Matrix::from_rows_2x2(1.0, w, 0.0, 1.0);
    let d1 = p(omega1)?.mul(&p(omega2)?.inverse()?)?;
    let s = Matrix::from_rows_2x2(v.eval(theta) - energy, -1.0, 1.0, 0.0)?;
    let d2 = s.inverse()?.mul(&p(omega2 - omega1)?)?.mul(&s)?;
    Ok(MonodromyPair {
        d1,
        d2,
        provenance: "op1: noise-difference unipotents".into(),
        theta_used: theta.clone(),
    })
}

/// Non-compactness witness: |tr(D1 D2)| > 2 means unbounded powers.
pub fn noncompact_trace_test(pair: &MonodromyPair) -> (bool, f64) {
    let trace = pair.d1.mul(&pair.d2).map(|m| m.trace()).unwrap_or(f64::NAN);
    (trace.abs() > 2.0 + ALGEBRAIC_TOL, trace)
}

/// Invariant projective lines of a 2x2 real matrix: real eigendirections.
/// Empty for elliptic elements and for +-identity.
pub fn invariant_lines(m: &Matrix) -> Vec<ProjPoint> {
    debug_assert_eq!(m.dim(), 2);
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let scale = a.abs().max(b.abs()).max(c.abs()).max(d.abs()).max(1.0);
    // +-identity: every line invariant, no distinguished one
    if b.abs() <= ALGEBRAIC_TOL * scale
        && c.abs() <= ALGEBRAIC_TOL * scale
        && (a - d).abs() <= ALGEBRAIC_TOL * scale
    {
        return Vec::new();
    }
    let tr = a + d;
    let det = a * d - b * c;
    let disc = tr * tr - 4.0 * det;
    if disc < -ALGEBRAIC_TOL * scale * scale {
        return Vec::new(); // elliptic
    }
    let disc = disc.max(0.0).sqrt();
    let mut lines: Vec<ProjPoint> = Vec::new();
    for lambda in [(tr + disc) / 2.0, (tr - disc) / 2.0] {
        // null vector of M - lambda I: rows (a - l, b) and (c, d - l)
        let cand1 = [b, lambda - a];
        let cand2 = [lambda - d, c];
        let n1 = cand1[0] * cand1[0] + cand1[1] * cand1[1];
        let n2 = cand2[0] * cand2[0] + cand2[1] * cand2[1];
        let v = if n1 >= n2 { cand1 } else { cand2 };
        if let Ok(p) = ProjPoint::new(&v) {
            if !lines.iter().any(|q| proj_dist(q, &p) < 1e-12) {
                lines.push(p);
            }
        }
    }
    lines
}

/// SL(2) sufficient condition for strong irreducibility: both generators
/// parabolic or hyperbolic, neither the identity, and no shared invariant
/// line.
pub fn parabolic_pair_irreducibility(pair: &MonodromyPair, tol: f64) -> bool {
    let l1 = invariant_lines(&pair.d1);
    let l2 = invariant_lines(&pair.d2);
    if l1.is_empty() || l2.is_empty() {
        return false;
    }
    l1.iter().all(|p| l2.iter().all(|q| proj_dist(p, q) > tol))
}

/// Grid scan for the transversality witness of the random-frequency family:
/// a point where phi(theta) psi(theta) is away from zero, with
/// phi(theta) = v(theta + alpha - beta) - v(theta) and psi = phi(. - alpha).
#[derive(Debug, Clone)]
pub struct TransversalityWitness {
    pub found: bool,
    pub theta0: Option<TorusPoint>,
    pub product_value: f64,
}

pub fn transversality_check(
    v: &PotentialFn,
    alpha: &TorusPoint,
    beta: &TorusPoint,
    grid_size: usize,
    tol: f64,
) -> Result<TransversalityWitness> {
    if alpha == beta {
        return Ok(TransversalityWitness {
            found: false,
            theta0: None,
            product_value: 0.0,
        });
    }
    let shift = alpha.translate(&beta.neg())?; // alpha - beta
    let neg_alpha = alpha.neg();
    let phi = |theta: &TorusPoint| -> Result<f64> {
        Ok(v.eval(&theta.translate(&shift)?) - v.eval(theta))
    };
    // prefer a positive product: the trace witness 2 + phi psi is then
    // immediately hyperbolic
    let mut best_pos: Option<(TorusPoint, f64)> = None;
    let mut best_abs: Option<(TorusPoint, f64)> = None;
    for theta in grid_points(alpha.dim(), grid_size) {
        let f = phi(&theta)?;
        let g = phi(&theta.translate(&neg_alpha)?)?;
        let prod = f * g;
        if prod > tol && best_pos.as_ref().map_or(true, |b| prod > b.1) {
            best_pos = Some((theta.clone(), prod));
        }
        if prod.abs() > tol && best_abs.as_ref().map_or(true, |b| prod.abs() > b.1.abs()) {
            best_abs = Some((theta, prod));
        }
    }
    let chosen = best_pos.or(best_abs);
    Ok(match chosen {
        Some((theta, value)) => TransversalityWitness {
            found: true,
            theta0: Some(theta),
            product_value: value,
        },
        None => TransversalityWitness {
            found: false,
            theta0: None,
            product_value: 0.0,
        },
    })
}

/// Check the disjointness of the zero set Z = {w1 = w2} from its translate
/// Z - alpha, on a grid with one-cell tolerance.
pub fn zero_set_condition(
    omega1: &PotentialFn,
    omega2: &PotentialFn,
    alpha: &TorusPoint,
    grid_size: usize,
    tol: f64,
) -> Result<bool> {
    let d = alpha.dim();
    let cell = 1.0 / grid_size as f64;
    let zeros: Vec<TorusPoint> = grid_points(d, grid_size)
        .into_iter()
        .filter(|t| (omega1.eval(t) - omega2.eval(t)).abs() <= tol)
        .collect();
    if zeros.is_empty() {
        return Ok(true);
    }
    let shifted: Vec<TorusPoint> = zeros
        .iter()
        .map(|z| z.translate(&alpha.neg()))
        .collect::<Result<_>>()?;
    for theta in grid_points(d, grid_size) {
        let near_z = zeros.iter().any(|z| theta.dist(z) <= cell);
        if near_z {
            let near_shift = shifted.iter().any(|z| theta.dist(z) <= cell);
            if near_shift {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn grid_points(dim: usize, grid_size: usize) -> Vec<TorusPoint> {
    match dim {
        1 => crate::torus::circle_grid(grid_size),
        _ => {
            let mut pts = vec![vec![]];
            for _ in 0..dim {
                let mut next = Vec::new();
                for p in &pts {
                    for i in 0..grid_size {
                        let mut q: Vec<f64> = p.clone();
                        q.push(i as f64 / grid_size as f64);
                        next.push(q);
                    }
                }
                pts = next;
            }
            pts.into_iter()
                .map(|c| TorusPoint::new(&c).expect("grid coordinates are finite"))
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    PositivityPredicted,
    Inconclusive,
}

/// Assembled hypothesis report for one model family.
#[derive(Debug, Clone)]
pub struct CriteriaReport {
    pub ergodicity: ErgodicityReport,
    pub noncompact: bool,
    pub noncompact_witness_trace: f64,
    pub strong_irreducibility: bool,
    pub irreducibility_witness: String,
    pub verdict: Verdict,
}

impl CriteriaReport {
    fn assemble(
        ergodicity: ErgodicityReport,
        noncompact: bool,
        trace: f64,
        irred: bool,
        witness: String,
    ) -> Self {
        let verdict = if ergodicity.passed() && noncompact && irred {
            Verdict::PositivityPredicted
        } else {
            Verdict::Inconclusive
        };
        CriteriaReport {
            ergodicity,
            noncompact,
            noncompact_witness_trace: trace,
            strong_irreducibility: irred,
            irreducibility_witness: witness,
            verdict,
        }
    }
}

/// Run the model-appropriate sufficient conditions and assemble the verdict.
/// Anything outside the implemented sufficient conditions reports
/// `Inconclusive` rather than guessing.
pub fn positivity_hypotheses_report(
    model: &SchrodingerModel,
    order: i64,
    tol: f64,
) -> Result<CriteriaReport> {
    let nu = model.driving_measure()?;
    let ergodicity = nu.ergodicity_certificate(order, tol)?;
    match model {
        SchrodingerModel::Op1 {
            alpha,
            noise,
            potential,
            energy,
        } => report_from_noise_pair(ergodicity, noise, potential, *energy, alpha),
        SchrodingerModel::Op3 {
            freq: _,
            noise,
            potential,
            energy,
        } => {
            let theta = TorusPoint::zero(nu.torus_dim());
            report_from_noise_pair(ergodicity, noise, potential, *energy, &theta)
        }
        SchrodingerModel::Op2 {
            freq,
            potential,
            energy: _,
        } => {
            let atoms = match freq.atoms() {
                Some(a) if a.len() >= 2 => a,
                _ => {
                    return Ok(CriteriaReport::assemble(
                        ergodicity,
                        false,
                        f64::NAN,
                        false,
                        "needs two frequency atoms".into(),
                    ))
                }
            };
            // pick a pair whose difference passes the finite ergodicity check
            let mut chosen: Option<(&TorusPoint, &TorusPoint)> = None;
            'outer: for (i, (_, a)) in atoms.iter().enumerate() {
                for (_, b) in atoms.iter().skip(i + 1) {
                    let diff = b.translate(&a.neg())?;
                    let probe = DrivingMeasure::finite_atoms(vec![(
                        1.0,
                        crate::cocycle::CocycleElement::new(
                            diff.clone(),
                            crate::cocycle::MatrixFn::Constant(Matrix::identity(2)),
                        ),
                    )])?;
                    if probe.ergodicity_certificate(order, tol)?.passed() {
                        chosen = Some((a, b));
                        break 'outer;
                    }
                }
            }
            let (a, b) = match chosen {
                Some(pair) => pair,
                None => {
                    return Ok(CriteriaReport::assemble(
                        ergodicity,
                        false,
                        f64::NAN,
                        false,
                        "no frequency pair with ergodic difference".into(),
                    ))
                }
            };
            let witness = transversality_check(potential, a, b, 256, GRID_SCAN_TOL)?;
            let Some(theta0) = witness.theta0.clone() else {
                return Ok(CriteriaReport::assemble(
                    ergodicity,
                    false,
                    f64::NAN,
                    false,
                    "no transversality witness on the grid".into(),
                ));
            };
            // parabolic generators at the witness point
            let shift = a.translate(&b.neg())?;
            let phi = potential.eval(&theta0.translate(&shift)?) - potential.eval(&theta0);
            let psi_theta = theta0.translate(&a.neg())?;
            let psi = potential.eval(&psi_theta.translate(&shift)?) - potential.eval(&psi_theta);
            let pair = MonodromyPair {
                d1: Matrix::from_rows_2x2(1.0, 0.0, phi, 1.0)?,
                d2: Matrix::from_rows_2x2(1.0, psi, 0.0, 1.0)?,
                provenance: "op2: commutator unipotents at transversality witness".into(),
                theta_used: theta0,
            };
            // trace of D1 D2 is 2 + phi psi; when phi psi < 0 use D2^-1,
            // giving 2 - phi psi: one of the two exceeds 2 when phi psi != 0
            let (hyp, tr) = noncompact_trace_test(&pair);
            let (noncompact, trace) = if hyp {
                (true, tr)
            } else {
                let alt = MonodromyPair {
                    d1: pair.d1.clone(),
                    d2: pair.d2.inverse()?,
                    provenance: pair.provenance.clone(),
                    theta_used: pair.theta_used.clone(),
                };
                noncompact_trace_test(&alt)
            };
            let irred = parabolic_pair_irreducibility(&pair, ALGEBRAIC_TOL);
            Ok(CriteriaReport::assemble(
                ergodicity,
                noncompact,
                trace,
                irred,
                format!("transverse unipotents, phi*psi = {}", witness.product_value),
            ))
        }
    }
}

fn report_from_noise_pair(
    ergodicity: ErgodicityReport,
    noise: &NoiseComponent,
    potential: &PotentialFn,
    energy: f64,
    theta: &TorusPoint,
) -> Result<CriteriaReport> {
    let Some((w1, w2)) = noise.two_support_points() else {
        return Ok(CriteriaReport::assemble(
            ergodicity,
            false,
            f64::NAN,
            false,
            "noise support is a single point".into(),
        ));
    };
    let pair = monodromy_op1(potential, energy, w1, w2, theta)?;
    let (noncompact, trace) = noncompact_trace_test(&pair);
    let irred = parabolic_pair_irreducibility(&pair, ALGEBRAIC_TOL);
    Ok(CriteriaReport::assemble(
        ergodicity,
        noncompact,
        trace,
        irred,
        format!("noise-difference unipotents, w1 - w2 = {}", w1 - w2),
    ))
}
