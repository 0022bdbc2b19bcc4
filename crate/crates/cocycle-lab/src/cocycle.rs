//! The group of quasiperiodic cocycles: a frequency on the torus paired with
//! a matrix-valued function, with composition, inversion and iterate
//! evaluation along random words.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, ProductState};
use crate::torus::TorusPoint;

/// Potential on the torus: a constant or a real trigonometric polynomial
/// v(theta) = sum_k a_k cos(2 pi <k, theta>) + b_k sin(2 pi <k, theta>).
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialFn {
    Constant(f64),
    TrigPoly { dim: usize, coeffs: Vec<TrigCoeff> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrigCoeff {
    pub k: Vec<i64>,
    pub cos: f64,
    pub sin: f64,
}

impl PotentialFn {
    /// a * cos(2 pi k theta) on the circle.
    pub fn cosine(k: i64, amplitude: f64) -> Self {
        PotentialFn::TrigPoly {
            dim: 1,
            coeffs: vec![TrigCoeff {
                k: vec![k],
                cos: amplitude,
                sin: 0.0,
            }],
        }
    }

    pub fn sine(k: i64, amplitude: f64) -> Self {
        PotentialFn::TrigPoly {
            dim: 1,
            coeffs: vec![TrigCoeff {
                k: vec![k],
                cos: 0.0,
                sin: amplitude,
            }],
        }
    }

    pub fn eval(&self, theta: &TorusPoint) -> f64 {
        match self {
            PotentialFn::Constant(c) => *c,
            PotentialFn::TrigPoly { coeffs, .. } => {
                let mut v = 0.0;
                for c in coeffs {
                    let phase: f64 = c
                        .k
                        .iter()
                        .zip(theta.coords())
                        .map(|(&k, &x)| k as f64 * x)
                        .sum();
                    let arg = std::f64::consts::TAU * phase;
                    v += c.cos * arg.cos() + c.sin * arg.sin();
                }
                v
            }
        }
    }

    /// Integral over the torus: the k = 0 cosine coefficient.
    pub fn mean(&self) -> f64 {
        match self {
            PotentialFn::Constant(c) => *c,
            PotentialFn::TrigPoly { coeffs, .. } => coeffs
                .iter()
                .filter(|c| c.k.iter().all(|&k| k == 0))
                .map(|c| c.cos)
                .sum(),
        }
    }
}

/// Matrix-valued function on the torus, stored structurally so composed
/// cocycles evaluate exactly at arbitrary theta.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixFn {
    /// Transfer matrix [[v(theta) + noise - energy, -1], [1, 0]].
    Schroedinger {
        potential: PotentialFn,
        energy: f64,
        noise: f64,
    },
    Constant(Matrix),
    /// theta |-> inner(theta + shift)
    Translated { inner: Box<MatrixFn>, shift: TorusPoint },
    /// theta |-> left(theta) * right(theta)
    Product(Box<MatrixFn>, Box<MatrixFn>),
    /// theta |-> inner(theta)^(-1)
    Inverse(Box<MatrixFn>),
}

impl MatrixFn {
    pub fn matrix_dim(&self) -> usize {
        match self {
            MatrixFn::Schroedinger { .. } => 2,
            MatrixFn::Constant(m) => m.dim(),
            MatrixFn::Translated { inner, .. } => inner.matrix_dim(),
            MatrixFn::Product(l, _) => l.matrix_dim(),
            MatrixFn::Inverse(inner) => inner.matrix_dim(),
        }
    }

    pub fn eval(&self, theta: &TorusPoint) -> Result<Matrix> {
        match self {
            MatrixFn::Schroedinger {
                potential,
                energy,
                noise,
            } => Matrix::from_rows_2x2(potential.eval(theta) + noise - energy, -1.0, 1.0, 0.0),
            MatrixFn::Constant(m) => Ok(m.clone()),
            MatrixFn::Translated { inner, shift } => inner.eval(&theta.translate(shift)?),
            MatrixFn::Product(l, r) => l.eval(theta)?.mul(&r.eval(theta)?),
            MatrixFn::Inverse(inner) => inner.eval(theta)?.inverse(),
        }
    }
}

/// Group element (alpha, A): translate the torus by alpha, act on the fiber
/// by A(theta).
#[derive(Debug, Clone, PartialEq)]
pub struct CocycleElement {
    pub freq: TorusPoint,
    pub matrix_fn: MatrixFn,
}

impl CocycleElement {
    pub fn new(freq: TorusPoint, matrix_fn: MatrixFn) -> Self {
        CocycleElement { freq, matrix_fn }
    }

    pub fn identity(torus_dim: usize, matrix_dim: usize) -> Self {
        CocycleElement {
            freq: TorusPoint::zero(torus_dim),
            matrix_fn: MatrixFn::Constant(Matrix::identity(matrix_dim)),
        }
    }

    pub fn torus_dim(&self) -> usize {
        self.freq.dim()
    }

    pub fn matrix_dim(&self) -> usize {
        self.matrix_fn.matrix_dim()
    }

    pub fn evaluate(&self, theta: &TorusPoint) -> Result<Matrix> {
        if theta.dim() != self.torus_dim() {
            return Err(Error::DimError(format!(
                "evaluate: torus dims {} vs {}",
                theta.dim(),
                self.torus_dim()
            )));
        }
        self.matrix_fn.eval(theta)
    }

    /// Group law: (alpha, A)(beta, B) = (alpha + beta, (A o tau_beta) B).
    pub fn compose(&self, other: &CocycleElement) -> Result<CocycleElement> {
        if self.torus_dim() != other.torus_dim() || self.matrix_dim() != other.matrix_dim() {
            return Err(Error::DimError("compose: mismatched cocycle dimensions".into()));
        }
        Ok(CocycleElement {
            freq: self.freq.translate(&other.freq)?,
            matrix_fn: MatrixFn::Product(
                Box::new(MatrixFn::Translated {
                    inner: Box::new(self.matrix_fn.clone()),
                    shift: other.freq.clone(),
                }),
                Box::new(other.matrix_fn.clone()),
            ),
        })
    }

    /// (alpha, A)^(-1) = (-alpha, (A o tau_{-alpha})^(-1)).
    pub fn inverse(&self) -> CocycleElement {
        let neg = self.freq.neg();
        CocycleElement {
            freq: neg.clone(),
            matrix_fn: MatrixFn::Inverse(Box::new(MatrixFn::Translated {
                inner: Box::new(self.matrix_fn.clone()),
                shift: neg,
            })),
        }
    }
}

/// Ordered product of the symbols' matrices along the torus orbit, carried by
/// a renormalized k-frame. Returns the final base point and the product
/// state.
///
/// The base point is evaluated as theta0 + (partial frequency sum), with the
/// partial sums reduced mod 1 step by step, so the final point equals
/// `theta0.translate(sum of freqs)` bit for bit.
pub fn iterate(
    symbols: &[CocycleElement],
    theta0: &TorusPoint,
    k_exponents: usize,
) -> Result<(TorusPoint, ProductState)> {
    let first = symbols
        .first()
        .ok_or_else(|| Error::InvalidParameter("iterate: empty symbol list".into()))?;
    let m = first.matrix_dim();
    let mut state = ProductState::new(m, k_exponents)?;
    let mut freq_sum = TorusPoint::zero(theta0.dim());
    for sym in symbols {
        let theta = theta0.translate(&freq_sum)?;
        state.renorm_step(&sym.evaluate(&theta)?)?;
        freq_sum = freq_sum.translate(&sym.freq)?;
    }
    Ok((theta0.translate(&freq_sum)?, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn schrodinger(v: PotentialFn, energy: f64, noise: f64) -> MatrixFn {
        MatrixFn::Schroedinger {
            potential: v,
            energy,
            noise,
        }
    }

    #[test]
    fn schrodinger_evaluation() {
        // v = 0, E = 0, w = 0: rotation by pi/2
        let f = schrodinger(PotentialFn::Constant(0.0), 0.0, 0.0);
        let m = f.eval(&TorusPoint::circle(0.37)).unwrap();
        assert_eq!(m.entries(), &[0.0, -1.0, 1.0, 0.0]);

        // v = 2 cos 2 pi theta, E = 1, theta = 0: top-left 2*1 - 1 = 1
        let f = schrodinger(PotentialFn::cosine(1, 2.0), 1.0, 0.0);
        let m = f.eval(&TorusPoint::circle(0.0)).unwrap();
        assert_abs_diff_eq!(m.get(0, 0), 1.0, epsilon = 1e-15);
        assert_eq!(m.get(0, 1), -1.0);
    }

    #[test]
    fn constant_evaluates_to_itself() {
        let c = Matrix::diagonal(&[2.0, 0.5]).unwrap();
        let f = MatrixFn::Constant(c.clone());
        assert_eq!(f.eval(&TorusPoint::circle(0.9)).unwrap(), c);
    }

    #[test]
    fn potential_mean_matches_quadrature() {
        let v = PotentialFn::TrigPoly {
            dim: 1,
            coeffs: vec![
                TrigCoeff { k: vec![0], cos: 0.7, sin: 0.0 },
                TrigCoeff { k: vec![1], cos: 2.0, sin: 0.3 },
                TrigCoeff { k: vec![3], cos: -1.0, sin: 0.0 },
            ],
        };
        let n = 4096;
        let quad: f64 = (0..n)
            .map(|i| v.eval(&TorusPoint::circle(i as f64 / n as f64)))
            .sum::<f64>()
            / n as f64;
        assert_abs_diff_eq!(quad, v.mean(), epsilon = 1e-6);
    }

    #[test]
    fn compose_identity_and_inverse() {
        let id = CocycleElement::identity(1, 2);
        let c = id.compose(&id).unwrap();
        assert_eq!(
            c.evaluate(&TorusPoint::circle(0.4)).unwrap(),
            Matrix::identity(2)
        );

        let g = CocycleElement::new(
            TorusPoint::circle(0.3),
            schrodinger(PotentialFn::cosine(1, 1.5), 0.7, 0.2),
        );
        let gg = g.compose(&g.inverse()).unwrap();
        for i in 0..64 {
            let theta = TorusPoint::circle(i as f64 / 64.0);
            let m = gg.evaluate(&theta).unwrap();
            assert!(m.sub_norm(&Matrix::identity(2)) < 1e-10);
        }
    }

    #[test]
    fn compose_constant_with_schrodinger() {
        let g = CocycleElement::new(
            TorusPoint::circle(0.3),
            MatrixFn::Constant(Matrix::diagonal(&[2.0, 0.5]).unwrap()),
        );
        let h = CocycleElement::new(
            TorusPoint::circle(0.2),
            schrodinger(PotentialFn::cosine(1, 1.0), 0.0, 0.0),
        );
        let c = g.compose(&h).unwrap();
        let theta = TorusPoint::circle(0.1);
        let got = c.evaluate(&theta).unwrap();
        let want = Matrix::diagonal(&[2.0, 0.5])
            .unwrap()
            .mul(
                &Matrix::from_rows_2x2(
                    (std::f64::consts::TAU * 0.1).cos(),
                    -1.0,
                    1.0,
                    0.0,
                )
                .unwrap(),
            )
            .unwrap();
        assert!(got.sub_norm(&want) < 1e-12);
        assert_abs_diff_eq!(c.freq.coords()[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn inverse_involution_and_constant_case() {
        let g = CocycleElement::new(
            TorusPoint::circle(0.27),
            schrodinger(PotentialFn::cosine(2, 0.9), 1.3, 0.0),
        );
        let gii = g.inverse().inverse();
        for i in 0..32 {
            let theta = TorusPoint::circle(i as f64 / 32.0);
            let a = g.evaluate(&theta).unwrap();
            let b = gii.evaluate(&theta).unwrap();
            assert!(a.sub_norm(&b) < 1e-10);
        }

        let c = Matrix::from_rows_2x2(2.0, 1.0, 1.0, 1.0).unwrap();
        let g = CocycleElement::new(TorusPoint::circle(0.4), MatrixFn::Constant(c.clone()));
        let inv = g.inverse();
        let got = inv.evaluate(&TorusPoint::circle(0.77)).unwrap();
        assert!(got.sub_norm(&c.inverse().unwrap()) < 1e-13);
    }

    #[test]
    fn iterate_identity_and_diagonal() {
        let id = CocycleElement::identity(1, 2);
        let syms = vec![id.clone(); 10];
        let (theta, st) = iterate(&syms, &TorusPoint::circle(0.3), 1).unwrap();
        assert_eq!(theta.coords()[0], 0.3);
        assert_eq!(st.log_scales()[0], 0.0);

        let g = CocycleElement::new(
            TorusPoint::circle(0.0),
            MatrixFn::Constant(Matrix::diagonal(&[2.0, 0.5]).unwrap()),
        );
        let (_, st) = iterate(&vec![g; 7], &TorusPoint::circle(0.0), 1).unwrap();
        assert_abs_diff_eq!(st.log_scales()[0], 7.0 * 2.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn iterate_empty_is_an_error() {
        assert!(iterate(&[], &TorusPoint::circle(0.0), 1).is_err());
    }
}
