//! Dense small-matrix numerics: SL(m) checks, singular values, projective
//! action, and the renormalized product state used by every estimator.

use crate::error::{Error, Result};

pub const UNIMODULAR_TOL: f64 = 1e-9;

/// Square real matrix, row-major. Sizes are small (m = 2 in the Schrödinger
/// modules); everything here is O(m^3) direct arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim < 1 || data.len() != dim * dim {
            return Err(Error::DimError(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix);
        }
        Ok(Matrix { dim, data })
    }

    pub fn from_rows_2x2(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Matrix::new(2, vec![a, b, c, d])
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Matrix { dim, data }
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        let dim = entries.len();
        let mut m = Matrix::identity(dim);
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * dim + i] = e;
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix);
        }
        Ok(m)
    }

    /// Rotation of the plane by `angle` (m = 2).
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Matrix {
            dim: 2,
            data: vec![c, -s, s, c],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.dim != other.dim {
            return Err(Error::DimError(format!(
                "matrix product {}x{} times {}x{}",
                self.dim, self.dim, other.dim, other.dim
            )));
        }
        let m = self.dim;
        if m == 2 {
            let a = &self.data;
            let b = &other.data;
            return Ok(Matrix {
                dim: 2,
                data: vec![
                    a[0] * b[0] + a[1] * b[2],
                    a[0] * b[1] + a[1] * b[3],
                    a[2] * b[0] + a[3] * b[2],
                    a[2] * b[1] + a[3] * b[3],
                ],
            });
        }
        let mut out = vec![0.0; m * m];
        for i in 0..m {
            for k in 0..m {
                let aik = self.data[i * m + k];
                for j in 0..m {
                    out[i * m + j] += aik * other.data[k * m + j];
                }
            }
        }
        Ok(Matrix { dim: m, data: out })
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let m = self.dim;
        debug_assert_eq!(v.len(), m);
        let mut out = vec![0.0; m];
        for i in 0..m {
            let mut s = 0.0;
            for j in 0..m {
                s += self.data[i * m + j] * v[j];
            }
            out[i] = s;
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let m = self.dim;
        let mut out = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                out[j * m + i] = self.data[i * m + j];
            }
        }
        Matrix { dim: m, data: out }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Determinant: cofactor expansion for m <= 3, partial-pivot LU above.
    pub fn det(&self) -> f64 {
        let m = self.dim;
        match m {
            1 => self.data[0],
            2 => self.data[0] * self.data[3] - self.data[1] * self.data[2],
            3 => {
                let d = &self.data;
                d[0] * (d[4] * d[8] - d[5] * d[7]) - d[1] * (d[3] * d[8] - d[5] * d[6])
                    + d[2] * (d[3] * d[7] - d[4] * d[6])
            }
            _ => {
                let mut a = self.data.clone();
                let mut det = 1.0;
                for col in 0..m {
                    let mut piv = col;
                    for r in col + 1..m {
                        if a[r * m + col].abs() > a[piv * m + col].abs() {
                            piv = r;
                        }
                    }
                    if a[piv * m + col] == 0.0 {
                        return 0.0;
                    }
                    if piv != col {
                        for j in 0..m {
                            a.swap(col * m + j, piv * m + j);
                        }
                        det = -det;
                    }
                    det *= a[col * m + col];
                    for r in col + 1..m {
                        let f = a[r * m + col] / a[col * m + col];
                        for j in col..m {
                            a[r * m + j] -= f * a[col * m + j];
                        }
                    }
                }
                det
            }
        }
    }

    pub fn inverse(&self) -> Result<Matrix> {
        let m = self.dim;
        if m == 2 {
            let d = self.det();
            if d == 0.0 || !d.is_finite() {
                return Err(Error::InvalidMatrix);
            }
            let a = &self.data;
            return Ok(Matrix {
                dim: 2,
                data: vec![a[3] / d, -a[1] / d, -a[2] / d, a[0] / d],
            });
        }
        // Gauss-Jordan with partial pivoting.
        let mut a = self.data.clone();
        let mut inv = Matrix::identity(m).data;
        for col in 0..m {
            let mut piv = col;
            for r in col + 1..m {
                if a[r * m + col].abs() > a[piv * m + col].abs() {
                    piv = r;
                }
            }
            if a[piv * m + col] == 0.0 {
                return Err(Error::InvalidMatrix);
            }
            if piv != col {
                for j in 0..m {
                    a.swap(col * m + j, piv * m + j);
                    inv.swap(col * m + j, piv * m + j);
                }
            }
            let p = a[col * m + col];
            for j in 0..m {
                a[col * m + j] /= p;
                inv[col * m + j] /= p;
            }
            for r in 0..m {
                if r != col {
                    let f = a[r * m + col];
                    if f != 0.0 {
                        for j in 0..m {
                            a[r * m + j] -= f * a[col * m + j];
                            inv[r * m + j] -= f * inv[col * m + j];
                        }
                    }
                }
            }
        }
        Matrix::new(m, inv)
    }

    /// Singular values in descending order. Closed form for m = 2, one-sided
    /// Jacobi otherwise (fine at these sizes).
    pub fn singular_values(&self) -> Vec<f64> {
        let m = self.dim;
        if m == 2 {
            let a = &self.data;
            let t = a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3];
            let d = self.det();
            let disc = (t * t - 4.0 * d * d).max(0.0).sqrt();
            let s1 = ((t + disc) / 2.0).sqrt();
            let s2 = if s1 > 0.0 {
                d.abs() / s1
            } else {
                0.0
            };
            return vec![s1, s2];
        }
        // One-sided Jacobi on columns of A; singular values are the final
        // column norms.
        let mut a = self.transpose().data; // column j of A is row j here
        let mut converged = false;
        for _sweep in 0..60 {
            let mut off = 0.0f64;
            for p in 0..m {
                for q in p + 1..m {
                    let (mut app, mut aqq, mut apq) = (0.0, 0.0, 0.0);
                    for i in 0..m {
                        app += a[p * m + i] * a[p * m + i];
                        aqq += a[q * m + i] * a[q * m + i];
                        apq += a[p * m + i] * a[q * m + i];
                    }
                    off = off.max(apq.abs() / (app * aqq).sqrt().max(1e-300));
                    if apq.abs() <= 1e-15 * (app * aqq).sqrt() {
                        continue;
                    }
                    let tau = (aqq - app) / (2.0 * apq);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for i in 0..m {
                        let vp = a[p * m + i];
                        let vq = a[q * m + i];
                        a[p * m + i] = c * vp - s * vq;
                        a[q * m + i] = s * vp + c * vq;
                    }
                }
            }
            if off < 1e-14 {
                converged = true;
                break;
            }
        }
        let _ = converged;
        let mut sv: Vec<f64> = (0..m)
            .map(|j| (0..m).map(|i| a[j * m + i] * a[j * m + i]).sum::<f64>().sqrt())
            .collect();
        sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
        sv
    }

    pub fn op_norm(&self) -> f64 {
        self.singular_values()[0]
    }

    pub fn is_unimodular(&self) -> bool {
        let scale = self.data.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        (self.det() - 1.0).abs() <= UNIMODULAR_TOL * scale
    }

    pub fn sub_norm(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Point of the real projective space P(R^m), stored as a canonical unit
/// representative: first nonzero coordinate positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjPoint {
    rep: Vec<f64>,
}

impl ProjPoint {
    pub fn new(v: &[f64]) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::NumericalUnderflow);
        }
        let mut rep: Vec<f64> = v.iter().map(|x| x / norm).collect();
        canonicalize(&mut rep);
        Ok(ProjPoint { rep })
    }

    pub fn basis(dim: usize, axis: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[axis] = 1.0;
        ProjPoint { rep: v }
    }

    /// m = 2 chart: the line through angle `a` in [0, pi).
    pub fn from_angle(a: f64) -> Self {
        ProjPoint::new(&[a.cos(), a.sin()]).unwrap()
    }

    /// Angle in [0, pi) of an m = 2 projective point.
    pub fn angle(&self) -> f64 {
        debug_assert_eq!(self.rep.len(), 2);
        let a = self.rep[1].atan2(self.rep[0]);
        let a = if a < 0.0 { a + std::f64::consts::PI } else { a };
        if a >= std::f64::consts::PI {
            a - std::f64::consts::PI
        } else {
            a
        }
    }

    pub fn dim(&self) -> usize {
        self.rep.len()
    }

    pub fn representative(&self) -> &[f64] {
        &self.rep
    }
}

fn canonicalize(v: &mut [f64]) {
    for x in v.iter() {
        if *x != 0.0 {
            if *x < 0.0 {
                for y in v.iter_mut() {
                    *y = -*y;
                }
            }
            return;
        }
    }
}

/// Projective action p -> M p / |M p|.
pub fn proj_act(m: &Matrix, p: &ProjPoint) -> Result<ProjPoint> {
    if m.dim() != p.dim() {
        return Err(Error::DimError(format!(
            "proj_act: matrix dim {} vs point dim {}",
            m.dim(),
            p.dim()
        )));
    }
    ProjPoint::new(&m.mul_vec(p.representative()))
}

/// sin of the angle between two lines, in [0,1]. Computed from the wedge
/// product, which stays accurate near zero where 1 - <p,q>^2 cancels.
pub fn proj_dist(p: &ProjPoint, q: &ProjPoint) -> f64 {
    let m = p.rep.len();
    let mut s = 0.0;
    for i in 0..m {
        for j in i + 1..m {
            let w = p.rep[i] * q.rep[j] - p.rep[j] * q.rep[i];
            s += w * w;
        }
    }
    s.sqrt().min(1.0)
}

/// Renormalized running product: an orthonormal k-frame plus accumulated
/// log-stretches. Tracking k = 1 gives the top exponent of a vector orbit,
/// k = m the whole singular spectrum, without ever overflowing.
#[derive(Debug, Clone)]
pub struct ProductState {
    dim: usize,
    k: usize,
    // column-major m x k
    frame: Vec<f64>,
    log_scales: Vec<f64>,
    steps: u64,
}

impl ProductState {
    /// Frame initialized to the first k basis vectors.
    pub fn new(dim: usize, k: usize) -> Result<Self> {
        if k < 1 || k > dim {
            return Err(Error::DimError(format!(
                "frame width {k} out of range for dimension {dim}"
            )));
        }
        let mut frame = vec![0.0; dim * k];
        for j in 0..k {
            frame[j * dim + j] = 1.0;
        }
        Ok(ProductState {
            dim,
            k,
            frame,
            log_scales: vec![0.0; k],
            steps: 0,
        })
    }

    /// Single-vector state seeded at a projective point (directional orbits).
    pub fn from_vector(p: &ProjPoint) -> Self {
        ProductState {
            dim: p.dim(),
            k: 1,
            frame: p.representative().to_vec(),
            log_scales: vec![0.0],
            steps: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn log_scales(&self) -> &[f64] {
        &self.log_scales
    }

    /// Column j of the current orthonormal frame.
    pub fn frame_column(&self, j: usize) -> &[f64] {
        &self.frame[j * self.dim..(j + 1) * self.dim]
    }

    /// Apply M and re-orthonormalize (modified Gram-Schmidt). The diagonal
    /// stretches accumulate into `log_scales`.
    pub fn renorm_step(&mut self, m: &Matrix) -> Result<()> {
        if m.dim() != self.dim {
            return Err(Error::DimError(format!(
                "renorm_step: matrix dim {} vs state dim {}",
                m.dim(),
                self.dim
            )));
        }
        let d = self.dim;
        if d == 2 && self.k == 1 {
            // hot path of every Schrödinger estimator
            let e = m.entries();
            let (x, y) = (self.frame[0], self.frame[1]);
            let nx = e[0] * x + e[1] * y;
            let ny = e[2] * x + e[3] * y;
            let r = (nx * nx + ny * ny).sqrt();
            if r < 1e-300 {
                return Err(Error::NumericalUnderflow);
            }
            self.frame[0] = nx / r;
            self.frame[1] = ny / r;
            self.log_scales[0] += r.ln();
            self.steps += 1;
            return Ok(());
        }
        // general MGS on the image of the frame
        let mut b = vec![0.0; d * self.k];
        for j in 0..self.k {
            let col = m.mul_vec(&self.frame[j * d..(j + 1) * d]);
            b[j * d..(j + 1) * d].copy_from_slice(&col);
        }
        for j in 0..self.k {
            for prev in 0..j {
                let mut dot = 0.0;
                for i in 0..d {
                    dot += b[prev * d + i] * b[j * d + i];
                }
                for i in 0..d {
                    b[j * d + i] -= dot * b[prev * d + i];
                }
            }
            let r = (0..d).map(|i| b[j * d + i] * b[j * d + i]).sum::<f64>().sqrt();
            if r < 1e-300 {
                return Err(Error::NumericalUnderflow);
            }
            for i in 0..d {
                b[j * d + i] /= r;
            }
            self.log_scales[j] += r.ln();
        }
        self.frame = b;
        self.steps += 1;
        Ok(())
    }

    /// Max deviation of the frame Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for a in 0..self.k {
            for b in 0..self.k {
                let mut dot = 0.0;
                for i in 0..d {
                    dot += self.frame[a * d + i] * self.frame[b * d + i];
                }
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}
