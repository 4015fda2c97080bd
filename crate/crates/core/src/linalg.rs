//! Small dense complex linear algebra.
//!
//! Everything here works on row-major `d x d` matrices with `d` in the
//! single digits. The eigensolver is a cyclic complex Jacobi iteration and
//! singular values come from one-sided (Hestenes) Jacobi, both of which are
//! accurate to a few ulps at these sizes.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Maximum number of Jacobi sweeps before giving up.
pub const MAX_SWEEPS: usize = 100;
/// Relative off-diagonal norm at which a Jacobi iteration is converged.
pub const OFF_DIAG_TOL: f64 = 1e-14;
/// Eigenvalues closer than this are treated as one degenerate cluster.
pub const DEGENERACY_GAP: f64 = 1e-9;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::Shape {
                dim,
                expected: dim * dim,
                got: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from real rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let data: Vec<C64> = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::new(dim, data)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// `|u><v|`
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        assert_eq!(u.len(), v.len(), "outer product of mismatched vectors");
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    /// Entrywise complex conjugate in the stored basis.
    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// `Tr(A B)` without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> C64 {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut acc = ZERO;
        for i in 0..d {
            for k in 0..d {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn hs_norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hs_norm(&self) -> f64 {
        self.hs_norm_sq().sqrt()
    }

    pub fn hs_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (m, n) = (self.dim, other.dim);
        Self::from_fn(m * n, |i, j| self[(i / n, j / n)] * other[(i % n, j % n)])
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|k| self[(i, k)] * v[k]).sum())
            .collect()
    }

    /// `<u|M|v>`
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> C64 {
        inner(u, &self.apply(v))
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            write!(f, "[")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:+.6e}{:+.6e}i", z.re, z.im)?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// `<u|v>`, antilinear in the first argument.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian operator. Construction symmetrizes the input as `(H + H^†)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Self {
        let adj = matrix.adjoint();
        let mut sym = (&matrix + &adj).scale_real(0.5);
        for i in 0..sym.dim {
            sym[(i, i)].im = 0.0;
        }
        Self { matrix: sym }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self {
            matrix: ComplexMatrix::diagonal(values),
        }
    }

    /// Rank-1 projector `|v><v|`.
    pub fn projector_onto(v: &StateVector) -> Self {
        Self::new(ComplexMatrix::outer(v.amplitudes(), v.amplitudes()))
    }

    /// Orthogonal projector onto the span of orthonormal `basis` vectors.
    pub fn projector_onto_span(dim: usize, basis: &[StateVector]) -> Self {
        let mut acc = ComplexMatrix::zeros(dim);
        for v in basis {
            acc = &acc + &ComplexMatrix::outer(v.amplitudes(), v.amplitudes());
        }
        Self::new(acc)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `||H^2 - H||_HS`
    pub fn idempotence_residual(&self) -> f64 {
        (&(&self.matrix * &self.matrix) - &self.matrix).hs_norm()
    }

    /// `<v|H|v>`, real by hermiticity.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        self.matrix.sandwich(v, v).re
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.matrix + &other.matrix)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale_real(s),
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::new(self.matrix.kron(&other.matrix))
    }
}

/// Unit vector with a fixed global phase: the first component of largest
/// magnitude is real and non-negative.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Normalizes `amplitudes` and applies the phase convention.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("state vector"));
        }
        let norm = vec_norm(&amplitudes);
        if amplitudes.is_empty() || norm < 1e-300 {
            return Err(Error::ZeroVector);
        }
        let mut amplitudes: Vec<C64> = amplitudes.into_iter().map(|z| z / norm).collect();
        fix_phase(&mut amplitudes);
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Standard basis vector `|k>`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut a = vec![ZERO; dim];
        a[k] = ONE;
        Self { amplitudes: a }
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn projector(&self) -> HermitianOperator {
        HermitianOperator::projector_onto(self)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        let mut out = Self { amplitudes: amps };
        fix_phase(&mut out.amplitudes);
        out
    }
}

/// Rotates `v` so its largest-magnitude entry (lowest index on ties) is real
/// and positive.
fn fix_phase(v: &mut [C64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max - 1e-12)
        .expect("a maximal entry exists");
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[pivot] = C64::new(v[pivot].norm(), 0.0);
}

/// Complex Jacobi rotation annihilating the `(p, q)` entry of the Hermitian
/// 2x2 block `[[app, apq], [conj(apq), aqq]]`.
///
/// Returns the four entries `(J_pp, J_pq, J_qp, J_qq)` of the unitary `J`
/// such that `J^† A J` is diagonal on that block.
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> (C64, C64, C64, C64) {
    let r = apq.norm();
    let phase = apq / r;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    (
        C64::new(c, 0.0),
        C64::new(s, 0.0),
        -phase.conj() * s,
        phase.conj() * c,
    )
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let d = a.dim;
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigendecomposition of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal, phase-fixed, in the order of `values`.
    pub vectors: Vec<StateVector>,
}

/// Cyclic Jacobi eigendecomposition with eigenvalues in ascending order.
///
/// Eigenvectors inside a degenerate cluster (gap below [`DEGENERACY_GAP`])
/// are re-orthonormalized with Gram-Schmidt; every eigenvector then has its
/// phase fixed.
pub fn hermitian_eig(h: &HermitianOperator) -> Result<Eigen> {
    let d = h.dim();
    let mut a = h.matrix.clone();
    let mut v = ComplexMatrix::identity(d);
    let scale = a.hs_norm().max(f64::MIN_POSITIVE);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= OFF_DIAG_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[(p, q)];
                if apq.norm() < 1e-300 {
                    continue;
                }
                let (jpp, jpq, jqp, jqq) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                // A <- A J
                for k in 0..d {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                // A <- J^† A
                for k in 0..d {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                // V <- V J
                for k in 0..d {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > OFF_DIAG_TOL * scale {
        return Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            off_norm: off_diagonal_norm(&a),
            matrix: h.matrix.to_string(),
        });
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut columns: Vec<Vec<C64>> = order.iter().map(|&i| v.column(i)).collect();

    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && values[end] - values[end - 1] < DEGENERACY_GAP {
            end += 1;
        }
        if end - start > 1 {
            gram_schmidt(&mut columns[start..end])?;
        }
        start = end;
    }

    let vectors = columns
        .into_iter()
        .map(StateVector::new)
        .collect::<Result<Vec<_>>>()?;
    Ok(Eigen { values, vectors })
}

/// Modified Gram-Schmidt, two passes.
pub fn gram_schmidt(vectors: &mut [Vec<C64>]) -> Result<()> {
    for k in 0..vectors.len() {
        for _pass in 0..2 {
            for j in 0..k {
                let (head, tail) = vectors.split_at_mut(k);
                let proj = inner(&head[j], &tail[0]);
                for (x, b) in tail[0].iter_mut().zip(&head[j]) {
                    *x -= proj * b;
                }
            }
        }
        let n = vec_norm(&vectors[k]);
        if n < 1e-300 {
            return Err(Error::ZeroVector);
        }
        for x in vectors[k].iter_mut() {
            *x /= n;
        }
    }
    Ok(())
}

/// Singular values of the matrix whose columns are `columns` (all the same
/// length), in descending order, via one-sided Jacobi. One value is returned
/// per column.
pub fn singular_values_of_columns(mut columns: Vec<Vec<C64>>) -> Vec<f64> {
    let n = columns.len();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = columns[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = columns[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner(&columns[p], &columns[q]);
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() || gamma.norm() < 1e-300 {
                    continue;
                }
                rotated = true;
                let (jpp, jpq, jqp, jqq) = jacobi_rotation(alpha, beta, gamma);
                let (left, right) = columns.split_at_mut(q);
                for (xp, xq) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (a, b) = (*xp, *xq);
                    *xp = a * jpp + b * jqp;
                    *xq = a * jpq + b * jqq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = columns.iter().map(|c| vec_norm(c)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Largest singular value `sigma_max(M)`.
pub fn largest_singular_value(m: &ComplexMatrix) -> f64 {
    let cols = (0..m.dim).map(|j| m.column(j)).collect();
    singular_values_of_columns(cols)[0]
}

/// Tolerance on `||P^2 - P||_HS` accepted as a projector.
pub const PROJECTOR_TOL: f64 = 1e-10;

/// Squared Hilbert-Schmidt norm of the commutator `[P, Q]` of two projectors.
pub fn commutator_hs_norm_sq(p: &HermitianOperator, q: &HermitianOperator) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    for op in [p, q] {
        let residual = op.idempotence_residual();
        if residual > PROJECTOR_TOL {
            return Err(Error::NotProjector { residual });
        }
    }
    Ok(p.matrix().commutator(q.matrix()).hs_norm_sq())
}
