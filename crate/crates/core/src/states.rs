//! Density matrices and the named state families.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, HermitianOperator, StateVector};
use crate::scenarios::spin1_operators;

pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Names accepted by [`named_state`].
pub const STATE_NAMES: [&str; 7] = ["mixed3", "0z", "0x", "+1z", "-1z", "+1x", "phi_plus"];

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: HermitianOperator,
}

impl DensityMatrix {
    /// Checks unit trace and positivity.
    pub fn new(matrix: HermitianOperator) -> Result<Self> {
        let tr = matrix.matrix().trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let eig = hermitian_eig(&matrix)?;
        if let Some(&min) = eig.values.first() {
            if min < -POSITIVITY_TOL {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(Self { matrix })
    }

    pub fn pure(v: &StateVector) -> Self {
        Self {
            matrix: v.projector(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: HermitianOperator::identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// `p rho_a + (1 - p) rho_b`
    pub fn mix(p: f64, a: &Self, b: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "mixing weight {p} outside [0, 1]"
            )));
        }
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                left: a.dim(),
                right: b.dim(),
            });
        }
        Self::new(a.matrix.scale(p).add(&b.matrix.scale(1.0 - p)))
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.matrix
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.matrix.matrix()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `Re Tr(O rho)`
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        op.trace_of_product(self.matrix()).re
    }

    pub fn purity(&self) -> f64 {
        self.matrix().trace_of_product(self.matrix()).re
    }

    /// Time reversal as entrywise complex conjugation in the stored basis.
    pub fn time_reversed(&self) -> Self {
        Self {
            matrix: HermitianOperator::new(self.matrix().conj()),
        }
    }

    /// Spin-1 time reversal `exp(-i pi S_y) K` in the `{|+1>, |0>, |-1>}`
    /// basis. Unlike bare conjugation it maps `|+1_z>` to `|-1_z>`.
    pub fn spin1_time_reversed(&self) -> Result<Self> {
        if self.dim() != 3 {
            return Err(Error::InvalidState(format!(
                "spin-1 time reversal needs d = 3, got {}",
                self.dim()
            )));
        }
        let flip = ComplexMatrix::from_real_rows(&[
            &[0.0, 0.0, 1.0],
            &[0.0, -1.0, 0.0],
            &[1.0, 0.0, 0.0],
        ])?;
        let conj = self.matrix().conj();
        Ok(Self {
            matrix: HermitianOperator::new(&(&flip * &conj) * &flip.adjoint()),
        })
    }
}

/// `p |0_z><0_z| + (1 - p) 1/3`
pub fn kcbs_mixing_state(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidArgument(format!("p = {p} outside [0, 1]")));
    }
    DensityMatrix::mix(
        p,
        &DensityMatrix::pure(&StateVector::basis(3, 1)),
        &DensityMatrix::maximally_mixed(3),
    )
}

/// Pure state `cos s |0_z> + sin s |+1_z>`.
pub fn sweep_state(s: f64) -> Result<DensityMatrix> {
    let (sn, cs) = s.sin_cos();
    let v = StateVector::from_real(&[sn, cs, 0.0])?;
    Ok(DensityMatrix::pure(&v))
}

fn sx_eigenvector(index: usize) -> Result<StateVector> {
    let (sx, _, _) = spin1_operators();
    Ok(hermitian_eig(&sx)?.vectors[index].clone())
}

/// One of [`STATE_NAMES`]; `-1z` may also be spelled with a Unicode minus.
pub fn named_state(name: &str) -> Result<DensityMatrix> {
    let canonical = name.trim().replace('\u{2212}', "-");
    let state = match canonical.as_str() {
        "mixed3" => DensityMatrix::maximally_mixed(3),
        "0z" => DensityMatrix::pure(&StateVector::basis(3, 1)),
        "+1z" => DensityMatrix::pure(&StateVector::basis(3, 0)),
        "-1z" => DensityMatrix::pure(&StateVector::basis(3, 2)),
        // S_x eigenvalues ascend as -1, 0, +1.
        "0x" => DensityMatrix::pure(&sx_eigenvector(1)?),
        "+1x" => DensityMatrix::pure(&sx_eigenvector(2)?),
        "phi_plus" => DensityMatrix::pure(&StateVector::from_real(&[1.0, 0.0, 0.0, 1.0])?),
        _ => {
            return Err(Error::UnknownState {
                name: name.to_string(),
                valid: STATE_NAMES.join(", "),
            })
        }
    };
    Ok(state)
}
