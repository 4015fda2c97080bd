//! The overlap matrix `T_ij = Tr[(P_i Q_j)^2] / d` of two projector families
//! and its contractions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    commutator_hs_norm_sq, inner, largest_singular_value, singular_values_of_columns,
};
use crate::projectors::{Label, LabeledProjector, ProjectorFamily};

/// Entries above `-NEGATIVE_CLAMP` are rounding noise and clamp to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-12;
/// `|E - c_mu^2|` below this counts as saturation.
pub const SATURATION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct OverlapMatrix {
    /// Row `i` belongs to the left member `i`.
    pub entries: Vec<Vec<f64>>,
    pub dim: usize,
    pub left_labels: Vec<Label>,
    pub right_labels: Vec<Label>,
}

impl OverlapMatrix {
    /// `E = Σ_ij T_ij`
    pub fn total(&self) -> f64 {
        self.entries.iter().flatten().sum()
    }
}

/// `Tr[(P Q)^2] / d`, clamped to its exact range `[0, min(rank P, rank Q) / d]`.
pub fn pair_overlap(p: &LabeledProjector, q: &LabeledProjector) -> Result<f64> {
    let d = p.dim();
    let pq = p.matrix() * q.matrix();
    let raw = pq.trace_of_product(&pq).re / d as f64;
    if raw < -NEGATIVE_CLAMP {
        return Err(Error::NegativeOverlap { value: raw });
    }
    Ok(raw.clamp(0.0, p.rank().min(q.rank()) as f64 / d as f64))
}

pub fn overlap_matrix(left: &ProjectorFamily, right: &ProjectorFamily) -> Result<OverlapMatrix> {
    if left.dim() != right.dim() {
        return Err(Error::DimensionMismatch {
            left: left.dim(),
            right: right.dim(),
        });
    }
    let entries = left
        .members()
        .iter()
        .map(|p| {
            right
                .members()
                .iter()
                .map(|q| pair_overlap(p, q))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OverlapMatrix {
        entries,
        dim: left.dim(),
        left_labels: left.members().iter().map(|m| m.label().clone()).collect(),
        right_labels: right.members().iter().map(|m| m.label().clone()).collect(),
    })
}

/// Configuration-level scalars of one context.
#[derive(Clone, Debug, Serialize)]
pub struct ContextInvariants {
    /// Mutual information energy `Σ T_ij`.
    pub e: f64,
    /// `-log2 E`
    pub s2_bits: f64,
    /// Largest singular value of any `P_i Q_j`.
    pub c_mu: f64,
    pub saturated: bool,
    /// Pooled over all `(i, j)` pairs, row-major.
    pub principal_angles: Vec<f64>,
    pub overlap: OverlapMatrix,
}

pub fn context_invariants(
    left: &ProjectorFamily,
    right: &ProjectorFamily,
) -> Result<ContextInvariants> {
    let overlap = overlap_matrix(left, right)?;
    let e = overlap.total();
    let s2_bits = -e.log2();
    let mut c_mu: f64 = 0.0;
    let mut principal = Vec::new();
    for p in left.members() {
        for q in right.members() {
            c_mu = c_mu.max(largest_singular_value(&(p.matrix() * q.matrix())));
            principal.extend(principal_angles(p, q));
        }
    }
    Ok(ContextInvariants {
        e,
        s2_bits,
        c_mu,
        saturated: (e - c_mu * c_mu).abs() <= SATURATION_TOL,
        principal_angles: principal,
        overlap,
    })
}

/// Principal angles between the ranges of `p` and `q`, ascending.
///
/// There are `min(rank p, rank q)` of them. Cosines are the singular values
/// of `U^† V` for orthonormal range bases `U`, `V`; sines are the singular
/// values of `(1 - U U^†) V`. Angles below pi/4 are taken from the sine so
/// that near-zero angles keep full precision.
pub fn principal_angles(p: &LabeledProjector, q: &LabeledProjector) -> Vec<f64> {
    let (u, v) = (p.basis(), q.basis());
    let count = u.len().min(v.len());
    if count == 0 {
        return Vec::new();
    }
    let overlaps: Vec<Vec<_>> = v
        .iter()
        .map(|vj| {
            u.iter()
                .map(|ui| inner(ui.amplitudes(), vj.amplitudes()))
                .collect()
        })
        .collect();
    let residuals = v
        .iter()
        .zip(&overlaps)
        .map(|(vj, coeffs)| {
            let mut r = vj.amplitudes().to_vec();
            for (ui, c) in u.iter().zip(coeffs) {
                for (x, b) in r.iter_mut().zip(ui.amplitudes()) {
                    *x -= c * b;
                }
            }
            r
        })
        .collect();
    let cosines = singular_values_of_columns(overlaps);
    let mut sines = singular_values_of_columns(residuals);
    sines.reverse();
    let mut angles: Vec<f64> = cosines
        .into_iter()
        .zip(sines)
        .take(count)
        .map(|(c, s)| {
            let (c, s) = (c.clamp(0.0, 1.0), s.clamp(0.0, 1.0));
            if c > std::f64::consts::FRAC_1_SQRT_2 {
                s.asin()
            } else {
                c.acos()
            }
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    angles
}

/// `|(1 - E) - (2d)^{-1} Σ_ij ||[P_i, Q_j]||^2_HS|`, both sides evaluated
/// independently.
pub fn commutator_identity_residual(
    left: &ProjectorFamily,
    right: &ProjectorFamily,
) -> Result<f64> {
    let (lhs, rhs) = commutator_identity_sides(left, right)?;
    Ok((lhs - rhs).abs())
}

/// `(1 - E, (2d)^{-1} Σ_ij ||[P_i, Q_j]||^2_HS)`
pub fn commutator_identity_sides(
    left: &ProjectorFamily,
    right: &ProjectorFamily,
) -> Result<(f64, f64)> {
    let e = overlap_matrix(left, right)?.total();
    let d = left.dim() as f64;
    let mut sum = 0.0;
    for p in left.members() {
        for q in right.members() {
            sum += commutator_hs_norm_sq(p.projector(), q.projector())?;
        }
    }
    Ok((1.0 - e, sum / (2.0 * d)))
}
