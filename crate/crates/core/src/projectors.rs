//! Joint-eigenspace projector families of commuting observable pairs.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, HermitianOperator, StateVector};

/// Perturbation parameters tried, in order, when diagonalizing `A + lambda B`.
pub const LAMBDA_SCHEDULE: [f64; 4] = [0.3719, 0.2183, 0.4677, 0.0941];
/// Labels closer than this to a spectral value snap to it; two labels this
/// close are the same joint eigenspace.
pub const LABEL_TOL: f64 = 1e-6;
/// Accepted residual for `A P = a P` after grouping.
pub const LABEL_CHECK_TOL: f64 = 1e-8;
/// Accepted commutator norm for a "commuting" pair.
pub const COMMUTE_TOL: f64 = 1e-10;
/// Completeness / orthogonality tolerance for a family.
pub const FAMILY_TOL: f64 = 1e-10;

/// Identifies a family member.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Label {
    /// Joint eigenvalue pair `(a, b)`.
    Pair(f64, f64),
    /// Plain index, for families not built from observables.
    Index(usize),
    /// Result of a coarse-graining: the labels of everything merged in.
    Merged(Vec<Label>),
}

impl Label {
    fn flatten_into(self, out: &mut Vec<Label>) {
        match self {
            Label::Merged(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Pair(a, b) => write!(f, "({a:+}, {b:+})"),
            Label::Index(i) => write!(f, "#{i}"),
            Label::Merged(ls) => {
                write!(f, "{{")?;
                for (k, l) in ls.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{l}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// Orthogonal projector together with an orthonormal basis of its range.
#[derive(Clone, Debug)]
pub struct LabeledProjector {
    projector: HermitianOperator,
    basis: Vec<StateVector>,
    label: Label,
}

impl LabeledProjector {
    /// Projector onto the span of orthonormal `basis`.
    pub fn from_basis(dim: usize, basis: Vec<StateVector>, label: Label) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::InvalidFamily("empty projector basis".into()));
        }
        if let Some(v) = basis.iter().find(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: v.dim(),
            });
        }
        let projector = HermitianOperator::projector_onto_span(dim, &basis);
        let residual = projector.idempotence_residual();
        if residual > FAMILY_TOL {
            return Err(Error::NotProjector { residual });
        }
        Ok(Self {
            projector,
            basis,
            label,
        })
    }

    /// Wraps an existing projector; its range basis is recovered from the
    /// eigenvectors with eigenvalue 1.
    pub fn from_projector(projector: HermitianOperator, label: Label) -> Result<Self> {
        let residual = projector.idempotence_residual();
        if residual > FAMILY_TOL {
            return Err(Error::NotProjector { residual });
        }
        let eig = hermitian_eig(&projector)?;
        let basis: Vec<StateVector> = eig
            .values
            .iter()
            .zip(eig.vectors)
            .filter(|(&l, _)| l > 0.5)
            .map(|(_, v)| v)
            .collect();
        if basis.is_empty() {
            return Err(Error::InvalidFamily("zero projector".into()));
        }
        Ok(Self {
            projector,
            basis,
            label,
        })
    }

    pub fn projector(&self) -> &HermitianOperator {
        &self.projector
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.projector.matrix()
    }

    pub fn basis(&self) -> &[StateVector] {
        &self.basis
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn dim(&self) -> usize {
        self.projector.dim()
    }
}

/// Complete family of mutually orthogonal projectors.
#[derive(Clone, Debug)]
pub struct ProjectorFamily {
    members: Vec<LabeledProjector>,
    dim: usize,
}

impl ProjectorFamily {
    /// Validates completeness and mutual orthogonality.
    pub fn new(members: Vec<LabeledProjector>) -> Result<Self> {
        let dim = members
            .first()
            .ok_or_else(|| Error::InvalidFamily("no members".into()))?
            .dim();
        if let Some(m) = members.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: m.dim(),
            });
        }
        let mut sum = ComplexMatrix::zeros(dim);
        for m in &members {
            sum = &sum + m.matrix();
        }
        let defect = sum.hs_distance(&ComplexMatrix::identity(dim));
        if defect > FAMILY_TOL {
            return Err(Error::InvalidFamily(format!(
                "members sum to identity only within {defect:e}"
            )));
        }
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                let overlap = (a.matrix() * b.matrix()).hs_norm();
                if overlap > FAMILY_TOL {
                    return Err(Error::InvalidFamily(format!(
                        "members {} and {} overlap ({overlap:e})",
                        a.label(),
                        b.label()
                    )));
                }
            }
        }
        Ok(Self { members, dim })
    }

    /// Rank-1 family from an orthonormal basis, labeled by index.
    pub fn from_orthonormal_basis(basis: Vec<StateVector>) -> Result<Self> {
        let dim = basis.first().map(StateVector::dim).unwrap_or(0);
        let members = basis
            .into_iter()
            .enumerate()
            .map(|(k, v)| LabeledProjector::from_basis(dim, vec![v], Label::Index(k)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }

    pub fn members(&self) -> &[LabeledProjector] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.members.iter().map(LabeledProjector::rank).collect()
    }

    /// `Σ_k P_k`
    pub fn sum(&self) -> ComplexMatrix {
        self.members
            .iter()
            .fold(ComplexMatrix::zeros(self.dim), |acc, m| &acc + m.matrix())
    }

    /// Conjugates every member by `u`: `P -> U P U^†`.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        let members = self
            .members
            .iter()
            .map(|m| {
                let basis = m
                    .basis
                    .iter()
                    .map(|v| StateVector::new(u.apply(v.amplitudes())))
                    .collect::<Result<Vec<_>>>()?;
                LabeledProjector::from_basis(self.dim, basis, m.label.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }
}

/// Clusters the sorted spectrum of `h` into distinct values.
pub fn spectral_values(h: &HermitianOperator) -> Result<Vec<f64>> {
    Ok(spectral_projectors(h)?
        .into_iter()
        .map(|(v, _)| v)
        .collect())
}

/// Spectral decomposition `H = Σ_a a P_a` with eigenvalues clustered at
/// [`LABEL_TOL`]. Values ascending.
pub fn spectral_projectors(h: &HermitianOperator) -> Result<Vec<(f64, HermitianOperator)>> {
    let eig = hermitian_eig(h)?;
    let mut out = Vec::new();
    let mut start = 0;
    let n = eig.values.len();
    while start < n {
        let mut end = start + 1;
        while end < n && eig.values[end] - eig.values[end - 1] < LABEL_TOL {
            end += 1;
        }
        let value = eig.values[start..end].iter().sum::<f64>() / (end - start) as f64;
        let proj = HermitianOperator::projector_onto_span(h.dim(), &eig.vectors[start..end]);
        out.push((value, proj));
        start = end;
    }
    Ok(out)
}

fn snap(value: f64, spectrum: &[f64]) -> f64 {
    spectrum
        .iter()
        .copied()
        .min_by(|a, b| (a - value).abs().total_cmp(&(b - value).abs()))
        .filter(|s| (s - value).abs() <= LABEL_TOL)
        .unwrap_or(value)
}

fn label_order(a: &Label, b: &Label) -> Ordering {
    match (a, b) {
        (Label::Pair(a0, a1), Label::Pair(b0, b1)) => b0.total_cmp(a0).then(b1.total_cmp(a1)),
        _ => Ordering::Equal,
    }
}

/// Joint-eigenspace projectors of a commuting pair `(a, b)`.
///
/// Diagonalizes `A + lambda B`, labels each eigenvector by `(<v|A|v>, <v|B|v>)`
/// snapped to the spectra, and groups equal labels. Empty joint eigenspaces
/// are omitted. Members are sorted by label, lexicographically descending.
pub fn joint_eigenprojectors(
    a: &HermitianOperator,
    b: &HermitianOperator,
) -> Result<ProjectorFamily> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let norm = a.matrix().commutator(b.matrix()).hs_norm();
    if norm > COMMUTE_TOL {
        return Err(Error::NonCommuting { norm });
    }
    let dim = a.dim();
    let spec_a = spectral_values(a)?;
    let spec_b = spectral_values(b)?;

    for &lambda in &LAMBDA_SCHEDULE {
        let combo = a.add(&b.scale(lambda));
        let eig = hermitian_eig(&combo)?;

        let mut groups: Vec<((f64, f64), Vec<StateVector>)> = Vec::new();
        for v in eig.vectors {
            let la = snap(a.expectation(v.amplitudes()), &spec_a);
            let lb = snap(b.expectation(v.amplitudes()), &spec_b);
            match groups
                .iter_mut()
                .find(|((ga, gb), _)| (ga - la).abs() <= LABEL_TOL && (gb - lb).abs() <= LABEL_TOL)
            {
                Some((_, vs)) => vs.push(v),
                None => groups.push(((la, lb), vec![v])),
            }
        }

        let verified = groups.iter().all(|((la, lb), vs)| {
            let p = HermitianOperator::projector_onto_span(dim, vs);
            let ap = a.matrix() * p.matrix();
            let bp = b.matrix() * p.matrix();
            ap.hs_distance(&p.matrix().scale_real(*la)) <= LABEL_CHECK_TOL
                && bp.hs_distance(&p.matrix().scale_real(*lb)) <= LABEL_CHECK_TOL
        });
        if !verified {
            continue;
        }

        let mut members = groups
            .into_iter()
            .map(|((la, lb), vs)| LabeledProjector::from_basis(dim, vs, Label::Pair(la, lb)))
            .collect::<Result<Vec<_>>>()?;
        members.sort_by(|x, y| label_order(&x.label, &y.label));
        return ProjectorFamily::new(members);
    }
    Err(Error::LabelVerification)
}

/// Merges members `i` and `j` into their sum. The merged member takes the
/// position of the lower index and carries both labels.
pub fn coarse_grain(family: &ProjectorFamily, i: usize, j: usize) -> Result<ProjectorFamily> {
    let len = family.len();
    for index in [i, j] {
        if index >= len {
            return Err(Error::IndexOutOfRange { index, len });
        }
    }
    if i == j {
        return Err(Error::SelfMerge(i));
    }
    let (lo, hi) = (i.min(j), i.max(j));
    let mut members = Vec::with_capacity(len - 1);
    for (k, m) in family.members.iter().enumerate() {
        if k == lo {
            let other = &family.members[hi];
            let mut basis = m.basis.clone();
            basis.extend(other.basis.iter().cloned());
            let mut labels = Vec::new();
            m.label.clone().flatten_into(&mut labels);
            other.label.clone().flatten_into(&mut labels);
            let projector = HermitianOperator::new(m.matrix() + other.matrix());
            members.push(LabeledProjector {
                projector,
                basis,
                label: Label::Merged(labels),
            });
        } else if k != hi {
            members.push(m.clone());
        }
    }
    ProjectorFamily::new(members)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_pair_gives_three_members() {
        let a = HermitianOperator::diagonal(&[1.0, 1.0, -1.0]);
        let b = HermitianOperator::diagonal(&[1.0, -1.0, 1.0]);
        let fam = joint_eigenprojectors(&a, &b).unwrap();
        let labels: Vec<_> = fam.members().iter().map(|m| m.label().clone()).collect();
        assert_eq!(
            labels,
            vec![
                Label::Pair(1.0, 1.0),
                Label::Pair(1.0, -1.0),
                Label::Pair(-1.0, 1.0)
            ]
        );
        assert_eq!(fam.ranks(), vec![1, 1, 1]);
        for m in fam.members() {
            let Label::Pair(la, lb) = *m.label() else {
                unreachable!()
            };
            let ap = a.matrix() * m.matrix();
            assert!(ap.hs_distance(&m.matrix().scale_real(la)) < 1e-8);
            let bp = b.matrix() * m.matrix();
            assert!(bp.hs_distance(&m.matrix().scale_real(lb)) < 1e-8);
        }
    }

    #[test]
    fn higher_rank_joint_eigenspace() {
        let a = HermitianOperator::diagonal(&[1.0, 1.0, -1.0, 1.0]);
        let b = HermitianOperator::identity(4);
        let fam = joint_eigenprojectors(&a, &b).unwrap();
        assert_eq!(fam.ranks(), vec![3, 1]);
        assert_eq!(fam.ranks().iter().sum::<usize>(), 4);
    }

    #[test]
    fn non_commuting_pair_rejected() {
        let a = HermitianOperator::diagonal(&[1.0, -1.0]);
        let b = HermitianOperator::new(
            ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap(),
        );
        assert!(matches!(
            joint_eigenprojectors(&a, &b),
            Err(Error::NonCommuting { .. })
        ));
    }

    #[test]
    fn coarse_grain_full_merge_is_identity() {
        let a = HermitianOperator::diagonal(&[1.0, 1.0, -1.0]);
        let b = HermitianOperator::diagonal(&[1.0, -1.0, 1.0]);
        let fam = joint_eigenprojectors(&a, &b).unwrap();
        let once = coarse_grain(&fam, 0, 2).unwrap();
        assert_eq!(once.ranks(), vec![2, 1]);
        let twice = coarse_grain(&once, 1, 0).unwrap();
        assert_eq!(twice.len(), 1);
        assert_eq!(twice.ranks(), vec![3]);
        assert!(
            twice.members()[0]
                .matrix()
                .hs_distance(&ComplexMatrix::identity(3))
                < 1e-12
        );
        match twice.members()[0].label() {
            Label::Merged(ls) => assert_eq!(ls.len(), 3),
            other => panic!("unexpected label {other}"),
        }
    }

    #[test]
    fn coarse_grain_index_errors() {
        let fam = ProjectorFamily::from_orthonormal_basis(
            (0..3).map(|k| StateVector::basis(3, k)).collect(),
        )
        .unwrap();
        assert_eq!(coarse_grain(&fam, 1, 1).unwrap_err(), Error::SelfMerge(1));
        assert_eq!(
            coarse_grain(&fam, 0, 3).unwrap_err(),
            Error::IndexOutOfRange { index: 3, len: 3 }
        );
    }

    #[test]
    fn incomplete_family_rejected() {
        let members = (0..2)
            .map(|k| {
                LabeledProjector::from_basis(3, vec![StateVector::basis(3, k)], Label::Index(k))
            })
            .collect::<Result<Vec<_>>>()
            .unwrap();
        assert!(matches!(
            ProjectorFamily::new(members),
            Err(Error::InvalidFamily(_))
        ));
    }

    #[test]
    fn from_projector_recovers_range() {
        let p = HermitianOperator::diagonal(&[1.0, 0.0, 1.0]);
        let lp = LabeledProjector::from_projector(p, Label::Index(0)).unwrap();
        assert_eq!(lp.rank(), 2);
        assert!(LabeledProjector::from_projector(
            HermitianOperator::diagonal(&[2.0, 0.0]),
            Label::Index(0)
        )
        .is_err());
    }
}
