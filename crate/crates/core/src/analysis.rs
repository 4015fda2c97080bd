//! Multi-context composition, additive-exactness checks, coarse-graining
//! fuzzing and the odd-cycle scan.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{gram_schmidt, ComplexMatrix, StateVector, C64};
use crate::overlap::{context_invariants, overlap_matrix, pair_overlap, ContextInvariants};
use crate::projectors::{coarse_grain, ProjectorFamily};
use crate::scenarios::{build_ncycle, Scenario};

/// HS distance under which two projectors are the same member.
pub const DUPLICATE_TOL: f64 = 1e-10;
/// Duplicate contributions at or below this count as zero.
pub const ZERO_CONTRIBUTION_TOL: f64 = 1e-12;
/// `ΔE` below `-MONOTONICITY_TOL` is a violation; `|ΔE|` within it is equality.
pub const MONOTONICITY_TOL: f64 = 1e-12;
/// Bound on `max_j ||P_i Q_j P_i'||_HS` expected at equality.
pub const EQUALITY_CONDITION_TOL: f64 = 1e-8;

pub const DEFAULT_DIMS: [usize; 4] = [3, 4, 5, 6];
pub const DEFAULT_FAMILY_SIZES: [usize; 4] = [4, 5, 6, 8];

/// Per-context invariants in context order.
pub fn context_table(scenario: &Scenario) -> Result<Vec<ContextInvariants>> {
    scenario
        .contexts()
        .iter()
        .map(|c| context_invariants(&c.left_family, &c.right_family))
        .collect()
}

/// `Σ_α S2(G_α) = -log2 Π_α E(G_α)`
pub fn s2_total(scenario: &Scenario) -> Result<f64> {
    scenario.contexts().iter().try_fold(0.0, |acc, c| {
        Ok(acc
            - overlap_matrix(&c.left_family, &c.right_family)?
                .total()
                .log2())
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExactnessMechanism {
    /// No ordered pair appears in more than one context.
    DistinctBases,
    /// Every repeated pair contributes zero.
    CyclicOrthogonality,
    Inexact,
}

#[derive(Clone, Debug, Serialize)]
pub struct DuplicatePair {
    pub context: usize,
    pub left: usize,
    pub right: usize,
    /// Context holding the first occurrence.
    pub first_context: usize,
    pub contribution: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactnessReport {
    pub total_ordered_pairs: usize,
    pub duplicate_count: usize,
    pub duplicate_contributions: Vec<f64>,
    pub duplicates: Vec<DuplicatePair>,
    pub mechanism: ExactnessMechanism,
    pub s2_total_bits: f64,
}

/// Enumerates every ordered `(left member, right member)` pair over all
/// contexts and flags pairs whose two members both coincide with an earlier
/// pair's.
pub fn verify_exactness(scenario: &Scenario) -> Result<ExactnessReport> {
    struct Seen<'a> {
        context: usize,
        p: &'a ComplexMatrix,
        q: &'a ComplexMatrix,
    }
    let mut seen: Vec<Seen> = Vec::new();
    let mut duplicates = Vec::new();
    for (a, ctx) in scenario.contexts().iter().enumerate() {
        for (i, p) in ctx.left_family.members().iter().enumerate() {
            for (j, q) in ctx.right_family.members().iter().enumerate() {
                let first = seen.iter().find(|s| {
                    s.p.hs_distance(p.matrix()) <= DUPLICATE_TOL
                        && s.q.hs_distance(q.matrix()) <= DUPLICATE_TOL
                });
                if let Some(first) = first {
                    duplicates.push(DuplicatePair {
                        context: a,
                        left: i,
                        right: j,
                        first_context: first.context,
                        contribution: pair_overlap(p, q)?,
                    });
                }
                seen.push(Seen {
                    context: a,
                    p: p.matrix(),
                    q: q.matrix(),
                });
            }
        }
    }
    let contributions: Vec<f64> = duplicates.iter().map(|d| d.contribution).collect();
    let mechanism = if duplicates.is_empty() {
        ExactnessMechanism::DistinctBases
    } else if contributions.iter().all(|&c| c <= ZERO_CONTRIBUTION_TOL) {
        ExactnessMechanism::CyclicOrthogonality
    } else {
        ExactnessMechanism::Inexact
    };
    Ok(ExactnessReport {
        total_ordered_pairs: seen.len(),
        duplicate_count: duplicates.len(),
        duplicate_contributions: contributions,
        duplicates,
        mechanism,
        s2_total_bits: s2_total(scenario)?,
    })
}

/// Haar-random orthonormal basis of `C^d`: Gram-Schmidt on the columns of a
/// complex Gaussian matrix (QR with a positive-diagonal `R`).
pub fn haar_basis<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Vec<StateVector>> {
    let mut columns: Vec<Vec<C64>> = (0..d)
        .map(|_| {
            (0..d)
                .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect()
        })
        .collect();
    gram_schmidt(&mut columns)?;
    columns.into_iter().map(StateVector::new).collect()
}

/// Haar-random rank-1 family, randomly merged down to `size` members when
/// `size < d`.
pub fn random_family<R: Rng + ?Sized>(
    d: usize,
    size: usize,
    rng: &mut R,
) -> Result<ProjectorFamily> {
    let mut family = ProjectorFamily::from_orthonormal_basis(haar_basis(d, rng)?)?;
    while family.len() > size.max(1) {
        let (i, j) = distinct_pair(family.len(), rng);
        family = coarse_grain(&family, i, j)?;
    }
    Ok(family)
}

fn distinct_pair<R: Rng + ?Sized>(len: usize, rng: &mut R) -> (usize, usize) {
    let i = rng.gen_range(0..len);
    let mut j = rng.gen_range(0..len - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// One coarse-graining trial.
#[derive(Clone, Debug, Serialize)]
pub struct MergeTrial {
    pub trial: u64,
    pub dim: usize,
    pub left_size: usize,
    pub merged: (usize, usize),
    pub delta_e: f64,
    /// `2 Σ_j Tr[P_i Q_j P_i' Q_j] / d`, evaluated independently of `delta_e`.
    pub cross_term: f64,
    /// `max_j ||P_i Q_j P_i'||_HS`
    pub max_sandwich_norm: f64,
}

/// Draws two Haar-random families and merges a random pair in the left one.
/// Trial `t` is seeded with `seed ^ t`.
pub fn merge_trial(
    trial: u64,
    dims: &[usize],
    family_sizes: &[usize],
    seed: u64,
) -> Result<MergeTrial> {
    if dims.is_empty() || family_sizes.is_empty() {
        return Err(Error::InvalidArgument(
            "empty dimension or size list".into(),
        ));
    }
    if let Some(&d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidArgument(format!(
            "dimension {d} admits no merge"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ trial);
    let d = dims[rng.gen_range(0..dims.len())];
    let size = family_sizes[rng.gen_range(0..family_sizes.len())].clamp(2, d);
    let left = random_family(d, size, &mut rng)?;
    let right = random_family(d, d, &mut rng)?;
    let (i, j) = distinct_pair(left.len(), &mut rng);
    let merged = coarse_grain(&left, i, j)?;

    let before = overlap_matrix(&left, &right)?.total();
    let after = overlap_matrix(&merged, &right)?.total();

    let (pi, pj) = (left.members()[i].matrix(), left.members()[j].matrix());
    let mut cross = 0.0;
    let mut max_sandwich: f64 = 0.0;
    for q in right.members() {
        let q = q.matrix();
        let sandwich = &(pi * q) * pj;
        cross += sandwich.trace_of_product(q).re;
        max_sandwich = max_sandwich.max(sandwich.hs_norm());
    }
    Ok(MergeTrial {
        trial,
        dim: d,
        left_size: left.len(),
        merged: (i, j),
        delta_e: after - before,
        cross_term: 2.0 * cross / d as f64,
        max_sandwich_norm: max_sandwich,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub trials: usize,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub family_sizes: Vec<usize>,
    /// Trials with `ΔE < -MONOTONICITY_TOL`.
    pub violations: usize,
    /// Most negative `ΔE` seen, or 0.
    pub max_negative_delta: f64,
    /// Trials with `|ΔE| <= MONOTONICITY_TOL`.
    pub equality_cases: usize,
    /// Equality cases whose sandwich norm exceeds `EQUALITY_CONDITION_TOL`.
    pub equality_condition_failures: usize,
    pub min_delta: f64,
    /// `max |ΔE - cross term|` over all trials.
    pub max_cross_term_residual: f64,
}

/// Coarse-graining fuzz. Results depend only on the arguments, not on the
/// thread count.
pub fn verify_coarse_graining(
    trials: usize,
    dims: &[usize],
    family_sizes: &[usize],
    seed: u64,
) -> Result<MonotonicityReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    let results = (0..trials as u64)
        .into_par_iter()
        .map(|t| merge_trial(t, dims, family_sizes, seed))
        .collect::<Result<Vec<_>>>()?;

    let mut report = MonotonicityReport {
        trials,
        seed,
        dims: dims.to_vec(),
        family_sizes: family_sizes.to_vec(),
        violations: 0,
        max_negative_delta: 0.0,
        equality_cases: 0,
        equality_condition_failures: 0,
        min_delta: f64::INFINITY,
        max_cross_term_residual: 0.0,
    };
    for r in &results {
        report.min_delta = report.min_delta.min(r.delta_e);
        report.max_negative_delta = report.max_negative_delta.min(r.delta_e);
        if r.delta_e < -MONOTONICITY_TOL {
            report.violations += 1;
        }
        if r.delta_e.abs() <= MONOTONICITY_TOL {
            report.equality_cases += 1;
            if r.max_sandwich_norm > EQUALITY_CONDITION_TOL {
                report.equality_condition_failures += 1;
            }
        }
        report.max_cross_term_residual = report
            .max_cross_term_residual
            .max((r.delta_e - r.cross_term).abs());
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct NCycleRow {
    pub n: usize,
    pub theta_deg: f64,
    /// Per-context `E`; all contexts agree by rotational symmetry.
    pub e: f64,
    pub s2_per_context: f64,
    pub s2_total: f64,
    pub n2_s2: f64,
    /// `max_α |c_mu(G_α) - 1|`
    pub c_mu_max_deviation: f64,
    /// `max_α |E(G_α) - E(G_0)|`
    pub e_spread: f64,
}

pub fn ncycle_row(n: usize) -> Result<NCycleRow> {
    let scenario = build_ncycle(n)?;
    let theta_deg = match scenario.params() {
        crate::scenarios::ScenarioParams::NCycle(cfg) => cfg.theta_degrees(),
        _ => unreachable!("build_ncycle returns an n-cycle"),
    };
    let table = scenario
        .contexts()
        .par_iter()
        .map(|c| context_invariants(&c.left_family, &c.right_family).map(|inv| (inv.e, inv.c_mu)))
        .collect::<Result<Vec<_>>>()?;
    let e = table[0].0;
    let s2_total: f64 = table.iter().map(|(e, _)| -e.log2()).sum();
    let s2 = -e.log2();
    Ok(NCycleRow {
        n,
        theta_deg,
        e,
        s2_per_context: s2,
        s2_total,
        n2_s2: (n * n) as f64 * s2,
        c_mu_max_deviation: table
            .iter()
            .map(|(_, c)| (c - 1.0).abs())
            .fold(0.0, f64::max),
        e_spread: table.iter().map(|(x, _)| (x - e).abs()).fold(0.0, f64::max),
    })
}

pub fn ncycle_scan(n_values: &[usize]) -> Result<Vec<NCycleRow>> {
    n_values.iter().map(|&n| ncycle_row(n)).collect()
}

/// `8 π² / (3 ln 2)`, the large-`n` limit of `n² S2` per context.
pub fn ncycle_asymptote() -> f64 {
    8.0 * std::f64::consts::PI.powi(2) / (3.0 * std::f64::consts::LN_2)
}

/// Extrapolates `f(n)` to `n -> ∞` by polynomial interpolation in `h = 1/n`
/// evaluated at `h = 0`.
pub fn richardson_extrapolate(points: &[(usize, f64)]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("no points to extrapolate".into()));
    }
    let h: Vec<f64> = points.iter().map(|&(n, _)| 1.0 / n as f64).collect();
    let mut total = 0.0;
    for (i, &(_, fi)) in points.iter().enumerate() {
        let mut weight = 1.0;
        for (j, &hj) in h.iter().enumerate() {
            if i != j {
                if hj == h[i] {
                    return Err(Error::InvalidArgument("repeated abscissa".into()));
                }
                weight *= hj / (hj - h[i]);
            }
        }
        total += weight * fi;
    }
    Ok(total)
}
