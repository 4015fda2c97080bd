//! State-dependent witnesses: the cycle correlator, its contextual
//! fraction, the entropic cycle inequalities, the commutator witness and the
//! Maassen-Uffink bound.

use serde::Serialize;

use crate::analysis::s2_total;
use crate::error::{Error, Result};
use crate::linalg::HermitianOperator;
use crate::overlap::context_invariants;
use crate::projectors::{spectral_projectors, COMMUTE_TOL, LABEL_TOL};
use crate::scenarios::{CorrelatorBounds, Scenario};
use crate::states::DensityMatrix;

/// Probabilities at or below this are dropped from Shannon sums.
pub const ENTROPY_CUTOFF: f64 = 1e-14;
/// Allowed drift of a distribution's total before it is an error.
pub const NORMALIZATION_TOL: f64 = 1e-10;
/// Commutator witness values below this are reported as exactly zero.
pub const D_ZERO_TOL: f64 = 1e-9;
/// Maassen-Uffink bounds at or below this count as trivial.
pub const MU_TRIVIAL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    /// `(outcome values, probability)`, one value per measured observable.
    pub outcomes: Vec<(Vec<f64>, f64)>,
    pub arity: usize,
}

impl OutcomeDistribution {
    fn from_raw(outcomes: Vec<(Vec<f64>, f64)>, arity: usize) -> Result<Self> {
        let mut outcomes: Vec<_> = outcomes.into_iter().map(|(v, p)| (v, p.max(0.0))).collect();
        let total: f64 = outcomes.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Numerical(format!(
                "outcome probabilities sum to {total}, not 1"
            )));
        }
        for (_, p) in &mut outcomes {
            *p /= total;
        }
        Ok(Self { outcomes, arity })
    }

    pub fn total(&self) -> f64 {
        self.outcomes.iter().map(|(_, p)| p).sum()
    }

    /// Marginal on component `axis`, outcome values in first-seen order.
    pub fn marginal(&self, axis: usize) -> Result<Self> {
        if axis >= self.arity {
            return Err(Error::IndexOutOfRange {
                index: axis,
                len: self.arity,
            });
        }
        let mut merged: Vec<(Vec<f64>, f64)> = Vec::new();
        for (values, p) in &self.outcomes {
            let v = values[axis];
            match merged
                .iter_mut()
                .find(|(w, _)| (w[0] - v).abs() <= LABEL_TOL)
            {
                Some((_, q)) => *q += p,
                None => merged.push((vec![v], *p)),
            }
        }
        Ok(Self {
            outcomes: merged,
            arity: 1,
        })
    }

    /// Shannon entropy in bits.
    pub fn entropy_bits(&self) -> f64 {
        shannon_bits(self.outcomes.iter().map(|(_, p)| *p))
    }

    /// Total probability of outcomes matching `values` within `LABEL_TOL`.
    pub fn probability(&self, values: &[f64]) -> f64 {
        self.outcomes
            .iter()
            .filter(|(v, _)| {
                v.len() == values.len()
                    && v.iter()
                        .zip(values)
                        .all(|(a, b)| (a - b).abs() <= LABEL_TOL)
            })
            .map(|(_, p)| p)
            .sum()
    }
}

/// `-Σ p log2 p` over `p > ENTROPY_CUTOFF`.
pub fn shannon_bits(probabilities: impl IntoIterator<Item = f64>) -> f64 {
    probabilities
        .into_iter()
        .filter(|&p| p > ENTROPY_CUTOFF)
        .map(|p| -p * p.log2())
        .sum()
}

fn check_dim(op: &HermitianOperator, rho: &DensityMatrix) -> Result<()> {
    if op.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: op.dim(),
            right: rho.dim(),
        });
    }
    Ok(())
}

/// Single-observable outcome distribution `Tr[P_a rho]`.
pub fn distribution(a: &HermitianOperator, rho: &DensityMatrix) -> Result<OutcomeDistribution> {
    check_dim(a, rho)?;
    let raw = spectral_projectors(a)?
        .into_iter()
        .map(|(value, p)| (vec![value], rho.expectation(p.matrix())))
        .collect();
    OutcomeDistribution::from_raw(raw, 1)
}

/// `p(a, b) = Tr[P_a P_b rho]` over the spectral projectors of two commuting
/// observables.
pub fn joint_distribution(
    a: &HermitianOperator,
    b: &HermitianOperator,
    rho: &DensityMatrix,
) -> Result<OutcomeDistribution> {
    check_dim(a, rho)?;
    check_dim(b, rho)?;
    let norm = a.matrix().commutator(b.matrix()).hs_norm();
    if norm > COMMUTE_TOL {
        return Err(Error::NonCommuting { norm });
    }
    let pa = spectral_projectors(a)?;
    let pb = spectral_projectors(b)?;
    let mut raw = Vec::with_capacity(pa.len() * pb.len());
    for (va, p) in &pa {
        for (vb, q) in &pb {
            let pq = p.matrix() * q.matrix();
            raw.push((vec![*va, *vb], rho.expectation(&pq)));
        }
    }
    OutcomeDistribution::from_raw(raw, 2)
}

fn check_cycle(scenario: &Scenario, rho: &DensityMatrix) -> Result<()> {
    if scenario.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: scenario.dim(),
            right: rho.dim(),
        });
    }
    Ok(())
}

/// `χ = Σ_k s_k <A_k A_{k+1}>` with `s_k = -1` only at the scenario's sign-flip
/// index. Defined for 4- and 5-cycles.
pub fn cycle_correlator(scenario: &Scenario, rho: &DensityMatrix) -> Result<f64> {
    let n = scenario.n();
    if !(n == 4 || n == 5) {
        return Err(Error::UnsupportedCorrelator(n));
    }
    check_cycle(scenario, rho)?;
    let obs = scenario.observables();
    let chi = (0..n)
        .map(|k| {
            let sign = if scenario.sign_flip_index() == Some(k) {
                -1.0
            } else {
                1.0
            };
            sign * rho.expectation(&(obs[k].matrix() * obs[(k + 1) % n].matrix()))
        })
        .sum();
    Ok(chi)
}

/// `max(0, (χ_NC - χ) / (χ_NC - χ_NS))`
pub fn contextual_fraction(chi: f64, chi_nc: f64, chi_ns: f64) -> Result<f64> {
    if chi_nc == chi_ns {
        return Err(Error::InvalidArgument(format!(
            "noncontextual and no-signalling bounds coincide at {chi_nc}"
        )));
    }
    Ok(((chi_nc - chi) / (chi_nc - chi_ns)).max(0.0))
}

fn scenario_bounds(scenario: &Scenario) -> Result<CorrelatorBounds> {
    scenario
        .bounds()
        .ok_or(Error::UnsupportedCorrelator(scenario.n()))
}

/// Contextual fraction of `rho` using the scenario's own bounds.
pub fn scenario_contextual_fraction(scenario: &Scenario, rho: &DensityMatrix) -> Result<f64> {
    let bounds = scenario_bounds(scenario)?;
    contextual_fraction(
        cycle_correlator(scenario, rho)?,
        bounds.chi_nc,
        bounds.chi_ns,
    )
}

/// Entropic cycle expression with the distinguished edge `(X_k, X_{k+1})`:
///
/// `H(X_k X_{k+1}) + Σ_{j≠k,k+1} H(X_j) - Σ_{j≠k} H(X_j X_{j+1})`
///
/// Positive values violate the noncontextual bound of zero.
pub fn chaves_fritz(scenario: &Scenario, rho: &DensityMatrix, k: usize) -> Result<f64> {
    let n = scenario.n();
    if k >= n {
        return Err(Error::IndexOutOfRange { index: k, len: n });
    }
    check_cycle(scenario, rho)?;
    let obs = scenario.observables();
    let pair = |j: usize| -> Result<f64> {
        Ok(joint_distribution(&obs[j], &obs[(j + 1) % n], rho)?.entropy_bits())
    };
    let mut bc = pair(k)?;
    for (j, a) in obs.iter().enumerate() {
        if j != k && j != (k + 1) % n {
            bc += distribution(a, rho)?.entropy_bits();
        }
        if j != k {
            bc -= pair(j)?;
        }
    }
    Ok(bc)
}

/// Per-context `|Tr([A_{k-1}, A_{k+1}] rho)|` and their sum.
pub fn commutator_witness_d(scenario: &Scenario, rho: &DensityMatrix) -> Result<(Vec<f64>, f64)> {
    check_cycle(scenario, rho)?;
    let per_context: Vec<f64> = scenario
        .contexts()
        .iter()
        .map(|ctx| {
            let comm = ctx.left_obs.matrix().commutator(ctx.right_obs.matrix());
            let value = comm.trace_of_product(rho.matrix()).norm();
            if value < D_ZERO_TOL {
                0.0
            } else {
                value
            }
        })
        .collect();
    let total = per_context.iter().sum();
    Ok((per_context, total))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MuBound {
    pub bits: f64,
    pub trivial: bool,
}

/// `-2 log2 c_mu`
pub fn mu_bound(c_mu: f64) -> Result<MuBound> {
    if !(c_mu > 0.0 && c_mu <= 1.0 + 1e-10) {
        return Err(Error::InvalidArgument(format!(
            "c_mu = {c_mu} outside (0, 1]"
        )));
    }
    let bits = (-2.0 * c_mu.min(1.0).log2()).max(0.0);
    Ok(MuBound {
        bits,
        trivial: bits <= MU_TRIVIAL_TOL,
    })
}

/// KCBS mixing weight at which `χ` crosses the noncontextual bound,
/// `(3√5 + 5) / 20`.
pub fn p_star() -> f64 {
    (3.0 * 5f64.sqrt() + 5.0) / 20.0
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    /// `None` when the cycle length has no correlator convention.
    pub chi: Option<f64>,
    /// `None` when the scenario carries no correlator bounds.
    pub cf: Option<f64>,
    pub bc_values: Vec<f64>,
    pub bc_max: f64,
    pub d_per_context: Vec<f64>,
    pub d_total: f64,
    pub mu_bound_bits: Vec<f64>,
    pub mu_trivial: Vec<bool>,
    /// Bound from the largest `c_mu` over contexts.
    pub mu_bound_scenario_bits: f64,
    pub s2_total_bits: f64,
}

pub fn witness_report(scenario: &Scenario, rho: &DensityMatrix) -> Result<WitnessReport> {
    let chi = match cycle_correlator(scenario, rho) {
        Ok(chi) => Some(chi),
        Err(Error::UnsupportedCorrelator(_)) => None,
        Err(e) => return Err(e),
    };
    let cf = match (chi, scenario.bounds()) {
        (Some(chi), Some(b)) => Some(contextual_fraction(chi, b.chi_nc, b.chi_ns)?),
        _ => None,
    };
    let bc_values = (0..scenario.n())
        .map(|k| chaves_fritz(scenario, rho, k))
        .collect::<Result<Vec<_>>>()?;
    let bc_max = bc_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (d_per_context, d_total) = commutator_witness_d(scenario, rho)?;
    let mut bounds = Vec::new();
    let mut c_max: f64 = 0.0;
    for ctx in scenario.contexts() {
        let inv = context_invariants(&ctx.left_family, &ctx.right_family)?;
        c_max = c_max.max(inv.c_mu);
        bounds.push(mu_bound(inv.c_mu)?);
    }
    Ok(WitnessReport {
        chi,
        cf,
        bc_values,
        bc_max,
        d_per_context,
        d_total,
        mu_bound_bits: bounds.iter().map(|b| b.bits).collect(),
        mu_trivial: bounds.iter().map(|b| b.trivial).collect(),
        mu_bound_scenario_bits: mu_bound(c_max)?.bits,
        s2_total_bits: s2_total(scenario)?,
    })
}
