//! Cycle scenarios: the spin-1 odd-n-cycle (KCBS at n = 5) and the
//! two-qubit CHSH 4-cycle.
//!
//! Observables are stored 0-indexed. Context `k` is the triple
//! `{A_{k-1}, A_k, A_{k+1}}` (indices mod n) whose middle observable `A_k`
//! commutes with both neighbours; its left family is built from
//! `(A_{k-1}, A_k)` and its right family from `(A_{k+1}, A_k)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, HermitianOperator, StateVector, C64};
use crate::projectors::{joint_eigenprojectors, ProjectorFamily, COMMUTE_TOL};

/// Spin-1 generators in the `{|+1>, |0>, |-1>}` basis.
pub fn spin1_operators() -> (HermitianOperator, HermitianOperator, HermitianOperator) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    let re = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    let sx = ComplexMatrix::new(3, vec![z, re(s), z, re(s), z, re(s), z, re(s), z]).expect("3x3");
    let sy = ComplexMatrix::new(3, vec![z, im(-s), z, im(s), z, im(-s), z, im(s), z]).expect("3x3");
    (
        HermitianOperator::new(sx),
        HermitianOperator::new(sy),
        HermitianOperator::diagonal(&[1.0, 0.0, -1.0]),
    )
}

/// `S . l` for a 3-vector `l`.
pub fn spin1_along(direction: [f64; 3]) -> HermitianOperator {
    let (sx, sy, sz) = spin1_operators();
    sx.scale(direction[0])
        .add(&sy.scale(direction[1]))
        .add(&sz.scale(direction[2]))
}

/// The `m_s = 0` eigenstate of spin along a unit `direction`.
pub fn ms0_eigenstate(direction: [f64; 3]) -> Result<StateVector> {
    let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-300 {
        return Err(Error::ZeroVector);
    }
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "direction must be a unit vector (norm {norm})"
        )));
    }
    let eig = hermitian_eig(&spin1_along(direction))?;
    // Spectrum is {-1, 0, +1}; the middle one is the null vector.
    Ok(eig.vectors[1].clone())
}

/// `1 - 2|v><v|`
pub fn reflection_observable(v: &StateVector) -> HermitianOperator {
    let d = v.dim();
    HermitianOperator::new(&ComplexMatrix::identity(d) - &v.projector().matrix().scale_real(2.0))
}

/// Noncontextual bound and no-signaling extremum of the cycle correlator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CorrelatorBounds {
    pub chi_nc: f64,
    pub chi_ns: f64,
}

impl CorrelatorBounds {
    pub const KCBS: Self = Self {
        chi_nc: -3.0,
        chi_ns: -5.0,
    };
    pub const CHSH: Self = Self {
        chi_nc: 2.0,
        chi_ns: 4.0,
    };
}

/// Geometry of the spin-1 odd-n-cycle.
#[derive(Clone, Debug, Serialize)]
pub struct NCycleConfig {
    pub n: usize,
    /// Cone polar angle (radians).
    pub theta: f64,
    /// Azimuthal spacing `pi (n + 1) / n`.
    pub delta_phi: f64,
    pub axes: Vec<[f64; 3]>,
}

impl NCycleConfig {
    pub fn new(n: usize) -> Result<Self> {
        if n < 5 || n.is_multiple_of(2) {
            return Err(Error::InvalidCycleLength(n));
        }
        let delta_phi = PI * (n as f64 + 1.0) / n as f64;
        let cd = delta_phi.cos();
        let cos2 = -cd / (1.0 - cd);
        let theta = cos2.sqrt().acos();
        let (st, ct) = theta.sin_cos();
        let axes = (0..n)
            .map(|k| {
                let phi = k as f64 * delta_phi;
                [st * phi.cos(), st * phi.sin(), ct]
            })
            .collect();
        Ok(Self {
            n,
            theta,
            delta_phi,
            axes,
        })
    }

    pub fn theta_degrees(&self) -> f64 {
        self.theta.to_degrees()
    }
}

/// Measurement angles `(a0, b0, a1, b1)` in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChshConfig {
    pub a0: f64,
    pub b0: f64,
    pub a1: f64,
    pub b1: f64,
}

impl ChshConfig {
    pub fn new(a0: f64, b0: f64, a1: f64, b1: f64) -> Result<Self> {
        if ![a0, b0, a1, b1].iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("CHSH angles"));
        }
        Ok(Self { a0, b0, a1, b1 })
    }

    /// `(0, pi/4, pi/2, -pi/4)`
    pub fn bell_optimal() -> Self {
        Self {
            a0: 0.0,
            b0: PI / 4.0,
            a1: PI / 2.0,
            b1: -PI / 4.0,
        }
    }

    /// The literature angle set that violates the entropic 4-cycle inequality.
    pub fn entropic_optimal() -> Self {
        Self {
            a0: 0.0,
            b0: 0.916,
            a1: 0.524,
            b1: -2.880,
        }
    }
}

/// `cos(t) sigma_z + sin(t) sigma_x`
pub fn equatorial_pauli(t: f64) -> HermitianOperator {
    let (s, c) = t.sin_cos();
    HermitianOperator::new(ComplexMatrix::from_real_rows(&[&[c, s], &[s, -c]]).expect("2x2"))
}

#[derive(Clone, Debug)]
pub struct Context {
    pub index: usize,
    pub left_obs: HermitianOperator,
    pub mid_obs: HermitianOperator,
    pub right_obs: HermitianOperator,
    pub left_family: ProjectorFamily,
    pub right_family: ProjectorFamily,
}

impl Context {
    pub fn new(
        index: usize,
        left_obs: HermitianOperator,
        mid_obs: HermitianOperator,
        right_obs: HermitianOperator,
    ) -> Result<Self> {
        for outer in [&left_obs, &right_obs] {
            let norm = outer.matrix().commutator(mid_obs.matrix()).hs_norm();
            if norm > COMMUTE_TOL {
                return Err(Error::NonCommuting { norm });
            }
        }
        let left_family = joint_eigenprojectors(&left_obs, &mid_obs)?;
        let right_family = joint_eigenprojectors(&right_obs, &mid_obs)?;
        Ok(Self {
            index,
            left_obs,
            mid_obs,
            right_obs,
            left_family,
            right_family,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioParams {
    NCycle(NCycleConfig),
    Chsh(ChshConfig),
    Custom,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    name: String,
    observables: Vec<HermitianOperator>,
    contexts: Vec<Context>,
    sign_flip_index: Option<usize>,
    bounds: Option<CorrelatorBounds>,
    params: ScenarioParams,
}

impl Scenario {
    /// Cycle scenario over `observables` with one context per observable.
    pub fn cycle(
        name: impl Into<String>,
        observables: Vec<HermitianOperator>,
        sign_flip_index: Option<usize>,
        bounds: Option<CorrelatorBounds>,
        params: ScenarioParams,
    ) -> Result<Self> {
        let n = observables.len();
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "a cycle needs at least 3 observables, got {n}"
            )));
        }
        let contexts = (0..n)
            .map(|k| {
                Context::new(
                    k,
                    observables[(k + n - 1) % n].clone(),
                    observables[k].clone(),
                    observables[(k + 1) % n].clone(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_contexts(name, observables, contexts, sign_flip_index, bounds, params)
    }

    /// Scenario with an explicit context list (which need not follow the
    /// cyclic pattern).
    pub fn from_contexts(
        name: impl Into<String>,
        observables: Vec<HermitianOperator>,
        contexts: Vec<Context>,
        sign_flip_index: Option<usize>,
        bounds: Option<CorrelatorBounds>,
        params: ScenarioParams,
    ) -> Result<Self> {
        let dim = observables
            .first()
            .ok_or_else(|| Error::InvalidArgument("no observables".into()))?
            .dim();
        if let Some(o) = observables.iter().find(|o| o.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: o.dim(),
            });
        }
        if let Some(k) = sign_flip_index {
            if k >= observables.len() {
                return Err(Error::IndexOutOfRange {
                    index: k,
                    len: observables.len(),
                });
            }
        }
        Ok(Self {
            name: name.into(),
            observables,
            contexts,
            sign_flip_index,
            bounds,
            params,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn observables(&self) -> &[HermitianOperator] {
        &self.observables
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn dim(&self) -> usize {
        self.observables[0].dim()
    }

    /// Cycle length.
    pub fn n(&self) -> usize {
        self.observables.len()
    }

    /// Index `k` of the correlator term `<A_k A_{k+1}>` that carries a minus sign.
    pub fn sign_flip_index(&self) -> Option<usize> {
        self.sign_flip_index
    }

    pub fn bounds(&self) -> Option<CorrelatorBounds> {
        self.bounds
    }

    pub fn params(&self) -> &ScenarioParams {
        &self.params
    }
}

/// Spin-1 odd-n-cycle; `n = 5` is the KCBS pentagon and carries its
/// correlator bounds.
pub fn build_ncycle(n: usize) -> Result<Scenario> {
    let config = NCycleConfig::new(n)?;
    let observables = config
        .axes
        .iter()
        .map(|&axis| ms0_eigenstate(axis).map(|v| reflection_observable(&v)))
        .collect::<Result<Vec<_>>>()?;
    let (name, bounds) = if n == 5 {
        ("kcbs".to_string(), Some(CorrelatorBounds::KCBS))
    } else {
        (format!("{n}-cycle"), None)
    };
    Scenario::cycle(
        name,
        observables,
        None,
        bounds,
        ScenarioParams::NCycle(config),
    )
}

pub fn build_kcbs() -> Result<Scenario> {
    build_ncycle(5)
}

/// Two-qubit CHSH 4-cycle `A1 = s(a0) x 1, A2 = 1 x s(b0), A3 = s(a1) x 1,
/// A4 = 1 x s(b1)` with the minus sign on `<A3 A4>`.
pub fn build_chsh(config: ChshConfig) -> Result<Scenario> {
    let id = HermitianOperator::identity(2);
    let observables = vec![
        equatorial_pauli(config.a0).kron(&id),
        id.kron(&equatorial_pauli(config.b0)),
        equatorial_pauli(config.a1).kron(&id),
        id.kron(&equatorial_pauli(config.b1)),
    ];
    Scenario::cycle(
        "chsh",
        observables,
        Some(2),
        Some(CorrelatorBounds::CHSH),
        ScenarioParams::Chsh(config),
    )
}
