//! Quantum states: density operators, pure states, superpositions, mixtures.
//!
//! A [`DensityOperator`] is Hermitian, positive semidefinite and unit-trace;
//! a [`PureState`] wraps a unit vector. Both validate at construction and are
//! immutable afterwards, so downstream code never re-checks them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{Operator, Vector};

/// Quantum state: Hermitian, PSD, unit-trace operator. Pure or mixed.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: Operator,
}

/// Unit vector representing a pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    vec: Vector,
}

impl DensityOperator {
    /// Validate Hermiticity, positivity and unit trace within `tol`.
    pub fn new(op: Operator, tol: f64) -> Result<Self> {
        let gap = op.hermiticity_gap();
        if gap > tol {
            return Err(Error::NotHermitian { gap });
        }
        let min = op.min_eigenvalue(tol)?;
        if min < -tol {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        let trace = op.trace();
        let trace_gap = (Complex64::new(trace.re - 1.0, trace.im)).norm();
        if trace_gap > tol {
            return Err(Error::NotUnitTrace { gap: trace_gap });
        }
        Ok(Self { op })
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: Operator::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// PSD square root `√ρ` (used by the projective interference bound).
    pub fn sqrt(&self, tol: f64) -> Result<Operator> {
        self.op.psd_sqrt(tol)
    }
}

impl PureState {
    /// Validate unit norm within `tol`.
    pub fn new(vec: Vector, tol: f64) -> Result<Self> {
        let gap = vec.unit_gap();
        if gap > tol {
            return Err(Error::NotUnit { gap });
        }
        Ok(Self { vec })
    }

    /// Standard basis state `e_k`.
    pub fn basis(dim: usize, k: usize) -> Self {
        Self {
            vec: Vector::basis(dim, k),
        }
    }

    pub fn vector(&self) -> &Vector {
        &self.vec
    }

    pub fn dim(&self) -> usize {
        self.vec.dim()
    }

    /// Rank-one density operator `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            op: self.vec.outer(&self.vec),
        }
    }
}

/// Superposition `αφ₁ + βφ₂` of two orthogonal unit vectors with
/// `|α|² + |β|² = 1`.
///
/// Non-orthogonal inputs are rejected rather than renormalized so that the
/// interference decomposition of the resulting state stays meaningful.
pub fn superpose(
    phi1: &PureState,
    phi2: &PureState,
    alpha: Complex64,
    beta: Complex64,
    tol: f64,
) -> Result<PureState> {
    if phi1.dim() != phi2.dim() {
        return Err(Error::DimMismatch {
            left: phi1.dim(),
            right: phi2.dim(),
        });
    }
    let overlap = phi1.vector().inner(phi2.vector()).norm();
    if overlap > tol {
        return Err(Error::NotOrthogonal { overlap });
    }
    let weight = alpha.norm_sqr() + beta.norm_sqr();
    if (weight - 1.0).abs() > tol {
        return Err(Error::BadWeights {
            reason: format!("|α|² + |β|² = {weight} (expected 1)"),
        });
    }
    let vec = phi1
        .vector()
        .scale_complex(alpha)
        .add(&phi2.vector().scale_complex(beta));
    PureState::new(vec, tol)
}

/// Convex combination `Σ wᵢ ρᵢ` of density operators.
pub fn mix(weights: &[f64], states: &[DensityOperator], tol: f64) -> Result<DensityOperator> {
    if weights.len() != states.len() || states.is_empty() {
        return Err(Error::BadWeights {
            reason: format!("{} weights for {} states", weights.len(), states.len()),
        });
    }
    for &w in weights {
        if w < 0.0 || w.is_nan() {
            return Err(Error::BadWeights {
                reason: format!("negative weight {w}"),
            });
        }
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > tol {
        return Err(Error::BadWeights {
            reason: format!("weights sum to {total} (expected 1)"),
        });
    }
    let dim = states[0].dim();
    for s in states {
        if s.dim() != dim {
            return Err(Error::DimMismatch {
                left: dim,
                right: s.dim(),
            });
        }
    }
    let mut acc = Operator::zeros(dim);
    for (w, s) in weights.iter().zip(states) {
        acc = &acc + &s.op().scale(*w);
    }
    // Convex combinations of valid states stay valid; revalidation just
    // guards against tolerance drift in the inputs.
    DensityOperator::new(acc, tol)
}

/// Wire format for states in scenario files: either a pure state vector or a
/// density matrix, each validated only after parsing.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateParts {
    Pure { vec: Vector },
    Density { matrix: Operator },
}

impl StateParts {
    /// Validate into a density operator.
    pub fn validate(&self, tol: f64) -> Result<DensityOperator> {
        match self {
            StateParts::Pure { vec } => Ok(PureState::new(vec.clone(), tol)?.to_density()),
            StateParts::Density { matrix } => DensityOperator::new(matrix.clone(), tol),
        }
    }
}
