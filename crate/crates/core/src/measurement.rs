//! Generalized measurements over finite outcome sets.
//!
//! A [`Povm`] assigns probabilities through `tr{ρ M(E)}`; a [`KrausChannel`]
//! additionally describes post-measurement states through `V ρ V†`. Both are
//! validated at construction (positivity and normalization) and trusted
//! thereafter, which keeps the probability loops free of re-checks.
//!
//! Only single-channel, finite-outcome, non-destructive instruments are
//! modeled here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::state::{DensityOperator, PureState};

/// Ordered set of distinct outcome labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutcomeSet {
    labels: Vec<String>,
}

impl OutcomeSet {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyOutcomeSet);
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel {
                    label: label.clone(),
                });
            }
        }
        Ok(Self { labels })
    }

    /// Labels `"<prefix>1" .. "<prefix>k"`.
    pub fn indexed(prefix: &str, count: usize) -> Self {
        Self::new((1..=count).map(|i| format!("{prefix}{i}")).collect())
            .expect("indexed labels are nonempty and distinct")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel {
                label: label.to_string(),
            })
    }

    /// Map a subset of labels to indices, rejecting unknowns and duplicates.
    pub fn subset_indices(&self, subset: &[&str]) -> Result<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut indices = Vec::with_capacity(subset.len());
        for label in subset {
            let i = self.index_of(label)?;
            if seen[i] {
                return Err(Error::DuplicateLabel {
                    label: (*label).to_string(),
                });
            }
            seen[i] = true;
            indices.push(i);
        }
        Ok(indices)
    }
}

/// POV measure on a finite outcome set: positive operators summing to the
/// identity. Additivity over disjoint label subsets holds by construction.
#[derive(Debug, Clone, Serialize)]
pub struct Povm {
    outcomes: OutcomeSet,
    elements: Vec<Operator>,
}

impl Povm {
    /// Validate positivity of each element and normalization `Σ M_i = I`.
    pub fn new(outcomes: OutcomeSet, elements: Vec<Operator>, tol: f64) -> Result<Self> {
        if outcomes.len() != elements.len() {
            return Err(Error::OutcomeCountMismatch {
                labels: outcomes.len(),
                operators: elements.len(),
            });
        }
        let dim = elements[0].dim();
        let mut sum = Operator::zeros(dim);
        for el in &elements {
            if el.dim() != dim {
                return Err(Error::DimMismatch {
                    left: dim,
                    right: el.dim(),
                });
            }
            let gap = el.hermiticity_gap();
            if gap > tol {
                return Err(Error::NotHermitian { gap });
            }
            let min = el.min_eigenvalue(tol)?;
            if min < -tol {
                return Err(Error::NotPsd {
                    min_eigenvalue: min,
                });
            }
            sum = &sum + el;
        }
        let gap = sum.max_abs_diff(&Operator::identity(dim));
        if gap > tol {
            return Err(Error::NotNormalized { gap });
        }
        Ok(Self { outcomes, elements })
    }

    pub fn outcomes(&self) -> &OutcomeSet {
        &self.outcomes
    }

    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }

    pub fn element(&self, index: usize) -> &Operator {
        &self.elements[index]
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// `M(E) = Σ_{labels in E} M_i`.
    pub fn subset_operator(&self, subset: &[&str]) -> Result<Operator> {
        let indices = self.outcomes.subset_indices(subset)?;
        let mut sum = Operator::zeros(self.dim());
        for i in indices {
            sum = &sum + &self.elements[i];
        }
        Ok(sum)
    }

    /// Outcome probability `tr{ρ M(E)}` for a subset of labels.
    ///
    /// The trace of a state against a positive operator is real and lies in
    /// `[0, 1]`; round-off spill within `tol` of either boundary is clamped.
    pub fn probability(&self, rho: &DensityOperator, subset: &[&str], tol: f64) -> Result<f64> {
        if rho.dim() != self.dim() {
            return Err(Error::DimMismatch {
                left: rho.dim(),
                right: self.dim(),
            });
        }
        let m = self.subset_operator(subset)?;
        Ok(clamp_probability((rho.op() * &m).trace().re, tol))
    }

    /// Probability of each single outcome, in label order.
    pub fn outcome_probabilities(&self, rho: &DensityOperator, tol: f64) -> Result<Vec<f64>> {
        if rho.dim() != self.dim() {
            return Err(Error::DimMismatch {
                left: rho.dim(),
                right: self.dim(),
            });
        }
        Ok(self
            .elements
            .iter()
            .map(|el| clamp_probability((rho.op() * el).trace().re, tol))
            .collect())
    }
}

/// Clamp a numerically perturbed probability back into `[0, 1]` when it sits
/// within `tol` of a boundary.
pub(crate) fn clamp_probability(p: f64, tol: f64) -> f64 {
    if p < 0.0 && p >= -tol {
        0.0
    } else if p > 1.0 && p <= 1.0 + tol {
        1.0
    } else {
        p
    }
}

/// Single-channel measurement instrument: one Kraus operator `V(a_i)` per
/// outcome with `Σ V†(a_i) V(a_i) = I`.
#[derive(Debug, Clone, Serialize)]
pub struct KrausChannel {
    outcomes: OutcomeSet,
    #[serde(rename = "kraus")]
    kraus_ops: Vec<Operator>,
}

/// Probability of an outcome together with the normalized posterior state.
/// The state is absent when the probability is at or below tolerance, where
/// the normalization `V ρ V† / p` is undefined.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub probability: f64,
    pub state: Option<DensityOperator>,
}

impl KrausChannel {
    /// Validate the completeness relation `Σ V†V = I` within `tol`.
    pub fn new(outcomes: OutcomeSet, kraus_ops: Vec<Operator>, tol: f64) -> Result<Self> {
        if outcomes.len() != kraus_ops.len() {
            return Err(Error::OutcomeCountMismatch {
                labels: outcomes.len(),
                operators: kraus_ops.len(),
            });
        }
        let dim = kraus_ops[0].dim();
        let mut sum = Operator::zeros(dim);
        for v in &kraus_ops {
            if v.dim() != dim {
                return Err(Error::DimMismatch {
                    left: dim,
                    right: v.dim(),
                });
            }
            sum = &sum + &(&v.adjoint() * v);
        }
        let gap = sum.max_abs_diff(&Operator::identity(dim));
        if gap > tol {
            return Err(Error::NotNormalized { gap });
        }
        Ok(Self {
            outcomes,
            kraus_ops,
        })
    }

    /// Channel with the identity as its only Kraus operator.
    pub fn identity(dim: usize, label: &str) -> Self {
        Self {
            outcomes: OutcomeSet::new(vec![label.to_string()]).expect("single label"),
            kraus_ops: vec![Operator::identity(dim)],
        }
    }

    /// Projective channel measuring the given orthogonal projections.
    /// The projections must sum to the identity.
    pub fn projective(outcomes: OutcomeSet, projections: Vec<Operator>, tol: f64) -> Result<Self> {
        for p in &projections {
            let gap = p.projection_gap().max(p.hermiticity_gap());
            if gap > tol {
                return Err(Error::NotPsd {
                    min_eigenvalue: -gap,
                });
            }
        }
        Self::new(outcomes, projections, tol)
    }

    pub fn outcomes(&self) -> &OutcomeSet {
        &self.outcomes
    }

    pub fn kraus_ops(&self) -> &[Operator] {
        &self.kraus_ops
    }

    pub fn kraus_op(&self, index: usize) -> &Operator {
        &self.kraus_ops[index]
    }

    pub fn dim(&self) -> usize {
        self.kraus_ops[0].dim()
    }

    /// Induced POV measure with elements `M_i = V†(a_i) V(a_i)`.
    ///
    /// Validity is inherited from the channel's completeness relation, so
    /// this cannot fail for a constructed channel.
    pub fn povm(&self) -> Povm {
        let elements = self.kraus_ops.iter().map(|v| &v.adjoint() * v).collect();
        Povm {
            outcomes: self.outcomes.clone(),
            elements,
        }
    }

    /// Unnormalized posterior `σ_i(ρ) = V(a_i) ρ V†(a_i)`, symmetrized to
    /// remove round-off Hermiticity drift.
    fn unnormalized_posterior(&self, rho: &DensityOperator, index: usize) -> Operator {
        let v = &self.kraus_ops[index];
        let sigma = &(v * rho.op()) * &v.adjoint();
        (&sigma + &sigma.adjoint()).scale(0.5)
    }

    /// Outcome probability `tr[V ρ V†]` and normalized posterior state
    /// `V ρ V† / p` for one outcome label.
    pub fn posterior(
        &self,
        rho: &DensityOperator,
        label: &str,
        tol: f64,
    ) -> Result<MeasurementOutcome> {
        if rho.dim() != self.dim() {
            return Err(Error::DimMismatch {
                left: rho.dim(),
                right: self.dim(),
            });
        }
        let index = self.outcomes.index_of(label)?;
        let sigma = self.unnormalized_posterior(rho, index);
        let probability = clamp_probability(sigma.trace().re, tol);
        if probability <= tol {
            return Ok(MeasurementOutcome {
                probability,
                state: None,
            });
        }
        let state = DensityOperator::new(sigma.scale(1.0 / probability), tol)?;
        Ok(MeasurementOutcome {
            probability,
            state: Some(state),
        })
    }

    /// Posterior for every outcome, in label order.
    pub fn posteriors(&self, rho: &DensityOperator, tol: f64) -> Result<Vec<MeasurementOutcome>> {
        self.outcomes
            .labels()
            .iter()
            .map(|label| self.posterior(rho, label, tol))
            .collect::<Result<Vec<_>>>()
    }

    /// Unconditional (outcome-ignored) posterior `Σ V(a_i) ρ V†(a_i)`.
    /// Trace-preserving by the completeness relation.
    pub fn unconditional_posterior(
        &self,
        rho: &DensityOperator,
        tol: f64,
    ) -> Result<DensityOperator> {
        if rho.dim() != self.dim() {
            return Err(Error::DimMismatch {
                left: rho.dim(),
                right: self.dim(),
            });
        }
        let mut acc = Operator::zeros(self.dim());
        for i in 0..self.outcomes.len() {
            acc = &acc + &self.unnormalized_posterior(rho, i);
        }
        DensityOperator::new(acc, tol)
    }
}

/// Filter-type three-outcome POVM for a pair of orthogonal pure states:
/// `{|φ₁⟩⟨φ₁|, |φ₂⟩⟨φ₂|, I − |φ₁⟩⟨φ₁| − |φ₂⟩⟨φ₂|}`.
///
/// The outcomes are labeled `"phi1"`, `"phi2"`, `"rest"`; in dimension two
/// the third element is the zero operator.
pub fn filter_povm(phi1: &PureState, phi2: &PureState, tol: f64) -> Result<Povm> {
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
    let p1 = phi1.vector().outer(phi1.vector());
    let p2 = phi2.vector().outer(phi2.vector());
    let rest = &(&Operator::identity(phi1.dim()) - &p1) - &p2;
    Povm::new(
        OutcomeSet::new(vec!["phi1".into(), "phi2".into(), "rest".into()])?,
        vec![p1, p2, rest],
        tol,
    )
}

/// Wire format for a Kraus channel: `{"outcomes": [...], "kraus": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelParts {
    pub outcomes: Vec<String>,
    pub kraus: Vec<Operator>,
}

impl ChannelParts {
    pub fn validate(self, tol: f64) -> Result<KrausChannel> {
        KrausChannel::new(OutcomeSet::new(self.outcomes)?, self.kraus, tol)
    }

    /// Gap of the completeness relation `Σ V†V = I` (for validation reports).
    pub fn completeness_gap(&self) -> Result<f64> {
        if self.kraus.is_empty() {
            return Err(Error::EmptyOutcomeSet);
        }
        let dim = self.kraus[0].dim();
        let mut sum = Operator::zeros(dim);
        for v in &self.kraus {
            if v.dim() != dim {
                return Err(Error::DimMismatch {
                    left: dim,
                    right: v.dim(),
                });
            }
            sum = &sum + &(&v.adjoint() * v);
        }
        Ok(sum.max_abs_diff(&Operator::identity(dim)))
    }
}

/// Wire format for a POVM: `{"outcomes": [...], "elements": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmParts {
    pub outcomes: Vec<String>,
    pub elements: Vec<Operator>,
}

impl PovmParts {
    pub fn validate(self, tol: f64) -> Result<Povm> {
        Povm::new(OutcomeSet::new(self.outcomes)?, self.elements, tol)
    }

    /// Gap of the normalization `Σ M_i = I` (for validation reports).
    pub fn normalization_gap(&self) -> Result<f64> {
        if self.elements.is_empty() {
            return Err(Error::EmptyOutcomeSet);
        }
        let dim = self.elements[0].dim();
        let mut sum = Operator::zeros(dim);
        for el in &self.elements {
            if el.dim() != dim {
                return Err(Error::DimMismatch {
                    left: dim,
                    right: el.dim(),
                });
            }
            sum = &sum + el;
        }
        Ok(sum.max_abs_diff(&Operator::identity(dim)))
    }
}
