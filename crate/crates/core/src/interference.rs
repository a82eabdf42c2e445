//! Probability-transformation algebra for superpositions, mixtures and
//! sequential measurements.
//!
//! The central quantity is the interference coefficient λ_j: the deviation of
//! the direct probability `μ^B(b_j; ρ₀)` from the marginalized sequential sum
//! `Σ_i P{(a_i, b_j)}`, normalized by `2√(P{(a₁,b_j)} P{(a₂,b_j)})`. Its
//! size classifies the probability transformation: `|λ| ≤ tol` behaves
//! classically (total probability formula), `|λ| < 1` is trigonometric
//! (λ = cos θ), and `|λ| ≥ 1` is hyperbolic (|λ| = cosh θ̃), which no
//! projective measurement can produce.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measurement::{KrausChannel, OutcomeSet, Povm};
use crate::sequential::{direct_second, max_commutator, reversed_joint, sequential_joint};
use crate::state::{mix, superpose, DensityOperator, PureState};

/// Term-by-term decomposition of the superposition probability rule
/// `μ(E; ρ₃) = |α|²μ(E; ρ₁) + |β|²μ(E; ρ₂) + 2Re{α*β⟨φ₁, M(E)φ₂⟩}`
/// for `φ₃ = αφ₁ + βφ₂`.
#[derive(Debug, Clone, Serialize)]
pub struct SuperpositionDecomposition {
    /// `μ(E; ρ₃)`, computed independently on the superposed state.
    pub total: f64,
    /// `|α|² μ(E; ρ₁)`.
    pub term1: f64,
    /// `|β|² μ(E; ρ₂)`.
    pub term2: f64,
    /// `2 Re{α*β ⟨φ₁, M(E) φ₂⟩}`, the interference term.
    pub cross: f64,
    /// `cross / (2|αβ|√(μ₁μ₂))`; absent when that denominator is below
    /// tolerance.
    pub cos_theta: Option<f64>,
}

/// Mixture probability rule `μ(E; wρ̃₁ + (1-w)ρ̃₂)`: exclusive alternatives,
/// no cross term.
#[derive(Debug, Clone, Serialize)]
pub struct MixtureDecomposition {
    pub total: f64,
    pub term1: f64,
    pub term2: f64,
}

/// Kind of probability transformation encoded by an interference
/// coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum Transformation {
    /// `|λ| ≤ tol`: classical total-probability transformation.
    Classical,
    /// `tol < |λ| < 1`: `λ = cos θ` with the principal phase `θ ∈ [0, π]`.
    Trigonometric { phase: f64 },
    /// `|λ| ≥ 1`: `|λ| = cosh θ̃`; the sign of λ is carried separately.
    Hyperbolic { phase: f64, negative: bool },
}

impl Transformation {
    pub fn name(&self) -> &'static str {
        match self {
            Transformation::Classical => "classical",
            Transformation::Trigonometric { .. } => "trigonometric",
            Transformation::Hyperbolic { .. } => "hyperbolic",
        }
    }

    /// Trigonometric phase θ, hyperbolic phase θ̃, or 0 for classical.
    pub fn phase(&self) -> f64 {
        match self {
            Transformation::Classical => 0.0,
            Transformation::Trigonometric { phase } => *phase,
            Transformation::Hyperbolic { phase, .. } => *phase,
        }
    }
}

/// Classify an interference coefficient.
///
/// Ties at `|λ| = 1` classify as hyperbolic (`cosh 0 = 1`).
pub fn classify_transformation(lambda: f64, tol: f64) -> Transformation {
    let a = lambda.abs();
    if a <= tol {
        Transformation::Classical
    } else if a < 1.0 {
        Transformation::Trigonometric {
            phase: lambda.acos(),
        }
    } else {
        Transformation::Hyperbolic {
            phase: a.acosh(),
            negative: lambda < 0.0,
        }
    }
}

/// Admissible range for λ_j given the two joint probabilities:
/// `-(P₁+P₂)/(2√(P₁P₂)) ≤ λ_j ≤ (1-P₁-P₂)/(2√(P₁P₂))`,
/// i.e. the direct probability must land in `[0, 1]`.
pub fn lambda_bounds(p1: f64, p2: f64) -> (f64, f64) {
    let denom = 2.0 * (p1 * p2).sqrt();
    (-(p1 + p2) / denom, (1.0 - p1 - p2) / denom)
}

/// Interference analysis for one second-measurement outcome.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaEntry {
    pub label: String,
    /// `μ^B(b_j; ρ₀)`, the direct probability without the first measurement.
    pub direct: f64,
    /// `P{(a_i, b_j)}` for the two first outcomes.
    pub joint: [f64; 2],
    /// `P{(b_j, a_i)}`, the reversed-order joints.
    pub reversed: [f64; 2],
    /// `λ_j = (direct - joint₁ - joint₂) / (2√(joint₁ joint₂))`.
    pub lambda: f64,
    /// `γ_ij = P{(b_j, a_i)} / P{(a_i, b_j)}`.
    pub gamma: [f64; 2],
    /// λ_j recomputed from the order-reversal ratios:
    /// `½[√(P₁/P₂)(γ₁-1) + √(P₂/P₁)(γ₂-1)]`.
    pub lambda_via_gamma: f64,
    pub bound_lo: f64,
    pub bound_hi: f64,
    pub classification: Transformation,
}

/// Per-outcome result: either a full entry or a record of why λ_j is
/// undefined (a vanishing joint probability).
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum LambdaOutcome {
    Defined(LambdaEntry),
    Degenerate {
        label: String,
        direct: f64,
        joint: [f64; 2],
        degenerate: bool,
    },
}

impl LambdaOutcome {
    pub fn entry(&self) -> Option<&LambdaEntry> {
        match self {
            LambdaOutcome::Defined(e) => Some(e),
            LambdaOutcome::Degenerate { .. } => None,
        }
    }
}

/// Interference report over all second-measurement outcomes.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaReport {
    pub second_outcomes: OutcomeSet,
    pub outcomes: Vec<LambdaOutcome>,
    /// Diagnostic: largest entry of any `[W(b_j), V(a_i)]`. Commuting
    /// channels force every λ_j to zero; the converse is reported, not
    /// assumed.
    pub max_commutator: f64,
}

/// Interference coefficients λ_j for the dichotomic first measurement
/// `first` followed by `second`, on the initial state `rho`.
///
/// Outcomes where some `P{(a_i, b_j)} ≤ tol` are reported as degenerate
/// (the normalization in λ_j vanishes and no value is assigned); the other
/// outcomes are still computed.
pub fn lambda_report(
    rho: &DensityOperator,
    first: &KrausChannel,
    second: &KrausChannel,
    tol: f64,
) -> Result<LambdaReport> {
    if first.outcomes().len() != 2 {
        return Err(Error::NotDichotomic {
            got: first.outcomes().len(),
        });
    }
    let seq = sequential_joint(rho, first, second, tol)?;
    let reversed = reversed_joint(rho, first, second, tol)?;
    let direct = direct_second(rho, second, tol)?;

    let outcomes = (0..second.outcomes().len())
        .map(|j| {
            let label = second.outcomes().label(j).to_string();
            let joint = [seq.joint[0][j], seq.joint[1][j]];
            let rev = [reversed[0][j], reversed[1][j]];
            if joint[0] <= tol || joint[1] <= tol {
                return LambdaOutcome::Degenerate {
                    label,
                    direct: direct[j],
                    joint,
                    degenerate: true,
                };
            }
            let denom = 2.0 * (joint[0] * joint[1]).sqrt();
            let lambda = (direct[j] - joint[0] - joint[1]) / denom;
            let gamma = [rev[0] / joint[0], rev[1] / joint[1]];
            let lambda_via_gamma = 0.5
                * ((joint[0] / joint[1]).sqrt() * (gamma[0] - 1.0)
                    + (joint[1] / joint[0]).sqrt() * (gamma[1] - 1.0));
            let (bound_lo, bound_hi) = lambda_bounds(joint[0], joint[1]);
            LambdaOutcome::Defined(LambdaEntry {
                label,
                direct: direct[j],
                joint,
                reversed: rev,
                lambda,
                gamma,
                lambda_via_gamma,
                bound_lo,
                bound_hi,
                classification: classify_transformation(lambda, tol),
            })
        })
        .collect();

    Ok(LambdaReport {
        second_outcomes: second.outcomes().clone(),
        outcomes,
        max_commutator: max_commutator(first, second),
    })
}

/// Closed form for `|λ_j|` in the rank-one projective case
/// `V(a_i) = |φ_i⟩⟨φ_i|`, `W(b_j) = |ψ_j⟩⟨ψ_j|` (dimension two):
///
/// `|λ_j| = |Re{⟨√ρ₀φ₁, √ρ₀φ₂⟩⟨φ₂, ψ_j⟩⟨ψ_j, φ₁⟩}|
///          / (|⟨ψ_j, φ₁⟩| |⟨ψ_j, φ₂⟩| ‖√ρ₀φ₁‖ ‖√ρ₀φ₂‖) ≤ 1`.
pub fn projective_lambda(
    rho: &DensityOperator,
    phi_basis: [&PureState; 2],
    psi_basis: [&PureState; 2],
    second_index: usize,
    tol: f64,
) -> Result<f64> {
    assert!(second_index < 2, "second_index must be 0 or 1");
    if rho.dim() != 2 {
        return Err(Error::DimMismatch {
            left: rho.dim(),
            right: 2,
        });
    }
    for basis in [&phi_basis, &psi_basis] {
        if basis[0].dim() != 2 || basis[1].dim() != 2 {
            return Err(Error::DimMismatch {
                left: basis[0].dim(),
                right: 2,
            });
        }
        let overlap = basis[0].vector().inner(basis[1].vector()).norm();
        if overlap > tol {
            return Err(Error::NotOrthogonal { overlap });
        }
    }
    let root = rho.sqrt(tol)?;
    let s1 = root.apply(phi_basis[0].vector());
    let s2 = root.apply(phi_basis[1].vector());
    let n1 = s1.norm();
    let n2 = s2.norm();
    let psi = psi_basis[second_index].vector();
    let o1 = psi.inner(phi_basis[0].vector()); // ⟨ψ_j, φ₁⟩
    let o2 = psi.inner(phi_basis[1].vector()); // ⟨ψ_j, φ₂⟩
    for (name, mag) in [
        ("⟨ψ_j, φ₁⟩", o1.norm()),
        ("⟨ψ_j, φ₂⟩", o2.norm()),
        ("‖√ρ₀ φ₁‖", n1),
        ("‖√ρ₀ φ₂‖", n2),
    ] {
        if mag <= tol {
            return Err(Error::DegenerateOverlap {
                reason: format!("{name} = {mag:e}"),
            });
        }
    }
    let cross = s1.inner(&s2); // ⟨√ρ₀φ₁, √ρ₀φ₂⟩
    let o2_conj = o2.conj(); // ⟨φ₂, ψ_j⟩
    let numerator = (cross * o2_conj * o1).re.abs();
    Ok(numerator / (o1.norm() * o2.norm() * n1 * n2))
}

/// Superposition probability rule evaluated term by term for a POVM subset.
pub fn superposition_rule(
    phi1: &PureState,
    phi2: &PureState,
    alpha: Complex64,
    beta: Complex64,
    povm: &Povm,
    subset: &[&str],
    tol: f64,
) -> Result<SuperpositionDecomposition> {
    let phi3 = superpose(phi1, phi2, alpha, beta, tol)?;
    if phi1.dim() != povm.dim() {
        return Err(Error::DimMismatch {
            left: phi1.dim(),
            right: povm.dim(),
        });
    }
    let total = povm.probability(&phi3.to_density(), subset, tol)?;
    let mu1 = povm.probability(&phi1.to_density(), subset, tol)?;
    let mu2 = povm.probability(&phi2.to_density(), subset, tol)?;
    let term1 = alpha.norm_sqr() * mu1;
    let term2 = beta.norm_sqr() * mu2;
    let m = povm.subset_operator(subset)?;
    let cross = 2.0 * (alpha.conj() * beta * phi1.vector().inner(&m.apply(phi2.vector()))).re;
    let denom = 2.0 * (alpha * beta).norm() * (mu1 * mu2).sqrt();
    let cos_theta = if denom > tol {
        Some(cross / denom)
    } else {
        None
    };
    Ok(SuperpositionDecomposition {
        total,
        term1,
        term2,
        cross,
        cos_theta,
    })
}

/// Mixture probability rule: `μ(E; wρ̃₁+(1-w)ρ̃₂)` with its two summands.
pub fn mixture_rule(
    rho1: &DensityOperator,
    rho2: &DensityOperator,
    w: f64,
    povm: &Povm,
    subset: &[&str],
    tol: f64,
) -> Result<MixtureDecomposition> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::BadWeights {
            reason: format!("mixture weight {w} outside [0, 1]"),
        });
    }
    let mixed = mix(&[w, 1.0 - w], &[rho1.clone(), rho2.clone()], tol)?;
    Ok(MixtureDecomposition {
        total: povm.probability(&mixed, subset, tol)?,
        term1: w * povm.probability(rho1, subset, tol)?,
        term2: (1.0 - w) * povm.probability(rho2, subset, tol)?,
    })
}

/// A found scenario whose interference coefficient is hyperbolic.
#[derive(Debug, Clone)]
pub struct HyperbolicScenario {
    pub state: DensityOperator,
    pub first: KrausChannel,
    pub second: KrausChannel,
    pub report: LambdaReport,
}

/// Random search for a non-projective scenario with `|λ_j| ≥ 1`.
///
/// Draws pure initial states, scaled-unitary dichotomic first channels (a
/// non-projective family in which strong interference is common) and rank-one
/// projective second channels until some defined λ_j is hyperbolic.
pub fn find_hyperbolic_scenario(
    dim: usize,
    attempts: usize,
    rng: &mut impl rand::Rng,
    tol: f64,
) -> Option<HyperbolicScenario> {
    for _ in 0..attempts {
        let state = crate::random::random_pure_state(dim, rng).to_density();
        let first = crate::random::random_scaled_unitary_channel(dim, "a", rng);
        let second = crate::random::random_projective_channel(dim, 1, "b", rng);
        let report = match lambda_report(&state, &first, &second, tol) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let hyperbolic = report
            .outcomes
            .iter()
            .filter_map(LambdaOutcome::entry)
            .any(|e| e.lambda.abs() >= 1.0);
        if hyperbolic {
            return Some(HyperbolicScenario {
                state,
                first,
                second,
                report,
            });
        }
    }
    None
}
