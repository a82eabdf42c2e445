//! Two-step sequential measurements.
//!
//! For channels "A" then "B" applied to an initial state ρ₀, the joint
//! probability of observing `a_i` then `b_j` is
//! `P{(a_i, b_j)} = tr[W(b_j) V(a_i) ρ₀ V†(a_i) W†(b_j)]`, and the composed
//! measurement is itself described by a POVM with elements
//! `V†(a_i) W†(b_j) W(b_j) V(a_i)` on the product outcome set.
//!
//! Joint entries are always computed by the single-trace form: it stays well
//! defined when a first outcome has zero probability, where chaining through
//! a normalized posterior state would not.

use crate::error::{Error, Result};
use crate::measurement::{clamp_probability, KrausChannel, OutcomeSet, Povm};
use crate::operator::Operator;
use crate::state::DensityOperator;

/// Joint statistics of a two-step measurement.
#[derive(Debug, Clone)]
pub struct SequentialResult {
    pub first: OutcomeSet,
    pub second: OutcomeSet,
    /// `joint[i][j] = P{(a_i, b_j)}`.
    pub joint: Vec<Vec<f64>>,
    /// `P(b_j) = Σ_i joint[i][j]`, the first-outcome-ignored marginal.
    pub marginal_second: Vec<f64>,
    /// POVM of the composed measurement on product labels `"a_i×b_j"`.
    pub composed_povm: Povm,
}

/// Both sides of the quantum Bayes identity: the direct second-measurement
/// probabilities on the unconditional posterior (`lhs`) against the
/// marginalized joint (`rhs`). The identity is exact algebra, so `max_gap`
/// is round-off only.
#[derive(Debug, Clone)]
pub struct BayesCheck {
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub max_gap: f64,
}

fn check_dims(rho: &DensityOperator, first: &KrausChannel, second: &KrausChannel) -> Result<()> {
    if first.dim() != rho.dim() {
        return Err(Error::DimMismatch {
            left: rho.dim(),
            right: first.dim(),
        });
    }
    if second.dim() != rho.dim() {
        return Err(Error::DimMismatch {
            left: rho.dim(),
            right: second.dim(),
        });
    }
    Ok(())
}

/// Joint probabilities, second-outcome marginal and composed POVM for the
/// sequence `first` then `second`.
pub fn sequential_joint(
    rho: &DensityOperator,
    first: &KrausChannel,
    second: &KrausChannel,
    tol: f64,
) -> Result<SequentialResult> {
    check_dims(rho, first, second)?;
    let na = first.outcomes().len();
    let nb = second.outcomes().len();

    let mut joint = vec![vec![0.0; nb]; na];
    let mut labels = Vec::with_capacity(na * nb);
    let mut elements = Vec::with_capacity(na * nb);
    for (i, v) in first.kraus_ops().iter().enumerate() {
        for (j, w) in second.kraus_ops().iter().enumerate() {
            let wv = w * v;
            // P{(a_i, b_j)} = tr[(WV) ρ (WV)†]
            let p = (&(&wv * rho.op()) * &wv.adjoint()).trace().re;
            joint[i][j] = clamp_probability(p, tol);
            labels.push(format!(
                "{}×{}",
                first.outcomes().label(i),
                second.outcomes().label(j)
            ));
            elements.push(&wv.adjoint() * &wv);
        }
    }

    let marginal_second = (0..nb)
        .map(|j| (0..na).map(|i| joint[i][j]).sum())
        .collect();

    let composed_povm = Povm::new(OutcomeSet::new(labels)?, elements, tol)?;

    Ok(SequentialResult {
        first: first.outcomes().clone(),
        second: second.outcomes().clone(),
        joint,
        marginal_second,
        composed_povm,
    })
}

/// Joint probabilities of the reversed order: entry `[i][j]` is
/// `P{(b_j, a_i)} = tr[ρ₀ W†(b_j) V†(a_i) V(a_i) W(b_j)]`, the probability
/// of observing `b_j` first and then `a_i`.
pub fn reversed_joint(
    rho: &DensityOperator,
    first: &KrausChannel,
    second: &KrausChannel,
    tol: f64,
) -> Result<Vec<Vec<f64>>> {
    check_dims(rho, first, second)?;
    let na = first.outcomes().len();
    let nb = second.outcomes().len();
    let mut out = vec![vec![0.0; nb]; na];
    for (i, v) in first.kraus_ops().iter().enumerate() {
        for (j, w) in second.kraus_ops().iter().enumerate() {
            let vw = v * w;
            let p = (&(&vw * rho.op()) * &vw.adjoint()).trace().re;
            out[i][j] = clamp_probability(p, tol);
        }
    }
    Ok(out)
}

/// Quantum analog of Bayes' formula:
/// `μ^B(b_j; σ̃^A(ρ₀)) = P(b_j) = Σ_i P{(a_i, b_j)}`.
pub fn quantum_bayes_check(
    rho: &DensityOperator,
    first: &KrausChannel,
    second: &KrausChannel,
    tol: f64,
) -> Result<BayesCheck> {
    let seq = sequential_joint(rho, first, second, tol)?;
    let unconditional = first.unconditional_posterior(rho, tol)?;
    let lhs = second.povm().outcome_probabilities(&unconditional, tol)?;
    let rhs = seq.marginal_second;
    let max_gap = lhs
        .iter()
        .zip(&rhs)
        .map(|(l, r)| (l - r).abs())
        .fold(0.0, f64::max);
    Ok(BayesCheck { lhs, rhs, max_gap })
}

/// Direct second-measurement probabilities `μ^B(b_j; ρ₀)` without the first
/// measurement.
pub fn direct_second(rho: &DensityOperator, second: &KrausChannel, tol: f64) -> Result<Vec<f64>> {
    second.povm().outcome_probabilities(rho, tol)
}

/// Largest commutator entry `max_{i,j} max_abs([W(b_j), V(a_i)])`.
/// Vanishes exactly when the two channels commute, in which case the order
/// of the measurements is irrelevant.
pub fn max_commutator(first: &KrausChannel, second: &KrausChannel) -> f64 {
    let mut max = 0.0f64;
    for v in first.kraus_ops() {
        for w in second.kraus_ops() {
            max = max.max(w.commutator_max_abs(v));
        }
    }
    max
}

/// Shared-eigenbasis diagonal channel pair used by tests and the commuting
/// case: all Kraus operators are diagonal in the basis given by `unitary`,
/// hence commute pairwise.
pub fn commuting_channel_pair(
    unitary: &Operator,
    first_diag: (&[f64], &[f64]),
    second_diag: (&[f64], &[f64]),
    tol: f64,
) -> Result<(KrausChannel, KrausChannel)> {
    let dim = unitary.dim();
    let build = |prefix: &str, diags: (&[f64], &[f64])| -> Result<KrausChannel> {
        let (d1, d2) = diags;
        if d1.len() != dim || d2.len() != dim {
            return Err(Error::DimMismatch {
                left: dim,
                right: d1.len(),
            });
        }
        let ops = [d1, d2]
            .iter()
            .map(|d| {
                let diag = Operator::diag_real(d);
                &(unitary * &diag) * &unitary.adjoint()
            })
            .collect();
        KrausChannel::new(OutcomeSet::indexed(prefix, 2), ops, tol)
    };
    Ok((build("a", first_diag)?, build("b", second_diag)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::OutcomeSet;
    use crate::operator::{Vector, DEFAULT_TOL};
    use crate::random;
    use crate::state::PureState;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn computational_channel(dim: usize) -> KrausChannel {
        let projections = (0..dim)
            .map(|k| {
                let e = Vector::basis(dim, k);
                e.outer(&e)
            })
            .collect();
        KrausChannel::projective(OutcomeSet::indexed("a", dim), projections, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn repeated_projective_measurement_is_repeatable() {
        let rho = crate::state::mix(
            &[0.3, 0.7],
            &[
                PureState::basis(2, 0).to_density(),
                PureState::basis(2, 1).to_density(),
            ],
            DEFAULT_TOL,
        )
        .unwrap();
        let a = computational_channel(2);
        let seq = sequential_joint(&rho, &a, &a, DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(seq.joint[0][0], 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(seq.joint[1][1], 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(seq.joint[0][1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(seq.joint[1][0], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn identity_first_channel_reproduces_direct_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let rho = random::random_density(3, &mut rng);
        let b = random::random_kraus_channel(3, 2, "b", &mut rng);
        let id = KrausChannel::identity(3, "only");
        let seq = sequential_joint(&rho, &id, &b, DEFAULT_TOL).unwrap();
        let direct = direct_second(&rho, &b, DEFAULT_TOL).unwrap();
        for j in 0..2 {
            assert_abs_diff_eq!(seq.joint[0][j], direct[j], epsilon = 1e-12);
            assert_abs_diff_eq!(seq.marginal_second[j], direct[j], epsilon = 1e-12);
        }
    }

    #[test]
    fn joint_matches_composed_povm_probability() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let rho = random::random_density(3, &mut rng);
        let a = random::random_kraus_channel(3, 2, "a", &mut rng);
        let b = random::random_kraus_channel(3, 2, "b", &mut rng);
        let seq = sequential_joint(&rho, &a, &b, DEFAULT_TOL).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let label = format!("{}×{}", a.outcomes().label(i), b.outcomes().label(j));
                let p = seq
                    .composed_povm
                    .probability(&rho, &[label.as_str()], DEFAULT_TOL)
                    .unwrap();
                assert_abs_diff_eq!(seq.joint[i][j], p, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn joint_sums_to_one_and_composed_povm_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for dim in 2..=4 {
            let rho = random::random_density(dim, &mut rng);
            let a = random::random_kraus_channel(dim, 2, "a", &mut rng);
            let b = random::random_kraus_channel(dim, 3, "b", &mut rng);
            let seq = sequential_joint(&rho, &a, &b, DEFAULT_TOL).unwrap();
            let total: f64 = seq.joint.iter().flatten().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            let mut sum = Operator::zeros(dim);
            for el in seq.composed_povm.elements() {
                sum = &sum + el;
            }
            assert!(sum.max_abs_diff(&Operator::identity(dim)) <= 1e-10);
        }
    }

    #[test]
    fn trace_form_matches_posterior_chaining() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let rho = random::random_density(3, &mut rng);
        let a = random::random_kraus_channel(3, 2, "a", &mut rng);
        let b = random::random_kraus_channel(3, 2, "b", &mut rng);
        let seq = sequential_joint(&rho, &a, &b, DEFAULT_TOL).unwrap();
        let b_povm = b.povm();
        for (i, out) in a.posteriors(&rho, DEFAULT_TOL).unwrap().iter().enumerate() {
            let post = out
                .state
                .as_ref()
                .expect("full-rank state, nonzero outcome");
            let cond = b_povm.outcome_probabilities(post, DEFAULT_TOL).unwrap();
            for j in 0..2 {
                assert_abs_diff_eq!(seq.joint[i][j], cond[j] * out.probability, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn bayes_identity_for_projective_pair_on_mixed_state() {
        let rho = crate::state::DensityOperator::maximally_mixed(2);
        let a = computational_channel(2);
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let b = random::random_projective_channel(2, 1, "b", &mut rng);
        let check = quantum_bayes_check(&rho, &a, &b, DEFAULT_TOL).unwrap();
        assert!(check.max_gap <= 1e-12);
    }

    #[test]
    fn bayes_identity_for_random_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        for dim in 2..=5 {
            let rho = random::random_density(dim, &mut rng);
            let a = random::random_kraus_channel(dim, 2, "a", &mut rng);
            let b = random::random_kraus_channel(dim, 2, "b", &mut rng);
            let check = quantum_bayes_check(&rho, &a, &b, DEFAULT_TOL).unwrap();
            assert!(check.max_gap <= 1e-12, "gap {} at dim {dim}", check.max_gap);
        }
    }

    #[test]
    fn bayes_lhs_equals_direct_for_identity_first() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let rho = random::random_density(2, &mut rng);
        let b = random::random_kraus_channel(2, 2, "b", &mut rng);
        let id = KrausChannel::identity(2, "only");
        let check = quantum_bayes_check(&rho, &id, &b, DEFAULT_TOL).unwrap();
        let direct = direct_second(&rho, &b, DEFAULT_TOL).unwrap();
        for j in 0..2 {
            assert_abs_diff_eq!(check.lhs[j], direct[j], epsilon = 1e-14);
        }
    }

    #[test]
    fn commuting_channels_make_order_irrelevant() {
        let mut rng = ChaCha8Rng::seed_from_u64(48);
        let u = random::random_unitary(3, &mut rng);
        let d: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
        let dc: Vec<f64> = d.iter().map(|x| (1.0 - x * x).sqrt()).collect();
        let e: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
        let ec: Vec<f64> = e.iter().map(|x| (1.0 - x * x).sqrt()).collect();
        let (a, b) = commuting_channel_pair(&u, (&d, &dc), (&e, &ec), DEFAULT_TOL).unwrap();
        let rho = random::random_density(3, &mut rng);
        let seq = sequential_joint(&rho, &a, &b, DEFAULT_TOL).unwrap();
        let rev = reversed_joint(&rho, &a, &b, DEFAULT_TOL).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(seq.joint[i][j], rev[i][j], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn same_basis_projective_pair_has_symmetric_joint() {
        let rho = crate::state::mix(
            &[0.25, 0.75],
            &[
                PureState::basis(2, 0).to_density(),
                PureState::basis(2, 1).to_density(),
            ],
            DEFAULT_TOL,
        )
        .unwrap();
        let a = computational_channel(2);
        let seq = sequential_joint(&rho, &a, &a, DEFAULT_TOL).unwrap();
        let rev = reversed_joint(&rho, &a, &a, DEFAULT_TOL).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(seq.joint[i][j], rev[i][j], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn reversed_joint_of_non_commuting_channels_is_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(49);
        let rho = random::random_density(3, &mut rng);
        let a = random::random_kraus_channel(3, 2, "a", &mut rng);
        let b = random::random_kraus_channel(3, 2, "b", &mut rng);
        let rev = reversed_joint(&rho, &a, &b, DEFAULT_TOL).unwrap();
        let mut total = 0.0;
        for row in &rev {
            for &p in row {
                assert!((0.0..=1.0).contains(&p));
                total += p;
            }
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn max_commutator_is_zero_for_shared_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let u = random::random_unitary(2, &mut rng);
        let (a, b) = commuting_channel_pair(
            &u,
            (&[0.6, 0.3], &[0.8, (1.0f64 - 0.09).sqrt()]),
            (
                &[0.5, 0.9],
                &[(1.0f64 - 0.25).sqrt(), (1.0f64 - 0.81).sqrt()],
            ),
            DEFAULT_TOL,
        )
        .unwrap();
        assert!(max_commutator(&a, &b) <= 1e-12);
        let c = random::random_kraus_channel(2, 2, "c", &mut rng);
        assert!(max_commutator(&a, &c) > 1e-6);
    }
}
