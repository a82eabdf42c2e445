//! Seeded random generation of states, unitaries and channels.
//!
//! Used to drive the property suites and the random-search routines; all
//! generators are deterministic functions of the supplied RNG.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::measurement::{KrausChannel, OutcomeSet, Povm};
use crate::operator::{Operator, Vector, DEFAULT_TOL};
use crate::state::{DensityOperator, PureState};

fn gaussian_pair(rng: &mut impl Rng) -> Complex64 {
    // Box-Muller; a standard complex Gaussian entry.
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(r * theta.cos(), r * theta.sin())
}

fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian_pair(rng))
}

/// Orthonormalize the columns of a Ginibre matrix (modified Gram-Schmidt),
/// fixing phases so the map is well distributed.
fn orthonormal_columns(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    assert!(cols <= rows);
    let mut m = ginibre(rows, cols, rng);
    for j in 0..cols {
        for k in 0..j {
            let proj = m.column(k).dotc(&m.column(j));
            let prev = m.column(k).into_owned();
            let mut col = m.column_mut(j);
            col -= prev * proj;
        }
        let norm = m.column(j).norm();
        let mut col = m.column_mut(j);
        col /= Complex64::new(norm, 0.0);
    }
    m
}

/// Haar-like random unitary.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> Operator {
    let q = orthonormal_columns(dim, dim, rng);
    Operator::from_fn(dim, |i, j| q[(i, j)])
}

/// Random Hermitian matrix `(B + B†)/2` with Gaussian entries.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> Operator {
    let b = ginibre(dim, dim, rng);
    let h = (&b + b.adjoint()) * Complex64::new(0.5, 0.0);
    Operator::from_fn(dim, |i, j| h[(i, j)])
}

/// Random pure state (normalized Gaussian vector).
pub fn random_pure_state(dim: usize, rng: &mut impl Rng) -> PureState {
    let g = ginibre(dim, 1, rng);
    let norm = g.norm();
    let entries = (0..dim).map(|i| g[(i, 0)] / norm).collect();
    PureState::new(Vector::from_entries(entries).unwrap(), DEFAULT_TOL)
        .expect("normalized Gaussian vector is a unit vector")
}

/// Random full-rank density operator `G G† / tr(G G†)`.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> DensityOperator {
    let g = ginibre(dim, dim, rng);
    let p = &g * g.adjoint();
    let trace = p.trace().re;
    let op = Operator::from_fn(dim, |i, j| p[(i, j)] / trace);
    let sym = (&op + &op.adjoint()).scale(0.5);
    DensityOperator::new(sym, DEFAULT_TOL).expect("normalized Gram matrix is a state")
}

/// Two orthonormal vectors (the first two columns of a random isometry).
pub fn random_orthonormal_pair(dim: usize, rng: &mut impl Rng) -> (PureState, PureState) {
    assert!(dim >= 2);
    let q = orthonormal_columns(dim, 2, rng);
    let col = |j: usize| {
        let entries = (0..dim).map(|i| q[(i, j)]).collect();
        PureState::new(Vector::from_entries(entries).unwrap(), DEFAULT_TOL).unwrap()
    };
    (col(0), col(1))
}

/// Full orthonormal basis of the space.
pub fn random_basis(dim: usize, rng: &mut impl Rng) -> Vec<PureState> {
    let q = orthonormal_columns(dim, dim, rng);
    (0..dim)
        .map(|j| {
            let entries = (0..dim).map(|i| q[(i, j)]).collect();
            PureState::new(Vector::from_entries(entries).unwrap(), DEFAULT_TOL).unwrap()
        })
        .collect()
}

/// Random Kraus channel with `outcomes` operators in dimension `dim`.
///
/// Built by splitting a random `(k·dim) × dim` isometry `T` into `k` blocks,
/// so `Σ V†V = T†T = I` holds to round-off.
pub fn random_kraus_channel(
    dim: usize,
    outcomes: usize,
    prefix: &str,
    rng: &mut impl Rng,
) -> KrausChannel {
    assert!(outcomes >= 1);
    let iso = orthonormal_columns(dim * outcomes, dim, rng);
    let kraus = (0..outcomes)
        .map(|k| Operator::from_fn(dim, |i, j| iso[(k * dim + i, j)]))
        .collect();
    KrausChannel::new(OutcomeSet::indexed(prefix, outcomes), kraus, DEFAULT_TOL)
        .expect("isometry blocks satisfy the completeness relation")
}

/// Random dichotomic projective channel `{P, I − P}` where `P` projects onto
/// `rank` random orthonormal vectors (`1 ≤ rank < dim`).
pub fn random_projective_channel(
    dim: usize,
    rank: usize,
    prefix: &str,
    rng: &mut impl Rng,
) -> KrausChannel {
    assert!(rank >= 1 && rank < dim);
    let q = orthonormal_columns(dim, rank, rng);
    let mut p = DMatrix::<Complex64>::zeros(dim, dim);
    for col in q.column_iter() {
        p += col * col.adjoint();
    }
    let proj = Operator::from_fn(dim, |i, j| p[(i, j)]);
    let proj = (&proj + &proj.adjoint()).scale(0.5);
    let complement = &Operator::identity(dim) - &proj;
    KrausChannel::projective(OutcomeSet::indexed(prefix, 2), vec![proj, complement], 1e-8)
        .expect("projection pair sums to identity")
}

/// Random dichotomic channel whose Kraus operators are scaled unitaries
/// `{√s · U₁, √(1−s) · U₂}`. A convenient non-projective family in which
/// large interference coefficients are common.
pub fn random_scaled_unitary_channel(dim: usize, prefix: &str, rng: &mut impl Rng) -> KrausChannel {
    let s: f64 = 0.2 + 0.6 * rng.random::<f64>();
    let u1 = random_unitary(dim, rng).scale(s.sqrt());
    let u2 = random_unitary(dim, rng).scale((1.0 - s).sqrt());
    KrausChannel::new(OutcomeSet::indexed(prefix, 2), vec![u1, u2], DEFAULT_TOL)
        .expect("scaled unitary pair satisfies the completeness relation")
}

/// Random POVM induced by a random Kraus channel.
pub fn random_povm(dim: usize, outcomes: usize, prefix: &str, rng: &mut impl Rng) -> Povm {
    random_kraus_channel(dim, outcomes, prefix, rng).povm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let u = random_unitary(4, &mut rng);
        let gap = (&u.adjoint() * &u).max_abs_diff(&Operator::identity(4));
        assert!(gap <= 1e-12, "gap {gap}");
    }

    #[test]
    fn density_is_valid_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for dim in 2..=5 {
            let rho = random_density(dim, &mut rng);
            assert_eq!(rho.dim(), dim);
        }
    }

    #[test]
    fn kraus_channel_is_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let ch = random_kraus_channel(3, 4, "a", &mut rng);
        let mut sum = Operator::zeros(3);
        for v in ch.kraus_ops() {
            sum = &sum + &(&v.adjoint() * v);
        }
        assert!(sum.max_abs_diff(&Operator::identity(3)) <= 1e-12);
    }

    #[test]
    fn projective_channel_ops_are_projections() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let ch = random_projective_channel(4, 2, "a", &mut rng);
        for v in ch.kraus_ops() {
            assert!(v.is_projection(1e-10));
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let a = random_unitary(3, &mut ChaCha8Rng::seed_from_u64(35));
        let b = random_unitary(3, &mut ChaCha8Rng::seed_from_u64(35));
        assert_eq!(a, b);
    }
}
