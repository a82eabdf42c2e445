//! Frequency-probability simulation of context transitions.
//!
//! An ensemble of `N` systems prepared by a procedure `E` carries two
//! dichotomic properties `A` and `B`. Passing the systems with `A = a_i`
//! through a filter `F_i` produces a new ensemble `T_i` whose `B` statistics
//! (`m_ij`) may differ from those of the parent sub-ensemble (`n_ij`): the
//! filters change contexts. The relative-frequency identity
//!
//! `q_j = p₁ p₁ⱼ + p₂ p₂ⱼ + δ_j`,  `δ_j = [(n₁ⱼ - m₁ⱼ) + (n₂ⱼ - m₂ⱼ)]/N`
//!
//! holds exactly in count arithmetic, and the normalized perturbation
//! `λ_j = [(n₁ⱼ - m₁ⱼ) + (n₂ⱼ - m₂ⱼ)] / (2√(m₁ⱼ m₂ⱼ))` is the
//! frequency-side analog of the interference coefficient of
//! [`crate::interference`]. Three context models are provided: classical
//! filters that change nothing, classical filters with explicit perturbation
//! kernels, and quantum measurements driving the whole pipeline.
//!
//! The joint property counts `n_ij` are hidden (not jointly measurable in
//! the quantum case); the quantum-driven model synthesizes them purely as
//! bookkeeping and they cancel from every reported statistic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interference::{classify_transformation, Transformation};
use crate::measurement::KrausChannel;
use crate::sequential::{direct_second, sequential_joint};
use crate::state::DensityOperator;

/// Trials per RNG substream; batches merge by count addition, so the
/// partitioning (and any parallel execution of it) cannot change results.
const BATCH_SIZE: u64 = 1 << 16;

/// Raw counts of a simulated ensemble experiment.
///
/// `n_joint[i][j]` counts systems of the parent ensemble with `A = a_i` and
/// `B = b_j` (the hidden joint property); `m[i][j]` counts systems of the
/// filtered ensemble `T_i` with `B = b_j`. Marginals are derived:
/// `n_a` from `n_joint` rows, `n_b` from its columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnsembleCounts {
    total: u64,
    n_a: [u64; 2],
    n_b: [u64; 2],
    n_joint: [[u64; 2]; 2],
    m: [[u64; 2]; 2],
}

impl EnsembleCounts {
    /// Build from the hidden joint counts and the post-filter counts.
    /// Each filtered ensemble `T_i` must hold exactly `n_i^a` systems.
    pub fn new(n_joint: [[u64; 2]; 2], m: [[u64; 2]; 2]) -> Result<Self> {
        let n_a = [n_joint[0][0] + n_joint[0][1], n_joint[1][0] + n_joint[1][1]];
        let n_b = [n_joint[0][0] + n_joint[1][0], n_joint[0][1] + n_joint[1][1]];
        let total = n_a[0] + n_a[1];
        if total == 0 {
            return Err(Error::InfeasibleCounts {
                reason: "ensemble is empty".into(),
            });
        }
        for i in 0..2 {
            let row = m[i][0] + m[i][1];
            if row != n_a[i] {
                return Err(Error::InfeasibleCounts {
                    reason: format!(
                        "filtered ensemble T{} holds {row} systems but n_{}^a = {}",
                        i + 1,
                        i + 1,
                        n_a[i]
                    ),
                });
            }
        }
        Ok(Self {
            total,
            n_a,
            n_b,
            n_joint,
            m,
        })
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn n_a(&self) -> [u64; 2] {
        self.n_a
    }

    pub fn n_b(&self) -> [u64; 2] {
        self.n_b
    }

    pub fn n_joint(&self) -> [[u64; 2]; 2] {
        self.n_joint
    }

    pub fn m(&self) -> [[u64; 2]; 2] {
        self.m
    }

    /// Integer numerator of `δ_j`: `(n₁ⱼ - m₁ⱼ) + (n₂ⱼ - m₂ⱼ)`.
    pub fn delta_numerator(&self, j: usize) -> i64 {
        (self.n_joint[0][j] + self.n_joint[1][j]) as i64 - (self.m[0][j] + self.m[1][j]) as i64
    }
}

/// Double-stochasticity check of a transition matrix.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DoubleStochasticCheck {
    pub passed: bool,
    /// Largest deviation of any row or column sum from one.
    pub deviation: f64,
}

/// True iff every row and column of `p_trans` sums to one within `tol`.
pub fn double_stochastic_check(p_trans: &[[f64; 2]; 2], tol: f64) -> DoubleStochasticCheck {
    let mut deviation = 0.0f64;
    for k in 0..2 {
        let row = p_trans[k][0] + p_trans[k][1];
        let col = p_trans[0][k] + p_trans[1][k];
        deviation = deviation.max((row - 1.0).abs()).max((col - 1.0).abs());
    }
    DoubleStochasticCheck {
        passed: deviation <= tol,
        deviation,
    }
}

/// Frequency probabilities and perturbation coefficients of one experiment.
#[derive(Debug, Clone, Serialize)]
pub struct FrequencyReport {
    /// `p_i = n_i^a / N`.
    pub p: [f64; 2],
    /// `q_j = n_j^b / N`.
    pub q: [f64; 2],
    /// `p_ij = m_ij / n_i^a` (zero by convention when `n_i^a = 0`).
    pub p_trans: [[f64; 2]; 2],
    /// `δ_j`, computed with an integer numerator over `N`.
    pub delta: [f64; 2],
    /// `λ_j`; absent when some `m_kj = 0` makes the normalization vanish.
    pub lambda: [Option<f64>; 2],
    pub double_stochastic: DoubleStochasticCheck,
}

/// Frequency probabilities, `δ_j` and `λ_j` from raw counts.
pub fn frequency_report(counts: &EnsembleCounts, tol: f64) -> FrequencyReport {
    let n = counts.total as f64;
    let p = [counts.n_a[0] as f64 / n, counts.n_a[1] as f64 / n];
    let q = [counts.n_b[0] as f64 / n, counts.n_b[1] as f64 / n];
    let mut p_trans = [[0.0f64; 2]; 2];
    for i in 0..2 {
        if counts.n_a[i] > 0 {
            for j in 0..2 {
                p_trans[i][j] = counts.m[i][j] as f64 / counts.n_a[i] as f64;
            }
        }
    }
    let mut delta = [0.0f64; 2];
    let mut lambda = [None; 2];
    for j in 0..2 {
        let numer = counts.delta_numerator(j);
        delta[j] = numer as f64 / n;
        let product = counts.m[0][j] * counts.m[1][j];
        if product > 0 {
            lambda[j] = Some(numer as f64 / (2.0 * (product as f64).sqrt()));
        }
    }
    FrequencyReport {
        p,
        q,
        p_trans,
        delta,
        lambda,
        double_stochastic: double_stochastic_check(&p_trans, tol),
    }
}

/// How the parent ensemble and the filtered ensembles are produced.
#[derive(Debug, Clone)]
pub enum ContextKind {
    /// Classical systems with a fixed joint distribution of `(A, B)`;
    /// the filters only select, so `m_ij = n_ij` and `δ ≡ 0` exactly.
    ClassicalIndependent { joint: [[f64; 2]; 2] },
    /// Classical systems whose filter `F_i` resamples each member's `B`
    /// value through the row-stochastic kernel `kernels[i]`
    /// (`kernels[i][j][j']` = probability that `B = b_j` becomes `b_j'`).
    ClassicalPerturbed {
        joint: [[f64; 2]; 2],
        kernels: [[[f64; 2]; 2]; 2],
    },
    /// Quantum systems: `A` outcomes from measuring `first` on the state,
    /// `m_ij` from measuring `second` on the corresponding normalized
    /// posterior, and `n_j^b` from an independent batch of direct `second`
    /// measurements. Both channels must be dichotomic.
    QuantumDriven {
        state: DensityOperator,
        first: KrausChannel,
        second: KrausChannel,
    },
}

/// A preparation context with its RNG seed.
#[derive(Debug, Clone)]
pub struct ContextModel {
    kind: ContextKind,
    seed: u64,
}

fn check_distribution(values: &[f64], what: &str, tol: f64) -> Result<()> {
    let mut sum = 0.0;
    for &v in values {
        if !(0.0..=1.0 + tol).contains(&v) {
            return Err(Error::InvalidModel {
                reason: format!("{what} entry {v} outside [0, 1]"),
            });
        }
        sum += v;
    }
    if (sum - 1.0).abs() > tol {
        return Err(Error::InvalidModel {
            reason: format!("{what} sums to {sum} (expected 1)"),
        });
    }
    Ok(())
}

impl ContextModel {
    pub fn new(kind: ContextKind, seed: u64, tol: f64) -> Result<Self> {
        match &kind {
            ContextKind::ClassicalIndependent { joint } => {
                let flat = [joint[0][0], joint[0][1], joint[1][0], joint[1][1]];
                check_distribution(&flat, "joint distribution", tol)?;
            }
            ContextKind::ClassicalPerturbed { joint, kernels } => {
                let flat = [joint[0][0], joint[0][1], joint[1][0], joint[1][1]];
                check_distribution(&flat, "joint distribution", tol)?;
                for (i, kernel) in kernels.iter().enumerate() {
                    for (j, row) in kernel.iter().enumerate() {
                        check_distribution(row, &format!("kernel F{} row {j}", i + 1), tol)?;
                    }
                }
            }
            ContextKind::QuantumDriven {
                state,
                first,
                second,
            } => {
                if first.dim() != state.dim() || second.dim() != state.dim() {
                    return Err(Error::InvalidModel {
                        reason: "state and channel dimensions differ".into(),
                    });
                }
                if first.outcomes().len() != 2 || second.outcomes().len() != 2 {
                    return Err(Error::InvalidModel {
                        reason: "quantum-driven contexts require dichotomic channels".into(),
                    });
                }
            }
        }
        Ok(Self { kind, seed })
    }

    pub fn kind(&self) -> &ContextKind {
        &self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            kind: self.kind.clone(),
            seed,
        }
    }
}

/// RNG for one batch: one master seed, one substream per (phase, batch).
fn batch_rng(seed: u64, phase: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((phase << 48) | batch);
    rng
}

fn batches(total: u64) -> impl Iterator<Item = (u64, u64)> {
    // (batch index, batch length)
    (0..total.div_ceil(BATCH_SIZE)).map(move |b| {
        let start = b * BATCH_SIZE;
        (b, BATCH_SIZE.min(total - start))
    })
}

/// Draw index 0 or 1 according to `p0`.
fn bernoulli_index(rng: &mut ChaCha8Rng, p0: f64) -> usize {
    usize::from(rng.random::<f64>() >= p0)
}

/// Draw a cell of a 2×2 distribution.
fn joint_index(rng: &mut ChaCha8Rng, joint: &[[f64; 2]; 2]) -> (usize, usize) {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            acc += joint[i][j];
            if u < acc {
                return (i, j);
            }
        }
    }
    (1, 1)
}

/// Fill the hidden joint table from its margins by a proportional split
/// rounded to the nearest feasible integer table.
fn proportional_joint(n_a: [u64; 2], n_b: [u64; 2]) -> [[u64; 2]; 2] {
    let total = n_a[0] + n_a[1];
    let lo = (n_a[0] + n_b[0]).saturating_sub(total);
    let hi = n_a[0].min(n_b[0]);
    let ideal = (n_a[0] as f64 * n_b[0] as f64 / total as f64).round() as u64;
    let n11 = ideal.clamp(lo, hi);
    // n11 ≥ lo keeps the last cell nonnegative
    [
        [n11, n_a[0] - n11],
        [n_b[0] - n11, n11 + total - n_a[0] - n_b[0]],
    ]
}

/// Run one ensemble experiment of `n` systems. Deterministic in
/// `(model, n, model.seed)`.
pub fn simulate(model: &ContextModel, n: u64) -> Result<EnsembleCounts> {
    if n == 0 {
        return Err(Error::InvalidModel {
            reason: "ensemble size must be at least 1".into(),
        });
    }
    match &model.kind {
        ContextKind::ClassicalIndependent { joint } => {
            let mut n_joint = [[0u64; 2]; 2];
            for (batch, len) in batches(n) {
                let mut rng = batch_rng(model.seed, 0, batch);
                for _ in 0..len {
                    let (i, j) = joint_index(&mut rng, joint);
                    n_joint[i][j] += 1;
                }
            }
            // Context-independent filters: T_i reproduces S_i(A) statistics.
            EnsembleCounts::new(n_joint, n_joint)
        }
        ContextKind::ClassicalPerturbed { joint, kernels } => {
            let mut n_joint = [[0u64; 2]; 2];
            let mut m = [[0u64; 2]; 2];
            for (batch, len) in batches(n) {
                let mut rng = batch_rng(model.seed, 0, batch);
                for _ in 0..len {
                    let (i, j) = joint_index(&mut rng, joint);
                    n_joint[i][j] += 1;
                    let j_new = bernoulli_index(&mut rng, kernels[i][j][0]);
                    m[i][j_new] += 1;
                }
            }
            EnsembleCounts::new(n_joint, m)
        }
        ContextKind::QuantumDriven {
            state,
            first,
            second,
        } => {
            let tol = crate::operator::DEFAULT_TOL;
            let pa = first.povm().outcome_probabilities(state, tol)?;
            let joint = sequential_joint(state, first, second, tol)?.joint;
            // P(b_j | a_i) = P{(a_i, b_j)} / μ^A(a_i); the row sum equals
            // μ^A(a_i), so this is the posterior-state distribution.
            let mut cond = [[0.5f64; 2]; 2];
            for i in 0..2 {
                let row = joint[i][0] + joint[i][1];
                if row > f64::MIN_POSITIVE {
                    cond[i] = [joint[i][0] / row, joint[i][1] / row];
                }
            }
            let qb = direct_second(state, second, tol)?;

            let mut n_a = [0u64; 2];
            let mut m = [[0u64; 2]; 2];
            for (batch, len) in batches(n) {
                let mut rng = batch_rng(model.seed, 0, batch);
                for _ in 0..len {
                    let i = bernoulli_index(&mut rng, pa[0]);
                    n_a[i] += 1;
                    let j = bernoulli_index(&mut rng, cond[i][0]);
                    m[i][j] += 1;
                }
            }
            let mut n_b = [0u64; 2];
            for (batch, len) in batches(n) {
                let mut rng = batch_rng(model.seed, 1, batch);
                for _ in 0..len {
                    n_b[bernoulli_index(&mut rng, qb[0])] += 1;
                }
            }
            EnsembleCounts::new(proportional_joint(n_a, n_b), m)
        }
    }
}

/// One simulated experiment in a convergence schedule.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub trials: u64,
    pub seed: u64,
    pub delta: [f64; 2],
    pub lambda: [Option<f64>; 2],
}

/// Convergence of `δ_j^(N)` and `λ_j^(N)` along an ensemble-size schedule.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    /// Mean `δ_j` over seeds at the largest ensemble size.
    pub limit_delta: [f64; 2],
    /// Mean `λ_j` at the largest ensemble size (absent when every seed was
    /// degenerate there).
    pub limit_lambda: [Option<f64>; 2],
    /// `max √N · |λ̂_j^(N) − limit|` over all rows with defined λ.
    pub sqrt_n_deviation: [Option<f64>; 2],
    /// Classification of the limiting coefficient.
    pub classification: [Option<Transformation>; 2],
}

/// Simulate the model over every `(ensemble size, seed)` pair and estimate
/// the limiting perturbation coefficients.
pub fn convergence_study(
    model: &ContextModel,
    schedule: &[u64],
    seeds: &[u64],
    tol: f64,
) -> Result<ConvergenceStudy> {
    if schedule.is_empty() || schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidModel {
            reason: "ensemble-size schedule must be strictly increasing".into(),
        });
    }
    if seeds.is_empty() {
        return Err(Error::InvalidModel {
            reason: "at least one seed is required".into(),
        });
    }
    let mut rows = Vec::with_capacity(schedule.len() * seeds.len());
    for &trials in schedule {
        for &seed in seeds {
            let counts = simulate(&model.with_seed(seed), trials)?;
            let report = frequency_report(&counts, tol);
            rows.push(ConvergenceRow {
                trials,
                seed,
                delta: report.delta,
                lambda: report.lambda,
            });
        }
    }

    let largest = *schedule.last().expect("schedule is nonempty");
    let mut limit_delta = [0.0f64; 2];
    let mut limit_lambda = [None; 2];
    let mut sqrt_n_deviation = [None; 2];
    let mut classification = [None; 2];
    for j in 0..2 {
        let last_rows: Vec<&ConvergenceRow> = rows.iter().filter(|r| r.trials == largest).collect();
        limit_delta[j] = last_rows.iter().map(|r| r.delta[j]).sum::<f64>() / last_rows.len() as f64;
        let defined: Vec<f64> = last_rows.iter().filter_map(|r| r.lambda[j]).collect();
        if !defined.is_empty() {
            let limit = defined.iter().sum::<f64>() / defined.len() as f64;
            limit_lambda[j] = Some(limit);
            sqrt_n_deviation[j] = rows
                .iter()
                .filter_map(|r| r.lambda[j].map(|l| (r.trials as f64).sqrt() * (l - limit).abs()))
                .fold(None, |acc: Option<f64>, x| {
                    Some(acc.map_or(x, |a| a.max(x)))
                });
            classification[j] = Some(classify_transformation(limit, tol));
        }
    }

    Ok(ConvergenceStudy {
        rows,
        limit_delta,
        limit_lambda,
        sqrt_n_deviation,
        classification,
    })
}
