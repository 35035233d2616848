//! Seeded Monte Carlo runs of preparation and measurement, compared with the
//! Born-rule predictions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entangle::ConcentrationPlan;
use crate::error::{Error, Result};
use crate::minerror::{error_probability, helstrom_measurement, Assignment, Ensemble, TwoStateFamily};
use crate::povm::{outcome_probs, Povm};
use crate::qcore::{partial_trace, BipartiteState, Ket, Operator, Subsystem};
use crate::unambiguous::UnambiguousPovm;
use crate::ZERO_PROB;

/// Allowed distance of a probability vector's sum from one before it is
/// renormalized rather than rejected.
pub const SUM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub trials: u64,
    /// Pass threshold in standard errors.
    pub reporting: f64,
}

impl SimConfig {
    pub fn new(seed: u64, trials: u64) -> Result<Self> {
        if trials < 1 {
            return Err(Error::OutOfRange {
                what: "trials",
                value: trials as f64,
                range: ">= 1",
            });
        }
        Ok(Self {
            seed,
            trials,
            reporting: 3.0,
        })
    }

    pub fn with_reporting(mut self, k: f64) -> Result<Self> {
        if k.is_nan() || k <= 0.0 {
            return Err(Error::OutOfRange {
                what: "reporting",
                value: k,
                range: "> 0",
            });
        }
        self.reporting = k;
        Ok(self)
    }
}

/// An empirical frequency with its prediction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub hits: u64,
    pub n: u64,
    pub rate: f64,
    pub analytic: f64,
    /// `sqrt(p (1 - p) / n)` at the analytic `p`.
    pub stderr: f64,
    pub pass: bool,
}

impl Metric {
    /// A zero standard error (analytic 0 or 1) demands an exact match.
    pub fn new(name: impl Into<String>, hits: u64, n: u64, analytic: f64, reporting: f64) -> Self {
        let (rate, stderr) = if n == 0 {
            (0.0, 0.0)
        } else {
            let nf = n as f64;
            (
                hits as f64 / nf,
                (analytic * (1.0 - analytic)).max(0.0).sqrt() / nf.sqrt(),
            )
        };
        let pass = n == 0
            || if stderr == 0.0 {
                rate == analytic
            } else {
                (rate - analytic).abs() <= reporting * stderr
            };
        Self {
            name: name.into(),
            hits,
            n,
            rate,
            analytic,
            stderr,
            pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub seed: u64,
    pub trials: u64,
    pub labels: Vec<String>,
    /// Number of trials that ended in each outcome.
    pub counts: Vec<u64>,
    /// `joint[j][k]`: trials preparing state `j` that ended in outcome `k`.
    pub joint: Vec<Vec<u64>>,
    pub metrics: Vec<Metric>,
}

impl SimReport {
    pub fn passed(&self) -> bool {
        self.metrics.iter().all(|m| m.pass)
    }

    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }

    pub fn state_counts(&self) -> Vec<u64> {
        self.joint.iter().map(|row| row.iter().sum()).collect()
    }
}

/// Clamps entries below [`ZERO_PROB`] to zero and renormalizes.
pub fn sanitize(probs: &[f64]) -> Result<Vec<f64>> {
    if probs.is_empty() {
        return Err(Error::Empty("probability vector"));
    }
    let clamped: Vec<f64> = probs.iter().map(|&p| if p < ZERO_PROB { 0.0 } else { p }).collect();
    let sum: f64 = clamped.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::Invalid(format!("probabilities sum to {sum}")));
    }
    Ok(clamped.into_iter().map(|p| p / sum).collect())
}

/// Cumulative table for inverse-CDF sampling. Zero entries can never be hit.
#[derive(Clone, Debug)]
struct Categorical {
    cumulative: Vec<f64>,
    last: usize,
}

impl Categorical {
    fn new(probs: &[f64]) -> Result<Self> {
        let p = sanitize(probs)?;
        let last = p.iter().rposition(|&x| x > 0.0).ok_or(Error::Empty("support"))?;
        let mut acc = 0.0;
        let cumulative = p
            .iter()
            .map(|x| {
                acc += x;
                acc
            })
            .collect();
        Ok(Self { cumulative, last })
    }

    fn sample(&self, u: f64) -> usize {
        // first index whose cumulative value exceeds u; zero-width bins are skipped
        let k = self.cumulative.partition_point(|&c| c <= u);
        k.min(self.last)
    }
}

/// Prepares states by prior and measures them, returning `joint[j][k]`.
fn simulate(priors: &Categorical, outcomes: &[Categorical], k: usize, cfg: &SimConfig) -> Vec<Vec<u64>> {
    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = outcomes.len();
    let flat = (0..cfg.trials)
        .into_par_iter()
        .fold(
            || vec![0u64; n * k],
            |mut acc, trial| {
                let mut rng = base.clone();
                rng.set_stream(trial);
                let j = priors.sample(rng.random::<f64>());
                let o = outcomes[j].sample(rng.random::<f64>());
                acc[j * k + o] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; n * k],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    flat.chunks(k).map(<[u64]>::to_vec).collect()
}

fn born_tables(ens: &Ensemble, povm: &Povm) -> Result<(Vec<Categorical>, Vec<Vec<f64>>)> {
    let mut cats = Vec::with_capacity(ens.len());
    let mut probs = Vec::with_capacity(ens.len());
    for rho in ens.densities() {
        let p = sanitize(&outcome_probs(povm, &rho)?)?;
        cats.push(Categorical::new(&p)?);
        probs.push(p);
    }
    Ok((cats, probs))
}

fn column_sums(joint: &[Vec<u64>], k: usize) -> Vec<u64> {
    (0..k).map(|o| joint.iter().map(|row| row[o]).sum()).collect()
}

/// Simulates minimum-error discrimination; the `error` metric counts trials
/// whose outcome does not announce the prepared state.
pub fn run_discrimination(
    ens: &Ensemble,
    povm: &Povm,
    assignment: Option<&Assignment>,
    cfg: &SimConfig,
) -> Result<SimReport> {
    let analytic = error_probability(ens, povm, assignment)?;
    let aligned = Assignment::aligned(ens.len());
    let a = assignment.unwrap_or(&aligned);
    let (cats, _) = born_tables(ens, povm)?;
    let k = povm.len();
    let joint = simulate(&Categorical::new(ens.priors())?, &cats, k, cfg);
    let correct: u64 = (0..ens.len()).map(|j| joint[j][a.outcome_of(j)]).sum();
    let errors = cfg.trials - correct;
    Ok(SimReport {
        seed: cfg.seed,
        trials: cfg.trials,
        labels: povm.labels().to_vec(),
        counts: column_sums(&joint, k),
        joint,
        metrics: vec![Metric::new("error", errors, cfg.trials, analytic, cfg.reporting)],
    })
}

/// Simulates unambiguous discrimination. Outcome `j < N` announces state `j`
/// and the last outcome is inconclusive. Priors default to uniform.
///
/// Metrics: `inconclusive`, `wrong` (a conclusive outcome naming another
/// state) and `success_j` conditioned on preparing state `j`.
pub fn run_unambiguous(
    states: &[Ket],
    upovm: &UnambiguousPovm,
    priors: Option<&[f64]>,
    cfg: &SimConfig,
) -> Result<SimReport> {
    let n = states.len();
    if upovm.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: upovm.len(),
        });
    }
    let eta = priors.map_or_else(|| vec![1.0 / n as f64; n], <[f64]>::to_vec);
    let ens = Ensemble::from_kets(states.to_vec(), eta.clone())?;
    let povm = upovm.to_povm()?;
    let (cats, probs) = born_tables(&ens, &povm)?;
    let k = povm.len();
    let joint = simulate(&Categorical::new(&eta)?, &cats, k, cfg);

    let q = k - 1;
    let inconclusive_hits: u64 = joint.iter().map(|row| row[q]).sum();
    let inconclusive_p: f64 = eta.iter().zip(&probs).map(|(e, p)| e * p[q]).sum();
    let wrong_hits: u64 = (0..n)
        .map(|j| (0..n).filter(|&o| o != j).map(|o| joint[j][o]).sum::<u64>())
        .sum();
    let wrong_p: f64 = (0..n)
        .map(|j| eta[j] * (0..n).filter(|&o| o != j).map(|o| probs[j][o]).sum::<f64>())
        .sum();

    let mut metrics = vec![
        Metric::new(
            "inconclusive",
            inconclusive_hits,
            cfg.trials,
            inconclusive_p,
            cfg.reporting,
        ),
        Metric::new("wrong", wrong_hits, cfg.trials, wrong_p, cfg.reporting),
    ];
    for j in 0..n {
        let prepared: u64 = joint[j].iter().sum();
        metrics.push(Metric::new(
            format!("success_{j}"),
            joint[j][j],
            prepared,
            probs[j][j],
            cfg.reporting,
        ));
    }
    Ok(SimReport {
        seed: cfg.seed,
        trials: cfg.trials,
        labels: povm.labels().to_vec(),
        counts: column_sums(&joint, k),
        joint,
        metrics,
    })
}

/// One row of an error-versus-angle sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta: f64,
    /// `(1 - sin 2 theta) / 2`
    pub analytic: f64,
    pub empirical: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
    pub pass: bool,
}

/// Equal-prior two-state discrimination with the optimal measurement at each
/// angle of `grid`.
pub fn sweep_theta(grid: &[f64], cfg: &SimConfig) -> Result<Vec<SweepRow>> {
    grid.iter()
        .map(|&theta| {
            if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_4 + 1e-12) {
                return Err(Error::OutOfRange {
                    what: "theta",
                    value: theta,
                    range: "(0, pi/4]",
                });
            }
            let fam = TwoStateFamily::new(theta, 0.5)?;
            let rep = run_discrimination(&fam.ensemble(), &helstrom_measurement(&fam), None, cfg)?;
            let m = &rep.metrics[0];
            let analytic = (0.5 * (1.0 - (2.0 * fam.theta).sin())).max(0.0);
            let check = Metric::new("error", m.hits, m.n, analytic, cfg.reporting);
            Ok(SweepRow {
                theta,
                analytic,
                empirical: check.rate,
                stderr: check.stderr,
                trials: cfg.trials,
                seed: cfg.seed,
                pass: check.pass,
            })
        })
        .collect()
}

/// Runs the orthogonalising measurement `{A_O^dagger A_O, 1 - A_O^dagger A_O}`
/// on the reduced state of A. Metric `success` targets the plan's success
/// probability.
pub fn run_concentration(psi: &BipartiteState, plan: &ConcentrationPlan, cfg: &SimConfig) -> Result<SimReport> {
    let rho_a = partial_trace(psi, Subsystem::A);
    let effect = plan.effect();
    let fail = &Operator::identity(effect.dim()) - &effect;
    let povm = Povm::new(vec![effect, fail], vec!["success".into(), "failure".into()])?;
    let ens = Ensemble::new(vec![crate::minerror::State::Mixed(rho_a)], vec![1.0])?;
    let (cats, probs) = born_tables(&ens, &povm)?;
    let joint = simulate(&Categorical::new(&[1.0])?, &cats, 2, cfg);
    let analytic = probs[0][0];
    Ok(SimReport {
        seed: cfg.seed,
        trials: cfg.trials,
        labels: povm.labels().to_vec(),
        counts: column_sums(&joint, 2),
        metrics: vec![Metric::new("success", joint[0][0], cfg.trials, analytic, cfg.reporting)],
        joint,
    })
}
