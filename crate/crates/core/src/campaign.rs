//! Randomized certificate campaigns with deterministic, order-independent
//! seeding and replayable violation witnesses.

use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{
    certify_conditional_continuity, certify_naive, certify_oe_continuity, certify_restricted_continuity, certify_set_distance_continuity,
    concavity_gap, BoundKind, BoundReport, CertificateStatus, ConvexStateSet,
};
use crate::error::{Error, Result};
use crate::qmat::io::{povm_from_json, povm_to_json, state_from_json, state_to_json};
use crate::qmat::random::{random_density, random_povm, random_probability, rng_for_trial, QRng};
use crate::qmat::{DensityMatrix, ProbabilityVector};

/// Fuzz campaign settings; the TOML config file mirrors these fields.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub seed: u64,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub outcome_counts: Vec<usize>,
    pub bound_kinds: Vec<BoundKind>,
    pub tolerance: f64,
    pub output_path: PathBuf,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            seed: 0,
            trials: 1000,
            dims: vec![2, 3, 4, 5, 6],
            outcome_counts: (1..=8).collect(),
            bound_kinds: vec![BoundKind::Afw],
            tolerance: 1e-9,
            output_path: PathBuf::from("fuzz.csv"),
        }
    }
}

impl CampaignConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("campaign config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Precondition("trials must be at least 1".into()));
        }
        if self.dims.is_empty() || self.dims.iter().any(|d| !(2..=16).contains(d)) {
            return Err(Error::Precondition(format!("dims must be nonempty and within [2, 16], got {:?}", self.dims)));
        }
        if self.outcome_counts.is_empty() || self.outcome_counts.contains(&0) {
            return Err(Error::Precondition("outcome counts must be nonempty and positive".into()));
        }
        if self.bound_kinds.is_empty() {
            return Err(Error::Precondition("no bound kinds selected".into()));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::Precondition(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }

    /// Seed of trial `index`; a single row replays with `seed = trial_seed, trials = 1`.
    pub fn trial_seed(&self, index: usize) -> u64 {
        self.seed.wrapping_add(index as u64)
    }
}

/// One CSV row.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CampaignRow {
    pub seed: u64,
    pub d: usize,
    pub epsilon: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub kind: BoundKind,
}

/// A certificate instance in file form; matrices use the JSON formats of [`crate::qmat::io`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Instance {
    Pair { povm: Value, rho: Value, sigma: Value },
    Mixture { povm: Value, states: Vec<Value>, weights: Vec<f64> },
    Conditional { povm: Value, rho: Value, sigma: Value, d_a: usize, d_b: usize },
    SetDistance { povm: Value, vertices: Vec<Value>, rho: Value, sigma: Value, kappa: f64 },
    Restricted { povms: Vec<Value>, vertices: Vec<Value>, rho: Value, sigma: Value, kappa: f64 },
}

fn states_of(v: &[Value]) -> Result<Vec<DensityMatrix>> {
    v.iter().map(state_from_json).collect()
}

impl Instance {
    pub fn certify(&self, kind: BoundKind) -> Result<BoundReport> {
        match (kind, self) {
            (BoundKind::Afw, Instance::Pair { povm, rho, sigma }) => {
                certify_oe_continuity(&povm_from_json(povm)?, &state_from_json(rho)?, &state_from_json(sigma)?)
            }
            (BoundKind::Naive, Instance::Pair { povm, rho, sigma }) => {
                certify_naive(&povm_from_json(povm)?, &state_from_json(rho)?, &state_from_json(sigma)?)
            }
            (BoundKind::Concavity, Instance::Mixture { povm, states, weights }) => {
                concavity_gap(&povm_from_json(povm)?, &states_of(states)?, &ProbabilityVector::new(weights.clone())?)
            }
            (BoundKind::Conditional, Instance::Conditional { povm, rho, sigma, d_a, d_b }) => {
                certify_conditional_continuity(&povm_from_json(povm)?, &state_from_json(rho)?, &state_from_json(sigma)?, *d_a, *d_b)
            }
            (BoundKind::SetDistance, Instance::SetDistance { povm, vertices, rho, sigma, kappa }) => certify_set_distance_continuity(
                &povm_from_json(povm)?,
                &ConvexStateSet::hull(states_of(vertices)?)?,
                &state_from_json(rho)?,
                &state_from_json(sigma)?,
                *kappa,
            ),
            (BoundKind::Restricted, Instance::Restricted { povms, vertices, rho, sigma, kappa }) => certify_restricted_continuity(
                &state_from_json(rho)?,
                &state_from_json(sigma)?,
                &ConvexStateSet::hull(states_of(vertices)?)?,
                &povms.iter().map(povm_from_json).collect::<Result<Vec<_>>>()?,
                *kappa,
            ),
            (k, _) => Err(Error::Parse(format!("instance shape does not match bound kind {}", k.name()))),
        }
    }
}

/// A violated certificate with everything needed to replay it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub kind: BoundKind,
    pub seed: u64,
    pub tolerance: f64,
    pub report: Value,
    pub instance: Instance,
}

impl Witness {
    pub fn replay(&self) -> Result<BoundReport> {
        self.instance.certify(self.kind)
    }
}

pub fn read_witnesses(path: &Path) -> Result<Vec<Witness>> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    match v {
        Value::Array(_) => Ok(serde_json::from_value(v)?),
        _ => Ok(vec![serde_json::from_value(v)?]),
    }
}

fn pick<T: Copy>(xs: &[T], rng: &mut QRng) -> T {
    xs[rng.random_range(0..xs.len())]
}

/// A random state of random rank.
fn state(d: usize, rng: &mut QRng) -> Result<DensityMatrix> {
    let rank = rng.random_range(1..=d);
    random_density(d, rank, rng)
}

/// Either an independent state or a random interpolation toward `rho`, so
/// that small trace distances are well represented.
fn partner(rho: &DensityMatrix, rng: &mut QRng) -> Result<DensityMatrix> {
    let other = state(rho.dim(), rng)?;
    if rng.random_bool(0.5) {
        Ok(other)
    } else {
        let t: f64 = rng.random::<f64>().powi(3);
        DensityMatrix::mixture(&[rho.clone(), other], &ProbabilityVector::new(vec![1.0 - t, t])?)
    }
}

/// Hull vertices always include the maximally mixed state, which makes
/// `κ = log d` admissible.
fn hull_vertices(d: usize, rng: &mut QRng) -> Result<Vec<DensityMatrix>> {
    let extra = rng.random_range(1..=3);
    let mut v = vec![DensityMatrix::maximally_mixed(d)];
    for _ in 0..extra {
        v.push(state(d, rng)?);
    }
    Ok(v)
}

/// Draws an instance of `kind` from the trial's stream.
pub fn draw_instance(config: &CampaignConfig, kind: BoundKind, rng: &mut QRng) -> Result<Instance> {
    let d = pick(&config.dims, rng);
    let k = pick(&config.outcome_counts, rng);
    Ok(match kind {
        BoundKind::Afw | BoundKind::Naive => {
            let rho = state(d, rng)?;
            let sigma = partner(&rho, rng)?;
            Instance::Pair { povm: povm_to_json(&random_povm(d, k, rng)?), rho: state_to_json(&rho), sigma: state_to_json(&sigma) }
        }
        BoundKind::Concavity => {
            let n = rng.random_range(1..=4);
            let states = (0..n).map(|_| state(d, rng).map(|s| state_to_json(&s))).collect::<Result<_>>()?;
            Instance::Mixture {
                povm: povm_to_json(&random_povm(d, k, rng)?),
                states,
                weights: random_probability(n, rng).as_slice().to_vec(),
            }
        }
        BoundKind::Conditional => {
            let small: Vec<usize> = config.dims.iter().copied().filter(|&x| x <= 4).collect();
            let pool = if small.is_empty() { vec![2] } else { small };
            let d_a = pick(&pool, rng);
            let d_b = pick(&pool, rng);
            let rho = state(d_a * d_b, rng)?;
            let sigma = partner(&rho, rng)?;
            Instance::Conditional {
                povm: povm_to_json(&random_povm(d_a, k, rng)?),
                rho: state_to_json(&rho),
                sigma: state_to_json(&sigma),
                d_a,
                d_b,
            }
        }
        BoundKind::SetDistance => {
            let rho = state(d, rng)?;
            let sigma = partner(&rho, rng)?;
            Instance::SetDistance {
                povm: povm_to_json(&random_povm(d, k, rng)?),
                vertices: hull_vertices(d, rng)?.iter().map(state_to_json).collect(),
                rho: state_to_json(&rho),
                sigma: state_to_json(&sigma),
                kappa: (d as f64).ln(),
            }
        }
        BoundKind::Restricted => {
            let d = d.min(4);
            let rho = state(d, rng)?;
            let sigma = partner(&rho, rng)?;
            let count = rng.random_range(1..=4);
            let povms = (0..count).map(|_| random_povm(d, k.max(2), rng).map(|m| povm_to_json(&m))).collect::<Result<_>>()?;
            Instance::Restricted {
                povms,
                vertices: hull_vertices(d, rng)?.iter().map(state_to_json).collect(),
                rho: state_to_json(&rho),
                sigma: state_to_json(&sigma),
                kappa: (d as f64).ln(),
            }
        }
    })
}

#[derive(Clone, Debug)]
pub struct CampaignOutcome {
    /// Rows in trial order, kinds in configured order within a trial.
    pub rows: Vec<CampaignRow>,
    pub witnesses: Vec<Witness>,
    pub violations: usize,
    pub failed_preconditions: usize,
}

fn run_trial(config: &CampaignConfig, index: usize) -> Result<Vec<(CampaignRow, Option<Witness>, CertificateStatus)>> {
    let seed = config.trial_seed(index);
    config
        .bound_kinds
        .iter()
        .enumerate()
        .map(|(slot, &kind)| {
            let mut rng = rng_for_trial(seed, slot as u64);
            let instance = draw_instance(config, kind, &mut rng)?;
            let report = instance.certify(kind)?;
            let status = if report.status == CertificateStatus::FailedPrecondition {
                CertificateStatus::FailedPrecondition
            } else if report.violated(config.tolerance) {
                CertificateStatus::Violated
            } else {
                CertificateStatus::Passed
            };
            let row = CampaignRow {
                seed,
                d: report.dim,
                epsilon: report.epsilon,
                lhs: report.quantity_lhs,
                rhs: report.bound_rhs,
                slack: report.slack,
                kind,
            };
            let witness = (status == CertificateStatus::Violated).then(|| Witness {
                kind,
                seed,
                tolerance: config.tolerance,
                report: serde_json::to_value(&report).unwrap_or(Value::Null),
                instance,
            });
            Ok((row, witness, status))
        })
        .collect()
}

/// Runs the campaign on up to `jobs` threads; results do not depend on `jobs`.
pub fn run_campaign(config: &CampaignConfig, jobs: usize) -> Result<CampaignOutcome> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    let per_trial: Vec<Vec<_>> = pool.install(|| (0..config.trials).into_par_iter().map(|i| run_trial(config, i)).collect::<Result<_>>())?;
    let mut out = CampaignOutcome { rows: Vec::new(), witnesses: Vec::new(), violations: 0, failed_preconditions: 0 };
    for (row, witness, status) in per_trial.into_iter().flatten() {
        match status {
            CertificateStatus::Violated => out.violations += 1,
            CertificateStatus::FailedPrecondition => out.failed_preconditions += 1,
            CertificateStatus::Passed => {}
        }
        out.rows.push(row);
        out.witnesses.extend(witness);
    }
    Ok(out)
}

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if x.is_finite() {
        format!("{x:.11e}").parse().unwrap_or(x)
    } else {
        x
    }
}

/// Writes rows as CSV with the fixed column order of [`CampaignRow`].
pub fn write_csv<W: std::io::Write>(rows: &[CampaignRow], w: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    for r in rows {
        let rounded = CampaignRow { epsilon: sig12(r.epsilon), lhs: sig12(r.lhs), rhs: sig12(r.rhs), slack: sig12(r.slack), ..r.clone() };
        writer.serialize(rounded).map_err(|e| Error::Parse(format!("csv: {e}")))?;
    }
    writer.flush()?;
    Ok(())
}

/// Witness file path next to the CSV output.
pub fn witness_path(output: &Path) -> PathBuf {
    output.with_extension("witness.json")
}

pub fn summary_json(config: &CampaignConfig, outcome: &CampaignOutcome) -> Value {
    json!({
        "seed": config.seed,
        "trials": config.trials,
        "kinds": config.bound_kinds.iter().map(|k| k.name()).collect::<Vec<_>>(),
        "rows": outcome.rows.len(),
        "violations": outcome.violations,
        "failed_preconditions": outcome.failed_preconditions,
        "worst_slack": outcome.rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kinds: Vec<BoundKind>) -> CampaignConfig {
        CampaignConfig { trials: 12, dims: vec![2, 3], outcome_counts: vec![1, 2, 3], bound_kinds: kinds, ..Default::default() }
    }

    #[test]
    fn toml_round_trip() {
        let c = small(vec![BoundKind::Afw, BoundKind::Concavity]);
        let text = toml::to_string(&c).unwrap();
        assert_eq!(CampaignConfig::from_toml(&text).unwrap(), c);
        assert!(CampaignConfig::from_toml("trials = 3\nbogus = 1").is_err());
    }

    #[test]
    fn validation_rejects_bad_dims() {
        let c = CampaignConfig { dims: vec![1], ..Default::default() };
        assert!(c.validate().is_err());
        let c = CampaignConfig { trials: 0, ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn all_kinds_pass() {
        let c = small(vec![
            BoundKind::Afw,
            BoundKind::Naive,
            BoundKind::Concavity,
            BoundKind::Conditional,
            BoundKind::SetDistance,
            BoundKind::Restricted,
        ]);
        let out = run_campaign(&c, 2).unwrap();
        assert_eq!(out.rows.len(), 72);
        assert_eq!(out.violations, 0);
    }

    #[test]
    fn output_independent_of_jobs() {
        let c = small(vec![BoundKind::Afw, BoundKind::Concavity]);
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&run_campaign(&c, 1).unwrap().rows, &mut a).unwrap();
        write_csv(&run_campaign(&c, 4).unwrap().rows, &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn witness_replays() {
        let c = small(vec![BoundKind::Conditional]);
        let mut rng = rng_for_trial(5, 0);
        let inst = draw_instance(&c, BoundKind::Conditional, &mut rng).unwrap();
        let w = Witness { kind: BoundKind::Conditional, seed: 5, tolerance: 1e-9, report: Value::Null, instance: inst.clone() };
        let text = serde_json::to_string(&w).unwrap();
        let back: Witness = serde_json::from_str(&text).unwrap();
        let r1 = back.replay().unwrap();
        let r2 = inst.certify(BoundKind::Conditional).unwrap();
        assert_eq!(r1.quantity_lhs, r2.quantity_lhs);
    }

    #[test]
    fn sig12_rounds() {
        assert_eq!(sig12(0.1234567890123456), 0.123456789012);
        assert_eq!(sig12(0.0), 0.0);
    }
}
