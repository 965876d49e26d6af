//! Command-line front end. Exit codes: 0 ok, 1 bound violated, 2 bad input
//! or configuration, 3 solver did not converge.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::bounds::{BoundKind, PASS_TOLERANCE};
use crate::campaign::{read_witnesses, run_campaign, sig12, summary_json, witness_path, write_csv, CampaignConfig, Instance};
use crate::distance::{diamond_distance_with, sim_distance_with, SolverOptions};
use crate::entropy::{observational_entropy, LogBase};
use crate::error::{Error, Result};
use crate::experiments::{
    channel_continuity_probe, decade_dims, example1_sweep, gamma_continuity_probe, minimax_instances, minimax_spot_check, no_go_scan,
    refinement_pathology,
};
use crate::povm::{postprocess, refine_split, StochasticMap};
use crate::qmat::io::{povm_to_json, read_povm, read_state, state_to_json};
use crate::qmat::random::{random_density, random_povm, rng_from_seed};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

pub const SEED_ENV: &str = "OENTROPY_SEED";

pub const EXPERIMENTS: [&str; 6] = ["example1", "nogo", "pathology", "channel-probe", "gamma-probe", "minimax"];

#[derive(Debug, Parser)]
#[command(name = "oentropy", version, about = "Observational entropy and its continuity certificates")]
pub struct Cli {
    /// Report entropic quantities in this base (2 or e).
    #[arg(long, global = true, default_value = "e", value_parser = parse_base)]
    pub log_base: LogBase,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Observational entropy of a state under a POVM.
    Entropy {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        povm: PathBuf,
    },
    /// Check one continuity or concavity certificate.
    Certify(CertifyArgs),
    /// Randomized certificate campaign.
    Fuzz(FuzzArgs),
    /// Run a named experiment and write its tables.
    Experiment(ExperimentArgs),
    /// Diamond distance between measuring channels and/or the simulation distance.
    Distance(DistanceArgs),
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long, value_parser = parse_kind, required_unless_present = "replay")]
    pub kind: Option<BoundKind>,
    /// POVM file; repeat for the restricted class.
    #[arg(long)]
    pub povm: Vec<PathBuf>,
    #[arg(long)]
    pub rho: Option<PathBuf>,
    #[arg(long)]
    pub sigma: Option<PathBuf>,
    /// Subsystem split `d_a,d_b` for the conditional kind.
    #[arg(long, value_delimiter = ',')]
    pub dims: Vec<usize>,
    /// Mixture components (concavity).
    #[arg(long = "state", value_delimiter = ',')]
    pub states: Vec<PathBuf>,
    /// Mixture weights (concavity).
    #[arg(long, value_delimiter = ',')]
    pub weights: Vec<f64>,
    /// Hull vertices of χ (set-distance, restricted).
    #[arg(long = "vertex", value_delimiter = ',')]
    pub vertices: Vec<PathBuf>,
    /// Maximum variation; defaults to log d, valid when 1/d lies in χ.
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long, default_value_t = PASS_TOLERANCE)]
    pub tolerance: f64,
    /// Re-check the instances of a witness file written by `fuzz`.
    #[arg(long, conflicts_with = "kind")]
    pub replay: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    /// TOML file mirroring the campaign fields; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub outcomes: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', value_parser = parse_kind)]
    pub kinds: Option<Vec<BoundKind>>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    pub name: String,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,6")]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 21)]
    pub lambda_steps: usize,
    #[arg(long, default_value_t = 0.05)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1e6)]
    pub max_d: f64,
    #[arg(long, default_value_t = 0.9)]
    pub threshold: f64,
    #[arg(long, default_value_t = 10)]
    pub iterations: usize,
    /// Hilbert-space dimension for the random instances.
    #[arg(long, short, default_value_t = 4)]
    pub d: usize,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.01)]
    pub resolution: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Diamond,
    Gamma,
    Both,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[arg(long)]
    pub m: PathBuf,
    #[arg(long)]
    pub n: PathBuf,
    #[arg(long, value_enum, default_value_t = Metric::Diamond)]
    pub metric: Metric,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
    /// Write the solver's bound history as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

fn parse_base(s: &str) -> std::result::Result<LogBase, String> {
    match s {
        "e" | "nats" => Ok(LogBase::Nats),
        "2" | "bits" => Ok(LogBase::Bits),
        other => other.parse::<f64>().map_err(|e| e.to_string()).and_then(|b| LogBase::from_base(b).map_err(|e| e.to_string())),
    }
}

fn parse_kind(s: &str) -> std::result::Result<BoundKind, String> {
    BoundKind::parse(s).ok_or_else(|| format!("unknown bound kind `{s}`; expected naive, afw, concavity, conditional, set-distance or restricted"))
}

/// Outcome of a subcommand before it becomes an exit code.
enum Outcome {
    Ok,
    Violation,
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` and diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::Violation) => EXIT_VIOLATION,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
                _ => EXIT_INPUT,
            }
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    let base = cli.log_base;
    match &cli.command {
        Command::Entropy { state, povm } => {
            let rho = read_state(state)?;
            let m = read_povm(povm)?;
            let oe = observational_entropy(&m, &rho)?.converted(base);
            emit(out, &present(serde_json::to_value(oe)?, base, &[]))?;
            Ok(Outcome::Ok)
        }
        Command::Certify(a) => certify(a, base, out, err),
        Command::Fuzz(a) => fuzz(a, out, err),
        Command::Experiment(a) => experiment(a, base, out),
        Command::Distance(a) => distance(a, out),
    }
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

/// Rounds every float to 12 significant digits and converts the named
/// entropy-valued fields to `base`.
fn present(v: Value, base: LogBase, entropic: &[&str]) -> Value {
    fn walk(v: Value, base: LogBase, entropic: &[&str], convert: bool) -> Value {
        match v {
            Value::Number(n) if n.is_f64() => {
                let x = n.as_f64().unwrap_or(f64::NAN);
                let x = if convert { base.convert(x) } else { x };
                serde_json::Number::from_f64(sig12(x)).map(Value::Number).unwrap_or(Value::Null)
            }
            Value::Array(xs) => Value::Array(xs.into_iter().map(|x| walk(x, base, entropic, convert)).collect()),
            Value::Object(m) => Value::Object(
                m.into_iter()
                    .map(|(k, x)| {
                        let c = convert || entropic.contains(&k.as_str());
                        (k, walk(x, base, entropic, c))
                    })
                    .collect(),
            ),
            other => other,
        }
    }
    walk(v, base, entropic, false)
}

const REPORT_FIELDS: [&str; 5] = ["quantity_lhs", "bound_rhs", "slack", "kappa", "lower_bound"];

fn need<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    p.as_deref().ok_or_else(|| Error::Parse(format!("--{flag} is required for this bound kind")))
}

fn load_states(paths: &[PathBuf]) -> Result<Vec<Value>> {
    paths.iter().map(|p| read_state(p).map(|s| state_to_json(&s))).collect()
}

fn instance_from_flags(kind: BoundKind, a: &CertifyArgs) -> Result<Instance> {
    let one_povm = || -> Result<Value> {
        match a.povm.as_slice() {
            [p] => Ok(povm_to_json(&read_povm(p)?)),
            _ => Err(Error::Parse(format!("{} takes exactly one --povm", kind.name()))),
        }
    };
    let rho = || read_state(need(&a.rho, "rho")?);
    let sigma = || read_state(need(&a.sigma, "sigma")?);
    let kappa = |d: usize| a.kappa.unwrap_or((d as f64).ln());
    Ok(match kind {
        BoundKind::Afw | BoundKind::Naive => Instance::Pair { povm: one_povm()?, rho: state_to_json(&rho()?), sigma: state_to_json(&sigma()?) },
        BoundKind::Concavity => {
            if a.states.is_empty() {
                return Err(Error::Parse("concavity needs --state files and --weights".into()));
            }
            Instance::Mixture { povm: one_povm()?, states: load_states(&a.states)?, weights: a.weights.clone() }
        }
        BoundKind::Conditional => {
            let [d_a, d_b] = a.dims[..] else {
                return Err(Error::Parse("conditional kind requires --dims d_a,d_b".into()));
            };
            Instance::Conditional { povm: one_povm()?, rho: state_to_json(&rho()?), sigma: state_to_json(&sigma()?), d_a, d_b }
        }
        BoundKind::SetDistance | BoundKind::Restricted => {
            if a.vertices.is_empty() {
                return Err(Error::Parse(format!("{} needs at least one --vertex", kind.name())));
            }
            let rho = rho()?;
            let sigma = state_to_json(&sigma()?);
            let kappa = kappa(rho.dim());
            let vertices = load_states(&a.vertices)?;
            if kind == BoundKind::SetDistance {
                Instance::SetDistance { povm: one_povm()?, vertices, rho: state_to_json(&rho), sigma, kappa }
            } else {
                if a.povm.is_empty() {
                    return Err(Error::Parse("restricted needs one or more --povm".into()));
                }
                let povms = a.povm.iter().map(|p| read_povm(p).map(|m| povm_to_json(&m))).collect::<Result<_>>()?;
                Instance::Restricted { povms, vertices, rho: state_to_json(&rho), sigma, kappa }
            }
        }
    })
}

fn certify(a: &CertifyArgs, base: LogBase, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    if a.tolerance.is_nan() || a.tolerance <= 0.0 {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    if let Some(path) = &a.replay {
        let mut violated = false;
        let mut reports = Vec::new();
        for w in read_witnesses(path)? {
            let r = w.replay()?;
            let v = r.violated(a.tolerance.min(w.tolerance));
            violated |= v;
            let mut entry = present(serde_json::to_value(&r)?, base, &REPORT_FIELDS);
            if v {
                entry = json!({ "report": entry, "witness": w });
            }
            reports.push(entry);
        }
        emit(out, &Value::Array(reports))?;
        if violated {
            writeln!(err, "bound violated on replay of {}", path.display())?;
            return Ok(Outcome::Violation);
        }
        return Ok(Outcome::Ok);
    }
    let kind = a.kind.ok_or_else(|| Error::Parse("--kind is required".into()))?;
    let instance = instance_from_flags(kind, a)?;
    let report = instance.certify(kind)?;
    let shown = present(serde_json::to_value(&report)?, base, &REPORT_FIELDS);
    if report.violated(a.tolerance) {
        emit(out, &json!({ "report": shown, "instance": instance }))?;
        writeln!(err, "bound violated: slack {:.3e} below -{:.0e}", report.slack, a.tolerance)?;
        return Ok(Outcome::Violation);
    }
    emit(out, &shown)?;
    Ok(Outcome::Ok)
}

/// Effective campaign config: defaults, then the file, then `OENTROPY_SEED`
/// if neither the file nor a flag sets a seed, then flags.
pub fn resolve_config(a: &FuzzArgs, env_seed: Option<&str>) -> Result<CampaignConfig> {
    let (mut c, file_has_seed) = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            let table: toml::Table = text.parse().map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
            (CampaignConfig::from_toml(&text)?, table.contains_key("seed"))
        }
        None => (CampaignConfig::default(), false),
    };
    if !file_has_seed {
        if let Some(s) = env_seed {
            c.seed = s.trim().parse().map_err(|_| Error::Parse(format!("{SEED_ENV}={s} is not an unsigned integer")))?;
        }
    }
    if let Some(s) = a.seed {
        c.seed = s;
    }
    if let Some(t) = a.trials {
        c.trials = t;
    }
    if let Some(d) = &a.dims {
        c.dims = d.clone();
    }
    if let Some(k) = &a.outcomes {
        c.outcome_counts = k.clone();
    }
    if let Some(k) = &a.kinds {
        c.bound_kinds = k.clone();
    }
    if let Some(t) = a.tolerance {
        c.tolerance = t;
    }
    if let Some(o) = &a.out {
        c.output_path = o.clone();
    }
    c.validate()?;
    Ok(c)
}

fn fuzz(a: &FuzzArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    let env = std::env::var(SEED_ENV).ok();
    let config = resolve_config(a, env.as_deref())?;
    let outcome = run_campaign(&config, a.jobs)?;
    write_csv(&outcome.rows, std::fs::File::create(&config.output_path)?)?;
    let mut summary = summary_json(&config, &outcome);
    summary["csv"] = json!(config.output_path.display().to_string());
    if !outcome.witnesses.is_empty() {
        let wp = witness_path(&config.output_path);
        std::fs::write(&wp, serde_json::to_string_pretty(&outcome.witnesses)?)?;
        summary["witnesses"] = json!(wp.display().to_string());
    }
    emit(out, &present(summary, LogBase::Nats, &[]))?;
    if outcome.violations > 0 {
        writeln!(err, "{} certificate violation(s); witnesses written", outcome.violations)?;
        return Ok(Outcome::Violation);
    }
    Ok(Outcome::Ok)
}

/// Writes rows as CSV with columns in field order.
fn write_table<T: Serialize>(path: &Path, rows: &[T], base: LogBase, entropic: &[&str]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let csv_err = |e: csv::Error| Error::Parse(format!("csv: {e}"));
    for (i, row) in rows.iter().enumerate() {
        let Value::Object(m) = present(serde_json::to_value(row)?, base, entropic) else {
            return Err(Error::Parse("table rows must be records".into()));
        };
        if i == 0 {
            w.write_record(m.keys()).map_err(csv_err)?;
        }
        w.write_record(m.values().map(cell)).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn experiment(a: &ExperimentArgs, base: LogBase, out: &mut dyn Write) -> Result<Outcome> {
    if !EXPERIMENTS.contains(&a.name.as_str()) {
        return Err(Error::Parse(format!("unknown experiment `{}`; valid names: {}", a.name, EXPERIMENTS.join(", "))));
    }
    std::fs::create_dir_all(&a.out_dir)?;
    let csv_path = a.out_dir.join(format!("{}.csv", a.name));
    let summary = match a.name.as_str() {
        "example1" => {
            let steps = a.lambda_steps.max(2);
            let lambdas: Vec<f64> = (0..steps).map(|i| 0.5 * i as f64 / (steps - 1) as f64).collect();
            let rows = example1_sweep(&a.dims, &lambdas)?;
            write_table(&csv_path, &rows, base, &["s_lambda", "s_numeric", "afw_rhs", "naive_rhs", "max_abs_error"])?;
            let worst = rows.iter().map(|r| r.max_abs_error).fold(0.0, f64::max);
            json!({ "rows": rows.len(), "max_abs_error": worst })
        }
        "nogo" => {
            let scan = no_go_scan(a.lambda, &decade_dims(a.max_d), a.threshold)?;
            write_table(&csv_path, &scan.rows, base, &[])?;
            json!({
                "lambda": scan.lambda,
                "threshold": scan.threshold,
                "monotone": scan.monotone,
                "first_above": scan.first_above,
                "max_ratio": scan.max_ratio,
            })
        }
        "pathology" => {
            let rows = refinement_pathology(a.d, a.iterations, a.seed)?;
            write_table(&csv_path, &rows, base, &["delta_s", "naive_rhs", "afw_rhs"])?;
            let spread = rows.iter().map(|r| (r.delta_s - rows[0].delta_s).abs()).fold(0.0, f64::max);
            json!({ "rows": rows.len(), "delta_s_spread": spread })
        }
        "channel-probe" => {
            let mut rng = rng_from_seed(a.seed);
            let rho = random_density(a.d, a.d, &mut rng)?;
            let sigma = random_density(a.d, a.d, &mut rng)?;
            let m = random_povm(a.d, a.d, &mut rng)?;
            let n = a.steps.max(1);
            let grid: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
            let probe = channel_continuity_probe(&rho, &sigma, &m, &grid)?;
            write_table(&csv_path, &probe.rows, base, &["f", "f_s", "diff", "bound"])?;
            json!({ "monotone": probe.monotone, "all_hold": probe.all_hold, "convexity_all_hold": probe.convexity_all_hold })
        }
        "gamma-probe" => {
            let mut rng = rng_from_seed(a.seed);
            let rho = random_density(a.d, a.d, &mut rng)?;
            let sigma = random_density(a.d, a.d, &mut rng)?;
            let mut pairs = Vec::new();
            for k in 2..=3 {
                let m = random_povm(a.d, k, &mut rng)?;
                pairs.push((m.clone(), refine_split(&m)));
                pairs.push((m.clone(), postprocess(&StochasticMap::merge(k), &m)?));
                pairs.push((m, random_povm(a.d, k, &mut rng)?));
            }
            let rows = gamma_continuity_probe(&rho, &sigma, &pairs, a.tol)?;
            write_table(&csv_path, &rows, base, &["d_m", "d_n", "diff", "d_lambda_m", "d_lambda_n"])?;
            json!({ "rows": rows.len(), "monotone_ok": rows.iter().all(|r| r.monotone_ok) })
        }
        "minimax" => {
            let mut rows = Vec::new();
            for (name, rho, chi, ms) in minimax_instances()? {
                let check = minimax_spot_check(&rho, &chi, &ms, a.resolution)?;
                let mut v = serde_json::to_value(&check)?;
                if let Value::Object(m) = &mut v {
                    let mut named = Map::new();
                    named.insert("instance".into(), json!(name));
                    named.extend(std::mem::take(m));
                    *m = named;
                }
                rows.push(v);
            }
            write_table(&csv_path, &rows, base, &["inf_sup_grid", "sup_inf", "gap"])?;
            json!({ "rows": rows.len(), "passed": rows.iter().all(|r| r["passed"] == json!(true)) })
        }
        _ => unreachable!("name checked above"),
    };
    let mut summary = summary;
    summary["experiment"] = json!(a.name);
    summary["csv"] = json!(csv_path.display().to_string());
    let summary = present(summary, LogBase::Nats, &[]);
    std::fs::write(a.out_dir.join(format!("{}.json", a.name)), serde_json::to_string_pretty(&summary)?)?;
    emit(out, &summary)?;
    Ok(Outcome::Ok)
}

fn distance(a: &DistanceArgs, out: &mut dyn Write) -> Result<Outcome> {
    let m = read_povm(&a.m)?;
    let n = read_povm(&a.n)?;
    let opts = SolverOptions { tol: a.tol, max_iter: a.max_iter, record_history: a.trace.is_some() };
    let mut result = Map::new();
    let mut history = Vec::new();
    if matches!(a.metric, Metric::Diamond | Metric::Both) {
        let s = diamond_distance_with(&m, &n, &opts)?;
        result.insert(
            "diamond".into(),
            json!({ "value": s.value, "lower": s.lower, "upper": s.upper, "gap": s.gap, "iterations": s.iterations }),
        );
        history.extend(s.history.into_iter().map(|h| ("diamond", h)));
    }
    if matches!(a.metric, Metric::Gamma | Metric::Both) {
        let g = sim_distance_with(&m, &n, &opts)?;
        result.insert(
            "gamma".into(),
            json!({
                "value": g.value,
                "gap": g.gap,
                "forward": { "value": g.forward.value, "gap": g.forward.gap, "iterations": g.forward.iterations },
                "backward": { "value": g.backward.value, "gap": g.backward.gap, "iterations": g.backward.iterations },
            }),
        );
        history.extend(g.forward.history.into_iter().map(|h| ("gamma_forward", h)));
        history.extend(g.backward.history.into_iter().map(|h| ("gamma_backward", h)));
    }
    if let Some(path) = &a.trace {
        let rows: Vec<Value> = history
            .into_iter()
            .map(|(problem, h)| json!({ "problem": problem, "iteration": h.iteration, "lower": h.lower, "upper": h.upper, "penalty": h.penalty }))
            .collect();
        write_table(path, &rows, LogBase::Nats, &[])?;
    }
    emit(out, &present(Value::Object(result), LogBase::Nats, &[]))?;
    Ok(Outcome::Ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(std::iter::once("oentropy").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn unknown_experiment_lists_names() {
        let (code, _, err) = run_capture(&["experiment", "bogus"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("example1") && err.contains("minimax"));
    }

    #[test]
    fn env_seed_is_a_fallback() {
        let a = FuzzArgs {
            config: None,
            seed: None,
            trials: Some(3),
            dims: None,
            outcomes: None,
            kinds: None,
            tolerance: None,
            out: None,
            jobs: 1,
        };
        assert_eq!(resolve_config(&a, Some("17")).unwrap().seed, 17);
        let a = FuzzArgs { seed: Some(4), ..a };
        assert_eq!(resolve_config(&a, Some("17")).unwrap().seed, 4);
        assert!(resolve_config(&a, None).is_ok());
        let bad = FuzzArgs { seed: None, ..a };
        assert!(resolve_config(&bad, Some("x")).is_err());
    }

    #[test]
    fn present_rounds_and_converts() {
        let v = present(json!({ "total": std::f64::consts::LN_2, "p": 0.12345678901234 }), LogBase::Bits, &["total"]);
        assert_eq!(v["total"], json!(1.0));
        assert_eq!(v["p"], json!(0.123456789012));
    }
}
