//! The five subcommands. Each returns its exit code or an error carrying one.

use std::path::PathBuf;

use gawcga::theory::{check_conditions, xi_solve};
use gawcga::{
    canonical_dictionary, g_dictionary, run_gawcga, witness_finite_lambda1, witness_infinite_lambda1, witness_smooth_space,
    witness_unbounded_eta, Dictionary, Element, EngineOptions, Expected, ExtF64, Lambda1Construction, NormedSpace, PredicateReport,
    Scalar, Schedules, Space, StopReason, Trace, Witness,
};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{DictionarySpec, ElementSpec, RunConfig, SpaceSpec, SweepConfig, WitnessConfig};
use crate::error::{CliError, EXIT_OK};
use crate::output::{fmt_f64, into_string, to_json, trace_csv, write_file};

pub const TRACE_FILE: &str = "trace.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CONDITIONS_FILE: &str = "conditions.json";
pub const MODULUS_CSV: &str = "modulus.csv";
pub const MODULUS_JSON: &str = "modulus.json";
pub const SWEEP_FILE: &str = "sweep.csv";

/// `nnz` distinct coordinates of `first..first + dim` with values uniform in `[-1, 1) \ {0}`.
pub fn random_entries(nnz: usize, dim: usize, first: usize, seed: u64) -> Vec<(usize, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = sample(&mut rng, dim, nnz).into_vec();
    idx.sort_unstable();
    idx.into_iter()
        .map(|i| {
            let mut v = 0.0;
            while v == 0.0 {
                v = rng.random_range(-1.0..1.0);
            }
            (first + i, v)
        })
        .collect()
}

fn element_entries(cfg: &RunConfig) -> Result<Vec<(usize, f64)>, CliError> {
    match &cfg.element {
        Some(ElementSpec::Sparse { entries }) => Ok(entries.clone()),
        Some(ElementSpec::Random { nnz, dim, first }) => Ok(random_entries(*nnz, *dim, *first, cfg.seed)),
        None => Err(CliError::Config("missing [element] table".into())),
    }
}

/// Counts and norms of a finished trace, independent of the scalar type.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStats {
    pub steps: usize,
    pub stop: StopReason,
    pub initial_residual: f64,
    pub final_residual: f64,
    /// Smallest audit margin, absent for an empty trace.
    pub min_margin: Option<f64>,
    #[serde(skip)]
    pub norms: Vec<f64>,
}

impl TraceStats {
    fn of<T>(trace: &Trace<T>) -> Self {
        TraceStats {
            steps: trace.len(),
            stop: trace.stop,
            initial_residual: trace.initial_norm,
            final_residual: trace.final_norm,
            min_margin: if trace.is_empty() { None } else { Some(trace.min_margin()) },
            norms: trace.residual_norms(),
        }
    }

    /// First `n` with `||f_n|| <= tol`.
    pub fn steps_to(&self, tol: f64) -> Option<usize> {
        self.norms.iter().position(|&r| r <= tol)
    }
}

/// A finished run in printable form.
pub struct RunOutput {
    pub csv: String,
    pub stats: TraceStats,
    pub space: String,
    pub dictionary_size: usize,
}

fn build_dictionary<T: Scalar>(space: &Space<T>, spec: Option<&DictionarySpec>, f: &Element<T>) -> Result<Dictionary<T>, CliError> {
    let last = match space {
        Space::X(x) => x.horizon(),
        Space::Lq(_) => f.horizon().unwrap_or(1),
    };
    let first = if f.min_index() == Some(0) { 0 } else { 1 };
    let dict = match spec {
        None => canonical_dictionary(space, first, last)?,
        Some(DictionarySpec::Canonical { i0, n }) => canonical_dictionary(space, *i0, n.unwrap_or(last))?,
        Some(DictionarySpec::CanonicalPairs { n }) => {
            let mut atoms: Vec<Element<T>> = (1..=*n).map(Element::basis).collect();
            for j in 1..*n {
                atoms.push(Element::from_pairs([(j, T::one()), (j + 1, T::one())])?);
            }
            Dictionary::explicit(space, atoms)?
        }
        Some(DictionarySpec::GSystem { k_max }) => {
            let x = space.as_smooth().ok_or_else(|| CliError::Config("dictionary g-system needs space kind smooth-x".into()))?;
            g_dictionary(x, *k_max)?
        }
        Some(DictionarySpec::Explicit { atoms }) => {
            let atoms = atoms
                .iter()
                .map(|a| Element::from_pairs(a.iter().map(|&(i, v)| (i, T::of(v)))))
                .collect::<gawcga::Result<Vec<_>>>()?;
            Dictionary::explicit(space, atoms)?
        }
    };
    Ok(dict)
}

fn run_in<T: Scalar>(space: Space<T>, cfg: &RunConfig, sched: &Schedules) -> Result<RunOutput, CliError> {
    let f = Element::from_pairs(element_entries(cfg)?.into_iter().map(|(i, v)| (i, T::of(v))))?;
    let dict = build_dictionary(&space, cfg.dictionary.as_ref(), &f)?;
    let opts = EngineOptions { max_steps: cfg.max_steps, stop_tol: cfg.stop_tol, solver: cfg.solver.options(), ..Default::default() };
    let mut policy = cfg.policy.policy(cfg.seed);
    let trace = run_gawcga(&space, &dict, &f, sched, &mut policy, &opts)?;
    Ok(RunOutput { csv: trace_csv(&trace)?, stats: TraceStats::of(&trace), space: space.describe(), dictionary_size: dict.len() })
}

/// One engine run of `cfg` with the schedules replaced by `sched`.
pub fn run_once(cfg: &RunConfig, sched: &Schedules) -> Result<RunOutput, CliError> {
    match &cfg.space {
        Some(SpaceSpec::Lq { q }) => run_in(Space::<f64>::lq(*q)?, cfg, sched),
        // X needs the extended exponent range: residual coordinates leave the f64 range within a few dozen steps
        Some(SpaceSpec::SmoothX { p, horizon }) => run_in(Space::<ExtF64>::smooth(p.clone(), *horizon)?, cfg, sched),
        None => Err(CliError::Config("missing [space] table".into())),
    }
}

/// Witness section of a summary.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessSummary {
    pub parameters: WitnessConfig,
    pub note: String,
    pub predicate: PredicateReport,
    pub contrast_steps: usize,
    pub contrast_final_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub construction: Option<Lambda1Construction>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub command: &'static str,
    pub space: String,
    pub dictionary_size: usize,
    pub seed: u64,
    pub max_steps: usize,
    pub stop_tol: f64,
    #[serde(flatten)]
    pub stats: TraceStats,
    pub truncation_notice: String,
    /// Witness runs: the residual stayed above `floor` at every checked step.
    pub diverged_at_horizon: Option<bool>,
    pub floor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessSummary>,
}

fn notice(stats: &TraceStats, max_steps: usize) -> String {
    match stats.stop {
        StopReason::MaxSteps => format!("truncated: stopped at the step limit {max_steps}; later steps were not computed"),
        StopReason::Tolerance => format!("stopped after {} steps with the residual at or below stop_tol", stats.steps),
        StopReason::ZeroResidual => format!("stopped after {} steps with a zero residual", stats.steps),
    }
}

const WITNESS_NOTICE: &str = "finite horizon: divergence means the residual stayed at or above the floor for every computed step";

struct WitnessOutput {
    csv: String,
    summary: Summary,
}

fn finish_witness<T: Scalar>(
    mut w: Witness<T>,
    params: WitnessConfig,
    construction: Option<Lambda1Construction>,
    cfg: &RunConfig,
    command: &'static str,
) -> Result<WitnessOutput, CliError> {
    let solver = cfg.solver.options();
    let run = w.run(solver)?;
    let contrast = w.contrast(solver)?;
    let floor = match &w.expected {
        Expected::FloorAt { floor, .. } | Expected::FloorAll { floor, .. } => *floor,
        Expected::SmoothSpace { rho } => *rho,
    };
    let stats = TraceStats::of(&run.trace);
    let summary = Summary {
        command,
        space: w.space.describe(),
        dictionary_size: w.dict.len(),
        seed: cfg.seed,
        max_steps: w.steps,
        stop_tol: 0.0,
        stats,
        truncation_notice: WITNESS_NOTICE.into(),
        diverged_at_horizon: Some(run.report.holds),
        floor: Some(floor),
        witness: Some(WitnessSummary {
            parameters: params,
            note: w.note.clone(),
            predicate: run.report,
            contrast_steps: contrast.len(),
            contrast_final_residual: contrast.final_norm,
            construction,
        }),
    };
    Ok(WitnessOutput { csv: trace_csv(&run.trace)?, summary })
}

fn build_witness(params: &WitnessConfig, cfg: &RunConfig, command: &'static str) -> Result<WitnessOutput, CliError> {
    let p = params.clone();
    match params {
        WitnessConfig::UnboundedEta { q, alpha, gap, n_k, horizon, branch } => {
            let steps = WitnessConfig::spike_steps(n_k, *gap, *horizon)?;
            finish_witness(witness_unbounded_eta(*q, *alpha, &steps, *horizon, *branch)?, p, None, cfg, command)
        }
        WitnessConfig::FiniteLambda1 { q, t, horizon } => finish_witness(witness_finite_lambda1(*q, t.clone(), *horizon)?, p, None, cfg, command),
        WitnessConfig::InfiniteLambda1 { q, schedules, alpha, horizon } => {
            let (w, c) = witness_infinite_lambda1(*q, schedules.clone(), *alpha, *horizon)?;
            finish_witness(w, p, Some(c), cfg, command)
        }
        WitnessConfig::SmoothSpace { p: spec, k_max } => finish_witness(witness_smooth_space(spec.clone(), *k_max)?, p, None, cfg, command),
    }
}

fn write_run(dir: &PathBuf, csv: &str, summary: &Summary) -> Result<String, CliError> {
    let json = to_json(summary)?;
    write_file(dir, TRACE_FILE, csv)?;
    write_file(dir, SUMMARY_FILE, &json)?;
    Ok(json)
}

/// Runs the configured element, or the configured witness when no element is given.
pub fn cmd_run(cfg: &RunConfig) -> Result<u8, CliError> {
    let dir = cfg.out_dir();
    if cfg.element.is_none() {
        if let Some(params) = &cfg.witness {
            let out = build_witness(params, cfg, "run")?;
            print!("{}", write_run(&dir, &out.csv, &out.summary)?);
            return Ok(EXIT_OK);
        }
    }
    let out = run_once(cfg, &cfg.schedules)?;
    let summary = Summary {
        command: "run",
        space: out.space,
        dictionary_size: out.dictionary_size,
        seed: cfg.seed,
        max_steps: cfg.max_steps,
        stop_tol: cfg.stop_tol,
        truncation_notice: notice(&out.stats, cfg.max_steps),
        stats: out.stats,
        diverged_at_horizon: None,
        floor: None,
        witness: None,
    };
    print!("{}", write_run(&dir, &out.csv, &summary)?);
    Ok(EXIT_OK)
}

/// Witness parameters for `name`: the config's `[witness]` table when it names the
/// same witness, the defaults when there is none.
pub fn resolve_witness(name: &str, cfg: &RunConfig) -> Result<WitnessConfig, CliError> {
    let defaults = WitnessConfig::named(name)?;
    match &cfg.witness {
        None => Ok(defaults),
        Some(w) if w.name() == name => Ok(w.clone()),
        Some(w) => Err(CliError::Config(format!("config describes witness `{}` but `{name}` was requested", w.name()))),
    }
}

/// Builds, runs and checks a witness. Exit 0 iff the expected predicate holds.
pub fn cmd_witness(name: &str, cfg: &RunConfig) -> Result<u8, CliError> {
    let params = resolve_witness(name, cfg)?;
    let out = build_witness(&params, cfg, "witness")?;
    print!("{}", write_run(&cfg.out_dir(), &out.csv, &out.summary)?);
    let report = &out.summary.witness.as_ref().expect("witness summary").predicate;
    if !report.holds {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect();
        return Err(CliError::Predicate(failed.join(", ")));
    }
    Ok(EXIT_OK)
}

/// Condition report of the configured schedules.
pub fn cmd_check(cfg: &RunConfig) -> Result<u8, CliError> {
    let c = cfg.check.clone().unwrap_or_default();
    let report = check_conditions(&cfg.schedules, c.p, c.horizon, &c.alphas)?;
    let json = to_json(&report)?;
    write_file(&cfg.out_dir(), CONDITIONS_FILE, &json)?;
    print!("{json}");
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct XiRow {
    theta: f64,
    t: f64,
    xi: f64,
}

#[derive(Serialize)]
struct ModulusSummary<'a> {
    model: &'a gawcga::theory::SmoothnessModel,
    power_type: Option<f64>,
    xi: Vec<XiRow>,
}

/// Tabulates `rho(u)` on the configured grid and solves for the requested roots `xi`.
pub fn cmd_modulus(cfg: &RunConfig) -> Result<u8, CliError> {
    let m = cfg.modulus.clone().unwrap_or_default();
    m.model.validate()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["u", "rho"])?;
    for u in m.grid.values() {
        w.write_record([fmt_f64(u), fmt_f64(m.model.rho(u)?)])?;
    }
    let mut xi = Vec::new();
    for &(theta, t) in &m.xi {
        xi.push(XiRow { theta, t, xi: xi_solve(&m.model, theta, t)? });
    }
    let json = to_json(&ModulusSummary { model: &m.model, power_type: m.model.power_type(), xi })?;
    let dir = cfg.out_dir();
    write_file(&dir, MODULUS_CSV, &into_string(w)?)?;
    write_file(&dir, MODULUS_JSON, &json)?;
    print!("{json}");
    Ok(EXIT_OK)
}

pub const SWEEP_HEADER: [&str; 13] = [
    "grid_index",
    "t",
    "t_prime",
    "delta",
    "delta_prime",
    "eta",
    "eta_prime",
    "status",
    "steps",
    "steps_to_tol",
    "final_residual",
    "min_margin",
    "error",
];

/// Runs every grid point concurrently; rows come out in grid order.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<u8, CliError> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| CliError::Config("missing [sweep] table".into()))?;
    let grid = sweep.grid()?;
    let results: Vec<Result<RunOutput, CliError>> =
        grid.par_iter().map(|point| run_once(cfg, &SweepConfig::apply(point, &cfg.schedules))).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER)?;
    let mut first_failure = None;
    let mut any_ok = false;
    for (i, (point, res)) in grid.iter().zip(&results).enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(point.iter().map(|v| v.map(fmt_f64).unwrap_or_default()));
        match res {
            Ok(out) => {
                any_ok = true;
                let s = &out.stats;
                row.extend([
                    "ok".to_string(),
                    s.steps.to_string(),
                    s.steps_to(cfg.stop_tol).map(|n| n.to_string()).unwrap_or_default(),
                    fmt_f64(s.final_residual),
                    s.min_margin.map(fmt_f64).unwrap_or_default(),
                    String::new(),
                ]);
            }
            Err(e) => {
                first_failure.get_or_insert(e.exit_code());
                row.extend([format!("exit-{}", e.exit_code()), String::new(), String::new(), String::new(), String::new(), e.to_string()]);
            }
        }
        w.write_record(&row)?;
    }
    let table = into_string(w)?;
    write_file(&cfg.out_dir(), SWEEP_FILE, &table)?;
    print!("{table}");
    Ok(if any_ok { EXIT_OK } else { first_failure.unwrap_or(EXIT_OK) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_entries_are_seeded_and_distinct() {
        let a = random_entries(10, 30, 1, 7);
        assert_eq!(a, random_entries(10, 30, 1, 7));
        assert_ne!(a, random_entries(10, 30, 1, 8));
        assert_eq!(a.len(), 10);
        assert!(a.windows(2).all(|w| w[0].0 < w[1].0));
        assert!(a.iter().all(|&(i, v)| (1..=30).contains(&i) && v != 0.0 && (-1.0..1.0).contains(&v)));
    }

    #[test]
    fn l2_two_step_run() {
        let cfg = RunConfig::parse(
            "[space]\nkind = \"lq\"\nq = 2.0\n[element]\nkind = \"sparse\"\nentries = [[1, 3.0], [2, 4.0]]\n",
        )
        .unwrap();
        let out = run_once(&cfg, &cfg.schedules).unwrap();
        assert_eq!(out.stats.steps, 2);
        assert_eq!(out.stats.final_residual, 0.0);
        assert_eq!(out.stats.initial_residual, 5.0);
        assert_eq!(out.csv.lines().count(), 3);
        let row: Vec<&str> = out.csv.lines().nth(1).unwrap().split(',').collect();
        // greedy picks e_2 first: |F(e_2)| = 0.8 > 0.6
        assert_eq!(&row[..3], &["1", "2", "1"]);
        assert_eq!(row[3].parse::<f64>().unwrap(), 3.0);
    }

    #[test]
    fn pairs_dictionary_size() {
        let cfg = RunConfig::parse(
            "[space]\nkind = \"lq\"\nq = 1.5\n[dictionary]\nkind = \"canonical-pairs\"\nn = 24\n[element]\nkind = \"random\"\nnnz = 5\ndim = 24\n",
        )
        .unwrap();
        let out = run_once(&cfg, &cfg.schedules).unwrap();
        assert_eq!(out.dictionary_size, 24 + 23);
    }
}
