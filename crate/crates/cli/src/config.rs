//! TOML run configuration.

use std::path::{Path, PathBuf};

use gawcga::theory::{Grid, SmoothnessModel};
use gawcga::{ApproximantRule, AtomRule, FunctionalRule, PSpec, PathChoice, Policy, Schedules, SeqSpec, SlackBranch, SolverOptions};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_OUT: &str = "gawcga-out";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpaceSpec {
    Lq { q: f64 },
    /// The renormed `l_1` space `X` truncated at `horizon`.
    SmoothX {
        #[serde(default)]
        p: PSpec,
        horizon: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DictionarySpec {
    /// `{+-e_j : i0 <= j <= n}`; `n` defaults to the last coordinate in use.
    Canonical {
        #[serde(default = "one")]
        i0: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
    },
    /// Canonical basis of `1..=n` together with the normalized `e_j + e_{j+1}`, `j < n`.
    CanonicalPairs { n: usize },
    /// `{+-g_k / ||g_k||}` in `X`, `0 <= k <= k_max`.
    GSystem { k_max: usize },
    /// Atoms as sparse `[index, value]` lists, identified by position.
    Explicit { atoms: Vec<Vec<(usize, f64)>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ElementSpec {
    Sparse { entries: Vec<(usize, f64)> },
    /// `nnz` coordinates of `first..first + dim`, values uniform in `[-1, 1)`, drawn from the run seed.
    Random {
        nnz: usize,
        dim: usize,
        #[serde(default = "one")]
        first: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyConfig {
    pub functional: FunctionalRule,
    pub atom: AtomRule,
    pub approximant: ApproximantRule,
}

impl PolicyConfig {
    pub fn policy(&self, seed: u64) -> Policy {
        Policy { functional: self.functional, atom: self.atom, approximant: self.approximant, seed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub cert_tol: f64,
    pub max_iter: usize,
    pub zero_tol: f64,
    pub force_descent: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = SolverOptions::default();
        SolverConfig { cert_tol: d.cert_tol, max_iter: d.max_iter, zero_tol: d.zero_tol, force_descent: false }
    }
}

impl SolverConfig {
    pub fn options(&self) -> SolverOptions {
        let path = if self.force_descent { PathChoice::ForceDescent } else { PathChoice::Auto };
        SolverOptions { cert_tol: self.cert_tol, max_iter: self.max_iter, zero_tol: self.zero_tol, path }
    }
}

fn one() -> usize {
    1
}

fn two() -> f64 {
    2.0
}

fn half() -> f64 {
    0.5
}

fn tenth() -> f64 {
    0.1
}

fn hundred() -> usize {
    100
}

fn two_hundred() -> usize {
    200
}

fn four_hundred() -> usize {
    400
}

fn twenty() -> usize {
    20
}

fn inverse_square() -> SeqSpec {
    SeqSpec::power(1.0, 2.0)
}

fn quarter_delta() -> Schedules {
    Schedules { delta: SeqSpec::constant(0.25), ..Schedules::default() }
}

/// Parameters of a named witness; every field has the documented default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WitnessConfig {
    UnboundedEta {
        #[serde(default = "two")]
        q: f64,
        #[serde(default = "half")]
        alpha: f64,
        /// `n_k = k * gap` up to the horizon; ignored when `n_k` is given.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gap: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_k: Option<Vec<usize>>,
        #[serde(default = "hundred")]
        horizon: usize,
        #[serde(default)]
        branch: SlackBranch,
    },
    FiniteLambda1 {
        #[serde(default = "two")]
        q: f64,
        #[serde(default = "inverse_square")]
        t: SeqSpec,
        /// Long enough for the tail of `sum t_n^p` to drop below the certificate threshold.
        #[serde(default = "four_hundred")]
        horizon: usize,
    },
    InfiniteLambda1 {
        #[serde(default = "two")]
        q: f64,
        #[serde(default = "quarter_delta")]
        schedules: Schedules,
        #[serde(default = "tenth")]
        alpha: f64,
        #[serde(default = "two_hundred")]
        horizon: usize,
    },
    SmoothSpace {
        #[serde(default)]
        p: PSpec,
        #[serde(default = "twenty")]
        k_max: usize,
    },
}

pub const WITNESS_NAMES: [&str; 4] = ["unbounded-eta", "finite-lambda1", "infinite-lambda1", "smooth-space"];

impl WitnessConfig {
    /// Defaults for `name`.
    pub fn named(name: &str) -> Result<Self, CliError> {
        if !WITNESS_NAMES.contains(&name) {
            return Err(CliError::Config(format!("unknown witness `{name}` (expected one of {})", WITNESS_NAMES.join(", "))));
        }
        toml::from_str(&format!("name = \"{name}\"")).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn name(&self) -> &'static str {
        match self {
            WitnessConfig::UnboundedEta { .. } => WITNESS_NAMES[0],
            WitnessConfig::FiniteLambda1 { .. } => WITNESS_NAMES[1],
            WitnessConfig::InfiniteLambda1 { .. } => WITNESS_NAMES[2],
            WitnessConfig::SmoothSpace { .. } => WITNESS_NAMES[3],
        }
    }

    /// The spike steps of the unbounded-eta witness.
    pub fn spike_steps(n_k: &Option<Vec<usize>>, gap: Option<usize>, horizon: usize) -> Result<Vec<usize>, CliError> {
        if let Some(list) = n_k {
            return Ok(list.clone());
        }
        let gap = gap.unwrap_or(10);
        if gap == 0 {
            return Err(CliError::Config("witness.gap must be positive".into()));
        }
        Ok((1..).map(|k| k * gap).take_while(|&n| n <= horizon).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    #[serde(default = "two")]
    pub p: f64,
    #[serde(default = "default_check_horizon")]
    pub horizon: usize,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
}

fn default_check_horizon() -> usize {
    1000
}

fn default_alphas() -> Vec<f64> {
    vec![0.1, 0.5, 1.0]
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { p: 2.0, horizon: default_check_horizon(), alphas: default_alphas() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulusConfig {
    #[serde(default = "default_model")]
    pub model: SmoothnessModel,
    #[serde(default = "default_modulus_grid")]
    pub grid: Grid,
    /// `(theta, t)` pairs for which the root `xi` of `rho(xi) = theta t xi` is reported.
    #[serde(default)]
    pub xi: Vec<(f64, f64)>,
}

fn default_model() -> SmoothnessModel {
    SmoothnessModel::L2Exact
}

fn default_modulus_grid() -> Grid {
    Grid { lo: 1e-3, hi: 10.0, points: 50 }
}

impl Default for ModulusConfig {
    fn default() -> Self {
        ModulusConfig { model: default_model(), grid: default_modulus_grid(), xi: Vec::new() }
    }
}

/// Constant values swept per sequence; unlisted sequences keep the run schedule.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_prime: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_prime: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_prime: Option<Vec<f64>>,
}

pub const SWEEP_AXES: [&str; 6] = ["t", "t_prime", "delta", "delta_prime", "eta", "eta_prime"];

impl SweepConfig {
    pub fn axes(&self) -> [&Option<Vec<f64>>; 6] {
        [&self.t, &self.t_prime, &self.delta, &self.delta_prime, &self.eta, &self.eta_prime]
    }

    /// Cartesian product in axis order, last axis fastest. `None` marks an unswept axis.
    pub fn grid(&self) -> Result<Vec<[Option<f64>; 6]>, CliError> {
        let axes = self.axes();
        if axes.iter().all(|a| a.is_none()) {
            return Err(CliError::Config("sweep grid is empty: no axis listed".into()));
        }
        if let Some(i) = axes.iter().position(|a| matches!(a, Some(v) if v.is_empty())) {
            return Err(CliError::Config(format!("sweep grid is empty: axis `{}` has no values", SWEEP_AXES[i])));
        }
        let mut points = vec![[None; 6]];
        for (i, axis) in axes.iter().enumerate() {
            let Some(values) = axis else { continue };
            points = points
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |&v| {
                        let mut q = p;
                        q[i] = Some(v);
                        q
                    })
                })
                .collect();
        }
        Ok(points)
    }

    pub fn apply(point: &[Option<f64>; 6], base: &Schedules) -> Schedules {
        let mut s = base.clone();
        let slots = [&mut s.t, &mut s.t_prime, &mut s.delta, &mut s.delta_prime, &mut s.eta, &mut s.eta_prime];
        for (slot, v) in slots.into_iter().zip(point) {
            if let Some(v) = v {
                *slot = SeqSpec::constant(*v);
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "hundred")]
    pub max_steps: usize,
    #[serde(default)]
    pub stop_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dictionary: Option<DictionarySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<ElementSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessConfig>,
    #[serde(default)]
    pub schedules: Schedules,
    #[serde(default)]
    pub policy: PolicyConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<ModulusConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            max_steps: hundred(),
            stop_tol: 0.0,
            out: None,
            space: None,
            dictionary: None,
            element: None,
            witness: None,
            schedules: Schedules::default(),
            policy: PolicyConfig::default(),
            solver: SolverConfig::default(),
            check: None,
            modulus: None,
            sweep: None,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub max_steps: Option<usize>,
    pub stop_tol: Option<f64>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(out) = &o.out {
            self.out = Some(out.clone());
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(m) = o.max_steps {
            self.max_steps = m;
        }
        if let Some(t) = o.stop_tol {
            self.stop_tol = t;
        }
        self.validate()
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }

    /// Range checks that do not need the numerical core.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.max_steps == 0 {
            return bad("max_steps must be at least 1".into());
        }
        if !(self.stop_tol >= 0.0) || !self.stop_tol.is_finite() {
            return bad(format!("stop_tol must be finite and non-negative, got {}", self.stop_tol));
        }
        if let Some(SpaceSpec::Lq { q }) = &self.space {
            if !(*q > 1.0) || !q.is_finite() {
                return bad(format!("space.q = {q} must be finite and greater than 1"));
            }
        }
        if let Some(SpaceSpec::SmoothX { horizon, .. }) = &self.space {
            if *horizon == 0 {
                return bad("space.horizon must be positive".into());
            }
        }
        if let Some(ElementSpec::Random { nnz, dim, .. }) = &self.element {
            if *nnz == 0 || nnz > dim {
                return bad(format!("element.nnz = {nnz} must lie in 1..=dim ({dim})"));
            }
        }
        if let Some(ElementSpec::Sparse { entries }) = &self.element {
            if entries.is_empty() {
                return bad("element.entries is empty".into());
            }
            if let Some((i, v)) = entries.iter().find(|(_, v)| !v.is_finite()) {
                return bad(format!("element entry {i} is not finite ({v})"));
            }
        }
        let s = &self.solver;
        if !(s.cert_tol > 0.0) || !(s.zero_tol >= 0.0) || s.max_iter == 0 {
            return bad("solver needs cert_tol > 0, zero_tol >= 0 and max_iter >= 1".into());
        }
        if let Some(c) = &self.check {
            if let Some(a) = c.alphas.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
                return bad(format!("check.alphas: alpha = {a} must be positive"));
            }
            if c.alphas.is_empty() {
                return bad("check.alphas is empty".into());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_defaults_by_name() {
        for name in WITNESS_NAMES {
            assert_eq!(WitnessConfig::named(name).unwrap().name(), name);
        }
        assert!(matches!(WitnessConfig::named("nope"), Err(CliError::Config(_))));
        match WitnessConfig::named("infinite-lambda1").unwrap() {
            WitnessConfig::InfiniteLambda1 { alpha, horizon, schedules, .. } => {
                assert_eq!((alpha, horizon), (0.1, 200));
                assert_eq!(schedules.delta, SeqSpec::constant(0.25));
                assert_eq!(schedules.t, SeqSpec::constant(1.0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spike_steps_from_gap() {
        assert_eq!(WitnessConfig::spike_steps(&None, Some(30), 100).unwrap(), vec![30, 60, 90]);
        assert_eq!(WitnessConfig::spike_steps(&Some(vec![3, 7]), Some(30), 100).unwrap(), vec![3, 7]);
        assert!(WitnessConfig::spike_steps(&None, Some(0), 100).is_err());
    }

    #[test]
    fn sweep_grid_order() {
        let s = SweepConfig { t: Some(vec![0.25, 0.5, 1.0]), delta: Some(vec![0.0, 0.1]), ..Default::default() };
        let g = s.grid().unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!((g[0][0], g[0][2]), (Some(0.25), Some(0.0)));
        assert_eq!((g[1][0], g[1][2]), (Some(0.25), Some(0.1)));
        assert_eq!((g[5][0], g[5][2]), (Some(1.0), Some(0.1)));
        assert!(g.iter().all(|p| p[1].is_none()));
        assert!(SweepConfig::default().grid().is_err());
        assert!(SweepConfig { t: Some(vec![]), ..Default::default() }.grid().is_err());
        let s = SweepConfig::apply(&g[3], &Schedules::default());
        assert_eq!(s.t, SeqSpec::constant(0.5));
        assert_eq!(s.delta, SeqSpec::constant(0.1));
        assert_eq!(s.eta, SeqSpec::zero());
    }

    #[test]
    fn parse_errors_carry_location() {
        let e = RunConfig::parse("max_steps = \"ten\"").unwrap_err();
        assert!(e.to_string().contains("line 1"), "{e}");
        assert!(RunConfig::parse("bogus = 1").is_err());
        assert!(RunConfig::parse("[space]\nkind = \"lq\"\nq = 1.0").is_err());
        assert!(RunConfig::parse("[check]\nalphas = [0.0]").is_err());
    }
}
