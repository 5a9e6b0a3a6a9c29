//! Run configuration: JSON file values, overridden by flags, with every
//! default resolved before any work starts.

use std::path::{Path, PathBuf};

use cantordiff_core::diffset::Mode;
use cantordiff_core::{branching, spectral, typespace, Params};
use serde::{Deserialize, Serialize};

use crate::Failure;

/// Values as they appear in a config file or on the command line.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Contraction ratio, 1/4 < a.
    #[arg(long, global = true)]
    pub a: Option<f64>,
    /// Edge gap, b > 0 with 3a + 2b < 1.
    #[arg(long, global = true)]
    pub b: Option<f64>,
    /// Type-space shrink; defaults to half the admissible bound.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Tree depth for the geometric commands.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Quadrature step; defaults to t/10.
    #[arg(long = "grid-step", global = true)]
    pub grid_step: Option<f64>,
    /// Half-width of the nice window [-K, K].
    #[arg(long = "K", global = true)]
    #[serde(rename = "K")]
    pub k: Option<f64>,
    /// Main Lemma threshold; calibrated by a pilot run when absent.
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Main Lemma generation; calibrated by a pilot run when absent.
    #[arg(long = "N", global = true)]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    /// Ancestor type for `branching` and the line offset for `render-squares`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x: Option<f64>,
    /// Generations simulated by `branching`.
    #[arg(long, global = true)]
    pub generations: Option<usize>,
    /// Lower bound q fed to `bound`; defaults to the value `mainlemma` would
    /// report, which requires a simulation.
    #[arg(long, global = true)]
    pub q: Option<f64>,
    /// Number of factors evaluated by `bound`.
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    /// Trials used for the (costly) full-union lengths in `diffset`.
    #[arg(long = "union-trials", global = true)]
    pub union_trials: Option<u64>,
    /// Trials per pilot point when calibrating `N` and `delta`.
    #[arg(long = "pilot-trials", global = true)]
    pub pilot_trials: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Shared,
    Iid,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Shared => Mode::Shared,
            ModeArg::Iid => Mode::Iid,
        }
    }
}

impl Settings {
    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: Settings) -> Settings {
        macro_rules! pick {
            ($($f:ident),*) => { Settings { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            a,
            b,
            epsilon,
            seed,
            trials,
            depth,
            grid_step,
            k,
            delta,
            n,
            out,
            workers,
            mode,
            x,
            generations,
            q,
            kmax,
            union_trials,
            pilot_trials
        )
    }
}

pub fn read_file(path: &Path) -> Result<Settings, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

/// A configuration with every default filled in. Serialized next to the
/// outputs; feeding it back through `--config` reproduces them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub a: f64,
    pub b: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub trials: u64,
    pub depth: usize,
    pub grid_step: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub delta: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub out: PathBuf,
    pub workers: Option<usize>,
    pub mode: ModeArg,
    pub x: f64,
    pub generations: usize,
    pub q: Option<f64>,
    pub kmax: usize,
    pub union_trials: u64,
    pub pilot_trials: u64,
}

impl RunConfig {
    pub fn params(&self) -> Params {
        Params::new(self.a, self.b).expect("validated during resolution")
    }

    /// The same run expressed as settings, for writing back as a config file.
    pub fn to_settings(&self) -> Settings {
        Settings {
            a: Some(self.a),
            b: Some(self.b),
            epsilon: Some(self.epsilon),
            seed: Some(self.seed),
            trials: Some(self.trials),
            depth: Some(self.depth),
            grid_step: Some(self.grid_step),
            k: Some(self.k),
            delta: self.delta,
            n: self.n,
            out: Some(self.out.clone()),
            workers: self.workers,
            mode: Some(self.mode),
            x: Some(self.x),
            generations: Some(self.generations),
            q: self.q,
            kmax: Some(self.kmax),
            union_trials: Some(self.union_trials),
            pilot_trials: Some(self.pilot_trials),
        }
    }
}

pub fn resolve(command: &str, s: Settings) -> Result<RunConfig, Failure> {
    let a =
        s.a.ok_or_else(|| Failure::Config("missing parameter `a`".into()))?;
    let b =
        s.b.ok_or_else(|| Failure::Config("missing parameter `b`".into()))?;
    let p = Params::new(a, b)?;
    let epsilon = s.epsilon.unwrap_or_else(|| typespace::default_epsilon(&p));
    let k = match s.k {
        Some(k) => k,
        // the default depends on T, which an out-of-range epsilon cannot build
        None => typespace::build(&p, epsilon)
            .map(|ts| branching::default_k(&ts))
            .unwrap_or(0.124),
    };
    Ok(RunConfig {
        command: command.to_string(),
        a,
        b,
        epsilon,
        seed: s.seed.unwrap_or(1),
        trials: s.trials.unwrap_or(10_000),
        depth: s.depth.unwrap_or(10),
        grid_step: s.grid_step.unwrap_or_else(|| spectral::default_step(&p)),
        k,
        delta: s.delta,
        n: s.n,
        out: s.out.unwrap_or_else(|| PathBuf::from("out")),
        workers: s.workers,
        mode: s.mode.unwrap_or(ModeArg::Shared),
        x: s.x.unwrap_or(0.0),
        generations: s.generations.unwrap_or(10),
        q: s.q,
        kmax: s.kmax.unwrap_or(40),
        union_trials: s.union_trials.unwrap_or(256),
        pilot_trials: s.pilot_trials.unwrap_or(2000),
    })
}
