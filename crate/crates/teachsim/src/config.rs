//! Experiment configuration: defaults, TOML file loading and key-by-key
//! overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::agents::{A2cHyper, RewardParams};
use crate::env::{EnvParams, NoiseSpec, OffsetStrategy, StiffnessModality};
use crate::geom::Board;
use crate::trajectory::Task;
use crate::{Error, Result};

/// Where the teacher attached in connected game units comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TeacherSource {
    Scripted,
    Snapshot(PathBuf),
}

impl TeacherSource {
    pub fn parse(s: &str) -> TeacherSource {
        if s.eq_ignore_ascii_case("scripted") {
            TeacherSource::Scripted
        } else {
            TeacherSource::Snapshot(PathBuf::from(s))
        }
    }
}

impl std::fmt::Display for TeacherSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TeacherSource::Scripted => f.write_str("scripted"),
            TeacherSource::Snapshot(p) => write!(f, "{}", p.display()),
        }
    }
}

/// Full configuration of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub task: Task,
    pub modality: StiffnessModality,
    pub noise: NoiseSpec,
    pub offset: OffsetStrategy,
    pub mitigation: f64,
    pub stiffness_scale: f64,
    pub game_units: usize,
    pub steps_per_unit: usize,
    pub repetitions: usize,
    pub eval_episodes: usize,
    pub seed: u64,
    pub teacher: TeacherSource,
    pub a2c: A2cHyper,
    pub reward: RewardParams,
    /// Drop outlier repetitions (median-absolute-deviation rule) before
    /// the hypothesis tests. Off by default.
    pub mad_filter: bool,
}

impl ExperimentConfig {
    /// Defaults for a task: 7 game units and 50 evaluation episodes on the
    /// cursor task, 6 units and the 26 letters on the writing task.
    pub fn for_task(task: Task, seed: u64) -> Self {
        let (game_units, eval_episodes) = match task {
            Task::Fc => (7, 50),
            Task::Wesl => (6, 26),
        };
        ExperimentConfig {
            task,
            modality: StiffnessModality::Lh,
            noise: NoiseSpec::Normal { sigma: 2.0 },
            offset: OffsetStrategy::Constant(3.0),
            mitigation: 0.5,
            stiffness_scale: 0.01,
            game_units,
            steps_per_unit: 1500,
            repetitions: 10,
            eval_episodes,
            seed,
            teacher: TeacherSource::Scripted,
            a2c: A2cHyper::default(),
            reward: RewardParams::default(),
            mad_filter: false,
        }
    }

    pub fn env_params(&self, connected: bool) -> EnvParams {
        EnvParams {
            modality: self.modality,
            connected,
            noise: self.noise,
            mitigation: self.mitigation,
            stiffness_scale: self.stiffness_scale,
            board: Board::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.env_params(true).validate()?;
        if self.steps_per_unit == 0 {
            return Err(Error::Config("steps_per_unit must be at least 1".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.game_units == 0 {
            return Err(Error::Config("game_units must be at least 1".into()));
        }
        if self.task == Task::Wesl && self.eval_episodes != 26 {
            return Err(Error::Config(
                "letter-task evaluation covers exactly the 26 letters".into(),
            ));
        }
        if self.eval_episodes == 0 {
            return Err(Error::Config("eval_episodes must be at least 1".into()));
        }
        Ok(())
    }

    /// Threshold for the time-to-threshold hypothesis, per task.
    pub fn theta(&self) -> f64 {
        match self.task {
            Task::Fc => 0.9,
            Task::Wesl => 0.75,
        }
    }

    /// Game unit at which learning is considered converged, per task.
    pub fn convergence_unit(&self) -> usize {
        match self.task {
            Task::Fc => 4,
            Task::Wesl => 3,
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig::for_task(Task::Fc, 42)
    }
}

/// Structured config file contents. Every key is optional; omitted keys
/// keep their defaults.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub task: Option<String>,
    pub modality: Option<String>,
    pub connected: Option<bool>,
    pub seed: Option<u64>,
    pub c: Option<f64>,
    pub stiffness_scale: Option<f64>,
    pub game_units: Option<usize>,
    pub steps_per_unit: Option<usize>,
    pub repetitions: Option<usize>,
    pub eval_episodes: Option<usize>,
    pub teacher: Option<String>,
    pub mad_filter: Option<bool>,
    pub noise: Option<NoiseSection>,
    pub offset: Option<OffsetSection>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub kind: Option<String>,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OffsetSection {
    pub kind: Option<String>,
    pub value: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Build an experiment config: task-appropriate defaults overlaid with
    /// whatever this file specifies.
    pub fn to_experiment(&self) -> Result<ExperimentConfig> {
        let task: Task = match &self.task {
            Some(t) => t.parse()?,
            None => Task::Fc,
        };
        let seed = self.seed.unwrap_or(42);
        let mut cfg = ExperimentConfig::for_task(task, seed);
        self.apply(&mut cfg)?;
        Ok(cfg)
    }

    /// Overlay this file's keys onto an existing config.
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(t) = &self.task {
            let task: Task = t.parse()?;
            if task != cfg.task {
                *cfg = ExperimentConfig::for_task(task, cfg.seed);
            }
        }
        if let Some(m) = &self.modality {
            cfg.modality = m.parse()?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(c) = self.c {
            cfg.mitigation = c;
        }
        if let Some(s) = self.stiffness_scale {
            cfg.stiffness_scale = s;
        }
        if let Some(v) = self.game_units {
            cfg.game_units = v;
        }
        if let Some(v) = self.steps_per_unit {
            cfg.steps_per_unit = v;
        }
        if let Some(v) = self.repetitions {
            cfg.repetitions = v;
        }
        if let Some(v) = self.eval_episodes {
            cfg.eval_episodes = v;
        }
        if let Some(t) = &self.teacher {
            cfg.teacher = TeacherSource::parse(t);
        }
        if let Some(v) = self.mad_filter {
            cfg.mad_filter = v;
        }
        if let Some(noise) = &self.noise {
            let kind = noise.kind.as_deref().unwrap_or(cfg.noise.kind());
            let value = noise.value.unwrap_or(cfg.noise.value());
            cfg.noise = if kind == "none" {
                NoiseSpec::None
            } else {
                NoiseSpec::from_kind_value(kind, value)?
            };
        }
        if let Some(offset) = &self.offset {
            cfg.offset = match offset.kind.as_deref() {
                Some("random-int") | Some("random_int") | Some("random") => {
                    OffsetStrategy::RandomInt
                }
                Some("constant") | None => {
                    let value = offset.value.unwrap_or(match cfg.offset {
                        OffsetStrategy::Constant(a) => a,
                        OffsetStrategy::RandomInt => 3.0,
                    });
                    OffsetStrategy::Constant(value)
                }
                Some(other) => {
                    return Err(Error::Config(format!("unknown offset kind '{other}'")))
                }
            };
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_per_task() {
        let fc = ExperimentConfig::for_task(Task::Fc, 1);
        assert_eq!((fc.game_units, fc.eval_episodes), (7, 50));
        assert_eq!(fc.steps_per_unit, 1500);
        assert_eq!(fc.repetitions, 10);
        let wesl = ExperimentConfig::for_task(Task::Wesl, 1);
        assert_eq!((wesl.game_units, wesl.eval_episodes), (6, 26));
        assert!((fc.theta() - 0.9).abs() < 1e-12);
        assert!((wesl.theta() - 0.75).abs() < 1e-12);
        assert_eq!(fc.convergence_unit(), 4);
        assert_eq!(wesl.convergence_unit(), 3);
    }

    #[test]
    fn file_overrides_defaults() {
        let toml = r#"
task = "wesl"
modality = "hl"
seed = 7
c = 0.4
stiffness_scale = 0.02
repetitions = 3

[noise]
kind = "uniform-circle"
value = 5.0

[offset]
kind = "random-int"
"#;
        let fc: FileConfig = toml::from_str(toml).unwrap();
        let cfg = fc.to_experiment().unwrap();
        assert_eq!(cfg.task, Task::Wesl);
        assert_eq!(cfg.modality, StiffnessModality::Hl);
        assert_eq!(cfg.seed, 7);
        assert!((cfg.mitigation - 0.4).abs() < 1e-12);
        assert_eq!(cfg.repetitions, 3);
        assert_eq!(cfg.eval_episodes, 26);
        assert_eq!(cfg.noise, NoiseSpec::UniformCircle { radius: 5.0 });
        assert_eq!(cfg.offset, OffsetStrategy::RandomInt);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad: std::result::Result<FileConfig, _> = toml::from_str("bogus_key = 1");
        assert!(bad.is_err());
    }

    #[test]
    fn wesl_eval_episode_count_is_pinned() {
        let mut cfg = ExperimentConfig::for_task(Task::Wesl, 1);
        cfg.eval_episodes = 10;
        assert!(cfg.validate().is_err());
    }
}
