//! Experiment orchestration: game-unit loops, evaluation passes, the
//! robustness sweep and results persistence.
//!
//! An experiment runs both arms (teacher attached / learner alone) from
//! bit-identical learner initializations, alternating 1500-step training
//! units with evaluation passes. Repetitions execute concurrently with
//! derived seeds; re-running a config with the same seed reproduces the
//! results files byte for byte.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::agents::{learner_reward, load_policy, A2cLearner, Observation, Rollout, Teacher};
use crate::config::{ExperimentConfig, TeacherSource};
use crate::env::{NoiseSpec, TrackingEnv};
use crate::eval::similarity;
use crate::geom::Point2;
use crate::letters::generate_letters;
use crate::stats::{five_number_summary, mad_filter, median, GameUnitResult};
use crate::trajectory::{Episode, Role, Task, Trajectory};
use crate::{Error, Result};

/// Per-evaluation-episode similarity detail.
#[derive(Debug, Clone, Copy)]
pub struct EpisodeDetail {
    pub repetition: usize,
    pub unit: usize,
    pub connected: bool,
    pub episode: usize,
    pub similarity: f64,
}

/// A training unit that had to be abandoned (non-finite gradients); the
/// learner keeps its last valid parameters and the run continues.
#[derive(Debug, Clone)]
pub struct UnitFailure {
    pub repetition: usize,
    pub unit: usize,
    pub connected: bool,
    pub message: String,
}

/// Everything a finished experiment produced.
#[derive(Debug, Clone)]
pub struct RunResults {
    pub config: ExperimentConfig,
    pub rows: Vec<GameUnitResult>,
    pub episode_detail: Vec<EpisodeDetail>,
    pub failures: Vec<UnitFailure>,
    /// Not persisted; results files stay byte-identical across runs.
    pub wall_clock: Duration,
}

// SplitMix64; cheap, well-mixed seed derivation.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derive a stream-specific seed from the base seed and a tag path.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut h = splitmix64(base);
    for &t in tags {
        h = splitmix64(h ^ t.wrapping_mul(0xA24BAED4963EE407));
    }
    h
}

fn resolve_teacher(source: &TeacherSource) -> Result<Teacher> {
    match source {
        TeacherSource::Scripted => Ok(Teacher::scripted_default()),
        TeacherSource::Snapshot(path) => Ok(Teacher::Policy(load_policy(path)?)),
    }
}

/// Train the learner for `steps` environment steps on fresh cursor-task
/// episodes (a new phase offset per episode). A teacher, when present,
/// is coupled through the connected dynamics.
pub fn run_game_unit(
    learner: &mut A2cLearner,
    teacher: Option<&Teacher>,
    params: &ExperimentConfig,
    steps: usize,
    seed: u64,
) -> Result<()> {
    let env_params = params.env_params(teacher.is_some());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_step = learner.hyper().n_step;
    let mut steps_done = 0;
    let mut rollout = Rollout::default();
    while steps_done < steps {
        let alpha = params.offset.draw(&mut rng);
        let mut env = TrackingEnv::new(Episode::fc(alpha), env_params, rng.gen())?;
        rollout.clear();
        while !env.is_done() && steps_done < steps {
            let features = env.learner_observation(teacher.is_some()).features();
            let action = learner.act_stochastic(&features);
            let teacher_action = teacher
                .map(|t| t.act(&env.teacher_observation()))
                .unwrap_or(Point2::ZERO);
            let next = *env.step(action, teacher_action)?;
            rollout.push(features, action, learner_reward(&next, &params.reward));
            steps_done += 1;
            let segment_end =
                rollout.len() == n_step || env.is_done() || steps_done == steps;
            if segment_end {
                rollout.bootstrap = if env.is_done() {
                    0.0
                } else {
                    learner.value(&env.learner_observation(teacher.is_some()).features())
                };
                learner.update(&rollout)?;
                rollout.clear();
            }
        }
    }
    Ok(())
}

/// Aggregate of one evaluation pass.
#[derive(Debug, Clone)]
pub struct EvalSummary {
    pub mean: f64,
    pub median: f64,
    pub per_episode: Vec<f64>,
}

fn eval_episodes_for(task: Task, n_episodes: usize, rng: &mut impl Rng) -> Vec<Episode> {
    match task {
        Task::Fc => (0..n_episodes)
            .map(|_| Episode::fc(rng.gen_range(0.0..10.0)))
            .collect(),
        Task::Wesl => generate_letters()
            .into_iter()
            .map(|(_, t)| Episode::wesl(t).expect("bundled letters are valid"))
            .collect(),
    }
}

/// Deterministic evaluation of an arbitrary action rule on fresh episodes,
/// alone in the not-connected dynamics with an unobscured view. Skill is
/// measured on the true target; the noisy view is the training-time
/// handicap, and under the max-norm Fréchet score per-step noise would put
/// the similarity thresholds out of reach for any policy.
pub fn evaluate_policy(
    act: impl FnMut(&Observation) -> Point2,
    task: Task,
    config: &ExperimentConfig,
    n_episodes: usize,
    seed: u64,
) -> Result<EvalSummary> {
    let mut act = act;
    let mut env_params = config.env_params(false);
    env_params.noise = NoiseSpec::None;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let episodes = eval_episodes_for(task, n_episodes, &mut rng);
    let mut per_episode = Vec::with_capacity(episodes.len());
    for episode in episodes {
        let target = episode.target.clone();
        let len = episode.len();
        let mut env = TrackingEnv::new(episode, env_params, rng.gen())?;
        let mut points = Vec::with_capacity(len);
        points.push(env.state().learner);
        while !env.is_done() {
            let action = act(&env.learner_observation(false));
            let state = env.step(action, Point2::ZERO)?;
            points.push(state.learner);
        }
        let produced = Trajectory::new(points, Role::Learner)?;
        per_episode.push(similarity(&target, &produced)?.value);
    }
    Ok(EvalSummary {
        mean: per_episode.iter().sum::<f64>() / per_episode.len() as f64,
        median: median(&per_episode),
        per_episode,
    })
}

/// Evaluate the learner's deterministic mean actions; never updates the
/// learner.
pub fn evaluate_learner(
    learner: &A2cLearner,
    task: Task,
    config: &ExperimentConfig,
    n_episodes: usize,
    seed: u64,
) -> Result<EvalSummary> {
    evaluate_policy(
        |obs| learner.act_mean(&obs.features()),
        task,
        config,
        n_episodes,
        seed,
    )
}

struct RepOutcome {
    rows: Vec<GameUnitResult>,
    detail: Vec<EpisodeDetail>,
    failures: Vec<UnitFailure>,
}

fn run_repetition(
    config: &ExperimentConfig,
    repetition: usize,
    teacher: &Teacher,
) -> Result<RepOutcome> {
    let mut outcome = RepOutcome {
        rows: Vec::new(),
        detail: Vec::new(),
        failures: Vec::new(),
    };
    let init_seed = derive_seed(config.seed, &[1, repetition as u64]);
    for connected in [true, false] {
        // Both arms start from a bit-identical learner.
        let mut learner = A2cLearner::new(config.a2c, init_seed);
        for unit in 1..=config.game_units {
            let unit_seed = derive_seed(
                config.seed,
                &[2, repetition as u64, unit as u64, connected as u64],
            );
            let trained = run_game_unit(
                &mut learner,
                connected.then_some(teacher),
                config,
                config.steps_per_unit,
                unit_seed,
            );
            if let Err(e) = trained {
                outcome.failures.push(UnitFailure {
                    repetition,
                    unit,
                    connected,
                    message: e.to_string(),
                });
            }
            // The evaluation seed is arm-independent: both arms face the
            // same episodes and noise draws.
            let eval_seed = derive_seed(config.seed, &[3, repetition as u64, unit as u64]);
            let summary = evaluate_learner(
                &learner,
                config.task,
                config,
                config.eval_episodes,
                eval_seed,
            )?;
            outcome.rows.push(GameUnitResult {
                repetition,
                unit,
                connected,
                similarity: summary.mean,
            });
            outcome
                .detail
                .extend(summary.per_episode.iter().enumerate().map(|(i, s)| {
                    EpisodeDetail {
                        repetition,
                        unit,
                        connected,
                        episode: i,
                        similarity: *s,
                    }
                }));
        }
    }
    Ok(outcome)
}

/// Run the full experiment: `repetitions` independent learners, both arms
/// each, alternating training units and evaluation passes.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunResults> {
    config.validate()?;
    let teacher = resolve_teacher(&config.teacher)?;
    let start = Instant::now();
    let outcomes: Vec<Result<RepOutcome>> = (0..config.repetitions)
        .into_par_iter()
        .map(|rep| run_repetition(config, rep, &teacher))
        .collect();
    let mut rows = Vec::new();
    let mut detail = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        let outcome = outcome?;
        rows.extend(outcome.rows);
        detail.extend(outcome.detail);
        failures.extend(outcome.failures);
    }
    rows.sort_by_key(|r| (r.repetition, r.unit, !r.connected));
    detail.sort_by_key(|d| (d.repetition, d.unit, !d.connected, d.episode));
    Ok(RunResults {
        config: config.clone(),
        rows,
        episode_detail: detail,
        failures,
        wall_clock: start.elapsed(),
    })
}

/// Drop whole repetitions whose mean similarity is a MAD outlier within
/// their arm. Threshold 3.5; used only when the config enables it.
pub fn filter_outlier_repetitions(rows: &[GameUnitResult]) -> Vec<GameUnitResult> {
    let mut kept_rows = Vec::with_capacity(rows.len());
    for connected in [true, false] {
        let mut reps: Vec<usize> = rows
            .iter()
            .filter(|r| r.connected == connected)
            .map(|r| r.repetition)
            .collect();
        reps.sort_unstable();
        reps.dedup();
        let means: Vec<f64> = reps
            .iter()
            .map(|&rep| {
                let vals: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.connected == connected && r.repetition == rep)
                    .map(|r| r.similarity)
                    .collect();
                vals.iter().sum::<f64>() / vals.len() as f64
            })
            .collect();
        let kept_means = mad_filter(&means, 3.5);
        let kept_reps: Vec<usize> = reps
            .iter()
            .zip(&means)
            .filter(|(_, m)| kept_means.contains(m))
            .map(|(r, _)| *r)
            .collect();
        kept_rows.extend(
            rows.iter()
                .filter(|r| r.connected == connected && kept_reps.contains(&r.repetition))
                .copied(),
        );
    }
    kept_rows.sort_by_key(|r| (r.repetition, r.unit, !r.connected));
    kept_rows
}

/// Write the results table (`repetition,unit,connected,task,similarity`).
pub fn write_results(results: &RunResults, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("results.csv");
    let mut out = String::from("repetition,unit,connected,task,similarity\n");
    for r in &results.rows {
        out.push_str(&format!(
            "{},{},{},{},{:.9}\n",
            r.repetition, r.unit, r.connected, results.config.task, r.similarity
        ));
    }
    fs::write(&path, out).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Write per-evaluation-episode details alongside the main results.
pub fn write_episode_detail(results: &RunResults, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("eval_detail.csv");
    let mut out = String::from("repetition,unit,connected,episode,similarity\n");
    for d in &results.episode_detail {
        out.push_str(&format!(
            "{},{},{},{},{:.9}\n",
            d.repetition, d.unit, d.connected, d.episode, d.similarity
        ));
    }
    fs::write(&path, out).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Read a results file back into game-unit rows, returning the task tag it
/// carries.
pub fn read_results(path: &Path) -> Result<(Task, Vec<GameUnitResult>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "repetition,unit,connected,task,similarity" => {}
        _ => {
            return Err(Error::Parse {
                path: path.into(),
                line: 1,
                msg: "expected header 'repetition,unit,connected,task,similarity'".into(),
            })
        }
    }
    let mut task = None;
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| Error::Parse {
            path: path.into(),
            line: idx + 1,
            msg: msg.into(),
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(err("expected 5 columns"));
        }
        let repetition = fields[0].parse().map_err(|_| err("bad repetition"))?;
        let unit = fields[1].parse().map_err(|_| err("bad unit"))?;
        let connected = fields[2].parse().map_err(|_| err("bad connected flag"))?;
        let row_task: Task = fields[3].parse()?;
        let similarity = fields[4].parse().map_err(|_| err("bad similarity"))?;
        if *task.get_or_insert(row_task) != row_task {
            return Err(err("mixed tasks in one results file"));
        }
        rows.push(GameUnitResult {
            repetition,
            unit,
            connected,
            similarity,
        });
    }
    let task = task.ok_or_else(|| Error::IncompleteData("results file has no rows".into()))?;
    Ok((task, rows))
}

/// Emit per-arm per-unit quartile summaries for plotting.
pub fn write_learning_curves(rows: &[GameUnitResult], dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("curves.csv");
    let mut units: Vec<usize> = rows.iter().map(|r| r.unit).collect();
    units.sort_unstable();
    units.dedup();
    let mut out = String::from("connected,unit,min,q1,median,q3,max\n");
    for connected in [false, true] {
        for &unit in &units {
            let values: Vec<f64> = rows
                .iter()
                .filter(|r| r.connected == connected && r.unit == unit)
                .map(|r| r.similarity)
                .collect();
            if values.is_empty() {
                continue;
            }
            let (min, q1, med, q3, max) = five_number_summary(&values);
            out.push_str(&format!(
                "{connected},{unit},{min:.9},{q1:.9},{med:.9},{q3:.9},{max:.9}\n"
            ));
        }
    }
    fs::write(&path, out).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// One cell of the robustness sweep.
#[derive(Debug, Clone)]
pub struct SweepCell {
    pub noise_kind: &'static str,
    pub variance: f64,
    pub unit: usize,
    pub mean_not_connected: f64,
    pub mean_connected: f64,
}

/// Noise grid of the robustness sweep: per-axis variances crossed with the
/// two noise families. The uniform-circle radius is chosen to match the
/// per-axis variance of the normal setting.
pub fn sweep_noise(kind: &str, variance: f64) -> Result<NoiseSpec> {
    match kind {
        "normal" => Ok(NoiseSpec::Normal {
            sigma: variance.sqrt(),
        }),
        "uniform" => Ok(NoiseSpec::UniformCircle {
            radius: (2.0 * variance).sqrt(),
        }),
        other => Err(Error::Config(format!("unknown sweep noise kind '{other}'"))),
    }
}

/// Run the robustness grid: noise variances crossed with noise kinds,
/// reporting mean similarity per arm at the requested game units.
pub fn run_robustness_sweep(
    base: &ExperimentConfig,
    variances: &[f64],
    units_of_interest: &[usize],
) -> Result<Vec<SweepCell>> {
    let max_unit = *units_of_interest
        .iter()
        .max()
        .ok_or_else(|| Error::InvalidArgument("no units of interest".into()))?;
    let mut cells = Vec::new();
    for (kind_idx, kind) in ["normal", "uniform"].iter().enumerate() {
        for (v_idx, &variance) in variances.iter().enumerate() {
            let mut config = base.clone();
            config.game_units = max_unit;
            config.noise = sweep_noise(kind, variance)?;
            config.seed = derive_seed(base.seed, &[4, kind_idx as u64, v_idx as u64]);
            let results = run_experiment(&config)?;
            for &unit in units_of_interest {
                let arm_mean = |connected: bool| {
                    let vals: Vec<f64> = results
                        .rows
                        .iter()
                        .filter(|r| r.unit == unit && r.connected == connected)
                        .map(|r| r.similarity)
                        .collect();
                    vals.iter().sum::<f64>() / vals.len() as f64
                };
                cells.push(SweepCell {
                    noise_kind: if *kind == "normal" { "normal" } else { "uniform" },
                    variance,
                    unit,
                    mean_not_connected: arm_mean(false),
                    mean_connected: arm_mean(true),
                });
            }
        }
    }
    Ok(cells)
}

/// Write the sweep table.
pub fn write_sweep(cells: &[SweepCell], dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("sweep.csv");
    let mut out = String::from("noise_kind,variance,unit,mean_not_connected,mean_connected\n");
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{:.9},{:.9}\n",
            c.noise_kind, c.variance, c.unit, c.mean_not_connected, c.mean_connected
        ));
    }
    fs::write(&path, out).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::A2cHyper;

    fn tiny_config() -> ExperimentConfig {
        ExperimentConfig {
            repetitions: 1,
            game_units: 1,
            steps_per_unit: 250,
            eval_episodes: 2,
            seed: 5,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn zero_steps_leaves_learner_unchanged() {
        let config = tiny_config();
        let mut learner = A2cLearner::new(A2cHyper::default(), 1);
        let before = learner.actor.flat_params();
        run_game_unit(&mut learner, None, &config, 0, 3).unwrap();
        assert_eq!(learner.actor.flat_params(), before);
    }

    #[test]
    fn game_unit_is_deterministic() {
        let config = tiny_config();
        let teacher = Teacher::scripted_default();
        let run = || {
            let mut learner = A2cLearner::new(A2cHyper::default(), 11);
            run_game_unit(&mut learner, Some(&teacher), &config, 300, 7).unwrap();
            learner.actor.flat_params()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn learner_reward_improves_within_one_unit() {
        // Seeded training on the cursor task, learner alone: the mean
        // reward of the last tenth of steps must beat the first tenth.
        let config = ExperimentConfig {
            seed: 3,
            ..ExperimentConfig::default()
        };
        let mut learner = A2cLearner::new(A2cHyper::default(), 3);
        let env_params = config.env_params(false);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut rewards = Vec::new();
        let mut rollout = Rollout::default();
        let steps = 1500;
        'outer: loop {
            let mut env =
                TrackingEnv::new(Episode::fc(rng.gen_range(0.0..10.0)), env_params, rng.gen())
                    .unwrap();
            let len = env.episode().len();
            rollout.clear();
            while !env.is_done() {
                let obs = Observation::learner_view(env.state(), len, false);
                let f = obs.features();
                let a = learner.act_stochastic(&f);
                let next = *env.step(a, Point2::ZERO).unwrap();
                let r = learner_reward(&next, &config.reward);
                rewards.push(r);
                rollout.push(f, a, r);
                if rollout.len() == learner.hyper().n_step || env.is_done() {
                    rollout.bootstrap = if env.is_done() {
                        0.0
                    } else {
                        let next_obs = Observation::learner_view(&next, len, false);
                        learner.value(&next_obs.features())
                    };
                    learner.update(&rollout).unwrap();
                    rollout.clear();
                }
                if rewards.len() >= steps {
                    break 'outer;
                }
            }
        }
        let tenth = steps / 10;
        let first: f64 = rewards[..tenth].iter().sum::<f64>() / tenth as f64;
        let last: f64 = rewards[steps - tenth..].iter().sum::<f64>() / tenth as f64;
        assert!(
            last > first,
            "no learning progress: first tenth {first:.3}, last tenth {last:.3}"
        );
    }

    #[test]
    fn oracle_policy_tracks_well() {
        // A pursuit rule that closes the full distance each step (the clip
        // offsets the mitigation factor) scores high under zero noise.
        let config = tiny_config();
        let summary = evaluate_policy(
            |obs| ((obs.target - obs.own) * (1.0 / config.mitigation)).clip_norm(4.0),
            Task::Fc,
            &config,
            20,
            2,
        )
        .unwrap();
        assert!(
            summary.mean >= 0.95,
            "oracle pursuit scored {}",
            summary.mean
        );
    }

    #[test]
    fn random_init_learner_scores_low() {
        let config = tiny_config();
        let learner = A2cLearner::new(A2cHyper::default(), 77);
        let summary = evaluate_learner(&learner, Task::Fc, &config, 20, 3).unwrap();
        assert!(
            summary.mean < 0.6,
            "untrained learner scored {}",
            summary.mean
        );
    }

    #[test]
    fn experiment_row_counts_and_determinism() {
        let config = tiny_config();
        let a = run_experiment(&config).unwrap();
        assert_eq!(
            a.rows.len(),
            config.repetitions * config.game_units * 2,
            "one row per repetition, unit and arm"
        );
        assert_eq!(
            a.episode_detail.len(),
            config.repetitions * config.game_units * 2 * config.eval_episodes
        );
        let b = run_experiment(&config).unwrap();
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn arms_start_from_identical_learners() {
        let config = tiny_config();
        let init_seed = derive_seed(config.seed, &[1, 0]);
        let a = A2cLearner::new(config.a2c, init_seed);
        let b = A2cLearner::new(config.a2c, init_seed);
        assert_eq!(a.actor.flat_params(), b.actor.flat_params());
    }

    #[test]
    fn results_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let config = tiny_config();
        let results = run_experiment(&config).unwrap();
        let path = write_results(&results, dir.path()).unwrap();
        let (task, rows) = read_results(&path).unwrap();
        assert_eq!(task, config.task);
        assert_eq!(rows.len(), results.rows.len());
        for (a, b) in rows.iter().zip(&results.rows) {
            assert_eq!(a.repetition, b.repetition);
            assert_eq!(a.unit, b.unit);
            assert_eq!(a.connected, b.connected);
            assert!((a.similarity - b.similarity).abs() < 1e-9);
        }
    }

    #[test]
    fn curves_match_stats_medians() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            GameUnitResult { repetition: 0, unit: 1, connected: true, similarity: 0.2 },
            GameUnitResult { repetition: 1, unit: 1, connected: true, similarity: 0.4 },
            GameUnitResult { repetition: 2, unit: 1, connected: true, similarity: 0.9 },
            GameUnitResult { repetition: 0, unit: 1, connected: false, similarity: 0.1 },
            GameUnitResult { repetition: 1, unit: 1, connected: false, similarity: 0.5 },
            GameUnitResult { repetition: 2, unit: 1, connected: false, similarity: 0.3 },
        ];
        let path = write_learning_curves(&rows, dir.path()).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        let expected_conn = median(&[0.2, 0.4, 0.9]);
        let expected_not = median(&[0.1, 0.5, 0.3]);
        let mut seen = 0;
        for line in text.lines().skip(1) {
            let fields: Vec<&str> = line.split(',').collect();
            let med: f64 = fields[4].parse().unwrap();
            if fields[0] == "true" {
                assert_eq!(med, expected_conn);
            } else {
                assert_eq!(med, expected_not);
            }
            seen += 1;
        }
        assert_eq!(seen, 2);
    }

    #[test]
    fn outlier_filter_drops_whole_repetition() {
        let mut rows = Vec::new();
        for rep in 0..6 {
            for unit in 1..=3 {
                let base = if rep == 5 { 0.05 } else { 0.9 };
                rows.push(GameUnitResult {
                    repetition: rep,
                    unit,
                    connected: true,
                    similarity: base + 0.01 * rep as f64,
                });
                rows.push(GameUnitResult {
                    repetition: rep,
                    unit,
                    connected: false,
                    similarity: 0.5,
                });
            }
        }
        let kept = filter_outlier_repetitions(&rows);
        assert!(kept
            .iter()
            .all(|r| !(r.connected && r.repetition == 5)));
        // The not-connected arm keeps all repetitions.
        assert_eq!(kept.iter().filter(|r| !r.connected).count(), 18);
    }

    #[test]
    fn sweep_noise_mapping() {
        assert_eq!(
            sweep_noise("normal", 4.0).unwrap(),
            NoiseSpec::Normal { sigma: 2.0 }
        );
        match sweep_noise("uniform", 4.0).unwrap() {
            NoiseSpec::UniformCircle { radius } => {
                assert!((radius - (8.0f64).sqrt()).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(sweep_noise("bogus", 1.0).is_err());
    }
}
