//! Command-line interface: experiments, the robustness sweep, hypothesis
//! reports, adversarial teacher training, pairwise trajectory scoring and
//! the bundled letter dataset.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use teachsim::config::{ExperimentConfig, FileConfig};
use teachsim::imitation::{
    discriminator_holdout_accuracy, evaluate_teacher_policy, expert_env_params,
    generate_expert_dataset, gail_train, load_expert_dataset, save_expert_dataset,
    select_teacher, GailHyper,
};
use teachsim::runner::{
    filter_outlier_repetitions, read_results, run_experiment, run_robustness_sweep,
    write_episode_detail, write_learning_curves, write_results, write_sweep,
};
use teachsim::stats::{
    format_report, h1_per_unit, h2_auc, h3_time_to_threshold, h4_variance, GameUnitResult,
};
use teachsim::trajectory::{Role, Task, Trajectory};
use teachsim::{agents, eval, letters};

#[derive(Parser)]
#[command(name = "teachsim", about = "Virtual teacher-learner motor-skill simulator", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct ConfigOverrides {
    /// Structured config file (every key below overrides it).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Task: fc or wesl.
    #[arg(long)]
    task: Option<String>,
    /// Connectivity modality: hh, ll, lh or hl.
    #[arg(long)]
    modality: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Mitigation factor on the learner update and the coupling.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    stiffness_scale: Option<f64>,
    #[arg(long)]
    game_units: Option<usize>,
    #[arg(long)]
    steps_per_unit: Option<usize>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    eval_episodes: Option<usize>,
    /// Noise kind: normal, uniform-circle or none.
    #[arg(long)]
    noise_kind: Option<String>,
    /// Sigma (normal) or radius (uniform-circle), board units.
    #[arg(long)]
    noise_value: Option<f64>,
    /// Offset kind: constant or random-int.
    #[arg(long)]
    offset_kind: Option<String>,
    #[arg(long)]
    offset_value: Option<f64>,
    /// "scripted" or a path to a policy snapshot.
    #[arg(long)]
    teacher: Option<String>,
    /// Drop outlier repetitions before the hypothesis tests.
    #[arg(long)]
    mad_filter: bool,
}

impl ConfigOverrides {
    fn build(&self) -> teachsim::Result<ExperimentConfig> {
        let mut file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        // Flags beat file keys.
        if self.task.is_some() {
            file.task = self.task.clone();
        }
        if self.modality.is_some() {
            file.modality = self.modality.clone();
        }
        if self.seed.is_some() {
            file.seed = self.seed;
        }
        if self.c.is_some() {
            file.c = self.c;
        }
        if self.stiffness_scale.is_some() {
            file.stiffness_scale = self.stiffness_scale;
        }
        if self.game_units.is_some() {
            file.game_units = self.game_units;
        }
        if self.steps_per_unit.is_some() {
            file.steps_per_unit = self.steps_per_unit;
        }
        if self.repetitions.is_some() {
            file.repetitions = self.repetitions;
        }
        if self.eval_episodes.is_some() {
            file.eval_episodes = self.eval_episodes;
        }
        if self.teacher.is_some() {
            file.teacher = self.teacher.clone();
        }
        if self.mad_filter {
            file.mad_filter = Some(true);
        }
        if self.noise_kind.is_some() || self.noise_value.is_some() {
            let mut section = file.noise.unwrap_or_default();
            if self.noise_kind.is_some() {
                section.kind = self.noise_kind.clone();
            }
            if self.noise_value.is_some() {
                section.value = self.noise_value;
            }
            file.noise = Some(section);
        }
        if self.offset_kind.is_some() || self.offset_value.is_some() {
            let mut section = file.offset.unwrap_or_default();
            if self.offset_kind.is_some() {
                section.kind = self.offset_kind.clone();
            }
            if self.offset_value.is_some() {
                section.value = self.offset_value;
            }
            file.offset = Some(section);
        }
        file.to_experiment()
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a full experiment (both arms) and write results, evaluation
    /// detail and learning-curve files.
    Run {
        #[command(flatten)]
        overrides: ConfigOverrides,
        /// Output directory (default: $TEACHSIM_OUT or ./out).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Robustness grid over noise variances and kinds.
    Sweep {
        #[command(flatten)]
        overrides: ConfigOverrides,
        /// Per-axis noise variances to sweep.
        #[arg(long, value_delimiter = ',', default_values_t = vec![4.0, 6.0, 8.0, 10.0])]
        variances: Vec<f64>,
        /// Game units reported in the table.
        #[arg(long, value_delimiter = ',', default_values_t = vec![4usize, 5])]
        units: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hypothesis reports from a results file.
    Stats {
        /// results.csv produced by `run`.
        results: PathBuf,
        /// Similarity threshold for the time-to-threshold test
        /// (default 0.9 on fc, 0.75 on wesl).
        #[arg(long)]
        theta: Option<f64>,
        /// First unit considered converged (default 4 on fc, 3 on wesl).
        #[arg(long)]
        convergence_unit: Option<usize>,
        /// Drop outlier repetitions first.
        #[arg(long)]
        mad_filter: bool,
    },
    /// Train a teacher by adversarial imitation and save its snapshots.
    GailTrain {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Expert episodes to record (ignored with --expert-dir).
        #[arg(long, default_value_t = 8)]
        expert_episodes: usize,
        /// Load expert recordings from a dataset directory instead of
        /// generating them.
        #[arg(long)]
        expert_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 6000)]
        generator_steps: usize,
        /// Modality tag used in snapshot file names.
        #[arg(long, default_value = "ll")]
        modality: String,
        /// Episodes per snapshot evaluation.
        #[arg(long, default_value_t = 8)]
        eval_episodes: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Similarity of two trajectory files.
    EvalPair {
        /// Target (reference) trajectory file.
        target: PathBuf,
        /// Produced trajectory file.
        produced: PathBuf,
    },
    /// Write the bundled 26-letter dataset.
    GenLetters {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn s_create_dir(dir: &PathBuf) -> teachsim::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| teachsim::Error::Io {
        path: dir.clone(),
        source: e,
    })
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("TEACHSIM_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn print_reports(task: Task, rows: &[GameUnitResult], theta: f64, convergence_unit: usize) {
    println!("task: {task}, {} rows", rows.len());
    match h1_per_unit(rows) {
        Ok(r) => print!("{}", format_report(&r)),
        Err(e) => eprintln!("H1 failed: {e}"),
    }
    match h2_auc(rows) {
        Ok(r) => print!("{}", format_report(&r)),
        Err(e) => eprintln!("H2 failed: {e}"),
    }
    match h3_time_to_threshold(rows, theta) {
        Ok(r) => print!("{}", format_report(&r)),
        Err(e) => eprintln!("H3 failed: {e}"),
    }
    match h4_variance(rows, convergence_unit) {
        Ok(r) => print!("{}", format_report(&r)),
        Err(e) => eprintln!("H4 failed: {e}"),
    }
}

fn run(cli: Cli) -> teachsim::Result<()> {
    match cli.command {
        Command::Run { overrides, out } => {
            let config = overrides.build()?;
            let dir = out_dir(out);
            println!(
                "running {} experiment: modality {}, {} repetitions x {} units x {} steps, seed {}",
                config.task,
                config.modality,
                config.repetitions,
                config.game_units,
                config.steps_per_unit,
                config.seed
            );
            let results = run_experiment(&config)?;
            let results_path = write_results(&results, &dir)?;
            write_episode_detail(&results, &dir)?;
            write_learning_curves(&results.rows, &dir)?;
            println!(
                "done in {:.1}s; results in {}",
                results.wall_clock.as_secs_f64(),
                results_path.display()
            );
            for f in &results.failures {
                eprintln!(
                    "warning: repetition {} unit {} ({}connected) failed: {}",
                    f.repetition,
                    f.unit,
                    if f.connected { "" } else { "not " },
                    f.message
                );
            }
            let rows = if config.mad_filter {
                filter_outlier_repetitions(&results.rows)
            } else {
                results.rows.clone()
            };
            print_reports(config.task, &rows, config.theta(), config.convergence_unit());
            Ok(())
        }
        Command::Sweep {
            overrides,
            variances,
            units,
            out,
        } => {
            let config = overrides.build()?;
            let dir = out_dir(out);
            println!(
                "sweeping noise variances {variances:?} x {{normal, uniform}} at units {units:?}"
            );
            let cells = run_robustness_sweep(&config, &variances, &units)?;
            let path = write_sweep(&cells, &dir)?;
            println!("{:<10} {:>9} {:>5} {:>16} {:>12}", "kind", "variance", "unit", "not-connected", "connected");
            for c in &cells {
                println!(
                    "{:<10} {:>9.1} {:>5} {:>16.3} {:>12.3}",
                    c.noise_kind, c.variance, c.unit, c.mean_not_connected, c.mean_connected
                );
            }
            println!("sweep table in {}", path.display());
            Ok(())
        }
        Command::Stats {
            results,
            theta,
            convergence_unit,
            mad_filter,
        } => {
            let (task, mut rows) = read_results(&results)?;
            if mad_filter {
                rows = filter_outlier_repetitions(&rows);
            }
            let defaults = ExperimentConfig::for_task(task, 0);
            print_reports(
                task,
                &rows,
                theta.unwrap_or_else(|| defaults.theta()),
                convergence_unit.unwrap_or_else(|| defaults.convergence_unit()),
            );
            Ok(())
        }
        Command::GailTrain {
            seed,
            expert_episodes,
            expert_dir,
            generator_steps,
            modality,
            eval_episodes,
            out,
        } => {
            let dir = out_dir(out);
            let mut params = expert_env_params();
            params.modality = modality.parse()?;
            let expert = match &expert_dir {
                Some(d) => {
                    println!("loading expert recordings from {}", d.display());
                    load_expert_dataset(d, params)?
                }
                None => {
                    println!("recording {expert_episodes} synthetic expert episodes");
                    let ds = generate_expert_dataset(expert_episodes, seed ^ 0x5eed, params)?;
                    save_expert_dataset(&ds, &dir.join("expert"))?;
                    ds
                }
            };
            let holdout = generate_expert_dataset(4, seed ^ 0x401d, params)?;
            let hyper = GailHyper {
                total_generator_steps: generator_steps,
                ..GailHyper::default()
            };
            println!("training generator for {generator_steps} steps");
            let outcome = gail_train(params, &expert, hyper, seed)?;
            s_create_dir(&dir)?;
            for (k, snap) in outcome.snapshots.iter().enumerate() {
                let path = dir.join(format!("teacher_{}_v{k}.policy", params.modality));
                agents::save_policy(snap, &path)?;
                let sim = evaluate_teacher_policy(snap, params, eval_episodes, seed ^ 0xeaa1)?;
                println!(
                    "snapshot v{k}: {} generator steps, tracking similarity {:.3}, holdout D accuracy {:.2}",
                    outcome.milestones[k].generator_steps,
                    sim,
                    discriminator_holdout_accuracy(&outcome.discriminator, &holdout),
                );
            }
            let (best, _) = select_teacher(&outcome.snapshots, params, eval_episodes, seed ^ 0xbe57)?;
            println!(
                "selected snapshot v{best} -> {}",
                dir.join(format!("teacher_{}_v{best}.policy", params.modality))
                    .display()
            );
            Ok(())
        }
        Command::EvalPair { target, produced } => {
            let a = Trajectory::read_file(&target, Role::Target)?;
            let b = Trajectory::read_file(&produced, Role::Learner)?;
            let score = eval::similarity(&a, &b)?;
            if score.degenerate {
                println!("similarity: 0.000000 (degenerate produced trajectory)");
            } else {
                println!("similarity: {:.6}", score.value);
            }
            Ok(())
        }
        Command::GenLetters { out } => {
            let dir = out_dir(out).join("letters");
            letters::write_letter_dataset(&dir)?;
            println!("wrote 26 letters + manifest to {}", dir.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
