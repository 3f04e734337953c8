//! Desk-scale adversarial imitation: learn a teacher policy from expert
//! trajectory recordings.
//!
//! A generator policy rolls episodes as the teacher in the connected
//! environment (a heuristic learner attached), a discriminator learns to
//! tell expert (observation, action) pairs from generated ones, and the
//! generator trains on the surrogate reward `-ln(1 - D)`. Ten policy
//! snapshots are captured at evenly spaced milestones.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::agents::{
    heuristic_learner_action, scripted_teacher_action, A2cHyper, A2cLearner, GaussianPolicy,
    Observation, Rollout, FEATURE_DIM,
};
use crate::env::{EnvParams, TrackingEnv};
use crate::eval::similarity;
use crate::geom::Point2;
use crate::nn::{clip_grad_norm, Adam, Mlp};
use crate::trajectory::{resample, Episode, Role, Trajectory, FC_EPISODE_LEN};
use crate::{Error, Result};

/// One expert episode: 250 teacher-view (observation, action) pairs plus
/// the underlying trajectories.
#[derive(Debug, Clone)]
pub struct ExpertEpisode {
    pub alpha: f64,
    pub seed: u64,
    pub features: Vec<[f64; FEATURE_DIM]>,
    pub actions: Vec<Point2>,
    pub teacher_trajectory: Trajectory,
    pub target: Trajectory,
}

/// Expert demonstrations used to train a teacher.
#[derive(Debug, Clone, Default)]
pub struct ExpertDataset {
    pub episodes: Vec<ExpertEpisode>,
}

impl ExpertDataset {
    pub fn transition_count(&self) -> usize {
        self.episodes.iter().map(|e| e.features.len()).sum()
    }

    /// Flattened (features, action) view over all episodes.
    pub fn pairs(&self) -> Vec<([f64; FEATURE_DIM], Point2)> {
        self.episodes
            .iter()
            .flat_map(|e| e.features.iter().copied().zip(e.actions.iter().copied()))
            .collect()
    }
}

/// Default pursuit gain of the scripted expert teacher.
pub const EXPERT_GAIN: f64 = 0.8;
/// Step-size cap shared by the scripted expert and generator policies.
pub const EXPERT_MAX_STEP: f64 = 2.0;

/// The recording configuration for synthetic expert sessions: symmetric
/// soft coupling and a clean-sighted heuristic partner, under which the
/// scripted teacher reliably traces its target at similarity 0.95 or
/// better. Stiffer teacher-side couplings let the partner's jitter bleed
/// into the demonstration.
pub fn expert_env_params() -> EnvParams {
    EnvParams {
        modality: crate::env::StiffnessModality::Ll,
        connected: true,
        noise: crate::env::NoiseSpec::None,
        ..EnvParams::default()
    }
}

/// Roll one full episode with an arbitrary teacher controller in the given
/// environment (heuristic learner attached), recording the teacher's view.
/// Exactly one (observation, action) pair is recorded per target point; the
/// final pair's action is computed but not applied.
fn roll_teacher_episode(
    episode: Episode,
    params: EnvParams,
    env_seed: u64,
    learner_seed: u64,
    mut teacher_action: impl FnMut(&Observation) -> Point2,
) -> Result<(Vec<[f64; FEATURE_DIM]>, Vec<Point2>, Trajectory, Trajectory)> {
    let target = episode.target.clone();
    let len = episode.len();
    let mut env = TrackingEnv::new(episode, params, env_seed)?;
    let mut learner_rng = ChaCha8Rng::seed_from_u64(learner_seed);
    let mut features = Vec::with_capacity(len);
    let mut actions = Vec::with_capacity(len);
    let mut teacher_points = Vec::with_capacity(len);
    loop {
        teacher_points.push(env.state().teacher);
        let teacher_obs = env.teacher_observation();
        let a_teacher = teacher_action(&teacher_obs);
        features.push(teacher_obs.features());
        actions.push(a_teacher);
        if env.is_done() {
            break;
        }
        let learner_obs = env.learner_observation(true);
        let a_learner = heuristic_learner_action(&learner_obs, &mut learner_rng);
        env.step(a_learner, a_teacher)?;
    }
    let teacher_trajectory = Trajectory::new(teacher_points, Role::Teacher)?;
    Ok((features, actions, teacher_trajectory, target))
}

/// Generate synthetic expert demonstrations: the scripted teacher tracking
/// fresh follow-the-cursor episodes in the connected environment, one
/// distinct phase offset per episode.
pub fn generate_expert_dataset(
    n_episodes: usize,
    seed: u64,
    params: EnvParams,
) -> Result<ExpertDataset> {
    if n_episodes == 0 {
        return Err(Error::InvalidArgument(
            "expert dataset needs at least one episode".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut episodes = Vec::with_capacity(n_episodes);
    for _ in 0..n_episodes {
        let alpha = rng.gen_range(0.0..10.0);
        let env_seed = rng.gen();
        let learner_seed = rng.gen();
        let (features, actions, teacher_trajectory, target) = roll_teacher_episode(
            Episode::fc(alpha),
            params,
            env_seed,
            learner_seed,
            |obs| scripted_teacher_action(obs, EXPERT_GAIN, EXPERT_MAX_STEP),
        )?;
        episodes.push(ExpertEpisode {
            alpha,
            seed: env_seed ^ learner_seed.rotate_left(17),
            features,
            actions,
            teacher_trajectory,
            target,
        });
    }
    Ok(ExpertDataset { episodes })
}

/// Write a dataset as one teacher trajectory file per episode plus a
/// manifest carrying each episode's target file.
pub fn save_expert_dataset(dataset: &ExpertDataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut manifest = String::new();
    for (i, ep) in dataset.episodes.iter().enumerate() {
        let teacher_file = format!("episode_{i:03}_teacher.csv");
        let target_file = format!("episode_{i:03}_target.csv");
        let learner_file = format!("episode_{i:03}_learner.csv");
        ep.teacher_trajectory.write_file(&dir.join(&teacher_file))?;
        ep.target.write_file(&dir.join(&target_file))?;
        // The learner path is reconstructible from the teacher view
        // features (partner offset), stored for external-tool parity.
        let learner_points: Vec<Point2> = ep
            .features
            .iter()
            .zip(ep.teacher_trajectory.points())
            .map(|(f, teacher)| {
                *teacher + Point2::new(f[2], f[3]) * 30.0
            })
            .collect();
        Trajectory::new(learner_points, Role::Learner)?.write_file(&dir.join(&learner_file))?;
        manifest.push_str(&format!(
            "episode_{i:03},target={target_file},teacher={teacher_file},learner={learner_file}\n"
        ));
    }
    let path = dir.join("manifest.txt");
    let mut f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    f.write_all(manifest.as_bytes())
        .map_err(|e| Error::io(&path, e))
}

/// Load expert demonstrations from trajectory files (target, teacher and
/// learner per episode). Episodes are resampled to the standard length and
/// actions recovered from successive teacher positions by inverting the
/// location update, so recordings from outside this crate can be dropped
/// in.
pub fn load_expert_dataset(dir: &Path, params: EnvParams) -> Result<ExpertDataset> {
    let manifest_path = dir.join("manifest.txt");
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let mut episodes = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            path: manifest_path.clone(),
            line: idx + 1,
            msg,
        };
        let mut target = None;
        let mut teacher = None;
        let mut learner = None;
        for field in line.split(',').skip(1) {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| parse_err(format!("bad field '{field}'")))?;
            let t = dir.join(value.trim());
            match key.trim() {
                "target" => target = Some(Trajectory::read_file(&t, Role::Target)?),
                "teacher" => teacher = Some(Trajectory::read_file(&t, Role::Expert)?),
                "learner" => learner = Some(Trajectory::read_file(&t, Role::Learner)?),
                other => return Err(parse_err(format!("unknown field '{other}'"))),
            }
        }
        let (target, teacher, learner) = match (target, teacher, learner) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(parse_err("episode needs target, teacher and learner".into())),
        };
        episodes.push(expert_episode_from_trajectories(
            target, teacher, learner, params,
        )?);
    }
    if episodes.is_empty() {
        return Err(Error::IncompleteData("expert manifest is empty".into()));
    }
    Ok(ExpertDataset { episodes })
}

fn expert_episode_from_trajectories(
    target: Trajectory,
    teacher: Trajectory,
    learner: Trajectory,
    params: EnvParams,
) -> Result<ExpertEpisode> {
    let fit = |t: Trajectory| -> crate::Result<Trajectory> {
        if t.len() == FC_EPISODE_LEN {
            Ok(t)
        } else {
            resample(&t, FC_EPISODE_LEN)
        }
    };
    let target = fit(target)?;
    let teacher = fit(teacher)?;
    let learner = fit(learner)?;
    let mut features = Vec::with_capacity(FC_EPISODE_LEN);
    let mut actions = Vec::with_capacity(FC_EPISODE_LEN);
    for i in 0..FC_EPISODE_LEN {
        // Same convention as live teacher observations: the target is read
        // one step ahead.
        let aim = (i + 1).min(FC_EPISODE_LEN - 1);
        let obs = Observation {
            target: target.points()[aim],
            own: teacher.points()[i],
            partner: Some(learner.points()[i]),
            step_fraction: i as f64 / (FC_EPISODE_LEN - 1) as f64,
        };
        features.push(obs.features());
        // Invert the teacher update: its action is the position delta minus
        // the mitigated coupling force it was subject to.
        let action = if i + 1 < FC_EPISODE_LEN {
            let (_, f_teacher) = crate::env::coupling_forces(
                learner.points()[i],
                teacher.points()[i],
                params.modality,
                params.stiffness_scale,
            );
            let force = if params.connected {
                f_teacher * params.mitigation
            } else {
                Point2::ZERO
            };
            teacher.points()[i + 1] - teacher.points()[i] - force
        } else {
            *actions.last().expect("episode has more than one step")
        };
        actions.push(action);
    }
    Ok(ExpertEpisode {
        alpha: f64::NAN,
        seed: 0,
        features,
        actions,
        teacher_trajectory: teacher,
        target,
    })
}

/// A binary classifier over (observation, action) pairs with a sigmoid
/// head; outputs are clamped away from 0 and 1 so the surrogate reward
/// stays finite.
#[derive(Debug, Clone)]
pub struct Discriminator {
    net: Mlp,
}

const DISC_CLAMP: f64 = 1e-6;

impl Discriminator {
    pub fn new(hidden: usize, rng: &mut impl Rng) -> Self {
        Discriminator {
            net: Mlp::new(&[FEATURE_DIM + 2, hidden, 1], rng),
        }
    }

    pub fn net(&self) -> &Mlp {
        &self.net
    }

    pub fn net_mut(&mut self) -> &mut Mlp {
        &mut self.net
    }

    fn input(features: &[f64; FEATURE_DIM], action: Point2) -> [f64; FEATURE_DIM + 2] {
        let mut x = [0.0; FEATURE_DIM + 2];
        x[..FEATURE_DIM].copy_from_slice(features);
        x[FEATURE_DIM] = action.x / EXPERT_MAX_STEP;
        x[FEATURE_DIM + 1] = action.y / EXPERT_MAX_STEP;
        x
    }

    /// Probability the pair came from the expert.
    pub fn prob(&self, features: &[f64; FEATURE_DIM], action: Point2) -> f64 {
        let raw = self.net.forward(&Self::input(features, action))[0];
        sigmoid(raw).clamp(DISC_CLAMP, 1.0 - DISC_CLAMP)
    }

    /// Surrogate reward for the generator.
    pub fn surrogate_reward(&self, features: &[f64; FEATURE_DIM], action: Point2) -> f64 {
        -(1.0 - self.prob(features, action)).ln()
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Binary cross-entropy of the discriminator on labeled batches (expert 1,
/// generator 0).
pub fn discriminator_loss(
    d: &Discriminator,
    expert_batch: &[([f64; FEATURE_DIM], Point2)],
    gen_batch: &[([f64; FEATURE_DIM], Point2)],
) -> f64 {
    let e: f64 = expert_batch
        .iter()
        .map(|(f, a)| -d.prob(f, *a).ln())
        .sum::<f64>()
        / expert_batch.len() as f64;
    let g: f64 = gen_batch
        .iter()
        .map(|(f, a)| -(1.0 - d.prob(f, *a)).ln())
        .sum::<f64>()
        / gen_batch.len() as f64;
    e + g
}

/// Analytic gradient of [`discriminator_loss`] with respect to the
/// discriminator parameters.
pub fn discriminator_grad(
    d: &Discriminator,
    expert_batch: &[([f64; FEATURE_DIM], Point2)],
    gen_batch: &[([f64; FEATURE_DIM], Point2)],
) -> Vec<f64> {
    let mut grads = vec![0.0; d.net.params().len()];
    for (f, a) in expert_batch {
        let cache = d.net.forward_cached(&Discriminator::input(f, *a));
        let p = sigmoid(cache.output()[0]);
        // d(-ln p)/d raw = p - 1
        d.net
            .backward(&cache, &[(p - 1.0) / expert_batch.len() as f64], &mut grads);
    }
    for (f, a) in gen_batch {
        let cache = d.net.forward_cached(&Discriminator::input(f, *a));
        let p = sigmoid(cache.output()[0]);
        // d(-ln(1-p))/d raw = p
        d.net
            .backward(&cache, &[p / gen_batch.len() as f64], &mut grads);
    }
    grads
}

/// Classification statistics from one discriminator update.
#[derive(Debug, Clone, Copy)]
pub struct DiscStats {
    pub expert_accuracy: f64,
    pub generator_accuracy: f64,
    pub loss: f64,
}

/// One gradient step on the discriminator.
pub fn discriminator_update(
    d: &mut Discriminator,
    expert_batch: &[([f64; FEATURE_DIM], Point2)],
    gen_batch: &[([f64; FEATURE_DIM], Point2)],
    adam: &mut Adam,
    grad_clip: f64,
) -> Result<DiscStats> {
    if expert_batch.is_empty() || gen_batch.is_empty() {
        return Err(Error::InvalidArgument(
            "discriminator update needs non-empty batches".into(),
        ));
    }
    let loss = discriminator_loss(d, expert_batch, gen_batch);
    if !loss.is_finite() {
        return Err(Error::NanGradient { step: 0 });
    }
    let mut grads = discriminator_grad(d, expert_batch, gen_batch);
    if grads.iter().any(|g| !g.is_finite()) {
        return Err(Error::NanGradient { step: 0 });
    }
    clip_grad_norm(&mut grads, grad_clip);
    adam.step(d.net.params_mut(), &grads);

    let expert_accuracy = expert_batch
        .iter()
        .filter(|(f, a)| d.prob(f, *a) > 0.5)
        .count() as f64
        / expert_batch.len() as f64;
    let generator_accuracy = gen_batch
        .iter()
        .filter(|(f, a)| d.prob(f, *a) < 0.5)
        .count() as f64
        / gen_batch.len() as f64;
    Ok(DiscStats {
        expert_accuracy,
        generator_accuracy,
        loss,
    })
}

/// Fraction of a dataset's pairs the discriminator still classifies as
/// expert.
pub fn discriminator_holdout_accuracy(d: &Discriminator, holdout: &ExpertDataset) -> f64 {
    let pairs = holdout.pairs();
    if pairs.is_empty() {
        return 0.0;
    }
    pairs.iter().filter(|(f, a)| d.prob(f, *a) > 0.5).count() as f64 / pairs.len() as f64
}

/// Hyperparameters of the adversarial training loop.
#[derive(Debug, Clone, Copy)]
pub struct GailHyper {
    /// Environment steps taken by the generator across training.
    pub total_generator_steps: usize,
    pub snapshot_count: usize,
    pub lr_generator: f64,
    pub lr_discriminator: f64,
    pub disc_updates_per_episode: usize,
    pub disc_batch_size: usize,
    pub disc_hidden: usize,
    pub gamma: f64,
    pub entropy_coef: f64,
    pub grad_clip: f64,
    pub n_step: usize,
    pub hidden: usize,
}

impl Default for GailHyper {
    fn default() -> Self {
        GailHyper {
            total_generator_steps: 2000,
            snapshot_count: 10,
            lr_generator: 1e-3,
            lr_discriminator: 1e-3,
            disc_updates_per_episode: 16,
            disc_batch_size: 128,
            disc_hidden: 32,
            gamma: 0.99,
            entropy_coef: 1e-3,
            grad_clip: 5.0,
            n_step: 25,
            hidden: 32,
        }
    }
}

/// Progress record per snapshot milestone.
#[derive(Debug, Clone, Copy)]
pub struct GailMilestone {
    pub generator_steps: usize,
    pub disc_expert_accuracy: f64,
    pub disc_generator_accuracy: f64,
}

/// Outcome of a training run: the snapshot versions plus per-milestone
/// diagnostics.
#[derive(Debug, Clone)]
pub struct GailOutcome {
    pub snapshots: Vec<GaussianPolicy>,
    pub milestones: Vec<GailMilestone>,
    pub discriminator: Discriminator,
}

/// Train a teacher by adversarial imitation of `expert`. Snapshots are
/// captured at `snapshot_count` evenly spaced milestones, the first at
/// initialization and the last at the end of training.
pub fn gail_train(
    params: EnvParams,
    expert: &ExpertDataset,
    hyper: GailHyper,
    seed: u64,
) -> Result<GailOutcome> {
    if expert.episodes.is_empty() {
        return Err(Error::InvalidArgument("expert dataset is empty".into()));
    }
    if hyper.snapshot_count < 1 {
        return Err(Error::InvalidArgument("need at least one snapshot".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gen_hyper = A2cHyper {
        gamma: hyper.gamma,
        lr_actor: hyper.lr_generator,
        lr_critic: hyper.lr_generator,
        entropy_coef: hyper.entropy_coef,
        grad_clip: hyper.grad_clip,
        n_step: hyper.n_step,
        hidden: hyper.hidden,
        max_action: EXPERT_MAX_STEP,
        ..A2cHyper::default()
    };
    let mut generator = A2cLearner::new(gen_hyper, rng.gen());
    let mut discriminator = Discriminator::new(hyper.disc_hidden, &mut rng);
    let mut disc_adam = Adam::new(hyper.lr_discriminator, discriminator.net.params().len());
    let expert_pairs = expert.pairs();

    let mut snapshots = Vec::with_capacity(hyper.snapshot_count);
    let mut milestones = Vec::with_capacity(hyper.snapshot_count);
    let mut last_disc = DiscStats {
        expert_accuracy: 0.5,
        generator_accuracy: 0.5,
        loss: f64::NAN,
    };
    let milestone_step = |k: usize| {
        if hyper.snapshot_count == 1 {
            hyper.total_generator_steps
        } else {
            hyper.total_generator_steps * k / (hyper.snapshot_count - 1)
        }
    };

    let mut steps_done = 0usize;
    // Milestone 0 is the initialization itself.
    snapshots.push(generator.actor.clone());
    milestones.push(GailMilestone {
        generator_steps: 0,
        disc_expert_accuracy: last_disc.expert_accuracy,
        disc_generator_accuracy: last_disc.generator_accuracy,
    });

    while steps_done < hyper.total_generator_steps {
        // Generator rollout: one connected episode against the heuristic
        // learner, actions sampled for exploration.
        let alpha = rng.gen_range(0.0..10.0);
        let episode = Episode::fc(alpha);
        let len = episode.len();
        let mut env = TrackingEnv::new(episode, params, rng.gen())?;
        let mut learner_rng = ChaCha8Rng::seed_from_u64(rng.gen());
        let mut gen_pairs: Vec<([f64; FEATURE_DIM], Point2)> = Vec::with_capacity(len);
        let mut action_norm_sum = 0.0;
        while !env.is_done() && steps_done < hyper.total_generator_steps {
            let teacher_obs = env.teacher_observation();
            let f = teacher_obs.features();
            let a_teacher = generator.act_stochastic(&f);
            action_norm_sum += a_teacher.norm();
            gen_pairs.push((f, a_teacher));
            let learner_obs = env.learner_observation(true);
            let a_learner = heuristic_learner_action(&learner_obs, &mut learner_rng);
            env.step(a_learner, a_teacher)?;
            steps_done += 1;
        }
        if gen_pairs.is_empty() {
            break;
        }
        if action_norm_sum / gen_pairs.len() as f64 > params.board.half_extent {
            return Err(Error::Diverged {
                milestone: snapshots.len(),
                msg: format!(
                    "mean generator action norm {:.1} exceeds the board extent",
                    action_norm_sum / gen_pairs.len() as f64
                ),
            });
        }

        // Discriminator: minibatch updates against the fresh rollout.
        for _ in 0..hyper.disc_updates_per_episode {
            let eb = sample_batch(&expert_pairs, hyper.disc_batch_size, &mut rng);
            let gb = sample_batch(&gen_pairs, hyper.disc_batch_size, &mut rng);
            last_disc = discriminator_update(
                &mut discriminator,
                &eb,
                &gb,
                &mut disc_adam,
                hyper.grad_clip,
            )?;
        }

        // Generator: n-step policy-gradient updates on the surrogate reward.
        let mut rollout = Rollout::default();
        for (i, (f, a)) in gen_pairs.iter().enumerate() {
            rollout.push(*f, *a, discriminator.surrogate_reward(f, *a));
            let at_chunk_end = rollout.len() == hyper.n_step || i + 1 == gen_pairs.len();
            if at_chunk_end {
                rollout.bootstrap = if i + 1 < gen_pairs.len() {
                    generator.value(&gen_pairs[i + 1].0)
                } else {
                    0.0
                };
                generator.update(&rollout)?;
                rollout.clear();
            }
        }

        // Capture any milestones crossed by this episode.
        while snapshots.len() < hyper.snapshot_count
            && steps_done >= milestone_step(snapshots.len())
        {
            snapshots.push(generator.actor.clone());
            milestones.push(GailMilestone {
                generator_steps: steps_done,
                disc_expert_accuracy: last_disc.expert_accuracy,
                disc_generator_accuracy: last_disc.generator_accuracy,
            });
        }
    }
    while snapshots.len() < hyper.snapshot_count {
        snapshots.push(generator.actor.clone());
        milestones.push(GailMilestone {
            generator_steps: steps_done,
            disc_expert_accuracy: last_disc.expert_accuracy,
            disc_generator_accuracy: last_disc.generator_accuracy,
        });
    }
    Ok(GailOutcome {
        snapshots,
        milestones,
        discriminator,
    })
}

fn sample_batch<T: Copy>(pool: &[T], size: usize, rng: &mut impl Rng) -> Vec<T> {
    (0..size.min(pool.len()))
        .map(|_| pool[rng.gen_range(0..pool.len())])
        .collect()
}

/// Mean tracking similarity of a teacher policy over fresh connected
/// episodes (the conditions it trains under).
pub fn evaluate_teacher_policy(
    policy: &GaussianPolicy,
    params: EnvParams,
    eval_episodes: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..eval_episodes {
        let alpha = rng.gen_range(0.0..10.0);
        let (_, _, teacher_traj, target) = roll_teacher_episode(
            Episode::fc(alpha),
            params,
            rng.gen(),
            rng.gen(),
            |obs| policy.mean_action(&obs.features()),
        )?;
        total += similarity(&target, &teacher_traj)?.value;
    }
    Ok(total / eval_episodes as f64)
}

/// Pick the snapshot with the highest mean evaluation similarity; ties go
/// to the earliest version.
pub fn select_teacher(
    snapshots: &[GaussianPolicy],
    params: EnvParams,
    eval_episodes: usize,
    seed: u64,
) -> Result<(usize, GaussianPolicy)> {
    if snapshots.is_empty() {
        return Err(Error::InvalidArgument("no snapshots to select from".into()));
    }
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, snap) in snapshots.iter().enumerate() {
        // The same seed for every snapshot keeps the comparison paired.
        let score = evaluate_teacher_policy(snap, params, eval_episodes, seed)?;
        if score > best.1 {
            best = (i, score);
        }
    }
    Ok((best.0, snapshots[best.0].clone()))
}
