//! Acting entities: observations, the heuristic learner used while training
//! teachers, the adaptive actor-critic learner used for evaluation, and
//! teacher policies (scripted baseline plus loadable snapshots).

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::env::EnvState;
use crate::geom::Point2;
use crate::nn::{clip_grad_norm, standard_normal, Adam, Mlp};
use crate::{Error, Result};

/// Length of the feature vector fed to policies and the discriminator.
pub const FEATURE_DIM: usize = 5;

// Positions are divided by the board half-extent before entering a network.
const FEATURE_SCALE: f64 = 30.0;

/// What an agent sees at one step.
///
/// The learner's `target` is the obscured target whenever noise is active;
/// the teacher's is the true one. `partner` is `None` for a learner
/// practicing alone.
#[derive(Debug, Clone, Copy)]
pub struct Observation {
    pub target: Point2,
    pub own: Point2,
    pub partner: Option<Point2>,
    pub step_fraction: f64,
}

impl Observation {
    pub fn learner_view(state: &EnvState, episode_len: usize, teacher_present: bool) -> Self {
        Observation {
            target: state.obscured_target,
            own: state.learner,
            partner: teacher_present.then_some(state.teacher),
            step_fraction: step_fraction(state.step, episode_len),
        }
    }

    /// Teacher view of a bare state (current target, no lookahead). The
    /// environment's `teacher_observation` is the usual entry point; it
    /// reads the target one step ahead.
    pub fn teacher_view(state: &EnvState, episode_len: usize) -> Self {
        Observation {
            target: state.target,
            own: state.teacher,
            partner: Some(state.learner),
            step_fraction: step_fraction(state.step, episode_len),
        }
    }

    /// Relative, board-normalized network inputs. An absent partner looks
    /// like a partner at the agent's own position.
    pub fn features(&self) -> [f64; FEATURE_DIM] {
        let to_target = self.target - self.own;
        let to_partner = self.partner.map_or(Point2::ZERO, |p| p - self.own);
        [
            to_target.x / FEATURE_SCALE,
            to_target.y / FEATURE_SCALE,
            to_partner.x / FEATURE_SCALE,
            to_partner.y / FEATURE_SCALE,
            self.step_fraction,
        ]
    }
}

pub(crate) fn step_fraction(step: usize, episode_len: usize) -> f64 {
    if episode_len <= 1 {
        0.0
    } else {
        step as f64 / (episode_len - 1) as f64
    }
}

/// The fixed learner used while a teacher is being trained: a unit step
/// toward the (noisy) target with a random force of 1 or 2. Returns zero
/// when already exactly on the target.
pub fn heuristic_learner_action(obs: &Observation, rng: &mut impl Rng) -> Point2 {
    let to_target = obs.target - obs.own;
    if to_target.norm() == 0.0 {
        return Point2::ZERO;
    }
    let force = rng.gen_range(1..=2) as f64;
    to_target.unit() * force
}

/// Constants of the learner reward.
#[derive(Debug, Clone, Copy)]
pub struct RewardParams {
    /// Weight of the counter-applied force in the cost.
    pub delta: f64,
    /// Bonus granted when the learner is close enough to the noised target.
    pub booster: f64,
    pub proximity_threshold: f64,
    /// Cap on the 1/d term, which is otherwise unbounded at d = 0.
    pub reward_cap: f64,
}

impl Default for RewardParams {
    fn default() -> Self {
        RewardParams {
            delta: 50.0,
            booster: 15.0,
            proximity_threshold: 2.5,
            reward_cap: 100.0,
        }
    }
}

/// Per-step learner reward: `1/d` with `d` combining distance to the noised
/// target and the magnitude of the counter-applied force, plus the proximity
/// booster.
pub fn learner_reward(state: &EnvState, params: &RewardParams) -> f64 {
    let dist = (state.obscured_target - state.learner).norm();
    let d = dist + params.delta * state.force_learner.norm();
    let base = if d == 0.0 {
        params.reward_cap
    } else {
        (1.0 / d).min(params.reward_cap)
    };
    let boost = if dist <= params.proximity_threshold {
        params.booster
    } else {
        0.0
    };
    base + boost
}

/// Proportional pursuit of the true target with a step-size cap. Serves as
/// the verifiable teacher baseline and as the synthetic expert.
pub fn scripted_teacher_action(obs: &Observation, gain: f64, max_step: f64) -> Point2 {
    ((obs.target - obs.own) * gain).clip_norm(max_step)
}

// Exploration noise bounds; a runaway standard deviation turns the policy
// into a wall-hugging random walk.
const LOG_STD_MIN: f64 = -3.0;
const LOG_STD_MAX: f64 = 0.25;

/// A 2D Gaussian policy: network mean squashed by tanh and scaled to
/// `max_action`, with a state-independent learned log standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPolicy {
    net: Mlp,
    log_std: [f64; 2],
    max_action: f64,
}

impl GaussianPolicy {
    pub fn new(hidden: usize, max_action: f64, rng: &mut impl Rng) -> Self {
        let mut net = Mlp::new(&[FEATURE_DIM, hidden, 2], rng);
        // Zero the output layer: the initial mean is exactly zero
        // everywhere, so early exploration is unbiased and the tanh head
        // starts at its maximum-gradient point.
        let tail = hidden * 2 + 2;
        let n = net.params().len();
        for p in net.params_mut()[n - tail..].iter_mut() {
            *p = 0.0;
        }
        GaussianPolicy {
            net,
            log_std: [(1.0f64).ln(); 2],
            max_action,
        }
    }

    pub fn max_action(&self) -> f64 {
        self.max_action
    }

    pub fn net(&self) -> &Mlp {
        &self.net
    }

    /// Deterministic mean action (used at evaluation time).
    pub fn mean_action(&self, features: &[f64]) -> Point2 {
        let raw = self.net.forward(features);
        Point2::new(
            raw[0].tanh() * self.max_action,
            raw[1].tanh() * self.max_action,
        )
    }

    /// Sample an action around the mean.
    pub fn sample_action(&self, features: &[f64], rng: &mut impl Rng) -> Point2 {
        let mean = self.mean_action(features);
        Point2::new(
            mean.x + self.log_std[0].exp() * standard_normal(rng),
            mean.y + self.log_std[1].exp() * standard_normal(rng),
        )
    }

    /// Gaussian entropy, which depends only on the log standard deviations.
    pub fn entropy(&self) -> f64 {
        let half_ln_2pi_e = 0.5 * (std::f64::consts::TAU * std::f64::consts::E).ln();
        self.log_std.iter().map(|ls| ls + half_ln_2pi_e).sum()
    }

    pub fn log_prob(&self, features: &[f64], action: Point2) -> f64 {
        let mean = self.mean_action(features);
        let a = [action.x, action.y];
        let m = [mean.x, mean.y];
        let mut lp = 0.0;
        for i in 0..2 {
            let sigma = self.log_std[i].exp();
            let z = (a[i] - m[i]) / sigma;
            lp += -0.5 * z * z - self.log_std[i] - 0.5 * std::f64::consts::TAU.ln();
        }
        lp
    }

    /// Total parameter count (network plus the two log-std entries).
    pub fn param_count(&self) -> usize {
        self.net.params().len() + 2
    }

    /// Flat parameter vector: network parameters, then log-stds.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut p = self.net.params().to_vec();
        p.extend_from_slice(&self.log_std);
        p
    }

    pub fn set_flat_params(&mut self, params: &[f64]) {
        let n = self.net.params().len();
        assert_eq!(params.len(), n + 2);
        self.net.params_mut().copy_from_slice(&params[..n]);
        self.log_std = [params[n], params[n + 1]];
    }

    pub fn log_std_values(&self) -> [f64; 2] {
        self.log_std
    }

    pub fn clamp_log_std(&mut self, min: f64, max: f64) {
        for ls in self.log_std.iter_mut() {
            *ls = ls.clamp(min, max);
        }
    }
}

/// Deterministic action of a teacher snapshot for an observation.
pub fn teacher_policy_act(policy: &GaussianPolicy, obs: &Observation) -> Point2 {
    policy.mean_action(&obs.features())
}

/// A teacher an experiment can attach to the learner.
#[derive(Debug, Clone)]
pub enum Teacher {
    Scripted { gain: f64, max_step: f64 },
    Policy(GaussianPolicy),
}

impl Teacher {
    pub fn scripted_default() -> Self {
        Teacher::Scripted {
            gain: 0.8,
            max_step: 2.0,
        }
    }

    pub fn act(&self, obs: &Observation) -> Point2 {
        match self {
            Teacher::Scripted { gain, max_step } => scripted_teacher_action(obs, *gain, *max_step),
            Teacher::Policy(policy) => teacher_policy_act(policy, obs),
        }
    }
}

/// Policy-gradient loss for a rollout with fixed (stop-gradient) advantages:
/// `-mean(A_t * log pi(a_t | s_t)) - entropy_coef * H(pi)
///  + raw_reg * mean(|raw|^2)`.
///
/// The last term keeps the pre-tanh outputs bounded; without it the mean
/// random-walks into tanh saturation on reward plateaus and the policy
/// gradient dies there.
pub fn actor_loss(
    policy: &GaussianPolicy,
    features: &[[f64; FEATURE_DIM]],
    actions: &[Point2],
    advantages: &[f64],
    entropy_coef: f64,
    raw_reg: f64,
) -> f64 {
    let n = features.len() as f64;
    let mut loss = 0.0;
    for ((f, a), adv) in features.iter().zip(actions).zip(advantages) {
        loss -= adv * policy.log_prob(f, *a);
        let raw = policy.net.forward(f);
        loss += raw_reg * (raw[0] * raw[0] + raw[1] * raw[1]);
    }
    loss / n - entropy_coef * policy.entropy()
}

/// Analytic gradient of [`actor_loss`] with respect to the policy's flat
/// parameters (network parameters, then log-stds).
pub fn actor_grad(
    policy: &GaussianPolicy,
    features: &[[f64; FEATURE_DIM]],
    actions: &[Point2],
    advantages: &[f64],
    entropy_coef: f64,
    raw_reg: f64,
) -> Vec<f64> {
    let n = features.len() as f64;
    let mut net_grads = vec![0.0; policy.net.params().len()];
    let mut log_std_grads = [0.0f64; 2];
    for ((f, action), adv) in features.iter().zip(actions).zip(advantages) {
        let cache = policy.net.forward_cached(f);
        let raw = cache.output();
        let a = [action.x, action.y];
        let mut d_raw = [0.0f64; 2];
        for i in 0..2 {
            let tanh = raw[i].tanh();
            let mean = tanh * policy.max_action;
            let sigma = policy.log_std[i].exp();
            let z = (a[i] - mean) / sigma;
            // d(-A logp)/d mean = -A * (a - mean) / sigma^2
            let d_mean = -adv * z / sigma / n;
            d_raw[i] = d_mean * policy.max_action * (1.0 - tanh * tanh);
            d_raw[i] += 2.0 * raw_reg * raw[i] / n;
            // d(-A logp)/d log_std = -A * (z^2 - 1)
            log_std_grads[i] += -adv * (z * z - 1.0) / n;
        }
        policy.net.backward(&cache, &d_raw, &mut net_grads);
    }
    // d(-entropy_coef * H)/d log_std_i = -entropy_coef
    for g in log_std_grads.iter_mut() {
        *g -= entropy_coef;
    }
    let mut out = net_grads;
    out.extend_from_slice(&log_std_grads);
    out
}

/// Half mean squared error of the critic against target returns.
pub fn critic_loss(critic: &Mlp, features: &[[f64; FEATURE_DIM]], returns: &[f64]) -> f64 {
    let n = features.len() as f64;
    features
        .iter()
        .zip(returns)
        .map(|(f, g)| {
            let v = critic.forward(f)[0];
            0.5 * (v - g) * (v - g)
        })
        .sum::<f64>()
        / n
}

/// Analytic gradient of [`critic_loss`].
pub fn critic_grad(critic: &Mlp, features: &[[f64; FEATURE_DIM]], returns: &[f64]) -> Vec<f64> {
    let n = features.len() as f64;
    let mut grads = vec![0.0; critic.params().len()];
    for (f, g) in features.iter().zip(returns) {
        let cache = critic.forward_cached(f);
        let v = cache.output()[0];
        critic.backward(&cache, &[(v - g) / n], &mut grads);
    }
    grads
}

/// Hyperparameters of the actor-critic learner.
#[derive(Debug, Clone, Copy)]
pub struct A2cHyper {
    pub gamma: f64,
    pub lr_actor: f64,
    pub lr_critic: f64,
    pub entropy_coef: f64,
    /// Weight of the pre-tanh magnitude regularizer.
    pub raw_reg: f64,
    pub grad_clip: f64,
    /// Transitions accumulated between updates.
    pub n_step: usize,
    pub hidden: usize,
    pub max_action: f64,
}

impl Default for A2cHyper {
    fn default() -> Self {
        A2cHyper {
            gamma: 0.8,
            lr_actor: 1e-2,
            lr_critic: 1e-2,
            entropy_coef: 3e-4,
            raw_reg: 3e-3,
            grad_clip: 5.0,
            n_step: 16,
            hidden: 32,
            max_action: 2.0,
        }
    }
}

/// A training segment: transitions plus the critic bootstrap for the state
/// following the last one (zero at an episode end).
#[derive(Debug, Clone, Default)]
pub struct Rollout {
    pub features: Vec<[f64; FEATURE_DIM]>,
    pub actions: Vec<Point2>,
    pub rewards: Vec<f64>,
    pub bootstrap: f64,
}

impl Rollout {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn clear(&mut self) {
        self.features.clear();
        self.actions.clear();
        self.rewards.clear();
        self.bootstrap = 0.0;
    }

    pub fn push(&mut self, features: [f64; FEATURE_DIM], action: Point2, reward: f64) {
        self.features.push(features);
        self.actions.push(action);
        self.rewards.push(reward);
    }

    /// Discounted n-step returns bootstrapped from `self.bootstrap`.
    pub fn returns(&self, gamma: f64) -> Vec<f64> {
        let mut g = self.bootstrap;
        let mut out = vec![0.0; self.len()];
        for t in (0..self.len()).rev() {
            g = self.rewards[t] + gamma * g;
            out[t] = g;
        }
        out
    }
}

/// The adaptive learner: Gaussian actor plus value critic, updated with
/// advantage-weighted policy gradients on n-step returns.
#[derive(Debug, Clone)]
pub struct A2cLearner {
    pub actor: GaussianPolicy,
    critic: Mlp,
    adam_actor: Adam,
    adam_critic: Adam,
    hyper: A2cHyper,
    rng: ChaCha8Rng,
    steps_seen: usize,
    adv_scale: f64,
}

impl A2cLearner {
    pub fn new(hyper: A2cHyper, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let actor = GaussianPolicy::new(hyper.hidden, hyper.max_action, &mut rng);
        let critic = Mlp::new(&[FEATURE_DIM, hyper.hidden, 1], &mut rng);
        let adam_actor = Adam::new(hyper.lr_actor, actor.param_count());
        let adam_critic = Adam::new(hyper.lr_critic, critic.params().len());
        A2cLearner {
            actor,
            critic,
            adam_actor,
            adam_critic,
            hyper,
            rng,
            steps_seen: 0,
            adv_scale: 0.0,
        }
    }

    pub fn hyper(&self) -> &A2cHyper {
        &self.hyper
    }

    pub fn critic(&self) -> &Mlp {
        &self.critic
    }

    pub fn act_stochastic(&mut self, features: &[f64]) -> Point2 {
        self.actor.sample_action(features, &mut self.rng)
    }

    pub fn act_mean(&self, features: &[f64]) -> Point2 {
        self.actor.mean_action(features)
    }

    pub fn value(&self, features: &[f64]) -> f64 {
        self.critic.forward(features)[0]
    }

    /// One synchronous update from a rollout segment. On a non-finite
    /// gradient the update is aborted and neither network changes.
    pub fn update(&mut self, rollout: &Rollout) -> Result<()> {
        if rollout.is_empty() {
            return Err(Error::InvalidArgument("empty rollout".into()));
        }
        self.steps_seen += rollout.len();
        let returns = rollout.returns(self.hyper.gamma);
        let mut advantages: Vec<f64> = rollout
            .features
            .iter()
            .zip(&returns)
            .map(|(f, g)| g - self.critic.forward(f)[0])
            .collect();
        // Rescale advantages by a slow running estimate of their
        // magnitude; the 1/d reward is heavy-tailed near the target and
        // nearly flat far from it, so raw advantages span orders of
        // magnitude. A batch-local standardization would instead blow
        // noise up to unit size in signal-free segments.
        let batch_rms = (advantages.iter().map(|a| a * a).sum::<f64>()
            / advantages.len() as f64)
            .sqrt();
        self.adv_scale = if self.adv_scale == 0.0 {
            batch_rms
        } else {
            0.99 * self.adv_scale + 0.01 * batch_rms
        };
        if self.adv_scale > 1e-8 {
            for a in advantages.iter_mut() {
                *a /= self.adv_scale;
            }
        }

        let mut a_grads = actor_grad(
            &self.actor,
            &rollout.features,
            &rollout.actions,
            &advantages,
            self.hyper.entropy_coef,
            self.hyper.raw_reg,
        );
        let mut c_grads = critic_grad(&self.critic, &rollout.features, &returns);
        if a_grads.iter().chain(&c_grads).any(|g| !g.is_finite()) {
            return Err(Error::NanGradient {
                step: self.steps_seen,
            });
        }
        clip_grad_norm(&mut a_grads, self.hyper.grad_clip);
        clip_grad_norm(&mut c_grads, self.hyper.grad_clip);

        let mut actor_params = self.actor.flat_params();
        self.adam_actor.step(&mut actor_params, &a_grads);
        self.actor.set_flat_params(&actor_params);
        self.actor.clamp_log_std(LOG_STD_MIN, LOG_STD_MAX);
        self.adam_critic.step(self.critic.params_mut(), &c_grads);
        Ok(())
    }
}

const POLICY_MAGIC: &str = "teachsim-policy v1";
const POLICY_HEAD: &str = "gaussian2";

/// Save a policy snapshot (header plus flat parameter array, 17 significant
/// digits so values round-trip bit-exactly).
pub fn save_policy(policy: &GaussianPolicy, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(POLICY_MAGIC);
    out.push('\n');
    out.push_str(&format!("head {POLICY_HEAD}\n"));
    out.push_str("sizes");
    for s in policy.net.sizes() {
        out.push_str(&format!(" {s}"));
    }
    out.push('\n');
    out.push_str(&format!("max_action {:.17e}\n", policy.max_action));
    out.push_str(&format!(
        "log_std {:.17e} {:.17e}\n",
        policy.log_std[0], policy.log_std[1]
    ));
    let params = policy.net.params();
    out.push_str(&format!("params {}\n", params.len()));
    for p in params {
        out.push_str(&format!("{p:.17e}\n"));
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Load a policy snapshot, validating header, shapes and parameter count.
pub fn load_policy(path: &Path) -> Result<GaussianPolicy> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let mismatch = |msg: &str| Error::ShapeMismatch(format!("{}: {msg}", path.display()));

    if lines.next().map(str::trim) != Some(POLICY_MAGIC) {
        return Err(mismatch("bad magic line"));
    }
    let head = lines
        .next()
        .and_then(|l| l.strip_prefix("head "))
        .ok_or_else(|| mismatch("missing head line"))?;
    if head.trim() != POLICY_HEAD {
        return Err(mismatch(&format!("unsupported head '{}'", head.trim())));
    }
    let sizes: Vec<usize> = lines
        .next()
        .and_then(|l| l.strip_prefix("sizes"))
        .ok_or_else(|| mismatch("missing sizes line"))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| mismatch("bad size")))
        .collect::<Result<_>>()?;
    if sizes.len() < 2 || sizes[0] != FEATURE_DIM || *sizes.last().expect("non-empty") != 2 {
        return Err(mismatch(&format!(
            "policy must map {FEATURE_DIM} features to 2 action components, got {sizes:?}"
        )));
    }
    let max_action: f64 = lines
        .next()
        .and_then(|l| l.strip_prefix("max_action "))
        .and_then(|t| t.trim().parse().ok())
        .ok_or_else(|| mismatch("bad max_action line"))?;
    let log_std_line = lines
        .next()
        .and_then(|l| l.strip_prefix("log_std "))
        .ok_or_else(|| mismatch("missing log_std line"))?;
    let log_std: Vec<f64> = log_std_line
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| mismatch("bad log_std value")))
        .collect::<Result<_>>()?;
    if log_std.len() != 2 {
        return Err(mismatch("log_std must have 2 entries"));
    }
    let count: usize = lines
        .next()
        .and_then(|l| l.strip_prefix("params "))
        .and_then(|t| t.trim().parse().ok())
        .ok_or_else(|| mismatch("bad params line"))?;
    if count != Mlp::param_count_for(&sizes) {
        return Err(mismatch("parameter count does not match sizes"));
    }
    let mut params = Vec::with_capacity(count);
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        params.push(
            line.parse::<f64>()
                .map_err(|_| mismatch("bad parameter value"))?,
        );
    }
    if params.len() != count {
        return Err(mismatch(&format!(
            "expected {count} parameters, found {}",
            params.len()
        )));
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(mismatch("non-finite parameter"));
    }
    let net = Mlp::from_params(&sizes, params).ok_or_else(|| mismatch("bad parameter layout"))?;
    Ok(GaussianPolicy {
        net,
        log_std: [log_std[0], log_std[1]],
        max_action,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{EnvParams, NoiseSpec, TrackingEnv};
    use crate::trajectory::Episode;
    use proptest::prelude::*;

    fn obs_at(target: (f64, f64), own: (f64, f64)) -> Observation {
        Observation {
            target: Point2::new(target.0, target.1),
            own: Point2::new(own.0, own.1),
            partner: None,
            step_fraction: 0.0,
        }
    }

    #[test]
    fn heuristic_moves_along_unit_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let obs = obs_at((3.0, 4.0), (0.0, 0.0));
        for _ in 0..20 {
            let a = heuristic_learner_action(&obs, &mut rng);
            let f = a.norm();
            assert!((f - 1.0).abs() < 1e-12 || (f - 2.0).abs() < 1e-12);
            let dir = a.unit();
            assert!((dir.x - 0.6).abs() < 1e-12 && (dir.y - 0.8).abs() < 1e-12);
        }
    }

    #[test]
    fn heuristic_zero_distance_returns_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let obs = obs_at((1.0, 1.0), (1.0, 1.0));
        assert_eq!(heuristic_learner_action(&obs, &mut rng), Point2::ZERO);
    }

    #[test]
    fn heuristic_force_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let obs = obs_at((5.0, 0.0), (0.0, 0.0));
        let n = 10_000;
        let ones = (0..n)
            .filter(|_| {
                let f = heuristic_learner_action(&obs, &mut rng).norm();
                (f - 1.0).abs() < 1e-9
            })
            .count();
        let freq = ones as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.02, "freq(f=1) = {freq}");
    }

    fn state_with(dist: f64, force: f64) -> EnvState {
        EnvState {
            step: 0,
            target: Point2::ZERO,
            obscured_target: Point2::new(dist, 0.0),
            teacher: Point2::ZERO,
            learner: Point2::ZERO,
            force_learner: Point2::new(force, 0.0),
            force_teacher: Point2::new(-force, 0.0),
        }
    }

    #[test]
    fn reward_examples() {
        // Unit proximity threshold in all three worked examples.
        let params = RewardParams {
            proximity_threshold: 1.0,
            ..RewardParams::default()
        };
        assert!((learner_reward(&state_with(2.0, 0.0), &params) - 0.5).abs() < 1e-12);
        assert!((learner_reward(&state_with(0.5, 0.0), &params) - 17.0).abs() < 1e-12);
        let r = learner_reward(&state_with(1.0, 0.1), &params);
        assert!((r - (1.0 / 6.0 + 15.0)).abs() < 1e-12, "r = {r}");
    }

    #[test]
    fn reward_capped_at_zero_distance() {
        let params = RewardParams::default();
        let r = learner_reward(&state_with(0.0, 0.0), &params);
        assert_eq!(r, params.reward_cap + params.booster);
    }

    #[test]
    fn reward_decreases_in_distance_and_force() {
        let params = RewardParams {
            proximity_threshold: 1.0,
            ..RewardParams::default()
        };
        // Away from the booster threshold.
        let mut prev = learner_reward(&state_with(1.5, 0.0), &params);
        for k in 1..20 {
            let r = learner_reward(&state_with(1.5 + k as f64 * 0.5, 0.0), &params);
            assert!(r < prev);
            prev = r;
        }
        let mut prev = learner_reward(&state_with(3.0, 0.0), &params);
        for k in 1..20 {
            let r = learner_reward(&state_with(3.0, k as f64 * 0.05), &params);
            assert!(r < prev);
            prev = r;
        }
    }

    #[test]
    fn scripted_teacher_examples() {
        let on_target = obs_at((2.0, -1.0), (2.0, -1.0));
        assert_eq!(scripted_teacher_action(&on_target, 0.5, 2.0), Point2::ZERO);
        let obs = obs_at((2.0, 0.0), (0.0, 0.0));
        let a = scripted_teacher_action(&obs, 0.5, 2.0);
        assert!((a.x - 1.0).abs() < 1e-12 && a.y == 0.0);
        let far = obs_at((100.0, 0.0), (0.0, 0.0));
        assert!((scripted_teacher_action(&far, 0.5, 2.0).norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn actor_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut policy = GaussianPolicy::new(8, 2.0, &mut rng);
        let features: Vec<[f64; FEATURE_DIM]> = (0..5)
            .map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
            .collect();
        let actions: Vec<Point2> = (0..5)
            .map(|_| Point2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let advantages: Vec<f64> = (0..5).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let coef = 1e-2;
        let raw_reg = 3e-3;

        let analytic = actor_grad(&policy, &features, &actions, &advantages, coef, raw_reg);
        let eps = 1e-5;
        let mut flat = policy.flat_params();
        for p in 0..flat.len() {
            let orig = flat[p];
            flat[p] = orig + eps;
            policy.set_flat_params(&flat);
            let plus = actor_loss(&policy, &features, &actions, &advantages, coef, raw_reg);
            flat[p] = orig - eps;
            policy.set_flat_params(&flat);
            let minus = actor_loss(&policy, &features, &actions, &advantages, coef, raw_reg);
            flat[p] = orig;
            policy.set_flat_params(&flat);
            let numeric = (plus - minus) / (2.0 * eps);
            let denom = numeric.abs().max(analytic[p].abs()).max(1e-8);
            assert!(
                (analytic[p] - numeric).abs() / denom < 1e-4,
                "param {p}: analytic {} vs numeric {numeric}",
                analytic[p]
            );
        }
    }

    #[test]
    fn critic_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut critic = Mlp::new(&[FEATURE_DIM, 8, 1], &mut rng);
        let features: Vec<[f64; FEATURE_DIM]> = (0..5)
            .map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
            .collect();
        let returns: Vec<f64> = (0..5).map(|_| rng.gen_range(-5.0..5.0)).collect();

        let analytic = critic_grad(&critic, &features, &returns);
        let eps = 1e-5;
        for p in 0..critic.params().len() {
            let orig = critic.params()[p];
            critic.params_mut()[p] = orig + eps;
            let plus = critic_loss(&critic, &features, &returns);
            critic.params_mut()[p] = orig - eps;
            let minus = critic_loss(&critic, &features, &returns);
            critic.params_mut()[p] = orig;
            let numeric = (plus - minus) / (2.0 * eps);
            let denom = numeric.abs().max(analytic[p].abs()).max(1e-8);
            assert!((analytic[p] - numeric).abs() / denom < 1e-4);
        }
    }

    #[test]
    fn zero_advantage_leaves_actor_unchanged() {
        // Zero rewards and a zero-valued critic give zero advantages; with a
        // zero entropy coefficient the actor must not move at all.
        let hyper = A2cHyper {
            entropy_coef: 0.0,
            ..A2cHyper::default()
        };
        let mut learner = A2cLearner::new(hyper, 9);
        for p in learner.critic.params_mut().iter_mut() {
            *p = 0.0;
        }
        let before = learner.actor.flat_params();
        let mut rollout = Rollout::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..8 {
            let f: [f64; FEATURE_DIM] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            rollout.push(f, Point2::new(0.3, -0.4), 0.0);
        }
        learner.update(&rollout).unwrap();
        assert_eq!(learner.actor.flat_params(), before);
    }

    #[test]
    fn update_is_deterministic_for_fixed_seed() {
        let run = || {
            let mut learner = A2cLearner::new(A2cHyper::default(), 123);
            let mut env = TrackingEnv::new(
                Episode::fc(3.0),
                EnvParams {
                    connected: false,
                    noise: NoiseSpec::Normal { sigma: 2.0 },
                    ..EnvParams::default()
                },
                77,
            )
            .unwrap();
            let mut rollout = Rollout::default();
            for _ in 0..64 {
                let f = env.learner_observation(false).features();
                let a = learner.act_stochastic(&f);
                let state = *env.step(a, Point2::ZERO).unwrap();
                rollout.push(f, a, learner_reward(&state, &RewardParams::default()));
                if rollout.len() == 16 {
                    rollout.bootstrap = learner.value(&env.learner_observation(false).features());
                    learner.update(&rollout).unwrap();
                    rollout.clear();
                }
            }
            learner.actor.flat_params()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn policy_snapshot_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.policy");
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let policy = GaussianPolicy::new(32, 2.0, &mut rng);
        save_policy(&policy, &path).unwrap();
        let loaded = load_policy(&path).unwrap();
        assert_eq!(policy, loaded);
        for _ in 0..10 {
            let f: [f64; FEATURE_DIM] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            assert_eq!(policy.mean_action(&f), loaded.mean_action(&f));
        }
    }

    #[test]
    fn load_rejects_wrong_input_dim() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.policy");
        let text = format!(
            "teachsim-policy v1\nhead gaussian2\nsizes 3 4 2\nmax_action 2\nlog_std 0 0\nparams {}\n{}",
            Mlp::param_count_for(&[3, 4, 2]),
            "0.0\n".repeat(Mlp::param_count_for(&[3, 4, 2]))
        );
        std::fs::write(&path, text).unwrap();
        assert!(matches!(load_policy(&path), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn zero_final_layer_gives_zero_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut policy = GaussianPolicy::new(8, 2.0, &mut rng);
        // Zero the output layer (last 2*hidden weights + 2 biases).
        let n = policy.net.params().len();
        let tail = 8 * 2 + 2;
        for p in policy.net.params_mut()[n - tail..].iter_mut() {
            *p = 0.0;
        }
        for _ in 0..5 {
            let f: [f64; FEATURE_DIM] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            assert_eq!(policy.mean_action(&f), Point2::ZERO);
        }
    }

    proptest! {
        #[test]
        fn heuristic_magnitude_is_zero_one_or_two(
            tx in -20.0f64..20.0, ty in -20.0f64..20.0,
            ox in -20.0f64..20.0, oy in -20.0f64..20.0,
            seed in 0u64..1000,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let obs = obs_at((tx, ty), (ox, oy));
            let f = heuristic_learner_action(&obs, &mut rng).norm();
            let ok = f == 0.0 || (f - 1.0).abs() < 1e-12 || (f - 2.0).abs() < 1e-12;
            prop_assert!(ok, "magnitude {f}");
        }
    }
}
