//! The teacher-learner tracking environment.
//!
//! Two agents move on the board chasing a moving target. The learner only
//! sees an obscured copy of the target; the teacher sees the truth. When the
//! agents are connected, a virtual elastic band pulls each toward the other
//! with per-agent stiffness taken from the connectivity modality.
//!
//! Location updates (simultaneous, from the time-`t` positions):
//!
//! ```text
//! connected:      learner' = clamp(learner + (F_learner + a_learner) * c)
//!                 teacher' = clamp(teacher + F_teacher * c + a_teacher)
//! not connected:  learner' = clamp(learner + a_learner * c)
//!                 teacher' = clamp(teacher + a_teacher)
//! ```
//!
//! where `F_learner = scale * k_learner * (teacher - learner)`,
//! `F_teacher = scale * k_teacher * (learner - teacher)` and `c` is the
//! mitigation factor modeling the learner's slower writing speed. The
//! mitigation factor attenuates the elastic coupling on both ends; with the
//! default `scale = 0.01` and `c = 0.5` every modality contracts when both
//! agents are passive.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geom::{clamp_to_board, Board, Point2};
use crate::trajectory::Episode;
use crate::{Error, Result};

/// Stiffness pairing of the elastic coupling (learner, teacher), in N/m.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StiffnessModality {
    /// high learner / high teacher
    Hh,
    /// low learner / low teacher
    Ll,
    /// low learner / high teacher
    Lh,
    /// high learner / low teacher
    Hl,
}

impl StiffnessModality {
    pub fn k_learner(self) -> f64 {
        match self {
            StiffnessModality::Hh | StiffnessModality::Hl => 180.0,
            StiffnessModality::Ll | StiffnessModality::Lh => 60.0,
        }
    }

    pub fn k_teacher(self) -> f64 {
        match self {
            StiffnessModality::Hh | StiffnessModality::Lh => 180.0,
            StiffnessModality::Ll | StiffnessModality::Hl => 60.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StiffnessModality::Hh => "hh",
            StiffnessModality::Ll => "ll",
            StiffnessModality::Lh => "lh",
            StiffnessModality::Hl => "hl",
        }
    }
}

impl std::fmt::Display for StiffnessModality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for StiffnessModality {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hh" => Ok(StiffnessModality::Hh),
            "ll" => Ok(StiffnessModality::Ll),
            "lh" => Ok(StiffnessModality::Lh),
            "hl" => Ok(StiffnessModality::Hl),
            other => Err(Error::Config(format!("unknown modality '{other}'"))),
        }
    }
}

/// How the learner's view of the target is corrupted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    None,
    /// Independent per-axis Gaussian noise with the given sigma.
    Normal { sigma: f64 },
    /// A point drawn uniformly from the contour of a circle with the given
    /// radius.
    UniformCircle { radius: f64 },
}

impl NoiseSpec {
    pub fn from_kind_value(kind: &str, value: f64) -> Result<Self> {
        match kind.to_ascii_lowercase().as_str() {
            "none" => Ok(NoiseSpec::None),
            "normal" => {
                if value <= 0.0 {
                    return Err(Error::Config("normal noise needs sigma > 0".into()));
                }
                Ok(NoiseSpec::Normal { sigma: value })
            }
            "uniform-circle" | "uniform_circle" | "uniform" => {
                if value <= 0.0 {
                    return Err(Error::Config("uniform-circle noise needs radius > 0".into()));
                }
                Ok(NoiseSpec::UniformCircle { radius: value })
            }
            other => Err(Error::Config(format!("unknown noise kind '{other}'"))),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            NoiseSpec::None => "none",
            NoiseSpec::Normal { .. } => "normal",
            NoiseSpec::UniformCircle { .. } => "uniform-circle",
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            NoiseSpec::None => 0.0,
            NoiseSpec::Normal { sigma } => *sigma,
            NoiseSpec::UniformCircle { radius } => *radius,
        }
    }
}

/// How the per-episode phase offset of the moving target is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OffsetStrategy {
    Constant(f64),
    /// A uniform random integer in `[0, 10)`, redrawn per episode.
    RandomInt,
}

impl OffsetStrategy {
    pub fn draw(&self, rng: &mut impl Rng) -> f64 {
        match self {
            OffsetStrategy::Constant(a) => *a,
            OffsetStrategy::RandomInt => rng.gen_range(0..10) as f64,
        }
    }
}

/// Environment parameters.
#[derive(Debug, Clone, Copy)]
pub struct EnvParams {
    pub modality: StiffnessModality,
    pub connected: bool,
    pub noise: NoiseSpec,
    /// Mitigation factor on the learner update and the elastic coupling.
    pub mitigation: f64,
    /// Stiffness constants are multiplied by this before acting per-step.
    pub stiffness_scale: f64,
    pub board: Board,
}

impl Default for EnvParams {
    fn default() -> Self {
        EnvParams {
            modality: StiffnessModality::Lh,
            connected: true,
            noise: NoiseSpec::Normal { sigma: 2.0 },
            mitigation: 0.5,
            stiffness_scale: 0.01,
            board: Board::default(),
        }
    }
}

impl EnvParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mitigation > 0.0 && self.mitigation <= 1.0) {
            return Err(Error::Config(format!(
                "mitigation factor must be in (0, 1], got {}",
                self.mitigation
            )));
        }
        if self.stiffness_scale <= 0.0 {
            return Err(Error::Config(format!(
                "stiffness scale must be positive, got {}",
                self.stiffness_scale
            )));
        }
        Ok(())
    }
}

/// Full environment state after a step.
#[derive(Debug, Clone, Copy)]
pub struct EnvState {
    pub step: usize,
    pub target: Point2,
    /// Obscured view of the current target: the draw the learner was
    /// chasing while the target moved here.
    pub obscured_target: Point2,
    pub teacher: Point2,
    pub learner: Point2,
    /// Coupling forces applied in the transition that produced this state;
    /// zero at reset and in not-connected mode.
    pub force_learner: Point2,
    pub force_teacher: Point2,
}

/// True target location of the follow-the-cursor task at step `s` with
/// phase offset `alpha`.
pub fn fc_target(s: usize, alpha: f64) -> Point2 {
    let phi = s as f64 / 30.0 + alpha;
    let x = 3.0 * (1.8 * phi).sin()
        + 3.4 * (1.8 * phi).sin()
        + 2.5 * (1.82 * phi).sin()
        + 4.3 * (2.34 * phi).sin();
    let y = 3.0 * (1.1 * phi).sin()
        + 3.2 * (3.6 * phi).sin()
        + 3.8 * (2.5 * phi).sin()
        + 4.8 * (1.48 * phi).sin();
    Point2::new(x, y)
}

/// Draw the obscured view of the target.
pub fn obscure_target(target: Point2, noise: &NoiseSpec, rng: &mut impl Rng) -> Point2 {
    match noise {
        NoiseSpec::None => target,
        NoiseSpec::Normal { sigma } => {
            let nx = crate::nn::standard_normal(rng) * sigma;
            let ny = crate::nn::standard_normal(rng) * sigma;
            target + Point2::new(nx, ny)
        }
        NoiseSpec::UniformCircle { radius } => {
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            target + Point2::new(radius * theta.cos(), radius * theta.sin())
        }
    }
}

/// Elastic coupling forces for connected agents.
///
/// `F_learner = scale * k_learner * (teacher - learner)` and
/// `F_teacher = scale * k_teacher * (learner - teacher)`.
pub fn coupling_forces(
    learner: Point2,
    teacher: Point2,
    modality: StiffnessModality,
    scale: f64,
) -> (Point2, Point2) {
    let disp = teacher - learner;
    let f_learner = disp * (scale * modality.k_learner());
    let f_teacher = -disp * (scale * modality.k_teacher());
    (f_learner, f_teacher)
}

/// A single tracking episode in progress.
///
/// Agents watch the target move: observations carry the (for the learner,
/// obscured) point the target is moving to during the current step, and the
/// post-step state keeps the exact draw that was chased, which the reward
/// measures arrival against. Owns its RNG; the state sequence depends only
/// on (seed, params, episode, action sequence).
#[derive(Debug, Clone)]
pub struct TrackingEnv {
    params: EnvParams,
    episode: Episode,
    state: EnvState,
    /// Obscured view of the target point currently being moved to.
    next_aim: Point2,
    rng: ChaCha8Rng,
}

impl TrackingEnv {
    /// Start an episode. Both agents spawn at the episode's first target
    /// point and the initial target is obscured immediately.
    pub fn new(episode: Episode, params: EnvParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let target = episode.target.first();
        let obscured = obscure_target(target, &params.noise, &mut rng);
        let aim_index = 1.min(episode.len() - 1);
        let next_aim = obscure_target(
            episode.target.points()[aim_index],
            &params.noise,
            &mut rng,
        );
        let state = EnvState {
            step: 0,
            target,
            obscured_target: obscured,
            teacher: target,
            learner: target,
            force_learner: Point2::ZERO,
            force_teacher: Point2::ZERO,
        };
        Ok(TrackingEnv {
            params,
            episode,
            state,
            next_aim,
            rng,
        })
    }

    pub fn state(&self) -> &EnvState {
        &self.state
    }

    pub fn params(&self) -> &EnvParams {
        &self.params
    }

    pub fn episode(&self) -> &Episode {
        &self.episode
    }

    pub fn is_done(&self) -> bool {
        self.state.step + 1 >= self.episode.len()
    }

    /// What the learner sees right now: the obscured view of the point the
    /// target is moving to, its own and (when a teacher is attached) the
    /// partner's position.
    pub fn learner_observation(&self, teacher_present: bool) -> crate::agents::Observation {
        crate::agents::Observation {
            target: self.next_aim,
            own: self.state.learner,
            partner: teacher_present.then_some(self.state.teacher),
            step_fraction: crate::agents::step_fraction(self.state.step, self.episode.len()),
        }
    }

    /// What the teacher sees: true locations, with the target read one step
    /// ahead. The teacher knows the lesson plan, so it leads the motion
    /// instead of trailing it.
    pub fn teacher_observation(&self) -> crate::agents::Observation {
        let next = (self.state.step + 1).min(self.episode.len() - 1);
        crate::agents::Observation {
            target: self.episode.target.points()[next],
            own: self.state.teacher,
            partner: Some(self.state.learner),
            step_fraction: crate::agents::step_fraction(self.state.step, self.episode.len()),
        }
    }

    /// Advance one step with the given agent actions.
    pub fn step(&mut self, a_learner: Point2, a_teacher: Point2) -> Result<&EnvState> {
        if self.is_done() {
            return Err(Error::EpisodeExhausted {
                step: self.state.step,
                length: self.episode.len(),
            });
        }
        let c = self.params.mitigation;
        let board = &self.params.board;
        let s = &self.state;

        let (learner_next, teacher_next, f_learner, f_teacher) = if self.params.connected {
            let (f_l, f_t) = coupling_forces(
                s.learner,
                s.teacher,
                self.params.modality,
                self.params.stiffness_scale,
            );
            let l = clamp_to_board(s.learner + (f_l + a_learner) * c, board);
            let t = clamp_to_board(s.teacher + f_t * c + a_teacher, board);
            (l, t, f_l, f_t)
        } else {
            let l = clamp_to_board(s.learner + a_learner * c, board);
            let t = clamp_to_board(s.teacher + a_teacher, board);
            (l, t, Point2::ZERO, Point2::ZERO)
        };

        let next_step = s.step + 1;
        let target = self.episode.target.points()[next_step];
        // The draw the learner chased becomes the current obscured target;
        // a fresh draw covers the point the target heads to next.
        let obscured = self.next_aim;
        let aim_index = (next_step + 1).min(self.episode.len() - 1);
        self.next_aim = obscure_target(
            self.episode.target.points()[aim_index],
            &self.params.noise,
            &mut self.rng,
        );

        self.state = EnvState {
            step: next_step,
            target,
            obscured_target: obscured,
            teacher: teacher_next,
            learner: learner_next,
            force_learner: f_learner,
            force_teacher: f_teacher,
        };
        Ok(&self.state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::FC_EPISODE_LEN;
    use proptest::prelude::*;

    const FC_X_BOUND: f64 = 13.2;
    const FC_Y_BOUND: f64 = 14.8;

    #[test]
    fn fc_target_zero_step_zero_offset_is_origin() {
        let p = fc_target(0, 0.0);
        assert_eq!(p.x, 0.0);
        assert_eq!(p.y, 0.0);
    }

    #[test]
    fn fc_target_frozen_regression_values() {
        // High-precision evaluations of the two sine sums.
        let p = fc_target(0, 3.0);
        assert!((p.x - -3.8896720664111548).abs() < 1e-12, "x = {}", p.x);
        assert!((p.y - -4.6708615736504298).abs() < 1e-12, "y = {}", p.y);
        let q = fc_target(100, 3.0);
        assert!((q.x - -4.7034491387473016).abs() < 1e-12);
        assert!((q.y - -0.64902848986232409).abs() < 1e-12);
    }

    #[test]
    fn fc_target_bounded_over_offsets() {
        for offset in 0..100 {
            let alpha = offset as f64 * 0.37;
            for s in 0..FC_EPISODE_LEN {
                let p = fc_target(s, alpha);
                assert!(p.x.abs() <= FC_X_BOUND && p.y.abs() <= FC_Y_BOUND);
            }
        }
    }

    #[test]
    fn obscure_none_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = Point2::new(3.0, -4.0);
        assert_eq!(obscure_target(p, &NoiseSpec::None, &mut rng), p);
    }

    #[test]
    fn obscure_uniform_circle_has_exact_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = Point2::new(1.0, 1.0);
        for _ in 0..1000 {
            let q = obscure_target(p, &NoiseSpec::UniformCircle { radius: 5.0 }, &mut rng);
            assert!((q.distance(p) - 5.0).abs() < 1e-9);
        }
    }

    #[test]
    fn obscure_normal_monte_carlo_stats() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = Point2::new(-2.0, 7.0);
        let n = 100_000;
        let mut sum = Point2::ZERO;
        let mut sq = Point2::ZERO;
        for _ in 0..n {
            let d = obscure_target(p, &NoiseSpec::Normal { sigma: 4.0 }, &mut rng) - p;
            sum += d;
            sq += Point2::new(d.x * d.x, d.y * d.y);
        }
        let mean = sum * (1.0 / n as f64);
        assert!(mean.x.abs() < 0.05 && mean.y.abs() < 0.05, "mean {mean:?}");
        let sd_x = (sq.x / n as f64 - mean.x * mean.x).sqrt();
        let sd_y = (sq.y / n as f64 - mean.y * mean.y).sqrt();
        assert!((sd_x - 4.0).abs() < 0.1, "sd_x {sd_x}");
        assert!((sd_y - 4.0).abs() < 0.1, "sd_y {sd_y}");
    }

    #[test]
    fn coupling_force_example() {
        // LH modality at scale 0.01 on a unit displacement.
        let (f_l, f_t) = coupling_forces(
            Point2::ZERO,
            Point2::new(1.0, 0.0),
            StiffnessModality::Lh,
            0.01,
        );
        assert!((f_l.x - 0.6).abs() < 1e-12 && f_l.y == 0.0);
        assert!((f_t.x - -1.8).abs() < 1e-12 && f_t.y == 0.0);
    }

    #[test]
    fn coupling_force_zero_at_contact() {
        let p = Point2::new(4.0, -2.0);
        let (f_l, f_t) = coupling_forces(p, p, StiffnessModality::Hh, 0.01);
        assert_eq!(f_l, Point2::ZERO);
        assert_eq!(f_t, Point2::ZERO);
    }

    #[test]
    fn stiffness_table_values() {
        use StiffnessModality::*;
        assert_eq!((Hh.k_learner(), Hh.k_teacher()), (180.0, 180.0));
        assert_eq!((Ll.k_learner(), Ll.k_teacher()), (60.0, 60.0));
        assert_eq!((Lh.k_learner(), Lh.k_teacher()), (60.0, 180.0));
        assert_eq!((Hl.k_learner(), Hl.k_teacher()), (180.0, 60.0));
    }

    fn quiet_params(connected: bool) -> EnvParams {
        EnvParams {
            connected,
            noise: NoiseSpec::None,
            ..EnvParams::default()
        }
    }

    #[test]
    fn not_connected_step_applies_mitigated_action() {
        let mut env = TrackingEnv::new(Episode::fc(0.0), quiet_params(false), 0).unwrap();
        // Both agents spawn at the first target point, which is the origin
        // for alpha = 0.
        let s = env.step(Point2::new(1.0, 0.0), Point2::ZERO).unwrap();
        assert!((s.learner.x - 0.5).abs() < 1e-12);
        assert_eq!(s.learner.y, 0.0);
    }

    #[test]
    fn connected_step_hand_evaluation() {
        // One step of the coupled update with unit mitigation: the learner
        // moves by its force, the teacher by its own.
        let mut params = quiet_params(true);
        params.mitigation = 1.0;
        let mut env = TrackingEnv::new(Episode::fc(0.0), params, 0).unwrap();
        env.state.learner = Point2::ZERO;
        env.state.teacher = Point2::new(1.0, 0.0);
        let s = env.step(Point2::ZERO, Point2::ZERO).unwrap();
        assert!((s.learner.x - 0.6).abs() < 1e-12, "learner {:?}", s.learner);
        assert!((s.teacher.x - -0.8).abs() < 1e-12, "teacher {:?}", s.teacher);
    }

    #[test]
    fn passive_connected_agents_contract() {
        let mut env = TrackingEnv::new(Episode::fc(3.0), quiet_params(true), 7).unwrap();
        env.state.learner = Point2::new(-10.0, 5.0);
        env.state.teacher = Point2::new(8.0, -6.0);
        let mut prev = env.state.learner.distance(env.state.teacher);
        while !env.is_done() {
            let s = env.step(Point2::ZERO, Point2::ZERO).unwrap();
            let d = s.learner.distance(s.teacher);
            assert!(d <= prev + 1e-12, "separation grew: {prev} -> {d}");
            prev = d;
        }
        assert!(prev < 1e-6, "final separation {prev}");
    }

    #[test]
    fn not_connected_ignores_partner_position() {
        let mk = |teacher_y: f64| {
            let mut env = TrackingEnv::new(Episode::fc(1.0), quiet_params(false), 5).unwrap();
            env.state.teacher = Point2::new(0.0, teacher_y);
            for _ in 0..20 {
                env.step(Point2::new(0.3, -0.1), Point2::new(0.2, 0.0))
                    .unwrap();
            }
            env.state.learner
        };
        assert_eq!(mk(0.0), mk(13.0));
    }

    #[test]
    fn stepping_past_episode_end_errors() {
        let mut env = TrackingEnv::new(Episode::fc(0.0), quiet_params(false), 0).unwrap();
        for _ in 0..FC_EPISODE_LEN - 1 {
            env.step(Point2::ZERO, Point2::ZERO).unwrap();
        }
        assert!(matches!(
            env.step(Point2::ZERO, Point2::ZERO),
            Err(Error::EpisodeExhausted { .. })
        ));
    }

    #[test]
    fn same_seed_same_state_sequence() {
        let run = || {
            let mut env =
                TrackingEnv::new(Episode::fc(2.0), EnvParams::default(), 99).unwrap();
            let mut trace = Vec::new();
            for _ in 0..50 {
                let s = env.step(Point2::new(0.5, -0.2), Point2::new(0.1, 0.1)).unwrap();
                trace.push((s.learner, s.teacher, s.obscured_target));
            }
            trace
        };
        assert_eq!(run(), run());
    }

    proptest! {
        #[test]
        fn fc_target_bounded(s in 0usize..250, alpha in -100.0f64..100.0) {
            let p = fc_target(s, alpha);
            prop_assert!(p.x.abs() <= FC_X_BOUND);
            prop_assert!(p.y.abs() <= FC_Y_BOUND);
        }

        #[test]
        fn force_antisymmetry_identity(
            lx in -27.0f64..27.0, ly in -27.0f64..27.0,
            tx in -27.0f64..27.0, ty in -27.0f64..27.0,
            modality in prop_oneof![
                Just(StiffnessModality::Hh), Just(StiffnessModality::Ll),
                Just(StiffnessModality::Lh), Just(StiffnessModality::Hl),
            ],
        ) {
            let (f_l, f_t) = coupling_forces(
                Point2::new(lx, ly), Point2::new(tx, ty), modality, 0.01);
            let res = f_l * modality.k_teacher() + f_t * modality.k_learner();
            let scale = f_l.norm().max(f_t.norm()).max(1.0);
            prop_assert!(res.norm() <= 1e-9 * scale);
        }

        #[test]
        fn swapping_agents_negates_forces(
            lx in -27.0f64..27.0, ly in -27.0f64..27.0,
            tx in -27.0f64..27.0, ty in -27.0f64..27.0,
        ) {
            let a = Point2::new(lx, ly);
            let b = Point2::new(tx, ty);
            let m = StiffnessModality::Hl;
            let (f_l, f_t) = coupling_forces(a, b, m, 0.01);
            let (g_l, g_t) = coupling_forces(b, a, m, 0.01);
            prop_assert!((f_l + g_l).norm() < 1e-12);
            prop_assert!((f_t + g_t).norm() < 1e-12);
        }
    }
}
