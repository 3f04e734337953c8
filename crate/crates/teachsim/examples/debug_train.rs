// Scratch instrumentation for learner training; not part of the deliverable.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use teachsim::agents::{learner_reward, A2cHyper, A2cLearner, Rollout, Teacher};
use teachsim::config::ExperimentConfig;
use teachsim::env::TrackingEnv;
use teachsim::geom::Point2;
use teachsim::runner::evaluate_learner;
use teachsim::trajectory::{Episode, Task};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let gamma: f64 = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(0.99);
    let lr: f64 = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(3e-3);
    let n_step: usize = args.get(3).and_then(|a| a.parse().ok()).unwrap_or(16);
    let entropy: f64 = args.get(4).and_then(|a| a.parse().ok()).unwrap_or(1e-3);
    let seed: u64 = std::env::args().nth(6).and_then(|a| a.parse().ok()).unwrap_or(3);
    let connected: bool = std::env::args().nth(7).map(|a| a == "1").unwrap_or(false);
    let prox: f64 = std::env::args().nth(8).and_then(|a| a.parse().ok()).unwrap_or(1.0);
    let critic_frac: f64 = std::env::args().nth(9).and_then(|a| a.parse().ok()).unwrap_or(1.0);
    let mut config = ExperimentConfig::for_task(Task::Fc, seed);
    config.reward.proximity_threshold = prox;
    let hyper = A2cHyper {
        gamma,
        lr_actor: lr,
        lr_critic: lr * critic_frac,
        n_step,
        entropy_coef: entropy,
        ..A2cHyper::default()
    };
    let mut learner = A2cLearner::new(hyper, seed);
    let teacher = Teacher::scripted_default();
    let env_params = config.env_params(connected);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 13);
    let mut rollout = Rollout::default();
    let mut window: Vec<f64> = Vec::new();
    let mut dists: Vec<f64> = Vec::new();
    let mut seps: Vec<f64> = Vec::new();
    let mut boosters: Vec<f64> = Vec::new();
    let mut acts: Vec<f64> = Vec::new();
    let mut steps = 0usize;
    let total: usize = std::env::args().nth(5).and_then(|a| a.parse().ok()).unwrap_or(6000);
    'outer: loop {
        let mut env = TrackingEnv::new(
            Episode::fc(rng.gen_range(0.0..10.0)),
            env_params,
            rng.gen(),
        )
        .unwrap();
        rollout.clear();
        while !env.is_done() {
            let f = env.learner_observation(connected).features();
            let a = learner.act_stochastic(&f);
            let a_teacher = if connected {
                teacher.act(&env.teacher_observation())
            } else {
                Point2::ZERO
            };
            let next = *env.step(a, a_teacher).unwrap();
            let r = learner_reward(&next, &config.reward);
            window.push(r);
            dists.push((next.target - next.learner).norm());
            seps.push((next.teacher - next.learner).norm());
            boosters.push(((next.obscured_target - next.learner).norm() <= 1.0) as usize as f64);
            acts.push(a.norm());
            rollout.push(f, a, r);
            steps += 1;
            if rollout.len() == learner.hyper().n_step || env.is_done() {
                rollout.bootstrap = if env.is_done() {
                    0.0
                } else {
                    learner.value(&env.learner_observation(connected).features())
                };
                learner.update(&rollout).unwrap();
                rollout.clear();
            }
            if steps % 1500 == 0 {
                let mr = window.iter().sum::<f64>() / window.len() as f64;
                let md = dists.iter().sum::<f64>() / dists.len() as f64;
                let ms = seps.iter().sum::<f64>() / seps.len() as f64;
                let mb = boosters.iter().sum::<f64>() / boosters.len() as f64;
                let ma = acts.iter().sum::<f64>() / acts.len() as f64;
                let v = learner.value(&env.learner_observation(connected).features());
                let ev = evaluate_learner(&learner, Task::Fc, &config, 8, 999).unwrap();
                let probe = learner.act_mean(&[0.3, 0.0, 0.0, 0.0, 0.5]);
                let probe2 = learner.act_mean(&[-0.1, -0.3, 0.0, 0.0, 0.5]);
                println!(
                    "step {steps:5}: r {mr:6.3} dist {md:5.2} sep {ms:5.2} boost {mb:.2} |a| {ma:4.2} V {v:6.2} sigma ({:.2},{:.2}) eval {:.3} probe+x ({:+.2},{:+.2}) probe-xy ({:+.2},{:+.2})",
                    learner.actor.log_std_values()[0].exp(),
                    learner.actor.log_std_values()[1].exp(),
                    ev.mean, probe.x, probe.y, probe2.x, probe2.y
                );
                window.clear();
                dists.clear();
                seps.clear();
                boosters.clear();
                acts.clear();
            }
            if steps >= total {
                break 'outer;
            }
        }
    }
    let s = evaluate_learner(&learner, Task::Fc, &config, 20, 99).unwrap();
    println!("eval similarity mean {:.3} median {:.3}", s.mean, s.median);
}
