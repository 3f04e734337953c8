// Scratch check: the update rule must solve a one-state bandit.

use teachsim::agents::{A2cHyper, A2cLearner, Rollout, FEATURE_DIM};

fn main() {
    let hyper = A2cHyper {
        gamma: 0.0,
        entropy_coef: 0.0,
        ..A2cHyper::default()
    };
    let mut learner = A2cLearner::new(hyper, 7);
    let obs = [0.3, -0.2, 0.0, 0.0, 0.5];
    for k in 0..400 {
        let mut rollout = Rollout::default();
        for _ in 0..16 {
            let a = learner.act_stochastic(&obs);
            // Reward prefers +x and -y.
            let r = a.x - a.y;
            let mut f = [0.0; FEATURE_DIM];
            f.copy_from_slice(&obs);
            rollout.push(f, a, r);
        }
        learner.update(&rollout).unwrap();
        if (k + 1) % 100 == 0 {
            let m = learner.act_mean(&obs);
            println!("update {:3}: mean action ({:+.3}, {:+.3})", k + 1, m.x, m.y);
        }
    }
}
