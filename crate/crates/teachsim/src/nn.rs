//! Small dense networks with hand-written backpropagation, plus the Adam
//! optimizer.
//!
//! Parameters live in one flat vector (layer weights row-major, then biases,
//! per layer) so optimizers, gradient checks and snapshot files all see the
//! same layout. Hidden layers use tanh, the output layer is linear; heads
//! (Gaussian policy, sigmoid discriminator) are built on top by the callers.

use rand::Rng;

/// A feed-forward network with tanh hidden layers and a linear output layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

/// Per-layer activations captured by [`Mlp::forward_cached`], consumed by
/// [`Mlp::backward`].
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// `activations[0]` is the input; `activations[l + 1]` the output of
    /// layer `l` (post-tanh for hidden layers, raw for the output layer).
    activations: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.activations.last().expect("cache is non-empty")
    }
}

impl Mlp {
    /// Initialize with uniform Xavier weights and zero biases.
    pub fn new(sizes: &[usize], rng: &mut impl Rng) -> Self {
        assert!(sizes.len() >= 2, "need at least input and output sizes");
        assert!(sizes.iter().all(|&s| s > 0), "layer sizes must be positive");
        let mut params = Vec::with_capacity(Self::param_count_for(sizes));
        for l in 0..sizes.len() - 1 {
            let (fan_in, fan_out) = (sizes[l], sizes[l + 1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for _ in 0..fan_in * fan_out {
                params.push(rng.gen_range(-bound..bound));
            }
            params.extend(std::iter::repeat(0.0).take(fan_out));
        }
        Mlp {
            sizes: sizes.to_vec(),
            params,
        }
    }

    /// Build from an explicit flat parameter vector (snapshot loading).
    pub fn from_params(sizes: &[usize], params: Vec<f64>) -> Option<Self> {
        if sizes.len() < 2 || params.len() != Self::param_count_for(sizes) {
            return None;
        }
        Some(Mlp {
            sizes: sizes.to_vec(),
            params,
        })
    }

    pub fn param_count_for(sizes: &[usize]) -> usize {
        sizes
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().expect("sizes is non-empty")
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn layer_count(&self) -> usize {
        self.sizes.len() - 1
    }

    /// Offset of layer `l`'s weights and biases in the flat vector.
    fn offsets(&self, layer: usize) -> (usize, usize) {
        let mut off = 0;
        for l in 0..layer {
            off += self.sizes[l] * self.sizes[l + 1] + self.sizes[l + 1];
        }
        (off, off + self.sizes[layer] * self.sizes[layer + 1])
    }

    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        self.forward_cached(input).activations.pop().expect("non-empty")
    }

    pub fn forward_cached(&self, input: &[f64]) -> ForwardCache {
        assert_eq!(input.len(), self.input_dim(), "input dimension mismatch");
        let mut activations = Vec::with_capacity(self.layer_count() + 1);
        activations.push(input.to_vec());
        for l in 0..self.layer_count() {
            let (w_off, b_off) = self.offsets(l);
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let prev = &activations[l];
            let mut out = Vec::with_capacity(n_out);
            for o in 0..n_out {
                let row = &self.params[w_off + o * n_in..w_off + (o + 1) * n_in];
                let mut z = self.params[b_off + o];
                for (w, x) in row.iter().zip(prev) {
                    z += w * x;
                }
                out.push(if l + 1 < self.layer_count() { z.tanh() } else { z });
            }
            activations.push(out);
        }
        ForwardCache { activations }
    }

    /// Backpropagate `d_output` (dL/d output) through the cached forward
    /// pass, accumulating parameter gradients into `grads` (same layout as
    /// `params`). Returns dL/d input.
    pub fn backward(&self, cache: &ForwardCache, d_output: &[f64], grads: &mut [f64]) -> Vec<f64> {
        assert_eq!(d_output.len(), self.output_dim());
        assert_eq!(grads.len(), self.params.len());
        let mut delta = d_output.to_vec();
        for l in (0..self.layer_count()).rev() {
            let (w_off, b_off) = self.offsets(l);
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let layer_in = &cache.activations[l];
            // Hidden layers produced tanh(z); fold the activation derivative
            // into delta. The output layer is linear.
            if l + 1 < self.layer_count() {
                let out = &cache.activations[l + 1];
                for (d, y) in delta.iter_mut().zip(out) {
                    *d *= 1.0 - y * y;
                }
            }
            let mut d_in = vec![0.0; n_in];
            for o in 0..n_out {
                let d = delta[o];
                grads[b_off + o] += d;
                let row_off = w_off + o * n_in;
                for i in 0..n_in {
                    grads[row_off + i] += d * layer_in[i];
                    d_in[i] += d * self.params[row_off + i];
                }
            }
            delta = d_in;
        }
        delta
    }
}

/// Adam with bias correction.
#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    t: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub fn new(lr: f64, param_count: usize) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
        }
    }

    /// Apply one descent step along `grads`.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grads.len(), self.m.len());
        self.t += 1;
        let b1t = 1.0 - self.beta1.powi(self.t as i32);
        let b2t = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grads[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grads[i] * grads[i];
            let m_hat = self.m[i] / b1t;
            let v_hat = self.v[i] / b2t;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

/// One standard normal draw via Box-Muller. Always consumes exactly two
/// uniforms, which keeps RNG streams aligned across code paths.
pub(crate) fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Scale `grads` in place so the global L2 norm does not exceed `max_norm`.
/// Returns the pre-clip norm.
pub fn clip_grad_norm(grads: &mut [f64], max_norm: f64) -> f64 {
    let norm = grads.iter().map(|g| g * g).sum::<f64>().sqrt();
    if norm > max_norm && norm > 0.0 {
        let s = max_norm / norm;
        for g in grads.iter_mut() {
            *g *= s;
        }
    }
    norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Scalar loss L = sum(output^2) for gradient checking.
    fn sq_loss(net: &Mlp, input: &[f64]) -> f64 {
        net.forward(input).iter().map(|y| y * y).sum()
    }

    #[test]
    fn backward_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut net = Mlp::new(&[3, 8, 2], &mut rng);
        let input = [0.4, -0.9, 0.2];

        let cache = net.forward_cached(&input);
        let d_out: Vec<f64> = cache.output().iter().map(|y| 2.0 * y).collect();
        let mut grads = vec![0.0; net.params().len()];
        net.backward(&cache, &d_out, &mut grads);

        let eps = 1e-5;
        for p in 0..net.params().len() {
            let orig = net.params()[p];
            net.params_mut()[p] = orig + eps;
            let plus = sq_loss(&net, &input);
            net.params_mut()[p] = orig - eps;
            let minus = sq_loss(&net, &input);
            net.params_mut()[p] = orig;
            let numeric = (plus - minus) / (2.0 * eps);
            let denom = numeric.abs().max(grads[p].abs()).max(1e-8);
            assert!(
                (grads[p] - numeric).abs() / denom < 1e-4,
                "param {p}: analytic {} vs numeric {numeric}",
                grads[p]
            );
        }
    }

    #[test]
    fn backward_input_gradient_matches() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let net = Mlp::new(&[2, 6, 1], &mut rng);
        let input = [0.7, -0.3];
        let cache = net.forward_cached(&input);
        let d_out: Vec<f64> = cache.output().iter().map(|y| 2.0 * y).collect();
        let mut grads = vec![0.0; net.params().len()];
        let d_in = net.backward(&cache, &d_out, &mut grads);

        let eps = 1e-5;
        for i in 0..input.len() {
            let mut shifted = input;
            shifted[i] += eps;
            let plus = sq_loss(&net, &shifted);
            shifted[i] = input[i] - eps;
            let minus = sq_loss(&net, &shifted);
            let numeric = (plus - minus) / (2.0 * eps);
            assert!((d_in[i] - numeric).abs() < 1e-6);
        }
    }

    #[test]
    fn adam_leaves_params_alone_on_zero_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut net = Mlp::new(&[2, 4, 1], &mut rng);
        let before = net.params().to_vec();
        let grads = vec![0.0; before.len()];
        let mut adam = Adam::new(1e-2, before.len());
        adam.step(net.params_mut(), &grads);
        assert_eq!(net.params(), &before[..]);
    }

    #[test]
    fn clip_grad_norm_rescales() {
        let mut g = vec![3.0, 4.0];
        let norm = clip_grad_norm(&mut g, 1.0);
        assert!((norm - 5.0).abs() < 1e-12);
        assert!((g[0] - 0.6).abs() < 1e-12 && (g[1] - 0.8).abs() < 1e-12);
        let mut h = vec![0.3, 0.4];
        clip_grad_norm(&mut h, 1.0);
        assert_eq!(h, vec![0.3, 0.4]);
    }

    #[test]
    fn from_params_validates_length() {
        assert!(Mlp::from_params(&[2, 3], vec![0.0; 9]).is_some());
        assert!(Mlp::from_params(&[2, 3], vec![0.0; 8]).is_none());
    }
}
