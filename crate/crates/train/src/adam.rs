//! Adam with stepwise learning-rate decay.

#[derive(Debug, Clone)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Multiply the learning rate by `decay_factor` every `decay_every`
    /// steps of the epoch counter fed to [`Adam::step`].
    pub decay_factor: f64,
    pub decay_every: usize,
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl Adam {
    pub fn new(lr: f64, decay_factor: f64, decay_every: usize, param_count: usize) -> Adam {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            decay_factor,
            decay_every,
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
            t: 0,
        }
    }

    fn effective_lr(&self, epoch: usize) -> f64 {
        if self.decay_every == 0 {
            return self.lr;
        }
        self.lr * self.decay_factor.powi((epoch / self.decay_every) as i32)
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64], epoch: usize) {
        debug_assert_eq!(params.len(), grads.len());
        self.t += 1;
        let lr = self.effective_lr(epoch);
        let b1t = 1.0 - self.beta1.powi(self.t as i32);
        let b2t = 1.0 - self.beta2.powi(self.t as i32);
        for k in 0..params.len() {
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * grads[k];
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * grads[k] * grads[k];
            let mhat = self.m[k] / b1t;
            let vhat = self.v[k] / b2t;
            params[k] -= lr * mhat / (vhat.sqrt() + self.epsilon);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_a_quadratic() {
        // f(x) = (x - 3)^2, gradient 2(x - 3).
        let mut params = vec![0.0];
        let mut opt = Adam::new(0.05, 1.0, 0, 1);
        for epoch in 0..2000 {
            let g = 2.0 * (params[0] - 3.0);
            opt.step(&mut params, &[g], epoch);
        }
        assert!((params[0] - 3.0).abs() < 1e-3, "got {}", params[0]);
    }

    #[test]
    fn decay_halves_learning_rate() {
        let opt = Adam::new(1e-3, 0.5, 1000, 1);
        assert_eq!(opt.effective_lr(0), 1e-3);
        assert_eq!(opt.effective_lr(999), 1e-3);
        assert_eq!(opt.effective_lr(1000), 5e-4);
        assert_eq!(opt.effective_lr(2500), 2.5e-4);
    }
}
