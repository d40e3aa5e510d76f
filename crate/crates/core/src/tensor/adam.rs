use super::{Real, Tensor};

/// Adam with bias correction. Holds first/second moment buffers per
/// parameter; `step` consumes the gradients currently stored on the
/// parameters and updates their data in place.
pub struct Adam<T: Real> {
    params: Vec<Tensor<T>>,
    m: Vec<Vec<T>>,
    v: Vec<Vec<T>>,
    step_count: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl<T: Real> Adam<T> {
    pub fn new(params: Vec<Tensor<T>>, lr: f64, beta1: f64) -> Self {
        Self::with_hyperparams(params, lr, beta1, 0.999, 1e-8)
    }

    pub fn with_hyperparams(
        params: Vec<Tensor<T>>,
        lr: f64,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    ) -> Self {
        let m = params.iter().map(|p| vec![T::zero(); p.numel()]).collect();
        let v = params.iter().map(|p| vec![T::zero(); p.numel()]).collect();
        Adam {
            params,
            m,
            v,
            step_count: 0,
            lr,
            beta1,
            beta2,
            epsilon,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn zero_grad(&self) {
        for p in &self.params {
            p.zero_grad();
        }
    }

    /// One bias-corrected update; parameters without a gradient are
    /// treated as having gradient zero.
    pub fn step(&mut self) {
        self.step_count += 1;
        let b1 = T::from_f64(self.beta1);
        let b2 = T::from_f64(self.beta2);
        let one = T::one();
        let eps = T::from_f64(self.epsilon);
        let bc1 = T::from_f64(1.0 - self.beta1.powi(self.step_count as i32));
        let bc2 = T::from_f64(1.0 - self.beta2.powi(self.step_count as i32));
        let lr = T::from_f64(self.lr);
        for (i, p) in self.params.iter().enumerate() {
            let m = &mut self.m[i];
            let v = &mut self.v[i];
            p.with_grad(|grad| {
                for j in 0..m.len() {
                    let g = grad.map_or(T::zero(), |g| g[j]);
                    m[j] = b1 * m[j] + (one - b1) * g;
                    v[j] = b2 * v[j] + (one - b2) * g * g;
                }
            });
            p.update_data(|data| {
                for j in 0..data.len() {
                    let m_hat = m[j] / bc1;
                    let v_hat = v[j] / bc2;
                    data[j] -= lr * m_hat / (v_hat.sqrt() + eps);
                }
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params_unchanged() {
        let p = Tensor::<f64>::param(&[3], vec![1.0, -2.0, 0.5]).unwrap();
        let mut opt = Adam::new(vec![p.clone()], 1e-3, 0.9);
        opt.step();
        assert_eq!(p.to_vec(), vec![1.0, -2.0, 0.5]);
        assert_eq!(opt.step_count(), 1);
    }

    #[test]
    fn first_step_moves_by_about_lr() {
        let p = Tensor::<f64>::param(&[1], vec![2.0]).unwrap();
        let mut opt = Adam::new(vec![p.clone()], 1e-4, 0.5);
        let loss = p.sum_all();
        loss.backward().unwrap();
        assert_eq!(p.grad().unwrap(), vec![1.0]);
        opt.step();
        let moved = 2.0 - p.to_vec()[0];
        assert!((moved - 1e-4).abs() < 1e-9, "moved {moved}");
    }

    #[test]
    fn converges_on_quadratic() {
        let w = Tensor::<f64>::param(&[1], vec![1.0]).unwrap();
        let mut opt = Adam::new(vec![w.clone()], 1e-3, 0.9);
        let mut first = None;
        for _ in 0..1000 {
            opt.zero_grad();
            let loss = w.square().sum_all();
            first.get_or_insert(loss.item().unwrap());
            loss.backward().unwrap();
            opt.step();
        }
        let wv = w.to_vec()[0];
        assert!(wv.abs() < 0.9, "w {wv}");
        let final_loss = wv * wv;
        assert!(final_loss < first.unwrap());
    }

    #[test]
    fn moments_persist_across_zero_grad() {
        let p = Tensor::<f64>::param(&[1], vec![0.0]).unwrap();
        let mut opt = Adam::new(vec![p.clone()], 1e-2, 0.9);
        let loss = p.sum_all();
        loss.backward().unwrap();
        opt.step();
        opt.zero_grad();
        // No new gradient: momentum keeps moving the parameter.
        let before = p.to_vec()[0];
        opt.step();
        assert!(p.to_vec()[0] < before);
    }
}
