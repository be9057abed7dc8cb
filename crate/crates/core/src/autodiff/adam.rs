use serde::{Deserialize, Serialize};

use crate::autodiff::params::{ParamId, ParamStore, Parameter};
use crate::error::{Error, Result};
use crate::tensor::{Scalar, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    /// DCGAN settings.
    fn default() -> Self {
        AdamConfig {
            lr: 2e-4,
            beta1: 0.5,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn with_lr(lr: f64) -> Self {
        AdamConfig { lr, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.lr >= 0.0
            && self.lr.is_finite()
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.eps > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("bad Adam hyperparameters {self:?}")))
        }
    }
}

/// First/second moment estimates for one parameter.
#[derive(Debug, Clone)]
pub struct AdamState<T> {
    pub m: Tensor<T>,
    pub v: Tensor<T>,
    pub t: u64,
    pub config: AdamConfig,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(shape: &[usize], config: AdamConfig) -> Self {
        AdamState {
            m: Tensor::zeros(shape),
            v: Tensor::zeros(shape),
            t: 0,
            config,
        }
    }

    /// One bias-corrected Adam update from `param.grad`. Frozen parameters are left untouched.
    pub fn step(&mut self, param: &mut Parameter<T>) -> Result<()> {
        if !param.trainable() {
            return Ok(());
        }
        if self.m.shape() != param.value.shape() {
            return Err(Error::shape("adam_step", self.m.shape(), param.value.shape()));
        }
        param
            .grad
            .check_finite(&format!("gradient of `{}`", param.name()))?;

        self.t += 1;
        let c = self.config;
        let b1 = T::of(c.beta1);
        let b2 = T::of(c.beta2);
        let one = T::one();
        let bias1 = T::of(1.0 - c.beta1.powi(self.t as i32));
        let bias2 = T::of(1.0 - c.beta2.powi(self.t as i32));
        let lr = T::of(c.lr);
        let eps = T::of(c.eps);

        let grads = param.grad.data();
        let values = param.value.data_mut();
        let ms = self.m.data_mut();
        let vs = self.v.data_mut();
        for i in 0..grads.len() {
            let g = grads[i];
            ms[i] = b1 * ms[i] + (one - b1) * g;
            vs[i] = b2 * vs[i] + (one - b2) * g * g;
            let m_hat = ms[i] / bias1;
            let v_hat = vs[i] / bias2;
            values[i] = values[i] - lr * m_hat / (v_hat.sqrt() + eps);
        }
        Ok(())
    }
}

/// Adam over a fixed group of parameters in a [`ParamStore`].
#[derive(Debug, Clone)]
pub struct Adam<T> {
    states: Vec<(ParamId, AdamState<T>)>,
}

impl<T: Scalar> Adam<T> {
    pub fn new(store: &ParamStore<T>, ids: impl IntoIterator<Item = ParamId>, config: AdamConfig) -> Self {
        let states = ids
            .into_iter()
            .map(|id| (id, AdamState::new(store.value(id).shape(), config)))
            .collect();
        Adam { states }
    }

    pub fn ids(&self) -> Vec<ParamId> {
        self.states.iter().map(|(id, _)| *id).collect()
    }

    pub fn steps_taken(&self) -> u64 {
        self.states.first().map(|(_, s)| s.t).unwrap_or(0)
    }

    pub fn zero_grad(&self, store: &mut ParamStore<T>) {
        for (id, _) in &self.states {
            store.get_mut(*id).zero_grad();
        }
    }

    pub fn step(&mut self, store: &mut ParamStore<T>) -> Result<()> {
        for (id, state) in &mut self.states {
            state.step(store.get_mut(*id))?;
        }
        Ok(())
    }
}
