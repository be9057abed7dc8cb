use rand::seq::SliceRandom;

use crate::autodiff::{Adam, AdamConfig, ExperimentRng, Graph, ParamStore};
use crate::error::{Error, Result};
use crate::networks::{Activation, LayerSpec, Mlp, NetworkSpec};
use crate::tensor::Tensor;

/// Small softmax classifier standing in for an Inception network when scoring samples.
#[derive(Debug, Clone)]
pub struct ProxyClassifier {
    net: Mlp,
    store: ParamStore<f64>,
    classes: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifierConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            hidden: 128,
            epochs: 5,
            batch_size: 64,
            lr: 1e-3,
        }
    }
}

impl ProxyClassifier {
    /// Train on `[n, d]` rows with integer labels using cross-entropy.
    pub fn train(rows: &Tensor<f64>, labels: &[u8], config: &ClassifierConfig, rng: &ExperimentRng) -> Result<Self> {
        let (n, d) = rows.dims2()?;
        if labels.len() != n {
            return Err(Error::invalid(format!("{} labels for {n} rows", labels.len())));
        }
        let classes = labels.iter().copied().max().map_or(0, |m| m as usize + 1);
        if classes < 2 {
            return Err(Error::invalid("classifier needs at least two classes"));
        }
        let spec = NetworkSpec::new(vec![
            LayerSpec { input: d, output: config.hidden, activation: Activation::Relu },
            LayerSpec { input: config.hidden, output: classes, activation: Activation::Identity },
        ])?;
        let mut store = ParamStore::new();
        let net = Mlp::new(spec, "C.", &mut store, &mut rng.stream("classifier.init"), true)?;
        let mut opt = Adam::new(&store, net.param_ids(), AdamConfig { lr: config.lr, beta1: 0.9, ..AdamConfig::default() });
        let mut order: Vec<usize> = (0..n).collect();
        let mut shuffle = rng.stream("classifier.shuffle");
        for _ in 0..config.epochs {
            order.shuffle(&mut shuffle);
            for chunk in order.chunks(config.batch_size.max(1)) {
                let x = rows.gather_rows(chunk)?;
                let onehot = Tensor::from_fn(&[chunk.len(), classes], |i| {
                    if labels[chunk[i / classes]] as usize == i % classes {
                        1.0
                    } else {
                        0.0
                    }
                });
                let mut g = Graph::new();
                let xn = g.constant(x);
                let logits = net.forward(&mut g, &store, xn)?;
                let logp = g.log_softmax(logits)?;
                let t = g.constant(onehot);
                let picked = g.mul(logp, t)?;
                let total = g.sum(picked);
                let loss = g.scale(total, -1.0 / chunk.len() as f64);
                opt.zero_grad(&mut store);
                g.backward(loss, &mut store)?;
                opt.step(&mut store)?;
            }
        }
        Ok(ProxyClassifier { net, store, classes })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    /// Class distribution per row.
    pub fn predict_proba(&self, rows: &Tensor<f64>) -> Result<Vec<Vec<f64>>> {
        let mut g = Graph::new();
        let x = g.constant(rows.clone());
        let logits = self.net.forward(&mut g, &self.store, x)?;
        let logp = g.log_softmax(logits)?;
        let v = g.value(logp);
        Ok((0..v.shape()[0])
            .map(|r| {
                let p: Vec<f64> = v.row(r).iter().map(|l| l.exp()).collect();
                let s: f64 = p.iter().sum();
                p.into_iter().map(|x| x / s).collect()
            })
            .collect())
    }

    pub fn accuracy(&self, rows: &Tensor<f64>, labels: &[u8]) -> Result<f64> {
        let probs = self.predict_proba(rows)?;
        let hits = probs
            .iter()
            .zip(labels)
            .filter(|(p, &l)| {
                let best = p
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |a, (i, &v)| if v > a.1 { (i, v) } else { a })
                    .0;
                best == l as usize
            })
            .count();
        Ok(hits as f64 / labels.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separates_two_blobs() {
        let rows = Tensor::from_fn(&[40, 2], |i| {
            let r = i / 2;
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            sign * (0.5 + (i % 7) as f64 * 0.05)
        });
        let labels: Vec<u8> = (0..40).map(|r| (r % 2) as u8).collect();
        let cfg = ClassifierConfig { hidden: 8, epochs: 60, batch_size: 8, lr: 1e-2 };
        let clf = ProxyClassifier::train(&rows, &labels, &cfg, &ExperimentRng::new(1)).unwrap();
        assert_eq!(clf.classes(), 2);
        assert!(clf.accuracy(&rows, &labels).unwrap() > 0.95);
        for p in clf.predict_proba(&rows).unwrap() {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
