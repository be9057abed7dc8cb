use rand::Rng;

use crate::autodiff::{take_feed, Feeds, Graph, NodeId, ParamId, ParamStore};
use crate::error::{Error, Result};
use crate::networks::spec::{Activation, NetworkSpec};
use crate::tensor::{Scalar, Tensor};

/// Dense network whose weights live in a [`ParamStore`] under `prefix`.
#[derive(Debug, Clone)]
pub struct Mlp {
    spec: NetworkSpec,
    prefix: String,
    layers: Vec<(ParamId, ParamId)>,
}

impl Mlp {
    /// Registers `{prefix}{i}.weight` (`[in, out]`) and `{prefix}{i}.bias`,
    /// both drawn from U(-1/sqrt(in), 1/sqrt(in)).
    pub fn new<T: Scalar>(
        spec: NetworkSpec,
        prefix: &str,
        store: &mut ParamStore<T>,
        rng: &mut impl Rng,
        trainable: bool,
    ) -> Result<Self> {
        let mut layers = Vec::with_capacity(spec.layers().len());
        for (i, l) in spec.layers().iter().enumerate() {
            let bound = 1.0 / (l.input as f64).sqrt();
            let w = Tensor::from_fn(&[l.input, l.output], |_| T::of(rng.random_range(-bound..bound)));
            let b = Tensor::from_fn(&[l.output], |_| T::of(rng.random_range(-bound..bound)));
            let wid = store.add(format!("{prefix}{i}.weight"), w, trainable)?;
            let bid = store.add(format!("{prefix}{i}.bias"), b, trainable)?;
            layers.push((wid, bid));
        }
        Ok(Mlp {
            spec,
            prefix: prefix.to_string(),
            layers,
        })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn prefix(&self) -> &str {
        &self.prefix
    }

    pub fn input_dim(&self) -> usize {
        self.spec.input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.spec.output_dim()
    }

    pub fn layer_params(&self) -> &[(ParamId, ParamId)] {
        &self.layers
    }

    pub fn param_ids(&self) -> Vec<ParamId> {
        self.layers.iter().flat_map(|&(w, b)| [w, b]).collect()
    }

    pub fn forward<T: Scalar>(&self, g: &mut Graph<T>, store: &ParamStore<T>, x: NodeId) -> Result<NodeId> {
        let (_, cols) = g.value(x).dims2()?;
        if cols != self.input_dim() {
            return Err(Error::shape("mlp forward", &[0, self.input_dim()], g.shape(x)));
        }
        let mut h = x;
        for (l, &(w, b)) in self.spec.layers().iter().zip(&self.layers) {
            let wn = g.param(store, w);
            let bn = g.param(store, b);
            let z = g.matmul(h, wn)?;
            let z = g.add_row(z, bn)?;
            h = match l.activation {
                Activation::Identity => z,
                Activation::Relu => g.relu(z),
                Activation::LeakyRelu(s) => g.leaky_relu(z, s),
                Activation::Tanh => g.tanh(z),
                Activation::Sigmoid => g.sigmoid(z),
            };
        }
        Ok(h)
    }

    /// Forward pass outside any caller graph.
    pub fn forward_value<T: Scalar>(&self, store: &ParamStore<T>, x: &Tensor<T>) -> Result<Tensor<T>> {
        let mut g = Graph::new();
        let xn = g.constant(x.clone());
        let y = self.forward(&mut g, store, xn)?;
        Ok(g.value(y).clone())
    }

    /// Named-feed forward: input `x`, output `y`.
    pub fn run<T: Scalar>(&self, store: &ParamStore<T>, feeds: &Feeds<T>) -> Result<Feeds<T>> {
        let x = take_feed(feeds, &["x"], "x", &[self.input_dim()])?;
        let y = self.forward_value(store, x)?;
        Ok(Feeds::from([("y".to_string(), y)]))
    }

    /// Copy this network's parameters from `from` into `to` under the same names.
    pub fn transplant<T: Scalar>(&self, from: &ParamStore<T>, to: &mut ParamStore<T>, trainable: bool) -> Result<Mlp> {
        let mut layers = Vec::with_capacity(self.layers.len());
        for &(w, b) in &self.layers {
            let wp = from.get(w);
            let bp = from.get(b);
            let wid = to.add(wp.name(), wp.value.clone(), trainable)?;
            let bid = to.add(bp.name(), bp.value.clone(), trainable)?;
            layers.push((wid, bid));
        }
        Ok(Mlp {
            spec: self.spec.clone(),
            prefix: self.prefix.clone(),
            layers,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::networks::spec::build_mlp_generator;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_weights_output_the_last_bias() {
        let spec = build_mlp_generator(2, &[4, 4], 2, false).unwrap();
        let mut store = ParamStore::<f64>::new();
        let net = Mlp::new(spec, "G.", &mut store, &mut ChaCha8Rng::seed_from_u64(1), true).unwrap();
        for &(w, _) in net.layer_params() {
            store.get_mut(w).value.data_mut().fill(0.0);
        }
        let last_bias = store.value(net.layer_params()[2].1).clone();
        let z = Tensor::from_fn(&[3, 2], |i| i as f64 - 2.5);
        let y = net.forward_value(&store, &z).unwrap();
        for r in 0..3 {
            assert_eq!(y.row(r), last_bias.data());
        }
    }

    #[test]
    fn linear_output_is_unbounded() {
        let spec = build_mlp_generator(1, &[1], 1, false).unwrap();
        let mut store = ParamStore::<f64>::new();
        let net = Mlp::new(spec, "G.", &mut store, &mut ChaCha8Rng::seed_from_u64(1), true).unwrap();
        let [(w0, b0), (w1, b1)] = net.layer_params() else { panic!() };
        store.get_mut(*w0).value = Tensor::new(vec![1, 1], vec![10.0]).unwrap();
        store.get_mut(*b0).value = Tensor::new(vec![1], vec![0.0]).unwrap();
        store.get_mut(*w1).value = Tensor::new(vec![1, 1], vec![10.0]).unwrap();
        store.get_mut(*b1).value = Tensor::new(vec![1], vec![0.0]).unwrap();
        let y = net.forward_value(&store, &Tensor::new(vec![1, 1], vec![5.0]).unwrap()).unwrap();
        assert_eq!(y.data(), &[500.0]);
    }

    #[test]
    fn run_checks_names_and_shapes() {
        let spec = build_mlp_generator(2, &[3], 2, true).unwrap();
        let mut store = ParamStore::<f64>::new();
        let net = Mlp::new(spec, "G.", &mut store, &mut ChaCha8Rng::seed_from_u64(1), true).unwrap();
        let ok = Feeds::from([("x".to_string(), Tensor::zeros(&[5, 2]))]);
        assert_eq!(net.run(&store, &ok).unwrap()["y"].shape(), &[5, 2]);
        let bad = Feeds::from([("x".to_string(), Tensor::zeros(&[5, 3]))]);
        assert!(net.run(&store, &bad).is_err());
        let unknown = Feeds::from([("z".to_string(), Tensor::zeros(&[5, 2]))]);
        assert!(matches!(net.run(&store, &unknown), Err(Error::UnknownInput(_))));
    }
}
