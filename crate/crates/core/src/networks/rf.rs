//! Autoencoder and the discriminator that reads frozen encoder features.
//!
//! ```text
//!   x ──> encoder (frozen) ──> h1 ──┐
//!   │                               ├─ h1·w1 + h2·w2 + b ──> logit ──> Y = σ(logit)
//!   └──> discriminator body ─> h2 ──┘
//! ```
//!
//! Gradients of the discriminator loss reach `w1`, `w2`, `b` and the body,
//! never the encoder.

use rand::Rng;

use crate::autodiff::{sigmoid, take_feed, ExperimentRng, Feeds, Graph, NodeId, ParamId, ParamStore};
use crate::error::{Error, Result};
use crate::networks::mlp::Mlp;
use crate::networks::spec::NetworkSpec;
use crate::tensor::{Scalar, Tensor};

pub const ENCODER_PREFIX: &str = "E.";
pub const DECODER_PREFIX: &str = "Dec.";
pub const BODY_PREFIX: &str = "D.";
pub const HEAD_PREFIX: &str = "head.";
pub const GENERATOR_PREFIX: &str = "G.";

#[derive(Debug, Clone)]
pub struct Autoencoder {
    pub encoder: Mlp,
    pub decoder: Mlp,
}

/// Register encoder (`E.`) and decoder (`Dec.`) parameters; the code width must chain.
pub fn build_autoencoder<T: Scalar>(
    enc_spec: NetworkSpec,
    dec_spec: NetworkSpec,
    store: &mut ParamStore<T>,
    rng: &mut impl Rng,
) -> Result<Autoencoder> {
    if dec_spec.input_dim() != enc_spec.output_dim() {
        return Err(Error::invalid(format!(
            "decoder takes {} inputs but encoder emits {}",
            dec_spec.input_dim(),
            enc_spec.output_dim()
        )));
    }
    if dec_spec.output_dim() != enc_spec.input_dim() {
        return Err(Error::invalid(format!(
            "decoder emits {} values but encoder reads {}",
            dec_spec.output_dim(),
            enc_spec.input_dim()
        )));
    }
    let encoder = Mlp::new(enc_spec, ENCODER_PREFIX, store, rng, true)?;
    let decoder = Mlp::new(dec_spec, DECODER_PREFIX, store, rng, true)?;
    Ok(Autoencoder { encoder, decoder })
}

impl Autoencoder {
    pub fn reconstruct<T: Scalar>(&self, g: &mut Graph<T>, store: &ParamStore<T>, x: NodeId) -> Result<NodeId> {
        let code = self.encoder.forward(g, store, x)?;
        self.decoder.forward(g, store, code)
    }

    pub fn reconstruct_value<T: Scalar>(&self, store: &ParamStore<T>, x: &Tensor<T>) -> Result<Tensor<T>> {
        let code = self.encoder.forward_value(store, x)?;
        self.decoder.forward_value(store, &code)
    }
}

/// Graph nodes produced by one discriminator pass.
#[derive(Debug, Clone, Copy)]
pub struct RfOutputs {
    pub h1: Option<NodeId>,
    pub h2: NodeId,
    /// `h1·w1`, shape `[n, 1]`
    pub repr_term: Option<NodeId>,
    /// `h2·w2`, shape `[n, 1]`
    pub disc_term: NodeId,
    /// pre-sigmoid head output, shape `[n, 1]`
    pub logit: NodeId,
}

#[derive(Debug, Clone)]
pub struct RfDiscriminator {
    pub body: Mlp,
    pub encoder: Option<Mlp>,
    pub w_disc: ParamId,
    pub w_repr: Option<ParamId>,
    pub bias: ParamId,
}

impl RfDiscriminator {
    /// Build body `D.` and head `head.`; `encoder` must already be in `store` and frozen.
    ///
    /// Initial values come from the streams `init.D` and `init.head`, plus
    /// `init.head.repr` for `w1`, so a run without an encoder draws exactly
    /// the same body and `w2`/`b` values as one with it.
    pub fn new<T: Scalar>(
        body_spec: NetworkSpec,
        encoder: Option<Mlp>,
        store: &mut ParamStore<T>,
        rng: &ExperimentRng,
    ) -> Result<Self> {
        if let Some(enc) = &encoder {
            if enc.input_dim() != body_spec.input_dim() {
                return Err(Error::invalid(format!(
                    "encoder reads {} inputs, discriminator reads {}",
                    enc.input_dim(),
                    body_spec.input_dim()
                )));
            }
            if enc.param_ids().iter().any(|&id| store.get(id).trainable()) {
                return Err(Error::invalid("encoder parameters must be frozen"));
            }
        }
        let d2 = body_spec.output_dim();
        let d1 = encoder.as_ref().map_or(0, Mlp::output_dim);
        let body = Mlp::new(body_spec, BODY_PREFIX, store, &mut rng.stream("init.D"), true)?;

        // per-block fan-in, so w2 and b do not depend on whether an encoder is attached
        let bound = 1.0 / (d2 as f64).sqrt();
        let mut head_rng = rng.stream("init.head");
        let w_disc = Tensor::from_fn(&[d2, 1], |_| T::of(head_rng.random_range(-bound..bound)));
        let w_disc = store.add(format!("{HEAD_PREFIX}w2"), w_disc, true)?;
        let bias = Tensor::from_fn(&[1], |_| T::of(head_rng.random_range(-bound..bound)));
        let bias = store.add(format!("{HEAD_PREFIX}b"), bias, true)?;
        let w_repr = if d1 > 0 {
            let mut r = rng.stream("init.head.repr");
            let bound = 1.0 / (d1 as f64).sqrt();
            let w = Tensor::from_fn(&[d1, 1], |_| T::of(r.random_range(-bound..bound)));
            Some(store.add(format!("{HEAD_PREFIX}w1"), w, true)?)
        } else {
            None
        };
        Ok(RfDiscriminator {
            body,
            encoder,
            w_disc,
            w_repr,
            bias,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.body.input_dim()
    }

    /// Body and head parameters (everything a discriminator step updates).
    pub fn trainable_ids(&self) -> Vec<ParamId> {
        let mut ids = self.body.param_ids();
        ids.push(self.w_disc);
        ids.extend(self.w_repr);
        ids.push(self.bias);
        ids
    }

    pub fn head_ids(&self) -> Vec<ParamId> {
        let mut ids = vec![self.w_disc];
        ids.extend(self.w_repr);
        ids.push(self.bias);
        ids
    }

    pub fn forward<T: Scalar>(&self, g: &mut Graph<T>, store: &ParamStore<T>, x: NodeId) -> Result<RfOutputs> {
        let h2 = self.body.forward(g, store, x)?;
        let w2 = g.param(store, self.w_disc);
        let disc_term = g.matmul(h2, w2)?;
        let (h1, repr_term, pre) = match (&self.encoder, self.w_repr) {
            (Some(enc), Some(w_repr)) => {
                let h1 = enc.forward(g, store, x)?;
                let w1 = g.param(store, w_repr);
                let repr = g.matmul(h1, w1)?;
                let pre = g.add(disc_term, repr)?;
                (Some(h1), Some(repr), pre)
            }
            _ => (None, None, disc_term),
        };
        let b = g.param(store, self.bias);
        let logit = g.add_row(pre, b)?;
        Ok(RfOutputs {
            h1,
            h2,
            repr_term,
            disc_term,
            logit,
        })
    }

    /// Named-feed forward: input `x`; outputs `h1` (when an encoder is attached), `h2`, `logit`, `y`.
    pub fn run<T: Scalar>(&self, store: &ParamStore<T>, feeds: &Feeds<T>) -> Result<Feeds<T>> {
        let x = take_feed(feeds, &["x"], "x", &[self.input_dim()])?;
        let mut g = Graph::new();
        let xn = g.constant(x.clone());
        let out = self.forward(&mut g, store, xn)?;
        let mut result = Feeds::new();
        if let Some(h1) = out.h1 {
            result.insert("h1".to_string(), g.value(h1).clone());
        }
        result.insert("h2".to_string(), g.value(out.h2).clone());
        let logit = g.value(out.logit).clone();
        result.insert("y".to_string(), logit.map(sigmoid));
        result.insert("logit".to_string(), logit);
        Ok(result)
    }
}
