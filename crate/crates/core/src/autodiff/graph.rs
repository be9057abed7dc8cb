//! Define-by-run compute graph.
//!
//! Every operation is evaluated eagerly and recorded as a node. Reverse-mode
//! differentiation ([`Graph::grad`]) appends the vector-Jacobian products as
//! ordinary nodes, so a gradient can itself be differentiated again. The
//! gradient penalties rely on this.

use std::collections::BTreeMap;

use crate::autodiff::params::{ParamId, ParamStore};
use crate::error::{Error, Result};
use crate::tensor::{Scalar, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(usize);

#[derive(Debug, Clone)]
pub(crate) enum Op {
    Leaf,
    MatMul { a: NodeId, b: NodeId, ta: bool, tb: bool },
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Div(NodeId, NodeId),
    /// Division that yields 0 wherever the denominator is exactly 0.
    SafeDiv(NodeId, NodeId),
    Neg(NodeId),
    Scale(NodeId, f64),
    AddScalar(NodeId),
    /// `[n, m] + [m]`
    AddRow(NodeId, NodeId),
    /// `[n, m] -> [m]`
    SumRows(NodeId),
    /// `[m] -> [n, m]`
    BroadcastRows(NodeId),
    /// `[n, m] -> [n, 1]`
    SumCols(NodeId),
    /// `[n, 1] -> [n, m]`
    BroadcastCols(NodeId),
    Sum(NodeId),
    Mean(NodeId),
    /// one-element tensor -> shape
    BroadcastScalar(NodeId),
    Reshape(NodeId),
    Sigmoid(NodeId),
    Tanh(NodeId),
    LeakyRelu(NodeId, f64),
    Log(NodeId),
    LogSigmoid(NodeId),
    Exp(NodeId),
    Square(NodeId),
    Sqrt(NodeId),
    /// column-wise concatenation of rank-2 tensors
    Concat(Vec<NodeId>),
    SliceCols { a: NodeId, start: usize },
    PadCols { a: NodeId, start: usize },
    LogSoftmax(NodeId),
}

impl Op {
    fn inputs(&self) -> Vec<NodeId> {
        use Op::*;
        match self {
            Leaf => vec![],
            MatMul { a, b, .. } => vec![*a, *b],
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | SafeDiv(a, b) | AddRow(a, b) => {
                vec![*a, *b]
            }
            Neg(a)
            | Scale(a, _)
            | AddScalar(a)
            | SumRows(a)
            | BroadcastRows(a)
            | SumCols(a)
            | BroadcastCols(a)
            | Sum(a)
            | Mean(a)
            | BroadcastScalar(a)
            | Reshape(a)
            | Sigmoid(a)
            | Tanh(a)
            | LeakyRelu(a, _)
            | Log(a)
            | LogSigmoid(a)
            | Exp(a)
            | Square(a)
            | Sqrt(a)
            | SliceCols { a, .. }
            | PadCols { a, .. }
            | LogSoftmax(a) => vec![*a],
            Concat(parts) => parts.clone(),
        }
    }
}

struct Node<T> {
    value: Tensor<T>,
    op: Op,
}

/// Named input tensors for a network forward pass.
pub type Feeds<T> = BTreeMap<String, Tensor<T>>;

/// Fetch feed `name`, checking its trailing dimensions, and reject any feed not in `allowed`.
pub fn take_feed<'a, T: Scalar>(
    feeds: &'a Feeds<T>,
    allowed: &[&str],
    name: &str,
    trailing: &[usize],
) -> Result<&'a Tensor<T>> {
    if let Some(unknown) = feeds.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::UnknownInput(unknown.clone()));
    }
    let t = feeds
        .get(name)
        .ok_or_else(|| Error::MissingInput(name.to_string()))?;
    let shape = t.shape();
    if shape.len() != trailing.len() + 1 || shape[1..] != *trailing {
        let mut expected = vec![shape.first().copied().unwrap_or(0)];
        expected.extend_from_slice(trailing);
        return Err(Error::shape("forward", &expected, shape));
    }
    Ok(t)
}

pub struct Graph<T> {
    nodes: Vec<Node<T>>,
    params: Vec<(ParamId, NodeId)>,
}

impl<T: Scalar> Default for Graph<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Graph<T> {
    pub fn new() -> Self {
        Graph {
            nodes: Vec::new(),
            params: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor<T>, op: Op) -> NodeId {
        self.nodes.push(Node { value, op });
        NodeId(self.nodes.len() - 1)
    }

    pub fn value(&self, id: NodeId) -> &Tensor<T> {
        &self.nodes[id.0].value
    }

    pub fn shape(&self, id: NodeId) -> &[usize] {
        self.nodes[id.0].value.shape()
    }

    /// A leaf holding a fixed tensor (data, noise, masks).
    pub fn constant(&mut self, value: Tensor<T>) -> NodeId {
        self.push(value, Op::Leaf)
    }

    pub fn scalar(&mut self, value: f64) -> NodeId {
        self.constant(Tensor::scalar(T::of(value)))
    }

    /// Leaf for a stored parameter; repeated calls return the same node.
    pub fn param(&mut self, store: &ParamStore<T>, id: ParamId) -> NodeId {
        if let Some(&(_, node)) = self.params.iter().find(|(p, _)| *p == id) {
            return node;
        }
        let node = self.push(store.value(id).clone(), Op::Leaf);
        self.params.push((id, node));
        node
    }

    pub fn param_nodes(&self) -> &[(ParamId, NodeId)] {
        &self.params
    }

    // ---- forward ops ----

    pub fn matmul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.matmul_t(a, b, false, false)
    }

    pub fn matmul_t(&mut self, a: NodeId, b: NodeId, ta: bool, tb: bool) -> Result<NodeId> {
        let v = self.value(a).matmul(self.value(b), ta, tb)?;
        Ok(self.push(v, Op::MatMul { a, b, ta, tb }))
    }

    fn binary(
        &mut self,
        a: NodeId,
        b: NodeId,
        name: &'static str,
        op: Op,
        f: impl Fn(T, T) -> T,
    ) -> Result<NodeId> {
        let v = self.value(a).zip_map(self.value(b), name, f)?;
        Ok(self.push(v, op))
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.binary(a, b, "add", Op::Add(a, b), |x, y| x + y)
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.binary(a, b, "sub", Op::Sub(a, b), |x, y| x - y)
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.binary(a, b, "mul", Op::Mul(a, b), |x, y| x * y)
    }

    pub fn div(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.binary(a, b, "div", Op::Div(a, b), |x, y| x / y)
    }

    pub fn safe_div(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.binary(a, b, "safe_div", Op::SafeDiv(a, b), |x, y| {
            if y == T::zero() {
                T::zero()
            } else {
                x / y
            }
        })
    }

    fn unary(&mut self, a: NodeId, op: Op, f: impl Fn(T) -> T) -> NodeId {
        let v = self.value(a).map(f);
        self.push(v, op)
    }

    pub fn neg(&mut self, a: NodeId) -> NodeId {
        self.unary(a, Op::Neg(a), |x| -x)
    }

    pub fn scale(&mut self, a: NodeId, c: f64) -> NodeId {
        let ct = T::of(c);
        self.unary(a, Op::Scale(a, c), move |x| x * ct)
    }

    pub fn add_scalar(&mut self, a: NodeId, c: f64) -> NodeId {
        let ct = T::of(c);
        self.unary(a, Op::AddScalar(a), move |x| x + ct)
    }

    pub fn sigmoid(&mut self, a: NodeId) -> NodeId {
        self.unary(a, Op::Sigmoid(a), sigmoid)
    }

    pub fn tanh(&mut self, a: NodeId) -> NodeId {
        self.unary(a, Op::Tanh(a), |x| x.tanh())
    }

    pub fn relu(&mut self, a: NodeId) -> NodeId {
        self.leaky_relu(a, 0.0)
    }

    pub fn leaky_relu(&mut self, a: NodeId, slope: f64) -> NodeId {
        let s = T::of(slope);
        self.unary(a, Op::LeakyRelu(a, slope), move |x| if x > T::zero() { x } else { x * s })
    }

    pub fn log(&mut self, a: NodeId) -> NodeId {
        self.unary(a, Op::Log(a), |x| x.ln())
    }

    /// `ln(sigmoid(x))`, stable for large |x|.
    pub fn log_sigmoid(&mut self, a: NodeId) -> NodeId {
        self.unary(a, Op::LogSigmoid(a), log_sigmoid)
    }

    pub fn exp(&mut self, a: NodeId) -> NodeId {
        self.unary(a, Op::Exp(a), |x| x.exp())
    }

    pub fn square(&mut self, a: NodeId) -> NodeId {
        self.unary(a, Op::Square(a), |x| x * x)
    }

    pub fn sqrt(&mut self, a: NodeId) -> NodeId {
        self.unary(a, Op::Sqrt(a), |x| x.sqrt())
    }

    pub fn sum(&mut self, a: NodeId) -> NodeId {
        let v = Tensor::scalar(self.value(a).sum());
        self.push(v, Op::Sum(a))
    }

    pub fn mean(&mut self, a: NodeId) -> NodeId {
        let v = Tensor::scalar(self.value(a).mean());
        self.push(v, Op::Mean(a))
    }

    pub fn broadcast_scalar(&mut self, s: NodeId, shape: &[usize]) -> Result<NodeId> {
        let v = self.value(s).item()?;
        Ok(self.push(Tensor::full(shape, v), Op::BroadcastScalar(s)))
    }

    pub fn reshape(&mut self, a: NodeId, shape: &[usize]) -> Result<NodeId> {
        let v = self.value(a).clone().reshape(shape)?;
        Ok(self.push(v, Op::Reshape(a)))
    }

    pub fn add_row(&mut self, x: NodeId, bias: NodeId) -> Result<NodeId> {
        let (n, m) = self.value(x).dims2()?;
        let b = self.value(bias);
        if b.shape() != [m] {
            return Err(Error::shape("add_row", &[m], b.shape()));
        }
        let b = b.data().to_vec();
        let mut v = self.value(x).clone();
        for r in 0..n {
            for (o, &bv) in v.data_mut()[r * m..(r + 1) * m].iter_mut().zip(&b) {
                *o = *o + bv;
            }
        }
        Ok(self.push(v, Op::AddRow(x, bias)))
    }

    pub fn sum_rows(&mut self, x: NodeId) -> Result<NodeId> {
        let (n, m) = self.value(x).dims2()?;
        let xv = self.value(x).data();
        let mut out = vec![T::zero(); m];
        for r in 0..n {
            for (o, &v) in out.iter_mut().zip(&xv[r * m..(r + 1) * m]) {
                *o = *o + v;
            }
        }
        Ok(self.push(Tensor::new(vec![m], out)?, Op::SumRows(x)))
    }

    pub fn broadcast_rows(&mut self, v: NodeId, n: usize) -> Result<NodeId> {
        let vv = self.value(v);
        if vv.rank() != 1 {
            return Err(Error::shape("broadcast_rows", &[0], vv.shape()));
        }
        let m = vv.len();
        let data = vv.data().repeat(n);
        Ok(self.push(Tensor::new(vec![n, m], data)?, Op::BroadcastRows(v)))
    }

    pub fn sum_cols(&mut self, x: NodeId) -> Result<NodeId> {
        let (n, m) = self.value(x).dims2()?;
        let xv = self.value(x).data();
        let out = (0..n)
            .map(|r| xv[r * m..(r + 1) * m].iter().copied().sum())
            .collect();
        Ok(self.push(Tensor::new(vec![n, 1], out)?, Op::SumCols(x)))
    }

    pub fn broadcast_cols(&mut self, v: NodeId, m: usize) -> Result<NodeId> {
        let (n, c) = self.value(v).dims2()?;
        if c != 1 {
            return Err(Error::shape("broadcast_cols", &[n, 1], &[n, c]));
        }
        let vv = self.value(v).data();
        let data = vv.iter().flat_map(|&x| std::iter::repeat_n(x, m)).collect();
        Ok(self.push(Tensor::new(vec![n, m], data)?, Op::BroadcastCols(v)))
    }

    pub fn concat(&mut self, parts: &[NodeId]) -> Result<NodeId> {
        let first = *parts.first().ok_or_else(|| Error::invalid("concat of nothing"))?;
        let (n, _) = self.value(first).dims2()?;
        let mut widths = Vec::with_capacity(parts.len());
        for &p in parts {
            let (r, c) = self.value(p).dims2()?;
            if r != n {
                return Err(Error::shape("concat", &[n, c], &[r, c]));
            }
            widths.push(c);
        }
        let total: usize = widths.iter().sum();
        let mut data = Vec::with_capacity(n * total);
        for r in 0..n {
            for (&p, &w) in parts.iter().zip(&widths) {
                data.extend_from_slice(&self.value(p).data()[r * w..(r + 1) * w]);
            }
        }
        Ok(self.push(Tensor::new(vec![n, total], data)?, Op::Concat(parts.to_vec())))
    }

    pub fn slice_cols(&mut self, a: NodeId, start: usize, end: usize) -> Result<NodeId> {
        let (n, m) = self.value(a).dims2()?;
        if start >= end || end > m {
            return Err(Error::invalid(format!("column slice {start}..{end} of width {m}")));
        }
        let av = self.value(a).data();
        let w = end - start;
        let mut data = Vec::with_capacity(n * w);
        for r in 0..n {
            data.extend_from_slice(&av[r * m + start..r * m + end]);
        }
        Ok(self.push(Tensor::new(vec![n, w], data)?, Op::SliceCols { a, start }))
    }

    pub fn pad_cols(&mut self, a: NodeId, start: usize, total: usize) -> Result<NodeId> {
        let (n, w) = self.value(a).dims2()?;
        if start + w > total {
            return Err(Error::invalid(format!("pad {w} columns at {start} into {total}")));
        }
        let av = self.value(a).data();
        let mut data = vec![T::zero(); n * total];
        for r in 0..n {
            data[r * total + start..r * total + start + w].copy_from_slice(&av[r * w..(r + 1) * w]);
        }
        Ok(self.push(Tensor::new(vec![n, total], data)?, Op::PadCols { a, start }))
    }

    /// Row-wise log-softmax of a rank-2 tensor.
    pub fn log_softmax(&mut self, a: NodeId) -> Result<NodeId> {
        let (n, m) = self.value(a).dims2()?;
        let av = self.value(a).data();
        let mut data = Vec::with_capacity(n * m);
        for r in 0..n {
            let row = &av[r * m..(r + 1) * m];
            let max = row.iter().copied().fold(T::neg_infinity(), T::max);
            let lse = max + row.iter().map(|&x| (x - max).exp()).sum::<T>().ln();
            data.extend(row.iter().map(|&x| x - lse));
        }
        Ok(self.push(Tensor::new(vec![n, m], data)?, Op::LogSoftmax(a)))
    }

    // ---- reverse mode ----

    /// Gradients of the scalar `output` with respect to each node in `wrt`.
    ///
    /// The returned nodes are part of the graph and can be differentiated
    /// again. Nodes that do not influence `output` get a zero gradient.
    pub fn grad(&mut self, output: NodeId, wrt: &[NodeId]) -> Result<Vec<NodeId>> {
        let out_shape = self.shape(output).to_vec();
        if self.value(output).len() != 1 {
            return Err(Error::NonScalarLoss(out_shape));
        }
        let end = output.0 + 1;
        let mut depends = vec![false; end];
        for w in wrt {
            if w.0 < end {
                depends[w.0] = true;
            }
        }
        for i in 0..end {
            if !depends[i] {
                depends[i] = self.nodes[i].op.inputs().iter().any(|p| depends[p.0]);
            }
        }

        let mut adjoint: Vec<Option<NodeId>> = vec![None; end];
        adjoint[output.0] = Some(self.constant(Tensor::ones(&out_shape)));
        for i in (0..end).rev() {
            let Some(g) = adjoint[i] else { continue };
            if !depends[i] {
                continue;
            }
            let op = self.nodes[i].op.clone();
            for (input, contrib) in self.vjp(NodeId(i), &op, g, &depends)? {
                debug_assert_eq!(self.shape(contrib), self.shape(input));
                adjoint[input.0] = Some(match adjoint[input.0] {
                    None => contrib,
                    Some(prev) => self.add(prev, contrib)?,
                });
            }
        }

        Ok(wrt
            .iter()
            .map(|&w| match adjoint.get(w.0).copied().flatten() {
                Some(g) => g,
                None => {
                    let z = Tensor::zeros(self.shape(w));
                    self.constant(z)
                }
            })
            .collect())
    }

    /// Accumulate gradients of `loss` into every trainable parameter used by this graph.
    pub fn backward(&mut self, loss: NodeId, store: &mut ParamStore<T>) -> Result<()> {
        let ids: Vec<ParamId> = self.params.iter().map(|(p, _)| *p).collect();
        self.backward_for(loss, store, &ids)
    }

    /// Like [`Graph::backward`], restricted to `ids`. Frozen parameters are skipped.
    pub fn backward_for(&mut self, loss: NodeId, store: &mut ParamStore<T>, ids: &[ParamId]) -> Result<()> {
        let targets: Vec<(ParamId, NodeId)> = ids
            .iter()
            .filter(|&&id| store.get(id).trainable())
            .filter_map(|&id| self.params.iter().find(|(p, _)| *p == id).copied())
            .collect();
        let nodes: Vec<NodeId> = targets.iter().map(|(_, n)| *n).collect();
        let grads = self.grad(loss, &nodes)?;
        for ((id, _), g) in targets.into_iter().zip(grads) {
            let gv = self.value(g);
            let p = store.get_mut(id);
            for (acc, &v) in p.grad.data_mut().iter_mut().zip(gv.data()) {
                *acc = *acc + v;
            }
        }
        Ok(())
    }

    fn mask(&mut self, x: NodeId, f: impl Fn(T) -> T) -> NodeId {
        let m = self.value(x).map(f);
        self.constant(m)
    }

    fn vjp(&mut self, y: NodeId, op: &Op, g: NodeId, depends: &[bool]) -> Result<Vec<(NodeId, NodeId)>> {
        use Op::*;
        let need = |n: &NodeId| depends[n.0];
        let mut out = Vec::with_capacity(2);
        match *op {
            Leaf => {}
            MatMul { a, b, ta, tb } => {
                if need(&a) {
                    let da = if ta {
                        self.matmul_t(b, g, tb, true)?
                    } else {
                        self.matmul_t(g, b, false, !tb)?
                    };
                    out.push((a, da));
                }
                if need(&b) {
                    let db = if tb {
                        self.matmul_t(g, a, true, ta)?
                    } else {
                        self.matmul_t(a, g, !ta, false)?
                    };
                    out.push((b, db));
                }
            }
            Add(a, b) => {
                if need(&a) {
                    out.push((a, g));
                }
                if need(&b) {
                    out.push((b, g));
                }
            }
            Sub(a, b) => {
                if need(&a) {
                    out.push((a, g));
                }
                if need(&b) {
                    let ng = self.neg(g);
                    out.push((b, ng));
                }
            }
            Mul(a, b) => {
                if need(&a) {
                    let da = self.mul(g, b)?;
                    out.push((a, da));
                }
                if need(&b) {
                    let db = self.mul(g, a)?;
                    out.push((b, db));
                }
            }
            Div(a, b) | SafeDiv(a, b) => {
                let safe = matches!(op, SafeDiv(..));
                let divide = |s: &mut Self, x, z| if safe { s.safe_div(x, z) } else { s.div(x, z) };
                if need(&a) {
                    let da = divide(self, g, b)?;
                    out.push((a, da));
                }
                if need(&b) {
                    // d(a/b)/db = -(a/b)/b
                    let gy = self.mul(g, y)?;
                    let q = divide(self, gy, b)?;
                    let db = self.neg(q);
                    out.push((b, db));
                }
            }
            Neg(a) => {
                let d = self.neg(g);
                out.push((a, d));
            }
            Scale(a, c) => {
                let d = self.scale(g, c);
                out.push((a, d));
            }
            AddScalar(a) => out.push((a, g)),
            AddRow(x, b) => {
                if need(&x) {
                    out.push((x, g));
                }
                if need(&b) {
                    let db = self.sum_rows(g)?;
                    out.push((b, db));
                }
            }
            SumRows(x) => {
                let n = self.shape(x)[0];
                let d = self.broadcast_rows(g, n)?;
                out.push((x, d));
            }
            BroadcastRows(v) => {
                let d = self.sum_rows(g)?;
                out.push((v, d));
            }
            SumCols(x) => {
                let m = self.shape(x)[1];
                let d = self.broadcast_cols(g, m)?;
                out.push((x, d));
            }
            BroadcastCols(v) => {
                let d = self.sum_cols(g)?;
                out.push((v, d));
            }
            Sum(a) => {
                let shape = self.shape(a).to_vec();
                let d = self.broadcast_scalar(g, &shape)?;
                out.push((a, d));
            }
            Mean(a) => {
                let shape = self.shape(a).to_vec();
                let n = self.value(a).len() as f64;
                let b = self.broadcast_scalar(g, &shape)?;
                let d = self.scale(b, 1.0 / n);
                out.push((a, d));
            }
            BroadcastScalar(s) => {
                let total = self.sum(g);
                let shape = self.shape(s).to_vec();
                let d = self.reshape(total, &shape)?;
                out.push((s, d));
            }
            Reshape(a) => {
                let shape = self.shape(a).to_vec();
                let d = self.reshape(g, &shape)?;
                out.push((a, d));
            }
            Sigmoid(a) => {
                // y (1 - y)
                let ny = self.neg(y);
                let one_minus = self.add_scalar(ny, 1.0);
                let local = self.mul(y, one_minus)?;
                let d = self.mul(g, local)?;
                out.push((a, d));
            }
            Tanh(a) => {
                let y2 = self.square(y);
                let ny2 = self.neg(y2);
                let local = self.add_scalar(ny2, 1.0);
                let d = self.mul(g, local)?;
                out.push((a, d));
            }
            LeakyRelu(a, slope) => {
                let s = T::of(slope);
                let m = self.mask(a, |x| if x > T::zero() { T::one() } else { s });
                let d = self.mul(g, m)?;
                out.push((a, d));
            }
            Log(a) => {
                let d = self.div(g, a)?;
                out.push((a, d));
            }
            LogSigmoid(a) => {
                // d/dx ln sigmoid(x) = sigmoid(-x)
                let na = self.neg(a);
                let local = self.sigmoid(na);
                let d = self.mul(g, local)?;
                out.push((a, d));
            }
            Exp(a) => {
                let d = self.mul(g, y)?;
                out.push((a, d));
            }
            Square(a) => {
                let two_a = self.scale(a, 2.0);
                let d = self.mul(g, two_a)?;
                out.push((a, d));
            }
            Sqrt(a) => {
                let two_y = self.scale(y, 2.0);
                let d = self.safe_div(g, two_y)?;
                out.push((a, d));
            }
            Concat(ref parts) => {
                let mut offset = 0;
                for &p in parts {
                    let w = self.shape(p)[1];
                    if need(&p) {
                        let d = self.slice_cols(g, offset, offset + w)?;
                        out.push((p, d));
                    }
                    offset += w;
                }
            }
            SliceCols { a, start } => {
                let total = self.shape(a)[1];
                let d = self.pad_cols(g, start, total)?;
                out.push((a, d));
            }
            PadCols { a, start } => {
                let w = self.shape(a)[1];
                let d = self.slice_cols(g, start, start + w)?;
                out.push((a, d));
            }
            LogSoftmax(a) => {
                // g - softmax * rowsum(g)
                let m = self.shape(a)[1];
                let p = self.exp(y);
                let gs = self.sum_cols(g)?;
                let gb = self.broadcast_cols(gs, m)?;
                let pg = self.mul(p, gb)?;
                let d = self.sub(g, pg)?;
                out.push((a, d));
            }
        }
        Ok(out)
    }
}

pub fn sigmoid<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

pub fn log_sigmoid<T: Scalar>(x: T) -> T {
    x.min(T::zero()) - (-x.abs()).exp().ln_1p()
}
