//! Minimal tape-based reverse-mode gradient engine over dense tensors.
//!
//! The tape is dynamic: each forward pass appends nodes in topological
//! order and `backward` replays them in exact reverse order. One tape =
//! one logical training session; distinct tapes are fully independent.
//!
//! No operation here clips values or gradients. The only range-limited
//! outputs are the mathematically bounded ones (sigmoid, softmax,
//! tanh).

use std::cell::RefCell;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{r, Real};
use crate::tensor::Tensor;

/// Handle to a node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

impl Var {
    pub fn id(&self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone)]
enum Op<T> {
    Leaf,
    Constant,
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Matmul(usize, usize),
    Scale(usize, T),
    ScaleBy { vec: usize, scalar: usize },
    Neg(usize),
    Norm2(usize),
    Power(usize, i32),
    Sum(usize),
    Mean(usize),
    Concat(Vec<usize>),
    GatherRows { src: usize, idx: Vec<usize> },
    Softmax(usize),
    LogSoftmax(usize),
    Sigmoid(usize),
    Relu(usize),
    Abs(usize),
    Softplus(usize),
    TanhBuiltin(usize),
    ArtanhBuiltin(usize),
    PolyvalOdd { input: usize, coeffs: Arc<Vec<T>> },
    PolyvalEven { input: usize, coeffs: Arc<Vec<T>> },
}

#[derive(Debug)]
struct Node<T> {
    value: Tensor<T>,
    requires_grad: bool,
    op: Op<T>,
}

/// Gradients produced by a backward pass, owned independently of the
/// tape (which is cleared for reuse).
#[derive(Debug)]
pub struct Gradients<T> {
    grads: Vec<Option<Tensor<T>>>,
}

impl<T: Real> Gradients<T> {
    pub fn get(&self, var: Var) -> Option<&Tensor<T>> {
        self.grads.get(var.0).and_then(|g| g.as_ref())
    }

    pub fn take(&mut self, var: Var) -> Option<Tensor<T>> {
        self.grads.get_mut(var.0).and_then(|g| g.take())
    }
}

#[derive(Debug, Default)]
pub struct Tape<T> {
    nodes: RefCell<Vec<Node<T>>>,
}

fn accum<T: Real>(slot: &mut Option<Tensor<T>>, delta: &Tensor<T>) {
    match slot {
        Some(existing) => {
            for (a, &b) in existing.data_mut().iter_mut().zip(delta.data()) {
                *a = *a + b;
            }
        }
        None => *slot = Some(delta.clone()),
    }
}

impl<T: Real> Tape<T> {
    pub fn new() -> Self {
        Self {
            nodes: RefCell::new(Vec::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.borrow().is_empty()
    }

    /// Drop all nodes; existing `Var` handles become invalid.
    pub fn reset(&self) {
        self.nodes.borrow_mut().clear();
    }

    fn push(&self, value: Tensor<T>, requires_grad: bool, op: Op<T>) -> Var {
        let mut nodes = self.nodes.borrow_mut();
        nodes.push(Node {
            value,
            requires_grad,
            op,
        });
        Var(nodes.len() - 1)
    }

    fn requires(&self, v: Var) -> bool {
        self.nodes.borrow()[v.0].requires_grad
    }

    /// Copy of a node's value.
    pub fn value(&self, v: Var) -> Tensor<T> {
        self.nodes.borrow()[v.0].value.clone()
    }

    pub fn scalar_value(&self, v: Var) -> Result<T> {
        self.nodes.borrow()[v.0].value.item()
    }

    /// Differentiable input.
    pub fn leaf(&self, value: Tensor<T>) -> Var {
        self.push(value, true, Op::Leaf)
    }

    /// Non-differentiable input.
    pub fn constant(&self, value: Tensor<T>) -> Var {
        self.push(value, false, Op::Constant)
    }

    pub fn scalar_constant(&self, value: T) -> Var {
        self.constant(Tensor::scalar(value))
    }

    // -- elementwise and linear-algebra ops --------------------------------

    pub fn add(&self, a: Var, b: Var) -> Result<Var> {
        let value = self.nodes.borrow()[a.0].value.add(&self.nodes.borrow()[b.0].value)?;
        Ok(self.push(value, self.requires(a) || self.requires(b), Op::Add(a.0, b.0)))
    }

    pub fn sub(&self, a: Var, b: Var) -> Result<Var> {
        let value = self.nodes.borrow()[a.0].value.sub(&self.nodes.borrow()[b.0].value)?;
        Ok(self.push(value, self.requires(a) || self.requires(b), Op::Sub(a.0, b.0)))
    }

    pub fn mul(&self, a: Var, b: Var) -> Result<Var> {
        let value = self.nodes.borrow()[a.0].value.mul(&self.nodes.borrow()[b.0].value)?;
        Ok(self.push(value, self.requires(a) || self.requires(b), Op::Mul(a.0, b.0)))
    }

    pub fn div(&self, a: Var, b: Var) -> Result<Var> {
        let value = {
            let nodes = self.nodes.borrow();
            let bv = &nodes[b.0].value;
            nodes[a.0].value.mul(&bv.map(|x| T::one() / x))?
        };
        Ok(self.push(value, self.requires(a) || self.requires(b), Op::Div(a.0, b.0)))
    }

    pub fn matmul(&self, a: Var, b: Var) -> Result<Var> {
        let value = self.nodes.borrow()[a.0]
            .value
            .matmul(&self.nodes.borrow()[b.0].value)?;
        Ok(self.push(
            value,
            self.requires(a) || self.requires(b),
            Op::Matmul(a.0, b.0),
        ))
    }

    /// Multiply by a compile-time scalar constant.
    pub fn scale(&self, a: Var, s: T) -> Var {
        let value = self.nodes.borrow()[a.0].value.scale(s);
        self.push(value, self.requires(a), Op::Scale(a.0, s))
    }

    /// Multiply a tensor by a tracked scalar node.
    pub fn scale_by(&self, vec: Var, scalar: Var) -> Result<Var> {
        let s = self.nodes.borrow()[scalar.0].value.item()?;
        let value = self.nodes.borrow()[vec.0].value.scale(s);
        Ok(self.push(
            value,
            self.requires(vec) || self.requires(scalar),
            Op::ScaleBy {
                vec: vec.0,
                scalar: scalar.0,
            },
        ))
    }

    pub fn neg(&self, a: Var) -> Var {
        let value = self.nodes.borrow()[a.0].value.neg();
        self.push(value, self.requires(a), Op::Neg(a.0))
    }

    /// Euclidean norm; the gradient at the zero tensor is defined as
    /// the zero vector (subgradient choice) so zero-feature inputs do
    /// not produce non-finite gradients.
    pub fn norm2(&self, a: Var) -> Var {
        let value = Tensor::scalar(self.nodes.borrow()[a.0].value.norm());
        self.push(value, self.requires(a), Op::Norm2(a.0))
    }

    /// Elementwise integer power.
    pub fn power(&self, a: Var, k: i32) -> Var {
        let value = self.nodes.borrow()[a.0].value.map(|x| x.powi(k));
        self.push(value, self.requires(a), Op::Power(a.0, k))
    }

    pub fn sum(&self, a: Var) -> Var {
        let value = Tensor::scalar(self.nodes.borrow()[a.0].value.sum());
        self.push(value, self.requires(a), Op::Sum(a.0))
    }

    pub fn mean(&self, a: Var) -> Var {
        let nodes = self.nodes.borrow();
        let n = nodes[a.0].value.len();
        let value = Tensor::scalar(nodes[a.0].value.sum() / r(n as f64));
        drop(nodes);
        self.push(value, self.requires(a), Op::Mean(a.0))
    }

    /// Concatenate rank-1 tensors end to end.
    pub fn concat(&self, parts: &[Var]) -> Result<Var> {
        let nodes = self.nodes.borrow();
        let mut data = Vec::new();
        let mut grad = false;
        for p in parts {
            let t = &nodes[p.0].value;
            if t.rank() > 1 {
                return Err(Error::Shape(format!(
                    "concat expects rank-1 parts, got {:?}",
                    t.shape()
                )));
            }
            data.extend_from_slice(t.data());
            grad |= nodes[p.0].requires_grad;
        }
        drop(nodes);
        let value = Tensor::from_slice(&data);
        Ok(self.push(value, grad, Op::Concat(parts.iter().map(|p| p.0).collect())))
    }

    /// Select rows of a rank-2 tensor (or elements of a rank-1 tensor).
    pub fn gather_rows(&self, src: Var, idx: &[usize]) -> Result<Var> {
        let nodes = self.nodes.borrow();
        let t = &nodes[src.0].value;
        let value = match t.rank() {
            1 => {
                let mut out = Vec::with_capacity(idx.len());
                for &i in idx {
                    if i >= t.len() {
                        return Err(Error::Index {
                            index: i,
                            len: t.len(),
                        });
                    }
                    out.push(t.data()[i]);
                }
                Tensor::from_slice(&out)
            }
            2 => {
                let (rows, cols) = (t.shape()[0], t.shape()[1]);
                let mut out = Vec::with_capacity(idx.len() * cols);
                for &i in idx {
                    if i >= rows {
                        return Err(Error::Index {
                            index: i,
                            len: rows,
                        });
                    }
                    out.extend_from_slice(&t.data()[i * cols..(i + 1) * cols]);
                }
                Tensor::new(vec![idx.len(), cols], out)?
            }
            rank => {
                return Err(Error::Shape(format!("gather_rows on rank-{rank} tensor")));
            }
        };
        let grad = nodes[src.0].requires_grad;
        drop(nodes);
        Ok(self.push(
            value,
            grad,
            Op::GatherRows {
                src: src.0,
                idx: idx.to_vec(),
            },
        ))
    }

    pub fn softmax(&self, a: Var) -> Result<Var> {
        let nodes = self.nodes.borrow();
        let t = &nodes[a.0].value;
        if t.rank() != 1 {
            return Err(Error::Shape(format!("softmax expects rank-1, got {:?}", t.shape())));
        }
        let max = t.data().iter().cloned().fold(T::neg_infinity(), T::max);
        let exps: Vec<T> = t.data().iter().map(|&x| (x - max).exp()).collect();
        let total: T = exps.iter().copied().sum();
        let value = Tensor::from_slice(&exps.iter().map(|&e| e / total).collect::<Vec<_>>());
        let grad = nodes[a.0].requires_grad;
        drop(nodes);
        Ok(self.push(value, grad, Op::Softmax(a.0)))
    }

    pub fn log_softmax(&self, a: Var) -> Result<Var> {
        let nodes = self.nodes.borrow();
        let t = &nodes[a.0].value;
        if t.rank() != 1 {
            return Err(Error::Shape(format!(
                "log_softmax expects rank-1, got {:?}",
                t.shape()
            )));
        }
        let max = t.data().iter().cloned().fold(T::neg_infinity(), T::max);
        let lse = max
            + t.data()
                .iter()
                .map(|&x| (x - max).exp())
                .sum::<T>()
                .ln();
        let value = t.map(|x| x - lse);
        let grad = nodes[a.0].requires_grad;
        drop(nodes);
        Ok(self.push(value, grad, Op::LogSoftmax(a.0)))
    }

    pub fn sigmoid(&self, a: Var) -> Var {
        let value = self.nodes.borrow()[a.0]
            .value
            .map(|x| T::one() / (T::one() + (-x).exp()));
        self.push(value, self.requires(a), Op::Sigmoid(a.0))
    }

    /// Rectifier; derivative at exactly 0 is 0.
    pub fn relu(&self, a: Var) -> Var {
        let value = self.nodes.borrow()[a.0].value.map(|x| x.max(T::zero()));
        self.push(value, self.requires(a), Op::Relu(a.0))
    }

    pub fn abs(&self, a: Var) -> Var {
        let value = self.nodes.borrow()[a.0].value.map(|x| x.abs());
        self.push(value, self.requires(a), Op::Abs(a.0))
    }

    /// `ln(1 + e^x)` in the overflow-safe form.
    pub fn softplus(&self, a: Var) -> Var {
        let value = self.nodes.borrow()[a.0]
            .value
            .map(|x| x.max(T::zero()) + (-x.abs()).exp().ln_1p());
        self.push(value, self.requires(a), Op::Softplus(a.0))
    }

    pub fn tanh_builtin(&self, a: Var) -> Var {
        let value = self.nodes.borrow()[a.0].value.map(|x| x.tanh());
        self.push(value, self.requires(a), Op::TanhBuiltin(a.0))
    }

    pub fn artanh_builtin(&self, a: Var) -> Var {
        let value = self.nodes.borrow()[a.0].value.map(|x| x.atanh());
        self.push(value, self.requires(a), Op::ArtanhBuiltin(a.0))
    }

    /// `Σ_i coeffs[i-1]·x^{2i-1}` elementwise (Horner on x²).
    pub fn polyval_odd(&self, a: Var, coeffs: Arc<Vec<T>>) -> Var {
        let value = self.nodes.borrow()[a.0]
            .value
            .map(|x| crate::series::polyval_odd(&coeffs, x));
        self.push(
            value,
            self.requires(a),
            Op::PolyvalOdd {
                input: a.0,
                coeffs,
            },
        )
    }

    /// `Σ_i coeffs[i-1]·x^{2i-2}` elementwise.
    pub fn polyval_even(&self, a: Var, coeffs: Arc<Vec<T>>) -> Var {
        let value = self.nodes.borrow()[a.0]
            .value
            .map(|x| crate::series::polyval_even(&coeffs, x));
        self.push(
            value,
            self.requires(a),
            Op::PolyvalEven {
                input: a.0,
                coeffs,
            },
        )
    }

    // -- backward -----------------------------------------------------------

    /// Reverse sweep from a scalar loss. Gradients are returned for
    /// every `requires_grad` node; the tape is cleared for reuse.
    pub fn backward(&self, loss: Var) -> Result<Gradients<T>> {
        {
            let nodes = self.nodes.borrow();
            if nodes[loss.0].value.len() != 1 {
                return Err(Error::Contract(format!(
                    "backward expects a scalar loss, got shape {:?}",
                    nodes[loss.0].value.shape()
                )));
            }
        }
        let nodes = self.nodes.borrow();
        let mut grads: Vec<Option<Tensor<T>>> = vec![None; nodes.len()];
        grads[loss.0] = Some(Tensor::new(
            nodes[loss.0].value.shape().to_vec(),
            vec![T::one()],
        )?);

        for id in (0..=loss.0).rev() {
            if !nodes[id].requires_grad {
                continue;
            }
            let Some(g) = grads[id].take() else { continue };
            let node = &nodes[id];
            match &node.op {
                Op::Leaf | Op::Constant => {
                    grads[id] = Some(g); // keep: retrievable by the caller
                    continue;
                }
                Op::Add(a, b) => {
                    if nodes[*a].requires_grad {
                        accum(&mut grads[*a], &g);
                    }
                    if nodes[*b].requires_grad {
                        accum(&mut grads[*b], &g);
                    }
                }
                Op::Sub(a, b) => {
                    if nodes[*a].requires_grad {
                        accum(&mut grads[*a], &g);
                    }
                    if nodes[*b].requires_grad {
                        accum(&mut grads[*b], &g.neg());
                    }
                }
                Op::Mul(a, b) => {
                    if nodes[*a].requires_grad {
                        accum(&mut grads[*a], &g.mul(&nodes[*b].value)?);
                    }
                    if nodes[*b].requires_grad {
                        accum(&mut grads[*b], &g.mul(&nodes[*a].value)?);
                    }
                }
                Op::Div(a, b) => {
                    let bv = &nodes[*b].value;
                    if nodes[*a].requires_grad {
                        accum(&mut grads[*a], &g.mul(&bv.map(|x| T::one() / x))?);
                    }
                    if nodes[*b].requires_grad {
                        let da = nodes[*a].value.mul(&bv.map(|x| -(T::one() / (x * x))))?;
                        accum(&mut grads[*b], &g.mul(&da)?);
                    }
                }
                Op::Matmul(a, b) => {
                    let av = &nodes[*a].value;
                    let bv = &nodes[*b].value;
                    match (av.rank(), bv.rank()) {
                        (2, 1) => {
                            if nodes[*a].requires_grad {
                                // dA = g ⊗ v
                                let (rows, cols) = (av.shape()[0], av.shape()[1]);
                                let slot = &mut grads[*a];
                                if slot.is_none() {
                                    *slot = Some(Tensor::zeros(vec![rows, cols]));
                                }
                                let dst = slot.as_mut().unwrap().data_mut();
                                for i in 0..rows {
                                    let gi = g.data()[i];
                                    for j in 0..cols {
                                        dst[i * cols + j] = dst[i * cols + j] + gi * bv.data()[j];
                                    }
                                }
                            }
                            if nodes[*b].requires_grad {
                                accum(&mut grads[*b], &av.transpose()?.matmul(&g)?);
                            }
                        }
                        (2, 2) => {
                            if nodes[*a].requires_grad {
                                accum(&mut grads[*a], &g.matmul(&bv.transpose()?)?);
                            }
                            if nodes[*b].requires_grad {
                                accum(&mut grads[*b], &av.transpose()?.matmul(&g)?);
                            }
                        }
                        _ => unreachable!("matmul forward validated shapes"),
                    }
                }
                Op::Scale(a, s) => {
                    if nodes[*a].requires_grad {
                        accum(&mut grads[*a], &g.scale(*s));
                    }
                }
                Op::ScaleBy { vec, scalar } => {
                    let s = nodes[*scalar].value.item()?;
                    if nodes[*vec].requires_grad {
                        accum(&mut grads[*vec], &g.scale(s));
                    }
                    if nodes[*scalar].requires_grad {
                        let ds = g.dot(&nodes[*vec].value)?;
                        accum(
                            &mut grads[*scalar],
                            &Tensor::new(nodes[*scalar].value.shape().to_vec(), vec![ds])?,
                        );
                    }
                }
                Op::Neg(a) => {
                    if nodes[*a].requires_grad {
                        accum(&mut grads[*a], &g.neg());
                    }
                }
                Op::Norm2(a) => {
                    if nodes[*a].requires_grad {
                        let norm = node.value.item()?;
                        let gs = g.item()?;
                        let da = if norm == T::zero() {
                            Tensor::zeros(nodes[*a].value.shape().to_vec())
                        } else {
                            nodes[*a].value.scale(gs / norm)
                        };
                        accum(&mut grads[*a], &da);
                    }
                }
                Op::Power(a, k) => {
                    if nodes[*a].requires_grad {
                        let kk = r::<T>(*k as f64);
                        let da = nodes[*a].value.map(|x| kk * x.powi(*k - 1));
                        accum(&mut grads[*a], &g.mul(&da)?);
                    }
                }
                Op::Sum(a) => {
                    if nodes[*a].requires_grad {
                        let gs = g.item()?;
                        let da = Tensor::new(
                            nodes[*a].value.shape().to_vec(),
                            vec![gs; nodes[*a].value.len()],
                        )?;
                        accum(&mut grads[*a], &da);
                    }
                }
                Op::Mean(a) => {
                    if nodes[*a].requires_grad {
                        let n = nodes[*a].value.len();
                        let gs = g.item()? / r(n as f64);
                        let da = Tensor::new(nodes[*a].value.shape().to_vec(), vec![gs; n])?;
                        accum(&mut grads[*a], &da);
                    }
                }
                Op::Concat(parts) => {
                    let mut offset = 0;
                    for p in parts {
                        let len = nodes[*p].value.len();
                        if nodes[*p].requires_grad {
                            let slice = Tensor::from_slice(&g.data()[offset..offset + len]);
                            accum(&mut grads[*p], &slice);
                        }
                        offset += len;
                    }
                }
                Op::GatherRows { src, idx } => {
                    if nodes[*src].requires_grad {
                        let srcv = &nodes[*src].value;
                        let slot = &mut grads[*src];
                        if slot.is_none() {
                            *slot = Some(Tensor::zeros(srcv.shape().to_vec()));
                        }
                        let dst = slot.as_mut().unwrap().data_mut();
                        let width = if srcv.rank() == 2 { srcv.shape()[1] } else { 1 };
                        for (row, &i) in idx.iter().enumerate() {
                            for j in 0..width {
                                dst[i * width + j] =
                                    dst[i * width + j] + g.data()[row * width + j];
                            }
                        }
                    }
                }
                Op::Softmax(a) => {
                    if nodes[*a].requires_grad {
                        let y = &node.value;
                        let gy = g.dot(y)?;
                        let da = y.mul(&g.map(|x| x - gy).map(|x| x))?;
                        // da_j = y_j (g_j − Σ g·y)
                        accum(&mut grads[*a], &da);
                    }
                }
                Op::LogSoftmax(a) => {
                    if nodes[*a].requires_grad {
                        let gsum = g.sum();
                        let softmax = node.value.map(|x| x.exp());
                        let da = g.sub(&softmax.scale(gsum))?;
                        accum(&mut grads[*a], &da);
                    }
                }
                Op::Sigmoid(a) => {
                    if nodes[*a].requires_grad {
                        let da = node.value.map(|y| y * (T::one() - y));
                        accum(&mut grads[*a], &g.mul(&da)?);
                    }
                }
                Op::Relu(a) => {
                    if nodes[*a].requires_grad {
                        let da = nodes[*a]
                            .value
                            .map(|x| if x > T::zero() { T::one() } else { T::zero() });
                        accum(&mut grads[*a], &g.mul(&da)?);
                    }
                }
                Op::Abs(a) => {
                    if nodes[*a].requires_grad {
                        let da = nodes[*a].value.map(|x| {
                            if x > T::zero() {
                                T::one()
                            } else if x < T::zero() {
                                -T::one()
                            } else {
                                T::zero()
                            }
                        });
                        accum(&mut grads[*a], &g.mul(&da)?);
                    }
                }
                Op::Softplus(a) => {
                    if nodes[*a].requires_grad {
                        let da = nodes[*a].value.map(|x| T::one() / (T::one() + (-x).exp()));
                        accum(&mut grads[*a], &g.mul(&da)?);
                    }
                }
                Op::TanhBuiltin(a) => {
                    if nodes[*a].requires_grad {
                        let da = node.value.map(|y| T::one() - y * y);
                        accum(&mut grads[*a], &g.mul(&da)?);
                    }
                }
                Op::ArtanhBuiltin(a) => {
                    if nodes[*a].requires_grad {
                        let da = nodes[*a].value.map(|x| T::one() / (T::one() - x * x));
                        accum(&mut grads[*a], &g.mul(&da)?);
                    }
                }
                Op::PolyvalOdd { input, coeffs } => {
                    if nodes[*input].requires_grad {
                        // d/dx Σ c_i x^{2i-1} = Σ c_i (2i-1) x^{2i-2}
                        let deriv: Vec<T> = coeffs
                            .iter()
                            .enumerate()
                            .map(|(i, &c)| c * r::<T>((2 * i + 1) as f64))
                            .collect();
                        let da = nodes[*input]
                            .value
                            .map(|x| crate::series::polyval_even(&deriv, x));
                        accum(&mut grads[*input], &g.mul(&da)?);
                    }
                }
                Op::PolyvalEven { input, coeffs } => {
                    if nodes[*input].requires_grad {
                        // d/dx Σ c_i x^{2i-2} = Σ_{i≥2} c_i (2i-2) x^{2i-3}
                        let deriv: Vec<T> = coeffs
                            .iter()
                            .enumerate()
                            .skip(1)
                            .map(|(i, &c)| c * r::<T>((2 * i) as f64))
                            .collect();
                        let da = nodes[*input]
                            .value
                            .map(|x| crate::series::polyval_odd(&deriv, x));
                        accum(&mut grads[*input], &g.mul(&da)?);
                    }
                }
            }
        }
        drop(nodes);
        self.reset();
        Ok(Gradients { grads })
    }
}

/// Max relative disagreement between the tape gradient of a scalar
/// function and central finite differences.
pub fn grad_check<T, F>(f: F, inputs: &[Tensor<T>], h: T) -> Result<T>
where
    T: Real,
    F: Fn(&Tape<T>, &[Var]) -> Result<Var>,
{
    if h < r(1e-7) || h > r(1e-4) {
        return Err(Error::Contract(format!(
            "finite-difference step {h} outside [1e-7, 1e-4]"
        )));
    }
    let eval = |points: &[Tensor<T>]| -> Result<(T, Option<Gradients<T>>, Vec<Var>)> {
        let tape = Tape::new();
        let vars: Vec<Var> = points.iter().map(|t| tape.leaf(t.clone())).collect();
        let out = f(&tape, &vars)?;
        let value = tape.scalar_value(out)?;
        if !value.is_finite() {
            return Err(Error::Numerical(format!("non-finite output {value}")));
        }
        let grads = tape.backward(out)?;
        Ok((value, Some(grads), vars))
    };

    let (_, grads, vars) = eval(inputs)?;
    let grads = grads.unwrap();

    let mut worst = T::zero();
    for (which, input) in inputs.iter().enumerate() {
        let analytic = grads
            .get(vars[which])
            .cloned()
            .unwrap_or_else(|| Tensor::zeros(input.shape().to_vec()));
        for coord in 0..input.len() {
            let mut plus = inputs.to_vec();
            plus[which].data_mut()[coord] = plus[which].data()[coord] + h;
            let mut minus = inputs.to_vec();
            minus[which].data_mut()[coord] = minus[which].data()[coord] - h;

            let fp = {
                let tape = Tape::new();
                let vars: Vec<Var> = plus.iter().map(|t| tape.leaf(t.clone())).collect();
                tape.scalar_value(f(&tape, &vars)?)?
            };
            let fm = {
                let tape = Tape::new();
                let vars: Vec<Var> = minus.iter().map(|t| tape.leaf(t.clone())).collect();
                tape.scalar_value(f(&tape, &vars)?)?
            };
            if !fp.is_finite() || !fm.is_finite() {
                return Err(Error::Numerical("non-finite probe value".into()));
            }
            let fd = (fp - fm) / (h + h);
            let an = analytic.data()[coord];
            let denom = an.abs().max(fd.abs()).max(r(1e-8));
            let err = (an - fd).abs() / denom;
            if err > worst {
                worst = err;
            }
        }
    }
    Ok(worst)
}
