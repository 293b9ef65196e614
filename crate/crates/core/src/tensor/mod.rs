//! Dense tensors with optional reverse-mode graph participation.
//!
//! A [`TensorBase`] is a row-major buffer plus shape. Tensors created by
//! differentiable operations carry a [`Node`](autodiff) recording their
//! parents and a backward rule; calling [`TensorBase::backward`] on a scalar
//! walks the recorded graph in reverse topological order and accumulates
//! gradients into every participating ancestor. Tensors built directly from
//! data (images, guidance maps) stay outside the graph and never receive
//! gradients.
//!
//! Graphs are single-owner: build, forward and backward happen on one thread.
//! Distinct graphs are independent and may run on different threads.

pub mod autodiff;
pub mod conv;
pub mod io;
pub mod ops;

use std::cell::{Ref, RefCell};
use std::fmt;
use std::rc::Rc;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;
use autodiff::Node;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

pub(crate) struct Inner<F: Scalar> {
    id: u64,
    shape: Vec<usize>,
    data: RefCell<Vec<F>>,
    grad: RefCell<Option<Vec<F>>>,
    requires_grad: bool,
    pub(crate) node: Option<Node<F>>,
}

/// Dense N-dimensional tensor, generic over the scalar type.
///
/// Cloning is cheap (shared buffer); two clones are the same tensor.
pub struct TensorBase<F: Scalar> {
    pub(crate) inner: Rc<Inner<F>>,
}

impl<F: Scalar> Clone for TensorBase<F> {
    fn clone(&self) -> Self {
        TensorBase {
            inner: Rc::clone(&self.inner),
        }
    }
}

impl<F: Scalar> fmt::Debug for TensorBase<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.inner.data.borrow();
        let head: Vec<String> = d.iter().take(4).map(|v| format!("{v}")).collect();
        write!(
            f,
            "Tensor(shape={:?}, op={}, data=[{}{}])",
            self.inner.shape,
            self.inner.node.as_ref().map(|n| n.op).unwrap_or("leaf"),
            head.join(", "),
            if d.len() > 4 { ", .." } else { "" }
        )
    }
}

fn numel_of(shape: &[usize]) -> usize {
    shape.iter().product()
}

impl<F: Scalar> TensorBase<F> {
    fn build(
        shape: Vec<usize>,
        data: Vec<F>,
        requires_grad: bool,
        node: Option<Node<F>>,
    ) -> Self {
        debug_assert_eq!(numel_of(&shape), data.len());
        TensorBase {
            inner: Rc::new(Inner {
                id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
                shape,
                data: RefCell::new(data),
                grad: RefCell::new(None),
                requires_grad,
                node,
            }),
        }
    }

    /// Non-graph tensor from raw row-major data.
    pub fn from_vec(shape: Vec<usize>, data: Vec<F>) -> Result<Self> {
        if numel_of(&shape) != data.len() {
            return Err(CoreError::InvalidArgument {
                context: "tensor construction",
                expected: format!("{} elements for shape {:?}", numel_of(&shape), shape),
                got: format!("{}", data.len()),
            });
        }
        Ok(Self::build(shape, data, false, None))
    }

    /// Leaf that accumulates gradients (a trainable parameter or a probe).
    pub fn param(shape: Vec<usize>, data: Vec<F>) -> Result<Self> {
        let t = Self::from_vec(shape, data)?;
        Ok(TensorBase {
            inner: Rc::new(Inner {
                id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
                shape: t.inner.shape.clone(),
                data: RefCell::new(t.inner.data.borrow().clone()),
                grad: RefCell::new(None),
                requires_grad: true,
                node: None,
            }),
        })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let n = numel_of(&shape);
        Self::build(shape, vec![F::zero(); n], false, None)
    }

    pub fn full(shape: Vec<usize>, v: F) -> Self {
        let n = numel_of(&shape);
        Self::build(shape, vec![v; n], false, None)
    }

    /// Rank-0 scalar tensor.
    pub fn scalar(v: F) -> Self {
        Self::build(vec![], vec![v], false, None)
    }

    pub(crate) fn from_op(
        shape: Vec<usize>,
        data: Vec<F>,
        op: &'static str,
        parents: Vec<TensorBase<F>>,
        rule: autodiff::BackwardRule<F>,
    ) -> Self {
        if parents.iter().any(|p| p.participates()) {
            Self::build(shape, data, false, Some(Node { op, parents, rule }))
        } else {
            // No ancestor wants gradients: stay outside the graph.
            Self::build(shape, data, false, None)
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.inner.shape
    }

    pub fn numel(&self) -> usize {
        numel_of(&self.inner.shape)
    }

    pub fn is_scalar(&self) -> bool {
        self.numel() == 1
    }

    /// Borrow the values.
    pub fn data_ref(&self) -> Ref<'_, Vec<F>> {
        self.inner.data.borrow()
    }

    pub fn data_clone(&self) -> Vec<F> {
        self.inner.data.borrow().clone()
    }

    /// Value of a one-element tensor.
    pub fn item(&self) -> F {
        debug_assert!(self.is_scalar(), "item() on non-scalar tensor");
        self.inner.data.borrow()[0]
    }

    /// Overwrite values in place (optimizer updates on leaves).
    pub fn store(&self, new: &[F]) {
        let mut d = self.inner.data.borrow_mut();
        assert_eq!(d.len(), new.len(), "store length mismatch");
        d.copy_from_slice(new);
    }

    pub fn id(&self) -> u64 {
        self.inner.id
    }

    /// Same underlying tensor?
    pub fn same_as(&self, other: &Self) -> bool {
        Rc::ptr_eq(&self.inner, &other.inner)
    }

    pub fn requires_grad(&self) -> bool {
        self.inner.requires_grad
    }

    /// True when this tensor is a gradient sink or was produced by a
    /// recorded operation.
    pub fn participates(&self) -> bool {
        self.inner.requires_grad || self.inner.node.is_some()
    }

    /// Accumulated gradient, if any has been produced.
    pub fn grad(&self) -> Option<Vec<F>> {
        self.inner.grad.borrow().clone()
    }

    pub fn zero_grad(&self) {
        *self.inner.grad.borrow_mut() = None;
    }

    pub(crate) fn clear_grad_internal(&self) {
        *self.inner.grad.borrow_mut() = None;
    }

    /// Add into the gradient accumulator, allocating zeros on first use.
    /// No-op for tensors outside the graph.
    pub(crate) fn with_grad_mut(&self, f: impl FnOnce(&mut [F])) {
        if !self.participates() {
            return;
        }
        let mut g = self.inner.grad.borrow_mut();
        let buf = g.get_or_insert_with(|| vec![F::zero(); self.numel()]);
        f(buf);
    }

    pub(crate) fn grad_ref(&self) -> Ref<'_, Option<Vec<F>>> {
        self.inner.grad.borrow()
    }

    /// Identity forward, zero backward: the result is a plain tensor with the
    /// same values and no graph history.
    pub fn stop_gradient(&self) -> Self {
        Self::build(self.inner.shape.clone(), self.data_clone(), false, None)
    }

    /// Deep copy with no graph history and no gradient requirement.
    pub fn detached_copy(&self) -> Self {
        Self::build(self.inner.shape.clone(), self.data_clone(), false, None)
    }

    /// Elementwise clamp to [0, 1]; non-graph, for external outputs only.
    pub fn clamp01(&self) -> Self {
        let data = self
            .data_ref()
            .iter()
            .map(|&v| v.max(F::zero()).min(F::one()))
            .collect();
        Self::build(self.inner.shape.clone(), data, false, None)
    }

    /// FNV-1a fingerprint of shape and exact value bytes.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut eat = |b: u8| {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        };
        for &e in &self.inner.shape {
            for b in (e as u64).to_le_bytes() {
                eat(b);
            }
        }
        for &v in self.data_ref().iter() {
            for b in v.to_f().to_bits().to_le_bytes() {
                eat(b);
            }
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type T = TensorBase<f64>;

    #[test]
    fn shape_data_agreement_enforced() {
        assert!(T::from_vec(vec![2, 3], vec![0.0; 6]).is_ok());
        assert!(T::from_vec(vec![2, 3], vec![0.0; 5]).is_err());
    }

    #[test]
    fn scalar_is_rank_zero() {
        let s = T::scalar(2.5);
        assert_eq!(s.shape(), &[] as &[usize]);
        assert_eq!(s.numel(), 1);
        assert_eq!(s.item(), 2.5);
    }

    #[test]
    fn stop_gradient_is_identity_forward() {
        let x = T::param(vec![3], vec![1.0, -2.0, 0.5]).unwrap();
        let y = x.stop_gradient();
        assert_eq!(y.data_clone(), x.data_clone());
        assert!(!y.participates());
    }

    #[test]
    fn fingerprint_sensitive_to_values_and_shape() {
        let a = T::from_vec(vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = T::from_vec(vec![4], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let c = T::from_vec(vec![2, 2], vec![1.0, 2.0, 3.0, 4.5]).unwrap();
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), c.fingerprint());
        assert_eq!(a.fingerprint(), a.detached_copy().fingerprint());
    }
}
