//! Reverse-mode differentiable tensors over a dynamically recorded graph.
//!
//! A `Tensor` is a cheap handle onto a graph node holding data, an
//! optional gradient, and a backward closure that maps the node's
//! gradient to contributions for each parent. `backward()` walks the
//! recorded graph in reverse topological order and accumulates into
//! every reachable `requires_grad` leaf; repeated calls accumulate, so
//! optimizers own gradient clearing.

mod adam;
mod gradcheck;
mod init;
mod ops;
mod real;

pub use adam::Adam;
pub use gradcheck::{check_scalar_fn, projection_loss, GradCheckReport};
pub use init::he_uniform;
pub use real::Real;
pub(crate) use real::gemm_into;

use std::cell::{Ref, RefCell};
use std::collections::HashSet;
use std::rc::Rc;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{TensorError, TensorResult};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Per-parent gradient contributions returned by a backward closure.
/// `None` marks a parent that needs no gradient (constants, frozen).
pub(crate) type BackFn<T> =
    Box<dyn Fn(&BackArgs<'_, T>) -> TensorResult<Vec<Option<Vec<T>>>>>;

pub(crate) struct BackArgs<'a, T: Real> {
    pub grad: &'a [T],
    pub out: &'a [T],
    pub parents: &'a [Tensor<T>],
}

struct Node<T: Real> {
    id: u64,
    shape: Vec<usize>,
    data: Vec<T>,
    grad: Option<Vec<T>>,
    requires_grad: bool,
    is_leaf: bool,
    op: &'static str,
    parents: Vec<Tensor<T>>,
    back: Option<BackFn<T>>,
}

pub struct Tensor<T: Real = f32>(Rc<RefCell<Node<T>>>);

impl<T: Real> Clone for Tensor<T> {
    fn clone(&self) -> Self {
        Tensor(Rc::clone(&self.0))
    }
}

impl<T: Real> std::fmt::Debug for Tensor<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = self.0.borrow();
        write!(
            f,
            "Tensor(op={}, shape={:?}, requires_grad={})",
            n.op, n.shape, n.requires_grad
        )
    }
}

fn check_len<T>(shape: &[usize], data: &[T]) -> TensorResult<()> {
    let numel: usize = shape.iter().product();
    if numel != data.len() || shape.iter().any(|&d| d == 0) {
        return Err(TensorError::LengthMismatch {
            shape: shape.to_vec(),
            len: data.len(),
        });
    }
    Ok(())
}

impl<T: Real> Tensor<T> {
    fn make(
        shape: Vec<usize>,
        data: Vec<T>,
        requires_grad: bool,
        is_leaf: bool,
        op: &'static str,
        parents: Vec<Tensor<T>>,
        back: Option<BackFn<T>>,
    ) -> Self {
        Tensor(Rc::new(RefCell::new(Node {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            shape,
            data,
            grad: None,
            requires_grad,
            is_leaf,
            op,
            parents,
            back,
        })))
    }

    /// Constant: not tracked by autodiff.
    pub fn constant(shape: &[usize], data: Vec<T>) -> TensorResult<Self> {
        check_len(shape, &data)?;
        Ok(Self::make(shape.to_vec(), data, false, true, "constant", vec![], None))
    }

    /// Trainable leaf: gradients accumulate here across backward passes.
    pub fn param(shape: &[usize], data: Vec<T>) -> TensorResult<Self> {
        check_len(shape, &data)?;
        Ok(Self::make(shape.to_vec(), data, true, true, "param", vec![], None))
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let n: usize = shape.iter().product();
        Self::make(shape.to_vec(), vec![T::zero(); n], false, true, "constant", vec![], None)
    }

    pub fn full(shape: &[usize], v: T) -> Self {
        let n: usize = shape.iter().product();
        Self::make(shape.to_vec(), vec![v; n], false, true, "constant", vec![], None)
    }

    pub fn scalar(v: T) -> Self {
        Self::make(vec![1], vec![v], false, true, "constant", vec![], None)
    }

    /// Records an op node. Parents and the closure are dropped when no
    /// parent tracks gradients, so pure inference holds no graph.
    pub(crate) fn from_op(
        shape: Vec<usize>,
        data: Vec<T>,
        parents: Vec<Tensor<T>>,
        op: &'static str,
        back: Option<BackFn<T>>,
    ) -> Self {
        debug_assert_eq!(shape.iter().product::<usize>(), data.len());
        let requires = parents.iter().any(|p| p.requires_grad());
        if requires {
            Self::make(shape, data, true, false, op, parents, back)
        } else {
            Self::make(shape, data, false, true, op, vec![], None)
        }
    }

    pub fn id(&self) -> u64 {
        self.0.borrow().id
    }

    pub fn shape(&self) -> Vec<usize> {
        self.0.borrow().shape.clone()
    }

    pub fn numel(&self) -> usize {
        self.0.borrow().data.len()
    }

    pub fn requires_grad(&self) -> bool {
        self.0.borrow().requires_grad
    }

    /// Toggles gradient tracking on a leaf (used to freeze parameters).
    pub fn set_requires_grad(&self, on: bool) {
        let mut n = self.0.borrow_mut();
        debug_assert!(n.is_leaf, "requires_grad is only togglable on leaves");
        n.requires_grad = on;
    }

    pub fn data(&self) -> Ref<'_, [T]> {
        Ref::map(self.0.borrow(), |n| n.data.as_slice())
    }

    pub fn to_vec(&self) -> Vec<T> {
        self.0.borrow().data.clone()
    }

    /// Scalar value; errors on non-scalars.
    pub fn item(&self) -> TensorResult<T> {
        let n = self.0.borrow();
        if n.data.len() != 1 {
            return Err(TensorError::BadShape {
                op: "item",
                expected: "a scalar".into(),
                got: n.shape.clone(),
            });
        }
        Ok(n.data[0])
    }

    /// Overwrites the data of a leaf in place (optimizer updates,
    /// running statistics). Shape must match.
    pub fn set_data(&self, data: &[T]) -> TensorResult<()> {
        let mut n = self.0.borrow_mut();
        if data.len() != n.data.len() {
            return Err(TensorError::LengthMismatch {
                shape: n.shape.clone(),
                len: data.len(),
            });
        }
        n.data.copy_from_slice(data);
        Ok(())
    }

    pub(crate) fn update_data(&self, f: impl FnOnce(&mut [T])) {
        f(&mut self.0.borrow_mut().data);
    }

    pub fn grad(&self) -> Option<Vec<T>> {
        self.0.borrow().grad.clone()
    }

    pub(crate) fn with_grad<R>(&self, f: impl FnOnce(Option<&[T]>) -> R) -> R {
        let n = self.0.borrow();
        f(n.grad.as_deref())
    }

    pub fn zero_grad(&self) {
        self.0.borrow_mut().grad = None;
    }

    /// Cuts the graph: same values, no gradient history.
    pub fn detach(&self) -> Tensor<T> {
        let n = self.0.borrow();
        Self::make(n.shape.clone(), n.data.clone(), false, true, "detach", vec![], None)
    }

    fn accumulate_grad(&self, buf: Vec<T>) {
        let mut n = self.0.borrow_mut();
        debug_assert_eq!(buf.len(), n.data.len());
        match &mut n.grad {
            Some(g) => {
                for (gi, bi) in g.iter_mut().zip(&buf) {
                    *gi += *bi;
                }
            }
            None => n.grad = Some(buf),
        }
    }

    /// Reverse topological order (parents before consumers) over the
    /// gradient-tracking subgraph reachable from `self`.
    fn topo(&self) -> Vec<Tensor<T>> {
        let mut order = Vec::new();
        let mut seen: HashSet<u64> = HashSet::new();
        // (node, next parent index to visit)
        let mut stack: Vec<(Tensor<T>, usize)> = Vec::new();
        if self.requires_grad() {
            seen.insert(self.id());
            stack.push((self.clone(), 0));
        }
        while let Some((t, pi)) = stack.pop() {
            let next = {
                let n = t.0.borrow();
                n.parents
                    .iter()
                    .skip(pi)
                    .enumerate()
                    .find(|(_, p)| p.requires_grad() && !seen.contains(&p.id()))
                    .map(|(off, p)| (pi + off, p.clone()))
            };
            match next {
                Some((idx, parent)) => {
                    stack.push((t, idx + 1));
                    seen.insert(parent.id());
                    stack.push((parent, 0));
                }
                None => order.push(t),
            }
        }
        order
    }

    /// Accumulates ∂self/∂leaf into every reachable tracked leaf.
    pub fn backward(&self) -> TensorResult<()> {
        {
            let n = self.0.borrow();
            if n.data.len() != 1 {
                return Err(TensorError::NonScalarLoss(n.shape.clone()));
            }
            if !n.requires_grad {
                return Ok(());
            }
        }
        let order = self.topo();
        self.accumulate_grad(vec![T::one()]);
        for t in order.iter().rev() {
            let contributions = {
                let n = t.0.borrow();
                if n.back.is_none() {
                    if n.parents.is_empty() {
                        continue;
                    }
                    return Err(TensorError::NoDerivative(n.op));
                }
                let grad = n
                    .grad
                    .as_deref()
                    .expect("node in backward order without gradient");
                let args = BackArgs {
                    grad,
                    out: &n.data,
                    parents: &n.parents,
                };
                (n.back.as_ref().unwrap())(&args)?
            };
            {
                let n = t.0.borrow();
                debug_assert_eq!(contributions.len(), n.parents.len());
            }
            for (i, contrib) in contributions.into_iter().enumerate() {
                if let Some(buf) = contrib {
                    let parent = t.0.borrow().parents[i].clone();
                    if parent.requires_grad() {
                        parent.accumulate_grad(buf);
                    }
                }
            }
            // Intermediate gradients are consumed; only leaves keep theirs.
            let mut n = t.0.borrow_mut();
            if !n.is_leaf {
                n.grad = None;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_gradient_is_ones() {
        let x = Tensor::<f64>::param(&[2, 3], vec![1.0, -2.0, 3.0, 0.5, 0.0, 4.0]).unwrap();
        let loss = x.sum_all();
        loss.backward().unwrap();
        assert_eq!(x.grad().unwrap(), vec![1.0; 6]);
    }

    #[test]
    fn half_sum_of_squares_gradient_is_x() {
        let x = Tensor::<f64>::param(&[2], vec![3.0, -2.0]).unwrap();
        let loss = x.square().sum_all().mul_scalar(0.5);
        loss.backward().unwrap();
        assert_eq!(x.grad().unwrap(), vec![3.0, -2.0]);
    }

    #[test]
    fn backward_accumulates_exactly() {
        let x = Tensor::<f64>::param(&[2], vec![1.0, 2.0]).unwrap();
        let loss = x.square().sum_all();
        loss.backward().unwrap();
        let once = x.grad().unwrap();
        loss.backward().unwrap();
        let twice = x.grad().unwrap();
        assert_eq!(twice, once.iter().map(|v| 2.0 * v).collect::<Vec<_>>());
    }

    #[test]
    fn non_scalar_loss_is_an_error() {
        let x = Tensor::<f64>::param(&[2], vec![1.0, 2.0]).unwrap();
        let y = x.square();
        match y.backward() {
            Err(TensorError::NonScalarLoss(shape)) => assert_eq!(shape, vec![2]),
            other => panic!("expected NonScalarLoss, got {other:?}"),
        }
    }

    #[test]
    fn op_without_derivative_is_an_error() {
        let x = Tensor::<f64>::param(&[2], vec![1.2, 2.7]).unwrap();
        let loss = x.round_nearest().sum_all();
        match loss.backward() {
            Err(TensorError::NoDerivative(op)) => assert_eq!(op, "round"),
            other => panic!("expected NoDerivative, got {other:?}"),
        }
        // Detaching first makes the same computation legal.
        let loss = x.detach().round_nearest().sum_all();
        loss.backward().unwrap();
    }

    #[test]
    fn detach_blocks_gradients() {
        let x = Tensor::<f64>::param(&[2], vec![1.0, 2.0]).unwrap();
        let loss = x.detach().square().sum_all();
        loss.backward().unwrap();
        assert!(x.grad().is_none());
    }

    #[test]
    fn shared_subexpression_accumulates_both_paths() {
        // loss = x*x + x  →  d/dx = 2x + 1
        let x = Tensor::<f64>::param(&[1], vec![3.0]).unwrap();
        let loss = x.mul(&x).unwrap().add(&x).unwrap().sum_all();
        loss.backward().unwrap();
        assert_eq!(x.grad().unwrap(), vec![7.0]);
    }

    #[test]
    fn frozen_leaf_gets_no_gradient() {
        let x = Tensor::<f64>::param(&[2], vec![1.0, 2.0]).unwrap();
        let w = Tensor::<f64>::param(&[2], vec![5.0, 6.0]).unwrap();
        w.set_requires_grad(false);
        let loss = x.mul(&w).unwrap().sum_all();
        loss.backward().unwrap();
        assert_eq!(x.grad().unwrap(), vec![5.0, 6.0]);
        assert!(w.grad().is_none());
    }
}
