//! Dense row-major tensor of real scalars.
//!
//! This is the sole numeric container in the crate: vectors are rank-1,
//! matrices rank-2, scalars rank-0 (or rank-1 of length 1 where a shape
//! is required). Gradient tracking lives in the [`crate::autodiff`]
//! tape, not here; a `Tensor` is plain immutable data once built.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<T> {
    shape: Vec<usize>,
    data: Vec<T>,
}

impl<T: Real> Tensor<T> {
    /// Build a tensor from an explicit shape and row-major buffer.
    pub fn new(shape: Vec<usize>, data: Vec<T>) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if expected != data.len() {
            return Err(Error::Shape(format!(
                "shape {:?} expects {} elements, got {}",
                shape,
                expected,
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        Self {
            shape,
            data: vec![T::zero(); len],
        }
    }

    /// Rank-1 tensor from a slice.
    pub fn from_slice(values: &[T]) -> Self {
        Self {
            shape: vec![values.len()],
            data: values.to_vec(),
        }
    }

    /// Rank-0 scalar tensor.
    pub fn scalar(value: T) -> Self {
        Self {
            shape: vec![],
            data: vec![value],
        }
    }

    /// Rank-2 tensor from rows; all rows must share a length.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Shape(format!(
                    "ragged rows: expected {}, got {}",
                    c,
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            shape: vec![r, c],
            data,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// The single element of a scalar (or length-1) tensor.
    pub fn item(&self) -> Result<T> {
        if self.data.len() == 1 {
            Ok(self.data[0])
        } else {
            Err(Error::Contract(format!(
                "item() on tensor of {} elements",
                self.data.len()
            )))
        }
    }

    /// Element of a rank-2 tensor.
    pub fn at(&self, row: usize, col: usize) -> T {
        debug_assert_eq!(self.rank(), 2);
        self.data[row * self.shape[1] + col]
    }

    /// Copy of row `i` of a rank-2 tensor.
    pub fn row(&self, i: usize) -> Result<Tensor<T>> {
        if self.rank() != 2 {
            return Err(Error::Shape(format!("row() on rank-{} tensor", self.rank())));
        }
        let (r, c) = (self.shape[0], self.shape[1]);
        if i >= r {
            return Err(Error::Index { index: i, len: r });
        }
        Ok(Tensor::from_slice(&self.data[i * c..(i + 1) * c]))
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Tensor<T> {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    fn zip(&self, other: &Tensor<T>, f: impl Fn(T, T) -> T) -> Result<Tensor<T>> {
        if self.shape != other.shape {
            return Err(Error::Shape(format!(
                "elementwise op on {:?} vs {:?}",
                self.shape, other.shape
            )));
        }
        Ok(Tensor {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Tensor<T>) -> Result<Tensor<T>> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Tensor<T>) -> Result<Tensor<T>> {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Tensor<T>) -> Result<Tensor<T>> {
        self.zip(other, |a, b| a * b)
    }

    pub fn scale(&self, s: T) -> Tensor<T> {
        self.map(|x| x * s)
    }

    pub fn neg(&self) -> Tensor<T> {
        self.map(|x| -x)
    }

    pub fn dot(&self, other: &Tensor<T>) -> Result<T> {
        if self.shape != other.shape {
            return Err(Error::Shape(format!(
                "dot on {:?} vs {:?}",
                self.shape, other.shape
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a * b)
            .sum())
    }

    /// Euclidean norm over all elements.
    pub fn norm(&self) -> T {
        self.data
            .iter()
            .map(|&x| x * x)
            .sum::<T>()
            .sqrt()
    }

    pub fn norm_sq(&self) -> T {
        self.data.iter().map(|&x| x * x).sum()
    }

    pub fn sum(&self) -> T {
        self.data.iter().copied().sum()
    }

    /// Matrix product: rank-2 × rank-2 or rank-2 × rank-1.
    pub fn matmul(&self, other: &Tensor<T>) -> Result<Tensor<T>> {
        match (self.rank(), other.rank()) {
            (2, 1) => {
                let (r, c) = (self.shape[0], self.shape[1]);
                if other.shape[0] != c {
                    return Err(Error::Shape(format!(
                        "matvec {:?} × {:?}",
                        self.shape, other.shape
                    )));
                }
                let mut out = vec![T::zero(); r];
                for i in 0..r {
                    let mut acc = T::zero();
                    for k in 0..c {
                        acc = acc + self.data[i * c + k] * other.data[k];
                    }
                    out[i] = acc;
                }
                Ok(Tensor {
                    shape: vec![r],
                    data: out,
                })
            }
            (2, 2) => {
                let (r, c) = (self.shape[0], self.shape[1]);
                let (c2, p) = (other.shape[0], other.shape[1]);
                if c != c2 {
                    return Err(Error::Shape(format!(
                        "matmul {:?} × {:?}",
                        self.shape, other.shape
                    )));
                }
                let mut out = vec![T::zero(); r * p];
                for i in 0..r {
                    for k in 0..c {
                        let a = self.data[i * c + k];
                        for j in 0..p {
                            out[i * p + j] = out[i * p + j] + a * other.data[k * p + j];
                        }
                    }
                }
                Ok(Tensor {
                    shape: vec![r, p],
                    data: out,
                })
            }
            _ => Err(Error::Shape(format!(
                "matmul on ranks {} and {}",
                self.rank(),
                other.rank()
            ))),
        }
    }

    /// Transpose of a rank-2 tensor.
    pub fn transpose(&self) -> Result<Tensor<T>> {
        if self.rank() != 2 {
            return Err(Error::Shape(format!(
                "transpose on rank-{} tensor",
                self.rank()
            )));
        }
        let (r, c) = (self.shape[0], self.shape[1]);
        let mut data = vec![T::zero(); r * c];
        for i in 0..r {
            for j in 0..c {
                data[j * r + i] = self.data[i * c + j];
            }
        }
        Ok(Tensor {
            shape: vec![c, r],
            data,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}
