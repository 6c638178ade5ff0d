use crate::scalar::Real;

/// Coefficients `c[i, j]` of the standardized distribution: row `i` is a
/// spatial DG dof (element-major), column `j` a velocity node.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrix<T> {
    ndof_x: usize,
    ndof_v: usize,
    data: Vec<T>,
}

impl<T: Real> StateMatrix<T> {
    pub fn zeros(ndof_x: usize, ndof_v: usize) -> Self {
        Self {
            ndof_x,
            ndof_v,
            data: vec![T::zero(); ndof_x * ndof_v],
        }
    }

    pub fn from_vec(ndof_x: usize, ndof_v: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), ndof_x * ndof_v, "state size mismatch");
        Self {
            ndof_x,
            ndof_v,
            data,
        }
    }

    pub fn ndof_x(&self) -> usize {
        self.ndof_x
    }

    pub fn ndof_v(&self) -> usize {
        self.ndof_v
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.ndof_v..(i + 1) * self.ndof_v]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.ndof_v..(i + 1) * self.ndof_v]
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.ndof_v + j]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// `self + a * other`
    pub fn axpy(&self, a: T, other: &Self) -> Self {
        Self {
            ndof_x: self.ndof_x,
            ndof_v: self.ndof_v,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&x, &y)| x + a * y)
                .collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &a| m.max(a.abs()))
    }
}
