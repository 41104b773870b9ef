use std::ops::{Index, IndexMut};

/// A finite-dimensional point of `R^m`, the iterate type of the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn new(entries: Vec<f64>) -> Self {
        assert!(!entries.is_empty(), "vectors must have dimension >= 1");
        DenseVector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(other.iter()).map(|(a, b)| a * b).sum()
    }

    /// Euclidean distance `|self - other|`.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Inertial extrapolation `self + coeff * (self - prev)`.
    pub fn extrapolate(&self, prev: &Self, coeff: f64) -> Self {
        assert_eq!(self.dim(), prev.dim());
        DenseVector(
            self.0
                .iter()
                .zip(prev.iter())
                .map(|(c, p)| c + coeff * (c - p))
                .collect(),
        )
    }

    /// `self + coeff * other`.
    pub fn axpy(&self, coeff: f64, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        DenseVector(
            self.0
                .iter()
                .zip(other.iter())
                .map(|(a, b)| a + coeff * b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-1.0, other)
    }

    pub fn scale(&self, coeff: f64) -> Self {
        DenseVector(self.0.iter().map(|a| coeff * a).collect())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        DenseVector(self.0.iter().map(|&a| f(a)).collect())
    }
}

impl From<Vec<f64>> for DenseVector {
    fn from(entries: Vec<f64>) -> Self {
        Self::new(entries)
    }
}

impl<const N: usize> From<[f64; N]> for DenseVector {
    fn from(entries: [f64; N]) -> Self {
        Self::new(entries.to_vec())
    }
}

impl Index<usize> for DenseVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for DenseVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl IntoIterator for DenseVector {
    type Item = f64;
    type IntoIter = std::vec::IntoIter<f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}
