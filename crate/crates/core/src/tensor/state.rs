use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::{kron_vec, norm_sqr};
use super::space::HilbertSpace;
use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

/// Vector of amplitudes on a multipartite space.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T> {
    space: HilbertSpace,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Scalar> PureState<T> {
    /// Unnormalized vector; only the length is checked.
    pub fn new(space: HilbertSpace, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.len() != space.total() {
            return Err(Error::DimensionMismatch { expected: space.total(), found: amplitudes.len() });
        }
        Ok(Self { space, amplitudes })
    }

    /// Computational basis ket `|digits>`.
    pub fn basis(space: HilbertSpace, digits: &[usize]) -> Self {
        let mut amplitudes = vec![Complex::zero(); space.total()];
        amplitudes[space.index(digits)] = Complex::one();
        Self { space, amplitudes }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        norm_sqr(&self.amplitudes)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            space: self.space.tensor(&other.space),
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }

    /// `self + c * other`, same space required.
    pub fn add_scaled(&self, c: &Complex<T>, other: &Self) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.total(),
                found: other.space.total(),
            });
        }
        let amplitudes = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.clone() + c.clone() * b.clone())
            .collect();
        Ok(Self { space: self.space.clone(), amplitudes })
    }
}

impl<T: Real> PureState<T> {
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr().sqrt();
        if n == T::zero() {
            return Err(Error::ZeroVector(0));
        }
        for a in &mut self.amplitudes {
            *a = a.unscale(n);
        }
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }
}
