//! One-dimensional and separable n-dimensional discrete cosine transforms.
//!
//! The inverse transform `dct3_1d` maps frequency coefficients to values:
//!
//! ```text
//! w_k = (1/sqrt(N)) * (c_0 + 2 * sum_{n=1}^{N-1} c_n * cos(pi/N * n * (k + 1/2)))
//! ```
//!
//! The forward transform `dct2_1d` uses the normalization that makes it the
//! exact inverse of `dct3_1d`:
//!
//! ```text
//! c_n = (1/sqrt(N)) * sum_{k=0}^{N-1} w_k * cos(pi/N * n * (k + 1/2))
//! ```
//!
//! Multi-dimensional transforms apply the 1D transform along each axis of a
//! row-major array, axis 0 first (the transforms along different axes
//! commute, so the order only matters for floating-point round-off).
//!
//! All transforms are the plain O(N^2) sums; problem sizes here never exceed
//! a few hundred per axis, so no fast path is provided.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Highest supported array rank.
pub const MAX_RANK: usize = 4;

/// Dense real array of rank 1..=4, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct RealArrayND {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl RealArrayND {
    /// All-zero array with the given extents.
    pub fn zeros(dims: &[usize]) -> Result<Self> {
        validate_dims(dims)?;
        let len = dims.iter().product();
        Ok(Self {
            dims: dims.to_vec(),
            data: vec![0.0; len],
        })
    }

    /// Array from row-major data; the data length must equal the product of
    /// the extents.
    pub fn from_data(dims: &[usize], data: Vec<f64>) -> Result<Self> {
        validate_dims(dims)?;
        let len: usize = dims.iter().product();
        if data.len() != len {
            return Err(Error::DimsMismatch {
                dims: dims.to_vec(),
                data: data.len(),
            });
        }
        Ok(Self {
            dims: dims.to_vec(),
            data,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Row-major flat offset of a coordinate tuple.
    pub fn flat_index(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.dims.len());
        let mut idx = 0;
        for (c, d) in coords.iter().zip(&self.dims) {
            debug_assert!(c < d);
            idx = idx * d + c;
        }
        idx
    }

    pub fn get(&self, coords: &[usize]) -> f64 {
        self.data[self.flat_index(coords)]
    }

    pub fn set(&mut self, coords: &[usize], value: f64) {
        let idx = self.flat_index(coords);
        self.data[idx] = value;
    }
}

fn validate_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.len() > MAX_RANK {
        return Err(Error::UnsupportedRank(dims.len()));
    }
    if dims.iter().any(|&d| d == 0) {
        return Err(Error::ZeroExtent(dims.to_vec()));
    }
    Ok(())
}

/// Cosine basis table for size `n`: entry `[f][s] = cos(pi/n * f * (s + 1/2))`.
///
/// Both transform directions read the same table so that the 1D and n-D
/// paths produce bit-identical values for identical inputs.
fn cos_table(n: usize) -> Vec<f64> {
    let mut table = vec![0.0; n * n];
    let factor = PI / n as f64;
    for f in 0..n {
        for s in 0..n {
            table[f * n + s] = (factor * f as f64 * (s as f64 + 0.5)).cos();
        }
    }
    table
}

fn dct3_line(coeffs: &[f64], out: &mut [f64], table: &[f64]) {
    let n = coeffs.len();
    let norm = 1.0 / (n as f64).sqrt();
    for (k, w) in out.iter_mut().enumerate() {
        let mut sum = coeffs[0];
        for (f, &c) in coeffs.iter().enumerate().skip(1) {
            sum += 2.0 * c * table[f * n + k];
        }
        *w = norm * sum;
    }
}

fn dct2_line(values: &[f64], out: &mut [f64], table: &[f64]) {
    let n = values.len();
    let norm = 1.0 / (n as f64).sqrt();
    for (f, c) in out.iter_mut().enumerate() {
        let mut sum = 0.0;
        for (k, &v) in values.iter().enumerate() {
            sum += v * table[f * n + k];
        }
        *c = norm * sum;
    }
}

/// Inverse (type-III) DCT of a coefficient sequence.
pub fn dct3_1d(coeffs: &[f64]) -> Result<Vec<f64>> {
    if coeffs.is_empty() {
        return Err(Error::EmptySequence);
    }
    let table = cos_table(coeffs.len());
    let mut out = vec![0.0; coeffs.len()];
    dct3_line(coeffs, &mut out, &table);
    Ok(out)
}

/// Forward (type-II) DCT, normalized so `dct3_1d(dct2_1d(x)) == x` in exact
/// arithmetic.
pub fn dct2_1d(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptySequence);
    }
    let table = cos_table(values.len());
    let mut out = vec![0.0; values.len()];
    dct2_line(values, &mut out, &table);
    Ok(out)
}

#[derive(Copy, Clone)]
enum Direction {
    Inverse,
    Forward,
}

/// Applies the 1D transform along every axis, axis 0 first.
fn transform_nd(array: &RealArrayND, dir: Direction) -> RealArrayND {
    let mut out = array.clone();
    let dims = out.dims.clone();
    for axis in 0..dims.len() {
        let d = dims[axis];
        if d == 1 {
            // A length-1 transform is the identity under this normalization.
            continue;
        }
        let table = cos_table(d);
        let stride: usize = dims[axis + 1..].iter().product();
        let outer: usize = dims[..axis].iter().product();
        let mut line = vec![0.0; d];
        let mut transformed = vec![0.0; d];
        for o in 0..outer {
            for i in 0..stride {
                let base = o * d * stride + i;
                for t in 0..d {
                    line[t] = out.data[base + t * stride];
                }
                match dir {
                    Direction::Inverse => dct3_line(&line, &mut transformed, &table),
                    Direction::Forward => dct2_line(&line, &mut transformed, &table),
                }
                for t in 0..d {
                    out.data[base + t * stride] = transformed[t];
                }
            }
        }
    }
    out
}

/// Separable inverse (type-III) DCT over all axes of the array.
pub fn dct3_nd(array: &RealArrayND) -> RealArrayND {
    transform_nd(array, Direction::Inverse)
}

/// Separable forward (type-II) DCT over all axes; inverse of [`dct3_nd`].
pub fn dct2_nd(array: &RealArrayND) -> RealArrayND {
    transform_nd(array, Direction::Forward)
}
