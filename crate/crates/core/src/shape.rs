use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered list of positive dimensions `d₁ × … × d_m`.
///
/// Order 0 (no dimensions) is a scalar with one element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Shape {
    dims: Vec<usize>,
    size: usize,
}

impl Shape {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        let mut size: usize = 1;
        for (k, &d) in dims.iter().enumerate() {
            if d == 0 {
                return Err(Error::InvalidShape(format!("dimension {} is zero", k + 1)));
            }
            size = size
                .checked_mul(d)
                .ok_or_else(|| Error::InvalidShape(format!("total size of {dims:?} overflows")))?;
        }
        Ok(Shape { dims, size })
    }

    pub fn scalar() -> Self {
        Shape { dims: Vec::new(), size: 1 }
    }

    pub fn matrix(rows: usize, cols: usize) -> Result<Self> {
        Shape::new(vec![rows, cols])
    }

    #[inline]
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.dims.len()
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn dim(&self, mode: usize) -> usize {
        self.dims[mode]
    }

    /// Column-major strides: the first index varies fastest.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = Vec::with_capacity(self.dims.len());
        let mut acc = 1;
        for &d in &self.dims {
            strides.push(acc);
            acc *= d;
        }
        strides
    }

    /// Flat offset of a 0-based multi-index, or `None` when out of range.
    pub fn offset(&self, index: &[usize]) -> Option<usize> {
        if index.len() != self.dims.len() {
            return None;
        }
        let mut off = 0;
        let mut stride = 1;
        for (&i, &d) in index.iter().zip(&self.dims) {
            if i >= d {
                return None;
            }
            off += i * stride;
            stride *= d;
        }
        Some(off)
    }

    /// Inverse of [`Shape::offset`].
    pub fn unravel(&self, mut offset: usize) -> Vec<usize> {
        let mut index = Vec::with_capacity(self.dims.len());
        for &d in &self.dims {
            index.push(offset % d);
            offset /= d;
        }
        index
    }

    /// Iterate all multi-indices in storage order.
    pub fn indices(&self) -> MultiIndexIter {
        MultiIndexIter {
            dims: self.dims.clone(),
            current: vec![0; self.dims.len()],
            remaining: self.size,
        }
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.order() {
            return Err(Error::ModeOutOfRange { mode: mode + 1, order: self.order() });
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for Shape {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Shape::new(dims)
    }
}

impl From<Shape> for Vec<usize> {
    fn from(shape: Shape) -> Self {
        shape.dims
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dims.is_empty() {
            return f.write_str("scalar");
        }
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        f.write_str(&parts.join("x"))
    }
}

/// Column-major multi-index iterator.
pub struct MultiIndexIter {
    dims: Vec<usize>,
    current: Vec<usize>,
    remaining: usize,
}

impl Iterator for MultiIndexIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.remaining == 0 {
            return None;
        }
        let out = self.current.clone();
        self.remaining -= 1;
        for (i, &d) in self.current.iter_mut().zip(&self.dims) {
            *i += 1;
            if *i < d {
                break;
            }
            *i = 0;
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

impl ExactSizeIterator for MultiIndexIter {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_dimension() {
        assert!(Shape::new(vec![2, 0]).is_err());
    }

    #[test]
    fn rejects_overflowing_size() {
        assert!(Shape::new(vec![usize::MAX, 2]).is_err());
    }

    #[test]
    fn scalar_has_one_element() {
        let s = Shape::scalar();
        assert_eq!(s.size(), 1);
        assert_eq!(s.order(), 0);
        assert_eq!(s.offset(&[]), Some(0));
        assert_eq!(s.indices().count(), 1);
    }

    #[test]
    fn offsets_are_column_major() {
        // element (i1,i2,i3) at sum (i_k - 1) prod_{l<k} d_l, written 0-based here
        let s = Shape::new(vec![2, 2, 2]).unwrap();
        assert_eq!(s.offset(&[1, 0, 0]), Some(1));
        assert_eq!(s.offset(&[0, 0, 1]), Some(4));
        assert_eq!(s.offset(&[0, 2, 0]), None);
        for (off, idx) in s.indices().enumerate() {
            assert_eq!(s.offset(&idx), Some(off));
            assert_eq!(s.unravel(off), idx);
        }
    }
}
