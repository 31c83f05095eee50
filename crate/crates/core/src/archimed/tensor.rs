//! Dense row-major complex tensors with per-axis linear maps.

use crate::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    pub dims: Vec<usize>,
    pub data: Vec<C64>,
}

impl Tensor {
    pub fn zeros(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self {
            dims,
            data: vec![C64::new(0.0, 0.0); n],
        }
    }

    fn split(&self, axis: usize) -> (usize, usize, usize) {
        let outer = self.dims[..axis].iter().product();
        let inner = self.dims[axis + 1..].iter().product();
        (outer, self.dims[axis], inner)
    }

    /// Applies `mat` (out x in) along `axis`.
    pub fn map_axis(&self, axis: usize, mat: &[Vec<C64>]) -> Tensor {
        let (outer, n, inner) = self.split(axis);
        let m = mat.len();
        let mut dims = self.dims.clone();
        dims[axis] = m;
        let mut out = Tensor::zeros(dims);
        for o in 0..outer {
            for (r, row) in mat.iter().enumerate() {
                for (t, &a) in row.iter().enumerate() {
                    if a == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let src = o * n * inner + t * inner;
                    let dst = o * m * inner + r * inner;
                    for i in 0..inner {
                        out.data[dst + i] += a * self.data[src + i];
                    }
                }
            }
        }
        out
    }

    /// Sums `axis` against the weights `w`, removing it.
    pub fn contract_axis(&self, axis: usize, w: &[C64]) -> Tensor {
        let mut t = self.map_axis(axis, &[w.to_vec()]);
        t.dims.remove(axis);
        t
    }

    /// Outer product with `w`, inserting a new axis at position `axis`.
    pub fn insert_axis(&self, axis: usize, w: &[C64]) -> Tensor {
        let mut dims = self.dims.clone();
        dims.insert(axis, 1);
        let t = Tensor {
            dims,
            data: self.data.clone(),
        };
        let col: Vec<Vec<C64>> = w.iter().map(|&x| vec![x]).collect();
        t.map_axis(axis, &col)
    }

    /// Moves source axis perm[k] to position k.
    pub fn permute(&self, perm: &[usize]) -> Tensor {
        let dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let mut strides = vec![1usize; self.dims.len()];
        for a in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * self.dims[a + 1];
        }
        let mut out = Tensor::zeros(dims.clone());
        let mut idx = vec![0usize; dims.len()];
        for v in out.data.iter_mut() {
            let src: usize = idx.iter().zip(perm).map(|(i, &p)| i * strides[p]).sum();
            *v = self.data[src];
            for a in (0..dims.len()).rev() {
                idx[a] += 1;
                if idx[a] < dims[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        out
    }

    pub fn scale(&self, c: C64) -> Tensor {
        Tensor {
            dims: self.dims.clone(),
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(dims: Vec<usize>) -> Tensor {
        let n: usize = dims.iter().product();
        Tensor {
            dims,
            data: (0..n).map(|i| C64::new(i as f64, 0.0)).collect(),
        }
    }

    #[test]
    fn contract_then_insert() {
        let a = t(vec![2, 3]);
        let ones = vec![C64::new(1.0, 0.0); 3];
        let s = a.contract_axis(1, &ones);
        assert_eq!(s.dims, vec![2]);
        assert_eq!(s.data, vec![C64::new(3.0, 0.0), C64::new(12.0, 0.0)]);
        let b = s.insert_axis(0, &[C64::new(1.0, 0.0), C64::new(2.0, 0.0)]);
        assert_eq!(b.dims, vec![2, 2]);
        assert_eq!(b.data[3], C64::new(24.0, 0.0));
    }

    #[test]
    fn permute_transposes() {
        let a = t(vec![2, 3]);
        let b = a.permute(&[1, 0]);
        assert_eq!(b.dims, vec![3, 2]);
        assert_eq!(b.data[1], a.data[3]);
        assert_eq!(b.permute(&[1, 0]), a);
    }
}
