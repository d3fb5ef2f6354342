//! Flat <-> multi-index arithmetic for tensor-product node sets.
//!
//! Direction 0 (x) varies fastest, then y, then z:
//! `flat = i_z * n_y * n_x + i_y * n_x + i_x`.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorLayout {
    extents: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl TensorLayout {
    pub fn new(extents: Vec<usize>) -> Result<Self> {
        if extents.is_empty() {
            return Err(Error::invalid("a layout needs at least one direction"));
        }
        if let Some(k) = extents.iter().position(|&e| e == 0) {
            return Err(Error::invalid(format!("direction {k} has zero extent")));
        }
        let mut strides = Vec::with_capacity(extents.len());
        let mut len: usize = 1;
        for &e in &extents {
            strides.push(len);
            len = len.checked_mul(e).ok_or(Error::Capacity {
                requested: usize::MAX,
                limit: usize::MAX,
            })?;
        }
        Ok(TensorLayout {
            extents,
            strides,
            len,
        })
    }

    /// `n` points in each of `d` directions.
    pub fn cube(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![n; d])
    }

    /// `n` points in every direction except `facet_direction`, which has `m`.
    pub fn facet(d: usize, n: usize, m: usize, facet_direction: usize) -> Result<Self> {
        if facet_direction >= d {
            return Err(Error::invalid(format!(
                "facet direction {facet_direction} out of range for d={d}"
            )));
        }
        let mut extents = vec![n; d];
        extents[facet_direction] = m;
        Self::new(extents)
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Total number of points (product of extents).
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn flatten(&self, multi: &[usize]) -> Result<usize> {
        if multi.len() != self.dim() {
            return Err(Error::invalid(format!(
                "multi-index has {} components, layout has {}",
                multi.len(),
                self.dim()
            )));
        }
        let mut flat = 0;
        for (k, (&i, &e)) in multi.iter().zip(&self.extents).enumerate() {
            if i >= e {
                return Err(Error::IndexOutOfBounds {
                    index: i,
                    extent: e,
                    direction: k,
                });
            }
            flat += i * self.strides[k];
        }
        Ok(flat)
    }

    pub fn unflatten(&self, flat: usize) -> Result<Vec<usize>> {
        self.check_flat(flat)?;
        Ok((0..self.dim()).map(|k| self.component(flat, k)).collect())
    }

    /// Writes the multi-index of `flat` into `out` without allocating.
    pub fn unflatten_into(&self, flat: usize, out: &mut [usize]) -> Result<()> {
        self.check_flat(flat)?;
        if out.len() != self.dim() {
            return Err(Error::invalid("output buffer has the wrong length"));
        }
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.component(flat, k);
        }
        Ok(())
    }

    /// Component `k` of `flat`; no bounds check on `flat`.
    #[inline]
    pub fn component(&self, flat: usize, k: usize) -> usize {
        (flat / self.strides[k]) % self.extents[k]
    }

    /// Replaces component `k` of `flat` with `value`.
    #[inline]
    pub fn with_component(&self, flat: usize, k: usize, value: usize) -> usize {
        flat - self.component(flat, k) * self.strides[k] + value * self.strides[k]
    }

    fn check_flat(&self, flat: usize) -> Result<()> {
        if flat >= self.len {
            return Err(Error::IndexOutOfBounds {
                index: flat,
                extent: self.len,
                direction: 0,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn origin_is_zero() {
        let l = TensorLayout::cube(3, 5).unwrap();
        assert_eq!(l.flatten(&[0, 0, 0]).unwrap(), 0);
        assert_eq!(l.unflatten(0).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn x_runs_fastest() {
        // i*n^2 + j*n + k with n=4, i=1, j=2, k=3
        let l = TensorLayout::cube(3, 4).unwrap();
        assert_eq!(l.flatten(&[3, 2, 1]).unwrap(), 27);
        assert_eq!(l.unflatten(27).unwrap(), vec![3, 2, 1]);
    }

    #[test]
    fn exhaustive_round_trip_cube() {
        let l = TensorLayout::cube(3, 3).unwrap();
        for flat in 0..27 {
            assert_eq!(l.flatten(&l.unflatten(flat).unwrap()).unwrap(), flat);
        }
    }

    #[test]
    fn exhaustive_round_trip_mixed_extents() {
        let l = TensorLayout::new(vec![2, 3, 4]).unwrap();
        let mut seen = Vec::new();
        for z in 0..4 {
            for y in 0..3 {
                for x in 0..2 {
                    let f = l.flatten(&[x, y, z]).unwrap();
                    assert_eq!(l.unflatten(f).unwrap(), vec![x, y, z]);
                    seen.push(f);
                }
            }
        }
        assert_eq!(seen, (0..24).collect::<Vec<_>>());
    }

    #[test]
    fn strides_increase_with_direction() {
        let l = TensorLayout::new(vec![3, 4, 5, 2]).unwrap();
        assert_eq!(l.strides(), &[1, 3, 12, 60]);
    }

    #[test]
    fn out_of_range_is_rejected() {
        let l = TensorLayout::cube(2, 3).unwrap();
        assert!(matches!(
            l.flatten(&[3, 0]),
            Err(Error::IndexOutOfBounds { direction: 0, .. })
        ));
        assert!(matches!(
            l.flatten(&[0, 4]),
            Err(Error::IndexOutOfBounds { direction: 1, .. })
        ));
        assert!(l.unflatten(9).is_err());
        assert!(TensorLayout::new(vec![]).is_err());
        assert!(TensorLayout::new(vec![2, 0]).is_err());
    }

    #[test]
    fn with_component_replaces_one_direction() {
        let l = TensorLayout::new(vec![2, 3, 4]).unwrap();
        let f = l.flatten(&[1, 2, 3]).unwrap();
        assert_eq!(l.with_component(f, 1, 0), l.flatten(&[1, 0, 3]).unwrap());
    }

    proptest! {
        #[test]
        fn round_trip_all_small_layouts(extents in prop::collection::vec(1usize..8, 1..5)) {
            let l = TensorLayout::new(extents).unwrap();
            prop_assume!(l.len() <= 10_000);
            for flat in 0..l.len() {
                let multi = l.unflatten(flat).unwrap();
                prop_assert_eq!(l.flatten(&multi).unwrap(), flat);
            }
        }
    }
}
