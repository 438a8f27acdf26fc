//! Weight slices: finite bases of homogeneous polyvectors or forms and the
//! matrices of weight-homogeneous linear maps between them.
//!
//! With `deg x_i = 1`, `deg ∂_i = -1` and `deg dx_i = 1`, a slice of a
//! polynomial ring is finite. On rings with invertible variables every
//! exponent is confined to a box `|α_i| ≤ B`, so slice computations there
//! are not exhaustive.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::calculus::{Graded, Indices, Kind};
use crate::error::Result;
use crate::linalg::{self, Rref};
use crate::ring::{Monomial, Ring};

/// A basis coordinate: wedge indices and a monomial.
pub type Coord = (Indices, Monomial);

/// Bounds for slice enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SliceBounds {
    /// Per-variable exponent bound used when the ring has invertible variables.
    pub exponent_box: i32,
}

impl SliceBounds {
    /// Whether slices of `ring` are complete (no box truncation).
    pub fn exhaustive(&self, ring: &Ring) -> bool {
        !ring.has_invertible()
    }
}

/// All monomials of total degree `weight`.
pub fn monomials_of_weight(ring: &Ring, weight: i64, bounds: SliceBounds) -> Vec<Monomial> {
    let n = ring.nvars();
    let boxed = ring.has_invertible();
    let b = bounds.exponent_box as i64;
    let ranges: Vec<(i64, i64)> = (0..n)
        .map(|i| {
            let lo = if ring.is_invertible(i) { -b } else { 0 };
            let hi = if boxed { b } else { weight.max(0) };
            (lo, hi)
        })
        .collect();
    let mut out = Vec::new();
    let mut cur = vec![0i32; n];
    enumerate(&ranges, 0, weight, &mut cur, &mut out);
    out.sort();
    out
}

fn enumerate(
    ranges: &[(i64, i64)],
    i: usize,
    left: i64,
    cur: &mut Vec<i32>,
    out: &mut Vec<Monomial>,
) {
    if i == ranges.len() {
        if left == 0 {
            out.push(Monomial(cur.clone()));
        }
        return;
    }
    let rest_lo: i64 = ranges[i + 1..].iter().map(|r| r.0).sum();
    let rest_hi: i64 = ranges[i + 1..].iter().map(|r| r.1).sum();
    let (lo, hi) = ranges[i];
    for e in lo..=hi {
        let rem = left - e;
        if rem < rest_lo || rem > rest_hi {
            continue;
        }
        cur[i] = e as i32;
        enumerate(ranges, i + 1, rem, cur, out);
    }
    cur[i] = 0;
}

/// Increasing index tuples of length `k` from `0..n`.
pub fn index_sets(n: usize, k: usize) -> Vec<Indices> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Indices>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// Basis of the weight-`weight` slice of degree-`degree` elements, ordered
/// by index tuple then monomial.
pub fn slice_basis<K: Kind>(
    ring: &Ring,
    degree: usize,
    weight: i64,
    bounds: SliceBounds,
) -> Vec<Coord> {
    let mut out = Vec::new();
    for idx in index_sets(ring.nvars(), degree) {
        let mono_weight = weight - K::WEIGHT_SIGN * degree as i64;
        for m in monomials_of_weight(ring, mono_weight, bounds) {
            out.push((idx.clone(), m));
        }
    }
    out
}

/// Matrix of a linear map restricted to one weight slice.
#[derive(Debug, Clone)]
pub struct SliceMap {
    pub domain: Vec<Coord>,
    pub codomain: Vec<Coord>,
    /// Dense rows indexed by codomain coordinates.
    rows: Vec<Vec<BigRational>>,
}

impl SliceMap {
    /// Tabulates `f` on the slice basis of degree `degree`, weight `weight`.
    pub fn build<K1: Kind, K2: Kind>(
        ring: &Ring,
        degree: usize,
        weight: i64,
        bounds: SliceBounds,
        f: impl Fn(&Graded<K1>) -> Result<Graded<K2>>,
    ) -> Result<Self> {
        let domain = slice_basis::<K1>(ring, degree, weight, bounds);
        let mut images = Vec::with_capacity(domain.len());
        for c in &domain {
            let mut coords = BTreeMap::new();
            coords.insert(c.clone(), BigRational::from_integer(1.into()));
            let e = Graded::<K1>::from_coordinates(ring, degree, &coords);
            images.push(f(&e)?.coordinates_at(0));
        }
        let mut index: BTreeMap<Coord, usize> = BTreeMap::new();
        for img in &images {
            for k in img.keys() {
                let next = index.len();
                index.entry(k.clone()).or_insert(next);
            }
        }
        let mut codomain = vec![(Vec::new(), Monomial(Vec::new())); index.len()];
        for (k, &i) in &index {
            codomain[i] = k.clone();
        }
        let mut rows = vec![vec![BigRational::zero(); domain.len()]; codomain.len()];
        for (j, img) in images.iter().enumerate() {
            for (k, v) in img {
                rows[index[k]][j] = v.clone();
            }
        }
        Ok(SliceMap {
            domain,
            codomain,
            rows,
        })
    }

    pub fn rank(&self) -> usize {
        Rref::new(self.rows.clone(), self.domain.len()).rank()
    }

    /// Kernel basis as domain coordinate vectors.
    pub fn kernel(&self) -> Vec<Vec<BigRational>> {
        Rref::new(self.rows.clone(), self.domain.len()).kernel()
    }

    /// Image basis vectors (columns), expressed in the given coordinate list.
    /// Coordinates absent from `target` are dropped; callers pass a superset.
    pub fn columns_in(&self, target: &[Coord]) -> Vec<Vec<BigRational>> {
        let pos: BTreeMap<&Coord, usize> = target.iter().enumerate().map(|(i, c)| (c, i)).collect();
        (0..self.domain.len())
            .map(|j| {
                let mut v = vec![BigRational::zero(); target.len()];
                for (i, row) in self.rows.iter().enumerate() {
                    if let Some(&p) = pos.get(&self.codomain[i]) {
                        v[p] = row[j].clone();
                    }
                }
                v
            })
            .collect()
    }

    /// Preimage of `target`, or `None` if `target` is not in the image.
    /// Free variables are set to zero.
    pub fn solve(
        &self,
        target: &BTreeMap<Coord, BigRational>,
    ) -> Option<BTreeMap<Coord, BigRational>> {
        let mut rows = self.rows.clone();
        let mut b: Vec<BigRational> = self
            .codomain
            .iter()
            .map(|c| target.get(c).cloned().unwrap_or_else(BigRational::zero))
            .collect();
        let index: BTreeMap<&Coord, usize> = self
            .codomain
            .iter()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();
        for (c, v) in target {
            if !index.contains_key(c) && !v.is_zero() {
                // Target coordinate outside the image's support: add a zero row.
                rows.push(vec![BigRational::zero(); self.domain.len()]);
                b.push(v.clone());
            }
        }
        let x = linalg::solve(&rows, self.domain.len(), &b)?;
        Some(
            self.domain
                .iter()
                .zip(x)
                .filter(|(_, v)| !v.is_zero())
                .map(|(c, v)| (c.clone(), v))
                .collect(),
        )
    }
}

/// Turns a domain coordinate vector into a coordinate map.
pub fn vector_to_coords(basis: &[Coord], v: &[BigRational]) -> BTreeMap<Coord, BigRational> {
    basis
        .iter()
        .zip(v)
        .filter(|(_, x)| !x.is_zero())
        .map(|(c, x)| (c.clone(), x.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{Forms, Vectors};
    use crate::ring::CoordinateRing;

    #[test]
    fn polynomial_slices_are_complete() {
        let r = CoordinateRing::polynomial(&["x", "y", "z"]).unwrap();
        let b = SliceBounds { exponent_box: 3 };
        assert_eq!(monomials_of_weight(&r, 2, b).len(), 6);
        assert_eq!(monomials_of_weight(&r, 6, b).len(), 28);
        assert!(monomials_of_weight(&r, -1, b).is_empty());
        // vector fields of weight 0: linear coefficients times ∂_i
        assert_eq!(slice_basis::<Vectors>(&r, 1, 0, b).len(), 9);
        assert_eq!(slice_basis::<Forms>(&r, 3, 3, b).len(), 1);
    }

    #[test]
    fn laurent_slices_respect_the_box() {
        let r = CoordinateRing::new(&["x", "y"], &["y"]).unwrap();
        let b = SliceBounds { exponent_box: 2 };
        let ms = monomials_of_weight(&r, 0, b);
        assert_eq!(ms.len(), 3);
        assert!(ms.iter().all(|m| m.exps()[0] >= 0 && m.exps()[0] <= 2));
        assert!(!b.exhaustive(&r));
    }

    #[test]
    fn index_sets_are_sorted() {
        assert_eq!(index_sets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(index_sets(2, 0), vec![Vec::<usize>::new()]);
    }
}
