//! Exact linear algebra over the rationals.

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Reduced row echelon form of a dense rational matrix.
#[derive(Debug, Clone)]
pub struct Rref {
    rows: Vec<Vec<BigRational>>,
    pivots: Vec<usize>,
    ncols: usize,
}

impl Rref {
    /// Row-reduces `m` (every row of length `ncols`).
    pub fn new(mut m: Vec<Vec<BigRational>>, ncols: usize) -> Self {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ncols {
            let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            let inv = m[r][c].recip();
            for v in m[r].iter_mut() {
                *v = &*v * &inv;
            }
            let pivot_row = m[r].clone();
            for (i, row) in m.iter_mut().enumerate() {
                if i == r || row[c].is_zero() {
                    continue;
                }
                let factor = row[c].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                    if !p.is_zero() {
                        *v -= &factor * p;
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == m.len() {
                break;
            }
        }
        m.truncate(r);
        Rref {
            rows: m,
            pivots,
            ncols,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Basis of the null space, one vector per free column in increasing
    /// column order; each vector has a 1 in its free column.
    pub fn kernel(&self) -> Vec<Vec<BigRational>> {
        let free: Vec<usize> = (0..self.ncols)
            .filter(|c| !self.pivots.contains(c))
            .collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); self.ncols];
                v[f] = BigRational::one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    v[p] = -row[f].clone();
                }
                v
            })
            .collect()
    }
}

/// Solves `A x = b`; free variables are set to zero. `None` if inconsistent.
pub fn solve(a: &[Vec<BigRational>], ncols: usize, b: &[BigRational]) -> Option<Vec<BigRational>> {
    let augmented: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let red = Rref::new(augmented, ncols + 1);
    if red.pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![BigRational::zero(); ncols];
    for (row, &p) in red.rows.iter().zip(&red.pivots) {
        x[p] = row[ncols].clone();
    }
    Some(x)
}

/// Rank of a list of vectors of common length.
pub fn rank(vectors: &[Vec<BigRational>], len: usize) -> usize {
    Rref::new(vectors.to_vec(), len).rank()
}

/// Greedily picks vectors from `candidates` that are independent modulo
/// `span` and of each other; returns their indices.
pub fn complement(
    span: &[Vec<BigRational>],
    candidates: &[Vec<BigRational>],
    len: usize,
) -> Vec<usize> {
    let mut acc = span.to_vec();
    let mut current = rank(&acc, len);
    let mut picked = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        acc.push(c.clone());
        let r = rank(&acc, len);
        if r > current {
            current = r;
            picked.push(i);
        } else {
            acc.pop();
        }
    }
    picked
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{int, rat};

    fn m(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| int(v)).collect())
            .collect()
    }

    #[test]
    fn solves_consistent_system() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let x = solve(&a, 2, &[int(5), int(6)]).unwrap();
        assert_eq!(x, vec![int(-4), rat(9, 2)]);
    }

    #[test]
    fn detects_inconsistency() {
        let a = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&a, 2, &[int(1), int(3)]).is_none());
        assert_eq!(
            solve(&a, 2, &[int(1), int(2)]).unwrap(),
            vec![int(1), int(0)]
        );
    }

    #[test]
    fn kernel_spans_null_space() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let red = Rref::new(a.clone(), 3);
        assert_eq!(red.rank(), 1);
        let k = red.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            for row in &a {
                let dot: BigRational = row.iter().zip(v).map(|(p, q)| p * q).sum();
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn complement_skips_dependent_vectors() {
        let span = m(&[&[1, 0, 0]]);
        let cands = m(&[&[2, 0, 0], &[0, 1, 0], &[1, 1, 0], &[0, 0, 1]]);
        assert_eq!(complement(&span, &cands, 3), vec![1, 3]);
    }

    #[test]
    fn empty_systems() {
        assert_eq!(solve(&[], 2, &[]).unwrap(), vec![int(0), int(0)]);
        assert_eq!(Rref::new(vec![], 2).kernel().len(), 2);
    }
}
