//! Exact linear algebra over ℚ: sparse span membership and small dense matrices.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rational::Q;

pub type Matrix = Vec<Vec<Q>>;
pub type SparseVec<K> = BTreeMap<K, Q>;

/// Reduced row echelon basis of the span of some sparse generators, with each
/// basis row remembered as a combination of the generators.
///
/// Pivots are the smallest key of each reduced row, so the result does not
/// depend on hashing or insertion accidents.
#[derive(Clone, Debug)]
pub struct SpanBasis<K: Ord + Clone> {
    rows: Vec<(K, SparseVec<K>, Vec<Q>)>,
    generators: usize,
    dependent: Vec<usize>,
}

fn axpy<K: Ord + Clone>(y: &mut SparseVec<K>, a: &Q, x: &SparseVec<K>) {
    for (k, v) in x {
        let e = y.entry(k.clone()).or_insert_with(Q::zero);
        *e += a * v;
        if e.is_zero() {
            y.remove(k);
        }
    }
}

fn axpy_dense(y: &mut [Q], a: &Q, x: &[Q]) {
    for (u, v) in y.iter_mut().zip(x) {
        *u += a * v;
    }
}

impl<K: Ord + Clone> SpanBasis<K> {
    pub fn new(generators: &[SparseVec<K>]) -> Self {
        let g = generators.len();
        let mut rows: Vec<(K, SparseVec<K>, Vec<Q>)> = Vec::new();
        let mut dependent = Vec::new();
        for (idx, v) in generators.iter().enumerate() {
            let mut v = v.clone();
            let mut comb = vec![Q::zero(); g];
            comb[idx] = Q::one();
            for (p, row, rc) in &rows {
                if let Some(c) = v.get(p).cloned() {
                    axpy(&mut v, &-c.clone(), row);
                    axpy_dense(&mut comb, &-c, rc);
                }
            }
            let Some((pivot, lead)) = v.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
                dependent.push(idx);
                continue;
            };
            let inv = Q::one() / lead;
            for c in v.values_mut() {
                *c *= &inv;
            }
            for c in comb.iter_mut() {
                *c *= &inv;
            }
            for (_, row, rc) in rows.iter_mut() {
                if let Some(c) = row.get(&pivot).cloned() {
                    axpy(row, &-c.clone(), &v);
                    axpy_dense(rc, &-c, &comb);
                }
            }
            rows.push((pivot, v, comb));
        }
        SpanBasis { rows, generators: g, dependent }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Generators that were combinations of earlier ones.
    pub fn dependent(&self) -> &[usize] {
        &self.dependent
    }

    pub fn is_independent(&self) -> bool {
        self.dependent.is_empty()
    }

    /// Coefficients on the generators when `v` lies in the span.
    pub fn express(&self, v: &SparseVec<K>) -> Option<Vec<Q>> {
        let mut rest = v.clone();
        let mut comb = vec![Q::zero(); self.generators];
        for (p, row, rc) in &self.rows {
            if let Some(c) = v.get(p) {
                axpy(&mut rest, &-c.clone(), row);
                axpy_dense(&mut comb, c, rc);
            }
        }
        if rest.is_empty() {
            Some(comb)
        } else {
            None
        }
    }
}

fn clear_denominators(rows: &[Vec<Q>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            r.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect()
        })
        .collect()
}

/// Rank by fraction-free (Bareiss) elimination on integer rows.
pub fn rank_bareiss(rows: &[Vec<Q>]) -> usize {
    let mut m = clear_denominators(rows);
    let nrows = m.len();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let v = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
        if r == nrows {
            break;
        }
    }
    r
}

/// Row echelon form by rational elimination. Returns (rref, pivot columns).
pub fn rref(a: &Matrix) -> (Matrix, Vec<usize>) {
    let mut m = a.clone();
    let nrows = m.len();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Q::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..nrows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank(a: &Matrix) -> usize {
    rref(a).1.len()
}

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "matrix shapes");
            (0..cols).map(|j| (0..inner).fold(Q::zero(), |acc, k| acc + &row[k] * &b[k][j])).collect()
        })
        .collect()
}

pub fn mat_vec(a: &Matrix, v: &[Q]) -> Vec<Q> {
    a.iter().map(|row| row.iter().zip(v).fold(Q::zero(), |acc, (x, y)| acc + x * y)).collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return None;
    }
    let aug: Matrix = a.iter().zip(identity(n)).map(|(r, e)| r.iter().cloned().chain(e).collect()).collect();
    let (m, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Basis of {v : a v = 0}.
pub fn kernel(a: &Matrix, ncols: usize) -> Vec<Vec<Q>> {
    let (m, pivots) = rref(a);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); ncols];
            v[f] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// For `c` of full column rank k (N×k): a k×N matrix `c′` with `c′ c = Id`,
/// supported on the first k linearly independent rows of `c`.
pub fn left_inverse(c: &Matrix) -> Option<Matrix> {
    let n = c.len();
    let k = c.first().map_or(0, |r| r.len());
    let (_, pivots) = rref(&transpose(c));
    if pivots.len() < k {
        return None;
    }
    let square: Matrix = pivots.iter().map(|&r| c[r].clone()).collect();
    let inv = inverse(&square)?;
    let mut out = vec![vec![Q::zero(); n]; k];
    for i in 0..k {
        for (s, &r) in pivots.iter().enumerate() {
            out[i][r] = inv[i][s].clone();
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn ranks_agree() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        assert_eq!(rank_bareiss(&a), 2);
        let b = vec![vec![qf(1, 2), qf(1, 3)], vec![qf(3, 2), q(1)]];
        assert_eq!(rank(&b), 1);
        assert_eq!(rank_bareiss(&b), 1);
    }

    #[test]
    fn inverse_and_kernel() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
        let k = kernel(&m(&[&[1, 1, 0], &[0, 0, 1]]), 3);
        assert_eq!(k, vec![vec![q(-1), q(1), q(0)]]);
    }

    #[test]
    fn left_inverse_of_tall_matrix() {
        let c = m(&[&[0, 0], &[1, 0], &[1, 2]]);
        let l = left_inverse(&c).unwrap();
        assert_eq!(mat_mul(&l, &c), identity(2));
        assert!(l.iter().all(|r| r[0] == q(0)));
    }

    #[test]
    fn span_membership() {
        let g: Vec<SparseVec<u32>> = vec![
            [(0, q(1)), (1, q(1))].into_iter().collect(),
            [(1, q(1)), (2, q(2))].into_iter().collect(),
            [(0, q(1)), (2, q(-2))].into_iter().collect(),
        ];
        let b = SpanBasis::new(&g);
        assert_eq!(b.rank(), 2);
        assert_eq!(b.dependent(), &[2]);
        let v: SparseVec<u32> = [(0, q(2)), (1, q(3)), (2, q(2))].into_iter().collect();
        let c = b.express(&v).unwrap();
        let mut back: SparseVec<u32> = BTreeMap::new();
        for (ci, gi) in c.iter().zip(&g) {
            axpy(&mut back, ci, gi);
        }
        assert_eq!(back, v);
        let w: SparseVec<u32> = [(0, q(1))].into_iter().collect();
        assert!(b.express(&w).is_none());
    }
}
