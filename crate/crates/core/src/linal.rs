//! Prime field arithmetic and exact dense and sparse linear algebra over GF(p).
//!
//! Field elements are plain `u32` residues in `[0, p)`; the modulus lives in a
//! [`PrimeField`] value that every operation takes by reference.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Default modulus, the one used by the worked sessions this crate reproduces.
pub const DEFAULT_PRIME: u32 = 32003;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !(2..1 << 31).contains(&p) || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(PrimeField { p: p as u32 })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (if s >= self.p as u64 { s - self.p as u64 } else { s }) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + (self.p - b)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a.is_multiple_of(self.p) {
            return Err(Error::DivisionByZero(self.p));
        }
        // extended Euclid on (a, p)
        let (mut r0, mut r1) = (self.p as i64, (a % self.p) as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Ok(t0.rem_euclid(self.p as i64) as u32)
    }

    pub fn from_i64(&self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    /// Symmetric representative in `(-p/2, p/2]`, used for printing.
    pub fn to_signed(&self, a: u32) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Row-major dense matrix over a prime field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: &PrimeField, rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::Shape(format!("row {i} has length {} != {c}", row.len())));
            }
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, field.from_i64(x));
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u32) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, field: &PrimeField, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        let v = field.add(out.get(i, j), field.mul(a, b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, field: &PrimeField, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(0u32, |acc, (&a, &b)| field.add(acc, field.mul(a, b))))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct RowReduction {
    pub rank: usize,
    pub pivot_columns: Vec<usize>,
    pub kernel_basis: Vec<Vec<u32>>,
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(field: &PrimeField, m: &mut DenseMatrix) -> Vec<usize> {
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| m.get(i, c) != 0) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                m.entries.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = field.inv(m.get(r, c)).expect("pivot is nonzero");
        for j in c..cols {
            let v = field.mul(m.get(r, j), inv);
            m.set(r, j, v);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = m.get(i, c);
            if f == 0 {
                continue;
            }
            for j in c..cols {
                let x = m.get(r, j);
                if x != 0 {
                    let v = field.sub(m.get(i, j), field.mul(f, x));
                    m.set(i, j, v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn row_reduce(field: &PrimeField, m: &DenseMatrix) -> RowReduction {
    let mut work = m.clone();
    let pivots = rref(field, &mut work);
    let mut is_pivot = vec![false; m.cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut kernel_basis = Vec::new();
    for free in (0..m.cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u32; m.cols];
        v[free] = 1;
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = field.neg(work.get(row, free));
        }
        kernel_basis.push(v);
    }
    RowReduction { rank: pivots.len(), pivot_columns: pivots, kernel_basis }
}

pub fn rank(field: &PrimeField, m: &DenseMatrix) -> usize {
    let mut work = m.clone();
    rref(field, &mut work).len()
}

/// Cohomology of `A --d_in--> B --d_out--> C` at `B`.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub dim: usize,
    /// Cycles whose classes form a basis of the cohomology.
    pub basis: Vec<Vec<u32>>,
}

pub fn cohomology_rank(field: &PrimeField, d_in: &DenseMatrix, d_out: &DenseMatrix) -> Result<Cohomology> {
    if d_in.rows != d_out.cols {
        return Err(Error::Shape(format!(
            "incoming map lands in dimension {}, outgoing map starts in {}",
            d_in.rows, d_out.cols
        )));
    }
    let n = d_in.rows;
    if !d_out.mul(field, d_in)?.is_zero() {
        return Err(Error::NotAComplex("composite of strand differentials is nonzero".into()));
    }
    let cycles = row_reduce(field, d_out).kernel_basis;
    // columns: boundaries first, then cycles; cycle pivots complete the boundaries
    let mut stacked = DenseMatrix::zeros(n, d_in.cols + cycles.len());
    for i in 0..n {
        for j in 0..d_in.cols {
            stacked.set(i, j, d_in.get(i, j));
        }
        for (k, z) in cycles.iter().enumerate() {
            stacked.set(i, d_in.cols + k, z[i]);
        }
    }
    let pivots = rref(field, &mut stacked);
    let basis: Vec<Vec<u32>> =
        pivots.iter().filter(|&&c| c >= d_in.cols).map(|&c| cycles[c - d_in.cols].clone()).collect();
    Ok(Cohomology { dim: basis.len(), basis })
}

/// Column-major sparse matrix; each column is sorted by row index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    columns: Vec<Vec<(usize, u32)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, columns: vec![Vec::new(); cols] }
    }

    /// Entries must be nonzero, in range and sorted by row within a column.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, u32)>>) -> Result<Self> {
        for col in &columns {
            if col.iter().any(|&(r, x)| r >= rows || x == 0) || col.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(Error::Shape("malformed sparse column".into()));
            }
        }
        Ok(SparseMatrix { rows, columns })
    }

    pub fn from_dense(m: &DenseMatrix) -> Self {
        let columns = (0..m.cols)
            .map(|j| (0..m.rows).filter_map(|i| Some((i, m.get(i, j))).filter(|e| e.1 != 0)).collect())
            .collect();
        SparseMatrix { rows: m.rows, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, u32)] {
        &self.columns[j]
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.rows, self.cols());
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, x) in col {
                m.set(i, j, x);
            }
        }
        m
    }

    /// Rank by eliminating columns against pivots keyed by leading row.
    pub fn rank(&self, field: &PrimeField) -> usize {
        let mut order: Vec<usize> = (0..self.cols()).collect();
        order.sort_by_key(|&j| self.columns[j].len());
        let mut pivots: HashMap<usize, Vec<(usize, u32)>> = HashMap::new();
        for j in order {
            let mut v = self.columns[j].clone();
            while let Some(&(lead, c)) = v.first() {
                match pivots.get(&lead) {
                    Some(p) => v = sparse_axpy(field, &v, p, field.neg(c)),
                    None => {
                        let inv = field.inv(c).expect("nonzero lead");
                        v.iter_mut().for_each(|e| e.1 = field.mul(e.1, inv));
                        pivots.insert(lead, v);
                        break;
                    }
                }
            }
        }
        pivots.len()
    }
}

/// `v + c w` for sorted sparse vectors.
fn sparse_axpy(field: &PrimeField, v: &[(usize, u32)], w: &[(usize, u32)], c: u32) -> Vec<(usize, u32)> {
    let mut out = Vec::with_capacity(v.len() + w.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < w.len() {
        let take_v = j == w.len() || (i < v.len() && v[i].0 < w[j].0);
        let take_w = i == v.len() || (j < w.len() && w[j].0 < v[i].0);
        if take_v {
            out.push(v[i]);
            i += 1;
        } else if take_w {
            out.push((w[j].0, field.mul(c, w[j].1)));
            j += 1;
        } else {
            let x = field.add(v[i].1, field.mul(c, w[j].1));
            if x != 0 {
                out.push((v[i].0, x));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// `dim ker d_out - rank d_in`, assuming `d_out d_in = 0`.
pub fn sparse_cohomology_dim(field: &PrimeField, d_in: &SparseMatrix, d_out: &SparseMatrix) -> Result<usize> {
    if d_in.rows != d_out.cols() {
        return Err(Error::Shape(format!(
            "incoming map lands in dimension {}, outgoing map starts in {}",
            d_in.rows,
            d_out.cols()
        )));
    }
    Ok(d_out.cols() - d_out.rank(field) - d_in.rank(field))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    // brute force: smallest b with a*b = 1 mod p
    fn inverse_by_search(a: u32, p: u32) -> u32 {
        (1..p).find(|&b| (a as u64 * b as u64) % p as u64 == 1).unwrap()
    }

    #[test]
    fn inverses() {
        assert_eq!(f(7).inv(1).unwrap(), 1);
        assert_eq!(f(5).inv(2).unwrap(), 3);
        assert_eq!(inverse_by_search(3, 32003), 10668);
        assert_eq!(f(32003).inv(3).unwrap(), 10668);
        assert_eq!(f(5).inv(0), Err(Error::DivisionByZero(5)));
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(PrimeField::new(32004).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(1u64 << 31).is_err());
        assert!(PrimeField::new(2147483647).is_ok());
    }

    #[test]
    fn row_reduce_examples() {
        let k = f(5);
        let r = row_reduce(&k, &DenseMatrix::identity(3));
        assert_eq!(r.rank, 3);
        assert!(r.kernel_basis.is_empty());

        let r = row_reduce(&k, &DenseMatrix::zeros(2, 4));
        assert_eq!((r.rank, r.kernel_basis.len()), (0, 4));

        let m = DenseMatrix::from_rows(&k, &[vec![1, 2], vec![2, 4]]).unwrap();
        let r = row_reduce(&k, &m);
        assert_eq!((r.rank, r.kernel_basis.len()), (1, 1));
        assert!(m.apply(&k, &r.kernel_basis[0]).iter().all(|&x| x == 0));
    }

    #[test]
    fn cohomology_examples() {
        let k = f(32003);
        let c = cohomology_rank(&k, &DenseMatrix::zeros(4, 0), &DenseMatrix::zeros(0, 4)).unwrap();
        assert_eq!(c.dim, 4);
        let c = cohomology_rank(&k, &DenseMatrix::identity(1), &DenseMatrix::zeros(0, 1)).unwrap();
        assert_eq!(c.dim, 0);
        let bad = cohomology_rank(&k, &DenseMatrix::identity(1), &DenseMatrix::identity(1));
        assert!(matches!(bad, Err(Error::NotAComplex(_))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix(p: u32) -> impl Strategy<Value = DenseMatrix> {
            (0usize..6, 0usize..6).prop_flat_map(move |(r, c)| {
                proptest::collection::vec(0..p, r * c).prop_map(move |entries| DenseMatrix {
                    rows: r,
                    cols: c,
                    entries,
                })
            })
        }

        proptest! {
            #[test]
            fn rank_nullity(m in matrix(7)) {
                let k = f(7);
                let r = row_reduce(&k, &m);
                prop_assert_eq!(r.rank + r.kernel_basis.len(), m.cols());
                for v in &r.kernel_basis {
                    prop_assert!(m.apply(&k, v).iter().all(|&x| x == 0));
                }
                let mut kb = DenseMatrix::zeros(m.cols(), r.kernel_basis.len());
                for (j, v) in r.kernel_basis.iter().enumerate() {
                    for i in 0..m.cols() { kb.set(i, j, v[i]); }
                }
                prop_assert_eq!(rank(&k, &kb), r.kernel_basis.len());
            }

            #[test]
            fn sparse_rank_matches_dense(m in matrix(7)) {
                let k = f(7);
                let sp = SparseMatrix::from_dense(&m);
                prop_assert_eq!(sp.to_dense(), m.clone());
                prop_assert_eq!(sp.rank(&k), rank(&k, &m));
            }

            #[test]
            fn sparse_cohomology_matches_dense(a in matrix(5), seed in 0u32..5) {
                let k = f(5);
                let coker_rows = row_reduce(&k, &transpose(&a)).kernel_basis;
                let take = (seed as usize).min(coker_rows.len());
                let mut d_out = DenseMatrix::zeros(take, a.rows());
                for (i, row) in coker_rows.iter().take(take).enumerate() {
                    for j in 0..a.rows() { d_out.set(i, j, row[j]); }
                }
                let dense = cohomology_rank(&k, &a, &d_out).unwrap().dim;
                let sparse =
                    sparse_cohomology_dim(&k, &SparseMatrix::from_dense(&a), &SparseMatrix::from_dense(&d_out)).unwrap();
                prop_assert_eq!(dense, sparse);
            }

            #[test]
            fn inverse_is_involution(a in 1u32..32003) {
                let k = f(32003);
                let b = k.inv(a).unwrap();
                prop_assert_eq!(k.mul(a, b), 1);
                prop_assert_eq!(k.inv(b).unwrap(), a);
            }

            #[test]
            fn euler_characteristic_of_random_strands(a in matrix(5), seed in 0u32..5) {
                // build a three-term complex A -> B -> C with B -> C killing the image of A
                let k = f(5);
                let d_in = a;
                let coker_rows = row_reduce(&k, &transpose(&d_in)).kernel_basis;
                let take = (seed as usize).min(coker_rows.len());
                let mut d_out = DenseMatrix::zeros(take, d_in.rows());
                for (i, row) in coker_rows.iter().take(take).enumerate() {
                    for j in 0..d_in.rows() { d_out.set(i, j, row[j]); }
                }
                let h0 = d_in.cols() - rank(&k, &d_in);
                let h1 = cohomology_rank(&k, &d_in, &d_out).unwrap().dim;
                let h2 = take - rank(&k, &d_out);
                let euler = d_in.cols() as i64 - d_in.rows() as i64 + take as i64;
                prop_assert_eq!(h0 as i64 - h1 as i64 + h2 as i64, euler);
            }
        }

        fn transpose(m: &DenseMatrix) -> DenseMatrix {
            let mut t = DenseMatrix::zeros(m.cols(), m.rows());
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    t.set(j, i, m.get(i, j));
                }
            }
            t
        }
    }
}
