//! Exact sparse linear algebra over ℚ and ℤ/p.

use std::collections::HashMap;
use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{invalid, Error, Result};

/// Arithmetic of a field, just what elimination needs.
pub trait Field: Clone + PartialEq + Debug + Send + Sync + 'static {
    const CHARACTERISTIC: u64;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; callers never pass zero.
    fn inv(&self) -> Self;
}

impl Field for BigRational {
    const CHARACTERISTIC: u64 = 0;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        self.recip()
    }
}

/// ℤ/p with the Mersenne prime p = 2³¹ − 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Fp(u32);

impl Fp {
    pub const P: u32 = 2_147_483_647;

    pub fn new(v: u64) -> Self {
        Fp((v % Self::P as u64) as u32)
    }

    pub fn value(self) -> u32 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let (mut base, mut acc) = (self, Fp(1));
        while e > 0 {
            if e & 1 == 1 {
                acc = Field::mul(&acc, &base);
            }
            base = Field::mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

impl Field for Fp {
    const CHARACTERISTIC: u64 = Fp::P as u64;
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn from_i64(v: i64) -> Self {
        Fp(v.rem_euclid(Fp::P as i64) as u32)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, o: &Self) -> Self {
        Fp::new(self.0 as u64 + o.0 as u64)
    }
    fn sub(&self, o: &Self) -> Self {
        Fp::new(self.0 as u64 + (Fp::P - o.0) as u64)
    }
    fn mul(&self, o: &Self) -> Self {
        Fp::new(self.0 as u64 * o.0 as u64)
    }
    fn neg(&self) -> Self {
        Fp::new((Fp::P - self.0) as u64)
    }
    fn inv(&self) -> Self {
        self.pow(Fp::P as u64 - 2)
    }
}

/// Sparse vector: `(index, value)` with strictly increasing indices and no
/// stored zeros.
pub type SparseVec<F> = Vec<(u32, F)>;

/// `a + c·b` for sparse vectors.
pub fn axpy<F: Field>(a: &[(u32, F)], c: &F, b: &[(u32, F)]) -> SparseVec<F> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, c.mul(&b[j].1)));
            j += 1;
        } else {
            let v = a[i].1.add(&c.mul(&b[j].1));
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn to_dense<F: Field>(v: &[(u32, F)], len: usize) -> Vec<F> {
    let mut out = vec![F::zero(); len];
    for (i, x) in v {
        out[*i as usize] = x.clone();
    }
    out
}

/// Column-sparse matrix over a field.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldMatrix<F> {
    rows: usize,
    columns: Vec<SparseVec<F>>,
}

impl<F: Field> FieldMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            columns: (0..n).map(|i| vec![(i as u32, F::one())]).collect(),
        }
    }

    /// Builds a matrix from columns, sorting entries, summing duplicates and
    /// dropping zeros.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(u32, F)>>) -> Result<Self> {
        let mut out = Vec::with_capacity(columns.len());
        for mut col in columns {
            if col.iter().any(|(r, _)| *r as usize >= rows) {
                return Err(invalid(format!("entry outside {rows} rows")));
            }
            col.sort_by_key(|(r, _)| *r);
            let mut merged: SparseVec<F> = Vec::with_capacity(col.len());
            for (r, v) in col {
                match merged.last_mut() {
                    Some((lr, lv)) if *lr == r => *lv = lv.add(&v),
                    _ => merged.push((r, v)),
                }
            }
            merged.retain(|(_, v)| !v.is_zero());
            out.push(merged);
        }
        Ok(Self { rows, columns: out })
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let columns = (0..cols)
            .map(|j| {
                rows.iter()
                    .enumerate()
                    .filter(|(_, row)| row[j] != 0)
                    .map(|(i, row)| (i as u32, F::from_i64(row[j])))
                    .collect()
            })
            .collect();
        Self {
            rows: rows.len(),
            columns,
        }
    }

    pub(crate) fn from_sorted_columns(rows: usize, columns: Vec<SparseVec<F>>) -> Self {
        Self { rows, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[(u32, F)] {
        &self.columns[j]
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        match self.columns[j].binary_search_by_key(&(i as u32), |(r, _)| *r) {
            Ok(p) => self.columns[j][p].1.clone(),
            Err(_) => F::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<F>> {
        let mut d = vec![vec![F::zero(); self.cols()]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                d[*i as usize][j] = v.clone();
            }
        }
        d
    }

    pub fn transpose(&self) -> Self {
        let mut cols: Vec<SparseVec<F>> = vec![Vec::new(); self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                cols[*i as usize].push((j as u32, v.clone()));
            }
        }
        Self {
            rows: self.cols(),
            columns: cols,
        }
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows {
            return Err(invalid(format!(
                "cannot multiply {}×{} by {}×{}",
                self.rows,
                self.cols(),
                other.rows,
                other.cols()
            )));
        }
        let columns = other
            .columns
            .iter()
            .map(|bcol| {
                let mut acc: HashMap<u32, F> = HashMap::new();
                for (k, bv) in bcol {
                    for (i, av) in &self.columns[*k as usize] {
                        let e = acc.entry(*i).or_insert_with(F::zero);
                        *e = e.add(&av.mul(bv));
                    }
                }
                let mut col: SparseVec<F> = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
                col.sort_by_key(|(i, _)| *i);
                col
            })
            .collect();
        Ok(Self {
            rows: self.rows,
            columns,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols() != other.cols() {
            return Err(invalid("matrix shapes differ"));
        }
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| axpy(a, &F::one(), b))
            .collect();
        Ok(Self {
            rows: self.rows,
            columns,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    /// Appends `extra` as new columns on the right.
    pub fn hcat(&self, extra: &[SparseVec<F>]) -> Result<Self> {
        if extra
            .iter()
            .flatten()
            .any(|(i, _)| *i as usize >= self.rows)
        {
            return Err(invalid("appended column exceeds the row count"));
        }
        let mut columns = self.columns.clone();
        columns.extend(extra.iter().cloned());
        Ok(Self {
            rows: self.rows,
            columns,
        })
    }
}

/// Incremental column reduction: columns are reduced against the pivots of
/// all previously accepted columns (pivot = lowest nonzero row).
pub struct ColumnReducer<F> {
    pivots: HashMap<u32, usize>,
    reduced: Vec<SparseVec<F>>,
}

impl<F: Field> Default for ColumnReducer<F> {
    fn default() -> Self {
        Self {
            pivots: HashMap::new(),
            reduced: Vec::new(),
        }
    }
}

impl<F: Field> ColumnReducer<F> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.reduced.len()
    }

    /// Reduces `col`; returns the residual (empty when `col` lies in the span
    /// of the columns seen so far). Nonzero residuals become new pivots.
    pub fn push(&mut self, col: SparseVec<F>) -> bool {
        let (residual, _) = self.reduce(col, None);
        if residual.is_empty() {
            false
        } else {
            self.accept(residual);
            true
        }
    }

    fn accept(&mut self, residual: SparseVec<F>) {
        let low = residual.last().unwrap().0;
        self.pivots.insert(low, self.reduced.len());
        self.reduced.push(residual);
    }

    /// Reduces `col` against the accepted pivots, tracking the combination
    /// of accepted columns subtracted when `track` carries their histories.
    fn reduce(
        &self,
        mut col: SparseVec<F>,
        mut track: Option<(&[SparseVec<F>], SparseVec<F>)>,
    ) -> (SparseVec<F>, Option<SparseVec<F>>) {
        while let Some((low, v)) = col.last().cloned() {
            let Some(&p) = self.pivots.get(&low) else {
                break;
            };
            let pcol = &self.reduced[p];
            let c = v.mul(&pcol.last().unwrap().1.inv()).neg();
            col = axpy(&col, &c, pcol);
            if let Some((hist, acc)) = track.as_mut() {
                *acc = axpy(acc, &c, &hist[p]);
            }
        }
        (col, track.map(|(_, acc)| acc))
    }
}

/// Matrices with at most this many columns are eliminated densely.
pub const DENSE_COLUMN_LIMIT: usize = 64;

pub fn rank<F: Field>(m: &FieldMatrix<F>) -> usize {
    let r = if m.cols() <= DENSE_COLUMN_LIMIT && m.rows <= 4 * DENSE_COLUMN_LIMIT {
        rank_dense(m)
    } else {
        rank_sparse(m)
    };
    assert!(r <= m.rows.min(m.cols()));
    r
}

pub fn rank_sparse<F: Field>(m: &FieldMatrix<F>) -> usize {
    let mut red = ColumnReducer::new();
    for col in &m.columns {
        red.push(col.clone());
    }
    red.rank()
}

/// Row-echelon elimination on a dense copy.
pub fn rank_dense<F: Field>(m: &FieldMatrix<F>) -> usize {
    let mut a = m.to_dense();
    let (rows, cols) = (m.rows, m.cols());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].inv();
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].mul(&inv);
            for j in c..cols {
                let t = f.mul(&a[r][j]);
                a[i][j] = a[i][j].sub(&t);
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// A basis of the null space, one sparse vector per non-pivot column of the
/// reduction. Requires a field of characteristic zero.
pub fn kernel_basis<F: Field>(m: &FieldMatrix<F>) -> Result<Vec<SparseVec<F>>> {
    if F::CHARACTERISTIC != 0 {
        return Err(Error::WrongField);
    }
    Ok(null_space(m))
}

/// Null space by column reduction with a tracked transform (`M·V = R`);
/// columns of `V` whose reduced column vanishes span the kernel.
pub(crate) fn null_space<F: Field>(m: &FieldMatrix<F>) -> Vec<SparseVec<F>> {
    let mut red = ColumnReducer::new();
    let mut history: Vec<SparseVec<F>> = Vec::new();
    let mut basis = Vec::new();
    for (j, col) in m.columns.iter().enumerate() {
        let unit = vec![(j as u32, F::one())];
        let (residual, v) = red.reduce(col.clone(), Some((&history, unit)));
        let v = v.unwrap();
        if residual.is_empty() {
            basis.push(v);
        } else {
            red.accept(residual);
            history.push(v);
        }
    }
    basis
}

/// Normalizes a rational vector so its last entry is positive and its
/// entries are coprime integers; convenient for comparing kernel vectors.
pub fn primitive(v: &[(u32, BigRational)]) -> Vec<(u32, num_bigint::BigInt)> {
    use bigint_gcd::*;
    let Some((_, last)) = v.last() else {
        return Vec::new();
    };
    let mut lcm = num_bigint::BigInt::one();
    for (_, x) in v {
        lcm = lcm_big(&lcm, x.denom());
    }
    let ints: Vec<num_bigint::BigInt> = v
        .iter()
        .map(|(_, x)| (x * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let mut g = num_bigint::BigInt::zero();
    for x in &ints {
        g = gcd_big(&g, x);
    }
    let sign = if last.is_negative() {
        -num_bigint::BigInt::one()
    } else {
        num_bigint::BigInt::one()
    };
    v.iter()
        .zip(ints)
        .map(|((i, _), x)| (*i, x * &sign / &g))
        .collect()
}

mod bigint_gcd {
    use num_bigint::BigInt;
    use num_traits::{Signed, Zero};

    pub fn gcd_big(a: &BigInt, b: &BigInt) -> BigInt {
        let (mut a, mut b) = (a.abs(), b.abs());
        while !b.is_zero() {
            let t = &a % &b;
            a = b;
            b = t;
        }
        a
    }

    pub fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
        if a.is_zero() || b.is_zero() {
            return BigInt::zero();
        }
        (a * b).abs() / gcd_big(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type Q = BigRational;

    #[test]
    fn fp_arithmetic() {
        let a = Fp::from_i64(-1);
        assert_eq!(a.value(), Fp::P - 1);
        assert_eq!(a.mul(&a), Fp::one());
        let x = Fp::from_i64(123_456_789);
        assert_eq!(x.mul(&x.inv()), Fp::one());
        assert_eq!(x.sub(&x), Fp::zero());
        assert_eq!(x.add(&x.neg()), Fp::zero());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&FieldMatrix::<Q>::zeros(3, 4)), 0);
        assert_eq!(rank(&FieldMatrix::<Q>::identity(3)), 3);
        // boundary of the hollow square
        let d1 = vec![
            vec![-1, 0, 0, -1],
            vec![1, -1, 0, 0],
            vec![0, 1, -1, 0],
            vec![0, 0, 1, 1],
        ];
        assert_eq!(rank(&FieldMatrix::<Q>::from_dense(&d1)), 3);
        assert_eq!(rank(&FieldMatrix::<Fp>::from_dense(&d1)), 3);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&FieldMatrix::<Q>::identity(3))
            .unwrap()
            .is_empty());
        assert_eq!(
            kernel_basis(&FieldMatrix::<Q>::zeros(2, 2)).unwrap().len(),
            2
        );
        assert!(matches!(
            kernel_basis(&FieldMatrix::<Fp>::identity(2)),
            Err(Error::WrongField)
        ));
    }

    #[test]
    fn rational_arithmetic_is_exact() {
        let m = FieldMatrix::<Q>::from_dense(&[vec![3, 1], vec![6, 2]]);
        let ker = kernel_basis(&m).unwrap();
        assert_eq!(ker.len(), 1);
        let p = primitive(&ker[0]);
        assert_eq!(p, vec![(0, (-1).into()), (1, 3.into())]);
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..9, 1usize..9).prop_flat_map(|(r, c)| {
            prop::collection::vec(
                prop::collection::vec(prop::sample::select(vec![-2i64, -1, 0, 0, 0, 1, 2]), c),
                r,
            )
        })
    }

    proptest! {
        #[test]
        fn dense_and_sparse_ranks_agree(rows in small_matrix()) {
            let q = FieldMatrix::<Q>::from_dense(&rows);
            let f = FieldMatrix::<Fp>::from_dense(&rows);
            let r = rank_dense(&q);
            prop_assert_eq!(rank_sparse(&q), r);
            prop_assert_eq!(rank_dense(&f), rank_sparse(&f));
            prop_assert!(r <= rows.len().min(rows[0].len()));
            // rank-nullity, and every basis vector is annihilated
            let ker = kernel_basis(&q).unwrap();
            prop_assert_eq!(ker.len() + r, q.cols());
            for v in &ker {
                let col = FieldMatrix::from_columns(q.cols(), vec![v.clone()]).unwrap();
                prop_assert!(q.mul(&col).unwrap().is_zero());
            }
            prop_assert_eq!(rank(&q.transpose()), r);
        }
    }
}
