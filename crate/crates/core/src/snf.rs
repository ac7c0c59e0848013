//! Exact integer matrices and Smith normal form.
//!
//! A matrix with `rows` rows and `cols` columns is read as a map
//! `Z^cols -> Z^rows`. [`smith_normal_form`] finds unimodular `U`, `V` with
//! `U A V = diag(a_1, ..., a_r, 0, ...)` and `a_i | a_{i+1}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bigjson;
use crate::error::{Error, Result};
use crate::metric::FORMAT_VERSION;

/// Largest `min(rows, cols)` accepted by [`elementary_divisors_via_minors`].
pub const MINOR_GUARD: usize = 8;

/// Sparse exact integer matrix; zero entries are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries.insert((i, i), BigInt::one());
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, found: row.len() });
            }
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x.clone().into());
            }
        }
        Ok(m)
    }

    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, BigInt)>,
    {
        let mut m = Self::zeros(rows, cols);
        for (i, j, x) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::Schema(format!("entry ({i}, {j}) outside a {rows}x{cols} matrix")));
            }
            m.set(i, j, x);
        }
        Ok(m)
    }

    fn from_dense(dense: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let mut m = Self::zeros(dense.len(), cols);
        for (i, row) in dense.into_iter().enumerate() {
            for (j, x) in row.into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        if x.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), x);
        }
    }

    /// Nonzero entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> + '_ {
        self.entries.iter().map(|(&(i, j), x)| (i, j, x))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (&(i, j), x) in &self.entries {
            d[i][j] = x.clone();
        }
        d
    }

    /// Nonzero entries of column `j` as `(row, value)`, rows ascending.
    pub fn column(&self, j: usize) -> Vec<(usize, BigInt)> {
        self.entries.iter().filter(|((_, c), _)| *c == j).map(|(&(i, _), x)| (i, x.clone())).collect()
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut by_row: BTreeMap<usize, Vec<(usize, &BigInt)>> = BTreeMap::new();
        for (&(i, j), x) in &other.entries {
            by_row.entry(i).or_default().push((j, x));
        }
        let mut acc: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
        for (&(i, k), a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    *acc.entry((i, j)).or_default() += a * b;
                }
            }
        }
        acc.retain(|_, x| !x.is_zero());
        Ok(IntegerMatrix { rows: self.rows, cols: other.cols, entries: acc })
    }

    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> IntegerMatrix {
        let mut out = Self::zeros(self.rows, self.cols);
        for (&(i, j), x) in &self.entries {
            out.entries.insert((row_perm[i], col_perm[j]), x.clone());
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        Ok(bareiss_determinant(self.to_dense()))
    }
}

fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    #[serde(default = "default_format_version")]
    format_version: u32,
    rows: usize,
    cols: usize,
    triplets: Vec<(usize, usize, Value)>,
}

fn default_format_version() -> u32 {
    FORMAT_VERSION
}

impl Serialize for IntegerMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixFile {
            format_version: FORMAT_VERSION,
            rows: self.rows,
            cols: self.cols,
            triplets: self.triplets().map(|(i, j, x)| (i, j, bigjson::to_value(x))).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntegerMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let file = MatrixFile::deserialize(d)?;
        if file.format_version != FORMAT_VERSION {
            return Err(D::Error::custom(format!("unsupported format_version {}", file.format_version)));
        }
        let triplets = file
            .triplets
            .iter()
            .map(|(i, j, v)| bigjson::from_value(v).map(|x| (*i, *j, x)))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        IntegerMatrix::from_triplets(file.rows, file.cols, triplets).map_err(D::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnfResult {
    /// Positive elementary divisors, each dividing the next.
    #[serde(with = "bigjson::vec")]
    pub divisors: Vec<BigInt>,
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<IntegerMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<IntegerMatrix>,
}

impl SnfResult {
    /// `diag(a_1, ..., a_r, 0, ...)` with the source matrix's shape.
    pub fn diagonal(&self, rows: usize, cols: usize) -> IntegerMatrix {
        let mut d = IntegerMatrix::zeros(rows, cols);
        for (i, a) in self.divisors.iter().enumerate() {
            d.set(i, i, a.clone());
        }
        d
    }

    pub fn largest(&self) -> Option<&BigInt> {
        self.divisors.last()
    }
}

struct Reducer {
    a: Vec<Vec<BigInt>>,
    u: Option<Vec<Vec<BigInt>>>,
    v: Option<Vec<Vec<BigInt>>>,
    rows: usize,
    cols: usize,
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap(i, j);
            if let Some(u) = &mut self.u {
                u.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for row in &mut self.a {
                row.swap(i, j);
            }
            if let Some(v) = &mut self.v {
                for row in v.iter_mut() {
                    row.swap(i, j);
                }
            }
        }
    }

    /// row[target] -= q * row[source], starting at column `from`.
    fn sub_row(&mut self, target: usize, source: usize, q: &BigInt, from: usize) {
        let (src, dst) = pick_two(&mut self.a, source, target);
        for (d, s) in dst[from..].iter_mut().zip(&src[from..]) {
            if !s.is_zero() {
                *d -= q * s;
            }
        }
        if let Some(u) = &mut self.u {
            let (src, dst) = pick_two(u, source, target);
            for (d, s) in dst.iter_mut().zip(src.iter()) {
                if !s.is_zero() {
                    *d -= q * s;
                }
            }
        }
    }

    /// col[target] -= q * col[source], starting at row `from`.
    fn sub_col(&mut self, target: usize, source: usize, q: &BigInt, from: usize) {
        for row in &mut self.a[from..] {
            if !row[source].is_zero() {
                let delta = q * &row[source];
                row[target] -= delta;
            }
        }
        if let Some(v) = &mut self.v {
            for row in v.iter_mut() {
                if !row[source].is_zero() {
                    let delta = q * &row[source];
                    row[target] -= delta;
                }
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -std::mem::take(x);
        }
        if let Some(u) = &mut self.u {
            for x in &mut u[i] {
                *x = -std::mem::take(x);
            }
        }
    }

    /// Nonzero entry of least absolute value in the trailing block at `t`.
    fn smallest_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, &BigInt)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(_, _, b)| x.magnitude() < b.magnitude()) {
                    best = Some((i, j, x));
                    if x.magnitude().is_one() {
                        return Some((i, j));
                    }
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    /// Clears row and column `t` below/right of the pivot.
    fn clear_pivot(&mut self, t: usize) {
        loop {
            let pivot = self.a[t][t].clone();
            let mut residue: Option<(usize, BigInt)> = None;
            for i in t + 1..self.rows {
                if self.a[i][t].is_zero() {
                    continue;
                }
                let q = self.a[i][t].div_floor(&pivot);
                self.sub_row(i, t, &q, t);
                let r = &self.a[i][t];
                if !r.is_zero() && residue.as_ref().is_none_or(|(_, m)| r.magnitude() < m.magnitude()) {
                    residue = Some((i, r.clone()));
                }
            }
            if let Some((i, _)) = residue {
                self.swap_rows(t, i);
                continue;
            }
            for j in t + 1..self.cols {
                if self.a[t][j].is_zero() {
                    continue;
                }
                let q = self.a[t][j].div_floor(&pivot);
                self.sub_col(j, t, &q, t);
                let r = &self.a[t][j];
                if !r.is_zero() && residue.as_ref().is_none_or(|(_, m)| r.magnitude() < m.magnitude()) {
                    residue = Some((j, r.clone()));
                }
            }
            match residue {
                Some((j, _)) => self.swap_cols(t, j),
                None => return,
            }
        }
    }

    /// Replaces `(d_i, d_j)` by `(gcd, lcm)` with matching unimodular row and
    /// column operations on `U` and `V`.
    fn gcd_lcm(&mut self, i: usize, j: usize) {
        let a = self.a[i][i].clone();
        let b = self.a[j][j].clone();
        let ext = a.extended_gcd(&b);
        let (g, x, y) = (ext.gcd, ext.x, ext.y);
        let a_g = &a / &g;
        let b_g = &b / &g;
        self.a[i][i] = g;
        self.a[j][j] = &a_g * &b;
        if let Some(u) = &mut self.u {
            for col in 0..self.rows {
                let (ri, rj) = (u[i][col].clone(), u[j][col].clone());
                u[i][col] = &x * &ri + &y * &rj;
                u[j][col] = -(&b_g * &ri) + &a_g * &rj;
            }
        }
        if let Some(v) = &mut self.v {
            for row in v.iter_mut() {
                let (ci, cj) = (row[i].clone(), row[j].clone());
                row[i] = &ci + &cj;
                row[j] = -(&y * &b_g * &ci) + &x * &a_g * &cj;
            }
        }
    }
}

fn pick_two<T>(rows: &mut [Vec<T>], source: usize, target: usize) -> (&Vec<T>, &mut Vec<T>) {
    assert_ne!(source, target);
    if source < target {
        let (lo, hi) = rows.split_at_mut(target);
        (&lo[source], &mut hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(source);
        (&hi[0], &mut lo[target])
    }
}

fn to_matrix(rows: Vec<Vec<BigInt>>) -> IntegerMatrix {
    let n = rows.len();
    IntegerMatrix::from_dense(rows, n)
}

fn identity_dense(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// Smith normal form by least-magnitude pivoting. The zero matrix (and any
/// matrix with an empty side) gives an empty divisor list.
pub fn smith_normal_form(a: &IntegerMatrix, want_transforms: bool) -> SnfResult {
    let (rows, cols) = (a.rows, a.cols);
    let mut r = Reducer {
        a: a.to_dense(),
        u: want_transforms.then(|| identity_dense(rows)),
        v: want_transforms.then(|| identity_dense(cols)),
        rows,
        cols,
    };
    let mut rank = 0;
    while rank < rows.min(cols) {
        let Some((pi, pj)) = r.smallest_pivot(rank) else { break };
        r.swap_rows(rank, pi);
        r.swap_cols(rank, pj);
        r.clear_pivot(rank);
        if r.a[rank][rank].is_negative() {
            r.negate_row(rank);
        }
        rank += 1;
    }
    for i in 0..rank {
        for j in i + 1..rank {
            if !r.a[j][j].is_multiple_of(&r.a[i][i]) {
                r.gcd_lcm(i, j);
            }
        }
    }
    let divisors = (0..rank).map(|i| r.a[i][i].clone()).collect();
    SnfResult { divisors, rank, u: r.u.map(to_matrix), v: r.v.map(to_matrix) }
}

/// Elementary divisors as ratios of successive gcds of `i x i` minors.
/// Exhaustive, so only for `min(rows, cols) <= MINOR_GUARD`.
pub fn elementary_divisors_via_minors(a: &IntegerMatrix) -> Result<Vec<BigInt>> {
    let size = a.rows.min(a.cols);
    if size > MINOR_GUARD {
        return Err(Error::MinorGuardExceeded { size, limit: MINOR_GUARD });
    }
    let dense = a.to_dense();
    let mut divisors = Vec::new();
    let mut prev = BigInt::one();
    for k in 1..=size {
        let mut g = BigInt::zero();
        for rows in combinations(a.rows, k) {
            for cols in combinations(a.cols, k) {
                let minor: Vec<Vec<BigInt>> =
                    rows.iter().map(|&i| cols.iter().map(|&j| dense[i][j].clone()).collect()).collect();
                g = g.gcd(&bareiss_determinant(minor));
                if g.is_one() {
                    break;
                }
            }
            if g.is_one() {
                break;
            }
        }
        if g.is_zero() {
            break;
        }
        divisors.push(&g / &prev);
        prev = g;
    }
    Ok(divisors)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Structure of `Z^rows / im(A)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cokernel {
    #[serde(with = "bigjson::vec")]
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

pub fn cokernel_structure(a: &IntegerMatrix) -> Cokernel {
    let snf = smith_normal_form(a, false);
    Cokernel {
        torsion: snf.divisors.into_iter().filter(|d| !d.is_one()).collect(),
        free_rank: a.rows - snf.rank,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntegerMatrix {
        IntegerMatrix::from_rows(rows).unwrap()
    }

    fn big(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn two_by_two_example() {
        let a = m(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(smith_normal_form(&a, false).divisors, big(&[2, 4]));
        assert_eq!(elementary_divisors_via_minors(&a).unwrap(), big(&[2, 4]));
    }

    #[test]
    fn identity_has_unit_divisors() {
        let a = IntegerMatrix::identity(3);
        assert_eq!(smith_normal_form(&a, false).divisors, big(&[1, 1, 1]));
        assert_eq!(elementary_divisors_via_minors(&IntegerMatrix::identity(2)).unwrap(), big(&[1, 1]));
    }

    #[test]
    fn zero_matrix_has_no_divisors() {
        let snf = smith_normal_form(&IntegerMatrix::zeros(2, 3), true);
        assert!(snf.divisors.is_empty());
        assert_eq!(snf.rank, 0);
        let empty = smith_normal_form(&IntegerMatrix::zeros(0, 4), true);
        assert_eq!(empty.rank, 0);
    }

    #[test]
    fn hollow_triangle_boundary_minors() {
        // edges 01, 02, 12 against vertices 0, 1, 2
        let d1 = m(&[vec![-1, -1, 0], vec![1, 0, -1], vec![0, 1, 1]]);
        assert_eq!(elementary_divisors_via_minors(&d1).unwrap(), big(&[1, 1]));
        assert_eq!(smith_normal_form(&d1, false).divisors, big(&[1, 1]));
    }

    #[test]
    fn transforms_reconstruct_diagonal() {
        let a = m(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let snf = smith_normal_form(&a, true);
        assert_eq!(snf.divisors, big(&[2, 6, 12]));
        let (u, v) = (snf.u.as_ref().unwrap(), snf.v.as_ref().unwrap());
        assert_eq!(u.mul(&a).unwrap().mul(v).unwrap(), snf.diagonal(3, 3));
        assert!(u.determinant().unwrap().magnitude().is_one());
        assert!(v.determinant().unwrap().magnitude().is_one());
    }

    #[test]
    fn divisibility_fixup_is_applied() {
        // already diagonal but out of chain order
        let a = m(&[vec![4, 0], vec![0, 6]]);
        let snf = smith_normal_form(&a, true);
        assert_eq!(snf.divisors, big(&[2, 12]));
        let (u, v) = (snf.u.unwrap(), snf.v.unwrap());
        assert_eq!(u.mul(&a).unwrap().mul(&v).unwrap(), m(&[vec![2, 0], vec![0, 12]]));
    }

    #[test]
    fn minor_guard() {
        let a = IntegerMatrix::identity(9);
        assert!(matches!(elementary_divisors_via_minors(&a), Err(Error::MinorGuardExceeded { size: 9, .. })));
    }

    #[test]
    fn cokernels() {
        assert_eq!(cokernel_structure(&m(&[vec![2]])), Cokernel { torsion: big(&[2]), free_rank: 0 });
        assert_eq!(cokernel_structure(&IntegerMatrix::zeros(3, 2)), Cokernel { torsion: vec![], free_rank: 3 });
        let a = m(&[vec![1, 0], vec![0, 3], vec![0, 0]]);
        assert_eq!(cokernel_structure(&a), Cokernel { torsion: big(&[3]), free_rank: 1 });
    }

    #[test]
    fn determinant_of_singular_and_permutation() {
        assert_eq!(m(&[vec![1, 2], vec![2, 4]]).determinant().unwrap(), BigInt::zero());
        assert_eq!(m(&[vec![0, 1], vec![1, 0]]).determinant().unwrap(), BigInt::from(-1));
        assert_eq!(m(&[vec![0, 0, 2], vec![0, 3, 0], vec![5, 0, 0]]).determinant().unwrap(), BigInt::from(-30));
    }

    #[test]
    fn big_entries_survive() {
        let huge: BigInt = "123456789012345678901234567890".parse().unwrap();
        let a = IntegerMatrix::from_triplets(1, 1, [(0, 0, -huge.clone())]).unwrap();
        assert_eq!(smith_normal_form(&a, false).divisors, vec![huge.clone()]);
        let text = serde_json::to_string(&a).unwrap();
        assert!(text.contains("\"-123456789012345678901234567890\""));
        let back: IntegerMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn matrix_file_accepts_numbers_and_strings() {
        let a: IntegerMatrix =
            serde_json::from_str(r#"{"rows":2,"cols":2,"triplets":[[0,0,2],[0,1,"4"],[1,0,6],[1,1,"8"]]}"#).unwrap();
        assert_eq!(a, m(&[vec![2, 4], vec![6, 8]]));
        assert!(serde_json::from_str::<IntegerMatrix>(r#"{"rows":1,"cols":1,"triplets":[[1,0,2]]}"#).is_err());
    }
}
