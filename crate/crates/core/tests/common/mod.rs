//! Independent dense oracles and generators shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use torsionscope::complex::{close_under_faces, SimplicialComplex};
use torsionscope::metric::{MetricSpec, PointCloud};
use torsionscope::snf::IntegerMatrix;

/// Rank over Q by fraction-free (Bareiss) elimination on a dense copy.
pub fn rank_q(m: &IntegerMatrix) -> usize {
    let mut a = m.to_dense();
    let (rows, cols) = (m.rows(), m.cols());
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for j in c + 1..cols {
                let v = (&a[rank][c] * &a[r][j] - &a[r][c] * &a[rank][j]) / &prev;
                a[r][j] = v;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Rank over Z/p by dense Gauss–Jordan with Fermat inverses.
pub fn rank_mod_p(m: &IntegerMatrix, p: u64) -> usize {
    let pi = BigInt::from(p);
    let mut a: Vec<Vec<u64>> = m
        .to_dense()
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| {
                    let r = ((x % &pi) + &pi) % &pi;
                    u64::try_from(r).unwrap()
                })
                .collect()
        })
        .collect();
    let (rows, cols) = (m.rows(), m.cols());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, piv);
        let inv = pow_mod(a[rank][c], p - 2, p);
        for j in 0..cols {
            a[rank][j] = a[rank][j] * inv % p;
        }
        for r in 0..rows {
            if r != rank && a[r][c] != 0 {
                let f = a[r][c];
                for j in 0..cols {
                    a[r][j] = (a[r][j] + p * p - f * a[rank][j] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// All `size`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            go(v + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, size, &mut Vec::new(), &mut out);
    out
}

pub fn small_matrix() -> impl Strategy<Value = IntegerMatrix> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-2i64..=2, c), r)
            .prop_map(|rows| IntegerMatrix::from_rows(&rows).unwrap())
    })
}

/// Closure of up to eight random simplices with at most four vertices each.
pub fn small_complex() -> impl Strategy<Value = SimplicialComplex> {
    (3usize..=7).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::btree_set(0..n, 1..=4), 1..=8).prop_map(|gens| {
            let gens: Vec<Vec<usize>> = gens.into_iter().map(|s| s.into_iter().collect()).collect();
            close_under_faces(&gens).unwrap()
        })
    })
}

pub fn cloud(dim: usize, max_points: usize) -> impl Strategy<Value = PointCloud> {
    prop::collection::vec(prop::collection::vec(0.0f64..1.0, dim), 3..=max_points)
        .prop_map(|pts| PointCloud::euclidean(pts).unwrap())
}

pub fn randers_cloud(max_points: usize) -> impl Strategy<Value = PointCloud> {
    (prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 3..=max_points), -0.6f64..0.6, -0.6f64..0.6)
        .prop_map(|(pts, bx, by)| PointCloud::new(pts, MetricSpec::randers(vec![bx, by]).unwrap()).unwrap())
}
