mod common;

use std::collections::HashMap;

use proptest::prelude::*;

use common::{cloud, small_complex};
use torsionscope::complex::{build_filtration, Filtration, Flavor, Simplex, SimplicialComplex};
use torsionscope::field::FieldSpec;
use torsionscope::homology::field_homology;
use torsionscope::metric::PointCloud;
use torsionscope::persistence::{compare_barcodes, persistent_homology, rank_invariant, Barcode};
use torsionscope::prime_guard::bad_primes_for_filtration;

const P: u64 = 3;

fn inv(a: u64) -> u64 {
    (1..P).find(|x| a * x % P == 1).unwrap()
}

/// Row-reduces in place mod P; returns pivot columns.
fn rref(a: &mut [Vec<u64>]) -> Vec<usize> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        let Some(p) = (row..a.len()).find(|&r| a[r][c] != 0) else { continue };
        a.swap(row, p);
        let f = inv(a[row][c]);
        a[row].iter_mut().for_each(|x| *x = *x * f % P);
        for r in 0..a.len() {
            if r != row && a[r][c] != 0 {
                let g = a[r][c];
                for j in 0..cols {
                    a[r][j] = (a[r][j] + P * P - g * a[row][j] % P) % P;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    pivots
}

fn rank(vectors: Vec<Vec<u64>>) -> usize {
    let mut m = vectors;
    rref(&mut m).len()
}

/// Boundary of a k-simplex as a dense vector over the (k-1)-simplices of `big`.
fn boundary_vec(s: &Simplex, index: &HashMap<&Simplex, usize>, len: usize) -> Vec<u64> {
    let mut v = vec![0; len];
    for (i, f) in s.facets().enumerate() {
        v[index[&f]] = if i % 2 == 0 { 1 } else { P - 1 };
    }
    v
}

/// Rank of `H_k(a) -> H_k(b)` over Z/3 as `dim(Z_k(a) + B_k(b)) - dim B_k(b)`.
fn induced_rank(a: &SimplicialComplex, b: &SimplicialComplex, k: usize) -> usize {
    let ks: Vec<&Simplex> = b.simplices(k).collect();
    let index: HashMap<&Simplex, usize> = ks.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let n = ks.len();
    // Z_k(a): kernel of ∂_k on C_k(a), embedded in C_k(b)
    let a_k: Vec<&Simplex> = a.simplices(k).collect();
    let cycles: Vec<Vec<u64>> = if k == 0 {
        a_k.iter().map(|s| { let mut v = vec![0; n]; v[index[*s]] = 1; v }).collect()
    } else {
        let lower: Vec<&Simplex> = b.simplices(k - 1).collect();
        let lower_index: HashMap<&Simplex, usize> = lower.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        // rows = (k-1)-faces, cols = k-simplices of a
        let mut m: Vec<Vec<u64>> = vec![vec![0; a_k.len()]; lower.len()];
        for (j, s) in a_k.iter().enumerate() {
            for (i, x) in boundary_vec(s, &lower_index, lower.len()).into_iter().enumerate() {
                m[i][j] = x;
            }
        }
        let pivots = rref(&mut m);
        (0..a_k.len())
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![0; n];
                v[index[a_k[free]]] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[index[a_k[pc]]] = (P - m[r][free]) % P;
                }
                v
            })
            .collect()
    };
    let boundaries: Vec<Vec<u64>> = b.simplices(k + 1).map(|s| boundary_vec(s, &index, n)).collect();
    let both: Vec<Vec<u64>> = cycles.into_iter().chain(boundaries.iter().cloned()).collect();
    rank(both) - rank(boundaries)
}

fn bars_at(bc: &Barcode, k: usize, eps: f64) -> usize {
    rank_invariant(bc, k, eps, eps).unwrap()
}

fn relabel(c: &PointCloud, perm: &[usize]) -> PointCloud {
    PointCloud::new(perm.iter().map(|&i| c.points()[i].clone()).collect(), c.metric().clone()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn bars_count_stage_homology(c in cloud(2, 8)) {
        let scales = [0.1, 0.2, 0.3, 0.45, 0.7];
        let f = build_filtration(&c, &scales, 3, Flavor::Rips).unwrap();
        for field in [FieldSpec::Rationals, FieldSpec::PrimeField { p: 2 }] {
            let bc = persistent_homology(&f, field, 2).unwrap();
            for &eps in &scales {
                let stage = f.stage(eps);
                for k in 0..=2 {
                    prop_assert_eq!(bars_at(&bc, k, eps), field_homology(&stage, k, field).unwrap());
                }
            }
        }
    }

    #[test]
    fn rank_invariant_matches_induced_maps(c in cloud(2, 7)) {
        let scales = [0.15, 0.3, 0.5, 0.8];
        let f = build_filtration(&c, &scales, 3, Flavor::Cech).unwrap();
        let bc = persistent_homology(&f, FieldSpec::PrimeField { p: P }, 2).unwrap();
        for (i, &a) in scales.iter().enumerate() {
            for &b in &scales[i..] {
                for k in 0..=2 {
                    prop_assert_eq!(rank_invariant(&bc, k, a, b).unwrap(), induced_rank(&f.stage(a), &f.stage(b), k));
                }
            }
        }
    }

    #[test]
    fn good_prime_barcodes_agree(c in small_complex()) {
        let f = Filtration::simplexwise(c);
        let max_k = f.complex().dim().unwrap_or(0);
        let report = bad_primes_for_filtration(&f, max_k).unwrap();
        let q = persistent_homology(&f, FieldSpec::Rationals, max_k).unwrap();
        for p in [2, 3, 5, 7] {
            if report.is_good(p) {
                let zp = persistent_homology(&f, FieldSpec::PrimeField { p }, max_k).unwrap();
                prop_assert!(compare_barcodes(&q, &zp).equal);
            }
        }
    }

    #[test]
    fn tie_break_does_not_change_barcode(c in cloud(2, 8), seed in any::<u64>()) {
        let n = c.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed | 1;
        for i in (1..n).rev() {
            s ^= s << 13; s ^= s >> 7; s ^= s << 17;
            perm.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let scales = [0.2, 0.35, 0.6];
        for flavor in [Flavor::Rips, Flavor::Cech] {
            let a = build_filtration(&c, &scales, 3, flavor).unwrap();
            let b = build_filtration(&relabel(&c, &perm), &scales, 3, flavor).unwrap();
            for field in [FieldSpec::Rationals, FieldSpec::PrimeField { p: 2 }] {
                let (x, y) = (persistent_homology(&a, field, 2).unwrap(), persistent_homology(&b, field, 2).unwrap());
                prop_assert!(compare_barcodes(&x, &y).equal, "{:?}", compare_barcodes(&x, &y));
            }
        }
    }

    #[test]
    fn reduction_is_deterministic(c in cloud(3, 8)) {
        let f = build_filtration(&c, &[0.2, 0.4, 0.8], 3, Flavor::Cech).unwrap();
        let a = serde_json::to_string(&persistent_homology(&f, FieldSpec::Rationals, 2).unwrap()).unwrap();
        let b = serde_json::to_string(&persistent_homology(&f, FieldSpec::Rationals, 2).unwrap()).unwrap();
        prop_assert_eq!(&a, &b);
        let back: Barcode = serde_json::from_str(&a).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), a);
    }
}

#[test]
fn composite_field_rejected() {
    let f = Filtration::simplexwise(torsionscope::close_under_faces(&[vec![0, 1]]).unwrap());
    assert!(persistent_homology(&f, FieldSpec::PrimeField { p: 6 }, 0).is_err());
}
