//! Boundary operators and homology with integer, rational and prime-field
//! coefficients.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::bigjson;
use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::field::{rank_over, Column, FieldSpec};
use crate::snf::{smith_normal_form, IntegerMatrix};

/// Finitely generated abelian group `Z^betti ⊕ Z/t_1 ⊕ ... ⊕ Z/t_m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub betti: usize,
    /// Torsion coefficients `t_i > 1`, each dividing the next.
    #[serde(with = "bigjson::vec")]
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn free(betti: usize) -> Self {
        HomologyGroup { betti, torsion: Vec::new() }
    }

    pub fn new(betti: usize, torsion: &[i64]) -> Self {
        HomologyGroup { betti, torsion: torsion.iter().map(|&t| BigInt::from(t)).collect() }
    }

    pub fn is_trivial(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }

    /// Number of torsion coefficients divisible by `p`.
    pub fn torsion_divisible_by(&self, p: u64) -> usize {
        let p = BigInt::from(p);
        self.torsion.iter().filter(|t| t.is_multiple_of(&p)).count()
    }
}

fn ensure_complete(complex: &SimplicialComplex, k: usize) -> Result<()> {
    if complex.is_complete_in(k + 1) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "H_{k} needs {}-simplices but the complex was truncated at dimension {}",
            k + 1,
            complex.skeleton().unwrap_or(0)
        )))
    }
}

/// Sparse boundary columns of `∂_k` with rows indexed by `(k-1)`-simplices
/// in lexicographic order. Deleting vertex `i` carries sign `(-1)^i`.
pub(crate) fn boundary_columns(complex: &SimplicialComplex, k: usize) -> (usize, Vec<Column<i64>>) {
    if k == 0 {
        return (0, vec![Vec::new(); complex.count(0)]);
    }
    let index: HashMap<&Simplex, usize> = complex.index_map(k - 1);
    let columns = complex
        .simplices(k)
        .map(|s| {
            let mut col: Column<i64> = s
                .facets()
                .enumerate()
                .map(|(i, f)| (index[&f], if i % 2 == 0 { 1 } else { -1 }))
                .collect();
            col.sort_unstable_by_key(|(r, _)| *r);
            col
        })
        .collect();
    (complex.count(k - 1), columns)
}

/// `∂_k : C_k -> C_{k-1}`; `∂_0` is the zero map to the trivial group.
pub fn boundary_matrix(complex: &SimplicialComplex, k: usize) -> IntegerMatrix {
    let (rows, columns) = boundary_columns(complex, k);
    let triplets = columns
        .iter()
        .enumerate()
        .flat_map(|(j, col)| col.iter().map(move |&(i, x)| (i, j, BigInt::from(x))));
    IntegerMatrix::from_triplets(rows, columns.len(), triplets).expect("indices in range")
}

/// Integer homology from the Smith forms of `∂_k` and `∂_{k+1}`.
pub fn integer_homology(complex: &SimplicialComplex, k: usize) -> Result<HomologyGroup> {
    ensure_complete(complex, k)?;
    let n_k = complex.count(k);
    let rank_k = smith_normal_form(&boundary_matrix(complex, k), false).rank;
    let next = smith_normal_form(&boundary_matrix(complex, k + 1), false);
    Ok(HomologyGroup {
        betti: n_k - rank_k - next.rank,
        torsion: next.divisors.into_iter().filter(|d| !d.is_one()).collect(),
    })
}

/// Dimension of `H_k` with coefficients in `field`.
pub fn field_homology(complex: &SimplicialComplex, k: usize, field: FieldSpec) -> Result<usize> {
    ensure_complete(complex, k)?;
    let (_, cols_k) = boundary_columns(complex, k);
    let (_, cols_next) = boundary_columns(complex, k + 1);
    let rank_k = rank_over(field, &cols_k)?;
    let rank_next = rank_over(field, &cols_next)?;
    Ok(complex.count(k) - rank_k - rank_next)
}

/// Outcome of comparing `dim H_k(Z/p)` against the universal coefficient prediction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UctReport {
    pub k: usize,
    pub p: u64,
    pub field_dim: usize,
    pub betti: usize,
    /// Torsion coefficients of `H_k` divisible by `p`.
    pub torsion_k: usize,
    /// Torsion coefficients of `H_{k-1}` divisible by `p`.
    pub torsion_k_minus_1: usize,
    pub consistent: bool,
}

/// Checks `dim H_k(Z/p) = β_k + t_k(p) + t_{k-1}(p)`.
pub fn uct_check(complex: &SimplicialComplex, k: usize, p: u64) -> Result<UctReport> {
    let field = FieldSpec::prime(p)?;
    let field_dim = field_homology(complex, k, field)?;
    let h_k = integer_homology(complex, k)?;
    let torsion_k = h_k.torsion_divisible_by(p);
    let torsion_k_minus_1 = if k == 0 { 0 } else { integer_homology(complex, k - 1)?.torsion_divisible_by(p) };
    Ok(UctReport {
        k,
        p,
        field_dim,
        betti: h_k.betti,
        torsion_k,
        torsion_k_minus_1,
        consistent: field_dim == h_k.betti + torsion_k + torsion_k_minus_1,
    })
}

/// Betti numbers over `field` for `k = 0..=max_k`.
pub fn betti_numbers(complex: &SimplicialComplex, max_k: usize, field: FieldSpec) -> Result<Vec<usize>> {
    (0..=max_k).map(|k| field_homology(complex, k, field)).collect()
}
