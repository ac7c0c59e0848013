//! Bad primes of boundary operators and filtrations, and good-prime certificates.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{Filtration, SimplicialComplex};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::homology::{boundary_matrix, field_homology};
use crate::metric::FORMAT_VERSION;
use crate::primes::{prime_factors, require_prime};
use crate::snf::smith_normal_form;

fn largest_divisor_primes(complex: &SimplicialComplex, k: usize) -> Result<BTreeSet<u64>> {
    match smith_normal_form(&boundary_matrix(complex, k), false).largest() {
        Some(d) => prime_factors(d),
        None => Ok(BTreeSet::new()),
    }
}

fn require_built(complex: &SimplicialComplex, k: usize) -> Result<()> {
    if complex.is_complete_in(k + 1) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "bad primes in degree {k} need the complex built to dimension {}",
            k + 1
        )))
    }
}

/// Prime factors of `α_r · α̃_s`, the largest elementary divisors of `∂_{k+1}` and `∂_k`.
/// Every other divisor of either operator divides one of these two.
pub fn bad_primes_for_degree(complex: &SimplicialComplex, k: usize) -> Result<BTreeSet<u64>> {
    require_built(complex, k)?;
    let mut primes = largest_divisor_primes(complex, k + 1)?;
    primes.extend(largest_divisor_primes(complex, k)?);
    Ok(primes)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StagePrimes {
    pub scale: f64,
    pub k: usize,
    pub primes: BTreeSet<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimeReport {
    #[serde(default = "format_version")]
    pub format_version: u32,
    pub aggregate: BTreeSet<u64>,
    pub per_stage: Vec<StagePrimes>,
}

fn format_version() -> u32 {
    FORMAT_VERSION
}

impl PrimeReport {
    pub fn is_good(&self, p: u64) -> bool {
        !self.aggregate.contains(&p)
    }
}

/// Bad primes of every listed stage in every degree `k <= max_k`, and their union.
pub fn bad_primes_for_filtration(filtration: &Filtration, max_k: usize) -> Result<PrimeReport> {
    require_built(filtration.complex(), max_k)?;
    let per_scale: Vec<Vec<StagePrimes>> = filtration
        .scales()
        .par_iter()
        .map(|&scale| {
            let stage = filtration.stage(scale);
            // primes of the largest divisor of ∂_j, for j = 0..=max_k+1
            let by_operator =
                (0..=max_k + 1).map(|j| largest_divisor_primes(&stage, j)).collect::<Result<Vec<_>>>()?;
            Ok((0..=max_k)
                .map(|k| StagePrimes {
                    scale,
                    k,
                    primes: by_operator[k].union(&by_operator[k + 1]).copied().collect(),
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let per_stage: Vec<StagePrimes> = per_scale.into_iter().flatten().collect();
    let aggregate = per_stage.iter().flat_map(|s| s.primes.iter().copied()).collect();
    Ok(PrimeReport { format_version: FORMAT_VERSION, aggregate, per_stage })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageCheck {
    pub scale: f64,
    pub k: usize,
    pub field_dim: usize,
    pub betti: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodPrimeCertificate {
    #[serde(default = "format_version")]
    pub format_version: u32,
    pub p: u64,
    pub checks: Vec<StageCheck>,
    pub pass: bool,
}

impl GoodPrimeCertificate {
    pub fn failures(&self) -> impl Iterator<Item = &StageCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Compares `dim H_k(Z/p)` with the rational Betti number at every stage and degree `k <= max_k`.
pub fn certify_good_prime(filtration: &Filtration, p: u64, max_k: usize) -> Result<GoodPrimeCertificate> {
    let field = FieldSpec::PrimeField { p: require_prime(p)? };
    require_built(filtration.complex(), max_k)?;
    let per_scale: Vec<Vec<StageCheck>> = filtration
        .scales()
        .par_iter()
        .map(|&scale| {
            let stage = filtration.stage(scale);
            (0..=max_k)
                .map(|k| {
                    let field_dim = field_homology(&stage, k, field)?;
                    let betti = field_homology(&stage, k, FieldSpec::Rationals)?;
                    Ok(StageCheck { scale, k, field_dim, betti, pass: field_dim == betti })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let checks: Vec<StageCheck> = per_scale.into_iter().flatten().collect();
    let pass = checks.iter().all(|c| c.pass);
    Ok(GoodPrimeCertificate { format_version: FORMAT_VERSION, p, checks, pass })
}
