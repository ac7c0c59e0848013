//! Empty-simplex cycles, Rips representability and Helly-type vanishing checks.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{Filtration, Flavor, Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::homology::field_homology;
use crate::metric::FORMAT_VERSION;

/// `k + 2` vertices whose every `(k + 1)`-subset is a simplex while the full set is not.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EmptySimplexWitness {
    pub vertices: Vec<usize>,
    pub k: usize,
}

/// Boundary of the boundary of the witness, as a chain on `(k - 1)`-faces.
fn boundary_of_boundary(vertices: &[usize]) -> BTreeMap<Vec<usize>, i64> {
    let mut chain: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
    for i in 0..vertices.len() {
        let face: Vec<usize> = vertices.iter().enumerate().filter(|&(a, _)| a != i).map(|(_, &v)| v).collect();
        let si = if i % 2 == 0 { 1 } else { -1 };
        for j in 0..face.len() {
            let sub: Vec<usize> = face.iter().enumerate().filter(|&(b, _)| b != j).map(|(_, &v)| v).collect();
            let sj = if j % 2 == 0 { 1 } else { -1 };
            *chain.entry(sub).or_default() += si * sj;
        }
    }
    chain.retain(|_, c| *c != 0);
    chain
}

/// Whether the dimension-`k` scan is meaningful: the filling `(k+1)`-simplices
/// must have been enumerated.
fn scannable(complex: &SimplicialComplex, k: usize) -> bool {
    k >= 1 && complex.is_complete_in(k + 1)
}

/// Every empty `(k+1)`-simplex. Each candidate is a `k`-simplex extended by
/// a larger vertex adjacent to all of its vertices, so every tuple is
/// generated once, from the facet omitting its largest vertex.
pub fn find_empty_simplices(complex: &SimplicialComplex, k: usize) -> Result<Vec<EmptySimplexWitness>> {
    if k == 0 {
        return Err(Error::InvalidParameter("empty simplices are scanned for k >= 1".into()));
    }
    if !scannable(complex, k) {
        return Ok(Vec::new());
    }
    let mut adjacency: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); complex.vertex_count()];
    for e in complex.simplices(1) {
        let (a, b) = (e.vertices()[0], e.vertices()[1]);
        adjacency[a].insert(b);
        adjacency[b].insert(a);
    }
    let faces: HashSet<&Simplex> = complex.simplices(k).collect();
    let bases: Vec<&Simplex> = complex.simplices(k).collect();
    let mut found: Vec<EmptySimplexWitness> = bases
        .par_iter()
        .flat_map_iter(|base| {
            let top = *base.vertices().last().expect("nonempty");
            let first = base.vertices()[0];
            adjacency[first]
                .range(top + 1..)
                .filter(|&&v| base.vertices().iter().all(|u| adjacency[*u].contains(&v)))
                .filter_map(|&v| {
                    let mut vertices = base.vertices().to_vec();
                    vertices.push(v);
                    let tau = Simplex::new(vertices.clone()).expect("distinct");
                    let boundary_present = tau.facets().all(|f| faces.contains(&f));
                    (boundary_present && !complex.contains(&tau)).then_some(EmptySimplexWitness { vertices, k })
                })
                .collect::<Vec<_>>()
        })
        .collect();
    found.sort();
    for w in &found {
        assert!(boundary_of_boundary(&w.vertices).is_empty(), "witness {:?} is not a cycle", w.vertices);
    }
    Ok(found)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Equal to the clique complex of its 1-skeleton, hence a Rips complex of a symmetric metric.
    #[serde(rename = "FLAG")]
    Flag,
    #[serde(rename = "NOT-RIPS")]
    NotRips,
    /// Not the Čech complex of any finite cloud in the given dimension.
    #[serde(rename = "NOT-CECH")]
    NotCech,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Flag => "FLAG",
            Verdict::NotRips => "NOT-RIPS",
            Verdict::NotCech => "NOT-CECH",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub verdict: Verdict,
    pub witnesses: Vec<Vec<usize>>,
    /// Dimension `k` of each witness, aligned with `witnesses`.
    pub dimensions: Vec<usize>,
    /// Dimensions that were scanned.
    pub scanned: Vec<usize>,
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

fn scan(complex: &SimplicialComplex, ks: impl Iterator<Item = usize>) -> Result<(Vec<EmptySimplexWitness>, Vec<usize>)> {
    let mut witnesses = Vec::new();
    let mut scanned = Vec::new();
    for k in ks.filter(|&k| scannable(complex, k)) {
        scanned.push(k);
        witnesses.extend(find_empty_simplices(complex, k)?);
    }
    Ok((witnesses, scanned))
}

fn report(verdict: Verdict, witnesses: Vec<EmptySimplexWitness>, scanned: Vec<usize>) -> ObstructionReport {
    ObstructionReport {
        format_version: FORMAT_VERSION,
        verdict,
        dimensions: witnesses.iter().map(|w| w.k).collect(),
        witnesses: witnesses.into_iter().map(|w| w.vertices).collect(),
        scanned,
    }
}

/// NOT-RIPS with witnesses if any empty simplex exists, FLAG otherwise. A
/// missing clique of minimal size always shows up as an empty simplex, so
/// FLAG is re-verified against the clique complex.
pub fn rips_representability(complex: &SimplicialComplex) -> Result<ObstructionReport> {
    let top = complex.dim().unwrap_or(0);
    let (witnesses, scanned) = scan(complex, 1..=top)?;
    if !witnesses.is_empty() {
        return Ok(report(Verdict::NotRips, witnesses, scanned));
    }
    let cap = complex.skeleton().map_or(top + 1, |c| c.min(top + 1));
    let flag = complex.clique_complex(cap);
    if !(flag.is_subcomplex_of(complex) && complex.is_subcomplex_of(&flag)) {
        return Err(Error::InvalidParameter("complex differs from its clique complex without an empty simplex".into()));
    }
    Ok(report(Verdict::Flag, witnesses, scanned))
}

/// Empty simplices in dimensions `k >= n + 1`. Any witness rules out the
/// complex being the Čech complex of a cloud in an `n`-dimensional normed space.
pub fn capture_obstruction(complex: &SimplicialComplex, n: usize) -> Result<ObstructionReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("ambient dimension must be at least 1".into()));
    }
    let top = complex.dim().unwrap_or(0);
    let (witnesses, scanned) = scan(complex, n + 1..=top)?;
    let verdict = if witnesses.is_empty() { Verdict::Inconclusive } else { Verdict::NotCech };
    Ok(report(verdict, witnesses, scanned))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanishingViolation {
    pub scale: f64,
    pub k: usize,
    pub betti: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanishingReport {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub n: usize,
    pub max_k: usize,
    pub stages: usize,
    pub violations: Vec<VanishingViolation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl VanishingReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that rational `H_k` vanishes at every stage for `n < k <= max_k`.
pub fn verify_vanishing(filtration: &Filtration, n: usize, max_k: usize) -> Result<VanishingReport> {
    if max_k <= n {
        return Err(Error::InvalidParameter(format!("max_k must exceed n, got max_k = {max_k}, n = {n}")));
    }
    if !filtration.complex().is_complete_in(max_k + 1) {
        return Err(Error::InvalidParameter(format!(
            "vanishing up to degree {max_k} needs the filtration built to dimension {}",
            max_k + 1
        )));
    }
    let warning = match (filtration.flavor(), filtration.ambient_dim()) {
        (Some(Flavor::Cech), Some(d)) if d != n => {
            Some(format!("filtration was built in dimension {d}, not {n}; the vanishing statement may not apply"))
        }
        (Some(Flavor::Cech), _) => None,
        (Some(Flavor::Rips), _) => Some("Rips filtration: higher homology need not vanish".into()),
        (None, _) => Some("filtration origin unknown; vanishing is only guaranteed for Čech filtrations".into()),
    };
    let per_scale: Vec<Vec<VanishingViolation>> = filtration
        .scales()
        .par_iter()
        .map(|&scale| {
            let stage = filtration.stage(scale);
            let mut out = Vec::new();
            for k in n + 1..=max_k {
                let betti = field_homology(&stage, k, FieldSpec::Rationals)?;
                if betti != 0 {
                    out.push(VanishingViolation { scale, k, betti });
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(VanishingReport {
        format_version: FORMAT_VERSION,
        n,
        max_k,
        stages: filtration.scales().len(),
        violations: per_scale.into_iter().flatten().collect(),
        warning,
    })
}
