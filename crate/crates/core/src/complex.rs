//! Abstract simplicial complexes, filtrations, and the Rips / Čech builders.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cech::{min_enclosing_ball, minimax_radius};
use crate::error::{Error, Result};
use crate::metric::{MetricKind, PointCloud, FORMAT_VERSION};

/// Relative slack for the convex-minimax Čech decision.
pub const MINIMAX_SLACK: f64 = 1e-9;
/// Relative band around `eps` reported as a near-boundary Čech decision.
pub const NEAR_BOUNDARY_BAND: f64 = 1e-6;

/// A simplex as a strictly increasing vertex tuple.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Sorts the vertices; rejects empty or repeated vertex lists.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        if vertices.is_empty() {
            return Err(Error::Schema("a simplex needs at least one vertex".into()));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Schema(format!("repeated vertex in simplex {vertices:?}")));
        }
        Ok(Simplex(vertices))
    }

    pub(crate) fn from_sorted(vertices: Vec<usize>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// The facet obtained by deleting the `i`-th vertex.
    pub fn facet(&self, i: usize) -> Simplex {
        let mut v = self.0.clone();
        v.remove(i);
        Simplex(v)
    }

    /// Facets in vertex-deletion order; empty for vertices.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |i| self.facet(i))
    }

    /// Total order used wherever simplices of mixed dimension are listed.
    pub fn cmp_dim_lex(&self, other: &Simplex) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl TryFrom<Vec<usize>> for Simplex {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Simplex::new(v)
    }
}

impl From<Simplex> for Vec<usize> {
    fn from(s: Simplex) -> Self {
        s.0
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A finite simplicial complex, closed under faces.
///
/// `skeleton` records that simplices above that dimension were never
/// enumerated (a truncated construction), so the absence of a simplex above
/// the cap says nothing about the underlying complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertex_count: usize,
    by_dim: Vec<BTreeSet<Simplex>>,
    skeleton: Option<usize>,
}

impl SimplicialComplex {
    pub fn empty(vertex_count: usize) -> Self {
        SimplicialComplex { vertex_count, by_dim: Vec::new(), skeleton: None }
    }

    /// Smallest complex containing `simplices`.
    pub fn from_simplices<I>(vertex_count: usize, simplices: I) -> Result<Self>
    where
        I: IntoIterator<Item = Simplex>,
    {
        let mut complex = SimplicialComplex::empty(vertex_count);
        for s in simplices {
            if let Some(&v) = s.vertices().last() {
                if v >= vertex_count {
                    return Err(Error::IndexOutOfRange { index: v, len: vertex_count });
                }
            }
            complex.insert_closed(s);
        }
        Ok(complex)
    }

    fn insert_closed(&mut self, s: Simplex) {
        let d = s.dim();
        while self.by_dim.len() <= d {
            self.by_dim.push(BTreeSet::new());
        }
        if self.by_dim[d].contains(&s) {
            return;
        }
        for f in s.facets() {
            self.insert_closed(f);
        }
        self.by_dim[d].insert(s);
    }

    /// Inserts a simplex whose facets are already present.
    pub(crate) fn insert_unchecked(&mut self, s: Simplex) {
        let d = s.dim();
        while self.by_dim.len() <= d {
            self.by_dim.push(BTreeSet::new());
        }
        self.by_dim[d].insert(s);
    }

    pub fn with_skeleton(mut self, skeleton: Option<usize>) -> Self {
        self.skeleton = skeleton;
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn skeleton(&self) -> Option<usize> {
        self.skeleton
    }

    /// Highest dimension with a simplex; `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.by_dim.iter().rposition(|s| !s.is_empty())
    }

    /// Whether `k`-simplices were fully enumerated.
    pub fn is_complete_in(&self, k: usize) -> bool {
        self.skeleton.is_none_or(|cap| k <= cap)
    }

    pub fn simplices(&self, k: usize) -> impl Iterator<Item = &Simplex> + '_ {
        self.by_dim.get(k).into_iter().flat_map(|s| s.iter())
    }

    pub fn count(&self, k: usize) -> usize {
        self.by_dim.get(k).map_or(0, BTreeSet::len)
    }

    pub fn len(&self) -> usize {
        self.by_dim.iter().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.by_dim.get(s.dim()).is_some_and(|set| set.contains(s))
    }

    /// All simplices ordered by dimension, then lexicographically.
    pub fn iter(&self) -> impl Iterator<Item = &Simplex> + '_ {
        self.by_dim.iter().flat_map(|s| s.iter())
    }

    /// Position of every `k`-simplex in lexicographic order.
    pub fn index_map(&self, k: usize) -> HashMap<&Simplex, usize> {
        self.simplices(k).enumerate().map(|(i, s)| (s, i)).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim.iter().enumerate().map(|(k, s)| if k % 2 == 0 { s.len() as i64 } else { -(s.len() as i64) }).sum()
    }

    /// Simplices not contained in any larger simplex.
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        let mut covered: BTreeSet<&Simplex> = BTreeSet::new();
        let mut out = Vec::new();
        for k in (0..self.by_dim.len()).rev() {
            for s in &self.by_dim[k] {
                if !covered.contains(s) {
                    out.push(s.clone());
                }
            }
            if k > 0 {
                for s in &self.by_dim[k] {
                    for f in s.facets() {
                        if let Some(face) = self.by_dim[k - 1].get(&f) {
                            covered.insert(face);
                        }
                    }
                }
            }
        }
        out.sort_by(Simplex::cmp_dim_lex);
        out
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.iter().all(|s| other.contains(s))
    }

    /// Simplices of `self` missing from `other`.
    pub fn difference<'a>(&'a self, other: &'a SimplicialComplex) -> impl Iterator<Item = &'a Simplex> + 'a {
        self.iter().filter(move |s| !other.contains(s))
    }

    /// Flag completion of the 1-skeleton up to dimension `max_dim`.
    pub fn clique_complex(&self, max_dim: usize) -> SimplicialComplex {
        let mut adjacency: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.vertex_count];
        for e in self.simplices(1) {
            let (a, b) = (e.vertices()[0], e.vertices()[1]);
            adjacency[a].insert(b);
            adjacency[b].insert(a);
        }
        let vertices: Vec<usize> = self.simplices(0).map(|s| s.vertices()[0]).collect();
        clique_expansion(self.vertex_count, &vertices, &adjacency, max_dim).with_skeleton(Some(max_dim))
    }
}

/// Smallest simplicial complex containing every input tuple, on vertices
/// `0..=max index`.
pub fn close_under_faces(simplices: &[Vec<usize>]) -> Result<SimplicialComplex> {
    let vertex_count = simplices.iter().flatten().max().map_or(0, |m| m + 1);
    let simplices = simplices.iter().cloned().map(Simplex::new).collect::<Result<Vec<_>>>()?;
    SimplicialComplex::from_simplices(vertex_count, simplices)
}

/// Ordered backtracking over sorted neighbor intersections.
fn clique_expansion(
    vertex_count: usize,
    vertices: &[usize],
    adjacency: &[BTreeSet<usize>],
    max_dim: usize,
) -> SimplicialComplex {
    fn extend(
        current: &mut Vec<usize>,
        candidates: &[usize],
        adjacency: &[BTreeSet<usize>],
        max_dim: usize,
        out: &mut SimplicialComplex,
    ) {
        out.insert_unchecked(Simplex::from_sorted(current.clone()));
        if current.len() > max_dim {
            return;
        }
        for (pos, &v) in candidates.iter().enumerate() {
            let next: Vec<usize> = candidates[pos + 1..].iter().copied().filter(|u| adjacency[v].contains(u)).collect();
            current.push(v);
            extend(current, &next, adjacency, max_dim, out);
            current.pop();
        }
    }

    let mut out = SimplicialComplex::empty(vertex_count);
    let present: BTreeSet<usize> = vertices.iter().copied().collect();
    for &v in vertices {
        let candidates: Vec<usize> = adjacency[v].range(v + 1..).copied().filter(|u| present.contains(u)).collect();
        let mut current = vec![v];
        extend(&mut current, &candidates, adjacency, max_dim, &mut out);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Rips,
    Cech,
}

impl std::str::FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rips" => Ok(Flavor::Rips),
            "cech" => Ok(Flavor::Cech),
            other => Err(Error::InvalidParameter(format!("unknown flavor `{other}`"))),
        }
    }
}

/// Symmetrized Rips edge length: both ordered distances must be within scale.
fn rips_edge_length(cloud: &PointCloud, i: usize, j: usize) -> Result<f64> {
    Ok(cloud.distance(i, j)?.max(cloud.distance(j, i)?))
}

/// Vietoris–Rips complex: an edge needs `d(i, j) <= eps` and `d(j, i) <= eps`;
/// higher simplices are the cliques of that graph up to `max_dim`.
pub fn build_rips(cloud: &PointCloud, eps: f64, max_dim: usize) -> Result<SimplicialComplex> {
    check_scale(eps)?;
    let n = cloud.len();
    if n == 0 {
        return Err(Error::EmptyCloud);
    }
    let mut adjacency = vec![BTreeSet::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if rips_edge_length(cloud, i, j)? <= eps {
                adjacency[i].insert(j);
                adjacency[j].insert(i);
            }
        }
    }
    let vertices: Vec<usize> = (0..n).collect();
    Ok(clique_expansion(n, &vertices, &adjacency, max_dim).with_skeleton(Some(max_dim)))
}

fn check_scale(eps: f64) -> Result<()> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::InvalidParameter(format!("scale must be >= 0, got {eps}")));
    }
    Ok(())
}

/// How a Čech simplex's critical radius was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CechMethod {
    /// Exact minimum enclosing ball (Euclidean metrics).
    EnclosingBall,
    /// Smoothed convex minimax (other Minkowski norms).
    Minimax,
}

/// A Čech decision whose critical radius lies within the near-boundary band.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearBoundary {
    pub simplex: Simplex,
    pub radius: f64,
    pub eps: f64,
}

/// Critical radius of a simplex: the smallest scale at which its balls meet.
pub fn cech_radius(cloud: &PointCloud, simplex: &Simplex) -> Result<(f64, CechMethod)> {
    let points: Vec<&[f64]> = simplex
        .vertices()
        .iter()
        .map(|&v| cloud.points().get(v).map(Vec::as_slice).ok_or(Error::IndexOutOfRange { index: v, len: cloud.len() }))
        .collect::<Result<_>>()?;
    match cloud.metric().kind() {
        MetricKind::Euclidean => Ok((min_enclosing_ball(&points).radius, CechMethod::EnclosingBall)),
        MetricKind::Lq { .. } | MetricKind::Randers { .. } => {
            Ok((minimax_radius(cloud.metric(), &points).value, CechMethod::Minimax))
        }
        other => Err(Error::NoAmbientNorm(other.name())),
    }
}

fn cech_member(radius: f64, method: CechMethod, eps: f64) -> bool {
    match method {
        CechMethod::EnclosingBall => radius <= eps,
        CechMethod::Minimax => radius <= eps * (1.0 + MINIMAX_SLACK),
    }
}

/// Čech complex at scale `eps`.
pub fn build_cech(cloud: &PointCloud, eps: f64, max_dim: usize) -> Result<SimplicialComplex> {
    build_cech_with_diagnostics(cloud, eps, max_dim).map(|(c, _)| c)
}

/// Čech complex plus the list of decisions within the near-boundary band.
pub fn build_cech_with_diagnostics(
    cloud: &PointCloud,
    eps: f64,
    max_dim: usize,
) -> Result<(SimplicialComplex, Vec<NearBoundary>)> {
    check_scale(eps)?;
    let mut near = Vec::new();
    let complex = grow_cech(cloud, max_dim, |simplex, radius, method| {
        if method == CechMethod::Minimax && (radius - eps).abs() <= NEAR_BOUNDARY_BAND * eps {
            near.push(NearBoundary { simplex: simplex.clone(), radius, eps });
        }
        cech_member(radius, method, eps)
    })?;
    Ok((complex.0, near))
}

/// Grows a Čech complex dimension by dimension; `accept` decides each
/// candidate whose facets are all present. Returns the complex and the
/// critical radius of every accepted simplex.
fn grow_cech<F>(cloud: &PointCloud, max_dim: usize, mut accept: F) -> Result<(SimplicialComplex, HashMap<Simplex, f64>)>
where
    F: FnMut(&Simplex, f64, CechMethod) -> bool,
{
    if !cloud.metric().is_minkowski() {
        return Err(Error::NoAmbientNorm(cloud.metric().kind().name()));
    }
    let n = cloud.len();
    if n == 0 {
        return Err(Error::EmptyCloud);
    }
    let mut complex = SimplicialComplex::empty(n).with_skeleton(Some(max_dim));
    let mut radii = HashMap::new();
    for v in 0..n {
        let s = Simplex::from_sorted(vec![v]);
        radii.insert(s.clone(), 0.0);
        complex.insert_unchecked(s);
    }
    for d in 1..=max_dim {
        let previous: Vec<Simplex> = complex.simplices(d - 1).cloned().collect();
        let mut added = false;
        for base in previous {
            let last = *base.vertices().last().expect("nonempty");
            for v in last + 1..n {
                let mut verts = base.vertices().to_vec();
                verts.push(v);
                let candidate = Simplex::from_sorted(verts);
                if !candidate.facets().all(|f| complex.contains(&f)) {
                    continue;
                }
                let (radius, method) = cech_radius(cloud, &candidate)?;
                if accept(&candidate, radius, method) {
                    radii.insert(candidate.clone(), radius);
                    complex.insert_unchecked(candidate);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    Ok((complex, radii))
}

/// A finite scale-indexed filtration.
#[derive(Clone, Debug, PartialEq)]
pub struct Filtration {
    complex: SimplicialComplex,
    births: BTreeMap<Simplex, f64>,
    scales: Vec<f64>,
    flavor: Option<Flavor>,
    ambient_dim: Option<usize>,
}

impl Filtration {
    /// Validates monotonicity and that every birth is a listed scale.
    pub fn new(complex: SimplicialComplex, births: BTreeMap<Simplex, f64>, scales: Vec<f64>) -> Result<Self> {
        check_scales(&scales)?;
        if births.len() != complex.len() {
            return Err(Error::Schema(format!(
                "{} births listed for a complex with {} simplices",
                births.len(),
                complex.len()
            )));
        }
        for s in complex.iter() {
            let b = *births.get(s).ok_or_else(|| Error::Schema(format!("missing birth for {s:?}")))?;
            if scales.binary_search_by(|x| x.total_cmp(&b)).is_err() {
                return Err(Error::Schema(format!("birth {b} of {s:?} is not a listed scale")));
            }
            for f in s.facets() {
                if births[&f] > b {
                    return Err(Error::Schema(format!("face {f:?} born after {s:?}")));
                }
            }
        }
        Ok(Filtration { complex, births, scales, flavor: None, ambient_dim: None })
    }

    /// One simplex per stage, in (dimension, lexicographic) order, with births `0, 1, 2, ...`.
    pub fn simplexwise(complex: SimplicialComplex) -> Self {
        let births: BTreeMap<Simplex, f64> = complex.iter().enumerate().map(|(i, s)| (s.clone(), i as f64)).collect();
        let scales = (0..births.len()).map(|i| i as f64).collect();
        Filtration { complex, births, scales, flavor: None, ambient_dim: None }
    }

    pub fn with_origin(mut self, flavor: Option<Flavor>, ambient_dim: Option<usize>) -> Self {
        self.flavor = flavor;
        self.ambient_dim = ambient_dim;
        self
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn flavor(&self) -> Option<Flavor> {
        self.flavor
    }

    pub fn ambient_dim(&self) -> Option<usize> {
        self.ambient_dim
    }

    pub fn birth(&self, s: &Simplex) -> Option<f64> {
        self.births.get(s).copied()
    }

    /// Subcomplex of simplices born at or before `eps`.
    pub fn stage(&self, eps: f64) -> SimplicialComplex {
        let mut out = SimplicialComplex::empty(self.complex.vertex_count).with_skeleton(self.complex.skeleton);
        for s in self.complex.iter() {
            if self.births[s] <= eps {
                out.insert_unchecked(s.clone());
            }
        }
        out
    }

    /// Simplices in the reduction order: birth, then dimension, then lexicographic.
    pub fn ordered(&self) -> Vec<(&Simplex, f64)> {
        let mut out: Vec<(&Simplex, f64)> = self.births.iter().map(|(s, b)| (s, *b)).collect();
        out.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp_dim_lex(b.0)));
        out
    }

    /// Same filtration restricted to the listed subset of scales; births are
    /// pushed up to the next retained scale and later simplices dropped.
    pub fn restrict_to(&self, scales: &[f64]) -> Result<Filtration> {
        check_scales(scales)?;
        let mut births = BTreeMap::new();
        let mut complex = SimplicialComplex::empty(self.complex.vertex_count).with_skeleton(self.complex.skeleton);
        for s in self.complex.iter() {
            let b = self.births[s];
            if let Some(&t) = scales.iter().find(|&&t| b <= t) {
                births.insert(s.clone(), t);
                complex.insert_unchecked(s.clone());
            }
        }
        Ok(Filtration { complex, births, scales: scales.to_vec(), flavor: self.flavor, ambient_dim: self.ambient_dim })
    }
}

fn check_scales(scales: &[f64]) -> Result<()> {
    if scales.is_empty() || scales.iter().any(|s| s.is_nan()) || scales.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::UnsortedScales);
    }
    Ok(())
}

/// Builds a filtration at the listed scales. A simplex is born at the
/// smallest listed scale at which the direct construction contains it.
pub fn build_filtration(cloud: &PointCloud, scales: &[f64], max_dim: usize, flavor: Flavor) -> Result<Filtration> {
    check_scales(scales)?;
    let top = *scales.last().expect("nonempty");
    check_scale(scales[0])?;
    let first_scale = |value: f64, method: Option<CechMethod>| -> Option<f64> {
        scales.iter().copied().find(|&s| match method {
            None => value <= s,
            Some(m) => cech_member(value, m, s),
        })
    };

    let mut births = BTreeMap::new();
    let complex = match flavor {
        Flavor::Rips => {
            let complex = build_rips(cloud, top, max_dim)?;
            for s in complex.iter() {
                let mut value: f64 = 0.0;
                let v = s.vertices();
                for a in 0..v.len() {
                    for b in a + 1..v.len() {
                        value = value.max(rips_edge_length(cloud, v[a], v[b])?);
                    }
                }
                births.insert(s.clone(), first_scale(value, None).expect("member at the top scale"));
            }
            complex
        }
        Flavor::Cech => {
            let mut methods = HashMap::new();
            let (complex, radii) = grow_cech(cloud, max_dim, |s, r, m| {
                methods.insert(s.clone(), m);
                cech_member(r, m, top)
            })?;
            for s in complex.iter() {
                let method = methods.get(s).copied().unwrap_or(CechMethod::EnclosingBall);
                let b = first_scale(radii[s], Some(method)).expect("member at the top scale");
                births.insert(s.clone(), b);
            }
            // faces never have larger radius in exact arithmetic; enforce it under rounding
            let ordered: Vec<Simplex> = complex.iter().cloned().collect();
            for s in ordered {
                let b = s.facets().map(|f| births[&f]).fold(births[&s], f64::max);
                births.insert(s, b);
            }
            complex
        }
    };
    let ambient = if cloud.ambient_dim() > 0 { Some(cloud.ambient_dim()) } else { None };
    let mut used: Vec<f64> = scales.to_vec();
    used.dedup();
    Ok(Filtration::new(complex, births, used)?.with_origin(Some(flavor), ambient))
}

#[derive(Serialize, Deserialize)]
struct ComplexFile {
    #[serde(default = "default_format_version")]
    format_version: u32,
    vertex_count: usize,
    maximal_simplices: Vec<Simplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    skeleton: Option<usize>,
}

fn default_format_version() -> u32 {
    FORMAT_VERSION
}

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::Schema(format!("unsupported format_version {v}")));
    }
    Ok(())
}

impl Serialize for SimplicialComplex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ComplexFile {
            format_version: FORMAT_VERSION,
            vertex_count: self.vertex_count,
            maximal_simplices: self.maximal_simplices(),
            skeleton: self.skeleton,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SimplicialComplex {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let file = ComplexFile::deserialize(deserializer)?;
        check_version(file.format_version).map_err(D::Error::custom)?;
        SimplicialComplex::from_simplices(file.vertex_count, file.maximal_simplices)
            .map(|c| c.with_skeleton(file.skeleton))
            .map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct FiltrationFile {
    #[serde(default = "default_format_version")]
    format_version: u32,
    vertex_count: usize,
    maximal_simplices: Vec<Simplex>,
    /// Each entry is the simplex's vertices followed by its birth scale.
    births: Vec<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scales: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    skeleton: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    flavor: Option<Flavor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ambient_dim: Option<usize>,
}

impl Serialize for Filtration {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let births = self
            .ordered()
            .into_iter()
            .map(|(s, b)| {
                let mut row: Vec<Value> = s.vertices().iter().map(|&v| Value::from(v)).collect();
                row.push(Value::from(b));
                row
            })
            .collect();
        FiltrationFile {
            format_version: FORMAT_VERSION,
            vertex_count: self.complex.vertex_count,
            maximal_simplices: self.complex.maximal_simplices(),
            births,
            scales: Some(self.scales.clone()),
            skeleton: self.complex.skeleton,
            flavor: self.flavor,
            ambient_dim: self.ambient_dim,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Filtration {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let file = FiltrationFile::deserialize(deserializer)?;
        parse_filtration(file).map_err(D::Error::custom)
    }
}

fn parse_filtration(file: FiltrationFile) -> Result<Filtration> {
    check_version(file.format_version)?;
    let complex =
        SimplicialComplex::from_simplices(file.vertex_count, file.maximal_simplices)?.with_skeleton(file.skeleton);
    let mut births = BTreeMap::new();
    for row in file.births {
        let (scale, vertices) =
            row.split_last().ok_or_else(|| Error::Schema("empty birth entry".into()))?;
        let scale = scale.as_f64().ok_or_else(|| Error::Schema("birth scale must be a number".into()))?;
        let vertices = vertices
            .iter()
            .map(|v| v.as_u64().map(|x| x as usize).ok_or_else(|| Error::Schema("vertex must be an integer".into())))
            .collect::<Result<Vec<_>>>()?;
        let s = Simplex::new(vertices)?;
        if births.insert(s.clone(), scale).is_some() {
            return Err(Error::Schema(format!("duplicate birth for {s:?}")));
        }
    }
    let scales = match file.scales {
        Some(s) => s,
        None => {
            let mut s: Vec<f64> = births.values().copied().collect();
            s.sort_by(f64::total_cmp);
            s.dedup();
            s
        }
    };
    Ok(Filtration::new(complex, births, scales)?.with_origin(file.flavor, file.ambient_dim))
}
