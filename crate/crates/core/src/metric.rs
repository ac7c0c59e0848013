//! Metric specifications and distance evaluation.
//!
//! Coordinate metrics (`euclidean`, `lq`, `randers`) are Minkowski norms: the
//! distance from `p` to `y` is `F(y - p)`, which need not be symmetric. The
//! quotient metrics (`circle_geodesic`, `rp2_quotient`, `klein_quotient`) are
//! computed by minimizing over the identification orbit, and `distance_table`
//! carries arbitrary, possibly asymmetric, pairwise values.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

const HOMOGENEITY_FACTORS: [f64; 3] = [0.5, 2.0, 7.0];
const AXIOM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricKind {
    Euclidean,
    Lq { q: f64 },
    Randers { b: Vec<f64> },
    CircleGeodesic { circumference: f64 },
    Rp2Quotient,
    KleinQuotient,
    DistanceTable { table: Vec<Vec<f64>> },
}

impl MetricKind {
    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::Euclidean => "euclidean",
            MetricKind::Lq { .. } => "lq",
            MetricKind::Randers { .. } => "randers",
            MetricKind::CircleGeodesic { .. } => "circle_geodesic",
            MetricKind::Rp2Quotient => "rp2_quotient",
            MetricKind::KleinQuotient => "klein_quotient",
            MetricKind::DistanceTable { .. } => "distance_table",
        }
    }
}

/// A validated [`MetricKind`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MetricKind", into = "MetricKind")]
pub struct MetricSpec(MetricKind);

impl TryFrom<MetricKind> for MetricSpec {
    type Error = Error;

    fn try_from(kind: MetricKind) -> Result<Self> {
        MetricSpec::new(kind)
    }
}

impl From<MetricSpec> for MetricKind {
    fn from(spec: MetricSpec) -> Self {
        spec.0
    }
}

impl MetricSpec {
    pub fn new(kind: MetricKind) -> Result<Self> {
        match &kind {
            MetricKind::Lq { q } => {
                if q.is_nan() || *q < 1.0 {
                    return Err(Error::InvalidMetric(format!("lq exponent must be >= 1, got {q}")));
                }
            }
            MetricKind::Randers { b } => {
                if b.is_empty() || b.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidMetric("randers drift must be a finite, nonempty vector".into()));
                }
                let norm = euclidean_norm(b);
                if norm >= 1.0 {
                    return Err(Error::InvalidMetric(format!(
                        "randers drift norm must be < 1, got {norm}"
                    )));
                }
            }
            MetricKind::CircleGeodesic { circumference } => {
                if !(circumference.is_finite() && *circumference > 0.0) {
                    return Err(Error::InvalidMetric(format!(
                        "circumference must be positive, got {circumference}"
                    )));
                }
            }
            MetricKind::DistanceTable { table } => {
                let n = table.len();
                for (i, row) in table.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::InvalidMetric(format!(
                            "distance table row {i} has {} entries, expected {n}",
                            row.len()
                        )));
                    }
                    if row[i] != 0.0 {
                        return Err(Error::InvalidMetric(format!("distance table diagonal entry {i} is nonzero")));
                    }
                    if row.iter().any(|d| d.is_nan() || *d < 0.0) {
                        return Err(Error::InvalidMetric(format!("distance table row {i} has a negative entry")));
                    }
                }
            }
            MetricKind::Euclidean | MetricKind::Rp2Quotient | MetricKind::KleinQuotient => {}
        }
        Ok(MetricSpec(kind))
    }

    pub fn euclidean() -> Self {
        MetricSpec(MetricKind::Euclidean)
    }

    pub fn randers(b: Vec<f64>) -> Result<Self> {
        Self::new(MetricKind::Randers { b })
    }

    pub fn kind(&self) -> &MetricKind {
        &self.0
    }

    /// Translation-invariant norm kinds, whose balls are convex subsets of the ambient space.
    pub fn is_minkowski(&self) -> bool {
        matches!(self.0, MetricKind::Euclidean | MetricKind::Lq { .. } | MetricKind::Randers { .. })
    }

    /// Symmetric kinds satisfy `d(i, j) == d(j, i)`; the table kind is checked entrywise.
    pub fn is_symmetric(&self) -> bool {
        match &self.0 {
            MetricKind::Randers { b } => b.iter().all(|x| *x == 0.0),
            MetricKind::DistanceTable { table } => {
                (0..table.len()).all(|i| (0..i).all(|j| table[i][j] == table[j][i]))
            }
            _ => true,
        }
    }

    /// Ambient dimension forced by the kind, if any.
    fn required_dim(&self) -> Option<usize> {
        match &self.0 {
            MetricKind::Randers { b } => Some(b.len()),
            MetricKind::CircleGeodesic { .. } => Some(1),
            MetricKind::Rp2Quotient => Some(3),
            MetricKind::KleinQuotient => Some(2),
            _ => None,
        }
    }
}

fn euclidean_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Evaluates the Minkowski norm `F_base(v)`.
///
/// The norm kinds here are translation invariant, so `base` only fixes the
/// tangent space dimension.
pub fn eval_norm(metric: &MetricSpec, base: &[f64], v: &[f64]) -> Result<f64> {
    if base.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: base.len(), found: v.len() });
    }
    if let Some(dim) = metric.required_dim() {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
        }
    }
    match metric.kind() {
        MetricKind::Euclidean => Ok(euclidean_norm(v)),
        MetricKind::Lq { q } => Ok(lq_norm(*q, v)),
        MetricKind::Randers { b } => {
            let drift: f64 = b.iter().zip(v).map(|(a, x)| a * x).sum();
            Ok((euclidean_norm(v) + drift).max(0.0))
        }
        other => Err(Error::NoAmbientNorm(other.name())),
    }
}

fn lq_norm(q: f64, v: &[f64]) -> f64 {
    if q.is_infinite() {
        return v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    }
    if q == 1.0 {
        return v.iter().map(|x| x.abs()).sum();
    }
    if q == 2.0 {
        return euclidean_norm(v);
    }
    // scale by the max entry so large q does not overflow
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|x| (x.abs() / scale).powf(q)).sum::<f64>().powf(1.0 / q)
}

/// A (sub)gradient of the norm at `v`, used by the Čech minimax solver.
pub(crate) fn norm_gradient(metric: &MetricSpec, v: &[f64]) -> Vec<f64> {
    let n = euclidean_norm(v);
    match metric.kind() {
        MetricKind::Euclidean => {
            if n == 0.0 {
                vec![0.0; v.len()]
            } else {
                v.iter().map(|x| x / n).collect()
            }
        }
        MetricKind::Lq { q } => {
            let f = lq_norm(*q, v);
            if f == 0.0 {
                return vec![0.0; v.len()];
            }
            if q.is_infinite() {
                let (idx, _) = v
                    .iter()
                    .enumerate()
                    .fold((0, 0.0f64), |(bi, bm), (i, x)| if x.abs() > bm { (i, x.abs()) } else { (bi, bm) });
                let mut g = vec![0.0; v.len()];
                g[idx] = v[idx].signum();
                return g;
            }
            v.iter().map(|x| x.signum() * (x.abs() / f).powf(q - 1.0)).collect()
        }
        MetricKind::Randers { b } => {
            if n == 0.0 {
                b.clone()
            } else {
                v.iter().zip(b).map(|(x, bi)| x / n + bi).collect()
            }
        }
        _ => vec![0.0; v.len()],
    }
}

/// Hessian of the norm at `v != 0`; `None` where it is undefined.
pub(crate) fn norm_hessian(metric: &MetricSpec, v: &[f64]) -> Option<Vec<Vec<f64>>> {
    let n = v.len();
    match metric.kind() {
        // the drift term of a Randers norm is linear
        MetricKind::Euclidean | MetricKind::Randers { .. } => {
            let r = euclidean_norm(v);
            if r == 0.0 {
                return None;
            }
            Some(
                (0..n)
                    .map(|i| (0..n).map(|j| (if i == j { 1.0 } else { 0.0 } - v[i] * v[j] / (r * r)) / r).collect())
                    .collect(),
            )
        }
        MetricKind::Lq { q } if q.is_finite() => {
            let f = lq_norm(*q, v);
            if f == 0.0 || (*q < 2.0 && v.contains(&0.0)) {
                return None;
            }
            let g = norm_gradient(metric, v);
            Some(
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let diag = if i == j { (v[i].abs() / f).powf(q - 2.0) } else { 0.0 };
                                (q - 1.0) / f * (diag - g[i] * g[j])
                            })
                            .collect()
                    })
                    .collect(),
            )
        }
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointCloudFile", into = "PointCloudFile")]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    metric: MetricSpec,
}

#[derive(Serialize, Deserialize)]
struct PointCloudFile {
    #[serde(default = "default_format_version")]
    format_version: u32,
    #[serde(default)]
    points: Vec<Vec<f64>>,
    metric: MetricSpec,
}

fn default_format_version() -> u32 {
    FORMAT_VERSION
}

impl TryFrom<PointCloudFile> for PointCloud {
    type Error = Error;

    fn try_from(file: PointCloudFile) -> Result<Self> {
        if file.format_version != FORMAT_VERSION {
            return Err(Error::Schema(format!("unsupported format_version {}", file.format_version)));
        }
        PointCloud::new(file.points, file.metric)
    }
}

impl From<PointCloud> for PointCloudFile {
    fn from(cloud: PointCloud) -> Self {
        PointCloudFile { format_version: FORMAT_VERSION, points: cloud.points, metric: cloud.metric }
    }
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>, metric: MetricSpec) -> Result<Self> {
        if let MetricKind::DistanceTable { table } = metric.kind() {
            if table.is_empty() {
                return Err(Error::EmptyCloud);
            }
            if !points.is_empty() && points.len() != table.len() {
                return Err(Error::DimensionMismatch { expected: table.len(), found: points.len() });
            }
            return Ok(PointCloud { points, metric });
        }
        let first = points.first().ok_or(Error::EmptyCloud)?;
        let dim = metric.required_dim().unwrap_or(first.len());
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter("point coordinates must be finite".into()));
            }
        }
        if matches!(metric.kind(), MetricKind::Rp2Quotient) && points.iter().any(|p| euclidean_norm(p) == 0.0) {
            return Err(Error::InvalidParameter("rp2_quotient points must be nonzero".into()));
        }
        Ok(PointCloud { points, metric })
    }

    pub fn euclidean(points: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(points, MetricSpec::euclidean())
    }

    pub fn len(&self) -> usize {
        match self.metric.kind() {
            MetricKind::DistanceTable { table } => table.len(),
            _ => self.points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn metric(&self) -> &MetricSpec {
        &self.metric
    }

    /// Ambient coordinate dimension; zero for distance tables.
    pub fn ambient_dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    /// `d(i, j)`, measured from `i`: `F_{p_i}(p_j - p_i)` for norm kinds.
    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.len();
        for index in [i, j] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, len: n });
            }
        }
        if i == j {
            return Ok(0.0);
        }
        let d = match self.metric.kind() {
            MetricKind::DistanceTable { table } => table[i][j],
            MetricKind::CircleGeodesic { circumference } => {
                let turn = (self.points[j][0] - self.points[i][0]).rem_euclid(2.0 * PI) / (2.0 * PI);
                let arc = circumference * turn;
                arc.min(circumference - arc).max(0.0)
            }
            MetricKind::Rp2Quotient => {
                let (x, y) = (&self.points[i], &self.points[j]);
                let cos = x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / (euclidean_norm(x) * euclidean_norm(y));
                cos.abs().min(1.0).acos()
            }
            MetricKind::KleinQuotient => klein_distance(&self.points[i], &self.points[j]),
            _ => {
                let (p, q) = (&self.points[i], &self.points[j]);
                let v: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
                eval_norm(&self.metric, p, &v)?
            }
        };
        Ok(d)
    }

    /// Merges points at distance zero in both directions, keeping first occurrences.
    pub fn dedup_identified(self) -> Self {
        if matches!(self.metric.kind(), MetricKind::DistanceTable { .. }) {
            return self;
        }
        let mut keep: Vec<usize> = Vec::new();
        for i in 0..self.points.len() {
            let duplicate = keep.iter().any(|&j| {
                self.distance(i, j).is_ok_and(|d| d <= 1e-12)
                    && self.distance(j, i).is_ok_and(|d| d <= 1e-12)
            });
            if !duplicate {
                keep.push(i);
            }
        }
        let points = keep.into_iter().map(|i| self.points[i].clone()).collect();
        PointCloud { points, metric: self.metric }
    }
}

/// Flat Klein bottle on the unit square with `(x, 0) ~ (x, 1)` and
/// `(0, y) ~ (1, 1 - y)`. The deck group acts by `(x, y) -> (x + m, (-1)^m y + n)`.
fn klein_distance(p: &[f64], q: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for m in -1i32..=1 {
        let qx = q[0] + f64::from(m);
        let flipped = if m % 2 == 0 { q[1] } else { -q[1] };
        for n in -2i32..=2 {
            let qy = flipped + f64::from(n);
            let d = ((p[0] - qx).powi(2) + (p[1] - qy).powi(2)).sqrt();
            best = best.min(d);
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomViolation {
    pub axiom: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormAxiomReport {
    pub metric: String,
    pub dim: usize,
    pub samples: usize,
    pub violations: Vec<AxiomViolation>,
}

impl NormAxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Sampled check of positivity, homogeneity, midpoint convexity of the unit
/// ball and the triangle inequality.
pub fn check_norm_axioms(metric: &MetricSpec, dim: usize, sample_count: usize, seed: u64) -> Result<NormAxiomReport> {
    if !metric.is_minkowski() {
        return Err(Error::NoAmbientNorm(metric.kind().name()));
    }
    let dim = metric.required_dim().unwrap_or(dim);
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let mut violations = Vec::new();
    let mut flag = |axiom: &str, detail: String| violations.push(AxiomViolation { axiom: axiom.into(), detail });

    for _ in 0..sample_count {
        let base = sample(&mut rng);
        let u = sample(&mut rng);
        let v = sample(&mut rng);
        let fu = eval_norm(metric, &base, &u)?;
        let fv = eval_norm(metric, &base, &v)?;

        if u.iter().any(|x| *x != 0.0) && fu <= 0.0 {
            flag("positivity", format!("F({u:?}) = {fu}"));
        }
        for lambda in HOMOGENEITY_FACTORS {
            let scaled: Vec<f64> = u.iter().map(|x| lambda * x).collect();
            let f = eval_norm(metric, &base, &scaled)?;
            if (f - lambda * fu).abs() > AXIOM_TOL * lambda * fu {
                flag("homogeneity", format!("F({lambda} v) = {f}, {lambda} F(v) = {}", lambda * fu));
            }
        }
        if fu > 0.0 && fv > 0.0 {
            let mid: Vec<f64> = u.iter().zip(&v).map(|(a, b)| 0.5 * (a / fu + b / fv)).collect();
            let fm = eval_norm(metric, &base, &mid)?;
            if fm > 1.0 + AXIOM_TOL {
                flag("convexity", format!("midpoint of unit vectors has norm {fm}"));
            }
        }
        let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let fs = eval_norm(metric, &base, &sum)?;
        if fs > fu + fv + AXIOM_TOL {
            flag("triangle", format!("F(u+v) = {fs} > F(u) + F(v) = {}", fu + fv));
        }
    }
    let zero = vec![0.0; dim];
    let f0 = eval_norm(metric, &zero, &zero)?;
    if f0 != 0.0 {
        flag("positivity", format!("F(0) = {f0}"));
    }
    Ok(NormAxiomReport { metric: metric.kind().name().into(), dim, samples: sample_count, violations })
}
