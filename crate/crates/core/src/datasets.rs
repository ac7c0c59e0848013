//! Reference triangulations with known homology and point-cloud generators.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{close_under_faces, SimplicialComplex};
use crate::error::{Error, Result};
use crate::homology::HomologyGroup;
use crate::metric::{MetricKind, MetricSpec, PointCloud};

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceComplex {
    pub name: &'static str,
    pub complex: SimplicialComplex,
    pub expected: BTreeMap<usize, HomologyGroup>,
}

/// Six-vertex real projective plane: the antipodal quotient of the icosahedron boundary.
const RP2_FACETS: [[usize; 3]; 10] = [
    [0, 1, 2],
    [0, 2, 3],
    [0, 3, 4],
    [0, 4, 5],
    [0, 1, 5],
    [1, 2, 4],
    [2, 3, 5],
    [1, 3, 4],
    [2, 4, 5],
    [1, 3, 5],
];

pub fn rp2_triangulation() -> ReferenceComplex {
    let facets: Vec<Vec<usize>> = RP2_FACETS.iter().map(|f| f.to_vec()).collect();
    ReferenceComplex {
        name: "rp2-triangulation",
        complex: close_under_faces(&facets).expect("valid facets"),
        expected: [(0, HomologyGroup::free(1)), (1, HomologyGroup::new(0, &[2])), (2, HomologyGroup::free(0))]
            .into_iter()
            .collect(),
    }
}

/// Nine-vertex Klein bottle from a 3x3 grid on the unit square with
/// `(x, 0) ~ (x, 1)` and `(0, y) ~ (1, 1 - y)`.
pub fn klein_triangulation() -> ReferenceComplex {
    let label = |i: usize, j: usize| -> usize {
        let (i, j) = if i == 3 { (0, 3 - j) } else { (i, j) };
        i * 3 + j % 3
    };
    let mut facets = Vec::with_capacity(18);
    for i in 0..3 {
        for j in 0..3 {
            let (a, b, c, d) = (label(i, j), label(i + 1, j), label(i, j + 1), label(i + 1, j + 1));
            facets.push(vec![a, b, d]);
            facets.push(vec![a, c, d]);
        }
    }
    ReferenceComplex {
        name: "klein-triangulation",
        complex: close_under_faces(&facets).expect("valid facets"),
        expected: [(0, HomologyGroup::free(1)), (1, HomologyGroup::new(1, &[2])), (2, HomologyGroup::free(0))]
            .into_iter()
            .collect(),
    }
}

/// The reference complexes plus a few small surfaces used as a test corpus.
pub fn corpus() -> Vec<ReferenceComplex> {
    let hollow = close_under_faces(&[vec![0, 1], vec![0, 2], vec![1, 2]]).expect("valid");
    let sphere = close_under_faces(&[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]).expect("valid");
    vec![
        rp2_triangulation(),
        klein_triangulation(),
        ReferenceComplex {
            name: "hollow-triangle",
            complex: hollow,
            expected: [(0, HomologyGroup::free(1)), (1, HomologyGroup::free(1))].into_iter().collect(),
        },
        ReferenceComplex {
            name: "tetrahedron-boundary",
            complex: sphere,
            expected: [(0, HomologyGroup::free(1)), (1, HomologyGroup::free(0)), (2, HomologyGroup::free(1))]
                .into_iter()
                .collect(),
        },
        torus_triangulation(),
    ]
}

/// Seven-vertex (Möbius) torus.
pub fn torus_triangulation() -> ReferenceComplex {
    let mut facets = Vec::new();
    for i in 0..7 {
        facets.push(vec![i, (i + 1) % 7, (i + 3) % 7]);
        facets.push(vec![i, (i + 2) % 7, (i + 3) % 7]);
    }
    ReferenceComplex {
        name: "torus-triangulation",
        complex: close_under_faces(&facets).expect("valid facets"),
        expected: [(0, HomologyGroup::free(1)), (1, HomologyGroup::free(2)), (2, HomologyGroup::free(1))]
            .into_iter()
            .collect(),
    }
}

/// `count` evenly spaced points on a circle, stored as angles, with the geodesic metric.
pub fn circle_sample(count: usize, circumference: f64) -> Result<PointCloud> {
    if count < 3 {
        return Err(Error::InvalidParameter(format!("circle sample needs at least 3 points, got {count}")));
    }
    let metric = MetricSpec::new(MetricKind::CircleGeodesic { circumference })?;
    let points = (0..count).map(|k| vec![2.0 * PI * k as f64 / count as f64]).collect();
    PointCloud::new(points, metric)
}

/// Grid on the projective plane: the base semicircle in the `xy` plane and
/// the `N = ceil(pi / delta)` meridian semicircles over `z >= 0` through its
/// sample points, each sampled at angles `pi j / N`. Points identified under
/// the antipodal map are merged.
pub fn rp2_dense_sample(delta: f64) -> Result<PointCloud> {
    if !(delta > 0.0 && delta < PI) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, pi), got {delta}")));
    }
    let n = (PI / delta).ceil() as usize;
    let step = PI / n as f64;
    let mut points = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        let t = step * j as f64;
        points.push(vec![t.cos(), t.sin(), 0.0]);
    }
    for k in 0..n {
        let theta = step * k as f64;
        let base = [theta.cos(), theta.sin()];
        for j in 0..=n {
            let phi = step * j as f64;
            points.push(vec![phi.cos() * base[0], phi.cos() * base[1], phi.sin()]);
        }
    }
    Ok(PointCloud::new(points, MetricSpec::new(MetricKind::Rp2Quotient)?)?.dedup_identified())
}

/// Largest distance from `probes` random points of the projective plane to
/// the sample, a Monte-Carlo estimate of the covering radius.
pub fn rp2_probe_covering_radius(sample: &PointCloud, probes: usize, seed: u64) -> Result<f64> {
    if !matches!(sample.metric().kind(), MetricKind::Rp2Quotient) {
        return Err(Error::InvalidParameter("probe expects an rp2_quotient cloud".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let probe = loop {
            let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r2: f64 = v.iter().map(|x| x * x).sum();
            if r2 > 1e-6 && r2 <= 1.0 {
                break v;
            }
        };
        let mut points = sample.points().to_vec();
        points.push(probe);
        let cloud = PointCloud::new(points, sample.metric().clone())?;
        let last = cloud.len() - 1;
        let nearest = (0..last).map(|i| cloud.distance(last, i)).collect::<Result<Vec<_>>>()?;
        worst = worst.max(nearest.into_iter().fold(f64::INFINITY, f64::min));
    }
    Ok(worst)
}

/// `grid x grid` lattice on the closed unit square with the Klein bottle
/// quotient metric; identified boundary points are merged.
pub fn klein_sample(grid: usize) -> Result<PointCloud> {
    if grid < 2 {
        return Err(Error::InvalidParameter(format!("grid must be at least 2, got {grid}")));
    }
    let h = 1.0 / (grid - 1) as f64;
    let points =
        (0..grid).flat_map(|i| (0..grid).map(move |j| vec![i as f64 * h, j as f64 * h])).collect();
    Ok(PointCloud::new(points, MetricSpec::new(MetricKind::KleinQuotient)?)?.dedup_identified())
}

/// Uniform random points in the unit cube.
pub fn random_cloud(count: usize, dim: usize, seed: u64, metric: MetricSpec) -> Result<PointCloud> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..count).map(|_| (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
    PointCloud::new(points, metric)
}
