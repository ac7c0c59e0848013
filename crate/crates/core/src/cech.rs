//! Ball-intersection tests for Čech complexes.
//!
//! Euclidean balls of a common radius intersect iff the minimum enclosing
//! ball of their centers has radius at most that common radius, so the
//! Euclidean case is decided by [`min_enclosing_ball`]. General Minkowski
//! balls `{y : F(y - p) <= eps}` are decided by [`minimax_radius`], which
//! computes `min_y max_i F(y - p_i)`.

use crate::metric::{eval_norm, norm_gradient, norm_hessian, MetricSpec};

const MAX_ITERATIONS: usize = 10_000;
const MOVE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    fn contains(&self, p: &[f64]) -> bool {
        let d2: f64 = self.center.iter().zip(p).map(|(c, x)| (c - x) * (c - x)).sum();
        let r2 = self.radius * self.radius;
        d2 <= r2 + 1e-12 * r2.max(1e-300)
    }
}

/// Smallest Euclidean ball containing `points` (Welzl's recursion).
pub fn min_enclosing_ball(points: &[&[f64]]) -> Ball {
    assert!(!points.is_empty(), "min_enclosing_ball needs at least one point");
    let dim = points[0].len();
    let mut boundary = Vec::with_capacity(dim + 1);
    welzl(points, &mut boundary, dim)
}

fn welzl<'a>(points: &[&'a [f64]], boundary: &mut Vec<&'a [f64]>, dim: usize) -> Ball {
    if points.is_empty() || boundary.len() == dim + 1 {
        return boundary_ball(boundary, dim);
    }
    let (last, rest) = points.split_last().expect("nonempty");
    let ball = welzl(rest, boundary, dim);
    if ball.contains(last) {
        return ball;
    }
    boundary.push(last);
    let ball = welzl(rest, boundary, dim);
    boundary.pop();
    ball
}

/// Smallest ball with every point of `boundary` on its sphere, centered in
/// their affine hull.
fn boundary_ball(boundary: &[&[f64]], dim: usize) -> Ball {
    match boundary.len() {
        0 => Ball { center: vec![0.0; dim], radius: 0.0 },
        1 => Ball { center: boundary[0].to_vec(), radius: 0.0 },
        _ => circumball(boundary).unwrap_or_else(|| degenerate_ball(boundary, dim)),
    }
}

fn circumball(boundary: &[&[f64]]) -> Option<Ball> {
    let origin = boundary[0];
    let k = boundary.len() - 1;
    let edges: Vec<Vec<f64>> =
        boundary[1..].iter().map(|p| p.iter().zip(origin).map(|(a, b)| a - b).collect()).collect();
    let mut gram = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            gram[i][j] = 2.0 * dot(&edges[i], &edges[j]);
        }
        gram[i][k] = dot(&edges[i], &edges[i]);
    }
    let lambda = solve_augmented(gram)?;
    let mut center = origin.to_vec();
    for (l, e) in lambda.iter().zip(&edges) {
        for (c, x) in center.iter_mut().zip(e) {
            *c += l * x;
        }
    }
    let radius = boundary.iter().map(|p| dist(&center, p)).fold(0.0, f64::max);
    Some(Ball { center, radius })
}

// Affinely dependent boundary sets only arise from rounding; fall back to the
// smallest sub-boundary ball that still covers every point.
fn degenerate_ball(boundary: &[&[f64]], dim: usize) -> Ball {
    let mut best: Option<Ball> = None;
    for skip in 0..boundary.len() {
        let rest: Vec<&[f64]> =
            boundary.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, p)| *p).collect();
        let ball = boundary_ball(&rest, dim);
        if boundary.iter().all(|p| ball.contains(p)) && best.as_ref().is_none_or(|b| ball.radius < b.radius) {
            best = Some(ball);
        }
    }
    best.unwrap_or_else(|| {
        let center = boundary[0].to_vec();
        let radius = boundary.iter().map(|p| dist(&center, p)).fold(0.0, f64::max);
        Ball { center, radius }
    })
}

fn solve_augmented(mut m: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = m.len();
    let scale = m.iter().flat_map(|r| r[..n].iter()).fold(0.0f64, |a, x| a.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        m.swap(col, pivot);
        for row in 0..n {
            if row != col {
                let f = m[row][col] / m[col][col];
                for c in col..=n {
                    m[row][c] -= f * m[col][c];
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Result of the convex minimax problem `min_y max_i F(y - p_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Minimax {
    pub center: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Minimizes the log-sum-exp smoothing of `max_i F(y - p_i)` over a
/// decreasing temperature schedule (damped Newton steps at each
/// temperature), then polishes with subgradient steps. The returned value is
/// the exact max at the returned center, so it is an upper bound on the true
/// optimum.
pub fn minimax_radius(metric: &MetricSpec, points: &[&[f64]]) -> Minimax {
    assert!(!points.is_empty(), "minimax_radius needs at least one point");
    let dim = points[0].len();
    let count = points.len() as f64;
    let objective = |y: &[f64]| max_norm(metric, points, y);

    let mut y: Vec<f64> = (0..dim).map(|d| points.iter().map(|p| p[d]).sum::<f64>() / count).collect();
    if points.len() == 1 {
        return Minimax { value: objective(&y), center: y, iterations: 0 };
    }
    let spread = objective(&y).max(f64::MIN_POSITIVE);
    let mut best = (objective(&y), y.clone());
    let mut iterations = 0;
    let mut temperature = spread;

    while temperature > spread * 1e-14 && iterations < MAX_ITERATIONS {
        for _ in 0..60 {
            if iterations >= MAX_ITERATIONS {
                break;
            }
            iterations += 1;
            let (value, grad, hess) = smoothed(metric, points, &y, temperature);
            let mut direction = newton_direction(hess, &grad).unwrap_or_else(|| grad.iter().map(|g| -g).collect());
            let mut slope = dot(&grad, &direction);
            if slope >= 0.0 || slope.is_nan() {
                direction = grad.iter().map(|g| -g).collect();
                slope = -dot(&grad, &grad);
            }
            if slope == 0.0 {
                break;
            }
            let mut step = 1.0;
            let mut accepted = None;
            while step > 1e-20 {
                let trial: Vec<f64> = y.iter().zip(&direction).map(|(a, d)| a + step * d).collect();
                let (trial_value, _, _) = smoothed_value(metric, points, &trial, temperature);
                if trial_value <= value + 1e-4 * step * slope {
                    accepted = Some(trial);
                    break;
                }
                step *= 0.5;
            }
            let Some(trial) = accepted else { break };
            let moved = dist(&trial, &y);
            y = trial;
            if moved < MOVE_TOL * spread {
                break;
            }
        }
        let current = objective(&y);
        if current < best.0 {
            best = (current, y.clone());
        }
        temperature *= 0.2;
    }

    // subgradient polish with a diminishing step
    let mut polish_step = best.0 * 1e-9;
    for _ in 0..100 {
        if iterations >= MAX_ITERATIONS || polish_step < MOVE_TOL * spread {
            break;
        }
        iterations += 1;
        let center = &best.1;
        let (worst, _) = points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, norm_at(metric, p, center)))
            .fold((0, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
        let diff: Vec<f64> = center.iter().zip(points[worst]).map(|(a, b)| a - b).collect();
        let g = norm_gradient(metric, &diff);
        let gn = dot(&g, &g).sqrt();
        if gn == 0.0 {
            break;
        }
        let trial: Vec<f64> = center.iter().zip(&g).map(|(a, gi)| a - polish_step * gi / gn).collect();
        let v = objective(&trial);
        if v < best.0 {
            best = (v, trial);
        } else {
            polish_step *= 0.5;
        }
    }

    Minimax { value: best.0, center: best.1, iterations }
}

fn newton_direction(mut hess: Vec<Vec<f64>>, grad: &[f64]) -> Option<Vec<f64>> {
    let n = grad.len();
    let trace: f64 = (0..n).map(|i| hess[i][i].abs()).sum();
    let ridge = 1e-12 * trace.max(f64::MIN_POSITIVE);
    for (i, row) in hess.iter_mut().enumerate() {
        row[i] += ridge;
        row.push(-grad[i]);
    }
    solve_augmented(hess)
}

fn norm_at(metric: &MetricSpec, p: &[f64], y: &[f64]) -> f64 {
    let v: Vec<f64> = y.iter().zip(p).map(|(a, b)| a - b).collect();
    eval_norm(metric, p, &v).expect("minkowski metric with matching dimensions")
}

fn max_norm(metric: &MetricSpec, points: &[&[f64]], y: &[f64]) -> f64 {
    points.iter().map(|p| norm_at(metric, p, y)).fold(0.0, f64::max)
}

/// Log-sum-exp value plus the softmax weights, per-point values and gradients.
fn smoothed_value(metric: &MetricSpec, points: &[&[f64]], y: &[f64], t: f64) -> (f64, Vec<f64>, Vec<Vec<f64>>) {
    let diffs: Vec<Vec<f64>> = points.iter().map(|p| y.iter().zip(*p).map(|(a, b)| a - b).collect()).collect();
    let values: Vec<f64> = points.iter().zip(&diffs).map(|(p, d)| eval_norm(metric, p, d).expect("minkowski")).collect();
    let m = values.iter().copied().fold(f64::MIN, f64::max);
    let mut weights: Vec<f64> = values.iter().map(|v| ((v - m) / t).exp()).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    (m + t * total.ln(), weights, diffs)
}

/// Value, gradient and Hessian of the log-sum-exp smoothing at temperature `t`.
fn smoothed(metric: &MetricSpec, points: &[&[f64]], y: &[f64], t: f64) -> (f64, Vec<f64>, Vec<Vec<f64>>) {
    let n = y.len();
    let (value, weights, diffs) = smoothed_value(metric, points, y, t);
    let mut grad = vec![0.0; n];
    let mut hess = vec![vec![0.0; n]; n];
    let mut outer = vec![vec![0.0; n]; n];
    for (w, diff) in weights.iter().zip(&diffs) {
        if *w == 0.0 {
            continue;
        }
        let g = norm_gradient(metric, diff);
        for i in 0..n {
            grad[i] += w * g[i];
            for j in 0..n {
                outer[i][j] += w * g[i] * g[j];
            }
        }
        if let Some(h) = norm_hessian(metric, diff) {
            for i in 0..n {
                for j in 0..n {
                    hess[i][j] += w * h[i][j];
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            hess[i][j] += (outer[i][j] - grad[i] * grad[j]) / t;
        }
    }
    (value, grad, hess)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MetricKind;

    fn refs(points: &[Vec<f64>]) -> Vec<&[f64]> {
        points.iter().map(Vec::as_slice).collect()
    }

    #[test]
    fn equilateral_circumradius() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]];
        let ball = min_enclosing_ball(&refs(&pts));
        assert!((ball.radius - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn obtuse_triangle_uses_longest_side() {
        let pts = vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 0.5]];
        let ball = min_enclosing_ball(&refs(&pts));
        assert!((ball.radius - 2.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_points() {
        let pts = vec![vec![0.0], vec![1.0], vec![2.0]];
        let ball = min_enclosing_ball(&refs(&pts));
        assert!((ball.radius - 1.0).abs() < 1e-12);
    }

    #[test]
    fn regular_tetrahedron() {
        let pts = vec![
            vec![1.0, 1.0, 1.0],
            vec![1.0, -1.0, -1.0],
            vec![-1.0, 1.0, -1.0],
            vec![-1.0, -1.0, 1.0],
        ];
        let ball = min_enclosing_ball(&refs(&pts));
        assert!((ball.radius - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn minimax_matches_circumradius() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]];
        let mm = minimax_radius(&MetricSpec::euclidean(), &refs(&pts));
        assert!((mm.value - 1.0 / 3f64.sqrt()).abs() < 1e-9, "{mm:?}");
        assert!(mm.iterations <= MAX_ITERATIONS);
    }

    #[test]
    fn minimax_randers_pair() {
        // With F(v) = |v| + b.v and b = (0.5, 0), points 0 and 1 on the axis:
        // y in between gives max(1.5 y, 0.5 (1 - y)), minimized at y = 0.25.
        let m = MetricSpec::new(MetricKind::Randers { b: vec![0.5, 0.0] }).unwrap();
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        let mm = minimax_radius(&m, &refs(&pts));
        assert!((mm.value - 0.375).abs() < 1e-9, "{mm:?}");
    }
}
