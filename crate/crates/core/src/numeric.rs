//! Small numerical helpers shared by the fitting and block routines.

/// Line `y = intercept + slope · x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub intercept: f64,
    pub slope: f64,
}

impl Line {
    pub fn at(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }

    /// Largest `y - line(x)` over the points (negative when every point lies strictly below).
    pub fn max_excess(&self, xs: &[f64], ys: &[f64]) -> f64 {
        xs.iter().zip(ys).map(|(&x, &y)| y - self.at(x)).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Ordinary least squares; `None` when fewer than two points or all `x` coincide.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<Line> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some(Line { intercept: my - slope * mx, slope })
}

/// Indices of the vertices of the upper concave hull of points sorted by increasing `x`.
pub fn upper_hull(xs: &[f64], ys: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..xs.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// `⌈x⌉`, treating values within `1e-9·max(1, |x|)` of an integer as that integer so that
/// exact powers such as `32^{3/2}·2^{-3/2} = 64` do not round up through representation error.
pub fn snap_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// `ln Σ exp(v_i)`, stable for large magnitudes; `-inf` for an empty slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + values.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 0.5 * x).collect();
        let l = least_squares(&xs, &ys).unwrap();
        assert!((l.slope + 0.5).abs() < 1e-15 && (l.intercept - 2.0).abs() < 1e-15);
        assert!(least_squares(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }

    #[test]
    fn hull_skips_interior_points() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [0.0, -1.0, 1.0, 0.0];
        assert_eq!(upper_hull(&xs, &ys), vec![0, 2, 3]);
    }

    #[test]
    fn snap_ceil_absorbs_representation_error() {
        assert_eq!(snap_ceil(64.00000000000001), 64.0);
        assert_eq!(snap_ceil(63.5), 64.0);
        assert_eq!(snap_ceil(2.0), 2.0);
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Pairwise (cascade) summation, deterministic for a fixed input order.
pub fn pairwise_sum<T>(values: &[T]) -> T
where
    T: Copy + Default + std::ops::Add<Output = T>,
{
    match values.len() {
        0 => T::default(),
        1 => values[0],
        len if len <= 16 => values.iter().fold(T::default(), |a, &b| a + b),
        len => pairwise_sum(&values[..len / 2]) + pairwise_sum(&values[len / 2..]),
    }
}

#[cfg(test)]
mod quadrature_tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 24] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }
}
