//! Least-squares line fits, peak picking, and upper convex hulls used by the
//! growth-law measurements.

/// Least-squares line `y ~ a + b x` with its coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub r2: f64,
}

/// Fits a line through `(x, y)` pairs. With all-equal `y` the fit is exact
/// and `r2` is reported as 1.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    assert!(xs.len() >= 2, "need at least two points");
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let mut sse = 0.0;
    let mut sst = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let e = y - (intercept + slope * x);
        sse += e * e;
        sst += (y - my) * (y - my);
    }
    let r2 = if sst > 0.0 { 1.0 - sse / sst } else { 1.0 };
    LineFit {
        intercept,
        slope,
        r2,
    }
}

/// Indices of strict local maxima of `v`.
pub fn local_maxima(v: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 1..v.len().saturating_sub(1) {
        if v[i] > v[i - 1] && v[i] > v[i + 1] {
            out.push(i);
        }
    }
    out
}

/// Upper convex hull of points sorted by `x` (Andrew monotone chain).
/// Returns the hull vertices in increasing `x`.
pub fn upper_convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // keep b only if it lies strictly above segment a->p
            if (b.0 - a.0) * (p.1 - a.1) - (p.0 - a.0) * (b.1 - a.1) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_recovered() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.3).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.5).collect();
        let f = fit_line(&xs, &ys);
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept + 1.5).abs() < 1e-12);
        assert!(f.r2 > 1.0 - 1e-12);
    }

    #[test]
    fn constant_data_has_zero_slope() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [5.0; 4];
        let f = fit_line(&xs, &ys);
        assert_eq!(f.slope, 0.0);
        assert_eq!(f.r2, 1.0);
    }

    #[test]
    fn hull_is_concave_and_covers_extremes() {
        let pts = [
            (0.0, 0.0),
            (1.0, 2.0),
            (2.0, 1.0),
            (3.0, 3.0),
            (4.0, 0.5),
        ];
        let hull = upper_convex_hull(&pts);
        assert_eq!(hull.first().unwrap().0, 0.0);
        assert_eq!(hull.last().unwrap().0, 4.0);
        // every point lies on or below the hull's piecewise line
        for w in hull.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            for &(x, y) in &pts {
                if x >= x0 && x <= x1 {
                    let t = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
                    let yl = y0 + t * (y1 - y0);
                    assert!(y <= yl + 1e-12);
                }
            }
        }
    }

    #[test]
    fn maxima_found() {
        let v = [0.0, 1.0, 0.5, 2.0, 1.0, 3.0, 0.0];
        assert_eq!(local_maxima(&v), vec![1, 3, 5]);
    }
}
