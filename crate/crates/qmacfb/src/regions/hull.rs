//! 2-D convex hull utilities for rate-region boundaries.

/// Monotone-chain convex hull, counterclockwise, duplicates removed.
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 1e-12
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 1e-12
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Upper-right boundary of the hull of `points` together with the origin
/// and the axis extremes, sorted by the first coordinate ascending.
pub fn upper_right_boundary(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let xmax = points.iter().map(|p| p.0).fold(0.0, f64::max);
    let ymax = points.iter().map(|p| p.1).fold(0.0, f64::max);
    let mut cloud = points.to_vec();
    cloud.push((0.0, 0.0));
    cloud.push((xmax, 0.0));
    cloud.push((0.0, ymax));
    let hull = convex_hull(&cloud);
    if hull.len() <= 2 {
        // degenerate region; report the extreme corner(s)
        let mut v: Vec<(f64, f64)> = hull
            .into_iter()
            .filter(|&(x, y)| x > 1e-12 || y > 1e-12)
            .collect();
        if v.is_empty() {
            v.push((0.0, 0.0));
        }
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return v;
    }
    let near = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12;
    let start = hull.iter().position(|&p| near(p, (xmax, 0.0))).unwrap();
    // walk counterclockwise from (xmax, 0) up to (0, ymax)
    let mut boundary = Vec::new();
    let mut i = start;
    loop {
        boundary.push(hull[i]);
        if near(hull[i], (0.0, ymax)) {
            break;
        }
        i = (i + 1) % hull.len();
        if i == start {
            break;
        }
    }
    boundary.reverse();
    // drop the synthetic axis endpoints when they merely close the region
    boundary
}
