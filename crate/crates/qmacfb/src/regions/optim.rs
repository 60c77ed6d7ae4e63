//! Nelder–Mead simplex maximization on a box-clamped domain.
//! Standard coefficients: reflection 1, expansion 2, contraction 1/2,
//! shrink 1/2, at most 200 iterations, simplex-diameter stop 1e-6.

pub const MAX_ITERS: usize = 200;
pub const DIAMETER_STOP: f64 = 1e-6;

fn clamp(point: &mut [f64], lo: &[f64], hi: &[f64]) {
    for (i, p) in point.iter_mut().enumerate() {
        *p = p.clamp(lo[i], hi[i]);
    }
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let mut d = 0.0_f64;
    for i in 0..simplex.len() {
        for j in i + 1..simplex.len() {
            let dist: f64 = simplex[i]
                .iter()
                .zip(&simplex[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            d = d.max(dist);
        }
    }
    d
}

/// Maximize `f` starting from `start`, returning the best point found.
pub fn maximize<F: Fn(&[f64]) -> f64>(
    f: F,
    start: &[f64],
    lo: &[f64],
    hi: &[f64],
) -> (Vec<f64>, f64) {
    let m = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    simplex.push(start.to_vec());
    for i in 0..m {
        let mut v = start.to_vec();
        let step = 0.05 * (hi[i] - lo[i]).max(1e-3);
        v[i] = if v[i] + step <= hi[i] { v[i] + step } else { v[i] - step };
        clamp(&mut v, lo, hi);
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();

    for _ in 0..MAX_ITERS {
        let mut order: Vec<usize> = (0..=m).collect();
        order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap());
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        if diameter(&simplex) < DIAMETER_STOP {
            break;
        }

        // centroid of all but the worst vertex
        let mut centroid = vec![0.0; m];
        for p in &simplex[..m] {
            for i in 0..m {
                centroid[i] += p[i] / m as f64;
            }
        }
        let worst = simplex[m].clone();
        let blend = |t: f64| -> Vec<f64> {
            let mut v: Vec<f64> = (0..m)
                .map(|i| centroid[i] + t * (centroid[i] - worst[i]))
                .collect();
            clamp(&mut v, lo, hi);
            v
        };

        let reflected = blend(1.0);
        let fr = f(&reflected);
        if fr > values[0] {
            let expanded = blend(2.0);
            let fe = f(&expanded);
            if fe > fr {
                simplex[m] = expanded;
                values[m] = fe;
            } else {
                simplex[m] = reflected;
                values[m] = fr;
            }
            continue;
        }
        if fr > values[m - 1] {
            simplex[m] = reflected;
            values[m] = fr;
            continue;
        }
        let contracted = blend(-0.5);
        let fc = f(&contracted);
        if fc > values[m] {
            simplex[m] = contracted;
            values[m] = fc;
            continue;
        }
        #[allow(clippy::needless_range_loop)]
        for i in 1..=m {
            for j in 0..m {
                simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
            }
            values[i] = f(&simplex[i]);
        }
    }

    let best = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    (simplex[best].clone(), values[best])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_peak_inside_box() {
        let f = |p: &[f64]| -((p[0] - 0.3).powi(2) + (p[1] - 0.2).powi(2));
        let (x, v) = maximize(f, &[0.45, 0.45], &[0.0, 0.0], &[0.5, 0.5]);
        assert!((x[0] - 0.3).abs() < 1e-4, "{x:?}");
        assert!((x[1] - 0.2).abs() < 1e-4, "{x:?}");
        assert!(v > -1e-7);
    }

    #[test]
    fn respects_box_when_peak_lies_outside() {
        let f = |p: &[f64]| p[0] + p[1];
        let (x, _) = maximize(f, &[0.1, 0.1], &[0.0, 0.0], &[0.5, 0.5]);
        assert!((x[0] - 0.5).abs() < 1e-5);
        assert!((x[1] - 0.5).abs() < 1e-5);
    }
}
