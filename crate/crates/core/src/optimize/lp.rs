//! Dense phase-one simplex for small feasibility problems `A w = b, w ≥ 0`.

/// Returns a feasible `w` (a basic solution) or `None`. Rows with negative
/// right-hand side are flipped first; Bland's rule guards against cycling.
pub fn feasible_point(a: &[Vec<f64>], b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let cols = n + m;
    // tableau rows: [A | I | b]
    let mut t: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
            let mut row: Vec<f64> = a[i].iter().map(|v| sign * v).collect();
            row.extend((0..m).map(|k| if k == i { 1.0 } else { 0.0 }));
            row.push(sign * b[i]);
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..cols).collect();
    // reduced costs of the phase-one objective (sum of artificials)
    let cost = |t: &Vec<Vec<f64>>, basis: &Vec<usize>, j: usize| -> f64 {
        let cj = if j >= n { 1.0 } else { 0.0 };
        cj - (0..m).map(|i| if basis[i] >= n { t[i][j] } else { 0.0 }).sum::<f64>()
    };
    for _ in 0..10_000 {
        let Some(enter) = (0..cols).find(|&j| !basis.contains(&j) && cost(&t, &basis, j) < -tol) else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][enter] > tol {
                let ratio = t[i][cols] / t[i][enter];
                match leave {
                    Some((li, r)) if ratio > r + tol || (ratio >= r - tol && basis[i] > basis[li]) => {}
                    _ => leave = Some((i, ratio)),
                }
            }
        }
        let (li, _) = leave?;
        let piv = t[li][enter];
        for v in t[li].iter_mut() {
            *v /= piv;
        }
        for i in 0..m {
            if i != li {
                let f = t[i][enter];
                if f != 0.0 {
                    for j in 0..=cols {
                        t[i][j] -= f * t[li][j];
                    }
                }
            }
        }
        basis[li] = enter;
    }
    let infeas: f64 = (0..m).filter(|&i| basis[i] >= n).map(|i| t[i][cols]).sum();
    if infeas > 1e-9 {
        return None;
    }
    let mut w = vec![0.0; n];
    for i in 0..m {
        if basis[i] < n {
            w[basis[i]] = t[i][cols].max(0.0);
        }
    }
    Some(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_membership() {
        // convex combination of (1,0), (-1,0), (0,1) reaching the origin
        let a = vec![vec![1.0, -1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 1.0, 1.0]];
        let w = feasible_point(&a, &[0.0, 0.0, 1.0], 1e-12).unwrap();
        assert!((w[0] - 0.5).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12 && w[2].abs() < 1e-12);
    }

    #[test]
    fn infeasible() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert!(feasible_point(&a, &[0.0, 1.0], 1e-12).is_none());
    }
}
