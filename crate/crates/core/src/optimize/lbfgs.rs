//! Limited-memory BFGS with Armijo backtracking, minimizing over `R^n`.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsOptions {
    pub max_evals: usize,
    pub memory: usize,
    /// Stop once the objective improves by less than this for `stall_iters` consecutive steps.
    pub f_tol: f64,
    pub g_tol: f64,
    pub stall_iters: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self { max_evals: 50_000, memory: 10, f_tol: 1e-10, g_tol: 1e-10, stall_iters: 3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LbfgsResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Minimizes `f`, which returns the value and gradient. `renorm` may rescale the
/// iterate in place (returning `true` when it did) to keep scale-invariant
/// objectives away from degenerate norms; the curvature history is then dropped.
pub fn minimize<F, R>(f: F, x0: Vec<f64>, opts: &LbfgsOptions, renorm: R) -> LbfgsResult
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
    R: Fn(&mut [f64]) -> bool,
{
    let mut x = x0;
    renorm(&mut x);
    let (mut fx, mut g) = f(&x);
    let mut evals = 1;
    let mut hist: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut stall = 0;
    let n = x.len();

    while evals < opts.max_evals {
        if !fx.is_finite() {
            return LbfgsResult { x, value: fx, evals, converged: false };
        }
        if norm(&g) < opts.g_tol {
            return LbfgsResult { x, value: fx, evals, converged: true };
        }
        // two-loop recursion
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = rho * dot(s, &d);
            for i in 0..n {
                d[i] -= a * y[i];
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = hist.back() {
            let gamma = dot(s, y) / dot(y, y);
            for v in d.iter_mut() {
                *v *= gamma;
            }
        } else {
            let gn = norm(&g);
            for v in d.iter_mut() {
                *v /= gn.max(1.0);
            }
        }
        for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &d);
            for i in 0..n {
                d[i] += (a - b) * s[i];
            }
        }
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            hist.clear();
            d = g.iter().map(|v| -v / norm(&g).max(1.0)).collect();
            slope = dot(&g, &d);
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..50 {
            let xn: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + step * di).collect();
            let (fn_, gn) = f(&xn);
            evals += 1;
            if fn_.is_finite() && fn_ <= fx + 1e-4 * step * slope {
                accepted = Some((xn, fn_, gn));
                break;
            }
            if evals >= opts.max_evals {
                break;
            }
            step *= 0.5;
        }
        let Some((mut xn, mut fn_, mut gn)) = accepted else {
            if hist.is_empty() {
                return LbfgsResult { x, value: fx, evals, converged: true };
            }
            hist.clear();
            continue;
        };

        let improvement = fx - fn_;
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if renorm(&mut xn) {
            hist.clear();
            let (f2, g2) = f(&xn);
            evals += 1;
            fn_ = f2;
            gn = g2;
        } else if sy > 1e-14 * norm(&s) * norm(&y) && sy > 0.0 {
            hist.push_back((s, y, 1.0 / sy));
            if hist.len() > opts.memory {
                hist.pop_front();
            }
        }
        x = xn;
        fx = fn_;
        g = gn;
        if improvement < opts.f_tol {
            stall += 1;
            if stall >= opts.stall_iters {
                return LbfgsResult { x, value: fx, evals, converged: true };
            }
        } else {
            stall = 0;
        }
    }
    LbfgsResult { x, value: fx, evals, converged: false }
}
