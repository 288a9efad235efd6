//! Unconstrained maximization and numerical curvature.
//!
//! [`maximize`] runs BFGS with a backtracking line search. Two consecutive
//! line-search failures hand the problem to a Nelder–Mead simplex, after
//! which BFGS is given one more chance to polish the result.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// A smooth function to be maximized.
pub trait Objective {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> Result<f64>;

    /// Gradient of [`Objective::value`]; defaults to central differences.
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        central_gradient(|y| self.value(y), x, 1e-5)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OptimOptions {
    /// Convergence requires the gradient's Euclidean norm below this value.
    pub grad_tol: f64,
    pub max_iter: usize,
    /// Largest step, in parameter units, a single line search may take.
    pub max_step: f64,
}

impl Default for OptimOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-6,
            max_iter: 1000,
            max_step: 2.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub used_simplex: bool,
}

impl OptimOutcome {
    pub fn gradient_norm(&self) -> f64 {
        norm(&self.gradient)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Central-difference gradient with absolute step `h · max(1, |x_i|)`.
pub fn central_gradient(
    f: impl Fn(&[f64]) -> Result<f64>,
    x: &[f64],
    h: f64,
) -> Result<Vec<f64>> {
    let mut y = x.to_vec();
    let mut g = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let step = h * x[i].abs().max(1.0);
        y[i] = x[i] + step;
        let up = f(&y)?;
        y[i] = x[i] - step;
        let down = f(&y)?;
        y[i] = x[i];
        g.push((up - down) / (2.0 * step));
    }
    Ok(g)
}

/// Hessian of `f` by central differences of function values, step
/// `h_i = rel_step · max(1, |x_i|)`.
pub fn hessian_from_values(
    f: impl Fn(&[f64]) -> Result<f64>,
    x: &[f64],
    rel_step: f64,
) -> Result<DMatrix<f64>> {
    let n = x.len();
    let steps: Vec<f64> = x.iter().map(|v| rel_step * v.abs().max(1.0)).collect();
    let f0 = f(x)?;
    let mut h = DMatrix::zeros(n, n);
    let mut y = x.to_vec();
    for i in 0..n {
        y[i] = x[i] + steps[i];
        let up = f(&y)?;
        y[i] = x[i] - steps[i];
        let down = f(&y)?;
        y[i] = x[i];
        h[(i, i)] = (up - 2.0 * f0 + down) / (steps[i] * steps[i]);
        for j in 0..i {
            let mut eval = |si: f64, sj: f64| -> Result<f64> {
                y[i] = x[i] + si * steps[i];
                y[j] = x[j] + sj * steps[j];
                let v = f(&y);
                y[i] = x[i];
                y[j] = x[j];
                v
            };
            let v = (eval(1.0, 1.0)? - eval(1.0, -1.0)? - eval(-1.0, 1.0)? + eval(-1.0, -1.0)?)
                / (4.0 * steps[i] * steps[j]);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    Ok(h)
}

/// Hessian from central differences of an analytic (or accurate) gradient,
/// symmetrized.
pub fn hessian_from_gradient(
    g: impl Fn(&[f64]) -> Result<Vec<f64>>,
    x: &[f64],
    rel_step: f64,
) -> Result<DMatrix<f64>> {
    let n = x.len();
    let mut h = DMatrix::zeros(n, n);
    let mut y = x.to_vec();
    for j in 0..n {
        let step = rel_step * x[j].abs().max(1.0);
        y[j] = x[j] + step;
        let up = g(&y)?;
        y[j] = x[j] - step;
        let down = g(&y)?;
        y[j] = x[j];
        for i in 0..n {
            h[(i, j)] = (up[i] - down[i]) / (2.0 * step);
        }
    }
    Ok((&h + h.transpose()) * 0.5)
}

/// Covariance `(-H)^{-1}` of the maximum-likelihood estimate.
pub fn covariance_from_hessian(hessian: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let info = -hessian;
    info.clone()
        .cholesky()
        .map(|c| c.inverse())
        .or_else(|| info.try_inverse())
        .ok_or_else(|| Error::DegenerateData("observed information matrix is singular".into()))
}

/// Largest eigenvalue of a symmetric matrix.
pub fn max_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max)
}

struct Point {
    x: DVector<f64>,
    f: f64,
    g: DVector<f64>,
}

fn evaluate(obj: &dyn Objective, x: &DVector<f64>) -> Option<Point> {
    let f = obj.value(x.as_slice()).ok()?;
    if !f.is_finite() {
        return None;
    }
    let g = obj.gradient(x.as_slice()).ok()?;
    if g.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(Point {
        x: x.clone(),
        f,
        g: DVector::from_vec(g),
    })
}

enum BfgsStop {
    Converged,
    LineSearchFailed,
    MaxIter,
}

fn bfgs(
    obj: &dyn Objective,
    start: Point,
    opts: &OptimOptions,
    iterations: &mut usize,
) -> (Point, BfgsStop) {
    let n = start.x.len();
    let mut cur = start;
    let mut inv_h = DMatrix::<f64>::identity(n, n);
    let mut scaled = false;
    let mut failures = 0usize;

    while *iterations < opts.max_iter {
        if cur.g.norm() < opts.grad_tol {
            return (cur, BfgsStop::Converged);
        }
        *iterations += 1;

        let mut dir = &inv_h * &cur.g;
        let mut slope = dir.dot(&cur.g);
        if !(slope > 0.0) {
            inv_h = DMatrix::identity(n, n);
            scaled = false;
            dir = cur.g.clone();
            slope = dir.dot(&cur.g);
        }
        let dir_norm = dir.norm();
        let mut alpha = if dir_norm > opts.max_step {
            opts.max_step / dir_norm
        } else {
            1.0
        };

        // Below this change the objective is indistinguishable from rounding
        // and steps are judged by the directional derivative instead.
        let noise = 1e-13 * (1.0 + cur.f.abs());
        let mut next = None;
        for _ in 0..60 {
            let trial = &cur.x + &dir * alpha;
            if let Some(p) = evaluate(obj, &trial) {
                if p.f >= cur.f + 1e-4 * alpha * slope {
                    next = Some(p);
                    break;
                }
                let end_slope = p.g.dot(&dir);
                if p.f >= cur.f - noise && end_slope <= 0.9 * slope && end_slope >= -0.8 * slope {
                    next = Some(p);
                    break;
                }
            }
            alpha *= 0.5;
        }

        let Some(next) = next else {
            failures += 1;
            if failures >= 2 {
                return (cur, BfgsStop::LineSearchFailed);
            }
            inv_h = DMatrix::identity(n, n);
            scaled = false;
            continue;
        };
        failures = 0;

        // Minimization convention: s = Δx, y = -(Δg).
        let s = &next.x - &cur.x;
        let y = &cur.g - &next.g;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            if !scaled {
                inv_h = DMatrix::identity(n, n) * (sy / y.dot(&y));
                scaled = true;
            }
            let rho = 1.0 / sy;
            let hy = &inv_h * &y;
            let yhy = y.dot(&hy);
            inv_h += (&s * s.transpose()) * (rho * rho * yhy + rho)
                - (&hy * s.transpose() + &s * hy.transpose()) * rho;
        }
        cur = next;
    }
    (cur, BfgsStop::MaxIter)
}

fn nelder_mead(obj: &dyn Objective, start: &DVector<f64>, max_evals: usize) -> Option<DVector<f64>> {
    let n = start.len();
    let value = |x: &DVector<f64>| -> f64 {
        match obj.value(x.as_slice()) {
            Ok(v) if v.is_finite() => -v,
            _ => f64::INFINITY,
        }
    };
    let mut simplex: Vec<(DVector<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.clone(), value(start)));
    for i in 0..n {
        let mut x = start.clone();
        x[i] += 0.1 * start[i].abs().max(1.0);
        let v = value(&x);
        simplex.push((x, v));
    }
    let mut evals = n + 1;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let size = simplex
            .iter()
            .skip(1)
            .map(|(x, _)| (x - &simplex[0].0).amax())
            .fold(0.0, f64::max);
        if (worst - best).abs() <= 1e-13 * (best.abs() + 1.0) && size < 1e-9 {
            break;
        }
        let centroid = simplex[..n]
            .iter()
            .fold(DVector::zeros(n), |acc, (x, _)| acc + x)
            / n as f64;
        let reflect = &centroid + (&centroid - &simplex[n].0);
        let fr = value(&reflect);
        evals += 1;
        if fr < simplex[0].1 {
            let expand = &centroid + (&reflect - &centroid) * 2.0;
            let fe = value(&expand);
            evals += 1;
            simplex[n] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflect, fr);
        } else {
            let contract = if fr < simplex[n].1 {
                &centroid + (&reflect - &centroid) * 0.5
            } else {
                &centroid + (&simplex[n].0 - &centroid) * 0.5
            };
            let fc = value(&contract);
            evals += 1;
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (contract, fc);
            } else {
                let best_x = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    entry.0 = &best_x + (&entry.0 - &best_x) * 0.5;
                    entry.1 = value(&entry.0);
                }
                evals += n;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0].1.is_finite().then(|| simplex[0].0.clone())
}

/// Maximizes `obj` from `x0`.
pub fn maximize(obj: &dyn Objective, x0: &[f64], opts: &OptimOptions) -> Result<OptimOutcome> {
    if x0.len() != obj.dim() {
        return Err(Error::InvalidParameter(format!(
            "starting point has {} coordinates, objective expects {}",
            x0.len(),
            obj.dim()
        )));
    }
    let start = evaluate(obj, &DVector::from_column_slice(x0)).ok_or_else(|| {
        Error::Domain("objective is not finite at the starting point".into())
    })?;
    let mut iterations = 0;
    let (mut point, stop) = bfgs(obj, start, opts, &mut iterations);
    let mut used_simplex = false;

    if matches!(stop, BfgsStop::LineSearchFailed) {
        used_simplex = true;
        if let Some(x) = nelder_mead(obj, &point.x, 200 * (point.x.len() + 1) * 10) {
            if let Some(p) = evaluate(obj, &x) {
                if p.f >= point.f {
                    point = p;
                }
            }
        }
        let (polished, _) = bfgs(obj, point, opts, &mut iterations);
        point = polished;
    }

    let converged = point.g.norm() < opts.grad_tol;
    Ok(OptimOutcome {
        x: point.x.as_slice().to_vec(),
        value: point.f,
        gradient: point.g.as_slice().to_vec(),
        iterations,
        converged,
        used_simplex,
    })
}
