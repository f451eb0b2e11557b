//! Nelder-Mead simplex search with box projection.

use crate::error::{Error, Result};

/// Box constraints; infinite bounds are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len(), "bound vectors differ in length");
        Self { lower, upper }
    }

    pub fn unbounded(dim: usize) -> Self {
        Self::new(vec![f64::NEG_INFINITY; dim], vec![f64::INFINITY; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    fn project(&self, x: &mut [f64]) {
        for ((v, lo), hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(*lo, *hi);
        }
    }

    fn midpoint(&self, fallback: &[f64]) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .zip(fallback)
            .map(|((lo, hi), f)| match (lo.is_finite(), hi.is_finite()) {
                (true, true) => 0.5 * (lo + hi),
                _ => *f,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Objective evaluations per run; `None` means `1000 * dim`.
    pub max_evals: Option<usize>,
    /// Convergence threshold on the spread of objective values over the simplex.
    pub tolerance: f64,
    /// Additional runs started from the best point found so far.
    pub restarts: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_evals: None,
            tolerance: 1e-8,
            restarts: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Minimizes `objective` inside `bounds` starting from `start`.
///
/// `steps` sets the initial simplex edge per coordinate; by default 5% of the
/// coordinate's magnitude (0.00025 at zero). Non-finite objective values are
/// treated as worse than any finite value. Returns the best point seen.
pub fn optimize<F>(
    mut objective: F,
    bounds: &Bounds,
    start: &[f64],
    steps: Option<&[f64]>,
    config: &OptimizerConfig,
) -> Result<OptimResult>
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = start.len();
    if bounds.dim() != dim {
        return Err(Error::Estimation(format!(
            "{} bounds for {dim} parameters",
            bounds.dim()
        )));
    }
    let mut x0 = start.to_vec();
    bounds.project(&mut x0);
    let mut f0 = objective(&x0);
    let mut evals = 1;
    if !f0.is_finite() {
        x0 = bounds.midpoint(&x0);
        f0 = objective(&x0);
        evals += 1;
        if !f0.is_finite() {
            return Err(Error::Estimation(
                "objective is not finite at the start or at the bound midpoints".into(),
            ));
        }
    }
    if dim == 0 {
        return Ok(OptimResult {
            x: x0,
            value: f0,
            evals,
            converged: true,
        });
    }
    let steps: Vec<f64> = match steps {
        Some(s) => s.to_vec(),
        None => x0
            .iter()
            .map(|v| if *v == 0.0 { 0.00025 } else { 0.05 * v.abs() })
            .collect(),
    };
    let max_evals = config.max_evals.unwrap_or(1000 * dim);

    let mut best = (x0, f0);
    let mut converged = false;
    for _ in 0..=config.restarts {
        let run = simplex_search(
            &mut objective,
            bounds,
            best.0.clone(),
            best.1,
            &steps,
            max_evals,
            config.tolerance,
        );
        evals += run.evals;
        converged = run.converged;
        if run.value < best.1 {
            best = (run.x, run.value);
        }
    }
    Ok(OptimResult {
        x: best.0,
        value: best.1,
        evals,
        converged,
    })
}

fn simplex_search<F>(
    objective: &mut F,
    bounds: &Bounds,
    x0: Vec<f64>,
    f0: f64,
    steps: &[f64],
    max_evals: usize,
    tolerance: f64,
) -> OptimResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = objective(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.clone(), f0));
    for i in 0..dim {
        let mut x = x0.clone();
        x[i] += steps[i];
        bounds.project(&mut x);
        if x[i] == x0[i] {
            x[i] = x0[i] - steps[i];
            bounds.project(&mut x);
        }
        let f = eval(&x, &mut evals);
        simplex.push((x, f));
    }

    let mut converged = false;
    loop {
        // stable sort keeps the incumbent first among ties
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[dim].1 - simplex[0].1;
        if spread.is_finite() && spread.abs() <= tolerance {
            converged = true;
            break;
        }
        if evals >= max_evals {
            break;
        }

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let along = |coef: f64| {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + coef * (c - w))
                .collect();
            bounds.project(&mut p);
            p
        };

        let xr = along(1.0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let fe = eval(&xe, &mut evals);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = along(0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(-0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < fr.min(worst.1) {
            simplex[dim] = (xc, fc);
            continue;
        }
        // shrink toward the best vertex
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            for (v, b) in vertex.0.iter_mut().zip(&best) {
                *v = b + 0.5 * (*v - b);
            }
            vertex.1 = eval(&vertex.0, &mut evals);
        }
    }
    let (x, value) = simplex.swap_remove(0);
    OptimResult {
        x,
        value,
        evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_in_unit_box() {
        let bounds = Bounds::new(vec![0.0], vec![1.0]);
        let r = optimize(
            |x| (x[0] - 0.3).powi(2),
            &bounds,
            &[0.8],
            None,
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert!((r.x[0] - 0.3).abs() < 1e-4, "{:?}", r);
    }

    #[test]
    fn constant_objective_returns_start() {
        let bounds = Bounds::unbounded(3);
        let start = [0.1, -2.0, 5.0];
        let r = optimize(|_| 7.0, &bounds, &start, None, &OptimizerConfig::default()).unwrap();
        assert_eq!(r.x, start);
        assert_eq!(r.value, 7.0);
    }

    #[test]
    fn respects_bounds() {
        let bounds = Bounds::new(vec![0.0, 0.0], vec![1.0, 1.0]);
        let r = optimize(
            |x| (x[0] - 3.0).powi(2) + (x[1] + 1.0).powi(2),
            &bounds,
            &[0.5, 0.5],
            None,
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-6 && r.x[1].abs() < 1e-6, "{:?}", r.x);
    }

    #[test]
    fn rosenbrock() {
        let bounds = Bounds::unbounded(2);
        let r = optimize(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &bounds,
            &[-1.2, 1.0],
            Some(&[0.1, 0.1]),
            &OptimizerConfig {
                tolerance: 1e-14,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-3 && (r.x[1] - 1.0).abs() < 1e-3, "{:?}", r);
    }

    #[test]
    fn infinite_start_restarts_from_midpoint() {
        let bounds = Bounds::new(vec![0.0], vec![1.0]);
        let r = optimize(
            |x| if x[0] > 0.9 { f64::INFINITY } else { (x[0] - 0.2).powi(2) },
            &bounds,
            &[0.95],
            None,
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert!((r.x[0] - 0.2).abs() < 1e-4);
    }

    #[test]
    fn persistently_infinite_objective_is_an_error() {
        let bounds = Bounds::new(vec![0.0], vec![1.0]);
        let r = optimize(
            |_| f64::INFINITY,
            &bounds,
            &[0.5],
            None,
            &OptimizerConfig::default(),
        );
        assert!(matches!(r, Err(Error::Estimation(_))));
    }

    #[test]
    fn never_worse_than_start() {
        let bounds = Bounds::unbounded(2);
        let f = |x: &[f64]| (x[0] * 3.0).sin() + (x[1] * 2.0).cos() + 0.1 * x[0] * x[0];
        let start = [0.3, -0.7];
        let r = optimize(f, &bounds, &start, None, &OptimizerConfig::default()).unwrap();
        assert!(r.value <= f(&start));
    }
}
