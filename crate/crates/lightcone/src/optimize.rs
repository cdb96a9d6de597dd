//! Derivative-free parameter tuning via Nelder–Mead simplex descent.
//!
//! Variational objectives here are cheap (small statevectors) but not
//! smooth once shot noise enters, so a bracketing simplex method fits
//! better than gradient descent. The implementation is the standard
//! reflect/expand/contract/shrink scheme with coefficients α=1, γ=2,
//! ρ=0.5, σ=0.5, plus seeded multi-start to step over local valleys in
//! periodic variational landscapes.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Nelder–Mead configuration.
#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    /// Iteration budget per descent.
    pub max_iters: usize,
    /// Initial simplex edge length along each axis.
    pub initial_step: f64,
    /// Converged when the simplex value spread falls below this.
    pub f_tol: f64,
    /// Converged when the simplex coordinate spread falls below this.
    pub x_tol: f64,
    /// Contraction coefficient ρ.
    pub contraction: f64,
    /// Shrink coefficient σ.
    pub shrink: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            max_iters: 600,
            initial_step: 0.5,
            f_tol: 1e-10,
            x_tol: 1e-8,
            contraction: 0.5,
            shrink: 0.5,
        }
    }
}

/// Result of a minimization run.
#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    /// Best parameter vector found.
    pub params: Vec<f64>,
    /// Objective value at `params`.
    pub value: f64,
    /// Total objective evaluations.
    pub evaluations: usize,
    /// Iterations consumed by the final descent.
    pub iterations: usize,
    /// Whether the simplex collapsed below the tolerances.
    pub converged: bool,
}

impl NelderMead {
    /// Minimize `f` starting from `start`.
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, mut f: F, start: &[f64]) -> OptimizeOutcome {
        let dim = start.len();
        let mut evaluations = 0;
        let mut eval = |x: &[f64], n: &mut usize| {
            *n += 1;
            f(x)
        };
        if dim == 0 {
            let value = eval(start, &mut evaluations);
            return OptimizeOutcome {
                params: Vec::new(),
                value,
                evaluations,
                iterations: 0,
                converged: true,
            };
        }

        // Simplex: start point plus one step along each axis.
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
        let v0 = eval(start, &mut evaluations);
        simplex.push((start.to_vec(), v0));
        for axis in 0..dim {
            let mut x = start.to_vec();
            x[axis] += self.initial_step;
            let v = eval(&x, &mut evaluations);
            simplex.push((x, v));
        }

        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iters {
            iterations += 1;
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[dim].1 - simplex[0].1;
            let extent = (0..dim)
                .map(|k| {
                    simplex
                        .iter()
                        .map(|(x, _)| (x[k] - simplex[0].0[k]).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if spread.abs() < self.f_tol && extent < self.x_tol {
                converged = true;
                break;
            }

            // Centroid of all but the worst vertex.
            let centroid: Vec<f64> = (0..dim)
                .map(|k| simplex[..dim].iter().map(|(x, _)| x[k]).sum::<f64>() / dim as f64)
                .collect();
            let worst = simplex[dim].clone();

            let along = |coef: f64| -> Vec<f64> {
                (0..dim)
                    .map(|k| centroid[k] + coef * (centroid[k] - worst.0[k]))
                    .collect()
            };

            let reflected = along(1.0);
            let fr = eval(&reflected, &mut evaluations);
            if fr < simplex[0].1 {
                // Best so far: try expanding further.
                let expanded = along(2.0);
                let fe = eval(&expanded, &mut evaluations);
                simplex[dim] = if fe < fr {
                    (expanded, fe)
                } else {
                    (reflected, fr)
                };
            } else if fr < simplex[dim - 1].1 {
                simplex[dim] = (reflected, fr);
            } else {
                // Contract toward the better of reflected/worst.
                let (contracted, limit) = if fr < worst.1 {
                    (along(self.contraction), fr)
                } else {
                    (along(-self.contraction), worst.1)
                };
                let fc = eval(&contracted, &mut evaluations);
                if fc < limit {
                    simplex[dim] = (contracted, fc);
                } else {
                    // Shrink everything toward the best vertex.
                    let best = simplex[0].0.clone();
                    for vertex in simplex.iter_mut().skip(1) {
                        for (x, b) in vertex.0.iter_mut().zip(&best) {
                            *x = b + self.shrink * (*x - b);
                        }
                        vertex.1 = eval(&vertex.0, &mut evaluations);
                    }
                }
            }
        }

        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (params, value) = simplex.swap_remove(0);
        OptimizeOutcome {
            params,
            value,
            evaluations,
            iterations,
            converged,
        }
    }
}

impl NelderMead {
    /// Minimize with seeded random starts in `[lo, hi)^dim`, keeping the
    /// best outcome. When `initial` is given it seeds the first descent and
    /// the remaining `restarts − 1` starts are random; otherwise all
    /// `restarts` are random. Evaluation counts accumulate across restarts.
    #[allow(clippy::too_many_arguments)] // flat call surface mirrors the optimizer config fields
    pub fn minimize_with_restarts<F: FnMut(&[f64]) -> f64>(
        &self,
        mut f: F,
        dim: usize,
        initial: Option<&[f64]>,
        restarts: usize,
        seed: u64,
        lo: f64,
        hi: f64,
    ) -> OptimizeOutcome {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut best: Option<OptimizeOutcome> = None;
        let mut total_evals = 0;
        for attempt in 0..restarts.max(1) {
            let start: Vec<f64> = match (attempt, initial) {
                (0, Some(x)) => x.to_vec(),
                _ => (0..dim).map(|_| rng.gen_range(lo..hi)).collect(),
            };
            let outcome = self.minimize(&mut f, &start);
            total_evals += outcome.evaluations;
            match &best {
                Some(b) if b.value <= outcome.value => {}
                _ => best = Some(outcome),
            }
        }
        let mut best = best.expect("at least one restart runs");
        best.evaluations = total_evals;
        best
    }
}

/// [`NelderMead::minimize_with_restarts`] with default settings and random
/// starts only.
pub fn minimize_with_restarts<F: FnMut(&[f64]) -> f64>(
    f: F,
    dim: usize,
    restarts: usize,
    seed: u64,
    lo: f64,
    hi: f64,
) -> OptimizeOutcome {
    NelderMead::default().minimize_with_restarts(f, dim, None, restarts, seed, lo, hi)
}
