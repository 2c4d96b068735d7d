//! Bounded-budget Nelder-Mead simplex minimization.
//!
//! Gradient-free local search with the adaptive reflection/expansion/
//! contraction parameters of Gao & Han, which behave better as the dimension
//! grows. The evaluation cap is exact: the objective is never called more
//! than `max_evals` times, and the best point seen across all evaluations is
//! returned, so the result is never worse than the starting point.

use crate::scalar::Scalar;

/// Stopping controls for [`nelder_mead`].
#[derive(Debug, Clone)]
pub struct SimplexOptions<F> {
    /// Converged when every vertex is within this distance of the best one.
    pub param_tol: F,
    /// Converged when the simplex value spread falls below this.
    pub obj_tol: F,
    /// Hard cap on objective evaluations.
    pub max_evals: u64,
}

/// Result of a simplex run.
#[derive(Debug, Clone)]
pub struct SimplexOutcome<F> {
    /// Best point seen over every evaluation.
    pub x: Vec<F>,
    pub value: F,
    pub evals: u64,
    pub converged: bool,
    /// Set when the objective never produced a finite value.
    pub failed: bool,
}

struct Tracker<F, O: FnMut(&[F]) -> F> {
    objective: O,
    budget: u64,
    evals: u64,
    best_x: Vec<F>,
    best_value: F,
}

impl<F: Scalar, O: FnMut(&[F]) -> F> Tracker<F, O> {
    /// Evaluates within budget; non-finite values map to +∞.
    fn eval(&mut self, x: &[F]) -> Option<F> {
        if self.evals >= self.budget {
            return None;
        }
        self.evals += 1;
        let raw = (self.objective)(x);
        let value = if raw.is_finite() { raw } else { F::infinity() };
        if value < self.best_value {
            self.best_value = value;
            self.best_x = x.to_vec();
        }
        Some(value)
    }
}

/// Minimizes `objective` starting from `x0`. `steps` gives the initial
/// simplex edge length along each axis, letting differently scaled
/// parameters start with commensurate perturbations.
pub fn nelder_mead<F, O>(
    objective: O,
    x0: &[F],
    steps: &[F],
    options: &SimplexOptions<F>,
) -> SimplexOutcome<F>
where
    F: Scalar,
    O: FnMut(&[F]) -> F,
{
    let dim = x0.len();
    assert!(dim >= 1, "need at least one parameter");
    assert_eq!(steps.len(), dim, "one step size per parameter");
    let mut tracker = Tracker {
        objective,
        budget: options.max_evals,
        evals: 0,
        best_x: x0.to_vec(),
        best_value: F::infinity(),
    };

    // Adaptive parameters (α, β, γ, δ) after Gao & Han.
    let n = F::from(dim).unwrap();
    let one = F::one();
    let two = F::from(2.0).unwrap();
    let half = F::from(0.5).unwrap();
    let reflect = one;
    let expand = one + two / n;
    let contract = F::from(0.75).unwrap() - half / n;
    let shrink = one - one / n;

    let finish = |tracker: Tracker<F, O>, converged: bool| {
        let failed = !tracker.best_value.is_finite();
        SimplexOutcome {
            x: tracker.best_x,
            value: tracker.best_value,
            evals: tracker.evals,
            converged,
            failed,
        }
    };

    // Initial vertex, then one step along each axis.
    let mut vertices: Vec<(Vec<F>, F)> = Vec::with_capacity(dim + 1);
    match tracker.eval(x0) {
        Some(v) => vertices.push((x0.to_vec(), v)),
        None => return finish(tracker, false),
    }
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] = x[i] + steps[i];
        match tracker.eval(&x) {
            Some(v) => vertices.push((x, v)),
            None => return finish(tracker, false),
        }
    }

    loop {
        vertices.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let f_best = vertices[0].1;
        let f_worst = vertices[dim].1;

        let spread_ok = (f_worst - f_best).abs() <= options.obj_tol;
        let mut extent = F::zero();
        for (x, _) in vertices.iter().skip(1) {
            for (a, b) in x.iter().zip(&vertices[0].0) {
                let d = (*a - *b).abs();
                if d > extent {
                    extent = d;
                }
            }
        }
        if spread_ok && extent <= options.param_tol {
            return finish(tracker, true);
        }

        // Centroid of all vertices except the worst.
        let mut centroid = vec![F::zero(); dim];
        for (x, _) in vertices.iter().take(dim) {
            for (c, a) in centroid.iter_mut().zip(x) {
                *c = *c + *a;
            }
        }
        for c in &mut centroid {
            *c = *c / n;
        }

        let worst = vertices[dim].0.clone();
        let blend = |from: &[F], toward: &[F], factor: F| -> Vec<F> {
            from.iter()
                .zip(toward)
                .map(|(c, w)| *c + factor * (*c - *w))
                .collect()
        };

        let reflected = blend(&centroid, &worst, reflect);
        let f_reflected = match tracker.eval(&reflected) {
            Some(v) => v,
            None => return finish(tracker, false),
        };

        if f_reflected < f_best {
            // Try to expand further along the same direction.
            let expanded = blend(&centroid, &worst, expand);
            let f_expanded = match tracker.eval(&expanded) {
                Some(v) => v,
                None => return finish(tracker, false),
            };
            vertices[dim] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
            continue;
        }
        if f_reflected < vertices[dim - 1].1 {
            vertices[dim] = (reflected, f_reflected);
            continue;
        }

        let (contracted, f_contracted, accept_bar) = if f_reflected < f_worst {
            // Outside contraction between centroid and the reflected point.
            let x = blend(&centroid, &worst, contract);
            let v = match tracker.eval(&x) {
                Some(v) => v,
                None => return finish(tracker, false),
            };
            (x, v, f_reflected)
        } else {
            // Inside contraction toward the worst vertex.
            let x = blend(&centroid, &worst, -contract);
            let v = match tracker.eval(&x) {
                Some(v) => v,
                None => return finish(tracker, false),
            };
            (x, v, f_worst)
        };
        if f_contracted <= accept_bar {
            vertices[dim] = (contracted, f_contracted);
            continue;
        }

        // Shrink everything toward the best vertex.
        let best_x = vertices[0].0.clone();
        for vertex in vertices.iter_mut().skip(1) {
            let x: Vec<F> = best_x
                .iter()
                .zip(&vertex.0)
                .map(|(b, a)| *b + shrink * (*a - *b))
                .collect();
            match tracker.eval(&x) {
                Some(v) => *vertex = (x, v),
                None => return finish(tracker, false),
            }
        }
    }
}
