//! Budgeted Nelder-Mead simplex minimizer.

/// Reflection, expansion, contraction and shrink coefficients.
const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimplexOptions {
    /// Maximum number of objective evaluations.
    pub max_evaluations: usize,
    /// Stop once the spread of values across the simplex falls below this.
    pub ftol: f64,
    /// Edge length of the initial simplex along each coordinate.
    pub initial_step: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub theta: Vec<f64>,
    pub value: f64,
    /// Objective value of every evaluation, in call order.
    pub trace: Vec<f64>,
    pub evaluations: usize,
    /// Completed simplex updates.
    pub iterations: usize,
    pub converged: bool,
}

struct Budget<F> {
    f: F,
    remaining: usize,
    trace: Vec<f64>,
    best: Option<(Vec<f64>, f64)>,
}

impl<F: FnMut(&[f64]) -> f64> Budget<F> {
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let v = (self.f)(x);
        self.trace.push(v);
        if self.best.as_ref().is_none_or(|(_, b)| v < *b) {
            self.best = Some((x.to_vec(), v));
        }
        Some(v)
    }
}

fn lerp(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
}

pub fn nelder_mead<F>(f: F, x0: &[f64], opts: &SimplexOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut budget = Budget {
        f,
        remaining: opts.max_evaluations.max(1),
        trace: Vec::new(),
        best: None,
    };
    let mut iterations = 0;
    let converged = run(&mut budget, x0, opts, &mut iterations, n).unwrap_or(false);
    let (theta, value) = budget.best.expect("at least one evaluation");
    Minimum {
        theta,
        value,
        evaluations: budget.trace.len(),
        trace: budget.trace,
        iterations,
        converged,
    }
}

/// Returns `Some(true)` on convergence, `None` when the budget runs out.
fn run<F: FnMut(&[f64]) -> f64>(
    budget: &mut Budget<F>,
    x0: &[f64],
    opts: &SimplexOptions,
    iterations: &mut usize,
    n: usize,
) -> Option<bool> {
    let mut simplex = vec![x0.to_vec()];
    let mut values = vec![budget.eval(x0)?];
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        values.push(budget.eval(&x)?);
        simplex.push(x);
    }

    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if values[n] - values[0] < opts.ftol {
            return Some(true);
        }
        if n == 0 {
            return Some(true);
        }

        let mut centroid = vec![0.0; n];
        for x in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let worst = simplex[n].clone();

        let reflected = lerp(&centroid, &worst, -REFLECT);
        let fr = budget.eval(&reflected)?;
        if fr < values[0] {
            let expanded = lerp(&centroid, &reflected, EXPAND);
            let fe = budget.eval(&expanded)?;
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let (contracted, threshold) = if fr < values[n] {
                (lerp(&centroid, &reflected, CONTRACT), fr)
            } else {
                (lerp(&centroid, &worst, CONTRACT), values[n])
            };
            let fc = budget.eval(&contracted)?;
            if fc < threshold {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                for i in 1..=n {
                    simplex[i] = lerp(&simplex[0], &simplex[i], SHRINK);
                    values[i] = budget.eval(&simplex[i])?;
                }
            }
        }
        *iterations += 1;
    }
}
