//! Derivative-free simplex minimiser (Nelder–Mead with the standard
//! coefficients α = 1, γ = 2, ρ = ½, σ = ½).

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Stop once `f_worst − f_best < f_tol·(1 + |f_best|)`.
    pub f_tol: f64,
    /// Edge length of the initial axis-aligned simplex.
    pub step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            max_iterations: 2000,
            f_tol: 1e-14,
            step: 0.2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn combine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t·(b − a)
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

pub fn minimize<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for k in 0..dim {
        let mut x = x0.to_vec();
        x[k] += opts.step;
        let fx = f(&x);
        simplex.push((x, fx));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[dim].1);
        if worst - best < opts.f_tol * (1.0 + best.abs()) {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / dim as f64;
            }
        }

        let reflected = combine(&centroid, &simplex[dim].0, -1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = combine(&centroid, &simplex[dim].0, -2.0);
            let fe = f(&expanded);
            simplex[dim] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < worst {
            let c = combine(&centroid, &reflected, 0.5);
            let fc = f(&c);
            (c, fc)
        } else {
            let c = combine(&centroid, &simplex[dim].0, 0.5);
            let fc = f(&c);
            (c, fc)
        };
        if fc < fr.min(worst) {
            simplex[dim] = (contracted, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            let x = combine(&anchor, &entry.0, 0.5);
            let fx = f(&x);
            *entry = (x, fx);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    NelderMeadResult {
        x,
        f: fx,
        iterations,
        converged,
    }
}
