//! Derivative-free simplex minimization.

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Stop once the largest vertex distance from the best vertex drops below this.
    pub diameter_tol: f64,
    pub max_iterations: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            diameter_tol: 1e-8,
            max_iterations: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Best objective value after each iteration.
    pub history: Vec<f64>,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Nelder–Mead with standard coefficients (reflect 1, expand 2, contract ½,
/// shrink ½). The initial simplex offsets coordinate `i` by `steps[i]`.
pub fn nelder_mead<F>(mut f: F, start: &[f64], steps: &[f64], opts: SimplexOptions) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    assert_eq!(steps.len(), n, "one step per coordinate");
    let mut eval = |x: &[f64]| sanitize(f(x));
    if n == 0 {
        let value = eval(start);
        return SimplexResult {
            point: Vec::new(),
            value,
            iterations: 0,
            converged: true,
            history: vec![value],
        };
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), eval(start)));
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += if steps[i] != 0.0 { steps[i] } else { 0.05 };
        let fv = eval(&v);
        simplex.push((v, fv));
    }

    let diameter = |s: &[(Vec<f64>, f64)]| -> f64 {
        let best = &s[0].0;
        s[1..]
            .iter()
            .map(|(v, _)| v.iter().zip(best).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    };

    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        history.push(simplex[0].1);
        if diameter(&simplex) < opts.diameter_tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iterations {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64, worst: &[f64]| -> Vec<f64> {
            centroid.iter().zip(worst).map(|(c, w)| c + t * (c - w)).collect()
        };
        let worst = simplex[n].0.clone();
        let (f_best, f_second, f_worst) = (simplex[0].1, simplex[n - 1].1, simplex[n].1);

        let xr = along(1.0, &worst);
        let fr = eval(&xr);
        if fr < f_best {
            let xe = along(2.0, &worst);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < f_worst {
            let xc = along(0.5, &worst);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-0.5, &worst);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < fr.min(f_worst) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for (v, fv) in simplex.iter_mut().skip(1) {
            for (x, b) in v.iter_mut().zip(&best) {
                *x = b + 0.5 * (*x - b);
            }
            *fv = eval(v);
        }
    }
    let (point, value) = simplex.swap_remove(0);
    SimplexResult {
        point,
        value,
        iterations,
        converged,
        history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let r = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &[0.1, 0.1],
            SimplexOptions {
                diameter_tol: 1e-10,
                max_iterations: 5000,
            },
        );
        assert!(r.converged);
        assert!((r.point[0] - 1.0).abs() < 1e-6 && (r.point[1] - 1.0).abs() < 1e-6);
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn iteration_cap() {
        let r = nelder_mead(|x| x[0].abs(), &[5.0], &[1.0], SimplexOptions {
            diameter_tol: 0.0,
            max_iterations: 10,
        });
        assert!(!r.converged);
        assert_eq!(r.iterations, 10);
    }
}
