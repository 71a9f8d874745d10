//! Adaptive Nelder–Mead simplex search.

#[derive(Clone, Debug)]
pub struct NmOptions {
    /// Stop when every vertex lies within this distance (max norm) of the best one.
    pub xatol: f64,
    /// Stop when all simplex values lie within this of the best one.
    pub fatol: f64,
    /// Require both tolerances instead of either.
    pub require_both: bool,
    pub max_iterations: usize,
    pub max_evaluations: usize,
    /// Relative size of the initial simplex steps.
    pub initial_step: f64,
    /// Optional box; trial points are clipped into it.
    pub bounds: Option<(Vec<f64>, Vec<f64>)>,
}

impl Default for NmOptions {
    fn default() -> Self {
        NmOptions {
            xatol: 1e-8,
            fatol: 1e-10,
            require_both: false,
            max_iterations: 20_000,
            max_evaluations: 40_000,
            initial_step: 0.05,
            bounds: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// False when the iteration or evaluation cap was hit first.
    pub converged: bool,
    /// Best value after each iteration.
    pub trace: Vec<f64>,
}

fn clip(x: &mut [f64], bounds: &Option<(Vec<f64>, Vec<f64>)>) {
    if let Some((lo, hi)) = bounds {
        for i in 0..x.len() {
            x[i] = x[i].clamp(lo[i], hi[i]);
        }
    }
}

pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, start: &[f64], opts: &NmOptions) -> NmResult {
    let n = start.len();
    let nf = n.max(1) as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut x0 = start.to_vec();
    clip(&mut x0, &opts.bounds);
    let mut simplex = vec![x0.clone()];
    for i in 0..n {
        let mut y = x0.clone();
        y[i] = if y[i] != 0.0 { (1.0 + opts.initial_step) * y[i] } else { 0.00025 };
        clip(&mut y, &opts.bounds);
        if y[i] == x0[i] {
            // clipped onto the start; step the other way
            y[i] = x0[i] - opts.initial_step * x0[i].abs().max(0.005);
            clip(&mut y, &opts.bounds);
        }
        simplex.push(y);
    }
    let mut fs: Vec<f64> = simplex.iter().map(|x| eval(x, &mut evals)).collect();
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iterations && evals < opts.max_evaluations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| fs[a].total_cmp(&fs[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        fs = order.iter().map(|&i| fs[i]).collect();

        let size = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let fspread = fs[1..].iter().map(|v| (v - fs[0]).abs()).fold(0.0, f64::max);
        let x_ok = size <= opts.xatol;
        let f_ok = fspread <= opts.fatol;
        if (opts.require_both && x_ok && f_ok) || (!opts.require_both && (x_ok || f_ok)) {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / nf;
            }
        }
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid.iter().zip(&worst).map(|(c, w)| c + t * (c - w)).collect();
            clip(&mut p, &opts.bounds);
            p
        };
        let xr = along(alpha);
        let fr = eval(&xr, &mut evals);
        let mut shrink = false;
        if fr < fs[0] {
            let xe = along(alpha * beta);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                simplex[n] = xe;
                fs[n] = fe;
            } else {
                simplex[n] = xr;
                fs[n] = fr;
            }
        } else if fr < fs[n - 1] {
            simplex[n] = xr;
            fs[n] = fr;
        } else if fr < fs[n] {
            let xc = along(alpha * gamma);
            let fc = eval(&xc, &mut evals);
            if fc <= fr {
                simplex[n] = xc;
                fs[n] = fc;
            } else {
                shrink = true;
            }
        } else {
            let xcc = along(-gamma);
            let fcc = eval(&xcc, &mut evals);
            if fcc < fs[n] {
                simplex[n] = xcc;
                fs[n] = fcc;
            } else {
                shrink = true;
            }
        }
        if shrink {
            let best = simplex[0].clone();
            for k in 1..=n {
                let mut p: Vec<f64> = best.iter().zip(&simplex[k]).map(|(b, x)| b + delta * (x - b)).collect();
                clip(&mut p, &opts.bounds);
                fs[k] = eval(&p, &mut evals);
                simplex[k] = p;
            }
        }
        trace.push(fs.iter().copied().fold(f64::INFINITY, f64::min));
    }
    let b = (0..=n).min_by(|&a, &b| fs[a].total_cmp(&fs[b])).expect("nonempty simplex");
    NmResult {
        x: simplex[b].clone(),
        f: fs[b],
        iterations,
        evaluations: evals,
        converged,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let a = [1.5, -2.0, 0.25];
        let opts = NmOptions {
            require_both: true,
            xatol: 1e-10,
            fatol: 1e-16,
            ..NmOptions::default()
        };
        let r = nelder_mead(|x| x.iter().zip(&a).map(|(x, a)| (x - a).powi(2)).sum(), &[0.0; 3], &opts);
        assert!(r.converged);
        assert!(r.x.iter().zip(&a).all(|(x, a)| (x - a).abs() < 1e-6), "{:?}", r.x);
    }

    #[test]
    fn rosenbrock() {
        let opts = NmOptions {
            require_both: true,
            ..NmOptions::default()
        };
        let r = nelder_mead(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            &opts,
        );
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4, "{:?}", r.x);
    }

    #[test]
    fn best_so_far_is_monotone() {
        let r = nelder_mead(|x| (x[0] - 3.0).abs() + (x[1] + 1.0).powi(2), &[0.0, 0.0], &NmOptions::default());
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn respects_bounds() {
        let opts = NmOptions {
            bounds: Some((vec![-1.0], vec![1.0])),
            ..NmOptions::default()
        };
        let r = nelder_mead(|x| (x[0] - 5.0).powi(2), &[0.0], &opts);
        assert!((r.x[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn iteration_cap_flag() {
        let opts = NmOptions {
            max_iterations: 3,
            ..NmOptions::default()
        };
        let r = nelder_mead(|x| x[0] * x[0] + x[1] * x[1], &[1.0, 1.0], &opts);
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }
}
