//! Generalized simulated annealing (Tsallis–Stariolo visiting distribution)
//! with an optional Nelder–Mead local phase, following the classic
//! dual-annealing scheme: a strategy chain of 2·dim visits per iteration,
//! a Tsallis acceptance rule, and re-annealing once the temperature has
//! dropped below a fixed fraction of its start.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::nelder_mead::{nelder_mead, NmOptions};

#[derive(Clone, Debug)]
pub struct AnnealConfig {
    pub max_iterations: usize,
    pub initial_temperature: f64,
    /// Visiting parameter q_v in (1, 3).
    pub visit: f64,
    /// Acceptance parameter q_a < 1.
    pub accept: f64,
    pub restart_temperature_ratio: f64,
    pub local_search: bool,
    pub max_evaluations: usize,
    pub seed: u64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            max_iterations: 2000,
            initial_temperature: 5230.0,
            visit: 2.62,
            accept: -5.0,
            restart_temperature_ratio: 2e-5,
            local_search: true,
            max_evaluations: 10_000_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub best: f64,
    pub current: f64,
}

#[derive(Clone, Debug)]
pub struct AnnealResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub trace: Vec<TraceRow>,
}

const TAIL_LIMIT: f64 = 1e8;
const MIN_VISIT_BOUND: f64 = 1e-10;

struct Visiting {
    qv: f64,
    lower: Vec<f64>,
    range: Vec<f64>,
    factor4_p: f64,
    factor6: f64,
}

impl Visiting {
    fn new(lower: &[f64], upper: &[f64], qv: f64) -> Self {
        let factor2 = ((4.0 - qv) * (qv - 1.0).ln()).exp();
        let factor3 = ((2.0 - qv) * 2f64.ln() / (qv - 1.0)).exp();
        let factor4_p = std::f64::consts::PI.sqrt() * factor2 / (factor3 * (3.0 - qv));
        let factor5 = 1.0 / (qv - 1.0) - 0.5;
        let d1 = 2.0 - factor5;
        let pi = std::f64::consts::PI;
        let factor6 = pi * (1.0 - factor5) / (pi * (1.0 - factor5)).sin() / libm::lgamma(d1).exp();
        Visiting {
            qv,
            lower: lower.to_vec(),
            range: upper.iter().zip(lower).map(|(u, l)| u - l).collect(),
            factor4_p,
            factor6,
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, temperature: f64) -> f64 {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        let qv = self.qv;
        let factor1 = (temperature.ln() / (qv - 1.0)).exp();
        let factor4 = self.factor4_p * factor1;
        let x = x * (-(qv - 1.0) * (self.factor6 / factor4).ln() / (3.0 - qv)).exp();
        let den = ((qv - 1.0) * y.abs().ln() / (3.0 - qv)).exp();
        x / den
    }

    fn wrap(&self, i: usize, v: f64) -> f64 {
        let a = v - self.lower[i];
        let b = a % self.range[i] + self.range[i];
        let mut w = b % self.range[i] + self.lower[i];
        if (w - self.lower[i]).abs() < MIN_VISIT_BOUND {
            w += MIN_VISIT_BOUND;
        }
        w
    }

    fn visit(&self, rng: &mut ChaCha8Rng, x: &[f64], step: usize, temperature: f64) -> Vec<f64> {
        let dim = x.len();
        if step < dim {
            let mut visits: Vec<f64> = (0..dim).map(|_| self.draw(rng, temperature)).collect();
            let upper: f64 = rng.random();
            let lower: f64 = rng.random();
            for v in visits.iter_mut() {
                if *v > TAIL_LIMIT {
                    *v = TAIL_LIMIT * upper;
                } else if *v < -TAIL_LIMIT {
                    *v = -TAIL_LIMIT * lower;
                }
            }
            (0..dim).map(|i| self.wrap(i, visits[i] + x[i])).collect()
        } else {
            let mut out = x.to_vec();
            let mut v = self.draw(rng, temperature);
            if v > TAIL_LIMIT {
                v = TAIL_LIMIT * rng.random::<f64>();
            } else if v < -TAIL_LIMIT {
                v = -TAIL_LIMIT * rng.random::<f64>();
            }
            let i = step - dim;
            out[i] = self.wrap(i, v + x[i]);
            out
        }
    }
}

struct Counted<F> {
    f: F,
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn call(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

/// Minimizes `f` over the box `[lower, upper]`, starting at `x0` when given.
pub fn anneal<F: FnMut(&[f64]) -> f64>(
    f: F,
    lower: &[f64],
    upper: &[f64],
    x0: Option<&[f64]>,
    cfg: &AnnealConfig,
) -> AnnealResult {
    let dim = lower.len();
    assert_eq!(upper.len(), dim);
    assert!(lower.iter().zip(upper).all(|(l, u)| u > l), "bounds must be non-degenerate");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut fun = Counted { f, evaluations: 0 };
    let visiting = Visiting::new(lower, upper, cfg.visit);
    let qa = cfg.accept;
    let nm_opts = NmOptions {
        max_iterations: (dim * 6).clamp(100, 1000),
        max_evaluations: (dim * 6).clamp(100, 1000) * 2,
        bounds: Some((lower.to_vec(), upper.to_vec())),
        ..NmOptions::default()
    };

    let random_point = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..dim).map(|i| lower[i] + rng.random::<f64>() * (upper[i] - lower[i])).collect()
    };
    let reset = |rng: &mut ChaCha8Rng, fun: &mut Counted<F>| -> (Vec<f64>, f64) {
        for _ in 0..1000 {
            let x = random_point(rng);
            let e = fun.call(&x);
            if e.is_finite() {
                return (x, e);
            }
        }
        let x = random_point(rng);
        let e = fun.call(&x);
        (x, e)
    };

    let (mut cur_x, mut cur_e) = match x0 {
        Some(x) => {
            let x = x.to_vec();
            let e = fun.call(&x);
            if e.is_finite() {
                (x, e)
            } else {
                reset(&mut rng, &mut fun)
            }
        }
        None => reset(&mut rng, &mut fun),
    };
    let mut best_x = cur_x.clone();
    let mut best_e = cur_e;
    let mut xmin = cur_x.clone();
    let mut emin = cur_e;
    let mut not_improved = 0usize;
    let mut not_improved_max = 1000usize;

    let t1 = ((cfg.visit - 1.0) * 2f64.ln()).exp() - 1.0;
    let t_restart = cfg.initial_temperature * cfg.restart_temperature_ratio;
    let mut iteration = 0usize;
    let mut trace = Vec::new();
    let mut stop = false;

    'outer: while !stop {
        for i in 0..cfg.max_iterations {
            let s = i as f64 + 2.0;
            let t2 = ((cfg.visit - 1.0) * s.ln()).exp() - 1.0;
            let temperature = cfg.initial_temperature * t1 / t2;
            if iteration >= cfg.max_iterations {
                stop = true;
                break;
            }
            if temperature < t_restart {
                let (x, e) = reset(&mut rng, &mut fun);
                cur_x = x;
                cur_e = e;
                continue 'outer;
            }

            // strategy chain
            let t_step = temperature / (i as f64 + 1.0);
            not_improved += 1;
            let mut improved = i == 0;
            for j in 0..2 * dim {
                let xv = visiting.visit(&mut rng, &cur_x, j, temperature);
                let e = fun.call(&xv);
                if e < cur_e {
                    cur_x = xv;
                    cur_e = e;
                    if e < best_e {
                        best_x = cur_x.clone();
                        best_e = e;
                        improved = true;
                        not_improved = 0;
                    }
                } else {
                    let r: f64 = rng.random();
                    let pqv_temp = 1.0 - (1.0 - qa) * (e - cur_e) / t_step;
                    let pqv = if pqv_temp <= 0.0 {
                        0.0
                    } else {
                        (pqv_temp.ln() / (1.0 - qa)).exp()
                    };
                    if r <= pqv {
                        cur_x = xv;
                        cur_e = e;
                        xmin = cur_x.clone();
                    }
                    if not_improved >= not_improved_max && (j == 0 || cur_e < emin) {
                        emin = cur_e;
                        xmin = cur_x.clone();
                    }
                }
                if fun.evaluations >= cfg.max_evaluations {
                    stop = true;
                    break;
                }
            }

            if cfg.local_search && !stop {
                if improved {
                    let r = nelder_mead(|x| fun.call(x), &best_x, &nm_opts);
                    if r.f < best_e {
                        not_improved = 0;
                        best_x = r.x.clone();
                        best_e = r.f;
                        cur_x = r.x;
                        cur_e = r.f;
                    }
                }
                if not_improved >= not_improved_max {
                    let r = nelder_mead(|x| fun.call(x), &xmin, &nm_opts);
                    xmin = r.x.clone();
                    emin = r.f;
                    not_improved = 0;
                    not_improved_max = dim;
                    if r.f < best_e {
                        best_x = r.x.clone();
                        best_e = r.f;
                        cur_x = r.x;
                        cur_e = r.f;
                    }
                }
                if fun.evaluations >= cfg.max_evaluations {
                    stop = true;
                }
            }
            trace.push(TraceRow {
                iteration,
                best: best_e,
                current: cur_e,
            });
            iteration += 1;
            if stop {
                break;
            }
        }
        if iteration >= cfg.max_iterations {
            stop = true;
        }
    }

    AnnealResult {
        x: best_x,
        f: best_e,
        iterations: iteration,
        evaluations: fun.evaluations,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rastrigin(x: &[f64]) -> f64 {
        10.0 * x.len() as f64
            + x.iter()
                .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos())
                .sum::<f64>()
    }

    #[test]
    fn finds_rastrigin_minimum() {
        let cfg = AnnealConfig {
            max_iterations: 300,
            seed: 7,
            ..AnnealConfig::default()
        };
        let r = anneal(rastrigin, &[-5.12; 4], &[5.12; 4], None, &cfg);
        // every non-global local minimum is at least 1 away
        assert!(r.f < 1e-3, "{}", r.f);
    }

    #[test]
    fn deterministic_for_seed() {
        let cfg = AnnealConfig {
            max_iterations: 50,
            seed: 3,
            ..AnnealConfig::default()
        };
        let a = anneal(rastrigin, &[-5.0; 3], &[5.0; 3], None, &cfg);
        let b = anneal(rastrigin, &[-5.0; 3], &[5.0; 3], None, &cfg);
        assert_eq!(a.x, b.x);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn trace_best_is_monotone() {
        let cfg = AnnealConfig {
            max_iterations: 100,
            seed: 11,
            ..AnnealConfig::default()
        };
        let r = anneal(rastrigin, &[-5.0; 2], &[5.0; 2], Some(&[4.0, 4.0]), &cfg);
        assert_eq!(r.trace.len(), 100);
        assert!(r.trace.windows(2).all(|w| w[1].best <= w[0].best));
    }
}
