//! Geometry optimization of complexes with a fixed blockade graph and fixed detunings.

pub mod anneal;
pub mod nelder_mead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use anneal::{anneal, AnnealConfig, AnnealResult, TraceRow};
pub use nelder_mead::{nelder_mead, NmOptions, NmResult};

use crate::error::{Error, Result};
use crate::gsm::enumerate_gsm;
use crate::metrics::{geometry_report, normalize, GeometryReport, RobustnessKernel};
use crate::model::{Complex, Point};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Objective {
    /// Minimize −ξ.
    Robustness,
    /// Minimize width/gap of the classical vdW spectrum over the hard-blockade ground manifold.
    VdwRatio { c6: f64 },
}

#[derive(Clone, Debug)]
pub struct OptimizeConfig {
    pub anneal: AnnealConfig,
    pub restarts: usize,
    /// Coordinate box `(lower, upper)`; default is a square of side 4√N around the start centroid.
    pub bounds: Option<(Vec<f64>, Vec<f64>)>,
    /// Run restarts on the rayon pool; results do not depend on this flag.
    pub parallel: bool,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            anneal: AnnealConfig::default(),
            restarts: 8,
            bounds: None,
            parallel: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RestartSummary {
    pub seed: u64,
    pub objective: f64,
    pub robustness: f64,
}

#[derive(Clone, Debug)]
pub struct Optimized {
    pub complex: Complex,
    pub report: GeometryReport,
    /// Trace of the winning restart.
    pub trace: Vec<TraceRow>,
    pub restarts: Vec<RestartSummary>,
    pub objective: f64,
    /// ξ > 0 for the returned geometry.
    pub success: bool,
}

/// Seed of restart `k`, derived with a splitmix step.
pub fn restart_seed(seed: u64, k: usize) -> u64 {
    let mut z = seed.wrapping_add((k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn flat(p: &[Point]) -> Vec<f64> {
    p.iter().flat_map(|q| [q.x, q.y]).collect()
}

fn unflat(x: &[f64]) -> Vec<Point> {
    x.chunks(2).map(|c| Point::new(c[0], c[1])).collect()
}

/// Starting positions: the complex's own geometry, or a seeded random scatter.
pub fn initial_positions(complex: &Complex, seed: u64) -> Vec<Point> {
    match complex.positions() {
        Some(p) => p.to_vec(),
        None => {
            let n = complex.n_atoms();
            let side = (n as f64).sqrt();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| Point::new(rng.random::<f64>() * side, rng.random::<f64>() * side))
                .collect()
        }
    }
}

pub fn default_bounds(start: &[Point]) -> (Vec<f64>, Vec<f64>) {
    let n = start.len() as f64;
    let cx = start.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = start.iter().map(|p| p.y).sum::<f64>() / n;
    let h = 2.0 * n.sqrt();
    let lo = start.iter().flat_map(|_| [cx - h, cy - h]).collect();
    let hi = start.iter().flat_map(|_| [cx + h, cy + h]).collect();
    (lo, hi)
}

struct VdwKernel {
    det: Vec<f64>,
    c6: f64,
    logical: Vec<bool>,
}

impl VdwKernel {
    fn ratio(&self, xy: &[f64]) -> f64 {
        let n = self.det.len();
        let mut pair = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..i {
                let dx = xy[2 * i] - xy[2 * j];
                let dy = xy[2 * i + 1] - xy[2 * j + 1];
                let r2 = dx * dx + dy * dy;
                let u = if r2 == 0.0 { f64::INFINITY } else { self.c6 / (r2 * r2 * r2) };
                pair[i * n + j] = u;
                pair[j * n + i] = u;
            }
        }
        let mut e = vec![0.0f64; 1 << n];
        let mut lmax = f64::NEG_INFINITY;
        let mut lmin = f64::INFINITY;
        let mut other = f64::INFINITY;
        for m in 1usize..(1 << n) {
            let top = usize::BITS as usize - 1 - m.leading_zeros() as usize;
            let rest = m & !(1 << top);
            let mut v = e[rest] - self.det[top];
            let mut r = rest;
            while r != 0 {
                let j = r.trailing_zeros() as usize;
                v += pair[top * n + j];
                r &= r - 1;
            }
            e[m] = v;
        }
        for (m, &v) in e.iter().enumerate() {
            if self.logical[m] {
                lmax = lmax.max(v);
                lmin = lmin.min(v);
            } else {
                other = other.min(v);
            }
        }
        let gap = other - lmax;
        if gap > 0.0 {
            (lmax - lmin) / gap
        } else {
            f64::INFINITY
        }
    }
}

/// Best geometry for the complex's blockade graph and detunings under the objective.
pub fn optimize_geometry(complex: &Complex, objective: Objective, cfg: &OptimizeConfig) -> Result<Optimized> {
    if cfg.anneal.max_iterations == 0 || cfg.restarts == 0 {
        return Err(Error::invalid("iterations and restarts must be at least 1"));
    }
    let n = complex.n_atoms();
    let kernel = RobustnessKernel::new(complex.graph());
    let vdw = match objective {
        Objective::Robustness => None,
        Objective::VdwRatio { c6 } => {
            if n > crate::gsm::MAX_VDW_ATOMS {
                return Err(Error::Resource(format!("{n} atoms are too many for the vdW objective")));
            }
            if !(c6 > 0.0 && c6.is_finite()) {
                return Err(Error::invalid("c6 must be positive"));
            }
            let gsm = enumerate_gsm(complex)?;
            let mut logical = vec![false; 1 << n];
            for c in &gsm.configurations {
                logical[c.occupied().iter().fold(0usize, |m, i| m | 1 << i)] = true;
            }
            Some(VdwKernel {
                det: complex
                    .detunings()
                    .iter()
                    .map(|d| *d.numer() as f64 / *d.denom() as f64)
                    .collect(),
                c6,
                logical,
            })
        }
    };
    let eval = |x: &[f64]| -> f64 {
        match &vdw {
            None => -kernel.xi(x),
            Some(k) => k.ratio(x),
        }
    };

    let start = initial_positions(complex, cfg.anneal.seed);
    let (lo, hi) = cfg.bounds.clone().unwrap_or_else(|| default_bounds(&start));
    if lo.len() != 2 * n || hi.len() != 2 * n {
        return Err(Error::Dimension {
            expected: 2 * n,
            found: lo.len(),
        });
    }
    let x0: Vec<f64> = flat(&start)
        .iter()
        .enumerate()
        .map(|(i, &v)| v.clamp(lo[i], hi[i]))
        .collect();

    let run = |k: usize| -> (u64, AnnealResult) {
        let seed = restart_seed(cfg.anneal.seed, k);
        let ac = AnnealConfig {
            seed,
            ..cfg.anneal.clone()
        };
        (seed, anneal(eval, &lo, &hi, Some(&x0), &ac))
    };
    let results: Vec<(u64, AnnealResult)> = if cfg.parallel {
        (0..cfg.restarts).into_par_iter().map(run).collect()
    } else {
        (0..cfg.restarts).map(run).collect()
    };
    let restarts = results
        .iter()
        .map(|(seed, r)| RestartSummary {
            seed: *seed,
            objective: r.f,
            robustness: kernel.xi(&r.x),
        })
        .collect();
    // first restart wins ties
    let (_, best) = results
        .into_iter()
        .reduce(|a, b| if b.1.f < a.1.f { b } else { a })
        .expect("at least one restart");

    let mut pos = unflat(&best.x);
    let xi = kernel.xi(&best.x);
    let success = xi > 0.0;
    if success && matches!(objective, Objective::Robustness) {
        pos = normalize(&pos, complex.graph())?;
    }
    let radius = if success && matches!(objective, Objective::Robustness) {
        1.0
    } else {
        complex.radius()
    };
    let out = complex.with_geometry(pos, radius)?;
    let report = geometry_report(&out)?;
    Ok(Optimized {
        complex: out,
        report,
        trace: best.trace,
        restarts,
        objective: best.f,
        success,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rational, BlockadeGraph, Port};

    #[test]
    fn ring_from_random_start() {
        let g = BlockadeGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let c = Complex::abstract_graph(g, [1, 1, 2, 2, 1].map(rational).to_vec(), vec![Port::new("A", 0)]).unwrap();
        let cfg = OptimizeConfig {
            anneal: AnnealConfig {
                max_iterations: 200,
                seed: 5,
                ..AnnealConfig::default()
            },
            restarts: 2,
            ..OptimizeConfig::default()
        };
        let r = optimize_geometry(&c, Objective::Robustness, &cfg).unwrap();
        assert!(r.success);
        assert!(r.report.robustness > 0.2, "{}", r.report.robustness);
        assert_eq!(r.complex.graph(), c.graph());
        assert_eq!(r.complex.detunings(), c.detunings());
        assert!(!r.complex.has_explicit_edges());
        assert!(r.trace.windows(2).all(|w| w[1].best <= w[0].best));
    }
}
