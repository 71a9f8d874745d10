//! Scale-invariant geometric quality metrics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{BlockadeGraph, Complex, Point, Rational};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Robustness {
    pub xi: f64,
    /// Largest distance between blockaded atoms and the pair attaining it.
    pub max_edge: Option<(f64, (usize, usize))>,
    /// Smallest distance between unblockaded atoms and the pair attaining it.
    pub min_non_edge: Option<(f64, (usize, usize))>,
}

impl Robustness {
    /// True when one of the two extrema ranges over an empty set.
    pub fn degenerate(&self) -> bool {
        self.max_edge.is_none() || self.min_non_edge.is_none()
    }
}

/// ξ = (min non-edge distance − max edge distance) / (their sum); +1 when
/// the graph is complete or empty.
pub fn robustness(positions: &[Point], target: &BlockadeGraph) -> Robustness {
    let n = positions.len();
    let mut max_edge: Option<(f64, (usize, usize))> = None;
    let mut min_non: Option<(f64, (usize, usize))> = None;
    for i in 0..n {
        for j in i + 1..n {
            let d = positions[i].dist(&positions[j]);
            if target.has_edge(i, j) {
                if max_edge.is_none_or(|(m, _)| d > m) {
                    max_edge = Some((d, (i, j)));
                }
            } else if min_non.is_none_or(|(m, _)| d < m) {
                min_non = Some((d, (i, j)));
            }
        }
    }
    let xi = match (max_edge, min_non) {
        (Some((a, _)), Some((b, _))) if a + b > 0.0 => (b - a) / (b + a),
        (Some(_), Some(_)) => -1.0,
        _ => 1.0,
    };
    Robustness {
        xi,
        max_edge,
        min_non_edge: min_non,
    }
}

fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// s = (Δmax^{1/6} − Δmin^{1/6}) / (Δmax^{1/6} + Δmin^{1/6}).
pub fn spread(detunings: &[Rational]) -> Result<f64> {
    let max = detunings.iter().max().ok_or_else(|| Error::invalid("spread of an empty detuning list"))?;
    let min = detunings.iter().min().expect("nonempty");
    let a = to_f64(max).powf(1.0 / 6.0);
    let b = to_f64(min).powf(1.0 / 6.0);
    Ok((a - b) / (a + b))
}

/// Positions scaled about the origin so that the blockade radius
/// ½(max edge distance + min non-edge distance) becomes 1.
pub fn normalize(positions: &[Point], target: &BlockadeGraph) -> Result<Vec<Point>> {
    let r = robustness(positions, target);
    if r.xi <= 0.0 {
        return Err(Error::invalid(format!(
            "cannot normalize a geometry with robustness {:.6} <= 0",
            r.xi
        )));
    }
    let scale = normalization_scale(&r);
    Ok(positions.iter().map(|p| Point::new(p.x * scale, p.y * scale)).collect())
}

/// Factor that maps the midpoint radius to 1; 1 for degenerate graphs
/// unless one extremum exists.
pub fn normalization_scale(r: &Robustness) -> f64 {
    let radius = match (r.max_edge, r.min_non_edge) {
        (Some((a, _)), Some((b, _))) => 0.5 * (a + b),
        (Some((a, _)), None) => a / 0.9,
        (None, Some((b, _))) => b / 1.1,
        (None, None) => 1.0,
    };
    if radius > 0.0 {
        1.0 / radius
    } else {
        1.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometryReport {
    pub robustness: f64,
    pub spread: f64,
    pub valid: bool,
    pub degenerate: bool,
    pub max_blockade_distance: Option<f64>,
    pub min_nonblockade_distance: Option<f64>,
    pub max_blockade_pair: Option<(usize, usize)>,
    pub min_nonblockade_pair: Option<(usize, usize)>,
    pub normalization_scale: f64,
    /// Whether the geometry at its own radius reproduces the complex's graph.
    pub graph_matches_radius: bool,
}

pub fn geometry_report(complex: &Complex) -> Result<GeometryReport> {
    let pos = complex
        .positions()
        .ok_or_else(|| Error::invalid("geometry metrics need atom positions"))?;
    let r = robustness(pos, complex.graph());
    let s = spread(complex.detunings())?;
    let derived = crate::model::blockade_graph_of(pos, complex.radius())?;
    Ok(GeometryReport {
        robustness: r.xi,
        spread: s,
        valid: s < r.xi,
        degenerate: r.degenerate(),
        max_blockade_distance: r.max_edge.map(|e| e.0),
        min_nonblockade_distance: r.min_non_edge.map(|e| e.0),
        max_blockade_pair: r.max_edge.map(|e| e.1),
        min_nonblockade_pair: r.min_non_edge.map(|e| e.1),
        normalization_scale: normalization_scale(&r),
        graph_matches_radius: &derived == complex.graph(),
    })
}

/// Flat-coordinate robustness kernel used inside optimizers:
/// `xy = [x0, y0, x1, y1, ...]`.
pub struct RobustnessKernel {
    edges: Vec<(usize, usize)>,
    non_edges: Vec<(usize, usize)>,
}

impl RobustnessKernel {
    pub fn new(target: &BlockadeGraph) -> Self {
        let n = target.n_vertices();
        let mut edges = Vec::new();
        let mut non_edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if target.has_edge(i, j) {
                    edges.push((i, j));
                } else {
                    non_edges.push((i, j));
                }
            }
        }
        RobustnessKernel { edges, non_edges }
    }

    pub fn xi(&self, xy: &[f64]) -> f64 {
        let d2 = |(i, j): (usize, usize)| {
            let dx = xy[2 * i] - xy[2 * j];
            let dy = xy[2 * i + 1] - xy[2 * j + 1];
            dx * dx + dy * dy
        };
        if self.edges.is_empty() || self.non_edges.is_empty() {
            return 1.0;
        }
        let a = self.edges.iter().map(|&e| d2(e)).fold(0.0, f64::max).sqrt();
        let b = self.non_edges.iter().map(|&e| d2(e)).fold(f64::INFINITY, f64::min).sqrt();
        if a + b > 0.0 {
            (b - a) / (b + a)
        } else {
            -1.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rational;

    #[test]
    fn direct_formula() {
        // edge 0-1 at 0.8, non-edge 1-2 at 1.2 and 0-2 at 2.0
        let p = [Point::new(0.0, 0.0), Point::new(0.8, 0.0), Point::new(2.0, 0.0)];
        let g = BlockadeGraph::from_edges(3, &[(0, 1)]).unwrap();
        let r = robustness(&p, &g);
        assert!((r.xi - 0.2).abs() < 1e-12);
        assert_eq!(r.min_non_edge.unwrap().1, (1, 2));
        let k = RobustnessKernel::new(&g);
        let flat: Vec<f64> = p.iter().flat_map(|q| [q.x, q.y]).collect();
        assert!((k.xi(&flat) - r.xi).abs() < 1e-15);
    }

    #[test]
    fn spreads() {
        assert_eq!(spread(&[rational(2), rational(2)]).unwrap(), 0.0);
        let s = spread(&[rational(1), rational(2)]).unwrap();
        assert!((s - 0.058).abs() < 5e-4);
        assert!((s - 0.057698).abs() < 1e-6);
        let t = 3f64.powf(1.0 / 6.0);
        assert!((spread(&[rational(1), rational(3)]).unwrap() - (t - 1.0) / (t + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn normalize_scale() {
        let p = [
            Point::new(0.0, 0.0),
            Point::new(0.8, 0.0),
            Point::new(0.8, 0.9),
            Point::new(0.8, 2.2),
        ];
        let g = BlockadeGraph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        let n = normalize(&p, &g).unwrap();
        let r = robustness(&n, &g);
        assert!((r.max_edge.unwrap().0 + r.min_non_edge.unwrap().0 - 2.0).abs() < 1e-12);
        let seven: Vec<Point> = p.iter().map(|q| Point::new(7.0 * q.x, 7.0 * q.y)).collect();
        let m = normalize(&seven, &g).unwrap();
        assert!(m.iter().zip(&n).all(|(a, b)| a.dist(b) < 1e-12));
        let again = normalize(&n, &g).unwrap();
        assert!(again.iter().zip(&n).all(|(a, b)| a.dist(b) < 1e-12));
    }

    #[test]
    fn degenerate_graphs() {
        let p = [Point::new(0.0, 0.0), Point::new(5.0, 0.0)];
        let g = BlockadeGraph::empty(2).unwrap();
        let r = robustness(&p, &g);
        assert_eq!(r.xi, 1.0);
        assert!(r.degenerate());
    }
}
