//! Joining complexes by identifying ports.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gsm::{enumerate_gsm, realizes_with, GroundManifold, Verdict};
use crate::language::{gamma_intersection, GammaMap};
use crate::metrics::robustness;
use crate::model::{blockade_graph_of, BlockadeGraph, Complex, Language, Point, Port, Rational};
use crate::optim::{nelder_mead, NmOptions};

/// Coincidence tolerance for identified atoms.
pub const COINCIDENCE_TOL: f64 = 1e-9;

/// Rigid motion applied to the second complex: optional mirror (y → −y),
/// then rotation by `theta`, then translation.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Placement {
    pub dx: f64,
    pub dy: f64,
    pub theta: f64,
    pub mirror: bool,
}

impl Placement {
    pub fn new(dx: f64, dy: f64, theta: f64) -> Self {
        Placement {
            dx,
            dy,
            theta,
            mirror: false,
        }
    }

    pub fn apply(&self, p: &Point) -> Point {
        let y = if self.mirror { -p.y } else { p.y };
        let (s, c) = self.theta.sin_cos();
        Point::new(c * p.x - s * y + self.dx, s * p.x + c * y + self.dy)
    }
}

/// How cross blockades between atoms of different parts are handled in a geometric join.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CrossBlockade {
    /// Fail with a collision error listing the pairs.
    #[default]
    Forbid,
    /// Keep the geometric graph, extra blockades included.
    Keep,
    /// Keep the union of the parts' graphs as an explicit override.
    Override,
}

/// Incremental builder: add placed complexes, identify atoms, then finish.
#[derive(Clone, Debug)]
pub struct Assembly {
    detunings: Vec<Rational>,
    positions: Vec<Option<Point>>,
    edges: Vec<(usize, usize)>,
    part_of: Vec<usize>,
    parent: Vec<usize>,
    radius: Option<f64>,
    parts: usize,
    remote: bool,
}

impl Default for Assembly {
    fn default() -> Self {
        Self::new()
    }
}

impl Assembly {
    pub fn new() -> Self {
        Assembly {
            detunings: Vec::new(),
            positions: Vec::new(),
            edges: Vec::new(),
            part_of: Vec::new(),
            parent: Vec::new(),
            radius: None,
            parts: 0,
            remote: false,
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.detunings.len()
    }

    /// Adds a copy of `c`, moved by `place` when it has geometry. Returns the
    /// assembly index of each of its atoms.
    pub fn add(&mut self, c: &Complex, place: Option<Placement>) -> Vec<usize> {
        let base = self.detunings.len();
        self.detunings.extend_from_slice(c.detunings());
        match (c.positions(), place) {
            (Some(p), Some(pl)) => self.positions.extend(p.iter().map(|q| Some(pl.apply(q)))),
            (Some(p), None) => self.positions.extend(p.iter().map(|q| Some(*q))),
            (None, _) => self.positions.extend((0..c.n_atoms()).map(|_| None)),
        }
        self.edges.extend(c.graph().edges().into_iter().map(|(i, j)| (base + i, base + j)));
        self.part_of.extend(std::iter::repeat_n(self.parts, c.n_atoms()));
        self.parent.extend(base..base + c.n_atoms());
        if self.radius.is_none() && c.is_geometric() {
            self.radius = Some(c.radius());
        }
        self.parts += 1;
        (base..base + c.n_atoms()).collect()
    }

    /// Adds a free atom with no geometry.
    pub fn add_atom(&mut self, detuning: Rational, position: Option<Point>) -> usize {
        self.detunings.push(detuning);
        self.positions.push(position);
        self.part_of.push(self.parts);
        self.parts += 1;
        self.parent.push(self.detunings.len() - 1);
        self.detunings.len() - 1
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        self.edges.push((i, j));
    }

    pub fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    /// Identifies atoms `a` and `b`; the smaller root survives.
    pub fn identify(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }

    /// Adds `extra` to the detuning of atom `a`.
    pub fn add_detuning(&mut self, a: usize, extra: Rational) {
        self.detunings[a] += extra;
    }

    /// Index each assembly atom will have in the finished complex.
    pub fn final_indices(&mut self) -> Vec<usize> {
        let n = self.detunings.len();
        let roots: Vec<usize> = (0..n).map(|i| self.find(i)).collect();
        let mut new_index = vec![usize::MAX; n];
        let mut k = 0;
        for i in 0..n {
            if roots[i] == i {
                new_index[i] = k;
                k += 1;
            }
        }
        roots.iter().map(|&r| new_index[r]).collect()
    }

    /// Identifies atoms that need not coincide (periodic wrap-around). The
    /// finished complex then keeps the union graph as explicit edges.
    pub fn identify_remote(&mut self, a: usize, b: usize) {
        self.remote = true;
        self.identify(a, b);
    }

    /// Builds the complex. `ports` are (label, assembly atom) in order.
    pub fn finish(mut self, ports: &[(String, usize)], cross: CrossBlockade) -> Result<Complex> {
        let n = self.detunings.len();
        let roots: Vec<usize> = (0..n).map(|i| self.find(i)).collect();
        let mut new_index = vec![usize::MAX; n];
        let mut order = Vec::new();
        for i in 0..n {
            if roots[i] == i {
                new_index[i] = order.len();
                order.push(i);
            }
        }
        let m = order.len();
        let mut det = vec![Rational::zero(); m];
        for i in 0..n {
            det[new_index[roots[i]]] += self.detunings[i];
        }
        let mut graph = BlockadeGraph::empty(m)?;
        for &(i, j) in &self.edges {
            let (a, b) = (new_index[roots[i]], new_index[roots[j]]);
            if a == b {
                return Err(Error::invalid(format!(
                    "identified atoms {i} and {j} are in blockade with each other"
                )));
            }
            graph.add_edge(a, b)?;
        }
        let port_list: Vec<Port> = ports
            .iter()
            .map(|(l, a)| Port::new(l.clone(), new_index[roots[*a]]))
            .collect();

        let geometric = n > 0 && self.positions.iter().all(|p| p.is_some());
        if !geometric {
            return Complex::abstract_graph(graph, det, port_list);
        }
        let mut pos = vec![Point::default(); m];
        for i in 0..n {
            let p = self.positions[i].expect("geometric");
            let r = roots[i];
            if r == i {
                pos[new_index[r]] = p;
            } else {
                let q = self.positions[r].expect("geometric");
                if !self.remote && p.dist(&q) > COINCIDENCE_TOL * (1.0 + q.x.abs().max(q.y.abs())) {
                    return Err(Error::invalid(format!(
                        "identified atoms {r} and {i} are {:.3e} apart",
                        p.dist(&q)
                    )));
                }
            }
        }
        let radius = self.radius.unwrap_or(1.0);
        if self.remote {
            return Complex::with_explicit_edges(Some(pos), det, port_list, radius, graph);
        }
        let derived = blockade_graph_of(&pos, radius)?;
        if derived == graph {
            return Complex::geometric(pos, det, port_list, radius);
        }
        match cross {
            CrossBlockade::Forbid => {
                let mut pairs = Vec::new();
                for (a, b) in derived.edges() {
                    if !graph.has_edge(a, b) {
                        pairs.push((order[a], order[b]));
                    }
                }
                for (a, b) in graph.edges() {
                    if !derived.has_edge(a, b) {
                        pairs.push((order[a], order[b]));
                    }
                }
                Err(Error::Collision { pairs })
            }
            CrossBlockade::Keep => Complex::geometric(pos, det, port_list, radius),
            CrossBlockade::Override => Complex::with_explicit_edges(Some(pos), det, port_list, radius, graph),
        }
    }
}

/// Whether identified ports stay ports in the result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Demotion {
    /// Demote iff the reduced and plain intersections have the same size.
    #[default]
    Auto,
    Never,
    Always,
}

#[derive(Clone, Debug, Default)]
pub struct AmalgamOptions {
    /// Rigid motion for the second complex; `None` for geometric complexes
    /// means auto-placement.
    pub placement: Option<Placement>,
    /// Drop geometry and join the blockade graphs only.
    pub abstract_only: bool,
    pub cross: CrossBlockade,
    pub demotion: Demotion,
}

#[derive(Clone, Debug)]
pub struct Amalgam {
    pub complex: Complex,
    /// γ-intersection predicted for the result's ports.
    pub language: Language,
    pub demoted: bool,
    pub placement: Option<Placement>,
}

/// Port-projected ground manifold of a complex, if it is a function of the ports.
pub fn language_of(c: &Complex) -> Result<(Language, GroundManifold)> {
    let gsm = enumerate_gsm(c)?;
    let words = gsm.port_words(c);
    let l = Language::new(c.n_ports(), words)?;
    Ok((l, gsm))
}

fn resolve_gamma(c1: &Complex, c2: &Complex, gamma: &[(String, String)]) -> Result<(GammaMap, Vec<(usize, usize)>)> {
    let mut pos = Vec::new();
    let mut atoms = Vec::new();
    for (a, b) in gamma {
        let i = c1
            .port_position(a)
            .ok_or_else(|| Error::invalid(format!("first complex has no port `{a}`")))?;
        let j = c2
            .port_position(b)
            .ok_or_else(|| Error::invalid(format!("second complex has no port `{b}`")))?;
        pos.push((i, j));
        atoms.push((c1.ports()[i].index, c2.ports()[j].index));
    }
    Ok((GammaMap::new(pos)?, atoms))
}

/// Parses `"Q:A,R:B"` into label pairs.
pub fn parse_gamma(s: &str) -> Result<Vec<(String, String)>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| match t.split_once(':') {
            Some((a, b)) if !a.trim().is_empty() && !b.trim().is_empty() => {
                Ok((a.trim().to_string(), b.trim().to_string()))
            }
            _ => Err(Error::invalid(format!("`{t}` is not a port pair of the form A:B"))),
        })
        .collect()
}

fn fresh_label(label: &str, taken: &BTreeSet<String>) -> String {
    if !taken.contains(label) {
        return label.to_string();
    }
    (2..).map(|k| format!("{label}{k}")).find(|l| !taken.contains(l)).expect("unbounded")
}

/// Result ports: all of c1's (or only unpaired ones when demoted), then c2's unpaired.
fn result_ports(
    c1: &Complex,
    c2: &Complex,
    g: &GammaMap,
    demoted: bool,
    map1: &[usize],
    map2: &[usize],
) -> Vec<(String, usize)> {
    let paired1: BTreeSet<usize> = g.first().into_iter().collect();
    let paired2: BTreeSet<usize> = g.second().into_iter().collect();
    let mut taken = BTreeSet::new();
    let mut out = Vec::new();
    for (k, p) in c1.ports().iter().enumerate() {
        if demoted && paired1.contains(&k) {
            continue;
        }
        taken.insert(p.label.clone());
        out.push((p.label.clone(), map1[p.index]));
    }
    for (k, p) in c2.ports().iter().enumerate() {
        if paired2.contains(&k) {
            continue;
        }
        let l = fresh_label(&p.label, &taken);
        taken.insert(l.clone());
        out.push((l, map2[p.index]));
    }
    out
}

fn build(
    c1: &Complex,
    c2: &Complex,
    atoms: &[(usize, usize)],
    g: &GammaMap,
    demoted: bool,
    place: Option<Placement>,
    geometric: bool,
    cross: CrossBlockade,
) -> Result<Complex> {
    let mut asm = Assembly::new();
    let (a, b) = if geometric {
        (c1.clone(), c2.clone())
    } else {
        (c1.without_geometry(), c2.without_geometry())
    };
    let map1 = asm.add(&a, None);
    let map2 = asm.add(&b, place);
    for &(i, j) in atoms {
        asm.identify(map1[i], map2[j]);
    }
    let ports = result_ports(c1, c2, g, demoted, &map1, &map2);
    asm.finish(&ports, cross)
}

pub fn amalgamate(c1: &Complex, c2: &Complex, gamma: &[(String, String)], opts: &AmalgamOptions) -> Result<Amalgam> {
    let (l1, _) = language_of(c1)?;
    let (l2, _) = language_of(c2)?;
    amalgamate_with_languages(c1, &l1, c2, &l2, gamma, opts)
}

/// Same as [`amalgamate`] with the port languages supplied by the caller.
pub fn amalgamate_with_languages(
    c1: &Complex,
    l1: &Language,
    c2: &Complex,
    l2: &Language,
    gamma: &[(String, String)],
    opts: &AmalgamOptions,
) -> Result<Amalgam> {
    let (g, atoms) = resolve_gamma(c1, c2, gamma)?;
    let full = gamma_intersection(l1, l2, &g, false)?;
    if full.is_empty() {
        return Err(Error::EmptyLanguage(
            "the port languages have no words agreeing on the identified letters".into(),
        ));
    }
    let reduced = gamma_intersection(l1, l2, &g, true)?;
    let demoted = match opts.demotion {
        Demotion::Auto => !g.is_empty() && reduced.len() == full.len(),
        Demotion::Never => false,
        Demotion::Always => true,
    };
    let language = if demoted { reduced } else { full };
    let geometric = !opts.abstract_only && c1.is_geometric() && c2.is_geometric();
    if geometric && (c1.radius() - c2.radius()).abs() > 1e-12 * c1.radius().max(c2.radius()) {
        return Err(Error::invalid("geometric amalgamation needs equal blockade radii"));
    }
    let placement = if geometric {
        Some(match opts.placement {
            Some(p) => p,
            None => auto_place(c1, c2, &atoms)?,
        })
    } else {
        None
    };
    let complex = build(c1, c2, &atoms, &g, demoted, placement, geometric, opts.cross)?;
    Ok(Amalgam {
        complex,
        language,
        demoted,
        placement,
    })
}

/// Rigid placement of `c2` that makes identified ports coincide and
/// maximizes the robustness of the joined graph. With one identified pair
/// the rotation is free: a coarse scan over angles and mirror images is
/// refined by Nelder–Mead. With more pairs the motion is fixed up to the mirror.
pub fn auto_place(c1: &Complex, c2: &Complex, atoms: &[(usize, usize)]) -> Result<Placement> {
    let p1 = c1.positions().ok_or_else(|| Error::invalid("first complex has no geometry"))?;
    let p2 = c2.positions().ok_or_else(|| Error::invalid("second complex has no geometry"))?;
    if atoms.is_empty() {
        return Err(Error::invalid(
            "auto-placement needs at least one identified pair; give an explicit placement",
        ));
    }
    let target = {
        let mut asm = Assembly::new();
        let a = asm.add(&c1.without_geometry(), None);
        let b = asm.add(&c2.without_geometry(), None);
        for &(i, j) in atoms {
            asm.identify(a[i], b[j]);
        }
        asm.finish(&[], CrossBlockade::Forbid)?.graph().clone()
    };
    let joined_positions = |pl: &Placement| -> Vec<Point> {
        let mut asm_pos: Vec<Point> = p1.to_vec();
        let paired: BTreeSet<usize> = atoms.iter().map(|a| a.1).collect();
        for (j, q) in p2.iter().enumerate() {
            if !paired.contains(&j) {
                asm_pos.push(pl.apply(q));
            }
        }
        asm_pos
    };
    // the union graph numbers c1's atoms first, then c2's unpaired ones in order
    let score = |pl: &Placement| -> f64 { robustness(&joined_positions(pl), &target).xi };

    let anchor = |theta: f64, mirror: bool| -> Placement {
        let (i, j) = atoms[0];
        let base = Placement {
            dx: 0.0,
            dy: 0.0,
            theta,
            mirror,
        };
        let q = base.apply(&p2[j]);
        Placement {
            dx: p1[i].x - q.x,
            dy: p1[i].y - q.y,
            ..base
        }
    };
    let coincide = |pl: &Placement| -> bool {
        atoms.iter().all(|&(i, j)| {
            let q = pl.apply(&p2[j]);
            q.dist(&p1[i]) <= COINCIDENCE_TOL * (1.0 + p1[i].x.abs().max(p1[i].y.abs()))
        })
    };

    let mut best: Option<(f64, Placement)> = None;
    let consider = |pl: Placement, best: &mut Option<(f64, Placement)>| {
        let s = score(&pl);
        if best.is_none_or(|(b, _)| s > b) {
            *best = Some((s, pl));
        }
    };
    if atoms.len() == 1 {
        for mirror in [false, true] {
            let steps = 72;
            let mut local: Option<(f64, Placement)> = None;
            for k in 0..steps {
                consider(anchor(2.0 * PI * k as f64 / steps as f64, mirror), &mut local);
            }
            let (_, pl) = local.expect("scanned");
            let r = nelder_mead(
                |t| -score(&anchor(t[0], mirror)),
                &[pl.theta + 1e-3],
                &NmOptions {
                    initial_step: 0.02,
                    ..NmOptions::default()
                },
            );
            consider(anchor(r.x[0], mirror), &mut best);
            consider(pl, &mut best);
        }
    } else {
        let (i0, j0) = atoms[0];
        let (i1, j1) = atoms[1];
        for mirror in [false, true] {
            let m = |p: &Point| if mirror { Point::new(p.x, -p.y) } else { *p };
            let a = (p1[i1].y - p1[i0].y).atan2(p1[i1].x - p1[i0].x);
            let (q0, q1) = (m(&p2[j0]), m(&p2[j1]));
            let b = (q1.y - q0.y).atan2(q1.x - q0.x);
            let pl = anchor(a - b, mirror);
            if coincide(&pl) {
                consider(pl, &mut best);
            }
        }
    }
    match best {
        Some((_, pl)) if coincide(&pl) => Ok(pl),
        _ => Err(Error::invalid(
            "no rigid placement makes all identified ports coincide",
        )),
    }
}

#[derive(Clone, Debug)]
pub struct AmalgamReport {
    pub passed: bool,
    pub energy_additive: bool,
    pub language_realized: bool,
    pub e0_first: Rational,
    pub e0_second: Rational,
    pub e0_amalgam: Option<Rational>,
    pub diagnostics: Vec<String>,
    pub amalgam: Option<Amalgam>,
}

/// Builds the amalgam and checks E0 additivity and that its ground manifold
/// realizes the predicted γ-intersection.
pub fn verify_amalgamation(c1: &Complex, c2: &Complex, gamma: &[(String, String)], opts: &AmalgamOptions) -> Result<AmalgamReport> {
    let (l1, g1) = language_of(c1)?;
    let (l2, g2) = language_of(c2)?;
    let mut diagnostics = Vec::new();
    let amalgam = match amalgamate_with_languages(c1, &l1, c2, &l2, gamma, opts) {
        Ok(a) => a,
        Err(Error::EmptyLanguage(m)) => {
            diagnostics.push(format!("empty language: {m}"));
            return Ok(AmalgamReport {
                passed: false,
                energy_additive: false,
                language_realized: false,
                e0_first: g1.ground_energy,
                e0_second: g2.ground_energy,
                e0_amalgam: None,
                diagnostics,
                amalgam: None,
            });
        }
        Err(e) => return Err(e),
    };
    let g = enumerate_gsm(&amalgam.complex)?;
    let energy_additive = g.ground_energy == g1.ground_energy + g2.ground_energy;
    if !energy_additive {
        diagnostics.push(format!(
            "E0 of the amalgam is {} but the parts sum to {}",
            g.ground_energy,
            g1.ground_energy + g2.ground_energy
        ));
    }
    let verdict = realizes_with(&amalgam.complex, &g, &amalgam.language)?;
    if let Verdict::No { reason, .. } = &verdict {
        diagnostics.push(reason.clone());
    }
    let language_realized = verdict.is_yes();
    Ok(AmalgamReport {
        passed: energy_additive && language_realized,
        energy_additive,
        language_realized,
        e0_first: g1.ground_energy,
        e0_second: g2.ground_energy,
        e0_amalgam: Some(g.ground_energy),
        diagnostics,
        amalgam: Some(amalgam),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::named;
    use crate::model::rational;

    fn not_gate() -> Complex {
        Complex::geometric(
            vec![Point::new(0.0, 0.0), Point::new(0.7, 0.0)],
            vec![rational(1), rational(1)],
            vec![Port::new("A", 0), Port::new("Q", 1)],
            1.0,
        )
        .unwrap()
    }

    fn pair(a: &str, b: &str) -> Vec<(String, String)> {
        vec![(a.to_string(), b.to_string())]
    }

    #[test]
    fn two_nots_make_a_link() {
        let n = not_gate();
        let a = amalgamate(&n, &n, &pair("Q", "A"), &AmalgamOptions::default()).unwrap();
        assert!(a.demoted);
        assert_eq!(a.complex.n_atoms(), 3);
        assert_eq!(a.complex.detunings(), &[rational(1), rational(2), rational(1)]);
        assert_eq!(a.language, named::lnk());
        let labels: Vec<&str> = a.complex.ports().iter().map(|p| p.label.as_str()).collect();
        assert_eq!(labels, vec!["A", "Q"]);
        let pos = a.complex.positions().unwrap();
        assert!(pos[0].dist(&pos[2]) >= 1.0);
        let r = verify_amalgamation(&n, &n, &pair("Q", "A"), &AmalgamOptions::default()).unwrap();
        assert!(r.passed, "{:?}", r.diagnostics);
    }

    #[test]
    fn explicit_placement_collision() {
        let n = not_gate();
        let opts = AmalgamOptions {
            placement: Some(Placement::new(0.7, 0.0, 0.0)),
            ..AmalgamOptions::default()
        };
        // the second NOT folds back next to the first one's A
        let r = amalgamate(&n, &n, &pair("Q", "A"), &AmalgamOptions {
            placement: Some(Placement::new(0.7, 0.0, PI * 0.9)),
            ..AmalgamOptions::default()
        });
        assert!(matches!(r, Err(Error::Collision { .. })), "{r:?}");
        assert!(amalgamate(&n, &n, &pair("Q", "A"), &opts).is_ok());
    }

    #[test]
    fn empty_join_reported() {
        // NOT's A and Q never agree with a LNK-forced pair
        let n = not_gate();
        let gamma = vec![("A".to_string(), "A".to_string()), ("Q".to_string(), "Q".to_string())];
        let mut lnk = amalgamate(&n, &n, &pair("Q", "A"), &AmalgamOptions::default()).unwrap().complex;
        lnk = lnk.without_geometry();
        let r = verify_amalgamation(&n.without_geometry(), &lnk, &gamma, &AmalgamOptions::default()).unwrap();
        assert!(!r.passed);
        assert!(r.diagnostics[0].contains("empty language"));
    }

    #[test]
    fn gamma_parsing() {
        assert_eq!(parse_gamma("Q:A, R:B").unwrap().len(), 2);
        assert!(parse_gamma("Q-A").is_err());
    }
}
