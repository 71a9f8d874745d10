//! Finite square and honeycomb lattices, and tessellated languages.
//!
//! Slot order at a site is the bit-projector order of the check function:
//! square sites read (north, east, south, west); honeycomb sites read their
//! three edges counterclockwise from the vertical one, so an A site reads
//! (up, lower-left, lower-right) and a B site (down, upper-right, upper-left).
//! Edges are numbered by first appearance when sites are scanned in order and
//! each site's slots in slot order.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::expr::BooleanFunction;
use crate::model::{Language, Point, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeKind {
    Square,
    Honeycomb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    /// Every boundary slot gets a dangling edge whose far end is free.
    OpenRough,
    /// Square only: rough top and bottom, and missing edges (read as 0) on
    /// the left and right sides.
    OpenSmoothSides,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    pub lx: usize,
    pub ly: usize,
    pub boundary: Boundary,
    pub bits_per_edge: usize,
}

impl LatticeSpec {
    pub fn new(kind: LatticeKind, lx: usize, ly: usize, boundary: Boundary) -> Self {
        LatticeSpec {
            kind,
            lx,
            ly,
            boundary,
            bits_per_edge: 1,
        }
    }

    pub fn coordination(&self) -> usize {
        match self.kind {
            LatticeKind::Square => 4,
            LatticeKind::Honeycomb => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlotRef {
    pub site: usize,
    pub slot: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeEdge {
    pub a: SlotRef,
    /// `None` for a dangling boundary edge.
    pub b: Option<SlotRef>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Site {
    pub position: Point,
    /// Edge index per slot; `None` where the slot has no edge.
    pub slots: Vec<Option<usize>>,
    /// Unit cell coordinates and sublattice (0 for square, 0/1 = A/B for honeycomb).
    pub cell: (usize, usize),
    pub sublattice: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    pub spec: LatticeSpec,
    pub sites: Vec<Site>,
    pub edges: Vec<LatticeEdge>,
}

/// Unit direction of each slot, as an angle.
pub fn slot_angle(kind: LatticeKind, sublattice: usize, slot: usize) -> f64 {
    match kind {
        LatticeKind::Square => [PI / 2.0, 0.0, -PI / 2.0, PI][slot],
        LatticeKind::Honeycomb => {
            let a = [PI / 2.0, 7.0 * PI / 6.0, 11.0 * PI / 6.0][slot];
            if sublattice == 0 {
                a
            } else {
                a + PI
            }
        }
    }
}

impl Lattice {
    pub fn build(spec: &LatticeSpec) -> Result<Lattice> {
        if spec.lx == 0 || spec.ly == 0 || spec.bits_per_edge == 0 {
            return Err(Error::invalid("lattice dimensions and bits per edge must be positive"));
        }
        if spec.lx.saturating_mul(spec.ly) > 4096 {
            return Err(Error::Resource("lattice exceeds 4096 unit cells".into()));
        }
        match spec.kind {
            LatticeKind::Square => Self::square(spec),
            LatticeKind::Honeycomb => {
                if spec.boundary == Boundary::OpenSmoothSides {
                    return Err(Error::invalid("smooth sides are defined for the square lattice only"));
                }
                Self::honeycomb(spec)
            }
        }
    }

    fn square(spec: &LatticeSpec) -> Result<Lattice> {
        let (lx, ly) = (spec.lx, spec.ly);
        let periodic = spec.boundary == Boundary::Periodic;
        if periodic && (lx == 1 || ly == 1) {
            return Err(Error::DegenerateLattice(format!(
                "a periodic {lx}x{ly} square lattice has edges from a site to itself"
            )));
        }
        let idx = |x: usize, y: usize| y * lx + x;
        let sites = (0..ly)
            .flat_map(|y| (0..lx).map(move |x| (x, y)))
            .map(|(x, y)| Site {
                position: Point::new(x as f64, y as f64),
                slots: vec![None; 4],
                cell: (x, y),
                sublattice: 0,
            })
            .collect();
        // partner of (x, y, slot): N <-> S of the site above, E <-> W of the site to the right
        let partner = |x: usize, y: usize, slot: usize| -> Partner {
            let (dx, dy, back): (isize, isize, usize) = match slot {
                0 => (0, 1, 2),
                1 => (1, 0, 3),
                2 => (0, -1, 0),
                _ => (-1, 0, 1),
            };
            let nx = x as isize + dx;
            let ny = y as isize + dy;
            let inside = nx >= 0 && ny >= 0 && (nx as usize) < lx && (ny as usize) < ly;
            if inside || periodic {
                let nx = nx.rem_euclid(lx as isize) as usize;
                let ny = ny.rem_euclid(ly as isize) as usize;
                Partner::Slot(SlotRef {
                    site: idx(nx, ny),
                    slot: back,
                })
            } else if spec.boundary == Boundary::OpenSmoothSides && (slot == 1 || slot == 3) {
                Partner::Absent
            } else {
                Partner::Dangling
            }
        };
        let mut l = Lattice {
            spec: spec.clone(),
            sites,
            edges: Vec::new(),
        };
        for y in 0..ly {
            for x in 0..lx {
                for slot in 0..4 {
                    l.connect(SlotRef { site: idx(x, y), slot }, partner(x, y, slot));
                }
            }
        }
        Ok(l)
    }

    fn honeycomb(spec: &LatticeSpec) -> Result<Lattice> {
        let (lx, ly) = (spec.lx, spec.ly);
        let periodic = spec.boundary == Boundary::Periodic;
        let idx = |i: usize, j: usize, s: usize| 2 * (j * lx + i) + s;
        let s3 = 3f64.sqrt();
        let mut sites = Vec::new();
        for j in 0..ly {
            for i in 0..lx {
                let ax = i as f64 * s3 + j as f64 * s3 / 2.0;
                let ay = j as f64 * 1.5;
                for s in 0..2 {
                    sites.push(Site {
                        position: Point::new(ax, ay + s as f64),
                        slots: vec![None; 3],
                        cell: (i, j),
                        sublattice: s,
                    });
                }
            }
        }
        let partner = |i: usize, j: usize, s: usize, slot: usize| -> Partner {
            // (di, dj, other sublattice slot)
            let (di, dj, back): (isize, isize, usize) = match (s, slot) {
                (0, 0) => (0, 0, 0),
                (0, 1) => (0, -1, 1),
                (0, 2) => (1, -1, 2),
                (1, 0) => (0, 0, 0),
                (1, 1) => (0, 1, 1),
                _ => (-1, 1, 2),
            };
            let ni = i as isize + di;
            let nj = j as isize + dj;
            let inside = ni >= 0 && nj >= 0 && (ni as usize) < lx && (nj as usize) < ly;
            if inside || periodic {
                let ni = ni.rem_euclid(lx as isize) as usize;
                let nj = nj.rem_euclid(ly as isize) as usize;
                Partner::Slot(SlotRef {
                    site: idx(ni, nj, 1 - s),
                    slot: back,
                })
            } else {
                Partner::Dangling
            }
        };
        let mut l = Lattice {
            spec: spec.clone(),
            sites,
            edges: Vec::new(),
        };
        for j in 0..ly {
            for i in 0..lx {
                for s in 0..2 {
                    for slot in 0..3 {
                        l.connect(SlotRef { site: idx(i, j, s), slot }, partner(i, j, s, slot));
                    }
                }
            }
        }
        Ok(l)
    }

    fn connect(&mut self, a: SlotRef, b: Partner) {
        if self.sites[a.site].slots[a.slot].is_some() {
            return;
        }
        let e = self.edges.len();
        match b {
            Partner::Absent => return,
            Partner::Dangling => self.edges.push(LatticeEdge { a, b: None }),
            Partner::Slot(b) => {
                self.edges.push(LatticeEdge { a, b: Some(b) });
                self.sites[b.site].slots[b.slot] = Some(e);
            }
        }
        self.sites[a.site].slots[a.slot] = Some(e);
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    /// Number of letters in a tessellated word.
    pub fn n_bits(&self) -> usize {
        self.edges.len() * self.spec.bits_per_edge
    }

    pub fn dangling_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].b.is_none()).collect()
    }
}

enum Partner {
    Slot(SlotRef),
    Dangling,
    Absent,
}

/// Default bound on the number of letters of an explicit tessellated language.
pub const MAX_TESSELLATION_BITS: usize = 32;

/// All edge-bit assignments that satisfy `check` at every site.
pub fn tessellated_language(spec: &LatticeSpec, check: &BooleanFunction) -> Result<Language> {
    tessellated_language_bounded(spec, check, MAX_TESSELLATION_BITS)
}

pub fn tessellated_language_bounded(spec: &LatticeSpec, check: &BooleanFunction, max_bits: usize) -> Result<Language> {
    let lat = Lattice::build(spec)?;
    let k = spec.bits_per_edge;
    let g = spec.coordination() * k;
    if check.n_inputs() != g {
        return Err(Error::Dimension {
            expected: g,
            found: check.n_inputs(),
        });
    }
    let nbits = lat.n_bits();
    if nbits > max_bits.min(64) {
        return Err(Error::Resource(format!(
            "{nbits} edge bits exceed the tessellation bound of {}",
            max_bits.min(64)
        )));
    }
    let n_edges = lat.n_edges();
    // sites become checkable once their last edge is assigned
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); n_edges + 1];
    for (s, site) in lat.sites.iter().enumerate() {
        let last = site.slots.iter().flatten().max().map_or(0, |&e| e + 1);
        ready[last].push(s);
    }
    let mut words = Vec::new();
    let mut assign = vec![0u64; n_edges];
    let ok = |s: usize, assign: &[u64]| -> bool {
        let mut row = 0usize;
        for (slot, e) in lat.sites[s].slots.iter().enumerate() {
            if let Some(e) = e {
                row |= (assign[*e] as usize) << (slot * k);
            }
        }
        check.row(row)
    };
    if ready[0].iter().all(|&s| ok(s, &assign)) {
        walk(0, &lat, &ready, k, &mut assign, &ok, &mut words);
    }
    Language::new(
        nbits,
        words.into_iter().map(|bits| Word::from_bits(bits, nbits)),
    )
}

fn walk(
    e: usize,
    lat: &Lattice,
    ready: &[Vec<usize>],
    k: usize,
    assign: &mut Vec<u64>,
    ok: &dyn Fn(usize, &[u64]) -> bool,
    out: &mut Vec<u64>,
) {
    if e == lat.n_edges() {
        let bits = assign.iter().enumerate().fold(0u64, |b, (i, &v)| b | v << (i * k));
        out.push(bits);
        return;
    }
    for v in 0..1u64 << k {
        assign[e] = v;
        if ready[e + 1].iter().all(|&s| ok(s, assign)) {
            walk(e + 1, lat, ready, k, assign, ok, out);
        }
    }
    assign[e] = 0;
}
