//! Site complexes placed on every lattice site and joined along edges.
//!
//! Each lattice edge carries one letter, read from a port atom of the
//! assembled complex labelled `e{k}`, so tessellated words line up with
//! [`tessellated_language`].

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::amalgam::{Assembly, CrossBlockade, Placement};
use crate::error::{Error, Result};
use crate::expr::BooleanFunction;
use crate::gsm::{enumerate_gsm_with, realizes_with, GsmOptions};
use crate::io::ComplexDoc;
use crate::metrics::RobustnessKernel;
use crate::optim::{anneal, restart_seed, AnnealConfig, OptimizeConfig};
use crate::lattice::{slot_angle, tessellated_language_bounded, Lattice, LatticeKind, LatticeSpec};
use crate::model::{rational, Complex, Point, Rational};

/// A site complex together with the port read by each slot.
#[derive(Clone, Debug)]
pub struct SiteCell {
    pub complex: Complex,
    /// Port position (into `complex.ports()`) read by each slot.
    pub slot_ports: Vec<usize>,
}

impl SiteCell {
    pub fn new(complex: Complex, slot_ports: Vec<usize>) -> Result<Self> {
        let n = complex.n_ports();
        if slot_ports.iter().any(|&p| p >= n) {
            return Err(Error::invalid("slot port out of range"));
        }
        let mut s = slot_ports.clone();
        s.sort_unstable();
        s.dedup();
        if s.len() != slot_ports.len() {
            return Err(Error::invalid("slots must read distinct ports"));
        }
        Ok(SiteCell { complex, slot_ports })
    }

    pub fn slot_atom(&self, slot: usize) -> usize {
        self.complex.ports()[self.slot_ports[slot]].index
    }

    /// Mirror image (y → −y) read with slots 1 and 2 swapped, which turns an
    /// A site of the honeycomb lattice into a B site.
    pub fn mirrored(&self) -> Result<SiteCell> {
        let complex = match self.complex.positions() {
            Some(p) => {
                let q = p.iter().map(|v| Point::new(v.x, -v.y)).collect();
                self.complex.with_geometry(q, self.complex.radius())?
            }
            None => self.complex.clone(),
        };
        let mut slot_ports = self.slot_ports.clone();
        if slot_ports.len() == 3 {
            slot_ports.swap(1, 2);
        }
        SiteCell::new(complex, slot_ports)
    }
}

/// One site cell per sublattice. Geometric cells are given relative to their
/// site, whose lattice position is scaled by `spacing`.
#[derive(Clone, Debug)]
pub struct Tiling {
    pub cells: Vec<SiteCell>,
    pub spacing: Option<f64>,
}

impl Tiling {
    pub fn abstract_cells(cells: Vec<SiteCell>) -> Tiling {
        let cells = cells
            .into_iter()
            .map(|c| SiteCell {
                complex: c.complex.without_geometry(),
                slot_ports: c.slot_ports,
            })
            .collect();
        Tiling { cells, spacing: None }
    }

    fn geometric(&self) -> bool {
        self.spacing.is_some() && self.cells.iter().all(|c| c.complex.is_geometric())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeJoin {
    /// Identify the two port atoms of an edge (detunings add).
    Direct,
    /// Connect the two ports through a three-atom link (detunings 1, 2, 1).
    Interposer,
}

#[derive(Clone, Debug)]
pub struct Tessellation {
    pub lattice: Lattice,
    pub complex: Complex,
    pub join: EdgeJoin,
    /// True when the placed positions reproduce the blockade graph at the
    /// cell radius; false for wrap-around edges or cross-cell collisions.
    pub geometric: bool,
    /// Assembled atom of each cell atom, per site (`None` for removed ports).
    pub site_atoms: Vec<Vec<Option<usize>>>,
}

impl Tessellation {
    /// Sites whose slots are all present.
    pub fn bulk_sites(&self) -> Vec<usize> {
        (0..self.lattice.n_sites())
            .filter(|&s| {
                let site = &self.lattice.sites[s];
                site.slots.iter().all(|e| e.is_some())
                    && site.slots.iter().flatten().all(|&e| self.lattice.edges[e].b.is_some())
            })
            .collect()
    }

    /// Distinct detunings of atoms belonging only to bulk sites.
    pub fn bulk_detunings(&self) -> Vec<Rational> {
        let bulk = self.bulk_sites();
        let mut touched_by_boundary = vec![false; self.complex.n_atoms()];
        for (s, atoms) in self.site_atoms.iter().enumerate() {
            if !bulk.contains(&s) {
                for a in atoms.iter().flatten() {
                    touched_by_boundary[*a] = true;
                }
            }
        }
        let mut out: Vec<Rational> = bulk
            .iter()
            .flat_map(|&s| self.site_atoms[s].iter().flatten().copied())
            .filter(|&a| !touched_by_boundary[a])
            .map(|a| self.complex.detunings()[a])
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn atoms_per_cell(&self) -> f64 {
        let cells = self.lattice.spec.lx * self.lattice.spec.ly;
        self.complex.n_atoms() as f64 / cells as f64
    }
}

/// Link atom spacing relative to the blockade radius.
const LINK_SPACING: f64 = 0.9;

/// Places the tiling's cells on every site of `spec` and joins shared edges.
pub fn tessellate(tiling: &Tiling, spec: &LatticeSpec, join: EdgeJoin) -> Result<Tessellation> {
    if spec.bits_per_edge != 1 {
        return Err(Error::invalid("tessellation uses one port per edge"));
    }
    let sublattices = match spec.kind {
        LatticeKind::Square => 1,
        LatticeKind::Honeycomb => 2,
    };
    if tiling.cells.len() != sublattices {
        return Err(Error::Dimension {
            expected: sublattices,
            found: tiling.cells.len(),
        });
    }
    for c in &tiling.cells {
        if c.slot_ports.len() != spec.coordination() {
            return Err(Error::Dimension {
                expected: spec.coordination(),
                found: c.slot_ports.len(),
            });
        }
    }
    let lattice = Lattice::build(spec)?;
    let tiling = if tiling.geometric() {
        tiling.clone()
    } else {
        Tiling::abstract_cells(tiling.cells.clone())
    };
    match assemble(&tiling, &lattice, join, CrossBlockade::Forbid) {
        Err(Error::Collision { .. }) => assemble(&tiling, &lattice, join, CrossBlockade::Override),
        r => r,
    }
}

fn assemble(tiling: &Tiling, lattice: &Lattice, join: EdgeJoin, cross: CrossBlockade) -> Result<Tessellation> {
    let kind = lattice.spec.kind;
    let spacing = tiling.spacing;
    // interposed links stretch every bond by two link spacings
    let stretch = match (join, spacing) {
        (EdgeJoin::Interposer, Some(d)) => {
            let r = tiling.cells[0].complex.radius();
            (d + 2.0 * LINK_SPACING * r) / d
        }
        _ => 1.0,
    };
    let centre = |site: &crate::lattice::Site| -> Point {
        let d = spacing.unwrap_or(1.0) * stretch;
        Point::new(d * site.position.x, d * site.position.y)
    };

    let mut asm = Assembly::new();
    let mut site_atoms = Vec::with_capacity(lattice.n_sites());
    for site in &lattice.sites {
        let cell = &tiling.cells[site.sublattice];
        // drop ports of slots without an edge; such letters read 0
        let missing: Vec<usize> = (0..site.slots.len())
            .filter(|&k| site.slots[k].is_none())
            .map(|k| cell.slot_atom(k))
            .collect();
        let keep: Vec<usize> = (0..cell.complex.n_atoms()).filter(|a| !missing.contains(a)).collect();
        let sub = if missing.is_empty() {
            cell.complex.clone()
        } else {
            cell.complex.induced(&keep)?
        };
        let c = centre(site);
        let place = spacing.map(|_| Placement::new(c.x, c.y, 0.0));
        let idx = asm.add(&sub, place);
        let mut map = vec![None; cell.complex.n_atoms()];
        for (k, &a) in keep.iter().enumerate() {
            map[a] = Some(idx[k]);
        }
        site_atoms.push(map);
    }

    let mut wraps = false;
    let mut ports = Vec::with_capacity(lattice.n_edges());
    for (e, edge) in lattice.edges.iter().enumerate() {
        let sa = &lattice.sites[edge.a.site];
        let a = site_atoms[edge.a.site][tiling.cells[sa.sublattice].slot_atom(edge.a.slot)].expect("present slot");
        if let Some(bref) = edge.b {
            let sb = &lattice.sites[bref.site];
            let b = site_atoms[bref.site][tiling.cells[sb.sublattice].slot_atom(bref.slot)].expect("present slot");
            let adjacent = neighbour_direction(kind, sa.sublattice, edge.a.slot, &sa.position, &sb.position);
            match join {
                EdgeJoin::Direct => {
                    if adjacent {
                        asm.identify(a, b);
                    } else {
                        wraps = true;
                        asm.identify_remote(a, b);
                    }
                }
                EdgeJoin::Interposer => {
                    // the ports moved apart with their sites; the link sits between them
                    let mid_pos = spacing.map(|d| {
                        let ang = slot_angle(kind, sa.sublattice, edge.a.slot);
                        let cell = &tiling.cells[sa.sublattice];
                        let p = cell.complex.positions().expect("geometric")[cell.slot_atom(edge.a.slot)];
                        let c = centre(sa);
                        let h = 0.5 * d * (stretch - 1.0);
                        Point::new(c.x + p.x + h * ang.cos(), c.y + p.y + h * ang.sin())
                    });
                    // detunings 1, 2, 1 with the ends merged into the ports
                    let mid = asm.add_atom(rational(2), mid_pos);
                    asm.add_edge(a, mid);
                    asm.add_edge(mid, b);
                    asm.add_detuning(a, rational(1));
                    asm.add_detuning(b, rational(1));
                    if !adjacent {
                        wraps = true;
                    }
                }
            }
        }
        ports.push((format!("e{e}"), a));
    }
    let cross = if wraps { CrossBlockade::Override } else { cross };
    let fin = asm.final_indices();
    let site_atoms = site_atoms
        .into_iter()
        .map(|m| m.into_iter().map(|a| a.map(|a| fin[a])).collect())
        .collect();
    let complex = asm.finish(&ports, cross)?;
    let geometric = complex.is_geometric() && !complex.has_explicit_edges();
    Ok(Tessellation {
        lattice: lattice.clone(),
        complex,
        join,
        geometric,
        site_atoms,
    })
}

fn neighbour_direction(kind: LatticeKind, sublattice: usize, slot: usize, pa: &Point, pb: &Point) -> bool {
    let ang = slot_angle(kind, sublattice, slot);
    (pa.x + ang.cos() - pb.x).abs() < 1e-9 && (pa.y + ang.sin() - pb.y).abs() < 1e-9
}

#[derive(Clone, Debug, Serialize)]
pub struct TessellationCheck {
    pub ground_configurations: usize,
    pub language_words: usize,
    pub realized: bool,
    pub gap: String,
    pub reason: Option<String>,
}

/// Largest assembled complex that verification will enumerate.
pub const MAX_VERIFY_ATOMS: usize = 64;

/// Compares the tessellation's ground manifold with the tessellated language.
pub fn verify_tessellation(t: &Tessellation, check: &BooleanFunction) -> Result<TessellationCheck> {
    let lang = tessellated_language_bounded(&t.lattice.spec, check, 40)?;
    let opts = GsmOptions {
        max_atoms: MAX_VERIFY_ATOMS,
        ..GsmOptions::default()
    };
    let gsm = enumerate_gsm_with(&t.complex, &opts)?;
    let verdict = realizes_with(&t.complex, &gsm, &lang)?;
    let gap = if gsm.gap.is_zero() { Rational::zero() } else { gsm.gap };
    Ok(TessellationCheck {
        ground_configurations: gsm.len(),
        language_words: lang.len(),
        realized: verdict.is_yes(),
        gap: crate::model::format_rational(&gap),
        reason: match verdict {
            crate::gsm::Verdict::No { reason, .. } => Some(reason),
            _ => None,
        },
    })
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct CellDoc {
    pub complex: ComplexDoc,
    pub slot_ports: Vec<usize>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct TilingDoc {
    pub spacing: Option<f64>,
    pub cells: Vec<CellDoc>,
}

impl Tiling {
    pub fn to_json(&self) -> String {
        let doc = TilingDoc {
            spacing: self.spacing,
            cells: self
                .cells
                .iter()
                .map(|c| CellDoc {
                    complex: ComplexDoc::from_complex(&c.complex),
                    slot_ports: c.slot_ports.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("tiling serializes")
    }

    pub fn from_json(s: &str) -> Result<Tiling> {
        let doc: TilingDoc = serde_json::from_str(s).map_err(crate::io::parse_err)?;
        let cells = doc
            .cells
            .iter()
            .map(|c| SiteCell::new(c.complex.to_complex()?, c.slot_ports.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Tiling {
            cells,
            spacing: doc.spacing,
        })
    }
}

#[derive(Clone, Debug)]
pub struct FittedTiling {
    pub tiling: Tiling,
    /// Robustness of a 3×3 open patch, which contains every cell-to-cell contact.
    pub robustness: f64,
}

/// Finds cell geometries that tile the lattice: ancillas move freely, shared
/// ports are constrained so that neighbouring copies coincide. Honeycomb B
/// sites use the mirrored cell graph with their own geometry.
pub fn optimize_tiling(cell: &SiteCell, kind: LatticeKind, cfg: &OptimizeConfig) -> Result<FittedTiling> {
    let cells = match kind {
        LatticeKind::Square => vec![cell.clone()],
        LatticeKind::Honeycomb => vec![cell.clone(), cell.mirrored()?],
    };
    let patch_spec = LatticeSpec::new(kind, 3, 3, crate::lattice::Boundary::OpenRough);
    let patch = tessellate(&Tiling::abstract_cells(cells.clone()), &patch_spec, EdgeJoin::Direct)?;
    let kernel = RobustnessKernel::new(patch.complex.graph());
    let n = cell.complex.n_atoms();
    let slot_atoms: Vec<Vec<usize>> = cells
        .iter()
        .map(|c| (0..c.slot_ports.len()).map(|k| c.slot_atom(k)).collect())
        .collect();
    let free: Vec<Vec<usize>> = slot_atoms
        .iter()
        .map(|s| (0..n).filter(|a| !s.contains(a)).collect())
        .collect();
    let n_free: usize = free.iter().map(|f| 2 * f.len()).sum();
    let s3 = 3f64.sqrt();
    // lattice positions are scaled by 2, so bond midpoints sit at unit distance
    let cell_positions = |x: &[f64]| -> Vec<Vec<Point>> {
        let mut out = vec![vec![Point::default(); n]; cells.len()];
        let mut k = 0;
        for (c, f) in free.iter().enumerate() {
            for &a in f {
                out[c][a] = Point::new(x[k], x[k + 1]);
                k += 2;
            }
        }
        let y = &x[n_free..];
        match kind {
            LatticeKind::Square => {
                let s = &slot_atoms[0];
                out[0][s[0]] = Point::new(y[0], 1.0 + y[1]);
                out[0][s[1]] = Point::new(1.0 + y[2], y[3]);
                out[0][s[2]] = Point::new(y[0], -1.0 + y[1]);
                out[0][s[3]] = Point::new(-1.0 + y[2], y[3]);
            }
            LatticeKind::Honeycomb => {
                let v = Point::new(y[0], 1.0 + y[1]);
                let p1 = Point::new(-s3 / 2.0 + y[2], -0.5 + y[3]);
                let p2 = Point::new(s3 / 2.0 + y[4], -0.5 + y[5]);
                let (a, b) = (&slot_atoms[0], &slot_atoms[1]);
                out[0][a[0]] = v;
                out[0][a[1]] = p1;
                out[0][a[2]] = p2;
                out[1][b[0]] = Point::new(v.x, v.y - 2.0);
                out[1][b[1]] = Point::new(p1.x + s3, p1.y + 1.0);
                out[1][b[2]] = Point::new(p2.x - s3, p2.y + 1.0);
            }
        }
        out
    };
    let m = patch.complex.n_atoms();
    let patch_xy = |cp: &[Vec<Point>]| -> Vec<f64> {
        let mut xy = vec![0.0; 2 * m];
        for (s, site) in patch.lattice.sites.iter().enumerate() {
            for (a, r) in patch.site_atoms[s].iter().enumerate() {
                if let Some(r) = r {
                    let q = cp[site.sublattice][a];
                    xy[2 * r] = 2.0 * site.position.x + q.x;
                    xy[2 * r + 1] = 2.0 * site.position.y + q.y;
                }
            }
        }
        xy
    };
    let f = |x: &[f64]| -> f64 { -kernel.xi(&patch_xy(&cell_positions(x))) };
    let n_port = if kind == LatticeKind::Square { 4 } else { 6 };
    let mut lo = vec![-1.4; n_free];
    lo.extend(std::iter::repeat_n(-0.6, n_port));
    let mut hi = vec![1.4; n_free];
    hi.extend(std::iter::repeat_n(0.6, n_port));
    let run = |k: usize| {
        let ac = AnnealConfig {
            seed: restart_seed(cfg.anneal.seed, k),
            ..cfg.anneal.clone()
        };
        anneal(f, &lo, &hi, None, &ac)
    };
    let best = (0..cfg.restarts)
        .map(run)
        .reduce(|a, b| if b.f < a.f { b } else { a })
        .ok_or_else(|| Error::invalid("at least one restart is needed"))?;
    let xi = -best.f;
    if xi <= 0.0 {
        return Err(Error::invalid(format!("no tiling geometry found (best robustness {xi:.4})")));
    }
    let cp = cell_positions(&best.x);
    let r = crate::metrics::robustness(&unflat(&patch_xy(&cp)), patch.complex.graph());
    let scale = crate::metrics::normalization_scale(&r);
    let cells = cells
        .iter()
        .zip(&cp)
        .map(|(c, p)| {
            let q = p.iter().map(|v| Point::new(v.x * scale, v.y * scale)).collect();
            SiteCell::new(c.complex.with_geometry(q, 1.0)?, c.slot_ports.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FittedTiling {
        tiling: Tiling {
            cells,
            spacing: Some(2.0 * scale),
        },
        robustness: xi,
    })
}

fn unflat(x: &[f64]) -> Vec<Point> {
    x.chunks(2).map(|c| Point::new(c[0], c[1])).collect()
}
