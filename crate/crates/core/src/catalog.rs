//! Shipped primitive complexes and the lattice models built from them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gsm::{enumerate_gsm, realizes_with};
use crate::io::{parse_err, CatalogDoc};
use crate::lattice::{Boundary, LatticeKind, LatticeSpec};
use crate::metrics::geometry_report;
use crate::model::{format_rational, Complex, Language};
use crate::tessellate::{tessellate, EdgeJoin, Tessellation, Tiling};

pub const NAMES: [&str; 15] = [
    "NOT",
    "LNK",
    "CPY",
    "NOR_ring",
    "NOR_triangle",
    "AND",
    "OR",
    "NAND",
    "XOR",
    "XNOR",
    "CRS",
    "ICRS",
    "SCU",
    "FMU",
    "FIB_SITE",
];

const FILES: [&str; 15] = [
    include_str!("../catalog/not.json"),
    include_str!("../catalog/lnk.json"),
    include_str!("../catalog/cpy.json"),
    include_str!("../catalog/nor_ring.json"),
    include_str!("../catalog/nor_triangle.json"),
    include_str!("../catalog/and.json"),
    include_str!("../catalog/or.json"),
    include_str!("../catalog/nand.json"),
    include_str!("../catalog/xor.json"),
    include_str!("../catalog/xnor.json"),
    include_str!("../catalog/crs.json"),
    include_str!("../catalog/icrs.json"),
    include_str!("../catalog/scu.json"),
    include_str!("../catalog/fmu.json"),
    include_str!("../catalog/fib_site.json"),
];

const SURFACE_CODE_TILE: &str = include_str!("../catalog/tiles/surface_code.json");
const FIBONACCI_TILE: &str = include_str!("../catalog/tiles/fibonacci.json");

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub complex: Complex,
    pub language: Language,
    /// Smallest atom count of any complex realizing the language.
    pub minimal_atom_count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationRecord {
    pub ground_states: usize,
    pub ground_energy: String,
    pub gap: String,
    pub realized: bool,
    pub robustness: f64,
    pub spread: f64,
    pub valid: bool,
}

impl CatalogEntry {
    pub fn verify(&self) -> Result<VerificationRecord> {
        let gsm = enumerate_gsm(&self.complex)?;
        let realized = realizes_with(&self.complex, &gsm, &self.language)?.is_yes();
        let r = geometry_report(&self.complex)?;
        Ok(VerificationRecord {
            ground_states: gsm.len(),
            ground_energy: format_rational(&gsm.ground_energy),
            gap: format_rational(&gsm.gap),
            realized,
            robustness: r.robustness,
            spread: r.spread,
            valid: r.valid,
        })
    }
}

/// Catalog entry by name, ignoring case.
pub fn catalog(name: &str) -> Result<CatalogEntry> {
    let k = NAMES
        .iter()
        .position(|n| n.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownEntry {
            name: name.into(),
            available: NAMES.join(", "),
        })?;
    let doc: CatalogDoc = serde_json::from_str(FILES[k]).map_err(parse_err)?;
    Ok(CatalogEntry {
        name: NAMES[k].into(),
        complex: doc.complex.to_complex()?,
        language: doc.language.to_language()?,
        minimal_atom_count: doc.minimal_atom_count,
    })
}

pub fn surface_code_tiling() -> Result<Tiling> {
    Tiling::from_json(SURFACE_CODE_TILE)
}

pub fn fibonacci_tiling() -> Result<Tiling> {
    Tiling::from_json(FIBONACCI_TILE)
}

fn check_kind(spec: &LatticeSpec, kind: LatticeKind) -> Result<()> {
    if spec.kind != kind {
        return Err(Error::invalid(format!("this model lives on the {kind:?} lattice")));
    }
    Ok(())
}

/// Surface-code loop model: one vertex complex per site, edge ports shared.
/// Smooth open sides drop the missing port, leaving a three-port parity complex.
pub fn build_surface_code(spec: &LatticeSpec) -> Result<Tessellation> {
    check_kind(spec, LatticeKind::Square)?;
    tessellate(&surface_code_tiling()?, spec, EdgeJoin::Direct)
}

/// Fibonacci string-net model on the honeycomb: each unit cell holds two
/// site complexes (one mirrored). `Interposer` separates sites by a link
/// atom instead of merging their ports.
pub fn build_fibonacci(spec: &LatticeSpec, join: EdgeJoin) -> Result<Tessellation> {
    check_kind(spec, LatticeKind::Honeycomb)?;
    if spec.boundary == Boundary::OpenSmoothSides {
        return Err(Error::invalid("the Fibonacci model supports periodic and open-rough boundaries"));
    }
    tessellate(&fibonacci_tiling()?, spec, join)
}

/// Number of ground states of the periodic Fibonacci model on `plaquettes`
/// hexagons: (1+φ²)^M + (1+φ⁻²)^M, rounded.
pub fn fibonacci_count(plaquettes: u32) -> u64 {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    ((1.0 + phi * phi).powi(plaquettes as i32) + (1.0 + 1.0 / (phi * phi)).powi(plaquettes as i32)).round() as u64
}
