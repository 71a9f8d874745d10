//! Rebuilds the shipped catalog files under `catalog/`.
//!
//! Run with `cargo run --release --example regenerate_catalog`.

use std::fs;
use std::path::Path;

use blockforge::amalgam::{amalgamate, AmalgamOptions, Assembly, CrossBlockade, Demotion, Placement};
use blockforge::gsm::realizes_language;
use blockforge::io::{CatalogDoc, ComplexDoc, LanguageDoc};
use blockforge::language::{gamma_intersection, named, GammaMap};
use blockforge::lattice::LatticeKind;
use blockforge::metrics::geometry_report;
use blockforge::model::{rational, BlockadeGraph, Complex, Language, Port, Rational};
use blockforge::optim::{optimize_geometry, Objective, OptimizeConfig};
use blockforge::search::{search_minimal, FoundComplex, SearchOptions, SearchOutcome};
use blockforge::tessellate::{optimize_tiling, SiteCell};

fn found(lang: &Language) -> (usize, Vec<FoundComplex>) {
    found_within(lang, 11)
}

fn found_within(lang: &Language, max_atoms: usize) -> (usize, Vec<FoundComplex>) {
    search(lang, max_atoms, true)
}

fn search(lang: &Language, max_atoms: usize, exhaustive: bool) -> (usize, Vec<FoundComplex>) {
    let opts = SearchOptions {
        max_atoms,
        exhaustive,
        ..SearchOptions::default()
    };
    match search_minimal(lang, max_atoms, &opts).expect("search runs") {
        SearchOutcome::Found { n_atoms, complexes, .. } => (n_atoms, complexes),
        SearchOutcome::Infeasible(_) => panic!("no complex for {lang}"),
    }
}

fn relabel(c: &Complex, labels: &[&str]) -> Complex {
    let ports = c
        .ports()
        .iter()
        .zip(labels)
        .map(|(p, l)| Port::new(*l, p.index))
        .collect();
    c.with_ports(ports).expect("labels fit")
}

fn best_geometry(candidates: &[Complex]) -> Complex {
    candidates
        .iter()
        .map(|c| optimize_geometry(c, Objective::Robustness, &OptimizeConfig::default()).expect("optimizer runs"))
        .max_by(|a, b| a.report.robustness.total_cmp(&b.report.robustness))
        .expect("at least one candidate")
        .complex
}

fn abstract_complex(n: usize, edges: &[(usize, usize)], det: &[i64], ports: &[&str]) -> Complex {
    let g = BlockadeGraph::from_edges(n, edges).expect("edges in range");
    let d: Vec<Rational> = det.iter().map(|&v| rational(v)).collect();
    let p = ports.iter().enumerate().map(|(i, l)| Port::new(*l, i)).collect();
    Complex::abstract_graph(g, d, p).expect("valid complex")
}

fn write_entry(dir: &Path, name: &str, complex: &Complex, language: &Language, minimal: usize) {
    assert!(realizes_language(complex, language).unwrap().is_yes(), "{name} does not realize its language");
    let r = geometry_report(complex).unwrap();
    println!(
        "{name:13} atoms {:2} minimal {minimal:2} xi {:.4} s {:.4} valid {}",
        complex.n_atoms(),
        r.robustness,
        r.spread,
        r.valid
    );
    assert!(r.valid && r.graph_matches_radius, "{name} geometry is not valid");
    let doc = CatalogDoc {
        name: name.into(),
        minimal_atom_count: minimal,
        complex: ComplexDoc::from_complex(complex),
        language: LanguageDoc::from_language(language),
    };
    let file = dir.join(format!("{}.json", name.to_lowercase()));
    fs::write(file, serde_json::to_string_pretty(&doc).unwrap() + "\n").unwrap();
}

fn gate(dir: &Path, name: &str, lang: Language, labels: &[&str]) {
    let (n, cs) = found(&lang);
    let cands: Vec<Complex> = cs.iter().map(|f| relabel(&f.complex, labels)).collect();
    write_entry(dir, name, &best_geometry(&cands), &lang, n);
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("catalog");
    fs::create_dir_all(dir.join("tiles")).unwrap();

    gate(&dir, "NOT", named::not(), &["A", "Q"]);
    gate(&dir, "LNK", named::lnk(), &["A", "Q"]);
    gate(&dir, "CPY", named::cpy(), &["A", "Q", "R"]);
    for (name, lang) in [
        ("AND", named::and()),
        ("OR", named::or()),
        ("NAND", named::nand()),
        ("XOR", named::xor()),
        ("XNOR", named::xnor()),
    ] {
        gate(&dir, name, lang, &["A", "B", "Q"]);
    }

    let (n, cs) = found(&named::nor());
    let gates = ["A", "B", "Q"];
    let triangle: Vec<Complex> = cs
        .iter()
        .filter(|f| f.complex.graph().n_edges() == 7)
        .map(|f| relabel(&f.complex, &gates))
        .collect();
    let ring: Vec<Complex> = cs
        .iter()
        .filter(|f| f.complex.graph().n_edges() == 5)
        .map(|f| relabel(&f.complex, &gates))
        .collect();
    write_entry(&dir, "NOR_triangle", &best_geometry(&triangle), &named::nor(), n);
    write_entry(&dir, "NOR_ring", &best_geometry(&ring), &named::nor(), n);

    // planar inverted crossing: four ancillas in a clique, each touching two ports
    let icrs = abstract_complex(
        8,
        &[
            (0, 4),
            (1, 4),
            (0, 5),
            (2, 5),
            (1, 6),
            (3, 6),
            (2, 7),
            (3, 7),
            (4, 5),
            (4, 6),
            (4, 7),
            (5, 6),
            (5, 7),
            (6, 7),
        ],
        &[1, 1, 1, 1, 3, 3, 3, 3],
        &["A", "B", "Q", "R"],
    );
    let (icrs_min, _) = found(&named::icrs());
    let icrs = best_geometry(&[icrs]);
    write_entry(&dir, "ICRS", &icrs, &named::icrs(), icrs_min);

    // crossing: inverters on both outputs, Q reads the inverted R and vice versa
    let not = abstract_complex(2, &[(0, 1)], &[1, 1], &["A", "Q"]);
    let abs = AmalgamOptions {
        placement: None,
        abstract_only: true,
        cross: CrossBlockade::Forbid,
        demotion: Demotion::Always,
    };
    let step = amalgamate(&icrs.without_geometry(), &not, &[("Q".into(), "A".into())], &abs).unwrap();
    let step = relabel(&step.complex, &["A", "B", "R", "P"]);
    let crs = amalgamate(&step, &not, &[("R".into(), "A".into())], &abs).unwrap().complex;
    let crs = relabel(&crs, &["A", "B", "R", "Q"]);
    let order = ["A", "B", "Q", "R"];
    let ports = order
        .iter()
        .map(|l| Port::new(*l, crs.port_atom(l).unwrap()))
        .collect();
    let crs = crs.with_ports(ports).unwrap();
    let (crs_min, _) = found(&named::crs());
    write_entry(&dir, "CRS", &best_geometry(&[crs]), &named::crs(), crs_min);

    // surface-code vertex: two XNOR gates joined on their outputs
    let (_, xnors) = found(&named::xnor());
    let xnor = &xnors[0].complex;
    let scu = amalgamate(xnor, xnor, &[("C".into(), "C".into())], &abs).unwrap().complex;
    let scu = relabel(&scu, &["N", "E", "S", "W"]);
    let tile = optimize_tiling(
        &SiteCell::new(scu, vec![0, 1, 2, 3]).unwrap(),
        LatticeKind::Square,
        &OptimizeConfig::default(),
    )
    .unwrap();
    println!("surface-code tile robustness {:.4}", tile.robustness);
    let (scu_min, _) = found(&named::scu());
    write_entry(&dir, "SCU", &tile.tiling.cells[0].complex, &named::scu(), scu_min);
    fs::write(dir.join("tiles/surface_code.json"), tile.tiling.to_json() + "\n").unwrap();

    // Fibonacci site and its honeycomb tile
    let (fib_min, _) = found(&named::fib_site());
    let site = abstract_complex(
        7,
        &[(0, 3), (0, 4), (1, 3), (1, 5), (2, 3), (2, 6), (3, 4), (3, 5), (3, 6), (4, 5), (4, 6), (5, 6)],
        &[1, 1, 1, 3, 1, 1, 1],
        &["A", "B", "C"],
    );
    let fib = optimize_tiling(
        &SiteCell::new(site, vec![0, 1, 2]).unwrap(),
        LatticeKind::Honeycomb,
        &OptimizeConfig::default(),
    )
    .unwrap();
    println!("fibonacci tile robustness {:.4}", fib.robustness);
    let [a, b] = &fib.tiling.cells[..] else { unreachable!() };
    write_entry(&dir, "FIB_SITE", &a.complex, &named::fib_site(), fib_min);
    fs::write(dir.join("tiles/fibonacci.json"), fib.tiling.to_json() + "\n").unwrap();

    // unit cell: the A site and the mirrored B site above it share their vertical port
    let spacing = fib.tiling.spacing.unwrap();
    let mut asm = Assembly::new();
    let ia = asm.add(&a.complex, None);
    let ib = asm.add(&b.complex, Some(Placement::new(0.0, spacing, 0.0)));
    asm.identify(ia[a.slot_atom(0)], ib[b.slot_atom(0)]);
    let ports = vec![
        ("V".to_string(), ia[a.slot_atom(0)]),
        ("A1".to_string(), ia[a.slot_atom(1)]),
        ("A2".to_string(), ia[a.slot_atom(2)]),
        ("B1".to_string(), ib[b.slot_atom(1)]),
        ("B2".to_string(), ib[b.slot_atom(2)]),
    ];
    let fmu = asm.finish(&ports, CrossBlockade::Forbid).unwrap();
    let fmu_lang = gamma_intersection(&named::fib_site(), &named::fib_site(), &GammaMap::new(vec![(0, 0)]).unwrap(), false).unwrap();
    // the sweep at 12 takes minutes; one witness is enough
    let (fmu_min, _) = search(&fmu_lang, 12, false);
    write_entry(&dir, "FMU", &fmu, &fmu_lang, fmu_min);
}
