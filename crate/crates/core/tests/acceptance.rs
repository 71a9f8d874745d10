//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the lines always reach the terminal. The
//! process fails when a criterion other than the known-false minimality
//! sub-claims fails, or when those sub-claims change their verdict.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use blockforge::amalgam::{amalgamate, AmalgamOptions, CrossBlockade, Demotion, Placement};
use blockforge::catalog::{build_fibonacci, build_surface_code, catalog, fibonacci_count};
use blockforge::compiler::{compile, CompileOptions};
use blockforge::expr::BooleanFunction;
use blockforge::gsm::{enumerate_gsm, enumerate_gsm_with, GsmOptions};
use blockforge::language::named;
use blockforge::lattice::{Boundary, Lattice, LatticeKind, LatticeSpec};
use blockforge::metrics::{normalize, robustness, spread};
use blockforge::model::{rational, BlockadeGraph, Complex, Language, Point, Port, Rational};
use blockforge::optim::{optimize_geometry, Objective, OptimizeConfig};
use blockforge::search::{search_minimal, SearchOptions, SearchOutcome};
use blockforge::tessellate::{EdgeJoin, Tessellation};
use common::{brute_complex, brute_force, masks, projected, set, truth_table};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest distance between robustness values of congruent geometries.
const XI_TOL: f64 = 1e-12;
/// Half-width of the accepted band around the printed spread 0.058.
const SPREAD_TOL: f64 = 5e-4;

enum Verdict {
    Pass,
    Fail,
    /// Fails only on sub-claims known to be false, with the documented counterexamples.
    KnownFail,
}

struct Line {
    id: usize,
    title: &'static str,
    verdict: Verdict,
    detail: String,
    elapsed: Duration,
}

fn timed(id: usize, title: &'static str, budget: Duration, f: impl FnOnce() -> (Verdict, String)) -> Line {
    let t = Instant::now();
    let (mut verdict, mut detail) = f();
    let elapsed = t.elapsed();
    if elapsed > budget {
        verdict = Verdict::Fail;
        detail += &format!("; over the {:?} budget", budget);
    }
    Line {
        id,
        title,
        verdict,
        detail,
        elapsed,
    }
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn gate(f: impl Fn(bool, bool) -> bool) -> BTreeSet<String> {
    truth_table(2, |x| f(x[0], x[1]))
}

fn primitives() -> (Verdict, String) {
    // words list the ports left to right in catalog order
    let tables: Vec<(&str, BTreeSet<String>)> = vec![
        ("NOT", set(&["01", "10"])),
        ("LNK", set(&["00", "11"])),
        ("CPY", set(&["000", "111"])),
        ("NOR_ring", gate(|a, b| !(a || b))),
        ("NOR_triangle", gate(|a, b| !(a || b))),
        ("AND", gate(|a, b| a && b)),
        ("OR", gate(|a, b| a || b)),
        ("NAND", gate(|a, b| !(a && b))),
        ("XOR", gate(|a, b| a ^ b)),
        ("XNOR", gate(|a, b| a == b)),
        ("CRS", set(&["0000", "0101", "1010", "1111"])),
        ("ICRS", set(&["0011", "0101", "1010", "1100"])),
    ];
    let mut bad = Vec::new();
    for (name, want) in &tables {
        let c = catalog(name).unwrap().complex;
        let gsm = enumerate_gsm(&c).unwrap();
        let (got, unique) = projected(&c, &masks(&gsm));
        let ok = &got == want && unique && gsm.width.is_zero() && gsm.gap >= rational(1);
        if !ok {
            bad.push(format!("{name}: words {got:?}, gap {}", gsm.gap));
        }
    }
    let detail = if bad.is_empty() {
        format!("{} truth tables exact, zero width, gap >= 1", tables.len())
    } else {
        bad.join("; ")
    };
    (verdict(bad.is_empty()), detail)
}

fn outcome(lang: &Language, n: usize) -> SearchOutcome {
    let opts = SearchOptions {
        max_atoms: n.max(1),
        ..SearchOptions::default()
    };
    search_minimal(lang, n, &opts).unwrap()
}

/// Smallest feasible size when it is exactly `n`, with the count of distinct graphs.
fn feasible_at(lang: &Language, n: usize) -> Option<usize> {
    match outcome(lang, n) {
        SearchOutcome::Found {
            n_atoms, distinct_graphs, ..
        } if n_atoms == n => Some(distinct_graphs),
        _ => None,
    }
}

fn infeasible_at(lang: &Language, n: usize) -> bool {
    !outcome(lang, n).is_found()
}

fn minimality() -> (Verdict, String) {
    let mut claims: Vec<(String, bool)> = Vec::new();
    let mut claim = |s: &str, ok: bool| claims.push((s.to_string(), ok));
    claim("CPY infeasible at 3", infeasible_at(&named::cpy(), 3));
    claim("NOR infeasible at 4", infeasible_at(&named::nor(), 4));
    claim(
        "NOR feasible at 5 with >= 2 graphs",
        feasible_at(&named::nor(), 5).is_some_and(|g| g >= 2),
    );
    for (name, lang) in [("AND", named::and()), ("OR", named::or()), ("XNOR", named::xnor())] {
        claim(&format!("{name} infeasible at 5"), infeasible_at(&lang, 5));
        claim(&format!("{name} feasible at 6"), feasible_at(&lang, 6).is_some());
    }
    claim("XNOR graph at 6 unique", feasible_at(&named::xnor(), 6) == Some(1));
    for (name, lang) in [("NAND", named::nand()), ("XOR", named::xor())] {
        claim(&format!("{name} infeasible at 6"), infeasible_at(&lang, 6));
        claim(&format!("{name} feasible at 7"), feasible_at(&lang, 7).is_some());
    }
    let fib7 = feasible_at(&named::fib_site(), 7);
    let scu10 = feasible_at(&named::scu(), 10);
    let known_false = [
        ("FIB_SITE infeasible at 7", fib7.is_none()),
        ("SCU infeasible at 10", scu10.is_none()),
    ];
    let failed: Vec<&str> = claims.iter().filter(|c| !c.1).map(|c| c.0.as_str()).collect();
    let known: Vec<&str> = known_false.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let n = claims.len() + known_false.len();
    if !failed.is_empty() {
        return (Verdict::Fail, format!("failed: {}", failed.join(", ")));
    }
    if known.len() == known_false.len() {
        return (
            Verdict::KnownFail,
            format!(
                "{} of {n} claims hold; false: {} (complexes exist at 7 and 10 atoms)",
                n - known.len(),
                known.join(", ")
            ),
        );
    }
    (verdict(known.is_empty()), format!("{n} claims checked; false: {known:?}"))
}

fn compiler_soundness() -> (Verdict, String) {
    let opts = CompileOptions::default();
    let allowed = [rational(1), rational(2), rational(3)];
    let mut count = 0;
    let mut worst = 0;
    let mut bad = Vec::new();
    for g in 1..=3usize {
        for code in 0u32..(1 << (1 << g)) {
            let table: Vec<bool> = (0..1 << g).map(|r| code >> r & 1 == 1).collect();
            let f = BooleanFunction::from_table(g, table.clone()).unwrap();
            let want = truth_table(g, |x| f.eval(x));
            let c = match compile(&f, &opts) {
                Ok(c) => c.complex,
                Err(e) => {
                    bad.push(format!("g={g} code={code}: {e}"));
                    continue;
                }
            };
            count += 1;
            worst = worst.max(c.n_atoms());
            let gsm = enumerate_gsm_with(
                &c,
                &GsmOptions {
                    max_atoms: 256,
                    ..GsmOptions::default()
                },
            )
            .unwrap();
            let words: Vec<String> = gsm
                .configurations
                .iter()
                .map(|k| c.port_indices().iter().map(|&p| if k.is_occupied(p) { '1' } else { '0' }).collect())
                .collect();
            let got: BTreeSet<String> = words.iter().cloned().collect();
            let detunings_ok = c.detunings().iter().all(|d| allowed.contains(d));
            if got != want || got.len() != words.len() || !detunings_ok {
                bad.push(format!("g={g} code={code}"));
            }
        }
    }
    let detail = if bad.is_empty() {
        format!("{count} functions (256 on three inputs) realized, detunings in {{1,2,3}}, largest {worst} atoms")
    } else {
        format!("failures: {}", bad.join(", "))
    };
    (verdict(bad.is_empty()), detail)
}

fn amalgamation() -> (Verdict, String) {
    let names = ["NOT", "LNK", "CPY", "NOR_ring", "NOR_triangle", "AND", "OR", "NAND", "XOR", "XNOR"];
    let prims: Vec<(Complex, Language)> = names
        .iter()
        .map(|n| {
            let e = catalog(n).unwrap();
            (e.complex.without_geometry(), e.language)
        })
        .collect();
    let opts = AmalgamOptions {
        placement: None,
        abstract_only: true,
        cross: CrossBlockade::Forbid,
        demotion: Demotion::Never,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut done, mut skipped, mut bad) = (0, 0, Vec::new());
    while done < 200 {
        let (i1, i2) = (rng.random_range(0..prims.len()), rng.random_range(0..prims.len()));
        let ((c1, l1), (c2, l2)) = (&prims[i1], &prims[i2]);
        let k = rng.random_range(1..=2.min(c1.n_ports()).min(c2.n_ports()));
        let mut p1: Vec<usize> = (0..c1.n_ports()).collect();
        let mut p2: Vec<usize> = (0..c2.n_ports()).collect();
        for i in 0..k {
            let a = rng.random_range(i..p1.len());
            p1.swap(i, a);
            let b = rng.random_range(i..p2.len());
            p2.swap(i, b);
        }
        let pairs: Vec<(usize, usize)> = (0..k).map(|i| (p1[i], p2[i])).collect();
        let gamma: Vec<(String, String)> = pairs
            .iter()
            .map(|&(a, b)| (c1.ports()[a].label.clone(), c2.ports()[b].label.clone()))
            .collect();
        // γ-intersection: agreeing word pairs, all of the first word then the unpaired letters of the second
        let mut want = BTreeSet::new();
        for w1 in l1.iter() {
            for w2 in l2.iter() {
                if pairs.iter().all(|&(a, b)| w1.get(a) == w2.get(b)) {
                    let mut s: String = w1.letters().map(|b| if b { '1' } else { '0' }).collect();
                    for j in 0..c2.n_ports() {
                        if !pairs.iter().any(|&(_, b)| b == j) {
                            s.push(if w2.get(j) { '1' } else { '0' });
                        }
                    }
                    want.insert(s);
                }
            }
        }
        if want.is_empty() {
            skipped += 1;
            continue;
        }
        let a = amalgamate(c1, c2, &gamma, &opts).unwrap().complex;
        let (b1, b2, ba) = (brute_complex(c1), brute_complex(c2), brute_complex(&a));
        let additive = ba.ground_energy == b1.ground_energy + b2.ground_energy;
        let gsm = enumerate_gsm(&a).unwrap();
        let (got, unique) = projected(&a, &masks(&gsm));
        if !additive || got != want || !unique || masks(&gsm) != ba.ground {
            bad.push(format!("{} + {} on {gamma:?}", names[i1], names[i2]));
        }
        done += 1;
    }
    let detail = if bad.is_empty() {
        format!("{done} amalgams additive and realizing the intersection ({skipped} empty intersections redrawn)")
    } else {
        format!("{} failures, first {}", bad.len(), bad[0])
    };
    (verdict(bad.is_empty()), detail)
}

fn perturbed(c: &Complex, seed: u64) -> Complex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = c.radius();
    let p = c
        .positions()
        .unwrap()
        .iter()
        .map(|q| Point::new(q.x + r * rng.random_range(-0.1..0.1), q.y + r * rng.random_range(-0.1..0.1)))
        .collect();
    c.with_geometry(p, r).unwrap()
}

fn optimization() -> (Verdict, String) {
    let cfg = OptimizeConfig::default();
    assert!(cfg.anneal.max_iterations <= 2000 && cfg.restarts <= 8);
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, floor) in [("NOR_triangle", 0.26), ("NOR_ring", 0.23), ("SCU", 0.128)] {
        let t = Instant::now();
        let start = perturbed(&catalog(name).unwrap().complex, 7);
        let r = optimize_geometry(&start, Objective::Robustness, &cfg).unwrap();
        let pass = r.report.robustness >= floor && r.report.valid && t.elapsed() < Duration::from_secs(300);
        ok &= pass;
        parts.push(format!("{name} xi {:.4} (>= {floor}) s {:.4}", r.report.robustness, r.report.spread));
    }
    let s = spread(&[rational(1), rational(2)]).unwrap();
    let closed = {
        let t = 2f64.powf(1.0 / 6.0);
        (t - 1.0) / (t + 1.0)
    };
    ok &= (s - 0.058).abs() <= SPREAD_TOL && (s - closed).abs() < 1e-12;
    parts.push(format!("s(1,2) = {s:.6}"));
    (verdict(ok), parts.join(", "))
}

/// Port letter of lattice edge `k` in the tessellation, if the edge is a port.
fn edge_port(t: &Tessellation, k: usize) -> Option<usize> {
    t.complex.ports().iter().find(|p| p.label == format!("e{k}")).map(|p| p.index)
}

/// Edge assignments (as bit strings over all lattice edges) satisfying `check` at every site.
fn lattice_words(lat: &Lattice, check: impl Fn(&[bool]) -> bool) -> BTreeSet<Vec<bool>> {
    let m = lat.edges.len();
    assert!(m <= 20);
    (0u32..1 << m)
        .map(|a| (0..m).map(|k| a >> k & 1 == 1).collect::<Vec<bool>>())
        .filter(|bits| {
            lat.sites.iter().all(|s| {
                let x: Vec<bool> = s.slots.iter().map(|e| e.is_some_and(|k| bits[k])).collect();
                check(&x)
            })
        })
        .collect()
}

fn ground_edge_words(t: &Tessellation) -> (BTreeSet<Vec<bool>>, usize) {
    let gsm = enumerate_gsm_with(
        &t.complex,
        &GsmOptions {
            max_atoms: 64,
            ..GsmOptions::default()
        },
    )
    .unwrap();
    let ports: Vec<usize> = (0..t.lattice.edges.len()).map(|k| edge_port(t, k).unwrap()).collect();
    let words = gsm
        .configurations
        .iter()
        .map(|c| ports.iter().map(|&p| c.is_occupied(p)).collect())
        .collect();
    (words, gsm.len())
}

fn surface_code() -> (Verdict, String) {
    let spec = LatticeSpec::new(LatticeKind::Square, 2, 2, Boundary::Periodic);
    let t = build_surface_code(&spec).unwrap();
    let loops = lattice_words(&t.lattice, |x| x.iter().filter(|&&b| b).count() % 2 == 0);
    // cycle space dimension of a connected graph: E − V + 1
    let cycle_space = 1usize << (t.lattice.edges.len() - t.lattice.sites.len() + 1);
    let (words, n) = ground_edge_words(&t);
    let uniform = t.bulk_detunings().len() == 1;
    let per_cell = t.atoms_per_cell();
    let ok = n == 32 && loops.len() == cycle_space && words == loops && uniform && per_cell == 9.0;
    (
        verdict(ok),
        format!(
            "{n} ground states, {} loop words (cycle space {cycle_space}), bulk detunings {:?}, {per_cell} atoms per cell",
            loops.len(),
            t.bulk_detunings().iter().map(|d| d.to_string()).collect::<Vec<_>>()
        ),
    )
}

fn fibonacci() -> (Verdict, String) {
    let fib_ok = |x: &[bool]| x.iter().filter(|&&b| b).count() != 1;
    let site_words = set(&["000", "011", "101", "110", "111"]);
    let site = catalog("FIB_SITE").unwrap().complex;
    let b = brute_complex(&site);
    let (got, unique) = projected(&site, &b.ground);
    let site_ok = b.ground.len() == 5 && got == site_words && unique && masks(&enumerate_gsm(&site).unwrap()) == b.ground;

    // unit cell: ports V, A1, A2, B1, B2; both sites read V as their first letter
    let fmu = catalog("FMU").unwrap().complex;
    let mut table = BTreeSet::new();
    for a in &site_words {
        for bw in &site_words {
            if a[..1] == bw[..1] {
                table.insert(format!("{a}{}", &bw[1..]));
            }
        }
    }
    let bf = brute_complex(&fmu);
    let (got, unique) = projected(&fmu, &bf.ground);
    let fmu_ok = got == table && unique && table.len() == 13;

    let mut patches = Vec::new();
    let mut patch_ok = true;
    for (lx, ly) in [(1, 1), (2, 1)] {
        for join in [EdgeJoin::Direct, EdgeJoin::Interposer] {
            let spec = LatticeSpec::new(LatticeKind::Honeycomb, lx, ly, Boundary::Periodic);
            let t = build_fibonacci(&spec, join).unwrap();
            let want = lattice_words(&t.lattice, fib_ok);
            let (words, n) = ground_edge_words(&t);
            let plaquettes = (lx * ly) as u32;
            patch_ok &= words == want && n == want.len() && n as u64 == fibonacci_count(plaquettes);
            patches.push(format!("{lx}x{ly} {join:?} {n}/{}", want.len()));
        }
    }
    (
        verdict(site_ok && fmu_ok && patch_ok),
        format!(
            "site {} ground states, unit cell {} of {} table words, periodic patches {}",
            b.ground.len(),
            got.len(),
            table.len(),
            patches.join(", ")
        ),
    )
}

fn oracle_equivalence() -> (Verdict, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut bad = 0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=16usize);
        let p: f64 = rng.random_range(0.05..0.6);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        let det: Vec<Rational> = (0..n)
            .map(|_| Rational::new(rng.random_range(1..=6), rng.random_range(1..=3)))
            .collect();
        let ports = vec![Port::new("p", 0)];
        let c = Complex::abstract_graph(BlockadeGraph::from_edges(n, &edges).unwrap(), det.clone(), ports).unwrap();
        let gsm = enumerate_gsm(&c).unwrap();
        let b = brute_force(n, &edges, &det);
        let gap_ok = match b.gap {
            Some(g) => gsm.gap == g,
            None => false,
        };
        if masks(&gsm) != b.ground || gsm.ground_energy != b.ground_energy || !gap_ok {
            bad += 1;
        }
    }
    (verdict(bad == 0), format!("1000 random instances, N <= 16, {bad} mismatches"))
}

fn invariances() -> (Verdict, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_xi: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    let mut worst_s: f64 = 0.0;
    let names = ["NOT", "LNK", "CPY", "NOR_ring", "NOR_triangle", "AND", "XNOR", "CRS", "SCU", "FIB_SITE"];
    for k in 0..200 {
        let c = catalog(names[k % names.len()]).unwrap().complex;
        let pos = c.positions().unwrap();
        let g = c.graph();
        let xi = robustness(pos, g).xi;
        let place = Placement::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(0.0..6.3));
        let scale: f64 = rng.random_range(0.2..5.0);
        let moved: Vec<Point> = pos
            .iter()
            .map(|p| {
                let q = place.apply(p);
                Point::new(scale * q.x, scale * q.y)
            })
            .collect();
        worst_xi = worst_xi.max((robustness(&moved, g).xi - xi).abs());
        let once = normalize(&moved, g).unwrap();
        let twice = normalize(&once, g).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            worst_norm = worst_norm.max(a.dist(b));
        }
        let m = rational(rng.random_range(1..=9)) / rational(rng.random_range(1..=9));
        let scaled: Vec<Rational> = c.detunings().iter().map(|d| d * m).collect();
        worst_s = worst_s.max((spread(&scaled).unwrap() - spread(c.detunings()).unwrap()).abs());
    }
    let ok = worst_xi <= XI_TOL && worst_norm <= XI_TOL && worst_s <= XI_TOL;
    (
        verdict(ok),
        format!("200 transforms: max |dxi| {worst_xi:.1e}, normalize drift {worst_norm:.1e}, spread drift {worst_s:.1e}"),
    )
}

fn main() {
    let lines = vec![
        timed(1, "primitive truth tables", Duration::from_secs(1), primitives),
        timed(2, "minimality certificates", Duration::from_secs(60), minimality),
        timed(3, "compiler soundness", Duration::from_secs(300), compiler_soundness),
        timed(4, "amalgamation additivity", Duration::from_secs(60), amalgamation),
        timed(5, "robustness reproduction", Duration::from_secs(900), optimization),
        timed(6, "surface-code tessellation", Duration::from_secs(300), surface_code),
        timed(7, "fibonacci tessellation", Duration::from_secs(600), fibonacci),
        timed(8, "oracle equivalence", Duration::from_secs(300), oracle_equivalence),
        timed(9, "metric invariances", Duration::from_secs(10), invariances),
    ];
    let mut unexpected = false;
    for l in &lines {
        let tag = match l.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail | Verdict::KnownFail => "FAIL",
        };
        unexpected |= matches!(l.verdict, Verdict::Fail);
        println!("{tag} [{}] {} ({:.1?}): {}", l.id, l.title, l.elapsed, l.detail);
    }
    if unexpected {
        eprintln!("acceptance: unexpected failures");
        std::process::exit(1);
    }
}
