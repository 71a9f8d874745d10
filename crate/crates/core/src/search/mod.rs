//! Exhaustive search for smallest complexes realizing a language.
//!
//! A reduced complex is described by the set of words in which each atom is
//! excited (its signature). Ports have fixed signatures; ancilla signatures
//! are distinct, nonempty, differ from every port signature and (unless the
//! language has an always-0 letter) from the full word set, since otherwise
//! the ancilla can be deleted, merged into its twin, or removed together
//! with its neighbourhood without changing the language. Two atoms may share
//! an edge only if their signatures are disjoint, and adding such an edge
//! never breaks a realization, so each signature set is tested once on its
//! densest admissible graph with an exact linear program over detunings.

pub mod iso;
pub mod lp;

use std::collections::{HashMap, HashSet};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gsm::realizes_language;
use crate::metrics::robustness;
use crate::model::{letter_label, BlockadeGraph, Complex, Language, Port, Rational, Word};
use crate::optim::{optimize_geometry, AnnealConfig, Objective, OptimizeConfig};

use iso::{isomorphic, language_automorphisms, map_mask, word_index_maps, SmallGraph};
use lp::{integer_witness, LinearSystem, Relation};

pub const DEFAULT_MAX_ATOMS: usize = 11;
const MAX_WORDS: usize = 64;

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Largest atom count accepted.
    pub max_atoms: usize,
    /// Enumerate every feasible complex at the minimal size rather than one.
    pub exhaustive: bool,
    /// Also test sparser graphs on each feasible signature set, up to this many edges.
    pub max_variant_edges: usize,
    /// Rescale witnesses so the smallest detuning is 1 when all denominators stay within this.
    pub max_detuning_denominator: Option<i64>,
    /// Abort with a resource error after visiting this many signature sets in one sweep.
    pub node_limit: usize,
    pub parallel: bool,
    /// Skip sizes below this one; certificates then only cover the swept range.
    pub min_atoms: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_atoms: DEFAULT_MAX_ATOMS,
            exhaustive: true,
            max_variant_edges: 14,
            max_detuning_denominator: None,
            node_limit: 50_000_000,
            parallel: true,
            min_atoms: None,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SizeSweep {
    pub n_atoms: usize,
    /// Distinct partial signature sets visited, up to language symmetry.
    pub nodes: usize,
    pub pruned_by_restriction: usize,
    pub leaves: usize,
    pub undominated: usize,
    pub linear_programs: usize,
    pub infeasible_programs: usize,
    pub feasible_sets: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub language: Vec<String>,
    pub word_length: usize,
    pub max_atoms: usize,
    pub sweeps: Vec<SizeSweep>,
    pub argument: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct FoundComplex {
    pub complex: Complex,
    /// Word set of each atom, ports first.
    pub signatures: Vec<Vec<Word>>,
    /// Whether the graph is the densest one for its signature set.
    pub densest: bool,
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found {
        n_atoms: usize,
        /// One representative per complex up to port symmetries of the language.
        complexes: Vec<FoundComplex>,
        /// Number of pairwise non-isomorphic blockade graphs (ports ignored).
        distinct_graphs: usize,
        certificate: Certificate,
    },
    /// No complex with at most the requested number of atoms exists.
    Infeasible(Certificate),
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found { .. })
    }

    pub fn certificate(&self) -> &Certificate {
        match self {
            SearchOutcome::Found { certificate, .. } => certificate,
            SearchOutcome::Infeasible(c) => c,
        }
    }
}

/// Known facts about the minimal size of a language.
#[derive(Clone, Copy, Debug, Default)]
struct Bound {
    infeasible_upto: Option<usize>,
    found: Option<usize>,
}

#[derive(Default)]
struct BoundCache {
    map: HashMap<Language, Bound>,
}

impl BoundCache {
    /// Minimal size if at most `cap`, else `cap + 1`.
    fn lower_bound(&mut self, lang: &Language, cap: usize, opts: &SearchOptions) -> Result<usize> {
        if lang.word_length() == 0 {
            return Ok(0);
        }
        let b = self.map.get(lang).copied().unwrap_or_default();
        if let Some(k) = b.found {
            return Ok(k.min(cap + 1));
        }
        let start = b.infeasible_upto.map_or(lang.word_length(), |k| k + 1);
        if start > cap {
            return Ok(cap + 1);
        }
        let sub_opts = SearchOptions {
            exhaustive: false,
            min_atoms: None,
            max_variant_edges: 0,
            parallel: false,
            ..opts.clone()
        };
        let problem = Problem::new(lang)?;
        for n in start..=cap {
            let (sweep, found) = problem.sweep(n, &sub_opts, self, true)?;
            let _ = sweep;
            let e = self.map.entry(lang.clone()).or_default();
            if found.is_empty() {
                e.infeasible_upto = Some(n);
            } else {
                e.found = Some(n);
                return Ok(n);
            }
        }
        Ok(cap + 1)
    }
}

struct Problem {
    lang: Language,
    words: Vec<Word>,
    full: u64,
    port_sigs: Vec<u64>,
    allowed: Vec<u64>,
    maps: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
struct Feasible {
    sigs: Vec<u64>,
    adj: Vec<u64>,
    detunings: Vec<i64>,
    densest: bool,
}

fn bit(m: u64, i: usize) -> bool {
    m >> i & 1 == 1
}

impl Problem {
    fn new(lang: &Language) -> Result<Self> {
        if lang.is_empty() {
            return Err(Error::EmptyLanguage("cannot search for a complex realizing the empty language".into()));
        }
        if lang.len() > MAX_WORDS {
            return Err(Error::Resource(format!(
                "search supports at most {MAX_WORDS} words, the language has {}",
                lang.len()
            )));
        }
        let words: Vec<Word> = lang.iter().cloned().collect();
        let nw = words.len();
        let full = if nw == 64 { u64::MAX } else { (1u64 << nw) - 1 };
        let port_sigs: Vec<u64> = (0..lang.word_length())
            .map(|i| {
                words
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| w.get(i))
                    .fold(0u64, |m, (k, _)| m | 1 << k)
            })
            .collect();
        let has_zero_letter = lang.constant_letters().iter().any(|&(_, v)| !v);
        let mut allowed = Vec::new();
        if nw <= 20 {
            for s in 1..=full {
                if (s != full || has_zero_letter) && !port_sigs.contains(&s) {
                    allowed.push(s);
                }
            }
        } else {
            return Err(Error::Resource(format!(
                "search enumerates ancilla word sets and supports at most 20 words, the language has {nw}"
            )));
        }
        let perms = language_automorphisms(lang);
        let maps = word_index_maps(lang, &perms);
        Ok(Problem {
            lang: lang.clone(),
            words,
            full,
            port_sigs,
            allowed,
            maps,
        })
    }

    fn n_ports(&self) -> usize {
        self.port_sigs.len()
    }

    fn canonical(&self, chosen: &[u64]) -> Vec<u64> {
        let mut best: Option<Vec<u64>> = None;
        for map in &self.maps {
            let mut v: Vec<u64> = chosen.iter().map(|&s| map_mask(s, map)).collect();
            v.sort_unstable();
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        }
        best.unwrap_or_default()
    }

    /// Language left on the other ports once an atom of signature `s` (port
    /// `own`, if it is one) is held excited.
    fn restriction(&self, s: u64, own: Option<usize>) -> Result<Language> {
        let ports: Vec<usize> = (0..self.n_ports())
            .filter(|&q| Some(q) != own && self.port_sigs[q] & s != 0)
            .collect();
        let words = self
            .words
            .iter()
            .enumerate()
            .filter(|(k, _)| bit(s, *k))
            .map(|(_, w)| w.select(&ports));
        Language::new(ports.len(), words)
    }

    fn sweep(
        &self,
        n_atoms: usize,
        opts: &SearchOptions,
        cache: &mut BoundCache,
        first_only: bool,
    ) -> Result<(SizeSweep, Vec<Feasible>)> {
        let mut stats = SizeSweep {
            n_atoms,
            ..SizeSweep::default()
        };
        let n = self.n_ports();
        if n_atoms < n {
            return Ok((stats, Vec::new()));
        }
        let m = n_atoms - n;
        if m > self.allowed.len() {
            return Ok((stats, Vec::new()));
        }
        let mut walker = Walker {
            p: self,
            opts,
            cache,
            n_atoms,
            visited: HashSet::new(),
            leaves: Vec::new(),
            lb: HashMap::new(),
            stats: &mut stats,
            first_only,
            found: Vec::new(),
        };
        let mut chosen = Vec::new();
        walker.walk(&mut chosen, m)?;
        let found = walker.found;
        let leaves = std::mem::take(&mut walker.leaves);
        let mut found = found;
        if !first_only {
            let results: Vec<Option<Feasible>> = if opts.parallel {
                leaves.par_iter().map(|s| self.solve(s, None)).collect()
            } else {
                leaves.iter().map(|s| self.solve(s, None)).collect()
            };
            stats.linear_programs += leaves.len();
            for r in results {
                match r {
                    Some(f) => found.push(f),
                    None => stats.infeasible_programs += 1,
                }
            }
        }
        stats.feasible_sets = found.len();
        Ok((stats, found))
    }

    fn vertex_sigs(&self, ancillas: &[u64]) -> Vec<u64> {
        self.port_sigs.iter().chain(ancillas).copied().collect()
    }

    /// Exact feasibility for the densest graph (`edges == None`) or a given one.
    fn solve(&self, ancillas: &[u64], adj: Option<&[u64]>) -> Option<Feasible> {
        let sigs = self.vertex_sigs(ancillas);
        let n = sigs.len();
        let adj: Vec<u64> = match adj {
            Some(a) => a.to_vec(),
            None => densest(&sigs),
        };
        let ground: Vec<u64> = (0..self.words.len())
            .map(|w| (0..n).filter(|&v| bit(sigs[v], w)).fold(0u64, |m, v| m | 1 << v))
            .collect();
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        for g in &ground {
            if !is_maximal(*g, &adj, all) {
                return None;
            }
        }
        let others: Vec<u64> = maximal_independent_sets(&adj, n)
            .into_iter()
            .filter(|t| !ground.contains(t))
            .collect();
        let mut sys = LinearSystem::new(n);
        let g0 = ground[0];
        let size = |m: u64| m.count_ones() as i64;
        let row = |plus: u64, minus: u64| -> Vec<i64> {
            (0..n).map(|v| bit(plus, v) as i64 - bit(minus, v) as i64).collect()
        };
        for g in &ground[1..] {
            sys.push(row(*g, g0), Relation::Eq, size(g0) - size(*g));
        }
        for t in &others {
            sys.push(row(g0, *t), Relation::Ge, 1 - size(g0) + size(*t));
        }
        sys.cost = Some(vec![1; n]);
        let u = sys.solve()?;
        let delta: Vec<BigRational> = u.into_iter().map(|x| x + BigRational::one()).collect();
        let detunings = integer_witness(&delta)?;
        Some(Feasible {
            sigs: ancillas.to_vec(),
            adj,
            detunings,
            densest: true,
        })
    }

    /// Sparser graphs on the same signatures that still realize the language.
    fn variants(&self, f: &Feasible, max_edges: usize) -> Vec<Feasible> {
        let sigs = self.vertex_sigs(&f.sigs);
        let n = sigs.len();
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| bit(f.adj[i], j))
            .collect();
        if edges.len() > max_edges {
            return Vec::new();
        }
        let mut out = Vec::new();
        let total = 1u64 << edges.len();
        for mask in 0..total - 1 {
            let mut adj = vec![0u64; n];
            for (k, &(i, j)) in edges.iter().enumerate() {
                if bit(mask, k) {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
            if let Some(mut v) = self.solve(&f.sigs, Some(&adj)) {
                v.densest = false;
                out.push(v);
            }
        }
        out
    }

    fn to_found(&self, f: &Feasible, opts: &SearchOptions) -> Result<FoundComplex> {
        let n = f.adj.len();
        let mut g = BlockadeGraph::empty(n)?;
        for i in 0..n {
            for j in i + 1..n {
                if bit(f.adj[i], j) {
                    g.add_edge(i, j)?;
                }
            }
        }
        let min = *f.detunings.iter().min().expect("nonempty");
        let rescale = opts.max_detuning_denominator.is_some_and(|d| {
            f.detunings.iter().all(|&x| Rational::new(x, min).denom() <= &d)
        });
        let detunings: Vec<Rational> = f
            .detunings
            .iter()
            .map(|&x| if rescale { Rational::new(x, min) } else { Rational::from_integer(x) })
            .collect();
        let ports = (0..self.n_ports()).map(|i| Port::new(letter_label(i), i)).collect();
        let complex = Complex::abstract_graph(g, detunings, ports)?;
        let signatures = self
            .vertex_sigs(&f.sigs)
            .iter()
            .map(|&s| {
                self.words
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| bit(s, *k))
                    .map(|(_, w)| *w)
                    .collect()
            })
            .collect();
        Ok(FoundComplex {
            complex,
            signatures,
            densest: f.densest,
        })
    }

    fn colored(&self, f: &Feasible) -> SmallGraph {
        let n = f.adj.len();
        SmallGraph {
            adj: f.adj.clone(),
            colors: (0..n).map(|v| if v < self.n_ports() { v as u32 + 1 } else { 0 }).collect(),
        }
    }

    fn same_complex(&self, a: &Feasible, b: &Feasible) -> bool {
        let ga = self.colored(a);
        let gb = self.colored(b);
        let perms = language_automorphisms(&self.lang);
        perms.iter().any(|p| {
            let mut c = gb.clone();
            for (i, &pi) in p.iter().enumerate() {
                c.colors[i] = pi as u32 + 1;
            }
            isomorphic(&ga, &c)
        })
    }
}

fn densest(sigs: &[u64]) -> Vec<u64> {
    let n = sigs.len();
    (0..n)
        .map(|i| (0..n).filter(|&j| j != i && sigs[i] & sigs[j] == 0).fold(0u64, |m, j| m | 1 << j))
        .collect()
}

fn is_maximal(set: u64, adj: &[u64], all: u64) -> bool {
    let mut covered = set;
    let mut m = set;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        if adj[v] & set != 0 {
            return false;
        }
        covered |= adj[v];
        m &= m - 1;
    }
    covered == all
}

/// All maximal independent sets (Bron–Kerbosch on the complement with pivoting).
pub(crate) fn maximal_independent_sets(adj: &[u64], n: usize) -> Vec<u64> {
    fn rec(adj: &[u64], r: u64, p: u64, x: u64, out: &mut Vec<u64>) {
        if p == 0 && x == 0 {
            out.push(r);
            return;
        }
        // pivot maximizing |P ∩ non-neighbours|, i.e. fewest branches
        let px = p | x;
        let mut pivot = px.trailing_zeros() as usize;
        let mut best = u32::MAX;
        let mut m = px;
        while m != 0 {
            let u = m.trailing_zeros() as usize;
            let branches = (p & (adj[u] | 1 << u)).count_ones();
            if branches < best {
                best = branches;
                pivot = u;
            }
            m &= m - 1;
        }
        let mut cand = p & (adj[pivot] | 1 << pivot);
        let mut p = p;
        let mut x = x;
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            let nb = adj[v] | 1 << v;
            rec(adj, r | 1 << v, p & !nb, x & !nb, out);
            p &= !(1 << v);
            x |= 1 << v;
            cand &= cand - 1;
        }
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut out = Vec::new();
    rec(adj, 0, all, 0, &mut out);
    out
}

struct Walker<'a> {
    p: &'a Problem,
    opts: &'a SearchOptions,
    cache: &'a mut BoundCache,
    n_atoms: usize,
    visited: HashSet<Vec<u64>>,
    leaves: Vec<Vec<u64>>,
    lb: HashMap<(u64, Option<usize>), usize>,
    stats: &'a mut SizeSweep,
    first_only: bool,
    found: Vec<Feasible>,
}

impl Walker<'_> {
    fn bound_for(&mut self, s: u64, own: Option<usize>) -> Result<usize> {
        if s == self.p.full {
            return Ok(0);
        }
        if let Some(&b) = self.lb.get(&(s, own)) {
            return Ok(b);
        }
        let sub = self.p.restriction(s, own)?;
        let b = self.cache.lower_bound(&sub, self.n_atoms - 1, self.opts)?;
        self.lb.insert((s, own), b);
        Ok(b)
    }

    /// Every atom needs enough co-excitable partners to realize its restriction.
    fn restriction_ok(&mut self, sigs: &[u64], remaining: usize) -> Result<bool> {
        for (i, &s) in sigs.iter().enumerate() {
            let overlap = sigs
                .iter()
                .enumerate()
                .filter(|&(j, &t)| j != i && t & s != 0)
                .count();
            let own = (i < self.p.n_ports()).then_some(i);
            if overlap + remaining < self.bound_for(s, own)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn requirement(&self, sigs: &[u64], chosen: &[u64]) -> Option<Vec<u64>> {
        // fewest-option unmet domination need: atom v off in word w needs a
        // partner on in w with a disjoint signature
        let mut best: Option<Vec<u64>> = None;
        for &s in sigs {
            for w in 0..self.p.words.len() {
                if bit(s, w) {
                    continue;
                }
                if sigs.iter().any(|&t| bit(t, w) && t & s == 0) {
                    continue;
                }
                let options: Vec<u64> = self
                    .p
                    .allowed
                    .iter()
                    .copied()
                    .filter(|&t| bit(t, w) && t & s == 0 && !chosen.contains(&t))
                    .collect();
                if best.as_ref().is_none_or(|b| options.len() < b.len()) {
                    best = Some(options);
                }
            }
        }
        best
    }

    fn walk(&mut self, chosen: &mut Vec<u64>, remaining: usize) -> Result<()> {
        if self.first_only && !self.found.is_empty() {
            return Ok(());
        }
        let key = self.p.canonical(chosen);
        if !self.visited.insert(key) {
            return Ok(());
        }
        self.stats.nodes += 1;
        if self.stats.nodes > self.opts.node_limit {
            return Err(Error::Resource(format!(
                "search visited more than {} signature sets at {} atoms",
                self.opts.node_limit, self.n_atoms
            )));
        }
        let sigs = self.p.vertex_sigs(chosen);
        if !self.restriction_ok(&sigs, remaining)? {
            self.stats.pruned_by_restriction += 1;
            return Ok(());
        }
        let need = self.requirement(&sigs, chosen);
        if remaining == 0 {
            self.stats.leaves += 1;
            if need.is_some() {
                self.stats.undominated += 1;
                return Ok(());
            }
            if self.first_only {
                self.stats.linear_programs += 1;
                match self.p.solve(chosen, None) {
                    Some(f) => self.found.push(f),
                    None => self.stats.infeasible_programs += 1,
                }
            } else {
                self.leaves.push(chosen.clone());
            }
            return Ok(());
        }
        let options = match need {
            Some(o) => o,
            None => self.p.allowed.iter().copied().filter(|t| !chosen.contains(t)).collect(),
        };
        for t in options {
            chosen.push(t);
            chosen.sort_unstable();
            let r = self.walk(chosen, remaining - 1);
            let pos = chosen.iter().position(|&x| x == t).expect("just pushed");
            chosen.remove(pos);
            r?;
        }
        Ok(())
    }
}

/// Searches for complexes realizing `lang` with at most `n_atoms` atoms.
/// Sizes are swept upward from the word length; the first feasible size is
/// reported with its complexes, otherwise an infeasibility certificate
/// covering every size up to `n_atoms` is returned.
pub fn search_minimal(lang: &Language, n_atoms: usize, opts: &SearchOptions) -> Result<SearchOutcome> {
    if n_atoms > opts.max_atoms {
        return Err(Error::Resource(format!(
            "{n_atoms} atoms exceeds the search bound of {}",
            opts.max_atoms
        )));
    }
    if n_atoms < lang.word_length() {
        return Err(Error::invalid(format!(
            "a complex for words of length {} needs at least that many atoms",
            lang.word_length()
        )));
    }
    let problem = Problem::new(lang)?;
    let mut cache = BoundCache::default();
    let mut sweeps = Vec::new();
    let start = opts.min_atoms.unwrap_or(0).max(lang.word_length());
    for n in start..=n_atoms {
        let (sweep, found) = problem.sweep(n, opts, &mut cache, true)?;
        if found.is_empty() {
            sweeps.push(sweep);
            continue;
        }
        let (sweep, found) = if opts.exhaustive {
            problem.sweep(n, opts, &mut cache, false)?
        } else {
            (sweep, found)
        };
        sweeps.push(sweep);
        let mut all = found.clone();
        if opts.exhaustive {
            for f in &found {
                all.extend(problem.variants(f, opts.max_variant_edges));
            }
        }
        let mut reps: Vec<Feasible> = Vec::new();
        for f in all {
            if !reps.iter().any(|r| problem.same_complex(r, &f)) {
                reps.push(f);
            }
        }
        let mut graphs: Vec<SmallGraph> = Vec::new();
        for r in &reps {
            let g = problem.colored(r).uncolored();
            if !graphs.iter().any(|h| isomorphic(h, &g)) {
                graphs.push(g);
            }
        }
        let complexes = reps
            .iter()
            .map(|f| problem.to_found(f, opts))
            .collect::<Result<Vec<_>>>()?;
        for c in &complexes {
            debug_assert!(realizes_language(&c.complex, lang)?.is_yes());
        }
        return Ok(SearchOutcome::Found {
            n_atoms: n,
            complexes,
            distinct_graphs: graphs.len(),
            certificate: certificate(lang, n_atoms, sweeps, true),
        });
    }
    Ok(SearchOutcome::Infeasible(certificate(lang, n_atoms, sweeps, false)))
}

fn certificate(lang: &Language, max_atoms: usize, sweeps: Vec<SizeSweep>, found: bool) -> Certificate {
    let mut argument = vec![
        "every realizing complex reduces to one whose ancillas have distinct, nonempty, non-port word sets".to_string(),
        "atoms with intersecting word sets cannot be blockaded; all other pairs are joined, which only removes competing configurations".to_string(),
        "each atom's restriction to its word set must itself be realizable by the atoms it can be excited with".to_string(),
        "remaining candidates are rejected by exact rational linear infeasibility of the degeneracy and unit-gap conditions".to_string(),
    ];
    if !found {
        argument.push(format!("no candidate survives for any size up to {max_atoms}"));
    }
    Certificate {
        language: lang.iter().map(|w| w.to_string()).collect(),
        word_length: lang.word_length(),
        max_atoms,
        sweeps,
        argument,
    }
}

#[derive(Clone, Debug)]
pub enum UnitDiskVerdict {
    Embedded { complex: Complex, robustness: f64 },
    Unknown,
    /// Some atom has six or more pairwise unblockaded neighbours.
    Refuted { center: usize, leaves: Vec<usize> },
}

/// Best-effort unit-disk realizability test for a complex's blockade graph.
pub fn check_unit_disk(complex: &Complex, iterations: usize, restarts: usize, seed: u64) -> Result<UnitDiskVerdict> {
    let g = complex.graph();
    let n = g.n_vertices();
    for v in 0..n {
        let nb: Vec<usize> = g.neighbors(v).iter().collect();
        if nb.len() >= 6 {
            let adj: Vec<u64> = nb
                .iter()
                .map(|&a| nb.iter().enumerate().filter(|(_, &b)| g.has_edge(a, b)).fold(0u64, |m, (k, _)| m | 1 << k))
                .collect();
            if nb.len() <= 64 {
                if let Some(s) = maximal_independent_sets(&adj, nb.len()).into_iter().find(|s| s.count_ones() >= 6) {
                    let leaves = (0..nb.len()).filter(|&k| bit(s, k)).map(|k| nb[k]).collect();
                    return Ok(UnitDiskVerdict::Refuted { center: v, leaves });
                }
            }
        }
    }
    let cfg = OptimizeConfig {
        anneal: AnnealConfig {
            max_iterations: iterations,
            seed,
            ..AnnealConfig::default()
        },
        restarts,
        ..OptimizeConfig::default()
    };
    let r = optimize_geometry(&complex.without_geometry(), Objective::Robustness, &cfg)?;
    if r.success {
        let xi = robustness(r.complex.positions().expect("optimized"), g).xi;
        Ok(UnitDiskVerdict::Embedded {
            complex: r.complex,
            robustness: xi,
        })
    } else {
        Ok(UnitDiskVerdict::Unknown)
    }
}

/// Integer detunings of a found complex as plain numbers.
pub fn detuning_values(c: &Complex) -> Vec<f64> {
    c.detunings().iter().map(|d| d.numer().to_f64().unwrap_or(f64::NAN) / *d.denom() as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::named;

    fn opts() -> SearchOptions {
        SearchOptions {
            parallel: false,
            ..SearchOptions::default()
        }
    }

    #[test]
    fn not_and_link() {
        match search_minimal(&named::not(), 2, &opts()).unwrap() {
            SearchOutcome::Found { n_atoms, complexes, .. } => {
                assert_eq!(n_atoms, 2);
                assert_eq!(complexes.len(), 1);
                assert_eq!(complexes[0].complex.graph().n_edges(), 1);
            }
            o => panic!("{o:?}"),
        }
        assert!(!search_minimal(&named::lnk(), 2, &opts()).unwrap().is_found());
        match search_minimal(&named::lnk(), 3, &opts()).unwrap() {
            SearchOutcome::Found { n_atoms, complexes, .. } => {
                assert_eq!(n_atoms, 3);
                let d: Vec<i64> = complexes[0].complex.detunings().iter().map(|r| r.to_integer()).collect();
                assert_eq!(d.iter().sum::<i64>(), 4);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn copy_needs_four() {
        assert!(!search_minimal(&named::cpy(), 3, &opts()).unwrap().is_found());
        assert!(search_minimal(&named::cpy(), 4, &opts()).unwrap().is_found());
    }

    #[test]
    fn nor_has_two_graphs() {
        assert!(!search_minimal(&named::nor(), 4, &opts()).unwrap().is_found());
        match search_minimal(&named::nor(), 5, &opts()).unwrap() {
            SearchOutcome::Found {
                n_atoms,
                complexes,
                distinct_graphs,
                ..
            } => {
                assert_eq!(n_atoms, 5);
                assert!(distinct_graphs >= 2, "{distinct_graphs}");
                for c in &complexes {
                    assert!(realizes_language(&c.complex, &named::nor()).unwrap().is_yes());
                }
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn maximal_sets_of_a_pentagon() {
        let adj: Vec<u64> = (0..5).map(|i| (1 << ((i + 1) % 5)) | (1 << ((i + 4) % 5))).collect();
        assert_eq!(maximal_independent_sets(&adj, 5).len(), 5);
    }
}
