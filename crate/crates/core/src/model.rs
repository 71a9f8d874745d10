//! Shared data model: words, languages, blockade graphs, complexes and configurations.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::bits::{VertexSet, MAX_VERTICES};
use crate::error::{Error, Result};

/// Detunings in units of the reference detuning.
pub type Rational = Ratio<i64>;

pub fn rational(n: i64) -> Rational {
    Rational::from_integer(n)
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::invalid(format!("`{s}` is not a rational of the form p/q"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, o: &Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

/// A binary word of at most 64 letters. Letter `i` is stored in bit `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Word {
    bits: u64,
    len: u8,
}

pub const MAX_WORD_LENGTH: usize = 64;

impl Word {
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_WORD_LENGTH, "word length {len}");
        Word {
            bits: 0,
            len: len as u8,
        }
    }

    pub fn from_letters(letters: &[bool]) -> Self {
        let mut w = Word::zeros(letters.len());
        for (i, &b) in letters.iter().enumerate() {
            w.set(i, b);
        }
        w
    }

    pub fn from_bits(bits: u64, len: usize) -> Self {
        let mut w = Word::zeros(len);
        w.bits = if len == 64 { bits } else { bits & ((1u64 << len) - 1) };
        w
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len());
        (self.bits >> i) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len());
        if b {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn ones(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn concat(&self, o: &Word) -> Word {
        let len = self.len() + o.len();
        assert!(len <= MAX_WORD_LENGTH);
        Word {
            bits: self.bits | (o.bits << self.len),
            len: len as u8,
        }
    }

    /// Word made of the letters at `positions`, in that order.
    pub fn select(&self, positions: &[usize]) -> Word {
        let mut w = Word::zeros(positions.len());
        for (k, &p) in positions.iter().enumerate() {
            w.set(k, self.get(p));
        }
        w
    }
}

impl Ord for Word {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.len.cmp(&o.len).then_with(|| {
            // lexicographic with letter 0 most significant
            self.bits.reverse_bits().cmp(&o.bits.reverse_bits())
        })
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.letters() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        if s.is_empty() || s.len() > MAX_WORD_LENGTH {
            return Err(Error::invalid(format!("word `{s}` must have 1..=64 letters")));
        }
        let mut w = Word::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => w.set(i, true),
                _ => return Err(Error::invalid(format!("word `{s}` has a non-binary letter"))),
            }
        }
        Ok(w)
    }
}

/// A uniform language: a set of words sharing one length.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Language {
    word_length: usize,
    words: BTreeSet<Word>,
}

impl Language {
    pub fn new<I: IntoIterator<Item = Word>>(word_length: usize, words: I) -> Result<Self> {
        if word_length > MAX_WORD_LENGTH {
            return Err(Error::invalid(format!("word length {word_length} out of range")));
        }
        let mut set = BTreeSet::new();
        for w in words {
            if w.len() != word_length {
                return Err(Error::Dimension {
                    expected: word_length,
                    found: w.len(),
                });
            }
            set.insert(w);
        }
        Ok(Language {
            word_length,
            words: set,
        })
    }

    pub fn empty(word_length: usize) -> Result<Self> {
        Language::new(word_length, [])
    }

    pub fn from_strs(word_length: usize, words: &[&str]) -> Result<Self> {
        let parsed = words.iter().map(|s| s.parse()).collect::<Result<Vec<Word>>>()?;
        Language::new(word_length, parsed)
    }

    pub fn word_length(&self) -> usize {
        self.word_length
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.words.contains(w)
    }

    pub fn words(&self) -> &BTreeSet<Word> {
        &self.words
    }

    pub fn iter(&self) -> impl Iterator<Item = &Word> {
        self.words.iter()
    }

    /// Positions whose letter takes a single value across all words.
    pub fn constant_letters(&self) -> Vec<(usize, bool)> {
        let Some(first) = self.words.iter().next() else {
            return Vec::new();
        };
        (0..self.word_length)
            .filter(|&i| self.words.iter().all(|w| w.get(i) == first.get(i)))
            .map(|i| (i, first.get(i)))
            .collect()
    }

    /// Letters reordered so that new letter `k` is old letter `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Language {
        assert_eq!(perm.len(), self.word_length);
        Language {
            word_length: self.word_length,
            words: self.words.iter().map(|w| w.select(perm)).collect(),
        }
    }

    /// Words with letter `pos` equal to `value`, with that letter removed.
    pub fn fix_letter(&self, pos: usize, value: bool) -> Result<Language> {
        let keep: Vec<usize> = (0..self.word_length).filter(|&i| i != pos).collect();
        Language::new(
            keep.len(),
            self.words
                .iter()
                .filter(|w| w.get(pos) == value)
                .map(|w| w.select(&keep)),
        )
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, w) in self.words.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{w}")?;
        }
        f.write_str("}")
    }
}

/// Simple undirected graph on at most 256 vertices.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BlockadeGraph {
    adj: Vec<VertexSet>,
}

impl BlockadeGraph {
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::Resource(format!(
                "{n} vertices exceed the supported maximum of {MAX_VERTICES}"
            )));
        }
        Ok(BlockadeGraph {
            adj: vec![VertexSet::empty(); n],
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = BlockadeGraph::empty(n)?;
        for &(i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        let n = self.adj.len();
        if i >= n || j >= n {
            return Err(Error::invalid(format!("edge ({i},{j}) out of range for {n} vertices")));
        }
        if i == j {
            return Err(Error::invalid(format!("self-loop at vertex {i}")));
        }
        self.adj[i].insert(j);
        self.adj[j].insert(i);
        Ok(())
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) {
        self.adj[i].remove(j);
        self.adj[j].remove(i);
    }

    pub fn n_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(j)
    }

    pub fn neighbors(&self, v: usize) -> VertexSet {
        self.adj[v]
    }

    pub fn adjacency(&self) -> &[VertexSet] {
        &self.adj
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn n_edges(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    /// Edges as sorted pairs (i < j) in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.adj.len() {
            for j in self.adj[i].iter().filter(|&j| j > i) {
                out.push((i, j));
            }
        }
        out
    }

    pub fn is_independent(&self, set: &VertexSet) -> bool {
        set.iter().all(|v| !self.adj[v].intersects(set))
    }

    /// Subgraph induced on `keep`, relabelled to 0..keep.len() in the given order.
    pub fn induced(&self, keep: &[usize]) -> BlockadeGraph {
        let mut pos = vec![usize::MAX; self.adj.len()];
        for (k, &v) in keep.iter().enumerate() {
            pos[v] = k;
        }
        let mut g = BlockadeGraph {
            adj: vec![VertexSet::empty(); keep.len()],
        };
        for (k, &v) in keep.iter().enumerate() {
            for u in self.adj[v].iter() {
                if pos[u] != usize::MAX {
                    g.adj[k].insert(pos[u]);
                }
            }
        }
        g
    }

    pub fn is_connected(&self) -> bool {
        let n = self.adj.len();
        if n == 0 {
            return true;
        }
        let mut seen = VertexSet::singleton(0);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let mut next = VertexSet::empty();
            for v in frontier.iter() {
                next = next.or(&self.adj[v]);
            }
            frontier = next.minus(&seen);
            seen = seen.or(&next);
        }
        seen.len() == n
    }
}

/// Unit-disk blockade graph: edge iff distance is strictly below the radius.
pub fn blockade_graph_of(positions: &[Point], radius: f64) -> Result<BlockadeGraph> {
    if !(radius > 0.0) {
        return Err(Error::invalid("blockade radius must be positive"));
    }
    let mut g = BlockadeGraph::empty(positions.len())?;
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            if positions[i].dist(&positions[j]) < radius {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Port {
    pub label: String,
    pub index: usize,
}

impl Port {
    pub fn new(label: impl Into<String>, index: usize) -> Self {
        Port {
            label: label.into(),
            index,
        }
    }
}

/// Default port labels: A, B, C, ... for inputs.
pub fn letter_label(i: usize) -> String {
    let mut s = String::new();
    let mut k = i;
    loop {
        s.insert(0, (b'A' + (k % 26) as u8) as char);
        if k < 26 {
            break;
        }
        k = k / 26 - 1;
    }
    s
}

/// Atoms with detunings, an optional geometry, a blockade graph and ordered ports.
#[derive(Clone, PartialEq, Debug)]
pub struct Complex {
    detunings: Vec<Rational>,
    positions: Option<Vec<Point>>,
    ports: Vec<Port>,
    radius: f64,
    graph: BlockadeGraph,
    explicit_edges: bool,
}

impl Complex {
    /// Complex whose blockade graph is derived from the geometry.
    pub fn geometric(
        positions: Vec<Point>,
        detunings: Vec<Rational>,
        ports: Vec<Port>,
        radius: f64,
    ) -> Result<Self> {
        let graph = blockade_graph_of(&positions, radius)?;
        let c = Complex {
            detunings,
            positions: Some(positions),
            ports,
            radius,
            graph,
            explicit_edges: false,
        };
        c.validate()?;
        Ok(c)
    }

    /// Geometry-free complex.
    pub fn abstract_graph(
        graph: BlockadeGraph,
        detunings: Vec<Rational>,
        ports: Vec<Port>,
    ) -> Result<Self> {
        let c = Complex {
            detunings,
            positions: None,
            ports,
            radius: 1.0,
            graph,
            explicit_edges: true,
        };
        c.validate()?;
        Ok(c)
    }

    /// Complex with optional geometry and an explicit blockade graph overriding it.
    pub fn with_explicit_edges(
        positions: Option<Vec<Point>>,
        detunings: Vec<Rational>,
        ports: Vec<Port>,
        radius: f64,
        graph: BlockadeGraph,
    ) -> Result<Self> {
        let c = Complex {
            detunings,
            positions,
            ports,
            radius,
            graph,
            explicit_edges: true,
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        let n = self.detunings.len();
        if n == 0 {
            return Err(Error::invalid("a complex needs at least one atom"));
        }
        if self.graph.n_vertices() != n {
            return Err(Error::Dimension {
                expected: n,
                found: self.graph.n_vertices(),
            });
        }
        if let Some(i) = self.detunings.iter().position(|d| !d.is_positive()) {
            return Err(Error::invalid(format!("detuning of atom {i} must be positive")));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid("blockade radius must be positive and finite"));
        }
        if let Some(p) = &self.positions {
            if p.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: p.len(),
                });
            }
            if p.iter().any(|q| !q.x.is_finite() || !q.y.is_finite()) {
                return Err(Error::invalid("atom positions must be finite"));
            }
        }
        if self.ports.len() > n {
            return Err(Error::invalid("more ports than atoms"));
        }
        let mut seen_idx = BTreeSet::new();
        let mut seen_lbl = BTreeSet::new();
        for p in &self.ports {
            if p.index >= n {
                return Err(Error::invalid(format!("port `{}` index {} out of range", p.label, p.index)));
            }
            if !seen_idx.insert(p.index) {
                return Err(Error::invalid(format!("atom {} is used by two ports", p.index)));
            }
            if p.label.is_empty() || !seen_lbl.insert(p.label.clone()) {
                return Err(Error::invalid(format!("port label `{}` is empty or repeated", p.label)));
            }
        }
        Ok(())
    }

    pub fn n_atoms(&self) -> usize {
        self.detunings.len()
    }

    pub fn detunings(&self) -> &[Rational] {
        &self.detunings
    }

    pub fn positions(&self) -> Option<&[Point]> {
        self.positions.as_deref()
    }

    pub fn is_geometric(&self) -> bool {
        self.positions.is_some()
    }

    pub fn has_explicit_edges(&self) -> bool {
        self.explicit_edges
    }

    pub fn ports(&self) -> &[Port] {
        &self.ports
    }

    pub fn n_ports(&self) -> usize {
        self.ports.len()
    }

    pub fn port_indices(&self) -> Vec<usize> {
        self.ports.iter().map(|p| p.index).collect()
    }

    pub fn port_position(&self, label: &str) -> Option<usize> {
        self.ports.iter().position(|p| p.label == label)
    }

    pub fn port_atom(&self, label: &str) -> Option<usize> {
        self.ports.iter().find(|p| p.label == label).map(|p| p.index)
    }

    pub fn ancillas(&self) -> Vec<usize> {
        let ports: BTreeSet<usize> = self.ports.iter().map(|p| p.index).collect();
        (0..self.n_atoms()).filter(|i| !ports.contains(i)).collect()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn graph(&self) -> &BlockadeGraph {
        &self.graph
    }

    pub fn max_detuning(&self) -> Rational {
        self.detunings.iter().copied().max().unwrap_or_else(Rational::zero)
    }

    /// Pairs of ports that are in blockade with each other.
    pub fn blockaded_port_pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (a, p) in self.ports.iter().enumerate() {
            for q in &self.ports[a + 1..] {
                if self.graph.has_edge(p.index, q.index) {
                    out.push((p.label.clone(), q.label.clone()));
                }
            }
        }
        out
    }

    /// Same complex with new positions; the blockade graph is kept, and stays
    /// explicit if the new geometry does not reproduce it.
    pub fn with_geometry(&self, positions: Vec<Point>, radius: f64) -> Result<Complex> {
        let derived = blockade_graph_of(&positions, radius)?;
        let c = Complex {
            detunings: self.detunings.clone(),
            positions: Some(positions),
            ports: self.ports.clone(),
            radius,
            graph: self.graph.clone(),
            explicit_edges: derived != self.graph,
        };
        c.validate()?;
        Ok(c)
    }

    /// Same complex without geometry.
    pub fn without_geometry(&self) -> Complex {
        Complex {
            positions: None,
            explicit_edges: true,
            ..self.clone()
        }
    }

    pub fn with_detunings(&self, detunings: Vec<Rational>) -> Result<Complex> {
        let c = Complex {
            detunings,
            ..self.clone()
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_ports(&self, ports: Vec<Port>) -> Result<Complex> {
        let c = Complex {
            ports,
            ..self.clone()
        };
        c.validate()?;
        Ok(c)
    }

    /// Sub-complex on the kept atoms (in order); ports on deleted atoms vanish.
    pub fn induced(&self, keep: &[usize]) -> Result<Complex> {
        let mut pos = vec![usize::MAX; self.n_atoms()];
        for (k, &v) in keep.iter().enumerate() {
            pos[v] = k;
        }
        let ports = self
            .ports
            .iter()
            .filter(|p| pos[p.index] != usize::MAX)
            .map(|p| Port::new(p.label.clone(), pos[p.index]))
            .collect();
        let c = Complex {
            detunings: keep.iter().map(|&i| self.detunings[i]).collect(),
            positions: self
                .positions
                .as_ref()
                .map(|ps| keep.iter().map(|&i| ps[i]).collect()),
            ports,
            radius: self.radius,
            graph: self.graph.induced(keep),
            explicit_edges: self.explicit_edges,
        };
        c.validate()?;
        Ok(c)
    }
}

/// Occupation pattern n_i of all atoms. Ordered like its 0/1 string.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Configuration {
    occupied: VertexSet,
    n: u16,
}

impl Configuration {
    pub fn new(occupied: VertexSet, n: usize) -> Self {
        debug_assert!(occupied.iter().all(|v| v < n));
        Configuration {
            occupied,
            n: n as u16,
        }
    }

    pub fn from_letters(letters: &[bool]) -> Self {
        let set = VertexSet::from_iter(letters.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i));
        Configuration::new(set, letters.len())
    }

    pub fn n_atoms(&self) -> usize {
        self.n as usize
    }

    pub fn occupied(&self) -> &VertexSet {
        &self.occupied
    }

    pub fn is_occupied(&self, i: usize) -> bool {
        self.occupied.contains(i)
    }

    pub fn is_admissible(&self, g: &BlockadeGraph) -> bool {
        g.is_independent(&self.occupied)
    }

    /// Letters of the given atoms, in order.
    pub fn project(&self, atoms: &[usize]) -> Word {
        let mut w = Word::zeros(atoms.len());
        for (k, &a) in atoms.iter().enumerate() {
            w.set(k, self.occupied.contains(a));
        }
        w
    }

    /// Exact PXP energy −Σ Δ_i n_i.
    pub fn energy(&self, detunings: &[Rational]) -> Rational {
        -self
            .occupied
            .iter()
            .map(|i| detunings[i])
            .fold(Rational::zero(), |a, b| a + b)
    }
}

impl Ord for Configuration {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.n.cmp(&o.n).then_with(|| {
            let a = (0..self.n_atoms()).map(|i| self.occupied.contains(i));
            let b = (0..o.n_atoms()).map(|i| o.occupied.contains(i));
            a.cmp(b)
        })
    }
}

impl PartialOrd for Configuration {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n_atoms() {
            f.write_str(if self.occupied.contains(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Configuration({self})")
    }
}
