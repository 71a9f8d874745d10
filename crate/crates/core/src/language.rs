//! Language constructions: truth tables and γ-intersections.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::expr::BooleanFunction;
use crate::model::{Language, Word};

/// Rows of the truth table of `f` as words `inputs ++ [f(inputs)]`.
pub fn truth_table_language(f: &BooleanFunction) -> Result<Language> {
    let n = f.n_inputs();
    if n == 0 {
        return Err(Error::invalid("a truth-table language needs at least one input"));
    }
    Language::new(
        n + 1,
        (0..1usize << n).map(|r| {
            let mut w = Word::zeros(n + 1);
            for i in 0..n {
                w.set(i, (r >> i) & 1 == 1);
            }
            w.set(n, f.row(r));
            w
        }),
    )
}

/// Words on which `f` is true: the language of a complex whose output is pinned to 1.
pub fn satisfying_language(f: &BooleanFunction) -> Result<Language> {
    let n = f.n_inputs();
    Language::new(
        n,
        f.satisfying_rows().map(|r| Word::from_bits(r as u64, n)),
    )
}

/// Pairs of identified letter positions, zero-based: `(i, j)` pairs letter `i`
/// of the first language with letter `j` of the second.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GammaMap {
    pairs: Vec<(usize, usize)>,
}

impl GammaMap {
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        let mut a = BTreeSet::new();
        let mut b = BTreeSet::new();
        for &(i, j) in &pairs {
            if !a.insert(i) || !b.insert(j) {
                return Err(Error::invalid(format!("letter pair ({i},{j}) repeats a position")));
            }
        }
        Ok(GammaMap { pairs })
    }

    pub fn empty() -> Self {
        GammaMap::default()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn check(&self, n1: usize, n2: usize) -> Result<()> {
        for &(i, j) in &self.pairs {
            if i >= n1 || j >= n2 {
                return Err(Error::invalid(format!(
                    "letter pair ({i},{j}) out of range for word lengths {n1} and {n2}"
                )));
            }
        }
        Ok(())
    }

    pub fn first(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn second(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.1).collect()
    }
}

/// Concatenations `x ++ y` of agreeing word pairs with the paired letters of
/// `y` removed; `reduced` removes the paired letters of `x` as well.
///
/// An empty result is returned as an empty language, not as an error.
pub fn gamma_intersection(l1: &Language, l2: &Language, gamma: &GammaMap, reduced: bool) -> Result<Language> {
    let (n1, n2) = (l1.word_length(), l2.word_length());
    gamma.check(n1, n2)?;
    let g1 = gamma.first();
    let g2 = gamma.second();
    let keep1: Vec<usize> = (0..n1).filter(|i| !reduced || !g1.contains(i)).collect();
    let keep2: Vec<usize> = (0..n2).filter(|j| !g2.contains(j)).collect();
    let len = keep1.len() + keep2.len();
    if len > crate::model::MAX_WORD_LENGTH {
        return Err(Error::Resource(format!("intersection words would have {len} letters")));
    }
    let mut by_key: HashMap<Word, Vec<Word>> = HashMap::new();
    for y in l2.iter() {
        by_key.entry(y.select(&g2)).or_default().push(y.select(&keep2));
    }
    let mut out = Vec::new();
    for x in l1.iter() {
        if let Some(ys) = by_key.get(&x.select(&g1)) {
            let xs = x.select(&keep1);
            out.extend(ys.iter().map(|y| xs.concat(y)));
        }
    }
    Language::new(len, out)
}

/// Built-in languages used throughout.
pub mod named {
    use super::*;

    fn lang(n: usize, words: &[&str]) -> Language {
        Language::from_strs(n, words).expect("static language")
    }

    pub fn not() -> Language {
        lang(2, &["01", "10"])
    }
    pub fn lnk() -> Language {
        lang(2, &["00", "11"])
    }
    pub fn cpy() -> Language {
        lang(3, &["000", "111"])
    }
    pub fn nor() -> Language {
        lang(3, &["001", "010", "100", "110"])
    }
    pub fn or() -> Language {
        lang(3, &["000", "011", "101", "111"])
    }
    pub fn and() -> Language {
        lang(3, &["000", "010", "100", "111"])
    }
    pub fn nand() -> Language {
        lang(3, &["001", "011", "101", "110"])
    }
    pub fn xor() -> Language {
        lang(3, &["000", "011", "101", "110"])
    }
    pub fn xnor() -> Language {
        lang(3, &["001", "010", "100", "111"])
    }
    /// Crossing with ports (A, B, Q, R): Q = A, R = B.
    pub fn crs() -> Language {
        lang(4, &["0000", "0101", "1010", "1111"])
    }
    /// Inverted crossing with ports (A, B, Q, R): Q = ¬B, R = ¬A.
    pub fn icrs() -> Language {
        lang(4, &["0011", "0101", "1010", "1100"])
    }
    /// Even parity on four edge letters.
    pub fn scu() -> Language {
        lang(4, &["0000", "0011", "0101", "0110", "1001", "1010", "1100", "1111"])
    }
    pub fn fib_site() -> Language {
        lang(3, &["000", "011", "101", "110", "111"])
    }
}
