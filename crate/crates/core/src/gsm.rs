//! Ground-state manifolds of the hard-blockade Hamiltonian H = −Σ Δ_i n_i.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::Zero;

use crate::bits::MAX_VERTICES;
use crate::error::{Error, Result};
use crate::model::{Complex, Configuration, Language, Rational, Word};
use crate::mwis::Engine;

#[derive(Clone, Debug)]
pub struct GsmOptions {
    /// Largest atom count accepted before giving up with a resource error.
    pub max_atoms: usize,
    /// Cap on configurations listed in either enumeration pass.
    pub max_configurations: usize,
}

impl Default for GsmOptions {
    fn default() -> Self {
        GsmOptions {
            max_atoms: 40,
            max_configurations: 2_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundManifold {
    /// Minimum-energy configurations, sorted.
    pub configurations: Vec<Configuration>,
    pub ground_energy: Rational,
    /// Distance from the ground energy to the lowest excited admissible configuration.
    pub gap: Rational,
    /// Always zero: the returned set is exactly degenerate.
    pub width: Rational,
    /// Port pairs that share a blockade edge.
    pub blockaded_ports: Vec<(String, String)>,
}

impl GroundManifold {
    pub fn len(&self) -> usize {
        self.configurations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configurations.is_empty()
    }

    /// Port words of the ground configurations, in configuration order.
    pub fn port_words(&self, complex: &Complex) -> Vec<Word> {
        let ports = complex.port_indices();
        self.configurations.iter().map(|c| c.project(&ports)).collect()
    }
}

/// Integer weights proportional to the detunings, and the common denominator.
pub(crate) fn integer_weights(detunings: &[Rational]) -> Result<(Vec<i64>, i64)> {
    let mut lcm = 1i64;
    for d in detunings {
        lcm = lcm.lcm(d.denom());
    }
    let mut total: i64 = 0;
    let mut out = Vec::with_capacity(detunings.len());
    for d in detunings {
        let w = d
            .numer()
            .checked_mul(lcm / d.denom())
            .ok_or_else(|| Error::Resource("detuning scale overflows 64 bits".into()))?;
        total = total
            .checked_add(w)
            .ok_or_else(|| Error::Resource("detuning sum overflows 64 bits".into()))?;
        out.push(w);
    }
    Ok((out, lcm))
}

pub fn enumerate_gsm(complex: &Complex) -> Result<GroundManifold> {
    enumerate_gsm_with(complex, &GsmOptions::default())
}

pub fn enumerate_gsm_with(complex: &Complex, opts: &GsmOptions) -> Result<GroundManifold> {
    let n = complex.n_atoms();
    if n > opts.max_atoms.min(MAX_VERTICES) {
        return Err(Error::Resource(format!(
            "{n} atoms exceed the enumeration bound of {}",
            opts.max_atoms.min(MAX_VERTICES)
        )));
    }
    let (w, scale) = integer_weights(complex.detunings())?;
    let mut engine = Engine::new(complex.graph().adjacency(), &w);
    let w0 = engine.best_all()?;
    let ground = engine.at_least(w0, opts.max_configurations)?;

    // dropping a ground vertex costs its weight, so the gap never exceeds the
    // smallest weight occurring in a ground configuration
    let mut d = i64::MAX;
    for (s, _) in &ground {
        for v in s.iter() {
            d = d.min(w[v]);
        }
    }
    let near = engine.at_least(w0 - d + 1, opts.max_configurations)?;
    let best_excited = near.iter().map(|&(_, x)| x).filter(|&x| x < w0).max();
    let gap_int = match best_excited {
        Some(x) => w0 - x,
        None => d,
    };

    let mut configurations: Vec<Configuration> =
        ground.into_iter().map(|(s, _)| Configuration::new(s, n)).collect();
    configurations.sort();
    Ok(GroundManifold {
        configurations,
        ground_energy: -Rational::new(w0, scale),
        gap: Rational::new(gap_int, scale),
        width: Rational::zero(),
        blockaded_ports: complex.blockaded_port_pairs(),
    })
}

/// Max minus min PXP energy over a candidate logical set; zero for a degenerate set.
pub fn candidate_width(complex: &Complex, candidates: &[Configuration]) -> Rational {
    let energies: Vec<Rational> = candidates.iter().map(|c| c.energy(complex.detunings())).collect();
    match (energies.iter().max(), energies.iter().min()) {
        (Some(a), Some(b)) => a - b,
        _ => Rational::zero(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// Each language word with the occupied ancilla atoms of its unique completion.
    Yes { ancilla_map: Vec<(Word, Vec<usize>)> },
    No {
        reason: String,
        counterexample: Option<Word>,
    },
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes { .. })
    }
}

pub fn realizes_language(complex: &Complex, language: &Language) -> Result<Verdict> {
    let gsm = enumerate_gsm(complex)?;
    realizes_with(complex, &gsm, language)
}

/// Same as [`realizes_language`] but on an already computed manifold.
pub fn realizes_with(complex: &Complex, gsm: &GroundManifold, language: &Language) -> Result<Verdict> {
    if language.word_length() != complex.n_ports() {
        return Err(Error::Dimension {
            expected: complex.n_ports(),
            found: language.word_length(),
        });
    }
    let ports = complex.port_indices();
    let is_port = {
        let mut m = vec![false; complex.n_atoms()];
        ports.iter().for_each(|&p| m[p] = true);
        m
    };
    let mut seen: BTreeMap<Word, Vec<usize>> = BTreeMap::new();
    for c in &gsm.configurations {
        let word = c.project(&ports);
        if !language.contains(&word) {
            return Ok(Verdict::No {
                reason: format!("ground configuration {c} projects to {word}, which is not in the language"),
                counterexample: Some(word),
            });
        }
        let completion = c.occupied().iter().filter(|&a| !is_port[a]).collect();
        if seen.insert(word, completion).is_some() {
            return Ok(Verdict::No {
                reason: format!("word {word} has more than one ancilla completion in the ground manifold"),
                counterexample: Some(word),
            });
        }
    }
    if let Some(missing) = language.iter().find(|w| !seen.contains_key(w)) {
        return Ok(Verdict::No {
            reason: format!("word {missing} is not realized by any ground configuration"),
            counterexample: Some(*missing),
        });
    }
    Ok(Verdict::Yes {
        ancilla_map: seen.into_iter().collect(),
    })
}

/// Sub-complex with port `label` forced to 1: the port and its blockade
/// neighbourhood are deleted, other ports keep their order.
///
/// Ports in blockade with the fixed port are deleted as well; their letters
/// are identically 0 in the restricted language. [`fixed_port_removals`]
/// lists them. The result is checked: its ground manifold must realize the
/// restricted language with ground energy shifted by the port's detuning,
/// otherwise an error is returned.
pub fn fix_port(complex: &Complex, label: &str) -> Result<Complex> {
    let p = complex
        .port_atom(label)
        .ok_or_else(|| Error::invalid(format!("no port labelled `{label}`")))?;
    let nb = complex.graph().neighbors(p);
    let gsm = enumerate_gsm(complex)?;
    if !gsm.configurations.iter().any(|c| c.is_occupied(p)) {
        return Err(Error::EmptyLanguage(format!(
            "port `{label}` is never excited in the ground manifold"
        )));
    }
    let removed = nb.with(p);
    let keep: Vec<usize> = (0..complex.n_atoms()).filter(|&i| !removed.contains(i)).collect();
    if keep.is_empty() {
        return Err(Error::invalid(format!(
            "fixing port `{label}` removes every atom"
        )));
    }
    let sub = complex.induced(&keep)?;
    let sub_ports: Vec<usize> = complex
        .ports()
        .iter()
        .filter(|q| !removed.contains(q.index))
        .map(|q| q.index)
        .collect();
    let restricted = Language::new(
        sub_ports.len(),
        gsm.configurations
            .iter()
            .filter(|c| c.is_occupied(p))
            .map(|c| c.project(&sub_ports)),
    )?;
    let sub_gsm = enumerate_gsm(&sub)?;
    let shifted = sub_gsm.ground_energy == gsm.ground_energy + complex.detunings()[p];
    match realizes_with(&sub, &sub_gsm, &restricted)? {
        Verdict::Yes { .. } if shifted => Ok(sub),
        Verdict::Yes { .. } => Err(Error::invalid(format!(
            "fixing port `{label}` does not shift the ground energy by its detuning"
        ))),
        Verdict::No { reason, .. } => Err(Error::invalid(format!(
            "fixing port `{label}` does not yield the restricted language: {reason}"
        ))),
    }
}

/// Ports that [`fix_port`] drops besides the fixed one.
pub fn fixed_port_removals(complex: &Complex, label: &str) -> Vec<String> {
    let Some(p) = complex.port_atom(label) else {
        return Vec::new();
    };
    let nb = complex.graph().neighbors(p);
    complex
        .ports()
        .iter()
        .filter(|q| nb.contains(q.index))
        .map(|q| q.label.clone())
        .collect()
}

/// Classical van der Waals energies of every occupation vector.
#[derive(Clone, Debug)]
pub struct VdwReport {
    /// Energy of occupation `m`, where bit `i` of `m` is atom `i`.
    pub energies: Vec<f64>,
    /// Logical configurations (the hard-blockade ground manifold) as bit masks.
    pub logical: Vec<u64>,
    /// Max minus min energy over the logical set.
    pub width: f64,
    /// Lowest non-logical energy minus highest logical energy.
    pub gap: f64,
}

impl VdwReport {
    /// Width over gap, +∞ when the gap is not positive.
    pub fn ratio(&self) -> f64 {
        if self.gap > 0.0 {
            self.width / self.gap
        } else {
            f64::INFINITY
        }
    }
}

pub const MAX_VDW_ATOMS: usize = 24;

pub fn vdw_energies(complex: &Complex, c6: f64) -> Result<VdwReport> {
    let gsm = enumerate_gsm(complex)?;
    let logical: Vec<u64> = gsm
        .configurations
        .iter()
        .map(|c| c.occupied().iter().fold(0u64, |m, i| m | 1 << i))
        .collect();
    vdw_energies_for(complex, c6, &logical)
}

/// vdW energies with a caller-chosen logical set.
pub fn vdw_energies_for(complex: &Complex, c6: f64, logical: &[u64]) -> Result<VdwReport> {
    let pos = complex
        .positions()
        .ok_or_else(|| Error::invalid("van der Waals energies need atom positions"))?;
    if !(c6 > 0.0 && c6.is_finite()) {
        return Err(Error::invalid("c6 must be positive"));
    }
    let n = pos.len();
    if n > MAX_VDW_ATOMS {
        return Err(Error::Resource(format!(
            "{n} atoms exceed the {MAX_VDW_ATOMS}-atom bound for exhaustive vdW energies"
        )));
    }
    let det: Vec<f64> = complex
        .detunings()
        .iter()
        .map(|d| *d.numer() as f64 / *d.denom() as f64)
        .collect();
    let mut pair = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..i {
            let r = pos[i].dist(&pos[j]);
            let u = if r == 0.0 { f64::INFINITY } else { c6 / r.powi(6) };
            pair[i][j] = u;
            pair[j][i] = u;
        }
    }
    let mut energies = vec![0.0f64; 1 << n];
    for m in 1usize..(1 << n) {
        let top = usize::BITS as usize - 1 - m.leading_zeros() as usize;
        let rest = m & !(1 << top);
        let mut e = energies[rest] - det[top];
        let mut r = rest;
        while r != 0 {
            let j = r.trailing_zeros() as usize;
            e += pair[top][j];
            r &= r - 1;
        }
        energies[m] = e;
    }
    let mut lmax = f64::NEG_INFINITY;
    let mut lmin = f64::INFINITY;
    for &m in logical {
        lmax = lmax.max(energies[m as usize]);
        lmin = lmin.min(energies[m as usize]);
    }
    let mut is_logical = vec![false; 1 << n];
    for &m in logical {
        is_logical[m as usize] = true;
    }
    let other = energies
        .iter()
        .zip(&is_logical)
        .filter(|(_, &l)| !l)
        .map(|(&e, _)| e)
        .fold(f64::INFINITY, f64::min);
    let width = if logical.is_empty() { 0.0 } else { lmax - lmin };
    Ok(VdwReport {
        energies,
        logical: logical.to_vec(),
        width,
        gap: other - lmax,
    })
}
