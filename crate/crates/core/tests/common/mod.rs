//! Exhaustive oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use blockforge::gsm::GroundManifold;
use blockforge::model::{Complex, Rational};
use num_traits::Zero;

/// Ground energy, ground masks (sorted) and gap by scanning all 2^N occupations.
pub struct Brute {
    pub ground_energy: Rational,
    pub ground: Vec<u32>,
    pub gap: Option<Rational>,
}

pub fn brute_force(n: usize, edges: &[(usize, usize)], det: &[Rational]) -> Brute {
    assert!(n <= 24, "brute force is limited to 24 atoms");
    let mut nb = vec![0u32; n];
    for &(i, j) in edges {
        nb[i] |= 1 << j;
        nb[j] |= 1 << i;
    }
    let mut energies: Vec<(Rational, u32)> = Vec::new();
    'masks: for m in 0u32..(1 << n) {
        let mut e = Rational::zero();
        for i in 0..n {
            if m >> i & 1 == 1 {
                if nb[i] & m != 0 {
                    continue 'masks;
                }
                e -= det[i];
            }
        }
        energies.push((e, m));
    }
    let e0 = energies.iter().map(|x| x.0).min().expect("the empty set is independent");
    let mut ground: Vec<u32> = energies.iter().filter(|x| x.0 == e0).map(|x| x.1).collect();
    ground.sort();
    let gap = energies.iter().filter(|x| x.0 != e0).map(|x| x.0 - e0).min();
    Brute {
        ground_energy: e0,
        ground,
        gap,
    }
}

pub fn brute_complex(c: &Complex) -> Brute {
    brute_force(c.n_atoms(), &c.graph().edges(), c.detunings())
}

pub fn masks(gsm: &GroundManifold) -> Vec<u32> {
    let mut v: Vec<u32> = gsm
        .configurations
        .iter()
        .map(|c| c.occupied().iter().fold(0u32, |m, i| m | 1 << i))
        .collect();
    v.sort();
    v
}

/// Port projection of an occupation mask as a 0/1 string in port order.
pub fn port_string(c: &Complex, mask: u32) -> String {
    c.ports()
        .iter()
        .map(|p| if mask >> p.index & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Port words of the ground masks, plus whether every word has exactly one completion.
pub fn projected(c: &Complex, ground: &[u32]) -> (BTreeSet<String>, bool) {
    let words: Vec<String> = ground.iter().map(|&m| port_string(c, m)).collect();
    let set: BTreeSet<String> = words.iter().cloned().collect();
    let unique = set.len() == words.len();
    (set, unique)
}

pub fn set(words: &[&str]) -> BTreeSet<String> {
    words.iter().map(|s| s.to_string()).collect()
}

/// Words `x1..xg y` of a truth table given by a closure over the input bits.
pub fn truth_table(g: usize, f: impl Fn(&[bool]) -> bool) -> BTreeSet<String> {
    (0..1usize << g)
        .map(|r| {
            let x: Vec<bool> = (0..g).map(|i| r >> i & 1 == 1).collect();
            let mut s: String = x.iter().map(|&b| if b { '1' } else { '0' }).collect();
            s.push(if f(&x) { '1' } else { '0' });
            s
        })
        .collect()
}
