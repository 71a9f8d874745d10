//! Language symmetries and small-graph isomorphism.

use crate::model::{Language, Word};

/// Letter permutations `π` with `π(L) = L`; word `w` maps to the word whose
/// letter `π[i]` is `w[i]`. Identity first.
pub fn language_automorphisms(lang: &Language) -> Vec<Vec<usize>> {
    let n = lang.word_length();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        if lang.permute(&perm) == *lang {
            out.push(perm.clone());
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Applies a letter permutation to a word.
pub fn permute_word(w: &Word, perm: &[usize]) -> Word {
    let mut out = Word::zeros(w.len());
    for (i, &p) in perm.iter().enumerate() {
        out.set(p, w.get(i));
    }
    out
}

/// Induced permutation of word indices (into the sorted word list).
pub fn word_index_maps(lang: &Language, perms: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let words: Vec<&Word> = lang.iter().collect();
    perms
        .iter()
        .map(|p| {
            words
                .iter()
                .map(|w| {
                    let img = permute_word(w, p);
                    words.binary_search(&&img).expect("automorphism maps L to L")
                })
                .collect()
        })
        .collect()
}

/// Maps a set of word indices through an index permutation.
pub fn map_mask(mask: u64, map: &[usize]) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        out |= 1 << map[i];
        m &= m - 1;
    }
    out
}

/// Adjacency rows as bitmasks; at most 64 vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SmallGraph {
    pub adj: Vec<u64>,
    pub colors: Vec<u32>,
}

impl SmallGraph {
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn uncolored(&self) -> SmallGraph {
        SmallGraph {
            adj: self.adj.clone(),
            colors: vec![0; self.adj.len()],
        }
    }

    fn degree(&self, v: usize) -> u32 {
        self.adj[v].count_ones()
    }

    /// Colors refined by iterated neighbourhood color multisets.
    fn refined(&self) -> Vec<u64> {
        let n = self.n();
        let mut c: Vec<u64> = (0..n).map(|v| ((self.colors[v] as u64) << 32) | self.degree(v) as u64).collect();
        for _ in 0..n {
            let mut next: Vec<(u64, Vec<u64>)> = (0..n)
                .map(|v| {
                    let mut nb: Vec<u64> = (0..n).filter(|&u| self.adj[v] >> u & 1 == 1).map(|u| c[u]).collect();
                    nb.sort_unstable();
                    (c[v], nb)
                })
                .collect();
            let mut keys = next.clone();
            keys.sort();
            keys.dedup();
            let relabeled: Vec<u64> = next
                .drain(..)
                .map(|k| keys.binary_search(&k).expect("present") as u64)
                .collect();
            let classes_before = {
                let mut s = c.clone();
                s.sort_unstable();
                s.dedup();
                s.len()
            };
            c = relabeled;
            if keys.len() == classes_before {
                break;
            }
        }
        c
    }

    /// Isomorphism invariant: sorted refined classes with their sizes.
    pub fn invariant(&self) -> Vec<(u32, u32, usize)> {
        let n = self.n();
        let mut v: Vec<(u32, u32, usize)> = (0..n)
            .map(|i| {
                let deg = self.degree(i);
                let tri = (0..n)
                    .filter(|&j| self.adj[i] >> j & 1 == 1)
                    .map(|j| (self.adj[i] & self.adj[j]).count_ones())
                    .sum::<u32>();
                (self.colors[i], deg, tri as usize)
            })
            .collect();
        v.sort_unstable();
        v
    }
}

/// Exact colored isomorphism test by backtracking on refined classes.
pub fn isomorphic(a: &SmallGraph, b: &SmallGraph) -> bool {
    let n = a.n();
    if n != b.n() || a.invariant() != b.invariant() {
        return false;
    }
    // refine jointly so that class labels are comparable
    let joint = SmallGraph {
        adj: a
            .adj
            .iter()
            .copied()
            .chain(b.adj.iter().map(|r| r << n))
            .collect(),
        colors: a.colors.iter().chain(&b.colors).copied().collect(),
    };
    if 2 * n > 64 {
        return isomorphic_plain(a, b);
    }
    let cls = joint.refined();
    let (ca, cb) = cls.split_at(n);
    let mut sa = ca.to_vec();
    let mut sb = cb.to_vec();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return false;
    }
    let mut order: Vec<usize> = (0..n).collect();
    // rarest class first
    order.sort_by_key(|&v| (ca.iter().filter(|&&c| c == ca[v]).count(), v));
    let mut map = vec![usize::MAX; n];
    let mut used = 0u64;
    extend(a, b, ca, cb, &order, 0, &mut map, &mut used)
}

fn isomorphic_plain(a: &SmallGraph, b: &SmallGraph) -> bool {
    let n = a.n();
    let ca: Vec<u64> = (0..n).map(|v| ((a.colors[v] as u64) << 32) | a.degree(v) as u64).collect();
    let cb: Vec<u64> = (0..n).map(|v| ((b.colors[v] as u64) << 32) | b.degree(v) as u64).collect();
    let order: Vec<usize> = (0..n).collect();
    let mut map = vec![usize::MAX; n];
    let mut used = 0u64;
    extend(a, b, &ca, &cb, &order, 0, &mut map, &mut used)
}

#[allow(clippy::too_many_arguments)]
fn extend(
    a: &SmallGraph,
    b: &SmallGraph,
    ca: &[u64],
    cb: &[u64],
    order: &[usize],
    k: usize,
    map: &mut [usize],
    used: &mut u64,
) -> bool {
    if k == order.len() {
        return true;
    }
    let v = order[k];
    for u in 0..b.n() {
        if *used >> u & 1 == 1 || cb[u] != ca[v] {
            continue;
        }
        let ok = order[..k].iter().all(|&w| {
            let x = map[w];
            (a.adj[v] >> w & 1) == (b.adj[u] >> x & 1)
        });
        if !ok {
            continue;
        }
        map[v] = u;
        *used |= 1 << u;
        if extend(a, b, ca, cb, order, k + 1, map, used) {
            return true;
        }
        *used &= !(1 << u);
        map[v] = usize::MAX;
    }
    false
}
