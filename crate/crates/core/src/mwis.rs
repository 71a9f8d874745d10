//! Exact maximum-weight independent set machinery on integer weights.
//!
//! `best(mask)` is memoized over vertex subsets and splits into connected
//! components, which keeps amalgamated gadget graphs tractable. Enumeration of
//! all independent sets above a threshold walks the same branching tree and
//! prunes with the exact bound, so every visited leaf is an output.

use rustc_hash::FxHashMap;

use crate::bits::VertexSet;
use crate::error::{Error, Result};

pub(crate) struct Engine {
    /// adjacency in internal (reordered) labels
    adj: Vec<VertexSet>,
    closed: Vec<VertexSet>,
    w: Vec<i64>,
    /// internal label -> original vertex
    to_orig: Vec<usize>,
    memo: FxHashMap<VertexSet, i64>,
    memo_limit: usize,
}

/// Linear order that keeps the boundary between placed and unplaced vertices small.
fn branching_order(adj: &[VertexSet]) -> Vec<usize> {
    let n = adj.len();
    let mut placed = VertexSet::empty();
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<(usize, (usize, isize))> = None;
        for v in 0..n {
            if placed.contains(v) {
                continue;
            }
            let inside = adj[v].and(&placed).len();
            let outside = adj[v].minus(&placed).len() as isize;
            let key = (inside, -outside);
            if best.is_none_or(|(_, k)| key > k) {
                best = Some((v, key));
            }
        }
        let v = best.expect("unplaced vertex").0;
        placed.insert(v);
        order.push(v);
    }
    order
}

impl Engine {
    pub(crate) fn new(adj: &[VertexSet], weights: &[i64]) -> Self {
        let n = adj.len();
        let order = branching_order(adj);
        let mut to_int = vec![0; n];
        for (k, &v) in order.iter().enumerate() {
            to_int[v] = k;
        }
        let mut iadj = vec![VertexSet::empty(); n];
        for v in 0..n {
            for u in adj[v].iter() {
                iadj[to_int[v]].insert(to_int[u]);
            }
        }
        let closed = (0..n).map(|v| iadj[v].with(v)).collect();
        Engine {
            adj: iadj,
            closed,
            w: order.iter().map(|&v| weights[v]).collect(),
            to_orig: order,
            memo: FxHashMap::default(),
            memo_limit: 40_000_000,
        }
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    fn component(&self, v: usize, mask: VertexSet) -> VertexSet {
        let mut seen = VertexSet::singleton(v);
        let mut frontier = seen;
        loop {
            let mut next = VertexSet::empty();
            for u in frontier.iter() {
                next = next.or(&self.adj[u]);
            }
            let next = next.and(&mask).minus(&seen);
            if next.is_empty() {
                return seen;
            }
            seen = seen.or(&next);
            frontier = next;
        }
    }

    /// Maximum weight of an independent subset of `mask`.
    pub(crate) fn best(&mut self, mask: VertexSet) -> Result<i64> {
        let Some(v) = mask.first() else {
            return Ok(0);
        };
        if let Some(&b) = self.memo.get(&mask) {
            return Ok(b);
        }
        let rest = mask.without(v);
        let r = if !self.adj[v].intersects(&rest) {
            self.w[v] + self.best(rest)?
        } else {
            let comp = self.component(v, mask);
            if comp != mask {
                self.best(comp)? + self.best(mask.minus(&comp))?
            } else {
                let inc = self.w[v] + self.best(mask.minus(&self.closed[v]))?;
                let exc = self.best(rest)?;
                inc.max(exc)
            }
        };
        if self.memo.len() >= self.memo_limit {
            return Err(Error::Resource(format!(
                "independent-set memo exceeded {} entries",
                self.memo_limit
            )));
        }
        self.memo.insert(mask, r);
        Ok(r)
    }

    pub(crate) fn best_all(&mut self) -> Result<i64> {
        self.best(VertexSet::full(self.n()))
    }

    /// All independent sets with weight >= `threshold`, in original labels.
    pub(crate) fn at_least(&mut self, threshold: i64, limit: usize) -> Result<Vec<(VertexSet, i64)>> {
        let mut out = Vec::new();
        self.walk(VertexSet::full(self.n()), VertexSet::empty(), 0, threshold, limit, &mut out)?;
        Ok(out
            .into_iter()
            .map(|(s, w)| (VertexSet::from_iter(s.iter().map(|v| self.to_orig[v])), w))
            .collect())
    }

    fn walk(
        &mut self,
        mask: VertexSet,
        chosen: VertexSet,
        acc: i64,
        threshold: i64,
        limit: usize,
        out: &mut Vec<(VertexSet, i64)>,
    ) -> Result<()> {
        if acc + self.best(mask)? < threshold {
            return Ok(());
        }
        match mask.first() {
            None => {
                out.push((chosen, acc));
                if out.len() > limit {
                    return Err(Error::Resource(format!(
                        "more than {limit} configurations above the energy threshold"
                    )));
                }
                Ok(())
            }
            Some(v) => {
                let inc_mask = mask.minus(&self.closed[v]);
                self.walk(inc_mask, chosen.with(v), acc + self.w[v], threshold, limit, out)?;
                self.walk(mask.without(v), chosen, acc, threshold, limit, out)
            }
        }
    }
}
