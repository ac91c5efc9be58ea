//! Matroid oracles over edge ids: independence, circuits of `I + e`, and the
//! greedy maximum-weight base.

use std::collections::VecDeque;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::instance::EdgeId;

#[derive(Debug, Error, PartialEq)]
pub enum MatroidError {
    #[error("the given set is not independent")]
    DependentInput,
    #[error("invalid matroid: {0}")]
    InvalidSpec(String),
}

pub trait Matroid: Send + Sync {
    fn is_independent(&self, set: &[EdgeId]) -> bool;

    /// Rank of the whole ground set; the number of matroid queues.
    fn rank(&self) -> usize;

    /// The unique circuit inside `indep + e`, or `None` if `indep + e` is
    /// independent. The circuit is returned sorted.
    fn find_circuit(&self, indep: &[EdgeId], e: EdgeId) -> Result<Option<Vec<EdgeId>>, MatroidError> {
        circuit_by_queries(self, indep, e)
    }
}

impl<T: Matroid + ?Sized> Matroid for Box<T> {
    fn is_independent(&self, set: &[EdgeId]) -> bool {
        (**self).is_independent(set)
    }
    fn rank(&self) -> usize {
        (**self).rank()
    }
    fn find_circuit(&self, indep: &[EdgeId], e: EdgeId) -> Result<Option<Vec<EdgeId>>, MatroidError> {
        (**self).find_circuit(indep, e)
    }
}

/// Circuit of `indep + e` using only independence queries: an element `x` of
/// `indep` lies on the circuit iff removing it from `indep + e` restores
/// independence.
pub fn circuit_by_queries<M: Matroid + ?Sized>(
    m: &M,
    indep: &[EdgeId],
    e: EdgeId,
) -> Result<Option<Vec<EdgeId>>, MatroidError> {
    if !m.is_independent(indep) {
        return Err(MatroidError::DependentInput);
    }
    if indep.contains(&e) {
        return Ok(None);
    }
    let mut with: Vec<EdgeId> = indep.to_vec();
    with.push(e);
    if m.is_independent(&with) {
        return Ok(None);
    }
    let mut circuit = vec![e];
    let mut probe = Vec::with_capacity(indep.len());
    for (i, &x) in indep.iter().enumerate() {
        probe.clear();
        probe.extend(indep.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &y)| y));
        probe.push(e);
        if m.is_independent(&probe) {
            circuit.push(x);
        }
    }
    circuit.sort_unstable();
    Ok(Some(circuit))
}

/// Sets of size at most `rank` are independent.
#[derive(Debug, Clone)]
pub struct UniformMatroid {
    rank: usize,
}

impl UniformMatroid {
    pub fn new(rank: usize) -> Self {
        Self { rank }
    }
}

impl Matroid for UniformMatroid {
    fn is_independent(&self, set: &[EdgeId]) -> bool {
        set.len() <= self.rank
    }

    fn rank(&self) -> usize {
        self.rank
    }

    fn find_circuit(&self, indep: &[EdgeId], e: EdgeId) -> Result<Option<Vec<EdgeId>>, MatroidError> {
        if indep.len() > self.rank {
            return Err(MatroidError::DependentInput);
        }
        if indep.contains(&e) || indep.len() < self.rank {
            return Ok(None);
        }
        let mut c = indep.to_vec();
        c.push(e);
        c.sort_unstable();
        Ok(Some(c))
    }
}

/// Each element belongs to one part; at most `caps[p]` elements of part `p`
/// may be chosen.
#[derive(Debug, Clone)]
pub struct PartitionMatroid {
    part_of: Vec<usize>,
    caps: Vec<usize>,
}

impl PartitionMatroid {
    pub fn new(part_of: Vec<usize>, caps: Vec<usize>) -> Result<Self, MatroidError> {
        if let Some(&p) = part_of.iter().find(|&&p| p >= caps.len()) {
            return Err(MatroidError::InvalidSpec(format!("part {p} has no capacity")));
        }
        Ok(Self { part_of, caps })
    }

    fn counts(&self, set: &[EdgeId]) -> Vec<usize> {
        let mut counts = vec![0; self.caps.len()];
        for &e in set {
            counts[self.part_of[e]] += 1;
        }
        counts
    }
}

impl Matroid for PartitionMatroid {
    fn is_independent(&self, set: &[EdgeId]) -> bool {
        self.counts(set).iter().zip(&self.caps).all(|(c, cap)| c <= cap)
    }

    fn rank(&self) -> usize {
        let mut sizes = vec![0; self.caps.len()];
        for &p in &self.part_of {
            sizes[p] += 1;
        }
        sizes.iter().zip(&self.caps).map(|(&s, &c)| s.min(c)).sum()
    }

    fn find_circuit(&self, indep: &[EdgeId], e: EdgeId) -> Result<Option<Vec<EdgeId>>, MatroidError> {
        if !self.is_independent(indep) {
            return Err(MatroidError::DependentInput);
        }
        let part = self.part_of[e];
        if indep.contains(&e) || self.counts(indep)[part] < self.caps[part] {
            return Ok(None);
        }
        let mut c: Vec<EdgeId> = indep.iter().copied().filter(|&x| self.part_of[x] == part).collect();
        c.push(e);
        c.sort_unstable();
        Ok(Some(c))
    }
}

/// Cycle matroid of an auxiliary multigraph: a set is independent iff its
/// auxiliary edges form a forest.
#[derive(Debug, Clone)]
pub struct GraphicMatroid {
    aux_n: usize,
    ends: Vec<(usize, usize)>,
}

impl GraphicMatroid {
    pub fn new(aux_n: usize, ends: Vec<(usize, usize)>) -> Result<Self, MatroidError> {
        if let Some(&(u, v)) = ends.iter().find(|&&(u, v)| u >= aux_n || v >= aux_n) {
            return Err(MatroidError::InvalidSpec(format!("auxiliary edge ({u}, {v}) leaves [0, {aux_n})")));
        }
        Ok(Self { aux_n, ends })
    }

    /// Auxiliary edges of `indep` on the tree path from `from` to `to`.
    fn forest_path(&self, indep: &[EdgeId], from: usize, to: usize) -> Option<Vec<EdgeId>> {
        let mut adj: Vec<Vec<(usize, EdgeId)>> = vec![Vec::new(); self.aux_n];
        for &x in indep {
            let (a, b) = self.ends[x];
            adj[a].push((b, x));
            adj[b].push((a, x));
        }
        let mut via: Vec<Option<(usize, EdgeId)>> = vec![None; self.aux_n];
        let mut seen = vec![false; self.aux_n];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(a) = queue.pop_front() {
            if a == to {
                let mut path = Vec::new();
                let mut cur = to;
                while let Some((prev, x)) = via[cur] {
                    path.push(x);
                    cur = prev;
                }
                return Some(path);
            }
            for &(b, x) in &adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    via[b] = Some((a, x));
                    queue.push_back(b);
                }
            }
        }
        None
    }
}

impl Matroid for GraphicMatroid {
    fn is_independent(&self, set: &[EdgeId]) -> bool {
        let mut uf = UnionFind::<usize>::new(self.aux_n);
        set.iter().all(|&x| {
            let (a, b) = self.ends[x];
            uf.union(a, b)
        })
    }

    fn rank(&self) -> usize {
        let mut uf = UnionFind::<usize>::new(self.aux_n);
        self.ends.iter().filter(|&&(a, b)| uf.union(a, b)).count()
    }

    fn find_circuit(&self, indep: &[EdgeId], e: EdgeId) -> Result<Option<Vec<EdgeId>>, MatroidError> {
        if !self.is_independent(indep) {
            return Err(MatroidError::DependentInput);
        }
        if indep.contains(&e) {
            return Ok(None);
        }
        let (u, v) = self.ends[e];
        Ok(self.forest_path(indep, u, v).map(|mut c| {
            c.push(e);
            c.sort_unstable();
            c
        }))
    }
}

/// Greedy maximum-weight base of `universe`: elements by descending weight
/// (ties by id), each kept if it preserves independence.
pub fn max_weight_base<M: Matroid + ?Sized>(m: &M, weights: &[f64], universe: &[EdgeId]) -> (Vec<EdgeId>, f64) {
    let mut order = universe.to_vec();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let mut base = Vec::new();
    let mut total = 0.0;
    for e in order {
        base.push(e);
        if m.is_independent(&base) {
            total += weights[e];
        } else {
            base.pop();
        }
    }
    (base, total)
}
