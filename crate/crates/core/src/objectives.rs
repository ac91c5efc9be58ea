//! Set-function oracles over edge sets and the grow-only marginal session the
//! streaming phase queries.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::instance::EdgeId;

#[derive(Debug, Error, PartialEq)]
pub enum ObjectiveError {
    #[error("item {item} is not declared")]
    UnknownItem { item: u64 },
    #[error("negative weight {0}")]
    NegativeWeight(f64),
    #[error("edge {0} outside the ground set")]
    UnknownEdge(EdgeId),
    #[error("edge {0} already committed")]
    DoubleCommit(EdgeId),
}

/// A non-negative set function `f: 2^E -> R+` over edge ids.
pub trait Objective: Send + Sync {
    /// `f(set)`. `set` holds distinct edge ids in any order.
    fn value(&self, set: &[EdgeId]) -> f64;

    fn is_monotone(&self) -> bool;

    fn empty_value(&self) -> f64 {
        self.value(&[])
    }

    /// `f(e | set)`; zero when `e` is already in `set`.
    fn marginal(&self, set: &[EdgeId], e: EdgeId) -> f64 {
        if set.contains(&e) {
            return 0.0;
        }
        let mut with = set.to_vec();
        with.push(e);
        self.value(&with) - self.value(set)
    }
}

impl<T: Objective + ?Sized> Objective for Box<T> {
    fn value(&self, set: &[EdgeId]) -> f64 {
        (**self).value(set)
    }
    fn is_monotone(&self) -> bool {
        (**self).is_monotone()
    }
    fn marginal(&self, set: &[EdgeId], e: EdgeId) -> f64 {
        (**self).marginal(set, e)
    }
}

/// Sum of edge weights.
#[derive(Debug, Clone)]
pub struct LinearObjective {
    weights: Vec<f64>,
}

impl LinearObjective {
    pub fn new(weights: Vec<f64>) -> Self {
        Self { weights }
    }
}

impl Objective for LinearObjective {
    fn value(&self, set: &[EdgeId]) -> f64 {
        set.iter().map(|&e| self.weights[e]).sum()
    }

    fn is_monotone(&self) -> bool {
        true
    }

    fn marginal(&self, set: &[EdgeId], e: EdgeId) -> f64 {
        if set.contains(&e) {
            0.0
        } else {
            self.weights[e]
        }
    }
}

/// Weighted coverage: total weight of the items covered by at least one edge.
#[derive(Debug, Clone)]
pub struct CoverageObjective {
    item_weights: Vec<f64>,
    covers: Vec<Vec<usize>>,
}

impl CoverageObjective {
    pub fn new(items: BTreeMap<u64, f64>, covers: Vec<Vec<u64>>) -> Result<Self, ObjectiveError> {
        if let Some(&w) = items.values().find(|&&w| w.is_nan() || w < 0.0) {
            return Err(ObjectiveError::NegativeWeight(w));
        }
        let dense: BTreeMap<u64, usize> = items.keys().enumerate().map(|(i, &k)| (k, i)).collect();
        let covers = covers
            .into_iter()
            .map(|c| {
                c.into_iter()
                    .map(|item| dense.get(&item).copied().ok_or(ObjectiveError::UnknownItem { item }))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { item_weights: items.into_values().collect(), covers })
    }
}

impl Objective for CoverageObjective {
    fn value(&self, set: &[EdgeId]) -> f64 {
        let mut seen = vec![false; self.item_weights.len()];
        let mut total = 0.0;
        for &e in set {
            for &i in &self.covers[e] {
                if !seen[i] {
                    seen[i] = true;
                    total += self.item_weights[i];
                }
            }
        }
        total
    }

    fn is_monotone(&self) -> bool {
        true
    }
}

/// Cut function of a weighted interaction graph whose nodes are the edges of
/// the instance: `f(X)` sums the weights of pairs with exactly one side in `X`.
#[derive(Debug, Clone)]
pub struct CutObjective {
    adjacency: Vec<Vec<(EdgeId, f64)>>,
}

impl CutObjective {
    pub fn new(ground: usize, pairs: impl IntoIterator<Item = (EdgeId, EdgeId, f64)>) -> Result<Self, ObjectiveError> {
        let mut adjacency = vec![Vec::new(); ground];
        for (a, b, w) in pairs {
            if w.is_nan() || w < 0.0 {
                return Err(ObjectiveError::NegativeWeight(w));
            }
            if a >= ground {
                return Err(ObjectiveError::UnknownEdge(a));
            }
            if b >= ground {
                return Err(ObjectiveError::UnknownEdge(b));
            }
            if a == b {
                continue;
            }
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
        }
        Ok(Self { adjacency })
    }
}

impl Objective for CutObjective {
    fn value(&self, set: &[EdgeId]) -> f64 {
        let mut inside = vec![false; self.adjacency.len()];
        for &e in set {
            inside[e] = true;
        }
        set.iter().flat_map(|&a| self.adjacency[a].iter()).filter(|(b, _)| !inside[*b]).map(|(_, w)| w).sum()
    }

    fn is_monotone(&self) -> bool {
        false
    }
}

/// Marginal evaluation against a set that only ever grows.
pub struct MarginalSession<'a> {
    oracle: &'a dyn Objective,
    members: Vec<EdgeId>,
    present: HashSet<EdgeId>,
    current: f64,
}

impl<'a> MarginalSession<'a> {
    pub fn new(oracle: &'a dyn Objective) -> Self {
        Self { oracle, members: Vec::new(), present: HashSet::new(), current: oracle.empty_value() }
    }

    /// `f(e | S)` for the committed set `S`.
    pub fn marginal(&self, e: EdgeId) -> f64 {
        if self.present.contains(&e) {
            return 0.0;
        }
        self.oracle.marginal(&self.members, e)
    }

    pub fn commit(&mut self, e: EdgeId) -> Result<(), ObjectiveError> {
        if !self.present.insert(e) {
            return Err(ObjectiveError::DoubleCommit(e));
        }
        self.members.push(e);
        self.current = self.oracle.value(&self.members);
        Ok(())
    }

    pub fn value(&self) -> f64 {
        self.current
    }

    pub fn committed(&self) -> &[EdgeId] {
        &self.members
    }
}

/// Creates a marginal session over `oracle`.
pub fn session(oracle: &dyn Objective) -> MarginalSession<'_> {
    MarginalSession::new(oracle)
}
