//! Queue ledger: the stored set `S` and the per-owner queue sets.
//!
//! Every stored edge is a single record in an arena. The record carries one
//! [`Slot`] per queue it sits in (one per endpoint, plus one for the matroid
//! when the run is matroid-constrained). Queues are intrusive stacks threaded
//! through those slots with `below`/`above` links, so an element can be
//! spliced out of the middle of every queue it belongs to at once.
//!
//! The weight of a queue is the reduced weight of its top element, or `0`
//! when the queue is empty.

use std::collections::BTreeSet;

use crate::instance::{EdgeId, VertexId};

/// Position of a record in the ledger arena. Ids increase with arrival order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotOwner {
    Vertex(VertexId),
    Matroid,
}

#[derive(Debug, Clone)]
pub struct Slot {
    pub owner: SlotOwner,
    pub queue: usize,
    /// `w_u(e) = w_u^*(e) + g(e)`.
    pub reduced_weight: f64,
    pub below: Option<ElementId>,
    pub above: Option<ElementId>,
}

#[derive(Debug, Clone)]
pub struct StoredElement {
    pub edge: EdgeId,
    pub gain: f64,
    pub slots: Vec<Slot>,
    pub erasable: bool,
    /// Evicted or dropped by finalization; no longer part of `S`.
    pub removed: bool,
}

impl StoredElement {
    pub fn slot(&self, owner: SlotOwner) -> Option<&Slot> {
        self.slots.iter().find(|s| s.owner == owner)
    }

    fn slot_mut(&mut self, owner: SlotOwner) -> &mut Slot {
        self.slots.iter_mut().find(|s| s.owner == owner).expect("element has no slot for this owner")
    }
}

#[derive(Debug, Clone, Default)]
pub struct Queue {
    pub top: Option<ElementId>,
    pub len: usize,
    pub max_len: usize,
}

#[derive(Debug, Clone)]
pub struct QueueSet {
    pub owner: SlotOwner,
    pub queues: Vec<Queue>,
}

impl QueueSet {
    fn new(owner: SlotOwner, count: usize) -> Self {
        Self { owner, queues: vec![Queue::default(); count] }
    }
}

/// Where a new element goes in one of its queues.
#[derive(Debug, Clone, Copy)]
pub struct Placement {
    pub owner: SlotOwner,
    pub queue: usize,
    pub reduced_weight: f64,
}

#[derive(Debug, Clone)]
pub struct Ledger {
    elements: Vec<StoredElement>,
    vertices: Vec<QueueSet>,
    matroid: Option<QueueSet>,
    live: usize,
}

impl Ledger {
    /// One queue set per vertex with `capacities[v]` queues, and a matroid
    /// queue set with `matroid_rank` queues when given.
    pub fn new(capacities: &[usize], matroid_rank: Option<usize>) -> Self {
        Self {
            elements: Vec::new(),
            vertices: capacities.iter().enumerate().map(|(v, &b)| QueueSet::new(SlotOwner::Vertex(v), b)).collect(),
            matroid: matroid_rank.map(|r| QueueSet::new(SlotOwner::Matroid, r)),
            live: 0,
        }
    }

    pub fn queue_set(&self, owner: SlotOwner) -> &QueueSet {
        match owner {
            SlotOwner::Vertex(v) => &self.vertices[v],
            SlotOwner::Matroid => self.matroid.as_ref().expect("ledger has no matroid queues"),
        }
    }

    fn queue_mut(&mut self, owner: SlotOwner, q: usize) -> &mut Queue {
        let set = match owner {
            SlotOwner::Vertex(v) => &mut self.vertices[v],
            SlotOwner::Matroid => self.matroid.as_mut().expect("ledger has no matroid queues"),
        };
        &mut set.queues[q]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn has_matroid(&self) -> bool {
        self.matroid.is_some()
    }

    /// All owners, vertices first.
    pub fn owners(&self) -> impl Iterator<Item = SlotOwner> + '_ {
        (0..self.vertices.len()).map(SlotOwner::Vertex).chain(self.matroid.as_ref().map(|_| SlotOwner::Matroid))
    }

    pub fn element(&self, id: ElementId) -> &StoredElement {
        &self.elements[id.0]
    }

    /// Every record ever inserted, including removed ones, in arrival order.
    pub fn records(&self) -> impl Iterator<Item = (ElementId, &StoredElement)> {
        self.elements.iter().enumerate().map(|(i, e)| (ElementId(i), e))
    }

    /// The current stored set `S` in arrival order.
    pub fn stored(&self) -> impl DoubleEndedIterator<Item = ElementId> + '_ {
        self.elements.iter().enumerate().filter(|(_, e)| !e.removed).map(|(i, _)| ElementId(i))
    }

    /// `|S|`.
    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    /// `g(S)`.
    pub fn gain_total(&self) -> f64 {
        self.stored().map(|id| self.elements[id.0].gain).sum()
    }

    pub fn top(&self, owner: SlotOwner, q: usize) -> Option<ElementId> {
        self.queue_set(owner).queues[q].top
    }

    pub fn reduced_weight(&self, id: ElementId, owner: SlotOwner) -> f64 {
        self.elements[id.0].slot(owner).expect("element not in this owner's queues").reduced_weight
    }

    /// `w_u(Q_{u,q})`.
    pub fn queue_weight(&self, owner: SlotOwner, q: usize) -> f64 {
        self.top(owner, q).map_or(0.0, |t| self.reduced_weight(t, owner))
    }

    /// Index and weight of the lightest queue of `owner`; ties go to the
    /// smallest index. An owner without queues reports `(0, 0.0)`.
    pub fn min_top(&self, owner: SlotOwner) -> (usize, f64) {
        let set = self.queue_set(owner);
        let mut best = (0, f64::INFINITY);
        for q in 0..set.queues.len() {
            let w = self.queue_weight(owner, q);
            if w < best.1 {
                best = (q, w);
            }
        }
        if best.1.is_infinite() {
            (0, 0.0)
        } else {
            best
        }
    }

    /// Non-empty queue tops of `owner` as `(queue, element)`.
    pub fn tops(&self, owner: SlotOwner) -> impl Iterator<Item = (usize, ElementId)> + '_ {
        self.queue_set(owner).queues.iter().enumerate().filter_map(|(q, queue)| queue.top.map(|t| (q, t)))
    }

    /// Elements of one queue from the top down.
    pub fn queue_elements(&self, owner: SlotOwner, q: usize) -> Vec<ElementId> {
        match self.top(owner, q) {
            Some(t) => self.chain(t, owner).collect(),
            None => Vec::new(),
        }
    }

    /// Walks predecessor links of `owner` starting at `from` (inclusive).
    pub fn chain(&self, from: ElementId, owner: SlotOwner) -> Chain<'_> {
        Chain { ledger: self, owner, next: Some(from) }
    }

    /// Creates the record for a newly stored edge and pushes it onto each of
    /// its placements. Returns the new id.
    pub fn insert(&mut self, edge: EdgeId, gain: f64, placements: &[Placement]) -> ElementId {
        debug_assert!(gain > 0.0, "stored elements carry positive gain");
        let id = ElementId(self.elements.len());
        self.elements.push(StoredElement {
            edge,
            gain,
            slots: placements
                .iter()
                .map(|p| Slot {
                    owner: p.owner,
                    queue: p.queue,
                    reduced_weight: p.reduced_weight,
                    below: None,
                    above: None,
                })
                .collect(),
            erasable: false,
            removed: false,
        });
        self.live += 1;
        for p in placements {
            self.push(p.owner, p.queue, id);
        }
        id
    }

    /// Puts `el` on top of queue `q` of `owner`. The previous top becomes its
    /// predecessor; if that element was erasable it is removed once it is no
    /// longer a top anywhere.
    pub fn push(&mut self, owner: SlotOwner, q: usize, el: ElementId) {
        let prev = self.top(owner, q);
        {
            let slot = self.elements[el.0].slot_mut(owner);
            slot.queue = q;
            slot.below = prev;
            slot.above = None;
        }
        if let Some(p) = prev {
            self.elements[p.0].slot_mut(owner).above = Some(el);
        }
        let queue = self.queue_mut(owner, q);
        queue.top = Some(el);
        queue.len += 1;
        queue.max_len = queue.max_len.max(queue.len);
        if let Some(p) = prev {
            if self.elements[p.0].erasable {
                self.try_remove(p);
            }
        }
    }

    /// Marks the `(depth + 1)`-th element from the top of queue `q` erasable.
    /// Returns it if it was not erasable before.
    pub fn mark_erasable(&mut self, owner: SlotOwner, q: usize, depth: usize) -> Option<ElementId> {
        let target = self.queue_elements(owner, q).get(depth).copied()?;
        if self.elements[target.0].erasable {
            return None;
        }
        self.elements[target.0].erasable = true;
        self.try_remove(target);
        Some(target)
    }

    fn is_top_anywhere(&self, id: ElementId) -> bool {
        self.elements[id.0].slots.iter().any(|s| self.top(s.owner, s.queue) == Some(id))
    }

    /// Splices an erasable element out of all its queues unless it is still
    /// a top somewhere.
    fn try_remove(&mut self, id: ElementId) -> bool {
        if self.elements[id.0].removed || self.is_top_anywhere(id) {
            return false;
        }
        let slots: Vec<(SlotOwner, usize, Option<ElementId>, Option<ElementId>)> =
            self.elements[id.0].slots.iter().map(|s| (s.owner, s.queue, s.below, s.above)).collect();
        for (owner, q, below, above) in slots {
            if let Some(b) = below {
                self.elements[b.0].slot_mut(owner).above = above;
            }
            if let Some(a) = above {
                self.elements[a.0].slot_mut(owner).below = below;
            }
            self.queue_mut(owner, q).len -= 1;
        }
        self.elements[id.0].removed = true;
        self.live -= 1;
        true
    }

    /// Drops every element outside `keep` from `S` and relinks all queues so
    /// that predecessor chains only visit kept elements.
    pub fn rewire_to(&mut self, keep: &BTreeSet<ElementId>) {
        let owners: Vec<SlotOwner> = self.owners().collect();
        for owner in owners {
            for q in 0..self.queue_set(owner).queues.len() {
                let kept: Vec<ElementId> =
                    self.queue_elements(owner, q).into_iter().filter(|e| keep.contains(e)).collect();
                for (i, &e) in kept.iter().enumerate() {
                    let slot = self.elements[e.0].slot_mut(owner);
                    slot.above = if i == 0 { None } else { Some(kept[i - 1]) };
                    slot.below = kept.get(i + 1).copied();
                }
                let queue = self.queue_mut(owner, q);
                queue.top = kept.first().copied();
                queue.len = kept.len();
            }
        }
        for (i, el) in self.elements.iter_mut().enumerate() {
            if !el.removed && !keep.contains(&ElementId(i)) {
                el.removed = true;
                self.live -= 1;
            }
        }
    }
}

pub struct Chain<'a> {
    ledger: &'a Ledger,
    owner: SlotOwner,
    next: Option<ElementId>,
}

impl Iterator for Chain<'_> {
    type Item = ElementId;

    fn next(&mut self) -> Option<ElementId> {
        let cur = self.next?;
        self.next = self.ledger.elements[cur.0].slot(self.owner).and_then(|s| s.below);
        Some(cur)
    }
}
