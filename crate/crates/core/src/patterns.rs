//! Weight metrics and ordered test-error-pattern generators.
//!
//! Three orders are provided, all over a generator length `m` (the full
//! blocklength for GRAND, the dimension for GCD):
//!
//! * [`PatternOrder::Hamming`]: weight classes in increasing Hamming weight;
//!   inside a class, increasing soft weight.
//! * [`PatternOrder::Soft`]: non-decreasing soft weight, produced by a
//!   min-heap over the flipping-pattern tree.
//! * [`PatternOrder::Orb`]: non-decreasing logistic weight, produced by
//!   enumerating partitions into distinct parts.
//!
//! Internally every generator works in reliability-ascending coordinates:
//! index `j` refers to the position with rank `j + 1`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::error::{Error, Result};

pub const DEFAULT_FRONTIER_CAP: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternOrder {
    Hamming,
    Soft,
    Orb,
}

impl fmt::Display for PatternOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PatternOrder::Hamming => "hamming",
            PatternOrder::Soft => "soft",
            PatternOrder::Orb => "orb",
        })
    }
}

impl FromStr for PatternOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hamming" => Ok(PatternOrder::Hamming),
            "soft" => Ok(PatternOrder::Soft),
            "orb" => Ok(PatternOrder::Orb),
            other => Err(Error::InvalidInput(format!("unknown pattern order {other:?}"))),
        }
    }
}

/// Reliability ranks: rank 1 is the least reliable position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankMap {
    ranks: Vec<usize>,
    by_rank: Vec<usize>,
}

impl RankMap {
    pub fn from_reliabilities(reliabilities: &[f64]) -> Self {
        let mut by_rank: Vec<usize> = (0..reliabilities.len()).collect();
        // Stable sort keeps ties in ascending position order.
        by_rank.sort_by(|&a, &b| reliabilities[a].abs().total_cmp(&reliabilities[b].abs()));
        let mut ranks = vec![0; reliabilities.len()];
        for (r, &pos) in by_rank.iter().enumerate() {
            ranks[pos] = r + 1;
        }
        Self { ranks, by_rank }
    }

    /// `ranks()[i]` is the rank (1-based) of position `i`.
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Position holding rank `r` (1-based).
    pub fn position_of_rank(&self, r: usize) -> usize {
        self.by_rank[r - 1]
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }
}

pub fn rank_map(reliabilities: &[f64]) -> RankMap {
    RankMap::from_reliabilities(reliabilities)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weights {
    pub hamming: usize,
    pub soft: f64,
    pub logistic: usize,
}

/// Hamming, soft and logistic weights of `bits`.
pub fn compute_weights(bits: &BitVec, reliabilities: &[f64], ranks: &RankMap) -> Result<Weights> {
    if bits.len() != reliabilities.len() {
        return Err(Error::LengthMismatch {
            expected: reliabilities.len(),
            got: bits.len(),
        });
    }
    if ranks.len() != reliabilities.len() {
        return Err(Error::LengthMismatch {
            expected: reliabilities.len(),
            got: ranks.len(),
        });
    }
    Ok(Weights {
        hamming: bits.count_ones(),
        soft: bits.ones().map(|i| reliabilities[i].abs()).sum(),
        logistic: bits.ones().map(|i| ranks.ranks()[i]).sum(),
    })
}

/// A test error pattern with cached weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Tep {
    len: usize,
    support: Vec<usize>,
    pub gamma_h: usize,
    pub gamma_s: f64,
    pub gamma_l: usize,
}

impl Tep {
    /// Flipped positions (generator coordinates), ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> BitVec {
        BitVec::from_support(self.len, &self.support)
    }
}

/// Frontier node: a support in rank coordinates with its canonical soft weight.
#[derive(Clone, Debug)]
struct Node {
    soft: f64,
    support: Vec<u32>,
}

impl Node {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.soft
            .total_cmp(&other.soft)
            .then(self.support.len().cmp(&other.support.len()))
            .then_with(|| self.support.cmp(&other.support))
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // Reversed so that `BinaryHeap` pops the lightest node.
    fn cmp(&self, other: &Self) -> Ordering {
        other.key_cmp(self)
    }
}

enum State {
    Soft {
        heap: BinaryHeap<Node>,
    },
    Hamming {
        weight: usize,
        heap: BinaryHeap<Node>,
    },
    Orb {
        weight: usize,
        parts: Option<Vec<usize>>,
    },
    Done,
}

/// Stateful single-consumer generator of test error patterns.
pub struct PatternStream {
    order: PatternOrder,
    m: usize,
    ranks: RankMap,
    sorted_w: Vec<f64>,
    frontier_cap: usize,
    emitted: u64,
    state: State,
}

impl PatternStream {
    pub fn new(order: PatternOrder, reliabilities: &[f64]) -> Self {
        Self::with_frontier_cap(order, reliabilities, DEFAULT_FRONTIER_CAP)
    }

    pub fn with_frontier_cap(order: PatternOrder, reliabilities: &[f64], frontier_cap: usize) -> Self {
        let ranks = RankMap::from_reliabilities(reliabilities);
        let m = reliabilities.len();
        let sorted_w = (1..=m)
            .map(|r| reliabilities[ranks.position_of_rank(r)].abs())
            .collect();
        let root = Node {
            soft: 0.0,
            support: Vec::new(),
        };
        let state = match order {
            PatternOrder::Soft => State::Soft {
                heap: BinaryHeap::from(vec![root]),
            },
            PatternOrder::Hamming => State::Hamming {
                weight: 0,
                heap: BinaryHeap::from(vec![root]),
            },
            PatternOrder::Orb => State::Orb {
                weight: 0,
                parts: Some(Vec::new()),
            },
        };
        Self {
            order,
            m,
            ranks,
            sorted_w,
            frontier_cap,
            emitted: 0,
            state,
        }
    }

    pub fn order(&self) -> PatternOrder {
        self.order
    }

    pub fn generator_len(&self) -> usize {
        self.m
    }

    pub fn rank_map(&self) -> &RankMap {
        &self.ranks
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    fn soft_of(&self, support: &[u32]) -> f64 {
        support.iter().map(|&j| self.sorted_w[j as usize]).sum()
    }

    fn node(&self, support: Vec<u32>) -> Node {
        Node {
            soft: self.soft_of(&support),
            support,
        }
    }

    fn make_tep(&self, rank_support: &[u32], soft: f64) -> Tep {
        let mut support: Vec<usize> = rank_support
            .iter()
            .map(|&j| self.ranks.position_of_rank(j as usize + 1))
            .collect();
        support.sort_unstable();
        Tep {
            len: self.m,
            gamma_h: support.len(),
            gamma_s: soft,
            gamma_l: rank_support.iter().map(|&j| j as usize + 1).sum(),
            support,
        }
    }

    /// Next pattern, or `Ok(None)` once all `2^m` patterns have been emitted.
    pub fn next_pattern(&mut self) -> Result<Option<Tep>> {
        let out = match std::mem::replace(&mut self.state, State::Done) {
            State::Done => None,
            State::Soft { mut heap } => match heap.pop() {
                None => None,
                Some(node) => {
                    self.push_soft_children(&mut heap, &node)?;
                    self.state = State::Soft { heap };
                    Some(self.make_tep(&node.support, node.soft))
                }
            },
            State::Hamming { mut weight, mut heap } => {
                if heap.is_empty() {
                    weight += 1;
                    if weight <= self.m {
                        heap.push(self.node((0..weight as u32).collect()));
                    }
                }
                match heap.pop() {
                    None => None,
                    Some(node) => {
                        self.push_fixed_weight_children(&mut heap, &node)?;
                        self.state = State::Hamming { weight, heap };
                        Some(self.make_tep(&node.support, node.soft))
                    }
                }
            }
            State::Orb { mut weight, parts } => {
                let max_weight = self.m * (self.m + 1) / 2;
                let parts = match parts {
                    Some(p) => Some(p),
                    None => loop {
                        weight += 1;
                        if weight > max_weight {
                            break None;
                        }
                        if let Some(p) = first_partition(weight, self.m) {
                            break Some(p);
                        }
                    },
                };
                match parts {
                    None => None,
                    Some(p) => {
                        let rank_support: Vec<u32> =
                            p.iter().rev().map(|&r| (r - 1) as u32).collect();
                        let tep = self.make_tep(&rank_support, self.soft_of(&rank_support));
                        self.state = State::Orb {
                            weight,
                            parts: next_partition(&p, weight),
                        };
                        Some(tep)
                    }
                }
            }
        };
        if out.is_some() {
            self.emitted += 1;
        }
        Ok(out)
    }

    // Flipping-pattern tree: the empty pattern has the single child {0};
    // a pattern whose largest index is j has children "shift" (j -> j+1)
    // and "extend" (add j+1). Every pattern has exactly one parent and the
    // (soft, weight, support) key strictly increases from parent to child.
    fn push_soft_children(&self, heap: &mut BinaryHeap<Node>, node: &Node) -> Result<()> {
        let m = self.m as u32;
        match node.support.last() {
            None => {
                if m > 0 {
                    heap.push(self.node(vec![0]));
                }
            }
            Some(&j) if j + 1 < m => {
                let mut shifted = node.support.clone();
                *shifted.last_mut().expect("nonempty") = j + 1;
                heap.push(self.node(shifted));
                let mut extended = node.support.clone();
                extended.push(j + 1);
                heap.push(self.node(extended));
            }
            Some(_) => {}
        }
        self.check_cap(heap.len())
    }

    // Fixed-weight successor tree. The parent of a support is obtained by
    // decrementing its first element that is not at its home index; the
    // children invert that move, so only the elements at indices f-1 and f
    // (f = first non-home index) may be incremented.
    fn push_fixed_weight_children(&self, heap: &mut BinaryHeap<Node>, node: &Node) -> Result<()> {
        let s = &node.support;
        let w = s.len();
        let m = self.m as u32;
        let f = s
            .iter()
            .enumerate()
            .position(|(i, &v)| v as usize != i)
            .unwrap_or(w);
        let bound = |j: usize| if j + 1 < w { s[j + 1] } else { m };
        for j in [f.wrapping_sub(1), f] {
            if j < w && s[j] + 1 < bound(j) {
                let mut child = s.clone();
                child[j] += 1;
                heap.push(self.node(child));
            }
        }
        self.check_cap(heap.len())
    }

    fn check_cap(&self, len: usize) -> Result<()> {
        if len > self.frontier_cap {
            Err(Error::FrontierOverflow {
                cap: self.frontier_cap,
            })
        } else {
            Ok(())
        }
    }
}

impl Iterator for PatternStream {
    type Item = Result<Tep>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_pattern().transpose()
    }
}

/// Fills `remaining` greedily with distinct parts, each at most `cap`,
/// largest first. Callers guarantee `remaining <= cap (cap + 1) / 2`.
fn greedy_fill(parts: &mut Vec<usize>, mut remaining: usize, mut cap: usize) {
    while remaining > 0 {
        let x = remaining.min(cap);
        parts.push(x);
        remaining -= x;
        cap = x - 1;
    }
}

/// First partition of `weight` into distinct parts `<= max_part` in the
/// enumeration order (largest first part first).
fn first_partition(weight: usize, max_part: usize) -> Option<Vec<usize>> {
    if weight > max_part * (max_part + 1) / 2 {
        return None;
    }
    let mut parts = Vec::new();
    greedy_fill(&mut parts, weight, max_part);
    Some(parts)
}

/// Successor of `parts` (distinct, descending, summing to `weight`) in
/// descending-first-part, then recursive, order.
fn next_partition(parts: &[usize], weight: usize) -> Option<Vec<usize>> {
    let mut prefix: usize = parts.iter().sum();
    for i in (0..parts.len()).rev() {
        prefix -= parts[i];
        let remaining = weight - prefix;
        let v = parts[i] - 1;
        if v >= 1 && remaining <= v * (v + 1) / 2 {
            let mut out = parts[..i].to_vec();
            out.push(v);
            greedy_fill(&mut out, remaining - v, v - 1);
            return Some(out);
        }
    }
    None
}

/// Partitions of `weight` into distinct parts `<= max_part`, in stream order.
pub fn distinct_partitions(weight: usize, max_part: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = first_partition(weight, max_part);
    while let Some(p) = cur {
        cur = next_partition(&p, weight);
        out.push(p);
    }
    out
}
