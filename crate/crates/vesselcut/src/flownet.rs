//! Two-terminal max-flow/min-cut over sparse graphs.
//!
//! The solver is an augmenting-path algorithm in the Boykov-Kolmogorov
//! style (grow / augment / adopt with two search trees), which is the
//! standard choice for pixel-grid graphs. Terminal capacities are stored
//! per node and normalized before solving: the shared part of
//! `(to_source, to_sink)` is guaranteed to flow and is added back to the
//! reported flow value as a constant offset.
//!
//! [`FlowNetwork::brute_force_min_cut`] enumerates all labelings of small
//! instances and serves as the independent oracle for the solver.

use std::collections::VecDeque;

use thiserror::Error;

/// Sentinel accepted by [`FlowNetwork::set_terminal`] for hard seeds.
///
/// Realized at solve time as (sum of all finite capacities) + 1, which no
/// finite cut can saturate.
pub const INF: f64 = f64::INFINITY;

/// Maximum node count accepted by the exhaustive oracle.
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("capacity must be nonnegative, got {0}")]
    NegativeCapacity(f64),
    #[error("invalid node: {0}")]
    InvalidNode(String),
    #[error("network has {nodes} nodes, exhaustive enumeration is limited to {limit}")]
    TooLarge { nodes: usize, limit: usize },
}

/// Side of the minimum cut a node ends up on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeLabel {
    SourceSide,
    SinkSide,
}

/// Result of a min-cut computation: one label per node plus the flow value.
#[derive(Debug, Clone, PartialEq)]
pub struct CutLabeling {
    labels: Vec<NodeLabel>,
    flow_value: f64,
    terminal_offset: f64,
}

impl CutLabeling {
    pub fn label(&self, node: usize) -> NodeLabel {
        self.labels[node]
    }

    pub fn labels(&self) -> &[NodeLabel] {
        &self.labels
    }

    /// Maximum s-t flow, equal to the capacity of the cut induced by the
    /// labels.
    pub fn flow_value(&self) -> f64 {
        self.flow_value
    }

    /// Constant added back after terminal normalization (the flow that is
    /// forced through nodes carrying both source and sink capacity).
    pub fn terminal_offset(&self) -> f64 {
        self.terminal_offset
    }
}

#[derive(Debug, Clone, Copy)]
struct Arc {
    head: u32,
    next: u32,
    cap: f64,
}

const NO_ARC: u32 = u32::MAX;

/// Sparse two-terminal flow network. The source and sink are implicit:
/// every node may carry capacity toward either terminal.
#[derive(Debug, Clone, Default)]
pub struct FlowNetwork {
    // Arcs come in sister pairs: arc `2i` and `2i + 1` are reverses of
    // each other, so `a ^ 1` flips direction.
    arcs: Vec<Arc>,
    first: Vec<u32>,
    terminals: Vec<(f64, f64)>,
}

impl FlowNetwork {
    pub fn new(node_count: usize) -> Self {
        Self {
            arcs: Vec::new(),
            first: vec![NO_ARC; node_count],
            terminals: vec![(0.0, 0.0); node_count],
        }
    }

    pub fn node_count(&self) -> usize {
        self.first.len()
    }

    /// Number of stored arc pairs (each `add_edge` call adds one pair).
    pub fn edge_count(&self) -> usize {
        self.arcs.len() / 2
    }

    /// The `pair`-th edge as `(u, v, cap_uv, cap_vu)`, in insertion order.
    pub fn edge(&self, pair: usize) -> (usize, usize, f64, f64) {
        let a = &self.arcs[2 * pair];
        let b = &self.arcs[2 * pair + 1];
        (b.head as usize, a.head as usize, a.cap, b.cap)
    }

    pub fn reserve_edges(&mut self, additional: usize) {
        self.arcs.reserve(2 * additional);
    }

    fn check_node(&self, u: usize) -> Result<(), FlowError> {
        if u >= self.first.len() {
            return Err(FlowError::InvalidNode(format!(
                "node id {u} out of range for {} nodes",
                self.first.len()
            )));
        }
        Ok(())
    }

    fn check_cap(cap: f64) -> Result<(), FlowError> {
        if cap < 0.0 || cap.is_nan() {
            return Err(FlowError::NegativeCapacity(cap));
        }
        Ok(())
    }

    /// Add an edge with independent capacities in each direction.
    /// Parallel edges are allowed and behave additively.
    pub fn add_edge(
        &mut self,
        u: usize,
        v: usize,
        cap_uv: f64,
        cap_vu: f64,
    ) -> Result<(), FlowError> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(FlowError::InvalidNode(format!("self-loop on node {u}")));
        }
        Self::check_cap(cap_uv)?;
        Self::check_cap(cap_vu)?;
        if !cap_uv.is_finite() || !cap_vu.is_finite() {
            return Err(FlowError::InvalidNode(format!(
                "edge {u}->{v} capacity must be finite (INF is only valid on terminals)"
            )));
        }
        let a = self.arcs.len() as u32;
        self.arcs.push(Arc {
            head: v as u32,
            next: self.first[u],
            cap: cap_uv,
        });
        self.arcs.push(Arc {
            head: u as u32,
            next: self.first[v],
            cap: cap_vu,
        });
        self.first[u] = a;
        self.first[v] = a + 1;
        Ok(())
    }

    /// Add capacity from the source to `u` and from `u` to the sink.
    /// `INF` marks a hard seed. Repeated calls accumulate.
    pub fn set_terminal(
        &mut self,
        u: usize,
        to_source: f64,
        to_sink: f64,
    ) -> Result<(), FlowError> {
        self.check_node(u)?;
        Self::check_cap(to_source)?;
        Self::check_cap(to_sink)?;
        self.terminals[u].0 += to_source;
        self.terminals[u].1 += to_sink;
        Ok(())
    }

    pub fn terminal(&self, u: usize) -> (f64, f64) {
        self.terminals[u]
    }

    /// Sum of every finite capacity in the network; `INF` terminals are
    /// realized as this plus one.
    fn finite_capacity_sum(&self) -> f64 {
        let arcs: f64 = self.arcs.iter().map(|a| a.cap).sum();
        let terms: f64 = self
            .terminals
            .iter()
            .map(|&(s, t)| {
                let s = if s.is_finite() { s } else { 0.0 };
                let t = if t.is_finite() { t } else { 0.0 };
                s + t
            })
            .sum();
        arcs + terms
    }

    /// Realized terminal capacities after INF substitution and net
    /// normalization. Returns per-node signed residual (positive toward
    /// source, negative toward sink) and the constant offset.
    fn normalized_terminals(&self) -> (Vec<f64>, f64) {
        let big = self.finite_capacity_sum() + 1.0;
        let mut offset = 0.0;
        let tr = self
            .terminals
            .iter()
            .map(|&(s, t)| {
                let s = if s.is_finite() { s } else { big };
                let t = if t.is_finite() { t } else { big };
                offset += s.min(t);
                s - t
            })
            .collect();
        (tr, offset)
    }

    /// Compute the maximum s-t flow and the induced minimum cut.
    ///
    /// The labeling is the set of nodes reachable from the source in the
    /// final residual graph; nodes reachable from neither terminal are
    /// labeled `SinkSide`. Deterministic for identical input.
    pub fn solve(&self) -> CutLabeling {
        let (tr, offset) = self.normalized_terminals();
        let mut solver = BkSolver::new(self, tr);
        let flow = solver.run();
        let labels = solver.source_side_labels();
        CutLabeling {
            labels,
            flow_value: flow + offset,
            terminal_offset: offset,
        }
    }

    /// Capacity of the cut induced by `labels`: arcs from source side to
    /// sink side plus severed terminal capacities. INF terminals are
    /// realized exactly as in [`FlowNetwork::solve`].
    pub fn cut_capacity(&self, labels: &[NodeLabel]) -> f64 {
        assert_eq!(labels.len(), self.node_count(), "label count mismatch");
        let big = self.finite_capacity_sum() + 1.0;
        let mut total = 0.0;
        for (u, &(s, t)) in self.terminals.iter().enumerate() {
            let s = if s.is_finite() { s } else { big };
            let t = if t.is_finite() { t } else { big };
            match labels[u] {
                // Source-side node: its arc to the sink is severed.
                NodeLabel::SourceSide => total += t,
                NodeLabel::SinkSide => total += s,
            }
        }
        for pair in 0..self.edge_count() {
            let a = &self.arcs[2 * pair];
            let b = &self.arcs[2 * pair + 1];
            let u = b.head as usize;
            let v = a.head as usize;
            if labels[u] == NodeLabel::SourceSide && labels[v] == NodeLabel::SinkSide {
                total += a.cap;
            } else if labels[v] == NodeLabel::SourceSide && labels[u] == NodeLabel::SinkSide {
                total += b.cap;
            }
        }
        total
    }

    /// Exact minimum cut by enumerating all `2^n` labelings. Test oracle;
    /// rejects networks with more than [`BRUTE_FORCE_LIMIT`] nodes.
    pub fn brute_force_min_cut(&self) -> Result<CutLabeling, FlowError> {
        let n = self.node_count();
        if n > BRUTE_FORCE_LIMIT {
            return Err(FlowError::TooLarge {
                nodes: n,
                limit: BRUTE_FORCE_LIMIT,
            });
        }
        let mut best_value = f64::INFINITY;
        let mut best_labels = vec![NodeLabel::SinkSide; n];
        let mut labels = vec![NodeLabel::SinkSide; n];
        for mask in 0u32..(1u32 << n) {
            for (i, label) in labels.iter_mut().enumerate() {
                *label = if mask & (1 << i) != 0 {
                    NodeLabel::SourceSide
                } else {
                    NodeLabel::SinkSide
                };
            }
            let value = self.cut_capacity(&labels);
            if value < best_value {
                best_value = value;
                best_labels.copy_from_slice(&labels);
            }
        }
        Ok(CutLabeling {
            labels: best_labels,
            flow_value: best_value,
            terminal_offset: 0.0,
        })
    }
}

const PARENT_NONE: u32 = u32::MAX;
const PARENT_TERMINAL: u32 = u32::MAX - 1;
const PARENT_ORPHAN: u32 = u32::MAX - 2;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Tree {
    Free,
    Source,
    Sink,
}

/// Boykov-Kolmogorov max-flow state. Residual arc capacities live in
/// `r_cap` (indexed like `FlowNetwork::arcs`); `tr` holds signed residual
/// terminal capacity per node (positive toward source).
struct BkSolver<'a> {
    net: &'a FlowNetwork,
    r_cap: Vec<f64>,
    tr: Vec<f64>,
    parent: Vec<u32>,
    tree: Vec<Tree>,
    ts: Vec<u64>,
    dist: Vec<u64>,
    active: VecDeque<u32>,
    in_active: Vec<bool>,
    orphans: VecDeque<u32>,
    time: u64,
}

impl<'a> BkSolver<'a> {
    fn new(net: &'a FlowNetwork, tr: Vec<f64>) -> Self {
        let n = net.node_count();
        Self {
            net,
            r_cap: net.arcs.iter().map(|a| a.cap).collect(),
            tr,
            parent: vec![PARENT_NONE; n],
            tree: vec![Tree::Free; n],
            ts: vec![0; n],
            dist: vec![0; n],
            active: VecDeque::new(),
            in_active: vec![false; n],
            orphans: VecDeque::new(),
            time: 0,
        }
    }

    fn activate(&mut self, u: u32) {
        if !self.in_active[u as usize] {
            self.in_active[u as usize] = true;
            self.active.push_back(u);
        }
    }

    fn run(&mut self) -> f64 {
        for u in 0..self.net.node_count() {
            if self.tr[u] > 0.0 {
                self.tree[u] = Tree::Source;
                self.parent[u] = PARENT_TERMINAL;
                self.dist[u] = 1;
                self.activate(u as u32);
            } else if self.tr[u] < 0.0 {
                self.tree[u] = Tree::Sink;
                self.parent[u] = PARENT_TERMINAL;
                self.dist[u] = 1;
                self.activate(u as u32);
            }
        }

        let mut flow = 0.0;
        while let Some(middle) = self.grow() {
            self.time += 1;
            flow += self.augment(middle);
            while let Some(o) = self.orphans.pop_front() {
                self.process_orphan(o);
            }
        }
        flow
    }

    /// Grow the search trees from active nodes until they touch. Returns
    /// an arc with positive residual whose tail is in the source tree and
    /// whose head is in the sink tree, or `None` at termination.
    fn grow(&mut self) -> Option<u32> {
        let net = self.net;
        while let Some(p) = self.active.pop_front() {
            self.in_active[p as usize] = false;
            let p_tree = self.tree[p as usize];
            if p_tree == Tree::Free {
                continue;
            }
            let mut cursor = net.first[p as usize];
            while cursor != NO_ARC {
                let a = cursor;
                let q = net.arcs[a as usize].head;
                cursor = net.arcs[a as usize].next;
                // Residual in the direction flow would take through this
                // tree: outward from the source tree, inward to the sink.
                let residual = match p_tree {
                    Tree::Source => self.r_cap[a as usize],
                    Tree::Sink => self.r_cap[(a ^ 1) as usize],
                    Tree::Free => unreachable!(),
                };
                if residual <= 0.0 {
                    continue;
                }
                let q_tree = self.tree[q as usize];
                if q_tree == Tree::Free {
                    self.tree[q as usize] = p_tree;
                    self.parent[q as usize] = a ^ 1;
                    self.ts[q as usize] = self.ts[p as usize];
                    self.dist[q as usize] = self.dist[p as usize] + 1;
                    self.activate(q);
                } else if q_tree != p_tree {
                    // Trees touched; p keeps its remaining arcs for later.
                    self.activate(p);
                    let middle = match p_tree {
                        Tree::Source => a,
                        Tree::Sink => a ^ 1,
                        Tree::Free => unreachable!(),
                    };
                    return Some(middle);
                } else if self.ts[q as usize] <= self.ts[p as usize]
                    && self.dist[q as usize] > self.dist[p as usize] + 1
                {
                    // Same tree: adopt the shorter path to the terminal.
                    self.parent[q as usize] = a ^ 1;
                    self.ts[q as usize] = self.ts[p as usize];
                    self.dist[q as usize] = self.dist[p as usize] + 1;
                }
            }
        }
        None
    }

    /// Push the bottleneck along source root -> middle -> sink root and
    /// orphan every node whose parent arc saturates.
    fn augment(&mut self, middle: u32) -> f64 {
        let tail = self.net.arcs[(middle ^ 1) as usize].head;
        let head = self.net.arcs[middle as usize].head;

        // Bottleneck over the whole path.
        let mut bottleneck = self.r_cap[middle as usize];
        let mut q = tail;
        loop {
            let a = self.parent[q as usize];
            if a == PARENT_TERMINAL {
                break;
            }
            bottleneck = bottleneck.min(self.r_cap[(a ^ 1) as usize]);
            q = self.net.arcs[a as usize].head;
        }
        bottleneck = bottleneck.min(self.tr[q as usize]);
        let mut q = head;
        loop {
            let a = self.parent[q as usize];
            if a == PARENT_TERMINAL {
                break;
            }
            bottleneck = bottleneck.min(self.r_cap[a as usize]);
            q = self.net.arcs[a as usize].head;
        }
        bottleneck = bottleneck.min(-self.tr[q as usize]);

        // Push. The bottleneck equals at least one residual on the path
        // exactly, so saturation checks against zero are exact.
        self.r_cap[middle as usize] -= bottleneck;
        self.r_cap[(middle ^ 1) as usize] += bottleneck;

        let mut q = tail;
        loop {
            let a = self.parent[q as usize];
            if a == PARENT_TERMINAL {
                break;
            }
            // Flow runs parent -> q on the source side.
            self.r_cap[(a ^ 1) as usize] -= bottleneck;
            self.r_cap[a as usize] += bottleneck;
            if self.r_cap[(a ^ 1) as usize] == 0.0 {
                self.parent[q as usize] = PARENT_ORPHAN;
                self.orphans.push_back(q);
            }
            q = self.net.arcs[a as usize].head;
        }
        self.tr[q as usize] -= bottleneck;
        if self.tr[q as usize] == 0.0 {
            self.parent[q as usize] = PARENT_ORPHAN;
            self.orphans.push_back(q);
        }

        let mut q = head;
        loop {
            let a = self.parent[q as usize];
            if a == PARENT_TERMINAL {
                break;
            }
            // Flow runs q -> parent on the sink side.
            self.r_cap[a as usize] -= bottleneck;
            self.r_cap[(a ^ 1) as usize] += bottleneck;
            if self.r_cap[a as usize] == 0.0 {
                self.parent[q as usize] = PARENT_ORPHAN;
                self.orphans.push_back(q);
            }
            q = self.net.arcs[a as usize].head;
        }
        self.tr[q as usize] += bottleneck;
        if self.tr[q as usize] == 0.0 {
            self.parent[q as usize] = PARENT_ORPHAN;
            self.orphans.push_back(q);
        }

        bottleneck
    }

    /// Distance from `q` to its terminal along parent arcs, or `None` if
    /// the chain is broken by an orphan. Marks the walked chain with the
    /// current timestamp so later walks short-circuit.
    fn origin_distance(&mut self, q: u32) -> Option<u64> {
        let mut d = 0u64;
        let mut j = q;
        loop {
            if self.ts[j as usize] == self.time {
                d += self.dist[j as usize];
                break;
            }
            let a = self.parent[j as usize];
            d += 1;
            if a == PARENT_TERMINAL {
                self.ts[j as usize] = self.time;
                self.dist[j as usize] = 1;
                break;
            }
            if a == PARENT_ORPHAN || a == PARENT_NONE {
                return None;
            }
            j = self.net.arcs[a as usize].head;
        }
        // Cache distances along the path.
        let mut j = q;
        let mut dd = d;
        while self.ts[j as usize] != self.time {
            self.dist[j as usize] = dd;
            dd -= 1;
            self.ts[j as usize] = self.time;
            let a = self.parent[j as usize];
            if a == PARENT_TERMINAL {
                break;
            }
            j = self.net.arcs[a as usize].head;
        }
        Some(d)
    }

    fn process_orphan(&mut self, o: u32) {
        let net = self.net;
        let o_tree = self.tree[o as usize];
        let mut best_arc = PARENT_NONE;
        let mut best_dist = u64::MAX;

        let mut cursor = net.first[o as usize];
        while cursor != NO_ARC {
            let a = cursor;
            let q = net.arcs[a as usize].head;
            cursor = net.arcs[a as usize].next;
            // A new parent must have residual toward the orphan (source
            // tree) or away from it (sink tree).
            let residual = match o_tree {
                Tree::Source => self.r_cap[(a ^ 1) as usize],
                Tree::Sink => self.r_cap[a as usize],
                Tree::Free => unreachable!(),
            };
            if residual <= 0.0 || self.tree[q as usize] != o_tree {
                continue;
            }
            if let Some(d) = self.origin_distance(q) {
                if d < best_dist {
                    best_dist = d;
                    best_arc = a;
                }
            }
        }

        if best_arc != PARENT_NONE {
            self.parent[o as usize] = best_arc;
            self.ts[o as usize] = self.time;
            self.dist[o as usize] = best_dist + 1;
            return;
        }

        // No parent found: the orphan leaves its tree. Neighbors that
        // could re-grow toward it become active; children become orphans.
        let mut cursor = net.first[o as usize];
        while cursor != NO_ARC {
            let a = cursor;
            let q = net.arcs[a as usize].head;
            cursor = net.arcs[a as usize].next;
            if self.tree[q as usize] != o_tree {
                continue;
            }
            let residual = match o_tree {
                Tree::Source => self.r_cap[(a ^ 1) as usize],
                Tree::Sink => self.r_cap[a as usize],
                Tree::Free => unreachable!(),
            };
            if residual > 0.0 {
                self.activate(q);
            }
            let qp = self.parent[q as usize];
            if qp != PARENT_NONE
                && qp != PARENT_TERMINAL
                && qp != PARENT_ORPHAN
                && net.arcs[qp as usize].head == o
            {
                self.parent[q as usize] = PARENT_ORPHAN;
                self.orphans.push_front(q);
            }
        }
        self.tree[o as usize] = Tree::Free;
        self.parent[o as usize] = PARENT_NONE;
    }

    /// Labels from residual reachability: breadth-first search from every
    /// node that still has residual source capacity.
    fn source_side_labels(&self) -> Vec<NodeLabel> {
        let n = self.net.node_count();
        let mut labels = vec![NodeLabel::SinkSide; n];
        let mut queue = VecDeque::new();
        for (u, label) in labels.iter_mut().enumerate() {
            if self.tr[u] > 0.0 {
                *label = NodeLabel::SourceSide;
                queue.push_back(u as u32);
            }
        }
        while let Some(u) = queue.pop_front() {
            let mut cursor = self.net.first[u as usize];
            while cursor != NO_ARC {
                let a = cursor;
                let q = self.net.arcs[a as usize].head;
                cursor = self.net.arcs[a as usize].next;
                if self.r_cap[a as usize] > 0.0 && labels[q as usize] == NodeLabel::SinkSide {
                    labels[q as usize] = NodeLabel::SourceSide;
                    queue.push_back(q);
                }
            }
        }
        labels
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn empty_network_has_zero_flow() {
        let net = FlowNetwork::new(0);
        let cut = net.solve();
        assert_eq!(cut.flow_value(), 0.0);
        assert!(cut.labels().is_empty());
    }

    #[test]
    fn disconnected_nodes_have_zero_flow_and_default_to_sink() {
        let net = FlowNetwork::new(5);
        let cut = net.solve();
        assert_eq!(cut.flow_value(), 0.0);
        assert!(cut.labels().iter().all(|&l| l == NodeLabel::SinkSide));

        let net = FlowNetwork::new(2);
        let cut = net.solve();
        assert_eq!(cut.label(0), NodeLabel::SinkSide);
        assert_eq!(cut.label(1), NodeLabel::SinkSide);
    }

    #[test]
    fn parallel_edges_are_additive() {
        let mut a = FlowNetwork::new(2);
        a.add_edge(0, 1, 1.0, 1.0).unwrap();
        a.add_edge(0, 1, 1.0, 1.0).unwrap();
        a.set_terminal(0, INF, 0.0).unwrap();
        a.set_terminal(1, 0.0, INF).unwrap();

        let mut b = FlowNetwork::new(2);
        b.add_edge(0, 1, 2.0, 2.0).unwrap();
        b.set_terminal(0, INF, 0.0).unwrap();
        b.set_terminal(1, 0.0, INF).unwrap();

        assert_eq!(a.solve().flow_value(), b.solve().flow_value());
    }

    #[test]
    fn self_loop_is_rejected() {
        let mut net = FlowNetwork::new(3);
        assert!(matches!(
            net.add_edge(1, 1, 1.0, 1.0),
            Err(FlowError::InvalidNode(_))
        ));
    }

    #[test]
    fn out_of_range_node_is_rejected() {
        let mut net = FlowNetwork::new(3);
        assert!(matches!(
            net.add_edge(0, 3, 1.0, 1.0),
            Err(FlowError::InvalidNode(_))
        ));
    }

    #[test]
    fn negative_capacity_is_rejected() {
        let mut net = FlowNetwork::new(2);
        assert_eq!(
            net.add_edge(0, 1, -1.0, 0.0),
            Err(FlowError::NegativeCapacity(-1.0))
        );
        assert_eq!(
            net.set_terminal(0, -1.0, 0.0),
            Err(FlowError::NegativeCapacity(-1.0))
        );
    }

    #[test]
    fn infinite_seed_forces_source_side() {
        let mut net = FlowNetwork::new(2);
        net.add_edge(0, 1, 5.0, 5.0).unwrap();
        net.set_terminal(0, INF, 0.0).unwrap();
        net.set_terminal(1, 0.0, 100.0).unwrap();
        let cut = net.solve();
        assert_eq!(cut.label(0), NodeLabel::SourceSide);
        assert_eq!(cut.flow_value(), 5.0);
    }

    #[test]
    fn balanced_terminal_normalizes_to_offset() {
        let mut net = FlowNetwork::new(1);
        net.set_terminal(0, 3.0, 3.0).unwrap();
        let cut = net.solve();
        assert_eq!(cut.terminal_offset(), 3.0);
        assert_eq!(cut.flow_value(), 3.0);
        assert_eq!(net.cut_capacity(cut.labels()), 3.0);
    }

    #[test]
    fn seeded_chain_bottleneck() {
        let mut net = FlowNetwork::new(2);
        net.set_terminal(0, INF, 0.0).unwrap();
        net.add_edge(0, 1, 2.0, 2.0).unwrap();
        net.set_terminal(1, 0.0, INF).unwrap();
        let cut = net.solve();
        assert_eq!(cut.flow_value(), 2.0);
        assert_eq!(cut.label(0), NodeLabel::SourceSide);
        assert_eq!(cut.label(1), NodeLabel::SinkSide);
    }

    fn diamond() -> FlowNetwork {
        let mut net = FlowNetwork::new(2);
        net.set_terminal(0, 3.0, 0.0).unwrap(); // s -> a: 3
        net.set_terminal(1, 2.0, 0.0).unwrap(); // s -> b: 2
        net.set_terminal(0, 0.0, 2.0).unwrap(); // a -> t: 2
        net.set_terminal(1, 0.0, 3.0).unwrap(); // b -> t: 3
        net.add_edge(0, 1, 1.0, 0.0).unwrap(); // a -> b: 1
        net
    }

    #[test]
    fn diamond_max_flow_is_five() {
        let net = diamond();
        let cut = net.solve();
        assert_eq!(cut.flow_value(), 5.0);
        let oracle = net.brute_force_min_cut().unwrap();
        assert_eq!(oracle.flow_value(), 5.0);
        assert_eq!(net.cut_capacity(cut.labels()), cut.flow_value());
    }

    #[test]
    fn single_path_bottleneck() {
        let mut net = FlowNetwork::new(1);
        net.set_terminal(0, 5.0, 3.0).unwrap();
        let cut = net.solve();
        assert_eq!(cut.flow_value(), 3.0);
        assert_eq!(cut.label(0), NodeLabel::SourceSide);
    }

    #[test]
    fn brute_force_empty_graph_is_zero() {
        let net = FlowNetwork::new(0);
        assert_eq!(net.brute_force_min_cut().unwrap().flow_value(), 0.0);
    }

    #[test]
    fn brute_force_unit_chain() {
        let mut net = FlowNetwork::new(3);
        net.set_terminal(0, INF, 0.0).unwrap();
        net.add_edge(0, 1, 1.0, 1.0).unwrap();
        net.add_edge(1, 2, 1.0, 1.0).unwrap();
        net.set_terminal(2, 0.0, INF).unwrap();
        assert_eq!(net.brute_force_min_cut().unwrap().flow_value(), 1.0);
        assert_eq!(net.solve().flow_value(), 1.0);
    }

    #[test]
    fn brute_force_rejects_large_networks() {
        let net = FlowNetwork::new(BRUTE_FORCE_LIMIT + 1);
        assert!(matches!(
            net.brute_force_min_cut(),
            Err(FlowError::TooLarge { .. })
        ));
    }

    /// Random network with integer capacities; used by the oracle suites.
    pub(crate) fn random_network(rng: &mut StdRng, max_nodes: usize) -> FlowNetwork {
        let n = rng.random_range(0..=max_nodes);
        let mut net = FlowNetwork::new(n);
        if n < 2 {
            if n == 1 && rng.random_bool(0.5) {
                net.set_terminal(
                    0,
                    rng.random_range(0..=20) as f64,
                    rng.random_range(0..=20) as f64,
                )
                .unwrap();
            }
            return net;
        }
        let edges = rng.random_range(0..=(3 * n));
        for _ in 0..edges {
            let u = rng.random_range(0..n);
            let mut v = rng.random_range(0..n);
            if v == u {
                v = (v + 1) % n;
            }
            let c1 = rng.random_range(0..=20) as f64;
            let c2 = rng.random_range(0..=20) as f64;
            net.add_edge(u, v, c1, c2).unwrap();
        }
        for u in 0..n {
            match rng.random_range(0..4) {
                0 => net
                    .set_terminal(u, rng.random_range(0..=20) as f64, 0.0)
                    .unwrap(),
                1 => net
                    .set_terminal(u, 0.0, rng.random_range(0..=20) as f64)
                    .unwrap(),
                2 => net
                    .set_terminal(
                        u,
                        rng.random_range(0..=20) as f64,
                        rng.random_range(0..=20) as f64,
                    )
                    .unwrap(),
                _ => {}
            }
        }
        // Occasionally pin hard seeds.
        if rng.random_bool(0.3) {
            net.set_terminal(rng.random_range(0..n), INF, 0.0).unwrap();
        }
        if rng.random_bool(0.3) {
            net.set_terminal(rng.random_range(0..n), 0.0, INF).unwrap();
        }
        net
    }

    #[test]
    fn solver_matches_brute_force_on_random_networks() {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for _ in 0..300 {
            let net = random_network(&mut rng, 12);
            let cut = net.solve();
            let oracle = net.brute_force_min_cut().unwrap();
            assert_eq!(
                cut.flow_value(),
                oracle.flow_value(),
                "flow mismatch on {net:?}"
            );
            // Duality: the induced cut pays exactly the flow.
            assert_eq!(
                net.cut_capacity(cut.labels()),
                cut.flow_value(),
                "cut/flow mismatch on {net:?}"
            );
        }
    }

    #[test]
    fn increasing_capacity_never_decreases_flow() {
        let mut rng = StdRng::seed_from_u64(77);
        for _ in 0..100 {
            let mut net = random_network(&mut rng, 10);
            let before = net.solve().flow_value();
            if net.edge_count() == 0 || rng.random_bool(0.3) {
                let n = net.node_count();
                if n == 0 {
                    continue;
                }
                net.set_terminal(rng.random_range(0..n), 5.0, 0.0).unwrap();
            } else {
                let pair = rng.random_range(0..net.edge_count());
                net.arcs[2 * pair].cap += 5.0;
            }
            let after = net.solve().flow_value();
            assert!(
                after >= before,
                "flow decreased from {before} to {after} on {net:?}"
            );
        }
    }

    #[test]
    fn solve_is_deterministic() {
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..50 {
            let net = random_network(&mut rng, 12);
            let a = net.solve();
            let b = net.solve();
            assert_eq!(a.flow_value(), b.flow_value());
            assert_eq!(a.labels(), b.labels());
        }
    }

    #[test]
    fn infinite_seeds_keep_their_labels() {
        let mut rng = StdRng::seed_from_u64(1234);
        for _ in 0..100 {
            let mut net = random_network(&mut rng, 10);
            let n = net.node_count();
            if n < 2 {
                continue;
            }
            let s = rng.random_range(0..n);
            let mut t = rng.random_range(0..n);
            if t == s {
                t = (t + 1) % n;
            }
            // Contradictory double-INF seeding is out of contract.
            net.terminals[s] = (0.0, 0.0);
            net.terminals[t] = (0.0, 0.0);
            net.set_terminal(s, INF, 0.0).unwrap();
            net.set_terminal(t, 0.0, INF).unwrap();
            let cut = net.solve();
            assert_eq!(cut.label(s), NodeLabel::SourceSide, "seed lost on {net:?}");
            assert_eq!(cut.label(t), NodeLabel::SinkSide, "seed lost on {net:?}");
        }
    }
}
