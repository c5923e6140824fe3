//! Surjectivity and injectivity of a rule decided on the pair graph of its
//! de Bruijn graph. This is independent of the automata pipeline and serves as
//! its reference.
//!
//! Nodes of the de Bruijn graph are words of length `2r`; each word of length
//! `2r+1` is an edge from its prefix to its suffix labelled by the local rule.
//! The pair graph runs two such paths in lockstep with equal labels.
//!
//! * The global map is surjective iff no pair path leaves the diagonal and
//!   returns to it.
//! * It is injective iff no off-diagonal pair lies on a bi-infinite path,
//!   i.e. is reachable from a cycle and reaches a cycle.

use crate::automata::Sccs;
use crate::ca::CaRule;

struct PairGraph {
    nodes: usize,
    succ: Vec<Vec<usize>>,
    diagonal: Vec<bool>,
}

impl PairGraph {
    fn new(rule: &CaRule) -> Self {
        let q = rule.state_count();
        let k = 2 * rule.radius();
        let n = q.pow(k as u32);
        let width = k + 1;
        let mut cells = vec![0; width];
        // edges[u] = (label, v)
        let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for u in 0..n {
            for s in 0..q {
                let w = u * q + s;
                let mut x = w;
                for c in cells.iter_mut().rev() {
                    *c = x % q;
                    x /= q;
                }
                edges[u].push((rule.apply(&cells), w % n));
            }
        }
        let nodes = n * n;
        let mut succ = vec![Vec::new(); nodes];
        for u in 0..n {
            for v in 0..n {
                for &(a, u2) in &edges[u] {
                    for &(b, v2) in &edges[v] {
                        if a == b {
                            succ[u * n + v].push(u2 * n + v2);
                        }
                    }
                }
            }
        }
        let diagonal = (0..nodes).map(|x| x / n == x % n).collect();
        PairGraph {
            nodes,
            succ,
            diagonal,
        }
    }
}

/// Garden-of-Eden free: every configuration has a preimage.
pub fn is_surjective(rule: &CaRule) -> bool {
    let g = PairGraph::new(rule);
    let mut seen = vec![false; g.nodes];
    let mut stack = Vec::new();
    for x in (0..g.nodes).filter(|&x| g.diagonal[x]) {
        for &y in &g.succ[x] {
            if !g.diagonal[y] && !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    while let Some(x) = stack.pop() {
        for &y in &g.succ[x] {
            if g.diagonal[y] {
                return false;
            }
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    true
}

/// Distinct configurations have distinct images.
pub fn is_injective(rule: &CaRule) -> bool {
    let g = PairGraph::new(rule);
    let sccs = Sccs::of_graph(g.nodes, |x| g.succ[x].iter().copied(), |_| true);
    let on_cycle: Vec<bool> = (0..g.nodes).map(|x| sccs.nontrivial[sccs.component[x]]).collect();
    let mut from_cycle = on_cycle.clone();
    let mut stack: Vec<usize> = (0..g.nodes).filter(|&x| on_cycle[x]).collect();
    while let Some(x) = stack.pop() {
        for &y in &g.succ[x] {
            if !from_cycle[y] {
                from_cycle[y] = true;
                stack.push(y);
            }
        }
    }
    let mut pred = vec![Vec::new(); g.nodes];
    for x in 0..g.nodes {
        for &y in &g.succ[x] {
            pred[y].push(x);
        }
    }
    let mut to_cycle = on_cycle.clone();
    let mut stack: Vec<usize> = (0..g.nodes).filter(|&x| on_cycle[x]).collect();
    while let Some(y) = stack.pop() {
        for &x in &pred[y] {
            if !to_cycle[x] {
                to_cycle[x] = true;
                stack.push(x);
            }
        }
    }
    !(0..g.nodes).any(|x| !g.diagonal[x] && from_cycle[x] && to_cycle[x])
}
