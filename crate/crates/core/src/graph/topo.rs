use std::collections::{BTreeMap, BTreeSet};

use super::ComputationGraph;
use crate::numerics::Scalar;

impl<T: Scalar> ComputationGraph<T> {
    /// Node ids needed to compute the outputs.
    pub fn ancestors_of_outputs(&self) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&str> = self.outputs.iter().map(|s| s.as_str()).collect();
        while let Some(x) = stack.pop() {
            if let Some(n) = self.nodes.get(x) {
                if seen.insert(x.to_string()) {
                    stack.push(&n.parents.0);
                    stack.push(&n.parents.1);
                }
            }
        }
        seen
    }

    /// Topological order of the ancestors of the outputs. Among ready nodes the
    /// lexicographically smallest id goes first, so the order is deterministic.
    pub fn topo_order(&self) -> Vec<String> {
        let keep = self.ancestors_of_outputs();
        let mut indeg: BTreeMap<&str, usize> = BTreeMap::new();
        let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for id in &keep {
            let n = &self.nodes[id];
            let mut d = 0;
            for p in n.parent_list() {
                if keep.contains(p) {
                    d += 1;
                    children.entry(p).or_default().push(id);
                }
            }
            indeg.insert(id, d);
        }
        let mut ready: BTreeSet<&str> = indeg.iter().filter(|(_, d)| **d == 0).map(|(k, _)| *k).collect();
        let mut order = Vec::with_capacity(keep.len());
        while let Some(x) = ready.pop_first() {
            order.push(x.to_string());
            if let Some(cs) = children.get(x) {
                for c in cs {
                    let d = indeg.get_mut(c).unwrap();
                    *d -= 1;
                    if *d == 0 {
                        ready.insert(c);
                    }
                }
            }
        }
        order
    }
}

/// Free-function form of [`ComputationGraph::topo_order`].
pub fn get_topo_order<T: Scalar>(g: &ComputationGraph<T>) -> Vec<String> {
    g.topo_order()
}
