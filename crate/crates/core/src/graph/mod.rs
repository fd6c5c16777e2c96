//! The computational graph: a DAG of linear combinations, products and left
//! solves over the inputs `I` and `A`.

mod compress;
mod topo;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{convert_scalar, Scalar};

pub use compress::compress_graph;
pub use topo::get_topo_order;

/// Identity input.
pub const INPUT_I: &str = "I";
/// Default matrix argument.
pub const INPUT_A: &str = "A";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    /// `c1*Z_l + c2*Z_r`
    Lincomb,
    /// `Z_l * Z_r`
    Mult,
    /// `Z_l^{-1} * Z_r`
    Ldiv,
}

impl OpKind {
    pub fn name(self) -> &'static str {
        match self {
            OpKind::Lincomb => "lincomb",
            OpKind::Mult => "mult",
            OpKind::Ldiv => "ldiv",
        }
    }
}

/// Position of one coefficient: node id and slot (1 or 2).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoeffRef {
    pub node: String,
    pub slot: u8,
}

impl CoeffRef {
    pub fn new(node: impl Into<String>, slot: u8) -> Self {
        CoeffRef { node: node.into(), slot }
    }
}

impl fmt::Display for CoeffRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.node, self.slot)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node<T> {
    pub op: OpKind,
    pub parents: (String, String),
    /// Present exactly for `Lincomb` nodes.
    pub coeffs: Option<(T, T)>,
}

impl<T> Node<T> {
    pub fn parent_list(&self) -> [&str; 2] {
        [self.parents.0.as_str(), self.parents.1.as_str()]
    }
}

/// Directed acyclic graph of matrix operations with coefficients of type `T`.
///
/// Parent references that are not node ids are inputs. `I` is always the
/// identity; the argument is `A` unless another id is chosen at evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct ComputationGraph<T> {
    nodes: BTreeMap<String, Node<T>>,
    outputs: Vec<String>,
}

impl<T> Default for ComputationGraph<T> {
    fn default() -> Self {
        ComputationGraph { nodes: BTreeMap::new(), outputs: Vec::new() }
    }
}

/// Checks identifier syntax: a letter or underscore followed by letters,
/// digits or underscores.
pub fn is_valid_id(id: &str) -> bool {
    let mut ch = id.chars();
    match ch.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    ch.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl<T: Scalar> ComputationGraph<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn node(&self, id: &str) -> Option<&Node<T>> {
        self.nodes.get(id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&str, &Node<T>)> {
        self.nodes.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &str> {
        self.nodes.keys().map(|k| k.as_str())
    }

    pub fn operation(&self, id: &str) -> Option<OpKind> {
        self.nodes.get(id).map(|n| n.op)
    }

    pub fn parents(&self, id: &str) -> Option<(&str, &str)> {
        self.nodes.get(id).map(|n| (n.parents.0.as_str(), n.parents.1.as_str()))
    }

    pub fn coeffs(&self, id: &str) -> Option<&(T, T)> {
        self.nodes.get(id).and_then(|n| n.coeffs.as_ref())
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    /// Insert a node after checking id syntax, uniqueness, coefficient arity and acyclicity.
    pub fn add_node(
        &mut self,
        id: &str,
        op: OpKind,
        parents: (&str, &str),
        coeffs: Option<(T, T)>,
    ) -> Result<()> {
        if !is_valid_id(id) || id == INPUT_I || id == INPUT_A {
            return Err(Error::InvalidId(id.to_string()));
        }
        if self.nodes.contains_key(id) {
            return Err(Error::DuplicateNode(id.to_string()));
        }
        for p in [parents.0, parents.1] {
            if !is_valid_id(p) {
                return Err(Error::UnknownParent { node: id.to_string(), parent: p.to_string() });
            }
        }
        match (op, &coeffs) {
            (OpKind::Lincomb, None) => {
                return Err(Error::CoeffArity(format!("lincomb node {id:?} needs two coefficients")))
            }
            (OpKind::Mult | OpKind::Ldiv, Some(_)) => {
                return Err(Error::CoeffArity(format!(
                    "{} node {id:?} takes no coefficients",
                    op.name()
                )))
            }
            _ => {}
        }
        if parents.0 == id || parents.1 == id || self.reaches(&[parents.0, parents.1], id) {
            return Err(Error::Cycle { node: id.to_string() });
        }
        self.nodes.insert(
            id.to_string(),
            Node { op, parents: (parents.0.to_string(), parents.1.to_string()), coeffs },
        );
        Ok(())
    }

    // Whether `target` is among the ancestors of `start` (inclusive).
    fn reaches(&self, start: &[&str], target: &str) -> bool {
        let mut stack: Vec<&str> = start.to_vec();
        let mut seen = BTreeSet::new();
        while let Some(x) = stack.pop() {
            if x == target {
                return true;
            }
            if !seen.insert(x) {
                continue;
            }
            if let Some(n) = self.nodes.get(x) {
                stack.push(&n.parents.0);
                stack.push(&n.parents.1);
            }
        }
        false
    }

    pub fn add_lincomb(&mut self, id: &str, c1: T, p1: &str, c2: T, p2: &str) -> Result<()> {
        self.add_node(id, OpKind::Lincomb, (p1, p2), Some((c1, c2)))
    }

    pub fn add_mult(&mut self, id: &str, p1: &str, p2: &str) -> Result<()> {
        self.add_node(id, OpKind::Mult, (p1, p2), None)
    }

    pub fn add_ldiv(&mut self, id: &str, p1: &str, p2: &str) -> Result<()> {
        self.add_node(id, OpKind::Ldiv, (p1, p2), None)
    }

    /// `id = sum_k c_k * P_k` as a left-associated chain of linear combinations.
    /// Intermediate partial sums of `k` terms are named `{id}_sum{k}`.
    pub fn add_sum(&mut self, id: &str, coeffs: &[T], parents: &[&str]) -> Result<()> {
        let n = coeffs.len();
        if n < 2 || parents.len() != n {
            return Err(Error::CoeffArity(format!(
                "sum {id:?} needs at least two terms and one parent per coefficient"
            )));
        }
        let name = |k: usize| if k == n { id.to_string() } else { format!("{id}_sum{k}") };
        self.add_lincomb(&name(2), coeffs[0].clone(), parents[0], coeffs[1].clone(), parents[1])?;
        for k in 3..=n {
            let prev = name(k - 1);
            self.add_lincomb(&name(k), T::one(), &prev, coeffs[k - 1].clone(), parents[k - 1])?;
        }
        Ok(())
    }

    /// Remove a node that no other node references.
    pub fn del_node(&mut self, id: &str) -> Result<()> {
        if !self.nodes.contains_key(id) {
            return Err(Error::UnknownNode(id.to_string()));
        }
        if let Some(child) = self.children_of(id).into_iter().next() {
            return Err(Error::StillReferenced { node: id.to_string(), child });
        }
        self.nodes.remove(id);
        self.outputs.retain(|o| o != id);
        Ok(())
    }

    pub fn children_of(&self, id: &str) -> Vec<String> {
        self.nodes
            .iter()
            .filter(|(_, n)| n.parents.0 == id || n.parents.1 == id)
            .map(|(k, _)| k.clone())
            .collect()
    }

    /// Rename a node, or an input such as `A`, rewriting every reference.
    pub fn rename_node(&mut self, old: &str, new: &str) -> Result<()> {
        if old == new {
            return Ok(());
        }
        if old == INPUT_I {
            return Err(Error::InvalidId(format!("cannot rename the identity input {INPUT_I}")));
        }
        if !is_valid_id(new) || new == INPUT_I || self.nodes.contains_key(new) {
            return Err(Error::InvalidId(new.to_string()));
        }
        let is_node = self.nodes.contains_key(old);
        if !is_node && !self.references(old) {
            return Err(Error::UnknownNode(old.to_string()));
        }
        if is_node && new == INPUT_A {
            return Err(Error::InvalidId(new.to_string()));
        }
        if let Some(n) = self.nodes.remove(old) {
            self.nodes.insert(new.to_string(), n);
        }
        for n in self.nodes.values_mut() {
            if n.parents.0 == old {
                n.parents.0 = new.to_string();
            }
            if n.parents.1 == old {
                n.parents.1 = new.to_string();
            }
        }
        for o in &mut self.outputs {
            if o == old {
                *o = new.to_string();
            }
        }
        Ok(())
    }

    fn references(&self, id: &str) -> bool {
        self.nodes.values().any(|n| n.parents.0 == id || n.parents.1 == id)
    }

    /// Ids referenced as parents that are neither nodes nor `I`.
    pub fn free_inputs(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for n in self.nodes.values() {
            for p in n.parent_list() {
                if p != INPUT_I && !self.nodes.contains_key(p) {
                    out.insert(p.to_string());
                }
            }
        }
        out
    }

    /// Checks that every parent is a node, `I`, or `input`.
    pub fn validate(&self, input: &str) -> Result<()> {
        if self.nodes.contains_key(input) {
            return Err(Error::InvalidId(format!("input id {input:?} is also a node")));
        }
        for (id, n) in &self.nodes {
            for p in n.parent_list() {
                if p != INPUT_I && p != input && !self.nodes.contains_key(p) {
                    return Err(Error::UnknownParent { node: id.clone(), parent: p.to_string() });
                }
            }
        }
        for o in &self.outputs {
            if !self.nodes.contains_key(o) && o != input && o != INPUT_I {
                return Err(Error::UnknownNode(o.clone()));
            }
        }
        Ok(())
    }

    pub fn set_outputs(&mut self, outputs: &[&str]) -> Result<()> {
        for o in outputs {
            if !self.nodes.contains_key(*o) && *o != INPUT_A && *o != INPUT_I {
                return Err(Error::UnknownNode(o.to_string()));
            }
        }
        self.outputs = outputs.iter().map(|s| s.to_string()).collect();
        Ok(())
    }

    pub fn add_output(&mut self, id: &str) -> Result<()> {
        if !self.nodes.contains_key(id) && id != INPUT_A && id != INPUT_I {
            return Err(Error::UnknownNode(id.to_string()));
        }
        self.outputs.push(id.to_string());
        Ok(())
    }

    pub fn clear_outputs(&mut self) {
        self.outputs.clear();
    }

    /// Every coefficient position, sorted by node id then slot.
    pub fn all_coeff_refs(&self) -> Vec<CoeffRef> {
        self.nodes
            .iter()
            .filter(|(_, n)| n.op == OpKind::Lincomb)
            .flat_map(|(k, _)| [CoeffRef::new(k.clone(), 1), CoeffRef::new(k.clone(), 2)])
            .collect()
    }

    /// Coefficient positions that are not a pure rescaling of another one.
    /// In `Z = a*X + b*Y` with `X` a linear combination used by `Z` alone,
    /// `a` only rescales the coefficients of `X` and is left out. These are the
    /// positions worth fitting.
    pub fn free_coeff_refs(&self) -> Vec<CoeffRef> {
        let chained = |id: &str, left: &str| {
            left != id
                && self.nodes.get(left).is_some_and(|n| n.op == OpKind::Lincomb)
                && !self.outputs.iter().any(|o| o == left)
                && self.children_of(left) == [id]
        };
        self.all_coeff_refs()
            .into_iter()
            .filter(|r| r.slot == 2 || !chained(&r.node, &self.nodes[&r.node].parents.0))
            .collect()
    }

    pub fn get_coeff(&self, r: &CoeffRef) -> Result<T> {
        let n = self.nodes.get(&r.node).ok_or_else(|| Error::UnknownNode(r.node.clone()))?;
        let c = n
            .coeffs
            .as_ref()
            .ok_or_else(|| Error::CoeffArity(format!("node {:?} has no coefficients", r.node)))?;
        match r.slot {
            1 => Ok(c.0.clone()),
            2 => Ok(c.1.clone()),
            s => Err(Error::CoeffArity(format!("invalid coefficient slot {s}"))),
        }
    }

    pub fn get_coeffs(&self, refs: &[CoeffRef]) -> Result<Vec<T>> {
        refs.iter().map(|r| self.get_coeff(r)).collect()
    }

    pub fn set_coeff(&mut self, r: &CoeffRef, v: T) -> Result<()> {
        let n = self.nodes.get_mut(&r.node).ok_or_else(|| Error::UnknownNode(r.node.clone()))?;
        let c = n
            .coeffs
            .as_mut()
            .ok_or_else(|| Error::CoeffArity(format!("node {:?} has no coefficients", r.node)))?;
        match r.slot {
            1 => c.0 = v,
            2 => c.1 = v,
            s => return Err(Error::CoeffArity(format!("invalid coefficient slot {s}"))),
        }
        Ok(())
    }

    pub fn set_coeffs(&mut self, refs: &[CoeffRef], values: &[T]) -> Result<()> {
        if refs.len() != values.len() {
            return Err(Error::CoeffArity(format!(
                "{} coefficient refs but {} values",
                refs.len(),
                values.len()
            )));
        }
        for (r, v) in refs.iter().zip(values) {
            self.set_coeff(r, v.clone())?;
        }
        Ok(())
    }

    /// Point every reference to `from` at `to` instead.
    pub(crate) fn redirect(&mut self, from: &str, to: &str) {
        for n in self.nodes.values_mut() {
            if n.parents.0 == from {
                n.parents.0 = to.to_string();
            }
            if n.parents.1 == from {
                n.parents.1 = to.to_string();
            }
        }
    }

    /// Count of `(mult, ldiv, lincomb)` nodes needed for the outputs.
    pub fn op_counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for id in self.topo_order() {
            match self.nodes[&id].op {
                OpKind::Mult => c.0 += 1,
                OpKind::Ldiv => c.1 += 1,
                OpKind::Lincomb => c.2 += 1,
            }
        }
        c
    }

    pub fn has_ldiv(&self) -> bool {
        self.topo_order().iter().any(|id| self.nodes[id].op == OpKind::Ldiv)
    }

    /// Cost as number of multiplications plus solves.
    pub fn cost(&self) -> usize {
        let (m, l, _) = self.op_counts();
        m + l
    }

    /// Same graph with coefficients converted to `U`, rounded to `prec` bits.
    pub fn convert<U: Scalar>(&self, prec: u32) -> Result<ComputationGraph<U>> {
        let mut nodes = BTreeMap::new();
        for (k, n) in &self.nodes {
            let coeffs = match &n.coeffs {
                Some((a, b)) => {
                    let f = |x: &T| {
                        convert_scalar::<T, U>(x, prec).ok_or_else(|| {
                            Error::TypeMismatch(format!("complex coefficient in node {k:?} cannot become real"))
                        })
                    };
                    Some((f(a)?, f(b)?))
                }
                None => None,
            };
            nodes.insert(k.clone(), Node { op: n.op, parents: n.parents.clone(), coeffs });
        }
        Ok(ComputationGraph { nodes, outputs: self.outputs.clone() })
    }

    /// Highest coefficient precision in the graph (53 when there are none).
    pub fn precision(&self) -> u32 {
        self.nodes
            .values()
            .filter_map(|n| n.coeffs.as_ref())
            .map(|(a, b)| a.prec().max(b.prec()))
            .max()
            .unwrap_or(53)
            .max(53)
    }

    /// Disjoint union of two graphs. Node ids of `other` that clash are renamed
    /// with a `_g2` suffix; inputs are shared. Outputs are concatenated.
    pub fn merge(&self, other: &Self) -> Self {
        let mut out = self.clone();
        let mut map = BTreeMap::new();
        for k in other.nodes.keys() {
            let mut name = k.clone();
            if self.nodes.contains_key(&name) {
                name = format!("{k}_g2");
                let mut i = 2;
                while self.nodes.contains_key(&name) || other.nodes.contains_key(&name) {
                    name = format!("{k}_g2_{i}");
                    i += 1;
                }
            }
            map.insert(k.clone(), name);
        }
        let tr = |s: &String| map.get(s).cloned().unwrap_or_else(|| s.clone());
        for (k, n) in &other.nodes {
            out.nodes.insert(
                tr(k),
                Node { op: n.op, parents: (tr(&n.parents.0), tr(&n.parents.1)), coeffs: n.coeffs.clone() },
            );
        }
        out.outputs.extend(other.outputs.iter().map(tr));
        out
    }
}

impl<T: Scalar> fmt::Display for ComputationGraph<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Graph with {} node(s), outputs {:?}", self.nodes.len(), self.outputs)?;
        for (k, n) in &self.nodes {
            match (&n.op, &n.coeffs) {
                (OpKind::Lincomb, Some((a, b))) => writeln!(
                    f,
                    "  {k} = {}*{} + {}*{}",
                    a.to_roundtrip(),
                    n.parents.0,
                    b.to_roundtrip(),
                    n.parents.1
                )?,
                (OpKind::Mult, _) => writeln!(f, "  {k} = {} * {}", n.parents.0, n.parents.1)?,
                (OpKind::Ldiv, _) => writeln!(f, "  {k} = {} \\ {}", n.parents.0, n.parents.1)?,
                _ => {}
            }
        }
        Ok(())
    }
}

/// Disjoint union of two graphs; see [`ComputationGraph::merge`].
pub fn merge_graph<T: Scalar>(a: &ComputationGraph<T>, b: &ComputationGraph<T>) -> ComputationGraph<T> {
    a.merge(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monomial() -> ComputationGraph<f64> {
        let mut g = ComputationGraph::new();
        g.add_lincomb("P2", 1.0, "I", 0.0, "A").unwrap();
        g.add_mult("A2", "A", "A").unwrap();
        g.add_lincomb("P3", 1.0, "P2", 3.0, "A2").unwrap();
        g.set_outputs(&["P3"]).unwrap();
        g
    }

    #[test]
    fn add_node_errors() {
        let mut g = monomial();
        assert!(matches!(g.add_mult("A2", "A", "A"), Err(Error::DuplicateNode(_))));
        assert!(matches!(g.add_mult("I", "A", "A"), Err(Error::InvalidId(_))));
        assert!(matches!(g.add_mult("9x", "A", "A"), Err(Error::InvalidId(_))));
        assert!(matches!(
            g.add_node("Q", OpKind::Mult, ("A", "A"), Some((1.0, 1.0))),
            Err(Error::CoeffArity(_))
        ));
        assert!(matches!(g.add_node("Q", OpKind::Lincomb, ("A", "A"), None), Err(Error::CoeffArity(_))));
        assert!(matches!(g.add_mult("Q", "Q", "A"), Err(Error::Cycle { .. })));
    }

    #[test]
    fn forward_reference_cycle_detected() {
        let mut g = ComputationGraph::<f64>::new();
        g.add_mult("P", "Q", "A").unwrap();
        assert!(matches!(g.add_mult("Q", "P", "A"), Err(Error::Cycle { .. })));
        assert!(g.validate("A").is_err());
    }

    #[test]
    fn add_sum_chain() {
        let mut g = ComputationGraph::new();
        g.add_sum("S", &[1.0, 2.0, 3.0, 4.0], &["I", "A", "A", "A"]).unwrap();
        assert!(g.contains("S_sum2") && g.contains("S_sum3") && g.contains("S"));
        assert_eq!(g.parents("S"), Some(("S_sum3", "A")));
        assert_eq!(g.coeffs("S_sum3"), Some(&(1.0, 3.0)));
        assert!(g.add_sum("T", &[1.0], &["I"]).is_err());
    }

    #[test]
    fn rename_input_and_nodes() {
        let mut g = monomial();
        g.rename_node("A", "Ashift").unwrap();
        assert_eq!(g.parents("A2"), Some(("Ashift", "Ashift")));
        g.add_lincomb("Ashift", 1.0, "A", 1.0, "I").unwrap();
        g.validate("A").unwrap();
        g.rename_node("P3", "out").unwrap();
        assert_eq!(g.outputs(), &["out".to_string()]);
        assert!(g.rename_node("out", "A2").is_err());
        assert!(g.rename_node("I", "J").is_err());
    }

    #[test]
    fn del_node_referenced() {
        let mut g = monomial();
        assert!(matches!(g.del_node("A2"), Err(Error::StillReferenced { .. })));
        g.del_node("P3").unwrap();
        assert!(g.outputs().is_empty());
        g.del_node("A2").unwrap();
    }

    #[test]
    fn coefficients_get_set() {
        let mut g = monomial();
        let refs = g.all_coeff_refs();
        assert_eq!(refs.len(), 4);
        assert_eq!(g.get_coeffs(&refs).unwrap(), vec![1.0, 0.0, 1.0, 3.0]);
        g.set_coeffs(&refs, &[2.0, 0.5, 1.0, 1.0]).unwrap();
        assert_eq!(g.coeffs("P2"), Some(&(2.0, 0.5)));
        assert!(g.get_coeff(&CoeffRef::new("A2", 1)).is_err());
        assert!(g.set_coeffs(&refs, &[1.0]).is_err());
    }

    #[test]
    fn merge_renames_clashes() {
        let g = monomial();
        let m = g.merge(&g);
        assert_eq!(m.len(), 6);
        assert_eq!(m.outputs(), &["P3".to_string(), "P3_g2".to_string()]);
        assert_eq!(m.parents("P3_g2"), Some(("P2_g2", "A2_g2")));
    }

    #[test]
    fn convert_rejects_complex_to_real() {
        use num_complex::Complex;
        let mut g = ComputationGraph::<Complex<f64>>::new();
        g.add_lincomb("X", Complex::new(1.0, 1.0), "I", Complex::new(1.0, 0.0), "A").unwrap();
        assert!(g.convert::<f64>(53).is_err());
        let b = monomial().convert::<crate::numerics::BigReal>(256).unwrap();
        assert_eq!(b.precision(), 256);
    }

    #[test]
    fn free_coefficients_skip_chain_scalings() {
        // P3 = 1*P2 + 3*A2 with P2 used only by P3: the 1 is redundant
        let g = monomial();
        let free = g.free_coeff_refs();
        assert_eq!(free.len(), 3);
        assert!(!free.contains(&CoeffRef::new("P3", 1)));

        use crate::degopt::{embed_degopt, graph_degopt, EmbedScheme};
        let c = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0, 1.0 / 120.0];
        let (g, refs) = graph_degopt(&embed_degopt(EmbedScheme::Monomial, &c, 53).unwrap()).unwrap();
        let mut free = g.free_coeff_refs();
        let mut refs = refs;
        free.sort_by(|a, b| (&a.node, a.slot).cmp(&(&b.node, b.slot)));
        refs.sort_by(|a, b| (&a.node, a.slot).cmp(&(&b.node, b.slot)));
        assert_eq!(free, refs);
    }
}
