use std::collections::BTreeMap;

use super::{ComputationGraph, Node, OpKind, INPUT_I};
use crate::numerics::Scalar;

/// Simplify a graph without changing the function it computes.
///
/// Repeats until nothing changes: drops nodes that do not feed an output,
/// bypasses products and solves with an identity operand, merges structurally
/// identical nodes, and folds linear combinations with a zero coefficient into
/// their consumers. Output nodes are never removed.
pub fn compress_graph<T: Scalar>(g: &mut ComputationGraph<T>) {
    loop {
        let mut changed = remove_dangling(g);
        changed |= bypass_identity(g);
        changed |= merge_duplicates(g);
        changed |= fold_zero_coeffs(g);
        if !changed {
            break;
        }
    }
}

fn is_output<T>(g: &ComputationGraph<T>, id: &str) -> bool {
    g.outputs.iter().any(|o| o == id)
}

fn remove_dangling<T: Scalar>(g: &mut ComputationGraph<T>) -> bool {
    if g.outputs.is_empty() {
        return false;
    }
    let keep = g.ancestors_of_outputs();
    let before = g.nodes.len();
    g.nodes.retain(|k, _| keep.contains(k));
    g.nodes.len() != before
}

fn bypass_identity<T: Scalar>(g: &mut ComputationGraph<T>) -> bool {
    let mut changed = false;
    let ids: Vec<String> = g.nodes.keys().cloned().collect();
    for id in ids {
        if is_output(g, &id) {
            continue;
        }
        let Some(n) = g.nodes.get(&id) else { continue };
        let target = match n.op {
            OpKind::Mult if n.parents.0 == INPUT_I => n.parents.1.clone(),
            OpKind::Mult if n.parents.1 == INPUT_I => n.parents.0.clone(),
            OpKind::Ldiv if n.parents.0 == INPUT_I => n.parents.1.clone(),
            _ => continue,
        };
        if g.references(&id) {
            g.redirect(&id, &target);
            changed = true;
        }
    }
    changed
}

type Key<T> = (OpKind, String, String, Option<(T, T)>);

fn canonical_key<T: Scalar>(n: &Node<T>) -> Key<T> {
    let (p, q) = (n.parents.0.clone(), n.parents.1.clone());
    match (&n.coeffs, n.op) {
        (Some((a, b)), OpKind::Lincomb) if q < p => (n.op, q, p, Some((b.clone(), a.clone()))),
        _ => (n.op, p, q, n.coeffs.clone()),
    }
}

fn merge_duplicates<T: Scalar>(g: &mut ComputationGraph<T>) -> bool {
    let mut changed = false;
    // coefficients are compared exactly, so a linear scan over groups keyed by
    // structure is enough
    let mut groups: BTreeMap<(OpKind, String, String), Vec<String>> = BTreeMap::new();
    for (id, n) in &g.nodes {
        let k = canonical_key(n);
        groups.entry((k.0, k.1, k.2)).or_default().push(id.clone());
    }
    for (_, ids) in groups {
        if ids.len() < 2 {
            continue;
        }
        let mut handled = vec![false; ids.len()];
        for i in 0..ids.len() {
            if handled[i] {
                continue;
            }
            let ki = canonical_key(&g.nodes[&ids[i]]).3;
            let mut same = vec![ids[i].clone()];
            for j in i + 1..ids.len() {
                if !handled[j] && canonical_key(&g.nodes[&ids[j]]).3 == ki {
                    handled[j] = true;
                    same.push(ids[j].clone());
                }
            }
            if same.len() < 2 {
                continue;
            }
            // keep an output if there is one, otherwise the smallest id
            let keep = same.iter().find(|s| is_output(g, s)).cloned().unwrap_or_else(|| same[0].clone());
            for s in &same {
                if *s == keep || is_output(g, s) {
                    continue;
                }
                g.redirect(s, &keep);
                g.nodes.remove(s);
                changed = true;
            }
        }
    }
    changed
}

fn fold_zero_coeffs<T: Scalar>(g: &mut ComputationGraph<T>) -> bool {
    let mut changed = false;
    let ids: Vec<String> = g.nodes.keys().cloned().collect();
    for id in ids {
        let Some(n) = g.nodes.get(&id) else { continue };
        let Some((a, b)) = &n.coeffs else { continue };
        // Z = c * X
        let (c, x) = if b.is_zero() {
            (a.clone(), n.parents.0.clone())
        } else if a.is_zero() {
            (b.clone(), n.parents.1.clone())
        } else {
            continue;
        };
        let children = g.children_of(&id);
        for ch in children {
            let cn = g.nodes.get_mut(&ch).unwrap();
            match cn.op {
                OpKind::Lincomb => {
                    let (ca, cb) = cn.coeffs.as_mut().unwrap();
                    if cn.parents.0 == id {
                        cn.parents.0 = x.clone();
                        *ca = ca.clone() * &c;
                        changed = true;
                    }
                    if cn.parents.1 == id {
                        cn.parents.1 = x.clone();
                        *cb = cb.clone() * &c;
                        changed = true;
                    }
                }
                OpKind::Mult | OpKind::Ldiv if c.is_one() => {
                    if cn.parents.0 == id {
                        cn.parents.0 = x.clone();
                        changed = true;
                    }
                    if cn.parents.1 == id {
                        cn.parents.1 = x.clone();
                        changed = true;
                    }
                }
                _ => {}
            }
        }
    }
    changed
}
