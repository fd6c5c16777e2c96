//! Forward-mode derivatives of scalar graph evaluation with respect to
//! lincomb coefficients.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::eval::{eval_all_nodes, eval_graph, GraphValue, Pointwise};
use crate::graph::{CoeffRef, ComputationGraph, OpKind};
use crate::numerics::{Embed, Matrix, Scalar};

/// `entries[(i, k)] = d g(z_i) / d c_k` for the first output `g`.
#[derive(Clone, Debug)]
pub struct JacobianMatrix<S> {
    pub entries: Matrix<S>,
    /// `g(z_i)` at the current coefficients.
    pub values: Vec<S>,
    pub points: Vec<S>,
    pub refs: Vec<CoeffRef>,
}

fn point_error(e: Error, points: &[impl std::fmt::Debug]) -> Error {
    match e {
        Error::ZeroDivision { index, value } => Error::Numerical(format!(
            "division by {value} when evaluating at point {index} ({:?})",
            points.get(index)
        )),
        e => e,
    }
}

/// Jacobian of the first output at `points`, one column per reference.
/// All points are processed together; only nodes downstream of a seed carry
/// a derivative.
pub fn eval_jac<T, S>(g: &ComputationGraph<T>, points: &[S], refs: &[CoeffRef]) -> Result<JacobianMatrix<S>>
where
    T: Embed<S>,
    S: Scalar,
{
    for r in refs {
        g.get_coeff(r)?;
    }
    let out = g.outputs().first().ok_or_else(|| Error::Precondition("graph has no outputs".into()))?.clone();
    let x = Pointwise(points.to_vec());
    let vals = eval_all_nodes(g, &x, "A").map_err(|e| point_error(e, points))?;
    let n = points.len();
    let value = |id: &str| vals.get(id, "A").expect("evaluated node");
    let mut entries = Matrix::zeros(n, refs.len());
    for (k, r) in refs.iter().enumerate() {
        let mut d: HashMap<&str, Pointwise<S>> = HashMap::new();
        for id in &vals.order {
            let node = g.node(id).unwrap();
            let (pl, pr) = (node.parents.0.as_str(), node.parents.1.as_str());
            let (dl, dr) = (d.get(pl), d.get(pr));
            let mut dz: Option<Pointwise<S>> = match node.op {
                OpKind::Lincomb => {
                    let (a, b) = node.coeffs.as_ref().unwrap();
                    let (a, b): (S, S) = (a.embed(), b.embed());
                    match (dl, dr) {
                        (None, None) => None,
                        (Some(l), None) => Some(Pointwise(l.0.iter().map(|v| a.clone() * v).collect())),
                        (None, Some(q)) => Some(Pointwise(q.0.iter().map(|v| b.clone() * v).collect())),
                        (Some(l), Some(q)) => Some(Pointwise::lincomb(&a, l, &b, q)?),
                    }
                }
                OpKind::Mult => {
                    let (zl, zr) = (value(pl), value(pr));
                    match (dl, dr) {
                        (None, None) => None,
                        _ => Some(Pointwise(
                            (0..n)
                                .map(|i| {
                                    let mut s = S::zero();
                                    if let Some(l) = dl {
                                        s = s + &(l.0[i].clone() * &zr.0[i]);
                                    }
                                    if let Some(q) = dr {
                                        s = s + &(zl.0[i].clone() * &q.0[i]);
                                    }
                                    s
                                })
                                .collect(),
                        )),
                    }
                }
                OpKind::Ldiv => {
                    // z = zr / zl, dz = (dzr - dzl z) / zl
                    let (zl, z) = (value(pl), value(id));
                    match (dl, dr) {
                        (None, None) => None,
                        _ => Some(Pointwise(
                            (0..n)
                                .map(|i| {
                                    let mut s = S::zero();
                                    if let Some(q) = dr {
                                        s = s + &q.0[i];
                                    }
                                    if let Some(l) = dl {
                                        s = s - &(l.0[i].clone() * &z.0[i]);
                                    }
                                    s / &zl.0[i]
                                })
                                .collect(),
                        )),
                    }
                }
            };
            if *id == r.node {
                let seed = value(if r.slot == 1 { pl } else { pr });
                dz = Some(match dz {
                    Some(v) => Pointwise(v.0.iter().zip(&seed.0).map(|(a, b)| a.clone() + b).collect()),
                    None => seed.clone(),
                });
            }
            if let Some(v) = dz {
                d.insert(id.as_str(), v);
            }
        }
        if let Some(col) = d.get(out.as_str()) {
            for i in 0..n {
                entries.set(i, k, col.0[i].clone());
            }
        }
    }
    let values = vals.get(&out, "A").cloned().map(|p| p.0).unwrap_or_default();
    Ok(JacobianMatrix { entries, values, points: points.to_vec(), refs: refs.to_vec() })
}

/// Central differences `(g(c + h e_k) - g(c - h e_k)) / 2h`.
pub fn finite_diff_jac<T, S>(
    g: &ComputationGraph<T>,
    points: &[S],
    refs: &[CoeffRef],
    h: &T,
) -> Result<JacobianMatrix<S>>
where
    T: Embed<S>,
    S: Scalar,
{
    let x = Pointwise(points.to_vec());
    let n = points.len();
    let values = eval_graph(g, &x).map_err(|e| point_error(e, points))?.0;
    let mut entries = Matrix::zeros(n, refs.len());
    let two_h: S = (h.clone() + h).embed();
    let mut work = g.clone();
    for (k, r) in refs.iter().enumerate() {
        let c = g.get_coeff(r)?;
        work.set_coeff(r, c.clone() + h)?;
        let plus = eval_graph(&work, &x).map_err(|e| point_error(e, points))?;
        work.set_coeff(r, c.clone() - h)?;
        let minus = eval_graph(&work, &x).map_err(|e| point_error(e, points))?;
        work.set_coeff(r, c)?;
        for i in 0..n {
            entries.set(i, k, (plus.0[i].clone() - &minus.0[i]) / &two_h);
        }
    }
    Ok(JacobianMatrix { entries, values, points: points.to_vec(), refs: refs.to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degopt::{graph_monomial, Degopt, graph_degopt};
    use crate::numerics::{BigReal, Complex, Real};

    fn circle(n: usize, r: f64) -> Vec<Complex<f64>> {
        (0..n).map(|k| Complex::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / (n - 1) as f64)).collect()
    }

    #[test]
    fn linear_graph_matches_fd() {
        let (g, refs) = graph_monomial(&[1.0, 0.5, -0.25, 0.125]).unwrap();
        let z = circle(10, 0.7);
        let j = eval_jac(&g, &z, &refs).unwrap();
        let f = finite_diff_jac(&g, &z, &refs, &0.3).unwrap();
        for i in 0..10 {
            for k in 0..4 {
                assert!((j.entries.get(i, k) - f.entries.get(i, k)).norm() < 1e-13);
                assert!((j.entries.get(i, k) - z[i].powi(k as i32)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn nonlinear_with_ldiv() {
        let ha = vec![vec![0.3, 0.7], vec![0.1, 0.2, 0.9]];
        let hb = vec![vec![1.2, 0.1], vec![0.6, 0.2, -0.7]];
        let d = Degopt::with_ops(ha, hb, vec![0.1, 0.2, 0.3, 0.4], vec![crate::degopt::RowOp::Mult, crate::degopt::RowOp::Ldiv]).unwrap();
        let (g, refs) = graph_degopt(&d).unwrap();
        let z = circle(7, 0.5);
        let j = eval_jac(&g, &z, &refs).unwrap();
        let f = finite_diff_jac(&g, &z, &refs, &1e-7).unwrap();
        for i in 0..7 {
            for k in 0..refs.len() {
                let (a, b) = (j.entries.get(i, k), f.entries.get(i, k));
                assert!((a - b).norm() <= 1e-6 * a.norm().max(1e-3), "{i} {k} {a} {b}");
            }
        }
    }

    #[test]
    fn high_precision_fd() {
        let p = 256;
        let ha = vec![vec![0.3, 0.7], vec![0.1, 0.2, 0.9]];
        let hb = vec![vec![-0.2, 1.1], vec![0.6, 0.2, -0.7]];
        let d = Degopt::new(ha, hb, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let (g, refs) = graph_degopt(&d).unwrap();
        let g = g.convert::<BigReal>(p).unwrap();
        let z: Vec<Complex<BigReal>> = circle(3, 0.8)
            .iter()
            .map(|c| Complex::new(BigReal::from_f64(c.re, p), BigReal::from_f64(c.im, p)))
            .collect();
        let h = BigReal::from_i64_2exp(1, -64, p);
        let j = eval_jac(&g, &z, &refs).unwrap();
        let f = finite_diff_jac(&g, &z, &refs, &h).unwrap();
        let tol = BigReal::from_i64_2exp(1, -100, p);
        for i in 0..3 {
            for k in 0..refs.len() {
                let (a, b) = (j.entries.get(i, k), f.entries.get(i, k));
                let diff = (a.clone() - b).modulus();
                assert!(diff <= tol.clone() * &a.modulus().max_of(BigReal::from_i64(1, p)), "{i} {k}");
            }
        }
    }

    #[test]
    fn unreachable_ref_gives_zero_column() {
        let mut g: ComputationGraph<f64> = ComputationGraph::new();
        g.add_lincomb("X", 2.0, "I", 1.0, "A").unwrap();
        g.add_lincomb("Y", 1.0, "A", 1.0, "A").unwrap();
        g.set_outputs(&["Y"]).unwrap();
        let z = vec![Complex::new(0.5, 0.1)];
        let j = eval_jac(&g, &z, &[CoeffRef::new("X", 1)]).unwrap();
        assert_eq!(*j.entries.get(0, 0), Complex::new(0.0, 0.0));
    }

    #[test]
    fn singular_point_is_named() {
        let mut g: ComputationGraph<f64> = ComputationGraph::new();
        g.add_ldiv("Q", "A", "I").unwrap();
        g.add_lincomb("R", 1.0, "Q", 1.0, "I").unwrap();
        g.set_outputs(&["R"]).unwrap();
        let err = eval_jac(&g, &[1.0, 0.0], &[CoeffRef::new("R", 1)]).unwrap_err();
        assert!(err.to_string().contains("point 1"), "{err}");
    }
}
