//! Graphs for iterative schemes: Denman-Beavers square root, Newton-Schulz
//! inverse and the Padé exponential with scaling and squaring.

use matgraph::generators::{graph_denman_beavers, graph_exp_pade_ss, graph_newton_schulz, pade_ss_params};
use matgraph::numerics::Matrix;
use matgraph::eval_graph;

fn main() -> matgraph::Result<()> {
    let a = Matrix::from_rows(vec![vec![0.5, 0.2], vec![0.3, 0.5]])?;

    let (db, _) = graph_denman_beavers::<f64>(4)?;
    let x = eval_graph(&db, &a)?;
    println!("sqrt(A) ~ {:?}, residual {:e}", x, x.matmul(&x)?.sub(&a)?.max_abs());

    let b = Matrix::from_rows(vec![vec![1.1, 0.1], vec![0.0, 0.9]])?;
    let (ns, _) = graph_newton_schulz::<f64>(6)?;
    let y = eval_graph(&ns, &b)?;
    println!("inv(B) ~ {:?}, residual {:e}", y, y.matmul(&b)?.sub(&Matrix::identity(2))?.max_abs());

    let c = a.scale(&8.0);
    let (m, s) = pade_ss_params(8.0 * 0.8);
    let (pe, _) = graph_exp_pade_ss::<f64>(m, s, 53)?;
    println!("exp(8A) with degree {m}, {s} squarings ({} nodes): {:?}", pe.len(), eval_graph(&pe, &c)?);
    Ok(())
}
