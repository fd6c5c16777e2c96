//! Build 1 + 3x^2 by hand, evaluate it at a scalar and a matrix, then compress it.

use matgraph::numerics::Matrix;
use matgraph::{compress_graph, eval_graph, ComputationGraph};

fn main() -> matgraph::Result<()> {
    let mut g = ComputationGraph::<f64>::new();
    g.add_mult("A2", "A", "A")?;
    g.add_lincomb("P2", 1.0, "I", 0.0, "A")?;
    g.add_lincomb("P3", 1.0, "P2", 3.0, "A2")?;
    g.add_output("P3")?;
    println!("order: {:?}", g.topo_order());
    println!("p(0.1) = {}", eval_graph(&g, &0.1)?);

    let a = Matrix::from_rows(vec![vec![3.0, 4.0], vec![5.0, 6.0]])?;
    println!("p(A) = {:?}", eval_graph(&g, &a)?);

    compress_graph(&mut g);
    println!("after compression: {} nodes\n{g}", g.len());
    Ok(())
}
