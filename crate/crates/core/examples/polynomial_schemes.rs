//! Taylor-11 exponential through the classical schemes and their degree-optimal
//! embeddings; all agree, at different multiplication counts.

use matgraph::degopt::{embed_degopt, graph_degopt, graph_horner, graph_monomial, graph_ps, EmbedScheme};
use matgraph::numerics::Matrix;
use matgraph::eval_graph;

fn main() -> matgraph::Result<()> {
    let mut c = vec![1.0];
    for k in 1..=11 {
        c.push(c[k - 1] / k as f64);
    }
    let a = Matrix::from_rows(vec![vec![0.01, 0.02], vec![0.03, 0.04]])?;
    let schemes = [
        ("monomial", graph_monomial(&c)?.0),
        ("horner", graph_horner(&c)?.0),
        ("paterson-stockmeyer", graph_ps(&c)?.0),
        ("degopt(ps)", graph_degopt(&embed_degopt(EmbedScheme::Ps, &c, 53)?)?.0),
    ];
    for (name, g) in &schemes {
        let v = eval_graph(g, &a)?;
        println!("{name:>20}: {} multiplications, p(A)[0][0] = {:.16}", g.cost(), v.get(0, 0));
    }
    Ok(())
}
