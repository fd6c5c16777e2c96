//! MATLAB and C source for the Taylor cosine written as a polynomial in A^2.

use matgraph::codegen::{gen_code, Dialect, EmitTarget};
use matgraph::degopt::graph_ps;

fn main() -> matgraph::Result<()> {
    let c: Vec<f64> = (0..10)
        .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / (1..=2 * k).map(|j| j as f64).product::<f64>())
        .collect();
    let (mut g, _) = graph_ps(&c)?;
    g.rename_node("A", "A2tmp")?;
    g.add_mult("A2tmp", "A", "A")?;

    let m = gen_code(&g, &EmitTarget::new(Dialect::Matlab, "mycosm"))?;
    println!("{}", m.source);
    let c = gen_code(&g, &EmitTarget::new(Dialect::CBlas, "mycosm").fused(true))?;
    println!("/* {} statements, {} work buffers */", c.statements, c.schedule.peak_buffers);
    println!("{}", c.header.unwrap_or_default());
    println!("{}", c.source);
    Ok(())
}
