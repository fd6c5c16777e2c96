//! Write a graph to the text format, read it back at another precision.

use matgraph::cgr::{parse_cgr, render_cgr};
use matgraph::generators::graph_denman_beavers;
use matgraph::numerics::BigReal;

fn main() -> matgraph::Result<()> {
    let (g, _) = graph_denman_beavers::<f64>(2)?;
    let text = render_cgr(&g, &[("scheme".into(), "denman-beavers".into())]);
    print!("{text}");
    let doc = parse_cgr::<f64>(&text)?;
    assert_eq!(doc.graph, g);
    println!("metadata: {:?}", doc.metadata);
    let big = doc.graph.convert::<BigReal>(128)?;
    print!("{}", render_cgr(&big, &[]));
    Ok(())
}
