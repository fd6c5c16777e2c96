//! Truncated power series: evaluate a graph on z, then log(e^{-z} g(z)), the
//! series behind the backward error of an exponential approximant.

use matgraph::degopt::graph_monomial;
use matgraph::eval_graph;
use matgraph::numerics::TruncSeries;

fn main() -> matgraph::Result<()> {
    let n = 10;
    let (g, _) = graph_monomial(&[1.0, 1.0, 0.5, 1.0 / 6.0])?;
    let z = TruncSeries::<f64>::variable(n, 53);
    let gz = eval_graph(&g, &z)?;
    println!("g(z)          = {:?}", gz.coeffs());
    let neg: Vec<f64> = TruncSeries::<f64>::exp_series(n, 53).coeffs().iter().enumerate().map(|(k, c)| if k % 2 == 1 { -c } else { *c }).collect();
    let mut w = TruncSeries::new(neg).mul(&gz)?;
    let mut c = w.coeffs().to_vec();
    c[0] = 0.0;
    w = TruncSeries::new(c);
    let phi = TruncSeries::compose(&TruncSeries::<f64>::log1p_series(n, 53), &w)?;
    println!("log(e^-z g(z)) = {:?}", phi.coeffs());
    Ok(())
}
