//! Running round-off bound and randomized estimate for (1+x)^2 - (1+x/2)^2
//! at x = 2^-27, where the subtraction cancels.

use matgraph::error_analysis::{eval_runerr, RunErrMode};
use matgraph::ComputationGraph;

fn main() -> matgraph::Result<()> {
    let mut g = ComputationGraph::<f64>::new();
    g.add_lincomb("y", 1.0, "I", 1.0, "x")?;
    g.add_lincomb("z", 1.0, "I", 0.5, "x")?;
    g.add_mult("y2", "y", "y")?;
    g.add_mult("z2", "z", "z")?;
    g.add_lincomb("out", 1.0, "y2", -1.0, "z2")?;
    g.add_output("out")?;

    let x = 2f64.powi(-27);
    let exact = 2f64.powi(-54) * (2f64.powi(28) + 3.0);
    let b = eval_runerr(&g, &x, "x", RunErrMode::Bound, &f64::EPSILON)?;
    println!("computed {:e}, exact {exact:e}, absolute error {:e}", b.value, (b.value - exact).abs());
    println!("running bound {:e}", b.delta);
    let mut r: Vec<f64> = (0..100)
        .map(|s| eval_runerr(&g, &x, "x", RunErrMode::Rand { seed: s }, &f64::EPSILON).map(|e| e.delta))
        .collect::<matgraph::Result<_>>()?;
    r.sort_by(f64::total_cmp);
    println!("randomized estimate, median of 100: {:e}", r[50]);
    Ok(())
}
