//! Backward-error radii of the Padé exponentials and the forward radius of Taylor-5.

use matgraph::degopt::graph_monomial;
use matgraph::error_analysis::{compute_bwd_theta_exp, compute_fwd_theta, theta_table, THETA_PREC};
use matgraph::generators::graph_exp_pade_ss;
use matgraph::numerics::{BigReal, TruncSeries};

fn main() -> matgraph::Result<()> {
    let u = BigReal::from_i64_2exp(1, -53, THETA_PREC);
    let mut rows = Vec::new();
    for m in [3, 5, 7, 9, 13] {
        let (g, _) = graph_exp_pade_ss::<BigReal>(m, 0, THETA_PREC)?;
        rows.push((format!("pade{m}"), g.cost(), compute_bwd_theta_exp(&g, &u, 100)?));
    }
    print!("{}", theta_table(&rows));

    let c: Vec<BigReal> = TruncSeries::<BigReal>::exp_series(6, THETA_PREC).into_coeffs();
    let (g, _) = graph_monomial(&c)?;
    let f = TruncSeries::<BigReal>::exp_series(40, THETA_PREC);
    let r = compute_fwd_theta(&g, &f, &u)?;
    println!("taylor5 forward theta = {}", r.theta.to_string_digits(12));
    Ok(())
}
