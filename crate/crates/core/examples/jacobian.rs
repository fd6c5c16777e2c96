//! Jacobian of the Taylor-5 exponential with respect to its coefficients on a
//! circle, in monomial and in degree-optimal form.

use matgraph::autodiff::eval_jac;
use matgraph::degopt::{embed_degopt, graph_degopt, graph_monomial, EmbedScheme};
use matgraph::numerics::svd::singular_values_of;
use matgraph::numerics::Complex;

fn main() -> matgraph::Result<()> {
    let c = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0, 1.0 / 120.0];
    let z: Vec<Complex<f64>> = (0..200)
        .map(|k| Complex::from_polar(0.45, 2.0 * std::f64::consts::PI * k as f64 / 199.0))
        .collect();

    let (g, refs) = graph_monomial(&c)?;
    let j = eval_jac(&g, &z, &refs)?;
    println!("monomial: {}x{}, σ = {:?}", j.entries.rows(), j.entries.cols(), singular_values_of(&j.entries));

    let (g, refs) = graph_degopt(&embed_degopt(EmbedScheme::Monomial, &c, 53)?)?;
    let j = eval_jac(&g, &z, &refs)?;
    let s = singular_values_of(&j.entries);
    let rank = s.iter().filter(|v| **v > 1e-12 * s[0]).count();
    println!("degopt: {}x{}, numerical rank {rank}, σ[..10] = {:?}", j.entries.rows(), j.entries.cols(), &s[..10]);
    Ok(())
}
