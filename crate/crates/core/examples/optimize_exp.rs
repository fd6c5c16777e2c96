//! Gauss-Newton on the 34 coefficients of a four-multiplication polynomial,
//! starting from Taylor-5, fitting exp on the disk of radius 0.45.
//! Takes a few seconds in release mode.

use matgraph::degopt::{embed_degopt, graph_degopt, EmbedScheme};
use matgraph::numerics::{BigReal, Complex};
use matgraph::optimizer::{max_abs, opt_gauss_newton, residual, Discretization, ErrType, GNConfig, Target};

fn main() -> matgraph::Result<()> {
    let c = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0, 1.0 / 120.0];
    let (g, refs) = graph_degopt(&embed_degopt(EmbedScheme::Monomial, &c, 53)?)?;
    let mut gb = g.convert::<BigReal>(256)?;
    let disc: Discretization<BigReal> = Discretization::disk(Complex::new(0.0, 0.0), 0.45, 200, 256);
    let cfg = GNConfig { logger: 1, divergence_factor: f64::INFINITY, ..Default::default() };
    let rep = opt_gauss_newton(&mut gb, &Target::Exp, &disc, &cfg, &refs)?;

    let g64 = gb.convert::<f64>(53)?;
    let check: Discretization<f64> = Discretization::disk(Complex::new(0.0, 0.0), 0.45, 1000, 53);
    let before = max_abs(&residual(&g, &Target::Exp, &check, ErrType::Rel)?);
    let after = max_abs(&residual(&g64, &Target::Exp, &check, ErrType::Rel)?);
    println!("{} iterations; max relative error {before:.2e} -> {after:.2e}", rep.iterations);
    print!("{}", rep.to_csv());
    Ok(())
}
