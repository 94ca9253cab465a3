//! Gauss–Legendre rules: exactness, a Fermi-weight moment on graded panels,
//! and adaptive panel doubling.

use ftgap::fermi::{pole_distance, sigma};
use ftgap::quadrature::{adaptive_integrate, gauss_legendre, graded_breakpoints, truncation_radius, CompositeRule};

fn main() -> ftgap::Result<()> {
    let rule = gauss_legendre(10)?;
    // exact up to degree 19
    let x18 = rule.integrate(|t| t.powi(18));
    println!("int t^18 over (-1,1): {x18:.17} (exact {:.17})", 2.0 / 19.0);

    let s = 25.0;
    let radius = truncation_radius(s, 1e-14);
    let bp = graded_breakpoints(0.0, radius, &[s.sqrt()], |t| (0.5 * pole_distance(t, s)).min(1.0));
    let comp = CompositeRule::new(&bp, 20)?;
    let m0 = 2.0 * comp.integrate(|t| sigma(t, s));
    println!("moment(25, 0) on {} panels: {m0:.15}", comp.panels());

    let adaptive = 2.0 * adaptive_integrate(|t| sigma(t, s), 0.0, radius, 1e-14)?;
    println!("adaptive:                     {adaptive:.15}");
    Ok(())
}
