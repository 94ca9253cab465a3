//! Residuals of the two PDEs satisfied by log D at a few points, at step h and h/2.

use ftgap::validation::{Stencil, DEFAULT_STEP, PDE_POINTS};

fn main() -> ftgap::Result<()> {
    println!("{:>5} {:>5} {:>7} {:>12} {:>12} {:>12} {:>12}", "x", "s", "h", "b resid", "b rel", "q resid", "q rel");
    for &(x, s) in &PDE_POINTS {
        for h in [DEFAULT_STEP, DEFAULT_STEP / 2.0] {
            let st = Stencil::compute(x, s, h)?;
            let b = st.residual_b()?;
            let q = st.residual_q()?;
            println!(
                "{x:>5} {s:>5} {h:>7} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e}",
                b.residual, b.relative, q.residual, q.relative
            );
        }
    }
    Ok(())
}
