//! The Fermi weight sigma(t; s) and the functionals built from it.

use ftgap::fermi::FermiWeight;

fn main() -> ftgap::Result<()> {
    println!("{:>6} {:>14} {:>14} {:>14} {:>12}", "s", "moment0", "moment2", "c0", "L(s)");
    for s in [-10.0, -2.0, 0.0, 4.0, 25.0, 100.0] {
        let w = FermiWeight::with_default_eps(s)?;
        let l = if s > 0.0 { format!("{:12.8}", w.capital_l()?) } else { "-".into() };
        println!("{s:>6} {:>14.10} {:>14.10} {:>14.10} {l:>12}", w.moment(0)?, w.moment(2)?, w.c0()?);
    }
    // one-gap endpoint at s = 100 for a few gap sizes
    let w = FermiWeight::with_default_eps(100.0)?;
    for x in [2.0, 4.0, 6.0] {
        println!("lambda0(x = {x}, s = 100) = {:.12}", w.lambda0(x)?);
    }
    Ok(())
}
