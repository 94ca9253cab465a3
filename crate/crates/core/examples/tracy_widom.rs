//! The Hastings–McLeod solution and log F_TW from its Hamiltonian, checked
//! against the Airy-kernel determinant.

use ftgap::fredholm::{airy_ai, tw_log_cdf_via_airy};
use ftgap::painleve::{hm_solve, PII_DEFAULT_N, PII_DEFAULT_WINDOW};

fn main() -> ftgap::Result<()> {
    let table = hm_solve(PII_DEFAULT_WINDOW.0, PII_DEFAULT_WINDOW.1, PII_DEFAULT_N)?;
    println!("Newton iterations {}, max residual {:.2e}", table.newton_iterations, table.max_discrete_residual());
    println!("u(0) = {:.12}, u(6)/Ai(6) = {:.12}", table.u_at(0.0)?, table.u_at(6.0)? / airy_ai(6.0)?.0);
    println!("{:>5} {:>20} {:>20} {:>10}", "y", "log F (Hamiltonian)", "log F (Airy det)", "diff");
    for y in [-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0] {
        let (h, moment) = table.tw_log_cdf_routes(y)?;
        let airy = tw_log_cdf_via_airy(y, 120)?;
        println!("{y:>5} {h:>20.14} {airy:>20.14} {:>10.1e}  (moment route {:+.1e})", h - airy, moment - h);
    }
    Ok(())
}
