//! The sine-kernel determinant through the sigma form of Painlevé V, and its
//! large-gap asymptotics with the zeta'(-1) constant.

use ftgap::asymptotics::{sine_large_gap_asy, zeta_prime_const};
use ftgap::fredholm::{nystrom_logdet, KernelSpec};
use ftgap::painleve::{pv_sigma_solve, PV_DEFAULT_N, PV_DEFAULT_TAU_MAX};

fn main() -> ftgap::Result<()> {
    let pv = pv_sigma_solve(PV_DEFAULT_TAU_MAX, PV_DEFAULT_N)?;
    println!("zeta'(-1) = {:.15}", zeta_prime_const());
    println!("{:>4} {:>18} {:>18} {:>18}", "t", "sigma-PV", "Nystrom", "large-gap");
    for t in [0.5, 1.0, 2.0, 4.0, 8.0, 11.0] {
        let nys = nystrom_logdet(&KernelSpec::sine(t), 120)?.log_det;
        println!("{t:>4} {:>18.12} {nys:>18.12} {:>18.12}", pv.logdet_sine(t)?, sine_large_gap_asy(t)?);
    }
    let tau = pv.tau_max();
    println!("v({tau}) + {tau}^2 + 1/4 = {:.3e}", pv.v_at(tau)? + tau * tau + 0.25);
    Ok(())
}
