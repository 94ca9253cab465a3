//! The leading coefficient C(l) of log D / (s x^2) across the critical curve
//! l = 1: C^2 but not C^3.

use ftgap::asymptotics::coeff_c_piecewise;
use ftgap::validation::phase_transition_witness;

fn main() -> ftgap::Result<()> {
    for l in [0.25, 0.5, 0.75, 0.9, 1.0, 1.1, 1.5, 2.0, 4.0] {
        println!("C({l:<4}) = {:+.12}", coeff_c_piecewise(l)?);
    }
    let w = phase_transition_witness()?;
    println!("jumps at l = 1: value {:.1e}, first {:.1e}, second {:.1e}, third {:.8}", w.value_gap, w.first_gap, w.second_gap, w.third_jump);
    Ok(())
}
