//! log D(x, s) three ways: the weighted kernel on the line, the interval kernel,
//! and the extended-precision truth used for badly conditioned points.

use ftgap::fredholm::{gap_log_det, nystrom_logdet, KernelSpec};

fn main() -> ftgap::Result<()> {
    for &(x, s) in &[(0.5, 0.0), (2.0, 4.0), (4.0, 16.0), (6.0, 100.0)] {
        let truth = gap_log_det(x, s)?;
        print!("x = {x:<4} s = {s:<5} truth {:>22.15} ({:?}, refinement {:.1e})", truth.log_det, truth.arithmetic, truth.refinement_error);
        if x * s.sqrt() <= 20.0 {
            let w = nystrom_logdet(&KernelSpec::ft_weighted(x, s), 200)?.log_det;
            let i = nystrom_logdet(&KernelSpec::ft_interval(x, s, 32), 200)?.log_det;
            print!("  weighted - truth {:+.1e}  interval - truth {:+.1e}", w - truth.log_det, i - truth.log_det);
        }
        println!();
    }
    Ok(())
}
