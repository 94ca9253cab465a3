//! Why large x sqrt(s) needs extended precision: the double-precision matrix
//! loses its smallest eigenvalue while MPFR at the suggested precision does not.

use ftgap::fredholm::{nystrom_logdet, KernelSpec};
use ftgap::precise::{bits_for, interval_log_det, interval_nodes};
use rug::Float;

fn main() -> ftgap::Result<()> {
    let s = 100.0;
    for x in [2.0, 4.0, 6.0] {
        let bits = bits_for(x, s, 1e-20);
        let m = interval_nodes(x, s, bits);
        let mp = interval_log_det(&Float::with_val(bits, x), &Float::with_val(bits, s), m, bits)?;
        let double = match nystrom_logdet(&KernelSpec::ft_interval(x, s, 32), 240) {
            Ok(r) => format!("{:.12}", r.log_det),
            Err(e) => format!("fails: {e}"),
        };
        println!("x = {x}: {bits} bits, m = {m}: log D = {:.20}  (smallest pivot 2^{:.0})", mp.log_det, mp.min_pivot_log2);
        println!("          double precision: {double}");
    }
    Ok(())
}
