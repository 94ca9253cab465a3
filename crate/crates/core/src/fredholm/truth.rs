//! The gap determinant D(x, s) as used for "truth" throughout the crate.
//!
//! Well-conditioned points use the double-precision weighted kernel. Once
//! `x sqrt(s)` grows, det(I - K) underflows relative to its largest factor and
//! the extended-precision interval representation takes over.

use rug::Float;

use super::{nystrom_logdet, Arithmetic, DeterminantResult, Domain, KernelSpec};
use crate::error::{Error, Result};
use crate::fermi::DEFAULT_EPS;
use crate::precise::{bits_for, interval_log_det, with_escalation};

/// Largest x sqrt(s) handled in double precision under `Precision::Auto`.
const DOUBLE_LIMIT: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// Double precision when well conditioned, extended otherwise.
    Auto,
    Double,
    Bits(u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthOptions {
    pub nodes: usize,
    pub eps: f64,
    pub precision: Precision,
    /// Absolute accuracy wanted for log D; drives the extended precision.
    pub target: f64,
}

impl Default for TruthOptions {
    fn default() -> Self {
        Self { nodes: 240, eps: DEFAULT_EPS, precision: Precision::Auto, target: 1e-14 }
    }
}

impl TruthOptions {
    pub fn with_nodes(nodes: usize) -> Self {
        Self { nodes, ..Self::default() }
    }

    fn uses_double(&self, x: f64, s: f64) -> bool {
        match self.precision {
            Precision::Double => true,
            Precision::Bits(_) => false,
            Precision::Auto => x * s.max(0.0).sqrt() <= DOUBLE_LIMIT && self.target >= 1e-13,
        }
    }
}

/// log D(x, s) with default options.
pub fn gap_log_det(x: f64, s: f64) -> Result<DeterminantResult> {
    gap_log_det_with(x, s, &TruthOptions::default())
}

pub fn gap_log_det_with(x: f64, s: f64, opts: &TruthOptions) -> Result<DeterminantResult> {
    if !(x >= 0.0) || !x.is_finite() || !s.is_finite() {
        return Err(Error::invalid(format!("need finite x >= 0 and finite s, got x = {x}, s = {s}")));
    }
    if opts.uses_double(x, s) {
        let double = nystrom_logdet(&KernelSpec::ft_weighted(x, s).with_eps(opts.eps), opts.nodes);
        match double {
            Err(Error::Conditioning { .. } | Error::Sign { .. }) if opts.precision == Precision::Auto => {}
            other => return other,
        }
    }
    let a = x / std::f64::consts::PI;
    let domain = Domain::Interval { a: -a, b: a };
    if x == 0.0 {
        return Ok(DeterminantResult {
            log_det: 0.0,
            nodes_used: 0,
            refinement_error: 0.0,
            domain,
            arithmetic: Arithmetic::Extended { bits: 0 },
        });
    }
    let run = |m: usize, bits: u32| {
        interval_log_det(&Float::with_val(bits, x), &Float::with_val(bits, s), m, bits)
    };
    let fine = match opts.precision {
        Precision::Bits(bits) => run(opts.nodes, bits)?,
        _ => with_escalation(bits_for(x, s, opts.target), |b| run(opts.nodes, b))?,
    };
    // an under-resolved coarse solve only means the refinement estimate is unavailable
    let refinement_error = match run(opts.nodes / 2, fine.bits) {
        Ok(coarse) => (fine.log_det.clone() - coarse.log_det).abs().to_f64(),
        Err(_) => f64::INFINITY,
    };
    Ok(DeterminantResult {
        log_det: fine.log_det.to_f64(),
        nodes_used: fine.outer_nodes,
        refinement_error,
        domain,
        arithmetic: Arithmetic::Extended { bits: fine.bits },
    })
}
