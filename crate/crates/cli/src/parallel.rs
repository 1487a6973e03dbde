//! Multi-threaded driver for the back-projection reduction tree.
//!
//! The core library sums view blocks pairwise in a fixed tree. Here the two
//! halves of every node run under `rayon::join`, so the floating-point
//! result is identical to the sequential one for any thread count.

use oqf_core::ct::{merge, ImageGrid, PartialImage, Reconstructor};
use rayon::ThreadPoolBuilder;

use crate::{CliError, CliResult};

fn reduce(rec: &Reconstructor<'_>, lo: usize, hi: usize) -> oqf_core::Result<PartialImage> {
    if hi - lo == 1 {
        return rec.backproject_block(lo);
    }
    let mid = Reconstructor::split(lo, hi);
    let (a, b) = rayon::join(|| reduce(rec, lo, mid), || reduce(rec, mid, hi));
    Ok(merge(a?, b?))
}

/// Runs the reconstruction on `threads` workers (all cores when `None`).
/// Returns the image and the largest relative imaginary part seen.
pub fn reconstruct(rec: &Reconstructor<'_>, threads: Option<usize>) -> CliResult<(ImageGrid, f64)> {
    if threads == Some(0) {
        return Err(CliError::Validation("--threads must be at least 1".into()));
    }
    let pool = ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Numerical(format!("thread pool: {e}")))?;
    let total = pool.install(|| reduce(rec, 0, rec.block_count()))?;
    let imag = total.max_imag_ratio;
    Ok((rec.finish(total), imag))
}
