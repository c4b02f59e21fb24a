use eps_core::mc::BlockExecutor;
use rayon::prelude::*;

/// Runs Monte Carlo blocks on the rayon pool; block order is preserved so
/// results match [`eps_core::mc::Sequential`] bit for bit.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl BlockExecutor for Rayon {
    fn map_blocks(&self, count: u64, block: &(dyn Fn(u64) -> Vec<f64> + Sync)) -> Vec<Vec<f64>> {
        (0..count).into_par_iter().map(block).collect()
    }
}
