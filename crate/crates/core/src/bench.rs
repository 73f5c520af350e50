//! Wall-clock scaling of the analysis pipeline on solid cubes.

use std::time::Instant;

use crate::generator::{cuboid, GeneratorError};
use crate::homology::{assemble_report, AnalysisError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchSample {
    pub side: usize,
    pub voxels: usize,
    /// Fastest of the timed runs of [`assemble_report`], generation excluded.
    pub seconds: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Times the full analysis of a solid `k³` box for every `k` in `sides`.
pub fn bench_boxes(sides: &[usize], repeats: usize) -> Result<Vec<BenchSample>, BenchError> {
    let mut out = Vec::with_capacity(sides.len());
    for &k in sides {
        let fixture = cuboid(k, k, k)?;
        let mut best = f64::INFINITY;
        for _ in 0..repeats.max(1) {
            let start = Instant::now();
            let report = assemble_report(&fixture.volume)?;
            best = best.min(start.elapsed().as_secs_f64());
            std::hint::black_box(report);
        }
        out.push(BenchSample {
            side: k,
            voxels: fixture.volume.foreground_count(),
            seconds: best,
        });
    }
    Ok(out)
}
