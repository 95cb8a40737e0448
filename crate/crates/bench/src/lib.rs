//! Benchmark fixtures shared by the criterion benches in `benches/`.
//!
//! Run them with `cargo bench -p boostfw-bench`.

use boostfw::DenseVector;

/// A deterministic cost vector with mixed signs and no ties.
pub fn cost(n: usize, seed: u64) -> DenseVector {
    let entries = (0..n)
        .map(|i| {
            let t = (i as f64 + 1.0) * 0.618_033_988_749_895 + seed as f64 * 0.414_213_562_373_095;
            (t.fract() - 0.5) * (1.0 + (i % 7) as f64)
        })
        .collect();
    DenseVector::new(entries).expect("finite entries")
}
