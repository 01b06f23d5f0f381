//! Shared inputs for the benchmarks.

use superlevel::datagen::gen_noisy_circle;
use superlevel::kernels::{
    estimate_at_samples, fallback_bandwidth, KernelSpec, LabeledSample, Mode,
};

/// Noisy unit circle with its density estimates at the default bandwidth.
pub struct CircleInput {
    pub data: LabeledSample,
    pub kernel: KernelSpec,
    pub r: f64,
    pub values: Vec<Option<f64>>,
}

pub fn circle_input(n: usize, seed: u64) -> CircleInput {
    let data = LabeledSample::unlabeled(gen_noisy_circle(n, 0.1, seed)).expect("sample");
    let kernel = KernelSpec::standard(2).expect("kernel");
    let r = fallback_bandwidth(n, 2);
    let values = estimate_at_samples(&data, r, &kernel, Mode::Density).expect("estimates");
    CircleInput {
        data,
        kernel,
        r,
        values,
    }
}
