//! Per-axis DFTs on row-major tensors.

use rustfft::FftPlanner;

use crate::par::Exec;
use crate::C64;

/// Apply the unnormalized DFT sum_t a_t exp(-+2 pi i s t / n) along one axis.
pub fn dft_axis(dims: &[usize], data: &mut [C64], axis: usize, forward: bool, exec: Exec) {
    let n = dims[axis];
    if n <= 1 {
        return;
    }
    let inner: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let mut planner = FftPlanner::<f64>::new();
    let fft = if forward {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    };
    let mut lanes: Vec<Vec<C64>> = (0..outer * inner)
        .map(|l| {
            let (o, i) = (l / inner, l % inner);
            (0..n).map(|t| data[o * n * inner + t * inner + i]).collect()
        })
        .collect();
    exec.for_each_mut(&mut lanes, |lane| fft.process(lane));
    for (l, lane) in lanes.into_iter().enumerate() {
        let (o, i) = (l / inner, l % inner);
        for (t, v) in lane.into_iter().enumerate() {
            data[o * n * inner + t * inner + i] = v;
        }
    }
}

pub fn dft_all(dims: &[usize], data: &mut [C64], forward: bool, exec: Exec) {
    for a in 0..dims.len() {
        dft_axis(dims, data, a, forward, exec);
    }
}
