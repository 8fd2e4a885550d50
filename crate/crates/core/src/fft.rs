//! Unnormalized 3-D complex FFTs over row-major `n^3` buffers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

type PlanCache = Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)>;

fn plans() -> &'static PlanCache {
    static PLANS: OnceLock<PlanCache> = OnceLock::new();
    PLANS.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())))
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let forward = matches!(direction, FftDirection::Forward);
    let mut guard = plans().lock().expect("fft plan cache poisoned");
    let (planner, cache) = &mut *guard;
    cache
        .entry((n, forward))
        .or_insert_with(|| planner.plan_fft(n, direction))
        .clone()
}

/// In-place 3-D transform, `sum_x data[x] e^{∓ 2πi k·x/n}` with no scaling.
pub fn fft3(data: &mut [Complex64], n: usize, direction: FftDirection) {
    assert_eq!(data.len(), n * n * n, "fft3 buffer has wrong length");
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];

    // last axis: contiguous rows
    fft.process_with_scratch(data, &mut scratch);

    // middle axis: gather columns of each slab
    let mut lines = vec![Complex64::default(); n * n];
    for i0 in 0..n {
        let slab = &mut data[i0 * n * n..(i0 + 1) * n * n];
        for i2 in 0..n {
            for i1 in 0..n {
                lines[i2 * n + i1] = slab[i1 * n + i2];
            }
        }
        fft.process_with_scratch(&mut lines, &mut scratch);
        for i2 in 0..n {
            for i1 in 0..n {
                slab[i1 * n + i2] = lines[i2 * n + i1];
            }
        }
    }

    // first axis: one plane of lines per i1
    for i1 in 0..n {
        for i2 in 0..n {
            for i0 in 0..n {
                lines[i2 * n + i0] = data[(i0 * n + i1) * n + i2];
            }
        }
        fft.process_with_scratch(&mut lines, &mut scratch);
        for i2 in 0..n {
            for i0 in 0..n {
                data[(i0 * n + i1) * n + i2] = lines[i2 * n + i0];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_dft_on_small_cube() {
        let n = 8;
        let input: Vec<Complex64> = (0..n * n * n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut fast = input.clone();
        fft3(&mut fast, n, FftDirection::Forward);

        let tau = 2.0 * std::f64::consts::PI / n as f64;
        for &(k0, k1, k2) in &[(0, 0, 0), (1, 2, 3), (7, 0, 5), (4, 4, 4)] {
            let mut acc = Complex64::default();
            for x0 in 0..n {
                for x1 in 0..n {
                    for x2 in 0..n {
                        let phase = -tau * ((k0 * x0 + k1 * x1 + k2 * x2) as f64);
                        acc += input[(x0 * n + x1) * n + x2] * Complex64::from_polar(1.0, phase);
                    }
                }
            }
            let got = fast[(k0 * n + k1) * n + k2];
            assert!((got - acc).norm() < 1e-10, "{got} vs {acc}");
        }
    }
}
