use std::time::Instant;

use lpverify::fft::fft3;
use rustfft::num_complex::Complex64;
use rustfft::FftDirection;

fn main() {
    for n in [64usize, 128] {
        let mut data = vec![Complex64::new(1.0, 0.5); n * n * n];
        fft3(&mut data, n, FftDirection::Forward);
        let reps = if n == 64 { 20 } else { 5 };
        let t = Instant::now();
        for _ in 0..reps {
            fft3(&mut data, n, FftDirection::Inverse);
        }
        println!(
            "n = {n}: {:.2} ms per 3-D transform",
            t.elapsed().as_secs_f64() * 1e3 / reps as f64
        );
    }
}
