//! Strided multi-axis FFT helpers on row-major arrays.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::C64;

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|p| {
        let mut p = p.borrow_mut();
        if let Some(f) = p.1.get(&(n, inverse)) {
            return f.clone();
        }
        let f = if inverse {
            p.0.plan_fft_inverse(n)
        } else {
            p.0.plan_fft_forward(n)
        };
        p.1.insert((n, inverse), f.clone());
        f
    })
}

/// Apply an unnormalised 1-D DFT along `axis`.
///
/// Each line is first multiplied elementwise by `pre` (if given), transformed,
/// then multiplied by `post`. Both factor vectors have the axis length.
pub(crate) fn fft_axis(
    data: &mut [C64],
    shape: &[usize],
    axis: usize,
    inverse: bool,
    pre: Option<&[f64]>,
    post: &[f64],
) {
    let n = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    debug_assert_eq!(outer * n * inner, data.len());
    let fft = plan(n, inverse);
    let mut buf = vec![C64::new(0.0, 0.0); n * inner];
    let mut scratch = vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for o in 0..outer {
        let block = &mut data[o * n * inner..(o + 1) * n * inner];
        for i in 0..inner {
            let line = &mut buf[i * n..(i + 1) * n];
            for t in 0..n {
                let v = block[t * inner + i];
                line[t] = match pre {
                    Some(p) => v * p[t],
                    None => v,
                };
            }
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for i in 0..inner {
            let line = &buf[i * n..(i + 1) * n];
            for t in 0..n {
                block[t * inner + i] = line[t] * post[t];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_dft_on_middle_axis() {
        let shape = [2, 4, 3];
        let data: Vec<C64> = (0..24)
            .map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut out = data.clone();
        let ones = vec![1.0; 4];
        fft_axis(&mut out, &shape, 1, false, None, &ones);
        for o in 0..2 {
            for i in 0..3 {
                for m in 0..4 {
                    let mut acc = C64::new(0.0, 0.0);
                    for t in 0..4 {
                        let ang = -2.0 * std::f64::consts::PI * (m * t) as f64 / 4.0;
                        acc += data[o * 12 + t * 3 + i] * C64::from_polar(1.0, ang);
                    }
                    assert!((acc - out[o * 12 + m * 3 + i]).norm() < 1e-12);
                }
            }
        }
    }
}
