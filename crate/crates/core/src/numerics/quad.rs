//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.
//!
//! The integrand may be vector valued (`[f64; N]`); all components share one
//! subdivision, and the error criterion applies to the largest component.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod abscissae (positive half); odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for [`integrate`]: the estimate is accepted once the global
/// error is below `max(abs, rel * |I|)`.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-13,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadEstimate<const N: usize> {
    pub value: [f64; N],
    pub error: f64,
    pub intervals: usize,
}

struct Piece<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: f64,
}

impl<const N: usize> PartialEq for Piece<N> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<const N: usize> Eq for Piece<N> {}
impl<const N: usize> PartialOrd for Piece<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Piece<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Piece<N>
where
    F: FnMut(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = [0.0; N];
    let mut gauss = [0.0; N];
    for k in 0..N {
        kronrod[k] = WGK[7] * fc[k];
        gauss[k] = WG[3] * fc[k];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for k in 0..N {
            let s = f1[k] + f2[k];
            kronrod[k] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * s;
            }
        }
    }
    let mut value = [0.0; N];
    let mut error: f64 = 0.0;
    for k in 0..N {
        value[k] = kronrod[k] * half;
        error = error.max(((kronrod[k] - gauss[k]) * half).abs());
    }
    Piece { a, b, value, error }
}

/// Integrates a vector-valued function over `[a, b]` (`a > b` flips the sign).
pub fn integrate_vec<const N: usize, F>(mut f: F, a: f64, b: f64, cfg: QuadConfig) -> Result<QuadEstimate<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    if a == b {
        return Ok(QuadEstimate {
            value: [0.0; N],
            error: 0.0,
            intervals: 0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("quadrature bounds must be finite"));
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let first = gk15(&mut f, lo, hi);
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);

    let tol = |total: &[f64; N]| {
        let mag = total.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        cfg.abs_tol.max(cfg.rel_tol * mag)
    };

    while total_err > tol(&total) {
        if heap.len() >= cfg.max_intervals {
            // Noisy integrands stall above tol; the final check below decides.
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in double precision.
            heap.push(worst);
            break;
        }
        let left = gk15(&mut f, worst.a, mid);
        let right = gk15(&mut f, mid, worst.b);
        for k in 0..N {
            total[k] += left.value[k] + right.value[k] - worst.value[k];
        }
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if total.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("quadrature integrand".into()));
        }
    }

    // Re-sum to shed the drift accumulated by incremental updates.
    let mut value = [0.0; N];
    let mut error = 0.0;
    let intervals = heap.len();
    for p in heap {
        for k in 0..N {
            value[k] += p.value[k];
        }
        error += p.error;
    }
    if error > tol(&value) * 10.0 {
        return Err(Error::no_convergence("adaptive quadrature", error));
    }
    for v in value.iter_mut() {
        *v *= sign;
    }
    Ok(QuadEstimate {
        value,
        error,
        intervals,
    })
}

/// Scalar convenience wrapper over [`integrate_vec`].
pub fn integrate<F>(mut f: F, a: f64, b: f64, cfg: QuadConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate_vec(|x| [f(x)], a, b, cfg).map(|e| e.value[0])
}
