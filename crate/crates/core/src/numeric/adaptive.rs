//! Globally adaptive Gauss–Kronrod (7/15) integration over finite panels.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

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
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod estimate and |K15 − G7| on [a, b].
pub fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Settings for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            max_panels: 4000,
        }
    }
}

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

/// Integrates `f` over the union of consecutive panels `[b_i, b_{i+1}]`.
///
/// The panel with the largest error is bisected until the summed error is
/// below `max(abs_tol, rel_tol·|I|)`. Breakpoints let callers place kinks
/// on panel boundaries where Gauss–Kronrod never samples them.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    breakpoints: &[f64],
    opts: AdaptiveOptions,
) -> Result<Quadrature> {
    let mut heap = BinaryHeap::new();
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            let (value, err) = gk15(&f, w[0], w[1]);
            heap.push(Panel {
                a: w[0],
                b: w[1],
                value,
                err,
            });
        }
    }
    let total = |h: &BinaryHeap<Panel>| -> (f64, f64) {
        let mut v = 0.0;
        let mut e = 0.0;
        for p in h.iter() {
            v += p.value;
            e += p.err;
        }
        (v, e)
    };
    let (mut value, mut err) = total(&heap);
    let mut panels = heap.len();
    while err > opts.abs_tol.max(opts.rel_tol * value.abs()) {
        if panels >= opts.max_panels {
            return Err(Error::Quadrature {
                tol: opts.rel_tol,
                estimate: err / value.abs().max(f64::MIN_POSITIVE),
            });
        }
        let worst = heap.pop().expect("nonempty panel heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in f64; accept it as is.
            heap.push(Panel { err: 0.0, ..worst });
        } else {
            for (a, b) in [(worst.a, mid), (mid, worst.b)] {
                let (v, e) = gk15(&f, a, b);
                heap.push(Panel {
                    a,
                    b,
                    value: v,
                    err: e,
                });
            }
            panels += 1;
        }
        // Re-sum from scratch so the running totals never drift.
        let t = total(&heap);
        value = t.0;
        err = t.1;
    }
    let mut parts: Vec<Panel> = heap.into_vec();
    parts.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = parts.iter().map(|p| p.value).sum();
    Ok(Quadrature { value, error: err })
}
