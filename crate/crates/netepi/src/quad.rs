//! Adaptive Gauss-Kronrod quadrature on finite intervals.
//!
//! A 7-point Gauss rule embedded in a 15-point Kronrod rule gives a value
//! and an error estimate per interval; the interval with the largest
//! estimate is bisected until the summed estimate drops below the target.
//! The absolute difference |K15 - G7| is used as the per-interval estimate.
//! It overshoots the true Kronrod error by orders of magnitude on smooth
//! integrands, which buys headroom for the mildly singular densities that
//! show up here (Beta shapes below one).
//!
//! The vector variant integrates a whole slice-valued integrand at once
//! under a shared subdivision, refining on the worst component. It exists
//! for the order-statistic prefix sums, where one integrand evaluation
//! yields every component for the price of one.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Kronrod abscissae for the interval [-1,1], positive half, outermost
/// first; the 8th point is the center. Entries at odd indices are the
/// abscissae of the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss weights for the abscissae `XGK[1]`, `XGK[3]`, `XGK[5]` and the
/// center.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_INTERVALS: usize = 4000;

/// Integral value plus the summed per-interval error estimate.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
}

struct Seg {
    err: f64,
    a: f64,
    b: f64,
    val: f64,
}

impl PartialEq for Seg {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Seg {}
impl PartialOrd for Seg {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Seg {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// One Gauss-Kronrod pass over [a,b]: returns (K15 value, |K15 - G7|).
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        k += WGK[i] * pair;
        if i % 2 == 1 {
            g += WG[i / 2] * pair;
        }
    }
    (k * h, (k - g).abs() * h.abs())
}

/// Adaptive integral of `f` over [a,b] to absolute tolerance `abs_tol`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64) -> QuadResult {
    let (val, err) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Seg { err, a, b, val });
    let mut total_err = err;
    while total_err > abs_tol && heap.len() < MAX_INTERVALS {
        let worst = heap.pop().unwrap();
        if worst.err <= 0.0 {
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; cannot split further.
            heap.push(worst);
            break;
        }
        total_err -= worst.err;
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (v, e) = gk15(&mut f, lo, hi);
            total_err += e;
            heap.push(Seg {
                err: e,
                a: lo,
                b: hi,
                val: v,
            });
        }
    }
    QuadResult {
        value: heap.iter().map(|s| s.val).sum(),
        abs_error: total_err,
    }
}

struct SegV {
    err: f64,
    a: f64,
    b: f64,
    val: Vec<f64>,
}

impl PartialEq for SegV {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for SegV {}
impl PartialOrd for SegV {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for SegV {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// One vector Gauss-Kronrod pass; writes the K15 component values into
/// `val` and returns the largest per-component |K15 - G7|.
fn gk15_vec<F: FnMut(f64, &mut [f64])>(
    f: &mut F,
    a: f64,
    b: f64,
    val: &mut [f64],
    gauss: &mut [f64],
    scratch: &mut [f64],
) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    val.fill(0.0);
    gauss.fill(0.0);

    f(c, scratch);
    for (j, &s) in scratch.iter().enumerate() {
        val[j] += WGK[7] * s;
        gauss[j] += WG[3] * s;
    }
    for i in 0..7 {
        let dx = h * XGK[i];
        for x in [c - dx, c + dx] {
            f(x, scratch);
            for (j, &s) in scratch.iter().enumerate() {
                val[j] += WGK[i] * s;
                if i % 2 == 1 {
                    gauss[j] += WG[i / 2] * s;
                }
            }
        }
    }

    let mut worst = 0.0f64;
    for (v, g) in val.iter_mut().zip(gauss.iter()) {
        worst = worst.max((*v - *g).abs() * h.abs());
        *v *= h;
    }
    worst
}

/// Adaptive integral of a slice-valued integrand over [a,b]. `f(x, out)`
/// must fill all of `out`; the subdivision refines wherever the worst
/// component is least converged. Returns per-component integrals and the
/// summed worst-component error estimate.
pub fn integrate_vec<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    dim: usize,
    a: f64,
    b: f64,
    abs_tol: f64,
) -> (Vec<f64>, f64) {
    let mut gauss = vec![0.0; dim];
    let mut scratch = vec![0.0; dim];
    let mut val = vec![0.0; dim];
    let err = gk15_vec(&mut f, a, b, &mut val, &mut gauss, &mut scratch);

    let mut heap = BinaryHeap::new();
    heap.push(SegV { err, a, b, val });
    let mut total_err = err;
    while total_err > abs_tol && heap.len() < MAX_INTERVALS {
        let worst = heap.pop().unwrap();
        if worst.err <= 0.0 {
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        total_err -= worst.err;
        let mut right_val = worst.val;
        let mut left_val = vec![0.0; dim];
        let e1 = gk15_vec(&mut f, worst.a, mid, &mut left_val, &mut gauss, &mut scratch);
        let e2 = gk15_vec(&mut f, mid, worst.b, &mut right_val, &mut gauss, &mut scratch);
        total_err += e1 + e2;
        heap.push(SegV {
            err: e1,
            a: worst.a,
            b: mid,
            val: left_val,
        });
        heap.push(SegV {
            err: e2,
            a: mid,
            b: worst.b,
            val: right_val,
        });
    }

    let mut out = vec![0.0; dim];
    for seg in heap.iter() {
        for (o, v) in out.iter_mut().zip(&seg.val) {
            *o += v;
        }
    }
    (out, total_err)
}
