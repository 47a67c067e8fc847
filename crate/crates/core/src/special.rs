//! Bessel functions of the first kind for integer order.

use std::f64::consts::PI;

const ASYMPTOTIC_THRESHOLD: f64 = 25.0;

/// Fills `out[p] = J_p(z)` for `p = 0..out.len()`, `z ≥ 0`.
pub fn bessel_j_all(z: f64, out: &mut [f64]) {
    let orders = out.len();
    if orders == 0 {
        return;
    }
    out.iter_mut().for_each(|v| *v = 0.0);
    if z == 0.0 {
        out[0] = 1.0;
        return;
    }
    if z < 1e-5 {
        // two-term power series
        let h = 0.5 * z;
        let mut lead = 1.0;
        for (p, v) in out.iter_mut().enumerate() {
            if p > 0 {
                lead *= h / p as f64;
            }
            *v = lead * (1.0 - h * h / (p as f64 + 1.0));
        }
        return;
    }
    if z >= ASYMPTOTIC_THRESHOLD && (orders as f64) < z {
        out[0] = hankel_asymptotic(0, z);
        if orders > 1 {
            out[1] = hankel_asymptotic(1, z);
        }
        // upward recurrence is stable while p < z
        for p in 2..orders {
            out[p] = 2.0 * (p - 1) as f64 / z * out[p - 1] - out[p - 2];
        }
        return;
    }
    miller(z, out);
}

pub fn bessel_j(p: usize, z: f64) -> f64 {
    let mut buf = vec![0.0; p + 1];
    bessel_j_all(z, &mut buf);
    buf[p]
}

/// Backward recurrence normalized by `J_0 + 2 Σ J_{2k} = 1`.
fn miller(z: f64, out: &mut [f64]) {
    let top = (out.len() as f64).max(z);
    let mut start = (top + 30.0 + (40.0 * top).sqrt()) as usize;
    start += start % 2;
    let (mut next, mut cur) = (0.0f64, 1e-30f64);
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / z * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{k-1}
        let order = k - 1;
        if order < out.len() {
            out[order] = cur;
        }
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            norm *= s;
            out.iter_mut().for_each(|v| *v *= s);
        }
    }
    norm += cur;
    out.iter_mut().for_each(|v| *v /= norm);
}

fn hankel_asymptotic(p: usize, z: f64) -> f64 {
    let mu = 4.0 * (p * p) as f64;
    let mut pp = 1.0;
    let mut qq = 0.0;
    let mut term = 1.0;
    let mut m = 1usize;
    loop {
        let odd = (2 * m - 1) as f64;
        term *= (mu - odd * odd) / (m as f64 * 8.0 * z);
        if m % 2 == 1 {
            // contributes to Q with sign (+, -, +, ...) on m = 1, 3, 5
            let sign = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
            qq += sign * term;
        } else {
            let sign = if (m / 2) % 2 == 1 { -1.0 } else { 1.0 };
            pp += sign * term;
        }
        if term.abs() < 1e-17 || m > 60 {
            break;
        }
        m += 1;
    }
    let chi = z - (0.5 * p as f64 + 0.25) * PI;
    (2.0 / (PI * z)).sqrt() * (pp * chi.cos() - qq * chi.sin())
}
