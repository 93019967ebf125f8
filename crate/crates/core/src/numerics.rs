//! Small numerical kernels: finite differences, quadrature, interpolation,
//! angle unwrapping and least-squares fits.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::{Error, Result, Vec3};

/// Finite-difference weights for the `m`-th derivative at `x0` from nodes `xs`
/// (Fornberg's recursion).
pub fn fd_weights(x0: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Stencil table for 4th-order derivatives of order `m` on a unit grid.
struct Stencils {
    /// centered weights, offsets -r..=r
    center: Vec<f64>,
    r: usize,
    /// boundary weights for rows 0..r, each over nodes 0..w
    left: Vec<Vec<f64>>,
    w: usize,
}

impl Stencils {
    fn new(m: usize) -> Self {
        let r = if m == 3 { 3 } else { 2 };
        let nodes: Vec<f64> = (0..=2 * r).map(|i| i as f64 - r as f64).collect();
        let center = fd_weights(0.0, &nodes, m);
        let w = m + 4;
        let bnodes: Vec<f64> = (0..w).map(|i| i as f64).collect();
        let left = (0..r).map(|i| fd_weights(i as f64, &bnodes, m)).collect();
        Self { center, r, left, w }
    }
}

/// Fourth-order finite-difference derivative of uniformly sampled data.
///
/// Centered stencils in the interior, one-sided stencils of the same order
/// near the ends.
pub fn fd_derivative(f: &[f64], h: f64, order: usize) -> Vec<f64> {
    let n = f.len();
    let st = Stencils::new(order);
    let scale = h.powi(order as i32);
    let mut out = vec![0.0; n];
    let r = st.r;
    for i in r..n.saturating_sub(r) {
        let mut acc = 0.0;
        for (k, w) in st.center.iter().enumerate() {
            acc += w * f[i + k - r];
        }
        out[i] = acc / scale;
    }
    let sign = if order % 2 == 1 { -1.0 } else { 1.0 };
    for i in 0..r.min(n) {
        let ws = &st.left[i];
        let mut lo = 0.0;
        let mut hi = 0.0;
        for (k, w) in ws.iter().enumerate().take(st.w.min(n)) {
            lo += w * f[k];
            hi += w * f[n - 1 - k];
        }
        out[i] = lo / scale;
        out[n - 1 - i] = sign * hi / scale;
    }
    out
}

/// Component-wise [`fd_derivative`] for vector samples.
pub fn fd_derivative_vec(v: &[Vec3], h: f64, order: usize) -> Vec<Vec3> {
    let xs: Vec<f64> = v.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = v.iter().map(|p| p.y).collect();
    let zs: Vec<f64> = v.iter().map(|p| p.z).collect();
    let dx = fd_derivative(&xs, h, order);
    let dy = fd_derivative(&ys, h, order);
    let dz = fd_derivative(&zs, h, order);
    (0..v.len())
        .map(|i| Vec3::new(dx[i], dy[i], dz[i]))
        .collect()
}

/// Cumulative trapezoid integral starting at zero.
pub fn cumtrapz(f: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in f.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Cumulative integral using endpoint derivatives (corrected trapezoid,
/// fourth order on smooth data).
pub fn cumhermite(f: &[f64], df: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 0..f.len().saturating_sub(1) {
        acc += 0.5 * h * (f[i] + f[i + 1]) + h * h / 12.0 * (df[i] - df[i + 1]);
        out.push(acc);
    }
    out
}

/// Composite trapezoid integral.
pub fn trapz(f: &[f64], h: f64) -> f64 {
    cumtrapz(f, h).last().copied().unwrap_or(0.0)
}

/// Cubic Hermite interpolation on `[0, 1]` with end values and slopes
/// already scaled by the interval width.
pub fn hermite(y0: f64, y1: f64, m0: f64, m1: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * m0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * m1
}

/// Derivative of [`hermite`] with respect to `s`.
pub fn hermite_ds(y0: f64, y1: f64, m0: f64, m1: f64, s: f64) -> f64 {
    let s2 = s * s;
    (6.0 * s2 - 6.0 * s) * y0
        + (3.0 * s2 - 4.0 * s + 1.0) * m0
        + (-6.0 * s2 + 6.0 * s) * y1
        + (3.0 * s2 - 2.0 * s) * m1
}

/// Monotone (Fritsch-Carlson) slopes for strictly increasing `y(x)`.
pub fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let d: Vec<f64> = (0..n - 1)
        .map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i]))
        .collect();
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for i in 1..n - 1 {
        if d[i - 1] * d[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let w1 = 2.0 * h1 + h0;
            let w2 = h1 + 2.0 * h0;
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    m
}

/// Locate `q` in sorted `x`; returns `(i, s)` with `x[i] <= q <= x[i+1]` and
/// `s` the fractional position. `hint` speeds up monotone query sequences.
pub fn locate(x: &[f64], q: f64, hint: usize) -> (usize, f64) {
    let n = x.len();
    let mut i = hint.min(n - 2);
    if !(x[i] <= q && q <= x[i + 1]) {
        i = match x.binary_search_by(|v| v.partial_cmp(&q).unwrap_or(core::cmp::Ordering::Less)) {
            Ok(k) => k.min(n - 2),
            Err(k) => k.saturating_sub(1).min(n - 2),
        };
    }
    let s = (q - x[i]) / (x[i + 1] - x[i]);
    (i, s)
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a % (2.0 * PI);
    if r <= -PI {
        r += 2.0 * PI;
    } else if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Remove 2pi jumps between consecutive samples in place.
pub fn unwrap(a: &mut [f64]) {
    let mut offset = 0.0;
    let mut prev = match a.first() {
        Some(&v) => v,
        None => return,
    };
    for v in a.iter_mut().skip(1) {
        let raw = *v;
        offset += wrap_angle(raw - prev) - (raw - prev);
        prev = raw;
        *v = raw + offset;
    }
}

/// Least-squares line `y = slope * x + intercept` with coefficient of
/// determination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - (slope * a + intercept);
            e * e
        })
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    LinearFit {
        slope,
        intercept,
        r_squared,
    }
}

/// Slope of `ln|y|` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    linear_fit(&lx, &ly).slope
}

/// Least-squares quadratic through `(x, y)`, evaluated at `xq`.
pub fn quadratic_fit_eval(x: &[f64], y: &[f64], xq: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    let c = x.iter().sum::<f64>() / n;
    let mut a = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for (xi, yi) in x.iter().zip(y) {
        let u = xi - c;
        let p = [1.0, u, u * u];
        for r in 0..3 {
            b[r] += p[r] * yi;
            for k in 0..3 {
                a[r][k] += p[r] * p[k];
            }
        }
    }
    let coef = solve3(a, b);
    xq.iter()
        .map(|q| {
            let u = q - c;
            coef[0] + coef[1] * u + coef[2] * u * u
        })
        .collect()
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        if d == 0.0 {
            continue;
        }
        for r in col + 1..3 {
            let f = a[r][col] / d;
            for k in col..3 {
                a[r][k] -= f * a[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let mut acc = b[r];
        for k in r + 1..3 {
            acc -= a[r][k] * x[k];
        }
        x[r] = if a[r][r] != 0.0 { acc / a[r][r] } else { 0.0 };
    }
    x
}

/// Root-mean-square of a sequence.
pub fn rms(v: impl IntoIterator<Item = f64>) -> f64 {
    let mut n = 0usize;
    let mut acc = 0.0;
    for x in v {
        acc += x * x;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        (acc / n as f64).sqrt()
    }
}

/// `n` logarithmically spaced values from `a` to `b` inclusive.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Bisection root of `f` on `[a, b]`; requires a sign change.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoConvergence("bisection bracket has no sign change"));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (b - a).abs() < tol {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Check that `t` is uniformly spaced; returns the spacing.
pub fn uniform_spacing(t: &[f64]) -> Result<f64> {
    if t.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: t.len(),
        });
    }
    let n = t.len() - 1;
    let h = (t[n] - t[0]) / n as f64;
    let mut dev: f64 = 0.0;
    for (i, v) in t.iter().enumerate() {
        dev = dev.max((v - (t[0] + h * i as f64)).abs());
    }
    if !(h > 0.0) || dev > 1e-9 * (t[n] - t[0]).abs().max(1.0) {
        return Err(Error::NonUniformGrid { deviation: dev });
    }
    Ok(h)
}
