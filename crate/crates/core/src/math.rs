//! Small numerical helpers: float shims usable without `std`, adaptive
//! quadrature, high-order cumulative integration, and a least-squares line fit.

/// `|x|`.
#[inline]
pub fn abs(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.abs()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::fabs(x)
    }
}

/// `√x`.
#[inline]
pub fn sqrt(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.sqrt()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::sqrt(x)
    }
}

/// `eˣ`.
#[inline]
pub fn exp(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.exp()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::exp(x)
    }
}

/// Natural logarithm.
#[inline]
pub fn ln(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.ln()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::log(x)
    }
}

/// `x^y` for real `y`.
#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.powf(y)
    }
    #[cfg(not(feature = "std"))]
    {
        libm::pow(x, y)
    }
}

/// Nearest integer, ties away from zero.
#[inline]
pub fn round(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.round()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::round(x)
    }
}

/// Largest integer ≤ x.
#[inline]
pub fn floor(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.floor()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::floor(x)
    }
}

/// Smallest integer ≥ x.
#[inline]
pub fn ceil(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.ceil()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::ceil(x)
    }
}

/// Error function (always via `libm`; `std` does not provide one).
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// `|base|^exponent · sign(base)` — the odd power that appears in the
/// defocusing nonlinearity. Uses plain multiplication when the exponent is a
/// small nonnegative integer, which covers the cubic case p = 3 on the hot
/// path.
#[inline]
pub fn signed_pow(base: f64, exponent: f64) -> f64 {
    let n = exponent as i32;
    if (n as f64) == exponent && (0..=8).contains(&n) {
        let mut m = base;
        let a = abs(base);
        for _ in 0..n {
            m *= a;
        }
        m
    } else {
        powf(abs(base), exponent) * base
    }
}

/// `|base|^exponent` with the same integer fast path as [`signed_pow`].
#[inline]
pub fn abs_pow(base: f64, exponent: f64) -> f64 {
    let n = exponent as i32;
    if (n as f64) == exponent && (0..=8).contains(&n) {
        let a = abs(base);
        let mut m = 1.0;
        for _ in 0..n {
            m *= a;
        }
        m
    } else {
        powf(abs(base), exponent)
    }
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || abs(delta) <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol`. The interval is pre-split into eight panels so a bump hiding
/// between the three starting nodes cannot fake early convergence; recursion
/// is capped at 48 bisection levels per panel.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    const PANELS: usize = 8;
    let h = (b - a) / PANELS as f64;
    let mut total = 0.0;
    for k in 0..PANELS {
        let pa = a + k as f64 * h;
        let pb = if k + 1 == PANELS { b } else { pa + h };
        let fa = f(pa);
        let fb = f(pb);
        let m = 0.5 * (pa + pb);
        let fm = f(m);
        let whole = simpson(fa, fm, fb, pb - pa);
        total += adaptive_step(f, pa, pb, fa, fm, fb, whole, tol / PANELS as f64, 48);
    }
    total
}

/// Composite trapezoid sum of uniformly spaced samples.
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let mut sum = 0.5 * (values[0] + values[n - 1]);
            for v in &values[1..n - 1] {
                sum += v;
            }
            sum * dx
        }
    }
}

/// Trapezoid integral of uniform samples (at x = i·dx) clipped to [x1, x2],
/// with linear interpolation inside partial end cells and zero outside the
/// sampled range. Splitting a window anywhere and summing the parts
/// reproduces the whole exactly.
pub fn clipped_trapezoid(values: &[f64], dx: f64, x1: f64, x2: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let hi = (n - 1) as f64;
    let a = (x1 / dx).clamp(0.0, hi);
    let b = (x2 / dx).clamp(0.0, hi);
    if b <= a {
        return 0.0;
    }
    let at = |x: f64| -> f64 {
        let j = (floor(x) as usize).min(n - 2);
        let f = x - j as f64;
        values[j] * (1.0 - f) + values[j + 1] * f
    };
    let i1 = ceil(a) as usize;
    let i2 = floor(b) as usize;
    if (i1 as f64) > b {
        return 0.5 * (at(a) + at(b)) * (b - a) * dx;
    }
    let mut sum = 0.0;
    if (i1 as f64) > a {
        sum += 0.5 * (at(a) + values[i1]) * (i1 as f64 - a) * dx;
    }
    if i2 > i1 {
        sum += trapezoid(&values[i1..=i2], dx);
    }
    if b > i2 as f64 {
        sum += 0.5 * (values[i2] + at(b)) * (b - i2 as f64) * dx;
    }
    sum
}

/// Linear interpolation of uniform samples (at x = i·dx); zero outside.
pub fn sample_linear(values: &[f64], dx: f64, x: f64) -> f64 {
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    let pos = x / dx;
    if pos < 0.0 || pos > (n - 1) as f64 {
        return 0.0;
    }
    let j = (floor(pos) as usize).min(n.saturating_sub(2));
    let f = pos - j as f64;
    if n == 1 {
        return values[0];
    }
    values[j] * (1.0 - f) + values[j + 1] * f
}

/// Cumulative integral of uniformly spaced samples, 4th-order accurate.
///
/// Each cell is integrated with the cubic through its four nearest samples;
/// the two boundary cells use the one-sided cubic. Output has the same length
/// as the input with `out[0] = 0`.
pub fn cumulative_integral(values: &[f64], dx: f64) -> alloc::vec::Vec<f64> {
    let n = values.len();
    let mut out = alloc::vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        // Too few samples for cubic cells; fall back to trapezoid.
        for i in 1..n {
            out[i] = out[i - 1] + 0.5 * dx * (values[i - 1] + values[i]);
        }
        return out;
    }
    for i in 0..n - 1 {
        let cell = if i == 0 {
            dx / 24.0 * (9.0 * values[0] + 19.0 * values[1] - 5.0 * values[2] + values[3])
        } else if i == n - 2 {
            dx / 24.0
                * (9.0 * values[n - 1] + 19.0 * values[n - 2] - 5.0 * values[n - 3]
                    + values[n - 4])
        } else {
            dx / 24.0
                * (-values[i - 1] + 13.0 * values[i] + 13.0 * values[i + 1] - values[i + 2])
        };
        out[i + 1] = out[i] + cell;
    }
    out
}

/// Least-squares straight line `y ≈ slope·x + intercept`.
///
/// Returns `None` for fewer than two points or a degenerate abscissa spread.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}
