//! Fixed-step integration and the decaying radial tail `r^{-nu} K_nu(r)`, `nu = (n-2)/2`.

/// One classical fourth-order Runge-Kutta step for a planar system.
pub fn rk4_step(f: impl Fn(f64, [f64; 2]) -> [f64; 2], t: f64, y: [f64; 2], h: f64) -> [f64; 2] {
    let add = |y: [f64; 2], k: [f64; 2], s: f64| [y[0] + s * k[0], y[1] + s * k[1]];
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, add(y, k1, 0.5 * h));
    let k3 = f(t + 0.5 * h, add(y, k2, 0.5 * h));
    let k4 = f(t + h, add(y, k3, h));
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Substeps per grid interval starting at `t`; the `1/t` coefficients near the origin
/// would otherwise cost the scheme its order.
pub fn substeps_at(t: f64) -> usize {
    if t < 0.25 {
        64
    } else if t < 1.0 {
        8
    } else {
        1
    }
}

/// Advances one grid interval `[t, t + h]` with `substeps_at(t)` equal RK4 steps.
///
/// On the first interval `series(delta)` supplies the state at `t = delta = h / substeps`, so the
/// singular point itself is never evaluated.
pub fn advance(
    f: impl Fn(f64, [f64; 2]) -> [f64; 2],
    t: f64,
    y: [f64; 2],
    h: f64,
    series: impl Fn(f64) -> [f64; 2],
) -> [f64; 2] {
    let steps = substeps_at(t);
    let hs = h / steps as f64;
    let (mut y, first) = if t == 0.0 { (series(hs), 1) } else { (y, 0) };
    for j in first..steps {
        y = rk4_step(&f, t + j as f64 * hs, y, hs);
    }
    y
}

/// Integrates from node `to` back down to node `from`, starting at `y_end`; returns the states at nodes `from..=to` in increasing order.
///
/// Decaying solutions are the dominant ones in this direction, so the tail stays clean.
pub fn integrate_inward(
    f: impl Fn(f64, [f64; 2]) -> [f64; 2],
    node: impl Fn(usize) -> f64,
    from: usize,
    to: usize,
    y_end: [f64; 2],
) -> Vec<[f64; 2]> {
    let mut out = vec![y_end; to - from + 1];
    let mut y = y_end;
    for i in (from..to).rev() {
        let (t1, t0) = (node(i + 1), node(i));
        let steps = substeps_at(t0);
        let hs = (t0 - t1) / steps as f64;
        for j in 0..steps {
            y = rk4_step(&f, t1 + j as f64 * hs, y, hs);
        }
        out[i - from] = y;
    }
    out
}

/// Inward solution on nodes `switch..=last` whose first component equals `target` at `switch`.
///
/// `seed(scale)` is the state at `last`; the scale is corrected multiplicatively until the match
/// holds to rounding, which takes a few passes when the equation is weakly nonlinear there.
pub fn match_inward_tail(
    f: impl Fn(f64, [f64; 2]) -> [f64; 2],
    node: impl Fn(usize) -> f64,
    switch: usize,
    last: usize,
    target: f64,
    seed: impl Fn(f64) -> [f64; 2],
) -> Vec<[f64; 2]> {
    let mut scale = target;
    let mut tail = integrate_inward(&f, &node, switch, last, seed(scale));
    for _ in 0..8 {
        let ratio = target / tail[0][0];
        if !ratio.is_finite() || (ratio - 1.0).abs() < 1e-15 {
            break;
        }
        scale *= ratio;
        tail = integrate_inward(&f, &node, switch, last, seed(scale));
    }
    tail
}

/// `e^{r} sqrt(2r/pi) K_nu(r)` from the large-argument expansion.
///
/// The series terminates for half-integer `nu`; otherwise it is truncated at its smallest term.
fn scaled_bessel_k(nu: f64, r: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..60 {
        let jf = j as f64;
        let next = term * (mu - (2.0 * jf - 1.0).powi(2)) / (jf * 8.0 * r);
        if next == 0.0 || next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
    }
    sum
}

/// Ratio `f(r) / f(r0)` and `f'(r) / f(r0)` for `f(r) = r^{-nu} K_nu(r)` in dimension `n`.
pub fn radial_tail(n: usize, r0: f64, r: f64) -> (f64, f64) {
    let nu = (n as f64 - 2.0) / 2.0;
    let base = scaled_bessel_k(nu, r0);
    let decay = (-(r - r0)).exp() * (r0 / r).powf(nu + 0.5);
    let value = decay * scaled_bessel_k(nu, r) / base;
    // (r^{-nu} K_nu)' = -r^{-nu} K_{nu+1}
    let slope = -decay * scaled_bessel_k(nu + 1.0, r) / base;
    (value, slope)
}
