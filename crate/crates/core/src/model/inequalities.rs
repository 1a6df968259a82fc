//! Elementary power inequalities used to control `|a + b|^k` for non-integer `k`.
//!
//! Each function returns `(lhs, rhs)` so callers can check `lhs <= rhs` with their own slack.

/// `||a+b|^k - |a|^k|` against `3^k (|a|^{k-p} + |b|^{k-p}) |b|^p`, `p = min(1, k)`.
pub fn power_difference(a: f64, b: f64, k: f64) -> (f64, f64) {
    let p = k.min(1.0);
    let lhs = ((a + b).abs().powf(k) - a.abs().powf(k)).abs();
    (lhs, bound(a, b, k, p))
}

/// Second-order version with the linear term removed, `p = min(2, k)`.
pub fn power_taylor_remainder(a: f64, b: f64, k: f64) -> (f64, f64) {
    let p = k.min(2.0);
    let linear = if a == 0.0 {
        0.0
    } else {
        k * a.abs().powf(k - 1.0) * b * a.signum()
    };
    let lhs = ((a + b).abs().powf(k) - a.abs().powf(k) - linear).abs();
    (lhs, bound(a, b, k, p))
}

fn bound(a: f64, b: f64, k: f64, p: f64) -> f64 {
    // 0^0 = 1 is the intended reading when k = p.
    3f64.powf(k) * (a.abs().powf(k - p) + b.abs().powf(k - p)) * b.abs().powf(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn holds((lhs, rhs): (f64, f64)) -> bool {
        lhs <= rhs * (1.0 + 1e-12) + 1e-300
    }

    #[test]
    fn edge_cases() {
        assert!(holds(power_difference(0.0, 0.0, 0.5)));
        assert!(holds(power_difference(1.0, -1.0, 3.0)));
        assert!(holds(power_taylor_remainder(0.0, 2.0, 0.3)));
        assert!(holds(power_taylor_remainder(-1.0, 1e-8, 3.0)));
    }

    #[test]
    fn second_inequality_breaks_below_one() {
        // |b| >> |a|: the linear term k|a|^{k-1}|b| outgrows the |b|^k bound
        let (lhs, rhs) = power_taylor_remainder(1.0, -36.0, 0.5);
        assert!(lhs > rhs);
        let (lhs, rhs) = power_taylor_remainder(0.786, -31.83, 0.3);
        assert!(lhs > rhs);
    }

    proptest! {
        #[test]
        fn first_inequality(a in -50.0..50.0f64, b in -50.0..50.0f64,
                            k in prop::sample::select(vec![0.3, 0.5, 1.0, 2.0, 3.0])) {
            prop_assert!(holds(power_difference(a, b, k)));
        }

        #[test]
        fn second_inequality(a in -50.0..50.0f64, b in -50.0..50.0f64,
                             k in prop::sample::select(vec![1.0, 2.0, 3.0])) {
            prop_assert!(holds(power_taylor_remainder(a, b, k)));
        }
    }
}
