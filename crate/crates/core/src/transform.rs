//! Moments `∫₀¹ s^r e^{iγs} ds` and per-axis product expansions of basis modes.

use num_complex::Complex64 as C;

const SERIES_CUTOFF: f64 = 0.5;

pub(crate) fn e0(g: f64) -> C {
    if g.abs() < SERIES_CUTOFF {
        let ig = C::new(0.0, g);
        let mut term = C::new(1.0, 0.0);
        let mut sum = term;
        for n in 1..30 {
            term = term * ig / (n as f64 + 1.0);
            sum += term;
        }
        sum
    } else {
        let e = C::new(0.0, g).exp();
        (e - 1.0) / C::new(0.0, g)
    }
}

pub(crate) fn e1(g: f64) -> C {
    if g.abs() < SERIES_CUTOFF {
        // Σ (iγ)^n / (n! (n + 2))
        let ig = C::new(0.0, g);
        let mut pow = C::new(1.0, 0.0);
        let mut sum = C::new(0.5, 0.0);
        for n in 1..30 {
            pow = pow * ig / n as f64;
            sum += pow / (n as f64 + 2.0);
        }
        sum
    } else {
        let e = C::new(0.0, g).exp();
        e / C::new(0.0, g) + (e - 1.0) / (g * g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(r: i32, g: f64) -> C {
        let n = 200_000;
        let h = 1.0 / n as f64;
        (0..n)
            .map(|i| {
                let s = (i as f64 + 0.5) * h;
                C::new(0.0, g * s).exp() * s.powi(r) * h
            })
            .sum()
    }

    #[test]
    fn moments_match_midpoint_sums_across_the_series_cutoff() {
        for &g in &[0.0, 1e-9, 0.3, 0.49, 0.51, 2.0, -7.5, 40.0] {
            assert!((e0(g) - brute(0, g)).norm() < 1e-9, "e0({g})");
            assert!((e1(g) - brute(1, g)).norm() < 1e-9, "e1({g})");
        }
    }
}
