//! Lobachevsky function and the regular ideal octahedron volume.

use core::f64::consts::PI;

/// `ζ(2n)` for `n ≥ 1`.
fn zeta_even(n: u32) -> f64 {
    if n == 1 {
        return PI * PI / 6.0;
    }
    let s = 2 * n as i32;
    const N: u32 = 64;
    let mut acc = 0.0;
    for k in (1..=N).rev() {
        acc += libm::pow(k as f64, -(s as f64));
    }
    // Euler-Maclaurin tail beyond N
    let nf = N as f64;
    let sf = s as f64;
    acc += libm::pow(nf, 1.0 - sf) / (sf - 1.0) - 0.5 * libm::pow(nf, -sf) + sf / 12.0 * libm::pow(nf, -sf - 1.0);
    acc
}

/// Lobachevsky function `Λ(θ) = −∫₀^θ log|2 sin t| dt`.
///
/// Uses the expansion of `log(sin t / t)` in even zeta values, valid and fast
/// for `|θ| ≤ π/2`; other arguments are reduced by oddness and period `π`.
pub fn lobachevsky(theta: f64) -> f64 {
    let mut x = theta - PI * libm::floor(theta / PI);
    // now x in [0, π); Λ(π − x) = −Λ(x)
    let mut sign = 1.0;
    if x > PI / 2.0 {
        x = PI - x;
        sign = -1.0;
    }
    if x == 0.0 {
        return 0.0;
    }
    let mut sum = x - x * libm::log(2.0 * x);
    let ratio = (x / PI) * (x / PI);
    let mut pow = x * ratio;
    for n in 1..200u32 {
        let term = zeta_even(n) * pow / (n as f64 * (2 * n + 1) as f64);
        sum += term;
        if term < 1e-18 * libm::fabs(sum) {
            break;
        }
        pow *= ratio;
    }
    sign * sum
}

/// Volume of the regular ideal hyperbolic octahedron, `8·Λ(π/4)`.
pub fn v8() -> f64 {
    8.0 * lobachevsky(PI / 4.0)
}

/// Volume of the regular ideal hyperbolic tetrahedron, `3·Λ(π/3)`.
pub fn v3() -> f64 {
    3.0 * lobachevsky(PI / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    // 4 × Catalan's constant
    const FOUR_CATALAN: f64 = 3.663_862_376_708_876;

    #[test]
    fn octahedron_volume() {
        assert!(libm::fabs(v8() - FOUR_CATALAN) < 1e-13, "{}", v8());
        assert!(libm::fabs(v8() - 3.66) < 0.01);
    }

    #[test]
    fn tetrahedron_volume() {
        assert!(libm::fabs(v3() - 1.014_941_606_409_653_6) < 1e-13, "{}", v3());
    }

    #[test]
    fn lobachevsky_examples() {
        // reference values of Cl₂(2θ)/2
        for &(theta, want) in &[
            (0.3, 0.454_750_398_208_409),
            (0.7, 0.483_716_006_841_389),
            (1.2, 0.248_399_651_018_478),
            (1.5, 0.049_013_104_695_650_7),
        ] {
            assert!(libm::fabs(lobachevsky(theta) - want) < 1e-13, "θ={theta} {}", lobachevsky(theta));
        }
    }

    #[test]
    fn lobachevsky_symmetries() {
        for &x in &[0.1, 0.5, 1.0, 1.4] {
            assert!(libm::fabs(lobachevsky(x + PI) - lobachevsky(x)) < 1e-14);
            assert!(libm::fabs(lobachevsky(-x) + lobachevsky(x)) < 1e-14);
        }
        assert!(libm::fabs(lobachevsky(PI / 2.0)) < 1e-14);
    }
}
