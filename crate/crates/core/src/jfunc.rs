//! The J-function: mutual information between a bit and a consistent
//! Gaussian LLR `L ~ N(sigma^2/2, sigma^2)`.
//!
//! Forward evaluation uses the common two-piece fit (cubic polynomial below
//! `sigma = 1.6363`, exponential of a cubic above). As published the two
//! pieces do not meet (the exponential piece starts about 6.5e-4 lower) and
//! the cubic dips below zero near the origin. Here the pieces are joined by a
//! smoothstep blend on `[SWITCH - BLEND, SWITCH + BLEND]` and the cubic is
//! replaced by a quadratic through `(SMALL, J(SMALL))` below `SMALL`, which
//! makes `J` continuous and strictly increasing.
//!
//! The inverse is computed numerically from the forward function, so
//! `J(J^-1(I)) == I` up to rounding.

const A1: f64 = -0.0421061;
const B1: f64 = 0.209252;
const C1: f64 = -0.00640081;
const A2: f64 = 0.00181491;
const B2: f64 = -0.142675;
const C2: f64 = -0.0822054;
const D2: f64 = 0.0549608;

/// Switch point between the polynomial and exponential pieces.
const SWITCH: f64 = 1.6363;
/// Half-width of the blend between the pieces.
const BLEND: f64 = 0.25;
/// Below this, `J` is the quadratic `QUAD * sigma^2`.
const SMALL: f64 = 0.05;
/// `J(sigma) = 1` for `sigma >= SIGMA_MAX`; also the value of `J^-1(1)`.
pub const SIGMA_MAX: f64 = 10.0;

#[inline]
fn poly(s: f64) -> f64 {
    ((A1 * s + B1) * s + C1) * s
}

#[inline]
fn poly_deriv(s: f64) -> f64 {
    (3.0 * A1 * s + 2.0 * B1) * s + C1
}

#[inline]
fn expo(s: f64) -> f64 {
    ((A2 * s + B2) * s + C2) * s + D2
}

#[inline]
fn expo_deriv(s: f64) -> f64 {
    (3.0 * A2 * s + 2.0 * B2) * s + C2
}

#[inline]
fn tail(s: f64) -> f64 {
    1.0 - expo(s).exp()
}

#[inline]
fn tail_deriv(s: f64) -> f64 {
    -expo(s).exp() * expo_deriv(s)
}

/// Blend weight of the exponential piece and its derivative.
#[inline]
fn weight(s: f64) -> (f64, f64) {
    let t = (s - (SWITCH - BLEND)) / (2.0 * BLEND);
    (t * t * (3.0 - 2.0 * t), 6.0 * t * (1.0 - t) / (2.0 * BLEND))
}

struct Consts {
    quad: f64,
    top: f64,
}

fn consts() -> &'static Consts {
    static CONSTS: std::sync::OnceLock<Consts> = std::sync::OnceLock::new();
    CONSTS.get_or_init(|| Consts {
        quad: poly(SMALL) / (SMALL * SMALL),
        top: tail(SIGMA_MAX),
    })
}

/// `J(sigma)`; zero for `sigma <= 0`.
pub fn j(sigma: f64) -> f64 {
    let c = consts();
    if sigma <= 0.0 {
        0.0
    } else if sigma < SMALL {
        c.quad * sigma * sigma
    } else if sigma <= SWITCH - BLEND {
        poly(sigma)
    } else if sigma < SWITCH + BLEND {
        let (w, _) = weight(sigma);
        (1.0 - w) * poly(sigma) + w * tail(sigma)
    } else if sigma < SIGMA_MAX {
        tail(sigma)
    } else {
        1.0
    }
}

fn j_deriv(sigma: f64) -> f64 {
    let c = consts();
    if sigma <= 0.0 || sigma >= SIGMA_MAX {
        0.0
    } else if sigma < SMALL {
        2.0 * c.quad * sigma
    } else if sigma <= SWITCH - BLEND {
        poly_deriv(sigma)
    } else if sigma < SWITCH + BLEND {
        let (w, dw) = weight(sigma);
        (1.0 - w) * poly_deriv(sigma) + w * tail_deriv(sigma) + dw * (tail(sigma) - poly(sigma))
    } else {
        tail_deriv(sigma)
    }
}

/// Closed-form approximate inverse, used only as a starting point.
fn initial_guess(mi: f64) -> f64 {
    if mi <= 0.3646 {
        1.09542 * mi * mi + 0.214217 * mi + 2.33727 * mi.sqrt()
    } else {
        -0.706692 * (0.386013 * (1.0 - mi)).ln() + 1.75017 * mi
    }
}

/// `J^-1(mi)`, solved by bracketed Newton iteration on [`j`]. Values at or
/// above `J(SIGMA_MAX^-)` map to [`SIGMA_MAX`].
pub fn j_inv(mi: f64) -> f64 {
    if mi <= 0.0 {
        return 0.0;
    }
    if mi >= consts().top {
        return SIGMA_MAX;
    }
    let (mut lo, mut hi) = (0.0f64, SIGMA_MAX);
    let mut x = initial_guess(mi).clamp(1e-6, SIGMA_MAX - 1e-6);
    for _ in 0..100 {
        let f = j(x) - mi;
        if f == 0.0 {
            return x;
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = j_deriv(x);
        let mut next = if d > 0.0 { x - f / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * (1.0 + x) || hi - lo <= 1e-15 * (1.0 + x) {
            return next;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Gauss-Hermite nodes and weights for `int exp(-x^2) f(x) dx`, found by
    /// Newton iteration on the Hermite recurrence.
    fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
        let pim4 = std::f64::consts::PI.powf(-0.25);
        let mut out = vec![(0.0, 0.0); n];
        let m = n.div_ceil(2);
        let mut z = 0.0f64;
        for i in 0..m {
            z = match i {
                0 => {
                    (2.0 * n as f64 + 1.0).sqrt()
                        - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0)
                }
                1 => z - 1.14 * (n as f64).powf(0.426) / z,
                2 => 1.86 * z - 0.86 * out[0].0,
                3 => 1.91 * z - 0.91 * out[1].0,
                _ => 2.0 * z - out[i - 2].0,
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = z * (2.0 / (j as f64 + 1.0)).sqrt() * p2
                        - (j as f64 / (j as f64 + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * n as f64).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-14 {
                    break;
                }
            }
            let w = 2.0 / (pp * pp);
            out[i] = (z, w);
            out[n - 1 - i] = (-z, w);
        }
        out
    }

    /// `1 - E[log2(1 + exp(-L))]` with `L ~ N(s^2/2, s^2)`.
    fn j_exact(sigma: f64) -> f64 {
        let nodes = gauss_hermite(120);
        let mean = sigma * sigma / 2.0;
        let e: f64 = nodes
            .iter()
            .map(|&(x, w)| {
                let l = mean + std::f64::consts::SQRT_2 * sigma * x;
                w * (-l).exp().ln_1p() / std::f64::consts::LN_2
            })
            .sum();
        1.0 - e / std::f64::consts::PI.sqrt()
    }

    #[test]
    fn quadrature_oracle_is_sane() {
        let total: f64 = gauss_hermite(120).iter().map(|n| n.1).sum();
        assert!((total - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        // J(2) computed independently with 200-node quadrature in double precision
        assert!((j_exact(2.0) - 0.485_944_154).abs() < 1e-8);
    }

    #[test]
    fn fit_tracks_exact_integral() {
        let mut worst = 0.0f64;
        for i in 1..=400 {
            let s = i as f64 * 0.025;
            worst = worst.max((j(s) - j_exact(s)).abs());
        }
        assert!(worst < 1e-3, "max deviation {worst}");
        assert!((j(2.0) - j_exact(2.0)).abs() < 5e-4);
    }

    #[test]
    fn endpoints() {
        assert_eq!(j(0.0), 0.0);
        assert_eq!(j(SIGMA_MAX), 1.0);
        assert_eq!(j_inv(0.0), 0.0);
        assert_eq!(j_inv(1.0), SIGMA_MAX);
        assert!(1.0 - j(9.0) < 1e-4);
    }

    #[test]
    fn pieces_join_continuously() {
        for s in [SMALL, SWITCH - BLEND, SWITCH + BLEND] {
            assert!((j(s - 1e-12) - j(s + 1e-12)).abs() < 1e-9, "jump at {s}");
        }
    }

    #[test]
    fn strictly_increasing_on_grid() {
        let mut prev = j(0.0);
        for i in 1..=100_000 {
            let s = i as f64 * 1e-4;
            let v = j(s);
            assert!(v > prev, "J not increasing at {s}");
            prev = v;
        }
    }

    proptest! {
        #[test]
        fn inverse_roundtrip(s in 0.02f64..10.0) {
            let back = j_inv(j(s));
            prop_assert!((back - s).abs() < 1e-6, "sigma {} -> {}", s, back);
        }

        #[test]
        fn forward_of_inverse(mi in 0.0f64..0.99999) {
            prop_assert!((j(j_inv(mi)) - mi).abs() < 1e-12);
        }
    }
}
