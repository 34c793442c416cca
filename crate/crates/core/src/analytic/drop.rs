//! Probability that a relay discards an overheard measurement because its
//! next frame is full.

use statrs::function::gamma::ln_gamma;

/// Frame arrivals at a relay during one receive window.
///
/// With `xi = t_rx / t` integral, every sensor delivers `xi - 1` complete
/// frames plus one more with probability `p_outside` (the window start falls
/// outside that sensor's frame), so `Y = n (xi - 1) + Binomial(n, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowArrivals {
    pub n_sensors: u32,
    pub xi: u32,
    pub p_outside: f64,
}

impl WindowArrivals {
    /// `mu = n (xi - 1)`.
    pub fn guaranteed(&self) -> u32 {
        self.n_sensors * self.xi.saturating_sub(1)
    }

    pub fn max_frames(&self) -> u32 {
        self.guaranteed() + self.n_sensors
    }
}

fn ln_choose(n: u32, k: u32) -> f64 {
    ln_gamma(f64::from(n) + 1.0) - ln_gamma(f64::from(k) + 1.0) - ln_gamma(f64::from(n - k) + 1.0)
}

/// `C(n, k) p^k (1-p)^(n-k)`.
pub fn binomial_pmf(n: u32, k: u32, p: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    if p <= 0.0 {
        return f64::from(u8::from(k == 0));
    }
    if p >= 1.0 {
        return f64::from(u8::from(k == n));
    }
    if n <= 500 {
        let k_small = k.min(n - k);
        let mut choose = 1.0;
        for i in 0..k_small {
            choose = choose * f64::from(n - i) / f64::from(i + 1);
        }
        choose * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
    } else {
        (ln_choose(n, k) + f64::from(k) * p.ln() + f64::from(n - k) * (1.0 - p).ln()).exp()
    }
}

/// Drop probability with the window arrival count `Y` modelled exactly.
/// `theta` is the probability that the relay fails to receive a frame; `Z`
/// given `Y = y` is binomial with success probability `1 - theta`.
pub fn p_drop_exact(arrivals: WindowArrivals, theta: f64, capacity: u32) -> f64 {
    let mu = arrivals.guaranteed();
    let top = arrivals.max_frames();
    if capacity >= top {
        return 0.0;
    }
    let start = mu.max(capacity + 1);
    (start..=top)
        .map(|y| {
            let p_y = binomial_pmf(arrivals.n_sensors, y - mu, arrivals.p_outside);
            if p_y == 0.0 {
                return 0.0;
            }
            let inner: f64 = (capacity + 1..=y)
                .map(|z| (1.0 - f64::from(capacity) / f64::from(z)) * binomial_pmf(y, z, 1.0 - theta))
                .sum();
            inner * p_y
        })
        .sum::<f64>()
        .min(1.0)
}

/// Drop probability assuming every sensor completes `xi` frames in the
/// window (no partial frames at the window edges).
pub fn p_drop_approx(arrivals: WindowArrivals, theta: f64, capacity: u32) -> f64 {
    let top = arrivals.max_frames();
    if capacity >= top {
        return 0.0;
    }
    (capacity + 1..=top)
        .map(|z| (1.0 - f64::from(capacity) / f64::from(z)) * binomial_pmf(top, z, 1.0 - theta))
        .sum::<f64>()
        .min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_sums_to_one() {
        for n in [0, 1, 7, 120, 800] {
            for p in [0.0, 0.013, 0.5, 0.97, 1.0] {
                let total: f64 = (0..=n).map(|k| binomial_pmf(n, k, p)).sum();
                assert!((total - 1.0).abs() < 1e-12, "n={n} p={p}: {total}");
            }
        }
    }

    #[test]
    fn capacity_covers_everything() {
        let arrivals = WindowArrivals {
            n_sensors: 60,
            xi: 1,
            p_outside: 0.99,
        };
        assert_eq!(p_drop_exact(arrivals, 0.1, 60), 0.0);
        assert_eq!(p_drop_approx(arrivals, 0.1, 60), 0.0);
    }

    #[test]
    fn two_sensors_capacity_one() {
        // Y = 2 and Z = 2 always: one of the two measurements is dropped.
        let arrivals = WindowArrivals {
            n_sensors: 2,
            xi: 1,
            p_outside: 1.0,
        };
        assert!((p_drop_exact(arrivals, 0.0, 1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn nothing_received_nothing_dropped() {
        let arrivals = WindowArrivals {
            n_sensors: 120,
            xi: 1,
            p_outside: 0.99,
        };
        assert_eq!(p_drop_approx(arrivals, 1.0, 93), 0.0);
        assert_eq!(p_drop_exact(arrivals, 1.0, 93), 0.0);
    }

    #[test]
    fn approx_overestimates_when_partial_frames_possible() {
        let arrivals = WindowArrivals {
            n_sensors: 120,
            xi: 1,
            p_outside: 0.9931,
        };
        let exact = p_drop_exact(arrivals, 0.2, 93);
        let approx = p_drop_approx(arrivals, 0.2, 93);
        assert!(exact > 0.0 && approx >= exact);
    }
}
