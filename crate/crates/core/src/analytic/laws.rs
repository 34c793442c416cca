//! Distance and fading laws together with the fixed Gauss-Legendre grids
//! used to integrate against them.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{fading_cdf, fading_quantile};
use crate::error::ConfigError;

/// Upper tail mass cut from the fading law to obtain a bounded support.
pub const FADING_TAIL: f64 = 1e-9;

/// Law of a link distance `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum DistanceLaw {
    Uniform { min_m: f64, max_m: f64 },
    Point { distance_m: f64 },
}

impl DistanceLaw {
    pub fn uniform(min_m: f64, max_m: f64) -> Self {
        Self::Uniform { min_m, max_m }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match *self {
            Self::Uniform { min_m, max_m } if min_m > 0.0 && max_m > min_m => Ok(()),
            Self::Point { distance_m } if distance_m > 0.0 => Ok(()),
            _ => Err(ConfigError::invalid(
                "distance_law",
                format!("{self:?} must have positive, ordered bounds"),
            )),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Uniform { min_m, max_m } => (min_m, max_m),
            Self::Point { distance_m } => (distance_m, distance_m),
        }
    }

    pub fn pdf(&self, u: f64) -> f64 {
        match *self {
            Self::Uniform { min_m, max_m } if (min_m..=max_m).contains(&u) => 1.0 / (max_m - min_m),
            _ => 0.0,
        }
    }

    pub fn cdf(&self, u: f64) -> f64 {
        match *self {
            Self::Uniform { min_m, max_m } => ((u - min_m) / (max_m - min_m)).clamp(0.0, 1.0),
            Self::Point { distance_m } => f64::from(u8::from(u >= distance_m)),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Uniform { min_m, max_m } => rng.gen_range(min_m..max_m),
            Self::Point { distance_m } => distance_m,
        }
    }
}

/// Nodes and probability weights for an expectation `E[g(X)] ~ sum w_k g(x_k)`.
#[derive(Debug, Clone)]
pub(crate) struct Grid {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Grid {
    pub fn expect(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }
}

fn legendre(order: usize) -> GaussLegendre {
    GaussLegendre::new(NonZeroUsize::new(order).expect("quadrature order must be positive"))
}

/// Maps the Gauss-Legendre rule onto `[a, b]`.
fn mapped_rule(order: usize, a: f64, b: f64) -> Grid {
    let rule = legendre(order);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let (points, weights) = rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .unzip();
    Grid { points, weights }
}

pub(crate) fn distance_grid(law: &DistanceLaw, order: usize) -> Grid {
    match *law {
        DistanceLaw::Uniform { min_m, max_m } => {
            let mut grid = mapped_rule(order, min_m, max_m);
            let density = 1.0 / (max_m - min_m);
            grid.weights.iter_mut().for_each(|w| *w *= density);
            grid
        }
        DistanceLaw::Point { distance_m } => Grid {
            points: vec![distance_m],
            weights: vec![1.0],
        },
    }
}

/// Panel edges in the substituted variable `s`; most of the probability
/// mass sits at small `s`.
const FADING_PANELS: [f64; 6] = [0.0, 1e-3, 1e-2, 0.1, 0.3, 1.0];

/// Grid for the unit-mean Gamma(m, 1/m) gain on `[0, a_max]`, where `a_max`
/// is the `1 - FADING_TAIL` quantile. The substitution
/// `a = a_max * s^(1/m)` cancels the `a^(m-1)` factor of the density, so
/// the weights reduce to a multiple of `exp(-m a)`. The `order` nodes are
/// spread over composite panels and the weights are renormalised.
pub(crate) fn fading_grid(m: f64, order: usize) -> Grid {
    let a_max = fading_quantile(m, 1.0 - FADING_TAIL);
    let panels = FADING_PANELS.len() - 1;
    let per_panel = order.div_ceil(panels).max(2);
    let scale = (m.powf(m - 1.0) * a_max.powf(m)).ln() - statrs::function::gamma::ln_gamma(m);
    let mut points = Vec::with_capacity(per_panel * panels);
    let mut weights = Vec::with_capacity(per_panel * panels);
    for edges in FADING_PANELS.windows(2) {
        let panel = mapped_rule(per_panel, edges[0], edges[1]);
        for (&s, &w) in panel.points.iter().zip(&panel.weights) {
            let a = a_max * s.powf(1.0 / m);
            points.push(a);
            weights.push(w * (scale - m * a).exp());
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Grid { points, weights }
}

/// Evaluates `F_A` at a point; exposed for the integrands.
#[inline]
pub(crate) fn fading_cdf_at(m: f64, x: f64) -> f64 {
    fading_cdf(m, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_grid_integrates_moments() {
        let law = DistanceLaw::uniform(42.0, 59.0);
        let grid = distance_grid(&law, 32);
        assert!((grid.expect(|_| 1.0) - 1.0).abs() < 1e-14);
        assert!((grid.expect(|u| u) - 50.5).abs() < 1e-12);
        let fourth = (59f64.powi(5) - 42f64.powi(5)) / (5.0 * 17.0);
        assert!((grid.expect(|u| u.powi(4)) - fourth).abs() < 1e-9 * fourth);
    }

    #[test]
    fn fading_grid_moments() {
        let m = 1.2;
        let grid = fading_grid(m, 128);
        assert!((grid.expect(|_| 1.0) - 1.0).abs() < 1e-14);
        assert!((grid.expect(|a| a) - 1.0).abs() < 1e-6);
        assert!((grid.expect(|a| (-a).exp()) - (m / (m + 1.0)).powf(m)).abs() < 1e-8);
        let coarse = fading_grid(m, 64);
        assert!((coarse.expect(|a| (-a).exp()) - (m / (m + 1.0)).powf(m)).abs() < 1e-7);
    }

    #[test]
    fn point_law() {
        let law = DistanceLaw::Point { distance_m: 10.0 };
        assert_eq!(distance_grid(&law, 64).expect(|u| u * u), 100.0);
        assert_eq!(law.cdf(9.9), 0.0);
        assert_eq!(law.cdf(10.0), 1.0);
    }
}
