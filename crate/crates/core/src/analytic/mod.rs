//! Analytical measurement loss probability (MLP).
//!
//! A measurement is lost when the gateway misses all `r + 1` sensor frames
//! carrying it and every relay fails to forward it:
//!
//! ```text
//! MLP = P_dir * prod_i P_ri
//! P_dir = (1 - (1 - P_i)(1 - P_f))^(r + 1)
//! P_ri  = 1 - P_rw (1 - P_s-r)(1 - P_drop)(1 - P_r-g)
//! ```
//!
//! `P_f` integrates the fading CDF over the link distance law. `P_i` is the
//! interference outage `1 - E[exp(-kappa(A, W))]` with
//! `kappa = (n - 1) f(r) / n_c * (1 - E_U[F_A(c A U^alpha W^-alpha)])`.
//! Both are evaluated on fixed Gauss-Legendre grids; the error estimate is
//! the difference against a grid of half the order.

mod drop;
mod laws;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use drop::{binomial_pmf, p_drop_approx, p_drop_exact, WindowArrivals};
pub use laws::{DistanceLaw, FADING_TAIL};

use crate::channel::PropagationParams;
use crate::error::ConfigError;
use crate::phy::{self, PhyError, RadioConfig, TrafficConfig};
use laws::{distance_grid, fading_cdf_at, fading_grid, Grid};

pub const DEFAULT_QUADRATURE_ORDER: usize = 128;
/// Relative tolerance of the fading outage integral.
pub const FADING_REL_TOL: f64 = 1e-6;
/// Relative tolerance of the interference outage integral.
pub const INTERFERENCE_REL_TOL: f64 = 1e-5;
const ABS_TOL_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("quadrature for {quantity} did not converge: value {value:e}, error estimate {error:e}")]
    NonConvergence {
        quantity: &'static str,
        value: f64,
        error: f64,
    },
    #[error("sensor frame ({frame_s} s) does not fit in the relay receive window ({t_rx_s} s)")]
    FrameExceedsWindow { frame_s: f64, t_rx_s: f64 },
    #[error("receive window {t_rx_s} s is not an integer multiple of the period {period_s} s")]
    NonIntegerWindowRatio { t_rx_s: f64, period_s: f64 },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Phy(#[from] PhyError),
}

/// Transmitter constant `gamma` and receiver threshold `psi` of one link
/// type, both in mW.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub gamma_mw: f64,
    pub psi_mw: f64,
}

impl LinkBudget {
    pub fn new(tx: &RadioConfig, rx_spreading_factor: u8, propagation: &PropagationParams) -> Self {
        Self {
            gamma_mw: propagation.link_gain(tx.tx_power_dbm),
            psi_mw: propagation.sensitivity_mw(rx_spreading_factor),
        }
    }
}

/// The three link types of the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    SensorGateway,
    SensorRelay,
    RelayGateway,
}

/// Everything the MLP chain depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticInputs {
    pub n_sensors: u32,
    pub n_channels: u32,
    pub n_relays: u32,
    pub redundancy: u32,
    pub pathloss_exponent: f64,
    pub nakagami_m: f64,
    /// Interferer-to-desired power ratio at which capture fails (0.25 for ~6 dB).
    pub capture_factor: f64,
    pub sensor_gateway: LinkBudget,
    pub sensor_relay: LinkBudget,
    pub relay_gateway: LinkBudget,
    pub dist_sensor_gateway: DistanceLaw,
    pub dist_sensor_relay: DistanceLaw,
    pub dist_relay_gateway: DistanceLaw,
    pub sensor_radio: RadioConfig,
    pub relay_radio: RadioConfig,
    pub traffic: TrafficConfig,
    pub t_rx_s: f64,
    pub t_tx_s: f64,
    pub quadrature_order: usize,
}

/// Distance-law approximations of the reference deployment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceLaws {
    pub sensor_gateway: DistanceLaw,
    pub sensor_relay: DistanceLaw,
    pub relay_gateway: DistanceLaw,
}

impl Default for DistanceLaws {
    /// Bounds of the placement boxes: sensors in [30, 42]^2, relays in
    /// [10, 20]^2, gateway at the origin.
    fn default() -> Self {
        Self {
            sensor_gateway: DistanceLaw::uniform(42.0, 59.0),
            sensor_relay: DistanceLaw::uniform(10.0, 52.0),
            relay_gateway: DistanceLaw::uniform(14.1, 28.3),
        }
    }
}

impl AnalyticInputs {
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        n_sensors: u32,
        n_relays: u32,
        redundancy: u32,
        sensor_radio: &RadioConfig,
        relay_radio: &RadioConfig,
        traffic: &TrafficConfig,
        propagation: &PropagationParams,
        t_rx_s: f64,
        t_tx_s: f64,
        laws: DistanceLaws,
        capture_factor: f64,
    ) -> Self {
        Self {
            n_sensors,
            n_channels: sensor_radio.channels_hz.len() as u32,
            n_relays,
            redundancy,
            pathloss_exponent: propagation.pathloss_exponent,
            nakagami_m: propagation.nakagami_m,
            capture_factor,
            sensor_gateway: LinkBudget::new(sensor_radio, sensor_radio.spreading_factor, propagation),
            sensor_relay: LinkBudget::new(sensor_radio, sensor_radio.spreading_factor, propagation),
            relay_gateway: LinkBudget::new(relay_radio, relay_radio.spreading_factor, propagation),
            dist_sensor_gateway: laws.sensor_gateway,
            dist_sensor_relay: laws.sensor_relay,
            dist_relay_gateway: laws.relay_gateway,
            sensor_radio: sensor_radio.clone(),
            relay_radio: relay_radio.clone(),
            traffic: traffic.clone(),
            t_rx_s,
            t_tx_s,
            quadrature_order: DEFAULT_QUADRATURE_ORDER,
        }
    }

    /// Reference deployment: SF10 sensors, SF7 relays, 30 s period,
    /// 30 s / 300 ms relay windows, alpha = 4, m = 1.2, three channels,
    /// calibrated sensitivities.
    pub fn reference(n_sensors: u32, n_relays: u32, redundancy: u32) -> Self {
        Self::from_parts(
            n_sensors,
            n_relays,
            redundancy,
            &RadioConfig::sensor_default(),
            &RadioConfig::relay_calibrated(),
            &TrafficConfig::default(),
            &PropagationParams::calibrated(),
            30.0,
            0.3,
            DistanceLaws::default(),
            0.25,
        )
    }

    pub fn validate(&self) -> Result<(), AnalyticError> {
        if self.n_sensors == 0 {
            return Err(ConfigError::invalid("n_sensors", "at least one sensor required").into());
        }
        if self.n_channels == 0 {
            return Err(ConfigError::invalid("n_channels", "at least one channel required").into());
        }
        if !(self.capture_factor > 0.0 && self.capture_factor < 1.0) {
            return Err(ConfigError::invalid("capture_factor", "must lie in (0, 1)").into());
        }
        if !(self.nakagami_m >= 0.5) {
            return Err(ConfigError::invalid("nakagami_m", "must be at least 0.5").into());
        }
        if self.quadrature_order < 2 {
            return Err(ConfigError::invalid("quadrature_order", "must be at least 2").into());
        }
        self.dist_sensor_gateway.validate()?;
        self.dist_sensor_relay.validate()?;
        self.dist_relay_gateway.validate()?;
        self.sensor_radio.validate()?;
        self.relay_radio.validate()?;
        self.traffic.validate()?;
        self.window_ratio()?;
        Ok(())
    }

    /// `xi = t_rx / t`, required to be a positive integer.
    pub fn window_ratio(&self) -> Result<u32, AnalyticError> {
        let ratio = self.t_rx_s / self.traffic.measurement_period_s;
        let rounded = ratio.round();
        if rounded < 1.0 || (ratio - rounded).abs() > 1e-9 * rounded {
            return Err(AnalyticError::NonIntegerWindowRatio {
                t_rx_s: self.t_rx_s,
                period_s: self.traffic.measurement_period_s,
            });
        }
        Ok(rounded as u32)
    }

    pub fn sensor_frame_s(&self, redundancy: u32) -> f64 {
        phy::frame_duration(self.traffic.sensor_payload_bytes(redundancy), &self.sensor_radio)
    }

    pub fn duty_cycle(&self, redundancy: u32) -> f64 {
        phy::duty_cycle(redundancy, &self.sensor_radio, &self.traffic)
    }

    pub fn relay_capacity(&self) -> Result<u32, PhyError> {
        phy::relay_capacity(&self.relay_radio, &self.traffic, self.t_tx_s)
    }

    fn budget(&self, link: Link) -> LinkBudget {
        match link {
            Link::SensorGateway => self.sensor_gateway,
            Link::SensorRelay => self.sensor_relay,
            Link::RelayGateway => self.relay_gateway,
        }
    }

    fn law(&self, link: Link) -> DistanceLaw {
        match link {
            Link::SensorGateway => self.dist_sensor_gateway,
            Link::SensorRelay => self.dist_sensor_relay,
            Link::RelayGateway => self.dist_relay_gateway,
        }
    }
}

/// A quadrature result with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    fn checked(quantity: &'static str, fine: f64, coarse: f64, rel_tol: f64) -> Result<Self, AnalyticError> {
        let error = (fine - coarse).abs();
        if !fine.is_finite() || error > rel_tol * fine.abs() + ABS_TOL_FLOOR {
            return Err(AnalyticError::NonConvergence {
                quantity,
                value: fine,
                error,
            });
        }
        Ok(Self {
            value: fine.clamp(0.0, 1.0),
            error,
        })
    }
}

fn coarse_order(order: usize) -> usize {
    (order / 2).max(1)
}

fn fading_outage_on(grid: &Grid, budget: LinkBudget, alpha: f64, m: f64) -> f64 {
    if budget.psi_mw <= 0.0 {
        return 0.0;
    }
    grid.expect(|u| fading_cdf_at(m, budget.psi_mw * u.powf(alpha) / budget.gamma_mw))
}

/// Outage due to fading alone: `E_D[F_A(psi D^alpha / gamma)]`.
pub fn outage_fading(
    law: &DistanceLaw,
    budget: LinkBudget,
    alpha: f64,
    m: f64,
    order: usize,
) -> Result<Estimate, AnalyticError> {
    let fine = fading_outage_on(&distance_grid(law, order), budget, alpha, m);
    let coarse = fading_outage_on(&distance_grid(law, coarse_order(order)), budget, alpha, m);
    Estimate::checked("fading outage", fine, coarse, FADING_REL_TOL)
}

/// Tabulated `1 - E_U[F_A(c a U^alpha w^-alpha)]` on the (fading, distance)
/// grid. It does not depend on the number of sensors or the redundancy, so
/// one table serves every `(n, r)` pair.
#[derive(Debug, Clone)]
struct HarmTable {
    weights: Vec<f64>,
    harm: Vec<f64>,
}

impl HarmTable {
    fn build(law: &DistanceLaw, alpha: f64, m: f64, capture_factor: f64, order: usize) -> Self {
        let fading = fading_grid(m, order);
        let distance = distance_grid(law, order);
        let scaled: Vec<f64> = distance.points.iter().map(|u| u.powf(alpha)).collect();
        let mut weights = Vec::with_capacity(fading.len() * distance.len());
        let mut harm = Vec::with_capacity(weights.capacity());
        for (&a, &wa) in fading.points.iter().zip(&fading.weights) {
            for (&w, &ww) in distance.points.iter().zip(&distance.weights) {
                let scale = capture_factor * a * w.powf(-alpha);
                let safe: f64 = scaled
                    .iter()
                    .zip(&distance.weights)
                    .map(|(&u_alpha, &wu)| wu * fading_cdf_at(m, scale * u_alpha))
                    .sum();
                weights.push(wa * ww);
                harm.push((1.0 - safe).max(0.0));
            }
        }
        Self { weights, harm }
    }

    /// `1 - E[exp(-rate * harm)]`.
    fn outage(&self, rate: f64) -> f64 {
        if rate == 0.0 {
            return 0.0;
        }
        let survive: f64 = self
            .weights
            .iter()
            .zip(&self.harm)
            .map(|(&w, &h)| w * (-rate * h).exp())
            .sum();
        1.0 - survive
    }
}

/// Interference outage of one link type with the coarse grid kept for the
/// error estimate.
#[derive(Debug, Clone)]
pub struct InterferenceKernel {
    fine: HarmTable,
    coarse: HarmTable,
}

impl InterferenceKernel {
    pub fn new(law: &DistanceLaw, alpha: f64, m: f64, capture_factor: f64, order: usize) -> Self {
        Self {
            fine: HarmTable::build(law, alpha, m, capture_factor, order),
            coarse: HarmTable::build(law, alpha, m, capture_factor, coarse_order(order)),
        }
    }

    /// Outage when interferers are active at aggregate rate
    /// `(n - 1) f / n_c` per frame.
    pub fn outage(&self, activity: f64) -> Result<Estimate, AnalyticError> {
        Estimate::checked(
            "interference outage",
            self.fine.outage(activity),
            self.coarse.outage(activity),
            INTERFERENCE_REL_TOL,
        )
    }
}

/// Expected number of interfering frames per desired frame, `(n-1) f(r) / n_c`.
pub fn interferer_activity(n_sensors: u32, n_channels: u32, duty_cycle: f64) -> f64 {
    f64::from(n_sensors.saturating_sub(1)) * duty_cycle / f64::from(n_channels)
}

/// Interference outage for sensor frames at the gateway or at a relay.
pub fn outage_interference(inputs: &AnalyticInputs, link: Link) -> Result<Estimate, AnalyticError> {
    let kernel = InterferenceKernel::new(
        &inputs.law(link),
        inputs.pathloss_exponent,
        inputs.nakagami_m,
        inputs.capture_factor,
        inputs.quadrature_order,
    );
    kernel.outage(interferer_activity(
        inputs.n_sensors,
        inputs.n_channels,
        inputs.duty_cycle(inputs.redundancy),
    ))
}

/// Probability that none of the `r + 1` direct transmissions gets through.
pub fn p_direct(p_interference: f64, p_fading: f64, redundancy: u32) -> f64 {
    single_frame_failure(p_interference, p_fading).powi(redundancy as i32 + 1)
}

fn single_frame_failure(p_interference: f64, p_fading: f64) -> f64 {
    1.0 - (1.0 - p_interference) * (1.0 - p_fading)
}

/// Probability that a frame of length `frame_s`, starting uniformly at
/// random, lies completely inside a relay receive window.
pub fn p_receive_window(t_rx_s: f64, t_tx_s: f64, frame_s: f64) -> Result<f64, AnalyticError> {
    if frame_s > t_rx_s {
        return Err(AnalyticError::FrameExceedsWindow { frame_s, t_rx_s });
    }
    Ok((t_rx_s - frame_s) / (t_rx_s + t_tx_s))
}

/// Failure probability of the path through one relay.
pub fn p_via_relay(p_rw: f64, p_s_r: f64, p_drop: f64, p_r_g: f64) -> f64 {
    1.0 - p_rw * (1.0 - p_s_r) * (1.0 - p_drop) * (1.0 - p_r_g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelayBreakdown {
    pub p_rw: f64,
    /// Interference part of the sensor-to-relay failure.
    pub p_i_s_r: f64,
    /// Fading part of the sensor-to-relay failure.
    pub p_f_s_r: f64,
    pub p_s_r: f64,
    pub p_drop: f64,
    pub p_r_g: f64,
    pub p_ri: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpBreakdown {
    pub n_sensors: u32,
    pub n_relays: u32,
    pub redundancy: u32,
    pub duty_cycle: f64,
    pub relay_capacity: u32,
    pub p_i: f64,
    pub p_f: f64,
    pub p_dir: f64,
    pub relays: Vec<RelayBreakdown>,
    pub mlp: f64,
    /// Largest quadrature error estimate among the integrals involved.
    pub quadrature_error: f64,
}

/// Precomputed integrals for one deployment. Evaluating a new `(n, omega, r)`
/// point only re-weights the cached tables.
#[derive(Debug, Clone)]
pub struct MlpModel {
    inputs: AnalyticInputs,
    fading_sensor_gateway: Estimate,
    fading_sensor_relay: Estimate,
    fading_relay_gateway: Estimate,
    interference_gateway: InterferenceKernel,
    interference_relay: InterferenceKernel,
    relay_capacity: u32,
    window_ratio: u32,
}

impl MlpModel {
    pub fn new(inputs: &AnalyticInputs) -> Result<Self, AnalyticError> {
        inputs.validate()?;
        let order = inputs.quadrature_order;
        let alpha = inputs.pathloss_exponent;
        let m = inputs.nakagami_m;
        let fading = |link| outage_fading(&inputs.law(link), inputs.budget(link), alpha, m, order);
        let kernel = |link| InterferenceKernel::new(&inputs.law(link), alpha, m, inputs.capture_factor, order);
        Ok(Self {
            fading_sensor_gateway: fading(Link::SensorGateway)?,
            fading_sensor_relay: fading(Link::SensorRelay)?,
            fading_relay_gateway: fading(Link::RelayGateway)?,
            interference_gateway: kernel(Link::SensorGateway),
            interference_relay: kernel(Link::SensorRelay),
            relay_capacity: inputs.relay_capacity()?,
            window_ratio: inputs.window_ratio()?,
            inputs: inputs.clone(),
        })
    }

    pub fn inputs(&self) -> &AnalyticInputs {
        &self.inputs
    }

    pub fn relay_capacity(&self) -> u32 {
        self.relay_capacity
    }

    pub fn breakdown(&self) -> Result<MlpBreakdown, AnalyticError> {
        self.breakdown_at(self.inputs.n_sensors, self.inputs.n_relays, self.inputs.redundancy)
    }

    pub fn breakdown_at(&self, n_sensors: u32, n_relays: u32, redundancy: u32) -> Result<MlpBreakdown, AnalyticError> {
        if n_sensors == 0 {
            return Err(ConfigError::invalid("n_sensors", "at least one sensor required").into());
        }
        let inputs = &self.inputs;
        let duty_cycle = inputs.duty_cycle(redundancy);
        let activity = interferer_activity(n_sensors, inputs.n_channels, duty_cycle);

        let p_i = self.interference_gateway.outage(activity)?;
        let p_f = self.fading_sensor_gateway;
        let p_dir = p_direct(p_i.value, p_f.value, redundancy);
        let mut quadrature_error = p_i.error.max(p_f.error);

        let mut relays = Vec::with_capacity(n_relays as usize);
        if n_relays > 0 {
            let frame_s = inputs.sensor_frame_s(redundancy);
            let p_rw = p_receive_window(inputs.t_rx_s, inputs.t_tx_s, frame_s)?;
            let p_i_s_r = self.interference_relay.outage(activity)?;
            let p_f_s_r = self.fading_sensor_relay;
            let p_s_r = single_frame_failure(p_i_s_r.value, p_f_s_r.value);
            let arrivals = WindowArrivals {
                n_sensors,
                xi: self.window_ratio,
                p_outside: (1.0 - frame_s / inputs.traffic.measurement_period_s).clamp(0.0, 1.0),
            };
            let p_drop = p_drop_exact(arrivals, p_s_r, self.relay_capacity);
            let p_r_g = self.fading_relay_gateway.value;
            let relay = RelayBreakdown {
                p_rw,
                p_i_s_r: p_i_s_r.value,
                p_f_s_r: p_f_s_r.value,
                p_s_r,
                p_drop,
                p_r_g,
                p_ri: p_via_relay(p_rw, p_s_r, p_drop, p_r_g),
            };
            quadrature_error = quadrature_error
                .max(p_i_s_r.error)
                .max(p_f_s_r.error)
                .max(self.fading_relay_gateway.error);
            relays.resize(n_relays as usize, relay);
        }

        let mlp = relays.iter().fold(p_dir, |acc, relay| acc * relay.p_ri);
        Ok(MlpBreakdown {
            n_sensors,
            n_relays,
            redundancy,
            duty_cycle,
            relay_capacity: self.relay_capacity,
            p_i: p_i.value,
            p_f: p_f.value,
            p_dir,
            relays,
            mlp,
            quadrature_error,
        })
    }
}

/// Full MLP breakdown for `inputs`.
pub fn mlp(inputs: &AnalyticInputs) -> Result<MlpBreakdown, AnalyticError> {
    MlpModel::new(inputs)?.breakdown()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_direct_cases() {
        assert_eq!(p_direct(0.0, 0.0, 3), 0.0);
        assert!((p_direct(0.0, 0.17, 0) - 0.17).abs() < 1e-15);
        assert!((p_direct(0.3, 0.2, 3) - 0.03748096).abs() < 1e-14);
    }

    #[test]
    fn receive_window_cases() {
        assert_eq!(p_receive_window(30.0, 0.3, 0.0).unwrap(), 30.0 / 30.3);
        let p = p_receive_window(30.0, 0.3, 0.206848).unwrap();
        assert!((p - 29.793152 / 30.3).abs() < 1e-15);
        assert!((p - 0.98327).abs() < 1e-5);
        assert_eq!(p_receive_window(30.0, 0.3, 30.0).unwrap(), 0.0);
        assert!(matches!(
            p_receive_window(30.0, 0.3, 30.1),
            Err(AnalyticError::FrameExceedsWindow { .. })
        ));
    }

    #[test]
    fn via_relay_cases() {
        assert_eq!(p_via_relay(1.0, 0.0, 0.0, 0.0), 0.0);
        assert_eq!(p_via_relay(0.0, 0.0, 0.0, 0.0), 1.0);
    }

    #[test]
    fn fading_outage_edge_cases() {
        let law = DistanceLaw::uniform(42.0, 59.0);
        let zero_psi = LinkBudget {
            gamma_mw: 1e-5,
            psi_mw: 0.0,
        };
        assert_eq!(outage_fading(&law, zero_psi, 4.0, 1.2, 128).unwrap().value, 0.0);

        let point = DistanceLaw::Point { distance_m: 50.0 };
        let budget = LinkBudget {
            gamma_mw: 1.4e-5,
            psi_mw: 6.3e-17,
        };
        let expected = crate::channel::fading_cdf(1.2, budget.psi_mw * 50f64.powi(4) / budget.gamma_mw);
        let got = outage_fading(&point, budget, 4.0, 1.2, 128).unwrap().value;
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn interference_vanishes_without_interferers() {
        let mut inputs = AnalyticInputs::reference(1, 0, 3);
        assert_eq!(outage_interference(&inputs, Link::SensorGateway).unwrap().value, 0.0);
        inputs.n_sensors = 60;
        inputs.n_channels = 1_000_000_000;
        assert!(outage_interference(&inputs, Link::SensorGateway).unwrap().value < 1e-8);
    }

    #[test]
    fn empty_product_and_identity() {
        let model = MlpModel::new(&AnalyticInputs::reference(60, 0, 3)).unwrap();
        let none = model.breakdown_at(60, 0, 3).unwrap();
        assert_eq!(none.mlp, none.p_dir);
        let four = model.breakdown_at(60, 4, 3).unwrap();
        let product = four.relays.iter().fold(four.p_dir, |acc, r| acc * r.p_ri);
        assert_eq!(four.mlp, product);
        assert!(four.mlp < none.mlp);
        for relay in &four.relays {
            for p in [relay.p_rw, relay.p_s_r, relay.p_drop, relay.p_r_g, relay.p_ri] {
                assert!((0.0..=1.0).contains(&p));
            }
        }
    }

    #[test]
    fn non_integer_window_ratio_rejected() {
        let mut inputs = AnalyticInputs::reference(60, 1, 3);
        inputs.t_rx_s = 45.0;
        assert!(matches!(
            MlpModel::new(&inputs),
            Err(AnalyticError::NonIntegerWindowRatio { .. })
        ));
    }
}
