//! Seeded random instances.
//!
//! Vehicles weigh 10 units and carry up to 10 units. Two speed brackets: 60 km/h
//! from hour 0 to 8, 50 km/h from hour 8 to the horizon. Everything else is drawn
//! from the ranges in [`GenSpec`].
//!
//! The cost coefficients (`alpha = 1`, `beta = 0.01`, fuel plus emission cost
//! of 100 per unit) are placeholders chosen to give objective values around
//! `1e6..1e7`; they are not calibrated against any published data.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{check_route, Instance, Matrix, Node, Route, SpeedLevel};

pub const VEHICLE_WEIGHT: f64 = 10.0;
pub const CAPACITY: f64 = 10.0;
pub const DAY_SPEED: f64 = 60.0;
pub const EVENING_SPEED: f64 = 50.0;
/// Hour at which the day bracket ends.
pub const BRACKET_SWITCH: f64 = 8.0;

const MAX_RETRIES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub customers: usize,
    pub seed: u64,
    /// Side of the square service area, km. The depot sits in the centre.
    pub area: f64,
    /// Inclusive integer demand range.
    pub demand_range: (u32, u32),
    /// Time window width range, hours.
    pub window_width_range: (f64, f64),
    /// End of the planning day, hours.
    pub horizon: f64,
    /// Service duration range, hours.
    pub service_range: (f64, f64),
    /// Defaults to `ceil(2n / capacity) + 1`.
    pub fleet_size: Option<usize>,
    pub alpha: f64,
    pub beta: f64,
    pub fuel_cost: f64,
    pub emission_cost: f64,
}

impl GenSpec {
    pub fn new(customers: usize, seed: u64) -> Self {
        Self {
            customers,
            seed,
            area: 100.0,
            demand_range: (1, 3),
            window_width_range: (1.0, 4.0),
            horizon: 16.0,
            service_range: (0.1, 0.5),
            fleet_size: None,
            alpha: 1.0,
            beta: 0.01,
            fuel_cost: 50.0,
            emission_cost: 50.0,
        }
    }

    pub fn with_fleet(mut self, fleet: usize) -> Self {
        self.fleet_size = Some(fleet);
        self
    }

    pub fn default_fleet(customers: usize) -> usize {
        libm::ceil(customers as f64 * 2.0 / CAPACITY) as usize + 1
    }

    pub fn fleet(&self) -> usize {
        self.fleet_size.unwrap_or_else(|| Self::default_fleet(self.customers))
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let range_ok = |(lo, hi): (f64, f64)| lo > 0.0 && lo <= hi && hi.is_finite();
        if self.customers == 0 {
            return Err(GenError::InvalidSpec("at least one customer is required"));
        }
        if !(self.area > 0.0 && self.area.is_finite()) {
            return Err(GenError::InvalidSpec("area must be positive"));
        }
        if !(self.demand_range.0 > 0 && self.demand_range.0 <= self.demand_range.1) {
            return Err(GenError::InvalidSpec("demand range must be positive and non-empty"));
        }
        if f64::from(self.demand_range.1) > CAPACITY {
            return Err(GenError::InvalidSpec("demand above vehicle capacity"));
        }
        if !range_ok(self.window_width_range) || !range_ok(self.service_range) {
            return Err(GenError::InvalidSpec("window and service ranges must be positive and non-empty"));
        }
        if !(self.horizon > BRACKET_SWITCH && self.horizon.is_finite()) {
            return Err(GenError::InvalidSpec("horizon must extend past the bracket switch"));
        }
        if self.fleet() == 0 {
            return Err(GenError::InvalidSpec("fleet size must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.beta > 0.0 && self.fuel_cost >= 0.0 && self.emission_cost >= 0.0) {
            return Err(GenError::InvalidSpec("cost coefficients must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(&'static str),
    #[error("could not place a reachable time window for customer {customer} after {retries} tries")]
    RetriesExhausted { customer: usize, retries: usize },
    #[error("generated customer {customer} cannot be served on its own")]
    Unservable { customer: usize },
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

/// The two fixed speed levels.
pub fn speed_levels(horizon: f64) -> Vec<SpeedLevel> {
    alloc::vec![
        SpeedLevel {
            id: 1,
            lower: 40.0,
            avg: DAY_SPEED,
            upper: DAY_SPEED,
            bracket_start: 0.0,
            bracket_end: BRACKET_SWITCH,
        },
        SpeedLevel {
            id: 2,
            lower: 30.0,
            avg: EVENING_SPEED,
            upper: EVENING_SPEED,
            bracket_start: BRACKET_SWITCH,
            bracket_end: horizon,
        },
    ]
}

/// Draws an instance. Deterministic in `spec` (including the seed).
pub fn generate(spec: &GenSpec) -> Result<Instance, GenError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.customers;
    let centre = spec.area / 2.0;
    let slowest = EVENING_SPEED.min(DAY_SPEED);

    let mut nodes = Vec::with_capacity(n + 2);
    nodes.push(Node::depot(0, centre, centre, 0.0, spec.horizon));
    for id in 1..=n {
        let x = rng.gen_range(0.0..spec.area);
        let y = rng.gen_range(0.0..spec.area);
        let demand = f64::from(rng.gen_range(spec.demand_range.0..=spec.demand_range.1));
        let d = libm::hypot(x - centre, y - centre);
        let reach = d / DAY_SPEED;
        let back = d / slowest;
        let mut placed = None;
        for _ in 0..MAX_RETRIES {
            let service = uniform(&mut rng, spec.service_range);
            let width = uniform(&mut rng, spec.window_width_range);
            // leave room to finish service and drive home before the horizon
            let latest_open = spec.horizon - back - service - width - 1e-6;
            if latest_open < 0.0 {
                continue;
            }
            let open = rng.gen_range(0.0..=latest_open);
            if open + width >= reach {
                placed = Some((service, open, open + width));
                break;
            }
        }
        let (service, tw_open, tw_close) =
            placed.ok_or(GenError::RetriesExhausted { customer: id, retries: MAX_RETRIES })?;
        nodes.push(Node { id, x, y, demand, service, tw_open, tw_close });
    }
    nodes.push(Node::depot(n + 1, centre, centre, 0.0, spec.horizon));

    let distances = Matrix::euclidean(&nodes);
    let inst = Instance {
        distances,
        fleet_size: spec.fleet(),
        vehicle_weight: VEHICLE_WEIGHT,
        capacity: CAPACITY,
        fuel_cost: spec.fuel_cost,
        emission_cost: spec.emission_cost,
        alpha: Matrix::broadcast(n + 2, spec.alpha),
        beta: spec.beta,
        speed_levels: speed_levels(spec.horizon),
        emission_params: (1.0, 0.0),
        nodes,
    };
    debug_assert_eq!(inst.validate(), Ok(()));

    for c in inst.customers() {
        let mut route = Route::through(&inst, &[c], 1);
        crate::model::assign_levels(&inst, &mut route, 0.0);
        if !check_route(&inst, 0, &route, 0.0).is_feasible() {
            return Err(GenError::Unservable { customer: c });
        }
    }
    Ok(inst)
}
