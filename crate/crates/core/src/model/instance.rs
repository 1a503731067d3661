use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use super::ModelError;

/// Node index: 0 is the start depot, `1..=n` are customers, `n + 1` is the end depot.
pub type NodeId = usize;

/// Identifier of a speed level as it appears in instance and solution files.
pub type LevelId = u32;

const EPS: f64 = 1e-9;

/// A regulated average speed valid during one time-of-day bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedLevel {
    pub id: LevelId,
    /// Lower speed bound, km/h.
    pub lower: f64,
    /// Average speed used for travel times and the speed cost term, km/h.
    pub avg: f64,
    /// Upper speed bound, km/h.
    pub upper: f64,
    /// Start of the bracket, hours (inclusive).
    pub bracket_start: f64,
    /// End of the bracket, hours (exclusive).
    pub bracket_end: f64,
}

impl SpeedLevel {
    pub fn contains(&self, time: f64) -> bool {
        self.bracket_start <= time && time < self.bracket_end
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub x: f64,
    pub y: f64,
    pub demand: f64,
    /// Service duration, hours.
    pub service: f64,
    pub tw_open: f64,
    pub tw_close: f64,
}

impl Node {
    pub fn depot(id: NodeId, x: f64, y: f64, tw_open: f64, tw_close: f64) -> Self {
        Self { id, x, y, demand: 0.0, service: 0.0, tw_open, tw_close }
    }
}

/// Dense square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn filled(dim: usize, value: f64) -> Self {
        Self { dim, data: vec![value; dim * dim] }
    }

    /// Builds a matrix from row-major data; `None` if the length is not `dim * dim`.
    pub fn from_rows(dim: usize, data: Vec<f64>) -> Option<Self> {
        (data.len() == dim * dim).then_some(Self { dim, data })
    }

    /// Euclidean distances between node coordinates, at full precision.
    pub fn euclidean(nodes: &[Node]) -> Self {
        let dim = nodes.len();
        let mut m = Self::filled(dim, 0.0);
        for (i, a) in nodes.iter().enumerate() {
            for (j, b) in nodes.iter().enumerate() {
                if i != j {
                    m.data[i * dim + j] = libm::hypot(a.x - b.x, a.y - b.y);
                }
            }
        }
        m
    }

    /// Edge coefficient matrix with one value everywhere off the diagonal.
    pub fn broadcast(dim: usize, value: f64) -> Self {
        let mut m = Self::filled(dim, value);
        for i in 0..dim {
            m.data[i * dim + i] = 0.0;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.dim.max(1))
    }

    /// Returns the shared value if every off-diagonal entry is equal.
    pub fn uniform_value(&self) -> Option<f64> {
        let mut value = None;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i == j {
                    continue;
                }
                let v = self.get(i, j);
                match value {
                    None => value = Some(v),
                    Some(u) if u.to_bits() != v.to_bits() => return None,
                    _ => {}
                }
            }
        }
        value
    }
}

/// A problem instance. Immutable once validated; share it freely between solver runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    /// `n + 2` nodes: start depot, customers `1..=n`, end depot.
    pub nodes: Vec<Node>,
    /// Distances in km.
    pub distances: Matrix,
    pub fleet_size: usize,
    /// Tare weight of an empty vehicle.
    pub vehicle_weight: f64,
    /// Maximum load per vehicle.
    pub capacity: f64,
    /// Fuel cost per unit of fuel proxy.
    pub fuel_cost: f64,
    /// Cost per unit of emission.
    pub emission_cost: f64,
    /// Per-edge constant coefficient.
    pub alpha: Matrix,
    /// Vehicle constant coefficient on the squared speed.
    pub beta: f64,
    pub speed_levels: Vec<SpeedLevel>,
    /// Slope and intercept of the emission-from-fuel line.
    pub emission_params: (f64, f64),
}

#[allow(clippy::neg_cmp_op_on_partial_ord)]
impl Instance {
    /// Number of customers.
    pub fn n(&self) -> usize {
        self.nodes.len().saturating_sub(2)
    }

    pub fn start_depot(&self) -> NodeId {
        0
    }

    pub fn end_depot(&self) -> NodeId {
        self.nodes.len() - 1
    }

    pub fn is_depot(&self, node: NodeId) -> bool {
        node == 0 || node == self.end_depot()
    }

    pub fn customers(&self) -> Range<NodeId> {
        1..self.nodes.len() - 1
    }

    /// Combined unit cost applied to the fuel proxy.
    pub fn unit_cost(&self) -> f64 {
        self.fuel_cost + self.emission_cost
    }

    pub fn distance(&self, i: NodeId, j: NodeId) -> f64 {
        self.distances.get(i, j)
    }

    pub fn level(&self, id: LevelId) -> Option<&SpeedLevel> {
        self.speed_levels.iter().find(|l| l.id == id)
    }

    /// The level whose bracket contains `time`, if any.
    pub fn level_at(&self, time: f64) -> Option<&SpeedLevel> {
        self.speed_levels.iter().find(|l| l.contains(time))
    }

    /// End of the last speed bracket.
    pub fn horizon(&self) -> f64 {
        self.speed_levels.iter().map(|l| l.bracket_end).fold(0.0, f64::max)
    }

    /// Smallest lower speed bound over all levels.
    pub fn min_lower_speed(&self) -> f64 {
        self.speed_levels.iter().map(|l| l.lower).fold(f64::INFINITY, f64::min)
    }

    pub fn total_demand(&self) -> f64 {
        self.customers().map(|c| self.nodes[c].demand).sum()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let dim = self.nodes.len();
        if dim < 2 {
            return Err(ModelError::invalid("instance needs a start and an end depot"));
        }
        for (idx, node) in self.nodes.iter().enumerate() {
            if node.id != idx {
                return Err(ModelError::invalid_at("node ids must be 0..=n+1 in order", idx));
            }
            if !(node.demand >= 0.0 && node.service >= 0.0) {
                return Err(ModelError::invalid_at("negative demand or service duration", idx));
            }
            if !(node.tw_open <= node.tw_close) {
                return Err(ModelError::invalid_at("time window opens after it closes", idx));
            }
        }
        for depot in [0, dim - 1] {
            let node = &self.nodes[depot];
            if node.demand != 0.0 || node.service != 0.0 {
                return Err(ModelError::invalid_at("depot with demand or service duration", depot));
            }
        }
        if self.distances.dim() != dim || self.alpha.dim() != dim {
            return Err(ModelError::invalid("distance and alpha matrices must be (n+2)x(n+2)"));
        }
        for i in 0..dim {
            if self.distances.get(i, i) != 0.0 {
                return Err(ModelError::invalid_at("distance diagonal must be zero", i));
            }
            for j in 0..dim {
                if !(self.distances.get(i, j) >= 0.0) {
                    return Err(ModelError::invalid_at("negative distance", i));
                }
                if i != j && !(self.alpha.get(i, j) > 0.0) {
                    return Err(ModelError::invalid_at("alpha must be positive off the diagonal", i));
                }
            }
        }
        let (start, end) = (&self.nodes[0], &self.nodes[dim - 1]);
        if start.x != end.x || start.y != end.y {
            return Err(ModelError::invalid("start and end depot coordinates differ"));
        }
        let end_id = dim - 1;
        for k in 1..end_id {
            if self.distances.get(0, k) != self.distances.get(end_id, k)
                || self.distances.get(k, 0) != self.distances.get(k, end_id)
            {
                return Err(ModelError::invalid_at("start and end depot distance rows differ", k));
            }
        }
        if self.fleet_size < 1 {
            return Err(ModelError::invalid("fleet size must be at least 1"));
        }
        if !(self.capacity > 0.0 && self.vehicle_weight > 0.0 && self.beta > 0.0) {
            return Err(ModelError::invalid("capacity, vehicle weight and beta must be positive"));
        }
        if !(self.fuel_cost >= 0.0 && self.emission_cost >= 0.0) {
            return Err(ModelError::invalid("unit costs must be non-negative"));
        }
        self.validate_levels()
    }

    fn validate_levels(&self) -> Result<(), ModelError> {
        if self.speed_levels.is_empty() {
            return Err(ModelError::invalid("at least one speed level is required"));
        }
        for (idx, l) in self.speed_levels.iter().enumerate() {
            if !(0.0 < l.lower && l.lower <= l.avg && l.avg <= l.upper) {
                return Err(ModelError::invalid_at("speed level needs 0 < lower <= avg <= upper", idx));
            }
            if !(l.bracket_start < l.bracket_end) {
                return Err(ModelError::invalid_at("empty speed bracket", idx));
            }
            if self.speed_levels[..idx].iter().any(|o| o.id == l.id) {
                return Err(ModelError::invalid_at("duplicate speed level id", idx));
            }
        }
        let mut brackets: Vec<(f64, f64)> =
            self.speed_levels.iter().map(|l| (l.bracket_start, l.bracket_end)).collect();
        brackets.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut cursor = 0.0;
        for (start, end) in brackets {
            if libm::fabs(start - cursor) > EPS {
                return Err(ModelError::invalid("speed brackets must partition [0, horizon)"));
            }
            cursor = end;
        }
        Ok(())
    }
}
