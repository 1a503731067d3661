//! Simulated annealing over route sequences.
//!
//! Each step draws a move kind uniformly, generates neighbours until one is
//! feasible (at most `attempts_cap` tries, otherwise the step is skipped) and
//! accepts it by the Metropolis rule. Temperature falls geometrically once per
//! epoch of `moves_per_temp` steps.

mod initial;
mod moves;

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{check_route, evaluate, Instance, ObjectiveBreakdown, Solution};

pub use initial::{initial_solution, InitialSolution};
pub use moves::{neighbor, sample_move, Move, MoveKind, Neighbor};

#[derive(Debug, Clone, PartialEq)]
pub struct SaConfig {
    pub t_initial: f64,
    pub t_final: f64,
    /// Temperature factor applied after each epoch.
    pub cooling: f64,
    /// Neighbour generations per step; `None` means `n + 50`.
    pub attempts_cap: Option<usize>,
    /// Steps per epoch; `None` means `n`.
    pub moves_per_temp: Option<usize>,
    pub seed: u64,
    /// Divide Δ by the current objective before the Metropolis test.
    pub normalize_delta: bool,
    /// Add segment relocation between routes as a fifth move kind.
    pub segment_relocation: bool,
    /// Departure time of every vehicle from the depot.
    pub depart_time: f64,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self {
            t_initial: 1.0,
            t_final: 0.001,
            cooling: 0.97,
            attempts_cap: None,
            moves_per_temp: None,
            seed: 0,
            normalize_delta: true,
            segment_relocation: false,
            depart_time: 0.0,
        }
    }
}

impl SaConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn attempts_for(&self, inst: &Instance) -> usize {
        self.attempts_cap.unwrap_or(inst.n() + 50)
    }

    pub fn moves_for(&self, inst: &Instance) -> usize {
        self.moves_per_temp.unwrap_or(inst.n()).max(1)
    }

    pub fn kinds(&self) -> &'static [MoveKind] {
        if self.segment_relocation {
            &MoveKind::ALL
        } else {
            &MoveKind::STANDARD
        }
    }

    pub fn validate(&self) -> Result<(), AnnealError> {
        let bad = |reason| Err(AnnealError::InvalidConfig(reason));
        if !(self.t_final > 0.0 && self.t_final < self.t_initial && self.t_initial.is_finite()) {
            return bad("temperatures must satisfy 0 < t_final < t_initial");
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return bad("cooling factor must lie in (0, 1)");
        }
        if self.attempts_cap == Some(0) || self.moves_per_temp == Some(0) {
            return bad("attempt cap and epoch length must be at least 1");
        }
        if !self.depart_time.is_finite() {
            return bad("departure time must be finite");
        }
        Ok(())
    }
}

/// One annealing step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub epoch: usize,
    pub temperature: f64,
    /// Objective after the step.
    pub current: f64,
    pub best: f64,
    pub accepted: bool,
    /// Kind of the proposed move; `None` for a skipped step.
    pub kind: Option<MoveKind>,
    /// Objective change of the proposal; `None` for a skipped step.
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnealTrace {
    pub rows: Vec<TraceRow>,
}

impl AnnealTrace {
    pub fn epochs(&self) -> usize {
        self.rows.last().map_or(0, |r| r.epoch + 1)
    }

    pub fn best_is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].best <= w[0].best)
    }

    /// Fraction of worsening proposals accepted in `epoch`, if any were made.
    pub fn worsening_acceptance(&self, epoch: usize) -> Option<f64> {
        let worse: Vec<bool> = self
            .rows
            .iter()
            .filter(|r| r.epoch == epoch && r.delta.is_some_and(|d| d > 0.0))
            .map(|r| r.accepted)
            .collect();
        (!worse.is_empty()).then(|| worse.iter().filter(|&&a| a).count() as f64 / worse.len() as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Annealed {
    pub solution: Solution,
    pub objective: ObjectiveBreakdown,
    pub initial: InitialSolution,
    pub trace: AnnealTrace,
    /// Neighbour generations across the whole run.
    pub neighbors_generated: usize,
    pub skipped_steps: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnnealError {
    #[error("invalid annealing configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("no feasible initial solution found after {} permutations", .0.restarts + 1)]
    Unsolved(InitialSolution),
}

/// Route-by-route feasibility plus the fleet limit. Moves preserve coverage,
/// so the assignment check is not repeated.
fn feasible_after(inst: &Instance, sol: &Solution, depart_time: f64) -> bool {
    sol.routes.len() <= inst.fleet_size
        && sol.routes.iter().enumerate().all(|(i, r)| check_route(inst, i, r, depart_time).is_feasible())
}

/// Runs simulated annealing from the construction heuristic's solution.
pub fn anneal(inst: &Instance, cfg: &SaConfig) -> Result<Annealed, AnnealError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let attempts = cfg.attempts_for(inst);
    let steps = cfg.moves_for(inst);
    let kinds = cfg.kinds();

    let init = initial_solution(inst, attempts, cfg.depart_time, &mut rng);
    if !init.feasible {
        return Err(AnnealError::Unsolved(init));
    }
    let mut current = init.solution.clone();
    let mut current_cost = evaluate(inst, &current).expect("constructed solution is well formed").total;
    let mut best = current.clone();
    let mut best_cost = current_cost;

    let mut trace = AnnealTrace::default();
    let mut neighbors_generated = 0;
    let mut skipped_steps = 0;
    let mut temperature = cfg.t_initial;
    let mut epoch = 0;
    while temperature >= cfg.t_final {
        for _ in 0..steps {
            let kind = *kinds.choose(&mut rng).expect("at least one move kind");
            let mut proposal = None;
            for _ in 0..attempts {
                neighbors_generated += 1;
                let nb = neighbor(inst, &current, kind, kinds, cfg.depart_time, &mut rng);
                let Some(mv) = nb.applied else { break };
                if feasible_after(inst, &nb.solution, cfg.depart_time) {
                    proposal = Some((nb.solution, mv.kind()));
                    break;
                }
            }
            let Some((candidate, applied)) = proposal else {
                skipped_steps += 1;
                trace.rows.push(TraceRow {
                    epoch,
                    temperature,
                    current: current_cost,
                    best: best_cost,
                    accepted: false,
                    kind: None,
                    delta: None,
                });
                continue;
            };
            let cost = evaluate(inst, &candidate).expect("moves keep solutions well formed").total;
            let delta = cost - current_cost;
            let accepted = delta <= 0.0 || {
                let scaled = if cfg.normalize_delta && current_cost != 0.0 { delta / current_cost.abs() } else { delta };
                rng.gen::<f64>() < libm::exp(-scaled / temperature)
            };
            if accepted {
                current = candidate;
                current_cost = cost;
                if cost < best_cost {
                    best = current.clone();
                    best_cost = cost;
                }
            }
            trace.rows.push(TraceRow {
                epoch,
                temperature,
                current: current_cost,
                best: best_cost,
                accepted,
                kind: Some(applied),
                delta: Some(delta),
            });
        }
        temperature *= cfg.cooling;
        epoch += 1;
    }

    debug_assert!(crate::model::check_feasibility(inst, &best, cfg.depart_time).is_feasible());
    let objective = evaluate(inst, &best).expect("best solution is well formed");
    Ok(Annealed { solution: best, objective, initial: init, trace, neighbors_generated, skipped_steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instgen::{generate, GenSpec};
    use crate::model::check_feasibility;
    use crate::model::testing::{line, single_customer};

    #[test]
    fn defaults() {
        let cfg = SaConfig::default();
        assert_eq!((cfg.t_initial, cfg.t_final, cfg.cooling), (1.0, 0.001, 0.97));
        let inst = line(&[1.0; 7]);
        assert_eq!(cfg.attempts_for(&inst), 57);
        assert_eq!(cfg.moves_for(&inst), 7);
        assert_eq!(cfg.kinds().len(), 4);
        assert_eq!(cfg.validate(), Ok(()));
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            SaConfig { t_final: 2.0, ..SaConfig::default() },
            SaConfig { t_final: 0.0, ..SaConfig::default() },
            SaConfig { cooling: 1.0, ..SaConfig::default() },
            SaConfig { attempts_cap: Some(0), ..SaConfig::default() },
            SaConfig { moves_per_temp: Some(0), ..SaConfig::default() },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(AnnealError::InvalidConfig(_))), "{cfg:?}");
        }
    }

    #[test]
    fn one_customer_returns_forced_route() {
        let inst = single_customer();
        let out = anneal(&inst, &SaConfig::default()).unwrap();
        assert_eq!(out.solution.customer_sequences(), [vec![1]]);
        assert_eq!(out.objective, evaluate(&inst, &out.solution).unwrap());
        assert_eq!(out.objective.total, 74.5);
    }

    #[test]
    fn epoch_count_follows_cooling_schedule() {
        let inst = line(&[1.0; 4]);
        let out = anneal(&inst, &SaConfig::default()).unwrap();
        // 0.97^k >= 0.001 for k = 0..=226
        assert_eq!(out.trace.epochs(), 227);
        assert_eq!(out.trace.rows.len(), 227 * 4);
    }

    #[test]
    fn result_is_feasible_and_best_monotone() {
        for seed in 0..5 {
            let inst = generate(&GenSpec::new(8, seed).with_fleet(8)).unwrap();
            let out = anneal(&inst, &SaConfig::with_seed(seed)).unwrap();
            assert!(check_feasibility(&inst, &out.solution, 0.0).is_feasible());
            assert!(out.trace.best_is_monotone());
            let last = out.trace.rows.last().unwrap();
            assert_eq!(last.best, out.objective.total);
            let first_current = evaluate(&inst, &out.initial.solution).unwrap().total;
            assert!(out.objective.total <= first_current);
        }
    }

    #[test]
    fn identical_seed_identical_run() {
        let inst = generate(&GenSpec::new(7, 11).with_fleet(7)).unwrap();
        let cfg = SaConfig::with_seed(42);
        assert_eq!(anneal(&inst, &cfg).unwrap(), anneal(&inst, &cfg).unwrap());
        let other = anneal(&inst, &SaConfig::with_seed(43)).unwrap();
        assert_ne!(anneal(&inst, &cfg).unwrap().trace, other.trace);
    }

    #[test]
    fn segment_relocation_kind_is_used_when_enabled() {
        let inst = generate(&GenSpec::new(8, 2).with_fleet(8)).unwrap();
        let cfg = SaConfig { segment_relocation: true, ..SaConfig::with_seed(3) };
        let out = anneal(&inst, &cfg).unwrap();
        assert!(out.trace.rows.iter().any(|r| r.kind == Some(MoveKind::SegmentRelocate)));
        let plain = anneal(&inst, &SaConfig::with_seed(3)).unwrap();
        assert!(plain.trace.rows.iter().all(|r| r.kind != Some(MoveKind::SegmentRelocate)));
    }

    #[test]
    fn infeasible_instance_is_unsolved() {
        let mut inst = line(&[1.0, 1.0]);
        inst.nodes[2].tw_close = 0.01;
        assert!(matches!(anneal(&inst, &SaConfig::default()), Err(AnnealError::Unsolved(i)) if !i.feasible));
    }

    #[test]
    fn raw_delta_freezes_acceptance() {
        let inst = generate(&GenSpec::new(8, 4).with_fleet(8)).unwrap();
        let raw = anneal(&inst, &SaConfig { normalize_delta: false, ..SaConfig::with_seed(1) }).unwrap();
        assert_eq!(raw.trace.worsening_acceptance(0).unwrap_or(0.0), 0.0);
        let scaled = anneal(&inst, &SaConfig::with_seed(1)).unwrap();
        assert!(scaled.trace.worsening_acceptance(0).unwrap() > 0.5);
    }
}
