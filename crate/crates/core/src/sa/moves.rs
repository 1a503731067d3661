//! Neighbourhood moves on route sequences.
//!
//! Positions are 0-based indices into a route's customer visits (the depot
//! visits are never touched). Speed levels of changed routes are recomputed
//! from the departure-time rule after every move.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{assign_levels, Instance, Route, Solution, Visit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    /// Reverse a contiguous stretch of one route.
    Mirror,
    /// Move one customer to another position, in any route.
    Relocate,
    /// Exchange one customer each between two routes.
    Exchange,
    /// Exchange two customers within one route.
    Swap,
    /// Move a contiguous stretch of one route into another route.
    SegmentRelocate,
}

impl MoveKind {
    pub const STANDARD: [MoveKind; 4] = [MoveKind::Mirror, MoveKind::Relocate, MoveKind::Exchange, MoveKind::Swap];
    pub const ALL: [MoveKind; 5] =
        [MoveKind::Mirror, MoveKind::Relocate, MoveKind::Exchange, MoveKind::Swap, MoveKind::SegmentRelocate];

    /// 1-based kind number as used in traces.
    pub fn number(self) -> u8 {
        match self {
            Self::Mirror => 1,
            Self::Relocate => 2,
            Self::Exchange => 3,
            Self::Swap => 4,
            Self::SegmentRelocate => 5,
        }
    }

    pub fn from_number(k: u8) -> Option<Self> {
        Self::ALL.get(usize::from(k).checked_sub(1)?).copied()
    }
}

/// A fully specified move. `to_route == routes.len()` opens a new route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Mirror { route: usize, from: usize, to: usize },
    Relocate { from_route: usize, from_pos: usize, to_route: usize, to_pos: usize },
    Exchange { route_a: usize, pos_a: usize, route_b: usize, pos_b: usize },
    Swap { route: usize, a: usize, b: usize },
    SegmentRelocate { from_route: usize, start: usize, len: usize, to_route: usize, to_pos: usize },
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match self {
            Self::Mirror { .. } => MoveKind::Mirror,
            Self::Relocate { .. } => MoveKind::Relocate,
            Self::Exchange { .. } => MoveKind::Exchange,
            Self::Swap { .. } => MoveKind::Swap,
            Self::SegmentRelocate { .. } => MoveKind::SegmentRelocate,
        }
    }

    /// Applies the move to customer sequences, dropping routes left empty.
    ///
    /// # Panics
    ///
    /// If an index is out of range for `sol`.
    pub fn apply(&self, sol: &mut Solution) {
        match *self {
            Self::Mirror { route, from, to } => sol.routes[route].visits[from + 1..=to + 1].reverse(),
            Self::Swap { route, a, b } => sol.routes[route].visits.swap(a + 1, b + 1),
            Self::Exchange { route_a, pos_a, route_b, pos_b } => {
                let va = sol.routes[route_a].visits[pos_a + 1];
                let vb = core::mem::replace(&mut sol.routes[route_b].visits[pos_b + 1], va);
                sol.routes[route_a].visits[pos_a + 1] = vb;
            }
            Self::Relocate { from_route, from_pos, to_route, to_pos } => {
                let v = sol.routes[from_route].visits.remove(from_pos + 1);
                insert_run(sol, from_route, to_route, to_pos, &[v]);
            }
            Self::SegmentRelocate { from_route, start, len, to_route, to_pos } => {
                let run: Vec<Visit> = sol.routes[from_route].visits.drain(start + 1..start + 1 + len).collect();
                insert_run(sol, from_route, to_route, to_pos, &run);
            }
        }
        sol.routes.retain(|r| !r.is_empty());
    }
}

fn insert_run(sol: &mut Solution, from_route: usize, to_route: usize, to_pos: usize, run: &[Visit]) {
    if to_route == sol.routes.len() {
        let template = &sol.routes[from_route].visits;
        let (start, end) = (template[0], template[template.len() - 1]);
        let mut visits = Vec::with_capacity(run.len() + 2);
        visits.push(start);
        visits.extend_from_slice(run);
        visits.push(end);
        sol.routes.push(Route { visits });
    } else {
        let at = to_pos + 1;
        sol.routes[to_route].visits.splice(at..at, run.iter().copied());
    }
}

fn distinct_pair<R: Rng + ?Sized>(rng: &mut R, len: usize) -> (usize, usize) {
    let a = rng.gen_range(0..len);
    let mut b = rng.gen_range(0..len - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

/// Draws a random move of `kind`, or `None` if the solution admits none.
///
/// `fleet` bounds the number of routes a move may open.
pub fn sample_move<R: Rng + ?Sized>(sol: &Solution, kind: MoveKind, fleet: usize, rng: &mut R) -> Option<Move> {
    let sizes: Vec<usize> = sol.routes.iter().map(Route::customer_count).collect();
    let can_open = sol.routes.len() < fleet;
    match kind {
        MoveKind::Mirror | MoveKind::Swap => {
            let eligible: Vec<usize> = (0..sizes.len()).filter(|&r| sizes[r] >= 2).collect();
            let &route = eligible.choose(rng)?;
            let (a, b) = distinct_pair(rng, sizes[route]);
            Some(if kind == MoveKind::Mirror {
                Move::Mirror { route, from: a.min(b), to: a.max(b) }
            } else {
                Move::Swap { route, a, b }
            })
        }
        MoveKind::Exchange => {
            let eligible: Vec<usize> = (0..sizes.len()).filter(|&r| sizes[r] >= 1).collect();
            if eligible.len() < 2 {
                return None;
            }
            let (i, j) = distinct_pair(rng, eligible.len());
            let (route_a, route_b) = (eligible[i], eligible[j]);
            Some(Move::Exchange {
                route_a,
                pos_a: rng.gen_range(0..sizes[route_a]),
                route_b,
                pos_b: rng.gen_range(0..sizes[route_b]),
            })
        }
        MoveKind::Relocate => {
            let total: usize = sizes.iter().sum();
            if total == 0 {
                return None;
            }
            let mut pick = rng.gen_range(0..total);
            let from_route = sizes.iter().position(|&s| {
                if pick < s {
                    true
                } else {
                    pick -= s;
                    false
                }
            })?;
            let from_pos = pick;
            // every slot that yields a different sequence
            let mut slots: Vec<(usize, usize)> = Vec::new();
            for (r, &s) in sizes.iter().enumerate() {
                if r == from_route {
                    slots.extend((0..s).filter(|&p| p != from_pos).map(|p| (r, p)));
                } else {
                    slots.extend((0..=s).map(|p| (r, p)));
                }
            }
            if can_open && sizes[from_route] > 1 {
                slots.push((sizes.len(), 0));
            }
            let &(to_route, to_pos) = slots.choose(rng)?;
            Some(Move::Relocate { from_route, from_pos, to_route, to_pos })
        }
        MoveKind::SegmentRelocate => {
            let sources: Vec<usize> = (0..sizes.len()).filter(|&r| sizes[r] >= 1).collect();
            let &from_route = sources.choose(rng)?;
            let start = rng.gen_range(0..sizes[from_route]);
            let len = rng.gen_range(1..=sizes[from_route] - start);
            let mut targets: Vec<usize> = (0..sizes.len()).filter(|&r| r != from_route).collect();
            if can_open && len < sizes[from_route] {
                targets.push(sizes.len());
            }
            let &to_route = targets.choose(rng)?;
            let to_pos = if to_route == sizes.len() { 0 } else { rng.gen_range(0..=sizes[to_route]) };
            Some(Move::SegmentRelocate { from_route, start, len, to_route, to_pos })
        }
    }
}

/// Result of [`neighbor`]. `applied` is `None` when no move was possible.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub solution: Solution,
    pub applied: Option<Move>,
}

impl Neighbor {
    pub fn is_noop(&self) -> bool {
        self.applied.is_none()
    }
}

/// Applies a random move of `kind`. A degenerate request (for example an
/// exchange on a single route) is retried with other kinds from `kinds`, four
/// draws in total; if all fail the input comes back unchanged.
pub fn neighbor<R: Rng + ?Sized>(
    inst: &Instance,
    sol: &Solution,
    kind: MoveKind,
    kinds: &[MoveKind],
    depart_time: f64,
    rng: &mut R,
) -> Neighbor {
    let mut kind = kind;
    for attempt in 0..4 {
        if let Some(mv) = sample_move(sol, kind, inst.fleet_size, rng) {
            let mut next = sol.clone();
            mv.apply(&mut next);
            for route in &mut next.routes {
                assign_levels(inst, route, depart_time);
            }
            return Neighbor { solution: next, applied: Some(mv) };
        }
        if attempt < 3 {
            let others: Vec<MoveKind> = kinds.iter().copied().filter(|&k| k != kind).collect();
            kind = others.choose(rng).copied().unwrap_or(kind);
        }
    }
    Neighbor { solution: sol.clone(), applied: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::testing::line;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fig1() -> (Instance, Solution) {
        let inst = line(&[1.0; 10]);
        let sol = Solution::from_sequences(&inst, &[vec![3, 5, 7, 8], vec![2, 4, 6], vec![1, 9, 10]], 1);
        (inst, sol)
    }

    #[test]
    fn mirror_reverses_segment() {
        let (_, mut sol) = fig1();
        // positions 2..4 counted from one
        Move::Mirror { route: 0, from: 1, to: 3 }.apply(&mut sol);
        assert_eq!(sol.customer_sequences()[0], [3, 8, 7, 5]);
    }

    #[test]
    fn swap_within_route() {
        let (_, mut sol) = fig1();
        Move::Swap { route: 1, a: 0, b: 2 }.apply(&mut sol);
        assert_eq!(sol.customer_sequences()[1], [6, 4, 2]);
    }

    #[test]
    fn exchange_between_routes() {
        let (_, mut sol) = fig1();
        Move::Exchange { route_a: 0, pos_a: 0, route_b: 2, pos_b: 2 }.apply(&mut sol);
        assert_eq!(sol.customer_sequences(), [vec![10, 5, 7, 8], vec![2, 4, 6], vec![1, 9, 3]]);
    }

    #[test]
    fn relocate_into_other_route_and_new_route() {
        let (_, mut sol) = fig1();
        Move::Relocate { from_route: 1, from_pos: 1, to_route: 0, to_pos: 4 }.apply(&mut sol);
        assert_eq!(sol.customer_sequences(), [vec![3, 5, 7, 8, 4], vec![2, 6], vec![1, 9, 10]]);
        Move::Relocate { from_route: 1, from_pos: 0, to_route: 3, to_pos: 0 }.apply(&mut sol);
        assert_eq!(sol.customer_sequences(), [vec![3, 5, 7, 8, 4], vec![6], vec![1, 9, 10], vec![2]]);
    }

    #[test]
    fn relocate_drops_emptied_route() {
        let inst = line(&[1.0; 3]);
        let mut sol = Solution::from_sequences(&inst, &[vec![1], vec![2, 3]], 1);
        Move::Relocate { from_route: 0, from_pos: 0, to_route: 1, to_pos: 1 }.apply(&mut sol);
        assert_eq!(sol.customer_sequences(), [vec![2, 1, 3]]);
    }

    #[test]
    fn segment_relocation() {
        let (_, mut sol) = fig1();
        Move::SegmentRelocate { from_route: 0, start: 1, len: 2, to_route: 1, to_pos: 3 }.apply(&mut sol);
        assert_eq!(sol.customer_sequences(), [vec![3, 8], vec![2, 4, 6, 5, 7], vec![1, 9, 10]]);
    }

    #[test]
    fn degenerate_exchange_falls_back() {
        let inst = line(&[1.0; 3]);
        let sol = Solution::from_sequences(&inst, &[vec![1, 2, 3]], 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(sample_move(&sol, MoveKind::Exchange, 3, &mut rng).is_none());
        let nb = neighbor(&inst, &sol, MoveKind::Exchange, &MoveKind::STANDARD, 0.0, &mut rng);
        assert!(!nb.is_noop());
        assert_ne!(nb.applied.unwrap().kind(), MoveKind::Exchange);
    }

    #[test]
    fn single_customer_has_no_moves() {
        let inst = line(&[1.0]);
        let sol = Solution::from_sequences(&inst, &[vec![1]], 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let nb = neighbor(&inst, &sol, MoveKind::Relocate, &MoveKind::STANDARD, 0.0, &mut rng);
        assert!(nb.is_noop());
        assert_eq!(nb.solution, sol);
    }

    #[test]
    fn kind_numbers_round_trip() {
        for k in MoveKind::ALL {
            assert_eq!(MoveKind::from_number(k.number()), Some(k));
        }
        assert_eq!(MoveKind::from_number(0), None);
        assert_eq!(MoveKind::from_number(6), None);
    }

    proptest! {
        #[test]
        fn moves_preserve_coverage_and_depots(seed in any::<u64>(), kind in 1u8..=5, fleet in 1usize..6) {
            let inst = line(&[1.0; 9]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut perm: Vec<usize> = (1..=9).collect();
            perm.shuffle(&mut rng);
            let cut = rng.gen_range(1..9);
            let seqs = if fleet > 1 { vec![perm[..cut].to_vec(), perm[cut..].to_vec()] } else { vec![perm] };
            let mut inst = inst;
            inst.fleet_size = fleet.max(seqs.len());
            let sol = Solution::from_sequences(&inst, &seqs, 1);
            let kind = MoveKind::from_number(kind).unwrap();
            let nb = neighbor(&inst, &sol, kind, &MoveKind::ALL, 0.0, &mut rng);
            let mut served: Vec<usize> = nb.solution.routes.iter().flat_map(|r| r.customers()).collect();
            served.sort_unstable();
            prop_assert_eq!(served, (1..=9).collect::<Vec<_>>());
            prop_assert!(nb.solution.routes.len() <= inst.fleet_size);
            for r in &nb.solution.routes {
                prop_assert_eq!(r.visits[0].node, 0);
                prop_assert_eq!(r.visits.last().unwrap().node, 10);
                prop_assert!(!r.is_empty());
            }
        }
    }
}
