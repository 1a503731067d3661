//! Flat string form of a solution.
//!
//! Each visit is a `node,level` token, tokens are joined by `-`, and every
//! route runs from a `0,..` token to an `n+1,..` token:
//!
//! ```text
//! 0,1-3,1-5,1-11,1-0,2-1,2-9,2-11,2
//! ```
//!
//! A token's level is the level of the edge arriving at that node. The start
//! depot has no arriving edge, so its level mirrors the first edge on output
//! and is ignored on input.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::model::{Instance, LevelId, NodeId, Route, Solution, Visit};

/// Decoding failure. Positions count tokens from 1.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("empty solution string")]
    Empty,
    #[error("token {position}: malformed token {token:?}, expected <node>,<level>")]
    MalformedToken { position: usize, token: String },
    #[error("token {position}: unknown node {node}")]
    UnknownNode { position: usize, node: NodeId },
    #[error("token {position}: speed level {level} out of range")]
    LevelOutOfRange { position: usize, level: LevelId },
    #[error("token {position}: route does not start at depot 0")]
    MissingRouteStart { position: usize },
    #[error("token {position}: route opened here is not closed by the end depot")]
    UnterminatedRoute { position: usize },
}

/// Writes the token stream for `sol`.
pub fn encode(sol: &Solution) -> String {
    let mut out = String::new();
    for route in &sol.routes {
        let mirrored = route.visits.get(1).map(|v| v.speed_level);
        for (pos, visit) in route.visits.iter().enumerate() {
            if !out.is_empty() {
                out.push('-');
            }
            let level = if pos == 0 { mirrored.unwrap_or(visit.speed_level) } else { visit.speed_level };
            write!(out, "{},{}", visit.node, level).expect("writing to a String cannot fail");
        }
    }
    out
}

fn parse_token(position: usize, raw: &str) -> Result<(NodeId, LevelId), DecodeError> {
    let malformed = || DecodeError::MalformedToken { position, token: String::from(raw.trim()) };
    let (node, level) = raw.split_once(',').ok_or_else(malformed)?;
    let (node, level) = (node.trim(), level.trim());
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(node) || !digits(level) {
        return Err(malformed());
    }
    let node = node.parse().map_err(|_| malformed())?;
    let level = level.parse().map_err(|_| malformed())?;
    Ok((node, level))
}

/// Parses a solution string against `inst`.
pub fn decode(text: &str, inst: &Instance) -> Result<Solution, DecodeError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(DecodeError::Empty);
    }
    let end = inst.end_depot();
    let mut routes = Vec::new();
    let mut open: Option<(usize, Vec<Visit>)> = None;
    for (idx, raw) in text.split('-').enumerate() {
        let position = idx + 1;
        let (node, level) = parse_token(position, raw)?;
        if node > end {
            return Err(DecodeError::UnknownNode { position, node });
        }
        let is_start = node == inst.start_depot();
        if !is_start && inst.level(level).is_none() {
            return Err(DecodeError::LevelOutOfRange { position, level });
        }
        match open.as_mut() {
            None if is_start => open = Some((position, alloc::vec![Visit::new(node, level)])),
            None => return Err(DecodeError::MissingRouteStart { position }),
            Some((opened, _)) if is_start => return Err(DecodeError::UnterminatedRoute { position: *opened }),
            Some((_, visits)) => {
                visits.push(Visit::new(node, level));
                if node == end {
                    let (_, visits) = open.take().expect("route is open");
                    routes.push(Route::new(visits));
                }
            }
        }
    }
    if let Some((opened, _)) = open {
        return Err(DecodeError::UnterminatedRoute { position: opened });
    }
    Ok(Solution::new(routes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::testing::line;
    use proptest::prelude::*;

    const FIG1: &str = "0,1-3,1-5,1-7,1-8,1-11,1-0,1-2,1-4,1-6,1-11,1-0,2-1,2-9,2-10,2-11,2";

    fn ten() -> Instance {
        line(&[1.0; 10])
    }

    #[test]
    fn figure_one_plan_decodes_to_three_routes() {
        let inst = ten();
        let sol = decode(FIG1, &inst).unwrap();
        assert_eq!(sol.customer_sequences(), [vec![3, 5, 7, 8], vec![2, 4, 6], vec![1, 9, 10]]);
        assert!(sol.routes[2].visits.iter().all(|v| v.speed_level == 2));
        assert_eq!(encode(&sol), FIG1);
    }

    #[test]
    fn single_empty_route() {
        let inst = ten();
        let sol = Solution::from_sequences(&inst, &[vec![]], 1);
        assert_eq!(encode(&sol), "0,1-11,1");
        assert_eq!(decode("0,1-11,1", &inst).unwrap(), sol);
    }

    #[test]
    fn level_out_of_range_reports_position() {
        let inst = ten();
        assert_eq!(decode("0,1-3,9-11,1", &inst), Err(DecodeError::LevelOutOfRange { position: 2, level: 9 }));
    }

    #[test]
    fn start_depot_level_is_ignored() {
        let inst = ten();
        let sol = decode("0,7-3,2-11,2", &inst).unwrap();
        assert_eq!(sol.routes[0].visits[0].speed_level, 2);
    }

    #[test]
    fn malformed_inputs() {
        let inst = ten();
        assert!(matches!(decode("0,1-3-11,1", &inst), Err(DecodeError::MalformedToken { position: 2, .. })));
        assert!(matches!(decode("0,1-x,1-11,1", &inst), Err(DecodeError::MalformedToken { position: 2, .. })));
        assert!(matches!(decode("0,1-3,1-11,1-", &inst), Err(DecodeError::MalformedToken { position: 4, .. })));
        assert_eq!(decode("0,1-12,1-11,1", &inst), Err(DecodeError::UnknownNode { position: 2, node: 12 }));
        assert_eq!(decode("3,1-11,1", &inst), Err(DecodeError::MissingRouteStart { position: 1 }));
        assert_eq!(decode("0,1-3,1-0,1-11,1", &inst), Err(DecodeError::UnterminatedRoute { position: 1 }));
        assert_eq!(decode("0,1-3,1", &inst), Err(DecodeError::UnterminatedRoute { position: 1 }));
        assert_eq!(decode("  ", &inst), Err(DecodeError::Empty));
    }

    #[test]
    fn whitespace_is_normalized() {
        let inst = ten();
        let sol = decode(" 0, 1 - 3 ,1-11,1\n", &inst).unwrap();
        assert_eq!(encode(&sol), "0,1-3,1-11,1");
    }

    fn arb_solution(n: usize) -> impl Strategy<Value = Vec<Vec<(NodeId, LevelId)>>> {
        Just((1..=n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_flat_map(move |perm| {
                (proptest::collection::vec(any::<bool>(), n), proptest::collection::vec(1u32..=2, n))
                    .prop_map(move |(cuts, levels)| {
                        let mut routes = vec![Vec::new()];
                        for (k, &c) in perm.iter().enumerate() {
                            if cuts[k] && !routes.last().unwrap().is_empty() {
                                routes.push(Vec::new());
                            }
                            routes.last_mut().unwrap().push((c, levels[k]));
                        }
                        routes
                    })
            })
    }

    proptest! {
        #[test]
        fn decode_inverts_encode(routes in arb_solution(10), closing in proptest::collection::vec(1u32..=2, 10)) {
            let inst = ten();
            let sol = Solution::new(routes.iter().zip(&closing).map(|(r, &last)| {
                let mut visits = vec![Visit::new(0, 1)];
                visits.extend(r.iter().map(|&(c, l)| Visit::new(c, l)));
                visits.push(Visit::new(11, last));
                Route::new(visits)
            }).collect());
            prop_assert_eq!(decode(&encode(&sol), &inst).unwrap(), sol);
        }

        #[test]
        fn editing_one_token_changes_one_visit(routes in arb_solution(10), pick in any::<prop::sample::Index>()) {
            let inst = ten();
            let sol = Solution::from_sequences(&inst, &routes.iter().map(|r| r.iter().map(|p| p.0).collect()).collect::<Vec<_>>(), 1);
            let text = encode(&sol);
            let mut tokens: Vec<String> = text.split('-').map(String::from).collect();
            // customer tokens that are not the first of their route (whose level is mirrored)
            let editable: Vec<usize> = (1..tokens.len())
                .filter(|&i| !tokens[i].starts_with("0,") && !tokens[i].starts_with("11,") && !tokens[i - 1].starts_with("0,"))
                .collect();
            prop_assume!(!editable.is_empty());
            let at = editable[pick.index(editable.len())];
            let node = tokens[at].split(',').next().unwrap().to_string();
            tokens[at] = alloc::format!("{node},2");
            let edited = decode(&tokens.join("-"), &inst).unwrap();
            let before: Vec<Visit> = sol.routes.iter().flat_map(|r| r.visits.clone()).collect();
            let after: Vec<Visit> = edited.routes.iter().flat_map(|r| r.visits.clone()).collect();
            let changed = before.iter().zip(&after).filter(|(a, b)| a != b).count();
            prop_assert_eq!(changed, 1);
        }
    }
}
