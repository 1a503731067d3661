//! Plain-text instance files.
//!
//! ```text
//! [meta]
//! n = 2
//! fleet_size = 1
//! vehicle_weight = 10
//! capacity = 10
//! fuel_cost = 50
//! emission_cost = 50
//! beta = 0.01
//! alpha = 1
//! emission_slope = 1
//! emission_intercept = 0
//!
//! [levels]
//! # id lower avg upper bracket_start bracket_end
//! 1 40 60 60 0 8
//! 2 30 50 50 8 16
//!
//! [nodes]
//! # id x y demand service tw_open tw_close
//! 0 50 50 0 0 0 16
//! 1 20 70 2 0.3 1 4
//! 2 80 10 1 0.2 5 7.5
//! 3 50 50 0 0 0 16
//! ```
//!
//! Distances default to Euclidean; an optional `[distances]` section gives the
//! full matrix row by row, and an optional `[alpha]` section does the same for
//! the road coefficients, replacing the scalar `alpha`. The end depot line
//! (id `n + 1`) may be left out, in which case it copies the start depot.
//! `#` starts a comment.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use greenroute_core::model::{Instance, Matrix, Node, SpeedLevel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, message: message.into() })
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Meta,
    Levels,
    Nodes,
    Distances,
    Alpha,
}

fn fields<T: FromStr>(line: usize, text: &str, expected: usize) -> Result<Vec<T>, ParseError> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    if parts.len() != expected {
        return err(line, format!("expected {expected} values, found {}", parts.len()));
    }
    parts.iter().map(|p| p.parse().or_else(|_| err(line, format!("cannot parse {p:?}")))).collect()
}

fn row_values(line: usize, text: &str) -> Result<Vec<f64>, ParseError> {
    text.split_whitespace().map(|p| p.parse().or_else(|_| err(line, format!("cannot parse {p:?}")))).collect()
}

/// Parses an instance and checks it with [`Instance::validate`].
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut section = Section::None;
    let mut meta: HashMap<String, (usize, String)> = HashMap::new();
    let mut levels = Vec::new();
    let mut nodes: Vec<(usize, Node)> = Vec::new();
    let mut distances: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut alpha_rows: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = match name.trim() {
                "meta" => Section::Meta,
                "levels" => Section::Levels,
                "nodes" => Section::Nodes,
                "distances" => Section::Distances,
                "alpha" => Section::Alpha,
                other => return err(line, format!("unknown section [{other}]")),
            };
            continue;
        }
        match section {
            Section::None => return err(line, "content before the first section"),
            Section::Meta => {
                let Some((key, value)) = content.split_once('=') else {
                    return err(line, "expected key = value");
                };
                meta.insert(key.trim().to_string(), (line, value.trim().to_string()));
            }
            Section::Levels => {
                let v: Vec<f64> = fields(line, content, 6)?;
                if v[0] < 0.0 || v[0].fract() != 0.0 {
                    return err(line, "level id must be a non-negative integer");
                }
                levels.push(SpeedLevel {
                    id: v[0] as u32,
                    lower: v[1],
                    avg: v[2],
                    upper: v[3],
                    bracket_start: v[4],
                    bracket_end: v[5],
                });
            }
            Section::Nodes => {
                let v: Vec<f64> = fields(line, content, 7)?;
                if v[0] < 0.0 || v[0].fract() != 0.0 {
                    return err(line, "node id must be a non-negative integer");
                }
                let id = v[0] as usize;
                nodes.push((line, Node { id, x: v[1], y: v[2], demand: v[3], service: v[4], tw_open: v[5], tw_close: v[6] }));
            }
            Section::Distances => distances.push((line, row_values(line, content)?)),
            Section::Alpha => alpha_rows.push((line, row_values(line, content)?)),
        }
    }

    let get = |key: &str| -> Result<(usize, &str), ParseError> {
        meta.get(key).map(|(l, v)| (*l, v.as_str())).ok_or(ParseError { line: last_line, message: format!("missing meta key {key}") })
    };
    fn num<T: FromStr>((line, value): (usize, &str), key: &str) -> Result<T, ParseError> {
        value.parse().or_else(|_| err(line, format!("invalid value {value:?} for {key}")))
    }
    let n: usize = num(get("n")?, "n")?;
    let fleet_size: usize = num(get("fleet_size")?, "fleet_size")?;
    let vehicle_weight: f64 = num(get("vehicle_weight")?, "vehicle_weight")?;
    let capacity: f64 = num(get("capacity")?, "capacity")?;
    let fuel_cost: f64 = num(get("fuel_cost")?, "fuel_cost")?;
    let emission_cost: f64 = num(get("emission_cost")?, "emission_cost")?;
    let beta: f64 = num(get("beta")?, "beta")?;
    let emission_slope: f64 = meta.get("emission_slope").map_or(Ok(1.0), |(l, v)| num((*l, v), "emission_slope"))?;
    let emission_intercept: f64 =
        meta.get("emission_intercept").map_or(Ok(0.0), |(l, v)| num((*l, v), "emission_intercept"))?;

    if levels.is_empty() {
        return err(last_line, "no [levels] given");
    }
    nodes.sort_by_key(|(_, node)| node.id);
    if nodes.len() == n + 1 {
        if let Some((line, depot)) = nodes.first().cloned().filter(|(_, d)| d.id == 0) {
            nodes.push((line, Node { id: n + 1, ..depot }));
        }
    }
    if nodes.len() != n + 2 {
        return err(last_line, format!("expected {} nodes for n = {n}, found {}", n + 2, nodes.len()));
    }
    for (pos, (line, node)) in nodes.iter().enumerate() {
        if node.id != pos {
            return err(*line, format!("node ids must run 0..={}, found {}", n + 1, node.id));
        }
    }
    let nodes: Vec<Node> = nodes.into_iter().map(|(_, node)| node).collect();
    let dim = nodes.len();
    let matrix = |rows: Vec<(usize, Vec<f64>)>, what: &str| -> Result<Matrix, ParseError> {
        if rows.len() != dim {
            return err(rows.last().map_or(last_line, |r| r.0), format!("[{what}] needs {dim} rows"));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (line, row) in rows {
            if row.len() != dim {
                return err(line, format!("[{what}] rows need {dim} values"));
            }
            data.extend(row);
        }
        Ok(Matrix::from_rows(dim, data).expect("dimensions checked"))
    };
    let distances = if distances.is_empty() { Matrix::euclidean(&nodes) } else { matrix(distances, "distances")? };
    let alpha = if alpha_rows.is_empty() {
        Matrix::broadcast(dim, num(get("alpha")?, "alpha")?)
    } else {
        matrix(alpha_rows, "alpha")?
    };

    let inst = Instance {
        nodes,
        distances,
        fleet_size,
        vehicle_weight,
        capacity,
        fuel_cost,
        emission_cost,
        alpha,
        beta,
        speed_levels: levels,
        emission_params: (emission_slope, emission_intercept),
    };
    inst.validate().or_else(|e| err(last_line, e.to_string()))?;
    Ok(inst)
}

fn matrix_lines(out: &mut String, m: &Matrix) {
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", cells.join(" ")).unwrap();
    }
}

/// Writes `inst` in the format read by [`parse_instance`]. Matrices are only
/// written out when they differ from what the reader would derive.
pub fn write_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let uniform_alpha = inst.alpha.uniform_value();
    out.push_str("[meta]\n");
    writeln!(out, "n = {}", inst.n()).unwrap();
    writeln!(out, "fleet_size = {}", inst.fleet_size).unwrap();
    writeln!(out, "vehicle_weight = {}", inst.vehicle_weight).unwrap();
    writeln!(out, "capacity = {}", inst.capacity).unwrap();
    writeln!(out, "fuel_cost = {}", inst.fuel_cost).unwrap();
    writeln!(out, "emission_cost = {}", inst.emission_cost).unwrap();
    writeln!(out, "beta = {}", inst.beta).unwrap();
    if let Some(a) = uniform_alpha {
        writeln!(out, "alpha = {a}").unwrap();
    }
    writeln!(out, "emission_slope = {}", inst.emission_params.0).unwrap();
    writeln!(out, "emission_intercept = {}", inst.emission_params.1).unwrap();

    out.push_str("\n[levels]\n# id lower avg upper bracket_start bracket_end\n");
    for l in &inst.speed_levels {
        writeln!(out, "{} {} {} {} {} {}", l.id, l.lower, l.avg, l.upper, l.bracket_start, l.bracket_end).unwrap();
    }
    out.push_str("\n[nodes]\n# id x y demand service tw_open tw_close\n");
    for n in &inst.nodes {
        writeln!(out, "{} {} {} {} {} {} {}", n.id, n.x, n.y, n.demand, n.service, n.tw_open, n.tw_close).unwrap();
    }
    if inst.distances != Matrix::euclidean(&inst.nodes) {
        out.push_str("\n[distances]\n");
        matrix_lines(&mut out, &inst.distances);
    }
    if uniform_alpha.is_none() {
        out.push_str("\n[alpha]\n");
        matrix_lines(&mut out, &inst.alpha);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use greenroute_core::instgen::{generate, GenSpec};

    const SMALL: &str = "\
[meta]
n = 2
fleet_size = 1
vehicle_weight = 10
capacity = 10
fuel_cost = 50
emission_cost = 50
beta = 0.01
alpha = 1

[levels]
1 40 60 60 0 8
2 30 50 50 8 16

[nodes]
0 50 50 0 0 0 16   # depot
1 20 70 2 0.3 1 4
2 80 10 1 0.2 5 7.5
";

    #[test]
    fn end_depot_defaults_to_start_depot() {
        let inst = parse_instance(SMALL).unwrap();
        assert_eq!(inst.n(), 2);
        assert_eq!(inst.nodes[3].id, 3);
        assert_eq!((inst.nodes[3].x, inst.nodes[3].tw_close), (50.0, 16.0));
        assert_eq!(inst.emission_params, (1.0, 0.0));
    }

    #[test]
    fn generated_instances_round_trip() {
        for seed in 0..10 {
            let inst = generate(&GenSpec::new(12, seed)).unwrap();
            let text = write_instance(&inst);
            assert!(!text.contains("[distances]"));
            assert_eq!(parse_instance(&text).unwrap(), inst);
        }
    }

    #[test]
    fn explicit_matrices_round_trip() {
        let mut inst = parse_instance(SMALL).unwrap();
        inst.distances.set(1, 2, 1234.5);
        inst.alpha.set(0, 1, 1.5);
        let text = write_instance(&inst);
        assert!(text.contains("[distances]") && text.contains("[alpha]"));
        assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = SMALL.replace("1 20 70 2 0.3 1 4", "1 20 70 2 0.3 1");
        assert_eq!(parse_instance(&bad).unwrap_err().line, 17);
        let bad = SMALL.replace("beta = 0.01", "beta = fast");
        assert_eq!(parse_instance(&bad).unwrap_err().line, 8);
        let bad = SMALL.replace("[levels]", "[speeds]");
        assert_eq!(parse_instance(&bad).unwrap_err().line, 11);
        let bad = SMALL.replace("alpha = 1\n", "");
        assert!(parse_instance(&bad).unwrap_err().message.contains("alpha"));
    }

    #[test]
    fn invalid_instances_are_rejected() {
        let bad = SMALL.replace("2 30 50 50 8 16", "2 30 50 50 9 16");
        assert!(parse_instance(&bad).unwrap_err().message.contains("invalid instance"));
    }
}
