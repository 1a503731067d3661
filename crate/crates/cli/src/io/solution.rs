//! Solution files: the encoded string on the first line, then `key=value`
//! lines (`objective`, optionally `status`).

use std::fmt::Write as _;

use greenroute_core::encoding::{decode, encode, DecodeError};
use greenroute_core::model::{Instance, Solution};

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFile {
    pub solution: Solution,
    pub objective: Option<f64>,
    pub status: Option<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolutionFileError {
    #[error("solution file is empty")]
    Empty,
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("line {line}: {message}")]
    Field { line: usize, message: String },
}

pub fn write_solution(solution: &Solution, objective: f64, status: Option<&str>) -> String {
    let mut out = encode(solution);
    write!(out, "\nobjective={objective}\n").unwrap();
    if let Some(status) = status {
        writeln!(out, "status={status}").unwrap();
    }
    out
}

pub fn parse_solution(text: &str, inst: &Instance) -> Result<SolutionFile, SolutionFileError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or(SolutionFileError::Empty)?;
    let solution = decode(first, inst)?;
    let mut file = SolutionFile { solution, objective: None, status: None };
    for (idx, line) in lines {
        let field = |message: String| SolutionFileError::Field { line: idx + 1, message };
        let (key, value) = line.split_once('=').ok_or_else(|| field("expected key=value".into()))?;
        match key.trim() {
            "objective" => {
                let v = value.trim().parse().map_err(|_| field(format!("invalid objective {value:?}")))?;
                file.objective = Some(v);
            }
            "status" => file.status = Some(value.trim().to_string()),
            other => return Err(field(format!("unknown field {other:?}"))),
        }
    }
    Ok(file)
}
