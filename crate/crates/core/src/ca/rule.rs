use std::fmt::{self, Write as _};

use super::CaError;
use crate::automata::Track;

/// A one-dimensional cellular automaton: states `Q`, radius `r` and a local
/// rule `Q^(2r+1) -> Q`.
///
/// States are referred to by index into [`CaRule::states`]. Neighbourhoods are
/// indexed in base `|Q|` with the leftmost cell most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaRule {
    states: Vec<String>,
    radius: usize,
    table: Vec<usize>,
    quiescent: Option<usize>,
}

const MAX_TABLE: usize = 1 << 20;

impl CaRule {
    pub fn new(
        states: Vec<String>,
        radius: usize,
        table: Vec<usize>,
        quiescent: Option<usize>,
    ) -> Result<Self, CaError> {
        if states.is_empty() {
            return Err(CaError::NoStates);
        }
        for (i, s) in states.iter().enumerate() {
            Track::new("q", [s.as_str()]).map_err(|_| CaError::InvalidStateName(s.clone()))?;
            if states[..i].contains(s) {
                return Err(CaError::InvalidStateName(s.clone()));
            }
        }
        if radius == 0 {
            return Err(CaError::BadRadius);
        }
        let size = neighbourhood_count(states.len(), radius).ok_or(CaError::TableTooLarge)?;
        if table.len() != size {
            return Err(CaError::IncompleteTable(format!(
                "{} of {} neighbourhoods defined",
                table.len(),
                size
            )));
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= states.len()) {
            return Err(CaError::UnknownState(bad.to_string()));
        }
        let rule = CaRule {
            states,
            radius,
            table,
            quiescent: None,
        };
        match quiescent {
            Some(q) if q >= rule.states.len() => Err(CaError::UnknownState(q.to_string())),
            Some(q) if rule.apply(&vec![q; rule.width()]) != q => {
                Err(CaError::QuiescentViolation(rule.states[q].clone()))
            }
            _ => Ok(CaRule { quiescent, ..rule }),
        }
    }

    /// Builds the table by evaluating `f` on every neighbourhood.
    pub fn from_fn(
        states: Vec<String>,
        radius: usize,
        quiescent: Option<usize>,
        f: impl Fn(&[usize]) -> usize,
    ) -> Result<Self, CaError> {
        let size = neighbourhood_count(states.len(), radius).ok_or(CaError::TableTooLarge)?;
        let width = 2 * radius + 1;
        let q = states.len();
        let mut cells = vec![0; width];
        let table = (0..size)
            .map(|mut idx| {
                for c in cells.iter_mut().rev() {
                    *c = idx % q;
                    idx /= q;
                }
                f(&cells)
            })
            .collect();
        CaRule::new(states, radius, table, quiescent)
    }

    /// Elementary rule in Wolfram numbering: `δ(l,c,r)` is bit `4l+2c+r` of `code`.
    ///
    /// The quiescent state is `0` when `δ(0,0,0)=0`, else `1` when `δ(1,1,1)=1`.
    pub fn elementary(code: u32) -> Result<Self, CaError> {
        if code > 255 {
            return Err(CaError::CodeOutOfRange(code));
        }
        let table: Vec<usize> = (0..8).map(|i| ((code >> i) & 1) as usize).collect();
        let quiescent = if table[0] == 0 {
            Some(0)
        } else if table[7] == 1 {
            Some(1)
        } else {
            None
        };
        CaRule::new(vec!["0".into(), "1".into()], 1, table, quiescent)
    }

    /// The shift `δ(…, c₀, c₁, …) = c₁` over `n` states named `0..n`.
    pub fn shift(n: usize) -> Result<Self, CaError> {
        let states = (0..n).map(|i| i.to_string()).collect();
        CaRule::from_fn(states, 1, Some(0), |w| w[2])
    }

    /// `eca:<code>` or the text of a rule table.
    pub fn parse_spec(spec: &str) -> Result<Self, CaError> {
        match spec.trim().strip_prefix("eca:") {
            Some(code) => {
                let code = code
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| CaError::BadSpec(spec.to_string()))?;
                CaRule::elementary(code)
            }
            None => CaRule::from_table_text(spec),
        }
    }

    /// Parses the rule table format:
    ///
    /// ```text
    /// states: 0,1
    /// radius: 1
    /// quiescent: 0
    /// 000 -> 0
    /// 0 0 1 -> 1
    /// ```
    pub fn from_table_text(text: &str) -> Result<Self, CaError> {
        let mut states: Option<Vec<String>> = None;
        let mut radius = None;
        let mut quiescent = None;
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| CaError::Parse { line: no, message: m };
            if let Some((lhs, rhs)) = line.split_once("->") {
                entries.push((no, lhs.trim().to_string(), rhs.trim().to_string()));
            } else if let Some((key, value)) = line.split_once(':') {
                let value = value.trim();
                match key.trim() {
                    "states" => {
                        states = Some(value.split(',').map(|s| s.trim().to_string()).collect())
                    }
                    "radius" => {
                        radius = Some(
                            value
                                .parse::<usize>()
                                .map_err(|_| err(format!("bad radius `{value}`")))?,
                        )
                    }
                    "quiescent" => quiescent = Some((no, value.to_string())),
                    other => return Err(err(format!("unknown header `{other}`"))),
                }
            } else {
                return Err(err(format!("unrecognised line `{line}`")));
            }
        }
        let states = states.ok_or(CaError::Parse {
            line: 0,
            message: "missing `states:` header".into(),
        })?;
        let radius = radius.unwrap_or(1);
        let size = neighbourhood_count(states.len(), radius).ok_or(CaError::TableTooLarge)?;
        let lookup = |s: &str, line: usize| {
            states
                .iter()
                .position(|t| t == s)
                .ok_or_else(|| CaError::Parse {
                    line,
                    message: format!("unknown state `{s}`"),
                })
        };
        let mut table: Vec<Option<usize>> = vec![None; size];
        let width = 2 * radius + 1;
        let single_chars = states.iter().all(|s| s.chars().count() == 1);
        for (line, lhs, rhs) in &entries {
            let tokens: Vec<String> = {
                let parts: Vec<&str> = lhs
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|s| !s.is_empty())
                    .collect();
                if parts.len() == 1 && single_chars && parts[0].chars().count() == width {
                    parts[0].chars().map(String::from).collect()
                } else {
                    parts.iter().map(|s| s.to_string()).collect()
                }
            };
            if tokens.len() != width {
                return Err(CaError::Parse {
                    line: *line,
                    message: format!("neighbourhood needs {width} cells"),
                });
            }
            let mut idx = 0;
            for t in &tokens {
                idx = idx * states.len() + lookup(t, *line)?;
            }
            let value = lookup(rhs, *line)?;
            if table[idx].replace(value).is_some() {
                return Err(CaError::Parse {
                    line: *line,
                    message: format!("duplicate neighbourhood `{lhs}`"),
                });
            }
        }
        let missing = table.iter().position(Option::is_none);
        if let Some(idx) = missing {
            let cells = decode_index(idx, states.len(), width);
            let names: Vec<&str> = cells.iter().map(|&c| states[c].as_str()).collect();
            return Err(CaError::IncompleteTable(names.join(" ")));
        }
        let quiescent = match quiescent {
            Some((line, q)) => Some(lookup(&q, line)?),
            None => None,
        };
        let table = table.into_iter().map(Option::unwrap).collect();
        CaRule::new(states, radius, table, quiescent)
    }

    /// Writes the rule in table format.
    pub fn to_table_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "states: {}", self.states.join(",")).unwrap();
        writeln!(out, "radius: {}", self.radius).unwrap();
        if let Some(q) = self.quiescent {
            writeln!(out, "quiescent: {}", self.states[q]).unwrap();
        }
        for (idx, &v) in self.table.iter().enumerate() {
            let cells = decode_index(idx, self.states.len(), self.width());
            let names: Vec<&str> = cells.iter().map(|&c| self.states[c].as_str()).collect();
            writeln!(out, "{} -> {}", names.join(" "), self.states[v]).unwrap();
        }
        out
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Neighbourhood width `2r+1`.
    pub fn width(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn quiescent(&self) -> Option<usize> {
        self.quiescent
    }

    /// `δ` on a neighbourhood of `2r+1` cells, leftmost first.
    pub fn apply(&self, cells: &[usize]) -> usize {
        debug_assert_eq!(cells.len(), self.width());
        let q = self.states.len();
        self.table[cells.iter().fold(0, |acc, &c| acc * q + c)]
    }

    /// The Wolfram code, for elementary rules.
    pub fn wolfram_code(&self) -> Option<u32> {
        if self.radius != 1 || self.states != ["0", "1"] {
            return None;
        }
        Some(self.table.iter().enumerate().map(|(i, &v)| (v as u32) << i).sum())
    }
}

impl fmt::Display for CaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.wolfram_code() {
            Some(code) => write!(f, "eca:{code}"),
            None => write!(f, "rule(|Q|={}, r={})", self.states.len(), self.radius),
        }
    }
}

fn neighbourhood_count(q: usize, radius: usize) -> Option<usize> {
    let width = u32::try_from(2 * radius + 1).ok()?;
    q.checked_pow(width).filter(|&n| n <= MAX_TABLE)
}

fn decode_index(mut idx: usize, q: usize, width: usize) -> Vec<usize> {
    let mut cells = vec![0; width];
    for c in cells.iter_mut().rev() {
        *c = idx % q;
        idx /= q;
    }
    cells
}
