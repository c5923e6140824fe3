//! Line-oriented exchange format.
//!
//! ```text
//! alphabet: x=a,b; y=0,1
//! states: 2
//! initial: 0
//! accepting: 1
//! 0 (a,0) 1
//! 1 (b,1) 1
//! ```
//!
//! `#` starts a comment. Several initial states are accepted on input and
//! normalised with a fresh initial state.

use std::fmt::Write as _;

use super::{Alphabet, AutomatonError, BuchiAutomaton, Track};

fn err(line: usize, message: impl Into<String>) -> AutomatonError {
    AutomatonError::Parse {
        line,
        message: message.into(),
    }
}

fn header<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.strip_prefix(key)
        .and_then(|r| r.trim_start().strip_prefix(':'))
        .map(str::trim)
}

fn parse_list(text: &str, line: usize) -> Result<Vec<usize>, AutomatonError> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| err(line, format!("bad state id `{}`", s.trim())))
        })
        .collect()
}

impl BuchiAutomaton {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "alphabet: {}", self.alphabet()).unwrap();
        writeln!(out, "states: {}", self.state_count()).unwrap();
        writeln!(out, "initial: {}", self.initial()).unwrap();
        let acc: Vec<String> = self.accepting_states().map(|q| q.to_string()).collect();
        writeln!(out, "accepting: {}", acc.join(",")).unwrap();
        for (p, l, q) in self.transitions() {
            writeln!(out, "{} {} {}", p, self.alphabet().format_letter(l), q).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<BuchiAutomaton, AutomatonError> {
        let mut alphabet = None;
        let mut states = None;
        let mut initial = None;
        let mut accepting = None;
        let mut transitions = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = header(line, "alphabet") {
                let mut tracks = Vec::new();
                for part in rest.split(';').map(str::trim).filter(|p| !p.is_empty()) {
                    let (id, syms) = part
                        .split_once('=')
                        .ok_or_else(|| err(no, format!("bad track `{part}`")))?;
                    let symbols: Vec<&str> = syms.split(',').map(str::trim).collect();
                    tracks.push(Track::new(id.trim(), symbols).map_err(|e| err(no, e.to_string()))?);
                }
                alphabet = Some(Alphabet::new(tracks).map_err(|e| err(no, e.to_string()))?);
            } else if let Some(rest) = header(line, "states") {
                states = Some(
                    rest.parse::<usize>()
                        .map_err(|_| err(no, format!("bad state count `{rest}`")))?,
                );
            } else if let Some(rest) = header(line, "initial") {
                initial = Some(parse_list(rest, no)?);
            } else if let Some(rest) = header(line, "accepting") {
                accepting = Some(parse_list(rest, no)?);
            } else {
                let alphabet = alphabet
                    .as_ref()
                    .ok_or_else(|| err(no, "transition before alphabet header"))?;
                let open = line.find('(').ok_or_else(|| err(no, "missing letter"))?;
                let close = line.rfind(')').ok_or_else(|| err(no, "missing letter"))?;
                if close < open {
                    return Err(err(no, "malformed letter"));
                }
                let p = line[..open]
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| err(no, "bad source state"))?;
                let q = line[close + 1..]
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| err(no, "bad target state"))?;
                let l = alphabet
                    .parse_letter(&line[open..=close])
                    .map_err(|e| err(no, e.to_string()))?;
                transitions.push((p, l, q));
            }
        }
        let alphabet = alphabet.ok_or_else(|| err(0, "missing `alphabet:` header"))?;
        let n = states.ok_or_else(|| err(0, "missing `states:` header"))?;
        let initial = initial.ok_or_else(|| err(0, "missing `initial:` header"))?;
        let accepting = accepting.unwrap_or_default();
        match initial.as_slice() {
            [] => Err(err(0, "no initial state")),
            [q] => BuchiAutomaton::new(alphabet, n, *q, accepting, transitions),
            many => {
                // fresh initial state n copies the outgoing transitions of every initial state
                let mut extra = Vec::new();
                for &(p, l, q) in &transitions {
                    if many.contains(&p) {
                        extra.push((n, l, q));
                    }
                }
                if let Some(&bad) = many.iter().find(|&&q| q >= n) {
                    return Err(AutomatonError::InvalidState(bad));
                }
                transitions.extend(extra);
                BuchiAutomaton::new(alphabet, n + 1, n, accepting, transitions)
            }
        }
    }
}
