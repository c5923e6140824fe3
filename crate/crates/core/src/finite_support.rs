//! Configurations with finite support and the finite-word automatic graph
//! `(C_fin, →)`.
//!
//! A configuration with support inside `(-m, m)` is encoded by the finite word
//! `(c(0), c(0)) (c(-1), c(1)) … (c(-(m-1)), c(m-1))` of pair symbols, with no
//! trailing all-quiescent letter. A pair of configurations is encoded by
//! reading both words from the origin and padding the shorter one with a
//! dedicated pad symbol.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::automata::{BuchiAutomaton, Letter, Sccs};
use crate::ca::{parse_word, CaError, CaRule, Presentation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiniteError {
    #[error("rule has no quiescent state")]
    NoQuiescentState,
    #[error("bad finite configuration `{0}`")]
    BadLiteral(String),
    #[error(transparent)]
    Ca(#[from] CaError),
}

/// A configuration equal to the quiescent state `#` outside `word`, whose
/// first cell sits at `offset`. The word never starts or ends with `#`; the
/// all-`#` configuration has an empty word and offset 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteConfiguration {
    word: Vec<usize>,
    offset: i64,
    quiescent: usize,
}

impl FiniteConfiguration {
    pub fn new(word: Vec<usize>, offset: i64, quiescent: usize) -> Self {
        let lead = word.iter().take_while(|&&s| s == quiescent).count();
        if lead == word.len() {
            return FiniteConfiguration {
                word: Vec::new(),
                offset: 0,
                quiescent,
            };
        }
        let trail = word.iter().rev().take_while(|&&s| s == quiescent).count();
        FiniteConfiguration {
            word: word[lead..word.len() - trail].to_vec(),
            offset: offset + lead as i64,
            quiescent,
        }
    }

    /// The all-quiescent configuration.
    pub fn quiescent(quiescent: usize) -> Self {
        FiniteConfiguration::new(Vec::new(), 0, quiescent)
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn quiescent_state(&self) -> usize {
        self.quiescent
    }

    pub fn at(&self, z: i64) -> usize {
        let i = z - self.offset;
        if i >= 0 && (i as usize) < self.word.len() {
            self.word[i as usize]
        } else {
            self.quiescent
        }
    }

    /// Smallest `m` with the support inside `(-m, m)`.
    pub fn fold_len(&self) -> usize {
        if self.word.is_empty() {
            return 0;
        }
        let last = self.offset + self.word.len() as i64 - 1;
        (1 - self.offset).max(last + 1) as usize
    }

    /// The folded finite word (pair symbols `neg * |Q| + pos`).
    pub fn fold(&self, q: usize) -> Vec<Letter> {
        (0..self.fold_len() as i64)
            .map(|i| (self.at(-i) * q + self.at(i)) as Letter)
            .collect()
    }

    pub fn step(&self, rule: &CaRule) -> FiniteConfiguration {
        let r = rule.radius() as i64;
        let lo = self.offset - r;
        let hi = self.offset + self.word.len() as i64 + r;
        let mut window = vec![0; rule.width()];
        let word = (lo..hi)
            .map(|z| {
                for (k, w) in window.iter_mut().enumerate() {
                    *w = self.at(z - r + k as i64);
                }
                rule.apply(&window)
            })
            .collect();
        FiniteConfiguration::new(word, lo, self.quiescent)
    }

    /// Parses `<word>@<offset>`; the word may be quoted and `@0` may be omitted.
    pub fn parse(text: &str, rule: &CaRule) -> Result<Self, FiniteError> {
        let quiescent = rule.quiescent().ok_or(FiniteError::NoQuiescentState)?;
        let bad = || FiniteError::BadLiteral(text.to_string());
        let (word, offset) = match text.trim().rsplit_once('@') {
            Some((w, o)) => (w.trim(), o.trim().parse::<i64>().map_err(|_| bad())?),
            None => (text.trim(), 0),
        };
        let word = word
            .strip_prefix('"')
            .and_then(|w| w.strip_suffix('"'))
            .unwrap_or(word);
        let word = if word == "#" { "" } else { word };
        let cells = parse_word(word, rule.states())?;
        Ok(FiniteConfiguration::new(cells, offset, quiescent))
    }

    pub fn display<'a>(&'a self, states: &'a [String]) -> impl fmt::Display + 'a {
        FiniteDisplay {
            config: self,
            states,
        }
    }

    pub fn to_literal(&self, states: &[String]) -> String {
        self.display(states).to_string()
    }
}

struct FiniteDisplay<'a> {
    config: &'a FiniteConfiguration,
    states: &'a [String],
}

impl fmt::Display for FiniteDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let single = self.states.iter().all(|s| s.chars().count() == 1);
        let names: Vec<&str> = self.config.word.iter().map(|&s| self.states[s].as_str()).collect();
        let sep = if single { "" } else { "," };
        write!(f, "\"{}\"@{}", names.join(sep), self.config.offset)
    }
}

/// A nondeterministic automaton over finite words; letters are `0..alphabet_size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordAutomaton {
    alphabet_size: usize,
    initial: usize,
    accepting: Vec<bool>,
    transitions: Vec<Vec<(Letter, usize)>>,
}

impl WordAutomaton {
    pub fn new(
        alphabet_size: usize,
        initial: usize,
        accepting: Vec<bool>,
        transitions: Vec<Vec<(Letter, usize)>>,
    ) -> Self {
        assert_eq!(accepting.len(), transitions.len());
        assert!(initial < accepting.len());
        assert!(transitions
            .iter()
            .flatten()
            .all(|&(l, t)| (l as usize) < alphabet_size && t < accepting.len()));
        WordAutomaton {
            alphabet_size,
            initial,
            accepting,
            transitions,
        }
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn successors(&self, q: usize) -> &[(Letter, usize)] {
        &self.transitions[q]
    }

    pub fn accepts(&self, word: &[Letter]) -> bool {
        let mut current = vec![false; self.state_count()];
        current[self.initial] = true;
        for &l in word {
            let mut next = vec![false; self.state_count()];
            for (q, _) in current.iter().enumerate().filter(|(_, &on)| on) {
                for &(m, t) in &self.transitions[q] {
                    if m == l {
                        next[t] = true;
                    }
                }
            }
            current = next;
        }
        current.iter().zip(&self.accepting).any(|(&on, &acc)| on && acc)
    }
}

/// Progress of one track of the padded convolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum TrackState {
    /// No letter read yet.
    Start,
    /// Last letter was a pair symbol; remembers whether it was all-quiescent.
    Running { blank: bool },
    /// Pad seen; only pad may follow.
    Padded,
}

impl TrackState {
    fn read(self, pad: bool, blank: bool) -> Option<TrackState> {
        match (self, pad) {
            (TrackState::Padded, false) => None,
            (TrackState::Padded, true) => Some(TrackState::Padded),
            (TrackState::Running { blank: true }, true) => None,
            (_, true) => Some(TrackState::Padded),
            (_, false) => Some(TrackState::Running { blank }),
        }
    }

    fn can_end(self) -> bool {
        self != TrackState::Running { blank: true }
    }
}

/// The padded relation automaton for `rule` over finite-support configurations.
///
/// Track symbols are the pair symbols `0..|Q|²` and the pad `|Q|²`; a letter
/// is `a * (|Q|² + 1) + b` for the configuration symbol `a` and successor
/// symbol `b`. Both words are read from the origin.
pub struct FiniteRelation {
    rule: CaRule,
    automaton: WordAutomaton,
}

impl FiniteRelation {
    pub fn build(rule: &CaRule) -> Result<FiniteRelation, FiniteError> {
        let quiescent = rule.quiescent().ok_or(FiniteError::NoQuiescentState)?;
        let q = rule.state_count();
        let pad = q * q;
        let width = pad + 1;
        let blank = quiescent * q + quiescent;
        let t = Presentation::new(rule.clone()).transition("x", "y")?;
        let both_blank = t.alphabet().encode(&[blank, blank]);
        let live = infinite_runs(&t, both_blank);

        let mut index: HashMap<(usize, TrackState, TrackState), usize> = HashMap::new();
        let mut keys = Vec::new();
        let mut intern = |k: (usize, TrackState, TrackState), keys: &mut Vec<_>| {
            *index.entry(k).or_insert_with(|| {
                keys.push(k);
                keys.len() - 1
            })
        };
        intern((t.initial(), TrackState::Start, TrackState::Start), &mut keys);
        let mut transitions = Vec::new();
        let mut accepting = Vec::new();
        let mut i = 0;
        while i < keys.len() {
            let (s, fx, fy) = keys[i];
            i += 1;
            accepting.push(live[s] && fx.can_end() && fy.can_end());
            let mut out = Vec::new();
            for a in 0..width {
                for b in 0..width {
                    if a == pad && b == pad {
                        continue;
                    }
                    let sym = |v: usize| if v == pad { blank } else { v };
                    let (Some(nx), Some(ny)) = (
                        fx.read(a == pad, a == blank),
                        fy.read(b == pad, b == blank),
                    ) else {
                        continue;
                    };
                    let l = t.alphabet().encode(&[sym(a), sym(b)]);
                    for s2 in t.post(s, l) {
                        let target = intern((s2, nx, ny), &mut keys);
                        out.push(((a * width + b) as Letter, target));
                    }
                }
            }
            transitions.push(out);
        }
        Ok(FiniteRelation {
            rule: rule.clone(),
            automaton: WordAutomaton::new(width * width, 0, accepting, transitions),
        })
    }

    pub fn automaton(&self) -> &WordAutomaton {
        &self.automaton
    }

    pub fn rule(&self) -> &CaRule {
        &self.rule
    }

    /// The padded convolution of the encodings of `x` and `y`.
    pub fn encode_pair(&self, x: &FiniteConfiguration, y: &FiniteConfiguration) -> Vec<Letter> {
        let q = self.rule.state_count();
        let pad = (q * q) as Letter;
        let width = pad + 1;
        let (a, b) = (x.fold(q), y.fold(q));
        (0..a.len().max(b.len()))
            .map(|i| {
                let s = a.get(i).copied().unwrap_or(pad);
                let t = b.get(i).copied().unwrap_or(pad);
                s * width + t
            })
            .collect()
    }

    /// Whether `y = Δ(x)` according to the automaton.
    pub fn relates(&self, x: &FiniteConfiguration, y: &FiniteConfiguration) -> bool {
        self.automaton.accepts(&self.encode_pair(x, y))
    }
}

/// States of `t` with an infinite run on the constant word `letter^ω`.
fn infinite_runs(t: &BuchiAutomaton, letter: Letter) -> Vec<bool> {
    let n = t.state_count();
    let succ: Vec<Vec<usize>> = (0..n).map(|s| t.post(s, letter).collect()).collect();
    let sccs = Sccs::of_graph(n, |s| succ[s].iter().copied(), |_| true);
    // Tarjan numbers components sinks first
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&s| sccs.component[s]);
    let mut live = vec![false; n];
    for s in order {
        live[s] = sccs.nontrivial[sccs.component[s]] || succ[s].iter().any(|&t| live[t]);
    }
    live
}

pub fn build_finite_relation(rule: &CaRule) -> Result<FiniteRelation, FiniteError> {
    FiniteRelation::build(rule)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reachability {
    Reached(usize),
    NotWithin(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Confluence {
    /// Meeting configuration and the step counts from each side.
    Confluent(FiniteConfiguration, usize, usize),
    NotWithin(usize),
}

/// The orbit `x, Δx, …` up to `max_steps` steps, stopping early on a repeat.
fn orbit(rule: &CaRule, x: &FiniteConfiguration, max_steps: usize) -> Vec<FiniteConfiguration> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut c = x.clone();
    for _ in 0..=max_steps {
        if !seen.insert(c.clone()) {
            break;
        }
        out.push(c.clone());
        c = c.step(rule);
    }
    out
}

fn require_quiescent(rule: &CaRule) -> Result<(), FiniteError> {
    rule.quiescent().map(|_| ()).ok_or(FiniteError::NoQuiescentState)
}

/// Least `n ≤ max_steps` with `Δⁿ(from) = to`.
pub fn bounded_reachability(
    rule: &CaRule,
    from: &FiniteConfiguration,
    to: &FiniteConfiguration,
    max_steps: usize,
) -> Result<Reachability, FiniteError> {
    require_quiescent(rule)?;
    Ok(orbit(rule, from, max_steps)
        .iter()
        .position(|c| c == to)
        .map_or(Reachability::NotWithin(max_steps), Reachability::Reached))
}

/// A common successor of `x` and `y` within `max_steps` steps of each,
/// minimizing the steps from `y` and then from `x`.
pub fn bounded_confluence(
    rule: &CaRule,
    x: &FiniteConfiguration,
    y: &FiniteConfiguration,
    max_steps: usize,
) -> Result<Confluence, FiniteError> {
    require_quiescent(rule)?;
    let ox: HashMap<FiniteConfiguration, usize> = orbit(rule, x, max_steps)
        .into_iter()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    for (j, c) in orbit(rule, y, max_steps).into_iter().enumerate() {
        if let Some(&i) = ox.get(&c) {
            return Ok(Confluence::Confluent(c, i, j));
        }
    }
    Ok(Confluence::NotWithin(max_steps))
}
