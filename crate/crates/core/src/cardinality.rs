//! Cardinality of ω-regular languages.
//!
//! Everything is decided on the trimmed automaton. A nontrivial strongly
//! connected component is *thin* when its closed walks at a state never carry
//! two distinct labels of equal length; all closed-walk labels at a state of a
//! thin component are then powers of a single primitive word `z`.
//!
//! * The language is uncountable iff some component holding an accepting
//!   state is not thin.
//! * Otherwise it is countable. It is infinite iff some nontrivial component
//!   is not thin, or some state `r` of a thin component accepts a word other
//!   than `z_r^ω`.
//! * A finite language is collected exactly: a state on a cycle contributes
//!   `z^ω`, a transient state the union of `a · W(succ)`.
//!
//! For a finite language with `n` trimmed states every canonical member has a
//! stem shorter than `n` and a loop of length at most `n`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::automata::{Alphabet, AutomatonError, BuchiAutomaton, LassoWord, Letter, Sccs, StateId};

/// Cardinality of a set of configurations or words.
///
/// The derived order is `Empty < Finite(1) < Finite(2) < … < CountablyInfinite < Uncountable`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CardinalityClass {
    Empty,
    Finite(u64),
    CountablyInfinite,
    Uncountable,
}

impl CardinalityClass {
    /// `Empty` for zero.
    pub fn from_count(n: u64) -> Self {
        if n == 0 {
            CardinalityClass::Empty
        } else {
            CardinalityClass::Finite(n)
        }
    }

    /// Member count for finite classes (including zero).
    pub fn count(self) -> Option<u64> {
        match self {
            CardinalityClass::Empty => Some(0),
            CardinalityClass::Finite(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self.count().is_none()
    }
}

impl fmt::Display for CardinalityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CardinalityClass::Empty => write!(f, "empty"),
            CardinalityClass::Finite(n) => write!(f, "finite:{n}"),
            CardinalityClass::CountablyInfinite => write!(f, "aleph0"),
            CardinalityClass::Uncountable => write!(f, "continuum"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid cardinality `{0}` (expected empty, finite:<n>, aleph0 or continuum)")]
pub struct ParseCardinalityError(String);

impl FromStr for CardinalityClass {
    type Err = ParseCardinalityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "empty" => Ok(CardinalityClass::Empty),
            "aleph0" => Ok(CardinalityClass::CountablyInfinite),
            "continuum" => Ok(CardinalityClass::Uncountable),
            _ => s
                .strip_prefix("finite:")
                .and_then(|n| n.parse::<u64>().ok())
                .filter(|&n| n >= 1)
                .map(CardinalityClass::Finite)
                .ok_or_else(|| ParseCardinalityError(s.to_string())),
        }
    }
}

impl Serialize for CardinalityClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CardinalityClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CardinalityError {
    #[error("language is not finite ({0})")]
    NotFinite(CardinalityClass),
    #[error("modulo bounds must satisfy 0 <= t < k, got t={t}, k={k}")]
    InvalidModulus { t: u64, k: u64 },
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

/// Structural analysis of a trimmed automaton.
struct Analysis {
    trimmed: BuchiAutomaton,
    sccs: Sccs,
    members: Vec<Vec<StateId>>,
    thin: Vec<bool>,
    good: Vec<bool>,
}

impl Analysis {
    fn new(a: &BuchiAutomaton) -> Option<Self> {
        let trimmed = a.trim();
        if trimmed.is_empty_shape() {
            return None;
        }
        let sccs = Sccs::of(&trimmed);
        let members = sccs.members();
        let thin = (0..sccs.count)
            .map(|c| !sccs.nontrivial[c] || is_thin(&trimmed, &sccs, &members[c]))
            .collect();
        let good = members
            .iter()
            .enumerate()
            .map(|(c, ms)| sccs.nontrivial[c] && ms.iter().any(|&q| trimmed.is_accepting(q)))
            .collect();
        Some(Analysis {
            trimmed,
            sccs,
            members,
            thin,
            good,
        })
    }

    fn uncountable(&self) -> bool {
        (0..self.sccs.count).any(|c| self.good[c] && !self.thin[c])
    }

    fn infinite(&self) -> Result<bool, AutomatonError> {
        for c in 0..self.sccs.count {
            if !self.sccs.nontrivial[c] {
                continue;
            }
            if !self.thin[c] {
                return Ok(true);
            }
            let r = self.members[c][0];
            let z = primitive_cycle(&self.trimmed, r);
            let from_r = rerooted(&self.trimmed, r);
            if !from_r.intersect(&differs_from(self.trimmed.alphabet(), &z))?.is_empty() {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// All members, assuming the language is finite.
    fn finite_members(&self) -> BTreeSet<LassoWord> {
        let a = &self.trimmed;
        let n = a.state_count();
        let mut order: Vec<StateId> = (0..n).collect();
        order.sort_by_key(|&q| self.sccs.component[q]);
        let mut words: Vec<BTreeSet<LassoWord>> = vec![BTreeSet::new(); n];
        for q in order {
            let c = self.sccs.component[q];
            if self.sccs.nontrivial[c] {
                let z = primitive_cycle(a, q);
                words[q].insert(LassoWord::periodic(z).expect("cycle is non-empty").canonical());
            } else {
                let mut acc = BTreeSet::new();
                for &(l, t) in a.successors(q) {
                    for w in &words[t] {
                        acc.insert(w.prepend(l));
                    }
                }
                words[q] = acc;
            }
        }
        std::mem::take(&mut words[a.initial()])
    }
}

/// Closed walks at the component's states have at most one label per length.
fn is_thin(a: &BuchiAutomaton, sccs: &Sccs, members: &[StateId]) -> bool {
    let c = sccs.component[members[0]];
    let inside = |q: StateId| sccs.component[q] == c;
    // two distinct internal letters at one state already give two non-commuting cycles
    let mut letter_of = vec![0 as Letter; a.state_count()];
    for &p in members {
        let mut letters = a.successors(p).iter().filter(|&&(_, q)| inside(q)).map(|&(l, _)| l);
        let first = letters.next().expect("nontrivial component");
        if letters.any(|l| l != first) {
            return false;
        }
        letter_of[p] = first;
    }
    if a.is_deterministic() {
        return true;
    }
    // pair graph: a closed walk through a diagonal pair that reads two different letters
    let m = members.len();
    let mut local = vec![usize::MAX; a.state_count()];
    for (i, &p) in members.iter().enumerate() {
        local[p] = i;
    }
    let targets: Vec<Vec<usize>> = members
        .iter()
        .map(|&p| {
            a.successors(p)
                .iter()
                .filter(|&&(_, q)| inside(q))
                .map(|&(_, q)| local[q])
                .collect()
        })
        .collect();
    let succ = |v: usize| {
        let (i, j) = (v / m, v % m);
        let tj = &targets[j];
        targets[i]
            .iter()
            .flat_map(move |&x| tj.iter().map(move |&y| x * m + y))
    };
    let pairs = Sccs::of_graph(m * m, succ, |_| true);
    let mut has_diagonal = vec![false; pairs.count];
    for i in 0..m {
        has_diagonal[pairs.component[i * m + i]] = true;
    }
    for v in 0..m * m {
        let (i, j) = (v / m, v % m);
        let comp = pairs.component[v];
        if has_diagonal[comp]
            && letter_of[members[i]] != letter_of[members[j]]
            && succ(v).any(|u| pairs.component[u] == comp)
        {
            return false;
        }
    }
    true
}

/// Primitive root of the label of a shortest cycle through `q`.
fn primitive_cycle(a: &BuchiAutomaton, q: StateId) -> Vec<Letter> {
    let w = LassoWord::periodic(a.cycle_through(q)).expect("q lies on a cycle");
    w.canonical().cycle().to_vec()
}

fn rerooted(a: &BuchiAutomaton, r: StateId) -> BuchiAutomaton {
    let (alphabet, _, accepting, edges) = a.clone().into_parts();
    BuchiAutomaton::from_parts(alphabet, r, accepting, edges)
}

/// Deterministic automaton for `Σ^ω ∖ {z^ω}`.
fn differs_from(alphabet: &Alphabet, z: &[Letter]) -> BuchiAutomaton {
    let m = z.len();
    let sink = m;
    let mut edges: Vec<Vec<(Letter, StateId)>> = z
        .iter()
        .enumerate()
        .map(|(i, &expected)| {
            alphabet
                .letters()
                .map(|l| (l, if l == expected { (i + 1) % m } else { sink }))
                .collect()
        })
        .collect();
    edges.push(alphabet.letters().map(|l| (l, sink)).collect());
    let mut accepting = vec![false; m + 1];
    accepting[sink] = true;
    BuchiAutomaton::from_parts(alphabet.clone(), 0, accepting, edges)
}

/// Exact cardinality class of `L(a)`.
pub fn classify(a: &BuchiAutomaton) -> Result<CardinalityClass, AutomatonError> {
    let Some(an) = Analysis::new(a) else {
        return Ok(CardinalityClass::Empty);
    };
    if an.uncountable() {
        return Ok(CardinalityClass::Uncountable);
    }
    if an.infinite()? {
        return Ok(CardinalityClass::CountablyInfinite);
    }
    Ok(CardinalityClass::from_count(an.finite_members().len() as u64))
}

/// `|L(a)|`, or `NotFinite`.
pub fn count_exact(a: &BuchiAutomaton) -> Result<u64, CardinalityError> {
    match classify(a)? {
        CardinalityClass::Empty => Ok(0),
        CardinalityClass::Finite(n) => Ok(n),
        other => Err(CardinalityError::NotFinite(other)),
    }
}

/// `L(a)` is finite and `|L(a)| ≡ t (mod k)`.
pub fn count_mod(a: &BuchiAutomaton, t: u64, k: u64) -> Result<bool, CardinalityError> {
    if t >= k {
        return Err(CardinalityError::InvalidModulus { t, k });
    }
    Ok(classify(a)?.count().is_some_and(|n| n % k == t))
}

pub fn is_infinite(a: &BuchiAutomaton) -> Result<bool, AutomatonError> {
    let Some(an) = Analysis::new(a) else {
        return Ok(false);
    };
    Ok(an.uncountable() || an.infinite()?)
}

/// All members of a finite language in canonical form, or `NotFinite`.
pub fn finite_members(a: &BuchiAutomaton) -> Result<Vec<LassoWord>, CardinalityError> {
    let Some(an) = Analysis::new(a) else {
        return Ok(Vec::new());
    };
    if an.uncountable() {
        return Err(CardinalityError::NotFinite(CardinalityClass::Uncountable));
    }
    if an.infinite()? {
        return Err(CardinalityError::NotFinite(CardinalityClass::CountablyInfinite));
    }
    Ok(an.finite_members().into_iter().collect())
}

/// Stem and loop bounds that contain every member of `L(a)` when it is finite.
pub fn certificate_bounds(a: &BuchiAutomaton) -> (usize, usize) {
    let n = a.trim().state_count();
    (n.saturating_sub(1).max(1), n)
}

/// Canonical members with stem length at most `stem_bound` and loop length at
/// most `loop_bound`, in lexicographic order of (stem, loop).
pub fn enumerate_members(
    a: &BuchiAutomaton,
    stem_bound: usize,
    loop_bound: usize,
) -> Result<Vec<LassoWord>, AutomatonError> {
    let t = a.trim();
    let mut found = BTreeSet::new();
    if t.is_empty_shape() || loop_bound == 0 {
        return Ok(Vec::new());
    }
    let n = t.state_count();
    let letters: Vec<Letter> = t.alphabet().letters().collect();
    // depth-first over prefixes with a live run (every trimmed state is live)
    let mut stack: Vec<(Vec<Letter>, Vec<bool>)> = Vec::new();
    let mut start = vec![false; n];
    start[t.initial()] = true;
    stack.push((Vec::new(), start));
    let max_len = stem_bound + loop_bound;
    while let Some((prefix, states)) = stack.pop() {
        let len = prefix.len();
        for s in len.saturating_sub(loop_bound)..len.min(stem_bound + 1) {
            let w = LassoWord::new(prefix[..s].to_vec(), prefix[s..].to_vec())?;
            if w.is_canonical() && !found.contains(&w) && t.member_up(&w)? {
                found.insert(w);
            }
        }
        if len == max_len {
            continue;
        }
        for &l in letters.iter().rev() {
            let mut next = vec![false; n];
            let mut any = false;
            for p in (0..n).filter(|&p| states[p]) {
                for q in t.post(p, l) {
                    next[q] = true;
                    any = true;
                }
            }
            if any {
                let mut p = prefix.clone();
                p.push(l);
                stack.push((p, next));
            }
        }
    }
    Ok(found.into_iter().collect())
}
