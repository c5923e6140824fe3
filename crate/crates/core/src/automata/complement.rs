//! Büchi complementation.
//!
//! The operand is trimmed first and then dispatched on its shape:
//!
//! * deterministic and weak: complete it and flip acceptance per component;
//! * deterministic: the standard `2n` construction (guess the point after
//!   which no accepting state occurs);
//! * weak: the breakpoint construction, which is exact for weak automata and
//!   yields a deterministic result;
//! * otherwise: the rank-based construction restricted to tight level rankings.

use super::buchi::{Sccs, StateId};
use super::ops::Explorer;
use super::{AutomatonError, BuchiAutomaton, Letter};

pub(crate) fn complement(a: &BuchiAutomaton, limit: usize) -> Result<BuchiAutomaton, AutomatonError> {
    let alphabet = a.alphabet().clone();
    let t = a.trim();
    if t.is_empty_shape() {
        return Ok(BuchiAutomaton::universal(alphabet));
    }
    if alphabet.size() == 1 {
        // the only ω-word is accepted
        return Ok(BuchiAutomaton::empty(alphabet));
    }
    let result = if t.is_deterministic() {
        let d = complete(&t);
        if d.is_weak() {
            flip_weak(&d)
        } else {
            deterministic_complement(&d, limit)?
        }
    } else if t.is_weak() {
        breakpoint(&t, limit)?
    } else {
        tight_rank(&t, limit)?
    };
    if result.state_count() > limit {
        return Err(AutomatonError::BudgetExceeded { limit });
    }
    Ok(result.trim())
}

/// Adds a rejecting sink for missing transitions.
fn complete(a: &BuchiAutomaton) -> BuchiAutomaton {
    if a.is_complete() {
        return a.clone();
    }
    let (alphabet, initial, mut accepting, mut edges) = a.clone().into_parts();
    let sink = edges.len();
    for es in edges.iter_mut() {
        let present: Vec<Letter> = es.iter().map(|&(l, _)| l).collect();
        for l in alphabet.letters() {
            if present.binary_search(&l).is_err() {
                es.push((l, sink));
            }
        }
    }
    edges.push(alphabet.letters().map(|l| (l, sink)).collect());
    accepting.push(false);
    BuchiAutomaton::from_parts(alphabet, initial, accepting, edges)
}

fn flip_weak(d: &BuchiAutomaton) -> BuchiAutomaton {
    let sccs = Sccs::of(d);
    let acc = (0..d.state_count())
        .map(|q| sccs.nontrivial[sccs.component[q]] && !d.is_accepting(q))
        .collect();
    d.with_accepting(acc)
}

/// Complete deterministic Büchi → nondeterministic weak automaton for the
/// words that visit accepting states only finitely often.
fn deterministic_complement(d: &BuchiAutomaton, limit: usize) -> Result<BuchiAutomaton, AutomatonError> {
    let n = d.state_count();
    let mut copy = vec![usize::MAX; n];
    let mut next = n;
    for q in 0..n {
        if !d.is_accepting(q) {
            copy[q] = next;
            next += 1;
        }
    }
    if next > limit {
        return Err(AutomatonError::BudgetExceeded { limit });
    }
    let mut edges = vec![Vec::new(); next];
    let mut accepting = vec![false; next];
    for (p, l, q) in d.transitions() {
        edges[p].push((l, q));
        if copy[q] != usize::MAX {
            edges[p].push((l, copy[q]));
            if copy[p] != usize::MAX {
                edges[copy[p]].push((l, copy[q]));
            }
        }
    }
    for q in 0..n {
        if copy[q] != usize::MAX {
            accepting[copy[q]] = true;
        }
    }
    Ok(BuchiAutomaton::from_parts(
        d.alphabet().clone(),
        d.initial(),
        accepting,
        edges,
    ))
}

/// Groups the successors of a state set by letter.
fn post_by_letter(a: &BuchiAutomaton, set: &[StateId], buckets: &mut [Vec<StateId>]) -> Vec<Letter> {
    let mut touched = Vec::new();
    for &p in set {
        for &(l, q) in a.successors(p) {
            let b = &mut buckets[l as usize];
            if b.is_empty() {
                touched.push(l);
            }
            b.push(q);
        }
    }
    touched.sort_unstable();
    for &l in &touched {
        let b = &mut buckets[l as usize];
        b.sort_unstable();
        b.dedup();
    }
    touched
}

/// Breakpoint construction for weak automata: a run is accepting iff it
/// eventually stays inside accepting states, so the complement accepts iff the
/// set of runs that stayed accepting since the last breakpoint empties
/// infinitely often.
fn breakpoint(a: &BuchiAutomaton, limit: usize) -> Result<BuchiAutomaton, AutomatonError> {
    let size = a.alphabet().size();
    let mut ex: Explorer<(Vec<StateId>, Vec<StateId>)> = Explorer::new(limit);
    ex.intern((vec![a.initial()], Vec::new()))?;
    let mut edges = Vec::new();
    let mut accepting = Vec::new();
    let mut s_buckets = vec![Vec::new(); size];
    let mut o_buckets = vec![Vec::new(); size];
    let mut i = 0;
    while i < ex.len() {
        let (s, o) = ex.keys[i].clone();
        i += 1;
        accepting.push(o.is_empty());
        let touched = post_by_letter(a, &s, &mut s_buckets);
        let o_touched = if o.is_empty() {
            Vec::new()
        } else {
            post_by_letter(a, &o, &mut o_buckets)
        };
        let mut out = Vec::with_capacity(size);
        let mut ti = 0;
        for l in 0..size as Letter {
            let succ = if ti < touched.len() && touched[ti] == l {
                ti += 1;
                std::mem::take(&mut s_buckets[l as usize])
            } else {
                Vec::new()
            };
            let o_next: Vec<StateId> = if o.is_empty() {
                succ.iter().copied().filter(|&q| a.is_accepting(q)).collect()
            } else {
                o_buckets[l as usize]
                    .iter()
                    .copied()
                    .filter(|&q| a.is_accepting(q))
                    .collect()
            };
            out.push((l, ex.intern((succ, o_next))?));
        }
        for l in o_touched {
            o_buckets[l as usize].clear();
        }
        edges.push(out);
    }
    Ok(BuchiAutomaton::from_parts(
        a.alphabet().clone(),
        0,
        accepting,
        edges,
    ))
}

const BOTTOM: u8 = u8::MAX;

#[derive(Clone, PartialEq, Eq, Hash)]
enum RankState {
    /// First phase: plain subset construction.
    Subset(u64),
    /// Second phase: tight level ranking (BOTTOM outside the current set) and
    /// the obligation set of even-ranked states.
    Ranked(Vec<u8>, u64),
    /// No run is alive.
    Dead,
}

fn max_odd(ranks: &[u8]) -> Option<u8> {
    ranks
        .iter()
        .copied()
        .filter(|&r| r != BOTTOM && r % 2 == 1)
        .max()
}

/// All tight level rankings over `targets` with maximal odd rank `rank`,
/// each target bounded by `bound` and accepting targets even.
fn tight_rankings(
    targets: &[StateId],
    bound: &[u8],
    accepting: &[bool],
    rank: u8,
    n: usize,
    out: &mut Vec<Vec<u8>>,
) {
    fn go(
        i: usize,
        targets: &[StateId],
        bound: &[u8],
        accepting: &[bool],
        rank: u8,
        current: &mut Vec<u8>,
        used: &mut Vec<u32>,
        missing: usize,
        out: &mut Vec<Vec<u8>>,
    ) {
        if missing > targets.len() - i {
            return;
        }
        if i == targets.len() {
            out.push(current.clone());
            return;
        }
        let t = targets[i];
        let hi = bound[t].min(rank);
        for v in 0..=hi {
            if accepting[t] && v % 2 == 1 {
                continue;
            }
            current[t] = v;
            let fresh = v % 2 == 1 && used[v as usize] == 0;
            used[v as usize] += 1;
            go(
                i + 1,
                targets,
                bound,
                accepting,
                rank,
                current,
                used,
                missing - usize::from(fresh),
                out,
            );
            used[v as usize] -= 1;
        }
        current[t] = BOTTOM;
    }
    let mut current = vec![BOTTOM; n];
    let mut used = vec![0u32; rank as usize + 1];
    let missing = (rank as usize).div_ceil(2);
    go(
        0,
        targets,
        bound,
        accepting,
        rank,
        &mut current,
        &mut used,
        missing,
        out,
    );
}

fn mask_of(states: &[StateId]) -> u64 {
    states.iter().fold(0u64, |m, &q| m | (1u64 << q))
}

fn states_of(mask: u64) -> Vec<StateId> {
    (0..64).filter(|&q| mask & (1u64 << q) != 0).collect()
}

/// Rank-based complementation with tight rankings.
///
/// The automaton first tracks the reachable subset and at some point guesses
/// a tight level ranking; afterwards rankings must cover their predecessors
/// while keeping the same maximal odd rank. Acceptance is an empty obligation
/// set.
fn tight_rank(a: &BuchiAutomaton, limit: usize) -> Result<BuchiAutomaton, AutomatonError> {
    let n = a.state_count();
    if n > 63 {
        return Err(AutomatonError::ComplementTooLarge { states: n });
    }
    let size = a.alphabet().size();
    let accepting: Vec<bool> = (0..n).map(|q| a.is_accepting(q)).collect();
    let even_mask = |ranks: &[u8]| -> u64 {
        (0..n)
            .filter(|&q| ranks[q] != BOTTOM && ranks[q].is_multiple_of(2))
            .fold(0u64, |m, q| m | (1u64 << q))
    };
    let mut ex: Explorer<RankState> = Explorer::new(limit);
    ex.intern(RankState::Subset(1u64 << a.initial()))?;
    let mut edges: Vec<Vec<(Letter, StateId)>> = Vec::new();
    let mut acc = Vec::new();
    let mut buckets = vec![Vec::new(); size];
    let mut bound = vec![BOTTOM; n];
    let mut rankings = Vec::new();
    let mut i = 0;
    while i < ex.len() {
        let key = ex.keys[i].clone();
        i += 1;
        let mut out = Vec::new();
        match &key {
            RankState::Dead => {
                acc.push(true);
                for l in 0..size as Letter {
                    out.push((l, ex.intern(RankState::Dead)?));
                }
            }
            RankState::Subset(mask) => {
                acc.push(false);
                let set = states_of(*mask);
                let touched = post_by_letter(a, &set, &mut buckets);
                let mut ti = 0;
                for l in 0..size as Letter {
                    if ti < touched.len() && touched[ti] == l {
                        ti += 1;
                    } else {
                        out.push((l, ex.intern(RankState::Dead)?));
                        continue;
                    }
                    let targets = std::mem::take(&mut buckets[l as usize]);
                    out.push((l, ex.intern(RankState::Subset(mask_of(&targets)))?));
                    let rejecting = targets.iter().filter(|&&q| !accepting[q]).count();
                    for b in bound.iter_mut() {
                        *b = BOTTOM - 1;
                    }
                    for k in 1..=rejecting {
                        let rank = (2 * k - 1) as u8;
                        rankings.clear();
                        tight_rankings(&targets, &bound, &accepting, rank, n, &mut rankings);
                        for f in rankings.drain(..) {
                            out.push((l, ex.intern(RankState::Ranked(f, 0))?));
                        }
                    }
                }
            }
            RankState::Ranked(ranks, obligations) => {
                acc.push(*obligations == 0);
                let rank = max_odd(ranks).expect("tight rankings have an odd rank");
                for l in 0..size as Letter {
                    for b in bound.iter_mut() {
                        *b = BOTTOM;
                    }
                    let mut targets = Vec::new();
                    let mut o_next = 0u64;
                    for p in (0..n).filter(|&p| ranks[p] != BOTTOM) {
                        for q in a.post(p, l) {
                            if bound[q] == BOTTOM {
                                targets.push(q);
                                bound[q] = ranks[p];
                            } else {
                                bound[q] = bound[q].min(ranks[p]);
                            }
                            if obligations & (1u64 << p) != 0 {
                                o_next |= 1u64 << q;
                            }
                        }
                    }
                    if targets.is_empty() {
                        out.push((l, ex.intern(RankState::Dead)?));
                        continue;
                    }
                    targets.sort_unstable();
                    rankings.clear();
                    tight_rankings(&targets, &bound, &accepting, rank, n, &mut rankings);
                    for f in rankings.drain(..) {
                        let even = even_mask(&f);
                        let o = if *obligations == 0 { even } else { o_next & even };
                        out.push((l, ex.intern(RankState::Ranked(f, o))?));
                    }
                }
            }
        }
        edges.push(out);
    }
    Ok(BuchiAutomaton::from_parts(a.alphabet().clone(), 0, acc, edges))
}
