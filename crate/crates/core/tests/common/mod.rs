//! Oracles shared by the integration tests. Nothing here calls the library's
//! algorithms; it only reads automata and configurations.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use phasespace::automata::{Alphabet, BuchiAutomaton, LassoWord, Letter, Track};
use phasespace::ca::UPConfiguration;
use rand::Rng;

/// Local rule of an elementary CA, straight from the Wolfram code.
pub fn eca_local(code: u32, l: usize, c: usize, r: usize) -> usize {
    ((code >> (4 * l + 2 * c + r)) & 1) as usize
}

/// Surjectivity via the subset construction on the de Bruijn automaton: the
/// rule is onto iff every finite word has a preimage, i.e. the empty set of
/// overlapping blocks is unreachable.
pub fn surjective_oracle(code: u32) -> bool {
    // blocks are pairs (a, b) encoded as 2a + b; a subset is a 4-bit mask
    let step = |set: u8, out: usize| -> u8 {
        let mut next = 0u8;
        for block in 0..4 {
            if set & (1 << block) == 0 {
                continue;
            }
            let (a, b) = (block >> 1, block & 1);
            for c in 0..2 {
                if eca_local(code, a, b, c) == out {
                    next |= 1 << (2 * b + c);
                }
            }
        }
        next
    };
    let mut seen = HashSet::new();
    let mut stack = vec![0b1111u8];
    while let Some(s) = stack.pop() {
        if s == 0 {
            return false;
        }
        if seen.insert(s) {
            stack.push(step(s, 0));
            stack.push(step(s, 1));
        }
    }
    true
}

/// Injectivity on `{0,1}^ℤ`: two distinct bi-infinite preimage paths with the
/// same image exist iff the pair graph, pruned to nodes on bi-infinite paths,
/// keeps an off-diagonal node.
pub fn injective_oracle(code: u32) -> bool {
    // node = (block u, block v) with u, v in 0..4; edge if the blocks overlap
    // and the produced cells agree
    let mut edges: Vec<Vec<usize>> = vec![Vec::new(); 16];
    for u in 0..4usize {
        for v in 0..4usize {
            for c in 0..2 {
                for d in 0..2 {
                    let (a, b) = (u >> 1, u & 1);
                    let (e, f) = (v >> 1, v & 1);
                    if eca_local(code, a, b, c) == eca_local(code, e, f, d) {
                        edges[u * 4 + v].push((2 * b + c) * 4 + (2 * f + d));
                    }
                }
            }
        }
    }
    let mut alive = [true; 16];
    loop {
        let mut changed = false;
        for n in 0..16 {
            if !alive[n] {
                continue;
            }
            let has_out = edges[n].iter().any(|&m| alive[m]);
            let has_in = (0..16).any(|m| alive[m] && edges[m].contains(&n));
            if !has_out || !has_in {
                alive[n] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..16).all(|n| !alive[n] || n / 4 == n % 4)
}

/// Membership of `stem · cycle^ω` by searching the product with the lasso.
pub fn lasso_member(a: &BuchiAutomaton, stem: &[Letter], cycle: &[Letter]) -> bool {
    let (s, p) = (stem.len(), cycle.len());
    let len = s + p;
    let letter = |i: usize| if i < s { stem[i] } else { cycle[i - s] };
    let next = |i: usize| if i + 1 == len { s } else { i + 1 };
    let n = a.state_count();
    let id = |q: usize, i: usize| q * len + i;
    let succ = |node: usize| -> Vec<usize> {
        let (q, i) = (node / len, node % len);
        let l = letter(i);
        a.successors(q)
            .iter()
            .filter(|&&(m, _)| m == l)
            .map(|&(_, t)| id(t, next(i)))
            .collect()
    };
    let mut reach = vec![false; n * len];
    let mut stack = vec![id(a.initial(), 0)];
    while let Some(v) = stack.pop() {
        if !std::mem::replace(&mut reach[v], true) {
            stack.extend(succ(v));
        }
    }
    for v in 0..n * len {
        if !reach[v] || !a.is_accepting(v / len) || v % len < s {
            continue;
        }
        let mut seen = vec![false; n * len];
        let mut stack = succ(v);
        while let Some(w) = stack.pop() {
            if w == v {
                return true;
            }
            if !std::mem::replace(&mut seen[w], true) {
                stack.extend(succ(w));
            }
        }
    }
    false
}

/// All words of length exactly `len` over `0..k`.
pub fn words(k: u32, len: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |l| {
                    let mut v = w.clone();
                    v.push(l);
                    v
                })
            })
            .collect();
    }
    out
}

/// All (stem, loop) pairs with the given bounds (loops non-empty).
pub fn lassos(k: u32, max_stem: usize, max_loop: usize) -> Vec<(Vec<Letter>, Vec<Letter>)> {
    let stems: Vec<Vec<Letter>> = (0..=max_stem).flat_map(|n| words(k, n)).collect();
    let loops: Vec<Vec<Letter>> = (1..=max_loop).flat_map(|n| words(k, n)).collect();
    let mut out = Vec::new();
    for s in &stems {
        for l in &loops {
            out.push((s.clone(), l.clone()));
        }
    }
    out
}

pub fn letters_alphabet(k: usize) -> Alphabet {
    let symbols: Vec<String> = (0..k).map(|i| format!("s{i}")).collect();
    Alphabet::single(Track::new("a", symbols.iter().map(String::as_str)).unwrap())
}

/// A random automaton with `n` states over `k` letters.
pub fn random_nba(rng: &mut impl Rng, n: usize, k: usize, density: f64, acc: f64) -> BuchiAutomaton {
    let mut transitions = Vec::new();
    for p in 0..n {
        for l in 0..k {
            for q in 0..n {
                if rng.gen_bool(density) {
                    transitions.push((p, l as Letter, q));
                }
            }
        }
    }
    let accepting: Vec<usize> = (0..n).filter(|_| rng.gen_bool(acc)).collect();
    BuchiAutomaton::new(letters_alphabet(k), n, 0, accepting, transitions).unwrap()
}

/// Canonical UP configurations over `q` states with period lengths at most
/// `max_period` and centers of length at most `max_center` starting at 0 or -1.
pub fn up_configs(q: usize, max_period: usize, max_center: usize) -> Vec<UPConfiguration> {
    let periods: Vec<Vec<usize>> = (1..=max_period)
        .flat_map(|n| words(q as u32, n))
        .map(|w| w.into_iter().map(|l| l as usize).collect())
        .collect();
    let centers: Vec<Vec<usize>> = (0..=max_center)
        .flat_map(|n| words(q as u32, n))
        .map(|w| w.into_iter().map(|l| l as usize).collect())
        .collect();
    let mut set = BTreeSet::new();
    for l in &periods {
        for c in &centers {
            for r in &periods {
                for start in [-1i64, 0] {
                    if start == -1 && c.len() < 2 {
                        continue;
                    }
                    set.insert(UPConfiguration::new(l.clone(), c.clone(), start, r.clone()).unwrap());
                }
            }
        }
    }
    set.into_iter().collect()
}

/// Successors of a state set under one letter.
fn post_set(a: &BuchiAutomaton, set: &[bool], l: Letter) -> Vec<bool> {
    let mut out = vec![false; a.state_count()];
    for (q, _) in set.iter().enumerate().filter(|(_, &on)| on) {
        for &(m, t) in a.successors(q) {
            if m == l {
                out[t] = true;
            }
        }
    }
    out
}

fn primitive(w: &[Letter]) -> bool {
    let n = w.len();
    (1..n).all(|p| !n.is_multiple_of(p) || (p..n).any(|i| w[i] != w[i - p]))
}

/// Verdict of the brute-force cardinality oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Brute {
    Empty,
    Finite(Vec<LassoWord>),
    Countable,
    Uncountable,
}

/// Brute-force cardinality: the language is uncountable iff some accepting
/// state that is reachable and co-reachable lies on two cycles whose labels
/// do not commute (searched up to length `2n + 2`); otherwise every member
/// has a loop of length at most `n`, and members are enumerated with stems up
/// to `3n`.
pub fn brute_cardinality(a: &BuchiAutomaton, k: u32) -> Brute {
    let n = a.state_count();
    let mut init = vec![false; n];
    init[a.initial()] = true;
    // states reachable from the initial state
    let mut reach = init.clone();
    let mut stack = vec![a.initial()];
    while let Some(q) = stack.pop() {
        for &(_, t) in a.successors(q) {
            if !std::mem::replace(&mut reach[t], true) {
                stack.push(t);
            }
        }
    }
    // cycles at accepting q up to a length bound
    let max_cycle = 2 * n + 2;
    for f in (0..n).filter(|&f| reach[f] && a.is_accepting(f)) {
        let to_f = reaches(a, f);
        let mut cycles: Vec<Vec<Letter>> = Vec::new();
        let mut start = vec![false; n];
        start[f] = true;
        let mut frontier = vec![(Vec::new(), start)];
        for _ in 0..max_cycle {
            let mut next = Vec::new();
            for (w, set) in frontier {
                for l in 0..k {
                    let s = post_set(a, &set, l);
                    if s.iter().zip(&to_f).any(|(&b, &c)| b && c) {
                        let mut w2 = w.clone();
                        w2.push(l);
                        if s[f] {
                            cycles.push(w2.clone());
                        }
                        next.push((w2, s));
                    }
                }
            }
            frontier = next;
        }
        // pairwise commuting words are powers of one primitive word
        if let Some(u) = cycles.first() {
            let root = &u[..(1..=u.len()).find(|&p| u.len() % p == 0 && u[..p].repeat(u.len() / p) == *u).unwrap()];
            let power = |v: &Vec<Letter>| v.len().is_multiple_of(root.len()) && root.repeat(v.len() / root.len()) == *v;
            if !cycles.iter().all(power) {
                return Brute::Uncountable;
            }
        }
    }
    // G[z] = states from which z^ω is accepted
    let loops: Vec<Vec<Letter>> = (1..=n)
        .flat_map(|m| words(k, m))
        .filter(|z| primitive(z))
        .collect();
    let good: Vec<Vec<bool>> = loops
        .iter()
        .map(|z| {
            (0..n)
                .map(|q| {
                    let b = BuchiAutomaton::new(
                        a.alphabet().clone(),
                        n,
                        q,
                        (0..n).filter(|&p| a.is_accepting(p)),
                        a.transitions(),
                    )
                    .unwrap();
                    lasso_member(&b, &[], z)
                })
                .collect()
        })
        .collect();
    let live: Vec<bool> = (0..n)
        .map(|q| (0..n).any(|p| good.iter().any(|g| g[p]) && reaches(a, p)[q]))
        .collect();
    let mut members = BTreeSet::new();
    let mut long = false;
    let max_stem = 3 * n;
    let mut frontier: Vec<(Vec<Letter>, Vec<bool>)> = vec![(Vec::new(), init)];
    for len in 0..=max_stem {
        for (stem, set) in &frontier {
            for (z, g) in loops.iter().zip(&good) {
                if stem.last().is_some_and(|&l| l == z[z.len() - 1]) {
                    continue;
                }
                if set.iter().zip(g).any(|(&s, &ok)| s && ok) {
                    if len >= n {
                        long = true;
                    } else {
                        members.insert(LassoWord::new(stem.clone(), z.clone()).unwrap());
                    }
                }
            }
        }
        if long {
            return Brute::Countable;
        }
        let mut next = Vec::new();
        for (stem, set) in frontier {
            for l in 0..k {
                let s = post_set(a, &set, l);
                if s.iter().zip(&live).any(|(&b, &c)| b && c) {
                    let mut w = stem.clone();
                    w.push(l);
                    next.push((w, s));
                }
            }
        }
        frontier = next;
    }
    if members.is_empty() {
        Brute::Empty
    } else {
        Brute::Finite(members.into_iter().collect())
    }
}

/// States from which `target` is reachable.
fn reaches(a: &BuchiAutomaton, target: usize) -> Vec<bool> {
    let n = a.state_count();
    let mut out = vec![false; n];
    out[target] = true;
    loop {
        let mut changed = false;
        for q in 0..n {
            if !out[q] && a.successors(q).iter().any(|&(_, t)| out[t]) {
                out[q] = true;
                changed = true;
            }
        }
        if !changed {
            return out;
        }
    }
}

/// Universality by transition profiles: the classes `L_s · L_e^ω` over pairs
/// of profiles with `s·e = s` and `e·e = e` cover every ω-word, and each class
/// lies entirely inside or entirely outside the language. So the automaton is
/// universal iff the set of rejected class representatives is empty.
pub fn profile_universal(a: &BuchiAutomaton, k: u32) -> bool {
    let n = a.state_count();
    // entry 0: no path, 1: path, 2: path through an accepting state
    let letter = |l: Letter| {
        let mut m = vec![0u8; n * n];
        for p in 0..n {
            for &(x, q) in a.successors(p) {
                if x == l {
                    let v = if a.is_accepting(p) || a.is_accepting(q) { 2 } else { 1 };
                    m[p * n + q] = m[p * n + q].max(v);
                }
            }
        }
        m
    };
    let mul = |x: &[u8], y: &[u8]| {
        let mut m = vec![0u8; n * n];
        for i in 0..n {
            for j in 0..n {
                let v = x[i * n + j];
                if v == 0 {
                    continue;
                }
                for t in 0..n {
                    let w = y[j * n + t];
                    if w > 0 {
                        m[i * n + t] = m[i * n + t].max(v.max(w));
                    }
                }
            }
        }
        m
    };
    let gens: Vec<Vec<u8>> = (0..k).map(letter).collect();
    let mut index: std::collections::HashMap<Vec<u8>, usize> = std::collections::HashMap::new();
    let mut profiles: Vec<(Vec<u8>, Vec<Letter>)> = Vec::new();
    for (l, g) in gens.iter().enumerate() {
        if !index.contains_key(g) {
            index.insert(g.clone(), profiles.len());
            profiles.push((g.clone(), vec![l as Letter]));
        }
    }
    let mut i = 0;
    while i < profiles.len() {
        for (l, g) in gens.iter().enumerate() {
            let m = mul(&profiles[i].0, g);
            if !index.contains_key(&m) {
                let mut w = profiles[i].1.clone();
                w.push(l as Letter);
                index.insert(m.clone(), profiles.len());
                profiles.push((m, w));
            }
        }
        i += 1;
    }
    for (e, v) in &profiles {
        if mul(e, e) != *e {
            continue;
        }
        for (s, u) in &profiles {
            if mul(s, e) == *s && !lasso_member(a, u, v) {
                return false;
            }
        }
    }
    true
}

/// A random automaton where every state has one or two outgoing edges, which
/// favours thin components and hence finite and countable languages.
pub fn random_sparse_nba(rng: &mut impl Rng, n: usize, k: usize, acc: f64) -> BuchiAutomaton {
    let mut transitions = Vec::new();
    for p in 0..n {
        for _ in 0..rng.gen_range(1..=2) {
            transitions.push((p, rng.gen_range(0..k) as Letter, rng.gen_range(0..n)));
        }
    }
    let accepting: Vec<usize> = (0..n).filter(|_| rng.gen_bool(acc)).collect();
    BuchiAutomaton::new(letters_alphabet(k), n, 0, accepting, transitions).unwrap()
}
