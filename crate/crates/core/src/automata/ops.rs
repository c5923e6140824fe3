//! Closure operations, trimming, emptiness and ultimately-periodic membership.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use super::buchi::{Sccs, StateId};
use super::{complement, Alphabet, AutomatonError, BuchiAutomaton, LassoWord, Letter, Track};

/// No limit on constructed state counts.
pub const UNBOUNDED: usize = usize::MAX;

/// Interns product states discovered during a breadth-first construction.
pub(crate) struct Explorer<K> {
    ids: HashMap<K, StateId>,
    pub keys: Vec<K>,
    limit: usize,
}

impl<K: Hash + Eq + Clone> Explorer<K> {
    pub fn new(limit: usize) -> Self {
        Explorer {
            ids: HashMap::new(),
            keys: Vec::new(),
            limit,
        }
    }

    pub fn intern(&mut self, key: K) -> Result<StateId, AutomatonError> {
        if let Some(&id) = self.ids.get(&key) {
            return Ok(id);
        }
        let id = self.keys.len();
        if id >= self.limit {
            return Err(AutomatonError::BudgetExceeded { limit: self.limit });
        }
        self.ids.insert(key.clone(), id);
        self.keys.push(key);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }
}

/// Kahn's algorithm on the subgraph induced by `nodes`.
fn has_cycle(a: &BuchiAutomaton, nodes: &[StateId], inside: impl Fn(StateId) -> bool) -> bool {
    let local: HashMap<StateId, usize> = nodes.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let mut indeg = vec![0usize; nodes.len()];
    for &p in nodes {
        for &(_, q) in a.successors(p) {
            if inside(q) {
                indeg[local[&q]] += 1;
            }
        }
    }
    let mut queue: Vec<usize> = (0..nodes.len()).filter(|&i| indeg[i] == 0).collect();
    let mut removed = 0;
    while let Some(i) = queue.pop() {
        removed += 1;
        for &(_, q) in a.successors(nodes[i]) {
            if inside(q) {
                let j = local[&q];
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    queue.push(j);
                }
            }
        }
    }
    removed < nodes.len()
}

impl BuchiAutomaton {
    /// Language-preserving cleanup.
    ///
    /// Keeps the states that are reachable and can reach an accepting cycle,
    /// renumbered in breadth-first order. Acceptance is normalised per strongly
    /// connected component: transient states become rejecting, and a component
    /// in which every cycle meets an accepting state becomes fully accepting.
    pub fn trim(&self) -> BuchiAutomaton {
        let n = self.state_count();
        let mut reach = vec![false; n];
        for q in self.reachable_order() {
            reach[q] = true;
        }
        let sccs = Sccs::of_graph(n, |p| self.successors(p).iter().map(|&(_, q)| q), |q| reach[q]);
        let members = sccs.members();
        let mut acc = vec![false; n];
        let mut good = vec![false; sccs.count];
        for (c, ms) in members.iter().enumerate() {
            if !sccs.nontrivial[c] || !reach[ms[0]] {
                continue;
            }
            if !ms.iter().any(|&q| self.is_accepting(q)) {
                continue;
            }
            good[c] = true;
            let rejecting: Vec<StateId> =
                ms.iter().copied().filter(|&q| !self.is_accepting(q)).collect();
            let mixed = has_cycle(self, &rejecting, |q| {
                sccs.component[q] == c && !self.is_accepting(q)
            });
            for &q in ms {
                acc[q] = !mixed || self.is_accepting(q);
            }
        }
        // backward search from good components
        let mut preds = vec![Vec::new(); n];
        for (p, _, q) in self.transitions() {
            if reach[p] && reach[q] {
                preds[q].push(p);
            }
        }
        let mut live = vec![false; n];
        let mut stack: Vec<StateId> = (0..n)
            .filter(|&q| reach[q] && good[sccs.component[q]])
            .collect();
        for &q in &stack {
            live[q] = true;
        }
        while let Some(q) = stack.pop() {
            for &p in &preds[q] {
                if !live[p] {
                    live[p] = true;
                    stack.push(p);
                }
            }
        }
        if !live[self.initial()] {
            return BuchiAutomaton::empty(self.alphabet().clone());
        }
        let mut id = vec![usize::MAX; n];
        let mut order = vec![self.initial()];
        id[self.initial()] = 0;
        let mut i = 0;
        while i < order.len() {
            let p = order[i];
            i += 1;
            for &(_, q) in self.successors(p) {
                if live[q] && id[q] == usize::MAX {
                    id[q] = order.len();
                    order.push(q);
                }
            }
        }
        let edges = order
            .iter()
            .map(|&p| {
                self.successors(p)
                    .iter()
                    .filter(|&&(_, q)| live[q])
                    .map(|&(l, q)| (l, id[q]))
                    .collect()
            })
            .collect();
        let accepting = order.iter().map(|&q| acc[q]).collect();
        BuchiAutomaton::from_parts(self.alphabet().clone(), 0, accepting, edges)
    }

    pub fn is_empty(&self) -> bool {
        self.find_lasso().is_none()
    }

    /// An accepted ultimately periodic word, or `None` when the language is empty.
    ///
    /// The stem is a shortest path to the first accepting state (in breadth-first
    /// order) that lies on a cycle, and the loop a shortest cycle through it, so
    /// `|stem| < |states|` and `|loop| <= |states|`.
    pub fn find_lasso(&self) -> Option<LassoWord> {
        let n = self.state_count();
        let order = self.reachable_order();
        let mut reach = vec![false; n];
        for &q in &order {
            reach[q] = true;
        }
        let sccs = Sccs::of_graph(n, |p| self.successors(p).iter().map(|&(_, q)| q), |q| reach[q]);
        let target = order
            .iter()
            .copied()
            .find(|&q| self.is_accepting(q) && sccs.nontrivial[sccs.component[q]])?;
        let stem = self.shortest_path(self.initial(), target, false);
        let cycle = self.shortest_path(target, target, true);
        Some(LassoWord::new(stem, cycle).expect("cycle is non-empty"))
    }

    /// Label of a shortest cycle through `q`, which must lie on a cycle.
    pub(crate) fn cycle_through(&self, q: StateId) -> Vec<Letter> {
        self.shortest_path(q, q, true)
    }

    /// Letters of a shortest path `from -> to`; with `nonempty` the path has at least one step.
    fn shortest_path(&self, from: StateId, to: StateId, nonempty: bool) -> Vec<Letter> {
        if from == to && !nonempty {
            return Vec::new();
        }
        let n = self.state_count();
        let mut parent: Vec<Option<(StateId, Letter)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        queue.push_back(from);
        if from != to {
            seen[from] = true;
        }
        while let Some(p) = queue.pop_front() {
            for &(l, q) in self.successors(p) {
                if q == to {
                    let mut word = vec![l];
                    let mut cur = p;
                    while cur != from {
                        let (pp, pl) = parent[cur].expect("bfs parent");
                        word.push(pl);
                        cur = pp;
                    }
                    word.reverse();
                    return word;
                }
                if !seen[q] {
                    seen[q] = true;
                    parent[q] = Some((p, l));
                    queue.push_back(q);
                }
            }
        }
        unreachable!("target state is reachable by construction")
    }

    /// Decides `stem · loop^ω ∈ L(self)` by searching the product of the
    /// automaton with the single-word automaton of `w` for an accepting cycle.
    pub fn member_up(&self, w: &LassoWord) -> Result<bool, AutomatonError> {
        w.check_alphabet(self.alphabet())?;
        let n = self.state_count();
        let mut current = vec![false; n];
        current[self.initial()] = true;
        for &l in w.stem() {
            let mut next = vec![false; n];
            for p in (0..n).filter(|&p| current[p]) {
                for q in self.post(p, l) {
                    next[q] = true;
                }
            }
            current = next;
        }
        let cycle = w.cycle();
        let m = cycle.len();
        let size = n * m;
        let mut reached = vec![false; size];
        let mut stack: Vec<usize> = (0..n).filter(|&p| current[p]).map(|p| p * m).collect();
        for &v in &stack {
            reached[v] = true;
        }
        while let Some(v) = stack.pop() {
            let (q, i) = (v / m, v % m);
            for t in self.post(q, cycle[i]) {
                let u = t * m + (i + 1) % m;
                if !reached[u] {
                    reached[u] = true;
                    stack.push(u);
                }
            }
        }
        let sccs = Sccs::of_graph(
            size,
            |v| {
                let (q, i) = (v / m, v % m);
                self.post(q, cycle[i]).map(move |t| t * m + (i + 1) % m)
            },
            |v| reached[v],
        );
        Ok((0..size).any(|v| {
            reached[v] && self.is_accepting(v / m) && sccs.nontrivial[sccs.component[v]]
        }))
    }

    /// Language intersection.
    pub fn intersect(&self, other: &BuchiAutomaton) -> Result<BuchiAutomaton, AutomatonError> {
        self.intersect_bounded(other, UNBOUNDED)
    }

    /// Product construction. Safety and weak operands get a plain product;
    /// otherwise the two-flag construction is used.
    pub fn intersect_bounded(
        &self,
        other: &BuchiAutomaton,
        limit: usize,
    ) -> Result<BuchiAutomaton, AutomatonError> {
        let other = other.aligned_to(self.alphabet())?;
        let a = self.trim();
        let b = other.trim();
        if a.is_empty_shape() || b.is_empty_shape() {
            return Ok(BuchiAutomaton::empty(a.alphabet().clone()));
        }
        #[derive(Clone, Copy, PartialEq)]
        enum Mode {
            Right,
            Left,
            Both,
            Flag,
        }
        let mode = if a.all_accepting() {
            Mode::Right
        } else if b.all_accepting() {
            Mode::Left
        } else if a.is_weak() && b.is_weak() {
            Mode::Both
        } else {
            Mode::Flag
        };
        let mut ex: Explorer<(StateId, StateId, bool)> = Explorer::new(limit);
        ex.intern((a.initial(), b.initial(), false))?;
        let mut edges = Vec::new();
        let mut accepting = Vec::new();
        let mut i = 0;
        while i < ex.len() {
            let (p, q, flag) = ex.keys[i];
            i += 1;
            let (acc, next_flag) = match mode {
                Mode::Right => (b.is_accepting(q), false),
                Mode::Left => (a.is_accepting(p), false),
                Mode::Both => (a.is_accepting(p) && b.is_accepting(q), false),
                Mode::Flag => {
                    let acc = !flag && a.is_accepting(p);
                    let nf = if !flag { a.is_accepting(p) } else { !b.is_accepting(q) };
                    (acc, nf)
                }
            };
            accepting.push(acc);
            let mut out = Vec::new();
            let bs = b.successors(q);
            for &(l, p2) in a.successors(p) {
                let start = bs.partition_point(|&(m, _)| m < l);
                for &(m, q2) in &bs[start..] {
                    if m != l {
                        break;
                    }
                    out.push((l, ex.intern((p2, q2, next_flag))?));
                }
            }
            edges.push(out);
        }
        Ok(BuchiAutomaton::from_parts(a.alphabet().clone(), 0, accepting, edges).trim())
    }

    /// Language union (fresh initial state over a disjoint sum).
    pub fn union(&self, other: &BuchiAutomaton) -> Result<BuchiAutomaton, AutomatonError> {
        let other = other.aligned_to(self.alphabet())?;
        let a = self.trim();
        let b = other.trim();
        let na = a.state_count();
        let mut edges: Vec<Vec<(Letter, StateId)>> = Vec::with_capacity(1 + na + b.state_count());
        let mut start: Vec<(Letter, StateId)> = a
            .successors(a.initial())
            .iter()
            .map(|&(l, q)| (l, q + 1))
            .collect();
        start.extend(b.successors(b.initial()).iter().map(|&(l, q)| (l, q + 1 + na)));
        edges.push(start);
        let mut accepting = vec![false];
        for p in 0..na {
            edges.push(a.successors(p).iter().map(|&(l, q)| (l, q + 1)).collect());
            accepting.push(a.is_accepting(p));
        }
        for p in 0..b.state_count() {
            edges.push(b.successors(p).iter().map(|&(l, q)| (l, q + 1 + na)).collect());
            accepting.push(b.is_accepting(p));
        }
        Ok(BuchiAutomaton::from_parts(a.alphabet().clone(), 0, accepting, edges).trim())
    }

    /// Language complement over the full alphabet.
    pub fn complement(&self) -> BuchiAutomaton {
        complement::complement(self, UNBOUNDED).expect("unbounded complementation")
    }

    pub fn complement_bounded(&self, limit: usize) -> Result<BuchiAutomaton, AutomatonError> {
        complement::complement(self, limit)
    }

    /// Existential projection: drops `track`, keeping every word that has some
    /// completion on it.
    pub fn project(&self, track: &str) -> Result<BuchiAutomaton, AutomatonError> {
        let pos = self
            .alphabet()
            .track_position(track)
            .ok_or_else(|| AutomatonError::UnknownTrack(track.to_string()))?;
        let from = self.alphabet();
        let to = from.without_track(pos);
        let map: Vec<Letter> = from
            .letters()
            .map(|l| {
                let mut c = from.decode(l);
                c.remove(pos);
                to.encode(&c)
            })
            .collect();
        Ok(self.relabel(to, |l| map[l as usize]).trim())
    }

    /// Adds an unconstrained track at `position`.
    pub fn cylindrify(&self, track: Track, position: usize) -> Result<BuchiAutomaton, AutomatonError> {
        let from = self.alphabet();
        let pos = position.min(from.track_count());
        let width = track.len();
        let to = from.with_track(track, pos)?;
        let expand: Vec<Vec<Letter>> = from
            .letters()
            .map(|l| {
                let c = from.decode(l);
                (0..width)
                    .map(|s| {
                        let mut d = c.clone();
                        d.insert(pos, s);
                        to.encode(&d)
                    })
                    .collect()
            })
            .collect();
        let edges = (0..self.state_count())
            .map(|p| {
                self.successors(p)
                    .iter()
                    .flat_map(|&(l, q)| expand[l as usize].iter().map(move |&m| (m, q)))
                    .collect()
            })
            .collect();
        Ok(BuchiAutomaton::from_parts(
            to,
            self.initial(),
            self.accepting_mask().to_vec(),
            edges,
        ))
    }

    /// Reorders tracks to match `target`, which must have the same tracks.
    pub fn aligned_to(&self, target: &Alphabet) -> Result<BuchiAutomaton, AutomatonError> {
        let from = self.alphabet();
        if from == target {
            return Ok(self.clone());
        }
        if !from.same_tracks(target) {
            return Err(AutomatonError::AlphabetMismatch {
                left: target.to_string(),
                right: from.to_string(),
            });
        }
        let perm: Vec<usize> = target
            .tracks()
            .iter()
            .map(|t| from.track_position(t.id()).expect("same tracks"))
            .collect();
        let map: Vec<Letter> = from
            .letters()
            .map(|l| {
                let c = from.decode(l);
                target.encode(&perm.iter().map(|&i| c[i]).collect::<Vec<_>>())
            })
            .collect();
        Ok(self.relabel(target.clone(), |l| map[l as usize]))
    }

    /// Renames one track; letters are unchanged.
    pub fn rename_track(&self, old: &str, new: &str) -> Result<BuchiAutomaton, AutomatonError> {
        let from = self.alphabet();
        let pos = from
            .track_position(old)
            .ok_or_else(|| AutomatonError::UnknownTrack(old.to_string()))?;
        if old == new {
            return Ok(self.clone());
        }
        let mut tracks = from.tracks().to_vec();
        tracks[pos] = tracks[pos].renamed(new)?;
        let to = Alphabet::new(tracks)?;
        Ok(self.relabel(to, |l| l))
    }

    /// Restricts the given tracks to fixed ultimately periodic words (each over
    /// its own single-track alphabet, letters = symbol indices) and drops them.
    pub fn fix_tracks(&self, fixed: &[(&str, &LassoWord)]) -> Result<BuchiAutomaton, AutomatonError> {
        let from = self.alphabet();
        let mut positions = Vec::with_capacity(fixed.len());
        for (id, w) in fixed {
            let pos = from
                .track_position(id)
                .ok_or_else(|| AutomatonError::UnknownTrack(id.to_string()))?;
            let width = from.tracks()[pos].len() as Letter;
            if let Some(&bad) = w.stem().iter().chain(w.cycle()).find(|&&l| l >= width) {
                return Err(AutomatonError::InvalidLetter(bad.to_string()));
            }
            positions.push(pos);
        }
        let words: Vec<&LassoWord> = fixed.iter().map(|(_, w)| *w).collect();
        let s = words.iter().map(|w| w.stem().len()).max().unwrap_or(0);
        let p = words
            .iter()
            .fold(1, |acc, w| super::lasso::lcm(acc, w.cycle().len()));
        let column = |i: usize| -> Vec<usize> { words.iter().map(|w| w.at(i) as usize).collect() };
        let columns: Vec<Vec<usize>> = (0..s + p).map(column).collect();
        let next = |i: usize| if i + 1 == s + p { s } else { i + 1 };
        let keep: Vec<usize> = (0..from.track_count())
            .filter(|i| !positions.contains(i))
            .collect();
        let to = Alphabet::new(keep.iter().map(|&i| from.tracks()[i].clone()).collect())?;
        let mut ex: Explorer<(StateId, usize)> = Explorer::new(UNBOUNDED);
        ex.intern((self.initial(), 0))?;
        let mut edges = Vec::new();
        let mut accepting = Vec::new();
        let mut i = 0;
        while i < ex.len() {
            let (q, pos) = ex.keys[i];
            i += 1;
            accepting.push(self.is_accepting(q));
            let mut out = Vec::new();
            for &(l, t) in self.successors(q) {
                let c = from.decode(l);
                if positions
                    .iter()
                    .zip(&columns[pos])
                    .all(|(&tp, &v)| c[tp] == v)
                {
                    let rest: Vec<usize> = keep.iter().map(|&k| c[k]).collect();
                    out.push((to.encode(&rest), ex.intern((t, next(pos)))?));
                }
            }
            edges.push(out);
        }
        Ok(BuchiAutomaton::from_parts(to, 0, accepting, edges).trim())
    }

    fn relabel(&self, to: Alphabet, f: impl Fn(Letter) -> Letter) -> BuchiAutomaton {
        let edges = (0..self.state_count())
            .map(|p| self.successors(p).iter().map(|&(l, q)| (f(l), q)).collect())
            .collect();
        BuchiAutomaton::from_parts(to, self.initial(), self.accepting_mask().to_vec(), edges)
    }

    /// Syntactically the canonical empty automaton.
    pub(crate) fn is_empty_shape(&self) -> bool {
        self.state_count() == 1 && self.transition_count() == 0 && !self.is_accepting(0)
    }
}
