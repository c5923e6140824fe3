use super::{Alphabet, AutomatonError, LassoWord, Letter};

pub type StateId = usize;

/// A nondeterministic Büchi automaton with a single initial state.
///
/// Transitions are stored per source state, sorted by `(letter, target)` and
/// free of duplicates. Values are immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuchiAutomaton {
    alphabet: Alphabet,
    initial: StateId,
    accepting: Vec<bool>,
    edges: Vec<Vec<(Letter, StateId)>>,
}

impl BuchiAutomaton {
    pub fn new(
        alphabet: Alphabet,
        state_count: usize,
        initial: StateId,
        accepting: impl IntoIterator<Item = StateId>,
        transitions: impl IntoIterator<Item = (StateId, Letter, StateId)>,
    ) -> Result<Self, AutomatonError> {
        if state_count == 0 || initial >= state_count {
            return Err(AutomatonError::InvalidState(initial));
        }
        let mut acc = vec![false; state_count];
        for q in accepting {
            *acc.get_mut(q).ok_or(AutomatonError::InvalidState(q))? = true;
        }
        let mut edges = vec![Vec::new(); state_count];
        for (p, l, q) in transitions {
            if p >= state_count {
                return Err(AutomatonError::InvalidState(p));
            }
            if q >= state_count {
                return Err(AutomatonError::InvalidState(q));
            }
            if !alphabet.contains(l) {
                return Err(AutomatonError::InvalidLetter(l.to_string()));
            }
            edges[p].push((l, q));
        }
        Ok(Self::from_parts(alphabet, initial, acc, edges))
    }

    pub(crate) fn from_parts(
        alphabet: Alphabet,
        initial: StateId,
        accepting: Vec<bool>,
        mut edges: Vec<Vec<(Letter, StateId)>>,
    ) -> Self {
        debug_assert_eq!(accepting.len(), edges.len());
        for e in &mut edges {
            e.sort_unstable();
            e.dedup();
        }
        BuchiAutomaton {
            alphabet,
            initial,
            accepting,
            edges,
        }
    }

    /// The canonical empty automaton: one state, no transitions, nothing accepting.
    pub fn empty(alphabet: Alphabet) -> Self {
        BuchiAutomaton {
            alphabet,
            initial: 0,
            accepting: vec![false],
            edges: vec![Vec::new()],
        }
    }

    /// One accepting state with a self-loop on every letter.
    pub fn universal(alphabet: Alphabet) -> Self {
        let loops = alphabet.letters().map(|l| (l, 0)).collect();
        BuchiAutomaton {
            alphabet,
            initial: 0,
            accepting: vec![true],
            edges: vec![loops],
        }
    }

    /// Accepts exactly the single ω-word `w`.
    pub fn from_lasso(alphabet: Alphabet, w: &LassoWord) -> Result<Self, AutomatonError> {
        w.check_alphabet(&alphabet)?;
        let s = w.stem().len();
        let n = s + w.cycle().len();
        let edges = (0..n)
            .map(|i| {
                let next = if i + 1 == n { s } else { i + 1 };
                vec![(w.at(i), next)]
            })
            .collect();
        Ok(BuchiAutomaton {
            alphabet,
            initial: 0,
            accepting: vec![true; n],
            edges,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.edges.len()
    }

    pub fn transition_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.state_count()).filter(|&q| self.accepting[q])
    }

    pub(crate) fn accepting_mask(&self) -> &[bool] {
        &self.accepting
    }

    /// Outgoing `(letter, target)` pairs of `q`, sorted.
    pub fn successors(&self, q: StateId) -> &[(Letter, StateId)] {
        &self.edges[q]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, Letter, StateId)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .flat_map(|(p, es)| es.iter().map(move |&(l, q)| (p, l, q)))
    }

    /// Targets of `q` on `letter`.
    pub fn post(&self, q: StateId, letter: Letter) -> impl Iterator<Item = StateId> + '_ {
        let es = &self.edges[q];
        let start = es.partition_point(|&(l, _)| l < letter);
        es[start..]
            .iter()
            .take_while(move |&&(l, _)| l == letter)
            .map(|&(_, t)| t)
    }

    /// At most one transition per `(state, letter)`.
    pub fn is_deterministic(&self) -> bool {
        self.edges
            .iter()
            .all(|es| es.windows(2).all(|w| w[0].0 != w[1].0))
    }

    pub fn is_complete(&self) -> bool {
        let size = self.alphabet.size();
        self.edges.iter().all(|es| {
            let mut distinct = 0;
            let mut last = None;
            for &(l, _) in es {
                if last != Some(l) {
                    distinct += 1;
                    last = Some(l);
                }
            }
            distinct == size
        })
    }

    /// Every state of the automaton is accepting.
    pub fn all_accepting(&self) -> bool {
        self.accepting.iter().all(|&a| a)
    }

    /// Every nontrivial strongly connected component is either entirely
    /// accepting or entirely rejecting.
    pub fn is_weak(&self) -> bool {
        let sccs = Sccs::of(self);
        let mut kind: Vec<Option<bool>> = vec![None; sccs.count];
        for q in 0..self.state_count() {
            let c = sccs.component[q];
            if !sccs.nontrivial[c] {
                continue;
            }
            match kind[c] {
                None => kind[c] = Some(self.accepting[q]),
                Some(k) if k != self.accepting[q] => return false,
                _ => {}
            }
        }
        true
    }

    pub(crate) fn with_accepting(&self, accepting: Vec<bool>) -> Self {
        BuchiAutomaton {
            alphabet: self.alphabet.clone(),
            initial: self.initial,
            accepting,
            edges: self.edges.clone(),
        }
    }

    pub(crate) fn into_parts(self) -> (Alphabet, StateId, Vec<bool>, Vec<Vec<(Letter, StateId)>>) {
        (self.alphabet, self.initial, self.accepting, self.edges)
    }

    /// States reachable from the initial state, in breadth-first order.
    pub(crate) fn reachable_order(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.state_count()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut i = 0;
        while i < order.len() {
            let p = order[i];
            i += 1;
            for &(_, q) in &self.edges[p] {
                if !seen[q] {
                    seen[q] = true;
                    order.push(q);
                }
            }
        }
        order
    }
}

/// Strongly connected components (iterative Tarjan).
#[derive(Debug, Clone)]
pub(crate) struct Sccs {
    pub component: Vec<usize>,
    pub count: usize,
    /// Component has a cycle (more than one state, or a self-loop).
    pub nontrivial: Vec<bool>,
}

impl Sccs {
    pub fn of(a: &BuchiAutomaton) -> Sccs {
        Self::of_graph(a.state_count(), |p| a.edges[p].iter().map(|&(_, q)| q), |_| true)
    }

    /// SCCs of the subgraph induced by `keep`; excluded nodes get trivial singleton components.
    pub fn of_graph<I>(
        n: usize,
        succ: impl Fn(usize) -> I,
        keep: impl Fn(usize) -> bool,
    ) -> Sccs
    where
        I: Iterator<Item = usize>,
    {
        const UNSEEN: usize = usize::MAX;
        let mut index = vec![UNSEEN; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut component = vec![UNSEEN; n];
        let mut count = 0;
        let mut next_index = 0;
        let mut call: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        for root in 0..n {
            if index[root] != UNSEEN || !keep(root) {
                continue;
            }
            let succs: Vec<usize> = succ(root).filter(|&q| keep(q)).collect();
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root] = true;
            call.push((root, succs, 0));
            while let Some((v, succs, pos)) = call.last_mut() {
                let v = *v;
                if *pos < succs.len() {
                    let w = succs[*pos];
                    *pos += 1;
                    if index[w] == UNSEEN {
                        let ws: Vec<usize> = succ(w).filter(|&q| keep(q)).collect();
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, ws, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some((u, _, _)) = call.last() {
                        let u = *u;
                        low[u] = low[u].min(low[v]);
                    }
                    if low[v] == index[v] {
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            on_stack[w] = false;
                            component[w] = count;
                            if w == v {
                                break;
                            }
                        }
                        count += 1;
                    }
                }
            }
        }
        for c in component.iter_mut() {
            if *c == UNSEEN {
                *c = count;
                count += 1;
            }
        }
        let mut size = vec![0usize; count];
        for &c in &component {
            size[c] += 1;
        }
        let mut nontrivial: Vec<bool> = size.iter().map(|&s| s > 1).collect();
        for v in 0..n {
            if keep(v) && succ(v).any(|w| w == v) {
                nontrivial[component[v]] = true;
            }
        }
        Sccs {
            component,
            count,
            nontrivial,
        }
    }

    /// Members of each component.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut m = vec![Vec::new(); self.count];
        for (v, &c) in self.component.iter().enumerate() {
            m[c].push(v);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Track;

    fn ab() -> Alphabet {
        Alphabet::single(Track::new("x", ["a", "b"]).unwrap())
    }

    #[test]
    fn construction_validates_endpoints() {
        assert!(BuchiAutomaton::new(ab(), 2, 0, [1], [(0, 0, 2)]).is_err());
        assert!(BuchiAutomaton::new(ab(), 2, 2, [], []).is_err());
        assert!(BuchiAutomaton::new(ab(), 2, 0, [5], []).is_err());
        assert!(BuchiAutomaton::new(ab(), 2, 0, [], [(0, 7, 1)]).is_err());
        let a = BuchiAutomaton::new(ab(), 2, 0, [1], [(0, 0, 1), (0, 0, 1), (1, 1, 1)]).unwrap();
        assert_eq!(a.transition_count(), 2);
        assert!(a.is_deterministic());
        assert!(!a.is_complete());
    }

    #[test]
    fn sccs_of_a_chain_with_loop() {
        let a = BuchiAutomaton::new(ab(), 3, 0, [2], [(0, 0, 1), (1, 0, 2), (2, 1, 1)]).unwrap();
        let s = Sccs::of(&a);
        assert_ne!(s.component[0], s.component[1]);
        assert_eq!(s.component[1], s.component[2]);
        assert!(!s.nontrivial[s.component[0]]);
        assert!(s.nontrivial[s.component[1]]);
        assert!(!a.is_weak());
    }

    #[test]
    fn post_finds_all_targets() {
        let a = BuchiAutomaton::new(ab(), 3, 0, [], [(0, 0, 1), (0, 0, 2), (0, 1, 0)]).unwrap();
        assert_eq!(a.post(0, 0).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(a.post(0, 1).collect::<Vec<_>>(), vec![0]);
        assert!(!a.is_deterministic());
    }
}
