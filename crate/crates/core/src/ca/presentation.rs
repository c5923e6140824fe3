//! The folded encoding of configurations and the automata of the structure
//! `(Q^ℤ, →)`.
//!
//! A configuration `c` is represented by the ω-word `x_c` over `Q × Q` with
//! `x_c(0) = (c(0), c(0))` and `x_c(n) = (c(-n), c(n))`: the first component
//! runs along the negative axis.

use std::collections::BTreeMap;

use super::{CaError, CaRule, UPConfiguration};
use crate::automata::{lcm, Alphabet, BuchiAutomaton, Explorer, LassoWord, Letter, Track, UNBOUNDED};

/// Encoding conventions and base automata for one rule.
#[derive(Clone, Debug)]
pub struct Presentation {
    rule: CaRule,
    pair_symbols: Vec<String>,
    predicates: BTreeMap<String, BuchiAutomaton>,
}

impl Presentation {
    pub fn new(rule: CaRule) -> Self {
        let states = rule.states();
        let single = states.iter().all(|s| s.chars().count() == 1);
        let mut pair_symbols = Vec::with_capacity(states.len() * states.len());
        for a in states {
            for b in states {
                pair_symbols.push(if single {
                    format!("{a}{b}")
                } else {
                    format!("{a}/{b}")
                });
            }
        }
        Presentation {
            rule,
            pair_symbols,
            predicates: BTreeMap::new(),
        }
    }

    pub fn rule(&self) -> &CaRule {
        &self.rule
    }

    fn q(&self) -> usize {
        self.rule.state_count()
    }

    /// Symbol index of the pair `(neg, pos)`.
    pub fn pair(&self, neg: usize, pos: usize) -> Letter {
        (neg * self.q() + pos) as Letter
    }

    /// Components `(neg, pos)` of a pair symbol.
    pub fn unpair(&self, symbol: Letter) -> (usize, usize) {
        let s = symbol as usize;
        (s / self.q(), s % self.q())
    }

    /// A track over `Q × Q` named `id`.
    pub fn pair_track(&self, id: &str) -> Result<Track, CaError> {
        Ok(Track::new(id, self.pair_symbols.iter().map(String::as_str))?)
    }

    /// Alphabet with one pair track per identifier, in the given order.
    pub fn alphabet(&self, ids: &[&str]) -> Result<Alphabet, CaError> {
        let tracks = ids
            .iter()
            .map(|id| self.pair_track(id))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Alphabet::new(tracks)?)
    }

    /// The folded word `x_c`.
    pub fn encode(&self, c: &UPConfiguration) -> Result<LassoWord, CaError> {
        if c.max_state() >= self.q() {
            return Err(CaError::UnknownState(c.max_state().to_string()));
        }
        let lo = c.center_start();
        let hi = lo + c.center().len() as i64;
        // from position n on, both axes are inside their periodic tails
        let n = (1 - lo).max(hi).max(1) as usize;
        let p = lcm(c.left_period().len(), c.right_period().len());
        let letter = |i: usize| self.pair(c.at(-(i as i64)), c.at(i as i64));
        let stem = (0..n).map(letter).collect();
        let cycle = (n..n + p).map(letter).collect();
        Ok(LassoWord::new(stem, cycle)?.canonical())
    }

    /// Inverse of [`Presentation::encode`].
    pub fn decode(&self, w: &LassoWord) -> Result<UPConfiguration, CaError> {
        let q = self.q();
        if let Some(&bad) = w.stem().iter().chain(w.cycle()).find(|&&l| l as usize >= q * q) {
            return Err(CaError::UnknownState(bad.to_string()));
        }
        let (a, b) = self.unpair(w.at(0));
        if a != b {
            return Err(CaError::DomainViolation);
        }
        let n = w.stem().len().max(1);
        let p = w.cycle().len();
        let neg = |i: usize| self.unpair(w.at(i)).0;
        let pos = |i: usize| self.unpair(w.at(i)).1;
        // cells -(n-1) .. n-1 form the center
        let center: Vec<usize> = (1..n).rev().map(neg).chain((0..n).map(pos)).collect();
        let start = -(n as i64 - 1);
        let right = (n..n + p).map(pos).collect();
        // left[(z - start) mod p] = c(z) for z < start, i.e. z = start - p + i
        let left = (0..p).map(|i| neg(n - 1 + p - i)).collect();
        UPConfiguration::new(left, center, start, right)
    }

    /// Words whose first letter is diagonal.
    pub fn domain(&self, id: &str) -> Result<BuchiAutomaton, CaError> {
        self.domain_product(&[id])
    }

    /// Conjunction of the domain constraint on every listed track.
    pub fn domain_product(&self, ids: &[&str]) -> Result<BuchiAutomaton, CaError> {
        let alphabet = self.alphabet(ids)?;
        let q = self.q();
        let k = ids.len();
        let mut first = Vec::new();
        let mut comps = vec![0; k];
        for l in alphabet.letters() {
            for (t, c) in comps.iter_mut().enumerate() {
                *c = alphabet.component(l, t);
            }
            if comps.iter().all(|&s| s / q == s % q) {
                first.push((l, 1));
            }
        }
        let rest: Vec<_> = alphabet.letters().map(|l| (1, l, 1)).collect();
        let transitions = first.into_iter().map(|(l, t)| (0, l, t)).chain(rest);
        Ok(BuchiAutomaton::new(alphabet, 2, 0, [0, 1], transitions)?)
    }

    /// `x = y` on tracks `x` and `y` (in that order).
    pub fn equality(&self, x: &str, y: &str) -> Result<BuchiAutomaton, CaError> {
        let alphabet = self.alphabet(&[x, y])?;
        let q = self.q();
        let mut t = Vec::new();
        for s in 0..q * q {
            let l = alphabet.encode(&[s, s]);
            if s / q == s % q {
                t.push((0, l, 1));
            }
            t.push((1, l, 1));
        }
        Ok(BuchiAutomaton::new(alphabet, 2, 0, [0, 1], t)?)
    }

    /// `x → y`: the deterministic sliding-window automaton over tracks `x`
    /// (configuration) and `y` (successor), in that order.
    ///
    /// A state stores the last `min(n, 2r)` letters of `x` and the last
    /// `min(n, r)` letters of `y` that are not yet checked. On reading
    /// position `n >= r` the cells `c'(n-r)` and `c'(-(n-r))` are compared with
    /// the local rule.
    pub fn transition(&self, x: &str, y: &str) -> Result<BuchiAutomaton, CaError> {
        let alphabet = self.alphabet(&[x, y])?;
        let rule = &self.rule;
        let q = self.q();
        let r = rule.radius();
        let letters: Vec<(usize, usize, Letter)> = alphabet
            .letters()
            .map(|l| (alphabet.component(l, 0), alphabet.component(l, 1), l))
            .collect();
        let mut ex: Explorer<(Vec<usize>, Vec<usize>)> = Explorer::new(UNBOUNDED);
        ex.intern((Vec::new(), Vec::new()))?;
        let mut edges = Vec::new();
        let mut window = vec![0; rule.width()];
        let mut i = 0;
        while i < ex.len() {
            let (xs, ys) = ex.keys[i].clone();
            i += 1;
            let p = xs.len();
            let full = p == 2 * r;
            let mut out = Vec::new();
            for &(xl, yl, l) in &letters {
                if p == 0 && (xl / q != xl % q || yl / q != yl % q) {
                    continue;
                }
                let mut xw = xs.clone();
                xw.push(xl);
                let mut yw = ys.clone();
                yw.push(yl);
                if p >= r {
                    let m = (p - r) as i64;
                    // cell c(j) read from the window (positions 0..=p)
                    let cell = |j: i64, negative_side: bool| -> usize {
                        let (neg, pos) = if full && negative_side {
                            (true, -j)
                        } else if j >= 0 {
                            (false, j)
                        } else {
                            (true, -j)
                        };
                        let s = xw[pos as usize];
                        if neg {
                            s / q
                        } else {
                            s % q
                        }
                    };
                    let ry = yw[yw.len() - 1 - r];
                    for (k, w) in window.iter_mut().enumerate() {
                        *w = cell(m - r as i64 + k as i64, false);
                    }
                    let ok_pos = rule.apply(&window) == ry % q;
                    for (k, w) in window.iter_mut().enumerate() {
                        let j = -m - r as i64 + k as i64;
                        *w = if full { cell(j, true) } else { cell(j, false) };
                    }
                    let ok_neg = rule.apply(&window) == ry / q;
                    if !(ok_pos && ok_neg) {
                        continue;
                    }
                }
                if xw.len() > 2 * r {
                    xw.remove(0);
                }
                if yw.len() > r {
                    yw.remove(0);
                }
                out.push((l, ex.intern((xw, yw))?));
            }
            edges.push(out);
        }
        let n = edges.len();
        let transitions = edges
            .into_iter()
            .enumerate()
            .flat_map(|(p, es)| es.into_iter().map(move |(l, t)| (p, l, t)));
        Ok(BuchiAutomaton::new(alphabet, n, 0, 0..n, transitions)?)
    }

    /// `x → x` on a single track: the transition relation restricted to equal components.
    pub fn fixed_points(&self, x: &str) -> Result<BuchiAutomaton, CaError> {
        let t = self.transition(x, "__succ")?;
        let from = t.alphabet();
        let to = self.alphabet(&[x])?;
        let transitions: Vec<_> = t
            .transitions()
            .filter(|&(_, l, _)| from.component(l, 0) == from.component(l, 1))
            .map(|(p, l, q)| (p, from.component(l, 0) as Letter, q))
            .collect();
        Ok(BuchiAutomaton::new(to, t.state_count(), t.initial(), 0..t.state_count(), transitions)?.trim())
    }

    /// Registers `automaton` (over a single `Q × Q` track) as the unary predicate `name`.
    pub fn register_predicate(&mut self, name: &str, automaton: BuchiAutomaton) -> Result<(), CaError> {
        let a = self.check_predicate(automaton)?;
        self.predicates.insert(name.to_string(), a);
        Ok(())
    }

    /// The predicate automaton `R` for a single-configuration set `{c}`.
    pub fn singleton(&self, c: &UPConfiguration) -> Result<BuchiAutomaton, CaError> {
        let track = self.pair_track("x")?;
        Ok(BuchiAutomaton::from_lasso(Alphabet::single(track), &self.encode(c)?)?)
    }

    fn check_predicate(&self, automaton: BuchiAutomaton) -> Result<BuchiAutomaton, CaError> {
        let alphabet = automaton.alphabet();
        if alphabet.track_count() != 1 || alphabet.tracks()[0].symbols() != self.pair_symbols.as_slice() {
            return Err(CaError::PredicateAlphabet(alphabet.to_string()));
        }
        let id = alphabet.tracks()[0].id().to_string();
        let a = automaton.rename_track(&id, "x")?;
        let outside = a.intersect(&self.domain("x")?.complement())?;
        if !outside.is_empty() {
            return Err(CaError::NotWithinDomain);
        }
        Ok(a)
    }

    pub fn predicate_names(&self) -> impl Iterator<Item = &str> {
        self.predicates.keys().map(String::as_str)
    }

    pub fn has_predicate(&self, name: &str) -> bool {
        self.predicates.contains_key(name)
    }

    /// Predicate automaton with its track renamed to `id`.
    pub fn predicate(&self, name: &str, id: &str) -> Result<BuchiAutomaton, CaError> {
        let a = self
            .predicates
            .get(name)
            .ok_or_else(|| CaError::UnknownPredicate(name.to_string()))?;
        Ok(a.rename_track("x", id)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cardinality::{classify, CardinalityClass};

    fn bits() -> Vec<String> {
        vec!["0".into(), "1".into()]
    }

    fn lit(s: &str) -> UPConfiguration {
        UPConfiguration::parse(s, &bits()).unwrap()
    }

    fn pres(code: u32) -> Presentation {
        Presentation::new(CaRule::elementary(code).unwrap())
    }

    fn related(p: &Presentation, t: &BuchiAutomaton, c: &UPConfiguration, d: &UPConfiguration) -> bool {
        let alphabet = t.alphabet().clone();
        let w = LassoWord::convolve(&[&p.encode(c).unwrap(), &p.encode(d).unwrap()], |ls| {
            alphabet.encode(&[ls[0] as usize, ls[1] as usize])
        });
        t.member_up(&w).unwrap()
    }

    fn small_configs() -> Vec<UPConfiguration> {
        let mut words = vec![vec![]];
        for len in 1..=2 {
            for bits in 0..(1 << len) {
                words.push((0..len).map(|i| (bits >> i) & 1).collect::<Vec<usize>>());
            }
        }
        let periods: Vec<Vec<usize>> = words.iter().filter(|w| !w.is_empty()).cloned().collect();
        let mut out = Vec::new();
        for l in &periods {
            for c in &words {
                for r in &periods {
                    out.push(UPConfiguration::new(l.clone(), c.clone(), 0, r.clone()).unwrap());
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    #[test]
    fn encoding_examples() {
        let p = pres(204);
        let zero = UPConfiguration::constant(0);
        assert_eq!(p.encode(&zero).unwrap(), LassoWord::periodic(vec![p.pair(0, 0)]).unwrap());
        let one = lit("(0)^w 1 (0)^w");
        assert_eq!(
            p.encode(&one).unwrap(),
            LassoWord::new(vec![p.pair(1, 1)], vec![p.pair(0, 0)]).unwrap()
        );
        let mixed = lit("(0)^w 0 (10)^w");
        let w = p.encode(&mixed).unwrap();
        let expect = [p.pair(0, 0), p.pair(0, 1), p.pair(0, 0), p.pair(0, 1), p.pair(0, 0)];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(w.at(i), e);
        }
    }

    #[test]
    fn decode_inverts_encode() {
        let p = pres(110);
        for c in small_configs() {
            assert_eq!(p.decode(&p.encode(&c).unwrap()).unwrap(), c);
        }
        let bad = LassoWord::periodic(vec![p.pair(0, 1)]).unwrap();
        assert!(matches!(p.decode(&bad), Err(CaError::DomainViolation)));
    }

    #[test]
    fn domain_automaton() {
        let p = pres(204);
        let d = p.domain("x").unwrap();
        assert_eq!(d.state_count(), 2);
        assert!(d.member_up(&LassoWord::new(vec![p.pair(0, 0)], vec![p.pair(0, 1)]).unwrap()).unwrap());
        assert!(!d.member_up(&LassoWord::new(vec![p.pair(0, 1)], vec![p.pair(0, 0)]).unwrap()).unwrap());
        assert_eq!(classify(&d).unwrap(), CardinalityClass::Uncountable);
    }

    #[test]
    fn relation_matches_simulator() {
        let configs = small_configs();
        for code in [204, 51, 170, 90, 110, 30] {
            let p = pres(code);
            let t = p.transition("x", "y").unwrap();
            assert!(t.is_deterministic());
            for c in &configs {
                let next = c.step(p.rule());
                assert!(related(&p, &t, c, &next), "rule {code}: {c:?}");
                for d in configs.iter().take(12) {
                    assert_eq!(related(&p, &t, c, d), *d == next, "rule {code}: {c:?} -> {d:?}");
                }
            }
        }
    }

    #[test]
    fn rule_90_kills_all_ones() {
        let p = pres(90);
        let t = p.transition("x", "y").unwrap();
        assert!(related(&p, &t, &UPConfiguration::constant(1), &UPConfiguration::constant(0)));
        assert!(!t.is_empty());
    }

    fn check_against_simulator(rule: CaRule, literals: &[&str]) {
        let states = rule.states().to_vec();
        let p = Presentation::new(rule);
        let t = p.transition("x", "y").unwrap();
        assert!(t.is_deterministic());
        let configs: Vec<UPConfiguration> =
            literals.iter().map(|s| UPConfiguration::parse(s, &states).unwrap()).collect();
        for c in &configs {
            let next = c.step(p.rule());
            assert!(related(&p, &t, c, &next));
            for d in &configs {
                assert_eq!(related(&p, &t, c, d), *d == next);
            }
        }
    }

    #[test]
    fn three_states() {
        let states: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let rule = CaRule::from_fn(states, 1, None, |w| (w[0] + 2 * w[1] + w[2] * w[0]) % 3).unwrap();
        check_against_simulator(
            rule,
            &["(a)^w (a)^w", "(ab)^w c (a)^w", "(c)^w ba@-1 (bca)^w", "(a)^w cc@2 (b)^w", "(b)^w (b)^w"],
        );
    }

    #[test]
    fn radius_two() {
        let rule = CaRule::from_fn(vec!["0".into(), "1".into()], 2, None, |w| {
            (w[0] & w[4]) ^ w[1] ^ (w[2] | w[3])
        })
        .unwrap();
        check_against_simulator(
            rule,
            &["(0)^w (0)^w", "(0)^w 1 (0)^w", "(01)^w 1 (1)^w", "(1)^w 00110@-2 (011)^w", "(10)^w (0)^w", "(1)^w (1)^w"],
        );
    }

    #[test]
    fn projection_of_identity_is_the_domain() {
        let p = pres(204);
        let proj = p.transition("x", "y").unwrap().project("y").unwrap();
        let dom = p.domain("x").unwrap();
        for c in small_configs() {
            let w = p.encode(&c).unwrap();
            assert_eq!(proj.member_up(&w).unwrap(), dom.member_up(&w).unwrap());
        }
        let bad = LassoWord::periodic(vec![p.pair(1, 0)]).unwrap();
        assert!(!proj.member_up(&bad).unwrap());
    }

    #[test]
    fn predicates() {
        let mut p = pres(90);
        let zero = p.singleton(&UPConfiguration::constant(0)).unwrap();
        p.register_predicate("zero", zero).unwrap();
        let z = p.predicate("zero", "v").unwrap();
        assert!(z.member_up(&p.encode(&UPConfiguration::constant(0)).unwrap()).unwrap());
        assert!(!z.member_up(&p.encode(&lit("(0)^w 1 (0)^w")).unwrap()).unwrap());
        let dom = p.domain("x").unwrap();
        p.register_predicate("all", dom).unwrap();
        let bad = BuchiAutomaton::from_lasso(
            Alphabet::single(p.pair_track("x").unwrap()),
            &LassoWord::periodic(vec![p.pair(0, 1)]).unwrap(),
        )
        .unwrap();
        assert!(matches!(p.register_predicate("bad", bad), Err(CaError::NotWithinDomain)));
        assert!(matches!(p.predicate("nope", "x"), Err(CaError::UnknownPredicate(_))));
    }

    #[test]
    fn fixed_point_automaton() {
        assert_eq!(classify(&pres(204).fixed_points("x").unwrap()).unwrap(), CardinalityClass::Uncountable);
        assert_eq!(classify(&pres(51).fixed_points("x").unwrap()).unwrap(), CardinalityClass::Empty);
        assert_eq!(classify(&pres(170).fixed_points("x").unwrap()).unwrap(), CardinalityClass::Finite(2));
        assert_eq!(classify(&pres(90).fixed_points("x").unwrap()).unwrap(), CardinalityClass::Finite(4));
    }
}
