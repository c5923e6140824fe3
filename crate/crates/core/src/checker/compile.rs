use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use super::{CheckError, Checker, Evaluated, Stats, Verdict};
use crate::automata::{BuchiAutomaton, LassoWord};
use crate::ca::UPConfiguration;
use crate::cardinality::{classify, CardinalityClass};
use crate::logic::{BinOp, Formula, Quantifier, Var};

/// An automaton together with the track of each free variable, sorted by track id.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub automaton: BuchiAutomaton,
    pub tracks: Vec<String>,
}

pub(super) struct Ctx<'a> {
    checker: &'a Checker,
    scope: Vec<(String, String)>,
    used: BTreeSet<String>,
    pub stats: Stats,
}

impl<'a> Ctx<'a> {
    pub fn new(checker: &'a Checker, free: &[&str]) -> Self {
        let mut ctx = Ctx {
            checker,
            scope: Vec::new(),
            used: BTreeSet::new(),
            stats: Stats::default(),
        };
        for &v in free {
            ctx.scope.push((v.to_string(), v.to_string()));
            ctx.used.insert(v.to_string());
        }
        ctx
    }

    fn limit(&self) -> usize {
        self.checker.options.state_budget
    }

    fn track(&self, v: &Var) -> String {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| *n == v.name)
            .map(|(_, t)| t.clone())
            .expect("validated formula")
    }

    /// Binds fresh tracks for `vs`, returning them in binder order.
    pub fn bind(&mut self, vs: &[Var]) -> Vec<String> {
        vs.iter()
            .map(|v| {
                let mut id = v.name.clone();
                let mut k = 1;
                while self.used.contains(&id) {
                    id = format!("{}'{k}", v.name);
                    k += 1;
                }
                self.used.insert(id.clone());
                self.scope.push((v.name.clone(), id.clone()));
                id
            })
            .collect()
    }

    pub fn unbind(&mut self, n: usize) {
        self.scope.truncate(self.scope.len() - n);
    }

    fn domain(&self, tracks: &[String]) -> Result<BuchiAutomaton, CheckError> {
        let ids: Vec<&str> = tracks.iter().map(String::as_str).collect();
        Ok(self.checker.presentation.domain_product(&ids)?)
    }

    fn check_budget(&self, a: &BuchiAutomaton) -> Result<(), CheckError> {
        if a.state_count() > self.limit() {
            return Err(CheckError::Resource(crate::automata::AutomatonError::BudgetExceeded {
                limit: self.limit(),
            }));
        }
        Ok(())
    }

    /// Extends `c` to `tracks` (a sorted superset); with `domain`, new tracks
    /// are constrained to valid encodings.
    pub fn lift(&mut self, c: Compiled, tracks: &[String], domain: bool) -> Result<Compiled, CheckError> {
        if c.tracks == tracks {
            return Ok(c);
        }
        let mut a = c.automaton;
        let mut have = c.tracks;
        for t in tracks {
            if have.contains(t) {
                continue;
            }
            let pos = have.iter().filter(|h| *h < t).count();
            a = a.cylindrify(self.checker.presentation.pair_track(t)?, pos)?;
            have.insert(pos, t.clone());
        }
        if domain {
            a = a.intersect_bounded(&self.domain(tracks)?, self.limit())?;
        }
        Ok(Compiled {
            automaton: a,
            tracks: tracks.to_vec(),
        })
    }

    fn negate(&mut self, c: Compiled) -> Result<Compiled, CheckError> {
        let comp = c.automaton.complement_bounded(self.limit())?;
        let automaton = comp.intersect_bounded(&self.domain(&c.tracks)?, self.limit())?;
        Ok(Compiled {
            automaton,
            tracks: c.tracks,
        })
    }

    fn conj(&mut self, a: Compiled, b: Compiled) -> Result<Compiled, CheckError> {
        let tracks = union_tracks(&a.tracks, &b.tracks);
        let a = self.lift(a, &tracks, false)?;
        let b = self.lift(b, &tracks, false)?;
        let automaton = a.automaton.intersect_bounded(&b.automaton, self.limit())?;
        Ok(Compiled { automaton, tracks })
    }

    fn disj(&mut self, a: Compiled, b: Compiled) -> Result<Compiled, CheckError> {
        let tracks = union_tracks(&a.tracks, &b.tracks);
        let a = self.lift(a, &tracks, true)?;
        let b = self.lift(b, &tracks, true)?;
        let automaton = a.automaton.union(&b.automaton)?;
        self.check_budget(&automaton)?;
        Ok(Compiled { automaton, tracks })
    }

    fn project(&mut self, mut c: Compiled, drop: &[String]) -> Result<Compiled, CheckError> {
        for t in drop {
            if let Some(i) = c.tracks.iter().position(|x| x == t) {
                c.automaton = c.automaton.project(t)?;
                c.tracks.remove(i);
            }
        }
        Ok(c)
    }

    fn constant(b: bool) -> Compiled {
        let unit = crate::automata::Alphabet::unit();
        Compiled {
            automaton: if b {
                BuchiAutomaton::universal(unit)
            } else {
                BuchiAutomaton::empty(unit)
            },
            tracks: Vec::new(),
        }
    }

    pub fn compile(&mut self, f: &Formula) -> Result<Compiled, CheckError> {
        let pres = &self.checker.presentation;
        let out = match f {
            Formula::Const(b, _) => Self::constant(*b),
            Formula::Rel(x, y) => {
                let (tx, ty) = (self.track(x), self.track(y));
                if tx == ty {
                    Compiled {
                        automaton: pres.fixed_points(&tx)?,
                        tracks: vec![tx],
                    }
                } else {
                    let tracks = union_tracks(std::slice::from_ref(&tx), std::slice::from_ref(&ty));
                    let t = pres.transition(&tx, &ty)?;
                    let ids: Vec<&str> = tracks.iter().map(String::as_str).collect();
                    Compiled {
                        automaton: t.aligned_to(&pres.alphabet(&ids)?)?,
                        tracks,
                    }
                }
            }
            Formula::Eq(x, y) => {
                let (tx, ty) = (self.track(x), self.track(y));
                if tx == ty {
                    Compiled {
                        automaton: pres.domain(&tx)?,
                        tracks: vec![tx],
                    }
                } else {
                    let tracks = union_tracks(std::slice::from_ref(&tx), std::slice::from_ref(&ty));
                    Compiled {
                        automaton: pres.equality(&tracks[0], &tracks[1])?,
                        tracks,
                    }
                }
            }
            Formula::Pred(name, x, _) => {
                let tx = self.track(x);
                Compiled {
                    automaton: pres.predicate(name, &tx)?,
                    tracks: vec![tx],
                }
            }
            Formula::Not(g, _) => {
                let c = self.compile(g)?;
                self.negate(c)?
            }
            Formula::Binary(BinOp::And, ..) => {
                let mut parts = Vec::new();
                flatten_and(f, &mut parts);
                let mut compiled = Vec::with_capacity(parts.len());
                for p in &parts {
                    compiled.push((self.compile(p)?, p.span().start));
                }
                compiled.sort_by_key(|(c, start)| (c.automaton.state_count(), *start));
                let mut iter = compiled.into_iter().map(|(c, _)| c);
                let first = iter.next().expect("conjunction has parts");
                iter.try_fold(first, |acc, c| self.conj(acc, c))?
            }
            Formula::Binary(op, a, b, _) => {
                let ca = self.compile(a)?;
                let cb = self.compile(b)?;
                match op {
                    BinOp::Or => self.disj(ca, cb)?,
                    BinOp::Implies => {
                        let na = self.negate(ca)?;
                        self.disj(na, cb)?
                    }
                    BinOp::Iff => {
                        let na = self.negate(ca.clone())?;
                        let nb = self.negate(cb.clone())?;
                        let both = self.conj(ca, cb)?;
                        let neither = self.conj(na, nb)?;
                        self.disj(both, neither)?
                    }
                    BinOp::And => unreachable!(),
                }
            }
            Formula::Quant(Quantifier::Exists, vs, body, _) => {
                let tracks = self.bind(vs);
                let c = self.compile(body);
                self.unbind(vs.len());
                self.project(c?, &tracks)?
            }
            Formula::Quant(Quantifier::Forall, vs, body, _) => {
                let tracks = self.bind(vs);
                let c = self.compile(body);
                self.unbind(vs.len());
                let neg = self.negate(c?)?;
                let ex = self.project(neg, &tracks)?;
                self.negate(ex)?
            }
            Formula::Quant(q, vs, body, _) => {
                let class = self.count(vs, body)?;
                let value = counting_holds(*q, class);
                self.stats.evaluated.push(Evaluated {
                    formula: f.to_string(),
                    cardinality: vec![class],
                    value,
                });
                Self::constant(value)
            }
            Formula::Haertig(vs, a, b, _) => {
                let ca = self.count(vs, a)?;
                let cb = self.count(vs, b)?;
                let value = ca == cb;
                self.stats.evaluated.push(Evaluated {
                    formula: f.to_string(),
                    cardinality: vec![ca, cb],
                    value,
                });
                Self::constant(value)
            }
        };
        self.check_budget(&out.automaton)?;
        self.stats.record(node_label(f), &out.automaton);
        Ok(out)
    }

    /// Compiles `body` over the binder tracks of `vs` (binder order).
    pub fn compile_bound(&mut self, vs: &[Var], body: &Formula) -> Result<(Compiled, Vec<String>), CheckError> {
        let tracks = self.bind(vs);
        let c = self.compile(body);
        self.unbind(vs.len());
        let mut sorted = tracks.clone();
        sorted.sort();
        let c = self.lift(c?, &sorted, true)?;
        Ok((c, tracks))
    }

    /// Cardinality of the set of tuples satisfying a closed counting body.
    pub fn count(&mut self, vs: &[Var], body: &Formula) -> Result<CardinalityClass, CheckError> {
        let (c, _) = self.compile_bound(vs, body)?;
        Ok(classify(&c.automaton)?)
    }
}

pub(super) fn counting_holds(q: Quantifier, class: CardinalityClass) -> bool {
    match q {
        Quantifier::ExistsInf => class.is_infinite(),
        Quantifier::ExistsCard(c) => c.matches(class),
        Quantifier::ExistsMod { t, k } => class.count().is_some_and(|n| n % k == t),
        Quantifier::Exists => class != CardinalityClass::Empty,
        Quantifier::Forall => unreachable!("not a counting quantifier"),
    }
}

fn union_tracks(a: &[String], b: &[String]) -> Vec<String> {
    let set: BTreeSet<&String> = a.iter().chain(b).collect();
    set.into_iter().cloned().collect()
}

fn flatten_and<'f>(f: &'f Formula, out: &mut Vec<&'f Formula>) {
    match f {
        Formula::Binary(BinOp::And, a, b, _) => {
            flatten_and(a, out);
            flatten_and(b, out);
        }
        other => out.push(other),
    }
}

fn node_label(f: &Formula) -> String {
    let binder = |vs: &[Var]| vs.iter().map(|v| v.name.as_str()).collect::<Vec<_>>().join(",");
    match f {
        Formula::Const(..) | Formula::Rel(..) | Formula::Eq(..) | Formula::Pred(..) => f.to_string(),
        Formula::Not(..) => "~".into(),
        Formula::Binary(BinOp::And, ..) => "&".into(),
        Formula::Binary(BinOp::Or, ..) => "|".into(),
        Formula::Binary(BinOp::Implies, ..) => "=>".into(),
        Formula::Binary(BinOp::Iff, ..) => "<=>".into(),
        Formula::Quant(q, vs, ..) => format!("{q} {}", binder(vs)),
        Formula::Haertig(vs, ..) => format!("H {}", binder(vs)),
    }
}

impl Checker {
    /// Compiles `f` with free variables `free`; the result has one track per
    /// free variable, named after it and sorted by name.
    pub fn compile(&self, f: &Formula, free: &[&str]) -> Result<Compiled, CheckError> {
        self.compile_with_stats(f, free).map(|(c, _)| c)
    }

    pub fn compile_with_stats(&self, f: &Formula, free: &[&str]) -> Result<(Compiled, Stats), CheckError> {
        self.validate(f, free)?;
        let mut ctx = Ctx::new(self, free);
        let c = ctx.compile(f)?;
        let mut all: Vec<String> = free.iter().map(|s| s.to_string()).collect();
        all.sort();
        all.dedup();
        let c = ctx.lift(c, &all, true)?;
        Ok((c, ctx.stats))
    }

    /// Cardinality of `{ (v1, …, vn) : body }`.
    pub fn count_solutions(&self, vars: &[&str], body: &Formula) -> Result<CardinalityClass, CheckError> {
        let c = self.compile(body, vars)?;
        Ok(classify(&c.automaton)?)
    }

    /// The convolution of the encodings of `configs`, in the given track order.
    pub fn convolution(&self, configs: &[&UPConfiguration]) -> Result<LassoWord, CheckError> {
        let pres = &self.presentation;
        let words = configs
            .iter()
            .map(|c| pres.encode(c))
            .collect::<Result<Vec<_>, _>>()?;
        let refs: Vec<&LassoWord> = words.iter().collect();
        let ids: Vec<String> = (0..configs.len()).map(|i| format!("t{i}")).collect();
        let id_refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        let alphabet = pres.alphabet(&id_refs)?;
        Ok(LassoWord::convolve(&refs, |ls| {
            let comps: Vec<usize> = ls.iter().map(|&l| l as usize).collect();
            alphabet.encode(&comps)
        }))
    }

    /// Decides a sentence.
    pub fn decide(&self, f: &Formula) -> Result<Verdict, CheckError> {
        let start = Instant::now();
        let free: Vec<String> = f.free_vars().into_iter().collect();
        if !free.is_empty() {
            return Err(CheckError::NotASentence(free));
        }
        self.validate(f, &[])?;
        let mut ctx = Ctx::new(self, &[]);
        let (result, cardinality) = match f {
            Formula::Quant(q, vs, body, _) if q.is_counting() => {
                let class = ctx.count(vs, body)?;
                (counting_holds(*q, class), Some(class))
            }
            _ => {
                let c = ctx.compile(f)?;
                (!c.automaton.is_empty(), None)
            }
        };
        let witness = match f {
            Formula::Quant(q, vs, body, _) if result && !matches!(q, Quantifier::Forall) => {
                if cardinality == Some(CardinalityClass::Empty) {
                    None
                } else {
                    // separate context so the statistics describe the decision only
                    Some(self.witness_in(&mut Ctx::new(self, &[]), vs, body)?)
                }
            }
            _ => None,
        };
        Ok(Verdict {
            formula: f.to_string(),
            result,
            cardinality,
            witness,
            stats: ctx.stats,
            elapsed: start.elapsed(),
        })
    }

    /// Configurations for the bound variables of an existential-type sentence
    /// (`E`, `Ecard`, `Einf`, `Emod`), re-verified by direct evaluation.
    pub fn witness(&self, f: &Formula) -> Result<BTreeMap<String, UPConfiguration>, CheckError> {
        self.validate(f, &[])?;
        match f {
            Formula::Quant(q, vs, body, _) if !matches!(q, Quantifier::Forall) => {
                let mut ctx = Ctx::new(self, &[]);
                let (c, tracks) = ctx.compile_bound(vs, body)?;
                self.extract(&c, vs, &tracks, body)
            }
            _ => Err(CheckError::Unsat),
        }
    }

    fn witness_in(&self, ctx: &mut Ctx, vs: &[Var], body: &Formula) -> Result<BTreeMap<String, String>, CheckError> {
        let (c, tracks) = ctx.compile_bound(vs, body)?;
        let found = self.extract(&c, vs, &tracks, body)?;
        Ok(found
            .into_iter()
            .map(|(k, v)| (k, self.configuration_literal(&v)))
            .collect())
    }

    fn extract(
        &self,
        c: &Compiled,
        vs: &[Var],
        tracks: &[String],
        body: &Formula,
    ) -> Result<BTreeMap<String, UPConfiguration>, CheckError> {
        let w = c.automaton.find_lasso().ok_or(CheckError::Unsat)?;
        let env = self.split(&c.automaton, &w, vs, tracks)?;
        if !self.evaluate(body, &env)? {
            return Err(CheckError::WitnessRejected(body.to_string()));
        }
        Ok(env)
    }

    /// Splits a joint word into one configuration per variable.
    pub(super) fn split(
        &self,
        a: &BuchiAutomaton,
        w: &LassoWord,
        vs: &[Var],
        tracks: &[String],
    ) -> Result<BTreeMap<String, UPConfiguration>, CheckError> {
        let alphabet = a.alphabet();
        let mut env = BTreeMap::new();
        for (v, t) in vs.iter().zip(tracks) {
            let pos = alphabet
                .track_position(t)
                .expect("binder tracks are present after lifting");
            let word = w.map(|l| alphabet.component(l, pos) as u32);
            env.insert(v.name.clone(), self.presentation.decode(&word)?);
        }
        Ok(env)
    }
}
