use std::collections::{BTreeMap, BTreeSet};

use super::compile::{counting_holds, Ctx};
use super::{CheckError, Checker};
use crate::automata::{BuchiAutomaton, LassoWord};
use crate::ca::UPConfiguration;
use crate::cardinality::classify;
use crate::logic::{BinOp, Formula, Quantifier, Var};

impl Checker {
    /// Evaluates `f` under an assignment of configurations to its free
    /// variables. Atoms are checked directly on the configurations; quantifiers
    /// are resolved by compiling their body with the free variables fixed.
    pub fn evaluate(&self, f: &Formula, env: &BTreeMap<String, UPConfiguration>) -> Result<bool, CheckError> {
        let get = |v: &Var| -> Result<&UPConfiguration, CheckError> {
            env.get(&v.name)
                .ok_or_else(|| CheckError::NotASentence(vec![v.name.clone()]))
        };
        Ok(match f {
            Formula::Const(b, _) => *b,
            Formula::Rel(x, y) => get(x)?.step(self.rule()) == *get(y)?,
            Formula::Eq(x, y) => get(x)? == get(y)?,
            Formula::Pred(name, x, _) => {
                let w = self.presentation.encode(get(x)?)?;
                self.presentation.predicate(name, "x")?.member_up(&w)?
            }
            Formula::Not(g, _) => !self.evaluate(g, env)?,
            Formula::Binary(op, a, b, _) => {
                let a = self.evaluate(a, env)?;
                match op {
                    BinOp::And => a && self.evaluate(b, env)?,
                    BinOp::Or => a || self.evaluate(b, env)?,
                    BinOp::Implies => !a || self.evaluate(b, env)?,
                    BinOp::Iff => a == self.evaluate(b, env)?,
                }
            }
            Formula::Quant(Quantifier::Exists, vs, body, _) => self.search(vs, body, env)?.is_some(),
            Formula::Quant(Quantifier::Forall, vs, body, _) => {
                let neg = Formula::not(body.as_ref().clone());
                self.search(vs, &neg, env)?.is_none()
            }
            Formula::Quant(q, vs, body, _) => {
                let class = classify(&self.restricted(vs, body, env)?)?;
                counting_holds(*q, class)
            }
            Formula::Haertig(vs, a, b, _) => {
                let ca = classify(&self.restricted(vs, a, env)?)?;
                let cb = classify(&self.restricted(vs, b, env)?)?;
                ca == cb
            }
        })
    }

    /// The automaton over the binder tracks of `vs` (sorted by name) accepting
    /// the solutions of `body` with the other free variables fixed by `env`.
    fn restricted(
        &self,
        vs: &[Var],
        body: &Formula,
        env: &BTreeMap<String, UPConfiguration>,
    ) -> Result<BuchiAutomaton, CheckError> {
        let binders: BTreeSet<&str> = vs.iter().map(|v| v.name.as_str()).collect();
        let free: BTreeSet<String> = body.free_vars();
        let mut all: Vec<&str> = free.iter().map(String::as_str).collect();
        all.extend(binders.iter().copied());
        all.sort();
        all.dedup();
        let mut ctx = Ctx::new(self, &all);
        let c = ctx.compile(body)?;
        let tracks: Vec<String> = all.iter().map(|s| s.to_string()).collect();
        let c = ctx.lift(c, &tracks, true)?;
        let mut words: Vec<(String, LassoWord)> = Vec::new();
        for name in free.iter().filter(|n| !binders.contains(n.as_str())) {
            let value = env
                .get(name)
                .ok_or_else(|| CheckError::NotASentence(vec![name.clone()]))?;
            words.push((name.clone(), self.presentation.encode(value)?));
        }
        let fixed: Vec<(&str, &LassoWord)> = words.iter().map(|(n, w)| (n.as_str(), w)).collect();
        Ok(c.automaton.fix_tracks(&fixed)?)
    }

    /// A satisfying assignment for the binders of `vs`, if any, verified by
    /// recursive evaluation.
    fn search(
        &self,
        vs: &[Var],
        body: &Formula,
        env: &BTreeMap<String, UPConfiguration>,
    ) -> Result<Option<BTreeMap<String, UPConfiguration>>, CheckError> {
        let a = self.restricted(vs, body, env)?;
        let Some(w) = a.find_lasso() else {
            return Ok(None);
        };
        let mut sorted: Vec<Var> = vs.to_vec();
        sorted.sort_by(|a, b| a.name.cmp(&b.name));
        sorted.dedup_by(|a, b| a.name == b.name);
        let tracks: Vec<String> = sorted.iter().map(|v| v.name.clone()).collect();
        let found = self.split(&a, &w, &sorted, &tracks)?;
        let mut inner = env.clone();
        inner.extend(found.clone());
        if !self.evaluate(body, &inner)? {
            return Err(CheckError::WitnessRejected(body.to_string()));
        }
        Ok(Some(found))
    }
}
