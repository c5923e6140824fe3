use serde::Serialize;

use super::{CheckError, Checker};
use crate::automata::BuchiAutomaton;
use crate::cardinality::{certificate_bounds, classify, enumerate_members, finite_members, CardinalityClass};
use crate::logic::{parse_formula, Formula};

/// At most this many fixed-point witnesses are reported.
const MAX_WITNESSES: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedPointReport {
    pub cardinality: CardinalityClass,
    /// Configuration literals; all of them when the set is finite and small.
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleReport {
    pub k: usize,
    pub exact: bool,
    pub cardinality: CardinalityClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PresetReport {
    pub rule: String,
    pub surjective: bool,
    pub injective: bool,
    pub fixed_points: CardinalityClass,
    pub fixed_point_witnesses: Vec<String>,
    pub cycles: Vec<CycleReport>,
}

pub const SURJECTIVE: &str = "A y. E x. x->y";
pub const INJECTIVE: &str = "A x. A y. A z. (x->z & y->z) => x=y";

fn parsed(text: &str) -> Formula {
    parse_formula(text).expect("preset formulas parse")
}

impl Checker {
    pub fn is_surjective(&self) -> Result<bool, CheckError> {
        Ok(self.decide(&parsed(SURJECTIVE))?.result)
    }

    pub fn is_injective(&self) -> Result<bool, CheckError> {
        Ok(self.decide(&parsed(INJECTIVE))?.result)
    }

    /// The automaton of fixed points over track `x`.
    pub fn fixed_point_automaton(&self) -> Result<BuchiAutomaton, CheckError> {
        Ok(self.compile(&parsed("x->x"), &["x"])?.automaton)
    }

    pub fn fixed_points(&self) -> Result<FixedPointReport, CheckError> {
        let a = self.fixed_point_automaton()?;
        let cardinality = classify(&a)?;
        let words = match cardinality {
            CardinalityClass::Empty => Vec::new(),
            CardinalityClass::Finite(_) => finite_members(&a)?,
            _ => {
                let (s, p) = certificate_bounds(&a);
                enumerate_members(&a, s.min(2), p.min(2))?
            }
        };
        let witnesses = words
            .iter()
            .take(MAX_WITNESSES)
            .map(|w| {
                let c = self.presentation.decode(w)?;
                Ok(self.configuration_literal(&c))
            })
            .collect::<Result<_, CheckError>>()?;
        Ok(FixedPointReport {
            cardinality,
            witnesses,
        })
    }

    /// The formula over `x1..xk` describing a k-cycle `x1 -> x2 -> ... -> xk -> x1`.
    pub fn cycle_formula(k: usize, exact: bool) -> Formula {
        assert!(k >= 1, "cycle length must be positive");
        let name = |i: usize| format!("x{}", (i % k) + 1);
        let mut parts: Vec<Formula> = (0..k)
            .map(|i| Formula::rel(&name(i), &name(i + 1)))
            .collect();
        if exact {
            for d in (1..k).filter(|d| k.is_multiple_of(*d)) {
                parts.push(Formula::not(Formula::eq("x1", &name(d))));
            }
        }
        Formula::all(parts)
    }

    /// Cardinality of the set of k-cycles, counted as tuples `(c, Δc, …)`.
    pub fn k_cycles(&self, k: usize, exact: bool) -> Result<CardinalityClass, CheckError> {
        let names: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
        let vars: Vec<&str> = names.iter().map(String::as_str).collect();
        self.count_solutions(&vars, &Self::cycle_formula(k, exact))
    }

    /// Cardinality of the set of preimages of configurations in predicate `name`.
    pub fn preimage_count(&self, name: &str) -> Result<CardinalityClass, CheckError> {
        let f = parsed(&format!("E y. (In[{name}](y) & x->y)"));
        self.count_solutions(&["x"], &f)
    }

    /// Surjectivity, injectivity, fixed points and k-cycles for `k ≤ max_k`.
    pub fn report(&self, max_k: usize) -> Result<PresetReport, CheckError> {
        let fixed = self.fixed_points()?;
        let exact = self.options.exact_cycles;
        let cycles = (2..=max_k)
            .map(|k| {
                Ok(CycleReport {
                    k,
                    exact,
                    cardinality: self.k_cycles(k, exact)?,
                })
            })
            .collect::<Result<_, CheckError>>()?;
        Ok(PresetReport {
            rule: self.rule().to_string(),
            surjective: self.is_surjective()?,
            injective: self.is_injective()?,
            fixed_points: fixed.cardinality,
            fixed_point_witnesses: fixed.witnesses,
            cycles,
        })
    }
}
