//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use phasespace::automata::{BuchiAutomaton, LassoWord};
use phasespace::ca::{CaRule, UPConfiguration};
use phasespace::cardinality::{certificate_bounds, classify, enumerate_members, finite_members, CardinalityClass};
use phasespace::checker::Checker;
use phasespace::finite_support::{bounded_reachability, build_finite_relation, FiniteConfiguration, Reachability};
use phasespace::logic::{Cardinal, Formula, Quantifier};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

type Outcome = Result<String, String>;

fn eca(code: u32) -> Checker {
    Checker::new(CaRule::elementary(code).unwrap())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn surjectivity_sweep() -> Outcome {
    let mut disagree = Vec::new();
    for code in 0..256 {
        let got = eca(code).is_surjective().map_err(|e| format!("rule {code}: {e}"))?;
        if got != surjective_oracle(code) {
            disagree.push(code);
        }
    }
    ensure(disagree.is_empty(), || format!("disagreements on {disagree:?}"))?;
    let n = (0..256).filter(|&c| surjective_oracle(c)).count();
    Ok(format!("256 rules, 0 disagreements, {n} surjective"))
}

fn injectivity_sweep() -> Outcome {
    let mut disagree = Vec::new();
    for code in 0..256 {
        let got = eca(code).is_injective().map_err(|e| format!("rule {code}: {e}"))?;
        if got != injective_oracle(code) {
            disagree.push(code);
        }
    }
    ensure(disagree.is_empty(), || format!("disagreements on {disagree:?}"))?;
    let n = (0..256).filter(|&c| injective_oracle(c)).count();
    Ok(format!("256 rules, 0 disagreements, {n} injective"))
}

fn timed<T>(limit: Duration, f: impl FnOnce() -> T) -> Result<T, String> {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    ensure(took <= limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(out)
}

fn fixed_points() -> Outcome {
    let limit = Duration::from_secs(60);
    let expect = [
        (204, CardinalityClass::Uncountable),
        (51, CardinalityClass::Empty),
        (170, CardinalityClass::Finite(2)),
        (90, CardinalityClass::Finite(4)),
    ];
    for (code, class) in expect {
        let report = timed(limit, || eca(code).fixed_points())?.map_err(|e| e.to_string())?;
        ensure(report.cardinality == class, || {
            format!("rule {code}: got {}, expected {class}", report.cardinality)
        })?;
    }
    // rule 90: c(z+1) = c(z-1) xor c(z) is fixed by (c(0), c(1)), giving period-3 words
    let rule = CaRule::elementary(90).unwrap();
    let mut derived = BTreeSet::new();
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let c = UPConfiguration::periodic(vec![a, b, a ^ b]).unwrap();
        ensure(c.step(&rule) == c, || format!("simulator rejects {c:?}"))?;
        derived.insert(c);
    }
    let checker = eca(90);
    let found: BTreeSet<UPConfiguration> = checker
        .fixed_points()
        .map_err(|e| e.to_string())?
        .witnesses
        .iter()
        .map(|w| checker.parse_configuration(w).unwrap())
        .collect();
    ensure(found == derived, || format!("rule 90 witnesses {found:?}"))?;
    Ok("204 continuum, 51 empty, 170 finite:2, 90 finite:4 (recurrence solutions match)".into())
}

fn counting() -> Outcome {
    let c = eca(90);
    for (text, want) in [
        ("Ecard[4] x. x->x", true),
        ("Emod[0,2] x. x->x", true),
        ("Emod[1,2] x. x->x", false),
    ] {
        let v = c.check(text).map_err(|e| e.to_string())?;
        ensure(v.result == want, || format!("`{text}` gave {}", v.result))?;
    }
    // preimages of 0 under rule 90 satisfy c(z-1) = c(z+1)
    let rule = CaRule::elementary(90).unwrap();
    let zero = UPConfiguration::constant(0);
    let derived: BTreeSet<UPConfiguration> = [vec![0, 0], vec![1, 1], vec![0, 1], vec![1, 0]]
        .into_iter()
        .map(|p| UPConfiguration::periodic(p).unwrap())
        .collect();
    ensure(derived.len() == 4 && derived.iter().all(|d| d.step(&rule) == zero), || {
        "derived preimages fail the simulator".into()
    })?;
    let mut c = eca(90);
    c.register_configuration("zero", &zero).map_err(|e| e.to_string())?;
    let n = c.preimage_count("zero").map_err(|e| e.to_string())?;
    ensure(n == CardinalityClass::Finite(derived.len() as u64), || format!("preimage count {n}"))?;
    Ok("Ecard[4] true, Emod[0,2] true, Emod[1,2] false, preimages of zero finite:4".into())
}

fn cycles() -> Outcome {
    let c = eca(51).k_cycles(2, true).map_err(|e| e.to_string())?;
    ensure(c == CardinalityClass::Uncountable, || format!("rule 51 2-cycles {c}"))?;
    for k in 2..=4 {
        let c = eca(204).k_cycles(k, true).map_err(|e| e.to_string())?;
        ensure(c == CardinalityClass::Empty, || format!("rule 204 {k}-cycles {c}"))?;
    }
    Ok("rule 51 exact 2-cycles continuum; rule 204 exact k-cycles empty for k = 2..4".into())
}

fn relation_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut codes = vec![204u32, 51, 170, 90, 110];
    let mut pool: Vec<u32> = (0..256).filter(|c| !codes.contains(c)).collect();
    pool.shuffle(&mut rng);
    codes.extend(&pool[..27]);
    let configs = up_configs(2, 3, 2);
    let mut pairs = 0usize;
    for &code in &codes {
        let checker = eca(code);
        let rule = checker.rule().clone();
        let t = checker
            .presentation()
            .transition("x", "y")
            .map_err(|e| e.to_string())?;
        let images: Vec<UPConfiguration> = configs.iter().map(|c| c.step(&rule)).collect();
        for (x, fx) in configs.iter().zip(&images) {
            for y in &configs {
                let w = checker.convolution(&[x, y]).map_err(|e| e.to_string())?;
                let got = t.member_up(&w).map_err(|e| e.to_string())?;
                if got != (fx == y) {
                    return Err(format!("rule {code}: x = {x:?}, y = {y:?}, automaton says {got}"));
                }
                pairs += 1;
            }
        }
    }
    Ok(format!(
        "{} rules, {} configurations, {pairs} pairs, 0 disagreements",
        codes.len(),
        configs.len()
    ))
}

fn automata_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let words = lassos(2, 4, 4);
    let count = 1000;
    for i in 0..count {
        let n = rng.gen_range(1..=4);
        let a = random_nba(&mut rng, n, 2, 0.35, 0.5);
        let m = rng.gen_range(1..=4);
        let b = random_nba(&mut rng, m, 2, 0.35, 0.5);
        let ca = a.complement();
        ensure(a.intersect(&ca).unwrap().is_empty(), || format!("#{i}: A and its complement meet"))?;
        ensure(profile_universal(&a.union(&ca).unwrap(), 2), || {
            format!("#{i}: A and its complement do not cover")
        })?;
        let both = a.intersect(&b).unwrap();
        let either = a.union(&b).unwrap();
        for (s, l) in &words {
            let w = LassoWord::new(s.clone(), l.clone()).unwrap();
            let (ina, inb) = (lasso_member(&a, s, l), lasso_member(&b, s, l));
            let check = |aut: &BuchiAutomaton, want: bool, what: &str| {
                ensure(aut.member_up(&w).unwrap() == want, || format!("#{i}: {what} on {s:?}({l:?})^w"))
            };
            check(&a, ina, "membership")?;
            check(&ca, !ina, "complement")?;
            check(&both, ina && inb, "intersection")?;
            check(&either, ina || inb, "union")?;
        }
    }
    Ok(format!("{count} automata, {} lassos each, 0 failures", words.len()))
}

fn cardinality_corpus() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let count = 900;
    let mut tally = [0usize; 4];
    for i in 0..count {
        let n = rng.gen_range(1..=6);
        let a = match i % 3 {
            0 => random_nba(&mut rng, n, 2, [0.15, 0.3][i % 2], 0.4),
            _ => random_sparse_nba(&mut rng, n, 2, 0.5),
        };
        let got = classify(&a).map_err(|e| e.to_string())?;
        let brute = brute_cardinality(&a, 2);
        let agree = match (&brute, got) {
            (Brute::Empty, CardinalityClass::Empty) => true,
            (Brute::Finite(m), CardinalityClass::Finite(k)) => m.len() as u64 == k,
            (Brute::Countable, CardinalityClass::CountablyInfinite) => true,
            (Brute::Uncountable, CardinalityClass::Uncountable) => true,
            _ => false,
        };
        ensure(agree, || format!("#{i}: classify {got}, oracle {brute:?}\n{}", a.to_text()))?;
        tally[match got {
            CardinalityClass::Empty => 0,
            CardinalityClass::Finite(_) => 1,
            CardinalityClass::CountablyInfinite => 2,
            CardinalityClass::Uncountable => 3,
        }] += 1;
        if let Brute::Finite(members) = brute {
            let listed = finite_members(&a).map_err(|e| e.to_string())?;
            ensure(listed == members, || format!("#{i}: member lists differ"))?;
            // every member must lie inside the termination certificate
            let (s, p) = certificate_bounds(&a);
            let bounded = enumerate_members(&a, s, p).map_err(|e| e.to_string())?;
            ensure(bounded == members, || format!("#{i}: certificate bounds ({s}, {p}) violated"))?;
        }
    }
    Ok(format!(
        "{count} automata: {} empty, {} finite, {} countable, {} uncountable; 0 disagreements",
        tally[0], tally[1], tally[2], tally[3]
    ))
}

struct SentenceGen {
    rng: ChaCha8Rng,
}

impl SentenceGen {
    const NAMES: [&'static str; 3] = ["x", "y", "z"];

    fn sentence(&mut self) -> Formula {
        self.quantified(3, &[])
    }

    fn quantified(&mut self, depth: usize, bound: &[&'static str]) -> Formula {
        let v = Self::NAMES[bound.len() % 3];
        let mut inner = bound.to_vec();
        inner.push(v);
        match self.rng.gen_range(0..10) {
            0 => {
                let body = self.formula(depth - 1, &[v]);
                let card = [Cardinal::Finite(0), Cardinal::Finite(2), Cardinal::Aleph0, Cardinal::Continuum]
                    [self.rng.gen_range(0..4)];
                Formula::quant(Quantifier::ExistsCard(card), &[v], body)
            }
            1 => {
                let body = self.formula(depth - 1, &[v]);
                Formula::quant(Quantifier::ExistsInf, &[v], body)
            }
            2 => {
                let body = self.formula(depth - 1, &[v]);
                Formula::quant(Quantifier::ExistsMod { t: 0, k: 2 }, &[v], body)
            }
            3..=6 => Formula::exists(&[v], self.formula(depth - 1, &inner)),
            _ => Formula::forall(&[v], self.formula(depth - 1, &inner)),
        }
    }

    fn atom(&mut self, bound: &[&'static str]) -> Formula {
        if bound.is_empty() {
            return Formula::constant(self.rng.gen_bool(0.5));
        }
        let a = *bound.choose(&mut self.rng).unwrap();
        let b = *bound.choose(&mut self.rng).unwrap();
        match self.rng.gen_range(0..5) {
            0 | 1 => Formula::rel(a, b),
            2 => Formula::eq(a, b),
            3 => Formula::pred("zero", a),
            _ => Formula::pred("dense", a),
        }
    }

    fn formula(&mut self, depth: usize, bound: &[&'static str]) -> Formula {
        let roll = self.rng.gen_range(0..10);
        if depth > 0 && roll < 3 {
            return self.quantified(depth, bound);
        }
        match roll {
            3 => Formula::not(self.formula(depth, bound)),
            4 | 5 => {
                let a = self.formula(depth, bound);
                let b = self.atom(bound);
                match self.rng.gen_range(0..4) {
                    0 => Formula::and(a, b),
                    1 => Formula::or(a, b),
                    2 => Formula::implies(a, b),
                    _ => Formula::iff(a, b),
                }
            }
            _ => self.atom(bound),
        }
    }
}

fn quantifier_depth(f: &Formula) -> usize {
    match f {
        Formula::Quant(_, _, b, _) => 1 + quantifier_depth(b),
        Formula::Haertig(_, a, b, _) => 1 + quantifier_depth(a).max(quantifier_depth(b)),
        Formula::Not(g, _) => quantifier_depth(g),
        Formula::Binary(_, a, b, _) => quantifier_depth(a).max(quantifier_depth(b)),
        _ => 0,
    }
}

fn with_predicates(code: u32) -> Checker {
    let mut c = eca(code);
    c.register_configuration("zero", &UPConfiguration::constant(0)).unwrap();
    let one_dot = c.parse_configuration("(0)^w 1 (0)^w").unwrap();
    c.register_configuration("dense", &one_dot).unwrap();
    c
}

fn metamorphic() -> Outcome {
    let rules = [0, 30, 51, 90, 110, 150, 170, 204];
    let mut gen = SentenceGen {
        rng: ChaCha8Rng::seed_from_u64(9),
    };
    let per_rule = 30;
    let mut total = 0;
    let mut truths = 0;
    for code in rules {
        let checker = with_predicates(code);
        let corpus: Vec<Formula> = (0..per_rule).map(|_| gen.sentence()).collect();
        let mut verdicts = Vec::new();
        for f in &corpus {
            ensure(quantifier_depth(f) <= 3, || format!("depth of {f}"))?;
            let v = checker.decide(f).map_err(|e| format!("rule {code}, `{f}`: {e}"))?.result;
            let n = checker
                .decide(&Formula::not(f.clone()))
                .map_err(|e| format!("rule {code}, `~{f}`: {e}"))?
                .result;
            ensure(n == !v, || format!("rule {code}: negation of `{f}`"))?;
            verdicts.push(v);
            truths += v as usize;
        }
        for i in 0..per_rule {
            let j = (i * 7 + 3) % per_rule;
            let both = Formula::and(corpus[i].clone(), corpus[j].clone());
            let v = checker.decide(&both).map_err(|e| format!("rule {code}, `{both}`: {e}"))?.result;
            ensure(v == (verdicts[i] && verdicts[j]), || format!("rule {code}: conjunction `{both}`"))?;
        }
        total += per_rule;
    }
    Ok(format!("{total} sentences on {} rules ({truths} true), 0 failures", rules.len()))
}

fn finite_words(len: usize, quiescent: usize) -> Vec<Vec<usize>> {
    (1..=len)
        .flat_map(|n| words(2, n))
        .map(|w| w.into_iter().map(|l| l as usize).collect::<Vec<_>>())
        .filter(|w| w[0] != quiescent && w[w.len() - 1] != quiescent)
        .collect()
}

fn finite_support() -> Outcome {
    let rules = [0, 30, 90, 110, 150, 184, 204, 253];
    let mut checked = 0usize;
    for code in rules {
        let rule = CaRule::elementary(code).unwrap();
        let quiescent = rule.quiescent().ok_or(format!("rule {code} has no quiescent state"))?;
        let rel = build_finite_relation(&rule).map_err(|e| e.to_string())?;
        let mut configs = vec![FiniteConfiguration::quiescent(quiescent)];
        for w in finite_words(5, quiescent) {
            for offset in -5..=2 {
                configs.push(FiniteConfiguration::new(w.clone(), offset, quiescent));
            }
        }
        for x in &configs {
            let fx = x.step(&rule);
            ensure(rel.relates(x, &fx), || format!("rule {code}: {x:?} -> {fx:?} rejected"))?;
            for y in &configs {
                ensure(rel.relates(x, y) == (fx == *y), || format!("rule {code}: ({x:?}, {y:?})"))?;
                checked += 1;
            }
        }
    }
    let shift = CaRule::shift(2).unwrap();
    let from = FiniteConfiguration::parse("\"1\"@0", &shift).unwrap();
    let to = FiniteConfiguration::parse("\"1\"@-3", &shift).unwrap();
    let r = bounded_reachability(&shift, &from, &to, 5).map_err(|e| e.to_string())?;
    ensure(r == Reachability::Reached(3), || format!("shift reachability {r:?}"))?;
    Ok(format!("8 rules, {checked} pairs, 0 disagreements; shift \"1\"@0 -> \"1\"@-3 Reached(3)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("surjectivity sweep", surjectivity_sweep),
        ("injectivity sweep", injectivity_sweep),
        ("fixed points", fixed_points),
        ("counting quantifiers", counting),
        ("cycles", cycles),
        ("relation automaton", relation_oracle),
        ("automata algebra", automata_algebra),
        ("cardinality corpus", cardinality_corpus),
        ("metamorphic logic", metamorphic),
        ("finite support", finite_support),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{took:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{took:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
