use std::fmt;

use super::{Alphabet, AutomatonError, Letter};

/// The ultimately periodic ω-word `stem · loop^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LassoWord {
    stem: Vec<Letter>,
    cycle: Vec<Letter>,
}

fn primitive_root_len<T: PartialEq>(w: &[T]) -> usize {
    let n = w.len();
    (1..=n)
        .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| w[i] == w[i - p]))
        .unwrap_or(n)
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

impl LassoWord {
    pub fn new(stem: Vec<Letter>, cycle: Vec<Letter>) -> Result<Self, AutomatonError> {
        if cycle.is_empty() {
            return Err(AutomatonError::EmptyLoop);
        }
        Ok(LassoWord { stem, cycle })
    }

    pub fn periodic(cycle: Vec<Letter>) -> Result<Self, AutomatonError> {
        Self::new(Vec::new(), cycle)
    }

    pub fn stem(&self) -> &[Letter] {
        &self.stem
    }

    /// The repeated part.
    pub fn cycle(&self) -> &[Letter] {
        &self.cycle
    }

    /// Letter at position `i` of the ω-word.
    pub fn at(&self, i: usize) -> Letter {
        if i < self.stem.len() {
            self.stem[i]
        } else {
            self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    pub fn check_alphabet(&self, alphabet: &Alphabet) -> Result<(), AutomatonError> {
        match self
            .stem
            .iter()
            .chain(&self.cycle)
            .find(|&&l| !alphabet.contains(l))
        {
            Some(&l) => Err(AutomatonError::InvalidLetter(l.to_string())),
            None => Ok(()),
        }
    }

    /// Canonical representative: primitive loop, then the shortest stem.
    pub fn canonical(&self) -> LassoWord {
        let p = primitive_root_len(&self.cycle);
        let mut cycle = self.cycle[..p].to_vec();
        let mut stem = self.stem.clone();
        while let Some(&last) = stem.last() {
            if last != cycle[p - 1] {
                break;
            }
            stem.pop();
            cycle.rotate_right(1);
        }
        LassoWord { stem, cycle }
    }

    pub fn is_canonical(&self) -> bool {
        primitive_root_len(&self.cycle) == self.cycle.len()
            && self.stem.last().is_none_or(|l| *l != self.cycle[self.cycle.len() - 1])
    }

    /// `letter · self`, canonicalised.
    pub fn prepend(&self, letter: Letter) -> LassoWord {
        let mut stem = Vec::with_capacity(self.stem.len() + 1);
        stem.push(letter);
        stem.extend_from_slice(&self.stem);
        LassoWord {
            stem,
            cycle: self.cycle.clone(),
        }
        .canonical()
    }

    /// Same ω-word with stem length `s` and loop length `p`.
    ///
    /// Requires `s >= |stem|` and `p` a positive multiple of `|loop|`.
    pub fn unrolled(&self, s: usize, p: usize) -> LassoWord {
        debug_assert!(s >= self.stem.len() && p.is_multiple_of(self.cycle.len()));
        LassoWord {
            stem: (0..s).map(|i| self.at(i)).collect(),
            cycle: (s..s + p).map(|i| self.at(i)).collect(),
        }
    }

    /// Letter-wise convolution of several words; `combine` builds each joint letter.
    pub fn convolve(words: &[&LassoWord], mut combine: impl FnMut(&[Letter]) -> Letter) -> LassoWord {
        let s = words.iter().map(|w| w.stem.len()).max().unwrap_or(0);
        let p = words.iter().fold(1, |acc, w| lcm(acc, w.cycle.len()));
        let mut buf = vec![0; words.len()];
        let mut letter_at = |i: usize| {
            for (b, w) in buf.iter_mut().zip(words) {
                *b = w.at(i);
            }
            combine(&buf)
        };
        let stem = (0..s).map(&mut letter_at).collect();
        let cycle = (s..s + p).map(&mut letter_at).collect();
        LassoWord { stem, cycle }.canonical()
    }

    /// Applies `f` to every letter.
    pub fn map(&self, mut f: impl FnMut(Letter) -> Letter) -> LassoWord {
        LassoWord {
            stem: self.stem.iter().map(|&l| f(l)).collect(),
            cycle: self.cycle.iter().map(|&l| f(l)).collect(),
        }
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        LassoDisplay {
            word: self,
            alphabet,
        }
    }
}

struct LassoDisplay<'a> {
    word: &'a LassoWord,
    alphabet: &'a Alphabet,
}

impl fmt::Display for LassoDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.word.stem {
            write!(f, "{}", self.alphabet.format_letter(l))?;
        }
        write!(f, "[")?;
        for &l in &self.word.cycle {
            write!(f, "{}", self.alphabet.format_letter(l))?;
        }
        write!(f, "]^w")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lasso(stem: &[Letter], cycle: &[Letter]) -> LassoWord {
        LassoWord::new(stem.to_vec(), cycle.to_vec()).unwrap()
    }

    #[test]
    fn empty_loop_rejected() {
        assert!(matches!(
            LassoWord::new(vec![0], vec![]),
            Err(AutomatonError::EmptyLoop)
        ));
    }

    #[test]
    fn canonical_rolls_stem_into_loop() {
        assert_eq!(lasso(&[0, 0, 1], &[0, 1]).canonical(), lasso(&[0], &[0, 1]));
        assert_eq!(lasso(&[1, 1], &[1, 1, 1]).canonical(), lasso(&[], &[1]));
        assert_eq!(lasso(&[0], &[1]).canonical(), lasso(&[0], &[1]));
    }

    #[test]
    fn convolution_aligns_stems_and_loops() {
        let a = lasso(&[1], &[0]);
        let b = lasso(&[], &[0, 1]);
        let w = LassoWord::convolve(&[&a, &b], |ls| ls[0] * 2 + ls[1]);
        for i in 0..12 {
            assert_eq!(w.at(i), a.at(i) * 2 + b.at(i));
        }
    }

    fn arb_lasso() -> impl Strategy<Value = LassoWord> {
        (
            prop::collection::vec(0u32..3, 0..5),
            prop::collection::vec(0u32..3, 1..5),
        )
            .prop_map(|(s, c)| LassoWord::new(s, c).unwrap())
    }

    proptest! {
        #[test]
        fn canonical_preserves_the_word(w in arb_lasso()) {
            let c = w.canonical();
            prop_assert!(c.is_canonical());
            prop_assert_eq!(c.canonical(), c.clone());
            for i in 0..40 {
                prop_assert_eq!(c.at(i), w.at(i));
            }
        }

        #[test]
        fn equal_words_have_equal_canonical_forms(w in arb_lasso(), extra in 0usize..4, k in 1usize..3) {
            let s = w.stem().len() + extra;
            let p = w.cycle().len() * k;
            prop_assert_eq!(w.unrolled(s, p).canonical(), w.canonical());
        }
    }
}
