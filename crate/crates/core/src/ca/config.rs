use std::fmt;

use super::{CaError, CaRule};

/// A bi-infinite configuration that is periodic towards both ends.
///
/// Cells `z < start` repeat `left` (with `left[(z - start) mod |left|]`), the
/// cells `start .. start + |center|` hold `center`, and the cells after the
/// center repeat `right` starting with `right[0]`. States are indices.
///
/// Values are kept in canonical form (primitive periods, shortest center whose
/// index interval contains 0), so structural equality is equality of
/// configurations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UPConfiguration {
    left: Vec<usize>,
    center: Vec<usize>,
    start: i64,
    right: Vec<usize>,
}

fn primitive(w: &[usize]) -> Vec<usize> {
    let n = w.len();
    let p = (1..=n)
        .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| w[i] == w[i - p]))
        .unwrap_or(n);
    w[..p].to_vec()
}

impl UPConfiguration {
    pub fn new(
        left: Vec<usize>,
        center: Vec<usize>,
        start: i64,
        right: Vec<usize>,
    ) -> Result<Self, CaError> {
        if left.is_empty() || right.is_empty() {
            return Err(CaError::EmptyPeriod);
        }
        Ok(UPConfiguration {
            left,
            center,
            start,
            right,
        }
        .canonical())
    }

    /// The configuration with every cell equal to `q`.
    pub fn constant(q: usize) -> Self {
        UPConfiguration {
            left: vec![q],
            center: Vec::new(),
            start: 0,
            right: vec![q],
        }
    }

    /// Spatially periodic configuration with `c(z) = period[z mod |period|]`.
    pub fn periodic(period: Vec<usize>) -> Result<Self, CaError> {
        UPConfiguration::new(period.clone(), Vec::new(), 0, period)
    }

    pub fn left_period(&self) -> &[usize] {
        &self.left
    }

    pub fn center(&self) -> &[usize] {
        &self.center
    }

    /// Index of the first center cell.
    pub fn center_start(&self) -> i64 {
        self.start
    }

    pub fn right_period(&self) -> &[usize] {
        &self.right
    }

    fn end(&self) -> i64 {
        self.start + self.center.len() as i64
    }

    /// The state at cell `z`.
    pub fn at(&self, z: i64) -> usize {
        if z < self.start {
            let p = self.left.len() as i64;
            self.left[(z - self.start).rem_euclid(p) as usize]
        } else if z < self.end() {
            self.center[(z - self.start) as usize]
        } else {
            let q = self.right.len() as i64;
            self.right[(z - self.end()).rem_euclid(q) as usize]
        }
    }

    /// Largest state index used.
    pub fn max_state(&self) -> usize {
        self.left
            .iter()
            .chain(&self.center)
            .chain(&self.right)
            .copied()
            .max()
            .unwrap_or(0)
    }

    fn canonical(&self) -> UPConfiguration {
        let left = primitive(&self.left);
        let right = primitive(&self.right);
        let (p, q) = (left.len() as i64, right.len() as i64);
        let raw = UPConfiguration {
            left,
            center: self.center.clone(),
            start: self.start,
            right,
        };
        let (s, e) = (raw.start, raw.end());
        // first cell of the right tail
        let mut a = e;
        while a > s - p - q && raw.at(a - 1) == raw.at(a - 1 + q) {
            a -= 1;
        }
        if a == s - p - q {
            // periodic throughout
            let period: Vec<usize> = (0..q).map(|z| raw.at(z)).collect();
            return UPConfiguration {
                left: period.clone(),
                center: Vec::new(),
                start: 0,
                right: period,
            };
        }
        // last cell of the left tail
        let mut b = s - 1;
        while raw.at(b + 1) == raw.at(b + 1 - p) {
            b += 1;
        }
        let lo = (b + 1).min(0);
        let hi = a.max(0);
        UPConfiguration {
            left: (lo - p..lo).map(|z| raw.at(z)).collect(),
            center: (lo..hi).map(|z| raw.at(z)).collect(),
            start: lo,
            right: (hi..hi + q).map(|z| raw.at(z)).collect(),
        }
    }

    /// `c'(z) = c(z + k)`.
    pub fn shifted(&self, k: i64) -> UPConfiguration {
        UPConfiguration {
            start: self.start - k,
            ..self.clone()
        }
        .canonical()
    }

    /// One application of the global map.
    pub fn step(&self, rule: &CaRule) -> UPConfiguration {
        let r = rule.radius() as i64;
        let p = self.left.len() as i64;
        let q = self.right.len() as i64;
        let (lo, hi) = (self.start - r, self.end() + r);
        let mut window = vec![0; rule.width()];
        let mut cell = |z: i64| {
            for (i, w) in window.iter_mut().enumerate() {
                *w = self.at(z - r + i as i64);
            }
            rule.apply(&window)
        };
        let left = (lo - p..lo).map(&mut cell).collect();
        let center = (lo..hi).map(&mut cell).collect();
        let right = (hi..hi + q).map(&mut cell).collect();
        UPConfiguration {
            left,
            center,
            start: lo,
            right,
        }
        .canonical()
    }

    /// `Δ^n(c)`.
    pub fn iterate(&self, rule: &CaRule, n: usize) -> UPConfiguration {
        (0..n).fold(self.clone(), |c, _| c.step(rule))
    }

    /// Parses `(<left>)^w <center>[@i] (<right>)^w`.
    ///
    /// Words are written symbol by symbol when every state name is a single
    /// character, and comma-separated otherwise.
    pub fn parse(text: &str, states: &[String]) -> Result<Self, CaError> {
        let bad = |m: &str| CaError::BadConfiguration(format!("{m} in `{text}`"));
        let t = text.trim();
        let rest = t.strip_prefix('(').ok_or_else(|| bad("expected `(`"))?;
        let close = rest.find(")^w").ok_or_else(|| bad("expected `)^w`"))?;
        let left = parse_word(&rest[..close], states)?;
        let rest = &rest[close + 3..];
        let open = rest.rfind('(').ok_or_else(|| bad("expected right period"))?;
        let middle = rest[..open].trim();
        let tail = rest[open + 1..]
            .strip_suffix(")^w")
            .ok_or_else(|| bad("expected `)^w` at the end"))?;
        let right = parse_word(tail, states)?;
        let (word, start) = match middle.rsplit_once('@') {
            Some((w, i)) => (
                w.trim(),
                i.trim().parse::<i64>().map_err(|_| bad("bad `@` index"))?,
            ),
            None => (middle, 0),
        };
        let center = parse_word(word, states)?;
        UPConfiguration::new(left, center, start, right)
    }

    pub fn display<'a>(&'a self, states: &'a [String]) -> impl fmt::Display + 'a {
        ConfigDisplay {
            config: self,
            states,
        }
    }

    /// The literal for this configuration over `states`.
    pub fn to_literal(&self, states: &[String]) -> String {
        self.display(states).to_string()
    }
}

pub(crate) fn parse_word(text: &str, states: &[String]) -> Result<Vec<usize>, CaError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let lookup = |s: &str| {
        states
            .iter()
            .position(|t| t == s)
            .ok_or_else(|| CaError::UnknownState(s.to_string()))
    };
    let single = states.iter().all(|s| s.chars().count() == 1);
    if single && !text.contains(',') {
        text.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| lookup(&c.to_string()))
            .collect()
    } else {
        text.split(',').map(|s| lookup(s.trim())).collect()
    }
}

fn write_word(f: &mut fmt::Formatter<'_>, w: &[usize], states: &[String]) -> fmt::Result {
    let single = states.iter().all(|s| s.chars().count() == 1);
    let names: Vec<&str> = w.iter().map(|&q| states[q].as_str()).collect();
    write!(f, "{}", names.join(if single { "" } else { "," }))
}

struct ConfigDisplay<'a> {
    config: &'a UPConfiguration,
    states: &'a [String],
}

impl fmt::Display for ConfigDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.config;
        write!(f, "(")?;
        write_word(f, &c.left, self.states)?;
        write!(f, ")^w ")?;
        if !c.center.is_empty() {
            write_word(f, &c.center, self.states)?;
        }
        if c.start != 0 {
            write!(f, "@{}", c.start)?;
        }
        if !c.center.is_empty() || c.start != 0 {
            write!(f, " ")?;
        }
        write!(f, "(")?;
        write_word(f, &c.right, self.states)?;
        write!(f, ")^w")
    }
}
