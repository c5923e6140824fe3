use std::fmt;

use super::AutomatonError;

/// A letter of a (possibly multi-track) alphabet, stored as a mixed-radix index.
///
/// The first track is the most significant digit.
pub type Letter = u32;

/// One component of a product alphabet: a named, ordered, finite symbol set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Track {
    id: String,
    symbols: Vec<String>,
}

pub(crate) fn is_token(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| !c.is_whitespace() && !matches!(c, ',' | '(' | ')' | ';' | '=' | '#'))
}

impl Track {
    pub fn new<S: Into<String>>(
        id: impl Into<String>,
        symbols: impl IntoIterator<Item = S>,
    ) -> Result<Self, AutomatonError> {
        let id = id.into();
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if !is_token(&id) {
            return Err(AutomatonError::InvalidSymbol(id));
        }
        if symbols.is_empty() {
            return Err(AutomatonError::EmptyTrack(id));
        }
        for (i, s) in symbols.iter().enumerate() {
            if !is_token(s) {
                return Err(AutomatonError::InvalidSymbol(s.clone()));
            }
            if symbols[..i].contains(s) {
                return Err(AutomatonError::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Track { id, symbols })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol_index(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    /// Same symbol set under a different identifier.
    pub fn renamed(&self, id: impl Into<String>) -> Result<Track, AutomatonError> {
        Track::new(id, self.symbols.iter().cloned())
    }
}

/// An ordered list of tracks. Letters are tuples with one component per track.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    tracks: Vec<Track>,
    strides: Vec<u32>,
    size: u32,
}

const MAX_ALPHABET: u64 = 1 << 24;

impl Alphabet {
    pub fn new(tracks: Vec<Track>) -> Result<Self, AutomatonError> {
        for (i, t) in tracks.iter().enumerate() {
            if tracks[..i].iter().any(|u| u.id == t.id) {
                return Err(AutomatonError::TrackCollision(t.id.clone()));
            }
        }
        let mut size: u64 = 1;
        let mut strides = vec![0u32; tracks.len()];
        for (i, t) in tracks.iter().enumerate().rev() {
            strides[i] = size as u32;
            size *= t.len() as u64;
            if size > MAX_ALPHABET {
                return Err(AutomatonError::AlphabetTooLarge);
            }
        }
        Ok(Alphabet {
            tracks,
            strides,
            size: size as u32,
        })
    }

    /// The alphabet with no tracks; it has exactly one (empty) letter.
    pub fn unit() -> Self {
        Alphabet {
            tracks: Vec::new(),
            strides: Vec::new(),
            size: 1,
        }
    }

    pub fn single(track: Track) -> Self {
        Alphabet::new(vec![track]).expect("single track alphabet")
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    pub fn track_count(&self) -> usize {
        self.tracks.len()
    }

    /// Number of letters.
    pub fn size(&self) -> usize {
        self.size as usize
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        0..self.size
    }

    pub fn track_position(&self, id: &str) -> Option<usize> {
        self.tracks.iter().position(|t| t.id == id)
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter < self.size
    }

    pub fn encode(&self, components: &[usize]) -> Letter {
        debug_assert_eq!(components.len(), self.tracks.len());
        components
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| c as u32 * s)
            .sum()
    }

    pub fn decode(&self, letter: Letter) -> Vec<usize> {
        (0..self.tracks.len())
            .map(|i| self.component(letter, i))
            .collect()
    }

    #[inline]
    pub fn component(&self, letter: Letter, track: usize) -> usize {
        ((letter / self.strides[track]) % self.tracks[track].len() as u32) as usize
    }

    pub fn without_track(&self, position: usize) -> Alphabet {
        let mut tracks = self.tracks.clone();
        tracks.remove(position);
        Alphabet::new(tracks).expect("sub-alphabet of a valid alphabet")
    }

    pub fn with_track(&self, track: Track, position: usize) -> Result<Alphabet, AutomatonError> {
        if self.track_position(track.id()).is_some() {
            return Err(AutomatonError::TrackCollision(track.id));
        }
        let mut tracks = self.tracks.clone();
        tracks.insert(position.min(tracks.len()), track);
        Alphabet::new(tracks)
    }

    /// Two alphabets can be convolved iff their track identifiers are disjoint.
    pub fn is_composable(&self, other: &Alphabet) -> bool {
        self.tracks
            .iter()
            .all(|t| other.track_position(t.id()).is_none())
    }

    /// Same tracks (identifier and symbol list) up to track order.
    pub fn same_tracks(&self, other: &Alphabet) -> bool {
        self.tracks.len() == other.tracks.len()
            && self
                .tracks
                .iter()
                .all(|t| other.tracks.iter().any(|u| u == t))
    }

    /// Renders a letter as `(sym,sym,...)`.
    pub fn format_letter(&self, letter: Letter) -> String {
        let parts: Vec<&str> = (0..self.tracks.len())
            .map(|i| self.tracks[i].symbols[self.component(letter, i)].as_str())
            .collect();
        format!("({})", parts.join(","))
    }

    pub fn parse_letter(&self, text: &str) -> Result<Letter, AutomatonError> {
        let inner = text
            .trim()
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| AutomatonError::InvalidLetter(text.to_string()))?;
        let parts: Vec<&str> = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner.split(',').map(str::trim).collect()
        };
        if parts.len() != self.tracks.len() {
            return Err(AutomatonError::InvalidLetter(text.to_string()));
        }
        let mut comps = Vec::with_capacity(parts.len());
        for (t, p) in self.tracks.iter().zip(parts) {
            comps.push(
                t.symbol_index(p)
                    .ok_or_else(|| AutomatonError::InvalidLetter(text.to_string()))?,
            );
        }
        Ok(self.encode(&comps))
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .tracks
            .iter()
            .map(|t| format!("{}={}", t.id, t.symbols.join(",")))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}
