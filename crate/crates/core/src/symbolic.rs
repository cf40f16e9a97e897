//! One-sided subshifts of finite type, admissible words and locally constant
//! functions.
//!
//! Points of the shift space are one-sided infinite sequences over a finite
//! alphabet whose consecutive symbols are allowed by a transition matrix. The
//! shift map drops the first symbol. The metric is
//! `d(x, y) = 2^-i` where `i` is the first index at which `x` and `y` differ,
//! so a depth-`k` cylinder has diameter `2^-k`.
//!
//! Every word list produced here is in lexicographic order; that order is
//! used as the canonical layout of value tables throughout the crate.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};

pub type Symbol = u16;

/// A finite word over the alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    symbols: Vec<Symbol>,
}

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidWord("words have length at least 1".into()));
        }
        Ok(Self { symbols })
    }

    /// Parses a word written with one decimal digit per symbol, e.g. `"0110"`.
    pub fn parse(text: &str) -> Result<Self> {
        let symbols = text
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as Symbol)
                    .ok_or_else(|| Error::InvalidWord(format!("bad symbol {c:?} in {text:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(symbols)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.symbols.iter().all(|&s| s < 10) {
            for s in &self.symbols {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

/// Distance between the cylinders of two equal-length words: `2^-i` for the
/// first disagreement index `i`, or `2^-len` when the words coincide.
pub fn word_distance(a: &Word, b: &Word) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "word lengths differ ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let first = a
        .symbols
        .iter()
        .zip(&b.symbols)
        .position(|(x, y)| x != y)
        .unwrap_or(a.len());
    Ok((2.0f64).powi(-(first as i32)))
}

/// All admissible words of one length, stored flat in lexicographic order.
#[derive(Debug, Clone)]
pub struct WordTable {
    depth: usize,
    symbols: Vec<Symbol>,
}

impl WordTable {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.symbols.len() / self.depth
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn word(&self, index: usize) -> &[Symbol] {
        &self.symbols[index * self.depth..(index + 1) * self.depth]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[Symbol]> + '_ {
        self.symbols.chunks_exact(self.depth)
    }

    /// Index of an exact-length word, `None` when it is not admissible.
    pub fn index_of(&self, word: &[Symbol]) -> Option<usize> {
        if word.len() != self.depth {
            return None;
        }
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.word(mid).cmp(word) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Index of the length-`depth` prefix of a longer word.
    pub fn index_of_prefix(&self, word: &[Symbol]) -> Option<usize> {
        if word.len() < self.depth {
            return None;
        }
        self.index_of(&word[..self.depth])
    }
}

/// An irreducible one-sided subshift of finite type.
pub struct SubshiftSystem {
    alphabet_size: usize,
    allowed: Vec<bool>,
    tables: Mutex<HashMap<usize, Arc<WordTable>>>,
}

impl SubshiftSystem {
    /// Builds the system from the list of forbidden two-letter words.
    pub fn new(alphabet_size: usize, forbidden_pairs: &[(usize, usize)]) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::InvalidSystem("alphabet must be nonempty".into()));
        }
        if alphabet_size > Symbol::MAX as usize {
            return Err(Error::InvalidSystem("alphabet too large".into()));
        }
        let mut allowed = vec![true; alphabet_size * alphabet_size];
        for &(i, j) in forbidden_pairs {
            if i >= alphabet_size || j >= alphabet_size {
                return Err(Error::InvalidSystem(format!(
                    "forbidden pair [{i}, {j}] outside alphabet of size {alphabet_size}"
                )));
            }
            allowed[i * alphabet_size + j] = false;
        }
        Self::from_allowed(alphabet_size, allowed)
    }

    /// Builds the system from a square boolean transition matrix.
    pub fn from_matrix(transitions: &[Vec<bool>]) -> Result<Self> {
        let size = transitions.len();
        if transitions.iter().any(|row| row.len() != size) {
            return Err(Error::InvalidSystem("transition matrix must be square".into()));
        }
        if size > Symbol::MAX as usize {
            return Err(Error::InvalidSystem("alphabet too large".into()));
        }
        Self::from_allowed(size, transitions.concat())
    }

    fn from_allowed(alphabet_size: usize, allowed: Vec<bool>) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::InvalidSystem("alphabet must be nonempty".into()));
        }
        let system = Self {
            alphabet_size,
            allowed,
            tables: Mutex::new(HashMap::new()),
        };
        system.check_irreducible()?;
        Ok(system)
    }

    pub fn full_shift(alphabet_size: usize) -> Result<Self> {
        Self::new(alphabet_size, &[])
    }

    /// Binary shift with the word `11` forbidden.
    pub fn golden_mean() -> Self {
        Self::new(2, &[(1, 1)]).expect("golden mean shift is irreducible")
    }

    /// Product system: symbols are pairs `(a, b)` encoded as `a * |B| + b`,
    /// transitions allowed componentwise.
    pub fn product(&self, other: &SubshiftSystem) -> Result<Self> {
        let (na, nb) = (self.alphabet_size, other.alphabet_size);
        let size = na * nb;
        if size > Symbol::MAX as usize {
            return Err(Error::InvalidSystem("product alphabet too large".into()));
        }
        let mut allowed = vec![false; size * size];
        for a in 0..na {
            for b in 0..nb {
                for a2 in 0..na {
                    for b2 in 0..nb {
                        allowed[(a * nb + b) * size + a2 * nb + b2] =
                            self.allows(a, a2) && other.allows(b, b2);
                    }
                }
            }
        }
        Self::from_allowed(size, allowed)
    }

    fn check_irreducible(&self) -> Result<()> {
        let n = self.alphabet_size;
        for start in 0..n {
            // symbols reachable by a path of length >= 1
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = (0..n).filter(|&j| self.allows(start, j)).collect();
            for &j in &stack {
                seen[j] = true;
            }
            while let Some(i) = stack.pop() {
                for j in 0..n {
                    if self.allows(i, j) && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            if let Some(missing) = seen.iter().position(|s| !s) {
                return Err(Error::InvalidSystem(format!(
                    "transition graph is not irreducible: {missing} unreachable from {start}"
                )));
            }
        }
        Ok(())
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn allows(&self, from: usize, to: usize) -> bool {
        self.allowed[from * self.alphabet_size + to]
    }

    /// Forbidden two-letter words in lexicographic order.
    pub fn forbidden_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.alphabet_size;
        (0..n * n)
            .filter(|&c| !self.allowed[c])
            .map(|c| (c / n, c % n))
            .collect()
    }

    pub fn is_full_shift(&self) -> bool {
        self.allowed.iter().all(|&a| a)
    }

    pub fn is_admissible(&self, word: &[Symbol]) -> bool {
        word.iter().all(|&s| (s as usize) < self.alphabet_size)
            && word
                .windows(2)
                .all(|p| self.allows(p[0] as usize, p[1] as usize))
    }

    /// Cached table of admissible words of length `depth`.
    pub fn words(&self, depth: usize) -> Arc<WordTable> {
        assert!(depth >= 1, "word length must be at least 1");
        let mut tables = self.tables.lock().expect("word table cache poisoned");
        tables
            .entry(depth)
            .or_insert_with(|| Arc::new(self.enumerate(depth)))
            .clone()
    }

    fn enumerate(&self, depth: usize) -> WordTable {
        let n = self.alphabet_size;
        let mut symbols = Vec::new();
        let mut current: Vec<Symbol> = Vec::with_capacity(depth);
        // iterative depth-first walk in lexicographic order
        let mut next: Vec<usize> = vec![0];
        while let Some(candidate) = next.pop() {
            let level = current.len();
            if candidate >= n {
                if current.pop().is_none() {
                    break;
                }
                continue;
            }
            next.push(candidate + 1);
            if level > 0 && !self.allows(current[level - 1] as usize, candidate) {
                continue;
            }
            current.push(candidate as Symbol);
            if current.len() == depth {
                symbols.extend_from_slice(&current);
                current.pop();
            } else {
                next.push(0);
            }
        }
        WordTable { depth, symbols }
    }

    /// Admissible words of length `n` in lexicographic order.
    pub fn admissible_words(&self, n: usize) -> Result<Vec<Word>> {
        if n == 0 {
            return Err(Error::InvalidArgument("word length must be at least 1".into()));
        }
        Ok(self
            .words(n)
            .iter()
            .map(|w| Word {
                symbols: w.to_vec(),
            })
            .collect())
    }
}

impl Clone for SubshiftSystem {
    fn clone(&self) -> Self {
        Self {
            alphabet_size: self.alphabet_size,
            allowed: self.allowed.clone(),
            tables: Mutex::new(HashMap::new()),
        }
    }
}

impl PartialEq for SubshiftSystem {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet_size == other.alphabet_size && self.allowed == other.allowed
    }
}

impl fmt::Debug for SubshiftSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubshiftSystem")
            .field("alphabet_size", &self.alphabet_size)
            .field("forbidden_pairs", &self.forbidden_pairs())
            .finish()
    }
}

pub(crate) fn same_system(a: &Arc<SubshiftSystem>, b: &Arc<SubshiftSystem>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A function on the shift space that depends only on the first `depth`
/// symbols. Values are stored per admissible depth-`depth` word, in the
/// order of [`SubshiftSystem::words`].
#[derive(Debug, Clone)]
pub struct LocallyConstantFunction {
    system: Arc<SubshiftSystem>,
    depth: usize,
    values: Vec<f64>,
}

impl LocallyConstantFunction {
    pub fn new(system: Arc<SubshiftSystem>, depth: usize, values: Vec<f64>) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidFunction("depth must be at least 1".into()));
        }
        let expected = system.words(depth).len();
        if values.len() != expected {
            return Err(Error::InvalidFunction(format!(
                "expected {expected} values at depth {depth}, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction(format!("non-finite value {bad}")));
        }
        Ok(Self {
            system,
            depth,
            values,
        })
    }

    pub fn from_fn(
        system: Arc<SubshiftSystem>,
        depth: usize,
        mut f: impl FnMut(&[Symbol]) -> f64,
    ) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidFunction("depth must be at least 1".into()));
        }
        let values = system.words(depth).iter().map(&mut f).collect();
        Self::new(system, depth, values)
    }

    /// Builds a function from a word-keyed table; words missing from the
    /// table get `default`.
    pub fn from_table(
        system: Arc<SubshiftSystem>,
        depth: usize,
        table: &HashMap<Word, f64>,
        default: f64,
    ) -> Result<Self> {
        for word in table.keys() {
            if word.len() != depth {
                return Err(Error::InvalidFunction(format!(
                    "word {word} has length {} but depth is {depth}",
                    word.len()
                )));
            }
            if !system.is_admissible(word.symbols()) {
                return Err(Error::InvalidFunction(format!("word {word} is not admissible")));
            }
        }
        Self::from_fn(system, depth, |w| {
            table
                .get(&Word {
                    symbols: w.to_vec(),
                })
                .copied()
                .unwrap_or(default)
        })
    }

    pub fn constant(system: Arc<SubshiftSystem>, c: f64) -> Result<Self> {
        Self::from_fn(system, 1, |_| c)
    }

    /// Indicator of the cylinder `[word]`, at depth `word.len()`.
    pub fn cylinder_indicator(system: Arc<SubshiftSystem>, word: &Word) -> Result<Self> {
        if !system.is_admissible(word.symbols()) {
            return Err(Error::InvalidWord(format!("{word} is not admissible")));
        }
        let target = word.symbols().to_vec();
        Self::from_fn(system, word.len(), |w| if w == target { 1.0 } else { 0.0 })
    }

    pub fn system(&self) -> &Arc<SubshiftSystem> {
        &self.system
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at a word of length at least `depth`; only the prefix is read.
    /// Words with an inadmissible prefix have empty cylinders and read as 0.
    pub fn value(&self, word: &[Symbol]) -> f64 {
        self.system
            .words(self.depth)
            .index_of_prefix(word)
            .map_or(0.0, |i| self.values[i])
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn is_indicator(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// The same function read at a finer depth.
    pub fn refine_to_depth(&self, depth: usize) -> Result<Self> {
        if depth < self.depth {
            return Err(Error::InvalidArgument(format!(
                "cannot refine depth {} down to {depth}",
                self.depth
            )));
        }
        if depth == self.depth {
            return Ok(self.clone());
        }
        let own = self.system.words(self.depth);
        let values = self
            .system
            .words(depth)
            .iter()
            .map(|w| self.values[own.index_of_prefix(w).expect("prefix of admissible word")])
            .collect();
        Ok(Self {
            system: self.system.clone(),
            depth,
            values,
        })
    }

    /// `f ∘ T`: the value on `w0 w1 … wk` is `f(w1 … wk)`.
    pub fn shift_pullback(&self) -> Self {
        let own = self.system.words(self.depth);
        let values = self
            .system
            .words(self.depth + 1)
            .iter()
            .map(|w| self.values[own.index_of(&w[1..]).expect("suffix of admissible word")])
            .collect();
        Self {
            system: self.system.clone(),
            depth: self.depth + 1,
            values,
        }
    }

    /// `f ∘ T^j`.
    pub fn shift_pullback_by(&self, steps: usize) -> Self {
        (0..steps).fold(self.clone(), |f, _| f.shift_pullback())
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !same_system(&self.system, &other.system) {
            return Err(Error::SystemMismatch);
        }
        let depth = self.depth.max(other.depth);
        let a = self.refine_to_depth(depth)?;
        let b = other.refine_to_depth(depth)?;
        let values = a.values.iter().zip(&b.values).map(|(&x, &y)| op(x, y)).collect();
        Ok(Self {
            system: self.system.clone(),
            depth,
            values,
        })
    }

    /// Pointwise product at the common refined depth.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x * y)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            system: self.system.clone(),
            depth: self.depth,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    /// Birkhoff sum `S_n f = Σ_{i<n} f ∘ T^i`, at depth `depth + n - 1`.
    pub fn birkhoff_sum(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("Birkhoff sums need n >= 1".into()));
        }
        let depth = self.depth + n - 1;
        let mut acc = self.refine_to_depth(depth)?;
        for i in 1..n {
            let term = self.shift_pullback_by(i).refine_to_depth(depth)?;
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }
}
