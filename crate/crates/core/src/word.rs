//! Words, canonical elements and syllable normal forms.
//!
//! An [`Element`] stores the lexicographically least reduced word of its
//! group element, so equality of elements is equality of vectors. The
//! syllable decomposition ([`NormalForm`]) is derived from that word.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::raag::{DefiningGraph, SignedSet};

/// A signed generator packed as `gen << 1 | inverse`.
pub type Letter = u8;

#[inline]
pub fn letter(generator: usize, sign: i8) -> Letter {
    ((generator as u8) << 1) | u8::from(sign < 0)
}

#[inline]
pub fn letter_gen(l: Letter) -> usize {
    (l >> 1) as usize
}

#[inline]
pub fn letter_sign(l: Letter) -> i8 {
    if l & 1 == 1 {
        -1
    } else {
        1
    }
}

/// Parses a word literal such as `a^5 b^-2 c^3`. `1` and the empty string
/// denote the empty word.
pub fn parse_word(graph: &DefiningGraph, text: &str) -> Result<Vec<Letter>> {
    let mut out = Vec::new();
    for token in text.split_whitespace() {
        if token == "1" {
            continue;
        }
        let (name, exp) = match token.split_once('^') {
            Some((n, e)) => {
                let e: i64 = e.parse().map_err(|_| Error::Parse(format!("bad exponent in `{token}`")))?;
                (n, e)
            }
            None => (token, 1),
        };
        let g = graph.index_of(name).ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
        if exp.unsigned_abs() > 1 << 20 {
            return Err(Error::Parse(format!("exponent too large in `{token}`")));
        }
        let l = letter(g, if exp < 0 { -1 } else { 1 });
        out.extend(std::iter::repeat_n(l, exp.unsigned_abs() as usize));
    }
    Ok(out)
}

/// Renders letters as a literal, grouping runs into powers.
pub fn format_word(graph: &DefiningGraph, letters: &[Letter]) -> String {
    if letters.is_empty() {
        return "1".to_string();
    }
    let mut out = String::new();
    let mut i = 0;
    while i < letters.len() {
        let g = letter_gen(letters[i]);
        let mut exp = 0i64;
        while i < letters.len() && letter_gen(letters[i]) == g {
            exp += i64::from(letter_sign(letters[i]));
            i += 1;
        }
        if exp == 0 {
            continue;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(graph.name(g));
        if exp != 1 {
            let _ = write!(out, "^{exp}");
        }
    }
    if out.is_empty() {
        out.push('1');
    }
    out
}

/// A group element, stored as its lexicographically least reduced word.
///
/// Elements are ordered shortlex: by word length, then letter by letter.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Element(Vec<Letter>);

impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Element {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Reduces and canonicalizes an arbitrary word.
    pub fn from_letters(graph: &DefiningGraph, letters: &[Letter]) -> Self {
        let mut w = Vec::with_capacity(letters.len());
        for &l in letters {
            push_reduced(graph, &mut w, l);
        }
        Self(lex_normal(graph, &w))
    }

    pub fn parse(graph: &DefiningGraph, text: &str) -> Result<Self> {
        Ok(Self::from_letters(graph, &parse_word(graph, text)?))
    }

    /// The canonical reduced word.
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// Length in the standard generators.
    pub fn word_length(&self) -> usize {
        self.0.len()
    }

    pub fn to_literal(&self, graph: &DefiningGraph) -> String {
        format_word(graph, &self.0)
    }

    /// Right multiplication by arbitrary letters.
    pub fn mul_letters(&self, graph: &DefiningGraph, letters: &[Letter]) -> Self {
        let mut w = self.0.clone();
        for &l in letters {
            push_reduced(graph, &mut w, l);
        }
        Self(lex_normal(graph, &w))
    }

    pub fn mul(&self, graph: &DefiningGraph, other: &Element) -> Self {
        self.mul_letters(graph, &other.0)
    }

    /// Right multiplication by the diagonal generator `t_s`; `s` may be
    /// empty (giving `self`) but must be spherical.
    pub fn mul_signed(&self, graph: &DefiningGraph, s: SignedSet) -> Result<Self> {
        if !graph.is_clique(s.support()) {
            return Err(Error::NotSpherical(graph.fmt_signed(s)));
        }
        Ok(self.mul_diagonal(graph, s))
    }

    /// Like [`Element::mul_signed`] without the sphericity check.
    pub fn mul_diagonal(&self, graph: &DefiningGraph, s: SignedSet) -> Self {
        if s.is_empty() {
            return self.clone();
        }
        let letters: Vec<Letter> = s.entries().map(|(g, sign)| letter(g, sign)).collect();
        self.mul_letters(graph, &letters)
    }

    pub fn inverse(&self, graph: &DefiningGraph) -> Self {
        let inv: Vec<Letter> = self.0.iter().rev().map(|l| l ^ 1).collect();
        Self(lex_normal(graph, &inv))
    }

    /// Exponent sum of every generator.
    pub fn exponent_sums(&self, rank: usize) -> Vec<i64> {
        let mut v = vec![0i64; rank];
        for &l in &self.0 {
            v[letter_gen(l)] += i64::from(letter_sign(l));
        }
        v
    }

    pub fn normal_form(&self, graph: &DefiningGraph) -> NormalForm {
        syllables(graph, &self.0)
    }
}

/// Appends `l` to a reduced word, cancelling through commuting letters.
fn push_reduced(graph: &DefiningGraph, w: &mut Vec<Letter>, l: Letter) {
    let g = letter_gen(l);
    for i in (0..w.len()).rev() {
        let h = letter_gen(w[i]);
        if h == g {
            if w[i] == l ^ 1 {
                w.remove(i);
                return;
            }
            break;
        }
        if !graph.commute(g, h) {
            break;
        }
    }
    w.push(l);
}

/// Lexicographically least word among all commutation rearrangements.
fn lex_normal(graph: &DefiningGraph, w: &[Letter]) -> Vec<Letter> {
    let n = w.len();
    let mut taken = vec![false; n];
    let mut out = Vec::with_capacity(n);
    // blocked[g]: some untaken letter seen so far fails to commute with g.
    for _ in 0..n {
        let mut best: Option<usize> = None;
        let mut blocked = 0u32;
        for i in 0..n {
            if taken[i] {
                continue;
            }
            let g = letter_gen(w[i]);
            if blocked >> g & 1 == 0 && best.is_none_or(|b| w[i] < w[b]) {
                best = Some(i);
            }
            blocked |= (!graph.neighbors(g)) | (1 << g);
        }
        let b = best.expect("some letter is always available");
        taken[b] = true;
        out.push(w[b]);
    }
    out
}

/// Exponents of pairwise commuting generators, sorted by generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    exps: Vec<(u8, i32)>,
}

impl Syllable {
    pub fn exponents(&self) -> &[(u8, i32)] {
        &self.exps
    }

    pub fn support(&self) -> u32 {
        self.exps.iter().fold(0, |m, &(g, _)| m | 1 << g)
    }

    pub fn max_abs(&self) -> u32 {
        self.exps.iter().map(|&(_, e)| e.unsigned_abs()).max().unwrap_or(0)
    }

    /// Diagonal generators whose product is this syllable, leftmost first:
    /// the `j`-th from the right is `{g : |exp g| >= j}`.
    pub fn t_chain(&self) -> Vec<SignedSet> {
        (1..=self.max_abs())
            .rev()
            .map(|j| {
                let mut s = SignedSet::EMPTY;
                for &(g, e) in &self.exps {
                    if e.unsigned_abs() >= j {
                        s = s.with(g as usize, e.signum() as i8);
                    }
                }
                s
            })
            .collect()
    }

    fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::new();
        for &(g, e) in &self.exps {
            let l = letter(g as usize, e.signum() as i8);
            out.extend(std::iter::repeat_n(l, e.unsigned_abs() as usize));
        }
        out
    }
}

/// Syllable decomposition of an element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalForm {
    syllables: Vec<Syllable>,
}

impl NormalForm {
    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Total length of the diagonal-generator chain.
    pub fn tlen(&self) -> usize {
        self.syllables.iter().map(|s| s.max_abs() as usize).sum()
    }

    /// The full chain of diagonal generators, left to right.
    pub fn t_chain(&self) -> Vec<SignedSet> {
        self.syllables.iter().flat_map(Syllable::t_chain).collect()
    }

    /// Concatenated syllable letters (a word for the same element).
    pub fn flatten(&self) -> Vec<Letter> {
        self.syllables.iter().flat_map(Syllable::letters).collect()
    }

    pub fn to_element(&self, graph: &DefiningGraph) -> Element {
        Element::from_letters(graph, &self.flatten())
    }

    /// Right multiplication by a nonempty spherical diagonal generator.
    pub fn translate(&self, graph: &DefiningGraph, t: SignedSet) -> Result<NormalForm> {
        if t.is_empty() || !graph.is_clique(t.support()) {
            return Err(Error::NotSpherical(graph.fmt_signed(t)));
        }
        Ok(self.to_element(graph).mul_diagonal(graph, t).normal_form(graph))
    }

    /// Drops the leftmost diagonal generator of the first syllable.
    pub fn predecessor(&self, graph: &DefiningGraph) -> Result<NormalForm> {
        let first = self.syllables.first().ok_or(Error::IdentityHasNoPredecessor)?;
        let m = first.max_abs();
        let mut letters: Vec<Letter> = Vec::new();
        for &(g, e) in &first.exps {
            let e = if e.unsigned_abs() == m { e - e.signum() } else { e };
            let l = letter(g as usize, e.signum() as i8);
            letters.extend(std::iter::repeat_n(l, e.unsigned_abs() as usize));
        }
        for s in &self.syllables[1..] {
            letters.extend(s.letters());
        }
        Ok(Element::from_letters(graph, &letters).normal_form(graph))
    }

    /// Renders as parenthesised syllables, e.g. `(a z^2)(b)`.
    pub fn to_literal(&self, graph: &DefiningGraph) -> String {
        if self.syllables.is_empty() {
            return "1".to_string();
        }
        self.syllables.iter().map(|s| format!("({})", format_word(graph, &s.letters()))).collect()
    }
}

/// Greedy maximal spherical prefixes of a reduced word.
fn syllables(graph: &DefiningGraph, w: &[Letter]) -> NormalForm {
    let n = w.len();
    let mut taken = vec![false; n];
    let mut remaining = n;
    let mut out = Vec::new();
    while remaining > 0 {
        let mut admitted = 0u32;
        let mut exps = [0i32; 32];
        loop {
            let mut changed = false;
            // Admit front-available generators in generator order.
            let avail = front_available(graph, w, &taken);
            for g in 0..graph.rank() {
                if avail >> g & 1 == 1 && admitted >> g & 1 == 0 && admitted & !graph.neighbors(g) == 0 {
                    admitted |= 1 << g;
                    changed = true;
                }
            }
            // Absorb every letter of an admitted generator that commutes past
            // all untaken letters before it.
            let mut blocked = 0u32;
            for i in 0..n {
                if taken[i] {
                    continue;
                }
                let g = letter_gen(w[i]);
                if admitted >> g & 1 == 1 && blocked >> g & 1 == 0 {
                    taken[i] = true;
                    remaining -= 1;
                    exps[g] += i32::from(letter_sign(w[i]));
                    changed = true;
                } else {
                    blocked |= (!graph.neighbors(g)) | (1 << g);
                }
            }
            if !changed {
                break;
            }
        }
        let exps: Vec<(u8, i32)> =
            (0..graph.rank()).filter(|&g| exps[g] != 0).map(|g| (g as u8, exps[g])).collect();
        debug_assert!(!exps.is_empty());
        out.push(Syllable { exps });
    }
    NormalForm { syllables: out }
}

/// Generators whose first untaken occurrence is preceded only by commuting letters.
fn front_available(graph: &DefiningGraph, w: &[Letter], taken: &[bool]) -> u32 {
    let mut blocked = 0u32;
    let mut avail = 0u32;
    let mut seen = 0u32;
    for (i, &l) in w.iter().enumerate() {
        if taken[i] {
            continue;
        }
        let g = letter_gen(l);
        if seen >> g & 1 == 0 && blocked >> g & 1 == 0 {
            avail |= 1 << g;
        }
        seen |= 1 << g;
        blocked |= !graph.neighbors(g) | (1 << g);
    }
    avail
}

/// Normal form of an arbitrary word.
pub fn normalize(graph: &DefiningGraph, letters: &[Letter]) -> NormalForm {
    Element::from_letters(graph, letters).normal_form(graph)
}

/// True iff the two words name the same element.
pub fn equals(graph: &DefiningGraph, u: &[Letter], v: &[Letter]) -> bool {
    Element::from_letters(graph, u) == Element::from_letters(graph, v)
}
