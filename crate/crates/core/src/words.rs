//! Alphabets, words, the shortlex order and group presentations.
//!
//! Letters are indices into an [`Alphabet`]; the index order is the shortlex
//! letter order. Every alphabet is an inverse-closed monoid generating set, so
//! each letter carries its inverse letter.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Deref, DerefMut};
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Letter = u16;

/// Printed form of the empty word.
pub const IDENTITY_NAME: &str = "IdWord";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    inverse: Vec<Letter>,
    lookup: HashMap<String, Letter>,
}

impl Alphabet {
    /// Builds an alphabet from names listed in shortlex order and an inverse
    /// map given by letter index.
    pub fn new(names: Vec<String>, inverse: Vec<Letter>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidAlphabet("no generators".into()));
        }
        if names.len() >= Letter::MAX as usize {
            return Err(Error::InvalidAlphabet("too many generators".into()));
        }
        if inverse.len() != names.len() {
            return Err(Error::InvalidAlphabet(format!(
                "{} names but {} inverse entries",
                names.len(),
                inverse.len()
            )));
        }
        let mut lookup = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.chars().any(|c| c.is_whitespace() || ",=*^:".contains(c)) {
                return Err(Error::InvalidAlphabet(format!("bad generator name {name:?}")));
            }
            if name == IDENTITY_NAME || name == "_" {
                return Err(Error::InvalidAlphabet(format!("reserved generator name {name:?}")));
            }
            if lookup.insert(name.clone(), i as Letter).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate generator {name}")));
            }
        }
        for (i, &inv) in inverse.iter().enumerate() {
            if inv as usize >= names.len() {
                return Err(Error::InvalidAlphabet(format!("inverse of {} out of range", names[i])));
            }
            if inverse[inv as usize] as usize != i {
                return Err(Error::InvalidAlphabet(format!(
                    "inverse map is not an involution at {}",
                    names[i]
                )));
            }
        }
        Ok(Alphabet { names, inverse, lookup })
    }

    /// Alphabet `x1 X1 x2 X2 ...` for the given lowercase stems, using the
    /// case convention (uppercase is the inverse).
    pub fn from_case_pairs<S: AsRef<str>>(stems: &[S]) -> Result<Self> {
        let mut names = Vec::with_capacity(stems.len() * 2);
        let mut inverse = Vec::with_capacity(stems.len() * 2);
        for (i, s) in stems.iter().enumerate() {
            let s = s.as_ref();
            names.push(s.to_string());
            names.push(s.to_uppercase());
            inverse.push((2 * i + 1) as Letter);
            inverse.push((2 * i) as Letter);
        }
        Alphabet::new(names, inverse)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, x: Letter) -> &str {
        &self.names[x as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.lookup.get(name).copied()
    }

    pub fn inverse(&self, x: Letter) -> Letter {
        self.inverse[x as usize]
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.names.len()).map(|i| i as Letter)
    }

    pub fn contains_word(&self, w: &[Letter]) -> bool {
        w.iter().all(|&x| (x as usize) < self.names.len())
    }

    fn check(&self, w: &[Letter]) -> Result<()> {
        if self.contains_word(w) {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch(format!(
                "word uses letters outside an alphabet of size {}",
                self.len()
            )))
        }
    }

    /// Shortlex comparison that validates both words against this alphabet.
    pub fn shortlex_compare(&self, u: &[Letter], v: &[Letter]) -> Result<Ordering> {
        self.check(u)?;
        self.check(v)?;
        Ok(shortlex_cmp(u, v))
    }

    pub fn invert(&self, w: &[Letter]) -> Word {
        Word(w.iter().rev().map(|&x| self.inverse(x)).collect())
    }

    /// Deletes adjacent `x x^-1` pairs until none remain.
    pub fn free_reduce(&self, w: &[Letter]) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(w.len());
        for &x in w {
            match out.last() {
                Some(&y) if self.inverse(y) == x => {
                    out.pop();
                }
                _ => out.push(x),
            }
        }
        Word(out)
    }

    /// Parses a word. Accepted syntax: generator names separated by
    /// whitespace, `*` or `.`, each optionally followed by `^k` (k may be
    /// negative); adjacent names may also be run together when the split is
    /// unambiguous, and `a_1` may be written for `a1`. `IdWord`, `1` and the
    /// empty string denote the identity.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut out = Word::new();
        for token in text.split(|c: char| c.is_whitespace() || c == '*' || c == '.') {
            if token.is_empty() || token == IDENTITY_NAME || token == "1" || token == "ε" {
                continue;
            }
            let (base, exponent) = match token.split_once('^') {
                Some((b, e)) => {
                    let k: i64 = e
                        .trim_matches(|c| c == '(' || c == ')')
                        .parse()
                        .map_err(|_| Error::parse(0, format!("bad exponent in {token:?}")))?;
                    (b, k)
                }
                None => (token, 1),
            };
            let piece = self
                .split_names(base)
                .or_else(|| self.split_names(&base.replace('_', "")))
                .ok_or_else(|| Error::parse(0, format!("unknown generator in {base:?}")))?;
            let piece = if exponent < 0 { self.invert(&piece) } else { piece };
            for _ in 0..exponent.unsigned_abs() {
                out.extend_from_slice(&piece);
            }
        }
        Ok(out)
    }

    fn split_names(&self, s: &str) -> Option<Word> {
        if s.is_empty() {
            return Some(Word::new());
        }
        if let Some(x) = self.letter(s) {
            return Some(Word(vec![x]));
        }
        // longest-prefix first, with backtracking
        let mut ends: Vec<usize> = s.char_indices().map(|(i, _)| i).skip(1).collect();
        ends.reverse();
        for end in ends {
            if let Some(x) = self.letter(&s[..end]) {
                if let Some(rest) = self.split_names(&s[end..]) {
                    let mut w = Word(vec![x]);
                    w.extend_from_slice(&rest);
                    return Some(w);
                }
            }
        }
        None
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return IDENTITY_NAME.to_string();
        }
        w.iter().map(|&x| self.name(x)).collect::<Vec<_>>().join("*")
    }
}

/// Shortlex order on letter-index sequences.
pub fn shortlex_cmp(u: &[Letter], v: &[Letter]) -> Ordering {
    u.len().cmp(&v.len()).then_with(|| u.cmp(v))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn with_capacity(n: usize) -> Self {
        Word(Vec::with_capacity(n))
    }

    pub fn concat(&self, other: &[Letter]) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(self);
        v.extend_from_slice(other);
        Word(v)
    }

    pub fn into_inner(self) -> Vec<Letter> {
        self.0
    }
}

impl Deref for Word {
    type Target = Vec<Letter>;
    fn deref(&self) -> &Vec<Letter> {
        &self.0
    }
}

impl std::borrow::Borrow<[Letter]> for Word {
    fn borrow(&self) -> &[Letter] {
        &self.0
    }
}

impl DerefMut for Word {
    fn deref_mut(&mut self) -> &mut Vec<Letter> {
        &mut self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl From<&[Letter]> for Word {
    fn from(v: &[Letter]) -> Self {
        Word(v.to_vec())
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// A finitely presented group: generators (with inverses) and relations
/// `lhs = rhs`. The relations `x x^-1 = 1` are implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub name: String,
    pub alphabet: Arc<Alphabet>,
    pub relations: Vec<(Word, Word)>,
}

impl Presentation {
    pub fn new(name: impl Into<String>, alphabet: Alphabet, relations: Vec<(Word, Word)>) -> Result<Self> {
        for (l, r) in &relations {
            if !alphabet.contains_word(l) || !alphabet.contains_word(r) {
                return Err(Error::InvalidPresentation(
                    "relation uses letters outside the alphabet".into(),
                ));
            }
        }
        Ok(Presentation {
            name: name.into(),
            alphabet: Arc::new(alphabet),
            relations,
        })
    }

    /// Longest relation word (sum of both sides).
    pub fn max_relator_len(&self) -> usize {
        self.relations
            .iter()
            .map(|(l, r)| l.len() + r.len())
            .max()
            .unwrap_or(2)
            .max(2)
    }

    /// Re-indexes the alphabet so that letters appear in the given order.
    pub fn with_letter_order<S: AsRef<str>>(&self, order: &[S]) -> Result<Presentation> {
        let a = &self.alphabet;
        if order.len() != a.len() {
            return Err(Error::InvalidAlphabet("order must list every generator once".into()));
        }
        let mut old_to_new = vec![Letter::MAX; a.len()];
        for (new, name) in order.iter().enumerate() {
            let old = a
                .letter(name.as_ref())
                .ok_or_else(|| Error::InvalidAlphabet(format!("unknown generator {}", name.as_ref())))?;
            if old_to_new[old as usize] != Letter::MAX {
                return Err(Error::InvalidAlphabet(format!("repeated generator {}", name.as_ref())));
            }
            old_to_new[old as usize] = new as Letter;
        }
        let names = order.iter().map(|s| s.as_ref().to_string()).collect();
        let mut inverse = vec![0; a.len()];
        for old in a.letters() {
            inverse[old_to_new[old as usize] as usize] = old_to_new[a.inverse(old) as usize];
        }
        let map = |w: &Word| w.iter().map(|&x| old_to_new[x as usize]).collect::<Word>();
        let relations = self.relations.iter().map(|(l, r)| (map(l), map(r))).collect();
        Presentation::new(self.name.clone(), Alphabet::new(names, inverse)?, relations)
    }

    /// Parses the line-oriented presentation format:
    ///
    /// ```text
    /// name: fib5                 # optional
    /// generators: a1 A1 a2 A2    # in shortlex order
    /// inverses: a1 A1, a2 A2
    /// relation: a1 a2 = a3
    /// ```
    pub fn parse(text: &str) -> Result<Presentation> {
        let mut name = String::from("group");
        let mut generators: Option<Vec<String>> = None;
        let mut inverse_pairs: Vec<(String, String, usize)> = Vec::new();
        let mut relation_lines: Vec<(String, usize)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, "expected `key: value`"))?;
            let value = value.trim();
            match key.trim() {
                "name" => name = value.to_string(),
                "generators" => {
                    if generators.is_some() {
                        return Err(Error::parse(lineno, "generators declared twice"));
                    }
                    generators = Some(value.split_whitespace().map(String::from).collect());
                }
                "inverses" => {
                    for pair in value.split(',') {
                        let parts: Vec<&str> = pair.split_whitespace().collect();
                        match parts.as_slice() {
                            [] => {}
                            [x, y] => inverse_pairs.push((x.to_string(), y.to_string(), lineno)),
                            _ => return Err(Error::parse(lineno, format!("bad inverse pair {pair:?}"))),
                        }
                    }
                }
                "relation" => relation_lines.push((value.to_string(), lineno)),
                other => return Err(Error::parse(lineno, format!("unknown key {other:?}"))),
            }
        }
        let names = generators.ok_or_else(|| Error::parse(0, "missing generators line"))?;
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut inverse: Vec<Option<Letter>> = vec![None; names.len()];
        for (x, y, lineno) in &inverse_pairs {
            let (&xi, &yi) = match (index.get(x.as_str()), index.get(y.as_str())) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::parse(*lineno, format!("unknown generator in pair {x} {y}"))),
            };
            for (a, b) in [(xi, yi), (yi, xi)] {
                if inverse[a].is_some_and(|c| c as usize != b) {
                    return Err(Error::parse(*lineno, format!("conflicting inverse for {}", names[a])));
                }
                inverse[a] = Some(b as Letter);
            }
        }
        let inverse = inverse
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::parse(0, format!("no inverse given for {}", names[i]))))
            .collect::<Result<Vec<_>>>()?;
        let alphabet = Alphabet::new(names, inverse).map_err(|e| Error::parse(0, e.to_string()))?;
        let mut relations = Vec::new();
        for (rel, lineno) in relation_lines {
            let (l, r) = rel
                .split_once('=')
                .ok_or_else(|| Error::parse(lineno, "relation needs `=`"))?;
            let lw = alphabet
                .parse_word(l)
                .map_err(|e| Error::parse(lineno, e.to_string()))?;
            let rw = alphabet
                .parse_word(r)
                .map_err(|e| Error::parse(lineno, e.to_string()))?;
            relations.push((lw, rw));
        }
        Presentation::new(name, alphabet, relations)
    }

    pub fn to_text(&self) -> String {
        let a = &self.alphabet;
        let mut s = format!("name: {}\n", self.name);
        s.push_str(&format!("generators: {}\n", a.names().join(" ")));
        let mut pairs = Vec::new();
        for x in a.letters() {
            let y = a.inverse(x);
            if x <= y {
                pairs.push(format!("{} {}", a.name(x), a.name(y)));
            }
        }
        s.push_str(&format!("inverses: {}\n", pairs.join(", ")));
        let side = |w: &Word| {
            if w.is_empty() {
                IDENTITY_NAME.to_string()
            } else {
                w.iter().map(|&x| a.name(x)).collect::<Vec<_>>().join(" ")
            }
        };
        for (l, r) in &self.relations {
            s.push_str(&format!("relation: {} = {}\n", side(l), side(r)));
        }
        s
    }
}

/// The Fibonacci group presentation `a_i a_{i+1} = a_{i+2}` (indices mod n)
/// over the ordered generating set `a1 A1 a2 A2 ... an An`.
pub fn fibonacci_presentation(n: usize) -> Result<Presentation> {
    if n < 2 {
        return Err(Error::InvalidPresentation(format!("F(2,{n}) needs n >= 2")));
    }
    let stems: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
    let alphabet = Alphabet::from_case_pairs(&stems)?;
    let gen = |i: usize| (2 * (i % n)) as Letter;
    let relations = (0..n)
        .map(|i| (Word(vec![gen(i), gen(i + 1)]), Word(vec![gen(i + 2)])))
        .collect();
    Presentation::new(format!("fib{n}"), alphabet, relations)
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ab() -> Alphabet {
        Alphabet::from_case_pairs(&["a", "b"]).unwrap()
    }

    fn w(a: &Alphabet, s: &str) -> Word {
        a.parse_word(s).unwrap()
    }

    #[test]
    fn shortlex_examples() {
        let a = ab();
        assert_eq!(a.shortlex_compare(&w(&a, "b"), &w(&a, "aa")).unwrap(), Ordering::Less);
        assert_eq!(
            a.shortlex_compare(&w(&a, "abA"), &w(&a, "abA")).unwrap(),
            Ordering::Equal
        );
        // order a < A < b < B
        assert_eq!(
            a.shortlex_compare(&w(&a, "ab"), &w(&a, "aA")).unwrap(),
            Ordering::Greater
        );
    }

    #[test]
    fn shortlex_rejects_foreign_letters() {
        let a = ab();
        assert!(a.shortlex_compare(&[0, 9], &[1]).is_err());
    }

    #[test]
    fn invert_examples() {
        let a = ab();
        assert_eq!(a.invert(&w(&a, "ab")), w(&a, "BA"));
        assert_eq!(a.invert(&[]), Word::new());
        assert_eq!(a.invert(&w(&a, "aA")), w(&a, "aA"));
    }

    #[test]
    fn free_reduce_examples() {
        let a = ab();
        assert_eq!(a.free_reduce(&w(&a, "aAb")), w(&a, "b"));
        assert_eq!(a.free_reduce(&[]), Word::new());
        assert_eq!(a.free_reduce(&w(&a, "abBA")), Word::new());
    }

    #[test]
    fn fibonacci_examples() {
        let p = fibonacci_presentation(9).unwrap();
        let a = &p.alphabet;
        assert_eq!(p.relations.len(), 9);
        assert_eq!(p.relations[0], (w(a, "a1 a2"), w(a, "a3")));
        assert_eq!(p.relations[8], (w(a, "a9 a1"), w(a, "a2")));
        assert_eq!(a.names()[..4], ["a1", "A1", "a2", "A2"]);

        let p2 = fibonacci_presentation(2).unwrap();
        let a2 = &p2.alphabet;
        assert_eq!(
            p2.relations,
            vec![(w(a2, "a1 a2"), w(a2, "a1")), (w(a2, "a2 a1"), w(a2, "a2"))]
        );
        assert!(fibonacci_presentation(1).is_err());
    }

    #[test]
    fn parse_word_syntax() {
        let p = fibonacci_presentation(10).unwrap();
        let a = &p.alphabet;
        assert_eq!(w(a, "a1a2"), w(a, "a1 a2"));
        assert_eq!(w(a, "a10"), Word(vec![18]));
        assert_eq!(w(a, "a1^3"), Word(vec![0, 0, 0]));
        assert_eq!(w(a, "a1^-2"), Word(vec![1, 1]));
        assert_eq!(w(a, "a1*A1.a2"), Word(vec![0, 1, 2]));
        assert_eq!(w(a, "IdWord"), Word::new());
        assert_eq!(w(a, "a_1 a_2"), w(a, "a1 a2"));
        assert_eq!(a.format_word(&w(a, "a1 A3")), "a1*A3");
        assert!(a.parse_word("zz").is_err());
    }

    #[test]
    fn presentation_round_trip() {
        let p = fibonacci_presentation(5).unwrap();
        let q = Presentation::parse(&p.to_text()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn presentation_parse_errors() {
        assert!(Presentation::parse("generators: a A\n").is_err());
        assert!(Presentation::parse("generators: a A\ninverses: a A\nrelation: a b = a\n").is_err());
        assert!(Presentation::parse("garbage\n").is_err());
    }

    #[test]
    fn letter_order_is_configurable() {
        let p = fibonacci_presentation(3).unwrap();
        let q = p.with_letter_order(&["A1", "a1", "A2", "a2", "A3", "a3"]).unwrap();
        assert_eq!(q.alphabet.inverse(0), 1);
        assert_eq!(q.relations[0], (Word(vec![1, 3]), Word(vec![5])));
    }

    fn word_strategy() -> impl Strategy<Value = Vec<Letter>> {
        proptest::collection::vec(0u16..4, 0..10)
    }

    proptest! {
        #[test]
        fn shortlex_is_a_total_order(u in word_strategy(), v in word_strategy(), x in word_strategy()) {
            let uv = shortlex_cmp(&u, &v);
            prop_assert_eq!(uv.reverse(), shortlex_cmp(&v, &u));
            prop_assert_eq!(uv == Ordering::Equal, u == v);
            if uv != Ordering::Greater && shortlex_cmp(&v, &x) != Ordering::Greater {
                prop_assert!(shortlex_cmp(&u, &x) != Ordering::Greater);
            }
        }

        #[test]
        fn free_reduce_properties(u in word_strategy()) {
            let a = ab();
            let r = a.free_reduce(&u);
            prop_assert_eq!(a.free_reduce(&r), r.clone());
            prop_assert!(r.len() <= u.len());
            prop_assert!(shortlex_cmp(&r, &u) != Ordering::Greater);
            prop_assert_eq!(a.invert(&a.invert(&u)), Word(u.clone()));
        }

        #[test]
        fn fibonacci_shape(n in 2usize..20) {
            let p = fibonacci_presentation(n).unwrap();
            prop_assert_eq!(p.relations.len(), n);
            for (l, r) in &p.relations {
                prop_assert_eq!(l.len(), 2);
                prop_assert_eq!(r.len(), 1);
            }
        }
    }
}
