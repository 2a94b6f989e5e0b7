use std::cmp::Ordering;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::words::{shortlex_cmp, Alphabet, Letter, Word};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RewriteRule {
    pub lhs: Word,
    pub rhs: Word,
}

/// Dense trie over letters; node 0 is the root, and a child index of 0
/// means "absent".
#[derive(Debug, Clone)]
struct Trie {
    width: usize,
    children: Vec<u32>,
    terminal: Vec<u32>,
}

impl Trie {
    fn new(width: usize) -> Self {
        Trie {
            width,
            children: vec![0; width],
            terminal: vec![NONE],
        }
    }

    fn nodes(&self) -> usize {
        self.terminal.len()
    }

    #[inline]
    fn child(&self, node: u32, x: Letter) -> u32 {
        self.children[node as usize * self.width + x as usize]
    }

    fn insert(&mut self, word: impl Iterator<Item = Letter>, id: u32) {
        let mut node = 0u32;
        for x in word {
            let slot = node as usize * self.width + x as usize;
            let next = self.children[slot];
            node = if next == 0 {
                let fresh = self.terminal.len() as u32;
                self.children[slot] = fresh;
                self.children.extend(std::iter::repeat_n(0, self.width));
                self.terminal.push(NONE);
                fresh
            } else {
                next
            };
        }
        self.terminal[node as usize] = id;
    }

    fn remove(&mut self, word: impl Iterator<Item = Letter>, id: u32) {
        let mut node = 0u32;
        for x in word {
            node = self.child(node, x);
            if node == 0 {
                return;
            }
        }
        if self.terminal[node as usize] == id {
            self.terminal[node as usize] = NONE;
        }
    }

    fn walk(&self, word: impl Iterator<Item = Letter>) -> Option<u32> {
        let mut node = 0u32;
        for x in word {
            node = self.child(node, x);
            if node == 0 {
                return None;
            }
        }
        Some(node)
    }

    /// Terminal ids strictly below `node`.
    fn subtree_terminals(&self, node: u32, out: &mut Vec<u32>) {
        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            let row = &self.children[n as usize * self.width..(n as usize + 1) * self.width];
            for &c in row.iter().rev() {
                if c != 0 {
                    if self.terminal[c as usize] != NONE {
                        out.push(self.terminal[c as usize]);
                    }
                    stack.push(c);
                }
            }
        }
    }
}

/// A shortlex rewriting system over a group alphabet. Always contains the
/// free cancellation rules `x x^-1 -> ε`.
///
/// Rules live in slots that keep their ids while the set is edited; the
/// reversed-lhs trie drives rewriting, the forward trie drives overlap
/// search.
#[derive(Debug, Clone)]
pub struct RuleSet {
    alphabet: Arc<Alphabet>,
    slots: Vec<RewriteRule>,
    alive: Vec<bool>,
    live: usize,
    forward: Trie,
    reverse: Trie,
}

impl RuleSet {
    pub fn new(alphabet: Arc<Alphabet>) -> Self {
        let width = alphabet.len();
        let mut rs = RuleSet {
            alphabet: alphabet.clone(),
            slots: Vec::new(),
            alive: Vec::new(),
            live: 0,
            forward: Trie::new(width),
            reverse: Trie::new(width),
        };
        for x in alphabet.letters() {
            rs.push_rule(Word(vec![x, alphabet.inverse(x)]), Word::new());
        }
        rs
    }

    /// Cancellation rules plus the given rules, which must be oriented
    /// (`rhs` shortlex-smaller than `lhs`).
    pub fn with_rules(alphabet: Arc<Alphabet>, rules: impl IntoIterator<Item = (Word, Word)>) -> Result<Self> {
        let mut rs = RuleSet::new(alphabet);
        for (lhs, rhs) in rules {
            if rs.alphabet.shortlex_compare(&rhs, &lhs)? != Ordering::Less {
                return Err(Error::InvalidPresentation(format!(
                    "rule {} -> {} is not shortlex-decreasing",
                    rs.alphabet.format_word(&lhs),
                    rs.alphabet.format_word(&rhs)
                )));
            }
            if rs.find(&lhs).is_none() {
                rs.push_rule(lhs, rhs);
            }
        }
        Ok(rs)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    /// Number of live rules.
    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    /// Live rules in creation order.
    pub fn rules(&self) -> impl Iterator<Item = &RewriteRule> + '_ {
        self.slots.iter().zip(&self.alive).filter(|(_, &a)| a).map(|(r, _)| r)
    }

    pub(crate) fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub(crate) fn is_alive(&self, id: u32) -> bool {
        self.alive[id as usize]
    }

    pub(crate) fn rule(&self, id: u32) -> &RewriteRule {
        &self.slots[id as usize]
    }

    pub(crate) fn trie_nodes(&self) -> usize {
        self.forward.nodes() + self.reverse.nodes()
    }

    /// Id of the live rule with exactly this lhs.
    fn find(&self, lhs: &[Letter]) -> Option<u32> {
        let node = self.forward.walk(lhs.iter().copied())?;
        let t = self.forward.terminal[node as usize];
        (t != NONE).then_some(t)
    }

    pub(crate) fn push_rule(&mut self, lhs: Word, rhs: Word) -> u32 {
        let id = self.slots.len() as u32;
        self.forward.insert(lhs.iter().copied(), id);
        self.reverse.insert(lhs.iter().rev().copied(), id);
        self.slots.push(RewriteRule { lhs, rhs });
        self.alive.push(true);
        self.live += 1;
        id
    }

    pub(crate) fn remove_rule(&mut self, id: u32) {
        if !self.alive[id as usize] {
            return;
        }
        let lhs = &self.slots[id as usize].lhs;
        self.forward.remove(lhs.iter().copied(), id);
        self.reverse.remove(lhs.iter().rev().copied(), id);
        self.alive[id as usize] = false;
        self.live -= 1;
    }

    pub(crate) fn set_rhs(&mut self, id: u32, rhs: Word) {
        self.slots[id as usize].rhs = rhs;
    }

    /// Rebuilds slot storage and tries with only the live rules. Returns
    /// the map from old ids to new ids (`None` for removed rules).
    pub(crate) fn compact(&mut self) -> Vec<Option<u32>> {
        let old = std::mem::take(&mut self.slots);
        let alive = std::mem::take(&mut self.alive);
        let width = self.alphabet.len();
        self.forward = Trie::new(width);
        self.reverse = Trie::new(width);
        self.live = 0;
        let mut map = vec![None; old.len()];
        for (i, (rule, a)) in old.into_iter().zip(alive).enumerate() {
            if a {
                map[i] = Some(self.push_rule(rule.lhs, rule.rhs));
            }
        }
        map
    }

    /// Id of the rule whose lhs is the shortest suffix of `w`, if any.
    #[inline]
    fn match_suffix(&self, w: &[Letter]) -> Option<u32> {
        let mut node = 0u32;
        for &x in w.iter().rev() {
            node = self.reverse.child(node, x);
            if node == 0 {
                return None;
            }
            let t = self.reverse.terminal[node as usize];
            if t != NONE {
                return Some(t);
            }
        }
        None
    }

    /// Rewrites to an irreducible word, always applying the rule whose
    /// left-hand side ends earliest.
    pub fn rewrite(&self, w: &[Letter]) -> Word {
        let mut out = Vec::with_capacity(w.len());
        let mut input: Vec<Letter> = w.iter().rev().copied().collect();
        while let Some(x) = input.pop() {
            out.push(x);
            if let Some(id) = self.match_suffix(&out) {
                let r = &self.slots[id as usize];
                out.truncate(out.len() - r.lhs.len());
                input.extend(r.rhs.iter().rev());
            }
        }
        Word(out)
    }

    pub fn is_reducible(&self, w: &[Letter]) -> bool {
        (1..=w.len()).any(|end| self.match_suffix(&w[..end]).is_some())
    }

    /// Id of a live rule (other than `id`) whose lhs is a subword of rule
    /// `id`'s lhs.
    pub(crate) fn lhs_reducer(&self, id: u32) -> Option<u32> {
        let lhs = &self.slots[id as usize].lhs;
        for end in 1..=lhs.len() {
            let mut node = 0u32;
            for &x in lhs[..end].iter().rev() {
                node = self.reverse.child(node, x);
                if node == 0 {
                    break;
                }
                let t = self.reverse.terminal[node as usize];
                if t != NONE && t != id {
                    return Some(t);
                }
            }
        }
        None
    }

    /// Overlaps of rule `a`'s lhs suffix with a prefix of the lhs of any
    /// rule accepted by `keep`. Each overlap yields the two one-step
    /// rewrites of the overlap word.
    pub(crate) fn overlaps_from(&self, a: u32, keep: &dyn Fn(u32) -> bool, out: &mut Vec<(Word, Word)>) {
        let ra = &self.slots[a as usize];
        let la = &ra.lhs;
        let mut partners = Vec::new();
        for i in 1..la.len() {
            let suffix = &la[i..];
            let mut node = 0u32;
            let mut blocked = false;
            for &x in suffix {
                node = self.forward.child(node, x);
                if node == 0 || self.forward.terminal[node as usize] != NONE {
                    // either no lhs starts with the suffix, or an lhs is a
                    // proper subword of `la` (rule `a` is stale)
                    blocked = true;
                    break;
                }
            }
            if blocked {
                continue;
            }
            partners.clear();
            self.forward.subtree_terminals(node, &mut partners);
            for &b in &partners {
                if !keep(b) {
                    continue;
                }
                let rb = &self.slots[b as usize];
                let k = suffix.len();
                // overlap word: la + lb[k..]
                let left = ra.rhs.concat(&rb.lhs[k..]);
                let mut right = Word(la[..i].to_vec());
                right.extend_from_slice(&rb.rhs);
                out.push((left, right));
            }
        }
    }

    /// Overlaps where a suffix of some kept rule's lhs is a prefix of rule
    /// `b`'s lhs (the mirror of [`overlaps_from`]).
    pub(crate) fn overlaps_into(&self, b: u32, keep: &dyn Fn(u32) -> bool, out: &mut Vec<(Word, Word)>) {
        let rb = &self.slots[b as usize];
        let lb = &rb.lhs;
        let mut partners = Vec::new();
        for k in 1..lb.len() {
            let prefix = &lb[..k];
            let mut node = 0u32;
            let mut blocked = false;
            for &x in prefix.iter().rev() {
                node = self.reverse.child(node, x);
                if node == 0 || self.reverse.terminal[node as usize] != NONE {
                    blocked = true;
                    break;
                }
            }
            if blocked {
                continue;
            }
            partners.clear();
            self.reverse.subtree_terminals(node, &mut partners);
            for &a in &partners {
                if a == b || !keep(a) {
                    continue;
                }
                let ra = &self.slots[a as usize];
                let la = &ra.lhs;
                let i = la.len() - k;
                let left = ra.rhs.concat(&lb[k..]);
                let mut right = Word(la[..i].to_vec());
                right.extend_from_slice(&rb.rhs);
                out.push((left, right));
            }
        }
    }

    /// All critical pairs that do not resolve, each side rewritten to an
    /// irreducible word. Empty iff the system is confluent.
    pub fn critical_pairs(&self) -> Vec<(Word, Word)> {
        let mut raw = Vec::new();
        for id in 0..self.slots.len() as u32 {
            if self.alive[id as usize] {
                self.overlaps_from(id, &|b| self.alive[b as usize], &mut raw);
            }
        }
        let mut out = Vec::new();
        for (u, v) in raw {
            let (u, v) = (self.rewrite(&u), self.rewrite(&v));
            if u != v {
                out.push((u, v));
            }
        }
        out
    }

    /// One rule per line, `lhs -> rhs`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in self.rules() {
            s.push_str(&self.alphabet.format_word(&r.lhs));
            s.push_str(" -> ");
            s.push_str(&self.alphabet.format_word(&r.rhs));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str, alphabet: Arc<Alphabet>) -> Result<Self> {
        let mut rules = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (l, r) = line
                .split_once("->")
                .ok_or_else(|| Error::parse(i + 1, "expected `lhs -> rhs`"))?;
            let l = alphabet.parse_word(l).map_err(|e| Error::parse(i + 1, e.to_string()))?;
            let r = alphabet.parse_word(r).map_err(|e| Error::parse(i + 1, e.to_string()))?;
            rules.push((l, r));
        }
        RuleSet::with_rules(alphabet, rules)
    }
}

/// Orients an equation so that the shortlex-larger side is the lhs; `None`
/// when both sides are equal.
pub(crate) fn orient(u: Word, v: Word) -> Option<(Word, Word)> {
    match shortlex_cmp(&u, &v) {
        Ordering::Greater => Some((u, v)),
        Ordering::Less => Some((v, u)),
        Ordering::Equal => None,
    }
}
