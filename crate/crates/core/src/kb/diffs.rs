use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::Reduce;
use crate::fsa::{FsaAlphabet, Symbol};
use crate::words::{Alphabet, Letter, Word};

/// A set of word differences (group elements, stored as reduced words)
/// together with transitions `d --(x,y)--> reduce(x^-1 d y)`.
///
/// Index 0 is always the empty word. Transition symbols use the padded
/// pair encoding of [`FsaAlphabet`]; padding acts as the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordDifferenceSet {
    alphabet: Arc<Alphabet>,
    diffs: Vec<Word>,
    index: HashMap<Word, u32>,
    transitions: BTreeMap<(u32, Symbol), u32>,
    inverse_closed: bool,
}

impl WordDifferenceSet {
    pub fn new(alphabet: Arc<Alphabet>) -> Self {
        let mut index = HashMap::new();
        index.insert(Word::new(), 0);
        WordDifferenceSet {
            alphabet,
            diffs: vec![Word::new()],
            index,
            transitions: BTreeMap::new(),
            inverse_closed: true,
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn pair_alphabet(&self) -> FsaAlphabet {
        FsaAlphabet::pair(self.alphabet.clone())
    }

    pub fn len(&self) -> usize {
        self.diffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn diffs(&self) -> &[Word] {
        &self.diffs
    }

    pub fn word(&self, i: u32) -> &Word {
        &self.diffs[i as usize]
    }

    pub fn index_of(&self, w: &[Letter]) -> Option<u32> {
        self.index.get(w).copied()
    }

    pub fn contains(&self, w: &[Letter]) -> bool {
        self.index.contains_key(w)
    }

    pub fn is_inverse_closed(&self) -> bool {
        self.inverse_closed
    }

    /// Recorded transitions in `(source, symbol) -> target` order.
    pub fn transitions(&self) -> impl Iterator<Item = (u32, Symbol, u32)> + '_ {
        self.transitions.iter().map(|(&(d, s), &t)| (d, s, t))
    }

    pub fn transition(&self, d: u32, sym: Symbol) -> Option<u32> {
        self.transitions.get(&(d, sym)).copied()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    /// Inserts a (reduced) difference; returns its index and whether it
    /// was new.
    pub fn insert(&mut self, w: Word) -> (u32, bool) {
        if let Some(&i) = self.index.get(&w) {
            return (i, false);
        }
        let i = self.diffs.len() as u32;
        self.index.insert(w.clone(), i);
        self.diffs.push(w);
        self.inverse_closed = false;
        (i, true)
    }

    pub fn add_transition(&mut self, d: u32, sym: Symbol, target: u32) {
        self.transitions.insert((d, sym), target);
    }

    /// `x^-1 d y` for a padded pair symbol.
    pub fn apply(&self, d: &[Letter], sym: Symbol) -> Word {
        let p = self.pair_alphabet().decode(sym);
        let mut w = Word::with_capacity(d.len() + 2);
        if let Some(x) = p.left {
            w.push(self.alphabet.inverse(x));
        }
        w.extend_from_slice(d);
        if let Some(y) = p.right {
            w.push(y);
        }
        w
    }

    /// Adds the differences of the equation `u = v` (shorter side padded)
    /// and the transitions between them. Returns the number of new
    /// differences.
    pub fn add_equation(&mut self, u: &[Letter], v: &[Letter], reducer: &dyn Reduce) -> usize {
        let pair = self.pair_alphabet();
        let before = self.len();
        let mut current = 0u32;
        for i in 0..u.len().max(v.len()) {
            let sym = pair.pair_symbol(u.get(i).copied(), v.get(i).copied());
            let next = reducer.reduce(&self.apply(&self.diffs[current as usize].clone(), sym));
            let (j, _) = self.insert(next);
            self.add_transition(current, sym, j);
            current = j;
        }
        self.len() - before
    }

    /// Adds the reduced inverse of every difference together with the
    /// mirrored transitions, and marks the set inverse-closed.
    pub fn close_under_inversion(&mut self, reducer: &dyn Reduce) {
        let pair = self.pair_alphabet();
        let n = self.len();
        let mut inv = Vec::with_capacity(n);
        for i in 0..n {
            let w = reducer.reduce(&self.alphabet.invert(&self.diffs[i]));
            inv.push(self.insert(w).0);
        }
        let recorded: Vec<(u32, Symbol, u32)> = self.transitions().collect();
        for (d, sym, t) in recorded {
            if (d as usize) < n && (t as usize) < n {
                let p = pair.decode(sym);
                self.add_transition(inv[d as usize], pair.pair_symbol(p.right, p.left), inv[t as usize]);
            }
        }
        self.inverse_closed = true;
    }

    /// Number of differences the set would have after closing under
    /// inversion, without modifying it.
    pub fn inverse_closed_len(&self, reducer: &dyn Reduce) -> usize {
        let mut extra = std::collections::HashSet::new();
        for d in &self.diffs {
            let w = reducer.reduce(&self.alphabet.invert(d));
            if !self.index.contains_key(&w) {
                extra.insert(w);
            }
        }
        self.len() + extra.len()
    }

    /// Re-reduces every difference, merging those that now coincide, and
    /// remaps recorded transitions. Returns the number of merges.
    pub fn renormalize(&mut self, reducer: &dyn Reduce) -> usize {
        let old = std::mem::take(&mut self.diffs);
        let closed = self.inverse_closed;
        self.index.clear();
        let mut map = Vec::with_capacity(old.len());
        for d in old {
            let r = reducer.reduce(&d);
            map.push(self.insert(r).0);
        }
        debug_assert_eq!(map[0], 0);
        let merges = map.len() - self.diffs.len();
        let transitions = std::mem::take(&mut self.transitions);
        for ((d, sym), t) in transitions {
            self.transitions.insert((map[d as usize], sym), map[t as usize]);
        }
        self.inverse_closed = closed;
        merges
    }

    /// Computes every transition between members of the set: for each
    /// difference and pair symbol, the target is kept when the reduced word
    /// `x^-1 d y` is itself a member.
    pub fn saturate(&mut self, reducer: &dyn Reduce) {
        let nsym = self.pair_alphabet().num_symbols() as Symbol;
        for d in 0..self.len() as u32 {
            for sym in 0..nsym {
                let target = reducer.reduce(&self.apply(&self.diffs[d as usize], sym));
                if let Some(&t) = self.index.get(&target) {
                    self.transitions.insert((d, sym), t);
                }
            }
        }
    }

    /// Adds the (re-reduced) differences and transitions of another set.
    pub fn merge(&mut self, other: &WordDifferenceSet, reducer: &dyn Reduce) {
        let map: Vec<u32> = other.diffs.iter().map(|d| self.insert(reducer.reduce(d)).0).collect();
        for (d, sym, t) in other.transitions() {
            self.add_transition(map[d as usize], sym, map[t as usize]);
        }
    }

    /// Differences whose reduced form is a single letter, with the letter.
    pub fn generator_diffs(&self) -> Vec<(u32, Letter)> {
        (0..self.len() as u32)
            .filter(|&i| self.diffs[i as usize].len() == 1)
            .map(|i| (i, self.diffs[i as usize][0]))
            .collect()
    }
}

/// Word differences of a list of equations.
pub fn extract_word_differences(
    equations: &[(Word, Word)],
    reducer: &dyn Reduce,
    alphabet: Arc<Alphabet>,
) -> WordDifferenceSet {
    let mut wd = WordDifferenceSet::new(alphabet);
    for (u, v) in equations {
        wd.add_equation(u, v, reducer);
    }
    wd
}

/// Copy of `wd` closed under inversion.
pub fn close_under_inversion(wd: &WordDifferenceSet, reducer: &dyn Reduce) -> WordDifferenceSet {
    let mut out = wd.clone();
    out.close_under_inversion(reducer);
    out
}
