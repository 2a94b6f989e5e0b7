//! Finite-state automata over a single alphabet or a padded pair alphabet.
//!
//! Automata are partial and deterministic. States are numbered from 1, the
//! initial state is always 1 and 0 means "no transition". Internally row 0
//! of the transition table is an all-zero sink row, which lets product
//! constructions treat a missing transition as a move to state 0.
//!
//! Pair symbols encode `(left, right)` as `left * (n + 1) + right`, where
//! `n` is the size of the base alphabet and the index `n` is the padding
//! mark. The excluded symbol `(pad, pad)` is exactly `(n + 1)^2 - 1`, so
//! pair symbols are `0 .. (n + 1)^2 - 1`.

mod analysis;
mod io;
mod minimize;
mod ops;

use std::collections::VecDeque;
use std::path::PathBuf;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter};

pub use analysis::{enumerate, growth_counts, language_count, shortlex_least_word, trace, Count, Trace};
pub use io::{read_fsa, write_fsa, FsaFile};
pub use minimize::{minimize, minimize_table, minimize_with, DiskTable, RowSource, TableSink};
pub use ops::{
    complement, compose, determinize, exists_project, explore, explore_labeled, intersect, language_equal, well_padded,
    Side,
};

pub type State = u32;
pub type Symbol = u32;

/// Accept-state label entry; letters use their index, the identity mark is
/// `IDENTITY_LABEL`.
pub type Label = u16;
pub const IDENTITY_LABEL: Label = Label::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Single,
    Pair,
}

#[derive(Debug, Clone)]
pub struct FsaAlphabet {
    pub kind: Kind,
    pub base: Arc<Alphabet>,
}

impl PartialEq for FsaAlphabet {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && (Arc::ptr_eq(&self.base, &other.base) || self.base == other.base)
    }
}

impl Eq for FsaAlphabet {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PaddedSymbol {
    pub left: Option<Letter>,
    pub right: Option<Letter>,
}

impl FsaAlphabet {
    pub fn single(base: Arc<Alphabet>) -> Self {
        FsaAlphabet {
            kind: Kind::Single,
            base,
        }
    }

    pub fn pair(base: Arc<Alphabet>) -> Self {
        FsaAlphabet { kind: Kind::Pair, base }
    }

    pub fn num_symbols(&self) -> usize {
        let n = self.base.len();
        match self.kind {
            Kind::Single => n,
            Kind::Pair => (n + 1) * (n + 1) - 1,
        }
    }

    pub fn is_pair(&self) -> bool {
        self.kind == Kind::Pair
    }

    pub fn pair_symbol(&self, left: Option<Letter>, right: Option<Letter>) -> Symbol {
        debug_assert!(left.is_some() || right.is_some(), "(pad, pad) is not a symbol");
        let n = self.base.len() as u32;
        let l = left.map_or(n, u32::from);
        let r = right.map_or(n, u32::from);
        l * (n + 1) + r
    }

    pub fn decode(&self, sym: Symbol) -> PaddedSymbol {
        let n = self.base.len() as u32;
        let (l, r) = (sym / (n + 1), sym % (n + 1));
        let side = |x: u32| if x == n { None } else { Some(x as Letter) };
        PaddedSymbol {
            left: side(l),
            right: side(r),
        }
    }

    pub fn symbol_name(&self, sym: Symbol) -> String {
        match self.kind {
            Kind::Single => self.base.name(sym as Letter).to_string(),
            Kind::Pair => {
                let p = self.decode(sym);
                let side = |x: Option<Letter>| x.map_or("_".to_string(), |l| self.base.name(l).to_string());
                format!("{},{}", side(p.left), side(p.right))
            }
        }
    }

    fn same_as(&self, other: &FsaAlphabet, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch(format!(
                "{what}: automata over different alphabets"
            )))
        }
    }
}

/// Resource settings shared by the automaton constructions.
#[derive(Debug, Clone)]
pub struct FsaConfig {
    /// Cap on states produced by subset and product constructions.
    pub max_states: usize,
    /// Estimated transition-table size (bytes) above which minimization
    /// streams the table instead of building inverse transition lists.
    pub external_threshold: usize,
    pub tmp_dir: Option<PathBuf>,
}

impl Default for FsaConfig {
    fn default() -> Self {
        FsaConfig {
            max_states: 1 << 26,
            external_threshold: 1 << 30,
            tmp_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fsa {
    alphabet: FsaAlphabet,
    num_states: usize,
    nsym: usize,
    /// Row `s` holds the targets of state `s`; row 0 is the sink.
    table: Vec<State>,
    accepting: Vec<bool>,
    labels: Option<Vec<Vec<Label>>>,
}

impl Fsa {
    /// Automaton with no states (empty language).
    pub fn empty(alphabet: FsaAlphabet) -> Self {
        let nsym = alphabet.num_symbols();
        Fsa {
            alphabet,
            num_states: 0,
            nsym,
            table: vec![0; nsym],
            accepting: vec![false],
            labels: None,
        }
    }

    /// Builds an automaton from a row-major table of `num_states` rows
    /// (state 1 first). Targets must be in `0..=num_states`.
    pub fn from_rows(
        alphabet: FsaAlphabet,
        num_states: usize,
        rows: Vec<State>,
        accepting: Vec<bool>,
        labels: Option<Vec<Vec<Label>>>,
    ) -> Result<Self> {
        let nsym = alphabet.num_symbols();
        if rows.len() != num_states * nsym || accepting.len() != num_states {
            return Err(Error::parse(0, "transition table has the wrong shape"));
        }
        if rows.iter().any(|&t| t as usize > num_states) {
            return Err(Error::parse(0, "transition target out of range"));
        }
        if let Some(l) = &labels {
            if l.len() != num_states {
                return Err(Error::parse(0, "label table has the wrong shape"));
            }
        }
        let mut table = vec![0; nsym];
        table.extend(rows);
        let mut acc = vec![false];
        acc.extend(accepting);
        let labels = labels.map(|l| {
            let mut v = vec![Vec::new()];
            v.extend(l);
            v
        });
        Ok(Fsa {
            alphabet,
            num_states,
            nsym,
            table,
            accepting: acc,
            labels,
        })
    }

    pub fn alphabet(&self) -> &FsaAlphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_symbols(&self) -> usize {
        self.nsym
    }

    pub fn is_empty_language(&self) -> bool {
        self.num_states == 0 || !self.accepting.iter().any(|&a| a)
    }

    #[inline]
    pub fn delta(&self, s: State, sym: Symbol) -> State {
        self.table[s as usize * self.nsym + sym as usize]
    }

    #[inline]
    pub fn row(&self, s: State) -> &[State] {
        let start = s as usize * self.nsym;
        &self.table[start..start + self.nsym]
    }

    pub fn is_accepting(&self, s: State) -> bool {
        self.accepting[s as usize]
    }

    pub fn all_accepting(&self) -> bool {
        self.accepting[1..].iter().all(|&a| a)
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = State> + '_ {
        (1..=self.num_states as State).filter(|&s| self.accepting[s as usize])
    }

    pub fn labels(&self) -> Option<&[Vec<Label>]> {
        self.labels.as_deref().map(|l| &l[1..])
    }

    pub fn label(&self, s: State) -> &[Label] {
        match &self.labels {
            Some(l) => &l[s as usize],
            None => &[],
        }
    }

    pub fn has_labels(&self) -> bool {
        self.labels.is_some()
    }

    pub fn initial(&self) -> State {
        if self.num_states == 0 {
            0
        } else {
            1
        }
    }

    /// Runs the automaton over a symbol sequence; 0 on failure.
    pub fn run(&self, word: impl IntoIterator<Item = Symbol>) -> State {
        let mut s = self.initial();
        for sym in word {
            if s == 0 {
                return 0;
            }
            s = self.delta(s, sym);
        }
        s
    }

    pub fn accepts(&self, word: impl IntoIterator<Item = Symbol>) -> bool {
        let s = self.run(word);
        s != 0 && self.accepting[s as usize]
    }

    /// Accepts a pair of words, padding the shorter one.
    pub fn accepts_pair(&self, u: &[Letter], v: &[Letter]) -> bool {
        let syms = pair_word(&self.alphabet, u, v);
        self.accepts(syms)
    }

    /// Same automaton with acceptance restricted to states whose label
    /// contains `label`; labels are dropped.
    pub fn label_component(&self, label: Label) -> Fsa {
        let mut accepting = vec![false; self.num_states + 1];
        for s in 1..=self.num_states {
            accepting[s] = self.label(s as State).contains(&label);
        }
        Fsa {
            alphabet: self.alphabet.clone(),
            num_states: self.num_states,
            nsym: self.nsym,
            table: self.table.clone(),
            accepting,
            labels: None,
        }
        .trim()
    }

    pub fn with_accepting(mut self, accepting: impl Fn(State) -> bool) -> Fsa {
        for s in 1..=self.num_states {
            self.accepting[s] = accepting(s as State);
        }
        self
    }

    pub fn without_labels(mut self) -> Fsa {
        self.labels = None;
        self
    }

    /// Returns a copy with a single transition changed (used for fault
    /// injection in tests and tooling).
    pub fn with_transition(&self, s: State, sym: Symbol, target: State) -> Fsa {
        let mut f = self.clone();
        f.table[s as usize * self.nsym + sym as usize] = target;
        f
    }

    /// Returns a copy with one state's label replaced.
    pub fn with_label(&self, s: State, label: Vec<Label>) -> Fsa {
        let mut f = self.clone();
        let n = f.num_states;
        let labels = f.labels.get_or_insert_with(|| vec![Vec::new(); n + 1]);
        labels[s as usize] = label;
        f.accepting[s as usize] = !labels[s as usize].is_empty();
        f
    }

    /// Keeps states that are reachable from the initial state and can reach
    /// an accepting state, renumbered breadth-first in symbol order.
    pub fn trim(&self) -> Fsa {
        let n = self.num_states;
        if n == 0 {
            return Fsa::empty(self.alphabet.clone());
        }
        // co-reachability via reverse edges
        let mut rev_count = vec![0u32; n + 2];
        for s in 1..=n {
            for &t in self.row(s as State) {
                if t != 0 {
                    rev_count[t as usize + 1] += 1;
                }
            }
        }
        for i in 1..rev_count.len() {
            rev_count[i] += rev_count[i - 1];
        }
        let mut rev = vec![0 as State; rev_count[n + 1] as usize];
        let mut fill = rev_count.clone();
        for s in 1..=n {
            for &t in self.row(s as State) {
                if t != 0 {
                    rev[fill[t as usize] as usize] = s as State;
                    fill[t as usize] += 1;
                }
            }
        }
        let mut live = vec![false; n + 1];
        let mut stack: Vec<State> = (1..=n as State).filter(|&s| self.accepting[s as usize]).collect();
        for &s in &stack {
            live[s as usize] = true;
        }
        while let Some(t) = stack.pop() {
            for &s in &rev[rev_count[t as usize] as usize..rev_count[t as usize + 1] as usize] {
                if !live[s as usize] {
                    live[s as usize] = true;
                    stack.push(s);
                }
            }
        }
        if !live[1] {
            return Fsa::empty(self.alphabet.clone());
        }
        self.renumber_bfs(|s| live[s as usize])
    }

    /// Breadth-first renumbering from state 1 over states allowed by `keep`.
    fn renumber_bfs(&self, keep: impl Fn(State) -> bool) -> Fsa {
        let n = self.num_states;
        let mut new_id = vec![0 as State; n + 1];
        let mut order: Vec<State> = vec![1];
        new_id[1] = 1;
        let mut queue = VecDeque::from([1 as State]);
        while let Some(s) = queue.pop_front() {
            for &t in self.row(s) {
                if t != 0 && keep(t) && new_id[t as usize] == 0 {
                    order.push(t);
                    new_id[t as usize] = order.len() as State;
                    queue.push_back(t);
                }
            }
        }
        let m = order.len();
        let mut table = vec![0; (m + 1) * self.nsym];
        let mut accepting = vec![false; m + 1];
        let mut labels = self.labels.as_ref().map(|_| vec![Vec::new(); m + 1]);
        for (i, &old) in order.iter().enumerate() {
            let ns = i + 1;
            for (sym, &t) in self.row(old).iter().enumerate() {
                table[ns * self.nsym + sym] = new_id[t as usize];
            }
            accepting[ns] = self.accepting[old as usize];
            if let (Some(dst), Some(src)) = (labels.as_mut(), self.labels.as_ref()) {
                dst[ns] = src[old as usize].clone();
            }
        }
        Fsa {
            alphabet: self.alphabet.clone(),
            num_states: m,
            nsym: self.nsym,
            table,
            accepting,
            labels,
        }
    }

    /// The transition table rows for states 1..=n.
    pub fn rows(&self) -> &[State] {
        &self.table[self.nsym..]
    }
}

/// Encodes a pair of words as a padded symbol sequence.
pub fn pair_word(alphabet: &FsaAlphabet, u: &[Letter], v: &[Letter]) -> Vec<Symbol> {
    let len = u.len().max(v.len());
    (0..len)
        .map(|i| alphabet.pair_symbol(u.get(i).copied(), v.get(i).copied()))
        .collect()
}

/// Splits a padded symbol sequence back into its two words; `None` when
/// the padding is malformed.
pub fn unpair_word(alphabet: &FsaAlphabet, syms: &[Symbol]) -> Option<(Vec<Letter>, Vec<Letter>)> {
    let (mut u, mut v) = (Vec::new(), Vec::new());
    let (mut u_done, mut v_done) = (false, false);
    for &sym in syms {
        let p = alphabet.decode(sym);
        match p.left {
            Some(x) if !u_done => u.push(x),
            Some(_) => return None,
            None => u_done = true,
        }
        match p.right {
            Some(y) if !v_done => v.push(y),
            Some(_) => return None,
            None => v_done = true,
        }
    }
    Some((u, v))
}

/// Nondeterministic automaton without epsilon moves.
#[derive(Debug, Clone)]
pub struct Nfa {
    pub alphabet: FsaAlphabet,
    pub num_states: usize,
    pub initial: Vec<State>,
    pub accepting: Vec<bool>,
    /// `transitions[s]` lists `(symbol, target)` pairs; index 0 unused.
    pub transitions: Vec<Vec<(Symbol, State)>>,
}

impl Nfa {
    pub fn new(alphabet: FsaAlphabet, num_states: usize) -> Self {
        Nfa {
            alphabet,
            num_states,
            initial: Vec::new(),
            accepting: vec![false; num_states + 1],
            transitions: vec![Vec::new(); num_states + 1],
        }
    }

    pub fn add_transition(&mut self, s: State, sym: Symbol, t: State) {
        let list = &mut self.transitions[s as usize];
        if !list.contains(&(sym, t)) {
            list.push((sym, t));
        }
    }

    /// Membership by direct simulation of the state set.
    pub fn accepts(&self, word: &[Symbol]) -> bool {
        let mut current: Vec<State> = self.initial.clone();
        for &sym in word {
            let mut next: Vec<State> = current
                .iter()
                .flat_map(|&s| {
                    self.transitions[s as usize]
                        .iter()
                        .filter(move |&&(a, _)| a == sym)
                        .map(|&(_, t)| t)
                })
                .collect();
            next.sort_unstable();
            next.dedup();
            if next.is_empty() {
                return false;
            }
            current = next;
        }
        current.iter().any(|&s| self.accepting[s as usize])
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    pub fn unary() -> Arc<Alphabet> {
        Arc::new(Alphabet::new(vec!["a".into()], vec![0]).unwrap())
    }

    pub fn a_inv() -> Arc<Alphabet> {
        Arc::new(Alphabet::from_case_pairs(&["a"]).unwrap())
    }

    /// Builds a single-alphabet automaton from `(from, symbol, to)` triples.
    pub fn build(base: &Arc<Alphabet>, n: usize, edges: &[(State, Symbol, State)], accepting: &[State]) -> Fsa {
        let alpha = FsaAlphabet::single(base.clone());
        let nsym = alpha.num_symbols();
        let mut rows = vec![0; n * nsym];
        for &(s, a, t) in edges {
            rows[(s as usize - 1) * nsym + a as usize] = t;
        }
        let acc = (1..=n as State).map(|s| accepting.contains(&s)).collect();
        Fsa::from_rows(alpha, n, rows, acc, None).unwrap()
    }
}
