use super::acceptor::smaller_equivalent;
use super::wdm::WordDifferenceMachine;
use crate::fsa::{Fsa, Label, State, Symbol};
use crate::kb::Reduce;
use crate::words::{Letter, Word};

/// Reduction to W-accepted representatives: the shortest rejected prefix is
/// replaced by a smaller equal word found through the difference machine,
/// until W accepts. When the machine finds nothing and a multiplier is
/// available, the word is rebuilt letter by letter through the multiplier.
#[derive(Clone, Copy)]
pub struct StructureReducer<'a> {
    pub acceptor: &'a Fsa,
    pub machine: &'a WordDifferenceMachine,
    pub multiplier: Option<&'a Fsa>,
}

impl<'a> StructureReducer<'a> {
    pub fn new(acceptor: &'a Fsa, machine: &'a WordDifferenceMachine) -> Self {
        StructureReducer {
            acceptor,
            machine,
            multiplier: None,
        }
    }

    pub fn with_multiplier(mut self, m: &'a Fsa) -> Self {
        self.multiplier = Some(m);
        self
    }

    /// Length of the shortest prefix W rejects, if any.
    fn rejected_prefix(&self, w: &[Letter]) -> Option<usize> {
        let mut s = self.acceptor.initial();
        if s == 0 {
            return Some(0);
        }
        for (i, &x) in w.iter().enumerate() {
            s = self.acceptor.delta(s, x as Symbol);
            if s == 0 || !self.acceptor.is_accepting(s) {
                return Some(i + 1);
            }
        }
        None
    }

    /// The W-accepted word equal to `w`, or `None` when neither the
    /// difference machine nor the multiplier can produce it.
    pub fn try_reduce(&self, w: &[Letter]) -> Option<Word> {
        let mut word = w.to_vec();
        while let Some(k) = self.rejected_prefix(&word) {
            match smaller_equivalent(self.machine, &word[..k]) {
                Some(v) => {
                    let mut next = v.into_inner();
                    next.extend_from_slice(&word[k..]);
                    word = next;
                }
                None => {
                    let m = self.multiplier?;
                    let mut v = Word::new();
                    for &g in &word {
                        v = multiply_right(m, &v, g)?;
                    }
                    return Some(v);
                }
            }
        }
        Some(Word(word))
    }
}

impl Reduce for StructureReducer<'_> {
    fn reduce(&self, w: &[Letter]) -> Word {
        match self.try_reduce(w) {
            Some(v) => v,
            None => {
                log::warn!("structure could not reduce a word of length {}", w.len());
                Word(w.to_vec())
            }
        }
    }
}

/// The word `w` with `(v, w)` accepted by the multiplier at a state labeled
/// `g`, found by a layered search over the multiplier reading `v` on the
/// left.
pub fn multiply_right(m: &Fsa, v: &[Letter], g: Label) -> Option<Word> {
    if m.num_states() == 0 {
        return None;
    }
    let alphabet = m.alphabet();
    let n = alphabet.base.len() as Letter;
    // per layer: state -> (parent index, right letter)
    let mut layers: Vec<Vec<(State, usize, Option<Letter>)>> = vec![vec![(m.initial(), 0, None)]];
    let mut seen = vec![u32::MAX; m.num_states() + 1];
    let rights: Vec<Option<Letter>> = (0..n).map(Some).chain([None]).collect();
    for (i, left) in v.iter().map(|&x| Some(x)).chain([None]).enumerate() {
        let prev = &layers[i];
        let mut next = Vec::new();
        for (pi, &(s, _, _)) in prev.iter().enumerate() {
            for &y in &rights {
                if left.is_none() && y.is_none() {
                    continue;
                }
                let t = m.delta(s, alphabet.pair_symbol(left, y));
                if t != 0 && seen[t as usize] != i as u32 {
                    seen[t as usize] = i as u32;
                    next.push((t, pi, y));
                }
            }
        }
        layers.push(next);
    }
    // accepted after |v| symbols, or after one extra (pad, y)
    for l in [v.len(), v.len() + 1] {
        if let Some(idx) = layers[l].iter().position(|&(s, _, _)| m.label(s).contains(&g)) {
            let mut w = Vec::new();
            let mut idx = idx;
            for layer in (1..=l).rev() {
                let (_, parent, y) = layers[layer][idx];
                if let Some(y) = y {
                    w.push(y);
                }
                idx = parent;
            }
            w.reverse();
            return Some(Word(w));
        }
    }
    None
}
