use crate::error::{Error, Result};
use crate::fsa::{Fsa, Label, State, Symbol, IDENTITY_LABEL};
use crate::kb::{Reduce, WordDifferenceSet};
use crate::words::Letter;

/// Padded-pair automaton whose states are word differences: state `i + 1`
/// is difference `i`, state 1 is the identity. The identity state is the
/// only accepting one, so the machine accepts pairs it can show equal.
/// State labels hold the difference words (the identity as the identity
/// mark).
#[derive(Debug, Clone)]
pub struct WordDifferenceMachine {
    fsa: Fsa,
    diffs: WordDifferenceSet,
    generator_labels: Vec<Vec<Label>>,
}

impl WordDifferenceMachine {
    pub fn fsa(&self) -> &Fsa {
        &self.fsa
    }

    pub fn diffs(&self) -> &WordDifferenceSet {
        &self.diffs
    }

    pub fn num_diffs(&self) -> usize {
        self.diffs.len()
    }

    /// Target difference of `d` on a pair symbol.
    #[inline]
    pub fn delta(&self, d: u32, sym: Symbol) -> Option<u32> {
        match self.fsa.delta(d + 1, sym) {
            0 => None,
            t => Some(t - 1),
        }
    }

    /// Letters `g` whose reduced form is difference `d`, plus the identity
    /// mark for the identity difference.
    pub fn generator_labels(&self, d: u32) -> &[Label] {
        &self.generator_labels[d as usize]
    }

    pub fn state_of(d: u32) -> State {
        d + 1
    }
}

/// One state per difference, with the difference set's recorded
/// transitions. `reducer` decides which differences stand for generators.
pub fn build_wd_machine(wd: &WordDifferenceSet, reducer: &dyn Reduce) -> Result<WordDifferenceMachine> {
    let alphabet = wd.pair_alphabet();
    let n = wd.len();
    let nsym = alphabet.num_symbols();
    let mut rows = vec![0 as State; n * nsym];
    for (d, sym, t) in wd.transitions() {
        if t as usize >= n || d as usize >= n {
            return Err(Error::UnclosedDifferenceSet(format!(
                "{d} --{sym}--> {t} with {n} differences"
            )));
        }
        rows[d as usize * nsym + sym as usize] = t + 1;
    }
    let mut accepting = vec![false; n];
    accepting[0] = true;
    let labels: Vec<Vec<Label>> = wd
        .diffs()
        .iter()
        .map(|w| if w.is_empty() { vec![IDENTITY_LABEL] } else { w.to_vec() })
        .collect();
    let fsa = Fsa::from_rows(alphabet, n, rows, accepting, Some(labels))?;

    let base = wd.alphabet();
    let mut generator_labels = vec![Vec::new(); n];
    generator_labels[0].push(IDENTITY_LABEL);
    for g in base.letters() {
        let r = reducer.reduce(&[g as Letter]);
        if let Some(d) = wd.index_of(&r) {
            generator_labels[d as usize].push(g);
        }
    }
    for l in &mut generator_labels {
        l.sort_unstable();
    }
    Ok(WordDifferenceMachine {
        fsa,
        diffs: wd.clone(),
        generator_labels,
    })
}

/// Rebuilds a machine from a machine file read back from disk.
pub fn wd_machine_from_fsa(fsa: Fsa, reducer: &dyn Reduce) -> Result<WordDifferenceMachine> {
    let base = fsa.alphabet().base.clone();
    let mut wd = WordDifferenceSet::new(base);
    let n = fsa.num_states();
    if n == 0 || fsa.label(1) != [IDENTITY_LABEL] {
        return Err(Error::UnclosedDifferenceSet(
            "state 1 must be the identity difference".into(),
        ));
    }
    for s in 2..=n as State {
        let word: Vec<Letter> = fsa.label(s).to_vec();
        let (i, fresh) = wd.insert(word.into());
        if !fresh || i != s - 1 {
            return Err(Error::UnclosedDifferenceSet(format!(
                "duplicate difference at state {s}"
            )));
        }
    }
    for s in 1..=n as State {
        for (sym, &t) in fsa.row(s).iter().enumerate() {
            if t != 0 {
                wd.add_transition(s - 1, sym as Symbol, t - 1);
            }
        }
    }
    build_wd_machine(&wd, reducer)
}
