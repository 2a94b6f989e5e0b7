use std::cmp::Ordering;

use super::wdm::WordDifferenceMachine;
use crate::error::Result;
use crate::fsa::{explore, minimize_with, Fsa, FsaAlphabet, FsaConfig, Symbol};
use crate::words::{Letter, Word};

// Comparison status of the guessed word v against the word w being read.
// For a fixed difference LESS dominates every other status and EQUAL
// dominates GREATER; PADDED is only dominated by LESS.
const LESS: u8 = 0;
const EQUAL: u8 = 1;
const GREATER: u8 = 2;
const PADDED: u8 = 3;

type Subset = Vec<(u32, u8)>;

/// Drops dominated entries from a list sorted by (difference, status).
fn prune<T>(v: &mut Vec<T>, key: impl Fn(&T) -> (u32, u8)) {
    let mut prev: Option<(u32, u8)> = None;
    v.retain(|e| {
        let (d, st) = key(e);
        let keep = match prev {
            Some((pd, ps)) if pd == d => ps != LESS && st == PADDED && ps != PADDED,
            _ => true,
        };
        if keep {
            prev = Some((d, st));
        }
        keep
    });
}

/// Writes the successor of a subset on reading `y` into `next`. Returns
/// false when some guessed `v <shortlex w` has been shown equal to the
/// prefix read, i.e. the prefix is reducible.
fn step(dm: &WordDifferenceMachine, n: usize, subset: &[(u32, u8)], y: Letter, next: &mut Vec<(u32, u8)>) -> bool {
    let pair = dm.fsa().alphabet();
    next.clear();
    for &(d, st) in subset {
        if st != PADDED {
            for x in 0..n as Letter {
                if let Some(t) = dm.delta(d, pair.pair_symbol(Some(x), Some(y))) {
                    let st2 = if st == EQUAL {
                        match x.cmp(&y) {
                            Ordering::Less => LESS,
                            Ordering::Equal => EQUAL,
                            Ordering::Greater => GREATER,
                        }
                    } else {
                        st
                    };
                    next.push((t, st2));
                }
            }
        }
        if let Some(t) = dm.delta(d, pair.pair_symbol(None, Some(y))) {
            next.push((t, PADDED));
        }
    }
    next.sort_unstable();
    prune(next, |e| (e.0, e.1));
    !next
        .iter()
        .take_while(|e| e.0 == 0)
        .any(|&(_, st)| st == LESS || st == PADDED)
}

/// Word acceptor: accepts `w` iff the difference machine cannot exhibit a
/// `v <shortlex w` equal to `w`. Built by a subset construction that
/// guesses `v` while reading `w`, then minimized. All states accept.
pub fn build_word_acceptor(dm: &WordDifferenceMachine, cfg: &FsaConfig) -> Result<Fsa> {
    let base = dm.diffs().alphabet().clone();
    let n = base.len();
    let alphabet = FsaAlphabet::single(base);
    let start: Subset = vec![(0, EQUAL)];
    let mut next = Vec::new();
    let raw = explore(
        alphabet,
        start,
        cfg.max_states,
        |subset: &Subset, emit| {
            for y in 0..n as Letter {
                if step(dm, n, subset, y, &mut next) {
                    emit(y as Symbol, next.clone());
                }
            }
            Ok(())
        },
        |_| true,
    )?;
    log::debug!("word acceptor: {} states before minimization", raw.num_states());
    Ok(minimize_with(&raw, cfg))
}

/// For a word `p` rejected by the acceptor built from `dm`, returns a
/// shorter-or-lex-smaller word equal to it, found by the same guessing
/// process with back pointers. `None` when `p` is not rejected.
pub fn smaller_equivalent(dm: &WordDifferenceMachine, p: &[Letter]) -> Option<Word> {
    let n = dm.diffs().alphabet().len();
    let pair = dm.fsa().alphabet();
    // layer entries: (diff, status, parent index, guessed letter)
    let mut layers: Vec<Vec<(u32, u8, u32, Option<Letter>)>> = vec![vec![(0, EQUAL, 0, None)]];
    for &y in p {
        let prev = layers.last().expect("non-empty");
        let mut next: Vec<(u32, u8, u32, Option<Letter>)> = Vec::new();
        for (pi, &(d, st, _, _)) in prev.iter().enumerate() {
            if st != PADDED {
                for x in 0..n as Letter {
                    if let Some(t) = dm.delta(d, pair.pair_symbol(Some(x), Some(y))) {
                        let st2 = if st == EQUAL {
                            match x.cmp(&y) {
                                Ordering::Less => LESS,
                                Ordering::Equal => EQUAL,
                                Ordering::Greater => GREATER,
                            }
                        } else {
                            st
                        };
                        next.push((t, st2, pi as u32, Some(x)));
                    }
                }
            }
            if let Some(t) = dm.delta(d, pair.pair_symbol(None, Some(y))) {
                next.push((t, PADDED, pi as u32, None));
            }
        }
        next.sort_by_key(|e| (e.0, e.1));
        prune(&mut next, |e| (e.0, e.1));
        let found = next
            .iter()
            .take_while(|e| e.0 == 0)
            .position(|&(_, st, _, _)| st == LESS || st == PADDED);
        layers.push(next);
        if let Some(mut idx) = found {
            let mut v = Vec::new();
            for l in (1..layers.len()).rev() {
                let (_, _, parent, x) = layers[l][idx];
                if let Some(x) = x {
                    v.push(x);
                }
                idx = parent as usize;
            }
            v.reverse();
            return Some(Word(v));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::super::wdm::build_wd_machine;
    use super::*;
    use crate::fsa::{enumerate, language_count, Count};
    use crate::kb::{kb_complete, KbConfig, Reduce, WordDifferenceSet};
    use crate::words::{Alphabet, Presentation};

    fn machine(p: &Presentation) -> (WordDifferenceMachine, crate::kb::RuleSet) {
        let r = kb_complete(p, &KbConfig::default());
        let mut wd: WordDifferenceSet = r.diffs.clone();
        wd.close_under_inversion(&r.rules);
        wd.saturate(&r.rules);
        (build_wd_machine(&wd, &r.rules).unwrap(), r.rules)
    }

    #[test]
    fn free_cyclic_acceptor() {
        let a = Alphabet::from_case_pairs(&["a"]).unwrap();
        let p = Presentation::new("z", a, vec![]).unwrap();
        let (dm, _) = machine(&p);
        let w = build_word_acceptor(&dm, &FsaConfig::default()).unwrap();
        assert_eq!(w.num_states(), 3);
        assert!(w.all_accepting());
        assert_eq!(enumerate(&w, 2), vec![vec![], vec![0], vec![1], vec![0, 0], vec![1, 1]]);
    }

    #[test]
    fn free_abelian_acceptor() {
        let a = Alphabet::from_case_pairs(&["a", "b"]).unwrap();
        let rel = (a.parse_word("b a").unwrap(), a.parse_word("a b").unwrap());
        let p = Presentation::new("z2", a, vec![rel]).unwrap();
        let (dm, _) = machine(&p);
        let w = build_word_acceptor(&dm, &FsaConfig::default()).unwrap();
        assert_eq!(w.num_states(), 5);
        assert_eq!(language_count(&w), Count::Infinite);
        // (a*|A*)(b*|B*)
        assert!(w.accepts([0, 0, 2, 2]));
        assert!(w.accepts([1, 3]));
        assert!(!w.accepts([2, 0]));
        assert!(!w.accepts([0, 1]));
    }

    #[test]
    fn smaller_equivalent_finds_reduction() {
        let a = Alphabet::from_case_pairs(&["a", "b"]).unwrap();
        let rel = (a.parse_word("b a").unwrap(), a.parse_word("a b").unwrap());
        let p = Presentation::new("z2", a.clone(), vec![rel]).unwrap();
        let (dm, rules) = machine(&p);
        let w = a.parse_word("b a").unwrap();
        let v = smaller_equivalent(&dm, &w).unwrap();
        assert_eq!(v, a.parse_word("a b").unwrap());
        let w = a.parse_word("a A").unwrap();
        assert_eq!(smaller_equivalent(&dm, &w).unwrap(), Word::new());
        assert_eq!(smaller_equivalent(&dm, &a.parse_word("a b").unwrap()), None);
        assert_eq!(rules.reduce(&v), v);
    }
}
