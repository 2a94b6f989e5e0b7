use rayon::prelude::*;

use super::reduce::StructureReducer;
use super::wdm::WordDifferenceMachine;
use crate::error::Result;
use crate::fsa::{complement, exists_project, intersect, shortlex_least_word, Fsa, FsaConfig, Side};
use crate::kb::{Reduce, RuleSet};
use crate::words::{Letter, Word};

/// A letter for which some accepted word has no multiplier partner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckFailure {
    pub letter: Letter,
    /// Shortlex-least accepted word `u` with no `v` such that `(u, v)` is
    /// accepted with label `letter`.
    pub witness: Word,
    /// Reduced form of `u * letter`.
    pub corrected: Word,
    /// Equations whose word differences repair the failure.
    pub equations: Vec<(Word, Word)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckOutcome {
    pub failures: Vec<CheckFailure>,
}

impl CheckOutcome {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For every letter `g`, tests that every word accepted by `w` is the first
/// coordinate of a pair the multiplier accepts with label `g`. Letters are
/// checked in parallel.
pub fn partial_correctness_check(
    w: &Fsa,
    m: &Fsa,
    dm: &WordDifferenceMachine,
    rs: &RuleSet,
    cfg: &FsaConfig,
) -> Result<CheckOutcome> {
    let letters: Vec<Letter> = rs.alphabet().letters().collect();
    let results: Vec<Result<Option<CheckFailure>>> = letters
        .par_iter()
        .map(|&g| {
            let p = exists_project(&m.label_component(g), Side::First, cfg.max_states)?;
            let missing = intersect(w, &complement(&p))?;
            let Some(u) = shortlex_least_word(&missing) else {
                return Ok(None);
            };
            let u: Vec<Letter> = u.into_iter().map(|s| s as Letter).collect();
            Ok(Some(repair(w, dm, rs, u, g)))
        })
        .collect();
    let mut failures = Vec::new();
    for r in results {
        if let Some(f) = r? {
            failures.push(f);
        }
    }
    Ok(CheckOutcome { failures })
}

fn repair(w: &Fsa, dm: &WordDifferenceMachine, rs: &RuleSet, u: Vec<Letter>, g: Letter) -> CheckFailure {
    let reducer = StructureReducer::new(w, dm);
    let mut ug = u.clone();
    ug.push(g);
    let v = reducer.reduce(&rs.rewrite(&ug));
    let u = Word(u);
    let mut equations = vec![(Word(ug), v.clone()), (u.clone(), v.clone())];
    let ru = rs.rewrite(&u);
    if ru != u {
        equations.push((u.clone(), ru));
    }
    log::debug!(
        "check: letter {} fails at {} (product {})",
        rs.alphabet().name(g),
        rs.alphabet().format_word(&u),
        rs.alphabet().format_word(&v)
    );
    CheckFailure {
        letter: g,
        witness: u,
        corrected: v,
        equations,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{build_multiplier, build_wd_machine, build_word_acceptor};
    use super::*;
    use crate::kb::{kb_complete, KbConfig, WordDifferenceSet};
    use crate::words::{Alphabet, Presentation};

    fn z2() -> Presentation {
        let a = Alphabet::from_case_pairs(&["a", "b"]).unwrap();
        let rel = (a.parse_word("b a").unwrap(), a.parse_word("a b").unwrap());
        Presentation::new("z2", a, vec![rel]).unwrap()
    }

    fn run(wd: &WordDifferenceSet, rs: &RuleSet) -> CheckOutcome {
        let cfg = FsaConfig::default();
        let dm = build_wd_machine(wd, rs).unwrap();
        let w = build_word_acceptor(&dm, &cfg).unwrap();
        let m = build_multiplier(&dm, &w, &cfg).unwrap();
        partial_correctness_check(&w, &m.fsa, &dm, rs, &cfg).unwrap()
    }

    #[test]
    fn complete_structure_passes() {
        let r = kb_complete(&z2(), &KbConfig::default());
        let mut wd = r.diffs.clone();
        wd.close_under_inversion(&r.rules);
        wd.saturate(&r.rules);
        assert!(run(&wd, &r.rules).is_ok());
    }

    #[test]
    fn pruned_difference_is_proposed_again() {
        let p = z2();
        let a = p.alphabet.clone();
        let r = kb_complete(&p, &KbConfig::default());
        let ab = a.parse_word("a B").unwrap();
        let mut full = r.diffs.clone();
        full.close_under_inversion(&r.rules);
        let mut pruned = WordDifferenceSet::new(a.clone());
        for d in full.diffs() {
            if *d != ab {
                pruned.insert(d.clone());
            }
        }
        pruned.saturate(&r.rules);
        let out = run(&pruned, &r.rules);
        let f = out
            .failures
            .iter()
            .find(|f| f.letter == a.letter("a").unwrap())
            .expect("letter a fails");
        let mut repaired = pruned.clone();
        for (u, v) in &f.equations {
            repaired.add_equation(u, v, &r.rules);
        }
        assert!(repaired.contains(&ab));
        repaired.close_under_inversion(&r.rules);
        repaired.saturate(&r.rules);
        assert!(run(&repaired, &r.rules).is_ok());
    }
}
