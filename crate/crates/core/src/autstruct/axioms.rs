use rayon::prelude::*;

use super::{diagonal, AutomaticStructure};
use crate::error::Result;
use crate::fsa::{compose, explore, language_equal, Fsa, FsaConfig, State, Symbol, IDENTITY_LABEL};
use crate::words::{Letter, Word};

/// Result of comparing the two composites of one relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomOutcome {
    pub lhs: Word,
    pub rhs: Word,
    pub holds: bool,
}

/// True iff every relation (including `x X = 1` for each letter) gives
/// language-equal composites of multiplier components, the identity
/// component is the diagonal of the acceptor, and every component accepts
/// only pairs of accepted words.
pub fn axiom_check(s: &AutomaticStructure, cfg: &FsaConfig) -> Result<bool> {
    Ok(axiom_report(s, cfg)?.iter().all(|o| o.holds))
}

/// Per-relation results of the axiom check. The first entry (both sides
/// empty) covers the diagonal and domain conditions.
pub fn axiom_report(s: &AutomaticStructure, cfg: &FsaConfig) -> Result<Vec<AxiomOutcome>> {
    let alphabet = &s.presentation.alphabet;
    let mut components: Vec<Fsa> = alphabet
        .letters()
        .map(|g| s.multiplier.fsa.label_component(g))
        .collect();
    components.push(s.multiplier.fsa.label_component(IDENTITY_LABEL));
    let identity = components.len() - 1;

    let mut relations: Vec<(Word, Word)> = s.presentation.relations.clone();
    for x in alphabet.letters() {
        relations.push((Word(vec![x, alphabet.inverse(x)]), Word::new()));
    }

    let diag_ok = language_equal(&components[identity], &diagonal(&s.acceptor))?;
    if !diag_ok {
        log::warn!("axioms: identity multiplier is not the diagonal of the acceptor");
    }
    let domain: Vec<Result<bool>> = components
        .par_iter()
        .map(|m| within_acceptor(m, &s.acceptor, cfg.max_states))
        .collect();
    let mut domain_ok = true;
    for (i, ok) in domain.into_iter().enumerate() {
        if !ok? {
            domain_ok = false;
            let name = if i == identity {
                crate::words::IDENTITY_NAME.to_string()
            } else {
                alphabet.name(i as Letter).to_string()
            };
            log::warn!("axioms: multiplier component {name} accepts pairs outside the acceptor's language");
        }
    }
    let mut out = vec![AxiomOutcome {
        lhs: Word::new(),
        rhs: Word::new(),
        holds: diag_ok && domain_ok,
    }];

    let composite = |w: &[Letter]| -> Result<Fsa> {
        let Some((&first, rest)) = w.split_first() else {
            return Ok(components[identity].clone());
        };
        let mut acc = components[first as usize].clone();
        for &g in rest {
            acc = compose(&acc, &components[g as usize], cfg.max_states)?;
        }
        Ok(acc)
    };
    let results: Vec<Result<AxiomOutcome>> = relations
        .par_iter()
        .map(|(l, r)| {
            let holds = language_equal(&composite(l)?, &composite(r)?)?;
            if !holds {
                log::warn!(
                    "axioms: relation {} = {} fails",
                    alphabet.format_word(l),
                    alphabet.format_word(r)
                );
            }
            Ok(AxiomOutcome {
                lhs: l.clone(),
                rhs: r.clone(),
                holds,
            })
        })
        .collect();
    for r in results {
        out.push(r?);
    }
    Ok(out)
}

/// True iff every pair accepted by the trimmed pair automaton `m` is
/// well padded with both components accepted by `w`. Runs `m` alongside two
/// copies of `w`; a transition of `m` that `w` cannot follow is a
/// counterexample because every state of `m` can reach acceptance.
fn within_acceptor(m: &Fsa, w: &Fsa, max_states: usize) -> Result<bool> {
    const ENDED: State = 0;
    if m.num_states() == 0 {
        return Ok(true);
    }
    if w.num_states() == 0 {
        return Ok(false);
    }
    let pair = m.alphabet().clone();
    let side = |s: State, x: Option<Letter>| -> Option<State> {
        match x {
            Some(x) if s != ENDED => Some(w.delta(s, x as Symbol)).filter(|&t| t != 0),
            Some(_) => None,
            None => (s == ENDED || w.is_accepting(s)).then_some(ENDED),
        }
    };
    let done = |s: State| s == ENDED || w.is_accepting(s);
    let mut ok = true;
    explore(
        pair.clone(),
        (m.initial(), w.initial(), w.initial()),
        max_states,
        |&(q, a, b), emit| {
            if m.is_accepting(q) && !(done(a) && done(b)) {
                ok = false;
            }
            for (sym, &t) in m.row(q).iter().enumerate() {
                if t == 0 {
                    continue;
                }
                let p = pair.decode(sym as Symbol);
                match (side(a, p.left), side(b, p.right)) {
                    (Some(a2), Some(b2)) if ok => emit(sym as Symbol, (t, a2, b2)),
                    _ => ok = false,
                }
            }
            Ok(())
        },
        |_| false,
    )?;
    Ok(ok)
}
