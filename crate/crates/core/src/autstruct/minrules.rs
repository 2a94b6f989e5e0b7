use std::collections::{HashMap, VecDeque};

use super::reduce::StructureReducer;
use super::AutomaticStructure;
use crate::error::Result;
use crate::fsa::{explore, minimize_with, Fsa, FsaConfig, State, Symbol};
use crate::kb::{Reduce, WordDifferenceSet};
use crate::words::Letter;

/// Automaton of the minimal confluent rule set, and the word differences
/// those rules use.
#[derive(Debug, Clone)]
pub struct MinimalRules {
    /// Accepts `(u, v)` iff `u` is a minimal reducible word (every proper
    /// subword accepted by W) and `v` is its representative.
    pub fsa: Fsa,
    pub diffs: WordDifferenceSet,
}

// (multiplier state, W state of u without its last letter, W state of u
// without its first letter or NOT_STARTED); ACCEPT ends a rule
type Key = (State, State, State);
const NOT_STARTED: State = 0;
const ACCEPT: Key = (0, 0, 0);

/// Builds the rule automaton by running the multiplier on `(u', v)` where
/// `u = u' x` and requiring the label `x` at the end, while W tracks the
/// prefix and suffix of `u`. Then collects the differences along every
/// accepted pair.
pub fn minimal_rule_acceptor(s: &AutomaticStructure, cfg: &FsaConfig) -> Result<MinimalRules> {
    let w = &s.acceptor;
    let m = &s.multiplier.fsa;
    let pair = m.alphabet().clone();
    let n = pair.base.len() as Letter;
    let rights: Vec<Option<Letter>> = (0..n).map(Some).chain([None]).collect();
    let raw = explore(
        pair.clone(),
        (m.initial(), w.initial(), NOT_STARTED),
        cfg.max_states,
        |&(ms, su, ss): &Key, emit| {
            if (ms, su, ss) == ACCEPT {
                return Ok(());
            }
            for x in 0..n {
                let su2 = w.delta(su, x as Symbol);
                if su2 != 0 {
                    let ss2 = if ss == NOT_STARTED {
                        w.initial()
                    } else {
                        w.delta(ss, x as Symbol)
                    };
                    if ss2 == 0 {
                        continue;
                    }
                    for &y in &rights {
                        let sym = pair.pair_symbol(Some(x), y);
                        let m2 = m.delta(ms, sym);
                        if m2 != 0 {
                            emit(sym, (m2, su2, ss2));
                        }
                    }
                } else {
                    if ss != NOT_STARTED && w.delta(ss, x as Symbol) == 0 {
                        continue;
                    }
                    for &y in &rights {
                        let ok = match y {
                            Some(_) => {
                                let t = m.delta(ms, pair.pair_symbol(None, y));
                                t != 0 && m.label(t).contains(&x)
                            }
                            None => m.label(ms).contains(&x),
                        };
                        if ok {
                            emit(pair.pair_symbol(Some(x), y), ACCEPT);
                        }
                    }
                }
            }
            Ok(())
        },
        |&k| k == ACCEPT,
    )?;
    let fsa = minimize_with(&raw, cfg);
    let reducer = StructureReducer::new(w, &s.machine).with_multiplier(m);
    let diffs = rule_differences(&fsa, &reducer);
    Ok(MinimalRules { fsa, diffs })
}

/// Differences `prefix(u)^-1 prefix(v)` over all accepted pairs, with the
/// transitions between them.
fn rule_differences(rules: &Fsa, reducer: &dyn Reduce) -> WordDifferenceSet {
    let base = rules.alphabet().base.clone();
    let mut wd = WordDifferenceSet::new(base);
    if rules.num_states() == 0 {
        return wd;
    }
    let mut cache: HashMap<(u32, Symbol), u32> = HashMap::new();
    let mut seen: HashMap<(State, u32), ()> = HashMap::new();
    let start = (rules.initial(), 0u32);
    seen.insert(start, ());
    let mut queue = VecDeque::from([start]);
    while let Some((r, d)) = queue.pop_front() {
        for (sym, &t) in rules.row(r).iter().enumerate() {
            if t == 0 {
                continue;
            }
            let sym = sym as Symbol;
            let d2 = match cache.get(&(d, sym)) {
                Some(&d2) => d2,
                None => {
                    let next = reducer.reduce(&wd.apply(wd.word(d), sym));
                    let (d2, _) = wd.insert(next);
                    wd.add_transition(d, sym, d2);
                    cache.insert((d, sym), d2);
                    d2
                }
            };
            if seen.insert((t, d2), ()).is_none() {
                queue.push_back((t, d2));
            }
        }
    }
    wd
}

#[cfg(test)]
mod tests {
    use super::super::synthesize;
    use super::super::StructConfig;
    use super::*;
    use crate::fsa::{enumerate, unpair_word};
    use crate::words::{Alphabet, Presentation};

    fn rule_pairs(s: &AutomaticStructure) -> (MinimalRules, Vec<(String, String)>) {
        let mr = minimal_rule_acceptor(s, &FsaConfig::default()).unwrap();
        let a = &s.presentation.alphabet;
        let mut pairs: Vec<(String, String)> = enumerate(&mr.fsa, 8)
            .iter()
            .map(|w| {
                let (u, v) = unpair_word(mr.fsa.alphabet(), w).unwrap();
                (a.format_word(&u), a.format_word(&v))
            })
            .collect();
        pairs.sort();
        (mr, pairs)
    }

    #[test]
    fn free_cyclic_rules() {
        let a = Alphabet::from_case_pairs(&["a"]).unwrap();
        let p = Presentation::new("z", a, vec![]).unwrap();
        let s = synthesize(&p, &StructConfig::default()).unwrap();
        let (mr, pairs) = rule_pairs(&s);
        let e = crate::words::IDENTITY_NAME.to_string();
        assert_eq!(pairs, vec![("A*a".to_string(), e.clone()), ("a*A".to_string(), e)]);
        let mut d: Vec<String> = mr.diffs.diffs().iter().map(|w| p.alphabet.format_word(w)).collect();
        d.sort();
        assert_eq!(d, vec!["A", "IdWord", "a"]);
    }

    #[test]
    fn free_abelian_rules() {
        let a = Alphabet::from_case_pairs(&["a", "b"]).unwrap();
        let rel = (a.parse_word("b a").unwrap(), a.parse_word("a b").unwrap());
        let p = Presentation::new("z2", a, vec![rel]).unwrap();
        let s = synthesize(&p, &StructConfig::default()).unwrap();
        let (_, pairs) = rule_pairs(&s);
        assert_eq!(pairs.len(), 8);
        let mut expected: Vec<(String, String)> = s
            .rules
            .rules()
            .map(|r| (p.alphabet.format_word(&r.lhs), p.alphabet.format_word(&r.rhs)))
            .collect();
        expected.sort();
        assert_eq!(pairs, expected);
    }
}
