use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use super::{Fsa, FsaAlphabet, Kind, Label, Nfa, State, Symbol};
use crate::error::{Error, Result};
use crate::words::Letter;

/// Breadth-first construction of a deterministic automaton whose states are
/// keys. `step` reports the defined transitions of a key through `emit`;
/// `accept` decides acceptance. The result is numbered in discovery order
/// and is not trimmed.
pub fn explore<K, F, A>(alphabet: FsaAlphabet, start: K, max_states: usize, mut step: F, mut accept: A) -> Result<Fsa>
where
    K: Hash + Eq + Clone,
    F: FnMut(&K, &mut dyn FnMut(Symbol, K)) -> Result<()>,
    A: FnMut(&K) -> bool,
{
    let out = explore_inner(
        alphabet,
        start,
        max_states,
        &mut step,
        &mut |k: &K| (accept(k), Vec::new()),
        false,
    )?;
    Ok(out)
}

/// As [`explore`], with a label per state. A state is accepting iff its
/// label is non-empty or `label` says so.
pub fn explore_labeled<K, F, L>(
    alphabet: FsaAlphabet,
    start: K,
    max_states: usize,
    mut step: F,
    mut label: L,
) -> Result<Fsa>
where
    K: Hash + Eq + Clone,
    F: FnMut(&K, &mut dyn FnMut(Symbol, K)) -> Result<()>,
    L: FnMut(&K) -> (bool, Vec<Label>),
{
    explore_inner(alphabet, start, max_states, &mut step, &mut label, true)
}

fn explore_inner<K, F, L>(
    alphabet: FsaAlphabet,
    start: K,
    max_states: usize,
    step: &mut F,
    label: &mut L,
    keep_labels: bool,
) -> Result<Fsa>
where
    K: Hash + Eq + Clone,
    F: FnMut(&K, &mut dyn FnMut(Symbol, K)) -> Result<()>,
    L: FnMut(&K) -> (bool, Vec<Label>),
{
    let nsym = alphabet.num_symbols();
    let mut ids: HashMap<K, State> = HashMap::new();
    let mut keys: Vec<K> = vec![start.clone()];
    ids.insert(start, 1);
    let mut rows: Vec<State> = Vec::new();
    let mut accepting = Vec::new();
    let mut labels = Vec::new();
    let mut i = 0;
    let mut overflow = false;
    while i < keys.len() {
        let key = keys[i].clone();
        let base = rows.len();
        rows.resize(base + nsym, 0);
        let mut emit = |sym: Symbol, target: K| {
            let id = match ids.get(&target) {
                Some(&id) => id,
                None => {
                    if keys.len() >= max_states {
                        overflow = true;
                        return;
                    }
                    keys.push(target.clone());
                    let id = keys.len() as State;
                    ids.insert(target, id);
                    id
                }
            };
            rows[base + sym as usize] = id;
        };
        step(&key, &mut emit)?;
        if overflow {
            return Err(Error::Budget {
                what: "automaton state count",
                limit: max_states,
            });
        }
        let (acc, lab) = label(&key);
        accepting.push(acc || !lab.is_empty());
        if keep_labels {
            labels.push(lab);
        }
        i += 1;
    }
    let n = keys.len();
    Fsa::from_rows(
        alphabet,
        n,
        rows,
        accepting,
        if keep_labels { Some(labels) } else { None },
    )
}

/// Subset construction over the reachable subsets, followed by a trim.
pub fn determinize(nfa: &Nfa, max_states: usize) -> Result<Fsa> {
    let nsym = nfa.alphabet.num_symbols();
    let mut start = nfa.initial.clone();
    start.sort_unstable();
    start.dedup();
    if start.is_empty() {
        return Ok(Fsa::empty(nfa.alphabet.clone()));
    }
    let mut buckets: Vec<Vec<State>> = vec![Vec::new(); nsym];
    let f = explore(
        nfa.alphabet.clone(),
        start,
        max_states,
        |subset: &Vec<State>, emit| {
            for b in buckets.iter_mut() {
                b.clear();
            }
            for &s in subset {
                for &(a, t) in &nfa.transitions[s as usize] {
                    buckets[a as usize].push(t);
                }
            }
            for (a, b) in buckets.iter_mut().enumerate() {
                if !b.is_empty() {
                    b.sort_unstable();
                    b.dedup();
                    emit(a as Symbol, b.clone());
                }
            }
            Ok(())
        },
        |subset| subset.iter().any(|&s| nfa.accepting[s as usize]),
    )?;
    Ok(f.trim())
}

/// Automaton accepting every well-padded pair word over the alphabet.
pub fn well_padded(alphabet: &FsaAlphabet) -> Fsa {
    assert!(alphabet.is_pair());
    explore(
        alphabet.clone(),
        0u8,
        4,
        |&status, emit| {
            for sym in 0..alphabet.num_symbols() as Symbol {
                if let Some(next) = pad_step(alphabet, status, sym) {
                    emit(sym, next);
                }
            }
            Ok(())
        },
        |_| true,
    )
    .expect("three states")
}

/// Padding status: 0 neither side ended, 1 left ended, 2 right ended.
fn pad_step(alphabet: &FsaAlphabet, status: u8, sym: Symbol) -> Option<u8> {
    let p = alphabet.decode(sym);
    match (status, p.left, p.right) {
        (0, Some(_), Some(_)) => Some(0),
        (0 | 1, None, Some(_)) => Some(1),
        (0 | 2, Some(_), None) => Some(2),
        _ => None,
    }
}

/// Language complement; for pair alphabets relative to well-padded words.
pub fn complement(f: &Fsa) -> Fsa {
    let alphabet = f.alphabet().clone();
    let pair = alphabet.is_pair();
    let nsym = alphabet.num_symbols() as Symbol;
    explore(
        alphabet.clone(),
        (f.initial(), 0u8),
        usize::MAX,
        |&(s, status), emit| {
            for sym in 0..nsym {
                let next_status = if pair {
                    match pad_step(&alphabet, status, sym) {
                        Some(st) => st,
                        None => continue,
                    }
                } else {
                    0
                };
                let t = if s == 0 { 0 } else { f.delta(s, sym) };
                emit(sym, (t, next_status));
            }
            Ok(())
        },
        |&(s, _)| s == 0 || !f.is_accepting(s),
    )
    .expect("complement is bounded by the input size")
    .trim()
}

/// Product automaton accepting the intersection.
pub fn intersect(f: &Fsa, g: &Fsa) -> Result<Fsa> {
    f.alphabet().same_as(g.alphabet(), "intersect")?;
    if f.num_states() == 0 || g.num_states() == 0 {
        return Ok(Fsa::empty(f.alphabet().clone()));
    }
    let nsym = f.num_symbols() as Symbol;
    let out = explore(
        f.alphabet().clone(),
        (1 as State, 1 as State),
        usize::MAX,
        |&(s, t), emit| {
            for sym in 0..nsym {
                let (a, b) = (f.delta(s, sym), g.delta(t, sym));
                if a != 0 && b != 0 {
                    emit(sym, (a, b));
                }
            }
            Ok(())
        },
        |&(s, t)| f.is_accepting(s) && g.is_accepting(t),
    )?;
    Ok(out.trim())
}

/// True iff the two automata accept the same language. Explores the
/// product of the completed automata looking for a word in either
/// difference.
pub fn language_equal(f: &Fsa, g: &Fsa) -> Result<bool> {
    f.alphabet().same_as(g.alphabet(), "language_equal")?;
    let nsym = f.num_symbols() as Symbol;
    let start = (f.initial(), g.initial());
    if start == (0, 0) {
        return Ok(true);
    }
    let mut seen: HashMap<(State, State), ()> = HashMap::new();
    let mut queue = VecDeque::from([start]);
    seen.insert(start, ());
    while let Some((s, t)) = queue.pop_front() {
        let acc_f = s != 0 && f.is_accepting(s);
        let acc_g = t != 0 && g.is_accepting(t);
        if acc_f != acc_g {
            return Ok(false);
        }
        for sym in 0..nsym {
            let a = if s == 0 { 0 } else { f.delta(s, sym) };
            let b = if t == 0 { 0 } else { g.delta(t, sym) };
            if (a, b) != (0, 0) && seen.insert((a, b), ()).is_none() {
                queue.push_back((a, b));
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

/// Existential projection of a pair automaton: accepts the words `u` for
/// which some `v` makes `(u, v)` (or `(v, u)` for [`Side::Second`])
/// accepted. Padding on the kept side erases to nothing.
pub fn exists_project(f: &Fsa, side: Side, max_states: usize) -> Result<Fsa> {
    let alphabet = f.alphabet();
    if !alphabet.is_pair() {
        return Err(Error::AlphabetMismatch("projection needs a pair alphabet".into()));
    }
    let base = alphabet.base.clone();
    let out_alpha = FsaAlphabet::single(base.clone());
    if f.num_states() == 0 {
        return Ok(Fsa::empty(out_alpha));
    }
    let n = base.len();
    let n_states = f.num_states();
    let sym_for = |kept: Option<Letter>, erased: Option<Letter>| match side {
        Side::First => alphabet.pair_symbol(kept, erased),
        Side::Second => alphabet.pair_symbol(erased, kept),
    };
    // states from which the erased side alone can finish the word
    let mut rev: Vec<Vec<State>> = vec![Vec::new(); n_states + 1];
    for s in 1..=n_states as State {
        for b in 0..n as Letter {
            let t = f.delta(s, sym_for(None, Some(b)));
            if t != 0 {
                rev[t as usize].push(s);
            }
        }
    }
    let mut accepting = vec![false; n_states + 1];
    let mut stack: Vec<State> = f.accepting_states().collect();
    for &s in &stack {
        accepting[s as usize] = true;
    }
    while let Some(t) = stack.pop() {
        for &s in &rev[t as usize] {
            if !accepting[s as usize] {
                accepting[s as usize] = true;
                stack.push(s);
            }
        }
    }
    let mut nfa = Nfa::new(out_alpha, n_states);
    nfa.initial.push(1);
    nfa.accepting = accepting;
    for s in 1..=n_states as State {
        for a in 0..n as Letter {
            for b in (0..n as Letter).map(Some).chain([None]) {
                let t = f.delta(s, sym_for(Some(a), b));
                if t != 0 {
                    nfa.add_transition(s, a as Symbol, t);
                }
            }
        }
    }
    determinize(&nfa, max_states)
}

/// Composite of two pair automata: accepts `(u, w)` whenever some middle
/// word `v` has `(u, v)` accepted by `f` and `(v, w)` accepted by `g`. The
/// middle word may run one letter past both outer words; needing more than
/// that is reported as [`Error::MiddleOverflow`]. The result is minimized.
pub fn compose(f: &Fsa, g: &Fsa, max_states: usize) -> Result<Fsa> {
    f.alphabet().same_as(g.alphabet(), "compose")?;
    let alphabet = f.alphabet().clone();
    if alphabet.kind != Kind::Pair {
        return Err(Error::AlphabetMismatch("compose needs pair alphabets".into()));
    }
    if f.num_states() == 0 || g.num_states() == 0 {
        return Ok(Fsa::empty(alphabet));
    }
    let n = alphabet.base.len() as Letter;
    let middles: Vec<Option<Letter>> = (0..n).map(Some).chain([None]).collect();
    const U_END: u8 = 1;
    const V_END: u8 = 2;
    const W_END: u8 = 4;
    type Triple = (State, State, u8);

    let step_f = |s: State, a: Option<Letter>, b: Option<Letter>| -> State {
        if a.is_none() && b.is_none() {
            s
        } else {
            f.delta(s, alphabet.pair_symbol(a, b))
        }
    };
    let step_g = |s: State, b: Option<Letter>, c: Option<Letter>| -> State {
        if b.is_none() && c.is_none() {
            s
        } else {
            g.delta(s, alphabet.pair_symbol(b, c))
        }
    };
    let mut overflow = false;
    let mut accept_triple = |&(s1, s2, flags): &Triple| -> bool {
        let mut found = f.is_accepting(s1) && g.is_accepting(s2);
        if flags & V_END != 0 {
            return found;
        }
        for b in 0..n {
            let t1 = step_f(s1, None, Some(b));
            let t2 = step_g(s2, Some(b), None);
            if t1 == 0 || t2 == 0 {
                continue;
            }
            if f.is_accepting(t1) && g.is_accepting(t2) {
                found = true;
            }
            for b2 in 0..n {
                if step_f(t1, None, Some(b2)) != 0 && step_g(t2, Some(b2), None) != 0 {
                    overflow = true;
                }
            }
        }
        found
    };

    let nsym = alphabet.num_symbols() as Symbol;
    let start: Vec<Triple> = vec![(1, 1, 0)];
    let mut accepted_keys: HashMap<Vec<Triple>, bool> = HashMap::new();
    let mut next: Vec<Triple> = Vec::new();
    let out = explore(
        alphabet.clone(),
        start,
        max_states,
        |subset: &Vec<Triple>, emit| {
            for sym in 0..nsym {
                let p = alphabet.decode(sym);
                next.clear();
                for &(s1, s2, flags) in subset {
                    if (flags & U_END != 0 && p.left.is_some()) || (flags & W_END != 0 && p.right.is_some()) {
                        continue;
                    }
                    let mut nf = flags;
                    if p.left.is_none() {
                        nf |= U_END;
                    }
                    if p.right.is_none() {
                        nf |= W_END;
                    }
                    for &b in &middles {
                        if flags & V_END != 0 && b.is_some() {
                            continue;
                        }
                        let t1 = step_f(s1, p.left, b);
                        if t1 == 0 {
                            continue;
                        }
                        let t2 = step_g(s2, b, p.right);
                        if t2 == 0 {
                            continue;
                        }
                        let flags2 = if b.is_none() { nf | V_END } else { nf };
                        next.push((t1, t2, flags2));
                    }
                }
                if !next.is_empty() {
                    next.sort_unstable();
                    next.dedup();
                    emit(sym, next.clone());
                }
            }
            Ok(())
        },
        |subset| {
            if let Some(&a) = accepted_keys.get(subset) {
                return a;
            }
            let a = subset.iter().any(&mut accept_triple);
            accepted_keys.insert(subset.clone(), a);
            a
        },
    )?;
    if overflow {
        return Err(Error::MiddleOverflow);
    }
    Ok(super::minimize(&out))
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::super::{enumerate, minimize, pair_word, unpair_word};
    use super::*;
    use std::sync::Arc;

    fn a_star() -> Fsa {
        build(&unary(), 1, &[(1, 0, 1)], &[1])
    }

    fn aa_star() -> Fsa {
        build(&unary(), 2, &[(1, 0, 2), (2, 0, 1)], &[1])
    }

    #[test]
    fn determinize_forces_a_star() {
        let base = unary();
        let mut nfa = Nfa::new(FsaAlphabet::single(base), 2);
        nfa.initial = vec![1, 2];
        nfa.accepting = vec![false, true, true];
        nfa.add_transition(1, 0, 1);
        nfa.add_transition(1, 0, 2);
        nfa.add_transition(2, 0, 1);
        let d = determinize(&nfa, 100).unwrap();
        assert!(d.num_states() <= 2);
        assert!(language_equal(&d, &a_star()).unwrap());
    }

    #[test]
    fn determinize_budget_is_enforced() {
        // (a|A)* A (a|A)^k needs 2^(k+1) subsets
        let base = a_inv();
        let k = 6;
        let mut nfa = Nfa::new(FsaAlphabet::single(base), k + 2);
        nfa.initial = vec![1];
        nfa.accepting[k + 2] = true;
        nfa.add_transition(1, 0, 1);
        nfa.add_transition(1, 1, 1);
        nfa.add_transition(1, 1, 2);
        for s in 2..(k + 2) as State {
            nfa.add_transition(s, 0, s + 1);
            nfa.add_transition(s, 1, s + 1);
        }
        assert!(matches!(determinize(&nfa, 16), Err(Error::Budget { .. })));
        assert!(determinize(&nfa, 1 << 12).is_ok());
    }

    #[test]
    fn complement_examples() {
        let base = a_inv();
        let a_only = build(&base, 1, &[(1, 0, 1)], &[1]);
        let c = complement(&a_only);
        let words = enumerate(&c, 2);
        assert_eq!(words, vec![vec![1], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert!(language_equal(&complement(&c), &a_only).unwrap());

        let empty = Fsa::empty(FsaAlphabet::single(unary()));
        assert!(language_equal(&complement(&empty), &a_star()).unwrap());
    }

    #[test]
    fn intersect_examples() {
        let i = intersect(&a_star(), &aa_star()).unwrap();
        assert!(language_equal(&i, &aa_star()).unwrap());
        assert!(language_equal(&intersect(&aa_star(), &aa_star()).unwrap(), &aa_star()).unwrap());
        assert!(intersect(&aa_star(), &complement(&aa_star()))
            .unwrap()
            .is_empty_language());
    }

    #[test]
    fn language_equal_examples() {
        // a*a and aa*
        let f = build(&unary(), 2, &[(1, 0, 2), (2, 0, 2)], &[2]);
        let g = build(&unary(), 3, &[(1, 0, 2), (2, 0, 3), (3, 0, 3)], &[2, 3]);
        assert!(language_equal(&f, &g).unwrap());
        assert!(!language_equal(&a_star(), &aa_star()).unwrap());
        let other = build(&a_inv(), 1, &[(1, 0, 1)], &[1]);
        assert!(language_equal(&a_star(), &other).is_err());
    }

    fn diagonal(base: &Arc<crate::words::Alphabet>) -> Fsa {
        let alpha = FsaAlphabet::pair(base.clone());
        explore(
            alpha.clone(),
            (),
            10,
            |_, emit| {
                for x in 0..base.len() as Letter {
                    emit(alpha.pair_symbol(Some(x), Some(x)), ());
                }
                Ok(())
            },
            |_| true,
        )
        .unwrap()
    }

    #[test]
    fn projection_of_diagonal() {
        let base = unary();
        let p = exists_project(&diagonal(&base), Side::First, 100).unwrap();
        assert!(language_equal(&p, &a_star()).unwrap());
        let e = Fsa::empty(FsaAlphabet::pair(base));
        assert!(exists_project(&e, Side::Second, 100).unwrap().is_empty_language());
    }

    /// Pairs (a^k, a^(k+1)) over the unary alphabet.
    fn shift_right(base: &Arc<crate::words::Alphabet>) -> Fsa {
        let alpha = FsaAlphabet::pair(base.clone());
        explore(
            alpha.clone(),
            0u8,
            10,
            |&s, emit| {
                if s == 0 {
                    emit(alpha.pair_symbol(Some(0), Some(0)), 0);
                    emit(alpha.pair_symbol(None, Some(0)), 1);
                }
                Ok(())
            },
            |&s| s == 1,
        )
        .unwrap()
    }

    #[test]
    fn compose_shifts() {
        let base = unary();
        let alpha = FsaAlphabet::pair(base.clone());
        let diag = diagonal(&base);
        let shift = shift_right(&base);
        let c = compose(&diag, &shift, 1000).unwrap();
        assert!(language_equal(&c, &shift).unwrap());
        // shift then shift: (a^k, a^(k+2)) needs |v| = |u|+1 and |w| = |v|+1
        let cc = compose(&shift, &shift, 1000).unwrap();
        for (u, w) in [(0usize, 2usize), (3, 5)] {
            let syms = pair_word(&alpha, &vec![0; u], &vec![0; w]);
            assert!(cc.accepts(syms));
        }
        assert!(!cc.accepts(pair_word(&alpha, &[0], &[0, 0])));
        for word in enumerate(&cc, 4) {
            let (u, w) = unpair_word(&alpha, &word).unwrap();
            assert_eq!(w.len(), u.len() + 2);
        }
    }

    #[test]
    fn compose_detects_overflow() {
        let base = unary();
        let alpha = FsaAlphabet::pair(base.clone());
        // f: (eps, a^k) any k; g: (a^k, eps) any k -- middle is unbounded
        let f = explore(
            alpha.clone(),
            (),
            10,
            |_, emit| {
                emit(alpha.pair_symbol(None, Some(0)), ());
                Ok(())
            },
            |_| true,
        )
        .unwrap();
        let g = explore(
            alpha.clone(),
            (),
            10,
            |_, emit| {
                emit(alpha.pair_symbol(Some(0), None), ());
                Ok(())
            },
            |_| true,
        )
        .unwrap();
        assert!(matches!(compose(&f, &g, 1000), Err(Error::MiddleOverflow)));
    }

    #[test]
    fn minimized_complement_round_trip() {
        let c = minimize(&complement(&complement(&aa_star())));
        assert_eq!(c.num_states(), 2);
    }
}
