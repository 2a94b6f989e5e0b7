use std::sync::Arc;

use proptest::prelude::*;

use autostruct::fsa::{
    complement, determinize, enumerate, growth_counts, intersect, language_count, language_equal, minimize,
    minimize_with, read_fsa, shortlex_least_word, write_fsa, Count, Fsa, FsaAlphabet, FsaConfig, Nfa, State, Symbol,
};
use autostruct::words::Alphabet;

fn base() -> Arc<Alphabet> {
    Arc::new(Alphabet::from_case_pairs(&["a"]).unwrap())
}

fn dfa() -> impl Strategy<Value = Fsa> {
    (1usize..7).prop_flat_map(|n| {
        let nsym = 2;
        (
            prop::collection::vec(0..=n as State, n * nsym),
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_map(move |(rows, acc)| Fsa::from_rows(FsaAlphabet::single(base()), n, rows, acc, None).unwrap())
    })
}

fn nfa() -> impl Strategy<Value = Nfa> {
    (1usize..6).prop_flat_map(|n| {
        (
            prop::collection::vec((1..=n as State, 0..2 as Symbol, 1..=n as State), 0..3 * n),
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(1..=n as State, 1..3),
        )
            .prop_map(move |(edges, acc, init)| {
                let mut m = Nfa::new(FsaAlphabet::single(base()), n);
                for (s, a, t) in edges {
                    m.add_transition(s, a, t);
                }
                for (i, a) in acc.into_iter().enumerate() {
                    m.accepting[i + 1] = a;
                }
                m.initial = init;
                m.initial.sort_unstable();
                m.initial.dedup();
                m
            })
    })
}

fn all_words(max_len: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<Symbol>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| (0..2).map(move |x| [w.as_slice(), &[x]].concat()))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

proptest! {
    #[test]
    fn minimize_preserves_language(f in dfa()) {
        let m = minimize(&f);
        prop_assert!(m.num_states() <= f.num_states());
        for w in all_words(7) {
            prop_assert_eq!(f.accepts(w.iter().copied()), m.accepts(w.iter().copied()));
        }
        prop_assert!(language_equal(&f, &m).unwrap());
        prop_assert_eq!(minimize(&m).num_states(), m.num_states());
    }

    #[test]
    fn external_minimization_agrees(f in dfa()) {
        let cfg = FsaConfig { external_threshold: 0, ..FsaConfig::default() };
        prop_assert_eq!(minimize_with(&f, &cfg), minimize(&f));
    }

    #[test]
    fn complement_and_intersection(f in dfa(), g in dfa()) {
        let c = complement(&f);
        let i = intersect(&f, &g).unwrap();
        for w in all_words(6) {
            let (a, b) = (f.accepts(w.iter().copied()), g.accepts(w.iter().copied()));
            prop_assert_eq!(c.accepts(w.iter().copied()), !a);
            prop_assert_eq!(i.accepts(w.iter().copied()), a && b);
        }
    }

    #[test]
    fn determinize_matches_simulation(m in nfa()) {
        let d = determinize(&m, 1 << 12).unwrap();
        for w in all_words(6) {
            prop_assert_eq!(d.accepts(w.iter().copied()), m.accepts(&w));
        }
    }

    #[test]
    fn text_round_trip(f in dfa()) {
        let f = f.trim();
        let text = write_fsa("x", &f);
        let back = read_fsa(&text, Some(&base())).unwrap();
        prop_assert_eq!(back.name, "x");
        prop_assert_eq!(back.fsa, f);
    }

    #[test]
    fn counting_agrees_with_enumeration(f in dfa()) {
        let words = enumerate(&f, 8);
        let expected: Vec<Vec<Symbol>> = all_words(8).into_iter().filter(|w| f.accepts(w.iter().copied())).collect();
        prop_assert_eq!(&words, &expected);
        let growth = growth_counts(&f, 8);
        for (len, &c) in growth.iter().enumerate() {
            prop_assert_eq!(c as usize, words.iter().filter(|w| w.len() == len).count());
        }
        if let Count::Finite(n) = language_count(&f) {
            prop_assert_eq!(n as usize, words.len());
        }
        prop_assert_eq!(shortlex_least_word(&f), words.first().cloned());
    }
}
