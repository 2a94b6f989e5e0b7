//! Queries answered by a verified automatic structure: normal forms, the
//! word problem, element orders, group order and growth.

use std::fmt;

use crate::autstruct::{AutomaticStructure, StructureReducer};
use crate::error::{Error, Result};
use crate::fsa::{growth_counts, language_count, Count, State, Symbol};
use crate::words::{Letter, Word};

fn ensure_verified(s: &AutomaticStructure) -> Result<()> {
    if s.is_verified() {
        Ok(())
    } else {
        Err(Error::NotVerified)
    }
}

fn check_word(s: &AutomaticStructure, w: &[Letter]) -> Result<()> {
    if s.presentation.alphabet.contains_word(w) {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch(
            "word uses letters outside the structure's alphabet".into(),
        ))
    }
}

fn reducer(s: &AutomaticStructure) -> StructureReducer<'_> {
    StructureReducer::new(&s.acceptor, s.reduction_machine()).with_multiplier(&s.multiplier.fsa)
}

/// The accepted representative of `w`.
pub fn reduce_word(s: &AutomaticStructure, w: &[Letter]) -> Result<Word> {
    ensure_verified(s)?;
    check_word(s, w)?;
    reducer(s).try_reduce(w).ok_or(Error::ReductionFailed)
}

/// True iff `u` and `v` represent the same element.
pub fn word_problem(s: &AutomaticStructure, u: &[Letter], v: &[Letter]) -> Result<bool> {
    Ok(reduce_word(s, u)? == reduce_word(s, v)?)
}

/// Acceptor path proving that every positive power of a word is accepted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceCertificate {
    /// The reduced word whose powers are traced.
    pub word: Word,
    /// States visited reading `word` repeatedly, starting at the initial
    /// state and ending on the first repeated state.
    pub states: Vec<State>,
    /// Index in `states` where the cycle starts; the last entry equals
    /// `states[cycle_start]`.
    pub cycle_start: usize,
}

impl fmt::Display for TraceCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let states: Vec<String> = self.states.iter().map(|s| s.to_string()).collect();
        write!(f, "trace {} cycle_start={}", states.join(" "), self.cycle_start)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderResult {
    Infinite,
    Finite(u64),
    /// Neither a certificate nor the identity within this many powers.
    Unknown(u64),
}

impl fmt::Display for OrderResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderResult::Infinite => f.write_str("infinite"),
            OrderResult::Finite(n) => write!(f, "{n}"),
            OrderResult::Unknown(b) => write!(f, "unknown (budget {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderReport {
    pub order: OrderResult,
    pub certificate: Option<TraceCertificate>,
}

/// Traces `g g g ...` through the acceptor until a state repeats at a copy
/// boundary. Returns the path when every state on it accepts, which shows
/// all positive powers of `g` are accepted and hence pairwise distinct.
pub fn trace_certificate(s: &AutomaticStructure, g: &[Letter]) -> Option<TraceCertificate> {
    let w = &s.acceptor;
    if g.is_empty() || w.num_states() == 0 {
        return None;
    }
    let mut boundary = vec![usize::MAX; w.num_states() + 1];
    let mut state = w.initial();
    let mut states = vec![state];
    loop {
        if boundary[state as usize] != usize::MAX {
            let cycle_start = boundary[state as usize];
            // states[0] is the empty word, not a power of g
            let trace_ok = states[1..].iter().all(|&q| w.is_accepting(q));
            return trace_ok.then(|| TraceCertificate {
                word: Word(g.to_vec()),
                states,
                cycle_start,
            });
        }
        boundary[state as usize] = states.len() - 1;
        for &x in g {
            state = w.delta(state, x as Symbol);
            if state == 0 {
                return None;
            }
            states.push(state);
        }
    }
}

/// Checks a certificate against the structure's acceptor.
pub fn check_certificate(s: &AutomaticStructure, c: &TraceCertificate) -> bool {
    let w = &s.acceptor;
    let k = c.word.len();
    if k == 0 || c.states.first() != Some(&w.initial()) || !c.cycle_start.is_multiple_of(k) {
        return false;
    }
    let last = c.states.len() - 1;
    if !last.is_multiple_of(k) || c.cycle_start >= last || c.states[last] != c.states[c.cycle_start] {
        return false;
    }
    for i in 0..last {
        if w.delta(c.states[i], c.word[i % k] as Symbol) != c.states[i + 1] {
            return false;
        }
    }
    c.states[1..].iter().all(|&q| w.is_accepting(q))
}

/// Order of the element represented by `w`. `budget` bounds the powers
/// tried when no certificate exists; `None` means twice the group order
/// for finite groups and 10^6 otherwise.
pub fn element_order(s: &AutomaticStructure, w: &[Letter], budget: Option<u64>) -> Result<OrderReport> {
    let g = reduce_word(s, w)?;
    if g.is_empty() {
        return Ok(OrderReport {
            order: OrderResult::Finite(1),
            certificate: None,
        });
    }
    if let Some(c) = trace_certificate(s, &g) {
        return Ok(OrderReport {
            order: OrderResult::Infinite,
            certificate: Some(c),
        });
    }
    let budget = budget.unwrap_or(match language_count(&s.acceptor) {
        Count::Finite(n) => (2 * n).min(u64::MAX as u128) as u64,
        Count::Infinite => 1_000_000,
    });
    let r = reducer(s);
    let mut power = g.clone();
    for n in 1..=budget {
        if power.is_empty() {
            return Ok(OrderReport {
                order: OrderResult::Finite(n),
                certificate: None,
            });
        }
        power.extend_from_slice(&g);
        power = r.try_reduce(&power).ok_or(Error::ReductionFailed)?;
    }
    Ok(OrderReport {
        order: OrderResult::Unknown(budget),
        certificate: None,
    })
}

/// Number of elements: the size of the acceptor's language.
pub fn group_order(s: &AutomaticStructure) -> Count {
    language_count(&s.acceptor)
}

/// Number of accepted words of each length `0..=max_len`.
pub fn growth_series(s: &AutomaticStructure, max_len: usize) -> Vec<u128> {
    growth_counts(&s.acceptor, max_len)
}

/// CSV with columns `length,count,cumulative`.
pub fn growth_csv(counts: &[u128]) -> String {
    let mut out = String::from("length,count,cumulative\n");
    let mut total: u128 = 0;
    for (len, &c) in counts.iter().enumerate() {
        total = total.saturating_add(c);
        out.push_str(&format!("{len},{c},{total}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autstruct::{synthesize, StructConfig};
    use crate::words::{fibonacci_presentation, Alphabet, Presentation};

    fn z() -> AutomaticStructure {
        let a = Alphabet::from_case_pairs(&["a"]).unwrap();
        synthesize(&Presentation::new("z", a, vec![]).unwrap(), &StructConfig::default()).unwrap()
    }

    fn z2() -> AutomaticStructure {
        let a = Alphabet::from_case_pairs(&["a", "b"]).unwrap();
        let rel = (a.parse_word("b a").unwrap(), a.parse_word("a b").unwrap());
        synthesize(
            &Presentation::new("z2", a, vec![rel]).unwrap(),
            &StructConfig::default(),
        )
        .unwrap()
    }

    fn w(s: &AutomaticStructure, text: &str) -> Word {
        s.presentation.alphabet.parse_word(text).unwrap()
    }

    #[test]
    fn reduce_in_free_abelian_group() {
        let s = z2();
        assert_eq!(reduce_word(&s, &w(&s, "b a B")).unwrap(), w(&s, "a"));
        assert_eq!(reduce_word(&s, &[]).unwrap(), Word::new());
        assert!(word_problem(&s, &w(&s, "a b"), &w(&s, "b a")).unwrap());
        assert!(!word_problem(&s, &w(&s, "a"), &w(&s, "b")).unwrap());
    }

    #[test]
    fn cancellation_in_z() {
        let s = z();
        assert!(word_problem(&s, &w(&s, "a A"), &[]).unwrap());
    }

    #[test]
    fn unverified_structure_is_refused() {
        let mut s = z();
        s.invalidate();
        assert!(matches!(reduce_word(&s, &[0]), Err(Error::NotVerified)));
    }

    #[test]
    fn orders() {
        let s = z();
        let r = element_order(&s, &[0], None).unwrap();
        assert_eq!(r.order, OrderResult::Infinite);
        assert!(check_certificate(&s, r.certificate.as_ref().unwrap()));
        assert_eq!(
            element_order(&s, &w(&s, "a A"), None).unwrap().order,
            OrderResult::Finite(1)
        );
        let f5 = synthesize(&fibonacci_presentation(5).unwrap(), &StructConfig::default()).unwrap();
        assert_eq!(element_order(&f5, &[0], None).unwrap().order, OrderResult::Finite(11));
        assert_eq!(group_order(&f5), Count::Finite(11));
    }

    #[test]
    fn growth() {
        assert_eq!(growth_series(&z(), 3), vec![1, 2, 2, 2]);
        assert_eq!(growth_series(&z2(), 3), vec![1, 4, 8, 12]);
        assert_eq!(growth_csv(&[1, 2]), "length,count,cumulative\n0,1,1\n1,2,3\n");
    }

    #[test]
    fn forged_certificate_is_rejected() {
        let s = z();
        let mut c = element_order(&s, &[0], None).unwrap().certificate.unwrap();
        c.states[1] = 3 - c.states[1].min(2);
        assert!(!check_certificate(&s, &c));
    }
}
