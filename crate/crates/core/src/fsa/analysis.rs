use std::collections::VecDeque;

use super::{Fsa, State, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Count {
    Finite(u128),
    Infinite,
}

/// Number of accepted words. Infinite iff the trimmed automaton has a
/// cycle; otherwise counted by dynamic programming over a topological order.
pub fn language_count(f: &Fsa) -> Count {
    let t = f.trim();
    let n = t.num_states();
    if n == 0 {
        return Count::Finite(0);
    }
    let mut indegree = vec![0usize; n + 1];
    for s in 1..=n as State {
        for &x in t.row(s) {
            if x != 0 {
                indegree[x as usize] += 1;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut queue: VecDeque<State> = (1..=n as State).filter(|&s| indegree[s as usize] == 0).collect();
    while let Some(s) = queue.pop_front() {
        order.push(s);
        for &x in t.row(s) {
            if x != 0 {
                indegree[x as usize] -= 1;
                if indegree[x as usize] == 0 {
                    queue.push_back(x);
                }
            }
        }
    }
    if order.len() < n {
        return Count::Infinite;
    }
    let mut count = vec![0u128; n + 1];
    for &s in order.iter().rev() {
        let mut c: u128 = u128::from(t.is_accepting(s));
        for &x in t.row(s) {
            if x != 0 {
                c = c.saturating_add(count[x as usize]);
            }
        }
        count[s as usize] = c;
    }
    Count::Finite(count[1])
}

/// All accepted words of length at most `max_len`, in shortlex order.
pub fn enumerate(f: &Fsa, max_len: usize) -> Vec<Vec<Symbol>> {
    let mut out = Vec::new();
    if f.num_states() == 0 {
        return out;
    }
    let mut level: Vec<(Vec<Symbol>, State)> = vec![(Vec::new(), 1)];
    for len in 0..=max_len {
        for (w, s) in &level {
            if f.is_accepting(*s) {
                out.push(w.clone());
            }
        }
        if len == max_len {
            break;
        }
        let mut next = Vec::new();
        for (w, s) in &level {
            for (sym, &t) in f.row(*s).iter().enumerate() {
                if t != 0 {
                    let mut w2 = w.clone();
                    w2.push(sym as Symbol);
                    next.push((w2, t));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    out
}

/// Number of accepted words of each exact length `0..=max_len`.
pub fn growth_counts(f: &Fsa, max_len: usize) -> Vec<u128> {
    let n = f.num_states();
    let mut out = Vec::with_capacity(max_len + 1);
    if n == 0 {
        out.resize(max_len + 1, 0);
        return out;
    }
    let mut ways = vec![0u128; n + 1];
    ways[1] = 1;
    for len in 0..=max_len {
        let total = (1..=n)
            .filter(|&s| f.is_accepting(s as State))
            .fold(0u128, |acc, s| acc.saturating_add(ways[s]));
        out.push(total);
        if len == max_len {
            break;
        }
        let mut next = vec![0u128; n + 1];
        for s in 1..=n {
            if ways[s] == 0 {
                continue;
            }
            for &t in f.row(s as State) {
                if t != 0 {
                    next[t as usize] = next[t as usize].saturating_add(ways[s]);
                }
            }
        }
        ways = next;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    /// States visited, starting with the initial state.
    pub states: Vec<State>,
    /// Index of the first symbol with no transition.
    pub failed_at: Option<usize>,
}

impl Trace {
    pub fn completed(&self) -> bool {
        self.failed_at.is_none()
    }
}

pub fn trace(f: &Fsa, word: &[Symbol]) -> Trace {
    let mut states = Vec::with_capacity(word.len() + 1);
    let mut s = f.initial();
    if s == 0 {
        return Trace {
            states,
            failed_at: Some(0),
        };
    }
    states.push(s);
    for (i, &sym) in word.iter().enumerate() {
        s = f.delta(s, sym);
        if s == 0 {
            return Trace {
                states,
                failed_at: Some(i),
            };
        }
        states.push(s);
    }
    Trace {
        states,
        failed_at: None,
    }
}

/// Shortlex-least accepted word, if any.
pub fn shortlex_least_word(f: &Fsa) -> Option<Vec<Symbol>> {
    let n = f.num_states();
    if n == 0 {
        return None;
    }
    let mut parent: Vec<Option<(State, Symbol)>> = vec![None; n + 1];
    let mut seen = vec![false; n + 1];
    seen[1] = true;
    let mut queue = VecDeque::from([1 as State]);
    while let Some(s) = queue.pop_front() {
        if f.is_accepting(s) {
            let mut word = Vec::new();
            let mut cur = s;
            while let Some((p, sym)) = parent[cur as usize] {
                word.push(sym);
                cur = p;
            }
            word.reverse();
            return Some(word);
        }
        for (sym, &t) in f.row(s).iter().enumerate() {
            if t != 0 && !seen[t as usize] {
                seen[t as usize] = true;
                parent[t as usize] = Some((s, sym as Symbol));
                queue.push_back(t);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::*;

    /// a* | A*
    fn z_acceptor() -> Fsa {
        build(&a_inv(), 3, &[(1, 0, 2), (1, 1, 3), (2, 0, 2), (3, 1, 3)], &[1, 2, 3])
    }

    #[test]
    fn count_examples() {
        assert_eq!(language_count(&z_acceptor()), Count::Infinite);
        let eps = build(&a_inv(), 1, &[], &[1]);
        assert_eq!(language_count(&eps), Count::Finite(1));
        // {a, aa, A}
        let f = build(&a_inv(), 3, &[(1, 0, 2), (2, 0, 3), (1, 1, 3)], &[2, 3]);
        assert_eq!(language_count(&f), Count::Finite(3));
    }

    #[test]
    fn count_ignores_dead_cycles() {
        // accepting only eps, with a dead loop behind 'a'
        let f = build(&a_inv(), 2, &[(1, 0, 2), (2, 0, 2)], &[1]);
        assert_eq!(language_count(&f), Count::Finite(1));
    }

    #[test]
    fn enumerate_examples() {
        let words = enumerate(&z_acceptor(), 2);
        assert_eq!(words, vec![vec![], vec![0], vec![1], vec![0, 0], vec![1, 1]]);
        let empty = Fsa::empty(z_acceptor().alphabet().clone());
        assert!(enumerate(&empty, 5).is_empty());
    }

    #[test]
    fn trace_examples() {
        let z = z_acceptor();
        let t = trace(&z, &[0, 0, 0]);
        assert_eq!(t.states, vec![1, 2, 2, 2]);
        assert!(t.completed());
        let t = trace(&z, &[0, 1]);
        assert_eq!(t.states, vec![1, 2]);
        assert_eq!(t.failed_at, Some(1));
    }

    #[test]
    fn growth_examples() {
        assert_eq!(growth_counts(&z_acceptor(), 3), vec![1, 2, 2, 2]);
    }

    #[test]
    fn shortlex_least() {
        let f = build(&a_inv(), 3, &[(1, 1, 2), (1, 0, 3), (3, 0, 2)], &[2]);
        assert_eq!(shortlex_least_word(&f), Some(vec![1]));
        let g = build(&a_inv(), 2, &[(1, 0, 2)], &[]);
        assert_eq!(shortlex_least_word(&g), None);
    }
}
