//! Independent oracles: Todd-Coxeter coset enumeration, brute-force
//! shortlex normal forms, and exponent counting in free abelian groups.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use autostruct::words::{Letter, Presentation, Word};

const NONE: usize = usize::MAX;

/// Coset table of the trivial subgroup: the regular permutation action.
pub struct CosetTable {
    pub table: Vec<Vec<usize>>,
}

impl CosetTable {
    pub fn order(&self) -> usize {
        self.table.len()
    }

    /// Coset reached from the identity coset by a word.
    pub fn element(&self, w: &[Letter]) -> usize {
        w.iter().fold(0, |c, &x| self.table[c][x as usize])
    }
}

struct Enumerator {
    table: Vec<Vec<usize>>,
    parent: Vec<usize>,
    inv: Vec<usize>,
    queue: Vec<usize>,
    max: usize,
}

impl Enumerator {
    fn rep(&mut self, mut c: usize) -> usize {
        let mut root = c;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[c] != root {
            let next = self.parent[c];
            self.parent[c] = root;
            c = next;
        }
        root
    }

    fn define(&mut self, c: usize, x: usize) -> bool {
        if self.table.len() >= self.max {
            return false;
        }
        let d = self.table.len();
        self.table.push(vec![NONE; self.inv.len()]);
        self.parent.push(d);
        self.table[c][x] = d;
        self.table[d][self.inv[x]] = c;
        true
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        self.parent[hi] = lo;
        self.queue.push(hi);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let e = self.queue[i];
            i += 1;
            for x in 0..self.inv.len() {
                let f = self.table[e][x];
                if f == NONE {
                    continue;
                }
                let xi = self.inv[x];
                if self.table[f][xi] == e {
                    self.table[f][xi] = NONE;
                }
                let (e1, f1) = (self.rep(e), self.rep(f));
                if self.table[e1][x] != NONE {
                    let t = self.table[e1][x];
                    self.merge(f1, t);
                } else if self.table[f1][xi] != NONE {
                    let t = self.table[f1][xi];
                    self.merge(e1, t);
                } else {
                    self.table[e1][x] = f1;
                    self.table[f1][xi] = e1;
                }
            }
        }
    }

    fn scan_and_fill(&mut self, c: usize, w: &[usize]) -> bool {
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, w.len() as isize - 1);
        loop {
            while (i as isize) <= j && self.table[f][w[i]] != NONE {
                f = self.table[f][w[i]];
                i += 1;
            }
            if (i as isize) > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return true;
            }
            while j >= i as isize && self.table[b][self.inv[w[j as usize]]] != NONE {
                b = self.table[b][self.inv[w[j as usize]]];
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return true;
            } else if j == i as isize {
                self.table[f][w[i]] = b;
                self.table[b][self.inv[w[i]]] = f;
                return true;
            } else if !self.define(f, w[i]) {
                return false;
            }
        }
    }
}

/// HLT coset enumeration over the trivial subgroup. `None` when more than
/// `max_cosets` cosets would be needed.
pub fn todd_coxeter(p: &Presentation, max_cosets: usize) -> Option<CosetTable> {
    let a = &p.alphabet;
    let inv: Vec<usize> = a.letters().map(|x| a.inverse(x) as usize).collect();
    let relators: Vec<Vec<usize>> = p
        .relations
        .iter()
        .map(|(l, r)| {
            let mut w: Vec<usize> = l.iter().map(|&x| x as usize).collect();
            w.extend(a.invert(r).iter().map(|&x| x as usize));
            w
        })
        .collect();
    let mut e = Enumerator {
        table: vec![vec![NONE; inv.len()]],
        parent: vec![0],
        inv,
        queue: Vec::new(),
        max: max_cosets,
    };
    let mut c = 0;
    while c < e.table.len() {
        for r in &relators {
            if e.parent[c] != c {
                break;
            }
            if !e.scan_and_fill(c, r) {
                return None;
            }
        }
        for x in 0..e.inv.len() {
            if e.parent[c] != c {
                break;
            }
            if e.table[c][x] == NONE && !e.define(c, x) {
                return None;
            }
        }
        c += 1;
    }
    // compact live cosets
    let live: Vec<usize> = (0..e.table.len()).filter(|&c| e.parent[c] == c).collect();
    let index: HashMap<usize, usize> = live.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut table = Vec::with_capacity(live.len());
    for &c in &live {
        let row: Vec<usize> = e.table[c].clone();
        table.push(row.into_iter().map(|t| index[&e.rep(t)]).collect());
    }
    Some(CosetTable { table })
}

/// All words over `n` letters of length at most `max_len`, in shortlex
/// order.
pub fn words_up_to(n: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::new()];
    let mut layer = vec![Word::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * n);
        for w in &layer {
            for x in 0..n as Letter {
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Shortlex-least word of every element whose least word has length at
/// most `max_len`, keyed by the element as computed by `eval`.
pub fn brute_normal_forms<K: Ord>(n: usize, max_len: usize, eval: impl Fn(&[Letter]) -> K) -> BTreeMap<K, Word> {
    let mut out = BTreeMap::new();
    for w in words_up_to(n, max_len) {
        out.entry(eval(&w)).or_insert(w);
    }
    out
}

/// Shortlex-least word per element of a finite group, by breadth-first
/// search of the Cayley graph given by a coset table.
pub fn cayley_normal_forms(t: &CosetTable) -> Vec<Word> {
    let n = t.order();
    let mut rep: Vec<Option<Word>> = vec![None; n];
    rep[0] = Some(Word::new());
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        let w = rep[c].clone().unwrap();
        for (x, &d) in t.table[c].iter().enumerate() {
            if rep[d].is_none() {
                let mut v = w.clone();
                v.push(x as Letter);
                rep[d] = Some(v);
                queue.push_back(d);
            }
        }
    }
    rep.into_iter().map(|w| w.unwrap()).collect()
}

/// Exponent vector of a word in a free abelian group whose alphabet lists
/// each generator followed by its inverse.
pub fn exponents(w: &[Letter], rank: usize) -> Vec<i64> {
    let mut v = vec![0i64; rank];
    for &x in w {
        let g = x as usize / 2;
        v[g] += if x % 2 == 0 { 1 } else { -1 };
    }
    v
}

pub fn z() -> Presentation {
    let a = autostruct::words::Alphabet::from_case_pairs(&["a"]).unwrap();
    Presentation::new("z", a, vec![]).unwrap()
}

pub fn z2() -> Presentation {
    let a = autostruct::words::Alphabet::from_case_pairs(&["a", "b"]).unwrap();
    let rel = (a.parse_word("b a").unwrap(), a.parse_word("a b").unwrap());
    Presentation::new("z2", a, vec![rel]).unwrap()
}

pub fn s3() -> Presentation {
    let a = autostruct::words::Alphabet::from_case_pairs(&["a", "b"]).unwrap();
    let rels = vec![
        (a.parse_word("a^3").unwrap(), Word::new()),
        (a.parse_word("b^2").unwrap(), Word::new()),
        (a.parse_word("b a B").unwrap(), a.parse_word("A").unwrap()),
    ];
    Presentation::new("s3", a, rels).unwrap()
}
