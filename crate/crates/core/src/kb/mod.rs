//! Knuth-Bendix completion for shortlex string rewriting over group
//! presentations, with word-difference collection.
//!
//! Completion runs in passes. A pass takes the shortest unprocessed rules,
//! forms their overlaps with all processed rules, and inserts the resolved
//! equations shortest first. The pass ends with inter-reduction: rules
//! whose lhs has become reducible are removed and their equations
//! re-inserted, and every rhs is rewritten to an irreducible word. Word
//! differences are collected from every rule inserted.

mod diffs;
mod rules;

use std::collections::HashSet;

use crate::words::{Letter, Presentation, Word};

pub use diffs::{close_under_inversion, extract_word_differences, WordDifferenceSet};
pub use rules::{RewriteRule, RuleSet};

/// Anything that maps words to equal (in the group) reduced words.
pub trait Reduce: Sync {
    fn reduce(&self, w: &[Letter]) -> Word;
}

impl Reduce for RuleSet {
    fn reduce(&self, w: &[Letter]) -> Word {
        self.rewrite(w)
    }
}

pub fn rewrite(rs: &RuleSet, w: &[Letter]) -> Word {
    rs.rewrite(w)
}

pub fn critical_pairs(rs: &RuleSet) -> Vec<(Word, Word)> {
    rs.critical_pairs()
}

#[derive(Debug, Clone)]
pub struct KbConfig {
    /// Cap on live rules.
    pub max_equations: usize,
    /// Longest lhs inserted before equations are deferred; `None` means
    /// `2 * longest relator + 2`.
    pub max_word_len: Option<usize>,
    /// Passes with an unchanged inverse-closed difference count needed to
    /// halt.
    pub stabilization_window: usize,
    /// Estimated working-set size (bytes) that halts completion.
    pub memory_budget: usize,
    /// Rules processed per pass.
    pub pass_size: usize,
    pub max_passes: Option<usize>,
}

impl Default for KbConfig {
    fn default() -> Self {
        KbConfig {
            max_equations: 1_000_000,
            max_word_len: None,
            stabilization_window: 3,
            memory_budget: 4 << 30,
            pass_size: 200,
            max_passes: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltReason {
    Confluent,
    Stabilized,
    Budget,
}

impl std::fmt::Display for HaltReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            HaltReason::Confluent => "confluent",
            HaltReason::Stabilized => "stabilized",
            HaltReason::Budget => "budget",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KbPassStats {
    pub pass: usize,
    pub rules: usize,
    pub eqns: u64,
    pub wdiffs: usize,
    pub wdiffs_inv: usize,
    /// Differences merged this pass because improved rules showed them to
    /// be the same element.
    pub merged: usize,
}

impl std::fmt::Display for KbPassStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "pass={} rules={} eqns={} wdiffs={} wdiffs_inv={}",
            self.pass, self.rules, self.eqns, self.wdiffs, self.wdiffs_inv
        )
    }
}

#[derive(Debug, Clone)]
pub struct KbResult {
    pub rules: RuleSet,
    pub diffs: WordDifferenceSet,
    pub halt: HaltReason,
    pub passes: Vec<KbPassStats>,
}

/// Runs completion until it is confluent, the word-difference count has
/// stabilized, or a budget is hit.
pub fn kb_complete(p: &Presentation, cfg: &KbConfig) -> KbResult {
    let mut kb = KnuthBendix::new(p, cfg.clone());
    let halt = kb.run();
    kb.into_result(halt)
}

/// Resumable completion state.
#[derive(Debug, Clone)]
pub struct KnuthBendix {
    cfg: KbConfig,
    rules: RuleSet,
    processed: Vec<bool>,
    unprocessed: Vec<u32>,
    deferred: Vec<(Word, Word)>,
    max_word_len: usize,
    relator_len: usize,
    diffs: WordDifferenceSet,
    passes: Vec<KbPassStats>,
    equations: u64,
    stable_run: usize,
    dropped: usize,
}

impl KnuthBendix {
    pub fn new(p: &Presentation, cfg: KbConfig) -> Self {
        let alphabet = p.alphabet.clone();
        let rules = RuleSet::new(alphabet.clone());
        let relator_len = p.max_relator_len().max(2);
        let mut kb = KnuthBendix {
            max_word_len: cfg.max_word_len.unwrap_or(2 * relator_len + 2),
            cfg,
            processed: vec![false; rules.slot_count()],
            unprocessed: (0..rules.slot_count() as u32).collect(),
            deferred: Vec::new(),
            relator_len,
            diffs: WordDifferenceSet::new(alphabet),
            passes: Vec::new(),
            equations: 0,
            stable_run: 0,
            dropped: 0,
            rules,
        };
        let initial: Vec<(Word, Word)> = kb.rules.rules().map(|r| (r.lhs.clone(), r.rhs.clone())).collect();
        for (l, r) in initial {
            kb.diffs.add_equation(&l, &r, &kb.rules);
        }
        for (l, r) in &p.relations {
            kb.add_equation(l, r);
        }
        kb
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn diffs(&self) -> &WordDifferenceSet {
        &self.diffs
    }

    pub fn passes(&self) -> &[KbPassStats] {
        &self.passes
    }

    /// Equations dropped because the deferred list outgrew the budget.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    /// Reduces, orients and inserts an equation. Returns true when a new
    /// rule was added.
    pub fn add_equation(&mut self, u: &[Letter], v: &[Letter]) -> bool {
        let (u, v) = (self.rules.rewrite(u), self.rules.rewrite(v));
        let Some((lhs, rhs)) = rules::orient(u, v) else {
            return false;
        };
        if lhs.len() > self.max_word_len {
            self.deferred.push((lhs, rhs));
            return false;
        }
        self.diffs.add_equation(&lhs, &rhs, &self.rules);
        let id = self.rules.push_rule(lhs, rhs);
        self.processed.push(false);
        debug_assert_eq!(self.processed.len(), self.rules.slot_count());
        self.unprocessed.push(id);
        true
    }

    /// Adds differences collected elsewhere, e.g. by an earlier run.
    pub fn absorb_diffs(&mut self, wd: &WordDifferenceSet) {
        self.diffs.merge(wd, &self.rules);
    }

    /// Runs passes until a halting condition holds.
    pub fn run(&mut self) -> HaltReason {
        loop {
            if let Some(h) = self.run_pass() {
                return h;
            }
        }
    }

    /// Runs one pass; returns the halt reason if completion should stop.
    pub fn run_pass(&mut self) -> Option<HaltReason> {
        self.unprocessed.retain(|&id| self.rules.is_alive(id));
        if self.unprocessed.is_empty() {
            if self.deferred.is_empty() {
                return Some(HaltReason::Confluent);
            }
            self.grow_word_len();
        }
        let rules = &self.rules;
        self.unprocessed
            .sort_by_key(|&id| (rules.rule(id).lhs.len(), rules.rule(id).rhs.len(), id));
        let take = self.cfg.pass_size.max(1).min(self.unprocessed.len());
        let batch: Vec<u32> = self.unprocessed.drain(..take).collect();

        let mut pending: Vec<(Word, Word)> = Vec::new();
        let mut raw = Vec::new();
        for id in batch {
            if !self.rules.is_alive(id) {
                continue;
            }
            self.processed[id as usize] = true;
            raw.clear();
            {
                let processed = &self.processed;
                let rules = &self.rules;
                let keep = |b: u32| processed[b as usize] && rules.is_alive(b);
                rules.overlaps_from(id, &keep, &mut raw);
                rules.overlaps_into(id, &keep, &mut raw);
            }
            for (u, v) in raw.drain(..) {
                self.equations += 1;
                let (u, v) = (self.rules.rewrite(&u), self.rules.rewrite(&v));
                if let Some(eq) = rules::orient(u, v) {
                    pending.push(eq);
                }
            }
            if pending.len() > 1 << 16 {
                self.flush(&mut pending);
            }
        }
        self.flush(&mut pending);
        self.tidy();
        self.finish_pass()
    }

    fn flush(&mut self, pending: &mut Vec<(Word, Word)>) {
        pending.sort_by(|a, b| {
            (a.0.len(), a.1.len())
                .cmp(&(b.0.len(), b.1.len()))
                .then_with(|| a.0.cmp(&b.0))
                .then_with(|| a.1.cmp(&b.1))
        });
        pending.dedup();
        for (l, r) in pending.drain(..) {
            self.add_equation(&l, &r);
        }
    }

    /// Inter-reduction: removes rules with reducible lhs (re-inserting
    /// their equations) and rewrites every rhs.
    fn tidy(&mut self) {
        loop {
            let mut stale = Vec::new();
            for id in 0..self.rules.slot_count() as u32 {
                if self.rules.is_alive(id) && self.rules.lhs_reducer(id).is_some() {
                    stale.push(id);
                }
            }
            if stale.is_empty() {
                break;
            }
            let mut requeue = Vec::with_capacity(stale.len());
            for id in stale {
                let r = self.rules.rule(id).clone();
                self.rules.remove_rule(id);
                requeue.push((r.lhs, r.rhs));
            }
            for (l, r) in requeue {
                self.add_equation(&l, &r);
            }
        }
        for id in 0..self.rules.slot_count() as u32 {
            if self.rules.is_alive(id) {
                let rhs = self.rules.rule(id).rhs.clone();
                let nf = self.rules.rewrite(&rhs);
                if nf != rhs {
                    self.rules.set_rhs(id, nf);
                }
            }
        }
        if self.rules.slot_count() > 2 * self.rules.len() + 1024 {
            let map = self.rules.compact();
            let mut processed = vec![false; self.rules.slot_count()];
            for (old, new) in map.iter().enumerate() {
                if let Some(new) = new {
                    processed[*new as usize] = self.processed[old];
                }
            }
            self.processed = processed;
            self.unprocessed = self.unprocessed.iter().filter_map(|&id| map[id as usize]).collect();
        }
    }

    fn grow_word_len(&mut self) {
        let deferred = std::mem::take(&mut self.deferred);
        let shortest = deferred.iter().map(|(l, _)| l.len()).min().unwrap_or(0);
        while self.max_word_len < shortest {
            self.max_word_len += self.relator_len;
        }
        log::info!("max word length raised to {}", self.max_word_len);
        let mut seen = HashSet::new();
        for (l, r) in deferred {
            if seen.insert(l.clone()) {
                self.add_equation(&l, &r);
            }
        }
    }

    fn finish_pass(&mut self) -> Option<HaltReason> {
        let merges = self.diffs.renormalize(&self.rules);
        if merges > 0 {
            log::debug!("{merges} word differences merged after re-reduction");
        }
        let wdiffs_inv = self.diffs.inverse_closed_len(&self.rules);
        let stats = KbPassStats {
            pass: self.passes.len() + 1,
            rules: self.rules.len(),
            eqns: self.equations,
            wdiffs: self.diffs.len(),
            wdiffs_inv,
            merged: merges,
        };
        log::info!("kb {stats}");
        match self.passes.last() {
            Some(prev) if prev.wdiffs_inv == wdiffs_inv => self.stable_run += 1,
            _ => self.stable_run = 0,
        }
        self.passes.push(stats);

        if self.deferred.len() > self.cfg.max_equations {
            self.deferred.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
            self.dropped += self.deferred.len() - self.cfg.max_equations;
            log::warn!(
                "dropping {} deferred equations",
                self.deferred.len() - self.cfg.max_equations
            );
            self.deferred.truncate(self.cfg.max_equations);
        }
        self.unprocessed.retain(|&id| self.rules.is_alive(id));
        if self.unprocessed.is_empty() && self.deferred.is_empty() {
            return Some(HaltReason::Confluent);
        }
        if self.stable_run >= self.cfg.stabilization_window {
            return Some(HaltReason::Stabilized);
        }
        if self.rules.len() > self.cfg.max_equations || self.memory_estimate() > self.cfg.memory_budget {
            return Some(HaltReason::Budget);
        }
        if self.cfg.max_passes.is_some_and(|m| self.passes.len() >= m) {
            return Some(HaltReason::Budget);
        }
        None
    }

    fn memory_estimate(&self) -> usize {
        let width = self.rules.alphabet().len();
        let words: usize = self.rules.rules().map(|r| r.lhs.len() + r.rhs.len()).sum::<usize>()
            + self.deferred.iter().map(|(l, r)| l.len() + r.len()).sum::<usize>();
        self.rules.trie_nodes() * (width + 1) * 4 + words * 2 + self.rules.slot_count() * 64
    }

    /// Consumes the state, returning the rules and differences collected.
    pub fn into_result(self, halt: HaltReason) -> KbResult {
        KbResult {
            rules: self.rules,
            diffs: self.diffs,
            halt,
            passes: self.passes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{fibonacci_presentation, Alphabet};

    fn z2() -> Presentation {
        let a = Alphabet::from_case_pairs(&["a", "b"]).unwrap();
        let rel = (a.parse_word("b a").unwrap(), a.parse_word("a b").unwrap());
        Presentation::new("z2", a, vec![rel]).unwrap()
    }

    #[test]
    fn free_group_of_rank_one() {
        let a = Alphabet::from_case_pairs(&["a"]).unwrap();
        let p = Presentation::new("z", a, vec![]).unwrap();
        let r = kb_complete(&p, &KbConfig::default());
        assert_eq!(r.halt, HaltReason::Confluent);
        assert_eq!(r.rules.len(), 2);
        let mut d: Vec<String> = r.diffs.diffs().iter().map(|w| p.alphabet.format_word(w)).collect();
        d.sort();
        assert_eq!(d, vec!["A", "IdWord", "a"]);
    }

    #[test]
    fn free_abelian_rank_two() {
        let p = z2();
        let r = kb_complete(&p, &KbConfig::default());
        assert_eq!(r.halt, HaltReason::Confluent);
        let a = &p.alphabet;
        let mut rules: Vec<String> = r
            .rules
            .rules()
            .map(|x| format!("{} -> {}", a.format_word(&x.lhs), a.format_word(&x.rhs)))
            .collect();
        rules.sort();
        assert_eq!(
            rules,
            vec![
                "A*a -> IdWord",
                "B*A -> A*B",
                "B*a -> a*B",
                "B*b -> IdWord",
                "a*A -> IdWord",
                "b*A -> A*b",
                "b*B -> IdWord",
                "b*a -> a*b"
            ]
        );
        assert!(r.rules.critical_pairs().is_empty());
        assert_eq!(
            r.rules.rewrite(&a.parse_word("b a B").unwrap()),
            a.parse_word("a").unwrap()
        );
    }

    #[test]
    fn finite_fibonacci_groups_complete() {
        for (n, expected_max) in [(3usize, 8usize), (5, 11)] {
            let p = fibonacci_presentation(n).unwrap();
            let r = kb_complete(&p, &KbConfig::default());
            assert_eq!(r.halt, HaltReason::Confluent, "F(2,{n})");
            assert!(r.rules.critical_pairs().is_empty());
            // every generator reduces to a short word
            for x in p.alphabet.letters() {
                assert!(r.rules.rewrite(&[x]).len() <= expected_max);
            }
        }
    }

    #[test]
    fn rhs_are_irreducible_and_oriented() {
        let p = fibonacci_presentation(5).unwrap();
        let r = kb_complete(&p, &KbConfig::default());
        for rule in r.rules.rules() {
            assert_eq!(
                crate::words::shortlex_cmp(&rule.rhs, &rule.lhs),
                std::cmp::Ordering::Less
            );
            assert_eq!(r.rules.rewrite(&rule.rhs), rule.rhs);
        }
    }

    #[test]
    fn differences_are_only_lost_by_merging() {
        let p = fibonacci_presentation(6).unwrap();
        let cfg = KbConfig {
            max_passes: Some(30),
            ..KbConfig::default()
        };
        let r = kb_complete(&p, &cfg);
        assert!(!r.passes.is_empty());
        for w in r.passes.windows(2) {
            // differences only disappear by merging
            assert!(w[0].wdiffs <= w[1].wdiffs + w[1].merged, "{} then {}", w[0], w[1]);
            assert!(w[0].eqns <= w[1].eqns);
        }
    }

    #[test]
    fn stats_line_format() {
        let s = KbPassStats {
            pass: 2,
            rules: 10,
            eqns: 40,
            wdiffs: 7,
            wdiffs_inv: 9,
            merged: 0,
        };
        assert_eq!(s.to_string(), "pass=2 rules=10 eqns=40 wdiffs=7 wdiffs_inv=9");
    }

    #[test]
    fn diffs_transitions_stay_inside() {
        let p = fibonacci_presentation(5).unwrap();
        let r = kb_complete(&p, &KbConfig::default());
        for (d, _, t) in r.diffs.transitions() {
            assert!((d as usize) < r.diffs.len() && (t as usize) < r.diffs.len());
        }
        assert_eq!(r.diffs.word(0), &Word::new());
    }

    #[test]
    fn shared_alphabet() {
        let p = z2();
        let r = kb_complete(&p, &KbConfig::default());
        assert!(std::sync::Arc::ptr_eq(r.rules.alphabet(), &p.alphabet));
    }
}
