//! Shortlex automatic structures: the word acceptor W and the labeled
//! multiplier M built from a word-difference set, the partial correctness
//! repair loop, axiom checking, and the minimal rule automaton.

mod acceptor;
mod axioms;
mod check;
mod minrules;
mod multiplier;
mod reduce;
mod synth;
mod wdm;

use std::fmt;

use crate::fsa::{Fsa, FsaAlphabet, FsaConfig, State};
use crate::kb::{KbConfig, KbPassStats, RuleSet, WordDifferenceSet};
use crate::words::{Letter, Presentation};

pub use acceptor::{build_word_acceptor, smaller_equivalent};
pub use axioms::{axiom_check, axiom_report, AxiomOutcome};
pub use check::{partial_correctness_check, CheckFailure, CheckOutcome};
pub use minrules::{minimal_rule_acceptor, MinimalRules};
pub use multiplier::{build_multiplier, Multiplier};
pub use reduce::{multiply_right, StructureReducer};
pub use synth::{repair_loop, synthesize, synthesize_with, Event};
pub use wdm::{build_wd_machine, wd_machine_from_fsa, WordDifferenceMachine};

#[derive(Debug, Clone)]
pub struct StructConfig {
    pub kb: KbConfig,
    pub fsa: FsaConfig,
    /// Cap on acceptor/multiplier/check rounds.
    pub max_iterations: usize,
}

impl Default for StructConfig {
    fn default() -> Self {
        StructConfig {
            kb: KbConfig::default(),
            fsa: FsaConfig::default(),
            max_iterations: 20,
        }
    }
}

/// Statistics of one acceptor/multiplier/check round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PassStats {
    pub pass: usize,
    pub wdiffs: usize,
    pub w_states: usize,
    pub m_raw: usize,
    pub m_states: usize,
    pub check_ok: bool,
}

impl fmt::Display for PassStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pass={} wdiffs={} W={} M_raw={} M={} check={}",
            self.pass,
            self.wdiffs,
            self.w_states,
            self.m_raw,
            self.m_states,
            if self.check_ok { "ok" } else { "fail" }
        )
    }
}

/// The pair (W, M) with the difference machine and rules they came from.
#[derive(Debug, Clone)]
pub struct AutomaticStructure {
    pub presentation: Presentation,
    pub acceptor: Fsa,
    pub multiplier: Multiplier,
    pub machine: WordDifferenceMachine,
    /// Machine over the minimal differences, preferred for reduction.
    pub minimal: Option<WordDifferenceMachine>,
    pub rules: RuleSet,
    pub kb_log: Vec<KbPassStats>,
    pub pass_log: Vec<PassStats>,
    verified: bool,
}

impl AutomaticStructure {
    pub fn new(
        presentation: Presentation,
        acceptor: Fsa,
        multiplier: Multiplier,
        machine: WordDifferenceMachine,
        rules: RuleSet,
    ) -> Self {
        AutomaticStructure {
            presentation,
            acceptor,
            multiplier,
            machine,
            minimal: None,
            rules,
            kb_log: Vec::new(),
            pass_log: Vec::new(),
            verified: false,
        }
    }

    pub fn diffs(&self) -> &WordDifferenceSet {
        self.machine.diffs()
    }

    /// Difference machine used to reduce words.
    pub fn reduction_machine(&self) -> &WordDifferenceMachine {
        self.minimal.as_ref().unwrap_or(&self.machine)
    }

    /// Marks the structure verified without rerunning the axiom check, for
    /// structures restored from a checkpoint that recorded a passing check.
    pub fn assume_verified(&mut self) {
        self.verified = true;
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Runs the axiom check and records the result.
    pub fn verify(&mut self, cfg: &FsaConfig) -> crate::Result<bool> {
        self.verified = axiom_check(self, cfg)?;
        Ok(self.verified)
    }

    /// Clears the verified flag, e.g. after the automata were edited.
    pub fn invalidate(&mut self) {
        self.verified = false;
    }

    /// Multiplier component for a letter or the identity label.
    pub fn multiplier_for(&self, g: crate::fsa::Label) -> Fsa {
        self.multiplier.fsa.label_component(g)
    }
}

/// Pair automaton accepting `(w, w)` for every `w` accepted by `w_fsa`.
pub fn diagonal(w_fsa: &Fsa) -> Fsa {
    let base = w_fsa.alphabet().base.clone();
    let pair = FsaAlphabet::pair(base.clone());
    let n = w_fsa.num_states();
    let nsym = pair.num_symbols();
    let mut rows = vec![0 as State; n * nsym];
    for s in 1..=n as State {
        for x in 0..base.len() as Letter {
            let t = w_fsa.delta(s, x as crate::fsa::Symbol);
            rows[(s as usize - 1) * nsym + pair.pair_symbol(Some(x), Some(x)) as usize] = t;
        }
    }
    let accepting = (1..=n as State).map(|s| w_fsa.is_accepting(s)).collect();
    Fsa::from_rows(pair, n, rows, accepting, None)
        .expect("diagonal rows are in range")
        .trim()
}
