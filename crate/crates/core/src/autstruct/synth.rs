use super::{
    build_multiplier, build_wd_machine, build_word_acceptor, partial_correctness_check, AutomaticStructure, PassStats,
    StructConfig,
};
use crate::error::{Error, Result};
use crate::kb::{HaltReason, KbPassStats, KnuthBendix};
use crate::words::{Presentation, Word};

/// Progress reported by [`synthesize_with`].
pub enum Event<'a> {
    KbPass(&'a KbPassStats),
    KbHalted(HaltReason, &'a KnuthBendix),
    /// A structure was built and checked; `verified` is set on the last
    /// round when the axiom check passed.
    Round(&'a AutomaticStructure),
}

pub fn synthesize(p: &Presentation, cfg: &StructConfig) -> Result<AutomaticStructure> {
    synthesize_with(p, cfg, &mut |_| {})
}

/// Completion followed by the repair loop.
pub fn synthesize_with(
    p: &Presentation,
    cfg: &StructConfig,
    observer: &mut dyn FnMut(Event<'_>),
) -> Result<AutomaticStructure> {
    let mut kb = KnuthBendix::new(p, cfg.kb.clone());
    let halt = loop {
        let h = kb.run_pass();
        observer(Event::KbPass(kb.passes().last().expect("a pass ran")));
        if let Some(h) = h {
            break h;
        }
    };
    observer(Event::KbHalted(halt, &kb));
    repair_loop(p, &mut kb, halt == HaltReason::Confluent, cfg, observer)
}

/// Builds W and M from the current differences, checks them, and on
/// failure adds the differences of the repair equations and rebuilds.
/// When a failed round yields no new differences, completion resumes
/// until the differences change. Ends with the axiom check.
pub fn repair_loop(
    p: &Presentation,
    kb: &mut KnuthBendix,
    mut confluent: bool,
    cfg: &StructConfig,
    observer: &mut dyn FnMut(Event<'_>),
) -> Result<AutomaticStructure> {
    let mut extra: Vec<(Word, Word)> = Vec::new();
    let mut log: Vec<PassStats> = Vec::new();
    for round in 1..=cfg.max_iterations {
        let rules = kb.rules().clone();
        let mut wd = kb.diffs().clone();
        for (u, v) in &extra {
            wd.add_equation(u, v, &rules);
        }
        wd.close_under_inversion(&rules);
        wd.saturate(&rules);
        let dm = build_wd_machine(&wd, &rules)?;
        let w = build_word_acceptor(&dm, &cfg.fsa)?;
        let m = build_multiplier(&dm, &w, &cfg.fsa)?;
        let outcome = partial_correctness_check(&w, &m.fsa, &dm, &rules, &cfg.fsa)?;
        let stats = PassStats {
            pass: round,
            wdiffs: wd.len(),
            w_states: w.num_states(),
            m_raw: m.raw_states,
            m_states: m.fsa.num_states(),
            check_ok: outcome.is_ok(),
        };
        log::info!("{stats}");
        log.push(stats);
        let mut s = AutomaticStructure::new(p.clone(), w, m, dm, rules);
        s.kb_log = kb.passes().to_vec();
        s.pass_log = log.clone();

        if outcome.is_ok() {
            if s.verify(&cfg.fsa)? {
                observer(Event::Round(&s));
                return Ok(s);
            }
            observer(Event::Round(&s));
            log::warn!("axiom check failed; resuming completion");
            if confluent || !advance(kb, &mut confluent, observer) {
                return Err(Error::AxiomCheckFailed);
            }
            continue;
        }
        observer(Event::Round(&s));

        let before = wd.len();
        let mut grown = wd.clone();
        for f in &outcome.failures {
            for (u, v) in &f.equations {
                grown.add_equation(u, v, &s.rules);
            }
            extra.extend(f.equations.iter().cloned());
        }
        grown.close_under_inversion(&s.rules);
        if grown.len() == before {
            log::info!("check failed without new differences; resuming completion");
            if confluent || !advance(kb, &mut confluent, observer) {
                return Err(Error::RepairStalled);
            }
        }
    }
    Err(Error::IterationCap(cfg.max_iterations))
}

/// Runs completion passes until the inverse-closed difference count
/// changes or completion becomes confluent. False on a budget halt.
fn advance(kb: &mut KnuthBendix, confluent: &mut bool, observer: &mut dyn FnMut(Event<'_>)) -> bool {
    let start = kb.passes().last().map(|p| p.wdiffs_inv);
    loop {
        let h = kb.run_pass();
        let last = *kb.passes().last().expect("a pass ran");
        observer(Event::KbPass(&last));
        match h {
            Some(HaltReason::Confluent) => {
                *confluent = true;
                observer(Event::KbHalted(HaltReason::Confluent, kb));
                return true;
            }
            Some(HaltReason::Budget) => {
                observer(Event::KbHalted(HaltReason::Budget, kb));
                return false;
            }
            _ => {}
        }
        if Some(last.wdiffs_inv) != start {
            return true;
        }
    }
}
