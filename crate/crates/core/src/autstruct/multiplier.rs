use std::collections::HashMap;

use super::wdm::WordDifferenceMachine;
use crate::error::{Error, Result};
use crate::fsa::{minimize_table, Fsa, FsaAlphabet, FsaConfig, Label, State, Symbol, TableSink};

/// The labeled multiplier and the size of the product it was minimized
/// from.
#[derive(Debug, Clone)]
pub struct Multiplier {
    pub fsa: Fsa,
    pub raw_states: usize,
}

/// Product of two copies of the acceptor (one per coordinate) with the
/// difference machine. A product state is accepting when its difference
/// stands for a generator or the identity, and is labeled with those
/// generators. The unminimized table is streamed into a [`TableSink`] so it
/// can spill to disk.
pub fn build_multiplier(dm: &WordDifferenceMachine, w: &Fsa, cfg: &FsaConfig) -> Result<Multiplier> {
    let base = dm.diffs().alphabet().clone();
    let alphabet = FsaAlphabet::pair(base.clone());
    let nsym = alphabet.num_symbols();
    if w.num_states() == 0 {
        return Ok(Multiplier {
            fsa: Fsa::empty(alphabet),
            raw_states: 0,
        });
    }
    // acceptor state 0 marks a coordinate that has ended
    let decoded: Vec<(Option<u16>, Option<u16>)> = (0..nsym as Symbol)
        .map(|s| {
            let p = alphabet.decode(s);
            (p.left, p.right)
        })
        .collect();

    let mut index: HashMap<(State, State, u32), State> = HashMap::new();
    let mut keys: Vec<(State, State, u32)> = Vec::new();
    let start = (1, 1, 0u32);
    index.insert(start, 1);
    keys.push(start);
    let mut sink = TableSink::new(nsym, cfg.external_threshold, cfg.tmp_dir.as_deref());
    let mut accepting = vec![false];
    let mut labels: Vec<Vec<Label>> = vec![Vec::new()];
    let mut row = vec![0 as State; nsym];
    let mut next = 0usize;
    while next < keys.len() {
        let (su, sv, d) = keys[next];
        next += 1;
        for (sym, &(x, y)) in decoded.iter().enumerate() {
            let su2 = match x {
                Some(x) if su != 0 => w.delta(su, x as Symbol),
                Some(_) => 0,
                None => 0,
            };
            let sv2 = match y {
                Some(y) if sv != 0 => w.delta(sv, y as Symbol),
                Some(_) => 0,
                None => 0,
            };
            let target = if (x.is_some() && su2 == 0) || (y.is_some() && sv2 == 0) {
                None
            } else {
                dm.delta(d, sym as Symbol)
            };
            row[sym] = match target {
                None => 0,
                Some(d2) => {
                    let key = (su2, sv2, d2);
                    match index.get(&key) {
                        Some(&s) => s,
                        None => {
                            if keys.len() >= cfg.max_states {
                                return Err(Error::Budget {
                                    what: "multiplier states",
                                    limit: cfg.max_states,
                                });
                            }
                            keys.push(key);
                            let s = keys.len() as State;
                            index.insert(key, s);
                            s
                        }
                    }
                }
            };
        }
        sink.push_row(&row)?;
        let l = dm.generator_labels(d);
        accepting.push(!l.is_empty());
        labels.push(l.to_vec());
    }
    drop(index);
    let raw_states = keys.len();
    log::debug!(
        "multiplier: {raw_states} states before minimization{}",
        if sink.is_spilled() { " (table on disk)" } else { "" }
    );
    let table = sink.finish()?;
    let fsa = minimize_table(alphabet, table, &accepting, Some(&labels), cfg)?;
    Ok(Multiplier { fsa, raw_states })
}
