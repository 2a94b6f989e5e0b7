//! Minimization of partial deterministic automata.
//!
//! The in-memory path is Hopcroft's partition refinement over the automaton
//! completed with the implicit sink (state 0). Large tables use Moore-style
//! rounds instead: each round reads the transition table once, row by row,
//! so the table can live in a temporary file and never be held in memory.
//! Both paths refine the initial partition by `(accepting, label)`.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;

use super::{Fsa, FsaAlphabet, FsaConfig, Label, State};
use crate::error::{Error, Result};

/// Sequential access to the rows of a transition table (states `1..=n`).
pub trait RowSource {
    fn num_states(&self) -> usize;
    fn num_symbols(&self) -> usize;
    fn for_each_row(&mut self, f: &mut dyn FnMut(State, &[State])) -> Result<()>;
}

struct FsaRows<'a>(&'a Fsa);

impl RowSource for FsaRows<'_> {
    fn num_states(&self) -> usize {
        self.0.num_states()
    }
    fn num_symbols(&self) -> usize {
        self.0.num_symbols()
    }
    fn for_each_row(&mut self, f: &mut dyn FnMut(State, &[State])) -> Result<()> {
        for s in 1..=self.0.num_states() as State {
            f(s, self.0.row(s));
        }
        Ok(())
    }
}

/// Transition table spilled to a temporary file in row order.
pub struct DiskTable {
    file: File,
    num_states: usize,
    nsym: usize,
}

impl RowSource for DiskTable {
    fn num_states(&self) -> usize {
        self.num_states
    }
    fn num_symbols(&self) -> usize {
        self.nsym
    }
    fn for_each_row(&mut self, f: &mut dyn FnMut(State, &[State])) -> Result<()> {
        self.file
            .seek(SeekFrom::Start(0))
            .map_err(|e| Error::io("<temporary table>", e))?;
        let mut reader = BufReader::with_capacity(1 << 20, &self.file);
        let mut bytes = vec![0u8; self.nsym * 4];
        let mut row = vec![0 as State; self.nsym];
        for s in 1..=self.num_states as State {
            reader
                .read_exact(&mut bytes)
                .map_err(|e| Error::io("<temporary table>", e))?;
            for (i, chunk) in bytes.chunks_exact(4).enumerate() {
                row[i] = u32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
            }
            f(s, &row);
        }
        Ok(())
    }
}

/// Row-order table writer that starts in memory and spills to a temporary
/// file once the table passes `threshold` bytes.
pub struct TableSink {
    nsym: usize,
    rows: usize,
    threshold: usize,
    tmp_dir: Option<std::path::PathBuf>,
    memory: Vec<State>,
    disk: Option<BufWriter<File>>,
}

pub enum Table {
    Memory(Vec<State>),
    Disk(DiskTable),
}

impl TableSink {
    pub fn new(nsym: usize, threshold: usize, tmp_dir: Option<&Path>) -> Self {
        TableSink {
            nsym,
            rows: 0,
            threshold,
            tmp_dir: tmp_dir.map(Path::to_path_buf),
            memory: Vec::new(),
            disk: None,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn is_spilled(&self) -> bool {
        self.disk.is_some()
    }

    pub fn push_row(&mut self, row: &[State]) -> Result<()> {
        debug_assert_eq!(row.len(), self.nsym);
        self.rows += 1;
        if self.disk.is_none() && (self.memory.len() + row.len()) * 4 > self.threshold {
            self.spill()?;
        }
        match &mut self.disk {
            Some(w) => write_row(w, row),
            None => {
                self.memory.extend_from_slice(row);
                Ok(())
            }
        }
    }

    fn spill(&mut self) -> Result<()> {
        let file = match &self.tmp_dir {
            Some(dir) => tempfile::tempfile_in(dir).map_err(|e| Error::io(dir, e))?,
            None => tempfile::tempfile().map_err(|e| Error::io("<temp dir>", e))?,
        };
        log::info!("spilling transition table to disk after {} rows", self.rows - 1);
        let mut w = BufWriter::with_capacity(1 << 20, file);
        for row in self.memory.chunks(self.nsym.max(1)) {
            write_row(&mut w, row)?;
        }
        self.memory = Vec::new();
        self.disk = Some(w);
        Ok(())
    }

    pub fn finish(self) -> Result<Table> {
        match self.disk {
            None => Ok(Table::Memory(self.memory)),
            Some(w) => {
                let file = w
                    .into_inner()
                    .map_err(|e| Error::io("<temporary table>", e.into_error()))?;
                Ok(Table::Disk(DiskTable {
                    file,
                    num_states: self.rows,
                    nsym: self.nsym,
                }))
            }
        }
    }
}

fn write_row(w: &mut BufWriter<File>, row: &[State]) -> Result<()> {
    for &t in row {
        w.write_all(&t.to_le_bytes())
            .map_err(|e| Error::io("<temporary table>", e))?;
    }
    Ok(())
}

/// Minimizes with default settings.
pub fn minimize(f: &Fsa) -> Fsa {
    minimize_with(f, &FsaConfig::default())
}

pub fn minimize_with(f: &Fsa, cfg: &FsaConfig) -> Fsa {
    if f.num_states() == 0 {
        return f.clone();
    }
    let (keys, info) = state_keys(f.num_states(), |s| f.is_accepting(s), |s| f.label(s));
    let labeled = f.has_labels();
    if estimated_bytes(f.num_states(), f.num_symbols()) > cfg.external_threshold {
        moore(f.alphabet().clone(), &mut FsaRows(f), &keys, &info, labeled).expect("in-memory rows cannot fail")
    } else {
        hopcroft(f, &keys, &info, labeled)
    }
}

/// Minimizes a table produced by a [`TableSink`]. `accepting` and `labels`
/// are indexed by state, with index 0 standing for the sink.
pub fn minimize_table(
    alphabet: FsaAlphabet,
    table: Table,
    accepting: &[bool],
    labels: Option<&[Vec<Label>]>,
    cfg: &FsaConfig,
) -> Result<Fsa> {
    let n = accepting.len() - 1;
    match table {
        Table::Memory(rows) => {
            let f = Fsa::from_rows(
                alphabet,
                n,
                rows,
                accepting[1..].to_vec(),
                labels.map(|l| l[1..].to_vec()),
            )?;
            Ok(minimize_with(&f, cfg))
        }
        Table::Disk(mut disk) => {
            let empty: Vec<Label> = Vec::new();
            let (keys, info) = state_keys(
                n,
                |s| accepting[s as usize],
                |s| labels.map_or(&empty[..], |l| &l[s as usize][..]),
            );
            moore(alphabet, &mut disk, &keys, &info, labels.is_some())
        }
    }
}

fn estimated_bytes(n: usize, nsym: usize) -> usize {
    // table plus inverse index plus inverse entries
    (n + 1).saturating_mul(nsym).saturating_mul(12)
}

/// Partition key per state (index 0 is the sink) and the key descriptions.
/// Key 0 is always `(false, [])`, the sink's key.
fn state_keys<'a>(
    n: usize,
    accepting: impl Fn(State) -> bool,
    label: impl Fn(State) -> &'a [Label],
) -> (Vec<u32>, Vec<(bool, Vec<Label>)>) {
    let mut info: Vec<(bool, Vec<Label>)> = vec![(false, Vec::new())];
    let mut index: HashMap<(bool, Vec<Label>), u32> = HashMap::new();
    index.insert((false, Vec::new()), 0);
    let mut keys = vec![0u32; n + 1];
    for s in 1..=n as State {
        let k = (accepting(s), label(s).to_vec());
        let id = match index.get(&k) {
            Some(&id) => id,
            None => {
                let id = info.len() as u32;
                index.insert(k.clone(), id);
                info.push(k);
                id
            }
        };
        keys[s as usize] = id;
    }
    (keys, info)
}

struct Partition {
    elems: Vec<u32>,
    loc: Vec<u32>,
    set_of: Vec<u32>,
    first: Vec<u32>,
    past: Vec<u32>,
    marked: Vec<u32>,
    touched: Vec<u32>,
}

impl Partition {
    /// Sets are the groups of equal keys, in key order.
    fn from_keys(keys: &[u32]) -> Self {
        let n = keys.len();
        let mut elems: Vec<u32> = (0..n as u32).collect();
        elems.sort_by_key(|&e| (keys[e as usize], e));
        let mut loc = vec![0u32; n];
        let mut set_of = vec![0u32; n];
        let (mut first, mut past) = (Vec::new(), Vec::new());
        for (i, &e) in elems.iter().enumerate() {
            loc[e as usize] = i as u32;
            if i == 0 || keys[e as usize] != keys[elems[i - 1] as usize] {
                if i > 0 {
                    past.push(i as u32);
                }
                first.push(i as u32);
            }
            set_of[e as usize] = (first.len() - 1) as u32;
        }
        past.push(n as u32);
        let sets = first.len();
        Partition {
            elems,
            loc,
            set_of,
            first,
            past,
            marked: vec![0; sets],
            touched: Vec::new(),
        }
    }

    fn num_sets(&self) -> usize {
        self.first.len()
    }

    fn size(&self, s: u32) -> u32 {
        self.past[s as usize] - self.first[s as usize]
    }

    fn mark(&mut self, e: u32) {
        let s = self.set_of[e as usize] as usize;
        let i = self.loc[e as usize] as usize;
        let j = (self.first[s] + self.marked[s]) as usize;
        if i < j {
            return;
        }
        let other = self.elems[j];
        self.elems[i] = other;
        self.loc[other as usize] = i as u32;
        self.elems[j] = e;
        self.loc[e as usize] = j as u32;
        if self.marked[s] == 0 {
            self.touched.push(s as u32);
        }
        self.marked[s] += 1;
    }

    /// Splits every touched set into marked and unmarked parts; the smaller
    /// part becomes a new set. Returns the new set ids.
    fn split(&mut self, created: &mut Vec<u32>) {
        while let Some(s) = self.touched.pop() {
            let s = s as usize;
            let j = self.first[s] + self.marked[s];
            if j == self.past[s] {
                self.marked[s] = 0;
                continue;
            }
            let z = self.first.len();
            if self.marked[s] <= self.past[s] - j {
                self.first.push(self.first[s]);
                self.past.push(j);
                self.first[s] = j;
            } else {
                self.past.push(self.past[s]);
                self.first.push(j);
                self.past[s] = j;
            }
            for i in self.first[z]..self.past[z] {
                self.set_of[self.elems[i as usize] as usize] = z as u32;
            }
            self.marked[s] = 0;
            self.marked.push(0);
            created.push(z as u32);
        }
    }
}

fn hopcroft(f: &Fsa, keys: &[u32], info: &[(bool, Vec<Label>)], labeled: bool) -> Fsa {
    let n = f.num_states();
    let nsym = f.num_symbols();
    let total = n + 1;
    // inverse transitions of the completed automaton, indexed by sym * total + target
    let mut start = vec![0u32; nsym * total + 1];
    for s in 0..=n as State {
        for a in 0..nsym {
            let t = if s == 0 { 0 } else { f.delta(s, a as u32) };
            start[a * total + t as usize + 1] += 1;
        }
    }
    for i in 1..start.len() {
        start[i] += start[i - 1];
    }
    let mut fill = start.clone();
    let mut sources = vec![0u32; nsym * total];
    for s in 0..=n as State {
        for a in 0..nsym {
            let t = if s == 0 { 0 } else { f.delta(s, a as u32) };
            let k = a * total + t as usize;
            sources[fill[k] as usize] = s;
            fill[k] += 1;
        }
    }
    drop(fill);

    let mut part = Partition::from_keys(keys);
    let mut in_work = vec![true; part.num_sets()];
    let mut work: Vec<u32> = (0..part.num_sets() as u32).collect();
    if let Some(largest) = (0..part.num_sets() as u32).max_by_key(|&s| part.size(s)) {
        work.retain(|&s| s != largest);
        in_work[largest as usize] = false;
    }
    let mut members = Vec::new();
    let mut created = Vec::new();
    while let Some(b) = work.pop() {
        in_work[b as usize] = false;
        members.clear();
        members.extend_from_slice(&part.elems[part.first[b as usize] as usize..part.past[b as usize] as usize]);
        for a in 0..nsym {
            for &t in &members {
                let k = a * total + t as usize;
                for &s in &sources[start[k] as usize..start[k + 1] as usize] {
                    part.mark(s);
                }
            }
            created.clear();
            part.split(&mut created);
            for &z in &created {
                in_work.push(true);
                work.push(z);
            }
        }
    }

    let classes = part.num_sets();
    let class_of = |s: State| part.set_of[s as usize] as usize;
    let rep: Vec<State> = (0..classes).map(|c| part.elems[part.first[c] as usize]).collect();
    quotient(
        f.alphabet().clone(),
        classes,
        class_of(0),
        class_of(1),
        |c| rep[c],
        |s| f.row(s),
        |c| {
            let k = keys[rep[c] as usize] as usize;
            info[k].clone()
        },
        labeled,
        class_of,
    )
}

/// Builds the quotient automaton given a class assignment, then trims and
/// renumbers it canonically.
#[allow(clippy::too_many_arguments)]
fn quotient<'a>(
    alphabet: FsaAlphabet,
    classes: usize,
    sink_class: usize,
    initial_class: usize,
    rep: impl Fn(usize) -> State,
    row: impl Fn(State) -> &'a [State],
    key: impl Fn(usize) -> (bool, Vec<Label>),
    labeled: bool,
    class_of: impl Fn(State) -> usize,
) -> Fsa {
    if initial_class == sink_class {
        return Fsa::empty(alphabet);
    }
    // initial class gets id 1
    let mut id = vec![0 as State; classes];
    let mut order = vec![initial_class];
    id[initial_class] = 1;
    for c in 0..classes {
        if c != sink_class && c != initial_class {
            order.push(c);
            id[c] = order.len() as State;
        }
    }
    let nsym = alphabet.num_symbols();
    let m = order.len();
    let mut rows = vec![0 as State; m * nsym];
    let mut accepting = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for (i, &c) in order.iter().enumerate() {
        let r = rep(c);
        for (a, &t) in row(r).iter().enumerate() {
            rows[i * nsym + a] = id[class_of(t)];
        }
        let (acc, lab) = key(c);
        accepting.push(acc);
        labels.push(lab);
    }
    Fsa::from_rows(alphabet, m, rows, accepting, if labeled { Some(labels) } else { None })
        .expect("quotient is well formed")
        .trim()
}

fn moore(
    alphabet: FsaAlphabet,
    source: &mut dyn RowSource,
    keys: &[u32],
    info: &[(bool, Vec<Label>)],
    labeled: bool,
) -> Result<Fsa> {
    let n = source.num_states();
    let nsym = source.num_symbols();
    let mut class: Vec<u32> = keys.to_vec();
    let mut count = {
        let mut seen: Vec<u32> = keys.to_vec();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    };
    let sink_row = vec![0 as State; nsym];
    let mut round = 0;
    loop {
        round += 1;
        let mut map: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut next = vec![0u32; n + 1];
        let mut sig: Vec<u32> = Vec::with_capacity(nsym + 1);
        {
            let mut visit = |s: State, row: &[State]| {
                sig.clear();
                sig.push(class[s as usize]);
                sig.extend(row.iter().map(|&t| class[t as usize]));
                let fresh = map.len() as u32;
                let id = match map.get(sig.as_slice()) {
                    Some(&id) => id,
                    None => {
                        map.insert(sig.clone(), fresh);
                        fresh
                    }
                };
                next[s as usize] = id;
            };
            visit(0, &sink_row);
            source.for_each_row(&mut visit)?;
        }
        let new_count = map.len();
        log::debug!("moore round {round}: {new_count} classes");
        if new_count == count {
            // stable: the signature keys describe the quotient directly
            let mut new_of_old = vec![0u32; count.max(keys.iter().copied().max().unwrap_or(0) as usize + 1)];
            for (sig, &id) in &map {
                new_of_old[sig[0] as usize] = id;
            }
            let mut rep_sig: Vec<Option<&Vec<u32>>> = vec![None; new_count];
            for (sig, &id) in &map {
                rep_sig[id as usize] = Some(sig);
            }
            let mut rep_key = vec![u32::MAX; new_count];
            for s in 0..=n {
                let c = next[s] as usize;
                if rep_key[c] == u32::MAX {
                    rep_key[c] = keys[s];
                }
            }
            let sink_class = next[0] as usize;
            let initial_class = if n == 0 { sink_class } else { next[1] as usize };
            // materialize one row per class
            let mut class_rows = vec![0 as State; new_count * nsym];
            for c in 0..new_count {
                let sig = rep_sig[c].expect("every class has a signature");
                for a in 0..nsym {
                    // targets use the pre-round numbering; translate
                    class_rows[c * nsym + a] = new_of_old[sig[1 + a] as usize];
                }
            }
            let rows_of = |c: State| &class_rows[c as usize * nsym..(c as usize + 1) * nsym];
            return Ok(quotient(
                alphabet,
                new_count,
                sink_class,
                initial_class,
                |c| c as State,
                rows_of,
                |c| info[rep_key[c] as usize].clone(),
                labeled,
                |t| t as usize,
            ));
        }
        class = next;
        count = new_count;
    }
}
