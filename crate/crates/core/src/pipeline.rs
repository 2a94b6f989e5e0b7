//! Pipeline driver: completion, synthesis of the automatic structure, the
//! axiom check and the minimal rule automaton, writing artifacts, a run log
//! and a checksummed checkpoint into an output directory.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::autstruct::{
    build_multiplier, build_wd_machine, build_word_acceptor, minimal_rule_acceptor, partial_correctness_check,
    repair_loop, wd_machine_from_fsa, AutomaticStructure, Event, Multiplier, StructConfig, StructureReducer,
    WordDifferenceMachine,
};
use crate::error::{Error, Result};
use crate::fsa::{read_fsa, write_fsa, FsaConfig};
use crate::kb::{HaltReason, KbConfig, KnuthBendix, RuleSet, WordDifferenceSet};
use crate::words::{fibonacci_presentation, Presentation};

/// Environment variable naming the default temporary directory.
pub const TMP_ENV: &str = "AUTOSTRUCT_TMP";

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub kb: KbConfig,
    pub fsa: FsaConfig,
    pub max_iterations: usize,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            kb: KbConfig::default(),
            fsa: FsaConfig::default(),
            max_iterations: 20,
            out_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    fn structure(&self) -> StructConfig {
        let mut fsa = self.fsa.clone();
        fsa.tmp_dir = Some(self.tmp_dir());
        StructConfig {
            kb: self.kb.clone(),
            fsa,
            max_iterations: self.max_iterations,
        }
    }

    /// Explicit temp directory, else the environment default, else the
    /// output directory.
    pub fn tmp_dir(&self) -> PathBuf {
        self.fsa
            .tmp_dir
            .clone()
            .or_else(|| std::env::var_os(TMP_ENV).map(PathBuf::from))
            .unwrap_or_else(|| self.out_dir.clone())
    }

    /// Settings that influence the computation, for the log header.
    pub fn header(&self) -> String {
        format!(
            "max_eqns={} wd_window={} pass_size={} max_word_len={} max_passes={} memory_budget={} max_states={} external_threshold={} max_iterations={}",
            self.kb.max_equations,
            self.kb.stabilization_window,
            self.kb.pass_size,
            self.kb.max_word_len.map_or("auto".to_string(), |n| n.to_string()),
            self.kb.max_passes.map_or("none".to_string(), |n| n.to_string()),
            self.kb.memory_budget,
            self.fsa.max_states,
            self.fsa.external_threshold,
            self.max_iterations,
        )
    }
}

/// Reads `fib N`, `fibN` or a presentation file.
pub fn parse_input(input: &[String]) -> Result<Presentation> {
    let fib = |s: &str| -> Result<Presentation> {
        let n = s
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::parse(0, format!("bad Fibonacci index {s:?}")))?;
        fibonacci_presentation(n)
    };
    match input {
        [kw, n] if kw == "fib" => fib(n),
        [one] if one.starts_with("fib") && !Path::new(one).exists() => fib(&one[3..]),
        [path] => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            Presentation::parse(&text)
        }
        _ => Err(Error::parse(0, "expected `fib N` or a presentation file")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Kb,
    Structure,
    Verified,
    Done,
}

impl Stage {
    fn name(self) -> &'static str {
        match self {
            Stage::Kb => "kb",
            Stage::Structure => "structure",
            Stage::Verified => "verified",
            Stage::Done => "done",
        }
    }

    fn parse(s: &str) -> Option<Stage> {
        Some(match s {
            "kb" => Stage::Kb,
            "structure" => Stage::Structure,
            "verified" => Stage::Verified,
            "done" => Stage::Done,
            _ => return None,
        })
    }
}

/// Contents of `<name>.ckpt`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub name: String,
    pub presentation_sha256: String,
    pub stage: Stage,
    /// Artifact extension to sha256 of its contents.
    pub files: BTreeMap<String, String>,
}

impl Checkpoint {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "name {}\npresentation_sha256 {}\nstage {}\n",
            self.name,
            self.presentation_sha256,
            self.stage.name()
        );
        for (ext, sum) in &self.files {
            s.push_str(&format!("file {ext} {sum}\n"));
        }
        s
    }

    pub fn parse(text: &str, path: &Path) -> Result<Checkpoint> {
        let bad = |m: &str| Error::CorruptCheckpoint {
            path: path.to_path_buf(),
            message: m.to_string(),
        };
        let mut name = None;
        let mut sha = None;
        let mut stage = None;
        let mut files = BTreeMap::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                ["name", n] => name = Some(n.to_string()),
                ["presentation_sha256", h] => sha = Some(h.to_string()),
                ["stage", s] => stage = Some(Stage::parse(s).ok_or_else(|| bad("unknown stage"))?),
                ["file", ext, h] => {
                    files.insert(ext.to_string(), h.to_string());
                }
                _ => return Err(bad(&format!("unreadable line {line:?}"))),
            }
        }
        Ok(Checkpoint {
            name: name.ok_or_else(|| bad("missing name"))?,
            presentation_sha256: sha.ok_or_else(|| bad("missing presentation hash"))?,
            stage: stage.ok_or_else(|| bad("missing stage"))?,
            files,
        })
    }

    /// Checks the presentation hash and every recorded file checksum.
    pub fn validate(&self, dir: &Path) -> Result<()> {
        let bad = |m: String| Error::CorruptCheckpoint {
            path: dir.join(format!("{}.ckpt", self.name)),
            message: m,
        };
        let pres = artifact_path(dir, &self.name, "pres");
        let text = fs::read(&pres).map_err(|e| bad(format!("cannot read {}: {e}", pres.display())))?;
        if sha256_hex(&text) != self.presentation_sha256 {
            return Err(bad("presentation does not match the checkpoint".into()));
        }
        for (ext, sum) in &self.files {
            let p = artifact_path(dir, &self.name, ext);
            let data = fs::read(&p).map_err(|e| bad(format!("cannot read {}: {e}", p.display())))?;
            if &sha256_hex(&data) != sum {
                return Err(bad(format!("checksum mismatch for {}", p.display())));
            }
        }
        Ok(())
    }
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

pub fn artifact_path(dir: &Path, name: &str, ext: &str) -> PathBuf {
    dir.join(format!("{name}.{ext}"))
}

/// Exclusive lock on the temp directory, released on drop.
struct TmpLock(PathBuf);

impl TmpLock {
    fn acquire(dir: &Path) -> Result<TmpLock> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("autostruct.lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(TmpLock(path))
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Locked(path)),
            Err(e) => Err(Error::io(&path, e)),
        }
    }
}

impl Drop for TmpLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

/// Output directory state of one run.
struct Run {
    dir: PathBuf,
    name: String,
    pres_sha: String,
    files: BTreeMap<String, String>,
    log: File,
    _lock: TmpLock,
}

impl Run {
    fn open(dir: &Path, name: &str, pres_text: &str, cfg: &RunConfig, fresh: bool) -> Result<Run> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let lock = TmpLock::acquire(&cfg.tmp_dir())?;
        let log_path = artifact_path(dir, name, "log");
        let log = OpenOptions::new()
            .create(true)
            .write(true)
            .append(!fresh)
            .truncate(fresh)
            .open(&log_path)
            .map_err(|e| Error::io(&log_path, e))?;
        Ok(Run {
            dir: dir.to_path_buf(),
            name: name.to_string(),
            pres_sha: sha256_hex(pres_text.as_bytes()),
            files: BTreeMap::new(),
            log,
            _lock: lock,
        })
    }

    fn line(&mut self, s: &str) -> Result<()> {
        writeln!(self.log, "{s}")
            .and_then(|_| self.log.flush())
            .map_err(|e| Error::io(artifact_path(&self.dir, &self.name, "log"), e))
    }

    fn write(&mut self, ext: &str, content: &str) -> Result<()> {
        let path = artifact_path(&self.dir, &self.name, ext);
        fs::write(&path, content).map_err(|e| Error::io(&path, e))?;
        if ext != "pres" {
            self.files.insert(ext.to_string(), sha256_hex(content.as_bytes()));
        }
        Ok(())
    }

    fn checkpoint(&mut self, stage: Stage) -> Result<()> {
        let ck = Checkpoint {
            name: self.name.clone(),
            presentation_sha256: self.pres_sha.clone(),
            stage,
            files: self.files.clone(),
        };
        let path = artifact_path(&self.dir, &self.name, "ckpt");
        fs::write(&path, ck.to_text()).map_err(|e| Error::io(&path, e))
    }

    fn write_kb(&mut self, kb: &KnuthBendix) -> Result<()> {
        self.write("rules", &kb.rules().to_text())?;
        let dm = build_wd_machine(kb.diffs(), kb.rules())?;
        self.write("kbdiff", &write_fsa(&format!("{}_kbdiff", self.name), dm.fsa()))?;
        self.checkpoint(Stage::Kb)
    }

    fn write_structure(&mut self, s: &AutomaticStructure) -> Result<()> {
        let n = self.name.clone();
        self.write("diff", &write_fsa(&format!("{n}_diff"), s.machine.fsa()))?;
        self.write("wa", &write_fsa(&format!("{n}_wa"), &s.acceptor))?;
        self.write("mult", &write_fsa(&format!("{n}_mult"), &s.multiplier.fsa))?;
        Ok(())
    }
}

/// Result of a completed run.
#[derive(Debug)]
pub struct RunOutcome {
    pub name: String,
    pub structure: Option<AutomaticStructure>,
    pub verified: bool,
}

/// Runs the whole pipeline on a presentation. Input errors surface before
/// anything is written.
pub fn run_pipeline(p: &Presentation, cfg: &RunConfig) -> Result<RunOutcome> {
    let pres_text = p.to_text();
    let mut run = Run::open(&cfg.out_dir, &p.name, &pres_text, cfg, true)?;
    run.line(&format!("# autostruct auto {}", p.name))?;
    run.line(&format!("# {}", cfg.header()))?;
    run.write("pres", &pres_text)?;
    let scfg = cfg.structure();
    let mut kb = KnuthBendix::new(p, scfg.kb.clone());
    let halt = loop {
        let h = kb.run_pass();
        run.line(&format!("kb {}", kb.passes().last().expect("a pass ran")))?;
        if let Some(h) = h {
            break h;
        }
    };
    run.line(&format!("kb halt={halt} rules={}", kb.rules().len()))?;
    run.write_kb(&kb)?;
    continue_from_kb(&mut run, p, kb, halt == HaltReason::Confluent, &scfg)
}

fn continue_from_kb(
    run: &mut Run,
    p: &Presentation,
    mut kb: KnuthBendix,
    confluent: bool,
    scfg: &StructConfig,
) -> Result<RunOutcome> {
    let mut failure: Option<Error> = None;
    let result = {
        let mut observer = |e: Event<'_>| {
            if failure.is_some() {
                return;
            }
            let r = match e {
                Event::KbPass(st) => run.line(&format!("kb {st}")),
                Event::KbHalted(h, kb) => run
                    .line(&format!("kb halt={h} rules={}", kb.rules().len()))
                    .and_then(|_| run.write_kb(kb)),
                Event::Round(s) => {
                    let st = s.pass_log.last().expect("round has stats");
                    run.line(&st.to_string())
                        .and_then(|_| run.write_structure(s))
                        .and_then(|_| {
                            if s.is_verified() {
                                run.line("axioms=pass").and_then(|_| run.checkpoint(Stage::Verified))
                            } else if st.check_ok {
                                run.line("axioms=fail")
                            } else {
                                Ok(())
                            }
                        })
                }
            };
            if let Err(e) = r {
                failure = Some(e);
            }
        };
        repair_loop(p, &mut kb, confluent, scfg, &mut observer)
    };
    if let Some(e) = failure {
        return Err(e);
    }
    match result {
        Ok(s) => finish(run, s, &scfg.fsa),
        Err(e) => {
            run.line(&format!("error={e}"))?;
            run.line("verified=false")?;
            Err(e)
        }
    }
}

fn finish(run: &mut Run, mut s: AutomaticStructure, cfg: &FsaConfig) -> Result<RunOutcome> {
    let mr = minimal_rule_acceptor(&s, cfg)?;
    let n = run.name.clone();
    run.write("minrules", &write_fsa(&format!("{n}_minrules"), &mr.fsa))?;
    let minimal = minimal_machine(&s, &mr.diffs)?;
    run.write("mindiff", &write_fsa(&format!("{n}_mindiff"), minimal.fsa()))?;
    run.line(&format!("minrules={} mindiffs={}", mr.fsa.num_states(), mr.diffs.len()))?;
    s.minimal = Some(minimal);
    run.checkpoint(Stage::Done)?;
    run.line("verified=true")?;
    Ok(RunOutcome {
        name: run.name.clone(),
        verified: true,
        structure: Some(s),
    })
}

/// Difference machine over a minimal difference set, with every transition
/// between its members.
pub fn minimal_machine(s: &AutomaticStructure, minimal: &WordDifferenceSet) -> Result<WordDifferenceMachine> {
    let reducer = StructureReducer::new(&s.acceptor, &s.machine).with_multiplier(&s.multiplier.fsa);
    let mut wd = minimal.clone();
    wd.saturate(&reducer);
    build_wd_machine(&wd, &reducer)
}

fn find_checkpoint(dir: &Path) -> Result<PathBuf> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut found: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "ckpt"))
        .collect();
    found.sort();
    match found.len() {
        1 => Ok(found.pop().expect("one entry")),
        0 => Err(Error::CorruptCheckpoint {
            path: dir.to_path_buf(),
            message: "no checkpoint found".into(),
        }),
        _ => Err(Error::CorruptCheckpoint {
            path: dir.to_path_buf(),
            message: "more than one checkpoint in the directory".into(),
        }),
    }
}

/// Continues a run from the checkpoint in `dir`.
pub fn resume(dir: &Path, cfg: &RunConfig) -> Result<RunOutcome> {
    let ck_path = find_checkpoint(dir)?;
    let text = fs::read_to_string(&ck_path).map_err(|e| Error::io(&ck_path, e))?;
    let ck = Checkpoint::parse(&text, &ck_path)?;
    ck.validate(dir)?;
    let pres_path = artifact_path(dir, &ck.name, "pres");
    let pres_text = fs::read_to_string(&pres_path).map_err(|e| Error::io(&pres_path, e))?;
    let p = Presentation::parse(&pres_text)?;
    if ck.stage == Stage::Done {
        return Ok(RunOutcome {
            name: ck.name,
            structure: None,
            verified: true,
        });
    }
    let mut cfg = cfg.clone();
    cfg.out_dir = dir.to_path_buf();
    let scfg = cfg.structure();
    let mut run = Run::open(dir, &ck.name, &pres_text, &cfg, false)?;
    run.files = ck.files.clone();
    run.line(&format!("# resume from stage {}", ck.stage.name()))?;
    match ck.stage {
        Stage::Kb | Stage::Structure => {
            let rules = load_rules(dir, &ck.name, &p)?;
            let mut kb = KnuthBendix::new(&p, scfg.kb.clone());
            for r in rules.rules() {
                kb.add_equation(&r.lhs, &r.rhs);
            }
            let kbdiff = artifact_path(dir, &ck.name, "kbdiff");
            if kbdiff.exists() {
                let f = read_artifact(&kbdiff, &p)?;
                let dm = wd_machine_from_fsa(f, kb.rules())?;
                kb.absorb_diffs(dm.diffs());
            }
            continue_from_kb(&mut run, &p, kb, false, &scfg)
        }
        Stage::Verified => {
            let mut s = load_structure(&dir.join(&ck.name))?;
            s.assume_verified();
            finish(&mut run, s, &scfg.fsa)
        }
        Stage::Done => unreachable!("handled above"),
    }
}

fn read_artifact(path: &Path, p: &Presentation) -> Result<crate::fsa::Fsa> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(read_fsa(&text, Some(&p.alphabet))?.fsa)
}

fn load_rules(dir: &Path, name: &str, p: &Presentation) -> Result<RuleSet> {
    let path = artifact_path(dir, name, "rules");
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    RuleSet::parse(&text, p.alphabet.clone())
}

fn split_prefix(prefix: &Path) -> (PathBuf, String) {
    let dir = prefix.parent().map(Path::to_path_buf).unwrap_or_default();
    let dir = if dir.as_os_str().is_empty() {
        PathBuf::from(".")
    } else {
        dir
    };
    let name = prefix
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    (dir, name)
}

/// Loads `<prefix>.pres`, `.rules`, `.diff`, `.wa`, `.mult` and, when
/// present, `.mindiff`. The structure counts as verified when the
/// checkpoint records a passing axiom check and all checksums match.
pub fn load_structure(prefix: &Path) -> Result<AutomaticStructure> {
    let (dir, name) = split_prefix(prefix);
    let pres_path = artifact_path(&dir, &name, "pres");
    let pres_text = fs::read_to_string(&pres_path).map_err(|e| Error::io(&pres_path, e))?;
    let p = Presentation::parse(&pres_text)?;
    let rules = load_rules(&dir, &name, &p)?;
    let machine = wd_machine_from_fsa(read_artifact(&artifact_path(&dir, &name, "diff"), &p)?, &rules)?;
    let w = read_artifact(&artifact_path(&dir, &name, "wa"), &p)?;
    let m = read_artifact(&artifact_path(&dir, &name, "mult"), &p)?;
    let mut s = AutomaticStructure::new(p.clone(), w, Multiplier { fsa: m, raw_states: 0 }, machine, rules);
    let mindiff = artifact_path(&dir, &name, "mindiff");
    if mindiff.exists() {
        s.minimal = Some(wd_machine_from_fsa(read_artifact(&mindiff, &p)?, &s.rules)?);
    }
    let ck_path = artifact_path(&dir, &name, "ckpt");
    if let Ok(text) = fs::read_to_string(&ck_path) {
        let ck = Checkpoint::parse(&text, &ck_path)?;
        if ck.stage >= Stage::Verified && ck.validate(&dir).is_ok() {
            s.assume_verified();
        }
    }
    Ok(s)
}

/// Single stage: completion only. Writes `.pres`, `.rules`, `.kbdiff`.
pub fn stage_kb(p: &Presentation, cfg: &RunConfig) -> Result<HaltReason> {
    let pres_text = p.to_text();
    let mut run = Run::open(&cfg.out_dir, &p.name, &pres_text, cfg, true)?;
    run.line(&format!("# autostruct kb {}", p.name))?;
    run.line(&format!("# {}", cfg.header()))?;
    run.write("pres", &pres_text)?;
    let mut kb = KnuthBendix::new(p, cfg.kb.clone());
    let halt = loop {
        let h = kb.run_pass();
        run.line(&format!("kb {}", kb.passes().last().expect("a pass ran")))?;
        if let Some(h) = h {
            break h;
        }
    };
    run.line(&format!("kb halt={halt} rules={}", kb.rules().len()))?;
    run.write_kb(&kb)?;
    Ok(halt)
}

struct StageInputs {
    dir: PathBuf,
    name: String,
    p: Presentation,
    rules: RuleSet,
    files: BTreeMap<String, String>,
}

fn stage_inputs(prefix: &Path) -> Result<StageInputs> {
    let (dir, name) = split_prefix(prefix);
    let pres_path = artifact_path(&dir, &name, "pres");
    let pres_text = fs::read_to_string(&pres_path).map_err(|e| Error::io(&pres_path, e))?;
    let p = Presentation::parse(&pres_text)?;
    let rules = load_rules(&dir, &name, &p)?;
    let ck_path = artifact_path(&dir, &name, "ckpt");
    let files = match fs::read_to_string(&ck_path) {
        Ok(text) => Checkpoint::parse(&text, &ck_path)?.files,
        Err(_) => BTreeMap::new(),
    };
    Ok(StageInputs {
        dir,
        name,
        p,
        rules,
        files,
    })
}

fn stage_run(inp: &StageInputs, cfg: &RunConfig) -> Result<Run> {
    let mut cfg = cfg.clone();
    cfg.out_dir = inp.dir.clone();
    let mut run = Run::open(&inp.dir, &inp.name, &inp.p.to_text(), &cfg, false)?;
    run.files = inp.files.clone();
    Ok(run)
}

/// Current difference set of a stage directory: `.diff` when present, else
/// the completion differences closed under inversion.
fn stage_diffs(inp: &StageInputs) -> Result<WordDifferenceSet> {
    let diff = artifact_path(&inp.dir, &inp.name, "diff");
    let path = if diff.exists() {
        diff
    } else {
        artifact_path(&inp.dir, &inp.name, "kbdiff")
    };
    let dm = wd_machine_from_fsa(read_artifact(&path, &inp.p)?, &inp.rules)?;
    let mut wd = dm.diffs().clone();
    wd.close_under_inversion(&inp.rules);
    wd.saturate(&inp.rules);
    Ok(wd)
}

/// Single stage: builds the difference machine and acceptor. Writes
/// `.diff` and `.wa`; returns the acceptor size.
pub fn stage_wa(prefix: &Path, cfg: &RunConfig) -> Result<usize> {
    let inp = stage_inputs(prefix)?;
    let wd = stage_diffs(&inp)?;
    let dm = build_wd_machine(&wd, &inp.rules)?;
    let w = build_word_acceptor(&dm, &cfg.structure().fsa)?;
    let mut run = stage_run(&inp, cfg)?;
    let n = inp.name.clone();
    run.write("diff", &write_fsa(&format!("{n}_diff"), dm.fsa()))?;
    run.write("wa", &write_fsa(&format!("{n}_wa"), &w))?;
    run.line(&format!("wa wdiffs={} W={}", wd.len(), w.num_states()))?;
    run.checkpoint(Stage::Structure)?;
    Ok(w.num_states())
}

/// Single stage: builds the multiplier from `.diff` and `.wa`. Returns
/// (unminimized, minimized) sizes.
pub fn stage_mult(prefix: &Path, cfg: &RunConfig) -> Result<(usize, usize)> {
    let inp = stage_inputs(prefix)?;
    let dm = wd_machine_from_fsa(
        read_artifact(&artifact_path(&inp.dir, &inp.name, "diff"), &inp.p)?,
        &inp.rules,
    )?;
    let w = read_artifact(&artifact_path(&inp.dir, &inp.name, "wa"), &inp.p)?;
    let m = build_multiplier(&dm, &w, &cfg.structure().fsa)?;
    let mut run = stage_run(&inp, cfg)?;
    run.write("mult", &write_fsa(&format!("{}_mult", inp.name), &m.fsa))?;
    run.line(&format!("mult M_raw={} M={}", m.raw_states, m.fsa.num_states()))?;
    run.checkpoint(Stage::Structure)?;
    Ok((m.raw_states, m.fsa.num_states()))
}

/// Single stage: partial correctness check. On failure the repair
/// differences are added to `.diff` so `wa`, `mult`, `check` can be rerun.
/// Returns the number of failing letters.
pub fn stage_check(prefix: &Path, cfg: &RunConfig) -> Result<usize> {
    let inp = stage_inputs(prefix)?;
    let dm = wd_machine_from_fsa(
        read_artifact(&artifact_path(&inp.dir, &inp.name, "diff"), &inp.p)?,
        &inp.rules,
    )?;
    let w = read_artifact(&artifact_path(&inp.dir, &inp.name, "wa"), &inp.p)?;
    let m = read_artifact(&artifact_path(&inp.dir, &inp.name, "mult"), &inp.p)?;
    let outcome = partial_correctness_check(&w, &m, &dm, &inp.rules, &cfg.structure().fsa)?;
    let mut run = stage_run(&inp, cfg)?;
    if outcome.is_ok() {
        run.line("check=ok")?;
        return Ok(0);
    }
    let mut wd = dm.diffs().clone();
    for f in &outcome.failures {
        for (u, v) in &f.equations {
            wd.add_equation(u, v, &inp.rules);
        }
    }
    wd.close_under_inversion(&inp.rules);
    wd.saturate(&inp.rules);
    let grown = build_wd_machine(&wd, &inp.rules)?;
    run.write("diff", &write_fsa(&format!("{}_diff", inp.name), grown.fsa()))?;
    run.line(&format!(
        "check=fail letters={} wdiffs={}",
        outcome.failures.len(),
        wd.len()
    ))?;
    run.checkpoint(Stage::Structure)?;
    Ok(outcome.failures.len())
}

/// Single stage: axiom check of the stored structure. On success the
/// checkpoint is advanced to the verified stage.
pub fn stage_axioms(prefix: &Path, cfg: &RunConfig) -> Result<bool> {
    let inp = stage_inputs(prefix)?;
    let mut s = load_structure(prefix)?;
    let ok = s.verify(&cfg.structure().fsa)?;
    let mut run = stage_run(&inp, cfg)?;
    run.line(if ok { "axioms=pass" } else { "axioms=fail" })?;
    if ok {
        run.checkpoint(Stage::Verified)?;
    }
    Ok(ok)
}
