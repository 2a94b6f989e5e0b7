//! Line-oriented text format for automata.
//!
//! ```text
//! fsa <name>
//! alphabet: single|pair <letters...> pad: _
//! states: <n> initial: 1
//! accepting: <list or "all">
//! labels: <state>: <letters...>
//! t <state> <symbol> <state>
//! end
//! ```
//!
//! Pair symbols are written `x,y` with `_` as the padding mark. The identity
//! label is written `IdWord`.

use std::fmt::Write as _;
use std::sync::Arc;

use super::{Fsa, FsaAlphabet, Kind, Label, State, Symbol, IDENTITY_LABEL};
use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter, IDENTITY_NAME};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FsaFile {
    pub name: String,
    pub fsa: Fsa,
}

pub fn write_fsa(name: &str, f: &Fsa) -> String {
    let alpha = f.alphabet();
    let base = &alpha.base;
    let mut out = String::new();
    let _ = writeln!(out, "fsa {name}");
    let kind = match alpha.kind {
        Kind::Single => "single",
        Kind::Pair => "pair",
    };
    let _ = writeln!(out, "alphabet: {kind} {} pad: _", base.names().join(" "));
    let _ = writeln!(out, "states: {} initial: 1", f.num_states());
    if f.num_states() > 0 && f.all_accepting() {
        let _ = writeln!(out, "accepting: all");
    } else {
        let list: Vec<String> = f.accepting_states().map(|s| s.to_string()).collect();
        if list.is_empty() {
            out.push_str("accepting:\n");
        } else {
            let _ = writeln!(out, "accepting: {}", list.join(" "));
        }
    }
    if f.has_labels() {
        for s in 1..=f.num_states() as State {
            let label = f.label(s);
            if label.is_empty() {
                continue;
            }
            let names: Vec<&str> = label.iter().map(|&l| label_name(base, l)).collect();
            let _ = writeln!(out, "labels: {s}: {}", names.join(" "));
        }
    }
    for s in 1..=f.num_states() as State {
        for (sym, &t) in f.row(s).iter().enumerate() {
            if t != 0 {
                let _ = writeln!(out, "t {s} {} {t}", alpha.symbol_name(sym as Symbol));
            }
        }
    }
    out.push_str("end\n");
    out
}

fn label_name(base: &Alphabet, l: Label) -> &str {
    if l == IDENTITY_LABEL {
        IDENTITY_NAME
    } else {
        base.name(l as Letter)
    }
}

/// Parses an automaton. When `base` is given, the file's letters must match
/// it exactly; otherwise inverses are inferred by the case convention.
pub fn read_fsa(text: &str, base: Option<&Arc<Alphabet>>) -> Result<FsaFile> {
    let mut name: Option<String> = None;
    let mut alphabet: Option<FsaAlphabet> = None;
    let mut num_states: Option<usize> = None;
    let mut accepting: Option<Vec<bool>> = None;
    let mut labels: Option<Vec<Vec<Label>>> = None;
    let mut rows: Vec<State> = Vec::new();
    let mut ended = false;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if ended {
            return Err(Error::parse(lineno, "content after `end`"));
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match key {
            "fsa" => {
                if name.is_some() {
                    return Err(Error::parse(lineno, "duplicate `fsa` header"));
                }
                name = Some(rest.to_string());
            }
            "alphabet:" => {
                let mut toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() < 3 || toks[toks.len() - 2] != "pad:" || toks[toks.len() - 1] != "_" {
                    return Err(Error::parse(
                        lineno,
                        "expected `alphabet: single|pair <letters> pad: _`",
                    ));
                }
                toks.truncate(toks.len() - 2);
                let kind = match toks[0] {
                    "single" => Kind::Single,
                    "pair" => Kind::Pair,
                    other => return Err(Error::parse(lineno, format!("unknown alphabet kind {other:?}"))),
                };
                let letters: Vec<String> = toks[1..].iter().map(|s| s.to_string()).collect();
                let base = match base {
                    Some(b) => {
                        if b.names() != letters.as_slice() {
                            return Err(Error::AlphabetMismatch(format!(
                                "file letters {} differ from {}",
                                letters.join(" "),
                                b.names().join(" ")
                            )));
                        }
                        b.clone()
                    }
                    None => Arc::new(case_alphabet(letters).map_err(|e| Error::parse(lineno, e.to_string()))?),
                };
                alphabet = Some(FsaAlphabet { kind, base });
            }
            "states:" => {
                let alpha = alphabet
                    .as_ref()
                    .ok_or_else(|| Error::parse(lineno, "`states:` before `alphabet:`"))?;
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 3 || toks[1] != "initial:" || toks[2] != "1" {
                    return Err(Error::parse(lineno, "expected `states: <n> initial: 1`"));
                }
                let n: usize = toks[0]
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad state count {:?}", toks[0])))?;
                num_states = Some(n);
                rows = vec![0; n * alpha.num_symbols()];
            }
            "accepting:" => {
                let n = num_states.ok_or_else(|| Error::parse(lineno, "`accepting:` before `states:`"))?;
                let mut acc = vec![false; n];
                if rest == "all" {
                    acc.iter_mut().for_each(|a| *a = true);
                } else {
                    for tok in rest.split_whitespace() {
                        let s = parse_state(tok, n, lineno)?;
                        acc[s as usize - 1] = true;
                    }
                }
                accepting = Some(acc);
            }
            "labels:" => {
                let n = num_states.ok_or_else(|| Error::parse(lineno, "`labels:` before `states:`"))?;
                let alpha = alphabet.as_ref().expect("alphabet precedes states");
                let (state, list) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::parse(lineno, "expected `labels: <state>: <letters>`"))?;
                let s = parse_state(state.trim(), n, lineno)?;
                let mut entry = Vec::new();
                for tok in list.split_whitespace() {
                    let l = if tok == IDENTITY_NAME || tok == "_" {
                        IDENTITY_LABEL
                    } else {
                        alpha
                            .base
                            .letter(tok)
                            .ok_or_else(|| Error::parse(lineno, format!("unknown label letter {tok:?}")))?
                    };
                    entry.push(l);
                }
                labels.get_or_insert_with(|| vec![Vec::new(); n])[s as usize - 1] = entry;
            }
            "t" => {
                let n = num_states.ok_or_else(|| Error::parse(lineno, "transition before `states:`"))?;
                let alpha = alphabet.as_ref().expect("alphabet precedes states");
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(Error::parse(lineno, "expected `t <state> <symbol> <state>`"));
                }
                let s = parse_state(toks[0], n, lineno)?;
                let sym = parse_symbol(alpha, toks[1], lineno)?;
                let t = parse_state(toks[2], n, lineno)?;
                let slot = &mut rows[(s as usize - 1) * alpha.num_symbols() + sym as usize];
                if *slot != 0 && *slot != t {
                    return Err(Error::parse(lineno, "nondeterministic transition"));
                }
                *slot = t;
            }
            "end" => ended = true,
            other => return Err(Error::parse(lineno, format!("unknown record {other:?}"))),
        }
    }
    if !ended {
        return Err(Error::parse(text.lines().count(), "missing `end`"));
    }
    let name = name.ok_or_else(|| Error::parse(1, "missing `fsa` header"))?;
    let alphabet = alphabet.ok_or_else(|| Error::parse(1, "missing `alphabet:`"))?;
    let n = num_states.ok_or_else(|| Error::parse(1, "missing `states:`"))?;
    let accepting = accepting.unwrap_or_else(|| vec![false; n]);
    let fsa = Fsa::from_rows(alphabet, n, rows, accepting, labels)?;
    Ok(FsaFile { name, fsa })
}

fn parse_state(tok: &str, n: usize, line: usize) -> Result<State> {
    match tok.parse::<usize>() {
        Ok(s) if s >= 1 && s <= n => Ok(s as State),
        _ => Err(Error::parse(line, format!("bad state {tok:?}"))),
    }
}

fn parse_symbol(alpha: &FsaAlphabet, tok: &str, line: usize) -> Result<Symbol> {
    let letter = |t: &str| {
        alpha
            .base
            .letter(t)
            .ok_or_else(|| Error::parse(line, format!("unknown letter {t:?}")))
    };
    match alpha.kind {
        Kind::Single => letter(tok).map(Symbol::from),
        Kind::Pair => {
            let (l, r) = tok
                .split_once(',')
                .ok_or_else(|| Error::parse(line, format!("pair symbol {tok:?} needs a comma")))?;
            let side = |t: &str| if t == "_" { Ok(None) } else { letter(t).map(Some) };
            let (l, r) = (side(l)?, side(r)?);
            if l.is_none() && r.is_none() {
                return Err(Error::parse(line, "(_,_) is not a symbol"));
            }
            Ok(alpha.pair_symbol(l, r))
        }
    }
}

/// Pairs each letter with its case-swapped partner; a letter with no
/// partner is taken to be its own inverse.
fn case_alphabet(names: Vec<String>) -> Result<Alphabet> {
    let inverse: Vec<Letter> = names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let swapped: String = name
                .chars()
                .map(|c| {
                    if c.is_uppercase() {
                        c.to_lowercase().next().unwrap_or(c)
                    } else {
                        c.to_uppercase().next().unwrap_or(c)
                    }
                })
                .collect();
            names
                .iter()
                .position(|n| *n == swapped && swapped != *name)
                .unwrap_or(i) as Letter
        })
        .collect();
    Alphabet::new(names, inverse)
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::*;

    #[test]
    fn round_trip_single() {
        let f = build(&a_inv(), 3, &[(1, 0, 2), (1, 1, 3), (2, 0, 2)], &[1, 2]);
        let text = write_fsa("z", &f);
        assert!(text.contains("accepting: 1 2\n"));
        let back = read_fsa(&text, None).unwrap();
        assert_eq!(back.name, "z");
        assert_eq!(back.fsa, f);
    }

    #[test]
    fn round_trip_pair_with_labels() {
        let base = a_inv();
        let alpha = FsaAlphabet::pair(base.clone());
        let nsym = alpha.num_symbols();
        let mut rows = vec![0; 2 * nsym];
        rows[alpha.pair_symbol(Some(0), None) as usize] = 2;
        let f = Fsa::from_rows(
            alpha,
            2,
            rows,
            vec![true, true],
            Some(vec![vec![IDENTITY_LABEL], vec![0, 1]]),
        )
        .unwrap();
        let text = write_fsa("m", &f);
        assert!(text.contains("t 1 a,_ 2"));
        assert!(text.contains("labels: 1: IdWord"));
        let back = read_fsa(&text, Some(&base)).unwrap();
        assert_eq!(back.fsa, f);
    }

    #[test]
    fn empty_automaton_round_trips() {
        let f = Fsa::empty(FsaAlphabet::single(a_inv()));
        let text = write_fsa("e", &f);
        assert!(text.contains("accepting:\n"));
        assert_eq!(read_fsa(&text, None).unwrap().fsa, f);
    }

    #[test]
    fn rejects_bad_input() {
        let base = a_inv();
        let good = write_fsa("z", &build(&base, 1, &[(1, 0, 1)], &[1]));
        assert!(read_fsa(&good.replace("t 1 a 1", "t 1 b 1"), None).is_err());
        assert!(read_fsa(&good.replace("t 1 a 1", "t 1 a 2"), None).is_err());
        assert!(read_fsa(&good.replace("end\n", ""), None).is_err());
        let other = Arc::new(Alphabet::from_case_pairs(&["x"]).unwrap());
        assert!(matches!(read_fsa(&good, Some(&other)), Err(Error::AlphabetMismatch(_))));
    }

    #[test]
    fn inverses_follow_case() {
        let text = "fsa x\nalphabet: single a1 A1 b pad: _\nstates: 1 initial: 1\naccepting: all\nend\n";
        let f = read_fsa(text, None).unwrap().fsa;
        let base = &f.alphabet().base;
        assert_eq!(base.inverse(0), 1);
        assert_eq!(base.inverse(2), 2);
    }
}
