//! Line-oriented text form of a compiled schedule.
//!
//! ```text
//! schedule 4 8                 n_a n_d
//! atom 0 3,0                   initial site of every atom
//! move 0:1,0>0,0 1:2,0>1,0     one AOD step, atom:from>to
//! cz 3 0-4 1-5 | 6 7           Gray step, address-data pairs | spectators
//! global H
//! local 5 RY -0.25
//! measure
//! ```

use std::fmt::Write as _;

use crate::circuit::{GateKind, Pauli, QCrankConfig};
use crate::compiler::{plan_layout, AtomMove, CzPulse, Instruction, MoveStep, Schedule, Site};
use crate::error::{Error, Result};

fn gate_text(kind: &GateKind) -> String {
    match kind {
        GateKind::Ry(a) => format!("RY {a:?}"),
        other => other.name().to_string(),
    }
}

pub fn write_schedule(schedule: &Schedule) -> String {
    let cfg = schedule.cfg();
    let mut s = String::new();
    writeln!(s, "schedule {} {}", cfg.n_a(), cfg.n_d()).unwrap();
    for (atom, site) in schedule.initial().positions().iter().enumerate() {
        writeln!(s, "atom {atom} {site}").unwrap();
    }
    for ins in schedule.instructions() {
        match ins {
            Instruction::Move(step) => {
                s.push_str("move");
                for m in &step.moves {
                    write!(s, " {}:{}>{}", m.atom, m.from, m.to).unwrap();
                }
            }
            Instruction::GlobalCZ(p) => {
                write!(s, "cz {}", p.step).unwrap();
                for (a, d) in &p.pairs {
                    write!(s, " {a}-{d}").unwrap();
                }
                s.push_str(" |");
                for q in &p.spectators {
                    write!(s, " {q}").unwrap();
                }
            }
            Instruction::GlobalU { kind } => write!(s, "global {}", gate_text(kind)).unwrap(),
            Instruction::LocalU { qubit, kind } => {
                write!(s, "local {qubit} {}", gate_text(kind)).unwrap()
            }
            Instruction::MeasureAll => s.push_str("measure"),
        }
        s.push('\n');
    }
    s
}

struct LineParser {
    line: usize,
}

impl LineParser {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn num<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(format!("bad number `{s}`")))
    }

    fn site(&self, s: &str) -> Result<Site> {
        let (x, y) = s
            .split_once(',')
            .ok_or_else(|| self.err(format!("bad site `{s}`")))?;
        Ok(Site::new(self.num(x)?, self.num(y)?))
    }

    fn gate(&self, words: &[&str]) -> Result<GateKind> {
        Ok(match words {
            ["RY", a] => GateKind::Ry(self.num(a)?),
            ["H"] => GateKind::H,
            ["I"] => GateKind::Pauli(Pauli::I),
            ["X"] => GateKind::Pauli(Pauli::X),
            ["Y"] => GateKind::Pauli(Pauli::Y),
            ["Z"] => GateKind::Pauli(Pauli::Z),
            _ => return Err(self.err(format!("unknown single-qubit gate `{}`", words.join(" ")))),
        })
    }
}

pub fn parse_schedule(text: &str) -> Result<Schedule> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (n, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty schedule".into(),
    })?;
    let p = LineParser { line: n + 1 };
    let cfg = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["schedule", a, d] => QCrankConfig::new(p.num(a)?, p.num(d)?)?,
        _ => return Err(p.err("expected `schedule <n_a> <n_d>`")),
    };
    let layout = plan_layout(cfg);
    let mut schedule = Schedule::new(layout.clone());
    let mut atoms_seen = 0;
    for (n, line) in lines {
        let p = LineParser { line: n + 1 };
        let words: Vec<&str> = line.split_whitespace().collect();
        let ins = match words[0] {
            "atom" => {
                let [_, atom, site] = words[..] else {
                    return Err(p.err("expected `atom <id> <x,y>`"));
                };
                let atom: usize = p.num(atom)?;
                if atom != atoms_seen
                    || atom >= layout.n_atoms()
                    || p.site(site)? != layout.position(atom)
                {
                    return Err(p.err(format!("atom line does not match the {cfg} layout")));
                }
                atoms_seen += 1;
                continue;
            }
            "move" => {
                let mut moves = Vec::new();
                for w in &words[1..] {
                    let (atom, rest) = w
                        .split_once(':')
                        .ok_or_else(|| p.err(format!("bad move `{w}`")))?;
                    let (from, to) = rest
                        .split_once('>')
                        .ok_or_else(|| p.err(format!("bad move `{w}`")))?;
                    moves.push(AtomMove {
                        atom: p.num(atom)?,
                        from: p.site(from)?,
                        to: p.site(to)?,
                    });
                }
                Instruction::Move(MoveStep::new(moves))
            }
            "cz" => {
                let step = p.num(words.get(1).ok_or_else(|| p.err("missing step"))?)?;
                let bar = words
                    .iter()
                    .position(|w| *w == "|")
                    .ok_or_else(|| p.err("missing `|`"))?;
                let mut pairs = Vec::new();
                for w in &words[2..bar] {
                    let (a, d) = w
                        .split_once('-')
                        .ok_or_else(|| p.err(format!("bad pair `{w}`")))?;
                    pairs.push((p.num(a)?, p.num(d)?));
                }
                let spectators = words[bar + 1..]
                    .iter()
                    .map(|w| p.num(w))
                    .collect::<Result<_>>()?;
                Instruction::GlobalCZ(CzPulse {
                    step,
                    pairs,
                    spectators,
                })
            }
            "global" => Instruction::GlobalU {
                kind: p.gate(&words[1..])?,
            },
            "local" => {
                let qubit = p.num(words.get(1).ok_or_else(|| p.err("missing qubit"))?)?;
                Instruction::LocalU {
                    qubit,
                    kind: p.gate(&words[2..])?,
                }
            }
            "measure" => Instruction::MeasureAll,
            other => return Err(p.err(format!("unknown instruction `{other}`"))),
        };
        schedule.push(ins);
    }
    if atoms_seen != 0 && atoms_seen != layout.n_atoms() {
        return Err(Error::Parse {
            line: 0,
            msg: format!("{atoms_seen} atom lines for {} atoms", layout.n_atoms()),
        });
    }
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_dpqa, compute_angles};
    use crate::compiler::lower;

    #[test]
    fn round_trip() {
        for (a, d) in [(1, 1), (2, 4), (3, 6)] {
            let cfg = QCrankConfig::new(a, d).unwrap();
            let data: Vec<f64> = (0..cfg.capacity())
                .map(|k| (k as f64 * 0.37).sin())
                .collect();
            let s = lower(
                &build_dpqa(cfg, &compute_angles(&data, cfg).unwrap()).unwrap(),
                cfg,
            )
            .unwrap();
            let text = write_schedule(&s);
            let back = parse_schedule(&text).unwrap();
            assert_eq!(back, s);
            assert_eq!(write_schedule(&back), text);
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert!(matches!(
            parse_schedule("schedule 1 1\nfly 0"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_schedule("schedule 1 1\nlocal 0 RX 1"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_schedule("schedule 1 1\natom 0 9,9"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_schedule("").is_err());
    }
}
