//! Ultimately periodic history structures.
//!
//! A structure is the model side of the logic: a strictly increasing
//! sequence of instants starting at 0, given as a finite prefix of steps
//! plus a repeated loop, with the set of atoms holding at the instant each
//! step leaves from. Instants are derived by chaining the step successor,
//! which builds in the two history constraints: micro successors differ by
//! exactly one infinitesimal, and the standard instants visited are the
//! consecutive naturals from 0.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::nstime::{NsInstant, StepKind};

/// Atoms holding at an instant.
pub type Label = BTreeSet<String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryStep {
    pub kind: StepKind,
    pub label: Label,
}

impl HistoryStep {
    pub fn new(kind: StepKind, atoms: &[&str]) -> HistoryStep {
        HistoryStep { kind, label: atoms.iter().map(|s| s.to_string()).collect() }
    }
}

/// An ultimately periodic history: `prefix · cycle^ω` of steps. The cycle is
/// non-empty. A structure is Zeno iff the cycle contains no macro step: the
/// instants then accumulate below the next standard number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    prefix: Vec<HistoryStep>,
    cycle: Vec<HistoryStep>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("the loop must contain at least one step")]
    EmptyLoop,
    #[error("step {step}: atom '{atom}' is not declared")]
    UndeclaredAtom { step: usize, atom: String },
    #[error("structure file, line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Validate and build a structure over a declared atom set.
pub fn build_structure(
    prefix: Vec<HistoryStep>,
    cycle: Vec<HistoryStep>,
    declared: &BTreeSet<String>,
) -> Result<Structure, StructureError> {
    if cycle.is_empty() {
        return Err(StructureError::EmptyLoop);
    }
    for (i, step) in prefix.iter().chain(cycle.iter()).enumerate() {
        for atom in &step.label {
            if !declared.contains(atom) {
                return Err(StructureError::UndeclaredAtom { step: i, atom: atom.clone() });
            }
        }
    }
    Ok(Structure { prefix, cycle })
}

impl Structure {
    /// Build without an atom-declaration check.
    pub fn new(prefix: Vec<HistoryStep>, cycle: Vec<HistoryStep>) -> Structure {
        assert!(!cycle.is_empty(), "the loop must contain at least one step");
        Structure { prefix, cycle }
    }

    pub fn prefix(&self) -> &[HistoryStep] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[HistoryStep] {
        &self.cycle
    }

    /// Step at unrolled index `i`.
    pub fn step(&self, i: usize) -> &HistoryStep {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// True iff the loop contains no macro step, so the history accumulates
    /// at a finite instant.
    pub fn is_zeno(&self) -> bool {
        !self.cycle.iter().any(|s| s.kind == StepKind::Macro)
    }

    /// The first `n` instants of the history.
    pub fn instants(&self, n: usize) -> Vec<NsInstant> {
        let mut out = Vec::with_capacity(n);
        let mut t = NsInstant::ZERO;
        for i in 0..n {
            out.push(t);
            t = t.step(self.step(i).kind);
        }
        out
    }

    /// Atoms used anywhere in the structure.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for s in self.prefix.iter().chain(self.cycle.iter()) {
            out.extend(s.label.iter().cloned());
        }
        out
    }

    /// Canonical form: minimal loop period, then pull loop-equal steps out
    /// of the prefix tail. Two structures denote the same infinite history
    /// iff their canonical forms are equal.
    pub fn canonicalize(&self) -> Structure {
        let (prefix, cycle) = canonical_lasso(self.prefix.clone(), self.cycle.clone());
        Structure { prefix, cycle }
    }
}

/// Minimal representation of `prefix · cycle^ω`.
pub(crate) fn canonical_lasso<T: Clone + Eq>(
    mut prefix: Vec<T>,
    mut cycle: Vec<T>,
) -> (Vec<T>, Vec<T>) {
    // minimal period
    let n = cycle.len();
    for d in 1..=n {
        if n % d == 0 && (d..n).all(|i| cycle[i] == cycle[i - d]) {
            cycle.truncate(d);
            break;
        }
    }
    // absorb the prefix tail into the cycle rotation
    while let Some(last) = prefix.last() {
        if *last == cycle[cycle.len() - 1] {
            prefix.pop();
            cycle.rotate_right(1);
        } else {
            break;
        }
    }
    (prefix, cycle)
}

/// Deterministic pseudo-random structure with `prefix + loop <= max_steps`.
/// Step kinds are drawn evenly, so all-micro (Zeno) loops and mixed loops
/// both occur; labels are uniform subsets of `atoms`.
pub fn random_structure(seed: u64, max_steps: usize, atoms: &[&str]) -> Structure {
    assert!(max_steps >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cycle_len = rng.gen_range(1..=max_steps);
    let prefix_len = rng.gen_range(0..=max_steps - cycle_len);
    let mut draw = |n: usize| -> Vec<HistoryStep> {
        (0..n)
            .map(|_| {
                let kind = if rng.gen_bool(0.5) { StepKind::Macro } else { StepKind::Micro };
                let label: Label = atoms
                    .iter()
                    .filter(|_| rng.gen_bool(0.5))
                    .map(|s| s.to_string())
                    .collect();
                HistoryStep { kind, label }
            })
            .collect()
    };
    let prefix = draw(prefix_len);
    let cycle = draw(cycle_len);
    Structure { prefix, cycle }
}

/// Render in the structure text format:
///
/// ```text
/// prefix 1
/// loop 2
/// 0: micro p q
/// 1: macro p
/// 2: micro
/// ```
pub fn render_structure(s: &Structure) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "prefix {}", s.prefix.len());
    let _ = writeln!(out, "loop {}", s.cycle.len());
    for (i, step) in s.prefix.iter().chain(s.cycle.iter()).enumerate() {
        let _ = write!(out, "{}: {}", i, step.kind);
        for atom in &step.label {
            let _ = write!(out, " {}", atom);
        }
        out.push('\n');
    }
    out
}

/// Parse the structure text format. Lines starting with `#` are comments.
pub fn parse_structure(text: &str) -> Result<Structure, StructureError> {
    let err = |line: usize, message: String| StructureError::Format { line, message };
    let mut prefix_len: Option<usize> = None;
    let mut cycle_len: Option<usize> = None;
    let mut steps: Vec<HistoryStep> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let head = words.next().unwrap();
        match head {
            "prefix" => {
                let n = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| err(lineno, "expected 'prefix N'".into()))?;
                prefix_len = Some(n);
            }
            "loop" => {
                let n = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| err(lineno, "expected 'loop N'".into()))?;
                cycle_len = Some(n);
            }
            _ => {
                let idx: usize = head
                    .strip_suffix(':')
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| err(lineno, format!("expected 'INDEX:', got '{}'", head)))?;
                if idx != steps.len() {
                    return Err(err(lineno, format!("expected index {}, got {}", steps.len(), idx)));
                }
                let kind = match words.next() {
                    Some("micro") => StepKind::Micro,
                    Some("macro") => StepKind::Macro,
                    other => {
                        return Err(err(
                            lineno,
                            format!("expected 'micro' or 'macro', got '{}'", other.unwrap_or("")),
                        ))
                    }
                };
                let label: Label = words.map(|w| w.to_string()).collect();
                steps.push(HistoryStep { kind, label });
            }
        }
    }
    let p = prefix_len.ok_or_else(|| err(0, "missing 'prefix N' header".into()))?;
    let l = cycle_len.ok_or_else(|| err(0, "missing 'loop N' header".into()))?;
    if l == 0 {
        return Err(StructureError::EmptyLoop);
    }
    if steps.len() != p + l {
        return Err(err(0, format!("expected {} step lines, found {}", p + l, steps.len())));
    }
    let cycle = steps.split_off(p);
    Ok(Structure { prefix: steps, cycle })
}
