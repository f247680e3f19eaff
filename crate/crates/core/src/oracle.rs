//! Ground-truth evaluation of formulae over history structures.
//!
//! Evaluation works on the interleaved sequence of *positions*: one position
//! per history element, plus one *gap* position after every macro step. The
//! gap stands for the infinitely many stuttering non-standard instants
//! strictly between a history element and its standard successor; all
//! formula values agree across those instants, so one representative is
//! enough, and it carries the label of the element it follows (atoms are
//! piecewise constant between history elements).
//!
//! Positional rules beyond the boolean ones:
//! - `Dist(φ, ±1)` is false at non-standard instants and at gaps, and
//!   otherwise jumps to the standard instant `v ± 1`; the jump fails (false)
//!   when the target lies beyond a Zeno accumulation point or before 0.
//! - `Dist(φ, ε)` moves to the next history element when the next step is
//!   micro, and otherwise into (or stays inside) the gap.
//! - `Xst φ` / `Xns φ` look at the next history element and require it to be
//!   standard / non-standard; inside a gap the next history element is the
//!   standard successor, so `Xst` defers to it and `Xns` is false.
//! - `now_st` holds only at standard history elements.
//! - `Until`/`Since` are least fixpoints over the interleaved position
//!   sequence, solved exactly on its ultimately periodic shape.

use std::collections::HashMap;

use thiserror::Error;

use crate::formula::Formula;
use crate::nstime::{NsInstant, StepKind};
use crate::structure::{Label, Structure};
use crate::upseq::UpSeq;

/// Where to evaluate: a history element by index, or the gap that follows
/// it. The gap phase is only valid where the step is macro.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalPosition {
    pub index: usize,
    pub phase: Phase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Point,
    Gap,
}

impl EvalPosition {
    pub fn point(index: usize) -> EvalPosition {
        EvalPosition { index, phase: Phase::Point }
    }

    pub fn gap(index: usize) -> EvalPosition {
        EvalPosition { index, phase: Phase::Gap }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("position index {index} out of range (history window holds {max} steps)")]
    OutOfRange { index: usize, max: usize },
    #[error("step {index} is a micro step: it has no gap position")]
    NoGap { index: usize },
}

#[derive(Debug, Clone)]
struct PosEntry {
    instant: NsInstant,
    kind: StepKind,
    gap: bool,
    label: Label,
}

/// Materialized position window: prefix steps plus four cycle traversals.
/// Attribute sequences are periodic from the second traversal on (the entry
/// instant of a traversal depends on the step before it, which differs
/// between the first and later traversals), so the ultimately periodic shape
/// is (prefix + one traversal, one traversal); the extra traversals give
/// the metric jumps room to scan.
struct Positions {
    entries: Vec<PosEntry>,
    pos_prefix: usize,
    pos_cycle: usize,
    point_index: HashMap<usize, usize>,
}

const TRAVERSALS: usize = 4;

impl Positions {
    fn build(s: &Structure) -> Positions {
        let p = s.prefix().len();
        let l = s.cycle().len();
        let steps_in_window = p + TRAVERSALS * l;
        let mut entries = Vec::new();
        let mut point_index = HashMap::new();
        let mut boundary = [0usize; 2]; // entry counts at steps p+l and p+2l
        let mut t = NsInstant::ZERO;
        for i in 0..steps_in_window {
            if i == p + l {
                boundary[0] = entries.len();
            }
            if i == p + 2 * l {
                boundary[1] = entries.len();
            }
            let step = s.step(i);
            point_index.insert(i, entries.len());
            entries.push(PosEntry {
                instant: t,
                kind: step.kind,
                gap: false,
                label: step.label.clone(),
            });
            if step.kind == StepKind::Macro {
                entries.push(PosEntry {
                    instant: t,
                    kind: StepKind::Macro,
                    gap: true,
                    label: step.label.clone(),
                });
            }
            t = t.step(step.kind);
        }
        Positions { entries, pos_prefix: boundary[0], pos_cycle: boundary[1] - boundary[0], point_index }
    }

    fn window(&self) -> usize {
        self.pos_prefix + self.pos_cycle
    }

    /// Index of the next history element after entry `e` (skips the gap).
    fn next_point(&self, e: usize) -> usize {
        if self.entries[e].gap || self.entries[e].kind == StepKind::Micro {
            e + 1
        } else {
            e + 2
        }
    }

    fn next_std_point(&self, e: usize) -> Option<usize> {
        (e + 1..self.entries.len())
            .find(|&j| !self.entries[j].gap && self.entries[j].instant.is_standard())
    }

    fn prev_std_point(&self, e: usize) -> Option<usize> {
        (0..e).rev().find(|&j| !self.entries[j].gap && self.entries[j].instant.is_standard())
    }

    fn seq_of<F: Fn(usize, &PosEntry) -> bool>(&self, f: F) -> UpSeq {
        let w = self.window();
        let values: Vec<bool> = (0..w).map(|e| f(e, &self.entries[e])).collect();
        let cycle = values[self.pos_prefix..].to_vec();
        let mut prefix = values;
        prefix.truncate(self.pos_prefix);
        UpSeq::new(prefix, cycle)
    }
}

struct Evaluator<'a> {
    pos: &'a Positions,
    memo: HashMap<*const Formula, UpSeq>,
}

impl<'a> Evaluator<'a> {
    fn eval(&mut self, f: &Formula) -> UpSeq {
        let key = f as *const Formula;
        if let Some(s) = self.memo.get(&key) {
            return s.clone();
        }
        let seq = self.compute(f);
        self.memo.insert(key, seq.clone());
        seq
    }

    fn compute(&mut self, f: &Formula) -> UpSeq {
        let pos = self.pos;
        match f {
            Formula::True => UpSeq::constant(true),
            Formula::Atom(name) => pos.seq_of(|_, en| en.label.contains(name.as_ref())),
            Formula::NowSt => pos.seq_of(|_, en| !en.gap && en.instant.is_standard()),
            Formula::Not(g) => self.eval(g).not(),
            Formula::And(g, h) => self.eval(g).and(&self.eval(h)),
            Formula::NextSt(g) => {
                let inner = self.eval(g);
                pos.seq_of(|e, en| {
                    if en.gap || en.kind == StepKind::Macro {
                        inner.at(pos.next_point(e))
                    } else {
                        false
                    }
                })
            }
            Formula::NextNs(g) => {
                let inner = self.eval(g);
                pos.seq_of(|e, en| {
                    if !en.gap && en.kind == StepKind::Micro {
                        inner.at(pos.next_point(e))
                    } else {
                        false
                    }
                })
            }
            Formula::DistEps(g) => {
                let inner = self.eval(g);
                pos.seq_of(|e, en| if en.gap { inner.at(e) } else { inner.at(e + 1) })
            }
            Formula::DistPlus(g) => {
                let inner = self.eval(g);
                pos.seq_of(|e, en| {
                    if !en.gap && en.instant.is_standard() {
                        pos.next_std_point(e).is_some_and(|t| inner.at(t))
                    } else {
                        false
                    }
                })
            }
            Formula::DistMinus(g) => {
                let inner = self.eval(g);
                pos.seq_of(|e, en| {
                    if !en.gap && en.instant.is_standard() && en.instant.std_part > 0 {
                        pos.prev_std_point(e).is_some_and(|t| inner.at(t))
                    } else {
                        false
                    }
                })
            }
            Formula::Until(g, h) => {
                let (phi, psi) = (self.eval(g), self.eval(h));
                UpSeq::until(&phi, &psi)
            }
            Formula::Since(g, h) => {
                let (phi, psi) = (self.eval(g), self.eval(h));
                UpSeq::since(&phi, &psi)
            }
        }
    }
}

/// Evaluate `f` on `s` at position `at`. Pure: the result depends only on
/// the arguments. Positions up to two loop traversals deep are accepted.
pub fn evaluate_xtrio(s: &Structure, f: &Formula, at: EvalPosition) -> Result<bool, EvalError> {
    let pos = Positions::build(s);
    let max = s.prefix().len() + 2 * s.cycle().len();
    if at.index >= max {
        return Err(EvalError::OutOfRange { index: at.index, max });
    }
    let base = pos.point_index[&at.index];
    let entry = match at.phase {
        Phase::Point => base,
        Phase::Gap => {
            if pos.entries[base].kind != StepKind::Macro {
                return Err(EvalError::NoGap { index: at.index });
            }
            base + 1
        }
    };
    let mut ev = Evaluator { pos: &pos, memo: HashMap::new() };
    Ok(ev.eval(f).at(entry))
}

/// Evaluate at the initial instant.
pub fn evaluate_at_zero(s: &Structure, f: &Formula) -> bool {
    evaluate_xtrio(s, f, EvalPosition::point(0)).expect("position 0 always exists")
}

/// The interleaved positions of the first window, for callers that need to
/// enumerate them (micro-chain tests, counterexample printing).
pub fn positions(s: &Structure) -> Vec<EvalPosition> {
    let mut out = Vec::new();
    for i in 0..s.prefix().len() + 2 * s.cycle().len() {
        out.push(EvalPosition::point(i));
        if s.step(i).kind == StepKind::Macro {
            out.push(EvalPosition::gap(i));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::structure::HistoryStep;

    fn f(src: &str) -> Formula {
        parse_formula(src).unwrap()
    }

    fn micro(atoms: &[&str]) -> HistoryStep {
        HistoryStep::new(StepKind::Micro, atoms)
    }

    fn mac(atoms: &[&str]) -> HistoryStep {
        HistoryStep::new(StepKind::Macro, atoms)
    }

    #[test]
    fn universal_atom_on_all_macro_history() {
        let s = Structure::new(vec![], vec![mac(&["p"])]);
        assert!(evaluate_at_zero(&s, &f("Alw(p)")));
        assert!(evaluate_at_zero(&s, &f("Som(p)")));
        assert!(!evaluate_at_zero(&s, &f("Som(q)")));
    }

    #[test]
    fn dist_plus_is_false_at_non_standard_positions() {
        // 0 --micro--> eps --macro--> 1 --macro--> 2 ...
        let s = Structure::new(vec![micro(&[]), mac(&["p"])], vec![mac(&["p"])]);
        // at eps: by convention false even though p holds at 1
        assert!(!evaluate_xtrio(&s, &f("Dist(p, 1)"), EvalPosition::point(1)).unwrap());
        // at 0: jumps to 1 where p holds
        assert!(evaluate_at_zero(&s, &f("Dist(p, 1)")));
        // gaps are non-standard: false there too
        assert!(!evaluate_xtrio(&s, &f("Dist(p, 1)"), EvalPosition::gap(1)).unwrap());
    }

    #[test]
    fn xns_requires_non_standard_successor() {
        // all-macro history: every successor is standard
        let s = Structure::new(vec![], vec![mac(&["p"])]);
        assert!(!evaluate_at_zero(&s, &f("Xns(p)")));
        assert!(evaluate_at_zero(&s, &f("Xst(p)")));
        // micro first step: successor eps is non-standard
        let s = Structure::new(vec![micro(&["p"])], vec![mac(&["p"])]);
        assert!(evaluate_at_zero(&s, &f("Xns(p)")));
        assert!(!evaluate_at_zero(&s, &f("Xst(p)")));
    }

    #[test]
    fn xst_from_gap_reaches_the_standard_successor() {
        // 0 --macro--> 1 with p only from 1 on
        let s = Structure::new(vec![mac(&[])], vec![mac(&["p"])]);
        assert!(evaluate_xtrio(&s, &f("Xst(p)"), EvalPosition::gap(0)).unwrap());
        assert!(!evaluate_xtrio(&s, &f("Xns(p)"), EvalPosition::gap(0)).unwrap());
        // atoms at the gap copy the element the gap follows
        let s2 = Structure::new(vec![mac(&["q"])], vec![mac(&["p"])]);
        assert!(evaluate_xtrio(&s2, &f("q"), EvalPosition::gap(0)).unwrap());
        assert!(!evaluate_xtrio(&s2, &f("now_st"), EvalPosition::gap(0)).unwrap());
    }

    #[test]
    fn dist_eps_moves_one_infinitesimal() {
        // 0 --micro--> eps(p) --macro--> 1
        let s = Structure::new(vec![micro(&[]), mac(&["p"])], vec![mac(&[])]);
        assert!(evaluate_at_zero(&s, &f("Dist(p, eps)")));
        // from eps (stable point before a macro step) one eps lands in the
        // gap, which copies the label of eps
        assert!(evaluate_xtrio(&s, &f("Dist(p, eps)"), EvalPosition::point(1)).unwrap());
        // and stays there under further eps jumps
        assert!(evaluate_xtrio(&s, &f("Dist(p, 3*eps)"), EvalPosition::point(1)).unwrap());
    }

    #[test]
    fn zeno_dist_beyond_accumulation_is_false() {
        // 0(p) --macro--> 1(p) --micro--> 1+eps --micro--> ... accumulates at 2
        let s = Structure::new(vec![mac(&["p"]), micro(&["p"])], vec![micro(&["p"])]);
        assert!(s.is_zeno());
        assert!(evaluate_at_zero(&s, &f("Dist(p, 1)")));
        // from 1 the target 2 lies beyond the accumulation point
        assert!(!evaluate_xtrio(&s, &f("Dist(p, 1)"), EvalPosition::point(1)).unwrap());
        // history points inside the micro loop still have successors
        assert!(evaluate_xtrio(&s, &f("Xst(true) || Xns(true)"), EvalPosition::point(3)).unwrap());
    }

    #[test]
    fn dist_minus_walks_back_standard_instants() {
        let s = Structure::new(vec![mac(&["p"]), micro(&[]), mac(&["q"])], vec![mac(&[])]);
        // history: 0(p) 1() 1+eps(q) 2() 3() ...
        assert!(!evaluate_at_zero(&s, &f("Dist(p, -1)")));
        assert!(evaluate_xtrio(&s, &f("Dist(p, -1)"), EvalPosition::point(1)).unwrap());
        // from 2 one unit back is 1, not the stable point 1+eps
        assert!(!evaluate_xtrio(&s, &f("Dist(q, -1)"), EvalPosition::point(3)).unwrap());
        assert!(evaluate_xtrio(&s, &f("Dist(p, -2)"), EvalPosition::point(3)).unwrap());
    }

    #[test]
    fn until_crosses_micro_chains() {
        // 0(p) --micro--> eps(p) --micro--> 2eps(q) --macro--> 1 loop
        let s =
            Structure::new(vec![micro(&["p"]), micro(&["p"]), mac(&["q"])], vec![mac(&[])]);
        assert!(evaluate_at_zero(&s, &f("Until(p, q)")));
        assert!(!evaluate_at_zero(&s, &f("Until(p, r)")));
        // witness at the current instant needs no path
        assert!(evaluate_at_zero(&s, &f("Until(r, p)")));
    }

    #[test]
    fn since_looks_back_through_positions() {
        let s = Structure::new(vec![mac(&["p"]), micro(&["q"]), mac(&["q"])], vec![mac(&["q"])]);
        // at 1+eps: q since p (p at 0, q at 1..)
        assert!(evaluate_xtrio(&s, &f("Since(q, p)"), EvalPosition::point(2)).unwrap());
        assert!(!evaluate_xtrio(&s, &f("Since(r, p)"), EvalPosition::point(2)).unwrap());
        // at 0 the witness must be the instant itself
        assert!(evaluate_at_zero(&s, &f("Since(q, p)")));
        assert!(!evaluate_at_zero(&s, &f("Since(p, q)")));
    }

    #[test]
    fn positions_errors() {
        let s = Structure::new(vec![], vec![micro(&["p"])]);
        assert_eq!(
            evaluate_xtrio(&s, &f("p"), EvalPosition::point(99)),
            Err(EvalError::OutOfRange { index: 99, max: 2 })
        );
        assert_eq!(
            evaluate_xtrio(&s, &f("p"), EvalPosition::gap(0)),
            Err(EvalError::NoGap { index: 0 })
        );
    }

    #[test]
    fn determinism() {
        let s = crate::structure::random_structure(7, 8, &["p", "q"]);
        let g = f("Until(Dist(p, 1), Xns(q && now_st))");
        let a = evaluate_at_zero(&s, &g);
        let b = evaluate_at_zero(&s, &g);
        assert_eq!(a, b);
    }
}
