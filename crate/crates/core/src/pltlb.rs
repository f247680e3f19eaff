//! Linear temporal logic with past over lasso traces.
//!
//! This is the target logic of the translation and the self-check applied to
//! every bounded-checking witness. Formulae use the primitive basis
//! atom / `¬` / `∧` / `X` / `Y` / `U` / `S`; traces are infinite words
//! `prefix · cycle^ω` over sets of atoms, with the reserved letters `ST`
//! (standard instant) and `FL` (filler) used by the translation.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::structure::{canonical_lasso, Label, StructureError};
use crate::upseq::UpSeq;

/// Reserved trace letter marking positions that carry a standard instant.
pub const ST: &str = "ST";
/// Reserved trace letter marking filler positions between two standard ones.
pub const FL: &str = "FL";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LtlFormula {
    True,
    Atom(Arc<str>),
    Not(Arc<LtlFormula>),
    And(Arc<LtlFormula>, Arc<LtlFormula>),
    Next(Arc<LtlFormula>),
    Yesterday(Arc<LtlFormula>),
    Until(Arc<LtlFormula>, Arc<LtlFormula>),
    Since(Arc<LtlFormula>, Arc<LtlFormula>),
}

use LtlFormula::*;

impl LtlFormula {
    pub fn atom(name: impl Into<String>) -> LtlFormula {
        Atom(name.into().into())
    }

    pub fn tt() -> LtlFormula {
        True
    }

    pub fn ff() -> LtlFormula {
        True.not()
    }

    pub fn st() -> LtlFormula {
        LtlFormula::atom(ST)
    }

    pub fn fl() -> LtlFormula {
        LtlFormula::atom(FL)
    }

    pub fn not(self) -> LtlFormula {
        Not(Arc::new(self))
    }

    pub fn and(self, other: LtlFormula) -> LtlFormula {
        And(Arc::new(self), Arc::new(other))
    }

    pub fn or(self, other: LtlFormula) -> LtlFormula {
        self.not().and(other.not()).not()
    }

    pub fn implies(self, other: LtlFormula) -> LtlFormula {
        self.and(other.not()).not()
    }

    pub fn iff(self, other: LtlFormula) -> LtlFormula {
        self.clone().implies(other.clone()).and(other.implies(self))
    }

    pub fn next(self) -> LtlFormula {
        Next(Arc::new(self))
    }

    pub fn yesterday(self) -> LtlFormula {
        Yesterday(Arc::new(self))
    }

    pub fn until(self, other: LtlFormula) -> LtlFormula {
        Until(Arc::new(self), Arc::new(other))
    }

    pub fn since(self, other: LtlFormula) -> LtlFormula {
        Since(Arc::new(self), Arc::new(other))
    }

    /// `F φ = true U φ`.
    pub fn eventually(self) -> LtlFormula {
        True.until(self)
    }

    /// `G φ = ¬F¬φ`.
    pub fn globally(self) -> LtlFormula {
        True.until(self.not()).not()
    }

    /// `O φ = true S φ` (once in the past).
    pub fn once(self) -> LtlFormula {
        True.since(self)
    }

    /// `H φ = ¬O¬φ` (historically).
    pub fn historically(self) -> LtlFormula {
        True.since(self.not()).not()
    }

    pub fn conj(items: impl IntoIterator<Item = LtlFormula>) -> LtlFormula {
        let mut it = items.into_iter();
        match it.next() {
            None => True,
            Some(first) => it.fold(first, LtlFormula::and),
        }
    }

    pub fn disj(items: impl IntoIterator<Item = LtlFormula>) -> LtlFormula {
        let mut it = items.into_iter();
        match it.next() {
            None => LtlFormula::ff(),
            Some(first) => it.fold(first, LtlFormula::or),
        }
    }

    /// Atom names occurring in the formula (including `ST`/`FL` if used).
    pub fn atoms(&self) -> Vec<String> {
        let mut out = BTreeSet::new();
        fn walk(f: &LtlFormula, out: &mut BTreeSet<String>) {
            match f {
                True => {}
                Atom(a) => {
                    out.insert(a.to_string());
                }
                Not(g) | Next(g) | Yesterday(g) => walk(g, out),
                And(g, h) | Until(g, h) | Since(g, h) => {
                    walk(g, out);
                    walk(h, out);
                }
            }
        }
        walk(self, &mut out);
        out.into_iter().collect()
    }
}

/// Number of distinct nodes in the formula, counting shared subtrees once.
/// This is the size measure for the translation's linearity guarantee.
pub fn distinct_node_count(f: &LtlFormula) -> usize {
    fn walk(f: &LtlFormula, seen: &mut HashSet<*const LtlFormula>) {
        let children: Vec<&Arc<LtlFormula>> = match f {
            True | Atom(_) => vec![],
            Not(g) | Next(g) | Yesterday(g) => vec![g],
            And(g, h) | Until(g, h) | Since(g, h) => vec![g, h],
        };
        for c in children {
            if seen.insert(Arc::as_ptr(c)) {
                walk(c, seen);
            }
        }
    }
    let mut seen = HashSet::new();
    walk(f, &mut seen);
    seen.len() + 1 // the root
}

// Rendering mirrors the surface formula syntax, with XL/YL/UL/SL operator
// names. Output only; traces produced by the tools are re-read through the
// trace format below, not through a formula parser.

#[derive(PartialEq, PartialOrd, Clone, Copy)]
enum Prec {
    Imp = 2,
    Or = 3,
    And = 4,
    Unary = 5,
}

fn write_prec(f: &LtlFormula, min: Prec, out: &mut String) {
    if let Not(inner) = f {
        if let And(a, b) = inner.as_ref() {
            if let (Not(x), Not(y)) = (a.as_ref(), b.as_ref()) {
                let parens = min > Prec::Or;
                if parens {
                    out.push('(');
                }
                write_prec(x, Prec::Or, out);
                out.push_str(" || ");
                write_prec(y, Prec::And, out);
                if parens {
                    out.push(')');
                }
                return;
            }
            if let Not(y) = b.as_ref() {
                let parens = min > Prec::Imp;
                if parens {
                    out.push('(');
                }
                write_prec(a, Prec::Or, out);
                out.push_str(" -> ");
                write_prec(y, Prec::Imp, out);
                if parens {
                    out.push(')');
                }
                return;
            }
        }
    }
    match f {
        True => out.push_str("true"),
        Atom(a) => out.push_str(a),
        Not(g) => {
            let parens = min > Prec::Unary;
            if parens {
                out.push('(');
            }
            out.push('!');
            write_prec(g, Prec::Unary, out);
            if parens {
                out.push(')');
            }
        }
        And(a, b) => {
            let parens = min > Prec::And;
            if parens {
                out.push('(');
            }
            write_prec(a, Prec::And, out);
            out.push_str(" && ");
            write_prec(b, Prec::Unary, out);
            if parens {
                out.push(')');
            }
        }
        Next(g) => {
            out.push_str("XL(");
            write_prec(g, Prec::Imp, out);
            out.push(')');
        }
        Yesterday(g) => {
            out.push_str("YL(");
            write_prec(g, Prec::Imp, out);
            out.push(')');
        }
        Until(a, b) => {
            out.push_str("UL(");
            write_prec(a, Prec::Imp, out);
            out.push_str(", ");
            write_prec(b, Prec::Imp, out);
            out.push(')');
        }
        Since(a, b) => {
            out.push_str("SL(");
            write_prec(a, Prec::Imp, out);
            out.push_str(", ");
            write_prec(b, Prec::Imp, out);
            out.push(')');
        }
    }
}

impl fmt::Display for LtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_prec(self, Prec::Imp, &mut out);
        f.write_str(&out)
    }
}

/// An infinite word `prefix · cycle^ω` over sets of atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoTrace {
    pub prefix: Vec<Label>,
    pub cycle: Vec<Label>,
}

impl LassoTrace {
    pub fn new(prefix: Vec<Label>, cycle: Vec<Label>) -> LassoTrace {
        assert!(!cycle.is_empty(), "the loop must be non-empty");
        LassoTrace { prefix, cycle }
    }

    pub fn label(&self, i: usize) -> &Label {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn len_window(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for l in self.prefix.iter().chain(self.cycle.iter()) {
            out.extend(l.iter().cloned());
        }
        out
    }

    /// Minimal prefix/period representation of the same infinite word.
    pub fn canonicalize(&self) -> LassoTrace {
        let (prefix, cycle) = canonical_lasso(self.prefix.clone(), self.cycle.clone());
        LassoTrace { prefix, cycle }
    }
}

/// Exact evaluation at a position of the infinite word. Past operators are
/// computed by the forward recurrence (`Y` is false at 0), future operators
/// by the least fixpoint on the cycle.
pub fn eval_pltlb(t: &LassoTrace, f: &LtlFormula, pos: usize) -> bool {
    let mut memo: HashMap<*const LtlFormula, UpSeq> = HashMap::new();
    eval_seq(t, f, &mut memo).at(pos)
}

fn eval_seq(
    t: &LassoTrace,
    f: &LtlFormula,
    memo: &mut HashMap<*const LtlFormula, UpSeq>,
) -> UpSeq {
    let key = f as *const LtlFormula;
    if let Some(s) = memo.get(&key) {
        return s.clone();
    }
    let seq = match f {
        True => UpSeq::constant(true),
        Atom(a) => UpSeq::new(
            t.prefix.iter().map(|l| l.contains(a.as_ref())).collect(),
            t.cycle.iter().map(|l| l.contains(a.as_ref())).collect(),
        ),
        Not(g) => eval_seq(t, g, memo).not(),
        And(g, h) => eval_seq(t, g, memo).and(&eval_seq(t, h, memo)),
        Next(g) => eval_seq(t, g, memo).shift_next(),
        Yesterday(g) => eval_seq(t, g, memo).shift_prev(),
        Until(g, h) => UpSeq::until(&eval_seq(t, g, memo), &eval_seq(t, h, memo)),
        Since(g, h) => UpSeq::since(&eval_seq(t, g, memo), &eval_seq(t, h, memo)),
    };
    memo.insert(key, seq.clone());
    seq
}

/// Render a trace in the shared text format. Position kinds are tagged `ST`,
/// `FL` or `NS`; the tag letters double as the reserved atoms.
///
/// ```text
/// prefix 1
/// loop 2
/// 0: ST p
/// 1: FL p
/// 2: NS q
/// ```
pub fn render_trace(t: &LassoTrace) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "prefix {}", t.prefix.len());
    let _ = writeln!(out, "loop {}", t.cycle.len());
    for (i, label) in t.prefix.iter().chain(t.cycle.iter()).enumerate() {
        let tag = if label.contains(ST) {
            "ST"
        } else if label.contains(FL) {
            "FL"
        } else {
            "NS"
        };
        let _ = write!(out, "{}: {}", i, tag);
        for atom in label {
            if atom != ST && atom != FL {
                let _ = write!(out, " {}", atom);
            }
        }
        out.push('\n');
    }
    out
}

/// Parse the trace text format (the `ST`/`NS`/`FL`-tagged variant of the
/// shared lasso format).
pub fn parse_trace(text: &str) -> Result<LassoTrace, StructureError> {
    let err = |line: usize, message: String| StructureError::Format { line, message };
    let mut prefix_len: Option<usize> = None;
    let mut cycle_len: Option<usize> = None;
    let mut labels: Vec<Label> = Vec::new();
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
                prefix_len = Some(
                    words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| err(lineno, "expected 'prefix N'".into()))?,
                );
            }
            "loop" => {
                cycle_len = Some(
                    words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| err(lineno, "expected 'loop N'".into()))?,
                );
            }
            _ => {
                let idx: usize = head
                    .strip_suffix(':')
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| err(lineno, format!("expected 'INDEX:', got '{}'", head)))?;
                if idx != labels.len() {
                    return Err(err(lineno, format!("expected index {}, got {}", labels.len(), idx)));
                }
                let mut label: Label = BTreeSet::new();
                match words.next() {
                    Some("ST") => {
                        label.insert(ST.to_string());
                    }
                    Some("FL") => {
                        label.insert(FL.to_string());
                    }
                    Some("NS") => {}
                    other => {
                        return Err(err(
                            lineno,
                            format!("expected 'ST', 'NS' or 'FL', got '{}'", other.unwrap_or("")),
                        ))
                    }
                }
                label.extend(words.map(|w| w.to_string()));
                labels.push(label);
            }
        }
    }
    let p = prefix_len.ok_or_else(|| err(0, "missing 'prefix N' header".into()))?;
    let l = cycle_len.ok_or_else(|| err(0, "missing 'loop N' header".into()))?;
    if l == 0 {
        return Err(StructureError::EmptyLoop);
    }
    if labels.len() != p + l {
        return Err(err(0, format!("expected {} position lines, found {}", p + l, labels.len())));
    }
    let cycle = labels.split_off(p);
    Ok(LassoTrace { prefix: labels, cycle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lbl(atoms: &[&str]) -> Label {
        atoms.iter().map(|s| s.to_string()).collect()
    }

    fn p() -> LtlFormula {
        LtlFormula::atom("p")
    }

    // reference semantics by explicit unrolling over a generous horizon;
    // valid for the shallow formulas used in these tests
    fn naive(t: &LassoTrace, f: &LtlFormula, i: usize, h: usize) -> bool {
        match f {
            True => true,
            Atom(a) => t.label(i).contains(a.as_ref()),
            Not(g) => !naive(t, g, i, h),
            And(g, k) => naive(t, g, i, h) && naive(t, k, i, h),
            Next(g) => naive(t, g, i + 1, h),
            Yesterday(g) => i > 0 && naive(t, g, i - 1, h),
            Until(g, k) => {
                (i..i + h).any(|j| naive(t, k, j, h) && (i..j).all(|m| naive(t, g, m, h)))
            }
            Since(g, k) => {
                (0..=i).rev().any(|j| naive(t, k, j, h) && (j + 1..=i).all(|m| naive(t, g, m, h)))
            }
        }
    }

    #[test]
    fn globally_on_constant_trace() {
        let t = LassoTrace::new(vec![], vec![lbl(&["p"])]);
        assert!(eval_pltlb(&t, &p().globally(), 0));
        assert!(!eval_pltlb(&t, &LtlFormula::atom("q").eventually(), 0));
    }

    #[test]
    fn yesterday_false_at_origin() {
        let t = LassoTrace::new(vec![], vec![lbl(&["p"])]);
        assert!(!eval_pltlb(&t, &p().yesterday(), 0));
        assert!(eval_pltlb(&t, &p().yesterday(), 1));
    }

    #[test]
    fn until_on_prefix_then_empty_loop() {
        // trace p, {}, {}, ... : p U !p holds at 0 (verified by unrolling)
        let t = LassoTrace::new(vec![lbl(&["p"])], vec![lbl(&[])]);
        let f = p().until(p().not());
        assert!(naive(&t, &f, 0, 3));
        assert!(eval_pltlb(&t, &f, 0));
    }

    #[test]
    fn positions_beyond_prefix_wrap() {
        let t = LassoTrace::new(vec![lbl(&["p"])], vec![lbl(&["q"]), lbl(&[])]);
        assert!(eval_pltlb(&t, &LtlFormula::atom("q"), 1));
        assert!(eval_pltlb(&t, &LtlFormula::atom("q"), 3));
        assert!(eval_pltlb(&t, &LtlFormula::atom("q"), 1 + 2 * 10));
    }

    fn arb_trace() -> impl Strategy<Value = LassoTrace> {
        let label = proptest::collection::btree_set("[pq]", 0..=2)
            .prop_map(|s| s.into_iter().collect::<Label>());
        (
            proptest::collection::vec(label.clone(), 0..3),
            proptest::collection::vec(label, 1..4),
        )
            .prop_map(|(prefix, cycle)| LassoTrace::new(prefix, cycle))
    }

    fn arb_ltl() -> impl Strategy<Value = LtlFormula> {
        let leaf = prop_oneof![Just(LtlFormula::tt()), "[pq]".prop_map(LtlFormula::atom)];
        leaf.prop_recursive(4, 32, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(LtlFormula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
                inner.clone().prop_map(LtlFormula::next),
                inner.clone().prop_map(LtlFormula::yesterday),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.until(b)),
                (inner.clone(), inner).prop_map(|(a, b)| a.since(b)),
            ]
        })
    }

    proptest! {
        // expansion laws hold pointwise at sampled positions
        #[test]
        fn until_expansion_law(t in arb_trace(), f in arb_ltl(), g in arb_ltl(), i in 0usize..6) {
            let u = f.clone().until(g.clone());
            let expanded = g.or(f.and(u.clone().next()));
            prop_assert_eq!(eval_pltlb(&t, &u, i), eval_pltlb(&t, &expanded, i));
        }

        #[test]
        fn since_expansion_law(t in arb_trace(), f in arb_ltl(), g in arb_ltl(), i in 0usize..6) {
            let s = f.clone().since(g.clone());
            let expanded = g.or(f.and(s.clone().yesterday()));
            prop_assert_eq!(eval_pltlb(&t, &s, i), eval_pltlb(&t, &expanded, i));
        }

        // duality with the release expansion
        #[test]
        fn until_release_duality(t in arb_trace(), f in arb_ltl(), g in arb_ltl(), i in 0usize..6) {
            let lhs = f.clone().until(g.clone()).not();
            // ¬(f U g) == (¬g) holds until (and including) a point where
            // both ¬f and ¬g hold, or forever: ¬g W (¬f ∧ ¬g)
            // expressed with U and G: (¬g U (¬f ∧ ¬g)) ∨ G ¬g
            let rhs = g.clone().not().until(f.not().and(g.clone().not()))
                .or(g.not().globally());
            prop_assert_eq!(eval_pltlb(&t, &lhs, i), eval_pltlb(&t, &rhs, i));
        }

        // prefix-independence inside the loop: positions congruent modulo
        // the stabilized period agree far enough along the word
        #[test]
        fn loop_positions_eventually_periodic(t in arb_trace(), f in arb_ltl()) {
            let depth = 8; // conservative stabilization margin
            let l = t.cycle.len();
            let base = t.prefix.len() + depth * l;
            prop_assert_eq!(
                eval_pltlb(&t, &f, base),
                eval_pltlb(&t, &f, base + l)
            );
        }
    }

    #[test]
    fn trace_format_round_trip() {
        let t = LassoTrace::new(
            vec![lbl(&["ST", "p"])],
            vec![lbl(&["FL", "p"]), lbl(&["q"])],
        );
        let text = render_trace(&t);
        assert_eq!(parse_trace(&text).unwrap(), t);
        assert!(parse_trace("prefix 0\nloop 1\n0: XX p\n").is_err());
    }

    #[test]
    fn rendering_examples() {
        assert_eq!(p().until(LtlFormula::atom("q")).to_string(), "UL(p, q)");
        assert_eq!(p().next().not().to_string(), "!XL(p)");
        assert_eq!(p().yesterday().to_string(), "YL(p)");
        assert_eq!(
            LtlFormula::st().implies(p().since(LtlFormula::fl())).to_string(),
            "ST -> SL(p, FL)"
        );
    }
}
