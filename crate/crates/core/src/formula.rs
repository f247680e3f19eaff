//! Abstract syntax for the metric temporal logic over non-standard time.
//!
//! Only the fragment-grammar constructors exist at this level: atoms, the
//! boolean basis `¬`/`∧`, the metric jumps `Dist(φ,1)`, `Dist(φ,−1)`,
//! `Dist(φ,ε)`, the primitive `Until`/`Since`, the two next operators
//! `Xst`/`Xns`, and the standard-instant predicate `now_st`. Everything else
//! (`||`, `->`, `Som`, `Alw`, the stable-step variants, bounded reachability)
//! is expansion-time sugar over this basis.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A formula of the core fragment. Subtrees are reference-counted so that
/// expansion and translation can share them without copying.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    Atom(Arc<str>),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    /// `Dist(φ, 1)`: φ one standard unit from now.
    DistPlus(Arc<Formula>),
    /// `Dist(φ, -1)`: φ one standard unit ago.
    DistMinus(Arc<Formula>),
    /// `Dist(φ, ε)`: φ one infinitesimal from now.
    DistEps(Arc<Formula>),
    Until(Arc<Formula>, Arc<Formula>),
    Since(Arc<Formula>, Arc<Formula>),
    /// `Xst φ`: the next history element is standard and satisfies φ.
    NextSt(Arc<Formula>),
    /// `Xns φ`: the next history element is non-standard and satisfies φ.
    NextNs(Arc<Formula>),
    /// True exactly at standard instants.
    NowSt,
}

use Formula::*;

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        let name = name.into();
        debug_assert!(!name.is_empty(), "atom names must be non-empty");
        Atom(name.into())
    }

    pub fn tt() -> Formula {
        True
    }

    /// `false` is sugar for `¬true`.
    pub fn ff() -> Formula {
        True.not()
    }

    pub fn not(self) -> Formula {
        Not(Arc::new(self))
    }

    pub fn and(self, other: Formula) -> Formula {
        And(Arc::new(self), Arc::new(other))
    }

    /// `φ ∨ ψ` as `¬(¬φ ∧ ¬ψ)`.
    pub fn or(self, other: Formula) -> Formula {
        self.not().and(other.not()).not()
    }

    /// `φ → ψ` as `¬(φ ∧ ¬ψ)`.
    pub fn implies(self, other: Formula) -> Formula {
        self.and(other.not()).not()
    }

    /// `φ ↔ ψ` as `(φ → ψ) ∧ (ψ → φ)`.
    pub fn iff(self, other: Formula) -> Formula {
        self.clone().implies(other.clone()).and(other.implies(self))
    }

    pub fn dist_plus(self) -> Formula {
        DistPlus(Arc::new(self))
    }

    pub fn dist_minus(self) -> Formula {
        DistMinus(Arc::new(self))
    }

    pub fn dist_eps(self) -> Formula {
        DistEps(Arc::new(self))
    }

    /// `Dist(φ, n)` for any integer offset, expanded into a nesting:
    /// `Dist(φ, 2) = Dist(Dist(φ, 1), 1)` and symmetrically for negative
    /// offsets. `Dist(φ, 0)` is φ itself.
    pub fn dist(self, offset: i64) -> Formula {
        let mut f = self;
        for _ in 0..offset.unsigned_abs() {
            f = if offset > 0 { f.dist_plus() } else { f.dist_minus() };
        }
        f
    }

    /// `Dist(φ, n*eps)` expanded into `n` nested infinitesimal jumps.
    pub fn dist_eps_n(self, n: u64) -> Formula {
        let mut f = self;
        for _ in 0..n {
            f = f.dist_eps();
        }
        f
    }

    pub fn until(self, other: Formula) -> Formula {
        Until(Arc::new(self), Arc::new(other))
    }

    pub fn since(self, other: Formula) -> Formula {
        Since(Arc::new(self), Arc::new(other))
    }

    pub fn next_st(self) -> Formula {
        NextSt(Arc::new(self))
    }

    pub fn next_ns(self) -> Formula {
        NextNs(Arc::new(self))
    }

    pub fn now_st() -> Formula {
        NowSt
    }

    /// Conjunction of a sequence, `true` when empty.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => True,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Disjunction of a sequence, `false` when empty.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::ff(),
            Some(first) => it.fold(first, Formula::or),
        }
    }

    /// Atom names occurring in the formula, deduplicated, sorted.
    pub fn atoms(&self) -> Vec<String> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_atoms(&mut out);
        out.into_iter().collect()
    }

    fn collect_atoms(&self, out: &mut std::collections::BTreeSet<String>) {
        match self {
            True | NowSt => {}
            Atom(name) => {
                out.insert(name.to_string());
            }
            Not(f) | DistPlus(f) | DistMinus(f) | DistEps(f) | NextSt(f) | NextNs(f) => {
                f.collect_atoms(out)
            }
            And(f, g) | Until(f, g) | Since(f, g) => {
                f.collect_atoms(out);
                g.collect_atoms(out);
            }
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            True | NowSt | Atom(_) => 1,
            Not(f) | DistPlus(f) | DistMinus(f) | DistEps(f) | NextSt(f) | NextNs(f) => {
                1 + f.size()
            }
            And(f, g) | Until(f, g) | Since(f, g) => 1 + f.size() + g.size(),
        }
    }
}

/// The derived temporal operators accepted by the surface syntax. Each one
/// expands to core constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivedOp {
    Som,
    Alw,
    UntilStable,
    UntilSt,
    SomStable,
    AlwStable,
    WithinStable,
}

impl DerivedOp {
    pub fn from_name(name: &str) -> Option<DerivedOp> {
        Some(match name {
            "Som" => DerivedOp::Som,
            "Alw" => DerivedOp::Alw,
            "Until_stable" => DerivedOp::UntilStable,
            "Until_st" => DerivedOp::UntilSt,
            "Som_stable" => DerivedOp::SomStable,
            "Alw_stable" => DerivedOp::AlwStable,
            "Within_stable" => DerivedOp::WithinStable,
            _ => return None,
        })
    }

    /// Formula arguments expected (the bound of `Within_stable` is extra).
    pub fn arity(&self) -> usize {
        match self {
            DerivedOp::Som | DerivedOp::Alw | DerivedOp::SomStable | DerivedOp::AlwStable => 1,
            DerivedOp::UntilStable | DerivedOp::UntilSt => 2,
            DerivedOp::WithinStable => 1,
        }
    }

    pub fn needs_bound(&self) -> bool {
        matches!(self, DerivedOp::WithinStable)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExpandError {
    #[error("{op:?} expects {expected} formula argument(s), got {got}")]
    Arity { op: DerivedOp, expected: usize, got: usize },
    #[error("Within_stable requires a natural-number bound")]
    MissingBound,
}

/// Expand a derived operator into core constructors.
///
/// `Som(φ) = Until(true, φ)` and `Alw(φ) = ¬Som(¬φ)`. The stable-step
/// variants anchor at the last micro-step of each macro-step (where
/// `Xst(true)` holds), the `_st` variant at standard instants (`now_st`).
/// `Within_stable(φ, L)` holds iff the macro-step starting at some standard
/// instant `m ≤ L` from now runs to completion in a stable point satisfying
/// φ: the disjunction over `m` of `Dist(Until(Xns(true), Xst(true) ∧ φ), m)`.
pub fn expand_derived(
    op: DerivedOp,
    args: &[Formula],
    bound: Option<u64>,
) -> Result<Formula, ExpandError> {
    if args.len() != op.arity() {
        return Err(ExpandError::Arity { op, expected: op.arity(), got: args.len() });
    }
    if op.needs_bound() && bound.is_none() {
        return Err(ExpandError::MissingBound);
    }
    Ok(match op {
        DerivedOp::Som => Formula::tt().until(args[0].clone()),
        DerivedOp::Alw => Formula::tt().until(args[0].clone().not()).not(),
        DerivedOp::UntilStable => {
            let stable = Formula::tt().next_st();
            stable
                .clone()
                .implies(args[0].clone())
                .until(stable.and(args[1].clone()))
        }
        DerivedOp::UntilSt => Formula::now_st()
            .implies(args[0].clone())
            .until(Formula::now_st().and(args[1].clone())),
        DerivedOp::SomStable => {
            expand_derived(DerivedOp::UntilStable, &[Formula::tt(), args[0].clone()], None)?
        }
        DerivedOp::AlwStable => {
            expand_derived(DerivedOp::SomStable, &[args[0].clone().not()], None)?.not()
        }
        DerivedOp::WithinStable => {
            let reach = Formula::tt()
                .next_ns()
                .until(Formula::tt().next_st().and(args[0].clone()));
            Formula::disj((0..=bound.unwrap()).map(|m| reach.clone().dist(m as i64)))
        }
    })
}

/// Deterministic pseudo-random core formula of depth at most `max_depth`
/// over the given atoms. Companion of `structure::random_structure` for the
/// randomized equivalence suites.
pub fn random_formula(seed: u64, max_depth: usize, atoms: &[&str]) -> Formula {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    gen_formula(&mut rng, max_depth, atoms)
}

fn gen_formula(rng: &mut rand_chacha::ChaCha8Rng, depth: usize, atoms: &[&str]) -> Formula {
    use rand::Rng;
    if depth == 0 || rng.gen_ratio(1, 5) {
        return match rng.gen_range(0..atoms.len() + 2) {
            0 => Formula::tt(),
            1 => Formula::now_st(),
            i => Formula::atom(atoms[i - 2]),
        };
    }
    let mut sub = |rng: &mut rand_chacha::ChaCha8Rng| gen_formula(rng, depth - 1, atoms);
    match rng.gen_range(0..9) {
        0 => sub(rng).not(),
        1 => {
            let a = sub(rng);
            a.and(sub(rng))
        }
        2 => sub(rng).dist_plus(),
        3 => sub(rng).dist_minus(),
        4 => sub(rng).dist_eps(),
        5 => {
            let a = sub(rng);
            a.until(sub(rng))
        }
        6 => {
            let a = sub(rng);
            a.since(sub(rng))
        }
        7 => sub(rng).next_st(),
        _ => sub(rng).next_ns(),
    }
}

// Rendering. The printer emits `||` and `->` for the sugar patterns
// `¬(¬a ∧ ¬b)` and `¬(a ∧ ¬b)` so that translated and compiled formulas stay
// readable; parsing maps them back to the identical tree, which keeps
// parse(render(f)) == f.

#[derive(PartialEq, PartialOrd, Clone, Copy)]
enum Prec {
    Imp = 2,
    Or = 3,
    And = 4,
    Unary = 5,
    Primary = 6,
}

fn write_prec(f: &Formula, min: Prec, out: &mut String) {
    // sugar patterns first
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
        NowSt => out.push_str("now_st"),
        Atom(name) => out.push_str(name),
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
        DistPlus(_) | DistMinus(_) | DistEps(_) => {
            // collapse a run of identical jumps into one offset
            let mut n: u64 = 0;
            let mut g = f;
            let same = |h: &Formula| {
                std::mem::discriminant(h) == std::mem::discriminant(f)
            };
            while same(g) {
                n += 1;
                g = match g {
                    DistPlus(inner) | DistMinus(inner) | DistEps(inner) => inner,
                    _ => unreachable!(),
                };
            }
            out.push_str("Dist(");
            write_prec(g, Prec::Imp, out);
            match f {
                DistPlus(_) => out.push_str(&format!(", {})", n)),
                DistMinus(_) => out.push_str(&format!(", -{})", n)),
                DistEps(_) => {
                    if n == 1 {
                        out.push_str(", eps)");
                    } else {
                        out.push_str(&format!(", {}*eps)", n));
                    }
                }
                _ => unreachable!(),
            }
        }
        Until(a, b) => {
            out.push_str("Until(");
            write_prec(a, Prec::Imp, out);
            out.push_str(", ");
            write_prec(b, Prec::Imp, out);
            out.push(')');
        }
        Since(a, b) => {
            out.push_str("Since(");
            write_prec(a, Prec::Imp, out);
            out.push_str(", ");
            write_prec(b, Prec::Imp, out);
            out.push(')');
        }
        NextSt(g) => {
            out.push_str("Xst(");
            write_prec(g, Prec::Imp, out);
            out.push(')');
        }
        NextNs(g) => {
            out.push_str("Xns(");
            write_prec(g, Prec::Imp, out);
            out.push(')');
        }
    }
}

/// Render a formula in the concrete surface syntax; inverse of parsing.
pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_prec(f, Prec::Imp, &mut out);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }
    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn som_is_until_true() {
        let got = expand_derived(DerivedOp::Som, &[p()], None).unwrap();
        assert_eq!(got, Formula::tt().until(p()));
    }

    #[test]
    fn alw_is_not_som_not() {
        let got = expand_derived(DerivedOp::Alw, &[p()], None).unwrap();
        assert_eq!(got, Formula::tt().until(p().not()).not());
    }

    #[test]
    fn until_stable_anchors_at_last_micro_step() {
        // Until(Xst true -> p, Xst true && q)
        let got = expand_derived(DerivedOp::UntilStable, &[p(), q()], None).unwrap();
        let stable = Formula::tt().next_st();
        let expected = stable.clone().implies(p()).until(stable.and(q()));
        assert_eq!(got, expected);
    }

    #[test]
    fn until_st_anchors_at_standard_instants() {
        let got = expand_derived(DerivedOp::UntilSt, &[p(), q()], None).unwrap();
        let expected = Formula::now_st().implies(p()).until(Formula::now_st().and(q()));
        assert_eq!(got, expected);
    }

    #[test]
    fn within_stable_zero_is_single_macro_step() {
        let got = expand_derived(DerivedOp::WithinStable, &[p()], Some(0)).unwrap();
        let expected = Formula::tt().next_ns().until(Formula::tt().next_st().and(p()));
        assert_eq!(got, expected);
    }

    #[test]
    fn within_stable_bound_counts_disjuncts() {
        let reach = |m: i64| {
            Formula::tt()
                .next_ns()
                .until(Formula::tt().next_st().and(p()))
                .dist(m)
        };
        let got = expand_derived(DerivedOp::WithinStable, &[p()], Some(2)).unwrap();
        let expected = Formula::disj([reach(0), reach(1), reach(2)]);
        assert_eq!(got, expected);
    }

    #[test]
    fn expansion_errors() {
        assert_eq!(
            expand_derived(DerivedOp::Som, &[p(), q()], None),
            Err(ExpandError::Arity { op: DerivedOp::Som, expected: 1, got: 2 })
        );
        assert_eq!(
            expand_derived(DerivedOp::WithinStable, &[p()], None),
            Err(ExpandError::MissingBound)
        );
    }

    #[test]
    fn dist_sugar_preserves_offset_counts() {
        assert_eq!(p().dist(2), p().dist_plus().dist_plus());
        assert_eq!(p().dist(-3), p().dist_minus().dist_minus().dist_minus());
        assert_eq!(p().dist(0), p());
        assert_eq!(p().dist_eps_n(2), p().dist_eps().dist_eps());
        assert_eq!(p().dist(2).size(), p().size() + 2);
    }

    #[test]
    fn rendering_examples() {
        assert_eq!(render_formula(&p().until(q())), "Until(p, q)");
        assert_eq!(render_formula(&Formula::now_st()), "now_st");
        assert_eq!(render_formula(&p().and(q()).not()), "!(p && q)");
        assert_eq!(render_formula(&p().or(q())), "p || q");
        assert_eq!(render_formula(&p().implies(q())), "p -> q");
        assert_eq!(render_formula(&p().dist(3)), "Dist(p, 3)");
        assert_eq!(render_formula(&p().dist_eps_n(2)), "Dist(p, 2*eps)");
    }
}
