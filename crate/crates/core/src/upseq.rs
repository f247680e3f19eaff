//! Ultimately periodic boolean sequences.
//!
//! Both evaluators (the history-structure oracle and the trace semantics)
//! reduce temporal operators to exact operations on infinite boolean
//! sequences of the form `prefix · cycle^ω`. Future fixpoints are solved on
//! the cycle, past recurrences are run forward until the carried state
//! repeats at a cycle boundary; the monotonicity of the since-recurrence in
//! its own previous value bounds that at one extra cycle traversal.

/// An infinite boolean sequence `prefix · cycle^ω`. The cycle is non-empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpSeq {
    prefix: Vec<bool>,
    cycle: Vec<bool>,
}

impl UpSeq {
    pub fn new(prefix: Vec<bool>, cycle: Vec<bool>) -> UpSeq {
        assert!(!cycle.is_empty(), "cycle must be non-empty");
        UpSeq { prefix, cycle }
    }

    pub fn constant(value: bool) -> UpSeq {
        UpSeq { prefix: Vec::new(), cycle: vec![value] }
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn cycle_len(&self) -> usize {
        self.cycle.len()
    }

    pub fn at(&self, i: usize) -> bool {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Rebuild with prefix length `p >= prefix_len()` and cycle length any
    /// multiple of `cycle_len()`.
    fn reshape(&self, p: usize, l: usize) -> UpSeq {
        debug_assert!(p >= self.prefix.len());
        debug_assert!(l % self.cycle.len() == 0);
        UpSeq {
            prefix: (0..p).map(|i| self.at(i)).collect(),
            cycle: (p..p + l).map(|i| self.at(i)).collect(),
        }
    }

    fn aligned(a: &UpSeq, b: &UpSeq) -> (UpSeq, UpSeq) {
        let p = a.prefix.len().max(b.prefix.len());
        let l = lcm(a.cycle.len(), b.cycle.len());
        (a.reshape(p, l), b.reshape(p, l))
    }

    pub fn map<F: Fn(bool) -> bool>(&self, f: F) -> UpSeq {
        UpSeq {
            prefix: self.prefix.iter().map(|&b| f(b)).collect(),
            cycle: self.cycle.iter().map(|&b| f(b)).collect(),
        }
    }

    pub fn not(&self) -> UpSeq {
        self.map(|b| !b)
    }

    pub fn zip<F: Fn(bool, bool) -> bool>(&self, other: &UpSeq, f: F) -> UpSeq {
        let (a, b) = UpSeq::aligned(self, other);
        UpSeq {
            prefix: a.prefix.iter().zip(&b.prefix).map(|(&x, &y)| f(x, y)).collect(),
            cycle: a.cycle.iter().zip(&b.cycle).map(|(&x, &y)| f(x, y)).collect(),
        }
    }

    pub fn and(&self, other: &UpSeq) -> UpSeq {
        self.zip(other, |a, b| a && b)
    }

    pub fn or(&self, other: &UpSeq) -> UpSeq {
        self.zip(other, |a, b| a || b)
    }

    /// `r(i) = self(i + 1)`.
    pub fn shift_next(&self) -> UpSeq {
        let p = self.prefix.len();
        let l = self.cycle.len();
        UpSeq {
            prefix: (0..p).map(|i| self.at(i + 1)).collect(),
            cycle: (0..l).map(|j| self.cycle[(j + 1) % l]).collect(),
        }
    }

    /// `r(0) = false`, `r(i) = self(i - 1)`.
    pub fn shift_prev(&self) -> UpSeq {
        let mut prefix = Vec::with_capacity(self.prefix.len() + 1);
        prefix.push(false);
        prefix.extend_from_slice(&self.prefix);
        UpSeq { prefix, cycle: self.cycle.clone() }
    }

    /// Least fixpoint of `u(i) = psi(i) ∨ (phi(i) ∧ u(i+1))`: the strong
    /// until over the infinite sequence.
    pub fn until(phi: &UpSeq, psi: &UpSeq) -> UpSeq {
        let (phi, psi) = UpSeq::aligned(phi, psi);
        let l = phi.cycle.len();
        let mut u = vec![false; l];
        loop {
            let mut changed = false;
            for j in (0..l).rev() {
                let next = u[(j + 1) % l];
                let v = psi.cycle[j] || (phi.cycle[j] && next);
                if v != u[j] {
                    u[j] = v;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let p = phi.prefix.len();
        let mut prefix = vec![false; p];
        let mut succ = u[0];
        for i in (0..p).rev() {
            prefix[i] = psi.prefix[i] || (phi.prefix[i] && succ);
            succ = prefix[i];
        }
        UpSeq { prefix, cycle: u }
    }

    /// Forward recurrence `s(i) = psi(i) ∨ (phi(i) ∧ s(i-1))` with
    /// `s(-1) = false`: the since operator. The state entering a cycle
    /// traversal is a single bit evolving monotonically, so it is fixed
    /// after at most one extra traversal.
    pub fn since(phi: &UpSeq, psi: &UpSeq) -> UpSeq {
        let (phi, psi) = UpSeq::aligned(phi, psi);
        let p = phi.prefix.len();
        let l = phi.cycle.len();
        let mut prefix = Vec::with_capacity(p + l);
        let mut state = false;
        for i in 0..p {
            state = psi.prefix[i] || (phi.prefix[i] && state);
            prefix.push(state);
        }
        let run = |mut state: bool| -> (Vec<bool>, bool) {
            let mut out = Vec::with_capacity(l);
            for j in 0..l {
                state = psi.cycle[j] || (phi.cycle[j] && state);
                out.push(state);
            }
            (out, state)
        };
        let (first, s1) = run(state);
        if s1 == state {
            return UpSeq { prefix, cycle: first };
        }
        let (second, s2) = run(s1);
        debug_assert_eq!(s2, s1, "since state must be fixed after one traversal");
        prefix.extend(first);
        UpSeq { prefix, cycle: second }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
