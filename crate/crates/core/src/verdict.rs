//! Outcome of a stability check: the hypothesis gates that were evaluated,
//! the conclusion that was tested, and the certified constants behind both.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::interval::{all_hold, Check, Interval, NamedCheck};
use crate::linalg::Vector;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub variant: String,
    /// Every certified constant that entered a gate.
    pub hypothesis_values: BTreeMap<String, Interval>,
    pub gates: Vec<NamedCheck>,
    /// All gates certified. Indeterminate gates count as failures.
    pub hypothesis_ok: bool,
    pub conclusion: Vec<NamedCheck>,
    /// Conclusion holds and was asserted (only when `hypothesis_ok`).
    pub conclusion_ok: bool,
    /// The conclusion checks hold, whether or not they were asserted.
    pub conclusion_observed: bool,
    /// Unit vectors, as `[re, im]` pairs, that certify a violated or
    /// witnessed inequality.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub witnesses: BTreeMap<String, Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl StabilityVerdict {
    /// Hypothesis certified but conclusion false: a genuine counterexample.
    pub fn contradiction(&self) -> bool {
        self.hypothesis_ok && !self.conclusion_observed
    }

    /// Exit status following the CLI convention: 0 ok, 1 gate failed,
    /// 2 contradiction.
    pub fn exit_code(&self) -> i32 {
        if self.contradiction() {
            2
        } else if !self.hypothesis_ok {
            1
        } else {
            0
        }
    }

    pub fn value(&self, name: &str) -> Option<Interval> {
        self.hypothesis_values.get(name).copied()
    }
}

pub fn vector_pairs(v: &Vector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Default)]
pub(crate) struct VerdictBuilder {
    variant: String,
    values: BTreeMap<String, Interval>,
    gates: Vec<NamedCheck>,
    conclusion: Vec<NamedCheck>,
    witnesses: BTreeMap<String, Vec<[f64; 2]>>,
    notes: Vec<String>,
}

impl VerdictBuilder {
    pub fn new(variant: impl Into<String>) -> Self {
        VerdictBuilder { variant: variant.into(), ..Default::default() }
    }

    pub fn value(&mut self, name: impl Into<String>, v: Interval) -> Interval {
        self.values.insert(name.into(), v);
        v
    }

    pub fn get(&self, name: &str) -> Option<Interval> {
        self.values.get(name).copied()
    }

    pub fn gate(&mut self, c: NamedCheck) -> Check {
        let s = c.status;
        self.gates.push(c);
        s
    }

    pub fn conclude(&mut self, c: NamedCheck) -> Check {
        let s = c.status;
        self.conclusion.push(c);
        s
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Append every gate and conclusion of `other`, prefixing names.
    pub fn absorb(&mut self, prefix: &str, other: StabilityVerdict) {
        for (k, v) in other.hypothesis_values {
            self.values.insert(format!("{prefix}{k}"), v);
        }
        for mut g in other.gates {
            g.name = format!("{prefix}{}", g.name);
            self.gates.push(g);
        }
        for (k, v) in other.witnesses {
            self.witnesses.insert(format!("{prefix}{k}"), v);
        }
        self.notes.extend(other.notes.into_iter().map(|n| format!("{prefix}{n}")));
    }

    /// Like [`absorb`](Self::absorb), and also keeps the conclusions of
    /// `other` as conclusions: in a proof chain they are intermediate claims
    /// that must hold whenever the gates do.
    pub fn absorb_all(&mut self, prefix: &str, other: StabilityVerdict) {
        for mut c in other.conclusion.clone() {
            c.name = format!("{prefix}{}", c.name);
            self.conclusion.push(c);
        }
        self.absorb(prefix, other);
    }

    pub fn finish(mut self) -> StabilityVerdict {
        let gates = all_hold(&self.gates);
        for g in &self.gates {
            if g.status == Check::Indeterminate {
                self.notes.push(format!("gate '{}' is indeterminate; widen budget", g.name));
            }
        }
        let hypothesis_ok = gates.holds();
        let observed = self.conclusion.iter().all(|c| !c.status.violated());
        let certain = all_hold(&self.conclusion).holds();
        if hypothesis_ok && observed && !certain {
            self.notes.push("conclusion is indeterminate at this budget".into());
        }
        StabilityVerdict {
            variant: self.variant,
            hypothesis_values: self.values,
            gates: self.gates,
            hypothesis_ok,
            conclusion_ok: hypothesis_ok && certain,
            conclusion_observed: observed,
            conclusion: self.conclusion,
            witnesses: self.witnesses,
            notes: self.notes,
        }
    }
}
