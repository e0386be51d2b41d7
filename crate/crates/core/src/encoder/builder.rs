use crate::domain::{FactId, FactLit, ProblemInstance, Source};
use crate::logic::{Formula, VarId, VarIdentity, VariableAtlas};

use super::Schema;

pub type SchemaFormula = (Schema, Formula<VarId>);

/// Shorthand constructors over an atlas.
pub(crate) struct Vars<'a> {
    pub atlas: &'a mut VariableAtlas,
}

impl<'a> Vars<'a> {
    pub fn new(atlas: &'a mut VariableAtlas) -> Self {
        Vars { atlas }
    }

    pub fn atom(&mut self, id: VarIdentity) -> Formula<VarId> {
        Formula::atom(self.atlas.var(id))
    }

    pub fn fact(&mut self, f: FactId, t: usize) -> Formula<VarId> {
        self.atom(VarIdentity::FactAt { fact: f.0, t })
    }

    pub fn lit(&mut self, l: FactLit, t: usize) -> Formula<VarId> {
        let a = self.fact(l.fact, t);
        if l.positive {
            a
        } else {
            Formula::not(a)
        }
    }

    pub fn conj(&mut self, lits: &[FactLit], t: usize) -> Formula<VarId> {
        Formula::and(lits.iter().map(|&l| self.lit(l, t)))
    }

    /// Time-indexed copy of a formula over facts.
    pub fn at(&mut self, f: &Formula<FactId>, t: usize) -> Formula<VarId> {
        f.map_atoms(&mut |a: &FactId| self.atlas.var(VarIdentity::FactAt { fact: a.0, t }))
    }

    pub fn op(&mut self, i: usize, t: usize) -> Formula<VarId> {
        self.atom(VarIdentity::OpAt { op: i, t })
    }

    pub fn state(&mut self, s: usize, t: usize) -> Formula<VarId> {
        self.atom(VarIdentity::StateAt { state: s, t })
    }

    pub fn enabled(&mut self, i: usize, slot: usize) -> Formula<VarId> {
        self.atom(VarIdentity::Enabled { op: i, slot })
    }

    /// Condition selecting alternative `j` of `k` for `source` at `t`.
    /// Alternatives below the last are bit patterns over the choice bits
    /// (bit clear means the choice variable is true); the last alternative
    /// takes every remaining pattern.
    pub fn choice(&mut self, source: Source, k: usize, j: usize, t: usize) -> Formula<VarId> {
        let bits = choice_bits(k);
        let pattern = |p: usize, vars: &mut Self| -> Formula<VarId> {
            Formula::and((0..bits).map(|b| {
                let c = vars.atom(VarIdentity::Choice { source, bit: b, t });
                if p >> b & 1 == 0 {
                    c
                } else {
                    Formula::not(c)
                }
            }))
        };
        if j + 1 < k {
            pattern(j, self)
        } else {
            Formula::and((0..k - 1).map(|p| Formula::not(pattern(p, self))).collect::<Vec<_>>())
        }
    }

    /// `pre_t ∧ ¬post_t`: the operator is applicable and would change
    /// something. For several alternatives, `post` is every literal of
    /// every alternative.
    pub fn applicable(&mut self, inst: &ProblemInstance, i: usize, t: usize) -> Formula<VarId> {
        let o = &inst.operators[i];
        let post: Vec<FactLit> = o.effect_lits().copied().collect();
        Formula::and([self.conj(&o.pre, t), Formula::not(self.conj(&post, t))])
    }
}

/// Number of choice variables for `k` alternatives.
pub fn choice_bits(k: usize) -> usize {
    let mut b = 0;
    while (1usize << b) < k {
        b += 1;
    }
    b
}
