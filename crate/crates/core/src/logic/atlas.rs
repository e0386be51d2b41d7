use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::domain::Source;

use super::VarId;

/// Structured identity of an encoding variable.
///
/// Plan-state numbers (`state`, `from`, `to`) are 1-based; times are 0-based.
/// For `Enabled`, `slot` is a plan state for automaton and phased plans and
/// a time point for sequence plans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarIdentity {
    FactAt { fact: usize, t: usize },
    OpAt { op: usize, t: usize },
    Cond { state: usize, fact: usize },
    SuccT { from: usize, to: usize },
    SuccF { from: usize, to: usize },
    StateAt { state: usize, t: usize },
    Enabled { op: usize, slot: usize },
    ApplAt { op: usize, t: usize },
    AuxInit { k: usize },
    Choice { source: Source, bit: usize, t: usize },
    Tseitin { n: usize },
}

impl fmt::Display for VarIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use VarIdentity::*;
        match *self {
            FactAt { fact, t } => write!(f, "fact({fact},{t})"),
            OpAt { op, t } => write!(f, "op({op},{t})"),
            Cond { state, fact } => write!(f, "cond({state},{fact})"),
            SuccT { from, to } => write!(f, "succT({from},{to})"),
            SuccF { from, to } => write!(f, "succF({from},{to})"),
            StateAt { state, t } => write!(f, "state({state},{t})"),
            Enabled { op, slot } => write!(f, "enabled({op},{slot})"),
            ApplAt { op, t } => write!(f, "appl({op},{t})"),
            AuxInit { k } => write!(f, "aux({k})"),
            Choice { source, bit, t } => write!(f, "choice({source},{bit},{t})"),
            Tseitin { n } => write!(f, "tseitin({n})"),
        }
    }
}

impl FromStr for VarIdentity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let open = s.find('(').ok_or_else(|| format!("malformed variable name `{s}`"))?;
        if !s.ends_with(')') {
            return Err(format!("malformed variable name `{s}`"));
        }
        let head = &s[..open];
        let args: Vec<&str> = s[open + 1..s.len() - 1].split(',').map(str::trim).collect();
        let num = |i: usize| -> Result<usize, String> {
            args.get(i)
                .ok_or_else(|| format!("missing argument in `{s}`"))?
                .parse::<usize>()
                .map_err(|e| format!("bad number in `{s}`: {e}"))
        };
        let arity = |n: usize| -> Result<(), String> {
            if args.len() == n {
                Ok(())
            } else {
                Err(format!("`{head}` takes {n} arguments"))
            }
        };
        use VarIdentity::*;
        let id = match head {
            "fact" => arity(2).and(Ok(FactAt { fact: num(0)?, t: num(1)? }))?,
            "op" => arity(2).and(Ok(OpAt { op: num(0)?, t: num(1)? }))?,
            "cond" => arity(2).and(Ok(Cond { state: num(0)?, fact: num(1)? }))?,
            "succT" => arity(2).and(Ok(SuccT { from: num(0)?, to: num(1)? }))?,
            "succF" => arity(2).and(Ok(SuccF { from: num(0)?, to: num(1)? }))?,
            "state" => arity(2).and(Ok(StateAt { state: num(0)?, t: num(1)? }))?,
            "enabled" => arity(2).and(Ok(Enabled { op: num(0)?, slot: num(1)? }))?,
            "appl" => arity(2).and(Ok(ApplAt { op: num(0)?, t: num(1)? }))?,
            "aux" => arity(1).and(Ok(AuxInit { k: num(0)? }))?,
            "tseitin" => arity(1).and(Ok(Tseitin { n: num(0)? }))?,
            "choice" => {
                arity(3)?;
                let source = args[0].parse::<Source>()?;
                Choice { source, bit: num(1)?, t: num(2)? }
            }
            _ => return Err(format!("unknown variable kind `{head}`")),
        };
        Ok(id)
    }
}

/// Bijection between solver variables and structured identities.
///
/// Append-only: variables are numbered densely in allocation order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VariableAtlas {
    by_id: Vec<VarIdentity>,
    by_identity: HashMap<VarIdentity, VarId>,
    tseitin_count: usize,
}

impl VariableAtlas {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.by_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_id.is_empty()
    }

    /// Returns the variable for `identity`, allocating it on first use.
    pub fn var(&mut self, identity: VarIdentity) -> VarId {
        if let Some(&v) = self.by_identity.get(&identity) {
            return v;
        }
        if let VarIdentity::Tseitin { n } = identity {
            self.tseitin_count = self.tseitin_count.max(n + 1);
        }
        self.by_id.push(identity);
        let v = VarId(self.by_id.len() as u32);
        self.by_identity.insert(identity, v);
        v
    }

    pub fn lookup(&self, identity: &VarIdentity) -> Option<VarId> {
        self.by_identity.get(identity).copied()
    }

    pub fn identity(&self, v: VarId) -> Option<&VarIdentity> {
        v.index().checked_sub(1).and_then(|i| self.by_id.get(i))
    }

    pub fn fresh_tseitin(&mut self) -> VarId {
        let n = self.tseitin_count;
        self.var(VarIdentity::Tseitin { n })
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &VarIdentity)> {
        self.by_id.iter().enumerate().map(|(i, id)| (VarId(i as u32 + 1), id))
    }

    /// Registers `identity` under an explicit variable number, as needed when
    /// reading QDIMACS comments. Fails if the slot or the identity is taken.
    pub fn insert_at(&mut self, v: VarId, identity: VarIdentity) -> Result<(), String> {
        if self.by_identity.contains_key(&identity) {
            return Err(format!("{identity} registered twice"));
        }
        let idx = v.index();
        if idx == 0 {
            return Err("variable 0".into());
        }
        if idx != self.by_id.len() + 1 {
            return Err(format!(
                "atlas entries must be dense and ascending; expected {} got {idx}",
                self.by_id.len() + 1
            ));
        }
        self.var(identity);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        let ids = [
            VarIdentity::FactAt { fact: 3, t: 0 },
            VarIdentity::OpAt { op: 1, t: 2 },
            VarIdentity::Cond { state: 1, fact: 4 },
            VarIdentity::SuccT { from: 2, to: 1 },
            VarIdentity::SuccF { from: 1, to: 1 },
            VarIdentity::StateAt { state: 3, t: 5 },
            VarIdentity::Enabled { op: 0, slot: 1 },
            VarIdentity::ApplAt { op: 2, t: 1 },
            VarIdentity::AuxInit { k: 2 },
            VarIdentity::Choice { source: Source::Rule(1), bit: 0, t: 3 },
            VarIdentity::Choice { source: Source::Operator(4), bit: 1, t: 0 },
            VarIdentity::Tseitin { n: 17 },
        ];
        for id in ids {
            assert_eq!(id.to_string().parse::<VarIdentity>().unwrap(), id);
        }
        assert!("wat(1)".parse::<VarIdentity>().is_err());
        assert!("fact(1)".parse::<VarIdentity>().is_err());
    }

    #[test]
    fn bijection() {
        let mut a = VariableAtlas::new();
        let x = a.var(VarIdentity::AuxInit { k: 1 });
        let y = a.var(VarIdentity::AuxInit { k: 2 });
        assert_eq!(a.var(VarIdentity::AuxInit { k: 1 }), x);
        assert_ne!(x, y);
        assert_eq!(a.identity(y), Some(&VarIdentity::AuxInit { k: 2 }));
        let t0 = a.fresh_tseitin();
        let t1 = a.fresh_tseitin();
        assert_ne!(t0, t1);
        assert_eq!(a.len(), 4);
    }
}
