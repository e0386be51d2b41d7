use std::fmt::Write as _;

use super::{FactLit, ProblemInstance};

impl ProblemInstance {
    /// Renders the instance in the domain-file syntax accepted by
    /// [`parse_domain`](super::parse_domain).
    pub fn to_domain_text(&self) -> String {
        let name = |f: &super::FactId| self.fact_name(*f).to_string();
        let lits = |ls: &[FactLit]| -> String {
            ls.iter()
                .map(|l| format!(" {}{}", if l.positive { "" } else { "-" }, self.fact_name(l.fact)))
                .collect()
        };
        let mut s = String::new();
        let base: Vec<&str> = self.facts.iter().filter(|f| !f.is_defined()).map(|f| f.name.as_str()).collect();
        if !base.is_empty() {
            writeln!(s, "fact {}", base.join(" ")).unwrap();
        }
        for f in self.facts.iter().filter(|f| f.is_defined()) {
            writeln!(s, "defined {} {}", f.name, f.defined_by.as_ref().unwrap().to_sexpr(name)).unwrap();
        }
        let obs: Vec<&str> = self.facts.iter().filter(|f| f.observable).map(|f| f.name.as_str()).collect();
        if !obs.is_empty() {
            writeln!(s, "observable {}", obs.join(" ")).unwrap();
        }
        for o in &self.operators {
            write!(s, "operator {} pre{}", o.name, lits(&o.pre)).unwrap();
            if o.is_deterministic() {
                write!(s, " post{}", lits(&o.effects[0])).unwrap();
            } else {
                for e in &o.effects {
                    write!(s, " eff{}", lits(e)).unwrap();
                }
            }
            s.push('\n');
        }
        for r in &self.rules {
            write!(s, "rule {} pre{}", r.name, lits(&r.pre)).unwrap();
            for e in &r.alternatives {
                write!(s, " eff{}", lits(e)).unwrap();
            }
            s.push('\n');
        }
        writeln!(s, "init {}", self.init.to_sexpr(name)).unwrap();
        writeln!(s, "goal {}", self.goal.to_sexpr(name)).unwrap();
        s
    }
}
