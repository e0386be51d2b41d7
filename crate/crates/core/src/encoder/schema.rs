use std::fmt;

use serde::{Deserialize, Serialize};

/// Origin of an instantiated formula, for the census.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Schema {
    /// Deterministic operator: preconditions now, effects next.
    Effect,
    /// Frame axiom for one literal.
    Frame,
    Mutex,
    /// Defined fact tied to its definition.
    Definition,
    NondetPre,
    /// Effect of the first alternative of a nondeterministic operator.
    NondetFirst,
    /// Effects of the remaining alternatives.
    NondetRest,
    RuleEffect,
    CondExclusive,
    CondSome,
    SuccTExclusive,
    SuccFExclusive,
    SuccTSome,
    SuccFSome,
    AutomatonStart,
    AutomatonUnique,
    TransitionT,
    TransitionF,
    Apply,
    ApplyOnly,
    Applicable,
    Advance,
    /// The last phase stays put once nothing applies.
    Absorb,
    Stay,
    PhasedStart,
    PhasedUnique,
    PhasedApply,
    NoopSatisfied,
    NoopDisabled,
    Sequence,
    /// Auxiliary-variable selection of an initial state.
    InitSelect,
    Goal,
    InitGoal,
    Invariant,
}

impl Schema {
    pub const ALL: [Schema; 34] = [
        Schema::Effect,
        Schema::Frame,
        Schema::Mutex,
        Schema::Definition,
        Schema::NondetPre,
        Schema::NondetFirst,
        Schema::NondetRest,
        Schema::RuleEffect,
        Schema::CondExclusive,
        Schema::CondSome,
        Schema::SuccTExclusive,
        Schema::SuccFExclusive,
        Schema::SuccTSome,
        Schema::SuccFSome,
        Schema::AutomatonStart,
        Schema::AutomatonUnique,
        Schema::TransitionT,
        Schema::TransitionF,
        Schema::Apply,
        Schema::ApplyOnly,
        Schema::Applicable,
        Schema::Advance,
        Schema::Absorb,
        Schema::Stay,
        Schema::PhasedStart,
        Schema::PhasedUnique,
        Schema::PhasedApply,
        Schema::NoopSatisfied,
        Schema::NoopDisabled,
        Schema::Sequence,
        Schema::InitSelect,
        Schema::Goal,
        Schema::InitGoal,
        Schema::Invariant,
    ];

    /// Short identifier; numbered schemata use their usual numbers.
    pub fn id(self) -> &'static str {
        use Schema::*;
        match self {
            Effect => "1.1",
            Frame => "1.2",
            Mutex => "mutex",
            Definition => "def",
            NondetPre => "14.1",
            NondetFirst => "14.2",
            NondetRest => "14.3",
            RuleEffect => "rule",
            CondExclusive => "2.1",
            CondSome => "2.2",
            SuccTExclusive => "3.1",
            SuccFExclusive => "3.2",
            SuccTSome => "3.3",
            SuccFSome => "3.4",
            AutomatonStart => "4.1",
            AutomatonUnique => "5.1",
            TransitionT => "6.1",
            TransitionF => "6.2",
            Apply => "7.1",
            ApplyOnly => "7.2",
            Applicable => "8.1",
            Advance => "9.1",
            Absorb => "9.1-last",
            Stay => "9.2",
            PhasedStart => "10.1",
            PhasedUnique => "11.1",
            PhasedApply => "12.1",
            NoopSatisfied => "12.2",
            NoopDisabled => "12.3",
            Sequence => "13.1",
            InitSelect => "Q",
            Goal => "goal",
            InitGoal => "init-goal",
            Invariant => "inv",
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}
