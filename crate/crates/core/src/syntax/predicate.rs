//! Predicate vocabulary and argument schemas.

use core::fmt;

/// When a predicate is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PredicateClass {
    /// Cost predicate checked on every step of an episode.
    Instantaneous,
    /// Cost predicate checked once on the final state.
    Terminal,
    /// Scene relation used by `:init` and `:goal`.
    State,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArgKind {
    /// Object, region or gripper name.
    Entity,
    /// Part index list such as `(0 3)`.
    Ids,
    Number,
    Vec3,
}

impl fmt::Display for ArgKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArgKind::Entity => "object name",
            ArgKind::Ids => "part index list",
            ArgKind::Number => "number",
            ArgKind::Vec3 => "3-vector",
        })
    }
}

macro_rules! predicates {
    ($( $variant:ident => $name:literal [$($alias:literal),*], $class:ident, [$($arg:ident),*]; )*) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        #[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
        pub enum Predicate {
            $($variant,)*
        }

        impl Predicate {
            pub const ALL: &'static [Predicate] = &[$(Predicate::$variant,)*];

            /// Canonical spelling.
            pub fn name(self) -> &'static str {
                match self {
                    $(Predicate::$variant => $name,)*
                }
            }

            /// Case-sensitive lookup by canonical name or accepted alias.
            pub fn from_name(name: &str) -> Option<Predicate> {
                match name {
                    $($name $(| $alias)* => Some(Predicate::$variant),)*
                    _ => None,
                }
            }

            pub fn class(self) -> PredicateClass {
                match self {
                    $(Predicate::$variant => PredicateClass::$class,)*
                }
            }

            pub fn schema(self) -> &'static [ArgKind] {
                match self {
                    $(Predicate::$variant => &[$(ArgKind::$arg),*],)*
                }
            }
        }
    };
}

predicates! {
    InContact => "InContact" [], Instantaneous, [Entity, Entity];
    InContactPart => "InContactPart" [], Instantaneous, [Entity, Entity, Ids, Ids];
    CheckForce => "CheckForce" [], Instantaneous, [Entity, Entity, Number];
    CheckDistance => "CheckDistance" [], Instantaneous, [Entity, Entity, Number];
    CheckGripperDist => "CheckGripperDist" ["CheckGripperDistance"], Instantaneous, [Entity, Number];
    CheckGripperDistPart => "CheckGripperDistPart" ["CheckGripperDistancePart"], Instantaneous, [Entity, Ids, Number];
    CheckGripperContact => "CheckGripperContact" [], Instantaneous, [Entity];
    CheckGripperContactPart => "CheckGripperContactPart" [], Instantaneous, [Entity, Ids];
    Collide => "Collide" [], Terminal, [Entity];
    Fall => "Fall" [], Terminal, [Entity];
    NotOn => "NotOn" [], Terminal, [Entity, Entity];
    At => "At" [], State, [Entity, Vec3];
    OnTop => "OnTop" [], State, [Entity, Entity];
    In => "In" [], State, [Entity, Entity];
    Lit => "Lit" [], State, [Entity];
    TurnedOn => "TurnedOn" [], State, [Entity];
    ToggledOn => "ToggledOn" [], State, [Entity];
}

impl Predicate {
    /// Predicates accepted inside `:init`.
    pub fn allowed_in_init(self) -> bool {
        matches!(self, Predicate::At | Predicate::OnTop | Predicate::Lit | Predicate::TurnedOn | Predicate::ToggledOn)
    }

    pub fn is_cost(self) -> bool {
        self.class() != PredicateClass::State
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_partition_matches_table() {
        let inst: alloc::vec::Vec<_> =
            Predicate::ALL.iter().filter(|p| p.class() == PredicateClass::Instantaneous).map(|p| p.name()).collect();
        assert_eq!(
            inst,
            [
                "InContact",
                "InContactPart",
                "CheckForce",
                "CheckDistance",
                "CheckGripperDist",
                "CheckGripperDistPart",
                "CheckGripperContact",
                "CheckGripperContactPart"
            ]
        );
        let term: alloc::vec::Vec<_> =
            Predicate::ALL.iter().filter(|p| p.class() == PredicateClass::Terminal).map(|p| p.name()).collect();
        assert_eq!(term, ["Collide", "Fall", "NotOn"]);
    }

    #[test]
    fn lookup_is_case_sensitive_and_accepts_long_gripper_names() {
        assert_eq!(Predicate::from_name("InContact"), Some(Predicate::InContact));
        assert_eq!(Predicate::from_name("incontact"), None);
        assert_eq!(Predicate::from_name("CheckGripperDistance"), Some(Predicate::CheckGripperDist));
        assert_eq!(Predicate::from_name("CheckGripperDistancePart"), Some(Predicate::CheckGripperDistPart));
    }
}
