use std::fmt;

use serde::{Deserialize, Serialize};

/// Address of one two-state controlled unit: system index plus unit index
/// within that system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitRef {
    pub system: usize,
    pub unit: usize,
}

impl UnitRef {
    pub const fn new(system: usize, unit: usize) -> Self {
        Self { system, unit }
    }
}

impl fmt::Display for UnitRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.system, self.unit)
    }
}

/// Binary state of a unit, also used as the direction of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Switch {
    On,
    Off,
}

impl Switch {
    pub fn is_on(self) -> bool {
        self == Switch::On
    }

    pub fn from_on(on: bool) -> Self {
        if on {
            Switch::On
        } else {
            Switch::Off
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Switch::On => Switch::Off,
            Switch::Off => Switch::On,
        }
    }
}

impl fmt::Display for Switch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Switch::On => "on",
            Switch::Off => "off",
        })
    }
}

/// Who caused a command. Only non-operator commands raise status-change
/// signals on capable panels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandSource {
    Operator,
    Automatic,
    Remote,
}

/// A command leaving a panel (or a program) for the plant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandEmission {
    pub target: UnitRef,
    pub desired: Switch,
    pub source: CommandSource,
}

impl CommandEmission {
    pub fn operator(target: UnitRef, desired: Switch) -> Self {
        Self {
            target,
            desired,
            source: CommandSource::Operator,
        }
    }
}

/// Emitted by `plant_apply` when a unit actually changes state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChangeEvent {
    pub target: UnitRef,
    pub from: Switch,
    pub to: Switch,
    pub source: CommandSource,
}
