//! Pulse code for the single-channel panel.
//!
//! A command is keyed as two groups: the 1-based system number, then the
//! 1-based command number within that system (`2·unit + 1` for on,
//! `2·unit + 2` for off). A group of value `d` is `d` pulses followed by a
//! gap. Every codeword holds exactly two gaps and ends with one, so no
//! codeword is a proper prefix of another.

use serde::{Deserialize, Serialize};

use super::error::SequentialError;
use super::plant::PlantState;
use super::types::{CommandEmission, CommandSource, Switch, UnitRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pulse {
    Pulse,
    Gap,
}

/// Ordered list of keyable commands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandCatalog {
    commands: Vec<(UnitRef, Switch)>,
    units_per_system: Vec<usize>,
}

impl CommandCatalog {
    /// Every unit of the plant, on then off.
    pub fn from_plant(plant: &PlantState) -> Self {
        let commands = plant
            .units()
            .flat_map(|u| [(u, Switch::On), (u, Switch::Off)])
            .collect();
        Self {
            commands,
            units_per_system: plant.systems.iter().map(|s| s.units.len()).collect(),
        }
    }

    pub fn from_commands(commands: Vec<(UnitRef, Switch)>) -> Self {
        let systems = commands.iter().map(|(u, _)| u.system + 1).max().unwrap_or(0);
        let mut units_per_system = vec![0; systems];
        for (u, _) in &commands {
            units_per_system[u.system] = units_per_system[u.system].max(u.unit + 1);
        }
        Self {
            commands,
            units_per_system,
        }
    }

    pub fn len(&self) -> usize {
        self.commands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commands.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<(UnitRef, Switch)> {
        self.commands.get(index).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (UnitRef, Switch)> + '_ {
        self.commands.iter().copied()
    }

    pub fn contains(&self, target: UnitRef, desired: Switch) -> bool {
        self.commands.contains(&(target, desired))
    }
}

fn command_number(target: UnitRef, desired: Switch) -> usize {
    2 * target.unit + if desired.is_on() { 1 } else { 2 }
}

/// Pulse train for one catalog command.
pub fn encode_sequential(
    cmd: &CommandEmission,
    catalog: &CommandCatalog,
) -> Result<Vec<Pulse>, SequentialError> {
    if !catalog.contains(cmd.target, cmd.desired) {
        return Err(SequentialError::NotInCatalog(cmd.target));
    }
    let mut out = Vec::new();
    for group in [cmd.target.system + 1, command_number(cmd.target, cmd.desired)] {
        out.extend(std::iter::repeat_n(Pulse::Pulse, group));
        out.push(Pulse::Gap);
    }
    Ok(out)
}

/// Decodes a pulse train. A train that stops before its second gap is
/// `Incomplete`; the operator may continue keying.
pub fn decode_sequential(
    pulses: &[Pulse],
    catalog: &CommandCatalog,
) -> Result<CommandEmission, SequentialError> {
    let mut groups = Vec::with_capacity(2);
    let mut count = 0usize;
    for (i, p) in pulses.iter().enumerate() {
        match p {
            Pulse::Pulse => count += 1,
            Pulse::Gap => {
                if count == 0 {
                    return Err(SequentialError::Malformed("gap without pulses"));
                }
                groups.push(count);
                count = 0;
                if groups.len() == 2 && i + 1 != pulses.len() {
                    return Err(SequentialError::Malformed("symbols after complete code"));
                }
            }
        }
    }
    if groups.len() < 2 {
        return Err(SequentialError::Incomplete);
    }
    let (system, command) = (groups[0], groups[1]);
    let unknown = SequentialError::UnknownPattern { system, command };
    let sys = system - 1;
    let unit = (command - 1) / 2;
    let desired = if command % 2 == 1 { Switch::On } else { Switch::Off };
    if catalog.units_per_system.get(sys).is_none_or(|&n| unit >= n) {
        return Err(unknown);
    }
    let target = UnitRef::new(sys, unit);
    if !catalog.contains(target, desired) {
        return Err(unknown);
    }
    Ok(CommandEmission {
        target,
        desired,
        source: CommandSource::Operator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog10() -> CommandCatalog {
        CommandCatalog::from_plant(&PlantState::uniform("t", 1, 5))
    }

    #[test]
    fn first_command_is_two_groups_of_one_pulse() {
        let cat = catalog10();
        let (t, d) = cat.get(0).unwrap();
        let code = encode_sequential(&CommandEmission::operator(t, d), &cat).unwrap();
        assert_eq!(code, vec![Pulse::Pulse, Pulse::Gap, Pulse::Pulse, Pulse::Gap]);
        let (t, d) = cat.get(1).unwrap();
        let code = encode_sequential(&CommandEmission::operator(t, d), &cat).unwrap();
        // L(1) = system group (1 + gap) + command group (2 + gap)
        assert_eq!(code.len(), 5);
        let back = decode_sequential(&code, &cat).unwrap();
        assert_eq!((back.target, back.desired), (t, d));
    }

    #[test]
    fn round_trip_whole_catalog() {
        let cat = CommandCatalog::from_plant(&PlantState::uniform("t", 4, 6));
        for (t, d) in cat.iter() {
            let cmd = CommandEmission::operator(t, d);
            let code = encode_sequential(&cmd, &cat).unwrap();
            assert_eq!(decode_sequential(&code, &cat).unwrap(), cmd);
        }
    }

    #[test]
    fn unknown_pattern_and_malformed() {
        let cat = catalog10();
        let nine = |n: usize| std::iter::repeat_n(Pulse::Pulse, n);
        let mut code: Vec<Pulse> = nine(2).collect();
        code.push(Pulse::Gap);
        code.push(Pulse::Pulse);
        code.push(Pulse::Gap);
        assert!(matches!(
            decode_sequential(&code, &cat),
            Err(SequentialError::UnknownPattern { system: 2, .. })
        ));
        assert_eq!(
            decode_sequential(&[Pulse::Gap], &cat),
            Err(SequentialError::Malformed("gap without pulses"))
        );
        let mut long: Vec<Pulse> = vec![Pulse::Pulse, Pulse::Gap, Pulse::Pulse, Pulse::Gap];
        long.push(Pulse::Pulse);
        assert!(matches!(
            decode_sequential(&long, &cat),
            Err(SequentialError::Malformed(_))
        ));
    }

    #[test]
    fn not_in_catalog() {
        let cat = CommandCatalog::from_commands(vec![(UnitRef::new(0, 0), Switch::On)]);
        let cmd = CommandEmission::operator(UnitRef::new(0, 0), Switch::Off);
        assert!(encode_sequential(&cmd, &cat).is_err());
    }
}
