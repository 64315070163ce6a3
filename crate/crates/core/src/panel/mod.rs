//! Panel state machines and the simulated plant they control.

pub mod error;
pub mod plant;
pub mod press;
pub mod program;
pub mod render;
pub mod sequential;
pub mod spec;
pub mod state;
pub mod types;

pub use error::{PanelError, SequentialError};
pub use plant::{plant_apply, start_program, EntryProgress, PlantState, ProgramEntry, ProgramSchedule, System, Unit};
pub use press::{apply_emissions, note_change, operate, press_button, Operation, PressOutcome, PressResult};
pub use program::{reconcile, step_program, EntryKey, ProgramEvent};
pub use render::{ack_change, render_indicators, ExpectedStates};
pub use sequential::{decode_sequential, encode_sequential, CommandCatalog, Pulse};
pub use spec::{Family, Geometry, Layout, LayoutRow, PanelSpec};
pub use state::{Binding, ButtonEvent, ButtonKind, Cell, IndicatorFrame, PanelState};
pub use types::{ChangeEvent, CommandEmission, CommandSource, Switch, UnitRef};
