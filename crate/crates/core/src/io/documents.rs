//! Versioned JSON documents. Every file is `{"format": "...", "body": ...}`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::canonical::to_canonical_string;
use crate::operator::{Scenario, SessionLog, TimeModelParams};
use crate::panel::{Layout, PanelSpec, PlantState};
use crate::synthesis::Function;

/// Parse failure with its position in the source text. `line` and
/// `column` are 1-based; `field` is the dotted path inside `body`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {field}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub field: String,
    pub message: String,
}

/// A document type with a format tag and post-parse validation.
pub trait Document: Serialize + DeserializeOwned {
    const FORMAT: &'static str;

    /// Returns the offending field (relative to the body) and a message.
    fn check(&self) -> Result<(), (String, String)> {
        Ok(())
    }
}

#[derive(Serialize)]
struct EnvelopeRef<'a, T> {
    format: &'a str,
    body: &'a T,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope<T> {
    format: String,
    body: T,
}

pub fn serialize_document<T: Document>(doc: &T) -> serde_json::Result<String> {
    to_canonical_string(&EnvelopeRef {
        format: T::FORMAT,
        body: doc,
    })
}

#[derive(Deserialize)]
struct FormatTag {
    format: String,
}

pub fn parse_document<T: Document>(text: &str) -> Result<T, ParseError> {
    let wrong_format = |found: &str| {
        located(
            text,
            "format",
            format!("expected format {}, found {found}", T::FORMAT),
            false,
        )
    };
    // Check the tag first so a document of another kind gets a clear error.
    if let Ok(tag) = serde_json::from_str::<FormatTag>(text) {
        if tag.format != T::FORMAT {
            return Err(wrong_format(&tag.format));
        }
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    let env: Envelope<T> = match serde_path_to_error::deserialize(de) {
        Ok(env) => env,
        Err(e) => {
            let field = e.path().to_string();
            let inner = e.into_inner();
            return Err(ParseError {
                line: inner.line(),
                column: inner.column(),
                field: field.strip_prefix("body.").unwrap_or(&field).to_string(),
                message: inner.to_string(),
            });
        }
    };
    if env.format != T::FORMAT {
        return Err(wrong_format(&env.format));
    }
    env.body
        .check()
        .map_err(|(field, message)| located(text, &field, message, true))?;
    Ok(env.body)
}

/// Position of a field by scanning for its key names in path order.
fn located(text: &str, field: &str, message: String, in_body: bool) -> ParseError {
    let mut pos = 0;
    let mut keys: Vec<&str> = Vec::new();
    if in_body {
        keys.push("body");
    }
    keys.extend(field.split('.').filter(|k| !k.is_empty() && !k.starts_with('[')));
    for key in keys {
        if let Some(off) = text[pos..].find(&format!("\"{key}\"")) {
            pos += off;
        }
    }
    let before = &text[..pos];
    let line = before.matches('\n').count() + 1;
    let column = pos - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    ParseError {
        line,
        column,
        field: field.to_string(),
        message,
    }
}

fn field_of(message: &str, candidates: &[&str], fallback: &str) -> String {
    candidates
        .iter()
        .find(|c| message.contains(*c))
        .copied()
        .unwrap_or(fallback)
        .to_string()
}

fn panel_check(spec: &PanelSpec, prefix: &str) -> Result<(), (String, String)> {
    spec.validate().map_err(|e| {
        let message = e.to_string();
        let key = field_of(
            &message,
            &["command_buttons", "branching", "keypad", "layout", "family", "count"],
            "geometry",
        );
        let key = match key.as_str() {
            "layout" | "family" | "geometry" => key,
            _ => format!("geometry.{key}"),
        };
        (format!("{prefix}{key}"), message)
    })
}

fn plant_check(plant: &PlantState, prefix: &str) -> Result<(), (String, String)> {
    plant.validate().map_err(|e| {
        let message = e.to_string();
        let key = field_of(&message, &["program", "clock", "system"], "systems");
        let key = match key.as_str() {
            "program" => "programs".to_string(),
            "system" => "systems".to_string(),
            _ => key,
        };
        (format!("{prefix}{key}"), message)
    })
}

fn params_check(params: &TimeModelParams, prefix: &str) -> Result<(), (String, String)> {
    params.validate().map_err(|e| {
        let message = e.to_string();
        let key = field_of(
            &message,
            &["t_press", "t_check", "decide_a", "decide_b", "stage_penalty"],
            "",
        );
        (format!("{prefix}{key}"), message)
    })
}

impl Document for PanelSpec {
    const FORMAT: &'static str = "cscp.panel/1";

    fn check(&self) -> Result<(), (String, String)> {
        panel_check(self, "")
    }
}

impl Document for PlantState {
    const FORMAT: &'static str = "cscp.plant/1";

    fn check(&self) -> Result<(), (String, String)> {
        plant_check(self, "")
    }
}

impl Document for Scenario {
    const FORMAT: &'static str = "cscp.scenario/1";

    fn check(&self) -> Result<(), (String, String)> {
        for (i, step) in self.steps.iter().enumerate() {
            if let crate::operator::Step::Wait { seconds } = step {
                if !(seconds.is_finite() && *seconds >= 0.0) {
                    return Err((format!("steps[{i}].seconds"), "wait must be finite and >= 0".into()));
                }
            }
        }
        Ok(())
    }
}

impl Document for TimeModelParams {
    const FORMAT: &'static str = "cscp.params/1";

    fn check(&self) -> Result<(), (String, String)> {
        params_check(self, "")
    }
}

/// Lint fixture: a plant, its information-field layout and the functions
/// controlled from it, with the number of violations the linter must find.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LintCase {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub plant: PlantState,
    pub layout: Layout,
    #[serde(default)]
    pub functions: Vec<Function>,
    pub expected_violations: usize,
}

impl Document for LintCase {
    const FORMAT: &'static str = "cscp.lint/1";

    fn check(&self) -> Result<(), (String, String)> {
        plant_check(&self.plant, "plant.")
    }
}

/// Everything a run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionInputs {
    pub plant: PlantState,
    pub spec: PanelSpec,
    pub scenario: Scenario,
    pub params: TimeModelParams,
}

/// Saved run: inputs, their digest and the resulting log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionRecord {
    pub digest: String,
    pub inputs: SessionInputs,
    pub log: SessionLog,
}

impl Document for SessionRecord {
    const FORMAT: &'static str = "cscp.session/1";

    fn check(&self) -> Result<(), (String, String)> {
        plant_check(&self.inputs.plant, "inputs.plant.")?;
        panel_check(&self.inputs.spec, "inputs.spec.")?;
        params_check(&self.inputs.params, "inputs.params.")
    }
}

pub fn parse_panel_spec(text: &str) -> Result<PanelSpec, ParseError> {
    parse_document(text)
}

pub fn serialize_panel_spec(spec: &PanelSpec) -> String {
    serialize_document(spec).expect("panel specs hold no non-finite numbers")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_panel() {
        let spec = PanelSpec::matrix_matrix("mm", 16, 24);
        let text = serialize_panel_spec(&spec);
        assert!(text.starts_with("{\n  \"format\": \"cscp.panel/1\""));
        assert_eq!(parse_panel_spec(&text).unwrap(), spec);
    }

    #[test]
    fn odd_pairing_is_located() {
        let mut spec = PanelSpec::matrix_matrix("mm", 16, 24);
        spec.geometry = crate::panel::Geometry::Matrix {
            select_buttons: 16,
            command_buttons: 23,
        };
        let text = serialize_panel_spec(&spec);
        let err = parse_panel_spec(&text).unwrap_err();
        assert_eq!(err.field, "geometry.command_buttons");
        let line = text.lines().nth(err.line - 1).unwrap();
        assert!(line.contains("\"command_buttons\": 23"), "{line}");
        assert!(err.message.contains("on/off pairs"));
    }

    #[test]
    fn schema_error_has_path_and_line() {
        let text = "{\n  \"format\": \"cscp.panel/1\",\n  \"body\": {\n    \"id\": 5\n  }\n}\n";
        let err = parse_panel_spec(text).unwrap_err();
        assert_eq!(err.field, "id");
        assert_eq!(err.line, 4);
    }

    #[test]
    fn unknown_field_rejected() {
        let spec = PanelSpec::single_channel("s");
        let text = serialize_panel_spec(&spec).replacen("\"id\"", "\"bogus\": 1,\n    \"id\"", 1);
        let err = parse_panel_spec(&text).unwrap_err();
        assert!(err.message.contains("bogus"));
    }

    #[test]
    fn wrong_format_tag() {
        let text = serialize_document(&TimeModelParams::default()).unwrap();
        let err = parse_panel_spec(&text).unwrap_err();
        assert_eq!(err.field, "format");
        assert_eq!(err.line, 2);
    }
}
