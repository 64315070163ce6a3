use serde::{Deserialize, Serialize};

use crate::io::canonical::fixed6;

/// Direction of the optional per-selection stage-count effect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StagePenaltySign {
    /// Each selection stage adds `stage_penalty` seconds.
    #[default]
    MoreStagesSlower,
    /// A selection of `k` stages adds `stage_penalty / k` seconds.
    FewerStagesSlower,
}

/// Keystroke-level time model parameters, all in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeModelParams {
    #[serde(with = "fixed6")]
    pub t_press: f64,
    #[serde(with = "fixed6")]
    pub t_check: f64,
    #[serde(with = "fixed6")]
    pub decide_a: f64,
    #[serde(with = "fixed6")]
    pub decide_b: f64,
    #[serde(with = "fixed6", default)]
    pub stage_penalty: f64,
    #[serde(default)]
    pub stage_penalty_sign: StagePenaltySign,
}

impl Default for TimeModelParams {
    fn default() -> Self {
        Self {
            t_press: 0.35,
            t_check: 0.5,
            decide_a: 0.2,
            decide_b: 0.15,
            stage_penalty: 0.0,
            stage_penalty_sign: StagePenaltySign::MoreStagesSlower,
        }
    }
}

impl TimeModelParams {
    pub fn validate(&self) -> Result<(), String> {
        let fields = [
            ("t_press", self.t_press),
            ("t_check", self.t_check),
            ("decide_a", self.decide_a),
            ("decide_b", self.decide_b),
            ("stage_penalty", self.stage_penalty),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        Ok(())
    }

    /// Choice time for one selection stage among `alternatives` options.
    pub fn decide(&self, alternatives: usize) -> f64 {
        self.decide_a + self.decide_b * ((alternatives as f64) + 1.0).log2()
    }

    /// Extra time for one selection made in `stages` stages.
    pub fn stage_term(&self, stages: usize) -> f64 {
        if stages == 0 || self.stage_penalty == 0.0 {
            return 0.0;
        }
        match self.stage_penalty_sign {
            StagePenaltySign::MoreStagesSlower => self.stage_penalty * stages as f64,
            StagePenaltySign::FewerStagesSlower => self.stage_penalty / stages as f64,
        }
    }
}

/// Closed-form effort of one task.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskProfile {
    pub presses: usize,
    pub checks: usize,
    /// Alternatives at each decision.
    pub decisions: Vec<usize>,
    /// Stage count of each multi-stage selection made.
    pub selections: Vec<usize>,
}

impl TaskProfile {
    pub fn time(&self, params: &TimeModelParams) -> f64 {
        let decide: f64 = self.decisions.iter().map(|&a| params.decide(a)).sum();
        let stages: f64 = self.selections.iter().map(|&k| params.stage_term(k)).sum();
        self.presses as f64 * params.t_press + self.checks as f64 * params.t_check + decide + stages
    }

    pub fn press(&mut self, decide: Option<usize>) {
        self.presses += 1;
        self.decisions.extend(decide);
    }

    pub fn check(&mut self, decide: Option<usize>) {
        self.checks += 1;
        self.decisions.extend(decide);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decide_term() {
        let p = TimeModelParams::default();
        assert!((p.decide(3) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn negative_rejected() {
        let p = TimeModelParams {
            t_press: -1.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn stage_sign() {
        let mut p = TimeModelParams {
            stage_penalty: 0.6,
            ..Default::default()
        };
        assert!((p.stage_term(3) - 1.8).abs() < 1e-12);
        p.stage_penalty_sign = StagePenaltySign::FewerStagesSlower;
        assert!((p.stage_term(3) - 0.2).abs() < 1e-12);
    }
}
