//! Discrete ARX test plants.
//!
//! The built-in models are second-order mass-spring-damper discretizations
//! (m = 5 kg, sampling time 1 s) with three spring/damper settings:
//!
//! * (a) k = 1 N/m,   b = 1 Ns/m
//! * (b) k = 10 N/m,  b = 0.01 Ns/m
//! * (c) k = 0.1 N/m, b = 10 Ns/m
//!
//! Only the resulting discrete coefficient vectors are used; the library
//! treats them as ground truth rather than re-deriving the discretization.
//! The regressor is `φ(k) = [y(k), y(k−1), u(k), u(k−1)]ᵀ` and the plant
//! output obeys `y(k+1) = φᵀ(k) θ`.

use std::fmt;

/// Dimension of the ARX regressor for the built-in plants.
pub const ARX_DIM: usize = 4;

/// Plant output magnitude beyond which a step is flagged as runaway.
pub const OVERFLOW_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    A,
    B,
    C,
}

impl CaseLabel {
    pub fn parse(s: &str) -> Option<CaseLabel> {
        match s {
            "a" | "A" => Some(CaseLabel::A),
            "b" | "B" => Some(CaseLabel::B),
            "c" | "C" => Some(CaseLabel::C),
            _ => None,
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseLabel::A => write!(f, "a"),
            CaseLabel::B => write!(f, "b"),
            CaseLabel::C => write!(f, "c"),
        }
    }
}

/// True ARX parameter vector plus its label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantModel {
    pub theta: [f64; ARX_DIM],
    pub label: CaseLabel,
}

impl PlantModel {
    /// The published coefficient vector for a built-in case.
    pub fn preset(label: CaseLabel) -> PlantModel {
        let theta = match label {
            CaseLabel::A => [1.6405, -0.8187, 0.4606, 0.4307],
            CaseLabel::B => [0.3116, -0.9980, 0.4218, 0.4215],
            CaseLabel::C => [1.1267, -0.1353, 0.2834, 0.1482],
        };
        PlantModel { theta, label }
    }

    /// A model with explicit coefficients, for tests and synthetic runs.
    pub fn with_theta(label: CaseLabel, theta: [f64; ARX_DIM]) -> PlantModel {
        PlantModel { theta, label }
    }
}

/// Identification input signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputSignal {
    Sine { freq: f64, amp: f64 },
    Constant { value: f64 },
}

impl Default for InputSignal {
    fn default() -> Self {
        InputSignal::Sine {
            freq: 0.1,
            amp: 1.0,
        }
    }
}

impl InputSignal {
    pub fn value_at(&self, k: usize) -> f64 {
        match *self {
            InputSignal::Sine { freq, amp } => amp * (freq * k as f64).sin(),
            InputSignal::Constant { value } => value,
        }
    }
}

/// Default identification input `u(k) = sin(0.1 k)`. Exciting over a finite
/// window but not persistently exciting for the 4-dimensional regressor.
pub fn input_signal(k: usize) -> f64 {
    InputSignal::default().value_at(k)
}

/// Rolling plant state: the two most recent outputs and inputs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimHistory {
    pub y_curr: f64,
    pub y_prev: f64,
    pub u_curr: f64,
    pub u_prev: f64,
}

impl SimHistory {
    pub fn regressor(&self) -> [f64; ARX_DIM] {
        [self.y_curr, self.y_prev, self.u_curr, self.u_prev]
    }
}

/// Result of one plant step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantStep {
    pub y_next: f64,
    pub phi: [f64; ARX_DIM],
    pub history: SimHistory,
    /// Set when |y_next| exceeded [`OVERFLOW_LIMIT`]; the step is still
    /// produced so runaway stays visible in traces.
    pub overflow: bool,
}

/// One ARX step: emits `φ` from the current history, computes
/// `y_next = φᵀ θ`, and shifts the history with `u_next` installed.
pub fn arx_step(model: &PlantModel, hist: &SimHistory, u_next: f64) -> PlantStep {
    let phi = hist.regressor();
    let y_next: f64 = phi.iter().zip(&model.theta).map(|(p, t)| p * t).sum();
    PlantStep {
        y_next,
        phi,
        history: SimHistory {
            y_curr: y_next,
            y_prev: hist.y_curr,
            u_curr: u_next,
            u_prev: hist.u_curr,
        },
        overflow: y_next.abs() > OVERFLOW_LIMIT,
    }
}

/// Piecewise-constant schedule of true parameter vectors.
///
/// Entries are `(start_step, model)`; the model whose interval contains a
/// step is active there. Plant state carries over continuously across a
/// switch; only the coefficients change.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeSchedule {
    entries: Vec<(usize, PlantModel)>,
}

impl ChangeSchedule {
    pub fn new(entries: Vec<(usize, PlantModel)>) -> Result<ChangeSchedule, String> {
        if entries.is_empty() {
            return Err("schedule must contain at least one entry".into());
        }
        if entries[0].0 != 0 {
            return Err(format!(
                "first schedule entry must start at step 0, got {}",
                entries[0].0
            ));
        }
        for w in entries.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(format!(
                    "schedule start steps must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                ));
            }
        }
        Ok(ChangeSchedule { entries })
    }

    /// Constant-parameter schedule.
    pub fn constant(model: PlantModel) -> ChangeSchedule {
        ChangeSchedule {
            entries: vec![(0, model)],
        }
    }

    /// The a → b → c sequence with switches at steps 200 and 1200.
    pub fn abc_default() -> ChangeSchedule {
        ChangeSchedule {
            entries: vec![
                (0, PlantModel::preset(CaseLabel::A)),
                (200, PlantModel::preset(CaseLabel::B)),
                (1200, PlantModel::preset(CaseLabel::C)),
            ],
        }
    }

    pub fn entries(&self) -> &[(usize, PlantModel)] {
        &self.entries
    }

    /// Steps (other than 0) at which the true parameters switch.
    pub fn change_steps(&self) -> Vec<usize> {
        self.entries.iter().skip(1).map(|(s, _)| *s).collect()
    }

    pub fn model_at(&self, k: usize) -> &PlantModel {
        let mut active = &self.entries[0].1;
        for (start, model) in &self.entries {
            if *start <= k {
                active = model;
            } else {
                break;
            }
        }
        active
    }
}

/// One element of a simulated identification stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantSample {
    /// 1-based time step; `phi` was formed at this step.
    pub k: usize,
    pub phi: [f64; ARX_DIM],
    pub y_next: f64,
    /// Coefficients that generated `y_next`.
    pub theta_true: [f64; ARX_DIM],
    pub overflow: bool,
}

/// Simulates `steps` plant steps under the given schedule and input.
///
/// Time is 1-based: the first produced sample is at k = 1 with zero initial
/// history (`y(1) = y(0) = 0`, `u(0) = 0`), so `φ(1) = [0, 0, u(1), 0]`.
pub fn simulate(schedule: &ChangeSchedule, input: &InputSignal, steps: usize) -> Vec<PlantSample> {
    let mut hist = SimHistory {
        u_curr: input.value_at(0),
        ..SimHistory::default()
    };
    let mut samples = Vec::with_capacity(steps);
    for k in 1..=steps {
        hist.u_curr = input.value_at(k);
        let model = schedule.model_at(k);
        let step = arx_step(model, &hist, input.value_at(k + 1));
        samples.push(PlantSample {
            k,
            phi: step.phi,
            y_next: step.y_next,
            theta_true: model.theta,
            overflow: step.overflow,
        });
        hist = step.history;
    }
    samples
}
