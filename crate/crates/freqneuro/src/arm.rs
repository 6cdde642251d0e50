//! Simplified 2D muscled-arm environment.
//!
//! The arm is a chain of `p` constant-area compartments hanging off a
//! rotatable base in a viscous medium. Compartment boundaries are pairs of
//! point masses (dorsal and ventral corner). Each compartment carries three
//! muscles -- dorsal, transverse and ventral springs whose stiffness rises
//! and rest length falls with activation -- plus passive diagonal springs
//! and a quadratic area-deviation penalty that stand in for incompressible
//! flesh. Forces are muscle springs, gravity, linear drag `-gamma * v`, and
//! the area penalty; integration is semi-implicit Euler over `substeps`
//! sub-steps per 1 s control step. The two base corner points are pinned to
//! the base and follow its rotation kinematically.
//!
//! Interface shapes: `8p+2` observations (per compartment: outer dorsal
//! corner x, y, vx, vy, then outer ventral corner x, y, vx, vy; finally the
//! base angle and angular velocity) and `3p+2` raw controls (per
//! compartment: dorsal, transverse, ventral; then counterclockwise and
//! clockwise base rotation). The eight meta-actions drive the
//! dorsal/transverse/ventral muscles of the first or second half of the arm
//! plus the two rotation controls.
//!
//! A trial scores `max(1 - (t/T) * (d/D), 0)` where `T` is the step budget,
//! `D` the initial tip-goal distance and `(t, d)` the step and distance when
//! the trial ends: at the goal-touch step (then `d` is the touch distance,
//! small but positive, so earlier touches always score strictly higher) or
//! at the horizon with the final distance. The alternative closest-approach
//! rule used by the arm-resizing tests scores the closest tip position and
//! the step it was reached at, with zero for arms that never improve on the
//! initial distance.

use crate::encoding::{ActionMode, NetworkWeights};
use crate::error::{Error, Result};
use crate::rnn;
use serde::{Deserialize, Serialize};

/// Physical and task constants. Everything the simulator and fitness use is
/// in here; lengths scale with the compartment rest dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhysicsConfig {
    /// Rest length of dorsal/ventral muscles (compartment length).
    pub compartment_length: f64,
    /// Rest length of transverse muscles (compartment width).
    pub compartment_width: f64,
    /// Mass of one corner point.
    pub point_mass: f64,
    /// Muscle spring stiffness at zero activation.
    pub muscle_passive_stiffness: f64,
    /// Muscle spring stiffness at full activation.
    pub muscle_active_stiffness: f64,
    /// Fraction of rest length removed at full activation.
    pub muscle_contraction: f64,
    /// Stiffness of the passive diagonal springs bracing each compartment.
    pub diagonal_stiffness: f64,
    /// Strength of the constant-area penalty force.
    pub area_stiffness: f64,
    /// Linear drag coefficient (force = -drag * velocity).
    pub drag: f64,
    /// Net downward acceleration (gravity minus buoyancy).
    pub gravity: f64,
    /// Base angular acceleration at full rotation activation, rad/s^2.
    pub base_rotation_accel: f64,
    /// Angular damping of the base.
    pub base_rotation_damping: f64,
    /// Goal position as a multiple of total arm rest length, x component.
    pub goal_x_factor: f64,
    /// Goal position as a multiple of total arm rest length, y component.
    pub goal_y_factor: f64,
    /// Touch radius as a multiple of total arm rest length.
    pub touch_radius_factor: f64,
    /// Sub-steps per control step.
    pub substeps: u32,
    /// Simulated seconds per control step.
    pub control_dt: f64,
    /// Trial horizon per compartment: `T(p) = steps_per_compartment * p`.
    pub steps_per_compartment: usize,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self {
            compartment_length: 1.0,
            compartment_width: 1.0,
            point_mass: 1.0,
            muscle_passive_stiffness: 8.0,
            muscle_active_stiffness: 40.0,
            muscle_contraction: 0.5,
            diagonal_stiffness: 6.0,
            area_stiffness: 10.0,
            drag: 1.2,
            gravity: 0.25,
            base_rotation_accel: 1.2,
            base_rotation_damping: 1.5,
            goal_x_factor: 0.5,
            goal_y_factor: -0.5,
            touch_radius_factor: 0.1,
            substeps: 40,
            control_dt: 1.0,
            steps_per_compartment: 25,
        }
    }
}

impl PhysicsConfig {
    /// Total rest length of a `p`-compartment arm.
    pub fn arm_length(&self, p: usize) -> f64 {
        self.compartment_length * p as f64
    }

    pub fn goal(&self, p: usize) -> (f64, f64) {
        let l = self.arm_length(p);
        (self.goal_x_factor * l, self.goal_y_factor * l)
    }

    pub fn touch_radius(&self, p: usize) -> f64 {
        self.touch_radius_factor * self.arm_length(p)
    }

    pub fn trial_steps(&self, p: usize) -> usize {
        self.steps_per_compartment * p
    }
}

/// Observation vector length for a `p`-compartment arm.
pub fn observation_len(p: usize) -> usize {
    8 * p + 2
}

/// Raw action vector length for a `p`-compartment arm.
pub fn raw_action_len(p: usize) -> usize {
    3 * p + 2
}

/// Number of aggregated meta-actions.
pub const META_ACTIONS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct PointState {
    x: f64,
    y: f64,
    vx: f64,
    vy: f64,
}

/// Full dynamic state of the arm: `2 (p + 1)` corner points plus the base
/// rotation. Point `2j` is the dorsal corner of boundary pair `j`, point
/// `2j + 1` the ventral corner; pair 0 is pinned to the base.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmState {
    points: Vec<PointState>,
    base_angle: f64,
    base_angular_velocity: f64,
}

impl ArmState {
    pub fn base_angle(&self) -> f64 {
        self.base_angle
    }

    pub fn base_angular_velocity(&self) -> f64 {
        self.base_angular_velocity
    }

    pub fn is_finite(&self) -> bool {
        self.base_angle.is_finite()
            && self.base_angular_velocity.is_finite()
            && self
                .points
                .iter()
                .all(|pt| pt.x.is_finite() && pt.y.is_finite() && pt.vx.is_finite() && pt.vy.is_finite())
    }

    /// Kinetic energy of the free (non-pinned) points.
    pub fn kinetic_energy(&self, mass: f64) -> f64 {
        self.points[2..]
            .iter()
            .map(|pt| 0.5 * mass * (pt.vx * pt.vx + pt.vy * pt.vy))
            .sum()
    }
}

/// One simulated arm. Owns its state; a fitness evaluation creates one per
/// trial, so evaluations can run concurrently without sharing anything.
#[derive(Debug, Clone)]
pub struct ArmSim {
    p: usize,
    cfg: PhysicsConfig,
    state: ArmState,
    forces: Vec<(f64, f64)>,
}

/// Straight resting arm at the given base angle.
pub fn init_arm(p: usize, initial_angle: f64, cfg: &PhysicsConfig) -> Result<ArmState> {
    if p < 1 {
        return Err(Error::NoCompartments);
    }
    let (ux, uy) = (initial_angle.cos(), initial_angle.sin());
    let (nx, ny) = (-uy, ux);
    let half_w = cfg.compartment_width / 2.0;
    let mut points = Vec::with_capacity(2 * (p + 1));
    for j in 0..=p {
        let along = j as f64 * cfg.compartment_length;
        points.push(PointState {
            x: along * ux + half_w * nx,
            y: along * uy + half_w * ny,
            ..Default::default()
        });
        points.push(PointState {
            x: along * ux - half_w * nx,
            y: along * uy - half_w * ny,
            ..Default::default()
        });
    }
    Ok(ArmState {
        points,
        base_angle: initial_angle,
        base_angular_velocity: 0.0,
    })
}

impl ArmSim {
    pub fn new(p: usize, initial_angle: f64, cfg: PhysicsConfig) -> Result<Self> {
        let state = init_arm(p, initial_angle, &cfg)?;
        let n_points = state.points.len();
        Ok(Self {
            p,
            cfg,
            state,
            forces: vec![(0.0, 0.0); n_points],
        })
    }

    pub fn compartments(&self) -> usize {
        self.p
    }

    pub fn state(&self) -> &ArmState {
        &self.state
    }

    /// Replaces the state; used by tests that need a perturbed starting
    /// point.
    pub fn set_state(&mut self, state: ArmState) {
        assert_eq!(state.points.len(), 2 * (self.p + 1));
        self.state = state;
    }

    /// Tip of the arm: midpoint of the outermost corner pair.
    pub fn tip(&self) -> (f64, f64) {
        let d = &self.state.points[2 * self.p];
        let v = &self.state.points[2 * self.p + 1];
        ((d.x + v.x) / 2.0, (d.y + v.y) / 2.0)
    }

    /// Observation vector of length `8p + 2`: corner positions and
    /// velocities normalized by the arm rest length, then the base angle and
    /// angular velocity.
    pub fn observe(&self) -> Vec<f64> {
        let scale = 1.0 / self.cfg.arm_length(self.p);
        let mut obs = Vec::with_capacity(observation_len(self.p));
        for j in 1..=self.p {
            for side in 0..2 {
                let pt = &self.state.points[2 * j + side];
                obs.push(pt.x * scale);
                obs.push(pt.y * scale);
                obs.push(pt.vx * scale);
                obs.push(pt.vy * scale);
            }
        }
        obs.push(self.state.base_angle);
        obs.push(self.state.base_angular_velocity);
        obs
    }

    /// Advances one control step under a raw action vector.
    pub fn step(&mut self, raw_action: &[f64]) -> Result<()> {
        if raw_action.len() != raw_action_len(self.p) {
            return Err(Error::ActionLength {
                got: raw_action.len(),
                expected: raw_action_len(self.p),
            });
        }
        let action: Vec<f64> = raw_action.iter().map(|a| a.clamp(0.0, 1.0)).collect();
        let dt = self.cfg.control_dt / self.cfg.substeps as f64;
        for _ in 0..self.cfg.substeps {
            self.substep(&action, dt);
        }
        if !self.state.is_finite() {
            return Err(Error::SimulationDiverged);
        }
        Ok(())
    }

    fn substep(&mut self, action: &[f64], dt: f64) {
        let p = self.p;
        let length = self.cfg.compartment_length;
        let width = self.cfg.compartment_width;
        let diag_k = self.cfg.diagonal_stiffness;
        let gravity = self.cfg.gravity;
        let drag = self.cfg.drag;
        let m = self.cfg.point_mass;

        // Base rotation: opposing activations cancel.
        let torque = self.cfg.base_rotation_accel * (action[3 * p] - action[3 * p + 1]);
        let alpha = torque - self.cfg.base_rotation_damping * self.state.base_angular_velocity;
        self.state.base_angular_velocity += alpha * dt;
        self.state.base_angle += self.state.base_angular_velocity * dt;
        self.pin_base_pair();

        for f in &mut self.forces {
            *f = (0.0, 0.0);
        }

        // Muscle springs.
        for q in 0..p {
            self.spring_force(2 * q, 2 * (q + 1), length, action[3 * q]);
            self.spring_force(2 * (q + 1), 2 * (q + 1) + 1, width, action[3 * q + 1]);
            self.spring_force(2 * q + 1, 2 * (q + 1) + 1, length, action[3 * q + 2]);
        }

        // Passive diagonal bracing.
        let diag_rest = (length * length + width * width).sqrt();
        for q in 0..p {
            self.passive_spring(2 * q, 2 * (q + 1) + 1, diag_rest, diag_k);
            self.passive_spring(2 * q + 1, 2 * (q + 1), diag_rest, diag_k);
        }

        // Constant-area penalty, applied to the ccw quad
        // (dorsal_q, ventral_q, ventral_{q+1}, dorsal_{q+1}).
        let rest_area = length * width;
        for q in 0..p {
            self.area_force([2 * q, 2 * q + 1, 2 * (q + 1) + 1, 2 * (q + 1)], rest_area);
        }

        // Gravity and drag, then integrate the free points.
        for idx in 2..self.state.points.len() {
            let pt = &mut self.state.points[idx];
            let (mut fx, mut fy) = self.forces[idx];
            fy -= gravity * m;
            fx -= drag * pt.vx;
            fy -= drag * pt.vy;
            pt.vx += fx / m * dt;
            pt.vy += fy / m * dt;
            pt.x += pt.vx * dt;
            pt.y += pt.vy * dt;
        }
    }

    /// Pins the base corner pair to the rotating base.
    fn pin_base_pair(&mut self) {
        let half_w = self.cfg.compartment_width / 2.0;
        let theta = self.state.base_angle;
        let omega = self.state.base_angular_velocity;
        let (nx, ny) = (-theta.sin(), theta.cos());
        for (side, sign) in [(0usize, 1.0f64), (1, -1.0)] {
            let x = sign * half_w * nx;
            let y = sign * half_w * ny;
            self.state.points[side] = PointState {
                x,
                y,
                // Rigid rotation about the origin: v = omega x r.
                vx: -omega * y,
                vy: omega * x,
            };
        }
    }

    /// Muscle spring between points `a` and `b`: activation raises the
    /// stiffness and shortens the rest length linearly.
    fn spring_force(&mut self, a: usize, b: usize, rest0: f64, activation: f64) {
        let cfg = &self.cfg;
        let k = cfg.muscle_passive_stiffness
            + (cfg.muscle_active_stiffness - cfg.muscle_passive_stiffness) * activation;
        let rest = rest0 * (1.0 - cfg.muscle_contraction * activation);
        self.apply_spring(a, b, rest, k);
    }

    fn passive_spring(&mut self, a: usize, b: usize, rest: f64, k: f64) {
        self.apply_spring(a, b, rest, k);
    }

    fn apply_spring(&mut self, a: usize, b: usize, rest: f64, k: f64) {
        let pa = &self.state.points[a];
        let pb = &self.state.points[b];
        let dx = pb.x - pa.x;
        let dy = pb.y - pa.y;
        let len = (dx * dx + dy * dy).sqrt();
        if len < 1e-9 {
            return;
        }
        let magnitude = k * (len - rest) / len;
        let (fx, fy) = (magnitude * dx, magnitude * dy);
        self.forces[a].0 += fx;
        self.forces[a].1 += fy;
        self.forces[b].0 -= fx;
        self.forces[b].1 -= fy;
    }

    /// Penalty force restoring the signed area of a quad towards its rest
    /// area; the gradient of `1/2 * k * (A - A0)^2` via the shoelace formula.
    fn area_force(&mut self, quad: [usize; 4], rest_area: f64) {
        let pts: Vec<(f64, f64)> = quad
            .iter()
            .map(|&i| (self.state.points[i].x, self.state.points[i].y))
            .collect();
        let mut area = 0.0;
        for i in 0..4 {
            let (x0, y0) = pts[i];
            let (x1, y1) = pts[(i + 1) % 4];
            area += x0 * y1 - x1 * y0;
        }
        area /= 2.0;
        let coeff = -self.cfg.area_stiffness * (area - rest_area);
        for i in 0..4 {
            let (_, y_next) = pts[(i + 1) % 4];
            let (_, y_prev) = pts[(i + 3) % 4];
            let (x_next, _) = pts[(i + 1) % 4];
            let (x_prev, _) = pts[(i + 3) % 4];
            let gx = 0.5 * (y_next - y_prev);
            let gy = 0.5 * (x_prev - x_next);
            self.forces[quad[i]].0 += coeff * gx;
            self.forces[quad[i]].1 += coeff * gy;
        }
    }

    /// Signed area of compartment `q` (positive at rest).
    pub fn compartment_area(&self, q: usize) -> f64 {
        let quad = [2 * q, 2 * q + 1, 2 * (q + 1) + 1, 2 * (q + 1)];
        let pts: Vec<(f64, f64)> = quad
            .iter()
            .map(|&i| (self.state.points[i].x, self.state.points[i].y))
            .collect();
        let mut area = 0.0;
        for i in 0..4 {
            let (x0, y0) = pts[i];
            let (x1, y1) = pts[(i + 1) % 4];
            area += x0 * y1 - x1 * y0;
        }
        area / 2.0
    }

    /// Total length of the dorsal edge chain; shrinks when the arm
    /// contracts.
    pub fn dorsal_length(&self) -> f64 {
        (0..self.p)
            .map(|q| {
                let a = &self.state.points[2 * q];
                let b = &self.state.points[2 * (q + 1)];
                ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt()
            })
            .sum()
    }
}

/// Expands the eight meta-actions to the `3p + 2` raw controls: actions
/// 1-3 drive the dorsal/transverse/ventral muscles of compartments
/// `0 .. floor(p/2)`, actions 4-6 the remaining compartments, actions 7-8
/// the two base rotations. Inputs are clamped to `[0, 1]`.
pub fn meta_to_raw(meta: &[f64], p: usize) -> Vec<f64> {
    debug_assert_eq!(meta.len(), META_ACTIONS);
    let clamped: Vec<f64> = meta.iter().map(|a| a.clamp(0.0, 1.0)).collect();
    let half = p / 2;
    let mut raw = vec![0.0; raw_action_len(p)];
    for q in 0..p {
        let group = if q < half { 0 } else { 3 };
        raw[3 * q] = clamped[group];
        raw[3 * q + 1] = clamped[group + 1];
        raw[3 * q + 2] = clamped[group + 2];
    }
    raw[3 * p] = clamped[6];
    raw[3 * p + 1] = clamped[7];
    raw
}

/// One evaluation episode: start angle, horizon, goal and the initial
/// tip-goal distance.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpec {
    pub initial_angle: f64,
    pub max_steps: usize,
    pub goal: (f64, f64),
    pub initial_distance: f64,
}

impl TrialSpec {
    /// Builds a trial for a straight arm of `p` compartments at the given
    /// angle, with goal and horizon from the config.
    pub fn new(p: usize, initial_angle: f64, cfg: &PhysicsConfig) -> Result<Self> {
        Self::with_steps(p, initial_angle, cfg.trial_steps(p), cfg)
    }

    pub fn with_steps(
        p: usize,
        initial_angle: f64,
        max_steps: usize,
        cfg: &PhysicsConfig,
    ) -> Result<Self> {
        if p < 1 {
            return Err(Error::NoCompartments);
        }
        let goal = cfg.goal(p);
        let l = cfg.arm_length(p);
        let tip = (l * initial_angle.cos(), l * initial_angle.sin());
        let initial_distance = ((tip.0 - goal.0).powi(2) + (tip.1 - goal.1).powi(2)).sqrt();
        debug_assert!(initial_distance > 0.0);
        debug_assert!(max_steps >= 1);
        Ok(Self {
            initial_angle,
            max_steps,
            goal,
            initial_distance,
        })
    }
}

/// The three training start angles.
pub const TRAINING_ANGLES: [f64; 3] = [
    -std::f64::consts::FRAC_PI_2,
    0.0,
    std::f64::consts::FRAC_PI_2,
];

/// The two held-out start angles used for generalization tests.
pub const HOLDOUT_ANGLES: [f64; 2] = [-std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4];

pub fn training_trials(p: usize, cfg: &PhysicsConfig) -> Result<Vec<TrialSpec>> {
    TRAINING_ANGLES
        .iter()
        .map(|&a| TrialSpec::new(p, a, cfg))
        .collect()
}

pub fn holdout_trials(p: usize, cfg: &PhysicsConfig) -> Result<Vec<TrialSpec>> {
    HOLDOUT_ANGLES
        .iter()
        .map(|&a| TrialSpec::new(p, a, cfg))
        .collect()
}

/// The trial score `max(1 - (t/T) * (d/D), 0)`.
pub fn trial_score(t: f64, d: f64, max_steps: f64, initial_distance: f64) -> f64 {
    (1.0 - (t / max_steps) * (d / initial_distance)).max(0.0)
}

/// How a trial converts its trajectory into `(t, d)` for the score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitnessRule {
    /// Touch step and distance, or the horizon and the final distance.
    /// Training uses this.
    FinalDistance,
    /// Closest approach and the step it happened at, with zero score when
    /// the tip never got closer than the start. The arm-resizing
    /// generalization tests use this.
    ClosestApproach,
}

/// Outcome of a single trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub score: f64,
    pub touched: bool,
    pub steps_used: usize,
    pub final_distance: f64,
    pub closest_distance: f64,
}

/// Runs one trial of a network controller.
pub fn run_trial(
    weights: &NetworkWeights,
    mode: ActionMode,
    p: usize,
    trial: &TrialSpec,
    cfg: &PhysicsConfig,
    rule: FitnessRule,
    mut trace: Option<&mut Vec<(usize, f64, f64, f64)>>,
) -> Result<TrialOutcome> {
    if weights.inputs() != observation_len(p) {
        return Err(Error::InputLength {
            got: weights.inputs(),
            expected: observation_len(p),
        });
    }
    let expected_neurons = match mode {
        ActionMode::Meta => META_ACTIONS,
        ActionMode::Raw => raw_action_len(p),
    };
    if weights.neurons() != expected_neurons {
        return Err(Error::ActionLength {
            got: weights.neurons(),
            expected: expected_neurons,
        });
    }

    let mut sim = ArmSim::new(p, trial.initial_angle, cfg.clone())?;
    let mut state = rnn::reset(weights.neurons());
    let touch = cfg.touch_radius(p);
    let big_t = trial.max_steps as f64;
    let big_d = trial.initial_distance;

    let distance = |sim: &ArmSim| {
        let (tx, ty) = sim.tip();
        ((tx - trial.goal.0).powi(2) + (ty - trial.goal.1).powi(2)).sqrt()
    };

    let mut closest = big_d;
    let mut closest_step = 0usize;
    let mut touched = false;
    let mut end_step = trial.max_steps;
    let mut end_distance = big_d;

    for t in 1..=trial.max_steps {
        let obs = sim.observe();
        let (next, outputs) = rnn::step(weights, &state, &obs)?;
        state = next;
        let raw = match mode {
            ActionMode::Meta => meta_to_raw(&outputs, p),
            ActionMode::Raw => outputs,
        };
        sim.step(&raw)?;
        let d = distance(&sim);
        if let Some(trace) = trace.as_deref_mut() {
            let (tx, ty) = sim.tip();
            trace.push((t, tx, ty, d));
        }
        if d < closest {
            closest = d;
            closest_step = t;
        }
        end_step = t;
        end_distance = d;
        if d <= touch {
            touched = true;
            break;
        }
    }

    let score = match rule {
        FitnessRule::FinalDistance => {
            if touched {
                trial_score(end_step as f64, end_distance, big_t, big_d)
            } else {
                trial_score(big_t, end_distance, big_t, big_d)
            }
        }
        FitnessRule::ClosestApproach => {
            if touched {
                trial_score(end_step as f64, end_distance, big_t, big_d)
            } else if closest >= big_d {
                0.0
            } else {
                trial_score(closest_step as f64, closest, big_t, big_d)
            }
        }
    };

    Ok(TrialOutcome {
        score,
        touched,
        steps_used: end_step,
        final_distance: end_distance,
        closest_distance: closest,
    })
}

/// Mean trial score of a controller over the given trials.
pub fn evaluate(
    weights: &NetworkWeights,
    mode: ActionMode,
    p: usize,
    trials: &[TrialSpec],
    cfg: &PhysicsConfig,
    rule: FitnessRule,
) -> Result<f64> {
    let mut total = 0.0;
    for trial in trials {
        total += run_trial(weights, mode, p, trial, cfg, rule, None)?.score;
    }
    Ok(total / trials.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::NetworkArchitecture;

    fn cfg() -> PhysicsConfig {
        PhysicsConfig::default()
    }

    #[test]
    fn init_geometry_straight_and_at_rest() {
        let cfg = cfg();
        let state = init_arm(10, 0.0, &cfg).unwrap();
        let sim = {
            let mut s = ArmSim::new(10, 0.0, cfg.clone()).unwrap();
            s.set_state(state.clone());
            s
        };
        let (tx, ty) = sim.tip();
        assert!((tx - 10.0).abs() < 1e-12);
        assert!(ty.abs() < 1e-12);
        assert!(state.points.iter().all(|p| p.vx == 0.0 && p.vy == 0.0));

        let hanging = init_arm(10, -std::f64::consts::FRAC_PI_2, &cfg).unwrap();
        let mut s = ArmSim::new(10, 0.0, cfg).unwrap();
        s.set_state(hanging);
        let (tx, ty) = s.tip();
        assert!(tx.abs() < 1e-9);
        assert!((ty + 10.0).abs() < 1e-9);
    }

    #[test]
    fn interface_shapes_hold_for_all_sizes() {
        let cfg = cfg();
        for p in 3..=20 {
            let sim = ArmSim::new(p, 0.0, cfg.clone()).unwrap();
            assert_eq!(sim.observe().len(), 8 * p + 2);
            assert_eq!(raw_action_len(p), 3 * p + 2);
            assert_eq!(meta_to_raw(&[0.5; 8], p).len(), 3 * p + 2);
        }
        assert_eq!(observation_len(10), 82);
    }

    #[test]
    fn zero_compartments_is_an_error() {
        assert!(matches!(
            init_arm(0, 0.0, &cfg()),
            Err(Error::NoCompartments)
        ));
    }

    #[test]
    fn gravity_sags_the_passive_arm() {
        let mut sim = ArmSim::new(10, 0.0, cfg()).unwrap();
        let (_, y0) = sim.tip();
        let zero = vec![0.0; raw_action_len(10)];
        for _ in 0..10 {
            sim.step(&zero).unwrap();
        }
        let (_, y1) = sim.tip();
        assert!(y1 < y0, "tip y did not drop: {y0} -> {y1}");
    }

    #[test]
    fn transverse_contraction_shortens_nothing_but_width() {
        // Full transverse activation narrows compartments; constant area
        // then forces the arm to lengthen or, at minimum, not collapse.
        let mut sim = ArmSim::new(6, 0.0, cfg()).unwrap();
        let mut act = vec![0.0; raw_action_len(6)];
        for q in 0..6 {
            act[3 * q + 1] = 1.0;
        }
        for _ in 0..20 {
            sim.step(&act).unwrap();
        }
        let w = {
            let a = &sim.state().points[2 * 3];
            let b = &sim.state().points[2 * 3 + 1];
            ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
        };
        assert!(w < cfg().compartment_width, "width did not shrink: {w}");
    }

    #[test]
    fn dorsal_and_ventral_contraction_shortens_the_arm() {
        let mut sim = ArmSim::new(6, 0.0, cfg()).unwrap();
        let rest_len = sim.dorsal_length();
        let mut act = vec![0.0; raw_action_len(6)];
        for q in 0..6 {
            act[3 * q] = 1.0;
            act[3 * q + 2] = 1.0;
        }
        for _ in 0..20 {
            sim.step(&act).unwrap();
        }
        assert!(
            sim.dorsal_length() < 0.9 * rest_len,
            "arm did not contract: {} vs {rest_len}",
            sim.dorsal_length()
        );
    }

    #[test]
    fn compartment_areas_stay_near_rest_under_random_actions() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let p = 6;
        let mut sim = ArmSim::new(p, 0.0, cfg()).unwrap();
        let rest = cfg().compartment_length * cfg().compartment_width;
        for _ in 0..100 {
            let act: Vec<f64> = (0..raw_action_len(p)).map(|_| rng.gen::<f64>()).collect();
            sim.step(&act).unwrap();
        }
        for q in 0..p {
            let area = sim.compartment_area(q);
            assert!(
                (area - rest).abs() < 0.1 * rest,
                "compartment {q} area {area} drifted from {rest}"
            );
        }
    }

    #[test]
    fn base_rotation_turns_the_arm() {
        let p = 5;
        let mut sim = ArmSim::new(p, 0.0, cfg()).unwrap();
        let mut act = vec![0.0; raw_action_len(p)];
        act[3 * p] = 1.0;
        for _ in 0..10 {
            sim.step(&act).unwrap();
        }
        assert!(sim.state().base_angle() > 0.1);

        // Opposing activations cancel.
        let mut sim = ArmSim::new(p, 0.0, cfg()).unwrap();
        let mut act = vec![0.0; raw_action_len(p)];
        act[3 * p] = 0.7;
        act[3 * p + 1] = 0.7;
        for _ in 0..10 {
            sim.step(&act).unwrap();
        }
        assert_eq!(sim.state().base_angle(), 0.0);
    }

    #[test]
    fn drag_dissipates_kinetic_energy_without_gravity() {
        let mut cfg = cfg();
        cfg.gravity = 0.0;
        let p = 4;
        let mass = cfg.point_mass;

        // At the rest layout nothing moves.
        let mut sim = ArmSim::new(p, 0.0, cfg.clone()).unwrap();
        let zero = vec![0.0; raw_action_len(p)];
        for _ in 0..20 {
            sim.step(&zero).unwrap();
        }
        assert!(sim.state().kinetic_energy(mass) < 1e-18);

        // After an action burst, free motion decays under drag.
        let mut act = vec![0.0; raw_action_len(p)];
        act[0] = 1.0;
        act[5] = 1.0;
        for _ in 0..5 {
            sim.step(&act).unwrap();
        }
        let ke_burst = sim.state().kinetic_energy(mass);
        assert!(ke_burst > 0.0);
        for _ in 0..60 {
            sim.step(&zero).unwrap();
        }
        let ke_final = sim.state().kinetic_energy(mass);
        assert!(
            ke_final < 0.01 * ke_burst,
            "kinetic energy did not decay: {ke_burst} -> {ke_final}"
        );
    }

    #[test]
    fn meta_expansion_definition() {
        let p = 10;
        let raw = meta_to_raw(&[0.0; 8], p);
        assert!(raw.iter().all(|&a| a == 0.0));

        let raw = meta_to_raw(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], p);
        for q in 0..p {
            let expect = if q < 5 { 1.0 } else { 0.0 };
            assert_eq!(raw[3 * q], expect, "dorsal of compartment {q}");
            assert_eq!(raw[3 * q + 1], 0.0);
            assert_eq!(raw[3 * q + 2], 0.0);
        }

        // Odd p: the first half is floor(p/2) compartments.
        let raw = meta_to_raw(&[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], 3);
        assert_eq!(raw[1], 1.0);
        assert_eq!(raw[4], 0.0);
        assert_eq!(raw[7], 0.0);

        // Rotation pass-through and clamping.
        let raw = meta_to_raw(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0, -1.0], 4);
        assert_eq!(raw[12], 1.0);
        assert_eq!(raw[13], 0.0);
    }

    #[test]
    fn score_function_unit_cases() {
        assert_eq!(trial_score(250.0, 7.0, 250.0, 7.0), 0.0);
        assert!((trial_score(1.0, 0.0, 250.0, 7.0) - 1.0).abs() < 1e-12);
        assert!((trial_score(125.0, 3.5, 250.0, 7.0) - 0.75).abs() < 1e-12);
        // Never negative, even far beyond the start distance.
        assert_eq!(trial_score(250.0, 70.0, 250.0, 7.0), 0.0);
    }

    #[test]
    fn score_rises_as_touch_comes_earlier() {
        let d = 0.3;
        let scores: Vec<f64> = [200.0, 100.0, 10.0, 1.0]
            .iter()
            .map(|&t| trial_score(t, d, 250.0, 7.0))
            .collect();
        assert!(scores.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn zero_network_trial_is_deterministic_and_bounded() {
        let p = 5;
        let cfg = cfg();
        let arch = NetworkArchitecture::meta(p);
        let weights = NetworkWeights::zeros(&arch);
        let trials = training_trials(p, &cfg).unwrap();
        let a = evaluate(&weights, ActionMode::Meta, p, &trials, &cfg, FitnessRule::FinalDistance)
            .unwrap();
        let b = evaluate(&weights, ActionMode::Meta, p, &trials, &cfg, FitnessRule::FinalDistance)
            .unwrap();
        assert_eq!(a, b);
        assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn mismatched_network_is_an_error() {
        let p = 5;
        let cfg = cfg();
        let arch = NetworkArchitecture::meta(7);
        let weights = NetworkWeights::zeros(&arch);
        let trials = training_trials(p, &cfg).unwrap();
        assert!(evaluate(
            &weights,
            ActionMode::Meta,
            p,
            &trials,
            &cfg,
            FitnessRule::FinalDistance
        )
        .is_err());
    }

    #[test]
    fn closest_approach_rule_zeroes_non_improving_trials() {
        // A network pinned to rotate away from the goal only increases the
        // distance; under the closest-approach rule it scores zero. Gravity
        // is off so nothing else moves the tip.
        let p = 4;
        let mut cfg = cfg();
        cfg.gravity = 0.0;
        let arch = NetworkArchitecture::raw(p);
        let mut weights = NetworkWeights::zeros(&arch);
        // Saturate every neuron off except the counterclockwise rotation,
        // turning the arm away from the goal below the x axis.
        weights.bias.fill(-100.0);
        weights.bias[3 * p] = 100.0;
        let trial = TrialSpec::new(p, std::f64::consts::FRAC_PI_2, &cfg).unwrap();
        let outcome = run_trial(
            &weights,
            ActionMode::Raw,
            p,
            &trial,
            &cfg,
            FitnessRule::ClosestApproach,
            None,
        )
        .unwrap();
        assert!(!outcome.touched);
        assert_eq!(outcome.score, 0.0);
    }
}
