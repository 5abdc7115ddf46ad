//! Relaxation, split steppers and the time loop.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, VlbmError};
use crate::lattice::VelocitySet;
use crate::models::ConservationLaw;
use crate::solver::field::KineticField;
use crate::solver::transport::{TransportBackend, Transporter};

/// Runs abort when any kinetic value exceeds this magnitude.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

/// Over-relaxation `F <- omega F^eq(W) + (1 - omega) F` on every cell.
pub fn relax_step(
    field: &mut KineticField,
    law: &ConservationLaw,
    vs: &VelocitySet,
    omega: f64,
) -> Result<()> {
    if !(0.0..=2.0).contains(&omega) {
        return Err(VlbmError::InvalidParameter(format!(
            "omega must lie in [0, 2], got {omega}"
        )));
    }
    vs.check_law(law)?;
    if field.n_velocities() != vs.n_velocities() || field.m() != vs.m() {
        return Err(VlbmError::InvalidParameter(
            "field layout does not match velocity set".into(),
        ));
    }
    let m = vs.m();
    let n = vs.len();
    let mut f = vec![0.0; n];
    let mut feq = vec![0.0; n];
    let mut w = vec![0.0; m];
    for cell in 0..field.grid().n_cells() {
        field.cell_into(cell, &mut f);
        for (c, wc) in w.iter_mut().enumerate() {
            *wc = (0..vs.n_velocities()).map(|k| f[k * m + c]).sum();
        }
        vs.equilibrium_into(law, &w, &mut feq)?;
        for (fi, ei) in f.iter_mut().zip(&feq) {
            *fi = omega * ei + (1.0 - omega) * *fi;
        }
        field.set_cell(cell, &f);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitScheme {
    /// `R o T(dt)`.
    Plain,
    /// `T(dt/4) o R o T(dt/2) o R o T(dt/4)`.
    Symmetric,
}

impl fmt::Display for SplitScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Plain => "plain",
            Self::Symmetric => "symmetric",
        })
    }
}

impl FromStr for SplitScheme {
    type Err = VlbmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "plain" => Ok(Self::Plain),
            "symmetric" => Ok(Self::Symmetric),
            other => Err(VlbmError::InvalidParameter(format!(
                "unknown split scheme {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConfig {
    pub omega: f64,
    pub dt: f64,
    pub scheme: SplitScheme,
    pub backend: TransportBackend,
}

impl SplitConfig {
    pub fn new(
        omega: f64,
        dt: f64,
        scheme: SplitScheme,
        backend: TransportBackend,
    ) -> Result<Self> {
        if !(1.0..=2.0).contains(&omega) {
            return Err(VlbmError::InvalidParameter(format!(
                "omega must lie in [1, 2], got {omega}"
            )));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(VlbmError::InvalidParameter(format!(
                "dt must be positive, got {dt}"
            )));
        }
        Ok(Self {
            omega,
            dt,
            scheme,
            backend,
        })
    }
}

/// Stage of a split step, reported to observers after it has been applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubStep {
    Transport(f64),
    Relax,
}

/// A split stepper bound to one grid, law and velocity set.
#[derive(Debug, Clone)]
pub struct SplitStepper {
    vs: VelocitySet,
    law: ConservationLaw,
    cfg: SplitConfig,
    transporter: Transporter,
}

impl SplitStepper {
    pub fn new(
        vs: &VelocitySet,
        law: &ConservationLaw,
        cfg: SplitConfig,
        grid: &crate::solver::Grid,
    ) -> Result<Self> {
        vs.check_law(law)?;
        let transporter = Transporter::new(cfg.backend, grid, vs)?;
        let stepper = Self {
            vs: vs.clone(),
            law: *law,
            cfg,
            transporter,
        };
        for dt in stepper.transport_fractions(cfg.dt) {
            stepper.transporter.check_step(dt)?;
        }
        Ok(stepper)
    }

    pub fn config(&self) -> &SplitConfig {
        &self.cfg
    }

    pub fn velocity_set(&self) -> &VelocitySet {
        &self.vs
    }

    pub fn law(&self) -> &ConservationLaw {
        &self.law
    }

    fn transport_fractions(&self, dt: f64) -> Vec<f64> {
        match self.cfg.scheme {
            SplitScheme::Plain => vec![dt],
            SplitScheme::Symmetric => vec![dt / 4.0, dt / 2.0],
        }
    }

    /// One step of the configured `dt`.
    pub fn step(&self, field: &mut KineticField) -> Result<()> {
        self.step_with(field, self.cfg.dt, |_, _| {})
    }

    /// One step of an arbitrary (possibly negative) `dt`.
    pub fn step_by(&self, field: &mut KineticField, dt: f64) -> Result<()> {
        self.step_with(field, dt, |_, _| {})
    }

    /// One step of `dt`, calling `observer` after every sub-step.
    pub fn step_with<O>(&self, field: &mut KineticField, dt: f64, mut observer: O) -> Result<()>
    where
        O: FnMut(SubStep, &KineticField),
    {
        let omega = self.cfg.omega;
        let transport = |field: &mut KineticField, h: f64, observer: &mut O| -> Result<()> {
            self.transporter.apply(field, h)?;
            observer(SubStep::Transport(h), field);
            Ok(())
        };
        let relax = |field: &mut KineticField, observer: &mut O| -> Result<()> {
            relax_step(field, &self.law, &self.vs, omega)?;
            observer(SubStep::Relax, field);
            Ok(())
        };
        match self.cfg.scheme {
            SplitScheme::Plain => {
                transport(field, dt, &mut observer)?;
                relax(field, &mut observer)?;
            }
            SplitScheme::Symmetric => {
                transport(field, dt / 4.0, &mut observer)?;
                relax(field, &mut observer)?;
                transport(field, dt / 2.0, &mut observer)?;
                relax(field, &mut observer)?;
                transport(field, dt / 4.0, &mut observer)?;
            }
        }
        Ok(())
    }
}

/// Applies one split step with a temporary stepper.
pub fn split_step(
    field: &mut KineticField,
    cfg: SplitConfig,
    law: &ConservationLaw,
    vs: &VelocitySet,
) -> Result<()> {
    let grid = field.grid().clone();
    SplitStepper::new(vs, law, cfg, &grid)?.step(field)
}

/// Monitor values after a full step (step 0 is the initial field).
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub mass: Vec<f64>,
    pub max_abs_w: f64,
    pub max_abs_f: f64,
    pub entropy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    /// First step whose result is non-finite or exceeds the threshold.
    pub step: usize,
    pub time: f64,
    pub max_abs_f: f64,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    /// Final field; the last finite field when the run diverged.
    pub field: KineticField,
    pub records: Vec<StepRecord>,
    pub divergence: Option<Divergence>,
}

impl RunSummary {
    pub fn diverged(&self) -> bool {
        self.divergence.is_some()
    }

    /// Largest `max |w|` over the recorded trajectory.
    pub fn peak_abs_w(&self) -> f64 {
        self.records.iter().fold(0.0, |acc, r| acc.max(r.max_abs_w))
    }
}

/// Entropy functional evaluated on the field after each step.
pub type EntropyMonitor<'a> = &'a dyn Fn(&KineticField) -> Result<f64>;

fn record(
    step: usize,
    time: f64,
    field: &KineticField,
    entropy: Option<EntropyMonitor>,
) -> Result<StepRecord> {
    Ok(StepRecord {
        step,
        time,
        mass: field.total_mass(),
        max_abs_w: field.max_abs_conserved(0),
        max_abs_f: field.max_abs(),
        entropy: entropy.map(|e| e(field)).transpose()?,
    })
}

/// Advances `field0` by `n_steps` steps of the stepper's `dt`.
///
/// Divergence (a non-finite value or `max |F| > DIVERGENCE_THRESHOLD`)
/// stops the loop and is reported in the summary rather than as an error.
pub fn run(
    field0: KineticField,
    stepper: &SplitStepper,
    n_steps: usize,
    entropy: Option<EntropyMonitor>,
) -> Result<RunSummary> {
    let dt = stepper.config().dt;
    let mut field = field0;
    let mut records = vec![record(0, 0.0, &field, entropy)?];
    for step in 1..=n_steps {
        let mut next = field.clone();
        let outcome = stepper.step(&mut next);
        let max_abs_f = next.max_abs();
        let blown = !next.all_finite() || max_abs_f > DIVERGENCE_THRESHOLD;
        match outcome {
            Ok(()) if !blown => {}
            // An inadmissible state (e.g. negative height) is a blow-up too.
            Ok(()) | Err(VlbmError::Domain(_)) => {
                return Ok(RunSummary {
                    field,
                    records,
                    divergence: Some(Divergence {
                        step,
                        time: step as f64 * dt,
                        max_abs_f,
                    }),
                });
            }
            Err(e) => return Err(e),
        }
        field = next;
        records.push(record(step, step as f64 * dt, &field, entropy)?);
    }
    Ok(RunSummary {
        field,
        records,
        divergence: None,
    })
}
