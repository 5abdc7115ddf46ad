//! Entropy monitoring of the D1Q2 transport scheme from random data.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vlbm_core::io::fmt_f64;
use vlbm_core::lattice::{ModelKind, VelocitySet};
use vlbm_core::models::ConservationLaw;
use vlbm_core::solver::{
    run, total_entropy_transport, Divergence, Grid, KineticField, SplitConfig, SplitScheme,
    SplitStepper, StepRecord, TransportBackend,
};

use crate::config::Settings;
use crate::{create_csv, manifest_line, CliError, Command};

const KEYS: &[&str] = &[
    "lambda",
    "c",
    "omega",
    "nx",
    "steps",
    "seed",
    "amplitude",
    "scheme",
];

/// Allowed entropy increase between consecutive steps.
pub const ENTROPY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyParams {
    pub lambda: f64,
    pub c: f64,
    pub omega: f64,
    /// Cells on the unit interval.
    pub nx: usize,
    pub steps: usize,
    pub seed: u64,
    /// Kinetic values are drawn uniformly from `1 +- amplitude`.
    pub amplitude: f64,
    pub scheme: SplitScheme,
}

impl Default for EntropyParams {
    fn default() -> Self {
        Self {
            lambda: 2.0,
            c: 1.0,
            omega: 1.5,
            nx: 64,
            steps: 200,
            seed: 1,
            amplitude: 0.5,
            scheme: SplitScheme::Symmetric,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EntropyResult {
    pub records: Vec<StepRecord>,
    pub non_increasing: bool,
    /// Largest step-to-step entropy increase (negative when strictly decreasing).
    pub max_increase: f64,
    pub divergence: Option<Divergence>,
}

impl EntropyParams {
    pub fn from_settings(settings: &Settings) -> Result<Self, CliError> {
        settings.check_keys(KEYS)?;
        let d = Self::default();
        let params = Self {
            lambda: settings.value("lambda", d.lambda)?,
            c: settings.value("c", d.c)?,
            omega: settings.value("omega", d.omega)?,
            nx: settings.value("nx", d.nx)?,
            steps: settings.value("steps", d.steps)?,
            seed: settings.value("seed", d.seed)?,
            amplitude: settings.value("amplitude", d.amplitude)?,
            scheme: settings.value("scheme", d.scheme)?,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.lambda > self.c.abs()) {
            return Err(CliError::Config(format!(
                "entropy monitoring needs lambda > |c|, got lambda = {}, c = {}",
                self.lambda, self.c
            )));
        }
        self.stepper()?;
        Ok(())
    }

    fn stepper(&self) -> Result<(Grid, SplitStepper), CliError> {
        let grid = Grid::unit(1, self.nx)?;
        let vs = VelocitySet::new(ModelKind::D1Q2, self.lambda, 1)?;
        let law = ConservationLaw::transport_1d(self.c)?;
        let dt = 4.0 * grid.dx(0) / self.lambda;
        let cfg = SplitConfig::new(self.omega, dt, self.scheme, TransportBackend::GridShift)?;
        let stepper = SplitStepper::new(&vs, &law, cfg, &grid)?;
        Ok((grid, stepper))
    }

    pub fn manifest(&self) -> String {
        manifest_line(
            Command::EntropyMonitor,
            &[
                ("lambda", self.lambda.to_string()),
                ("c", self.c.to_string()),
                ("omega", self.omega.to_string()),
                ("nx", self.nx.to_string()),
                ("steps", self.steps.to_string()),
                ("seed", self.seed.to_string()),
                ("amplitude", self.amplitude.to_string()),
                ("scheme", self.scheme.to_string()),
                ("dt", "4dx/lambda".to_string()),
                ("backend", TransportBackend::GridShift.to_string()),
            ],
        )
    }

    /// Seeded non-equilibrium initial data.
    pub fn initial_field(&self, grid: &Grid, vs: &VelocitySet) -> Result<KineticField, CliError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut field = KineticField::zeros(grid, vs)?;
        for cell in 0..grid.n_cells() {
            let values: Vec<f64> = (0..vs.len())
                .map(|_| 1.0 + self.amplitude * rng.random_range(-1.0..=1.0))
                .collect();
            field.set_cell(cell, &values);
        }
        Ok(field)
    }

    pub fn run(&self) -> Result<EntropyResult, CliError> {
        let (grid, stepper) = self.stepper()?;
        let field0 = self.initial_field(&grid, stepper.velocity_set())?;
        let (c, lambda) = (self.c, self.lambda);
        let entropy = move |f: &KineticField| total_entropy_transport(f, c, lambda);
        let summary = run(field0, &stepper, self.steps, Some(&entropy))?;
        let values: Vec<f64> = summary.records.iter().filter_map(|r| r.entropy).collect();
        let max_increase = values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        let non_increasing = values
            .windows(2)
            .all(|w| w[1] <= w[0] + ENTROPY_SLACK * w[0].abs().max(1.0));
        Ok(EntropyResult {
            records: summary.records,
            non_increasing,
            max_increase,
            divergence: summary.divergence,
        })
    }

    pub fn write(&self, result: &EntropyResult, out: &Path) -> Result<(), CliError> {
        let mut f = create_csv(out, "entropy.csv", &self.manifest())?;
        writeln!(f, "step,t,entropy,mass")?;
        for r in &result.records {
            writeln!(
                f,
                "{},{},{},{}",
                r.step,
                fmt_f64(r.time),
                fmt_f64(r.entropy.unwrap_or(f64::NAN)),
                fmt_f64(r.mass[0])
            )?;
        }
        f.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_supersonic_transport() {
        let s = Settings::parse("lambda = 1\nc = 1").unwrap();
        assert!(matches!(
            EntropyParams::from_settings(&s),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn default_run_dissipates() {
        let p = EntropyParams {
            steps: 50,
            ..Default::default()
        };
        let r = p.run().unwrap();
        assert!(r.non_increasing);
        assert!(r.max_increase < 0.0);
        assert_eq!(r.records.len(), 51);
    }

    #[test]
    fn constant_equilibrium_keeps_entropy() {
        // F_1 = F_2 = 1 is the equilibrium of w = 2 when c = 0.
        let p = EntropyParams {
            amplitude: 0.0,
            c: 0.0,
            omega: 1.0,
            steps: 10,
            ..Default::default()
        };
        let r = p.run().unwrap();
        let e: Vec<f64> = r.records.iter().map(|r| r.entropy.unwrap()).collect();
        assert!(e.windows(2).all(|w| (w[1] - w[0]).abs() < 1e-14));
    }
}
