//! D2Q4 Gaussian transport runs labelled stable or unstable.

use std::io::Write;
use std::path::Path;
use std::thread;

use vlbm_core::io::fmt_f64;
use vlbm_core::lattice::{ModelKind, VelocitySet};
use vlbm_core::models::ConservationLaw;
use vlbm_core::solver::{
    run, Grid, KineticField, SplitConfig, SplitScheme, SplitStepper, TransportBackend,
};

use crate::config::Settings;
use crate::{create_csv, join_list, manifest_line, CliError, Command};

const KEYS: &[&str] = &[
    "nx", "lambda", "omega", "a", "b", "t_final", "width", "growth", "scheme", "backend",
];

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityParams {
    /// Cells per axis on the unit square.
    pub nx: usize,
    pub lambdas: Vec<f64>,
    pub omegas: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub t_final: f64,
    /// Initial condition `exp(-width ((x - 1/2)^2 + (y - 1/2)^2))`.
    pub width: f64,
    /// A run is unstable when `max |w|` exceeds `growth` times its initial value.
    pub growth: f64,
    pub scheme: SplitScheme,
    pub backend: TransportBackend,
}

impl Default for StabilityParams {
    fn default() -> Self {
        Self {
            nx: 200,
            lambdas: vec![1.6, 2.2],
            omegas: vec![1.2, 1.6, 2.0],
            a: 1.0,
            b: 0.0,
            t_final: 1.0,
            width: 80.0,
            growth: 2.0,
            scheme: SplitScheme::Symmetric,
            backend: TransportBackend::GridShift,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StabilityRun {
    pub lambda: f64,
    pub omega: f64,
    pub nt: usize,
    pub dt: f64,
    pub initial_max: f64,
    /// Largest `max |w|` over the trajectory, initial state included.
    pub peak_max: f64,
    pub final_max: f64,
    pub unstable: bool,
    /// Step at which the run blew up (non-finite or above the threshold).
    pub divergence_step: Option<usize>,
    /// `(step, t, max |w|)` after every step.
    pub series: Vec<(usize, f64, f64)>,
    pub final_field: KineticField,
}

impl StabilityParams {
    pub fn from_settings(settings: &Settings) -> Result<Self, CliError> {
        settings.check_keys(KEYS)?;
        let d = Self::default();
        let params = Self {
            nx: settings.value("nx", d.nx)?,
            lambdas: settings.list("lambda", &d.lambdas)?,
            omegas: settings.list("omega", &d.omegas)?,
            a: settings.value("a", d.a)?,
            b: settings.value("b", d.b)?,
            t_final: settings.value("t_final", d.t_final)?,
            width: settings.value("width", d.width)?,
            growth: settings.value("growth", d.growth)?,
            scheme: settings.value("scheme", d.scheme)?,
            backend: settings.value("backend", d.backend)?,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.lambdas.is_empty() || self.omegas.is_empty() {
            return Err(CliError::Config(
                "lambda and omega lists must not be empty".into(),
            ));
        }
        if !(self.t_final > 0.0 && self.width > 0.0 && self.growth > 1.0) {
            return Err(CliError::Config(
                "t_final and width must be positive and growth above 1".into(),
            ));
        }
        let grid = Grid::unit(2, self.nx)?;
        let law = ConservationLaw::transport_2d(self.a, self.b)?;
        for &lambda in &self.lambdas {
            let vs = VelocitySet::new(ModelKind::D2Q4, lambda, 1)?;
            for &omega in &self.omegas {
                let cfg =
                    SplitConfig::new(omega, self.dt(lambda, &grid), self.scheme, self.backend)?;
                SplitStepper::new(&vs, &law, cfg, &grid)?;
            }
        }
        Ok(())
    }

    /// `dt = 4 dx / lambda`, so quarter steps move one cell.
    fn dt(&self, lambda: f64, grid: &Grid) -> f64 {
        4.0 * grid.dx(0) / lambda
    }

    pub fn manifest(&self) -> String {
        manifest_line(
            Command::StabilityD2q4,
            &[
                ("nx", self.nx.to_string()),
                ("lambda", join_list(&self.lambdas)),
                ("omega", join_list(&self.omegas)),
                ("a", self.a.to_string()),
                ("b", self.b.to_string()),
                ("t_final", self.t_final.to_string()),
                ("width", self.width.to_string()),
                ("growth", self.growth.to_string()),
                ("dt", "4dx/lambda".to_string()),
                ("scheme", self.scheme.to_string()),
                ("backend", self.backend.to_string()),
            ],
        )
    }

    pub fn run_one(&self, lambda: f64, omega: f64) -> vlbm_core::Result<StabilityRun> {
        let grid = Grid::unit(2, self.nx)?;
        let vs = VelocitySet::new(ModelKind::D2Q4, lambda, 1)?;
        let law = ConservationLaw::transport_2d(self.a, self.b)?;
        let dt = self.dt(lambda, &grid);
        let nt = (self.t_final / dt).round() as usize;
        let cfg = SplitConfig::new(omega, dt, self.scheme, self.backend)?;
        let stepper = SplitStepper::new(&vs, &law, cfg, &grid)?;
        let width = self.width;
        let field0 = KineticField::from_equilibrium(&grid, &vs, &law, |x| {
            vec![(-width * ((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2))).exp()]
        })?;
        let summary = run(field0, &stepper, nt, None)?;
        let initial_max = summary.records[0].max_abs_w;
        let peak_max = summary.peak_abs_w();
        let divergence_step = summary.divergence.as_ref().map(|d| d.step);
        Ok(StabilityRun {
            lambda,
            omega,
            nt,
            dt,
            initial_max,
            peak_max,
            final_max: summary.records.last().map_or(initial_max, |r| r.max_abs_w),
            unstable: divergence_step.is_some() || peak_max > self.growth * initial_max,
            divergence_step,
            series: summary
                .records
                .iter()
                .map(|r| (r.step, r.time, r.max_abs_w))
                .collect(),
            final_field: summary.field,
        })
    }

    /// Runs every `(lambda, omega)` pair in parallel, in list order.
    pub fn run(&self) -> Result<Vec<StabilityRun>, CliError> {
        let pairs: Vec<(f64, f64)> = self
            .lambdas
            .iter()
            .flat_map(|&l| self.omegas.iter().map(move |&o| (l, o)))
            .collect();
        let results: Vec<vlbm_core::Result<StabilityRun>> = thread::scope(|scope| {
            let handles: Vec<_> = pairs
                .iter()
                .map(|&(l, o)| scope.spawn(move || self.run_one(l, o)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("stability worker panicked"))
                .collect()
        });
        results
            .into_iter()
            .map(|r| r.map_err(CliError::from))
            .collect()
    }

    pub fn write(&self, runs: &[StabilityRun], out: &Path) -> Result<(), CliError> {
        let manifest = self.manifest();
        let mut summary = create_csv(out, "stability_summary.csv", &manifest)?;
        writeln!(
            summary,
            "lambda,omega,nt,dt,initial_max_w,peak_max_w,final_max_w,label,divergence_step"
        )?;
        let law = ConservationLaw::transport_2d(self.a, self.b)?;
        for r in runs {
            writeln!(
                summary,
                "{},{},{},{},{},{},{},{},{}",
                fmt_f64(r.lambda),
                fmt_f64(r.omega),
                r.nt,
                fmt_f64(r.dt),
                fmt_f64(r.initial_max),
                fmt_f64(r.peak_max),
                fmt_f64(r.final_max),
                if r.unstable { "unstable" } else { "stable" },
                r.divergence_step
                    .map_or_else(String::new, |s| s.to_string())
            )?;

            let tag = format!("lambda{}_omega{}", r.lambda, r.omega);
            let mut series = create_csv(out, &format!("maxnorm_{tag}.csv"), &manifest)?;
            writeln!(series, "step,t,max_abs_w")?;
            for (step, t, m) in &r.series {
                writeln!(series, "{step},{},{}", fmt_f64(*t), fmt_f64(*m))?;
            }
            series.flush()?;

            let vs = VelocitySet::new(ModelKind::D2Q4, r.lambda, 1)?;
            let mut field = create_csv(out, &format!("field_{tag}.csv"), &manifest)?;
            r.final_field.write_csv(&mut field, &vs, &law)?;
            field.flush()?;
        }
        summary.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_overrides_and_rejects_bad_lambda() {
        let s = Settings::parse("nx = 10\nlambda = 1.6\nscheme = plain").unwrap();
        let p = StabilityParams::from_settings(&s).unwrap();
        assert_eq!(p.nx, 10);
        assert_eq!(p.scheme, SplitScheme::Plain);
        let s = Settings::parse("lambda = 0").unwrap();
        assert!(matches!(
            StabilityParams::from_settings(&s),
            Err(CliError::Config(_))
        ));
        let s = Settings::parse("growth = 0.5").unwrap();
        assert!(StabilityParams::from_settings(&s).is_err());
    }

    #[test]
    fn small_stable_run() {
        let p = StabilityParams {
            nx: 40,
            lambdas: vec![2.2],
            omegas: vec![1.6],
            ..Default::default()
        };
        let runs = p.run().unwrap();
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].nt, 22);
        assert!(!runs[0].unstable);
        assert_eq!(runs[0].series.len(), 23);
    }
}
