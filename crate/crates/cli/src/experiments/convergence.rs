//! D1Q2 consistency experiment: errors of the kinetic solution in `w` and
//! `y` against the equivalent-equation and equivalent-system plane waves.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::thread;

use vlbm_core::analysis::{convergence_order, l2_relative_error, mode_eqeq, mode_eqsys};
use vlbm_core::io::fmt_f64;
use vlbm_core::lattice::{ModelKind, VelocitySet};
use vlbm_core::models::ConservationLaw;
use vlbm_core::solver::{
    run, Grid, KineticField, SplitConfig, SplitScheme, SplitStepper, TransportBackend,
};
use vlbm_core::VlbmError;

use crate::config::Settings;
use crate::{create_csv, join_list, manifest_line, CliError, Command};

const KEYS: &[&str] = &[
    "k", "w0", "t_final", "lambda", "v", "nt", "omega", "nx", "scheme", "backend",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceParams {
    pub k: f64,
    pub w0: f64,
    pub t_final: f64,
    pub lambda: f64,
    pub v: f64,
    pub nts: Vec<usize>,
    pub omegas: Vec<f64>,
    /// Cells on `[0, 2 pi)`.
    pub nx: usize,
    pub scheme: SplitScheme,
    pub backend: TransportBackend,
}

impl Default for ConvergenceParams {
    fn default() -> Self {
        Self {
            k: 2.0,
            w0: 1.0,
            t_final: PI,
            lambda: 1.0,
            v: 0.5,
            nts: vec![16, 32, 64, 128, 256, 512, 1024, 2048],
            omegas: vec![2.0, 1.9, 1.8, 1.7, 1.6, 1.5, 1.4, 1.3, 1.2],
            nx: 64,
            scheme: SplitScheme::Symmetric,
            backend: TransportBackend::Spectral,
        }
    }
}

/// Errors for one `(omega, Nt)` pair. `None` marks an undefined error
/// (zero reference norm) or a diverged run.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub omega: f64,
    pub nt: usize,
    pub dt: f64,
    pub diverged: bool,
    pub err_w_eqeq: Option<f64>,
    pub err_w_eqsys: Option<f64>,
    pub err_y_eqeq: Option<f64>,
    pub err_y_eqsys: Option<f64>,
}

/// Fitted convergence orders for one `omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderRow {
    pub omega: f64,
    pub w_eqeq: Option<f64>,
    pub w_eqsys: Option<f64>,
    pub y_eqeq: Option<f64>,
    pub y_eqsys: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceResults {
    pub rows: Vec<ConvergenceRow>,
    pub orders: Vec<OrderRow>,
}

fn undefined_to_none(r: vlbm_core::Result<f64>) -> vlbm_core::Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(VlbmError::UndefinedError) => Ok(None),
        Err(e) => Err(e),
    }
}

impl ConvergenceParams {
    pub fn from_settings(settings: &Settings) -> Result<Self, CliError> {
        settings.check_keys(KEYS)?;
        let d = Self::default();
        let params = Self {
            k: settings.value("k", d.k)?,
            w0: settings.value("w0", d.w0)?,
            t_final: settings.value("t_final", d.t_final)?,
            lambda: settings.value("lambda", d.lambda)?,
            v: settings.value("v", d.v)?,
            nts: settings.list("nt", &d.nts)?,
            omegas: settings.list("omega", &d.omegas)?,
            nx: settings.value("nx", d.nx)?,
            scheme: settings.value("scheme", d.scheme)?,
            backend: settings.value("backend", d.backend)?,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.k.fract() != 0.0 {
            return bad(format!(
                "k must be an integer wavenumber on [0, 2 pi), got {}",
                self.k
            ));
        }
        if !(self.lambda > self.v.abs()) {
            return bad(format!(
                "need lambda > |v|, got lambda = {}, v = {}",
                self.lambda, self.v
            ));
        }
        if !(self.t_final > 0.0) {
            return bad(format!("t_final must be positive, got {}", self.t_final));
        }
        if self.w0 == 0.0 {
            return bad("w0 must be non-zero".into());
        }
        if self.nts.is_empty() || self.nts.contains(&0) {
            return bad("nt must be a list of positive step counts".into());
        }
        if self.omegas.is_empty() || self.omegas.iter().any(|w| !(*w > 1.0 && *w <= 2.0)) {
            return bad("every omega must lie in (1, 2]".into());
        }
        // Builds every object once so parameter errors surface before running.
        let grid = Grid::two_pi(1, self.nx)?;
        let vs = VelocitySet::new(ModelKind::D1Q2, self.lambda, 1)?;
        let law = ConservationLaw::transport_1d(self.v)?;
        for &nt in &self.nts {
            for &omega in &self.omegas {
                let cfg =
                    SplitConfig::new(omega, self.t_final / nt as f64, self.scheme, self.backend)?;
                SplitStepper::new(&vs, &law, cfg, &grid)?;
            }
        }
        Ok(())
    }

    pub fn manifest(&self) -> String {
        manifest_line(
            Command::ConvergenceD1q2,
            &[
                ("k", self.k.to_string()),
                ("w0", self.w0.to_string()),
                ("t_final", self.t_final.to_string()),
                ("lambda", self.lambda.to_string()),
                ("v", self.v.to_string()),
                ("nt", join_list(&self.nts)),
                ("omega", join_list(&self.omegas)),
                ("nx", self.nx.to_string()),
                ("domain", "[0;2pi)".to_string()),
                ("scheme", self.scheme.to_string()),
                ("backend", self.backend.to_string()),
                ("init", "eqsys-kernel".to_string()),
            ],
        )
    }

    /// Runs one `(omega, Nt)` pair.
    pub fn run_one(&self, omega: f64, nt: usize) -> vlbm_core::Result<ConvergenceRow> {
        let dt = self.t_final / nt as f64;
        let grid = Grid::two_pi(1, self.nx)?;
        let vs = VelocitySet::new(ModelKind::D1Q2, self.lambda, 1)?;
        let law = ConservationLaw::transport_1d(self.v)?;
        let sys_mode = mode_eqsys(self.k, omega, self.lambda, self.v, self.w0, dt)?;
        let eq_mode = mode_eqeq(self.k, omega, self.lambda, self.v, self.w0, dt)?;

        let field0 =
            KineticField::from_moments(&grid, &vs, &law, |x| sys_mode.evaluate(&x[..1], 0.0))?;
        let cfg = SplitConfig::new(omega, dt, self.scheme, self.backend)?;
        let stepper = SplitStepper::new(&vs, &law, cfg, &grid)?;
        let summary = run(field0, &stepper, nt, None)?;
        if summary.diverged() {
            return Ok(ConvergenceRow {
                omega,
                nt,
                dt,
                diverged: true,
                err_w_eqeq: None,
                err_w_eqsys: None,
                err_y_eqeq: None,
                err_y_eqsys: None,
            });
        }
        let t = nt as f64 * dt;
        let y = summary.field.moments(&vs, &law)?;
        let (w_lbm, y_lbm) = (&y[0], &y[1]);
        let xs: Vec<f64> = (0..grid.n_cells()).map(|c| grid.coords(c)[0]).collect();
        let sample =
            |f: &dyn Fn(&[f64]) -> f64| -> Vec<f64> { xs.iter().map(|x| f(&[*x])).collect() };
        let w_eqeq = sample(&|x| eq_mode.w(x, t));
        let w_eqsys = sample(&|x| sys_mode.w(x, t));
        let y_eqeq = sample(&|x| eq_mode.y(x, t));
        let y_eqsys = sample(&|x| sys_mode.y(x, t));
        Ok(ConvergenceRow {
            omega,
            nt,
            dt,
            diverged: false,
            err_w_eqeq: undefined_to_none(l2_relative_error(w_lbm, &w_eqeq))?,
            err_w_eqsys: undefined_to_none(l2_relative_error(w_lbm, &w_eqsys))?,
            err_y_eqeq: undefined_to_none(l2_relative_error(y_lbm, &y_eqeq))?,
            err_y_eqsys: undefined_to_none(l2_relative_error(y_lbm, &y_eqsys))?,
        })
    }

    /// Runs every `(omega, Nt)` pair, one thread per `omega`.
    pub fn run(&self) -> Result<ConvergenceResults, CliError> {
        let per_omega: Vec<vlbm_core::Result<Vec<ConvergenceRow>>> = thread::scope(|scope| {
            let handles: Vec<_> = self
                .omegas
                .iter()
                .map(|&omega| {
                    scope
                        .spawn(move || self.nts.iter().map(|&nt| self.run_one(omega, nt)).collect())
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("convergence worker panicked"))
                .collect()
        });
        let mut rows = Vec::new();
        let mut orders = Vec::new();
        for (omega, result) in self.omegas.iter().zip(per_omega) {
            let block = result?;
            orders.push(fit_orders(*omega, &block));
            rows.extend(block);
        }
        Ok(ConvergenceResults { rows, orders })
    }

    pub fn write(&self, results: &ConvergenceResults, out: &Path) -> Result<(), CliError> {
        let manifest = self.manifest();
        let mut f = create_csv(out, "convergence_errors.csv", &manifest)?;
        writeln!(
            f,
            "omega,nt,dt,err_w_eqeq,err_w_eqsys,err_y_eqeq,err_y_eqsys"
        )?;
        for r in &results.rows {
            let cell = |e: Option<f64>| match (r.diverged, e) {
                (true, _) => "diverged".to_string(),
                (false, Some(v)) => fmt_f64(v),
                (false, None) => "undefined".to_string(),
            };
            writeln!(
                f,
                "{},{},{},{},{},{},{}",
                fmt_f64(r.omega),
                r.nt,
                fmt_f64(r.dt),
                cell(r.err_w_eqeq),
                cell(r.err_w_eqsys),
                cell(r.err_y_eqeq),
                cell(r.err_y_eqsys)
            )?;
        }
        f.flush()?;

        let mut f = create_csv(out, "convergence_orders.csv", &manifest)?;
        writeln!(
            f,
            "omega,order_w_eqeq,order_w_eqsys,order_y_eqeq,order_y_eqsys"
        )?;
        let cell = |e: Option<f64>| e.map_or_else(|| "undefined".to_string(), fmt_f64);
        for o in &results.orders {
            writeln!(
                f,
                "{},{},{},{},{}",
                fmt_f64(o.omega),
                cell(o.w_eqeq),
                cell(o.w_eqsys),
                cell(o.y_eqeq),
                cell(o.y_eqsys)
            )?;
        }
        f.flush()?;
        Ok(())
    }
}

/// Least-squares orders over the rows with a defined error.
fn fit_orders(omega: f64, rows: &[ConvergenceRow]) -> OrderRow {
    let fit = |pick: fn(&ConvergenceRow) -> Option<f64>| {
        let (dts, errs): (Vec<f64>, Vec<f64>) = rows
            .iter()
            .filter_map(|r| pick(r).filter(|e| *e > 0.0).map(|e| (r.dt, e)))
            .unzip();
        convergence_order(&dts, &errs).ok()
    };
    OrderRow {
        omega,
        w_eqeq: fit(|r| r.err_w_eqeq),
        w_eqsys: fit(|r| r.err_w_eqsys),
        y_eqeq: fit(|r| r.err_y_eqeq),
        y_eqsys: fit(|r| r.err_y_eqsys),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        let bad =
            |text: &str| ConvergenceParams::from_settings(&Settings::parse(text).unwrap()).is_err();
        assert!(bad("v = 1.5"));
        assert!(bad("omega = 1"));
        assert!(bad("k = 1.5"));
        assert!(bad("nt = 0"));
        assert!(bad("nx = 2"));
        assert!(bad("backend = grid-shift"));
        assert!(bad("unknown = 3"));
        assert!(!bad("omega = 1.5\nnt = 16, 32, 64"));
    }

    #[test]
    fn small_run_converges_in_w() {
        let params = ConvergenceParams {
            omegas: vec![1.5],
            nts: vec![32, 64, 128],
            ..Default::default()
        };
        let res = params.run().unwrap();
        assert_eq!(res.rows.len(), 3);
        let order = res.orders[0].w_eqsys.unwrap();
        assert!((order - 2.0).abs() < 0.3, "order {order}");
    }
}
