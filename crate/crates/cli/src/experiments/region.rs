//! Diffusive-stability and hyperbolicity rasters for the 2-d models.

use std::io::Write;
use std::path::Path;

use vlbm_core::analysis::{stability_region, StabilityRaster, MIN_RESOLUTION};
use vlbm_core::ModelKind;

use crate::config::Settings;
use crate::{create_csv, join_list, manifest_line, CliError, Command};

const KEYS: &[&str] = &["model", "lambda", "resolution"];

#[derive(Debug, Clone, PartialEq)]
pub struct RegionParams {
    pub models: Vec<ModelKind>,
    pub lambda: f64,
    pub resolution: usize,
}

impl Default for RegionParams {
    fn default() -> Self {
        Self {
            models: vec![ModelKind::D2Q3, ModelKind::D2Q4],
            lambda: 1.0,
            resolution: 256,
        }
    }
}

impl RegionParams {
    pub fn from_settings(settings: &Settings) -> Result<Self, CliError> {
        settings.check_keys(KEYS)?;
        let d = Self::default();
        let params = Self {
            models: settings.list("model", &d.models)?,
            lambda: settings.value("lambda", d.lambda)?,
            resolution: settings.value("resolution", d.resolution)?,
        };
        if params.models.is_empty() || params.models.iter().any(|m| m.dim() != 2) {
            return Err(CliError::Config("model must list D2Q3 and/or D2Q4".into()));
        }
        if !(params.lambda > 0.0) {
            return Err(CliError::Config(format!(
                "lambda must be positive, got {}",
                params.lambda
            )));
        }
        if params.resolution < MIN_RESOLUTION {
            return Err(CliError::Config(format!(
                "resolution must be at least {MIN_RESOLUTION}, got {}",
                params.resolution
            )));
        }
        Ok(params)
    }

    pub fn manifest(&self) -> String {
        manifest_line(
            Command::Region,
            &[
                ("model", join_list(&self.models)),
                ("lambda", self.lambda.to_string()),
                ("resolution", self.resolution.to_string()),
                ("range", "[-1.5;1.5]*lambda".to_string()),
            ],
        )
    }

    pub fn run(&self) -> Result<Vec<StabilityRaster>, CliError> {
        self.models
            .iter()
            .map(|m| stability_region(*m, self.lambda, self.resolution).map_err(CliError::from))
            .collect()
    }

    pub fn write(&self, rasters: &[StabilityRaster], out: &Path) -> Result<(), CliError> {
        let manifest = self.manifest();
        for r in rasters {
            let name = format!("region_{}.csv", r.model.name().to_ascii_lowercase());
            let mut f = create_csv(out, &name, &manifest)?;
            r.write_csv(&mut f)?;
            f.flush()?;
        }
        Ok(())
    }
}
