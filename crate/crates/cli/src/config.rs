//! Resolution of run parameters: preset, then config file, then flags.

use std::path::Path;

use iontrap::decoherence::{RadiativeConvention, TransitionSpec};
use iontrap::{ContinuumModel, IonSpecies, PhysicalConstants, TrapConfig};
use serde::{Deserialize, Serialize};

use crate::args::{Constants, Format, InputArgs, OutputArgs, TransitionArgs};
use crate::CliError;

/// Keys accepted in a `--config` file; names match the long flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    preset: Option<String>,
    n_ions: Option<u64>,
    omega_z: Option<f64>,
    omega_t: Option<f64>,
    mass_amu: Option<f64>,
    charge_number: Option<u32>,
    temperature: Option<f64>,
    constants: Option<String>,
    model: Option<String>,
    multipole_a: Option<u32>,
    omega_0: Option<f64>,
    tau_s: Option<f64>,
    coupling_constant: Option<f64>,
    radiative: Option<String>,
    format: Option<String>,
}

/// Fully resolved parameters, recorded verbatim in the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub preset: String,
    pub n_ions: usize,
    pub omega_z: f64,
    pub omega_t: f64,
    pub mass_amu: f64,
    pub charge_number: u32,
    pub temperature: f64,
    pub constants: String,
    pub model: String,
    pub multipole_a: u32,
    pub omega_0: f64,
    pub tau_s: f64,
    pub coupling_constant: f64,
    pub radiative: String,
    #[serde(skip)]
    pub format: Format,
}

impl RunConfig {
    fn ba138() -> Self {
        let trap = TrapConfig::<f64>::ba138(1000);
        let spec = TransitionSpec::<f64>::ba138();
        Self {
            preset: "ba138".into(),
            n_ions: 1000,
            omega_z: trap.omega_z,
            omega_t: trap.omega_t,
            mass_amu: 137.905,
            charge_number: 1,
            temperature: 0.0,
            constants: "si".into(),
            model: ContinuumModel::DubinFluid.name().into(),
            multipole_a: spec.multipole_a,
            omega_0: spec.omega_0,
            tau_s: spec.tau_s,
            coupling_constant: spec.coupling_constant,
            radiative: "two-over-n".into(),
            format: Format::Csv,
        }
    }

    pub fn resolve(
        input: Option<&InputArgs>,
        transition: Option<&TransitionArgs>,
        output: &OutputArgs,
    ) -> Result<Self, CliError> {
        let mut cfg = Self::ba138();
        let file = match input.and_then(|i| i.config.as_deref()) {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        if let Some(p) = &file.preset {
            ensure_preset(p)?;
        }
        macro_rules! layer {
            ($field:ident, $value:expr) => {
                if let Some(v) = $value {
                    cfg.$field = v;
                }
            };
        }
        layer!(n_ions, file.n_ions.map(|n| n as usize));
        layer!(omega_z, file.omega_z);
        layer!(omega_t, file.omega_t);
        layer!(mass_amu, file.mass_amu);
        layer!(charge_number, file.charge_number);
        layer!(temperature, file.temperature);
        layer!(constants, file.constants);
        layer!(model, file.model);
        layer!(multipole_a, file.multipole_a);
        layer!(omega_0, file.omega_0);
        layer!(tau_s, file.tau_s);
        layer!(coupling_constant, file.coupling_constant);
        layer!(radiative, file.radiative);
        if let Some(f) = &file.format {
            cfg.format = match f.as_str() {
                "csv" => Format::Csv,
                "json" => Format::Json,
                other => return Err(CliError::Usage(format!("unknown format '{other}' in config"))),
            };
        }
        if let Some(i) = input {
            layer!(n_ions, i.n_ions.map(|n| n as usize));
            layer!(omega_z, i.omega_z);
            layer!(omega_t, i.omega_t);
            layer!(mass_amu, i.mass_amu);
            layer!(charge_number, i.charge_number);
            layer!(temperature, i.temperature);
            layer!(
                constants,
                i.constants.map(|c| match c {
                    Constants::Si => "si".to_string(),
                    Constants::Unit => "unit".to_string(),
                })
            );
            layer!(model, i.model.clone());
        }
        if let Some(t) = transition {
            layer!(multipole_a, t.multipole_a);
            layer!(omega_0, t.omega_0);
            layer!(tau_s, t.tau_s);
            layer!(coupling_constant, t.coupling_constant);
            layer!(radiative, t.radiative.clone());
        }
        layer!(format, output.format);
        cfg.validate(transition.is_some())?;
        Ok(cfg)
    }

    fn validate(&self, with_transition: bool) -> Result<(), CliError> {
        if self.n_ions == 0 {
            return Err(CliError::Usage("n_ions must be at least 1".into()));
        }
        self.trap().map_err(usage)?;
        self.continuum_model()?;
        if with_transition {
            self.transition().map_err(usage)?;
            self.radiative_convention()?;
        }
        Ok(())
    }

    fn physical_constants(&self) -> Result<PhysicalConstants<f64>, CliError> {
        match self.constants.as_str() {
            "si" => Ok(PhysicalConstants::si()),
            "unit" => Ok(PhysicalConstants::unit()),
            other => Err(CliError::Usage(format!("unknown constants '{other}' (si or unit)"))),
        }
    }

    pub fn trap(&self) -> Result<TrapConfig<f64>, CliError> {
        let constants = self.physical_constants()?;
        let species = IonSpecies::new(
            if self.preset == "ba138" && self.mass_amu == 137.905 { "Ba-138+" } else { "custom" },
            self.mass_amu * constants.amu,
            self.charge_number,
        )?;
        let mut cfg = TrapConfig::new(self.n_ions, self.omega_z, self.omega_t, species)?;
        cfg.constants = constants;
        cfg.temperature = self.temperature;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn transition(&self) -> Result<TransitionSpec<f64>, CliError> {
        let mut spec = TransitionSpec::new(self.multipole_a, self.omega_0, self.tau_s)?;
        spec.coupling_constant = self.coupling_constant;
        spec.validate()?;
        Ok(spec)
    }

    pub fn continuum_model(&self) -> Result<ContinuumModel, CliError> {
        self.model.parse().map_err(usage)
    }

    pub fn radiative_convention(&self) -> Result<RadiativeConvention, CliError> {
        match self.radiative.to_ascii_lowercase().replace('_', "-").as_str() {
            "two-over-n" => Ok(RadiativeConvention::TwoOverN),
            "one-over-n" => Ok(RadiativeConvention::OneOverN),
            other => Err(CliError::Usage(format!("unknown radiative convention '{other}'"))),
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn ensure_preset(name: &str) -> Result<(), CliError> {
    if name.eq_ignore_ascii_case("ba138") {
        Ok(())
    } else {
        Err(CliError::Usage(format!("unknown preset '{name}'")))
    }
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}
