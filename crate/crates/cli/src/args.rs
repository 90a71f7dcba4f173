use clap::{Args, ValueEnum};
use stqp_core::EnsembleSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Goe,
    Wigner,
    HeavyTail,
    EndpointPower,
    ShiftedExponential,
}

#[derive(Debug, Clone, Args)]
pub struct EnsembleArgs {
    #[arg(long, value_enum)]
    pub ensemble: Option<Variant>,
    /// Diagonal variance (wigner).
    #[arg(long)]
    pub gamma2: Option<f64>,
    /// Off-diagonal variance (wigner).
    #[arg(long)]
    pub sigma2: Option<f64>,
    #[arg(long)]
    pub alpha_d: Option<f64>,
    #[arg(long)]
    pub alpha_o: Option<f64>,
    /// Lower endpoint is `-a` (endpoint-power, shifted-exponential).
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long)]
    pub beta_d: Option<f64>,
    #[arg(long)]
    pub beta_o: Option<f64>,
    #[arg(long)]
    pub lambda_d: Option<f64>,
    #[arg(long)]
    pub lambda_o: Option<f64>,
}

impl EnsembleArgs {
    /// Resolves the flags into a validated spec. Parameters that the chosen
    /// variant does not take are rejected.
    pub fn spec(&self) -> Result<EnsembleSpec, String> {
        let variant = self.ensemble.ok_or("--ensemble is required")?;
        let given = [
            ("gamma2", self.gamma2),
            ("sigma2", self.sigma2),
            ("alpha-d", self.alpha_d),
            ("alpha-o", self.alpha_o),
            ("a", self.a),
            ("beta-d", self.beta_d),
            ("beta-o", self.beta_o),
            ("lambda-d", self.lambda_d),
            ("lambda-o", self.lambda_o),
        ];
        let used: &[&str] = match variant {
            Variant::Goe => &[],
            Variant::Wigner => &["gamma2", "sigma2"],
            Variant::HeavyTail => &["alpha-d", "alpha-o"],
            Variant::EndpointPower => &["a", "beta-d", "beta-o"],
            Variant::ShiftedExponential => &["a", "lambda-d", "lambda-o"],
        };
        if let Some((name, _)) = given.iter().find(|(k, v)| v.is_some() && !used.contains(k)) {
            return Err(format!("--{name} does not apply to this ensemble"));
        }
        let need = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| format!("--{name} is required for this ensemble"))
        };
        let a = self.a.unwrap_or(0.0);
        let spec = match variant {
            Variant::Goe => EnsembleSpec::Goe,
            Variant::Wigner => EnsembleSpec::GaussianWigner {
                gamma2: need("gamma2", self.gamma2)?,
                sigma2: need("sigma2", self.sigma2)?,
            },
            Variant::HeavyTail => EnsembleSpec::HeavyTail {
                alpha_d: need("alpha-d", self.alpha_d)?,
                alpha_o: need("alpha-o", self.alpha_o)?,
            },
            Variant::EndpointPower => EnsembleSpec::EndpointPower {
                a,
                beta_d: need("beta-d", self.beta_d)?,
                beta_o: need("beta-o", self.beta_o)?,
            },
            Variant::ShiftedExponential => EnsembleSpec::ShiftedExponential {
                a,
                lambda_d: need("lambda-d", self.lambda_d)?,
                lambda_o: need("lambda-o", self.lambda_o)?,
            },
        };
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}

/// Comma-separated list of sizes, e.g. `100,200,400`.
#[derive(Debug, Clone)]
pub struct Grid(pub Vec<usize>);

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let grid = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad grid entry {t:?}: {e}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if grid.contains(&0) {
        return Err("grid entries must be positive".into());
    }
    Ok(Grid(grid))
}

pub fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

pub fn positive_u64(s: &str) -> Result<u64, String> {
    positive(s).map(|v| v as u64)
}
