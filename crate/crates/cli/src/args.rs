use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use walkzeta::coins::ShiftKind;
use walkzeta::linalg::C64;
use walkzeta::zeta::SeriesMethod;

#[derive(Debug, Parser)]
#[command(
    name = "walkzeta",
    version,
    about = "Walk-type zeta functions for coined walks on the torus"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = ModelName::Hadamard)]
    pub model: ModelName,

    /// Angle parameter of the qw, crw, rw and oqrw-crw families.
    #[arg(long, global = true, default_value_t = std::f64::consts::FRAC_PI_4, allow_negative_numbers = true)]
    pub xi: f64,

    /// `m` (moving) or `f` (flip-flop).
    #[arg(long, global = true, default_value = "m", value_parser = parse_shift)]
    pub shift: ShiftKind,

    #[arg(long, global = true, default_value_t = 1)]
    pub d: usize,

    /// Torus side length.
    #[arg(long = "N", global = true, default_value_t = 8)]
    pub n: usize,

    /// Measure exponent; defaults to 1 for non-negative coins and 2 otherwise.
    #[arg(long, global = true)]
    pub p: Option<u32>,

    #[arg(long, global = true, default_value_t = 10)]
    pub rmax: usize,

    /// Comma-separated complex values such as `0.1,0.2-0.3i`.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_complex, allow_negative_numbers = true)]
    pub u: Vec<C64>,

    /// Quadrature points per axis; defaults to max(64, rmax + 1).
    #[arg(long = "grid-m", global = true)]
    pub grid_m: Option<usize>,

    #[arg(long, global = true, default_value_t = 10)]
    pub steps: usize,

    /// Comma-separated series routes.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_method, default_value = "fourier")]
    pub method: Vec<SeriesMethod>,

    #[arg(long, global = true, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Print the coin matrix.
    Coin,
    /// Evolve from the origin and dump the site measures μ_0..μ_steps.
    Evolve,
    /// ζ̄^{-1}(u) on T^d_N for each u.
    Zeta,
    /// The N → ∞ limit of ζ̄^{-1}(u) by quadrature, with a convergence report.
    ZetaLimit,
    /// Series coefficients C_1..C_rmax.
    Cr,
    /// Run the verification suites.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    Hadamard,
    Qw,
    Crw,
    Rw,
    SymRw,
    Grover,
    Fourier,
    PosGrover,
    Grover3,
    Oqrw,
    OqrwCrw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Factorization,
    Series,
    Consistency,
    Catalog,
    Conservation,
    Combinatorics,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn parse_shift(s: &str) -> Result<ShiftKind, String> {
    s.parse().map_err(|e: walkzeta::Error| e.to_string())
}

fn parse_method(s: &str) -> Result<SeriesMethod, String> {
    s.parse().map_err(|e: walkzeta::Error| e.to_string())
}

/// Parses `a`, `bi`, `a+bi` or `a-bi`, with exponents allowed in either part.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse complex number '{s}'");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|x| C64::new(x, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not leading and not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |part: &str| -> Result<f64, String> {
        match part {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            p => p.parse().map_err(|_| bad()),
        }
    };
    match split {
        Some(i) => Ok(C64::new(body[..i].parse().map_err(|_| bad())?, imag(&body[i..])?)),
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.5").unwrap(), C64::new(0.5, 0.0));
        assert_eq!(parse_complex("0.1+0.2i").unwrap(), C64::new(0.1, 0.2));
        assert_eq!(parse_complex("-0.1-2i").unwrap(), C64::new(-0.1, -2.0));
        assert_eq!(parse_complex("1e-3-1e-2i").unwrap(), C64::new(1e-3, -1e-2));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("0.3i").unwrap(), C64::new(0.0, 0.3));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("1+xi").is_err());
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from([
            "walkzeta",
            "cr",
            "--model",
            "sym-rw",
            "--d",
            "1",
            "--method",
            "closed,dp",
            "--rmax",
            "8",
            "--u",
            "0.1,-0.2+0.1i",
        ])
        .unwrap();
        assert_eq!(cli.command, Command::Cr);
        assert_eq!(cli.model, ModelName::SymRw);
        assert_eq!(cli.method, vec![SeriesMethod::Closed, SeriesMethod::Dp]);
        assert_eq!(cli.u.len(), 2);
        assert_eq!(cli.n, 8);
    }
}
