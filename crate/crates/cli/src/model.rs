use walkzeta::coins::{
    crw_coin, flip_flop, fourier_matrix, grover_matrix, hadamard, oqrw_crw_pair, oqrw_example_pair, oqrw_lift,
    oqrw_reduce, positive_support_grover, qw_coin, rw_coin, symmetric_rw, three_state_grover, Coin, ShiftKind,
};
use walkzeta::zeta::CatalogWalk;

use crate::args::{Cli, ModelName};
use crate::CliError;

/// The walk selected by `--model`, `--xi`, `--shift` and `--d`.
pub fn build_walk(cli: &Cli) -> Result<CatalogWalk, CliError> {
    let one_dim = |name: &str| {
        if cli.d != 1 {
            return Err(CliError::Config(format!(
                "model {name} is one-dimensional, got --d {}",
                cli.d
            )));
        }
        Ok(())
    };
    let coin: Coin = match cli.model {
        ModelName::Hadamard => {
            one_dim("hadamard")?;
            hadamard()
        }
        ModelName::Qw => {
            one_dim("qw")?;
            qw_coin(cli.xi)
        }
        ModelName::Crw => {
            one_dim("crw")?;
            crw_coin(cli.xi)
        }
        ModelName::Rw => {
            one_dim("rw")?;
            rw_coin(cli.xi)
        }
        ModelName::SymRw => {
            one_dim("sym-rw")?;
            symmetric_rw()
        }
        ModelName::Grover3 => {
            one_dim("grover3")?;
            three_state_grover()
        }
        ModelName::Grover => grover_matrix(2 * cli.d)?,
        ModelName::Fourier => fourier_matrix(2 * cli.d)?,
        ModelName::PosGrover => positive_support_grover(2 * cli.d)?,
        ModelName::OqrwCrw => {
            one_dim("oqrw-crw")?;
            let (b, c) = oqrw_crw_pair(cli.xi);
            oqrw_reduce(&b, &c)?
        }
        ModelName::Oqrw => {
            one_dim("oqrw")?;
            if cli.shift == ShiftKind::FlipFlop {
                return Err(CliError::Config("oqrw has no flip-flop form".into()));
            }
            let (b, c) = oqrw_example_pair();
            return Ok(CatalogWalk::Oqrw(oqrw_lift(&b, &c)?));
        }
    };
    let coin = match cli.shift {
        ShiftKind::Moving => coin,
        ShiftKind::FlipFlop => flip_flop(&coin, cli.d)?,
    };
    Ok(CatalogWalk::Coin(coin))
}

/// `--p` if given, else the coin's natural measure exponent.
pub fn norm_exponent(cli: &Cli, walk: &CatalogWalk) -> Result<u32, CliError> {
    let p = match (cli.p, walk) {
        (Some(p), _) => p,
        (None, CatalogWalk::Coin(c)) => c.default_norm(),
        (None, CatalogWalk::Oqrw(_)) => 1,
    };
    if p != 1 && p != 2 {
        return Err(CliError::Config(format!("--p must be 1 or 2, got {p}")));
    }
    Ok(p)
}
