use serde::{Deserialize, Serialize};

use super::lattice::TorusConfig;
use super::state::WalkState;
use crate::error::{Error, Result};

/// Site measures `μ_0, ..., μ_n` of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSeries {
    pub config: TorusConfig,
    pub p: u32,
    /// `measures[n][x]`, sites in lexicographic order.
    pub measures: Vec<Vec<f64>>,
}

impl MeasureSeries {
    pub fn totals(&self) -> Vec<f64> {
        self.measures.iter().map(|m| m.iter().sum()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("measure series serialises")
    }

    /// Header `n,site,x1,...,xd,mu`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,site");
        for j in 1..=self.config.d {
            out.push_str(&format!(",x{j}"));
        }
        out.push_str(",mu\n");
        for (n, mu) in self.measures.iter().enumerate() {
            for (site, v) in mu.iter().enumerate() {
                out.push_str(&format!("{n},{site}"));
                for c in self.config.coords(site) {
                    out.push_str(&format!(",{c}"));
                }
                out.push_str(&format!(",{v:.16e}\n"));
            }
        }
        out
    }

    pub fn from_csv(config: TorusConfig, p: u32, csv: &str) -> Result<Self> {
        let mut measures: Vec<Vec<f64>> = Vec::new();
        for line in csv.lines().skip(1).filter(|l| !l.is_empty()) {
            let fields: Vec<&str> = line.split(',').collect();
            let parse_err = || Error::Parse(format!("bad measure row `{line}`"));
            let n: usize = fields.first().and_then(|f| f.parse().ok()).ok_or_else(parse_err)?;
            let v: f64 = fields.last().and_then(|f| f.parse().ok()).ok_or_else(parse_err)?;
            if n == measures.len() {
                measures.push(Vec::new());
            }
            measures.get_mut(n).ok_or_else(parse_err)?.push(v);
        }
        Ok(Self { config, p, measures })
    }
}

/// Header `site,x1,...,xd,re1,im1,...`.
pub fn state_csv(state: &WalkState) -> String {
    let cfg = state.config();
    let mut out = String::from("site");
    for j in 1..=cfg.d {
        out.push_str(&format!(",x{j}"));
    }
    for a in 1..=state.states() {
        out.push_str(&format!(",re{a},im{a}"));
    }
    out.push('\n');
    for site in 0..cfg.sites() {
        out.push_str(&site.to_string());
        for c in cfg.coords(site) {
            out.push_str(&format!(",{c}"));
        }
        for z in state.site(site) {
            out.push_str(&format!(",{:.16e},{:.16e}", z.re, z.im));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let config = TorusConfig::new(2, 2).unwrap();
        let series = MeasureSeries {
            config,
            p: 2,
            measures: vec![
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.1, 0.2 + 1e-17, 1.0 / 3.0, std::f64::consts::PI],
            ],
        };
        let csv = series.to_csv();
        assert!(csv.starts_with("n,site,x1,x2,mu\n"));
        assert_eq!(MeasureSeries::from_csv(config, 2, &csv).unwrap(), series);
    }
}
