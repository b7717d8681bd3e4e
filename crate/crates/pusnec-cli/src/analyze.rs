use clap::ValueEnum;
use pusnec::wiretap::{disjoint_path_analytics, leakage_indices, rs32_table, threshold_model_mi, DisjointPathModel};
use serde::Serialize;

use crate::manifest::{csv_text, RunManifest};
use crate::{exit_err, Cli, EXIT_CONFIG};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Leakage indices and FER over disjoint paths.
    Lii,
    /// Threshold-model MI staircase over the tapped rank μ.
    Threshold,
    /// Exhaustive MI table of a toy code.
    ToyOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ToyCode {
    Rs32,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = ToyCode::Rs32)]
    pub code: ToyCode,
    /// Code dimension; lii sweeps 1..=n0 when omitted.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub mu0: usize,
    /// Secret-symbol subset sizes (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub xi: Vec<usize>,
    /// Disjoint paths (lii) or largest μ (threshold, default k + 1).
    #[arg(long)]
    pub n0: Option<usize>,
    /// Charlies per path.
    #[arg(long, default_value_t = 5)]
    pub eta: usize,
    #[arg(long, default_value_t = 2)]
    pub bobs: usize,
    /// Compromise probabilities (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "0.001")]
    pub gamma: Vec<f64>,
    #[arg(long, default_value_t = 0.001)]
    pub eps: f64,
    /// Bits per leakage unit, log2 q^m.
    #[arg(long, default_value_t = 88.0)]
    pub bits: f64,
}

#[derive(Debug, Serialize)]
struct LiiRow {
    k: usize,
    k0: usize,
    xi: usize,
    gamma: f64,
    eps: f64,
    eta: usize,
    n0: usize,
    bobs: usize,
    fer: f64,
    fer_single: f64,
    plp: f64,
    i_r: f64,
    i_l: f64,
    i_l_bits: f64,
}

#[derive(Debug, Serialize)]
struct ThresholdRow {
    k: usize,
    mu0: usize,
    xi: usize,
    mu: usize,
    mi: f64,
}

#[derive(Debug, Serialize)]
struct ToyRow {
    code: &'static str,
    quantity: &'static str,
    bits: f64,
}

fn check_xi(xi: &[usize], k0: usize) -> anyhow::Result<()> {
    match xi.iter().find(|&&x| x == 0 || x > k0) {
        Some(x) => Err(exit_err(EXIT_CONFIG, format!("xi={x} outside 1..={k0}"))),
        None => Ok(()),
    }
}

fn k0_of(k: usize, mu0: usize) -> anyhow::Result<usize> {
    match k.checked_sub(mu0) {
        Some(k0) if k0 > 0 => Ok(k0),
        _ => Err(exit_err(EXIT_CONFIG, format!("mu0={mu0} leaves no secret symbols at k={k}"))),
    }
}

fn lii(a: &Args) -> anyhow::Result<String> {
    let n0 = a.n0.unwrap_or(10);
    if a.eta == 0 || a.bobs == 0 || n0 == 0 {
        return Err(exit_err(EXIT_CONFIG, "eta, bobs and n0 must be positive"));
    }
    let ks: Vec<usize> = match a.k {
        Some(k) => vec![k],
        None => (a.mu0 + 1..=n0).collect(),
    };
    let xis = if a.xi.is_empty() { vec![1] } else { a.xi.clone() };
    let mut rows = Vec::new();
    for &gamma in &a.gamma {
        for &k in &ks {
            let k0 = k0_of(k, a.mu0)?;
            check_xi(&xis, k0)?;
            let model = DisjointPathModel { gamma, eps: a.eps, eta: a.eta, n0, bobs: a.bobs };
            let an =
                disjoint_path_analytics(&model, k, k0, a.bits).map_err(|e| exit_err(EXIT_CONFIG, e.to_string()))?;
            for &xi in &xis {
                let p = leakage_indices(&an.dist, k, xi)?;
                rows.push(LiiRow {
                    k,
                    k0,
                    xi,
                    gamma,
                    eps: a.eps,
                    eta: a.eta,
                    n0,
                    bobs: a.bobs,
                    fer: an.fer,
                    fer_single: an.fer_single,
                    plp: p.plp,
                    i_r: p.i_r,
                    i_l: p.i_l,
                    i_l_bits: p.i_l * a.bits,
                });
            }
        }
    }
    csv_text(&rows)
}

fn threshold(a: &Args) -> anyhow::Result<String> {
    let k = a.k.ok_or_else(|| exit_err(EXIT_CONFIG, "threshold mode needs --k"))?;
    let k0 = k0_of(k, a.mu0)?;
    let xis = if a.xi.is_empty() { (1..=k0).collect() } else { a.xi.clone() };
    check_xi(&xis, k0)?;
    let max_mu = a.n0.unwrap_or(k + 1);
    let mut rows = Vec::new();
    for &xi in &xis {
        for mu in 0..=max_mu {
            let mi = threshold_model_mi(k, a.mu0, mu, xi).map_err(|e| exit_err(EXIT_CONFIG, e.to_string()))?;
            rows.push(ThresholdRow { k, mu0: a.mu0, xi, mu, mi });
        }
    }
    csv_text(&rows)
}

fn toy(a: &Args) -> anyhow::Result<String> {
    match a.code {
        ToyCode::Rs32 => {
            let t = rs32_table()?;
            let names = ["I(U0;X0)", "I(U0,U1;X0)", "I(U0,U1;X0,X1)"];
            let rows: Vec<ToyRow> =
                names.iter().zip(t).map(|(&quantity, bits)| ToyRow { code: "rs32", quantity, bits }).collect();
            csv_text(&rows)
        }
    }
}

pub fn run(cli: &Cli, a: &Args, m: &mut RunManifest) -> anyhow::Result<()> {
    let (name, text) = match a.mode {
        Mode::Lii => ("lii.csv", lii(a)?),
        Mode::Threshold => ("threshold.csv", threshold(a)?),
        Mode::ToyOracle => ("toy_oracle.csv", toy(a)?),
    };
    print!("{text}");
    m.write(&cli.out, name, text)
}
