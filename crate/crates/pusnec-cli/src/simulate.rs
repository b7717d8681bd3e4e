use std::path::PathBuf;

use pusnec::gabidulin::CodecSpec;
use pusnec::netsim::{binomial_se, Baseline, CodeSource, ErasureScope, GraphSource, ScenarioConfig, Simulator};
use pusnec::wiretap::{leakage_indices, DisjointPathModel, Provenance, WiretapDistribution};
use serde::{Deserialize, Serialize};

use crate::manifest::{csv_text, RunManifest};
use crate::{exit_err, Cli, EXIT_CONFIG};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// TOML file with a `[scenario]` table and an optional `[sweep]` table.
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogGrid {
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl LogGrid {
    fn values(&self) -> Result<Vec<f64>, String> {
        if self.from <= 0.0 || self.to <= 0.0 || self.points == 0 {
            return Err("log grid needs positive bounds and at least one point".into());
        }
        if self.points == 1 {
            return Ok(vec![self.from]);
        }
        let (a, b) = (self.from.log10(), self.to.log10());
        Ok((0..self.points).map(|i| 10f64.powf(a + (b - a) * i as f64 / (self.points - 1) as f64)).collect())
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub k: Option<Vec<usize>>,
    pub gamma: Option<Vec<f64>>,
    pub gamma_log: Option<LogGrid>,
    pub eps: Option<Vec<f64>>,
    pub eps_log: Option<LogGrid>,
    pub xi: Option<Vec<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default = "default_id")]
    pub scenario_id: String,
    pub scenario: toml::Table,
    #[serde(default)]
    pub sweep: Sweep,
}

fn default_id() -> String {
    "scenario".into()
}

/// One sweep point before simulation.
#[derive(Debug, Clone)]
struct Point {
    cfg: ScenarioConfig,
    spec: CodecSpec,
}

#[derive(Debug, Serialize)]
struct LongRow<'a> {
    scenario_id: &'a str,
    point: usize,
    k: usize,
    xi: Option<usize>,
    gamma: f64,
    eps: f64,
    metric: String,
    source: &'static str,
    value: f64,
    stderr: Option<f64>,
}

fn grid(list: &Option<Vec<f64>>, log: &Option<LogGrid>, base: f64, name: &str) -> Result<Vec<f64>, String> {
    match (list, log) {
        (Some(_), Some(_)) => Err(format!("give either {name} or {name}_log, not both")),
        (Some(v), None) if v.is_empty() => Err(format!("{name} sweep is empty")),
        (Some(v), None) => Ok(v.clone()),
        (None, Some(g)) => g.values(),
        (None, None) => Ok(vec![base]),
    }
}

fn expand(sc: &SimConfig, base: &ScenarioConfig) -> Result<Vec<Point>, String> {
    let base_spec = base.codec_spec().map_err(|e| e.to_string())?;
    let ks = match &sc.sweep.k {
        None => vec![base_spec.k],
        Some(ks) => {
            if !matches!(base.code, CodeSource::Spec(_)) {
                return Err("a k sweep needs an explicit code table, not a preset".into());
            }
            ks.clone()
        }
    };
    let gammas = grid(&sc.sweep.gamma, &sc.sweep.gamma_log, base.gamma, "gamma")?;
    let epss = grid(&sc.sweep.eps, &sc.sweep.eps_log, base.eps, "eps")?;
    let mut out = Vec::new();
    for &k in &ks {
        if k <= base_spec.mu0 {
            return Err(format!("k={k} leaves no secret symbols with mu0={}", base_spec.mu0));
        }
        let spec = CodecSpec { k, k0: k - base_spec.mu0, ..base_spec };
        spec.validate(false).map_err(|e| e.to_string())?;
        for &gamma in &gammas {
            for &eps in &epss {
                let code = if sc.sweep.k.is_some() { CodeSource::Spec(spec) } else { base.code.clone() };
                let cfg = ScenarioConfig { gamma, eps, code, ..base.clone() };
                cfg.validate().map_err(|e| e.to_string())?;
                out.push(Point { cfg, spec });
            }
        }
    }
    Ok(out)
}

/// Closed-form model, when the scenario matches its assumptions.
fn analytic_model(p: &Point) -> Option<DisjointPathModel> {
    let c = &p.cfg;
    match c.graph {
        GraphSource::DisjointPaths { eta, bobs }
            if c.erasure_scope == ErasureScope::AllLinks
                && c.baseline == Baseline::RankMetric
                && c.e_l1 == 0.0
                && c.e_l2 == 0.0
                && c.eps_n == 0.0 =>
        {
            Some(DisjointPathModel { gamma: c.gamma, eps: c.eps, eta, n0: p.spec.n0, bobs })
        }
        _ => None,
    }
}

/// Per-trial leakage g(μ) = min(ξ, (μ + ξ − k)^+) and its standard error.
fn i_l_stderr(p_mu: &[f64], k: usize, xi: usize, trials: u64) -> f64 {
    let g = |mu: usize| (mu + xi).saturating_sub(k).min(xi) as f64;
    let m1: f64 = p_mu.iter().enumerate().map(|(mu, p)| p * g(mu)).sum();
    let m2: f64 = p_mu.iter().enumerate().map(|(mu, p)| p * g(mu) * g(mu)).sum();
    ((m2 - m1 * m1).max(0.0) / trials as f64).sqrt()
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

pub fn run(cli: &Cli, args: &Args, m: &mut RunManifest) -> anyhow::Result<()> {
    let cfg_err = |e: String| exit_err(EXIT_CONFIG, format!("{}: {e}", args.config.display()));
    let text = std::fs::read_to_string(&args.config).map_err(|e| cfg_err(e.to_string()))?;
    m.config_path = Some(args.config.display().to_string());
    m.config_text = Some(text.clone());
    let mut sc: SimConfig = toml::from_str(&text).map_err(|e| cfg_err(e.to_string()))?;
    sc.scenario.entry("seed").or_insert(toml::Value::Integer(cli.seed as i64));
    let base: ScenarioConfig = sc.scenario.clone().try_into().map_err(|e: toml::de::Error| cfg_err(e.to_string()))?;
    m.seed = base.seed;
    let points = expand(&sc, &base).map_err(cfg_err)?;

    let mut wide = csv::Writer::from_writer(Vec::new());
    let mut long = Vec::new();
    let mut header_done = false;
    let (mut decodes, mut decode_us) = (0usize, 0.0);
    for (pi, p) in points.iter().enumerate() {
        let sim = Simulator::from_config(&p.cfg).map_err(|e| cfg_err(e.to_string()))?;
        let (rep, timing) = sim.run_timed()?;
        decodes += timing.samples;
        decode_us += timing.mean_us * timing.samples as f64;
        let c = &p.cfg;
        let model = analytic_model(p);
        let dist = model.map(|md| md.wiretap_distribution());
        let (fer_a, plp_a) = match (&model, &dist) {
            (Some(md), Some(d)) => (Some(md.fer(p.spec.k)), Some(d.tail(p.spec.k))),
            _ => (None, None),
        };
        // guidance applies to the estimates actually observed
        let observed = [rep.fer, rep.plp].into_iter().chain(rep.fer_b.iter().copied()).filter(|&r| r > 0.0);
        if let Some(msg) = observed
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.min(r))))
            .and_then(|r| c.trial_warning(r))
        {
            let msg = format!("point {pi}: {msg}");
            eprintln!("warning: {msg}");
            m.warnings.push(msg);
        }
        let bobs = rep.fer_b.len();
        if !header_done {
            let mut h: Vec<String> = ["scenario_id", "k", "xi", "gamma", "eps", "eL1", "eL2", "epsN", "trials", "FER"]
                .map(String::from)
                .into();
            h.extend((1..=bobs).map(|b| format!("FER_B{b}")));
            h.extend(["PLP", "I_L_xi", "stderr_FER"].map(String::from));
            h.extend((1..=bobs).map(|b| format!("stderr_FER_B{b}")));
            h.extend(
                ["stderr_PLP", "stderr_I_L_xi", "FER_analytic", "PLP_analytic", "I_L_xi_analytic"].map(String::from),
            );
            wide.write_record(&h)?;
            header_done = true;
        }
        let xis: Vec<usize> = match &sc.sweep.xi {
            Some(v) => v.clone(),
            None => vec![1],
        };
        let emp_dist = WiretapDistribution { p: rep.p_mu.clone(), source: Provenance::MonteCarlo };
        let mut push = |metric: String, xi: Option<usize>, source, value, stderr| {
            long.push(LongRow {
                scenario_id: &sc.scenario_id,
                point: pi,
                k: p.spec.k,
                xi,
                gamma: c.gamma,
                eps: c.eps,
                metric,
                source,
                value,
                stderr,
            })
        };
        push("FER".into(), None, "mc", rep.fer, Some(rep.fer_se));
        for (b, (&f, &se)) in rep.fer_b.iter().zip(&rep.fer_b_se).enumerate() {
            push(format!("FER_B{}", b + 1), None, "mc", f, Some(se));
        }
        push("PLP".into(), None, "mc", rep.plp, Some(rep.plp_se));
        if let (Some(f), Some(pl)) = (fer_a, plp_a) {
            push("FER".into(), None, "analytic", f, Some(binomial_se(f, rep.trials)));
            push("PLP".into(), None, "analytic", pl, Some(binomial_se(pl, rep.trials)));
        }
        for &xi in &xis {
            if xi == 0 || xi > p.spec.k0 {
                return Err(cfg_err(format!("xi={xi} outside 1..={}", p.spec.k0)));
            }
            let emp = leakage_indices(&emp_dist, p.spec.k, xi)?;
            let se_il = i_l_stderr(&rep.p_mu, p.spec.k, xi, rep.trials);
            let il_a = dist.as_ref().map(|d| leakage_indices(d, p.spec.k, xi).map(|l| l.i_l)).transpose()?;
            push("I_L".into(), Some(xi), "mc", emp.i_l, Some(se_il));
            if let Some(v) = il_a {
                push("I_L".into(), Some(xi), "analytic", v, Some(se_il));
            }
            let mut rec: Vec<String> = vec![
                sc.scenario_id.clone(),
                p.spec.k.to_string(),
                xi.to_string(),
                num(c.gamma),
                num(c.eps),
                num(c.e_l1),
                num(c.e_l2),
                num(c.eps_n),
                rep.trials.to_string(),
                num(rep.fer),
            ];
            rec.extend(rep.fer_b.iter().map(|&f| num(f)));
            rec.extend([num(rep.plp), num(emp.i_l), num(rep.fer_se)]);
            rec.extend(rep.fer_b_se.iter().map(|&f| num(f)));
            rec.extend([num(rep.plp_se), num(se_il), opt(fer_a), opt(plp_a), opt(il_a)]);
            wide.write_record(&rec)?;
        }
        eprintln!(
            "point {}/{}: k={} gamma={} eps={} FER={} PLP={}",
            pi + 1,
            points.len(),
            p.spec.k,
            c.gamma,
            c.eps,
            rep.fer,
            rep.plp
        );
    }
    m.write(&cli.out, "results.csv", wide.into_inner()?)?;
    m.write(&cli.out, "results_long.csv", csv_text(&long)?)?;
    m.timing.insert("decodes".into(), decodes.into());
    m.timing.insert("mean_decode_us".into(), (if decodes > 0 { decode_us / decodes as f64 } else { 0.0 }).into());
    Ok(())
}
