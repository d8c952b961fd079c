use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;

use anyhow::Result;
use kfull::density::xi_truncated_with_tail;
use kfull::empirical::lemma_check;
use kfull::lambda::first_lambdas;
use kfull::power_sums::{closed_form_k2, power_sum_direct, EulerProduct};
use kfull::{Bounded, Dd, DensityMethod, Engine, Real, ShiuMethod};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::commands::{empirical_report, empirical_tolerance, engine, sink};
use crate::config::{Format, RunConfig};
use crate::golden;
use crate::UsageError;

pub const CHECKS: [&str; 10] = [
    "golden-table",
    "shiu-constants",
    "c2-ratio",
    "three-route",
    "normalization",
    "row-sum",
    "lemma-equivalence",
    "empirical",
    "power-sums",
    "newton-oracle",
];

const LEMMA_SEED: u64 = 20_251_125;
const LEMMA_N_MAX: u64 = 100_000;
const LEMMA_LAMBDAS: usize = 50;
const POWER_SUM_ORDERS: u32 = 8;
const ORACLE_LAMBDAS: usize = 200;
const ORACLE_ORDER: usize = 10;

#[derive(Serialize, Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub tolerance: f64,
    pub observed: f64,
    pub pass: bool,
    pub detail: String,
}

struct Report {
    overrides: BTreeMap<String, f64>,
    checks: Vec<Check>,
}

impl Report {
    fn push(&mut self, name: &'static str, tolerance: f64, observed: f64, detail: String) {
        let tolerance = self
            .overrides
            .get(name)
            .or_else(|| self.overrides.get("all"))
            .copied()
            .unwrap_or(tolerance);
        // NaN never passes
        let pass = observed <= tolerance;
        self.checks.push(Check {
            name,
            tolerance,
            observed,
            pass,
            detail,
        });
    }
}

fn parse_overrides(raw: &[String]) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for r in raw {
        let (name, value) = r
            .split_once('=')
            .ok_or_else(|| UsageError(format!("--tolerance expects NAME=VALUE, got {r:?}")))?;
        if name != "all" && !CHECKS.contains(&name) {
            return Err(UsageError(format!("unknown check {name:?}; known: all, {}", CHECKS.join(", "))).into());
        }
        let v: f64 = value
            .parse()
            .ok()
            .filter(|v: &f64| *v >= 0.0)
            .ok_or_else(|| UsageError(format!("bad tolerance {value:?}")))?;
        out.insert(name.to_string(), v);
    }
    Ok(out)
}

fn f(x: Dd) -> f64 {
    x.to_f64_lossy()
}

/// `|a - b|` in units of the combined radius; at most 1 when the
/// enclosures overlap.
fn radius_ratio(a: Bounded, b: Bounded) -> f64 {
    let diff = f((a.value - b.value).abs());
    let r = f(a.radius + b.radius);
    if diff == 0.0 {
        0.0
    } else {
        diff / r
    }
}

pub fn run(cfg: &RunConfig, raw_overrides: &[String]) -> Result<ExitCode> {
    let mut report = Report {
        overrides: parse_overrides(raw_overrides)?,
        checks: Vec::new(),
    };
    let k = cfg.k;
    let l_max = cfg.max_index;
    let e = engine(cfg, l_max.max(5))?;

    if let Some(gold) = golden::table(k) {
        let mut worst = 0.0f64;
        let mut at = (0, 0);
        for (l, m, v) in gold {
            let d = (f(e.density_a(l, m, DensityMethod::Direct)?.value) - v).abs();
            if d > worst {
                worst = d;
                at = (l, m);
            }
        }
        report.push(
            "golden-table",
            golden::TABLE_TOLERANCE,
            worst,
            format!("largest gap at (l, m) = {at:?}"),
        );
    }
    if k == 2 {
        let mut worst = 0.0f64;
        for (l, &v) in golden::SHIU_K2.iter().enumerate() {
            worst = worst.max((f(e.density_shiu(l, ShiuMethod::XiAlternating)?.value) - v).abs());
        }
        report.push(
            "shiu-constants",
            1e-3,
            worst,
            "d_{2,0..2} vs 0.275, 0.395, 0.231".into(),
        );
        let c2 =
            kfull::zeta::zeta::<Dd>(Dd::lit(1.5), cfg.digits)? / kfull::zeta::zeta::<Dd>(Dd::lit(3.0), cfg.digits)?;
        report.push(
            "c2-ratio",
            1e-3,
            (f(c2.value) - golden::C2_RATIO).abs(),
            format!("zeta(3/2)/zeta(3) = {}", c2.value.to_fixed(12)),
        );
    }

    three_routes(&e, l_max, &mut report)?;

    let norm = e.normalization_check();
    report.push(
        "normalization",
        1e-9,
        f((norm.value - Dd::ONE).abs() + norm.radius),
        format!("sum of all cells = {norm}"),
    );

    let mut worst = 0.0f64;
    for l in 0..=l_max {
        let rows = e.density_shiu(l, ShiuMethod::RowSum)?;
        let alt = e.density_shiu(l, ShiuMethod::XiAlternating)?;
        worst = worst.max(f((rows.value - alt.value).abs() + rows.radius + alt.radius));
    }
    report.push(
        "row-sum",
        1e-9,
        worst,
        format!("rows l = 0..={l_max} against d_{{k,l}}"),
    );

    let triples = if cfg.quick { 1_000 } else { 10_000 };
    let (bad, non_unique) = lemma_sample(k, triples)?;
    report.push(
        "lemma-equivalence",
        0.0,
        (bad + non_unique) as f64,
        format!("{triples} triples: {bad} disagreements, {non_unique} positives without a unique witness"),
    );

    let emp = empirical_report(cfg)?;
    report.push(
        "empirical",
        empirical_tolerance(k, cfg.n),
        emp.max_deviation,
        format!("max cell deviation over n <= {}", cfg.n),
    );

    let euler = EulerProduct::<Dd>::new(k, cfg.prime_cutoff, cfg.digits.min(28))?;
    let mut worst = 0.0f64;
    for m in 1..=POWER_SUM_ORDERS {
        let direct = power_sum_direct::<Dd>(k, m, cfg.trunc_b)?;
        let prod = euler.power_sum(m)?;
        worst = worst.max(radius_ratio(direct, prod));
        if k == 2 {
            worst = worst.max(radius_ratio(closed_form_k2::<Dd>(m, cfg.digits)?, prod));
        }
    }
    report.push(
        "power-sums",
        1.0,
        worst,
        format!(
            "box B = {}, m = 1..={POWER_SUM_ORDERS}, gap over combined radius",
            cfg.trunc_b
        ),
    );

    let p1 = e.power_sums().values[0];
    let oracle = xi_truncated_with_tail::<Dd>(k, ORACLE_LAMBDAS, ORACLE_ORDER, p1)?;
    let mut worst = 0.0f64;
    for (r, o) in oracle.iter().enumerate() {
        worst = worst.max(radius_ratio(e.xi().xi[r], *o));
    }
    report.push(
        "newton-oracle",
        1.0,
        worst,
        format!(
            "xi_r, r <= {ORACLE_ORDER}, against the first {ORACLE_LAMBDAS} elements plus tail; at most 1 means overlap"
        ),
    );

    let all_pass = report.checks.iter().all(|c| c.pass);
    let mut out = sink(cfg)?;
    write_report(&mut out, k, &report.checks, all_pass, cfg.format)?;
    out.flush()?;
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("check failed: {}", c.name);
    }
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn three_routes(e: &Engine, l_max: usize, report: &mut Report) -> Result<()> {
    let mut worst = 0.0f64;
    for l in 0..=l_max {
        for m in 0..=l_max {
            let v: Vec<Dd> = DensityMethod::ALL
                .iter()
                .map(|&method| e.density_a(l, m, method).map(|x| x.value))
                .collect::<kfull::Result<_>>()?;
            for a in 0..v.len() {
                for b in a + 1..v.len() {
                    worst = worst.max(f((v[a] - v[b]).abs()));
                }
            }
        }
    }
    report.push(
        "three-route",
        1e-9,
        worst,
        "largest pairwise gap between direct, inversion, xi".into(),
    );
    Ok(())
}

/// Random `(n, λ, j)`: counts criterion/interval disagreements and positive
/// cases whose witness `a` is not unique.
pub fn lemma_sample(k: u32, triples: usize) -> Result<(u64, u64)> {
    let els = first_lambdas(k, LEMMA_LAMBDAS)?;
    let mut rng = ChaCha8Rng::seed_from_u64(LEMMA_SEED ^ k as u64);
    let mut bad = 0;
    let mut non_unique = 0;
    for _ in 0..triples {
        let n = rng.gen_range(1..=LEMMA_N_MAX);
        let e = &els[rng.gen_range(0..els.len())];
        let j = rng.gen_range(1..=2u32);
        let o = lemma_check(n, e, j)?;
        if o.criterion != o.direct {
            bad += 1;
        }
        if o.direct && o.witnesses != 1 {
            non_unique += 1;
        }
    }
    Ok((bad, non_unique))
}

fn write_report(out: &mut dyn Write, k: u32, checks: &[Check], all_pass: bool, format: Format) -> Result<()> {
    let verdict = |p: bool| if p { "PASS" } else { "FAIL" };
    match format {
        Format::Csv => {
            writeln!(out, "k,check,tolerance,observed,pass,detail")?;
            for c in checks {
                writeln!(
                    out,
                    "{k},{},{:e},{:e},{},{}",
                    c.name,
                    c.tolerance,
                    c.observed,
                    c.pass,
                    crate::output::csv_field(&c.detail)
                )?;
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                k: u32,
                pass: bool,
                checks: &'a [Check],
            }
            serde_json::to_writer_pretty(
                &mut *out,
                &Doc {
                    k,
                    pass: all_pass,
                    checks,
                },
            )?;
            writeln!(out)?;
        }
        Format::Text => {
            for c in checks {
                writeln!(
                    out,
                    "{} {:<18} tolerance {:<9.2e} observed {:<9.3e} {}",
                    verdict(c.pass),
                    c.name,
                    c.tolerance,
                    c.observed,
                    c.detail
                )?;
            }
            writeln!(
                out,
                "{}: {} of {} checks passed",
                verdict(all_pass),
                checks.iter().filter(|c| c.pass).count(),
                checks.len()
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let o = parse_overrides(&["all=0".into(), "row-sum=1e-3".into()]).unwrap();
        assert_eq!(o["all"], 0.0);
        assert_eq!(o["row-sum"], 1e-3);
        assert!(parse_overrides(&["nope=1".into()]).is_err());
        assert!(parse_overrides(&["row-sum".into()]).is_err());
        assert!(parse_overrides(&["row-sum=-1".into()]).is_err());
    }

    #[test]
    fn ratio_of_touching_enclosures() {
        let a = Bounded::new(Dd::lit(1.0), Dd::lit(0.5));
        let b = Bounded::new(Dd::lit(2.0), Dd::lit(0.5));
        assert_eq!(radius_ratio(a, b), 1.0);
        assert_eq!(radius_ratio(a, a), 0.0);
    }
}
