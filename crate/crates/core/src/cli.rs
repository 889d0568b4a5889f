//! Command-line front end. [`run`] parses arguments, dispatches, and returns
//! the process exit code: 0 success, 1 usage, 2 data error, 3 numerical
//! failure (including failed `verify` checks).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::agents::{solve_steady_state, SteadyState};
use crate::error::Error;
use crate::policy::{PolicyOutcome, PolicyScenario};
use crate::scenario::{parse_scenario, reference_scenario, GridSpec, Scenario, ScenarioError};
use crate::schedules::{integrate_schedule, ScheduleRow};
use crate::verify::{verify, DEFAULT_SEED};

#[derive(Debug, Parser)]
#[command(name = "assettax", version, about = "Asset tax valuation, optimal schedules and policy reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file; the bundled reference scenario when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Directory to write output files into instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Asset values and captured shares for the scenario's valuations.
    Value(Common),
    /// Tabulate a schedule over a grid.
    Schedule {
        #[command(flatten)]
        common: Common,
        /// Grid as start:stop:n; overrides the scenario's grid.
        #[arg(long)]
        grid: Option<GridSpec>,
        /// Schedule to emit; required on stdout when there are several.
        #[arg(long)]
        name: Option<String>,
    },
    /// Solve every agent's steady state against its schedule.
    SteadyState {
        #[command(flatten)]
        common: Common,
        /// Grid as start:stop:n for the schedules agents face.
        #[arg(long)]
        grid: Option<GridSpec>,
    },
    /// Apply the policy to every asset and summarize revenue.
    Report(Common),
    /// Re-run the policy while varying one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Policy parameter to vary.
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Values as start:stop:n.
        #[arg(long)]
        grid: GridSpec,
    },
    /// Check worked numbers and oracle comparisons.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Seed for the Monte Carlo comparisons.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Table => "txt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum SweepParam {
    LandTaxRate,
    DiscountRate,
    FloorMultiplier,
    AssessorAwardRate,
    MineralAuctionShare,
}

impl SweepParam {
    fn name(self) -> &'static str {
        match self {
            SweepParam::LandTaxRate => "land_tax_rate",
            SweepParam::DiscountRate => "discount_rate",
            SweepParam::FloorMultiplier => "floor_multiplier",
            SweepParam::AssessorAwardRate => "assessor_award_rate",
            SweepParam::MineralAuctionShare => "mineral_auction_share",
        }
    }

    fn apply(self, policy: &mut PolicyScenario, value: f64) {
        let c = &mut policy.config;
        match self {
            SweepParam::LandTaxRate => c.land_tax_rate = value,
            SweepParam::DiscountRate => c.discount_rate = value,
            SweepParam::FloorMultiplier => c.floor_multiplier = value,
            SweepParam::AssessorAwardRate => c.assessor_award_rate = value,
            SweepParam::MineralAuctionShare => c.mineral_auction_share = value,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Data(e.to_string())
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

/// One file of command output.
struct Artifact {
    stem: String,
    format: Format,
    body: String,
}

/// Runs the command line in `args` (program name first).
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                1
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.code()
        }
    }
}

fn load(common: &Common, stderr: &mut dyn Write) -> Result<Scenario, Failure> {
    let scenario = match &common.scenario {
        Some(path) => parse_scenario(path)?,
        None => reference_scenario(),
    };
    for w in &scenario.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    Ok(scenario)
}

fn pick_format(requested: Option<Format>, default: Format, allowed: &[Format], command: &str) -> Result<Format, Failure> {
    let f = requested.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Failure::Usage(format!("`{command}` does not support --format {f:?}").to_lowercase()))
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let (common, artifacts) = match command {
        Command::Value(common) => {
            let format = pick_format(common.format, Format::Table, &[Format::Csv, Format::Json, Format::Table], "value")?;
            let scenario = load(&common, stderr)?;
            let body = render_valuations(&scenario, format)?;
            (common, vec![Artifact { stem: "valuations".into(), format, body }])
        }
        Command::Schedule { common, grid, name } => {
            let format = pick_format(common.format, Format::Csv, &[Format::Csv, Format::Json, Format::Table], "schedule")?;
            let scenario = load(&common, stderr)?;
            let names: Vec<String> = match name {
                Some(n) if scenario.schedule(&n).is_none() => return Err(Failure::Data(format!("no schedule named `{n}`"))),
                Some(n) => vec![n],
                None => scenario.schedules.keys().cloned().collect(),
            };
            if names.is_empty() {
                return Err(Failure::Data("scenario defines no schedules".into()));
            }
            if names.len() > 1 && common.out.is_none() {
                return Err(Failure::Usage("several schedules defined; pass --name or --out".into()));
            }
            let mut artifacts = Vec::new();
            for n in names {
                let body = render_schedule(&scenario, &n, grid, format)?;
                artifacts.push(Artifact { stem: n, format, body });
            }
            (common, artifacts)
        }
        Command::SteadyState { common, grid } => {
            let format = pick_format(common.format, Format::Table, &[Format::Csv, Format::Json, Format::Table], "steady-state")?;
            let scenario = load(&common, stderr)?;
            let body = render_steady_states(&scenario, grid, format)?;
            (common, vec![Artifact { stem: "steady_state".into(), format, body }])
        }
        Command::Report(common) => {
            let format = pick_format(common.format, Format::Table, &[Format::Csv, Format::Json, Format::Table], "report")?;
            let scenario = load(&common, stderr)?;
            let outcome = scenario.policy.evaluate()?;
            let body = render_report(&outcome, format)?;
            (common, vec![Artifact { stem: "report".into(), format, body }])
        }
        Command::Sweep { common, param, grid } => {
            let format = pick_format(common.format, Format::Csv, &[Format::Csv, Format::Json], "sweep")?;
            let scenario = load(&common, stderr)?;
            let rows = sweep(&scenario.policy, param, &grid.points())?;
            let body = match format {
                Format::Json => json(&rows)?,
                _ => csv_rows(&rows)?,
            };
            (common, vec![Artifact { stem: format!("sweep_{}", param.name()), format, body }])
        }
        Command::Verify { common, seed } => {
            let format = pick_format(common.format, Format::Table, &[Format::Json, Format::Table], "verify")?;
            let scenario = load(&common, stderr)?;
            let list = verify(&scenario, seed.unwrap_or(DEFAULT_SEED));
            let body = match format {
                Format::Json => json(&list)?,
                _ => list.to_text(),
            };
            emit(&common, vec![Artifact { stem: "verify".into(), format, body }], stdout, stderr)?;
            return if list.all_passed() {
                Ok(())
            } else {
                Err(Failure::Numerical(format!("{} verification check(s) failed", list.failures())))
            };
        }
    };
    emit(&common, artifacts, stdout, stderr)
}

fn emit(common: &Common, artifacts: Vec<Artifact>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    match &common.out {
        None => {
            for a in artifacts {
                stdout.write_all(a.body.as_bytes())?;
            }
        }
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for a in artifacts {
                let path = output_path(dir, &a.stem, a.format);
                std::fs::write(&path, a.body)?;
                let _ = writeln!(stderr, "wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn output_path(dir: &Path, stem: &str, format: Format) -> PathBuf {
    dir.join(format!("{stem}.{}", format.extension()))
}

/// 17 significant digits.
fn full(x: f64) -> String {
    format!("{x:.16e}")
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Data(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_rows<T: Serialize>(rows: &[T]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::Data(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Data(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Left-aligned first column, right-aligned others.
fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut s = String::new();
        for (i, (c, w)) in cells.zip(&widths).enumerate() {
            if i == 0 {
                let _ = write!(s, "{c:<w$}");
            } else {
                let _ = write!(s, "  {c:>w$}");
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(&mut headers.iter().copied());
    out += &line(&mut widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str));
    for r in rows {
        out += &line(&mut r.iter().map(String::as_str));
    }
    out
}

fn num(x: f64) -> String {
    format!("{x:.6}")
}

#[derive(Debug, Serialize)]
struct ValuationRow {
    name: String,
    income_flow: f64,
    tax_rate: f64,
    discount_rate: f64,
    value: f64,
    tax_per_period: f64,
    captured_share: f64,
    annual_tax_rate: f64,
    flow_form_value: f64,
}

fn render_valuations(scenario: &Scenario, format: Format) -> Result<String, Failure> {
    let mut rows = Vec::new();
    for (name, v) in &scenario.file.valuations {
        rows.push(ValuationRow {
            name: name.clone(),
            income_flow: v.income_flow,
            tax_rate: v.tax_rate,
            discount_rate: v.discount_rate,
            value: v.value()?,
            tax_per_period: v.tax_per_period()?,
            captured_share: v.captured_share()?,
            annual_tax_rate: v.annual_tax_rate(),
            flow_form_value: v.value_with_flow()?,
        });
    }
    Ok(match format {
        Format::Json => json(&rows)?,
        Format::Csv => {
            let mut out = String::from("name,income_flow,tax_rate,discount_rate,value,tax_per_period,captured_share,annual_tax_rate,flow_form_value\n");
            for r in &rows {
                let nums = [r.income_flow, r.tax_rate, r.discount_rate, r.value, r.tax_per_period, r.captured_share, r.annual_tax_rate, r.flow_form_value];
                let _ = writeln!(out, "{},{}", r.name, nums.map(full).join(","));
            }
            out
        }
        Format::Table => table(
            &["valuation", "income", "tax rate", "discount", "value", "tax/period", "captured", "annual rate"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.name.clone(),
                        num(r.income_flow),
                        num(r.tax_rate),
                        num(r.discount_rate),
                        num(r.value),
                        num(r.tax_per_period),
                        num(r.captured_share),
                        format!("{}%", r.annual_tax_rate * 100.0),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    })
}

fn schedule_grid(scenario: &Scenario, name: &str, grid: Option<GridSpec>) -> Result<Vec<f64>, Failure> {
    scenario.grid_for(name, grid).ok_or_else(|| Failure::Data(format!("no schedule named `{name}`")))
}

/// Schedule table with columns `x, marginal, total, regime_flag`.
pub fn schedule_csv(rows: &[ScheduleRow]) -> String {
    let mut out = String::from("x,marginal,total,regime_flag\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", full(r.x), full(r.marginal), full(r.total), r.regime.as_str());
    }
    out
}

#[derive(Serialize)]
struct ScheduleDoc<'a> {
    schedule: &'a str,
    kind: &'static str,
    junction: Option<f64>,
    rows: Vec<ScheduleRow>,
}

fn render_schedule(scenario: &Scenario, name: &str, grid: Option<GridSpec>, format: Format) -> Result<String, Failure> {
    let s = scenario.schedule(name).ok_or_else(|| Failure::Data(format!("no schedule named `{name}`")))?;
    let points = schedule_grid(scenario, name, grid)?;
    let table_data = integrate_schedule(&s.params, &points)?;
    let rows = table_data.rows();
    Ok(match format {
        Format::Csv => schedule_csv(&rows),
        Format::Json => json(&ScheduleDoc { schedule: name, kind: s.params.kind.as_str(), junction: table_data.junction(), rows })?,
        Format::Table => table(
            &["x", "marginal", "total", "regime"],
            &rows.iter().map(|r| vec![num(r.x), num(r.marginal), num(r.total), r.regime.as_str().to_string()]).collect::<Vec<_>>(),
        ),
    })
}

#[derive(Serialize)]
struct SteadyStateRow {
    schedule: String,
    agent: String,
    #[serde(flatten)]
    state: SteadyState,
}

fn render_steady_states(scenario: &Scenario, grid: Option<GridSpec>, format: Format) -> Result<String, Failure> {
    let mut rows = Vec::new();
    for (sched, agents) in &scenario.file.agents {
        let params = &scenario.schedule(sched).expect("validated reference").params;
        let schedule = integrate_schedule(params, &schedule_grid(scenario, sched, grid)?)?;
        for a in agents {
            let state = solve_steady_state(a, &schedule).map_err(|e| Failure::from(e).prefixed(&format!("agent `{}`", a.name)))?;
            rows.push(SteadyStateRow { schedule: sched.clone(), agent: a.name.clone(), state });
        }
    }
    Ok(match format {
        Format::Json => json(&rows)?,
        Format::Csv => {
            let mut out = String::from("schedule,agent,c,k,s,prize,flow_utility,pv_utility,foc_residual,boundary\n");
            for r in &rows {
                let st = &r.state;
                let nums = [st.c, st.k, st.s, st.prize, st.flow_utility, st.pv_utility, st.foc_residual];
                let _ = writeln!(out, "{},{},{},{}", r.schedule, r.agent, nums.map(full).join(","), st.boundary);
            }
            out
        }
        Format::Table => table(
            &["agent", "schedule", "consumption", "wealth", "effort", "prize", "flow utility", "pv utility", "boundary"],
            &rows
                .iter()
                .map(|r| {
                    let st = &r.state;
                    vec![
                        r.agent.clone(),
                        r.schedule.clone(),
                        num(st.c),
                        num(st.k),
                        num(st.s),
                        num(st.prize),
                        num(st.flow_utility),
                        num(st.pv_utility),
                        st.boundary.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    })
}

impl Failure {
    fn prefixed(self, context: &str) -> Self {
        match self {
            Failure::Usage(m) => Failure::Usage(format!("{context}: {m}")),
            Failure::Data(m) => Failure::Data(format!("{context}: {m}")),
            Failure::Numerical(m) => Failure::Numerical(format!("{context}: {m}")),
        }
    }
}

#[derive(Serialize)]
struct AssetRow<'a> {
    asset: &'a str,
    category: &'static str,
    recurring_tax: f64,
    prize: f64,
    auction: f64,
    severance: f64,
    one_time_levy: f64,
    assessor_award: f64,
    residual_private_value: f64,
    abolished: bool,
}

fn render_report(outcome: &PolicyOutcome, format: Format) -> Result<String, Failure> {
    let assets: Vec<AssetRow> = outcome
        .results
        .iter()
        .map(|r| AssetRow {
            asset: &r.asset_id,
            category: r.category.as_str(),
            recurring_tax: r.recurring_tax_flow,
            prize: r.prize_paid,
            auction: r.revenue.auction,
            severance: r.revenue.severance,
            one_time_levy: r.revenue.one_time_levy,
            assessor_award: r.assessor_award,
            residual_private_value: r.residual_private_value,
            abolished: r.abolished,
        })
        .collect();
    match format {
        Format::Json => json(outcome),
        Format::Csv => csv_rows(&assets),
        Format::Table => {
            let mut out = table(
                &["asset", "category", "tax/period", "prize", "auction", "severance", "levy", "award/period"],
                &assets
                    .iter()
                    .map(|a| {
                        vec![
                            a.asset.to_string(),
                            a.category.to_string(),
                            num(a.recurring_tax),
                            num(a.prize),
                            num(a.auction),
                            num(a.severance),
                            num(a.one_time_levy),
                            num(a.assessor_award),
                        ]
                    })
                    .collect::<Vec<_>>(),
            );
            out.push('\n');
            let rep = &outcome.report;
            out += &table(
                &["category", "assets", "tax/period", "prizes", "auction", "severance", "levy", "awards/period"],
                &rep.by_category
                    .iter()
                    .map(|(cat, t)| (cat.as_str(), t))
                    .chain(std::iter::once(("total", &rep.totals)))
                    .map(|(name, t)| {
                        vec![
                            name.to_string(),
                            t.assets.to_string(),
                            num(t.property_tax_per_period),
                            num(t.prizes_paid),
                            num(t.auction),
                            num(t.severance),
                            num(t.one_time_levy),
                            num(t.assessor_awards_per_period),
                        ]
                    })
                    .collect::<Vec<_>>(),
            );
            out.push('\n');
            let _ = writeln!(out, "net recurring revenue per period: {}", num(rep.net_recurring_revenue_per_period));
            let _ = writeln!(out, "net one-time revenue:             {}", num(rep.net_lump_sum_revenue));
            if !rep.abolished.is_empty() {
                let _ = writeln!(out, "abolished: {}", rep.abolished.join(", "));
            }
            if let Some(w) = &rep.welfare {
                let _ = writeln!(out, "weighted one-time transfer:       {}", num(w.weighted_lump_sum_transfer));
                let _ = writeln!(out, "weighted recurring transfer:      {}", num(w.weighted_recurring_transfer));
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub parameter: &'static str,
    pub value: String,
    pub captured_share: String,
    pub property_tax_per_period: String,
    pub assessor_awards_per_period: String,
    pub prizes_paid: String,
    pub auction: String,
    pub severance: String,
    pub one_time_levy: String,
    pub net_recurring_per_period: String,
    pub net_lump_sum: String,
}

/// Evaluates the policy at each value of `param`. Points run concurrently;
/// rows come back in input order.
fn sweep(base: &PolicyScenario, param: SweepParam, values: &[f64]) -> Result<Vec<SweepRow>, Failure> {
    let eval = |&v: &f64| -> Result<SweepRow, Error> {
        let mut policy = base.clone();
        param.apply(&mut policy, v);
        let out = policy.evaluate()?;
        let c = &policy.config;
        let t = &out.report.totals;
        Ok(SweepRow {
            parameter: param.name(),
            value: full(v),
            captured_share: full(c.land_tax_rate / (c.land_tax_rate + c.discount_rate)),
            property_tax_per_period: full(t.property_tax_per_period),
            assessor_awards_per_period: full(t.assessor_awards_per_period),
            prizes_paid: full(t.prizes_paid),
            auction: full(t.auction),
            severance: full(t.severance),
            one_time_levy: full(t.one_time_levy),
            net_recurring_per_period: full(out.report.net_recurring_revenue_per_period),
            net_lump_sum: full(out.report.net_lump_sum_revenue),
        })
    };
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).clamp(1, values.len().max(1));
    let chunk = values.len().div_ceil(threads).max(1);
    let results: Vec<Result<SweepRow, Error>> = std::thread::scope(|scope| {
        let handles: Vec<_> = values.chunks(chunk).map(|c| scope.spawn(move || c.iter().map(eval).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    results
        .into_iter()
        .zip(values)
        .map(|(r, v)| r.map_err(|e| Failure::from(e).prefixed(&format!("{} = {v}", param.name()))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("assettax").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn table_aligns_columns() {
        let t = table(&["a", "bb"], &[vec!["xyz".into(), "1".into()]]);
        assert_eq!(t, "a    bb\n---  --\nxyz   1\n");
    }

    #[test]
    fn zero_point_grid_is_usage_error() {
        let (code, _, err) = run_args(&["schedule", "--name", "innovation", "--grid", "0:1:0"]);
        assert_eq!(code, 1, "{err}");
    }

    #[test]
    fn unsupported_format_is_usage_error() {
        let (code, _, _) = run_args(&["verify", "--format", "csv"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn missing_scenario_is_data_error() {
        let (code, _, err) = run_args(&["report", "--scenario", "/nonexistent/x.scenario"]);
        assert_eq!(code, 2);
        assert!(err.contains("cannot read"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("steady-state"));
    }
}
