//! One function per subcommand, each producing a [`Report`].

use std::fmt::Display;

use clap::ValueEnum;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use ghz_core::dynamics::{generate_triplet, OscillatorParams};
use ghz_core::ghz::{evaluate_f, lhv_optimum, scan_point, Arrangement, GhzResult, ScanGrid, ScanPoint};
use ghz_core::homodyne::{
    efficiency_threshold, f_at_efficiency, octant_probabilities, smeared_octants, EfficiencyModel, LossModel,
    MonteCarloF, QuadratureMethod, ShotSampler, ShotSummary,
};
use ghz_core::measurement::{AngleAssignment, OutcomeTable};
use ghz_core::phase::{joint_phase_table, uniform_binned_table, Binning};
use ghz_core::TripletState;

use crate::args::*;
use crate::error::{CliError, Result};
use crate::parse::{BinMap, StateSpec};
use crate::report::{columns, Cell, Report};

/// Ordered `key=value` pairs echoed into every output. Keys are flag names,
/// so the echo can be fed back through `--config`.
#[derive(Debug, Default)]
struct Echo(Vec<(String, String)>);

impl Echo {
    fn new(command: &str) -> Self {
        let mut e = Echo::default();
        e.set("command", command);
        e.set("version", env!("CARGO_PKG_VERSION"));
        e
    }

    fn set(&mut self, key: &str, value: impl Display) {
        self.0.push((key.to_string(), value.to_string()));
    }

    fn set_enum<E: ValueEnum>(&mut self, key: &str, value: E) {
        let v = value.to_possible_value().expect("no skipped variants");
        self.set(key, v.get_name());
    }

    fn join(values: &[f64]) -> String {
        values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    }

    fn state(&mut self, spec: StateSpec) {
        match spec {
            StateSpec::C0(c0) => self.set("c0", c0),
            other => self.set("state", other),
        }
    }

    fn arrangement(&mut self, a: &ArrangementArgs, arr: &Arrangement) {
        self.set_enum("arrangement", a.arrangement);
        self.set("x-angle", arr.x_angle());
        self.set("y-angle", arr.y_angle());
    }

    fn output(&mut self, o: &OutputArgs) {
        self.set_enum("format", o.format);
        self.set("seed", o.seed);
    }

    fn into_pairs(self) -> Vec<(String, String)> {
        self.0
    }
}

pub fn resolve_state(spec: StateSpec) -> Result<TripletState> {
    Ok(match spec {
        StateSpec::Maximal => TripletState::maximal(),
        StateSpec::C0(c0) => TripletState::from_c0(c0)?,
        StateSpec::Evolve { chi_t } => generate_triplet(&OscillatorParams::at(chi_t))?.triplet()?,
    })
}

pub fn resolve_arrangement(a: &ArrangementArgs) -> Arrangement {
    let base = match a.arrangement {
        ArrangementArg::Eq14 => Arrangement::triplet(),
        ArrangementArg::Eq1 => Arrangement::mermin(),
    };
    let x = a.x_angle.unwrap_or(base.x_angle());
    let y = a.y_angle.unwrap_or(base.y_angle());
    base.with_angles(x, y)
}

fn loss_model(l: LossArg) -> LossModel {
    match l {
        LossArg::Beamsplitter => LossModel::Beamsplitter,
        LossArg::DetectorFailure => LossModel::DetectorFailure,
    }
}

fn method(m: MethodArg) -> QuadratureMethod {
    match m {
        MethodArg::ClosedForm => QuadratureMethod::ClosedForm,
        MethodArg::Quadrature => QuadratureMethod::Quadrature,
    }
}

fn binning(p: &PhaseArgs) -> Result<Binning> {
    Ok(match &p.binning {
        Some(b) => Binning::new(&b.0)?,
        None => Binning::contiguous_halves(p.s)?,
    })
}

fn bin_map(b: &Binning) -> BinMap {
    BinMap((0..=b.s()).map(|mu| b.outcome(mu).bit()).collect())
}

fn result_cells(r: &GhzResult) -> Vec<Cell> {
    let mut cells: Vec<Cell> = r.terms.iter().map(|&v| v.into()).collect();
    cells.push(r.f.into());
    cells
}

fn state_cells(t: &TripletState) -> [Cell; 2] {
    [t.c0().re.into(), t.c1().re.into()]
}

/// Discrete-phase correlation; the plain binary measurement uses the closed form.
fn discrete_correlation(
    phase: &PhaseArgs,
) -> Result<impl Fn(&TripletState, &AngleAssignment) -> ghz_core::Result<f64> + Sync> {
    let b = binning(phase)?;
    let closed = phase.s == 1 && b == Binning::identity();
    let s = phase.s;
    Ok(move |t: &TripletState, a: &AngleAssignment| {
        if closed {
            Ok(joint_phase_table(t, a).correlation())
        } else {
            Ok(uniform_binned_table(t, a, s, &b)?.correlation())
        }
    })
}

fn homodyne_table(
    t: &TripletState,
    a: &AngleAssignment,
    model: &EfficiencyModel,
    m: QuadratureMethod,
) -> ghz_core::Result<OutcomeTable> {
    if model.is_ideal() {
        octant_probabilities(t, a, m)
    } else {
        smeared_octants(t, a, model, m)
    }
}

fn evaluate_at(
    arr: &Arrangement,
    t: &TripletState,
    offsets: [f64; 3],
    corr: impl Fn(&TripletState, &AngleAssignment) -> ghz_core::Result<f64>,
) -> Result<GhzResult> {
    Ok(evaluate_f(arr, |a| corr(t, &a.shifted(offsets)))?)
}

pub fn discrete(a: &DiscreteArgs) -> Result<Report> {
    let spec = a.state.spec();
    let t = resolve_state(spec)?;
    let arr = resolve_arrangement(&a.arrangement);
    let offsets = a.angles.offsets();
    let b = binning(&a.phase)?;
    let corr = discrete_correlation(&a.phase)?;
    let r = evaluate_at(&arr, &t, offsets, corr)?;

    let mut echo = Echo::new("discrete");
    echo.state(spec);
    echo.arrangement(&a.arrangement, &arr);
    echo.set("thetas", Echo::join(&offsets));
    echo.set("s", a.phase.s);
    echo.set("binning", bin_map(&b));
    echo.output(&a.output);

    let mut report = Report::new(echo.into_pairs(), columns(&["c0", "c1", "s"], false));
    let mut row: Vec<Cell> = state_cells(&t).into();
    row.push(a.phase.s.into());
    row.extend(result_cells(&r));
    row.extend([0usize.into(), a.output.seed.into()]);
    report.push(row);
    Ok(report)
}

pub fn homodyne(a: &HomodyneArgs) -> Result<Report> {
    let spec = a.state.spec();
    let t = resolve_state(spec)?;
    let arr = resolve_arrangement(&a.arrangement);
    let offsets = a.angles.offsets();
    let model = EfficiencyModel::new(a.efficiency.eta, loss_model(a.efficiency.loss))?;
    let m = method(a.method);
    let r = evaluate_at(&arr, &t, offsets, |t, ang| {
        Ok(homodyne_table(t, ang, &model, m)?.correlation())
    })?;

    let mut echo = Echo::new("homodyne");
    echo.state(spec);
    echo.arrangement(&a.arrangement, &arr);
    echo.set("thetas", Echo::join(&offsets));
    echo.set("eta", a.efficiency.eta);
    echo.set_enum("loss", a.efficiency.loss);
    echo.set_enum("method", a.method);
    echo.output(&a.output);

    let mut report = Report::new(echo.into_pairs(), columns(&["c0", "c1", "eta"], false));
    let mut row: Vec<Cell> = state_cells(&t).into();
    row.push(a.efficiency.eta.into());
    row.extend(result_cells(&r));
    row.extend([0usize.into(), a.output.seed.into()]);
    report.push(row);
    Ok(report)
}

pub fn evolve(a: &EvolveArgs) -> Result<Report> {
    if a.chi_t.is_empty() {
        return Err(CliError::config("--chi-t needs at least one value"));
    }
    let arr = resolve_arrangement(&a.arrangement);

    let mut echo = Echo::new("evolve");
    echo.set("chi-t", Echo::join(&a.chi_t));
    echo.set("dims", format!("{}x{}x{}", a.dims[0], a.dims[1], a.dims[2]));
    echo.arrangement(&a.arrangement, &arr);
    echo.output(&a.output);

    let mut report = Report::new(
        echo.into_pairs(),
        columns(&["chi_t", "c0", "c1", "p001", "leakage"], false),
    );
    for &chi_t in &a.chi_t {
        let p = generate_triplet(&OscillatorParams::at(chi_t).with_dims(a.dims))?;
        let t = p.triplet()?;
        let r = evaluate_f(&arr, |ang| Ok(joint_phase_table(&t, ang).correlation()))?;
        let mut row: Vec<Cell> = vec![
            chi_t.into(),
            p.c0.re.into(),
            p.c1.re.into(),
            p.c0.norm_sqr().into(),
            p.residual.into(),
        ];
        row.extend(result_cells(&r));
        row.extend([0usize.into(), a.output.seed.into()]);
        report.push(row);
    }
    Ok(report)
}

pub fn lhv(a: &LhvArgs) -> Result<Report> {
    let arr = resolve_arrangement(&ArrangementArgs {
        arrangement: a.arrangement,
        x_angle: None,
        y_angle: None,
    });
    let opt = lhv_optimum(&arr);

    let mut echo = Echo::new("lhv");
    echo.set_enum("arrangement", a.arrangement);
    echo.output(&a.output);

    let form: Vec<String> = arr.terms().iter().map(|t| t.to_string()).collect();
    // x and y values per mode, e.g. "++,+-,-+".
    let strategy: Vec<String> = opt
        .strategy
        .values
        .iter()
        .map(|v| v.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect())
        .collect();
    let mut report = Report::new(echo.into_pairs(), columns(&["form", "strategy"], false));
    let mut row: Vec<Cell> = vec![form.join(" ").as_str().into(), strategy.join(",").as_str().into()];
    row.extend(opt.terms.map(Cell::from));
    row.push(opt.f_max.into());
    row.extend([0usize.into(), a.output.seed.into()]);
    report.push(row);
    Ok(report)
}

pub fn threshold(a: &ThresholdArgs) -> Result<Report> {
    let spec = a.state.spec();
    let t = resolve_state(spec)?;
    let arr = resolve_arrangement(&a.arrangement);
    let loss = loss_model(a.loss);
    let m = method(a.method);
    let th = efficiency_threshold(&t, &arr, loss, m)?;
    // Without a crossing the terms are reported at eta = 1.
    let eta_at = th.eta_star().unwrap_or(1.0);
    let r = f_at_efficiency(&t, &arr, &EfficiencyModel::new(eta_at, loss)?, m)?;

    let mut echo = Echo::new("threshold");
    echo.state(spec);
    echo.arrangement(&a.arrangement, &arr);
    echo.set_enum("loss", a.loss);
    echo.set_enum("method", a.method);
    echo.output(&a.output);

    let mut report = Report::new(
        echo.into_pairs(),
        columns(&["c0", "c1", "loss", "ideal_F", "eta_star"], false),
    );
    let mut row: Vec<Cell> = state_cells(&t).into();
    row.push(loss.name().into());
    row.push(th.ideal_f().into());
    row.push(th.eta_star().into());
    row.extend(result_cells(&r));
    row.extend([0usize.into(), a.output.seed.into()]);
    report.push(row);
    Ok(report)
}

/// Samples every (setting, block) pair in parallel. Each block has its own
/// RNG stream, so the counts do not depend on the thread count.
pub fn sample_f(
    t: &TripletState,
    arr: &Arrangement,
    offsets: [f64; 3],
    model: &EfficiencyModel,
    n_shots: usize,
    seed: u64,
) -> Result<MonteCarloF> {
    if n_shots == 0 {
        return Err(CliError::config("--n-shots must be at least 1"));
    }
    let samplers: Vec<ShotSampler> = (0..4)
        .map(|k| {
            ShotSampler::new(*t, arr.assignment(k).shifted(offsets), *model, seed).with_setting(k as u32)
        })
        .collect();
    let blocks = ShotSampler::block_count(n_shots);
    let parts: Vec<(usize, ShotSummary)> = (0..4 * blocks)
        .into_par_iter()
        .map(|j| {
            let (k, b) = (j / blocks, j % blocks);
            let records = samplers[k].block(b as u64, ShotSampler::block_len(b, n_shots));
            (k, ShotSummary::from_records(&records))
        })
        .collect();
    let mut summaries = [ShotSummary::default(); 4];
    for (k, s) in &parts {
        summaries[*k].merge(s);
    }
    Ok(MonteCarloF::from_summaries(arr, summaries, n_shots, seed))
}

/// Pearson statistic and p-value (7 degrees of freedom) for each setting.
pub fn goodness_of_fit(
    mc: &MonteCarloF,
    t: &TripletState,
    arr: &Arrangement,
    offsets: [f64; 3],
    model: &EfficiencyModel,
) -> Result<Vec<(f64, f64)>> {
    let dist = ChiSquared::new(7.0).expect("positive degrees of freedom");
    (0..4)
        .map(|k| {
            let expected = smeared_octants(t, &arr.assignment(k).shifted(offsets), model, QuadratureMethod::ClosedForm)?;
            let chi2 = mc.summaries[k].chi_square(&expected);
            Ok((chi2, dist.sf(chi2)))
        })
        .collect()
}

pub fn sample(a: &SampleArgs) -> Result<Report> {
    let spec = a.state.spec();
    let t = resolve_state(spec)?;
    let arr = resolve_arrangement(&a.arrangement);
    let offsets = a.angles.offsets();
    let model = EfficiencyModel::new(a.efficiency.eta, loss_model(a.efficiency.loss))?;
    let mc = sample_f(&t, &arr, offsets, &model, a.n_shots, a.output.seed)?;
    let fits = goodness_of_fit(&mc, &t, &arr, offsets, &model)?;
    let chi2_max = fits.iter().map(|f| f.0).fold(0.0, f64::max);
    let p_min = fits.iter().map(|f| f.1).fold(1.0, f64::min);

    let mut echo = Echo::new("sample");
    echo.state(spec);
    echo.arrangement(&a.arrangement, &arr);
    echo.set("thetas", Echo::join(&offsets));
    echo.set("eta", a.efficiency.eta);
    echo.set_enum("loss", a.efficiency.loss);
    echo.set("n-shots", a.n_shots);
    echo.output(&a.output);

    let mut report = Report::new(
        echo.into_pairs(),
        columns(&["c0", "c1", "eta", "chi2_max", "chi2_p_min"], true),
    );
    let mut row: Vec<Cell> = state_cells(&t).into();
    row.extend([a.efficiency.eta.into(), chi2_max.into(), p_min.into()]);
    row.extend(result_cells(&mc.result));
    row.push(mc.stderr_f.into());
    row.extend([a.n_shots.into(), a.output.seed.into()]);
    report.push(row);
    Ok(report)
}

pub fn scan(a: &ScanArgs) -> Result<Report> {
    let c0 = if a.c0_values.is_empty() {
        ScanGrid::linspace(a.c0_start, a.c0_stop, a.points)
    } else {
        a.c0_values.clone()
    };
    let offsets = a.angles.offsets();
    let grid = ScanGrid {
        c0,
        offsets: vec![offsets],
    };
    if grid.is_empty() {
        return Err(CliError::config("scan grid is empty"));
    }
    let arr = resolve_arrangement(&a.arrangement);
    let points: Vec<ScanPoint> = grid.points().collect();

    let mut echo = Echo::new("scan");
    if a.c0_values.is_empty() {
        echo.set("c0-start", a.c0_start);
        echo.set("c0-stop", a.c0_stop);
        echo.set("points", a.points);
    } else {
        echo.set("c0", Echo::join(&a.c0_values));
    }
    echo.set_enum("measurement", a.measurement);
    echo.arrangement(&a.arrangement, &arr);
    echo.set("thetas", Echo::join(&offsets));

    let rows: Vec<_> = match a.measurement {
        MeasurementArg::Discrete => {
            let b = binning(&a.phase)?;
            echo.set("s", a.phase.s);
            echo.set("binning", bin_map(&b));
            let corr = discrete_correlation(&a.phase)?;
            points
                .par_iter()
                .map(|&p| scan_point(&arr, p, &corr))
                .collect::<ghz_core::Result<_>>()?
        }
        MeasurementArg::Homodyne => {
            let model = EfficiencyModel::new(a.efficiency.eta, loss_model(a.efficiency.loss))?;
            let m = method(a.method);
            echo.set("eta", a.efficiency.eta);
            echo.set_enum("loss", a.efficiency.loss);
            echo.set_enum("method", a.method);
            let corr = |t: &TripletState, ang: &AngleAssignment| Ok(homodyne_table(t, ang, &model, m)?.correlation());
            points
                .par_iter()
                .map(|&p| scan_point(&arr, p, &corr))
                .collect::<ghz_core::Result<_>>()?
        }
    };
    echo.output(&a.output);

    let mut report = Report::new(echo.into_pairs(), columns(&["c0", "c1"], false));
    for r in rows {
        let mut row: Vec<Cell> = vec![r.point.c0.into()];
        row.push(r.state.c1().re.into());
        row.extend(result_cells(&r.result));
        row.extend([0usize.into(), a.output.seed.into()]);
        report.push(row);
    }
    Ok(report)
}

pub fn dispatch(c: &Command) -> Result<Report> {
    match c {
        Command::Discrete(a) => discrete(a),
        Command::Homodyne(a) => homodyne(a),
        Command::Evolve(a) => evolve(a),
        Command::Lhv(a) => lhv(a),
        Command::Threshold(a) => threshold(a),
        Command::Sample(a) => sample(a),
        Command::Scan(a) => scan(a),
    }
}

pub fn output_args(c: &Command) -> &OutputArgs {
    match c {
        Command::Discrete(a) => &a.output,
        Command::Homodyne(a) => &a.output,
        Command::Evolve(a) => &a.output,
        Command::Lhv(a) => &a.output,
        Command::Threshold(a) => &a.output,
        Command::Sample(a) => &a.output,
        Command::Scan(a) => &a.output,
    }
}
