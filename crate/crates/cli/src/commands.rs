use std::path::Path;

use copyro::analyze::{contour_grid, correlation_matrix, molar_ratios, AxisSpec};
use copyro::config::RunConfig;
use copyro::dataset::{
    load_csv_path, scan_csv_path, summarize, synthesize_dataset, write_csv, CoPyrolysisRecord,
    Field, RAW_INPUTS, RAW_INPUT_NAMES, YIELD_NAMES,
};
use copyro::evaluate::{cross_validate, select_best, CvReport};
use copyro::evolve::{default_constraints, optimize_copyrolysis, Bounds};
use copyro::featurize::{feature_labels, FeaturePipeline};
use copyro::models::{tune_hyperparameters, ModelKind, TrainedBundle};

use crate::output::Run;
use crate::{CliError, Command, PipelineArgs};

pub fn dispatch(command: Command, mut config: RunConfig) -> Result<(), CliError> {
    match &command {
        Command::Features { pipeline, .. }
        | Command::Train { pipeline, .. }
        | Command::Cv { pipeline, .. }
        | Command::Tune { pipeline, .. } => apply_pipeline(&mut config, pipeline),
        _ => {}
    }
    match command {
        Command::Validate { input } => validate(&input),
        Command::Stats { input, out } => {
            config.validate()?;
            stats(&config, &input, &out)
        }
        Command::Features {
            input,
            out,
            loadings,
            ..
        } => {
            config.validate()?;
            features(&config, &input, &out, loadings.as_deref())
        }
        Command::Correlate { input, out } => {
            config.validate()?;
            correlate(&config, &input, &out)
        }
        Command::Ratios { input, out } => {
            config.validate()?;
            ratios(&config, &input, &out)
        }
        Command::Train {
            input,
            model,
            out,
            no_tune,
            ..
        } => {
            if let Some(m) = model {
                config.set("model.kind", &m)?;
            }
            if no_tune {
                config.tune_enabled = false;
            }
            config.validate()?;
            train(&config, &input, &out)
        }
        Command::Cv {
            input,
            model,
            k,
            out,
            csv,
            fit_on_all,
            raw_metrics,
            no_tune,
            ..
        } => {
            if let Some(k) = k {
                config.cv_k = k;
            }
            config.cv_fit_on_all |= fit_on_all;
            config.cv_raw_metrics |= raw_metrics;
            if no_tune {
                config.tune_enabled = false;
            }
            let kinds = match model {
                Some(m) => parse_kinds(&m)?,
                None => vec![config.model_kind.parse()?],
            };
            config.validate()?;
            cv(&config, &input, &kinds, &out, csv.as_deref())
        }
        Command::Tune {
            input,
            model,
            output,
            out,
            ..
        } => {
            if let Some(m) = model {
                config.set("model.kind", &m)?;
            }
            config.validate()?;
            tune(&config, &input, &output, &out)
        }
        Command::Optimize { model, bounds, out } => {
            config.validate()?;
            optimize(&config, &model, bounds.as_deref(), &out)
        }
        Command::Contour {
            model,
            x,
            y,
            x_range,
            y_range,
            steps,
            fixed,
            out,
        } => {
            if let Some(s) = steps {
                config.contour_steps = s;
            }
            config.validate()?;
            contour(
                &config,
                &model,
                (&x, x_range.as_deref()),
                (&y, y_range.as_deref()),
                fixed.as_deref(),
                &out,
            )
        }
        Command::Synth { n, noise_sd, out } => {
            if let Some(n) = n {
                config.synth_n = n;
            }
            if let Some(s) = noise_sd {
                config.synth_noise_sd = s;
            }
            config.validate()?;
            synth(&config, &out)
        }
    }
}

fn apply_pipeline(config: &mut RunConfig, args: &PipelineArgs) {
    if args.no_standardize {
        config.pipeline.standardize = false;
    }
    if let Some(t) = args.variance_threshold {
        config.pipeline.variance_threshold = t;
    }
}

fn parse_kinds(text: &str) -> Result<Vec<ModelKind>, CliError> {
    if text.eq_ignore_ascii_case("all") {
        return Ok(ModelKind::ALL.to_vec());
    }
    let mut kinds = Vec::new();
    for part in text.split(',') {
        let kind: ModelKind = part.trim().parse()?;
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    Ok(kinds)
}

/// Quote a CSV cell when it needs it.
fn cell(text: &str) -> String {
    if text.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

fn load(run: &mut Run, input: &Path) -> Result<Vec<CoPyrolysisRecord>, CliError> {
    run.input(input)?;
    Ok(load_csv_path(input)?)
}

fn to_json(value: &impl serde::Serialize) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serialisable output");
    bytes.push(b'\n');
    bytes
}

fn validate(input: &Path) -> Result<(), CliError> {
    let scan = scan_csv_path(input)?;
    for v in &scan.violations {
        eprintln!("{v}");
    }
    println!("{} records, {} violations", scan.rows(), scan.violations.len());
    if scan.violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::User(format!(
            "{} of {} rows failed validation",
            scan.violations.len(),
            scan.rows()
        )))
    }
}

fn stats(config: &RunConfig, input: &Path, out: &Path) -> Result<(), CliError> {
    let mut run = Run::new("stats", config);
    let records = load(&mut run, input)?;
    let mut text = String::from("field,count,min,q1,median,q3,max,mean\n");
    for field in Field::all() {
        match summarize(&records, field) {
            Ok(s) => text.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                field.name(),
                s.count,
                s.min,
                s.q1,
                s.median,
                s.q3,
                s.max,
                s.mean
            )),
            Err(copyro::Error::EmptyDataset) => {
                text.push_str(&format!("{},0,,,,,,\n", field.name()))
            }
            Err(e) => return Err(e.into()),
        }
    }
    run.write(out, text.as_bytes())?;
    run.finish()
}

fn features(
    config: &RunConfig,
    input: &Path,
    out: &Path,
    loadings: Option<&Path>,
) -> Result<(), CliError> {
    let mut run = Run::new("features", config);
    let records = load(&mut run, input)?;
    let pipeline = FeaturePipeline::fit(&records, config.pipeline)?;
    let scores = pipeline.transform_inputs(&records)?;
    let m = pipeline.width();
    let mut text = String::from("id");
    for c in 0..m {
        text.push_str(&format!(",pc{}", c + 1));
    }
    text.push('\n');
    for (i, r) in records.iter().enumerate() {
        text.push_str(&cell(&r.id));
        for c in 0..m {
            text.push_str(&format!(",{}", scores[(i, c)]));
        }
        text.push('\n');
    }
    run.detail("components", m);
    run.detail("pipeline_fingerprint", pipeline.fingerprint());
    run.write(out, text.as_bytes())?;
    if let Some(path) = loadings {
        let mut text = String::from("feature");
        for c in 0..m {
            text.push_str(&format!(",pc{}", c + 1));
        }
        text.push('\n');
        for (label, row) in feature_labels().iter().zip(&pipeline.pca.loadings) {
            text.push_str(label);
            for v in row {
                text.push_str(&format!(",{v}"));
            }
            text.push('\n');
        }
        text.push_str("explained_variance_ratio");
        for v in &pipeline.pca.explained_variance_ratio {
            text.push_str(&format!(",{v}"));
        }
        text.push('\n');
        run.write(path, text.as_bytes())?;
    }
    run.finish()
}

fn correlate(config: &RunConfig, input: &Path, out: &Path) -> Result<(), CliError> {
    let mut run = Run::new("correlate", config);
    let records = load(&mut run, input)?;
    let matrix = correlation_matrix(&records)?;
    run.write(out, matrix.to_csv().as_bytes())?;
    run.finish()
}

fn ratios(config: &RunConfig, input: &Path, out: &Path) -> Result<(), CliError> {
    let mut run = Run::new("ratios", config);
    let records = load(&mut run, input)?;
    let mut text = String::from("id,feedstock,o_c,n_c,h_c_eff\n");
    for r in &records {
        for (name, comp) in [("biomass", &r.biomass), ("polymer", &r.polymer)] {
            match molar_ratios(comp) {
                Ok(p) => text.push_str(&format!(
                    "{},{name},{},{},{}\n",
                    cell(&r.id),
                    p.o_c,
                    p.n_c,
                    p.h_c_eff
                )),
                Err(copyro::Error::ZeroCarbon) => {
                    text.push_str(&format!("{},{name},NA,NA,NA\n", cell(&r.id)))
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    run.write(out, text.as_bytes())?;
    run.finish()
}

fn train(config: &RunConfig, input: &Path, out: &Path) -> Result<(), CliError> {
    let mut run = Run::new("train", config);
    let records = load(&mut run, input)?;
    let kind: ModelKind = config.model_kind.parse()?;
    let tuning = config.tune_enabled.then(|| config.tune_options());
    let bundle = TrainedBundle::train_kind(
        kind,
        &records,
        config.pipeline,
        tuning.as_ref(),
        copyro::rng::substream_seed(config.seed, "model"),
    )?;
    run.detail("kind", kind);
    run.detail("pipeline_fingerprint", &bundle.pipeline_fingerprint);
    run.detail("components", bundle.pipeline.width());
    let mut json = bundle.to_json().into_bytes();
    json.push(b'\n');
    run.write(out, &json)?;
    run.finish()
}

fn cv(
    config: &RunConfig,
    input: &Path,
    kinds: &[ModelKind],
    out: &Path,
    csv: Option<&Path>,
) -> Result<(), CliError> {
    let mut run = Run::new("cv", config);
    let records = load(&mut run, input)?;
    let options = config.cv_options();
    let reports = kinds
        .iter()
        .map(|k| cross_validate(*k, &records, &options))
        .collect::<copyro::Result<Vec<CvReport>>>()?;
    if let [report] = reports.as_slice() {
        run.write(out, &to_json(report))?;
    } else {
        let selection = select_best(&reports)?;
        run.detail("selected", selection.kind);
        run.write(
            out,
            &to_json(&serde_json::json!({
                "reports": reports,
                "selection": selection,
            })),
        )?;
    }
    if let Some(path) = csv {
        let mut text = String::new();
        for (i, r) in reports.iter().enumerate() {
            for (j, line) in r.to_csv().lines().enumerate() {
                if j == 0 {
                    if i == 0 {
                        text.push_str("model,");
                        text.push_str(line);
                        text.push('\n');
                    }
                    continue;
                }
                text.push_str(&format!("{},{line}\n", r.kind));
            }
        }
        run.write(path, text.as_bytes())?;
    }
    run.finish()
}

fn tune(config: &RunConfig, input: &Path, output: &str, out: &Path) -> Result<(), CliError> {
    let mut run = Run::new("tune", config);
    let records = load(&mut run, input)?;
    let kind: ModelKind = config.model_kind.parse()?;
    let column = ["oil", "char", "syngas"]
        .iter()
        .position(|n| output.eq_ignore_ascii_case(n) || YIELD_NAMES.contains(&output))
        .map(|i| {
            YIELD_NAMES
                .iter()
                .position(|n| *n == output)
                .unwrap_or(i)
        })
        .ok_or_else(|| {
            CliError::User(format!("--output must be oil, char or syngas, got `{output}`"))
        })?;
    let result = tune_hyperparameters(
        kind,
        &records,
        column,
        config.pipeline,
        &config.tune_options(),
    )?;
    run.detail("evaluations", result.evaluations);
    run.write(out, &to_json(&result))?;
    run.finish()
}

fn parse_bounds(path: &Path, bounds: &mut Bounds) -> Result<(), CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::User(format!("{}: {e}", path.display())))?;
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (n == 0 && line.starts_with("column")) {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || CliError::User(format!("{} line {}: expected column,lo,hi", path.display(), n + 1));
        if parts.len() != 3 {
            return Err(bad());
        }
        let idx = RAW_INPUT_NAMES
            .iter()
            .position(|c| *c == parts[0])
            .ok_or_else(|| CliError::User(format!("unknown input column `{}`", parts[0])))?;
        bounds.lo[idx] = parts[1].parse().map_err(|_| bad())?;
        bounds.hi[idx] = parts[2].parse().map_err(|_| bad())?;
    }
    Ok(())
}

fn optimize(
    config: &RunConfig,
    model: &Path,
    bounds_file: Option<&Path>,
    out: &Path,
) -> Result<(), CliError> {
    let mut run = Run::new("optimize", config);
    run.input(model)?;
    let bundle = TrainedBundle::load(model)?;
    let mut bounds = Bounds {
        lo: bundle.input_lo.clone(),
        hi: bundle.input_hi.clone(),
    };
    if let Some(path) = bounds_file {
        run.input(path)?;
        parse_bounds(path, &mut bounds)?;
    }
    let constraints = default_constraints(bounds)?;
    let mopso = config.mopso_config();
    let report = optimize_copyrolysis(&bundle, &constraints, &mopso)?;
    let mut text = String::from("rank,");
    text.push_str(&RAW_INPUT_NAMES.join(","));
    text.push(',');
    text.push_str(&YIELD_NAMES.join(","));
    text.push('\n');
    for (i, s) in report.solutions.iter().enumerate() {
        text.push_str(&(i + 1).to_string());
        for v in s.inputs.iter().chain(&s.yields) {
            text.push_str(&format!(",{v}"));
        }
        text.push('\n');
    }
    run.detail("evaluations", report.evaluations);
    run.detail("pareto_members", report.solutions.len());
    run.detail("mopso", mopso);
    run.write(out, text.as_bytes())?;
    run.finish()
}

fn axis(
    bundle: &TrainedBundle,
    name: &str,
    range: Option<&str>,
    steps: usize,
) -> Result<AxisSpec, CliError> {
    let index = RAW_INPUT_NAMES
        .iter()
        .position(|c| *c == name)
        .ok_or_else(|| CliError::User(format!("unknown input column `{name}`")))?;
    let (lo, hi) = match range {
        Some(r) => {
            let (a, b) = r
                .split_once(':')
                .ok_or_else(|| CliError::User(format!("range `{r}` must be lo:hi")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::User(format!("range `{r}` must be lo:hi")))
            };
            (parse(a)?, parse(b)?)
        }
        None => (bundle.input_lo[index], bundle.input_hi[index]),
    };
    Ok(AxisSpec::new(index, lo, hi, steps)?)
}

fn contour(
    config: &RunConfig,
    model: &Path,
    x: (&str, Option<&str>),
    y: (&str, Option<&str>),
    fixed: Option<&str>,
    out: &Path,
) -> Result<(), CliError> {
    let mut run = Run::new("contour", config);
    run.input(model)?;
    let bundle = TrainedBundle::load(model)?;
    let fixed: Vec<f64> = match fixed {
        Some(text) => text
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::User(format!("--fixed value `{v}` is not a number")))
            })
            .collect::<Result<_, _>>()?,
        None => bundle.input_median.clone(),
    };
    if fixed.len() != RAW_INPUTS {
        return Err(CliError::User(format!(
            "--fixed needs {RAW_INPUTS} values, got {}",
            fixed.len()
        )));
    }
    let grid = contour_grid(
        &bundle,
        axis(&bundle, x.0, x.1, config.contour_steps)?,
        axis(&bundle, y.0, y.1, config.contour_steps)?,
        &fixed,
    )?;
    run.write(out, grid.to_csv().as_bytes())?;
    run.finish()
}

fn synth(config: &RunConfig, out: &Path) -> Result<(), CliError> {
    let mut run = Run::new("synth", config);
    let records = synthesize_dataset(config.synth_n, config.seed, config.synth_noise_sd);
    let mut bytes = Vec::new();
    write_csv(&records, &mut bytes)?;
    run.detail("records", records.len());
    run.write(out, &bytes)?;
    run.finish()
}
