use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, Context};
use fmdt_core::dataset::{ColumnRole, ColumnSpec};
use fmdt_core::pit::fit_tables;
use fmdt_core::{
    cross_validate, load_csv, CsvOptions, CvOptions, Dataset, FmdtModel, FuzzyPartition,
    Hyperparameters, SchemaSpec,
};

use crate::{Command, CvArgs, DataArgs, Failure, ModelArgs, PartitionArgs, PredictArgs, TrainArgs};

pub fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Partition(args) => partition(args),
        Command::Train(args) => train(args),
        Command::Predict(args) => predict(args),
        Command::Cv(args) => cv(args),
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure::Usage(anyhow!(message.into()))
}

fn require_file(path: &Path, what: &str) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(format!("{what} file '{}' not found", path.display())))
    }
}

fn check_hyperparameters(model: &ModelArgs) -> Result<Hyperparameters, Failure> {
    let hp = model.hyperparameters();
    hp.validate().map_err(|e| Failure::Usage(e.into()))?;
    if model.max_bins.is_some() {
        eprintln!("warning: --max-bins has no effect; --fuzzy-sets sets the partition granularity");
    }
    Ok(hp)
}

fn read_spec(data: &DataArgs) -> Result<SchemaSpec, Failure> {
    require_file(&data.data, "data")?;
    require_file(&data.schema, "schema")?;
    SchemaSpec::from_file(&data.schema).map_err(|e| Failure::Usage(e.into()))
}

fn load(data: &DataArgs, spec: &SchemaSpec) -> Result<Dataset, Failure> {
    let options = CsvOptions {
        has_header: data.header,
    };
    load_csv(&data.data, spec, options)
        .with_context(|| format!("reading {}", data.data.display()))
        .map_err(Failure::Runtime)
}

/// File at `path`, or stdout when no path is given.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn partition(args: PartitionArgs) -> Result<(), Failure> {
    if args.fuzzy_sets < 2 {
        return Err(usage("--fuzzy-sets must be at least 2"));
    }
    if args.quantiles < 2 {
        return Err(usage("--quantiles must be at least 2"));
    }
    let spec = read_spec(&args.data)?;
    let ds = load(&args.data, &spec)?;
    let tables = fit_tables(&ds, args.quantiles)?;

    let mut out = csv::Writer::from_writer(sink(args.output.as_deref())?);
    out.write_record([
        "attribute",
        "set_index",
        "left",
        "core",
        "right",
        "left_orig",
        "core_orig",
        "right_orig",
    ])?;
    for table in &tables {
        let name = &ds.schema()[table.attribute_index].name;
        if table.is_degenerate() {
            eprintln!(
                "warning: attribute '{name}' is constant; its quantile table has a single anchor"
            );
        }
        let partition = FuzzyPartition::uniform(table.attribute_index, args.fuzzy_sets)?;
        let original = partition.map_to_original(table)?;
        for (j, (set, orig)) in partition.sets().iter().zip(&original).enumerate() {
            let mut record = vec![name.clone(), j.to_string()];
            record.extend([set.left, set.core, set.right].iter().map(f64::to_string));
            record.extend(orig.iter().map(f64::to_string));
            out.write_record(&record)?;
        }
    }
    out.flush()?;

    if let Some(path) = &args.tables {
        let text = serde_json::to_string_pretty(&tables)?;
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn train(args: TrainArgs) -> Result<(), Failure> {
    let hp = check_hyperparameters(&args.model)?;
    let spec = read_spec(&args.data)?;
    let ds = load(&args.data, &spec)?;
    let (model, timings) = FmdtModel::train_timed(&ds, &hp)?;
    model
        .save(&args.output)
        .with_context(|| format!("writing {}", args.output.display()))?;

    let c = model.complexity();
    println!("model        {}", args.output.display());
    println!("rows         {}", ds.num_rows());
    println!("leaves       {}", c.leaf_count);
    println!("avg depth    {:.2}", c.avg_depth);
    println!("avg sets     {:.2}", c.avg_fuzzy_sets);
    println!("partitioning {:.3} s", timings.partitioning.as_secs_f64());
    println!("learning     {:.3} s", timings.learning.as_secs_f64());
    println!("total        {:.3} s", timings.total().as_secs_f64());
    Ok(())
}

/// Schema matching the model: its attributes, then the class column.
fn model_spec(model: &FmdtModel) -> SchemaSpec {
    let mut columns: Vec<ColumnSpec> = model
        .schema()
        .iter()
        .map(|a| ColumnSpec {
            name: a.name.clone(),
            role: ColumnRole::Attribute(a.kind.clone()),
        })
        .collect();
    columns.push(ColumnSpec {
        name: "class".into(),
        role: ColumnRole::Class(Some(model.class_labels().to_vec())),
    });
    SchemaSpec { columns }
}

fn predict(args: PredictArgs) -> Result<(), Failure> {
    require_file(&args.model, "model")?;
    require_file(&args.data, "data")?;
    let mut spec = match &args.schema {
        Some(path) => {
            require_file(path, "schema")?;
            SchemaSpec::from_file(path).map_err(|e| Failure::Usage(e.into()))?
        }
        None => SchemaSpec {
            columns: Vec::new(),
        },
    };
    let model = FmdtModel::load(&args.model)
        .with_context(|| format!("reading {}", args.model.display()))?;
    if spec.columns.is_empty() {
        spec = model_spec(&model);
    }
    // undeclared labels come from the model, not from whatever the file holds
    let declared = spec
        .columns
        .iter_mut()
        .find(|c| matches!(c.role, ColumnRole::Class(_)));
    match declared {
        Some(ColumnSpec {
            role: ColumnRole::Class(labels @ None),
            ..
        }) => {
            *labels = Some(model.class_labels().to_vec());
        }
        Some(_) => {}
        None => spec.columns.push(ColumnSpec {
            name: "class".into(),
            role: ColumnRole::Class(Some(model.class_labels().to_vec())),
        }),
    }

    let options = CsvOptions {
        has_header: args.header,
    };
    let ds = load_csv(&args.data, &spec, options)
        .with_context(|| format!("reading {}", args.data.display()))?;
    let mode = args.inference.unwrap_or(model.hyperparameters().inference);
    let predictions = model.predict_dataset(&ds, mode)?;

    let labels = model.class_labels();
    let mut out = csv::Writer::from_writer(sink(args.output.as_deref())?);
    let mut header = vec!["prediction".to_string()];
    header.extend(labels.iter().map(|l| format!("score_{l}")));
    out.write_record(&header)?;
    for p in &predictions {
        let mut record = vec![labels[p.class].clone()];
        record.extend(p.scores.iter().map(f64::to_string));
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}

fn cv(args: CvArgs) -> Result<(), Failure> {
    let hp = check_hyperparameters(&args.model)?;
    if args.folds < 2 {
        return Err(usage("--folds must be at least 2"));
    }
    let spec = read_spec(&args.data)?;
    let ds = load(&args.data, &spec)?;
    if args.positive >= ds.num_classes() {
        return Err(usage(format!(
            "--positive {} out of range for {} classes",
            args.positive,
            ds.num_classes()
        )));
    }
    let options = CvOptions {
        k: args.folds,
        seed: args.seed,
        positive_class: args.positive,
    };
    let report = cross_validate(&ds, &hp, options)?;
    print!("{}", report.render_table());
    if let Some(path) = &args.output {
        let text = serde_json::to_string_pretty(&report)?;
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
