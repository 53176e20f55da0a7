use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use spambehave::corpus::{write_two_dirs, Corpus};
use spambehave::email_parser::split_mbox;
use spambehave::evaluation::{ResultsRow, ResultsTable};
use spambehave::experiments::{category_combinations, combination_indices, evaluate_feature_set};
use spambehave::features::feature_description;
use spambehave::selection::{best_first_forward, format_index_list, report_selection, SearchConfig};
use spambehave::{
    build_dataset, ingest, synth_corpus, AnyLearner, AnyModel, Dataset, Error, Label, Layout, Learner, MlpConfig,
    ModelFile, NbConfig, SynthConfig, NUM_FEATURES,
};

use crate::{
    ClassifierArg, ClassifyArgs, Command, EvaluateArgs, ExtractArgs, Failure, Format, Hyper, Input, LayoutArg,
    SelectArgs, SynthArgs, TrainArgs,
};

type Outcome = Result<(), Failure>;

pub(crate) fn run(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Extract(a) => extract(a, out),
        Command::Evaluate(a) => evaluate(a, out),
        Command::Select(a) => select(a, out),
        Command::Train(a) => train(a, out),
        Command::Classify(a) => classify(a, out),
        Command::Synth(a) => synth(a, out),
    }
}

fn stdout_err(e: io::Error) -> Failure {
    Failure::Data(Error::io("<stdout>", e))
}

fn resolve_layout(path: &Path, layout: LayoutArg) -> Result<Layout, Error> {
    Ok(match layout {
        LayoutArg::Auto => Layout::detect(path)?,
        LayoutArg::TwoDirs => Layout::TwoDirs,
        LayoutArg::MboxPair => Layout::MboxPair,
        LayoutArg::Manifest => Layout::Manifest,
        LayoutArg::Directory => Layout::Directory,
        LayoutArg::Single => Layout::Single,
    })
}

fn load_corpus(path: &Path, layout: LayoutArg) -> Result<Corpus, Error> {
    // a missing path should name the path, not a layout
    fs::metadata(path).map_err(|e| Error::io(path, e))?;
    let corpus = ingest(path, resolve_layout(path, layout)?)?;
    for f in &corpus.failures {
        eprintln!("warning: skipped {}: {}", f.source_id, f.reason);
    }
    Ok(corpus)
}

fn load_dataset(input: &Input) -> Result<Dataset, Error> {
    match (&input.dataset, &input.corpus) {
        (Some(path), _) => {
            let file = File::open(path).map_err(|e| Error::io(path, e))?;
            Dataset::read_csv(file)
        }
        (None, Some(path)) => Ok(build_dataset(&load_corpus(path, input.layout)?)),
        (None, None) => unreachable!("clap requires one input"),
    }
}

fn learner(kind: ClassifierArg, hyper: &Hyper, seed: u64) -> AnyLearner {
    match kind {
        ClassifierArg::Nb => AnyLearner::NaiveBayes(NbConfig {
            variance_floor: hyper.variance_floor,
            prior_smoothing: hyper.prior_smoothing,
        }),
        ClassifierArg::Mlp => AnyLearner::Mlp(MlpConfig {
            hidden_units: hyper.hidden_units,
            learning_rate: hyper.learning_rate,
            momentum: hyper.momentum,
            epochs: hyper.epochs,
            seed,
            ..MlpConfig::default()
        }),
    }
}

fn both_learners(hyper: &Hyper, seed: u64) -> Vec<AnyLearner> {
    vec![learner(ClassifierArg::Nb, hyper, seed), learner(ClassifierArg::Mlp, hyper, seed)]
}

/// Row label for a feature set: the category name when it is one, else the indices.
fn feature_set_label(ids: &[usize]) -> String {
    let mut sorted = ids.to_vec();
    sorted.sort_unstable();
    category_combinations()
        .into_iter()
        .find(|(_, cats)| combination_indices(cats) == sorted)
        .map(|(label, _)| label)
        .unwrap_or_else(|| format!("Features {}", format_index_list(ids)))
}

fn classifier_names(learners: &[AnyLearner]) -> Vec<String> {
    learners.iter().map(|l| l.kind().display_name().to_string()).collect()
}

fn write_table(table: &ResultsTable, format: Format, out: &mut dyn Write) -> Outcome {
    let text = match format {
        Format::Table => table.render(),
        Format::Json => serde_json::to_string_pretty(table).map_err(Error::from)? + "\n",
    };
    out.write_all(text.as_bytes()).map_err(stdout_err)
}

fn extract(a: ExtractArgs, out: &mut dyn Write) -> Outcome {
    let corpus = load_corpus(&a.corpus, a.layout)?;
    let mut dataset = build_dataset(&corpus);
    if let Some(ids) = &a.features {
        dataset = dataset.project(&ids.0)?;
    }
    match &a.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| Error::io(path, e))?;
            dataset.write_csv(BufWriter::new(file))?;
        }
        None => dataset.write_csv(&mut *out)?,
    }
    eprintln!(
        "extracted {} messages ({} skipped), {} features",
        dataset.len(),
        corpus.failures.len(),
        dataset.feature_ids.len()
    );
    Ok(())
}

fn evaluate(a: EvaluateArgs, out: &mut dyn Write) -> Outcome {
    let dataset = load_dataset(&a.input)?;
    let learners = if a.both {
        both_learners(&a.hyper, a.seed)
    } else {
        vec![learner(a.classifier, &a.hyper, a.seed)]
    };

    let sets: Vec<(String, Vec<usize>)> = if a.categories {
        category_combinations()
            .into_iter()
            .map(|(label, cats)| (label, combination_indices(&cats)))
            .collect()
    } else {
        let ids = match &a.features {
            Some(ids) => ids.0.clone(),
            None => dataset.feature_ids.clone(),
        };
        vec![(feature_set_label(&ids), ids)]
    };

    let mut rows = Vec::with_capacity(sets.len());
    for (label, ids) in sets {
        let reports = evaluate_feature_set(&dataset, &ids, &learners, a.k, a.seed)?;
        for r in &reports {
            if r.undefined_metric {
                eprintln!("warning: {label}: a precision or recall was 0/0 and is reported as 0");
            }
        }
        rows.push(ResultsRow {
            features: label,
            results: reports.into_iter().map(Some).collect(),
        });
    }
    let table = ResultsTable {
        title: String::new(),
        classifiers: classifier_names(&learners),
        rows,
    };
    write_table(&table, a.format, out)
}

fn select(a: SelectArgs, out: &mut dyn Write) -> Outcome {
    let dataset = load_dataset(&a.input)?;
    let pool = match &a.features {
        Some(ids) => ids.0.clone(),
        None => dataset.feature_ids.clone(),
    };
    let projected = dataset.project(&pool)?;
    let samples = projected.to_samples()?;

    let mut config = SearchConfig::for_features(pool.len());
    config.stale_limit = a.stale_limit;
    config.k_folds = a.k;
    config.seed = a.seed;
    if a.max_evaluations.is_some() {
        config.max_evaluations = a.max_evaluations;
    }
    let search = learner(a.classifier, &a.hyper, a.seed);
    let found = best_first_forward(&samples, &search, &config)?.map_indices(&pool);

    let learners = if a.no_compare {
        Vec::new()
    } else {
        both_learners(&a.hyper, a.seed)
    };
    let subset_reports = if found.indices.is_empty() || learners.is_empty() {
        vec![None; learners.len()]
    } else {
        evaluate_feature_set(&dataset, &found.indices, &learners, a.k, a.seed)?
            .into_iter()
            .map(Some)
            .collect()
    };
    let baseline = if learners.is_empty() {
        None
    } else {
        let label = if pool.len() == NUM_FEATURES {
            "All features".to_string()
        } else {
            format!("Candidates {}", format_index_list(&pool))
        };
        let reports = evaluate_feature_set(&dataset, &pool, &learners, a.k, a.seed)?;
        Some((label, reports.into_iter().map(Some).collect()))
    };
    let report = report_selection(&found, &classifier_names(&learners), subset_reports, baseline);

    let text = match a.format {
        Format::Table => report.render(),
        Format::Json => serde_json::to_string_pretty(&report).map_err(Error::from)? + "\n",
    };
    out.write_all(text.as_bytes()).map_err(stdout_err)
}

fn train(a: TrainArgs, out: &mut dyn Write) -> Outcome {
    let dataset = load_dataset(&a.input)?;
    let ids = match &a.features {
        Some(ids) => ids.0.clone(),
        None => dataset.feature_ids.clone(),
    };
    let samples = dataset.project(&ids)?.to_samples()?;
    let l = learner(a.classifier, &a.hyper, a.seed);
    let file = ModelFile::new(ids, l.fit(&samples)?)?;
    file.save(&a.out)?;
    writeln!(
        out,
        "trained {} on {} messages using {}; wrote {}",
        l.kind().display_name(),
        samples.len(),
        file.describe_features(),
        a.out.display()
    )
    .map_err(stdout_err)
}

fn stdin_corpus() -> Result<Corpus, Error> {
    let mut bytes = Vec::new();
    io::stdin()
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io("<stdin>", e))?;
    let candidates = if bytes.starts_with(b"From ") {
        split_mbox(&bytes, "stdin").into_iter().map(|(id, b)| (id, b, None)).collect()
    } else {
        vec![("stdin".to_string(), bytes, None)]
    };
    let corpus = Corpus::from_candidates(candidates, "standard input".into())?;
    for f in &corpus.failures {
        eprintln!("warning: skipped {}: {}", f.source_id, f.reason);
    }
    if corpus.is_empty() {
        return Err(Error::InvalidDataset("no readable message on standard input".into()));
    }
    Ok(corpus)
}

fn classify(a: ClassifyArgs, out: &mut dyn Write) -> Outcome {
    let file = ModelFile::load(&a.model)?;
    if a.explain && !matches!(file.model, AnyModel::NaiveBayes(_)) {
        return Err(Failure::Usage("--explain is only available for naive Bayes models".into()));
    }
    let dataset = match (&a.dataset, &a.corpus) {
        (Some(path), _) => {
            let f = File::open(path).map_err(|e| Error::io(path, e))?;
            Dataset::read_csv(f)?
        }
        (None, Some(path)) => build_dataset(&load_corpus(path, a.layout)?),
        (None, None) => build_dataset(&stdin_corpus()?),
    };
    let projected = dataset.project(&file.feature_ids)?;
    let spam = file
        .model
        .classes()
        .iter()
        .position(|c| c == Label::Spam.as_str())
        .ok_or_else(|| Error::CorruptModel("model has no spam class".into()))?;

    let mut w = BufWriter::new(out);
    for row in &projected.rows {
        let probs = file.model.class_probabilities(&row.values)?;
        let label = &file.model.classes()[spambehave::learner::argmax(&probs)];
        writeln!(w, "{}\t{}\t{:.6}", row.source_id, label, probs[spam]).map_err(stdout_err)?;
        if let (true, AnyModel::NaiveBayes(nb)) = (a.explain, &file.model) {
            explain(&mut w, nb, &file.feature_ids, &row.values)?;
        }
    }
    w.flush().map_err(stdout_err)
}

fn explain(w: &mut dyn Write, nb: &spambehave::NbModel, ids: &[usize], x: &[f64]) -> Outcome {
    let terms = nb.log_terms(x)?;
    let mut line = String::from("#\tterm\tvalue");
    for c in &nb.classes {
        line.push_str(&format!("\tlog p({c})"));
    }
    writeln!(w, "{line}").map_err(stdout_err)?;
    let mut prior = String::from("#\tprior\t");
    for p in &nb.priors {
        prior.push_str(&format!("\t{:.6}", p.ln()));
    }
    writeln!(w, "{prior}").map_err(stdout_err)?;
    for (j, &id) in ids.iter().enumerate() {
        let mut line = format!("#\tf{id}\t{}", x[j]);
        for class_terms in &terms {
            line.push_str(&format!("\t{:.6}", class_terms[j]));
        }
        line.push_str(&format!("\t{}", feature_description(id)));
        writeln!(w, "{line}").map_err(stdout_err)?;
    }
    Ok(())
}

fn synth(a: SynthArgs, out: &mut dyn Write) -> Outcome {
    let corpus = synth_corpus(a.n, a.spam_rate, a.seed, &SynthConfig::default())?;
    write_two_dirs(&corpus, &a.out)?;
    let spam = corpus.entries.iter().filter(|e| e.label == Some(Label::Spam)).count();
    writeln!(
        out,
        "wrote {} messages ({} spam, {} ham) to {}",
        corpus.len(),
        spam,
        corpus.len() - spam,
        a.out.display()
    )
    .map_err(stdout_err)
}
