//! Command handlers. Each returns `Ok(())` for exit code 0.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use cbddl_core::diversity::{fr_layout, task_to_tree, tree_edit_distance, upper_pairs, CostModel, DistanceMatrix};
use cbddl_core::perturb::{
    apply_profile, sample_profile, substitute, InstructionTemplate, Lexicon, VisualLevel, DEFAULT_LEXICON,
};
use cbddl_core::safety::{evaluate_episode, rollout, EvalReport};
use cbddl_core::sim::Action;
use cbddl_core::syntax::{parse_problem, validate as check, TaskSpec};
use rayon::prelude::*;

use crate::cli::{DiversityArgs, EvaluateArgs, PerturbArgs, ReplayArgs, ReportArgs, ValidateArgs};
use crate::error::{Classify, CliError, CliResult};
use crate::formats::{self, TaskReport};
use crate::manifest::{SuiteManifest, DEFAULT_EPISODES};
use crate::seeds::derive_seed;

/// Environment variable naming a lexicon file to use instead of the built-in one.
pub const LEXICON_ENV: &str = "CBDDL_LEXICON";

/// Files named on the command line, with directories replaced by their
/// `*.cbddl` entries in name order.
pub fn expand_paths(paths: &[PathBuf]) -> anyhow::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("cannot list {}", p.display()))?
                .map(|e| e.map(|e| e.path()))
                .collect::<Result<_, _>>()?;
            found.retain(|f| f.is_file() && f.extension().is_some_and(|x| x == "cbddl"));
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// Parses and validates one task file; the first error becomes the message.
pub fn load_task(path: &Path) -> anyhow::Result<TaskSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let spec = parse_problem(&text).map_err(|e| anyhow!("{}:{}: {}", path.display(), e.span(), e.message()))?;
    if let Some(d) = check(&spec).into_iter().find(|d| d.is_error()) {
        bail!("{}:{}", path.display(), d);
    }
    Ok(spec)
}

fn pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().internal()
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display())).internal()
}

fn create_dir(path: &Path) -> CliResult {
    fs::create_dir_all(path).with_context(|| format!("cannot create {}", path.display())).internal()
}

pub fn validate(args: &ValidateArgs, out: &mut dyn Write) -> CliResult {
    let files = expand_paths(&args.paths).input()?;
    let mut failed = false;
    for f in &files {
        let shown = f.display();
        let text = match fs::read_to_string(f) {
            Ok(t) => t,
            Err(e) => {
                writeln!(out, "{shown}: error: cannot read file: {e}").internal()?;
                failed = true;
                continue;
            }
        };
        match parse_problem(&text) {
            Err(e) => {
                writeln!(out, "{shown}:{}: error: {}", e.span(), e.message()).internal()?;
                failed = true;
            }
            Ok(spec) => {
                for d in check(&spec) {
                    failed |= d.is_error();
                    writeln!(out, "{shown}:{d}").internal()?;
                }
            }
        }
    }
    if failed {
        Err(CliError::Reported)
    } else {
        Ok(())
    }
}

pub fn replay(args: &ReplayArgs, out: &mut dyn Write) -> CliResult {
    let spec = load_task(&args.task).input()?;
    let actions = formats::read_actions_file(&args.actions).input()?;
    let seed = derive_seed(args.seed, &spec.name, args.episode);
    let (scene, traj) = rollout(&spec, &actions, seed, &args.sim.config())
        .map_err(|e| anyhow!("{}: {e}", args.task.display()))
        .input()?;
    let mut buf = Vec::new();
    formats::write_trajectory(&mut buf, &scene, &traj).internal()?;
    match &args.out {
        Some(p) => write_file(p, &buf),
        None => out.write_all(&buf).internal(),
    }
}

/// A task that loaded cleanly and is ready to run.
struct Loaded {
    spec: TaskSpec,
    level: String,
    actions: Vec<Action>,
    episodes: u64,
    seed: u64,
}

/// Runs every episode of the manifest. Per-task failures are collected and
/// the remaining tasks still run; the result does not depend on `jobs`.
pub fn evaluate(args: &EvaluateArgs, err: &mut dyn Write) -> CliResult {
    let manifest = SuiteManifest::load(&args.manifest).input()?;
    let config = args.sim.config();
    let mut errors: Vec<String> = Vec::new();
    let mut tasks: Vec<Loaded> = Vec::new();
    let mut names = BTreeSet::new();
    for entry in &manifest.tasks {
        let loaded = (|| -> anyhow::Result<Loaded> {
            let spec = load_task(&entry.path)?;
            if !names.insert(spec.name.clone()) {
                bail!("duplicate task name {}", spec.name);
            }
            let actions = formats::read_actions_file(&args.actions.join(format!("{}.jsonl", spec.name)))?;
            Ok(Loaded {
                level: entry.level.to_string(),
                episodes: args.episodes.or(entry.episodes.map(|e| e as u64)).unwrap_or(DEFAULT_EPISODES as u64),
                seed: args.seed.or(entry.seed).unwrap_or(0),
                spec,
                actions,
            })
        })();
        match loaded {
            Ok(l) => tasks.push(l),
            Err(e) => errors.push(format!("{}: {e:#}", entry.path.display())),
        }
    }

    let jobs: Vec<(usize, u64)> =
        tasks.iter().enumerate().flat_map(|(i, t)| (0..t.episodes).map(move |e| (i, e))).collect();
    let results: Vec<Result<EvalReport, String>> = pool(args.jobs)?.install(|| {
        jobs.par_iter()
            .map(|&(i, e)| {
                let t = &tasks[i];
                let seed = derive_seed(t.seed, &t.spec.name, e);
                rollout(&t.spec, &t.actions, seed, &config)
                    .and_then(|(scene, traj)| evaluate_episode(&t.spec, &scene, &traj))
                    .map_err(|err| format!("{} episode {e}: {err}", t.spec.name))
            })
            .collect()
    });

    create_dir(&args.out)?;
    let mut reports = Vec::new();
    let mut results = results.into_iter();
    for t in &tasks {
        let mut episodes = Vec::new();
        let mut failure = None;
        for r in results.by_ref().take(t.episodes as usize) {
            match r {
                Ok(rep) => episodes.push(rep),
                Err(e) => failure = failure.or(Some(e)),
            }
        }
        if let Some(e) = failure {
            errors.push(e);
            continue;
        }
        let report = TaskReport { task: t.spec.name.clone(), level: t.level.clone(), episodes };
        let mut json = serde_json::to_vec_pretty(&report).internal()?;
        json.push(b'\n');
        write_file(&args.out.join(format!("{}.json", report.task)), &json)?;
        reports.push(report);
    }
    let mut csv = Vec::new();
    formats::write_suite_csv(&mut csv, &reports).internal()?;
    write_file(&args.out.join("suite.csv"), &csv)?;

    let errors_path = args.out.join("errors.txt");
    if errors.is_empty() {
        if errors_path.exists() {
            fs::remove_file(&errors_path).internal()?;
        }
        return Ok(());
    }
    let mut text = String::new();
    for e in &errors {
        writeln!(err, "error: {e}").internal()?;
        text.push_str(e);
        text.push('\n');
    }
    write_file(&errors_path, text.as_bytes())?;
    Err(CliError::Reported)
}

fn load_lexicon() -> anyhow::Result<Lexicon> {
    match std::env::var_os(LEXICON_ENV) {
        Some(path) => {
            let path = PathBuf::from(path);
            let text = fs::read_to_string(&path).with_context(|| format!("cannot read lexicon {}", path.display()))?;
            Lexicon::parse(&text).with_context(|| format!("in lexicon {}", path.display()))
        }
        None => Ok(Lexicon::parse(DEFAULT_LEXICON)?),
    }
}

pub fn perturb(args: &PerturbArgs, out: &mut dyn Write) -> CliResult {
    let spec = load_task(&args.task).input()?;
    let seed = derive_seed(args.seed, &spec.name, 0);

    let instruction = match args.w {
        None => None,
        Some(k) => {
            let lex = load_lexicon().input()?;
            let template = match &args.template {
                Some(t) => InstructionTemplate::parse(t).input()?,
                None => {
                    let text = spec
                        .language
                        .as_deref()
                        .ok_or_else(|| anyhow!("{} has no :language instruction", args.task.display()))
                        .input()?;
                    InstructionTemplate::infer(text, &lex)
                }
            };
            Some(substitute(&template, &lex, k as usize, seed).input()?)
        }
    };

    let profile = args.v.map(|v| {
        let level = VisualLevel::from_index(v).expect("clap limits --v to 0..=4");
        let objects: Vec<&str> = spec.objects.iter().filter(|o| !o.is_region()).map(|o| o.name.as_str()).collect();
        sample_profile(level, seed, &objects)
    });
    let profile_json = match &profile {
        Some(p) => {
            let mut s = serde_json::to_string_pretty(p).internal()?;
            s.push('\n');
            Some(s)
        }
        None => None,
    };

    let Some(dir) = &args.out else {
        if let Some(text) = &instruction {
            writeln!(out, "{text}").internal()?;
        }
        if let Some(json) = &profile_json {
            out.write_all(json.as_bytes()).internal()?;
        }
        return Ok(());
    };
    let image = match (&args.image, &profile) {
        (Some(path), Some(p)) => {
            let img = formats::read_ppm(path).input()?;
            let noisy = apply_profile(&img, p, seed.rotate_left(32)).internal()?;
            Some(formats::encode_ppm(&noisy))
        }
        _ => None,
    };
    create_dir(dir)?;
    if let Some(text) = instruction {
        write_file(&dir.join("instruction.txt"), format!("{text}\n").as_bytes())?;
    }
    if let Some(json) = profile_json {
        write_file(&dir.join("profile.json"), json.as_bytes())?;
    }
    if let Some(bytes) = image {
        write_file(&dir.join("image.ppm"), &bytes)?;
    }
    Ok(())
}

pub fn diversity(args: &DiversityArgs) -> CliResult {
    let files = expand_paths(&args.paths).input()?;
    let specs: Vec<TaskSpec> = files.iter().map(|f| load_task(f)).collect::<anyhow::Result<_>>().input()?;
    if specs.len() < 2 {
        return Err(CliError::Input(anyhow!("diversity needs at least two tasks, got {}", specs.len())));
    }
    let cm = match &args.cost_model {
        Some(p) => formats::read_cost_model(p).input()?,
        None => CostModel::default(),
    };
    let trees: Vec<_> = specs.iter().map(task_to_tree).collect();
    let pairs = upper_pairs(trees.len());
    let upper: Vec<f64> = pool(args.jobs)?
        .install(|| pairs.par_iter().map(|&(i, j)| tree_edit_distance(&trees[i], &trees[j], &cm)).collect());
    let matrix = DistanceMatrix::from_upper(trees.len(), &upper).internal()?;
    let layout = fr_layout(&matrix, args.seed, args.iterations);

    let names: Vec<String> = specs.iter().map(|s| s.name.clone()).collect();
    let (mut m, mut l) = (Vec::new(), Vec::new());
    formats::write_matrix_csv(&mut m, &names, &matrix).internal()?;
    formats::write_layout_csv(&mut l, &names, &layout).internal()?;
    create_dir(&args.out)?;
    write_file(&args.out.join("matrix.csv"), &m)?;
    write_file(&args.out.join("layout.csv"), &l)
}

pub fn report(args: &ReportArgs, out: &mut dyn Write) -> CliResult {
    let mut files: Vec<PathBuf> = fs::read_dir(&args.dir)
        .with_context(|| format!("cannot list {}", args.dir.display()))
        .input()?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .input()?;
    files.retain(|f| f.extension().is_some_and(|x| x == "json"));
    files.sort();
    let mut reports = Vec::new();
    for f in &files {
        let text = fs::read_to_string(f).with_context(|| format!("cannot read {}", f.display())).input()?;
        let r: TaskReport =
            serde_json::from_str(&text).with_context(|| format!("{} is not a task report", f.display())).input()?;
        reports.push(r);
    }
    if reports.is_empty() {
        return Err(CliError::Input(anyhow!("no task reports in {}", args.dir.display())));
    }
    let mut csv = Vec::new();
    formats::write_suite_csv(&mut csv, &reports).internal()?;
    match &args.out {
        Some(dir) => {
            create_dir(dir)?;
            write_file(&dir.join("suite.csv"), &csv)
        }
        None => out.write_all(&csv).internal(),
    }
}
