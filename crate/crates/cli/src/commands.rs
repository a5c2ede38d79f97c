use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use livmt_core::cmea::{align, AlignOptions};
use livmt_core::corpus::{
    build_eval_index, draw_indices, filter_mono, parse_clean_config, read_bitext_pair, read_bitext_tsv, run_pipeline,
    temperature_probabilities, temperature_sample, CleanConfig, EvalIndex, FilterDecision, FilterKind, Lang, LangSet,
    ParallelCorpus, SamplingSpec, Temperature, DEFAULT_LANGS,
};
use livmt_core::embed::{load_embeddings, write_embeddings};
use livmt_core::eval::{audit_unicode, bleu, normalize_corpus, round_trip_bleu};
use livmt_core::pivot::{summarize, synthesize, Direction, SynthJob};
use livmt_core::postproc::{postprocess, regen_list, PostprocConfig};
use livmt_core::translate::from_spec;

use crate::error::{CliError, CliResult};
use crate::io::{lines_to_text, read_text, read_text_lines, write_atomic, Outputs};
use crate::{
    AlignArgs, AuditArgs, BleuArgs, CleanArgs, Cli, Command, Global, NormalizeArgs, PostprocessArgs, RoundtripArgs,
    SampleArgs, SynthArgs, CONFIG_DIR_ENV,
};

/// Runs a command and returns what it prints on stdout.
pub fn run(cli: Cli) -> CliResult<String> {
    let g = cli.global;
    match cli.command {
        Command::Align(a) => cmd_align(a),
        Command::Clean(a) => cmd_clean(a, &g),
        Command::Bleu(a) => cmd_bleu(a),
        Command::Audit(a) => cmd_audit(a),
        Command::Normalize(a) => cmd_normalize(a),
        Command::Roundtrip(a) => cmd_roundtrip(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Sample(a) => cmd_sample(a, &g),
        Command::Postprocess(a) => cmd_postprocess(a, &g),
    }
}

fn pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} worker threads: {e}")))
}

fn effective_jobs(jobs: usize) -> usize {
    if jobs == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        jobs
    }
}

fn cmd_align(a: AlignArgs) -> CliResult<String> {
    let mut so = String::new();
    let table_l = load_embeddings(&a.model_l)?;
    let table_m = load_embeddings(&a.model_m)?;
    let exclude = match &a.exclude_file {
        Some(p) => read_text_lines(p)?.into_iter().map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect(),
        None => Vec::new(),
    };
    let opts = AlignOptions { exclude, normalize_anchors: a.normalize_anchors };
    let (merged, report) = align(&table_l, &table_m, &opts)?;
    let mut table = Vec::new();
    write_embeddings(&merged, &mut table)?;
    let mut out = Outputs::new();
    out.add(&a.out, table)?;
    if let Some(p) = &a.report {
        out.add(p, report.to_tsv())?;
    }
    out.commit()?;
    let _ = write!(so, "{report}");
    if report.degenerate {
        eprintln!("livmt: warning: degenerate alignment, see sigma_min");
    }
    Ok(so)
}

fn load_clean_config(path: Option<&Path>) -> CliResult<CleanConfig> {
    let path = match path {
        Some(p) => Some(p.to_path_buf()),
        None => {
            std::env::var_os(CONFIG_DIR_ENV).map(|dir| PathBuf::from(dir).join("clean.conf")).filter(|p| p.is_file())
        }
    };
    match path {
        Some(p) => {
            let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
            Ok(parse_clean_config(&read_text(&p)?, &base)?)
        }
        None => Ok(CleanConfig::default()),
    }
}

fn eval_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?.path();
        if path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_clean(a: CleanArgs, g: &Global) -> CliResult<String> {
    let mut so = String::new();
    let cfg = load_clean_config(a.config.as_deref())?;
    let langs = LangSet::new(cfg.langs.clone().unwrap_or_else(|| DEFAULT_LANGS.map(String::from).to_vec()));
    let src_lang = langs.parse(a.src_lang.as_deref().or(cfg.src_lang.as_deref()).unwrap_or("en"))?;
    let tgt_lang = langs.parse(a.tgt_lang.as_deref().or(cfg.tgt_lang.as_deref()).unwrap_or("liv"))?;
    let lang_id = cfg.build_lang_id()?;
    let eval_index = match &a.eval_dir {
        Some(dir) => build_eval_index(&eval_files(dir)?)?,
        None => EvalIndex::new(),
    };
    let jobs = effective_jobs(g.jobs);
    let monolingual = a.tsv.is_none() && a.tgt.is_none();

    let decisions: Vec<FilterDecision> = if monolingual {
        let src = a.src.as_ref().expect("clap requires --src without --tsv");
        let lines = livmt_core::corpus::read_lines_bytes(src)?;
        pool(jobs)?.install(|| {
            lines.par_iter().map(|l| filter_mono(l, &src_lang, &cfg.filter, &eval_index, lang_id.as_ref())).collect()
        })
    } else {
        let pairs = match (&a.tsv, &a.src, &a.tgt) {
            (Some(tsv), _, _) => read_bitext_tsv(tsv)?,
            (None, Some(s), Some(t)) => read_bitext_pair(s, t)?,
            _ => unreachable!("clap enforces --tsv or --src/--tgt"),
        };
        run_pipeline(&pairs, &src_lang, &tgt_lang, &cfg.filter, &eval_index, lang_id.as_ref(), jobs)
    };

    let kept: Vec<&FilterDecision> = decisions.iter().filter(|d| d.kept).collect();
    let mut report = String::from("line\tstatus\tfilter\n");
    let mut per_filter: BTreeMap<FilterKind, usize> = BTreeMap::new();
    for (i, d) in decisions.iter().enumerate() {
        let name = d.rejecting_filter.map_or("-", |k| k.name());
        let _ = writeln!(report, "{}\t{}\t{}", i + 1, d.status(), name);
        if let Some(k) = d.rejecting_filter {
            *per_filter.entry(k).or_insert(0) += 1;
        }
    }

    let mut out = Outputs::new();
    out.add(
        with_suffix(&a.out_prefix, src_lang.as_str()),
        lines_to_text(&kept.iter().map(|d| d.src.as_str()).collect::<Vec<_>>()),
    )?;
    if !monolingual {
        out.add(
            with_suffix(&a.out_prefix, tgt_lang.as_str()),
            lines_to_text(&kept.iter().map(|d| d.tgt.as_str()).collect::<Vec<_>>()),
        )?;
    }
    out.add(a.report.clone().unwrap_or_else(|| with_suffix(&a.out_prefix, "report.tsv")), report)?;
    out.commit()?;

    let _ = writeln!(so, "input\t{}", decisions.len());
    let _ = writeln!(so, "kept\t{}", kept.len());
    let _ = writeln!(so, "rejected\t{}", decisions.len() - kept.len());
    for kind in FilterKind::ALL {
        if kind != FilterKind::PunctNorm {
            let _ = writeln!(so, "rejected.{}\t{}", kind.name(), per_filter.get(&kind).copied().unwrap_or(0));
        }
    }
    Ok(so)
}

fn cmd_bleu(a: BleuArgs) -> CliResult<String> {
    let mut so = String::new();
    let hyps = read_text_lines(&a.hyp)?;
    let refs = read_text_lines(&a.r#ref)?;
    let report = bleu(&hyps, &refs, a.normalize_ref, a.normalize_hyp)?;
    if a.json {
        let _ = writeln!(so, "{}", report.to_json());
    } else {
        let _ = writeln!(so, "{report}");
        let _ = writeln!(so, "signature: {}", report.signature);
    }
    Ok(so)
}

fn cmd_audit(a: AuditArgs) -> CliResult<String> {
    let mut so = String::new();
    let lines = read_text_lines(&a.input)?;
    let report = audit_unicode(&lines);
    if let Some(p) = &a.tsv {
        write_atomic(p, report.to_tsv())?;
    }
    let _ = write!(so, "{report}");
    Ok(so)
}

fn cmd_normalize(a: NormalizeArgs) -> CliResult<String> {
    let lines = read_text_lines(&a.input)?;
    let text = lines_to_text(&normalize_corpus(&lines, a.form));
    match &a.out {
        Some(p) => write_atomic(p, text).map(|()| String::new()),
        None => Ok(text),
    }
}

fn cmd_roundtrip(a: RoundtripArgs) -> CliResult<String> {
    let mut so = String::new();
    if a.batch_size == 0 {
        return Err(CliError::Usage("--batch-size must be positive".into()));
    }
    let mono = read_text_lines(&a.input)?;
    let mut fwd = from_spec(&a.fwd_cmd);
    let mut bwd = from_spec(&a.bwd_cmd);
    let rt = round_trip_bleu(&mono, &mut fwd, &mut bwd, a.batch_size)?;
    let mut out = Outputs::new();
    if let Some(p) = &a.pivot_out {
        out.add(p, lines_to_text(&rt.pivot))?;
    }
    if let Some(p) = &a.back_out {
        out.add(p, lines_to_text(&rt.back))?;
    }
    out.commit()?;
    if a.json {
        let _ = writeln!(so, "{}", rt.report.to_json());
    } else {
        let _ = writeln!(so, "{}", rt.report);
    }
    Ok(so)
}

fn cmd_synth(a: SynthArgs) -> CliResult<String> {
    let mut so = String::new();
    if a.batch_size == 0 {
        return Err(CliError::Usage("--batch-size must be positive".into()));
    }
    let (src_lang, tgt_lang, pivot) = (Lang::new(&a.src_lang), Lang::new(&a.tgt_lang), Lang::new(&a.pivot));
    let (out_src, out_tgt) = (Lang::new(&a.out_src_lang), Lang::new(&a.out_tgt_lang));
    if out_src == out_tgt {
        return Err(CliError::Usage("--out-src-lang and --out-tgt-lang must differ".into()));
    }
    // the side that is not translated decides which end of the output it lands on
    let kept = if pivot == src_lang {
        &tgt_lang
    } else if pivot == tgt_lang {
        &src_lang
    } else {
        return Err(CliError::Usage(format!(
            "--pivot {pivot} is neither --src-lang {src_lang} nor --tgt-lang {tgt_lang}"
        )));
    };
    let direction = if *kept == out_src {
        Direction::PivotToTarget
    } else if *kept == out_tgt {
        Direction::PivotToSource
    } else {
        return Err(CliError::Usage(format!(
            "the untranslated side ({kept}) must be one of the output languages {out_src}, {out_tgt}"
        )));
    };
    let src = read_text_lines(&a.src)?;
    let tgt = read_text_lines(&a.tgt)?;
    if src.len() != tgt.len() {
        return Err(CliError::Data(format!(
            "line count mismatch: {} has {} lines but {} has {}",
            a.src.display(),
            src.len(),
            a.tgt.display(),
            tgt.len()
        )));
    }
    let corpus = ParallelCorpus::from_lines(src_lang, tgt_lang, src, tgt);
    let mut translator = from_spec(&a.fwd_cmd);
    let synthetic = synthesize(SynthJob {
        corpus: &corpus,
        pivot,
        direction,
        output: (out_src.clone(), out_tgt.clone()),
        translator: &mut translator,
        batch_size: a.batch_size,
        retries: a.retries,
    })?;
    let summary = summarize(std::slice::from_ref(&synthetic))?;
    let pivot_name = synthetic.pivot.as_ref().map_or("-", |p| p.as_str());
    let tags: String = synthetic.pairs.iter().map(|p| format!("{}\t{}\n", p.origin, pivot_name)).collect();

    let mut out = Outputs::new();
    out.add(with_suffix(&a.out_prefix, out_src.as_str()), lines_to_text(&synthetic.src_lines()))?;
    out.add(with_suffix(&a.out_prefix, out_tgt.as_str()), lines_to_text(&synthetic.tgt_lines()))?;
    out.add(with_suffix(&a.out_prefix, "origin"), tags)?;
    out.commit()?;
    let _ = write!(so, "{}", summary.to_tsv());
    Ok(so)
}

/// One corpus for sampling: every side has the same number of lines.
struct SampleCorpus {
    label: String,
    sides: Vec<(PathBuf, Vec<String>)>,
}

fn read_sample_corpus(spec: &str) -> CliResult<SampleCorpus> {
    let mut sides = Vec::new();
    for part in spec.split(',').filter(|p| !p.is_empty()) {
        let path = PathBuf::from(part);
        let lines = read_text_lines(&path)?;
        if let Some((first, n)) = sides.first().map(|(p, l): &(PathBuf, Vec<String>)| (p.clone(), l.len())) {
            if lines.len() != n {
                return Err(CliError::Data(format!(
                    "line count mismatch: {} has {n} lines but {} has {}",
                    first.display(),
                    path.display(),
                    lines.len()
                )));
            }
        }
        sides.push((path, lines));
    }
    if sides.is_empty() {
        return Err(CliError::Usage(format!("empty --input {spec:?}")));
    }
    Ok(SampleCorpus { label: spec.to_string(), sides })
}

fn cmd_sample(a: SampleArgs, g: &Global) -> CliResult<String> {
    let mut so = String::new();
    let corpora: Vec<SampleCorpus> = a.input.iter().map(|s| read_sample_corpus(s)).collect::<CliResult<_>>()?;
    let sizes: Vec<u64> =
        if corpora.is_empty() { a.sizes.clone() } else { corpora.iter().map(|c| c.sides[0].1.len() as u64).collect() };
    let budget = match (a.temperature, a.budget) {
        (Temperature::Concat, b) => b.unwrap_or(0),
        (_, Some(b)) => b,
        (_, None) => return Err(CliError::Usage("--budget is required unless --t is concat".into())),
    };
    let spec = SamplingSpec { sizes: sizes.clone(), temperature: a.temperature, budget };
    spec.validate().map_err(|e| if corpora.is_empty() { CliError::Usage(e) } else { CliError::Data(e) })?;
    let counts = temperature_sample(&spec);
    let probs = match a.temperature {
        Temperature::Value(t) => temperature_probabilities(&sizes, t),
        Temperature::Concat => {
            let total: u64 = sizes.iter().sum();
            sizes.iter().map(|n| *n as f64 / total as f64).collect()
        }
    };

    if !corpora.is_empty() {
        let dir = a.out_dir.as_ref().expect("clap requires --out-dir with --input");
        let picks = draw_indices(&sizes, &counts, g.seed);
        let mut out = Outputs::new();
        for (corpus, idx) in corpora.iter().zip(&picks) {
            for (path, lines) in &corpus.sides {
                let name =
                    path.file_name().ok_or_else(|| CliError::Usage(format!("{} has no file name", path.display())))?;
                let chosen: Vec<&str> = idx.iter().map(|i| lines[*i].as_str()).collect();
                out.add(dir.join(name), lines_to_text(&chosen))?;
            }
        }
        out.commit()?;
    }

    let _ = writeln!(so, "corpus\tsize\tprobability\tcount");
    for (i, ((n, p), c)) in sizes.iter().zip(&probs).zip(&counts).enumerate() {
        let name = corpora.get(i).map_or_else(|| i.to_string(), |c| c.label.clone());
        let _ = writeln!(so, "{name}\t{n}\t{p:.6}\t{c}");
    }
    let _ = writeln!(so, "total\t{}\t1.000000\t{}", sizes.iter().sum::<u64>(), counts.iter().sum::<u64>());
    Ok(so)
}

fn cmd_postprocess(a: PostprocessArgs, g: &Global) -> CliResult<String> {
    let mut so = String::new();
    let mut cfg = PostprocConfig::new(Lang::new(&a.lang));
    cfg.repetition_ngram = a.ngram;
    cfg.repetition_min_repeats = a.repeats;
    for rule in &a.disable {
        let r = &mut cfg.rules;
        match rule.trim() {
            "nfc" => r.nfc = false,
            "https" => r.fix_https = false,
            "unk" => r.drop_unk = false,
            "decimal-comma" => r.decimal_comma = false,
            "repetition" => r.repetition = false,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown rule {other:?} (expected nfc, https, unk, decimal-comma, repetition)"
                )))
            }
        }
    }
    cfg.validate()?;
    let lines = read_text_lines(&a.input)?;
    let results: Vec<_> =
        pool(effective_jobs(g.jobs))?.install(|| lines.par_iter().map(|l| postprocess(l, &cfg)).collect());
    let regen: Vec<usize> = results.iter().enumerate().filter(|(_, r)| r.needs_regen).map(|(i, _)| i + 1).collect();
    let mut out = Outputs::new();
    out.add(&a.out, lines_to_text(&results.iter().map(|r| r.line.as_str()).collect::<Vec<_>>()))?;
    if let Some(p) = &a.regen_out {
        out.add(p, regen_list(&regen))?;
    }
    out.commit()?;
    let changed = results.iter().zip(&lines).filter(|(r, l)| r.line != **l).count();
    let _ = writeln!(so, "lines\t{}", lines.len());
    let _ = writeln!(so, "changed\t{changed}");
    let _ = writeln!(so, "regen\t{}", regen.len());
    Ok(so)
}
