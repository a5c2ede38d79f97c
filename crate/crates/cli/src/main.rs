//! `livmt`: the English-Livonian translation toolkit on the command line.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 data error,
//! 3 external translator failure. Diagnostics go to stderr, results to stdout,
//! and output files only appear once a command has fully succeeded.

mod commands;
mod error;
mod io;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use livmt_core::corpus::Temperature;
use livmt_core::eval::NormForm;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 42;

/// Names the directory searched for `clean.conf` when `--config` is absent.
pub const CONFIG_DIR_ENV: &str = "LIVMT_CONFIG_DIR";

#[derive(Parser, Debug)]
#[command(name = "livmt", version, about = "English-Livonian MT data and evaluation toolkit")]
#[command(after_help = "Exit codes: 0 ok, 1 usage/validation, 2 data error, 3 external command failure.\n\
Environment: LIVMT_CONFIG_DIR names the directory holding the default clean.conf.")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for every random choice (line sampling).
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads for parallel stages; 0 uses every core. Output does not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Align a low-resource model's embeddings into a larger model's space.
    Align(AlignArgs),
    /// Filter a bitext (or a monolingual file) and report why lines were dropped.
    Clean(CleanArgs),
    /// Corpus BLEU (13a tokenization, exp smoothing, one reference).
    Bleu(BleuArgs),
    /// Report characters that occur under several Unicode encodings.
    Audit(AuditArgs),
    /// Rewrite a file in a Unicode normalization form.
    Normalize(NormalizeArgs),
    /// Translate forward and back, then score the result against the input.
    Roundtrip(RoundtripArgs),
    /// Build synthetic bitext by translating the pivot side of a corpus.
    Synth(SynthArgs),
    /// Split a line budget across corpora by temperature and draw the lines.
    Sample(SampleArgs),
    /// Apply rule-based fixes to system output and list lines to regenerate.
    Postprocess(PostprocessArgs),
}

#[derive(Args, Debug)]
pub struct AlignArgs {
    /// Embeddings of the model whose vocabulary is kept.
    #[arg(long, value_name = "FILE")]
    pub model_l: PathBuf,
    /// Embeddings of the model whose space is the target.
    #[arg(long, value_name = "FILE")]
    pub model_m: PathBuf,
    /// Where to write the merged embedding table.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Shared tokens (one per line) left out of the anchor set.
    #[arg(long, value_name = "FILE")]
    pub exclude_file: Option<PathBuf>,
    /// Also write the alignment report as TSV.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
    /// Scale anchor vectors to unit length before solving.
    #[arg(long)]
    pub normalize_anchors: bool,
}

#[derive(Args, Debug)]
pub struct CleanArgs {
    /// Source side, one sentence per line.
    #[arg(long, value_name = "FILE", required_unless_present = "tsv")]
    pub src: Option<PathBuf>,
    /// Target side, line-aligned with --src. Omit for monolingual cleaning.
    #[arg(long, value_name = "FILE", requires = "src")]
    pub tgt: Option<PathBuf>,
    /// Bitext as `source<TAB>target` lines instead of --src/--tgt.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["src", "tgt"])]
    pub tsv: Option<PathBuf>,
    /// Source language code (overrides the config).
    #[arg(long, value_name = "LANG")]
    pub src_lang: Option<String>,
    /// Target language code (overrides the config).
    #[arg(long, value_name = "LANG")]
    pub tgt_lang: Option<String>,
    /// Filter config; defaults to $LIVMT_CONFIG_DIR/clean.conf, then built-in defaults.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory of evaluation files; lines found there are removed from training data.
    #[arg(long, value_name = "DIR")]
    pub eval_dir: Option<PathBuf>,
    /// Kept lines go to PREFIX.<src_lang> and PREFIX.<tgt_lang>.
    #[arg(long, value_name = "PREFIX")]
    pub out_prefix: PathBuf,
    /// Per-line decisions as TSV (default PREFIX.report.tsv).
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BleuArgs {
    /// System output.
    #[arg(long, value_name = "FILE")]
    pub hyp: PathBuf,
    /// Reference translation.
    #[arg(long, value_name = "FILE")]
    pub r#ref: PathBuf,
    /// Normalize the reference first: nfc, nfd, nfkc or nfkd.
    #[arg(long, value_name = "FORM")]
    pub normalize_ref: Option<NormForm>,
    /// Normalize the system output first: nfc, nfd, nfkc or nfkd.
    #[arg(long, value_name = "FORM")]
    pub normalize_hyp: Option<NormForm>,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    /// Text file to inspect.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Also write the findings as TSV.
    #[arg(long, value_name = "FILE")]
    pub tsv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct NormalizeArgs {
    /// Text file to normalize.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// nfc, nfd, nfkc or nfkd.
    #[arg(long, value_name = "FORM")]
    pub form: NormForm,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RoundtripArgs {
    /// Monolingual text to translate and back.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Forward translator: a shell command reading lines on stdin, or builtin:identity|reverse|drop-last.
    #[arg(long, value_name = "CMD")]
    pub fwd_cmd: String,
    /// Backward translator, same forms as --fwd-cmd.
    #[arg(long, value_name = "CMD")]
    pub bwd_cmd: String,
    /// Lines per translator call.
    #[arg(long, value_name = "N", default_value_t = livmt_core::pivot::DEFAULT_BATCH_SIZE)]
    pub batch_size: usize,
    /// Keep the intermediate translation.
    #[arg(long, value_name = "FILE")]
    pub pivot_out: Option<PathBuf>,
    /// Keep the back-translation.
    #[arg(long, value_name = "FILE")]
    pub back_out: Option<PathBuf>,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Source side of the authentic corpus.
    #[arg(long, value_name = "FILE")]
    pub src: PathBuf,
    /// Target side of the authentic corpus.
    #[arg(long, value_name = "FILE")]
    pub tgt: PathBuf,
    /// Language of --src.
    #[arg(long, value_name = "LANG")]
    pub src_lang: String,
    /// Language of --tgt.
    #[arg(long, value_name = "LANG")]
    pub tgt_lang: String,
    /// Which corpus language gets translated (must be --src-lang or --tgt-lang).
    #[arg(long, value_name = "LANG")]
    pub pivot: String,
    /// Source language of the generated corpus.
    #[arg(long, value_name = "LANG", default_value = "en")]
    pub out_src_lang: String,
    /// Target language of the generated corpus.
    #[arg(long, value_name = "LANG", default_value = "liv")]
    pub out_tgt_lang: String,
    /// Translator from the pivot language: shell command or builtin:identity|reverse|drop-last.
    #[arg(long, value_name = "CMD")]
    pub fwd_cmd: String,
    /// Lines per translator call.
    #[arg(long, value_name = "N", default_value_t = livmt_core::pivot::DEFAULT_BATCH_SIZE)]
    pub batch_size: usize,
    /// Extra attempts for a failed batch.
    #[arg(long, value_name = "N", default_value_t = livmt_core::pivot::DEFAULT_RETRIES)]
    pub retries: usize,
    /// Writes PREFIX.<out-src-lang>, PREFIX.<out-tgt-lang> and PREFIX.origin.
    #[arg(long, value_name = "PREFIX")]
    pub out_prefix: PathBuf,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    /// Temperature (>= 1), or `concat`/0 to keep every corpus whole.
    #[arg(long = "t", value_name = "T")]
    pub temperature: Temperature,
    /// Corpus sizes, comma separated, when only the counts are wanted.
    #[arg(
        long,
        value_name = "N,N,...",
        value_delimiter = ',',
        conflicts_with = "input",
        required_unless_present = "input"
    )]
    pub sizes: Vec<u64>,
    /// Corpus to draw from (repeatable). Line-aligned sides of one corpus are
    /// joined with commas, e.g. `train.en,train.liv`, and share the drawn lines.
    #[arg(long, value_name = "FILE[,FILE...]", requires = "out_dir")]
    pub input: Vec<String>,
    /// Total number of lines to draw (not needed for concat).
    #[arg(long, value_name = "N")]
    pub budget: Option<u64>,
    /// Directory receiving one sampled file per input, under the input's file name.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PostprocessArgs {
    /// System output, one sentence per line.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Where to write the processed lines.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Language of the text; the decimal-comma and repetition rules only apply to liv.
    #[arg(long, value_name = "LANG", default_value = "liv")]
    pub lang: String,
    /// Write 1-based numbers of lines that need regeneration here.
    #[arg(long, value_name = "FILE")]
    pub regen_out: Option<PathBuf>,
    /// N-gram length for the repetition check.
    #[arg(long, value_name = "N", default_value_t = 2)]
    pub ngram: usize,
    /// Consecutive repeats that flag a line.
    #[arg(long, value_name = "K", default_value_t = 4)]
    pub repeats: usize,
    /// Rules to switch off: nfc, https, unk, decimal-comma, repetition (comma separated).
    #[arg(long, value_name = "RULES", value_delimiter = ',')]
    pub disable: Vec<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(stdout) => {
            // a closed pipe (`livmt audit ... | head`) is not an error
            let mut lock = std::io::stdout().lock();
            match lock.write_all(stdout.as_bytes()).and_then(|()| lock.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    eprintln!("livmt: error: writing stdout: {e}");
                    ExitCode::from(2)
                }
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("livmt: error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
