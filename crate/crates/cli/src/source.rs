use std::fs;
use std::path::{Path, PathBuf};

use cptwb::numerics::json;
use cptwb::zoo::{ChannelSpec, Family};
use cptwb::{ChoiMatrix, ComplexMatrix, KrausChannel};
use serde::Serialize;
use serde_json::Value;

use crate::args::{ChannelArgs, SecondChannelArgs};
use crate::error::{CliError, CliResult};

/// Where a channel came from, echoed into every report.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum Source {
    Zoo(Box<ChannelSpec>),
    File { path: PathBuf, validated: bool },
}

pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn parse_cycles(text: &str) -> CliResult<Vec<Vec<usize>>> {
    text.split(';')
        .filter(|c| !c.trim().is_empty())
        .map(|c| {
            c.split(',')
                .map(|n| n.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad cycle label '{n}' in --cycles"))))
                .collect()
        })
        .collect()
}

fn load_unitaries(path: &Path) -> CliResult<Vec<ComplexMatrix>> {
    let raw: Vec<Vec<Vec<[f64; 2]>>> =
        serde_json::from_str(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(raw.iter().map(|m| json::decode(m)).collect::<cptwb::Result<_>>()?)
}

pub fn spec_from(args: &ChannelArgs, seed: u64) -> CliResult<Option<ChannelSpec>> {
    let Some(name) = &args.family else { return Ok(None) };
    let family: Family = name.parse().map_err(|e: cptwb::Error| CliError::Usage(e.to_string()))?;
    let mut spec = ChannelSpec::new(family);
    spec.dim = args.dim;
    spec.x = args.x;
    spec.epsilon = args.epsilon;
    spec.seed = seed;
    if let Some(path) = &args.unitaries_file {
        spec.unitaries = Some(load_unitaries(path)?);
    }
    if let Some(c) = &args.cycles {
        spec.cycles = Some(parse_cycles(c)?);
    }
    Ok(Some(spec))
}

pub fn channel(args: &ChannelArgs, seed: u64) -> CliResult<(KrausChannel, Source)> {
    match (&args.input, spec_from(args, seed)?) {
        (Some(_), Some(_)) => Err(CliError::Usage("give either --input or --family, not both".into())),
        (None, None) => Err(CliError::Usage("a channel is required: pass --family or --input".into())),
        (None, Some(spec)) => Ok((spec.build()?, Source::Zoo(Box::new(spec)))),
        (Some(path), None) => {
            let ch = KrausChannel::from_json(&read(path)?, !args.no_validate)?;
            Ok((ch, Source::File { path: path.clone(), validated: !args.no_validate }))
        }
    }
}

/// The second tensor factor; falls back to the first channel when nothing is given.
pub fn second(args: &SecondChannelArgs, first: &ChannelArgs, seed: u64) -> CliResult<Option<(KrausChannel, Source)>> {
    if args.family_b.is_none() && args.input_b.is_none() {
        return Ok(None);
    }
    let b = ChannelArgs {
        family: args.family_b.clone(),
        dim: args.dim_b,
        x: args.x_b,
        input: args.input_b.clone(),
        no_validate: first.no_validate,
        ..ChannelArgs::default()
    };
    channel(&b, seed).map(Some)
}

/// Matrix input for `decompose`.
pub enum Target {
    Channel(KrausChannel),
    Choi(ChoiMatrix),
    Block { matrix: ComplexMatrix, d1: Option<usize> },
}

/// Reads a channel (Kraus schema), a Choi matrix `{d_in, d_out, matrix}` or a bare
/// `{matrix, d1?}` from `--input`, or builds the channel from `--family`.
pub fn target(args: &ChannelArgs, seed: u64) -> CliResult<(Target, Source)> {
    let Some(path) = &args.input else {
        let (ch, src) = channel(args, seed)?;
        return Ok((Target::Channel(ch), src));
    };
    if args.family.is_some() {
        return Err(CliError::Usage("give either --input or --family, not both".into()));
    }
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let validate = !args.no_validate;
    let src = Source::File { path: path.clone(), validated: validate };
    let bad = |e: serde_json::Error| CliError::Input(format!("{}: {e}", path.display()));
    let target = if value.get("kraus").is_some() {
        Target::Channel(KrausChannel::from_json(&text, validate)?)
    } else if value.get("d_in").is_some() {
        let raw: ChoiMatrix = serde_json::from_value(value).map_err(bad)?;
        if validate {
            Target::Choi(ChoiMatrix::new(raw.d_in, raw.d_out, raw.matrix)?)
        } else {
            Target::Choi(raw)
        }
    } else {
        #[derive(serde::Deserialize)]
        struct Bare {
            matrix: Vec<Vec<[f64; 2]>>,
            d1: Option<usize>,
        }
        let raw: Bare = serde_json::from_value(value).map_err(bad)?;
        Target::Block { matrix: json::decode(&raw.matrix)?, d1: raw.d1 }
    };
    Ok((target, src))
}
