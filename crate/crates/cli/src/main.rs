//! JSON front end for the library: one subcommand per operation, input on
//! a file or standard input, output on a file or standard output.
//!
//! Exit codes: 0 on success, 1 when an operation rejects its input (a
//! domain error), 2 when the input does not parse or the command line is
//! malformed.

use clap::{Args, Parser, Subcommand};
use dst_core::code::{
    baire_to_cantor, build_universal, cantor_to_baire, dual, encode_field, eval, pair_index,
    unpair, BasicClopen, BorelCode, Point,
};
use dst_core::forcing::{
    palpha_extract, pi_eval, rasiowa_sikorski, silver_extract, verify_transcript, DenseSpec,
    PiSentence, Poset, SilverExtract, Transcript,
};
use dst_core::hierarchy::{hierarchy_levels, quotient, ring_levels, FiniteBA, SetFamily};
use dst_core::separation::{kleene_separate, product_tree, reduce_pair, restrict, TripleTree};
use dst_core::sweep::{run_all, CriterionResult};
use dst_core::tree::{
    embeds, fuse, leq_n, normal_form_tree, oplus, pair_rank_map, partial_rank_tree,
    perfect_kernel, perfect_skeleton, scale_tuple, BinTreeTrunc, FinTree, NormalFormTree,
    PairTree, ScaleTuple,
};
use dst_core::{OrdinalNotation, Seq};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dst", version, about = "Ranked trees, codes, and forcing runs over JSON")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Io {
    /// Input file; standard input when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rank a finite tree at every node.
    Rank(Io),
    /// Decide embeddability of one tree into another, with a witness.
    Embed(Io),
    /// The level product of two trees.
    Oplus(Io),
    /// The perfect kernel of a two-coordinate scheme.
    Kernel(Io),
    /// A full binary skeleton of a kernel, up to a level.
    Skeleton(Io),
    /// The scale tuple of a point against a ranked tree.
    Scale(Io),
    /// All partial rankings of a tree over the canonical listing.
    Prank(Io),
    /// The normal-form tree of a relation at a point.
    Nft(Io),
    /// Compare two binary truncations at a splitting level.
    Leqn(Io),
    /// Fuse a chain of binary truncations.
    Fuse(Io),
    /// Evaluate a code at a point.
    Eval(Io),
    /// The complement code within a coordinate window.
    Dual(Io),
    /// Embed a declared field of sets into binary points.
    EncodeField(Io),
    /// The pairing bijection of coordinates, in either direction.
    Pair(Io),
    /// Build a universal code and parameters for selected targets.
    Universal(Io),
    /// Block-code a point into binary, or decode it back.
    B2c(Io),
    /// Restrict a scheme to the nodes compatible with a pair.
    Restrict(Io),
    /// The common refinement of two schemes and its greatest depth.
    Product(Io),
    /// Separate the projections of two schemes by a code.
    Separate(Io),
    /// Reduce a pair of trees to the side of smaller rank.
    Reduce(Io),
    /// Run the canonical chain through the requested dense sets.
    Force(ForceArgs),
    /// Evaluate a negated-conjunction sentence and its rank.
    PiEval(Io),
    /// The difference hierarchy levels of a generating set.
    Levels(Io),
    /// The union-intersection closure chain of a ring of sets.
    RingLevels(Io),
    /// A field of sets modulo an ideal.
    Quotient(Io),
    /// Re-check every invariant of a recorded forcing run.
    VerifyTranscript(Io),
    /// Run the acceptance checks and print the pass/fail table.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ForceArgs {
    /// Poset description file.
    #[arg(long)]
    poset: PathBuf,
    /// File holding the list of dense-set requests.
    #[arg(long)]
    dense: PathBuf,
    /// Read a result off the final condition: "silver" or "palpha".
    #[arg(long)]
    extract: Option<String>,
    /// Tower height for the silver extraction.
    #[arg(long, default_value_t = 2)]
    levels: u32,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Suite to run; only "acceptance" exists.
    #[arg(long, default_value = "acceptance")]
    suite: String,
    /// Keep only the checks whose name contains this substring.
    #[arg(long)]
    only: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

enum CliError {
    /// Input did not parse or the request itself is unusable: exit 2.
    Malformed(String),
    /// A well-formed request the operation rejects: exit 1.
    Domain(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Malformed(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn read_to_string(path: &Option<PathBuf>) -> Result<String, CliError> {
    match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Malformed(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Malformed(format!("cannot read standard input: {e}")))?;
            Ok(s)
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    read_to_string(&Some(path.clone()))
}

fn parse<T: DeserializeOwned>(s: &str) -> Result<T, CliError> {
    serde_json::from_str(s).map_err(|e| CliError::Malformed(e.to_string()))
}

fn write_output<T: Serialize>(path: &Option<PathBuf>, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string(value)
        .map_err(|e| CliError::Domain(format!("cannot serialize the result: {e}")))?;
    text.push('\n');
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Domain(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Library precondition failures map to the domain exit code.
fn dom<T>(r: dst_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Domain(e.to_string()))
}

fn with_io<Req, Resp, F>(io: &Io, f: F) -> Result<(), CliError>
where
    Req: DeserializeOwned,
    Resp: Serialize,
    F: FnOnce(Req) -> Result<Resp, CliError>,
{
    let req: Req = parse(&read_to_string(&io.input)?)?;
    let resp = f(req)?;
    write_output(&io.output, &resp)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EmbedReq {
    t: FinTree,
    t_hat: FinTree,
    #[serde(default)]
    strict: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TreePairReq {
    t0: FinTree,
    t1: FinTree,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SkeletonReq {
    kernel: PairTree,
    k: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScaleReq {
    tree: FinTree,
    x: Point,
    n: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PrankReq {
    tree: FinTree,
    n: usize,
    bound: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NftReq {
    relation: Vec<(Seq, Seq)>,
    x: Point,
    depth: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LeqnReq {
    t: BinTreeTrunc,
    t_prime: BinTreeTrunc,
    n: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FuseReq {
    chain: Vec<BinTreeTrunc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EvalReq {
    code: BorelCode,
    x: Point,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DualReq {
    code: BorelCode,
    branching: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EncodeFieldReq {
    ids: Vec<String>,
    sets: Vec<Vec<String>>,
}

/// Either `n` and `m` to pair, or `k` to unpair.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairReq {
    n: Option<u32>,
    m: Option<u32>,
    k: Option<u128>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UniversalReq {
    levels: Vec<OrdinalNotation>,
    basis: Vec<BasicClopen>,
    depth: u32,
    #[serde(default)]
    targets: Vec<BorelCode>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct B2cReq {
    x: Point,
    #[serde(default)]
    inverse: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RestrictReq {
    tree: PairTree,
    s: Seq,
    t: Seq,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemePairReq {
    a: PairTree,
    b: PairTree,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReduceReq {
    a: FinTree,
    b: FinTree,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PiEvalReq {
    sentence: PiSentence,
    #[serde(default)]
    y: Vec<u32>,
    kappa: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelsReq {
    algebra: FiniteBA,
    c: Vec<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuotientReq {
    family: SetFamily,
    ideal: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct RankResp {
    root_rank: OrdinalNotation,
    ranks: Vec<(Seq, OrdinalNotation)>,
}

#[derive(Serialize)]
struct EmbedResp {
    embeds: bool,
    witness: Option<Vec<(Seq, Seq)>>,
}

#[derive(Serialize)]
struct OplusResp {
    product: PairTree,
    root_rank: OrdinalNotation,
}

#[derive(Serialize)]
struct KernelResp {
    kernel: PairTree,
    steps: u32,
}

#[derive(Serialize)]
struct SkeletonResp {
    map: Vec<(Seq, (Seq, Seq))>,
}

#[derive(Serialize)]
struct ScaleResp {
    listing: Vec<Seq>,
    tuple: ScaleTuple,
}

#[derive(Serialize)]
struct NftResp {
    accepted: bool,
    tree: Option<FinTree>,
}

#[derive(Serialize)]
struct PairResp {
    n: u32,
    m: u32,
    k: u128,
}

#[derive(Serialize)]
struct UniversalResp {
    code: BorelCode,
    branching: u32,
    parameters: Vec<Point>,
}

#[derive(Serialize)]
struct ProductResp {
    alive_depth: usize,
    product: TripleTree,
}

#[derive(Serialize)]
struct ForceResp {
    transcript: Transcript,
    #[serde(skip_serializing_if = "Option::is_none")]
    silver: Option<SilverExtract>,
    #[serde(skip_serializing_if = "Option::is_none")]
    palpha: Option<Vec<(Seq, u32)>>,
}

#[derive(Serialize)]
struct PiEvalResp {
    truth: bool,
    rank: OrdinalNotation,
}

#[derive(Serialize)]
struct VerifyResp {
    ok: bool,
    steps: usize,
}

fn run(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Rank(io) => with_io(&io, |t: FinTree| {
            Ok(RankResp {
                root_rank: t.root_rank(),
                ranks: t.rank_map().into_iter().collect(),
            })
        }),
        Cmd::Embed(io) => with_io(&io, |r: EmbedReq| {
            let (ok, witness) = embeds(&r.t, &r.t_hat, r.strict);
            Ok(EmbedResp { embeds: ok, witness: witness.map(|w| w.into_iter().collect()) })
        }),
        Cmd::Oplus(io) => with_io(&io, |r: TreePairReq| {
            let product = oplus(&r.t0, &r.t1);
            let root_rank = pair_rank_map(&product)[&(Seq::empty(), Seq::empty())].clone();
            Ok(OplusResp { product, root_rank })
        }),
        Cmd::Kernel(io) => with_io(&io, |t: PairTree| {
            let (kernel, steps) = perfect_kernel(&t);
            Ok(KernelResp { kernel, steps })
        }),
        Cmd::Skeleton(io) => with_io(&io, |r: SkeletonReq| {
            let map = dom(perfect_skeleton(&r.kernel, r.k))?;
            Ok(SkeletonResp { map: map.into_iter().collect() })
        }),
        Cmd::Scale(io) => with_io(&io, |r: ScaleReq| {
            Ok(ScaleResp {
                listing: dst_core::tree::canonical_listing(r.n + 1),
                tuple: scale_tuple(&r.tree, &r.x, r.n),
            })
        }),
        Cmd::Prank(io) => with_io(&io, |r: PrankReq| {
            Ok(serde_json::json!({ "rankings": partial_rank_tree(&r.tree, r.n, r.bound) }))
        }),
        Cmd::Nft(io) => with_io(&io, |r: NftReq| {
            let relation: BTreeSet<(Seq, Seq)> = r.relation.into_iter().collect();
            Ok(match normal_form_tree(&relation, &r.x, r.depth) {
                NormalFormTree::Rejected => NftResp { accepted: false, tree: None },
                NormalFormTree::Accepted(t) => NftResp { accepted: true, tree: Some(t) },
            })
        }),
        Cmd::Leqn(io) => with_io(&io, |r: LeqnReq| {
            Ok(serde_json::json!({ "holds": dom(leq_n(&r.t, &r.t_prime, r.n))? }))
        }),
        Cmd::Fuse(io) => with_io(&io, |r: FuseReq| {
            Ok(serde_json::json!({ "fused": dom(fuse(&r.chain))? }))
        }),
        Cmd::Eval(io) => with_io(&io, |r: EvalReq| {
            Ok(serde_json::json!({ "value": eval(&r.code, &r.x) }))
        }),
        Cmd::Dual(io) => with_io(&io, |r: DualReq| {
            Ok(serde_json::json!({ "code": dom(dual(&r.code, r.branching))? }))
        }),
        Cmd::EncodeField(io) => {
            with_io(&io, |r: EncodeFieldReq| dom(encode_field(&r.ids, &r.sets)))
        }
        Cmd::Pair(io) => with_io(&io, |r: PairReq| {
            let (n, m, k) = match (r.n, r.m, r.k) {
                (Some(n), Some(m), None) => {
                    let odd = 2 * m as u128 + 1;
                    if odd.leading_zeros() < n {
                        return Err(CliError::Domain(format!(
                            "pair ({n}, {m}) exceeds the 128-bit range"
                        )));
                    }
                    (n, m, pair_index(n, m))
                }
                (None, None, Some(k)) => {
                    if k == u128::MAX {
                        return Err(CliError::Domain("index exceeds the 128-bit range".into()));
                    }
                    let (n, m) = unpair(k);
                    (n, m, k)
                }
                _ => {
                    return Err(CliError::Malformed(
                        "give either \"n\" and \"m\", or \"k\" alone".into(),
                    ))
                }
            };
            Ok(PairResp { n, m, k })
        }),
        Cmd::Universal(io) => with_io(&io, |r: UniversalReq| {
            let u = dom(build_universal(&r.levels, r.basis, r.depth))?;
            let parameters = r
                .targets
                .iter()
                .map(|t| dom(u.encode(t)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(UniversalResp { code: u.code().clone(), branching: u.branching(), parameters })
        }),
        Cmd::B2c(io) => with_io(&io, |r: B2cReq| {
            let y = if r.inverse {
                dom(cantor_to_baire(&r.x))?
            } else {
                dom(baire_to_cantor(&r.x))?
            };
            Ok(serde_json::json!({ "y": y }))
        }),
        Cmd::Restrict(io) => {
            with_io(&io, |r: RestrictReq| Ok(restrict(&r.tree, &r.s, &r.t)))
        }
        Cmd::Product(io) => with_io(&io, |r: SchemePairReq| {
            let (product, alive_depth) = product_tree(&r.a, &r.b);
            Ok(ProductResp { alive_depth, product })
        }),
        Cmd::Separate(io) => with_io(&io, |r: SchemePairReq| dom(kleene_separate(&r.a, &r.b))),
        Cmd::Reduce(io) => with_io(&io, |r: ReduceReq| {
            Ok(serde_json::json!({ "side": reduce_pair(&r.a, &r.b) }))
        }),
        Cmd::Force(args) => {
            let poset: Poset = parse(&read_file(&args.poset)?)?;
            let specs: Vec<DenseSpec> = parse(&read_file(&args.dense)?)?;
            let transcript = dom(rasiowa_sikorski(&poset, &specs))?;
            let mut resp =
                ForceResp { transcript, silver: None, palpha: None };
            match args.extract.as_deref() {
                None => {}
                Some("silver") => {
                    resp.silver = Some(dom(silver_extract(&resp.transcript, args.levels))?)
                }
                Some("palpha") => {
                    resp.palpha =
                        Some(dom(palpha_extract(&resp.transcript))?.into_iter().collect())
                }
                Some(other) => {
                    return Err(CliError::Malformed(format!(
                        "unknown extraction {other:?}; use \"silver\" or \"palpha\""
                    )))
                }
            }
            write_output(&args.output, &resp)
        }
        Cmd::PiEval(io) => with_io(&io, |r: PiEvalReq| {
            let y: BTreeSet<u32> = r.y.into_iter().collect();
            let (truth, rank) = dom(pi_eval(&r.sentence, &y, r.kappa))?;
            Ok(PiEvalResp { truth, rank })
        }),
        Cmd::Levels(io) => with_io(&io, |r: LevelsReq| {
            let c: BTreeSet<u64> = r.c.into_iter().collect();
            dom(hierarchy_levels(&r.algebra, &c))
        }),
        Cmd::RingLevels(io) => with_io(&io, |f: SetFamily| dom(ring_levels(&f))),
        Cmd::Quotient(io) => {
            with_io(&io, |r: QuotientReq| dom(quotient(&r.family, &r.ideal)))
        }
        Cmd::VerifyTranscript(io) => with_io(&io, |t: Transcript| {
            dom(verify_transcript(&t))?;
            Ok(VerifyResp { ok: true, steps: t.chain.len() })
        }),
        Cmd::Sweep(args) => {
            if args.suite != "acceptance" {
                return Err(CliError::Malformed(format!(
                    "unknown suite {:?}; only \"acceptance\" exists",
                    args.suite
                )));
            }
            let rows: Vec<CriterionResult> = run_all(args.only.as_deref());
            write_output(&args.output, &rows)?;
            let failed = rows.iter().filter(|r| !r.pass).count();
            if failed > 0 {
                return Err(CliError::Domain(format!("{failed} acceptance checks failed")));
            }
            Ok(())
        }
    }
}
