"""Command-line entry point wiring the pipeline stages together.

Each subcommand is a thin wrapper over one library operation; `run` chains
select -> (optional) transliterate -> synth -> mix and writes every
intermediate manifest plus a machine-readable summary.

Exit codes: 0 success; 1 data or configuration problem (bad manifest, map,
policy, leakage); 2 command-line usage error; 3 TTS provider failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import corpus, evaluate, mix, pivot, plots, select, translit, ttsclient

EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 2
EXIT_PROVIDER = 3

log = logging.getLogger("pivotforge")

DATA_ERRORS = (
    corpus.ManifestError,
    translit.PhoneMapError,
    translit.UnmappedGraphemeError,
    select.SelectionError,
    pivot.DistanceError,
    mix.MixError,
    evaluate.EvalError,
    FileNotFoundError,
)


class StageError(Exception):
    """Wraps a pipeline stage failure with the stage name attached."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


def _write_json(path: Path, obj) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def _parse_voices(spec: str, provider: str, language: str) -> tuple[ttsclient.Voice, ...]:
    """Parse `id[:M|F],id2[:M|F],...`; gender defaults to F when omitted."""
    voices = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        voice_id, _, gender = part.partition(":")
        voices.append(
            ttsclient.Voice(
                provider=provider,
                voice_id=voice_id,
                language=language,
                gender=gender or "F",
            )
        )
    if not voices:
        raise corpus.ManifestError(f"no voices in {spec!r}")
    return tuple(voices)


def _parse_weights(spec: str | None) -> dict[str, float] | None:
    if spec is None:
        return None
    weights: dict[str, float] = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        facet, sep, value = part.partition("=")
        if not sep:
            raise pivot.DistanceError(f"weight {part!r} is not facet=value")
        try:
            weights[facet.strip()] = float(value)
        except ValueError:
            raise pivot.DistanceError(f"weight {part!r} has a non-numeric value") from None
    if not weights:
        raise pivot.DistanceError(f"no weights in {spec!r}")
    return weights


def _int_list(spec: str, what: str) -> list[int]:
    try:
        return [int(x) for x in spec.split(",") if x.strip() != ""]
    except ValueError:
        raise mix.MixError(f"{what} must be comma-separated integers, got {spec!r}") from None


# ---------------------------------------------------------------- subcommands


def cmd_ingest(args) -> int:
    m = corpus.load_manifest(args.input, format=args.format, split=args.split, language=args.language)
    out = corpus.save_manifest(m, args.out)
    log.info("ingested %d utterances -> %s", len(m.entries), out)
    print(out)
    return EXIT_OK


def cmd_stats(args) -> int:
    m = corpus.load_manifest(args.manifest)
    st = corpus.corpus_stats(m)
    print(json.dumps(st.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_split(args) -> int:
    m = corpus.load_manifest(args.manifest)
    parts = corpus.split_manifest(m, (args.train, args.val, args.test), seed=args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for part in parts:
        path = corpus.save_manifest(part, out_dir / f"{part.split}.jsonl")
        log.info("%s: %d utterances -> %s", part.split, len(part.entries), path)
        print(path)
    return EXIT_OK


def cmd_select(args) -> int:
    m = corpus.load_manifest(args.manifest)
    chosen = select.select_diverse(m, args.k, n=args.ngram)
    out = corpus.save_manifest(chosen, args.out)
    inv = select.unit_inventory(chosen, args.ngram)
    log.info("selected %d of %d texts covering %d %d-gram types -> %s",
             len(chosen.entries), len(m.entries), inv.type_count, args.ngram, out)
    print(out)
    return EXIT_OK


def cmd_translit(args) -> int:
    pm = translit.load_phone_map(args.map)
    if args.text is not None:
        print(translit.transliterate(args.text, pm, on_unmapped=args.on_unmapped))
        return EXIT_OK
    if args.manifest is None:
        raise corpus.ManifestError("provide --text or --manifest")
    m = corpus.load_manifest(args.manifest)
    if args.check:
        report = translit.coverage_check(pm, m)
        payload = {
            "complete": report.complete,
            "mapped": sorted(report.mapped),
            "unmapped": {c: report.unmapped[c] for c in sorted(report.unmapped)},
        }
        print(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False))
        return EXIT_OK if report.complete else EXIT_DATA
    if args.out is None:
        raise corpus.ManifestError("provide --out for manifest transliteration")
    rewritten = tuple(
        _rewrite_text(u, translit.transliterate(u.text, pm, on_unmapped=args.on_unmapped))
        for u in m.entries
    )
    out = corpus.save_manifest(
        corpus.Manifest(entries=rewritten, split=m.split, language=m.language), args.out
    )
    log.info("transliterated %d texts %s -> %s", len(rewritten), pm.target_language, pm.pivot_language)
    print(out)
    return EXIT_OK


def _rewrite_text(u: corpus.Utterance, text: str) -> corpus.Utterance:
    return dataclasses.replace(u, text=text)


def cmd_rank_pivots(args) -> int:
    table = pivot.load_distances(args.distances)
    candidates = [c for c in args.candidates.split(",") if c.strip()]
    ranking = pivot.rank_pivots(table, args.target, candidates, weights=_parse_weights(args.weights))
    facet_names = sorted({f for _, _, fs in ranking.scored for f in fs})
    lines = ["\t".join(["rank", "candidate", "composite"] + facet_names)]
    for i, (code, score, fs) in enumerate(ranking.scored, start=1):
        row = [str(i), code, f"{score:.6f}"] + [f"{fs[f]:.6f}" if f in fs else "" for f in facet_names]
        lines.append("\t".join(row))
    text = "\n".join(lines)
    print(text)
    for code, reason in ranking.unscorable:
        log.warning("unscorable candidate %s: %s", code, reason)
    if ranking.ties:
        log.info("tied groups: %s", "; ".join(",".join(g) for g in ranking.ties))
    if args.shortlist:
        print("shortlist\t" + ",".join(pivot.shortlist(ranking, args.shortlist)))
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        figure = Path(args.figure) if args.figure else Path(args.out).with_suffix(".png")
        plots.plot_ranking(ranking, figure)
        log.info("wrote %s and %s", args.out, figure)
    elif args.figure:
        plots.plot_ranking(ranking, Path(args.figure))
        log.info("wrote %s", args.figure)
    return EXIT_OK


def _synth_job(pool: corpus.Manifest, args, phone_map_path) -> tuple[ttsclient.SynthesisJob, bool]:
    transliterated = False
    texts = []
    if phone_map_path:
        pm = translit.load_phone_map(phone_map_path)
        if pm.target_language != (pool.language or pm.target_language):
            log.warning("map targets %s but pool language is %s", pm.target_language, pool.language)
        transliterated = True
        for u in pool.entries:
            texts.append((u.id, translit.transliterate(u.text, pm, on_unmapped=args.on_unmapped), True))
    else:
        for u in pool.entries:
            texts.append((u.id, u.text, False))
    voices = _parse_voices(args.voices, args.provider, args.pivot)
    target_language = args.target_language or pool.language or "und"
    return ttsclient.SynthesisJob(
        texts=tuple(texts),
        voices=voices,
        pivot_language=args.pivot,
        target_language=target_language,
    ), transliterated


def cmd_synth(args) -> int:
    pool = corpus.load_manifest(args.manifest)
    job, transliterated = _synth_job(pool, args, args.translit_map)
    out_dir = Path(args.out_dir)
    cache_dir = Path(args.cache_dir) if args.cache_dir else out_dir / "tts_cache"
    result = ttsclient.synthesize_corpus(job, cache_dir=cache_dir, parallelism=args.parallelism)
    out = corpus.save_manifest(result.manifest, out_dir / "synthetic.jsonl")
    summary = {
        "cache_hits": result.cache_hits,
        "failures": [{"id": uid, "error": err} for uid, err in result.failures],
        "pivot_language": job.pivot_language,
        "synthesized": len(result.manifest.entries),
        "target_language": job.target_language,
        "transliterated": transliterated,
        "voices": [v.voice_id for v in job.voices],
    }
    _write_json(out_dir / "synthesis_summary.json", summary)
    if result.failures:
        log.warning("%d of %d texts failed", len(result.failures), len(job.texts))
    log.info("synthesized %d utterances (%d cache hits) -> %s", len(result.manifest.entries), result.cache_hits, out)
    print(out)
    return EXIT_OK


def _resolve_policy(n: int, available: int, n_flag, dup_flag, synth_flag) -> mix.AugmentationPolicy:
    n = n_flag if n_flag is not None else n
    if dup_flag is None and synth_flag is None:
        return mix.recommend_policy(n, available)
    s = synth_flag if synth_flag is not None else min(mix.TARGET_RATIO * n, available, mix.SYNTHETIC_CEILING)
    if dup_flag is not None:
        d = dup_flag
    else:
        d = max(1, round(s / n)) if s else 1
    return mix.AugmentationPolicy(n, d, s, label=f"n{n}-s{s}-d{d}")


def cmd_mix(args) -> int:
    authentic = corpus.load_manifest(args.authentic)
    synthetic = corpus.load_manifest(args.synthetic) if args.synthetic else None
    available = len(synthetic.entries) if synthetic else 0
    policy = _resolve_policy(len(authentic.entries), available, args.n, args.dup, args.synth_count)
    training = mix.build_training_set(authentic, synthetic, policy, seed=args.seed)
    if args.check_against:
        holdouts = [corpus.load_manifest(p) for p in args.check_against.split(",") if p.strip()]
        leaked = mix.check_leakage(training, holdouts)
        if leaked:
            raise mix.MixError(f"{len(leaked)} training ids leak into holdouts: {leaked[:10]}")
    out = corpus.save_manifest(training, args.out)
    log.info("policy %s -> %d entries -> %s", policy.label, len(training.entries), out)
    print(out)
    return EXIT_OK


def cmd_grid(args) -> int:
    grid = mix.make_grid(
        _int_list(args.authentic_sizes, "authentic sizes"),
        _int_list(args.synthetic_sizes, "synthetic sizes"),
        _int_list(args.dup_factors, "duplication factors"),
    )
    payload = grid.to_list()
    if args.out:
        _write_json(Path(args.out), payload)
        figure = Path(args.figure) if args.figure else Path(args.out).with_suffix(".png")
        plots.plot_grid(grid, figure)
        log.info("wrote %d cells -> %s and %s", len(grid), args.out, figure)
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))
        if args.figure:
            plots.plot_grid(grid, Path(args.figure))
    log.info("grid has %d cells", len(grid))
    return EXIT_OK


def cmd_eval(args) -> int:
    refs = evaluate.read_text_table(args.refs)
    hyps = evaluate.read_text_table(args.hyps)
    pairs, missing_hyp, missing_ref = evaluate.join_by_id(refs, hyps)
    for rid in missing_hyp[:5]:
        log.warning("reference id %r has no hypothesis", rid)
    for rid in missing_ref[:5]:
        log.warning("hypothesis id %r has no reference", rid)
    if missing_hyp or missing_ref:
        log.warning("%d unmatched reference ids, %d unmatched hypothesis ids", len(missing_hyp), len(missing_ref))
    if not pairs:
        raise evaluate.EvalError("no reference/hypothesis pairs share an id")
    norm = evaluate.Normalization() if args.normalize else evaluate.RAW
    report = evaluate.evaluate_pairs(pairs, norm, threshold=args.threshold, relative=args.relative)
    if args.format == "tsv":
        text = report.tsv_row(args.label)
    else:
        text = json.dumps(report.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)
    print(text)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n", encoding="utf-8")
        figure = Path(args.figure) if args.figure else out.with_suffix(".png")
        plots.plot_per_char(report.per_char, report.outliers, figure,
                            threshold=args.threshold, relative=args.relative)
        log.info("wrote %s and %s", out, figure)
    elif args.figure:
        plots.plot_per_char(report.per_char, report.outliers, Path(args.figure),
                            threshold=args.threshold, relative=args.relative)
    return EXIT_OK


# ------------------------------------------------------------------ pipeline


@dataclass
class PipelineConfig:
    """Everything one end-to-end run needs; JSON file plus flag overrides."""

    target_language: str
    pivot_language: str
    authentic: str
    pool: str
    out_dir: str
    val: str | None = None
    test: str | None = None
    phone_map: str | None = None
    cache_dir: str | None = None
    provider: str = "mock"
    voices: str = "voice-a:F,voice-b:M"
    prompt_count: int | None = None
    ngram: int = 2
    n: int | None = None
    dup: int | None = None
    synth_count: int | None = None
    seed: int = 0
    parallelism: int = 4
    on_unmapped: str = "error"

    @classmethod
    def load(cls, path: str, overrides: dict) -> "PipelineConfig":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise corpus.ManifestError(f"unknown config keys: {sorted(unknown)}")
        raw.update({k: v for k, v in overrides.items() if v is not None})
        required = {"target_language", "pivot_language", "authentic", "pool", "out_dir"}
        missing = required - set(raw)
        if missing:
            raise corpus.ManifestError(f"config missing required keys: {sorted(missing)}")
        cfg = cls(**raw)
        for name in ("authentic", "pool", "phone_map", "val", "test"):
            value = getattr(cfg, name)
            if value is not None and not Path(value).exists():
                raise corpus.ManifestError(f"config path {name}={value!r} does not exist")
        return cfg

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Execute select -> (optional) transliterate -> synth -> mix.

    Writes each intermediate manifest under cfg.out_dir and returns the run
    summary dict.  Raises StageError with the failing stage's name.
    """
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def stage(name, fn):
        try:
            return fn()
        except StageError:
            raise
        except Exception as exc:
            raise StageError(name, exc) from exc

    authentic = stage("load", lambda: corpus.load_manifest(cfg.authentic))
    pool = stage("load", lambda: corpus.load_manifest(cfg.pool, split="pool"))

    k = cfg.prompt_count if cfg.prompt_count is not None else len(pool.entries)
    selected = stage("select", lambda: select.select_diverse(pool, k, n=cfg.ngram))
    corpus.save_manifest(selected, out_dir / "selected.jsonl")

    if cfg.phone_map:
        pm = stage("translit", lambda: translit.load_phone_map(cfg.phone_map))
        texts = stage(
            "translit",
            lambda: tuple(
                (u.id, translit.transliterate(u.text, pm, on_unmapped=cfg.on_unmapped), True)
                for u in selected.entries
            ),
        )
    else:
        texts = tuple((u.id, u.text, False) for u in selected.entries)
    prompts = [{"id": uid, "text": text, "transliterated": flag} for uid, text, flag in texts]
    (out_dir / "prompts.jsonl").write_text(
        "".join(json.dumps(p, sort_keys=True, ensure_ascii=False) + "\n" for p in prompts),
        encoding="utf-8",
    )

    voices = _parse_voices(cfg.voices, cfg.provider, cfg.pivot_language)
    job = ttsclient.SynthesisJob(
        texts=texts,
        voices=voices,
        pivot_language=cfg.pivot_language,
        target_language=cfg.target_language,
    )
    cache_dir = Path(cfg.cache_dir) if cfg.cache_dir else out_dir / "tts_cache"
    result = stage(
        "synth", lambda: ttsclient.synthesize_corpus(job, cache_dir=cache_dir, parallelism=cfg.parallelism)
    )
    synthetic = result.manifest
    corpus.save_manifest(synthetic, out_dir / "synthetic.jsonl")
    if result.failures:
        log.warning("synthesis failures: %d of %d", len(result.failures), len(job.texts))

    policy = stage(
        "mix",
        lambda: _resolve_policy(len(authentic.entries), len(synthetic.entries), cfg.n, cfg.dup, cfg.synth_count),
    )
    training = stage("mix", lambda: mix.build_training_set(authentic, synthetic, policy, seed=cfg.seed))
    holdouts = [corpus.load_manifest(p) for p in (cfg.val, cfg.test) if p]
    leaked = stage("mix", lambda: mix.check_leakage(training, holdouts))
    if leaked:
        raise StageError("mix", mix.MixError(f"{len(leaked)} training ids leak into holdouts: {leaked[:10]}"))
    corpus.save_manifest(training, out_dir / "training.jsonl")

    stats = corpus.corpus_stats(training)
    summary = {
        "authentic": len(authentic.entries),
        "cache_hits": result.cache_hits,
        "outputs": {
            "prompts": str(out_dir / "prompts.jsonl"),
            "selected": str(out_dir / "selected.jsonl"),
            "synthetic": str(out_dir / "synthetic.jsonl"),
            "training": str(out_dir / "training.jsonl"),
        },
        "pivot_language": cfg.pivot_language,
        "policy": policy.to_dict(),
        "pool": len(pool.entries),
        "selected": len(selected.entries),
        "synthesis_failures": [{"id": uid, "error": err} for uid, err in result.failures],
        "synthesized": len(synthetic.entries),
        "target_language": cfg.target_language,
        "training_entries": len(training.entries),
        "training_hours": stats.total_hours,
        "transliterated": bool(cfg.phone_map),
    }
    _write_json(out_dir / "config.resolved.json", cfg.to_dict())
    _write_json(out_dir / "run_summary.json", summary)
    return summary


def cmd_run(args) -> int:
    overrides = {
        "provider": args.provider,
        "seed": args.seed,
        "n": args.n,
        "dup": args.dup,
        "synth_count": args.synth_count,
        "out_dir": args.out_dir,
    }
    cfg = PipelineConfig.load(args.config, overrides)
    try:
        summary = run_pipeline(cfg)
    except StageError as exc:
        if isinstance(exc.cause, ttsclient.SynthesisError):
            log.error("%s", exc)
            return EXIT_PROVIDER
        if isinstance(exc.cause, DATA_ERRORS):
            log.error("%s", exc)
            return EXIT_DATA
        raise
    print(json.dumps(summary, indent=2, sort_keys=True, ensure_ascii=False))
    return EXIT_OK


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pivotforge",
        description="Pivot-language TTS data augmentation for low-resource ASR.",
    )
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="read a CSV/JSONL manifest and write canonical JSONL")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["jsonl", "csv"], default=None)
    p.add_argument("--split", default="train", choices=list(corpus.SPLITS))
    p.add_argument("--language", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", help="summary counts for a manifest")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("split", help="seeded train/val/test partition")
    p.add_argument("--manifest", required=True)
    p.add_argument("--train", type=int, required=True)
    p.add_argument("--val", type=int, required=True)
    p.add_argument("--test", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("select", help="greedy diverse prompt selection")
    p.add_argument("--manifest", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ngram", type=int, default=2, choices=[1, 2])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("translit", help="apply a phone map to text or a manifest")
    p.add_argument("--map", required=True)
    p.add_argument("--text", default=None)
    p.add_argument("--manifest", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--check", action="store_true", help="report map coverage instead of rewriting")
    p.add_argument("--on-unmapped", default="error", choices=["error", "keep", "drop"])
    p.set_defaults(func=cmd_translit)

    p = sub.add_parser("rank-pivots", help="order pivot candidates by typological distance")
    p.add_argument("--distances", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--candidates", required=True, help="comma-separated language codes")
    p.add_argument("--weights", default=None, help="facet=weight,... (default geographic=0.5,genetic=0.5)")
    p.add_argument("--shortlist", type=int, default=0)
    p.add_argument("--out", default=None, help="write the ranking TSV here (figure lands beside it)")
    p.add_argument("--figure", default=None)
    p.set_defaults(func=cmd_rank_pivots)

    p = sub.add_parser("synth", help="synthesize a prompt manifest through a TTS provider")
    p.add_argument("--manifest", required=True)
    p.add_argument("--pivot", required=True)
    p.add_argument("--voices", required=True, help="id[:M|F],id2[:M|F],...")
    p.add_argument("--provider", default="mock", choices=list(ttsclient.PROVIDERS))
    p.add_argument("--target-language", default=None)
    p.add_argument("--translit-map", default=None)
    p.add_argument("--on-unmapped", default="error", choices=["error", "keep", "drop"])
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--parallelism", type=int, default=4)
    p.add_argument("--out-dir", required=True,
                   help="directory for synthetic.jsonl and synthesis_summary.json")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("mix", help="build a duplicated+synthetic training manifest")
    p.add_argument("--authentic", required=True)
    p.add_argument("--synthetic", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--dup", type=int, default=None)
    p.add_argument("--synth-count", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check-against", default=None, help="comma-separated holdout manifests")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("grid", help="emit an experiment grid as JSON")
    p.add_argument("--authentic-sizes", required=True)
    p.add_argument("--synthetic-sizes", required=True)
    p.add_argument("--dup-factors", default="1")
    p.add_argument("--out", default=None)
    p.add_argument("--figure", default=None)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("eval", help="score hypotheses against references by id")
    p.add_argument("--refs", required=True)
    p.add_argument("--hyps", required=True)
    p.add_argument("--format", choices=["json", "tsv"], default="json")
    p.add_argument("--label", default=None, help="row label for tsv output")
    p.add_argument("--threshold", type=float, default=0.25)
    p.add_argument("--relative", action="store_true", help="outlier threshold relative to the mean")
    p.add_argument("--no-normalize", dest="normalize", action="store_false")
    p.add_argument("--out", default=None, help="write the report here (figure lands beside it)")
    p.add_argument("--figure", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("run", help="full pipeline: select, transliterate, synth, mix")
    p.add_argument("--config", required=True)
    p.add_argument("--provider", default=None, choices=list(ttsclient.PROVIDERS))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--dup", type=int, default=None)
    p.add_argument("--synth-count", type=int, default=None)
    p.add_argument("--out-dir", default=None, help="override the configured out_dir")
    p.set_defaults(func=cmd_run)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, args.log_level),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except DATA_ERRORS as exc:
        log.error("%s", exc)
        return EXIT_DATA
    except ttsclient.SynthesisError as exc:
        log.error("%s", exc)
        return EXIT_PROVIDER


if __name__ == "__main__":
    sys.exit(main())
