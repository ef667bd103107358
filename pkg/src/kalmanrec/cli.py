"""Command-line entry point: ingest, synth, track, recommend, evaluate.

Every command reads an optional key=value config file, applies flag
overrides on top, writes its outputs plus a metadata JSON (config echo,
seed, input digests) into the output directory, and exits nonzero with a
one-line diagnostic on any error.  All randomness flows from the single
--seed value, so identical invocations produce identical delimited output.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__, evaluate, kalman, profiles, recommend, synth
from .config import RICCATI_MODES, RunConfig, build_config
from .statespace import assemble


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fp:
        for chunk in iter(lambda: fp.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _safe_name(user_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", user_id)


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"not JSON serializable: {type(value)}")


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, default=_jsonable) + "\n", encoding="utf-8")


def _write_metadata(out_dir: Path, command: str, cfg: RunConfig,
                    inputs: dict, extra: dict | None = None) -> None:
    meta = {
        "command": command,
        "version": __version__,
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "input_digests": {str(p): _sha256(Path(p)) for p in sorted(inputs)},
    }
    if extra:
        meta.update(extra)
    _write_json(out_dir / f"{command}_metadata.json", meta)


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require_file(path_str: str | None, what: str) -> Path:
    if path_str is None:
        raise ValueError(f"no {what} configured (use --{what} or the config file)")
    path = Path(path_str)
    if not path.is_file():
        raise FileNotFoundError(f"{what} file not found: {path}")
    return path


def _load_inputs(cfg: RunConfig):
    events_path = _require_file(cfg.events, "events")
    vocab_path = _require_file(cfg.vocab, "vocab")
    vocab = profiles.GenreVocabulary.from_file(vocab_path)
    events_by_user = profiles.group_by_user(profiles.load_events(events_path))
    if not events_by_user:
        raise ValueError(f"events file is empty: {events_path}")
    return events_path, vocab_path, vocab, events_by_user


def _series_for(cfg: RunConfig, vocab, user_events) -> profiles.ProfileSeries:
    window = cfg.window
    if window is None:
        window = profiles.derive_window(user_events, cfg.num_windows)
    return profiles.build_series(
        user_events,
        vocab,
        window,
        cfg.num_windows,
        normalize=cfg.normalize,
        full_threshold=cfg.credit_high,
        ignore_threshold=cfg.credit_low,
    )


def cmd_synth(cfg: RunConfig, args) -> int:
    out = _out_dir(cfg)
    steps = cfg.steps if cfg.steps is not None else cfg.num_windows
    if cfg.regime == synth.REGIME_MODEL_EXACT:
        raise ValueError(
            "regime model-exact produces unbounded trajectories and cannot be "
            "rendered as events; use piecewise-interest or random-walk"
        )
    if cfg.vocab is not None:
        vocab = profiles.GenreVocabulary.from_file(_require_file(cfg.vocab, "vocab"))
    else:
        vocab = synth.default_vocabulary(cfg.d)
    params = cfg.model_params(len(vocab))
    window_seconds = cfg.window if cfg.window is not None else synth.DEFAULT_WINDOW_SECONDS

    all_events = []
    user_seeds = {}
    for u in range(cfg.users):
        user_id = f"user{u:03d}"
        seed = synth.derived_seed(cfg.seed, u)
        user_seeds[user_id] = seed
        config = synth.SynthConfig(steps=steps, seed=seed, params=params, regime=cfg.regime)
        all_events.extend(
            synth.generate_events(
                config,
                vocab,
                user_id=user_id,
                events_per_window=cfg.events_per_window,
                window_seconds=window_seconds,
            )
        )
        states, _measurements = synth.generate_states(config)
        positions = states[:, : len(vocab)]
        with open(out / f"truth_{_safe_name(user_id)}.csv", "w", encoding="utf-8") as fp:
            synth.write_truth_csv(fp, vocab, positions)

    events_path = out / "events.jsonl"
    profiles.write_events(events_path, all_events)
    vocab_path = out / "vocabulary.txt"
    vocab_path.write_text("\n".join(vocab.names) + "\n", encoding="utf-8")
    _write_metadata(
        out, "synth", cfg, {},
        extra={
            "prng": synth.PRNG_INFO,
            "user_seeds": user_seeds,
            "steps": steps,
            "window_seconds": window_seconds,
            "outputs": sorted(p.name for p in out.iterdir() if p.suffix in (".csv", ".jsonl", ".txt")),
        },
    )
    print(f"synth: wrote {len(all_events)} events for {cfg.users} user(s) to {events_path}")
    return 0


def cmd_ingest(cfg: RunConfig, args) -> int:
    out = _out_dir(cfg)
    events_path, vocab_path, vocab, events_by_user = _load_inputs(cfg)
    report: dict = {"genres": len(vocab), "total_events": 0, "users": {}}
    for user_id in sorted(events_by_user):
        user_events = events_by_user[user_id]
        series = _series_for(cfg, vocab, user_events)
        non_empty = int(np.count_nonzero(series.vectors.any(axis=1)))
        report["users"][user_id] = {
            "events": len(user_events),
            "first_timestamp": min(ev.timestamp for ev in user_events),
            "last_timestamp": max(ev.timestamp for ev in user_events),
            "num_windows": len(series),
            "windows_with_events": non_empty,
        }
        report["total_events"] += len(user_events)
        print(
            f"ingest: {user_id}: {len(user_events)} events, "
            f"{non_empty}/{len(series)} windows with consumption"
        )
    _write_json(out / "ingest_report.json", report)
    _write_metadata(out, "ingest", cfg, {events_path, vocab_path})
    return 0


def cmd_track(cfg: RunConfig, args) -> int:
    out = _out_dir(cfg)
    events_path, vocab_path, vocab, events_by_user = _load_inputs(cfg)
    params = cfg.model_params(len(vocab))
    model = assemble(params)
    for user_id in sorted(events_by_user):
        series = _series_for(cfg, vocab, events_by_user[user_id])
        points = kalman.track(series, params, zero_as_measurement=cfg.zero_as_measurement)
        name = _safe_name(user_id)
        with open(out / f"trace_{name}.csv", "w", encoding="utf-8") as fp:
            kalman.write_trace_csv(fp, vocab, series, points, model)
        if cfg.figures and len(points) > 1:
            from . import figures

            predictions = kalman.predicted_positions(points[1:], model)
            actuals = series.vectors[1:]
            fig = figures.trace_figure(
                vocab,
                actuals,
                predictions,
                figures.top_genre_indices(actuals, cfg.top_genres),
                title=f"{user_id}: observed vs predicted interest",
            )
            figures.save_figure(fig, out / f"trace_{name}.png")
        print(f"track: {user_id}: {len(points)} instants -> trace_{name}.csv")
    _write_metadata(out, "track", cfg, {events_path, vocab_path})
    return 0


def cmd_evaluate(cfg: RunConfig, args) -> int:
    out = _out_dir(cfg)
    events_path, vocab_path, vocab, events_by_user = _load_inputs(cfg)
    params = cfg.model_params(len(vocab))
    model = assemble(params)
    summary = {}
    for user_id in sorted(events_by_user):
        series = _series_for(cfg, vocab, events_by_user[user_id])
        points = kalman.track(series, params, zero_as_measurement=cfg.zero_as_measurement)
        predictions = kalman.predicted_positions(points[1:], model)
        rep = evaluate.report(series, predictions, cfg.eval_threshold)
        name = _safe_name(user_id)
        _write_json(out / f"eval_{name}.json", {"user_id": user_id, **rep.to_dict()})
        with open(out / f"eval_{name}.csv", "w", encoding="utf-8") as fp:
            evaluate.write_report_csv(fp, rep)
        if cfg.figures:
            from . import figures

            fig = figures.distance_figure(rep, title=f"{user_id}: prediction distance")
            figures.save_figure(fig, out / f"distance_{name}.png")
        summary[user_id] = {
            "fraction_below": rep.fraction_below,
            "median_distance": rep.median_distance,
            "skipped_zero_actual": rep.skipped_zero_actual,
        }
        print(
            f"evaluate: {user_id}: fraction below {cfg.eval_threshold:g} = "
            f"{rep.fraction_below:.3f}, median = {rep.median_distance:.4f}"
        )
    _write_json(out / "evaluate_summary.json", summary)
    _write_metadata(out, "evaluate", cfg, {events_path, vocab_path})
    return 0


def cmd_recommend(cfg: RunConfig, args) -> int:
    out = _out_dir(cfg)
    events_path, vocab_path, vocab, events_by_user = _load_inputs(cfg)
    params = cfg.model_params(len(vocab))
    model = assemble(params)
    watched = []
    for chunk in args.watched or []:
        watched.extend(g.strip() for g in chunk.split(",") if g.strip())
    for user_id in sorted(events_by_user):
        series = _series_for(cfg, vocab, events_by_user[user_id])
        points = kalman.track(series, params, zero_as_measurement=cfg.zero_as_measurement)
        index = args.instant if args.instant >= 0 else len(points) + args.instant
        if not 0 <= index < len(points):
            raise ValueError(f"instant index {args.instant} out of range for {user_id}")
        calculated = series.vectors[index]
        estimated = kalman.predicted_position(points[index], model)
        rec = recommend.classify(recommend.deltas(calculated, estimated, vocab), cfg.tau)
        if watched:
            rec = recommend.refine(rec, watched, vocab)
        name = _safe_name(user_id)
        _write_json(
            out / f"recommendation_{name}.json",
            rec.to_dict(user_id, series.instants[index]),
        )
        promoted = ", ".join(g for g, _ in rec.promoted) or "(none)"
        demoted = ", ".join(g for g, _ in rec.demoted) or "(none)"
        print(f"recommend: {user_id}: promote [{promoted}] demote [{demoted}]")
    _write_metadata(out, "recommend", cfg, {events_path, vocab_path})
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="key=value config file")
    parser.add_argument("--out", help="output directory (default: out)")
    parser.add_argument("--seed", type=int, help="top-level random seed")
    parser.add_argument("--events", help="viewing events JSONL file")
    parser.add_argument("--vocab", help="genre vocabulary file, one name per line")
    parser.add_argument("--d", type=int, help="genre-space dimension (synth only)")
    parser.add_argument("--alpha", type=float, help="transition diagonal decay")
    parser.add_argument("--t-step", type=float, dest="t_step", help="mean observation interval")
    parser.add_argument("--q", type=float, help="process noise variance scale")
    parser.add_argument("--r", type=float, help="measurement noise variance scale")
    parser.add_argument("--p0", type=float, help="initial covariance scale")
    parser.add_argument("--riccati-q", choices=RICCATI_MODES, dest="riccati_q",
                        help="include or omit process noise in the covariance recursion")
    parser.add_argument("--zero-as-measurement", action=argparse.BooleanOptionalAction,
                        default=None, dest="zero_as_measurement",
                        help="condition on zero-consumption windows instead of skipping them")
    parser.add_argument("--window", type=float, help="window duration in seconds")
    parser.add_argument("--num-windows", type=int, dest="num_windows",
                        help="number of profile windows")
    parser.add_argument("--credit-low", type=float, dest="credit_low",
                        help="watched fraction below which an event earns no credit")
    parser.add_argument("--credit-high", type=float, dest="credit_high",
                        help="watched fraction above which an event earns full credit")
    parser.add_argument("--normalize", action=argparse.BooleanOptionalAction, default=None,
                        help="L1-normalize window profiles")
    parser.add_argument("--tau", type=float, help="promotion/demotion threshold")
    parser.add_argument("--threshold", type=float, dest="eval_threshold",
                        help="cosine distance quality threshold")
    parser.add_argument("--figures", action=argparse.BooleanOptionalAction, default=None,
                        help="render PNG figures next to the CSV output")
    parser.add_argument("--top-genres", type=int, dest="top_genres",
                        help="genres per trace figure")


_CONFIG_KEYS = (
    "out", "seed", "events", "vocab", "d", "alpha", "t_step", "q", "r", "p0",
    "riccati_q", "zero_as_measurement", "window", "num_windows", "credit_low",
    "credit_high", "normalize", "tau", "eval_threshold", "figures", "top_genres",
    "regime", "steps", "users", "events_per_window",
)


def _overrides_from(args: argparse.Namespace) -> dict:
    return {
        key: getattr(args, key)
        for key in _CONFIG_KEYS
        if getattr(args, key, None) is not None
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kalmanrec",
        description="Track genre-interest profiles with a Kalman predictor "
                    "and derive genre-level recommendations.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a synthetic event log and ground truth")
    _add_common(p_synth)
    p_synth.add_argument("--regime", choices=synth.REGIMES, help="trajectory regime")
    p_synth.add_argument("--steps", type=int, help="trajectory length (default: num-windows)")
    p_synth.add_argument("--users", type=int, help="number of synthetic users")
    p_synth.add_argument("--events-per-window", type=int, dest="events_per_window",
                         help="events generated per window")
    p_synth.set_defaults(func=cmd_synth)

    p_ingest = sub.add_parser("ingest", help="validate events and report window coverage")
    _add_common(p_ingest)
    p_ingest.set_defaults(func=cmd_ingest)

    p_track = sub.add_parser("track", help="run the predictor and write per-user traces")
    _add_common(p_track)
    p_track.set_defaults(func=cmd_track)

    p_rec = sub.add_parser("recommend", help="promoted/demoted genres from predicted shifts")
    _add_common(p_rec)
    p_rec.add_argument("--watched", action="append",
                       help="genre already watched today (repeatable, comma separated)")
    p_rec.add_argument("--instant", type=int, default=-1,
                       help="window index to recommend at (default: last)")
    p_rec.set_defaults(func=cmd_recommend)

    p_eval = sub.add_parser("evaluate", help="cosine-distance report of tracking quality")
    _add_common(p_eval)
    p_eval.set_defaults(func=cmd_evaluate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = build_config(args.config, _overrides_from(args))
        return args.func(cfg, args)
    except Exception as exc:
        print(f"kalmanrec: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
