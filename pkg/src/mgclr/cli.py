"""Unified command-line entry point.

Exit codes: 0 success, 2 usage error (unknown flags/arguments),
3 configuration or input-validation failure. Every run writes exactly
one run manifest (config snapshot, seed, timestamps, artifact paths,
metric summary) next to its primary output; report paths also render
figures alongside the delimited output.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, replace
from pathlib import Path

import click
import numpy as np
import torch

from . import figures
from .augment import AugmentationConfig, AugmentationKind, apply_augmentation
from .checkpoint import load_checkpoint, load_module_state, module_state, save_checkpoint
from .contrastive import pretrain
from .dataset import DatasetFormatError, load_dataset, num_categories_of, write_dataset
from .evaluation import (
    ProbeSchedule,
    build_report,
    cross_subject_split,
    embed_samples,
    fuse_scores,
    train_probe_on_embeddings,
)
from .graph import GraphTopology, save_topology
from .presets import get_preset
from .rng import RandomStream
from .sequence import resample_sequence
from .spatial import SpatialEncoderConfig, build_spatial_model
from .synthdata import SynthSpec, generate
from .temporal import TemporalEncoderConfig, build_temporal_model


class ConfigError(click.ClickException):
    """Input/config validation failure -> exit 3, single-line error."""

    exit_code = 3

    def show(self, file=None):
        click.echo(json.dumps({"error": self.message, "exit_code": self.exit_code}),
                   err=True)


class RunManifest:
    def __init__(self, command: str, seed: int, config: dict):
        self.data = {
            "command": command,
            "seed": seed,
            "config": config,
            "started_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            "finished_at": None,
            "artifacts": [],
            "metrics": {},
        }

    def add_artifact(self, path) -> None:
        self.data["artifacts"].append(str(path))

    def finish(self, path, metrics: dict | None = None) -> None:
        if metrics:
            self.data["metrics"] = metrics
        self.data["finished_at"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
        Path(path).write_text(json.dumps(self.data, indent=2, sort_keys=True) + "\n")


def _manifest_path(primary_out) -> Path:
    primary_out = Path(primary_out)
    return primary_out.with_name(primary_out.stem + ".run.json")


@click.group()
@click.option("--seed", type=int, default=0, show_default=True,
              help="Root seed for every random stream downstream.")
@click.option("--deterministic/--no-deterministic", default=True, show_default=True,
              help="Single-threaded math for bit-reproducible runs.")
@click.pass_context
def main(ctx, seed, deterministic):
    """Micro-gesture contrastive learning toolkit."""
    ctx.ensure_object(dict)
    ctx.obj["seed"] = seed
    ctx.obj["deterministic"] = deterministic
    if deterministic:
        torch.set_num_threads(1)


def _load_json(path, what: str) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"{what} not found: {path}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what} is not valid JSON: {path}: {exc}")


def _load_samples(manifest_path):
    try:
        samples = load_dataset(manifest_path)
    except DatasetFormatError as exc:
        raise ConfigError(str(exc))
    if not samples:
        raise ConfigError(f"dataset is empty: {manifest_path}")
    return samples


def _split_samples(samples, split_path):
    spec = _load_json(split_path, "split file")
    if "train_subjects" not in spec:
        raise ConfigError(f"split file missing 'train_subjects': {split_path}")
    try:
        return cross_subject_split(samples, spec["train_subjects"],
                                   spec.get("test_subjects"))
    except ValueError as exc:
        raise ConfigError(str(exc))


# ---------------------------------------------------------------- synth-gen


@main.command("synth-gen")
@click.option("--spec", "spec_arg", default="default", show_default=True,
              help="'default', a preset name, or a path to a SynthSpec JSON.")
@click.option("--out", "out_arg", required=True, type=click.Path(),
              help="Output directory, or a manifest .json path.")
@click.option("--dry-run", is_flag=True)
@click.pass_context
def synth_gen(ctx, spec_arg, out_arg, dry_run):
    """Generate a synthetic labeled skeleton dataset."""
    if spec_arg == "default":
        spec = get_preset("imigue-desk").synth
    elif spec_arg in ("imigue-desk", "ntu-like-desk", "imigue-full", "ntu-full"):
        spec = get_preset(spec_arg).synth
    else:
        payload = _load_json(spec_arg, "synth spec")
        try:
            spec = SynthSpec(**payload)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid synth spec: {exc}")
    spec = replace(spec, seed=spec.seed + ctx.obj["seed"])
    out_arg = Path(out_arg)
    if out_arg.suffix == ".json":
        manifest_path = out_arg
        out_dir = out_arg.parent
    else:
        out_dir = out_arg
        manifest_path = out_dir / "manifest.json"
    topology_path = out_dir / "topology.json"
    if dry_run:
        click.echo(f"plan: generate {spec.num_categories * spec.samples_per_category} samples "
                   f"({spec.num_categories} categories) -> {manifest_path}")
        return
    run = RunManifest("synth-gen", ctx.obj["seed"], asdict(spec))
    samples = generate(spec)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_dataset(samples, manifest_path)
    save_topology(spec.topology(), topology_path)
    for p in (manifest_path, manifest_path.with_suffix(".bin"), topology_path):
        run.add_artifact(p)
    run.finish(_manifest_path(manifest_path), {"num_samples": len(samples)})
    click.echo(f"wrote {len(samples)} samples to {manifest_path}")


# ---------------------------------------------------------- augment-preview


@main.command("augment-preview")
@click.option("--in", "in_path", required=True, type=click.Path(), help="Input dataset manifest.")
@click.option("--kind", required=True, help="Augmentation kind name.")
@click.option("--seed", type=int, default=None,
              help="Override the global seed for this preview.")
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Output dataset manifest path.")
@click.option("--dry-run", is_flag=True)
@click.pass_context
def augment_preview(ctx, in_path, kind, seed, out_path, dry_run):
    """Apply one augmentation to every sample, for visual inspection."""
    try:
        aug_kind = AugmentationKind(kind)
    except ValueError:
        names = ", ".join(k.value for k in AugmentationKind)
        raise ConfigError(f"unknown augmentation kind '{kind}' (one of: {names})")
    samples = _load_samples(in_path)
    seed = ctx.obj["seed"] if seed is None else seed
    if dry_run:
        click.echo(f"plan: apply {aug_kind.value} to {len(samples)} samples -> {out_path}")
        return
    run = RunManifest("augment-preview", seed,
                      {"kind": aug_kind.value, "in": str(in_path)})
    root = RandomStream(seed)
    cfg = AugmentationConfig()
    augmented = []
    for i, sample in enumerate(samples):
        out_seq = apply_augmentation(sample.sequence, aug_kind, cfg, root.child(i))
        augmented.append(replace(sample, sequence=out_seq))
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_dataset(augmented, out_path)
    run.add_artifact(out_path)
    run.finish(_manifest_path(out_path), {"num_samples": len(augmented)})
    click.echo(f"wrote augmented dataset to {out_path}")


# ----------------------------------------------------------------- pretrain


_TRAIN_KEYS = {"stream", "dataset", "seed", "batch_size", "epochs", "queue_size",
               "temperature", "momentum", "lr", "weight_decay", "desk_scale",
               "split", "preset"}


def _resolve_train_config(config_path, overrides) -> dict:
    merged = {"desk_scale": True}
    if config_path:
        payload = _load_json(config_path, "training config")
        unknown = set(payload) - _TRAIN_KEYS
        if unknown:
            raise ConfigError(f"unknown training-config keys: {sorted(unknown)}")
        merged.update(payload)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    merged.setdefault("preset", "imigue-desk" if merged["desk_scale"] else "imigue-full")
    if "stream" not in merged or merged["stream"] not in ("spatial", "temporal"):
        raise ConfigError("training config needs stream: 'spatial' or 'temporal'")
    if "dataset" not in merged:
        raise ConfigError("training config needs a dataset manifest path")
    return merged


@main.command("pretrain")
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="Training config JSON; flags override its fields.")
@click.option("--dataset", type=click.Path(), default=None)
@click.option("--stream", type=click.Choice(["spatial", "temporal"]), default=None)
@click.option("--split", type=click.Path(), default=None,
              help="Cross-subject split JSON; pretrains on its train side.")
@click.option("--preset", default=None, help="Preset for defaults (imigue-desk, ...).")
@click.option("--epochs", type=int, default=None)
@click.option("--batch-size", type=int, default=None)
@click.option("--lr", type=float, default=None)
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Checkpoint output path.")
@click.option("--dry-run", is_flag=True)
@click.pass_context
def pretrain_cmd(ctx, config_path, dataset, stream, split, preset, epochs, batch_size,
                 lr, out_path, dry_run):
    """Momentum-contrastive pretext training for one stream."""
    merged = _resolve_train_config(
        config_path,
        {"dataset": dataset, "stream": stream, "split": split, "preset": preset,
         "epochs": epochs, "batch_size": batch_size, "lr": lr,
         "seed": ctx.obj["seed"] if ctx.obj["seed"] != 0 else None},
    )
    bundle = get_preset(merged["preset"])
    stream = merged["stream"]
    base = bundle.train_config(stream)
    cfg = replace(
        base,
        seed=int(merged.get("seed", 0)),
        batch_size=int(merged.get("batch_size", base.batch_size)),
        epochs=int(merged.get("epochs", base.epochs)),
        queue_size=int(merged.get("queue_size", base.queue_size)),
        loss_temperature=float(merged.get("temperature", base.loss_temperature)),
        key_momentum=float(merged.get("momentum", base.key_momentum)),
        learning_rate=float(merged.get("lr", base.learning_rate)),
        weight_decay=float(merged.get("weight_decay", base.weight_decay)),
    )
    samples = _load_samples(merged["dataset"])
    if merged.get("split"):
        samples, _ = _split_samples(samples, merged["split"])
        if not samples:
            raise ConfigError("split leaves no training samples")
    frames = bundle.spatial_encoder.frames
    samples = [
        replace(s, sequence=resample_sequence(s.sequence, frames))
        if s.sequence.num_frames != frames else s
        for s in samples
    ]
    joint_count = samples[0].sequence.num_joints

    if stream == "spatial":
        topo = bundle.synth.topology() if joint_count == bundle.synth.joints else None
        if topo is None:
            raise ConfigError(
                f"dataset joint count {joint_count} does not match preset topology"
            )
        enc_cfg = replace(bundle.spatial_encoder, frames=frames)
        build = lambda rng: build_spatial_model(enc_cfg, topo, rng)
        arch = {"stream": "spatial", "frames": frames,
                "config": asdict(enc_cfg),
                "topology": {"joint_count": topo.joint_count, "root": topo.root_joint,
                             "edges": sorted([list(e) for e in topo.edges])}}
    else:
        enc_cfg = replace(bundle.temporal_encoder, input_dim=joint_count * 3)
        build = lambda rng: build_temporal_model(enc_cfg, rng)
        arch = {"stream": "temporal", "frames": frames, "config": asdict(enc_cfg)}

    out_path = Path(out_path)
    loss_csv = out_path.with_name(out_path.stem + "_loss.csv")
    loss_png = out_path.with_name(out_path.stem + "_loss.png")
    if dry_run:
        click.echo(f"plan: pretrain {stream} stream on {len(samples)} samples, "
                   f"{cfg.epochs} epochs -> {out_path}")
        return
    run = RunManifest("pretrain", cfg.seed, {**merged, "resolved": asdict(cfg)})
    result = pretrain(samples, build, bundle.policy, cfg, aug_cfg=bundle.augmentation)

    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_checkpoint(out_path, arch, module_state(result.query))
    with open(loss_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "mean_loss"])
        for epoch, value in enumerate(result.epoch_losses):
            writer.writerow([epoch, f"{value:.10f}"])
    figures.save_loss_curve(result.epoch_losses, loss_png,
                            title=f"{stream} stream pretraining loss")
    for p in (out_path, loss_csv, loss_png):
        run.add_artifact(p)
    run.finish(_manifest_path(out_path), {
        "epochs": len(result.epoch_losses),
        "first_epoch_loss": result.epoch_losses[0],
        "final_loss": result.epoch_losses[-1],
        "stopped_early": result.stopped_early,
    })
    click.echo(f"pretrained {stream} stream: final loss "
               f"{result.epoch_losses[-1]:.4f} -> {out_path}")


def _rebuild_encoder(arch: dict, tensors: dict):
    rng = RandomStream(0)
    if arch["stream"] == "spatial":
        topo_spec = arch["topology"]
        topo = GraphTopology(
            joint_count=int(topo_spec["joint_count"]),
            edges=frozenset(tuple(e) for e in topo_spec["edges"]),
            root_joint=int(topo_spec["root"]),
        )
        cfg = SpatialEncoderConfig(**{**arch["config"],
                                      "channels": tuple(arch["config"]["channels"])})
        encoder, head = build_spatial_model(cfg, topo, rng)
    else:
        cfg = TemporalEncoderConfig(**arch["config"])
        encoder, head = build_temporal_model(cfg, rng)

    class _Query(torch.nn.Module):
        def __init__(self):
            super().__init__()
            self.encoder = encoder
            self.head = head

    query = _Query().to(torch.float32)
    load_module_state(query, tensors)
    return query.encoder, arch["stream"]


# -------------------------------------------------------------- linear-eval


def _write_scores_csv(path, video_ids, labels, scores):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["video_id", "label"] + [f"score_{i}" for i in range(scores.shape[1])])
        for vid, label, row in zip(video_ids, labels, scores):
            writer.writerow([vid, label] + [f"{v:.10f}" for v in row])


def _read_scores_csv(path):
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"scores file not found: {path}")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) < 3 or rows[0][0] != "video_id":
        raise ConfigError(f"not a scores file: {path}")
    ids = [r[0] for r in rows[1:]]
    labels = np.array([int(r[1]) for r in rows[1:]])
    scores = np.array([[float(v) for v in r[2:]] for r in rows[1:]])
    return ids, labels, scores


def _write_report(report, out_path, fmt, run):
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        out_path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    else:
        with open(out_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["metric", "value"])
            writer.writerow(["stream", report.stream])
            writer.writerow(["top1", f"{report.top1:.6f}"])
            writer.writerow(["top5", f"{report.top5:.6f}"])
            writer.writerow(["num_samples", report.num_samples])
    run.add_artifact(out_path)
    confusion_png = out_path.with_name(out_path.stem + "_confusion.png")
    percat_png = out_path.with_name(out_path.stem + "_per_category.png")
    figures.save_confusion_matrix(report.confusion, confusion_png,
                                  title=f"{report.stream}: confusion")
    figures.save_per_category_accuracy(report.per_category, percat_png,
                                       title=f"{report.stream}: per-category top-1")
    run.add_artifact(confusion_png)
    run.add_artifact(percat_png)


@main.command("linear-eval")
@click.option("--checkpoint", required=True, type=click.Path())
@click.option("--dataset", required=True, type=click.Path())
@click.option("--split", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--scores-out", type=click.Path(), default=None,
              help="Per-sample softmax scores CSV (default <out>_scores.csv).")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True)
@click.option("--dry-run", is_flag=True)
@click.pass_context
def linear_eval(ctx, checkpoint, dataset, split, out_path, scores_out, fmt, dry_run):
    """Frozen-encoder linear evaluation on a cross-subject split."""
    if not Path(checkpoint).is_file():
        raise ConfigError(f"checkpoint not found: {checkpoint}")
    samples = _load_samples(dataset)
    train, test = _split_samples(samples, split)
    if not train or not test:
        raise ConfigError("split produced an empty train or test side")
    if dry_run:
        click.echo(f"plan: probe on {len(train)} train / {len(test)} test samples -> {out_path}")
        return
    arch, tensors = load_checkpoint(checkpoint)
    encoder, stream = _rebuild_encoder(arch, tensors)
    frames = int(arch["frames"])
    train = [replace(s, sequence=resample_sequence(s.sequence, frames))
             if s.sequence.num_frames != frames else s for s in train]
    test = [replace(s, sequence=resample_sequence(s.sequence, frames))
            if s.sequence.num_frames != frames else s for s in test]

    run = RunManifest("linear-eval", ctx.obj["seed"], {
        "checkpoint": str(checkpoint), "dataset": str(dataset), "split": str(split),
    })
    num_categories = num_categories_of(samples)
    labels_tr = np.array([s.category for s in train])
    labels_te = np.array([s.category for s in test])
    emb_tr = embed_samples(encoder, train)
    emb_te = embed_samples(encoder, test)
    probe = train_probe_on_embeddings(emb_tr, labels_tr, num_categories,
                                      ProbeSchedule(), seed=ctx.obj["seed"])
    soft = probe.softmax_scores(emb_te)
    report = build_report(soft, labels_te, stream=stream)
    _write_report(report, out_path, fmt, run)

    scores_out = Path(scores_out) if scores_out else Path(out_path).with_name(
        Path(out_path).stem + "_scores.csv")
    _write_scores_csv(scores_out, [s.video_id for s in test], labels_te, soft)
    run.add_artifact(scores_out)
    run.finish(_manifest_path(out_path), {
        "top1": report.top1, "top5": report.top5,
        "train_samples": len(train), "test_samples": len(test),
    })
    click.echo(f"{stream} top-1 {report.top1:.2f}%, top-5 {report.top5:.2f}% -> {out_path}")


# ---------------------------------------------------------------- fuse-eval


@main.command("fuse-eval")
@click.option("--scores-a", required=True, type=click.Path(), help="First stream scores CSV.")
@click.option("--scores-b", required=True, type=click.Path(), help="Second stream scores CSV.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True)
@click.option("--dry-run", is_flag=True)
@click.pass_context
def fuse_eval(ctx, scores_a, scores_b, out_path, fmt, dry_run):
    """Sum two streams' softmax scores and report fused accuracy."""
    ids_a, labels_a, sa = _read_scores_csv(scores_a)
    ids_b, labels_b, sb = _read_scores_csv(scores_b)
    if ids_a != ids_b or not np.array_equal(labels_a, labels_b):
        raise ConfigError("score files disagree on sample ids or labels")
    if sa.shape != sb.shape:
        raise ConfigError(f"score shapes differ: {sa.shape} vs {sb.shape}")
    if dry_run:
        click.echo(f"plan: fuse {len(ids_a)} samples x {sa.shape[1]} categories -> {out_path}")
        return
    run = RunManifest("fuse-eval", ctx.obj["seed"],
                      {"scores_a": str(scores_a), "scores_b": str(scores_b)})
    try:
        fused = fuse_scores(sa, sb)
    except ValueError as exc:
        raise ConfigError(str(exc))
    report = build_report(fused, labels_a, stream="fused")
    _write_report(report, out_path, fmt, run)
    run.finish(_manifest_path(out_path), {"top1": report.top1, "top5": report.top5})
    click.echo(f"fused top-1 {report.top1:.2f}%, top-5 {report.top5:.2f}% -> {out_path}")


# ------------------------------------------------------------ emotion suite


def _chat_client(mock_dir, live, model, base_url):
    from .emotion import ChatClient

    if live and mock_dir:
        raise ConfigError("choose either --mock-dir or --live, not both")
    if not live and not mock_dir:
        raise ConfigError("emotion commands need --mock-dir DIR (tests) or --live")
    return ChatClient(mock=not live, fixture_dir=mock_dir, model=model, base_url=base_url)


@main.command("emo-mask")
@click.option("--transcript", "transcript_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--mock-dir", type=click.Path(), default=None)
@click.option("--live", is_flag=True, help="Call the configured chat endpoint.")
@click.option("--model", default="gpt-3.5-turbo", show_default=True)
@click.option("--base-url", default="https://api.openai.com/v1", show_default=True)
@click.option("--dry-run", is_flag=True)
@click.pass_context
def emo_mask(ctx, transcript_path, out_path, mock_dir, live, model, base_url, dry_run):
    """Mask outcome/identity information out of an interview transcript."""
    from .emotion import ParseError, load_transcript, mask_transcript

    if not Path(transcript_path).is_file():
        raise ConfigError(f"transcript not found: {transcript_path}")
    transcript = load_transcript(transcript_path)
    if dry_run:
        click.echo(f"plan: mask {len(transcript)} entries of {transcript.video_id} -> {out_path}")
        return
    client = _chat_client(mock_dir, live, model, base_url)
    run = RunManifest("emo-mask", ctx.obj["seed"], {
        "transcript": str(transcript_path), "mock": not live, "model": model,
    })
    try:
        masked = mask_transcript(transcript, client)
    except ParseError as exc:
        raise ConfigError(f"masking response unusable: {exc}")
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(json.dumps({
        "video_id": masked.video_id,
        "entries": [{"t": t, "text": text} for t, text in masked.entries],
    }, indent=2, ensure_ascii=False) + "\n")
    run.add_artifact(out_path)
    run.finish(_manifest_path(out_path), {"entries": len(masked)})
    click.echo(f"masked {len(masked)} entries -> {out_path}")


@main.command("emo-infer")
@click.option("--masked", "masked_path", required=True, type=click.Path())
@click.option("--mg", "mg_path", required=True, type=click.Path())
@click.option("--runs", type=int, default=5, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--mock-dir", type=click.Path(), default=None)
@click.option("--live", is_flag=True)
@click.option("--model", default="gpt-3.5-turbo", show_default=True)
@click.option("--base-url", default="https://api.openai.com/v1", show_default=True)
@click.option("--dry-run", is_flag=True)
@click.pass_context
def emo_infer(ctx, masked_path, mg_path, runs, out_path, mock_dir, live, model,
              base_url, dry_run):
    """Run the win/lose confidence inference for one video."""
    from .emotion import MaskedTranscript, ParseError, load_mg_log, run_inference

    payload = _load_json(masked_path, "masked transcript")
    masked = MaskedTranscript(
        video_id=str(payload["video_id"]),
        entries=tuple((float(e["t"]), str(e["text"])) for e in payload["entries"]),
    )
    if not Path(mg_path).is_file():
        raise ConfigError(f"MG event log not found: {mg_path}")
    mg = load_mg_log(mg_path)
    if mg.video_id != masked.video_id:
        raise ConfigError(
            f"video id mismatch: transcript {masked.video_id} vs events {mg.video_id}"
        )
    if dry_run:
        click.echo(f"plan: {runs} inference runs for {masked.video_id} -> {out_path}")
        return
    client = _chat_client(mock_dir, live, model, base_url)
    run = RunManifest("emo-infer", ctx.obj["seed"], {
        "masked": str(masked_path), "mg": str(mg_path), "runs": runs, "mock": not live,
    })
    try:
        results = run_inference(masked, mg, client, runs=runs)
    except ParseError as exc:
        raise ConfigError(f"inference response unusable: {exc}")
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(json.dumps({
        "video_id": masked.video_id,
        "ground_truth": mg.ground_truth,
        "runs": [
            {"text_only": {"win": r.text_only[0], "lose": r.text_only[1]},
             "text_mg": {"win": r.text_mg[0], "lose": r.text_mg[1]}}
            for r in results
        ],
    }, indent=2) + "\n")
    run.add_artifact(out_path)
    run.finish(_manifest_path(out_path), {"runs": len(results)})
    click.echo(f"{len(results)} inference runs -> {out_path}")


@main.command("emo-score")
@click.option("--results", "result_paths", required=True, multiple=True,
              type=click.Path(), help="Per-video result JSONs from emo-infer.")
@click.option("--k", "ks", default="1,3,5", show_default=True,
              help="Comma-separated run counts to average over.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True)
@click.option("--dry-run", is_flag=True)
@click.pass_context
def emo_score(ctx, result_paths, ks, out_path, fmt, dry_run):
    """Aggregate inference runs into Acc@k for both analysis modes."""
    from .emotion import InferenceResult, score_accuracy

    try:
        k_values = sorted({int(k) for k in ks.split(",") if k.strip()})
    except ValueError:
        raise ConfigError(f"bad --k list: {ks!r}")
    if not k_values:
        raise ConfigError("need at least one k")
    results, truth = {}, {}
    for path in result_paths:
        payload = _load_json(path, "results file")
        vid = str(payload["video_id"])
        truth[vid] = str(payload["ground_truth"])
        try:
            results[vid] = [
                InferenceResult(
                    text_only=(r["text_only"]["win"], r["text_only"]["lose"]),
                    text_mg=(r["text_mg"]["win"], r["text_mg"]["lose"]),
                )
                for r in payload["runs"]
            ]
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad results file {path}: {exc}")
    if dry_run:
        click.echo(f"plan: score {len(results)} videos at k={k_values} -> {out_path}")
        return
    run = RunManifest("emo-score", ctx.obj["seed"],
                      {"results": [str(p) for p in result_paths], "k": k_values})
    try:
        scores_by_k = {k: score_accuracy(results, truth, k) for k in k_values}
    except ValueError as exc:
        raise ConfigError(str(exc))
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    table = {
        "videos": sorted(results),
        "rows": {
            "masked_text_only": {f"acc@{k}": scores_by_k[k]["text_only"] for k in k_values},
            "masked_text_plus_mg": {f"acc@{k}": scores_by_k[k]["text_mg"] for k in k_values},
        },
    }
    if fmt == "json":
        out_path.write_text(json.dumps(table, indent=2) + "\n")
    else:
        with open(out_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["method"] + [f"acc@{k}" for k in k_values])
            writer.writerow(["masked_text_only"]
                            + [f"{scores_by_k[k]['text_only']:.6f}" for k in k_values])
            writer.writerow(["masked_text_plus_mg"]
                            + [f"{scores_by_k[k]['text_mg']:.6f}" for k in k_values])
    run.add_artifact(out_path)
    figure_path = out_path.with_name(out_path.stem + "_acc.png")
    figures.save_accuracy_at_k(scores_by_k, figure_path)
    run.add_artifact(figure_path)
    run.finish(_manifest_path(out_path),
               {f"acc@{k}": scores_by_k[k] for k in k_values})
    click.echo(f"scored {len(results)} videos -> {out_path}")


if __name__ == "__main__":
    main()
