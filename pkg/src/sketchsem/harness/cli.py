"""Command-line surface: dataset synthesis, training, inference, serving.

Every flag can also come from a ``--config`` file (TOML-style key = value);
an explicit flag wins over the file.  ``SKETCHSEM_SEED`` supplies the root
seed when neither gives one.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ..autodiff.seeding import root_seed
from ..embed.segnet import load_segnet, save_segnet, train_segnet
from ..embed.train import (
    DEFAULT_MULTIPLIERS,
    EmbedConfig,
    load_embed,
    reconstruct,
    save_embed,
    train_embed,
)
from ..embed.codes import fuse_codes, interpolate
from ..embed.generator import generate
from ..embed.losses import DEFAULT_LAMBDAS
from ..embed.raster import render_sketch_raster
from ..errors import ConfigError, SketchSemError
from ..pipeline import SegMap, extract_contour, extract_edges, merge_maps, simplify, thin, vectorize
from ..sketch import parse, serialize
from ..ssi.infer import label_sketch
from ..ssi.train import SsiConfig, load_ssi, save_ssi, train_ssi
from .config import load_config
from .dataset import embed_view, gen_toy_dataset, load_dataset, save_dataset, segnet_view
from .metrics import eval_embed, eval_ssi
from .pngio import image_to_png, png_to_grayscale, png_to_image
from .service import ServiceModels, serve


class Options:
    """Flag values with config-file fallback; None means "not given"."""

    def __init__(self, args: argparse.Namespace, cfg: dict):
        self.args = args
        self.cfg = cfg

    def get(self, name: str, default=None):
        v = getattr(self.args, name, None)
        if v is None:
            v = self.cfg.get(name, default)
        return v

    def require(self, name: str):
        v = self.get(name)
        if v is None:
            raise ConfigError(f"missing required option --{name.replace('_', '-')}")
        return v


def _say(msg: str) -> None:
    print(msg, flush=True)


# ---------------------------------------------------------------------------
# Commands


def cmd_gen_toy(opt: Options) -> int:
    out = Path(opt.require("out"))
    rates = {}
    for acc in ("hat", "glasses", "earring", "necklace"):
        v = opt.get(f"{acc}_rate")
        if v is not None:
            rates[acc] = float(v)
    ds = gen_toy_dataset(int(opt.get("n", 100)),
                         seed=root_seed(opt.get("seed")),
                         accessory_rates=rates or None,
                         canvas=int(opt.get("canvas", 96)))
    save_dataset(out, ds)
    _say(f"wrote {len(ds.train)} train + {len(ds.test)} test faces to {out}")
    return 0


def cmd_synth_dataset(opt: Options) -> int:
    seg_dir = Path(opt.require("seg"))
    img_dir = opt.get("img")
    out = Path(opt.require("out"))
    out.mkdir(parents=True, exist_ok=True)
    contour_only = bool(opt.get("contour_only", False))
    top_k = opt.get("simplify")
    if top_k is not None and int(top_k) not in (3, 10):
        raise ConfigError(f"--simplify must be 3 or 10, got {top_k}")
    n = 0
    for seg_path in sorted(seg_dir.glob("*.png")):
        seg = SegMap(png_to_grayscale(seg_path.read_bytes()))
        contour = extract_contour(seg)
        if contour_only or img_dir is None:
            raster = thin(contour)
        else:
            img_path = Path(img_dir) / seg_path.name
            if not img_path.exists():
                raise ConfigError(f"no paired image for {seg_path.name} in {img_dir}")
            raster = merge_maps(contour, extract_edges(png_to_image(img_path.read_bytes())))
        sketch = vectorize(raster)
        if top_k is not None:
            sketch = simplify(sketch, int(top_k))
        (out / f"{seg_path.stem}.json").write_text(serialize(sketch))
        n += 1
    if n == 0:
        raise ConfigError(f"no .png segmentation maps found in {seg_dir}")
    _say(f"synthesized {n} sketches into {out}")
    return 0


def cmd_train_ssi(opt: Options) -> int:
    ds = load_dataset(opt.require("data"))
    cfg = SsiConfig(
        lr=float(opt.get("lr", 0.001)),
        gamma=float(opt.get("gamma", 0.98)),
        batch_size=int(opt.get("batch_size", 10)),
        epochs=int(opt.get("epochs", 30)),
        k_nn=int(opt.get("k_nn", 5)),
        hidden=int(opt.get("hidden", 64)),
        layers=int(opt.get("layers", 3)),
        width=int(opt.get("width", 64)),
        hops=int(opt.get("hops", 3)),
        seed=root_seed(opt.get("seed")),
        augment=bool(opt.get("augment", True)),
        stop_accuracy=opt.get("stop_accuracy"),
    )
    train = [it.sketch for it in ds.train]
    held_out = [it.sketch for it in ds.test] or None
    ssem, stem, log = train_ssi(train, cfg, eval_dataset=held_out)
    for entry in log:
        _say(json.dumps(entry))
    save_ssi(opt.require("out"), ssem, stem, k_nn=cfg.k_nn)
    _say(f"saved classifier to {opt.require('out')}")
    return 0


def cmd_label(opt: Options) -> int:
    ssem, stem, meta = load_ssi(opt.require("model"))
    sketch = parse(Path(opt.require("input")).read_text())
    vote = not bool(opt.get("no_vote", False))
    labeled, confs = label_sketch(sketch, ssem, stem, int(meta.get("k_nn", 5)), vote=vote)
    out = opt.get("out")
    text = serialize(labeled)
    if out:
        Path(out).write_text(text)
        _say(f"labeled {len(labeled)} strokes -> {out}")
    else:
        _say(text)
    _say("confidences: " + json.dumps([round(c, 4) for c in confs]))
    return 0


def cmd_train_segnet(opt: Options) -> int:
    ds = load_dataset(opt.require("data"))
    images, maps = segnet_view(ds.train, int(opt.get("resolution", 32)))
    net, log = train_segnet(images, maps,
                            steps=int(opt.get("steps", 400)),
                            batch_size=int(opt.get("batch_size", 16)),
                            lr=float(opt.get("lr", 0.002)),
                            seed=root_seed(opt.get("seed")))
    _say(f"segnet loss {log[0]:.4f} -> {np.mean(log[-20:]):.4f}")
    save_segnet(opt.require("out"), net)
    _say(f"saved segnet to {opt.require('out')}")
    return 0


def cmd_train_embed(opt: Options) -> int:
    ds = load_dataset(opt.require("data"))
    segnet = load_segnet(opt.require("segnet"))
    lambdas = tuple(
        float(opt.get(f"lambda{i + 1}", DEFAULT_LAMBDAS[i])) for i in range(5))
    cfg = EmbedConfig(
        dim=int(opt.get("dim", 64)),
        resolution=int(opt.get("resolution", 32)),
        base_channels=int(opt.get("base_channels", 32)),
        lr=float(opt.get("lr", 0.001)),
        batch_size=int(opt.get("batch_size", 8)),
        steps=int(opt.get("steps", 2000)),
        seed=root_seed(opt.get("seed")),
        lambdas=lambdas,
        multipliers=DEFAULT_MULTIPLIERS,
    )
    items = embed_view(ds.train, cfg.resolution)
    model, log = train_embed(items, segnet, cfg)
    _say(f"embed loss {np.mean(log[:50]):.4f} -> {np.mean(log[-50:]):.4f} "
         f"over {len(log)} steps")
    save_embed(opt.require("out"), model)
    _say(f"saved embedder to {opt.require('out')}")
    return 0


def cmd_generate(opt: Options) -> int:
    model = load_embed(opt.require("model"))
    sketch = parse(Path(opt.require("sketch")).read_text())
    raster = render_sketch_raster(sketch, model.resolution)
    ref = opt.get("ref")
    face = None
    if ref is not None:
        face = png_to_image(Path(ref).read_bytes())
        if face.shape[-1] != model.resolution:
            from .dataset import box_downsample
            if face.shape[-1] % model.resolution:
                raise ConfigError(
                    f"reference size {face.shape[-1]} does not reduce to {model.resolution}")
            face = box_downsample(face, face.shape[-1] // model.resolution)
    image = reconstruct(model, raster, face=face, seed=root_seed(opt.get("seed")))
    out = Path(opt.require("out"))
    out.write_bytes(image_to_png(image))
    _say(f"wrote {model.resolution}x{model.resolution} face to {out}")
    return 0


def cmd_interpolate(opt: Options) -> int:
    model = load_embed(opt.require("model"))
    steps = int(opt.get("steps", 8))
    if steps < 1:
        raise ConfigError(f"--steps must be >= 1, got {steps}")
    seed = root_seed(opt.get("seed"))
    ws = []
    for key in ("a", "b"):
        sketch = parse(Path(opt.require(key)).read_text())
        raster = render_sketch_raster(sketch, model.resolution)
        ws.append(fuse_codes(model.encode(raster, seed=seed)).data)
    out_dir = Path(opt.require("out_dir"))
    out_dir.mkdir(parents=True, exist_ok=True)
    ts = [0.0] if steps == 1 else [i / (steps - 1) for i in range(steps)]
    for i, t in enumerate(ts):
        img = generate(interpolate(ws[0], ws[1], t), model.generator).data
        (out_dir / f"step_{i:02d}.png").write_bytes(image_to_png(img))
    _say(f"wrote {len(ts)} frames to {out_dir}")
    return 0


def cmd_eval(opt: Options) -> int:
    ds = load_dataset(opt.require("data"))
    reports: dict[str, dict] = {}
    ssi_path = opt.get("ssi")
    if ssi_path:
        ssem, stem, meta = load_ssi(ssi_path)
        rep = eval_ssi([it.sketch for it in ds.test], ssem, stem,
                       k_nn=int(meta.get("k_nn", 5)))
        reports["ssi"] = {
            "stroke_accuracy": rep.p_acc,
            "per_category": {str(k): v for k, v in rep.per_category.items()},
            "counts": rep.counts,
        }
    embed_path = opt.get("embed")
    if embed_path:
        model = load_embed(embed_path)
        segnet = load_segnet(opt.require("segnet"))
        rep = eval_embed(model, segnet, ds.test)
        reports["embed"] = {
            "p_acc": rep.p_acc,
            "chamfer": rep.chamfer,
            "counts": rep.counts,
        }
    if not reports:
        raise ConfigError("nothing to evaluate: pass --ssi and/or --embed")
    text = json.dumps(reports, indent=2)
    out = opt.get("out")
    if out:
        Path(out).write_text(text)
    _say(text)
    return 0


def cmd_serve(opt: Options) -> int:
    ssem, stem, meta = load_ssi(opt.require("ssi"))
    embed = None
    if opt.get("embed"):
        embed = load_embed(opt.get("embed"))
    models = ServiceModels(ssem, stem, k_nn=int(meta.get("k_nn", 5)), embed=embed)
    host = str(opt.get("host", "127.0.0.1"))
    port = int(opt.get("port", 8008))
    _say(f"serving on {host}:{port}")
    serve(models, host=host, port=port)
    return 0


def cmd_init_demo(opt: Options) -> int:
    """Tiny end-to-end bootstrap: dataset + fast checkpoints for the UI."""
    out = Path(opt.require("out"))
    out.mkdir(parents=True, exist_ok=True)
    seed = root_seed(opt.get("seed"))
    n = int(opt.get("n", 30))
    _say(f"rendering {n} faces...")
    ds = gen_toy_dataset(n, seed=seed)
    save_dataset(out / "toy", ds)
    _say("training stroke classifier (reduced size)...")
    cfg = SsiConfig(epochs=int(opt.get("epochs", 3)), hidden=16, layers=1,
                    width=24, batch_size=4, lr=0.01, seed=seed, augment=False)
    ssem, stem, _ = train_ssi([it.sketch for it in ds.train], cfg)
    save_ssi(out / "ssi.ckpt", ssem, stem, k_nn=cfg.k_nn)
    _say("training segnet + embedder (reduced size)...")
    images, maps = segnet_view(ds.train, 32)
    segnet, _ = train_segnet(images, maps, steps=int(opt.get("segnet_steps", 150)),
                             seed=seed)
    save_segnet(out / "segnet.ckpt", segnet)
    ecfg = EmbedConfig(dim=16, base_channels=16, widths=(12, 16),
                       steps=int(opt.get("embed_steps", 150)), seed=seed)
    model, _ = train_embed(embed_view(ds.train), segnet, ecfg)
    save_embed(out / "embed.ckpt", model)
    _say(f"demo artifacts in {out}: toy/ ssi.ckpt segnet.ckpt embed.ckpt")
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sketchsem",
                                description="semantic sketches and toy face generation")
    p.add_argument("--config", help="TOML-style key=value file with flag defaults")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, help_: str, *flags: str):
        sp = sub.add_parser(name, help=help_)
        for flag in flags:
            kw: dict = {}
            if flag in ("--contour-only", "--no-vote"):
                kw = {"action": "store_const", "const": True}
            elif flag == "--augment":
                kw = {"action": argparse.BooleanOptionalAction}
            elif flag in ("--lr", "--gamma", "--stop-accuracy", "--hat-rate",
                          "--glasses-rate", "--earring-rate", "--necklace-rate",
                          "--lambda1", "--lambda2", "--lambda3", "--lambda4",
                          "--lambda5"):
                kw = {"type": float}
            elif flag in ("--n", "--seed", "--canvas", "--epochs", "--batch-size",
                          "--k-nn", "--hidden", "--layers", "--width", "--hops",
                          "--steps", "--resolution", "--dim", "--base-channels",
                          "--port", "--simplify", "--segnet-steps", "--embed-steps"):
                kw = {"type": int}
            sp.add_argument(flag, default=None, **kw)
        return sp

    add("gen-toy", "render a seeded toy dataset",
        "--out", "--n", "--seed", "--canvas", "--hat-rate", "--glasses-rate",
        "--earring-rate", "--necklace-rate")
    add("synth-dataset", "sketches from segmentation maps (+ optional images)",
        "--seg", "--img", "--out", "--contour-only", "--simplify")
    add("train-ssi", "train the stroke classifier",
        "--data", "--out", "--seed", "--lr", "--gamma", "--batch-size", "--epochs",
        "--k-nn", "--hidden", "--layers", "--width", "--hops", "--stop-accuracy",
        "--augment")
    sp = add("label", "label a sketch file", "--model", "--out", "--no-vote")
    sp.add_argument("--in", dest="input", default=None)
    add("train-segnet", "pretrain the segmentation feature net",
        "--data", "--out", "--steps", "--batch-size", "--lr", "--seed", "--resolution")
    add("train-embed", "train the sketch-to-face embedder",
        "--data", "--segnet", "--out", "--steps", "--batch-size", "--lr", "--seed",
        "--resolution", "--dim", "--base-channels",
        "--lambda1", "--lambda2", "--lambda3", "--lambda4", "--lambda5")
    add("generate", "generate a face image from a labeled sketch",
        "--model", "--sketch", "--ref", "--seed", "--out")
    add("interpolate", "interpolate between two sketches",
        "--model", "--a", "--b", "--steps", "--seed", "--out-dir")
    add("eval", "evaluate checkpoints on a dataset's test split",
        "--data", "--ssi", "--embed", "--segnet", "--out")
    add("serve", "run the HTTP/WebSocket service",
        "--ssi", "--embed", "--host", "--port")
    add("init-demo", "tiny dataset + fast checkpoints for the UI",
        "--out", "--n", "--seed", "--epochs", "--segnet-steps", "--embed-steps")
    return p


_COMMANDS = {
    "gen-toy": cmd_gen_toy,
    "synth-dataset": cmd_synth_dataset,
    "train-ssi": cmd_train_ssi,
    "label": cmd_label,
    "train-segnet": cmd_train_segnet,
    "train-embed": cmd_train_embed,
    "generate": cmd_generate,
    "interpolate": cmd_interpolate,
    "eval": cmd_eval,
    "serve": cmd_serve,
    "init-demo": cmd_init_demo,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else {}
        return _COMMANDS[args.command](Options(args, cfg))
    except (SketchSemError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
