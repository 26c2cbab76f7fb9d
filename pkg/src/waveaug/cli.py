"""Command-line entry point: generate, augment, train, eval, report, selftest.

Experiment definitions live in JSON config files; flags cover only paths and
seed overrides. Every run drops a ``*_run.json`` reproducibility record (the
fully resolved config) beside its outputs. Failures exit nonzero with a
single ``error: ...`` line on stderr and remove any files the run created.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import augment as aug
from . import classifier as clf
from . import dataset_io as dio
from . import evaluation as ev
from . import synthesis as syn
from .frames import stack_frames


class _Tracker:
    """Remembers files created by this run so failures can clean them up."""

    def __init__(self):
        self.paths = []

    def dataset(self, path):
        self.paths += [str(path) + ".manifest", str(path) + ".iq"]
        return path

    def file(self, path):
        self.paths.append(str(path))
        return path

    def cleanup(self):
        for p in self.paths:
            for candidate in (p, p + ".tmp"):
                if os.path.exists(candidate):
                    try:
                        os.remove(candidate)
                    except OSError:
                        pass


def _write_record(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _resolve_profile(args):
    if args.profile:
        profile = syn.Profile.from_dict(_load_json(args.profile))
    else:
        profile = syn.PRESETS[args.preset]()
    if args.seed is not None:
        profile.master_seed = args.seed
    return profile


def cmd_generate(args, tracker):
    profile = _resolve_profile(args)
    name = args.name or profile.name
    os.makedirs(args.out, exist_ok=True)
    for split, (manifest, frames) in syn.synthesize_dataset(profile).items():
        path = tracker.dataset(os.path.join(args.out, f"{name}_{split}"))
        dio.write_dataset(manifest, frames, path)
    record = tracker.file(os.path.join(args.out, f"{name}_generate_run.json"))
    _write_record(record, {"command": "generate", "profile": profile.to_dict()})
    print(f"wrote {name}_train + {name}_test to {args.out}")
    return 0


def cmd_augment(args, tracker):
    plan = aug.AugmentationPlan.from_dict(_load_json(args.plan))
    if args.seed is not None:
        plan.master_seed = args.seed
    manifest, frames = dio.read_dataset(args.dataset)
    out_manifest, out_frames = aug.build_augmented_set(manifest, frames, plan)
    name = args.name or f"{os.path.basename(args.dataset)}_{plan.method.lower()}"
    os.makedirs(args.out, exist_ok=True)
    path = tracker.dataset(os.path.join(args.out, name))
    dio.write_dataset(out_manifest, out_frames, path)
    record = tracker.file(os.path.join(args.out, f"{name}_augment_run.json"))
    _write_record(record, {"command": "augment", "plan": plan.to_dict(),
                           "source": args.dataset,
                           "frames_in": len(frames), "frames_out": len(out_frames)})
    print(f"wrote {len(out_frames)} frames ({plan.method}) to {os.path.join(args.out, name)}")
    return 0


def cmd_train(args, tracker):
    cfg_doc = _load_json(args.config) if args.config else {}
    train_cfg = clf.TrainingConfig.from_dict(cfg_doc.get("training", {}))
    if args.seed is not None:
        train_cfg.seed = args.seed
    manifest, frames = dio.read_dataset(args.dataset)
    x, labels, _ = stack_frames(frames)
    model_doc = dict(cfg_doc.get("model", {}))
    model_doc.setdefault("n_classes", len(manifest.labels))
    model_doc.setdefault("length", manifest.length)
    if "widths" in model_doc:
        model_doc["widths"] = tuple(model_doc["widths"])
    spec = clf.ModelSpec(**model_doc)
    rng = np.random.default_rng(train_cfg.seed)
    model = clf.IqClassifier(spec, rng)
    history = clf.train(model, x, labels, train_cfg, rng)
    os.makedirs(args.out, exist_ok=True)
    model_path = tracker.file(os.path.join(args.out, "model.npz"))
    clf.save_model(model, model_path)
    hist_path = tracker.file(os.path.join(args.out, "loss_history.json"))
    _write_record(hist_path, {"loss": history})
    record = tracker.file(os.path.join(args.out, "train_run.json"))
    _write_record(record, {
        "command": "train", "dataset": args.dataset,
        "training": train_cfg.to_dict(),
        "model": {**model_doc, "widths": list(spec.widths)},
        "final_loss": history[-1],
    })
    print(f"trained {train_cfg.epochs} epochs, final loss {history[-1]:.4f}")
    return 0


def cmd_eval(args, tracker):
    model = clf.load_model(args.model)
    manifest, frames = dio.read_dataset(args.dataset)
    x, labels, snrs = stack_frames(frames)
    report = ev.evaluate(model, x, labels, snrs, manifest.labels,
                         metadata={"model": args.model, "dataset": args.dataset})
    os.makedirs(args.out, exist_ok=True)
    for name in ev.save_report(report, args.out):
        tracker.file(os.path.join(args.out, name))
    record = tracker.file(os.path.join(args.out, "eval_run.json"))
    _write_record(record, {"command": "eval", "model": args.model,
                           "dataset": args.dataset})
    print(f"overall_accuracy={report.overall:.6f} frames={len(frames)}")
    return 0


def cmd_report(args, tracker):
    named = []
    for spec in args.run:
        if "=" not in spec:
            raise ValueError(f"--run expects name=evaldir, got {spec!r}")
        name, directory = spec.split("=", 1)
        named.append((name, _load_json(os.path.join(directory, "report.json"))))
    table = ev.comparison_table(named)
    os.makedirs(args.out, exist_ok=True)
    path = tracker.file(os.path.join(args.out, "comparison.tsv"))
    with open(path, "w") as fh:
        fh.write(table)
    sys.stdout.write(table)
    return 0


def _suite_filters():
    from . import wavelets as wv

    for name in wv.SUPPORTED_BASES:
        b = wv.basis(name)
        if b.kind == "orthogonal":
            assert abs(b.lo_d.sum() - np.sqrt(2)) < 1e-10
            assert abs((b.lo_d ** 2).sum() - 1.0) < 1e-10
            signs = (-1.0) ** np.arange(b.taps)
            assert np.max(np.abs(b.hi_d - signs * b.lo_d[::-1])) == 0.0
    coif = wv.basis("coif3")
    n = np.arange(coif.taps, dtype=float)
    moments = [abs(float(np.dot(n ** k, coif.hi_d))) for k in range(6)]
    assert max(moments) < 1e-6, moments
    return f"5 bases validated; max coif3 moment {max(moments):.2e}"


def _suite_reconstruction():
    from . import wavelets as wv

    rng = np.random.default_rng(0)
    worst = 0.0
    for name in wv.SUPPORTED_BASES:
        for depth in range(1, 6):
            for _ in range(4):
                x = rng.standard_normal((2, 1024))
                y = wv.reconstruct(wv.decompose(x, name, depth))
                worst = max(worst, float(np.max(np.abs(y - x))))
    assert worst < 1e-8, worst
    return f"round-trip max error {worst:.2e}"


def _suite_power():
    from . import wavelets as wv

    rng = np.random.default_rng(1)
    x = rng.standard_normal((2, 256))
    coeffs = wv.decompose(x, "haar", 3)
    band = 1
    beta = float(np.sum(coeffs.details[band] ** 2))
    n = coeffs.details[band].shape[0]
    energies = []
    for k in range(400):
        edited = aug.replace_detail(coeffs, band, "rnsr", np.random.default_rng(k))
        energies.append(float(np.sum(edited.details[band] ** 2)))
    mean_ratio = np.mean(energies) / (beta * n)
    assert abs(mean_ratio - 1.0) < 0.05, mean_ratio
    exact = aug.replace_detail(coeffs, band, "rnsr", np.random.default_rng(7),
                               power_mode="energy_exact")
    rel = abs(float(np.sum(exact.details[band] ** 2)) - beta) / beta
    assert rel < 1e-10, rel
    return f"elementwise-mode mean energy ratio {mean_ratio:.3f}; exact-mode rel err {rel:.1e}"


def _suite_counts():
    from .frames import IqFrame

    rng = np.random.default_rng(2)
    frames = [IqFrame(rng.standard_normal((2, 64)).astype(np.float32), 0, 0.0)
              for _ in range(3)]
    manifest = dio.manifest_for(frames, ["X"], [0], "train", 64)
    for method, d, e, w in [("AZSR", 2, 1, 1), ("RNSR", 4, 3, 1),
                            ("RNSR_MW", 1, 3, 5), ("FLIP", 1, 1, 1),
                            ("SEGCS", 2, 1, 1), ("SEGMC", 2, 1, 1)]:
        wavelets = ["haar", "db5", "sym5", "coif3", "rbio1.1"][:w]
        plan = aug.AugmentationPlan(method=method, operations=d, depth=e,
                                    wavelets=wavelets, seg_k=2)
        _, out = aug.build_augmented_set(manifest, frames, plan)
        assert len(out) == plan.expected_count(3)
    return "count contracts hold on the toy set"


def _suite_gradients():
    report = clf.grad_check()
    assert report["passed"], report["offenders"][:3]
    return f"max relative gradient error {report['max_rel_error']:.2e}"


_SUITES = {
    "filters": _suite_filters,
    "reconstruction": _suite_reconstruction,
    "power": _suite_power,
    "counts": _suite_counts,
    "gradients": _suite_gradients,
}


def cmd_selftest(args, tracker):
    names = args.suite or list(_SUITES)
    failed = False
    for name in names:
        start = time.time()
        try:
            detail = _SUITES[name]()
            print(f"PASS {name}: {detail} ({time.time() - start:.1f}s)")
        except Exception as exc:  # report and keep going
            failed = True
            print(f"FAIL {name}: {type(exc).__name__}: {exc}")
    return 1 if failed else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="waveaug",
        description="Radio IQ dataset synthesis, wavelet detail-replacement "
                    "augmentation, and classifier evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="synthesize a labeled IQ dataset")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(syn.PRESETS))
    src.add_argument("--profile", help="profile JSON file")
    p.add_argument("--out", required=True)
    p.add_argument("--name", help="output basename (default: profile name)")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("augment", help="augment a training split")
    p.add_argument("--plan", required=True, help="augmentation plan JSON file")
    p.add_argument("--dataset", required=True, help="dataset path without extension")
    p.add_argument("--out", required=True)
    p.add_argument("--name")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("train", help="train the classifier on a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--config", help="JSON with 'training' and 'model' sections")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a trained model on a test split")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", help="side-by-side comparison of eval outputs")
    p.add_argument("--run", action="append", required=True,
                   help="name=evaldir (repeatable)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("selftest", help="run the built-in invariant suites")
    p.add_argument("--suite", action="append", choices=sorted(_SUITES))
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    tracker = _Tracker()
    try:
        return args.func(args, tracker)
    except Exception as exc:
        tracker.cleanup()
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
