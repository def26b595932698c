"""Command-line interface: ``fidelity-qnn {train,init,eval,predict,inspect}``.

Exit codes: 0 success, 2 usage, 3 checkpoint, 4 input shape, 5 data format.

Metrics lines written by ``train --metrics-out`` are JSON objects with the
keys ``epoch``, ``class_loss`` (list, one entry per class),
``train_accuracy``, ``eval_accuracy`` (null without a held-out split) and
``wall_ms``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import checkpoint
from .dataprep import (
    Dataset,
    build_data_circuit,
    encode,
    load_iris,
    load_mnist,
    select_classes,
    stratified_split,
    stratified_subsample,
)
from .errors import (
    CheckpointError,
    ConfigurationError,
    DataFormatError,
    DimensionError,
    DomainError,
    ParameterError,
)
from .fidelity import build_swap_test
from .model import build_model_circuit, learned_state, parse_stack
from .statevec import prob_of
from .trainer import TrainConfig, class_fidelities, classify_fidelities, confusion, evaluate, initialize, train

EXIT_OK, EXIT_USAGE, EXIT_CHECKPOINT, EXIT_SHAPE, EXIT_DATA = 0, 2, 3, 4, 5

DEFAULT_MNIST_DIR = Path("data/mnist-5k")

log = logging.getLogger("fidelity_qnn")


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------- argument types


def _stack_arg(value):
    try:
        parse_stack(value)
    except ConfigurationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return value


def _shots_arg(value):
    if value == "exact":
        return None
    try:
        shots = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--shots takes a positive integer or 'exact', got {value!r}") from None
    if shots < 1:
        raise argparse.ArgumentTypeError("--shots must be positive")
    return shots


def _int_list(value):
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {value!r}") from None


def _add_data_args(p, for_eval=False):
    g = p.add_argument_group("data")
    default = None if for_eval else "iris"
    g.add_argument("--dataset", choices=("iris", "mnist"), default=default)
    g.add_argument("--iris-path", help="Iris CSV (defaults to the bundled copy)")
    g.add_argument("--mnist-images", help=f"IDX3 image file (default {DEFAULT_MNIST_DIR}/images-idx3-ubyte.gz)")
    g.add_argument("--mnist-labels", help=f"IDX1 label file (default {DEFAULT_MNIST_DIR}/labels-idx1-ubyte.gz)")
    g.add_argument("--classes", type=_int_list, help="keep only these label ids, e.g. 3,6")
    g.add_argument("--split", type=float, default=None if for_eval else 0.8, help="stratified train fraction")
    g.add_argument("--train-per-class", type=int, help="fixed per-class training subsample (overrides --split)")
    g.add_argument("--test-per-class", type=int, help="fixed per-class held-out subsample")
    g.add_argument("--seed", type=int, default=None if for_eval else 0)


def _add_model_args(p):
    g = p.add_argument_group("model")
    g.add_argument("--stack", type=_stack_arg, default="QC-S", help="QC-S, QC-D, QC-E, QC-SD, QC-SDE or e.g. S,D,E,S")
    g.add_argument("--pairing", choices=("chain", "all"), default="chain")
    g.add_argument("--encode", choices=("2per", "1per"), default="2per")
    g.add_argument("--pca", type=int, metavar="K")
    g.add_argument("--lr", type=float, default=0.01)
    g.add_argument("--epochs", type=int, default=25)
    g.add_argument("--shots", type=_shots_arg, default=None, help="N or 'exact' (default)")
    g.add_argument("--negative-sampling", action="store_true")
    g.add_argument("--synchronous", action="store_true", help="apply all of a sample's gradients at once")
    g.add_argument("--jobs", type=int, default=1, help="threads for synchronous gradient evaluation")
    p.add_argument("--out", default="model.qc", help="checkpoint path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fidelity-qnn", description="SWAP-test fidelity classifier on a statevector simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a classifier and write a checkpoint")
    _add_data_args(p)
    _add_model_args(p)
    p.add_argument("--metrics-out", help="write one JSON line per epoch")

    p = sub.add_parser("init", help="write an untrained (freshly initialized) checkpoint")
    _add_data_args(p)
    _add_model_args(p)

    p = sub.add_parser("eval", help="accuracy and confusion counts of a checkpoint")
    p.add_argument("--model", required=True)
    _add_data_args(p, for_eval=True)
    p.add_argument("--on", choices=("test", "train", "all"), default="test", help="which part of the split")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("predict", help="classify feature rows")
    p.add_argument("--model", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--row", help="comma-separated raw features")
    src.add_argument("--input", help="file with one comma-separated feature row per line")
    p.add_argument("--json", action="store_true")
    p.add_argument("--dump-circuit", metavar="PATH", help="write the class-0 SWAP-test circuit of the first row")

    p = sub.add_parser("inspect", help="dump learned states as JSON")
    p.add_argument("--model", required=True)
    p.add_argument("--qubit", type=int, help="only report this qubit's marginal probabilities")
    p.add_argument("--out", help="write JSON here instead of stdout")
    return parser


# ---------------------------------------------------------------- data plumbing


def _data_source(args, saved: dict | None = None) -> dict:
    saved = saved or {}

    def pick(name, default=None):
        value = getattr(args, name, None)
        return value if value is not None else saved.get(name, default)

    src = {
        "dataset": pick("dataset", "iris"),
        "classes": pick("classes"),
        "split": pick("split", 0.8),
        "train_per_class": pick("train_per_class"),
        "test_per_class": pick("test_per_class"),
        "seed": pick("seed", 0),
    }
    if src["dataset"] == "iris":
        path = pick("iris_path")
        src["iris_path"] = str(Path(path).resolve()) if path else None
    else:
        images = pick("mnist_images") or str(DEFAULT_MNIST_DIR / "images-idx3-ubyte.gz")
        labels = pick("mnist_labels") or str(DEFAULT_MNIST_DIR / "labels-idx1-ubyte.gz")
        src["mnist_images"] = str(Path(images).resolve())
        src["mnist_labels"] = str(Path(labels).resolve())
    return src


def _load_split(src: dict):
    try:
        if src["dataset"] == "iris":
            data = load_iris(src.get("iris_path"))
        else:
            data = load_mnist(src["mnist_images"], src["mnist_labels"])
    except FileNotFoundError as exc:
        raise CliError(f"data file not found: {exc.filename}", EXIT_DATA) from None
    if src.get("classes"):
        data = select_classes(data, src["classes"])
    if src.get("train_per_class"):
        return stratified_subsample(data, src["train_per_class"], src.get("test_per_class") or 0, src["seed"])
    return stratified_split(data, src["split"], src["seed"])


def _config_from_args(args) -> TrainConfig:
    return TrainConfig(
        learning_rate=args.lr,
        epochs=args.epochs,
        shots=args.shots,
        seed=args.seed,
        stack=args.stack,
        pairing=args.pairing,
        encode_mode=args.encode,
        negative_sampling=args.negative_sampling,
        pca=args.pca,
        synchronous=args.synchronous,
        jobs=args.jobs,
    )


# ---------------------------------------------------------------- commands


def cmd_train(args) -> int:
    src = _data_source(args)
    train_set, test_set = _load_split(src)
    config = _config_from_args(args)
    held_out = test_set if len(test_set) else None

    metrics = open(args.metrics_out, "w") if args.metrics_out else None
    try:
        def emit(rec):
            if metrics is not None:
                metrics.write(json.dumps({
                    "epoch": rec.epoch,
                    "class_loss": rec.class_loss,
                    "train_accuracy": rec.train_accuracy,
                    "eval_accuracy": rec.eval_accuracy,
                    "wall_ms": round(rec.wall_ms, 3),
                }) + "\n")
                metrics.flush()

        trained = train(config, train_set, held_out, emit)
    finally:
        if metrics is not None:
            metrics.close()
    checkpoint.save(trained, args.out, src)
    last = trained.history[-1]
    print(f"train accuracy: {last.train_accuracy:.4f}")
    if held_out is not None:
        print(f"eval accuracy: {last.eval_accuracy:.4f}")
    print(f"checkpoint: {args.out}")
    return EXIT_OK


def cmd_init(args) -> int:
    src = _data_source(args)
    train_set, _ = _load_split(src)
    trained = initialize(_config_from_args(args), train_set)
    checkpoint.save(trained, args.out, src)
    print(f"checkpoint: {args.out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    trained, saved = checkpoint.load(args.model)
    src = _data_source(args, saved)
    train_set, test_set = _load_split(src)
    if args.on == "train":
        data = train_set
    elif args.on == "test":
        data = test_set
    else:
        data = Dataset(np.vstack([train_set.X, test_set.X]), np.concatenate([train_set.y, test_set.y]), train_set.class_names)
    if len(data) == 0:
        raise CliError(f"the {args.on} split is empty", EXIT_USAGE)
    if data.d != trained.preprocessor.input_dim:
        raise CliError(f"model expects {trained.preprocessor.input_dim} features, data has {data.d}", EXIT_SHAPE)
    acc = evaluate(trained, data)
    conf = confusion(trained, data)
    if args.json:
        print(json.dumps({"accuracy": acc, "confusion": conf.tolist(), "n": len(data)}))
    else:
        print(f"accuracy: {acc:.4f} ({len(data)} samples)")
        print("confusion (rows: true, columns: predicted):")
        width = max(len(n) for n in trained.class_names)
        for name, row in zip(trained.class_names, conf):
            print(f"  {name:>{width}} " + " ".join(f"{v:5d}" for v in row))
    return EXIT_OK


def _parse_row(text, where):
    try:
        return np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError:
        raise CliError(f"{where}: non-numeric feature in {text.strip()!r}", EXIT_DATA) from None


def cmd_predict(args) -> int:
    trained, _ = checkpoint.load(args.model)
    if args.row is not None:
        rows = [_parse_row(args.row, "--row")]
    else:
        try:
            lines = Path(args.input).read_text().splitlines()
        except OSError as exc:
            raise CliError(f"cannot read {args.input}: {exc}", EXIT_DATA) from None
        rows = [_parse_row(l, f"{args.input}:{i}") for i, l in enumerate(lines, 1) if l.strip()]
    dim = trained.preprocessor.input_dim
    for r in rows:
        if r.size != dim:
            raise CliError(f"model expects {dim} features, got {r.size}", EXIT_SHAPE)

    fids = class_fidelities(trained, np.vstack(rows))
    results = []
    for f in fids:
        cls, probs = classify_fidelities(f)
        results.append({"class": cls, "label": trained.class_names[cls], "probabilities": probs.tolist()})
    if args.json:
        print(json.dumps(results if len(results) > 1 else results[0]))
    else:
        for r in results:
            probs = " ".join(f"{p:.6f}" for p in r["probabilities"])
            print(f"class {r['class']} ({r['label']})  probabilities: {probs}")

    if args.dump_circuit:
        pre = trained.preprocessor
        sample = encode(pre.transform(rows[0])[0], pre.encode_mode)
        n = pre.n_qubits
        circ = build_swap_test(
            build_data_circuit(sample, 1, 2 * n + 1),
            build_model_circuit(trained.class_models[0], n + 1),
            n,
        )
        Path(args.dump_circuit).write_text(circ.to_text())
    return EXIT_OK


def cmd_inspect(args) -> int:
    trained, _ = checkpoint.load(args.model)
    n = trained.stack.n_qubits
    if args.qubit is not None and not 0 <= args.qubit < n:
        raise CliError(f"--qubit must be in [0, {n}), got {args.qubit}", EXIT_USAGE)
    classes = []
    for m, name in zip(trained.class_models, trained.class_names):
        state = learned_state(m.stack, m.theta)
        entry = {"class": m.class_id, "label": name}
        if args.qubit is None:
            entry["amplitudes"] = [[a.real, a.imag] for a in state.amps.tolist()]
            entry["qubit_p1"] = [prob_of(state, q, 1) for q in range(n)]
        else:
            entry["qubit"] = args.qubit
            entry["marginal"] = [prob_of(state, args.qubit, 0), prob_of(state, args.qubit, 1)]
        classes.append(entry)
    doc = json.dumps({"n_qubits": n, "stack": trained.stack.name, "classes": classes}, indent=1)
    if args.out:
        Path(args.out).write_text(doc + "\n")
    else:
        print(doc)
    return EXIT_OK


COMMANDS = {"train": cmd_train, "init": cmd_init, "eval": cmd_eval, "predict": cmd_predict, "inspect": cmd_inspect}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except CheckpointError as exc:
        print(f"checkpoint error: {exc}", file=sys.stderr)
        return EXIT_CHECKPOINT
    except DimensionError as exc:
        print(f"shape error: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except (DataFormatError, DomainError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConfigurationError, ParameterError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
