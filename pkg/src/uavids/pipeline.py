"""End-to-end workflow: preprocess, train the autoencoder per N, extract
latent features, train and evaluate classifiers per task, compare.

Output directory layout::

    preprocess/{train,test}.csv, preprocess/params.json
    n{N}/ae_model.json, n{N}/ae_loss.csv, n{N}/ae_report.json
    n{N}/latent_{train,test}.csv
    n{N}/{task}/{MODEL}.json, n{N}/{task}/table.md, n{N}/{task}/summary.json
    tables.md, compare.json
    manifest.json        # config snapshot, dataset digest, per-stage artifacts
    timings.json         # wall-clock per stage (not part of the manifest)

Every stage records a key derived from its inputs' digests and parameters;
a rerun skips a stage whose key and outputs are unchanged.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__, autoencoder, report
from . import classifiers as clf
from . import dataset as ds
from .errors import ConfigError, DataError, MissingFileError, ShapeError, UavIdsError
from .metrics import AVERAGINGS, DEFAULT_AVERAGING, evaluate_labels
from .numkernel import seeded_rng

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger(__name__)

CONFIG_SCHEMA = 1
AE_KEYS = ("learning_rate", "batch_size", "max_epochs", "patience", "val_fraction")


@dataclass
class RunConfig:
    dataset: str | None = None
    label_column: str = ds.DEFAULT_LABEL
    drop_columns: list = field(default_factory=lambda: list(ds.DEFAULT_DROP))
    split_ratio: float = 0.8
    seed: int = 1337
    out_dir: str = "runs/latest"
    tasks: list = field(default_factory=lambda: ["binary", "multiclass"])
    n_values: list = field(default_factory=lambda: [4, 8])
    autoencoder: dict = field(default_factory=dict)
    classifiers: list = field(default_factory=lambda: list(clf.KINDS))
    classifier_params: dict = field(default_factory=dict)
    averaging: dict = field(default_factory=lambda: dict(DEFAULT_AVERAGING))
    selection_metric: str = "f1"
    baselines: str | None = None
    save_classifiers: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not self.tasks or any(t not in report.TASKS for t in self.tasks):
            raise ConfigError(f"tasks must be a non-empty subset of {report.TASKS}")
        if not self.classifiers:
            raise ConfigError("at least one classifier is required")
        for kind in self.classifiers:
            clf.ClassifierSpec(kind, dict(self.classifier_params.get(kind, {})))
        unknown = set(self.classifier_params) - set(clf.KINDS)
        if unknown:
            raise ConfigError(f"classifier_params for unknown kinds {sorted(unknown)}")
        if not self.n_values or any(not isinstance(n, int) or n < 1 for n in self.n_values):
            raise ConfigError("n_values must be positive integers")
        if not 0 < self.split_ratio < 1:
            raise ConfigError("split_ratio must lie in (0, 1)")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        bad = set(self.autoencoder) - set(AE_KEYS)
        if bad:
            raise ConfigError(f"unknown autoencoder settings {sorted(bad)}")
        for task, avg in self.averaging.items():
            if task not in report.TASKS or avg not in AVERAGINGS:
                raise ConfigError(f"bad averaging entry {task}={avg}")
        if self.selection_metric not in report.METRICS:
            raise ConfigError(f"selection_metric must be one of {report.METRICS}")

    def ae_config(self, M: int, N: int) -> autoencoder.AEConfig:
        return autoencoder.AEConfig(input_dim=M, bottleneck_dim=N, seed=self.seed, **self.autoencoder)

    def classifier_spec(self, kind: str) -> clf.ClassifierSpec:
        return clf.ClassifierSpec(kind, dict(self.classifier_params.get(kind, {})), self.seed)

    def snapshot(self) -> dict:
        snap = asdict(self)
        snap.pop("out_dir")
        snap["schema"] = CONFIG_SCHEMA
        return snap


def load_config(path=None, **overrides) -> RunConfig:
    """Read a TOML config (``schema = 1``) and apply non-None overrides."""
    data = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        schema = data.pop("schema", CONFIG_SCHEMA)
        if schema != CONFIG_SCHEMA:
            raise ConfigError(f"unsupported config schema {schema}")
        if data.get("baselines") and not Path(data["baselines"]).is_absolute():
            data["baselines"] = str(Path(path).parent / data["baselines"])
        if data.get("dataset") and not Path(data["dataset"]).is_absolute():
            data["dataset"] = str(Path(path).parent / data["dataset"])
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


# ------------------------------------------------------------- manifest


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _key(payload) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def _dump_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


class Run:
    """Holds the output directory, manifest and per-stage timings."""

    def __init__(self, config: RunConfig, out_dir=None):
        self.config = config
        self.out = Path(out_dir or config.out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.manifest_path = self.out / "manifest.json"
        self.timings_path = self.out / "timings.json"
        self.manifest = self._load(self.manifest_path) or {"stages": {}}
        self.timings = self._load(self.timings_path) or {}

    @staticmethod
    def _load(path):
        try:
            return json.loads(Path(path).read_text())
        except (FileNotFoundError, json.JSONDecodeError):
            return None

    def rel(self, path) -> str:
        return Path(path).relative_to(self.out).as_posix()

    def digest_of(self, rel_path: str) -> str:
        return file_digest(self.out / rel_path)

    def stage_outputs(self, name: str) -> dict:
        entry = self.manifest["stages"].get(name)
        if entry is None:
            raise MissingFileError(f"stage {name!r} has not been run in {self.out}")
        for rel, digest in entry["artifacts"].items():
            p = self.out / rel
            if not p.is_file() or file_digest(p) != digest:
                raise DataError(f"artifact {rel} from stage {name!r} is missing or modified")
        return entry["artifacts"]

    def _fresh(self, name: str, key: str) -> bool:
        entry = self.manifest["stages"].get(name)
        if not entry or entry.get("key") != key:
            return False
        return all(
            (self.out / rel).is_file() and file_digest(self.out / rel) == d
            for rel, d in entry["artifacts"].items()
        )

    def stage(self, name: str, key_payload: dict, body) -> dict:
        """Run ``body()`` (returning written paths) unless cached."""
        key = _key({"stage": name, **key_payload})
        start = time.perf_counter()
        if self._fresh(name, key):
            log.info("stage %s: up to date", name)
            self.timings[name] = {"seconds": 0.0, "skipped": True}
        else:
            log.info("stage %s: running", name)
            try:
                paths = body()
            except UavIdsError as exc:
                exc.stage = name
                raise
            artifacts = {self.rel(p): file_digest(p) for p in sorted(paths, key=str)}
            self.manifest["stages"][name] = {"key": key, "artifacts": artifacts}
            self.timings[name] = {"seconds": round(time.perf_counter() - start, 3), "skipped": False}
        self.save()
        return self.manifest["stages"][name]["artifacts"]

    def save(self) -> None:
        self.manifest["schema"] = 1
        self.manifest["software_version"] = __version__
        self.manifest["config"] = self.config.snapshot()
        self.manifest["stages"] = dict(sorted(self.manifest["stages"].items()))
        _dump_json(self.manifest_path, self.manifest)
        _dump_json(self.timings_path, self.timings)


# --------------------------------------------------------------- stages


def _n_dir(run: Run, n: int) -> Path:
    d = run.out / f"n{n}"
    d.mkdir(parents=True, exist_ok=True)
    return d


def cmd_preprocess(run: Run) -> dict:
    cfg = run.config
    if not cfg.dataset:
        raise ConfigError("no dataset path configured")
    src = Path(cfg.dataset)
    if not src.is_file():
        raise MissingFileError(f"dataset not found: {src}")
    digest = file_digest(src)
    run.manifest["dataset_digest"] = digest

    def body():
        raw = ds.load_csv(src, cfg.label_column)
        pre = ds.preprocess(raw, cfg.drop_columns, cfg.split_ratio, cfg.seed)
        d = run.out / "preprocess"
        d.mkdir(parents=True, exist_ok=True)
        ds.write_feature_csv(d / "train.csv", pre.split.train, cfg.label_column)
        ds.write_feature_csv(d / "test.csv", pre.split.test, cfg.label_column)
        side = pre.sidecar()
        side["n_source_columns"] = pre.n_source_columns
        _dump_json(d / "params.json", side)
        log.info(
            "preprocess: %d source columns -> M=%d features; %d train / %d test rows",
            pre.n_source_columns, len(side["feature_names"]), side["split"]["n_train"], side["split"]["n_test"],
        )
        return [d / "train.csv", d / "test.csv", d / "params.json"]

    payload = {
        "dataset": digest,
        "label_column": cfg.label_column,
        "drop": list(cfg.drop_columns),
        "ratio": cfg.split_ratio,
        "seed": cfg.seed,
    }
    return run.stage("preprocess", payload, body)


def _load_preprocessed(run: Run):
    arts = run.stage_outputs("preprocess")
    side = ds.read_sidecar(run.out / "preprocess/params.json")
    names = side["class_names"]
    label = run.config.label_column
    train = ds.read_feature_csv(run.out / "preprocess/train.csv", names, label)
    test = ds.read_feature_csv(run.out / "preprocess/test.csv", names, label)
    return arts, side, train, test


def ae_holdout(n: int, fraction: float, seed: int):
    """Seeded split of training rows into AE fit / AE validation indices."""
    perm = seeded_rng(seed, 6).permutation(n)
    n_val = min(max(1, int(round(fraction * n))), n - 1)
    return np.sort(perm[n_val:]), np.sort(perm[:n_val])


def cmd_train_ae(run: Run, n: int) -> dict:
    cfg = run.config
    side = ds.read_sidecar(run.out / "preprocess/params.json") if (run.out / "preprocess/params.json").is_file() else None
    if side is None:
        raise MissingFileError("preprocessing artifacts not found; run preprocess first")
    M = len(side["feature_names"])
    ae_cfg = cfg.ae_config(M, n)  # raises ConfigError for N >= M before any training
    arts = run.stage_outputs("preprocess")

    def body():
        _, _, train, _ = _load_preprocessed(run)
        fit, val = ae_holdout(train.n_rows, ae_cfg.val_fraction, cfg.seed)
        model = autoencoder.build(ae_cfg)
        rep = autoencoder.train(model, train.features[fit], train.features[val], ae_cfg)
        d = _n_dir(run, n)
        autoencoder.save_model(model, d / "ae_model.json")
        with open(d / "ae_loss.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["epoch", "train_loss", "val_loss"])
            for i, (a, b) in enumerate(zip(rep.train_loss, rep.val_loss), 1):
                w.writerow([i, repr(a), repr(b)])
        _dump_json(d / "ae_report.json", {
            "N": n,
            "M": M,
            "param_count": model.n_params,
            "stopped_epoch": rep.stopped_epoch,
            "best_epoch": rep.best_epoch,
            "best_val_loss": rep.best_val_loss,
            "n_fit_rows": int(fit.size),
            "n_val_rows": int(val.size),
        })
        log.info("train-ae N=%d: %d params, best val loss %.4g at epoch %d", n, model.n_params, rep.best_val_loss, rep.best_epoch)
        return [d / "ae_model.json", d / "ae_loss.csv", d / "ae_report.json"]

    payload = {"inputs": arts, "ae": asdict(ae_cfg)}
    payload["ae"]["hidden_dims"] = list(payload["ae"]["hidden_dims"])
    return run.stage(f"train_ae/n{n}", payload, body)


def _write_latent(path, H: np.ndarray, labels, class_names, label_column):
    t = ds.FeatureTable(H, [f"z{j}" for j in range(H.shape[1])], labels, class_names)
    ds.write_feature_csv(path, t, label_column)


def cmd_extract(run: Run, n: int) -> dict:
    cfg = run.config
    ae_arts = run.stage_outputs(f"train_ae/n{n}")
    pre_arts = run.stage_outputs("preprocess")

    def body():
        _, side, train, test = _load_preprocessed(run)
        d = _n_dir(run, n)
        model = autoencoder.load_model(d / "ae_model.json")
        if model.input_dim != train.features.shape[1]:
            raise ShapeError(f"autoencoder expects {model.input_dim} features, data has {train.features.shape[1]}")
        for name, t in (("train", train), ("test", test)):
            _write_latent(d / f"latent_{name}.csv", autoencoder.encode(model, t.features), t.labels, side["class_names"], cfg.label_column)
        return [d / "latent_train.csv", d / "latent_test.csv"]

    return run.stage(f"extract/n{n}", {"inputs": {**pre_arts, **ae_arts}}, body)


def _task_labels(task: str, table: ds.FeatureTable):
    if task == "binary":
        return ds.to_binary(table.labels, table.class_names), list(ds.BINARY_NAMES)
    return table.labels, list(table.class_names)


def cmd_train_eval(run: Run, n: int, task: str) -> dict:
    cfg = run.config
    if task not in report.TASKS:
        raise ConfigError(f"unknown task {task!r}")
    lat_arts = run.stage_outputs(f"extract/n{n}")
    averaging = cfg.averaging.get(task, DEFAULT_AVERAGING[task])

    def body():
        side = ds.read_sidecar(run.out / "preprocess/params.json")
        d = _n_dir(run, n)
        train = ds.read_feature_csv(d / "latent_train.csv", side["class_names"], cfg.label_column)
        test = ds.read_feature_csv(d / "latent_test.csv", side["class_names"], cfg.label_column)
        y_train, names = _task_labels(task, train)
        y_test, _ = _task_labels(task, test)
        td = d / task
        td.mkdir(parents=True, exist_ok=True)
        written, reports = [], {}
        for kind in cfg.classifiers:
            spec = cfg.classifier_spec(kind)
            try:
                model = clf.train(spec, train.features, y_train, len(names))
                pred = clf.predict(model, test.features)
                rep = evaluate_labels(y_test, pred, names, averaging).to_dict(task=task, N=n, model=kind)
                if cfg.save_classifiers:
                    clf.save_classifier(model, td / f"{kind}.model.json")
                    written.append(td / f"{kind}.model.json")
            except UavIdsError as exc:
                log.warning("%s %s N=%d failed: %s", kind, task, n, exc)
                rep = {"task": task, "N": n, "model": kind, "error": f"{type(exc).__name__}: {exc}"}
            reports[kind] = rep
            _dump_json(td / f"{kind}.json", rep)
            written.append(td / f"{kind}.json")
        best = report.best_model(reports, cfg.selection_metric)
        (td / "table.md").write_text(report.render_model_table({task: reports}, n, cfg.selection_metric))
        _dump_json(td / "summary.json", {"task": task, "N": n, "averaging": averaging, "best_model": best, "selection_metric": cfg.selection_metric})
        return written + [td / "table.md", td / "summary.json"]

    payload = {
        "inputs": lat_arts,
        "task": task,
        "averaging": averaging,
        "metric": cfg.selection_metric,
        "save": cfg.save_classifiers,
        "specs": [[k, cfg.classifier_spec(k).params, cfg.seed] for k in cfg.classifiers],
    }
    return run.stage(f"train_eval/n{n}/{task}", payload, body)


def load_reports(run: Run, n: int, task: str) -> dict:
    out = {}
    for kind in run.config.classifiers:
        p = run.out / f"n{n}" / task / f"{kind}.json"
        if p.is_file():
            out[kind] = json.loads(p.read_text())
    return out


def cmd_compare(run: Run) -> dict:
    cfg = run.config
    inputs = {}
    for n in cfg.n_values:
        for task in cfg.tasks:
            inputs.update(run.stage_outputs(f"train_eval/n{n}/{task}"))
    baselines_digest = None
    if cfg.baselines and Path(cfg.baselines).is_file():
        baselines_digest = file_digest(cfg.baselines)

    def body():
        baselines = report.read_baselines(cfg.baselines)
        parts, summary = [], {"baselines": baselines, "N": {}}
        for n in cfg.n_values:
            by_task = {task: load_reports(run, n, task) for task in cfg.tasks}
            parts.append(report.render_model_table(by_task, n, cfg.selection_metric))
            proposed = {}
            for task, reps in by_task.items():
                best = report.best_model(reps, cfg.selection_metric)
                proposed[task] = (best, reps[best] if best else None)
            parts.append(report.render_comparison(n, proposed, baselines))
            summary["N"][str(n)] = {
                task: {"best_model": best, **({m: rep[m] for m in report.METRICS} if rep else {})}
                for task, (best, rep) in proposed.items()
            }
        (run.out / "tables.md").write_text("\n".join(parts))
        _dump_json(run.out / "compare.json", summary)
        return [run.out / "tables.md", run.out / "compare.json"]

    payload = {"inputs": inputs, "baselines": baselines_digest, "metric": cfg.selection_metric}
    return run.stage("compare", payload, body)


def cmd_run_all(run: Run) -> dict:
    cmd_preprocess(run)
    for n in run.config.n_values:
        cmd_train_ae(run, n)
        cmd_extract(run, n)
        for task in run.config.tasks:
            cmd_train_eval(run, n, task)
    cmd_compare(run)
    return run.manifest
