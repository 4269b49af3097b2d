"""Text file formats (CSV matrices, JSON manifests/reports, model files) and the
end-to-end experiment runner."""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import MultiViewDataset
from .errors import DataIOError, FormatError, SlmrError, ValidationError
from .evaluation import pairwise_eval
from .noise import NoiseSpec, apply_noise
from .pca import PcaModel
from .solver import ProjectionModel, SolverConfig, fit

MODEL_MAGIC = "SLMR-MODEL v1"
HISTORY_COLUMNS = ("t", "r1_inf", "r2_inf", "r3_inf", "objective", "wall_ms")


def _fmt(x):
    return format(float(x), ".17g")


def _read_text(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataIOError(f"cannot read {path}: {exc}") from exc


def _write_text(path, text):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise DataIOError(f"cannot write {path}: {exc}") from exc


def _parse_rows(lines, source, first_line=1):
    rows = []
    width = None
    for offset, line in enumerate(lines):
        lineno = first_line + offset
        tokens = line.split(",")
        row = []
        for col, tok in enumerate(tokens, start=1):
            try:
                val = float(tok)
            except ValueError:
                raise FormatError(f"{source}:{lineno}:{col}: cannot parse {tok.strip()!r}") from None
            if not math.isfinite(val):
                raise FormatError(f"{source}:{lineno}:{col}: non-finite value {tok.strip()!r}")
            row.append(val)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise FormatError(
                f"{source}:{lineno}: ragged row with {len(row)} values, expected {width}")
        rows.append(row)
    return np.array(rows, dtype=np.float64)


def _matrix_lines(M):
    return [",".join(_fmt(x) for x in row) for row in M]


def load_matrix_csv(path) -> np.ndarray:
    lines = _read_text(path).splitlines()
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FormatError(f"{path}: empty matrix file")
    return _parse_rows(lines, path)


def save_matrix_csv(M, path):
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.size == 0:
        raise ValidationError(f"refusing to write empty or non-2-D matrix of shape {M.shape}")
    _write_text(path, "\n".join(_matrix_lines(M)) + "\n")


# -- datasets ---------------------------------------------------------------

@dataclass
class DatasetManifest:
    name: str
    views: list          # [(view_id, matrix_path), ...]
    labels_path: str
    pixel_image_side: int | None = None

    def to_dict(self):
        return {
            "name": self.name,
            "views": [{"id": vid, "matrix": str(p)} for vid, p in self.views],
            "labels": str(self.labels_path),
            "pixel_image_side": self.pixel_image_side,
        }


def read_manifest(path) -> DatasetManifest:
    text = _read_text(path)
    try:
        raw = json.loads(text)
        views = [(str(v["id"]), v["matrix"]) for v in raw["views"]]
        manifest = DatasetManifest(str(raw.get("name", "")), views, raw["labels"],
                                   raw.get("pixel_image_side"))
    except (ValueError, KeyError, TypeError) as exc:
        raise FormatError(f"{path}: malformed manifest ({exc})") from None
    if len(manifest.views) < 2:
        raise ValidationError(f"{path}: manifest lists {len(manifest.views)} views, need >= 2")
    return manifest


def load_labels(path) -> np.ndarray:
    labels = []
    for lineno, line in enumerate(_read_text(path).splitlines(), start=1):
        if not line.strip():
            continue
        try:
            labels.append(int(line))
        except ValueError:
            raise FormatError(f"{path}:{lineno}: bad class id {line!r}") from None
    return np.array(labels, dtype=np.int64)


def load_dataset(manifest_path):
    """Load a manifest; returns ``(dataset, manifest)``."""
    manifest_path = Path(manifest_path)
    manifest = read_manifest(manifest_path)
    base = manifest_path.parent
    views = [load_matrix_csv(base / p) for _, p in manifest.views]
    ids = [vid for vid, _ in manifest.views]
    d = views[0].shape[0]
    for vid, V in zip(ids, views):
        if V.shape[0] != d:
            raise ValidationError(
                f"view {vid!r} has {V.shape[0]} rows but view {ids[0]!r} has {d}")
    labels = load_labels(base / manifest.labels_path)
    m = sum(V.shape[1] for V in views)
    if labels.size != m:
        raise ValidationError(f"labels file has {labels.size} entries for {m} samples")
    C = int(labels.max()) if labels.size else 0
    missing = sorted(set(range(1, C + 1)) - set(labels.tolist()))
    if labels.size == 0 or labels.min() < 1 or missing:
        raise ValidationError(
            f"class ids must form 1..C; found min {labels.min() if labels.size else None}, "
            f"missing {missing}")
    return MultiViewDataset(views, labels, ids, C), manifest


def save_dataset(dataset: MultiViewDataset, manifest_path, name="dataset",
                 pixel_image_side=None) -> DatasetManifest:
    """Write view CSVs and a labels file next to ``manifest_path``."""
    manifest_path = Path(manifest_path)
    base = manifest_path.parent
    base.mkdir(parents=True, exist_ok=True)
    stem = manifest_path.stem
    views = []
    for vid, V in zip(dataset.view_ids, dataset.views):
        fname = f"{stem}.{vid}.csv"
        save_matrix_csv(V, base / fname)
        views.append((vid, fname))
    labels_name = f"{stem}.labels.txt"
    _write_text(base / labels_name, "".join(f"{int(c)}\n" for c in dataset.labels))
    manifest = DatasetManifest(name, views, labels_name, pixel_image_side)
    _write_text(manifest_path, json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n")
    return manifest


# -- models -----------------------------------------------------------------

def save_model(model: ProjectionModel, path):
    P = np.asarray(model.P)
    if not np.all(np.isfinite(P)):
        raise ValidationError("model contains non-finite entries")
    q = model.pca.q if model.pca is not None else 0
    lines = [MODEL_MAGIC, f"{model.d} {model.p} {q}"]
    lines += _matrix_lines(P)
    if model.pca is not None:
        lines.append(",".join(_fmt(x) for x in model.pca.mean))
        lines += _matrix_lines(model.pca.components)
    _write_text(path, "\n".join(lines) + "\n")


def load_model(path) -> ProjectionModel:
    lines = _read_text(path).splitlines()
    if not lines or lines[0].strip() != MODEL_MAGIC:
        got = lines[0].strip() if lines else ""
        raise FormatError(f"{path}: expected header {MODEL_MAGIC!r}, got {got!r}")
    try:
        d, p, q = (int(tok) for tok in lines[1].split())
    except (IndexError, ValueError):
        raise FormatError(f"{path}: bad dimension line") from None
    p_rows = q if q else d
    need = 2 + p_rows + (1 + d if q else 0)
    if len(lines) < need:
        raise FormatError(f"{path}: truncated model file ({len(lines)} of {need} lines)")
    P = _parse_rows(lines[2:2 + p_rows], path, first_line=3)
    if P.shape != (p_rows, p):
        raise FormatError(f"{path}: projection block is {P.shape}, header says {(p_rows, p)}")
    pca = None
    if q:
        start = 2 + p_rows
        mean = _parse_rows(lines[start:start + 1], path, first_line=start + 1)[0]
        comps = _parse_rows(lines[start + 1:start + 1 + d], path, first_line=start + 2)
        if mean.shape != (d,) or comps.shape != (d, q):
            raise FormatError(f"{path}: PCA blocks do not match header")
        pca = PcaModel(mean=mean, components=comps)
    return ProjectionModel(P=P, pca=pca)


# -- experiments ------------------------------------------------------------

def save_history(history, path):
    lines = [",".join(HISTORY_COLUMNS)]
    for rec in history:
        lines.append(",".join([str(rec.t)] + [_fmt(x) for x in rec[1:]]))
    _write_text(path, "\n".join(lines) + "\n")


@dataclass
class ExperimentReport:
    config: dict
    runs: list = field(default_factory=list)
    noise: list = field(default_factory=list)

    def to_dict(self):
        return {"config": self.config, "runs": self.runs, "noise": self.noise}

    @classmethod
    def from_dict(cls, raw):
        return cls(raw["config"], raw.get("runs", []), raw.get("noise", []))

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def save_report(report, path):
    _write_text(path, report.dumps())


def load_report(path) -> ExperimentReport:
    try:
        return ExperimentReport.from_dict(json.loads(_read_text(path)))
    except (ValueError, KeyError, TypeError) as exc:
        raise FormatError(f"{path}: malformed report ({exc})") from None


def _stage(label, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except SlmrError as exc:
        exc.args = (f"[{label}] {exc.args[0] if exc.args else exc}",) + exc.args[1:]
        raise


def run_in_memory(train, test, cfg, noise_specs=(), corrupt_test=False, timing=True):
    """Corrupt -> (PCA) -> fit -> pairwise evaluation. Returns ``(report, state)``."""
    noise_specs = list(noise_specs)
    for spec in noise_specs:
        train = _stage("noise", apply_noise, train, spec)
        if corrupt_test:
            test = _stage("noise", apply_noise, test, spec)
    start = time.perf_counter()
    result = _stage("fit", fit, train, cfg, timing=timing)
    wall = time.perf_counter() - start if timing else 0.0
    ev = _stage("eval", pairwise_eval, result.model, test)
    run = {
        "macc": ev.macc,
        "acc_matrix": ev.acc_matrix.tolist(),
        "view_ids": list(test.view_ids),
        "iterations": result.state.t,
        "final_residuals": result.model.meta["final_residuals"],
        "wall_time_s": wall,
    }
    report = ExperimentReport(cfg.to_dict(), [run], [s.to_dict() for s in noise_specs])
    return report, result


def run_experiment(train_manifest, test_manifest, cfg: SolverConfig, noise_specs=(),
                   report_path=None, history_path=None, corrupt_test=False, timing=True):
    train, _ = _stage("load", load_dataset, train_manifest)
    test, _ = _stage("load", load_dataset, test_manifest)
    report, result = run_in_memory(train, test, cfg, noise_specs, corrupt_test, timing)
    if report_path is not None:
        save_report(report, report_path)
    if history_path is not None:
        save_history(result.state.history, history_path)
    return report
