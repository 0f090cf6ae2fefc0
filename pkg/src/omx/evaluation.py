"""Grouped K-fold benchmark harness.

Splits samples by group label so no group straddles folds, refits the
preprocessing Projector on each fold's training rows only, then fits
and scores every model on the held-out rows.
"""

import time
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp

from . import preprocess, rng
from .elm import ElmConfig, elm_init
from .errors import ParameterError, ShapeError
from .esn import EsnConfig, esn_init
from .forest import ForestConfig, forest_fit
from .metrics import correlation_score, mse


@dataclass
class FoldPlan:
    k: int
    assignments: np.ndarray  # per-sample fold index

    def train_rows(self, fold):
        return np.where(self.assignments != fold)[0]

    def val_rows(self, fold):
        return np.where(self.assignments == fold)[0]


def group_kfold_split(groups, k, gen):
    """Assign whole groups to k folds, round-robin after a shuffle.

    Every sample of a group lands in one fold; fold sizes differ by at
    most one group.
    """
    groups = np.asarray(groups)
    if k < 2:
        raise ParameterError(f"grouped K-fold needs k >= 2, got {k}")
    distinct = np.unique(groups)
    if distinct.shape[0] < k:
        raise ParameterError(
            f"need at least k={k} distinct groups, got {distinct.shape[0]}"
        )
    order = gen.permutation(distinct.shape[0])
    fold_of_group = {distinct[g]: i % k for i, g in enumerate(order)}
    assignments = np.array([fold_of_group[g] for g in groups], dtype=np.int64)
    return FoldPlan(k, assignments)


@dataclass
class TaskData:
    """One benchmark task: features, targets and group labels."""

    name: str
    X: object  # dense ndarray or scipy sparse
    Y: np.ndarray
    groups: np.ndarray
    projector_k: int | None = None  # None: skip TSVD projection
    log1p: bool = False


@dataclass
class EvalRow:
    model: str
    task: str
    correlation_score: float
    mse: float
    fit_seconds: float
    predict_seconds: float
    folds: int
    seed: int


CSV_HEADER = "model,task,correlation_score,mse,fit_seconds,predict_seconds,folds,seed"


@dataclass
class EvalReport:
    rows: list = field(default_factory=list)

    def sorted_rows(self):
        return sorted(self.rows, key=lambda r: (r.task, r.model))

    def to_csv(self, zero_times=False):
        """Serialize with 17 significant digits so determinism is
        byte-testable; zero_times blanks the wall-clock columns, which
        are the only nondeterministic fields."""
        lines = [CSV_HEADER]
        for r in self.sorted_rows():
            ft = 0.0 if zero_times else r.fit_seconds
            pt = 0.0 if zero_times else r.predict_seconds
            lines.append(
                f"{r.model},{r.task},{r.correlation_score:.17g},{r.mse:.17g},"
                f"{ft:.17g},{pt:.17g},{r.folds},{r.seed}"
            )
        return "\n".join(lines) + "\n"


def _derive_seed(seed, *key):
    return int(np.random.SeedSequence([int(seed), *map(int, key)]).generate_state(1)[0])


def _fit_model(name, config, Z_train, Y_train, threads):
    if isinstance(config, EsnConfig):
        return esn_init(config, Z_train.shape[1]).fit(Z_train, Y_train)
    if isinstance(config, ElmConfig):
        return elm_init(config, Z_train.shape[1]).fit(Z_train, Y_train)
    if isinstance(config, ForestConfig):
        return forest_fit(Z_train, Y_train, config, threads=threads)
    if callable(config):
        # factory hook, mostly for oracle stubs in tests:
        # config(Z_train, Y_train) -> object with .predict
        return config(Z_train, Y_train)
    raise ParameterError(f"model {name!r} has unsupported config type {type(config).__name__}")


def benchmark_run(task, models, k, seed, threads=1):
    """Score every (model config) on the task under grouped K-fold CV.

    `models` is a list of (name, config) pairs where config is an
    EsnConfig, ElmConfig or ForestConfig. Per-fold model seeds derive
    from (seed, model index, fold) so reruns are bit-reproducible.
    Returns an EvalReport with one row per model.
    """
    Y = np.asarray(task.Y, dtype=np.float64)
    n = task.X.shape[0]
    if Y.shape[0] != n or len(task.groups) != n:
        raise ShapeError(
            f"task rows disagree: X {task.X.shape[0]}, Y {Y.shape[0]}, groups {len(task.groups)}"
        )
    plan = group_kfold_split(task.groups, k, rng.substream(seed, 0xF01D))

    X = task.X
    if task.log1p:
        X = preprocess.log1p_transform(X)

    report = EvalReport()
    for mi, (name, config) in enumerate(models):
        corr_folds = []
        mse_folds = []
        fit_seconds = 0.0
        predict_seconds = 0.0
        for fold in range(k):
            tr = plan.train_rows(fold)
            va = plan.val_rows(fold)
            try:
                Xtr = X[tr] if not sp.issparse(X) else X.tocsr()[tr]
                Xva = X[va] if not sp.issparse(X) else X.tocsr()[va]
                if task.projector_k is not None:
                    proj = preprocess.projector_fit(
                        Xtr, task.projector_k, rng.substream(seed, 0x9A, fold)
                    )
                    Ztr = proj.apply(Xtr)
                    Zva = proj.apply(Xva)
                else:
                    Ztr = np.asarray(Xtr.todense()) if sp.issparse(Xtr) else np.asarray(Xtr, float)
                    Zva = np.asarray(Xva.todense()) if sp.issparse(Xva) else np.asarray(Xva, float)
                if hasattr(config, "seed"):
                    fold_config = replace(config, seed=_derive_seed(seed, mi, fold))
                else:
                    fold_config = config
                t0 = time.perf_counter()
                model = _fit_model(name, fold_config, Ztr, Y[tr], threads)
                t1 = time.perf_counter()
                pred = model.predict(Zva)
                t2 = time.perf_counter()
            except Exception as exc:
                raise type(exc)(f"model {name!r}, fold {fold}: {exc}") from exc
            fit_seconds += t1 - t0
            predict_seconds += t2 - t1
            corr_folds.append(correlation_score(Y[va], pred))
            mse_folds.append(mse(Y[va], pred))
        report.rows.append(
            EvalRow(
                model=name,
                task=task.name,
                correlation_score=float(np.mean(corr_folds)),
                mse=float(np.mean(mse_folds)),
                fit_seconds=fit_seconds,
                predict_seconds=predict_seconds,
                folds=k,
                seed=int(seed),
            )
        )
    return report
