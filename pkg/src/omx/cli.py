"""Command-line interface.

Subcommands: datagen, fit, predict, benchmark, report. Exit codes:
0 success, 1 usage error, 2 data/format error. A run config is a flat
key=value text file; command-line flags override config values, and
OMX_SEED provides a default seed when neither gives one.
"""

import argparse
import os
import sys

import numpy as np

from . import datagen, evaluation, matio, report
from .elm import ElmConfig
from .errors import OmxError, ParameterError
from .esn import EsnConfig
from .forest import ForestConfig, forest_fit


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


# RunConfig schema: key -> (parser, default)
_BOOL = lambda s: s.strip().lower() in ("1", "true", "yes", "on")
CONFIG_SCHEMA = {
    "task": (str, "task"),
    "features": (str, None),
    "targets": (str, None),
    "groups": (str, None),
    "models": (str, "esn,elm,forest"),
    "projector_k": (int, None),
    "log1p": (_BOOL, False),
    "k": (int, 3),
    "seed": (int, None),
    "threads": (int, 1),
    "output_dir": (str, "."),
    "esn.reservoir_size": (int, 512),
    "esn.spectral_radius": (float, 0.4),
    "esn.input_scale": (float, 1.0),
    "esn.reservoir_density": (float, 0.1),
    "esn.state_iters": (int, 30),
    "esn.state_tol": (float, 1e-8),
    "esn.ridge_lambda": (float, 1e-6),
    "elm.hidden_size": (int, 8000),
    "elm.activation": (str, "tanh"),
    "forest.n_trees": (int, 100),
    "forest.max_leaf_nodes": (int, 200),
    "forest.min_samples_leaf": (int, 1),
    "forest.feature_fraction": (float, 1.0),
    "forest.bootstrap": (_BOOL, True),
}


def load_config(path):
    """Parse a flat key=value config file against the schema."""
    values = {k: d for k, (_, d) in CONFIG_SCHEMA.items()}
    if path is None:
        return values
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, raw = line.partition("=")
            key = key.strip()
            if key not in CONFIG_SCHEMA:
                raise ParameterError(f"{path}:{lineno}: unknown config key {key!r}")
            parse, _ = CONFIG_SCHEMA[key]
            try:
                values[key] = parse(raw.strip())
            except ValueError:
                raise ParameterError(f"{path}:{lineno}: bad value for {key}: {raw.strip()!r}")
    return values


def _default_seed(explicit, config_seed):
    if explicit is not None:
        return explicit
    if config_seed is not None:
        return config_seed
    env = os.environ.get("OMX_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ParameterError(f"OMX_SEED is not an integer: {env!r}")
    return 0


def _model_configs(cfg, names):
    out = []
    for name in names:
        if name == "esn":
            out.append(
                (
                    "esn",
                    EsnConfig(
                        reservoir_size=cfg["esn.reservoir_size"],
                        spectral_radius=cfg["esn.spectral_radius"],
                        input_scale=cfg["esn.input_scale"],
                        reservoir_density=cfg["esn.reservoir_density"],
                        state_iters=cfg["esn.state_iters"],
                        state_tol=cfg["esn.state_tol"],
                        ridge_lambda=cfg["esn.ridge_lambda"],
                    ),
                )
            )
        elif name == "elm":
            out.append(
                (
                    "elm",
                    ElmConfig(
                        hidden_size=cfg["elm.hidden_size"],
                        activation=cfg["elm.activation"],
                    ),
                )
            )
        elif name == "forest":
            out.append(
                (
                    "forest",
                    ForestConfig(
                        n_trees=cfg["forest.n_trees"],
                        max_leaf_nodes=cfg["forest.max_leaf_nodes"],
                        min_samples_leaf=cfg["forest.min_samples_leaf"],
                        feature_fraction=cfg["forest.feature_fraction"],
                        bootstrap=cfg["forest.bootstrap"],
                    ),
                )
            )
        else:
            raise ParameterError(f"unknown model {name!r} (choose esn, elm, forest)")
    return out


def _write_text(path, text):
    matio._atomic_write(path, lambda fh: fh.write(text))


def cmd_datagen(args):
    spec = datagen.SynthSpec(
        n_cells=args.n_cells,
        d_input=args.d_input,
        d_output=args.d_output,
        latent_rank=args.latent_rank,
        noise_sigma=args.noise_sigma,
        n_groups=args.n_groups,
        sparsity=args.sparsity,
        seed=_default_seed(args.seed, None),
    )
    X, Y, groups, B_true = datagen.gen_task(spec)
    os.makedirs(args.out, exist_ok=True)
    matio.write_matrix(os.path.join(args.out, "features.txt"), X)
    matio.write_matrix(os.path.join(args.out, "targets.csv"), Y)
    matio.write_matrix(
        os.path.join(args.out, "groups.csv"), groups.reshape(-1, 1).astype(float)
    )
    matio.write_matrix(os.path.join(args.out, "b_true.csv"), B_true)
    print(f"wrote task files to {args.out}", file=sys.stderr)
    return 0


def _load_groups(path):
    g = matio.read_matrix(path)
    g = np.asarray(g.todense()) if hasattr(g, "todense") else g
    return g.ravel().astype(np.int64)


def cmd_fit(args):
    cfg = load_config(args.config)
    seed = _default_seed(args.seed, cfg["seed"])
    X = matio.read_matrix(args.features)
    import scipy.sparse as sp

    if sp.issparse(X):
        X = np.asarray(X.todense())
    Y = matio.read_matrix(args.targets)
    (_, model_cfg), = _model_configs(cfg, [args.model])
    from dataclasses import replace

    model_cfg = replace(model_cfg, seed=seed)
    if args.model == "esn":
        from .esn import esn_init

        model = esn_init(model_cfg, X.shape[1]).fit(X, Y)
    elif args.model == "elm":
        from .elm import elm_init

        model = elm_init(model_cfg, X.shape[1]).fit(X, Y)
    else:
        model = forest_fit(X, Y, model_cfg, threads=args.threads)
    matio.save_model(model, args.out)
    print(f"wrote model to {args.out}", file=sys.stderr)
    return 0


def cmd_predict(args):
    model = matio.load_model(args.model_file)
    X = matio.read_matrix(args.features)
    import scipy.sparse as sp

    if sp.issparse(X):
        X = np.asarray(X.todense())
    pred = model.predict(X)
    matio.write_matrix(args.out, pred)
    print(f"wrote {pred.shape[0]} predictions to {args.out}", file=sys.stderr)
    return 0


def cmd_benchmark(args):
    cfg = load_config(args.config)
    seed = _default_seed(args.seed, cfg["seed"])
    threads = args.threads if args.threads is not None else cfg["threads"]
    for key in ("features", "targets", "groups"):
        if cfg[key] is None:
            raise ParameterError(f"benchmark needs {key}= in the config file")
    X = matio.read_matrix(cfg["features"])
    Y = matio.read_matrix(cfg["targets"])
    if hasattr(Y, "todense"):
        Y = np.asarray(Y.todense())
    task = evaluation.TaskData(
        name=cfg["task"],
        X=X,
        Y=Y,
        groups=_load_groups(cfg["groups"]),
        projector_k=cfg["projector_k"],
        log1p=cfg["log1p"],
    )
    models = _model_configs(cfg, [m.strip() for m in cfg["models"].split(",") if m.strip()])
    rep = evaluation.benchmark_run(task, models, cfg["k"], seed, threads=threads)
    out = args.out or os.path.join(cfg["output_dir"], "results.csv")
    os.makedirs(os.path.dirname(os.path.abspath(out)), exist_ok=True)
    _write_text(out, rep.to_csv(zero_times=args.zero_times))
    print(f"wrote {out}", file=sys.stderr)
    return 0


def cmd_report(args):
    from dataclasses import dataclass

    @dataclass
    class Row:
        model: str
        task: str
        correlation_score: float
        mse: float

    rows = []
    with open(args.results) as fh:
        header = fh.readline().strip()
        if header != evaluation.CSV_HEADER:
            raise OmxError(f"{args.results}: unexpected header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.strip().split(",")
            if len(parts) != 8:
                raise OmxError(f"{args.results}:{lineno}: expected 8 fields")
            rows.append(Row(parts[0], parts[1], float(parts[2]), float(parts[3])))
    if not rows:
        raise OmxError(f"{args.results}: no result rows")
    corr_svg, mse_svg = report.render_charts(rows)
    os.makedirs(args.out_dir, exist_ok=True)
    _write_text(os.path.join(args.out_dir, "correlation.svg"), corr_svg)
    _write_text(os.path.join(args.out_dir, "mse.svg"), mse_svg)
    print(f"wrote charts to {args.out_dir}", file=sys.stderr)
    return 0


def build_parser():
    p = _Parser(prog="omx", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("datagen", help="write a synthetic task to a directory")
    d.add_argument("--out", required=True)
    d.add_argument("--n-cells", type=int, default=2000)
    d.add_argument("--d-input", type=int, default=256)
    d.add_argument("--d-output", type=int, default=32)
    d.add_argument("--latent-rank", type=int, default=8)
    d.add_argument("--noise-sigma", type=float, default=0.05)
    d.add_argument("--n-groups", type=int, default=6)
    d.add_argument("--sparsity", type=float, default=0.5)
    d.add_argument("--seed", type=int, default=None)
    d.set_defaults(fn=cmd_datagen)

    f = sub.add_parser("fit", help="fit one model on a features/targets pair")
    f.add_argument("--model", required=True, choices=("esn", "elm", "forest"))
    f.add_argument("--features", required=True)
    f.add_argument("--targets", required=True)
    f.add_argument("--out", required=True)
    f.add_argument("--config", default=None)
    f.add_argument("--seed", type=int, default=None)
    f.add_argument("--threads", type=int, default=1)
    f.set_defaults(fn=cmd_fit)

    pr = sub.add_parser("predict", help="predict with a saved model")
    pr.add_argument("--model-file", required=True)
    pr.add_argument("--features", required=True)
    pr.add_argument("--out", required=True)
    pr.set_defaults(fn=cmd_predict)

    b = sub.add_parser("benchmark", help="grouped K-fold model comparison")
    b.add_argument("--config", required=True)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--threads", type=int, default=None)
    b.add_argument("--out", default=None)
    b.add_argument(
        "--zero-times",
        action="store_true",
        help="write 0 in the wall-time columns so reruns are byte-identical",
    )
    b.set_defaults(fn=cmd_benchmark)

    r = sub.add_parser("report", help="render SVG bar charts from results.csv")
    r.add_argument("results")
    r.add_argument("--out-dir", default=".")
    r.set_defaults(fn=cmd_report)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    except OmxError as exc:
        print(f"omx: error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"omx: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
