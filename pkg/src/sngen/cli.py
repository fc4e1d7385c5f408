"""``sng`` command line: generation runs, searches and the KRK dataset tools."""
from __future__ import annotations

import argparse
import copy
import hashlib
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from . import __version__
from .backends import ChatBackend, ChatConfig, MockUniformBackend, RecordedSession, RecordingTransport, ReplayTransport
from .backends.chat import HttpxTransport
from .backends.prompts import krk_prompt, molecule_prompt
from .domains import factorspace, krk
from .exceptions import BackendError, GenAborted
from .gen import run_gen
from .hypothesis import FactorSpecification
from .scoring import LabelledExamples, QConfig
from .search import SearchConfig, run_genmol
from .serialization import hypothesis_from_json, hypothesis_to_json, spec_to_json, triple_to_json

log = logging.getLogger("sngen")

DEFAULTS: dict[str, Any] = {
    "domain": "factorspace",
    "seed": 0,
    "factors": [
        {"name": "affinity", "lo": 3.0, "hi": 10.0, "direction": "maximize"},
        {"name": "molwt", "lo": 200.0, "hi": 700.0, "direction": "free"},
        {"name": "sas", "lo": 0.0, "hi": 7.0, "direction": "minimize"},
    ],
    "universe": {"size": 2000, "seed": 0},
    "examples": {"n_positives": 5, "n_negatives": 5, "n_unlabelled": 1000},
    "backend": {"kind": "mock"},
    "search": {
        "n_candidates": 10,
        "max_steps": 10,
        "gen_iterations": 10,
        "gen_samples": 10,
        "theta": None,
        "strategy": "latin",
        "epsilon": 0.0,
        "final_samples": 100,
        "weighted_score": False,
        "seeded": True,
        "n_jobs": 1,
    },
    "gen": {"iterations": 5, "samples": 30, "shots": 0},
}


class ConfigError(ValueError):
    pass


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(path: Optional[str], overrides: dict) -> tuple[dict, Path]:
    """Defaults, then the YAML file, then command-line flags."""
    file_cfg: dict = {}
    base_dir = Path.cwd()
    if path:
        p = Path(path)
        try:
            file_cfg = yaml.safe_load(p.read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a mapping")
        base_dir = p.resolve().parent
    cfg = _merge(DEFAULTS, file_cfg)
    if "factors" in file_cfg:
        cfg["factors"] = file_cfg["factors"]
    cfg = _merge(cfg, overrides)
    if cfg["domain"] not in ("krk", "factorspace"):
        raise ConfigError(f"unknown domain {cfg['domain']!r}")
    return cfg, base_dir


def config_digest(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True, default=str).encode()).hexdigest()


def _read_lines(path: Path) -> list[str]:
    return [line.strip() for line in path.read_text().splitlines() if line.strip()]


# ---------------------------------------------------------------- domain setup


class Domain:
    """Background, universe and example sets resolved from a config."""

    def __init__(self, cfg: dict, base_dir):
        base_dir = Path(base_dir)
        self.name = cfg["domain"]
        ex = cfg.get("examples", {})
        rng = np.random.default_rng(cfg["seed"])
        if self.name == "krk":
            self.background = krk.background()
            self.universe = list(self.background.universe)
            default_pos = [p.encode() for p in krk.checkmates()]
        else:
            u = cfg["universe"]
            self.universe = list(factorspace.random_universe(int(u["size"]), int(u["seed"])))
            self.background = factorspace.background(tuple(self.universe))
            default_pos = sorted(self.universe, key=lambda e: (-factorspace.affinity_like(e), e))

        def resolve(key):
            return _read_lines(base_dir / ex[key]) if ex.get(key) else None

        self.positives = resolve("positives")
        if self.positives is None:
            self.positives = default_pos[: int(ex.get("n_positives", 5))]
        self.negatives = resolve("negatives")
        if self.negatives is None:
            rest = sorted(set(self.universe) - set(self.positives))
            k = min(int(ex.get("n_negatives", 5)), len(rest))
            self.negatives = [rest[i] for i in sorted(rng.choice(len(rest), size=k, replace=False))] if k else []
        self.unlabelled = resolve("unlabelled")
        if self.unlabelled is None:
            k = min(int(ex.get("n_unlabelled", 1000)), len(self.universe))
            self.unlabelled = [self.universe[i] for i in sorted(rng.choice(len(self.universe), size=k, replace=False))]

    def decode_all(self, encodings):
        out = []
        for e in encodings:
            x = self.background.decode(e)
            if x is None:
                raise ConfigError(f"example {e!r} is not a valid {self.name} instance")
            out.append(x)
        return out


def build_backend(cfg: dict, domain: Domain, out_dir: Path):
    """Return ``(backend, finalize)``; ``finalize()`` yields extra files to write."""
    b = cfg["backend"]
    kind = b.get("kind", "mock")
    if kind == "mock":
        return MockUniformBackend(domain.universe), lambda: {}
    if kind not in ("chat", "replay"):
        raise ConfigError(f"unknown backend kind {kind!r}")
    fields = {k: b[k] for k in ChatConfig.__dataclass_fields__ if k in b}
    prompt = krk_prompt if domain.name == "krk" else molecule_prompt
    if kind == "replay":
        if "session" not in b:
            raise ConfigError("replay backend needs a 'session' path")
        fields["api_key_env"] = None
        session = RecordedSession.load(_resolve_path(b["session"], cfg))
        return ChatBackend(ChatConfig(**fields), ReplayTransport(session), prompt=prompt), lambda: {}
    config = ChatConfig(**fields)
    if b.get("record"):
        recorder = RecordingTransport(HttpxTransport())
        backend = ChatBackend(config, recorder, prompt=prompt)

        def finalize():
            fd, tmp = tempfile.mkstemp()
            os.close(fd)
            recorder.session.save(tmp)
            text = Path(tmp).read_text()
            os.unlink(tmp)
            return {"session.json": text}

        return backend, finalize
    return ChatBackend(config, prompt=prompt), lambda: {}


def _resolve_path(path: str, cfg: dict) -> Path:
    p = Path(path)
    return p if p.is_absolute() else Path(cfg.get("_base_dir", ".")) / p


def _write_outputs(out_dir: Path, files: dict[str, str]) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=f".{name}.")
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, out_dir / name)


def _manifest(command: str, cfg: dict) -> str:
    public = {k: v for k, v in cfg.items() if not k.startswith("_")}
    data = {
        "command": command,
        "code_version": __version__,
        "config": public,
        "config_digest": config_digest(public),
        "seed": cfg["seed"],
    }
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------- commands


def cmd_gen(args) -> int:
    cfg = _prepare(args)
    domain = Domain(cfg, cfg["_base_dir"])
    try:
        h = hypothesis_from_json(json.loads(Path(args.hypothesis).read_text()))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load hypothesis {args.hypothesis}: {exc}") from exc
    g = cfg["gen"]
    n, s = int(g["iterations"]), int(g["samples"])
    shots = domain.decode_all(domain.positives[: int(g.get("shots", 0))])
    out_dir = Path(args.out_dir)
    backend, finalize = build_backend(cfg, domain, out_dir)
    try:
        outcome = run_gen(backend, shots, domain.background, h, n, s, cfg["seed"])
    except GenAborted as exc:
        log.error("%s", exc)
        if exc.partial is not None:
            _write_outputs(out_dir, {"trace.jsonl": "".join(json.dumps(r.to_json(), sort_keys=True) + "\n" for r in exc.partial.trace)})
        return 1
    enc = domain.background.encode
    result = {
        "hypothesis": hypothesis_to_json(h),
        "weight": outcome.weight,
        "accepted": sorted(enc(x) for x in outcome.accepted),
        "n": n,
        "s": s,
    }
    trace = "".join(json.dumps(r.to_json(), sort_keys=True) + "\n" for r in outcome.trace)
    report = [f"hypothesis: {h.describe().splitlines()[0]}", f"iterations: {n}  samples per iteration: {s}"]
    report += [f"iteration {r.iteration}: drawn={r.drawn} accepted_total={r.accepted_total}" for r in outcome.trace]
    report.append(f"|accepted| = {len(outcome.accepted)}  weight = {outcome.weight:.6f}")
    files = {
        "manifest.json": _manifest("gen", cfg),
        "result.json": _dumps(result),
        "trace.jsonl": trace,
        "report.txt": "\n".join(report) + "\n",
    }
    files.update(finalize())
    _write_outputs(out_dir, files)
    print(report[-1])
    return 0


def cmd_genmol(args) -> int:
    cfg = _prepare(args)
    if cfg["domain"] != "factorspace":
        raise ConfigError("genmol searches factor intervals and needs the factorspace domain")
    domain = Domain(cfg, cfg["_base_dir"])
    spec = FactorSpecification.from_records(cfg["factors"])
    domain.background.check_covers(spec)
    sc = dict(cfg["search"])
    theta = sc.pop("theta")
    search_cfg = SearchConfig(theta=-math.inf if theta is None else float(theta), seed=int(cfg["seed"]),
                              **{k: v for k, v in sc.items() if k != "epsilon"})
    qcfg = QConfig(epsilon=float(sc["epsilon"]), unlabelled=tuple(domain.decode_all(domain.unlabelled)))
    examples = LabelledExamples(frozenset(domain.decode_all(domain.positives)), frozenset(domain.decode_all(domain.negatives)))
    out_dir = Path(args.out_dir)
    backend, finalize = build_backend(cfg, domain, out_dir)
    triple, trace = run_genmol(backend, examples, domain.background, spec, search_cfg, qcfg)
    result = triple_to_json(triple, domain.background.encode)
    result["stop_reason"] = trace.stop_reason.value
    result["spec"] = spec_to_json(spec)
    report = [f"stop reason: {trace.stop_reason.value}", "chosen intervals:"]
    for name, (lo, hi) in zip(spec.factors, triple.hypothesis.experiment.vector):
        report.append(f"  {name}: [{lo:.6g}, {hi:.6g}]")
    w = triple.weight
    report.append(f"|support| = {len(triple.support)}")
    report.append(f"W = {w:.6f}" if math.isfinite(w) else "W = -inf")
    report.append("theta_hat chain: " + ", ".join(f"{t:.4f}" for t in trace.theta_hat_chain()))
    files = {
        "manifest.json": _manifest("genmol", cfg),
        "result.json": _dumps(result),
        "trace.jsonl": trace.to_jsonl(),
        "report.txt": "\n".join(report) + "\n",
    }
    files.update(finalize())
    _write_outputs(out_dir, files)
    print("\n".join(report))
    return 0


def cmd_krk_export(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=".krk.")
    os.close(fd)
    rows = krk.export_csv(tmp)
    os.replace(tmp, out_dir / "krk_canonical.csv")
    print(f"wrote {rows} rows to {out_dir / 'krk_canonical.csv'}")
    return 0


def cmd_krk_verify(args, checkmate_oracle=None, theory=None) -> int:
    counts = krk.verify_counts(checkmate_oracle or krk.is_checkmate, theory or krk.eval_theory)
    ok = krk.verification_passed(counts)
    print(
        f"total={counts['total']} wfw={counts['wfw']} theory-legal={counts['theory_legal']} "
        f"theory-illegal={counts['theory_illegal']} theory-noncanonical={counts['theory_noncanonical']}"
    )
    print("verification " + ("passed" if ok else "FAILED"))
    return 0 if ok else 1


def _prepare(args) -> dict:
    overrides: dict = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "backend", None):
        overrides["backend"] = {"kind": args.backend}
    search = {}
    if getattr(args, "theta", None) is not None:
        search["theta"] = args.theta
    if getattr(args, "steps", None) is not None:
        search["max_steps"] = args.steps
    if search:
        overrides["search"] = search
    cfg, base_dir = load_config(args.config, overrides)
    cfg["_base_dir"] = str(base_dir)
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sng", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def run_flags(p):
        p.add_argument("--config", help="YAML run configuration")
        p.add_argument("--seed", type=int)
        p.add_argument("--out-dir", default="sng-out")
        p.add_argument("--backend", choices=["mock", "chat", "replay"])

    p = sub.add_parser("gen", help="one generation run under a fixed hypothesis")
    run_flags(p)
    p.add_argument("--hypothesis", required=True, help="hypothesis JSON file")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("genmol", help="greedy interval-hypothesis search")
    run_flags(p)
    p.add_argument("--theta", type=float)
    p.add_argument("--steps", type=int)
    p.set_defaults(func=cmd_genmol)

    p = sub.add_parser("krk", help="KRK dataset tools")
    ksub = p.add_subparsers(dest="krk_command", required=True)
    e = ksub.add_parser("export", help="write the canonical positions as CSV")
    e.add_argument("--out-dir", default="sng-out")
    e.set_defaults(func=cmd_krk_export)
    v = ksub.add_parser("verify", help="check enumeration, checkmate and theory counts")
    v.set_defaults(func=cmd_krk_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BackendError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
