"""
Reproducible Monte Carlo runs over uniform random quadrangulations.

Every sample draws its map from its own seed, a 64-bit hash of
``(master seed, size, unit, index)``, so a row can be regenerated alone and
the worker count never changes the output.  Aggregates are computed from the
records sorted by index.
"""

from __future__ import annotations

import csv
import hashlib
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .maps import code_hash
from .trees import sample_quadrangulation
from .walks import (face_kernel, relaxation_time, tv_mixing_time,
                    uniform_mixing_time, vertex_kernel)

UNITS = ("faces", "vertices")
CHAINS = ("vertex", "face")
MEASURES = ("uniform", "tv", "rel")
DEFAULT_CHAINS = ("vertex:uniform", "vertex:tv", "vertex:rel", "face:uniform")


@dataclass
class ExperimentConfig:
    sizes: list[int]
    samples: int
    seed: int = 0
    unit: str = "faces"
    eps: float = 0.5
    chains: tuple[str, ...] = DEFAULT_CHAINS
    out: str = "."
    tv_norm: str = "half"
    hist_bins: int = 40

    def __post_init__(self):
        self.sizes = [int(s) for s in self.sizes]
        self.chains = tuple(self.chains)
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.unit not in UNITS:
            raise ValueError(f"unit must be one of {UNITS}")
        if not self.sizes or min(self.sizes) < 1:
            raise ValueError("sizes must be >= 1")
        if self.unit == "vertices" and min(self.sizes) < 3:
            raise ValueError("a quadrangulation has at least 3 vertices")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if self.tv_norm not in ("half", "l1"):
            raise ValueError("tv_norm must be 'half' or 'l1'")
        for c in self.chains:
            chain, _, what = c.partition(":")
            if chain not in CHAINS or what not in MEASURES:
                raise ValueError(f"bad chain id {c!r}; use e.g. vertex:uniform")

    @classmethod
    def from_text(cls, text: str) -> ExperimentConfig:
        raw = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"line {lineno}: expected key=value")
            raw[key.strip()] = value.strip()
        kw = {}
        for key, value in raw.items():
            if key == "sizes":
                kw[key] = [int(v) for v in value.replace(",", " ").split()]
            elif key == "chains":
                kw[key] = tuple(v for v in value.replace(",", " ").split())
            elif key in ("samples", "seed", "hist_bins"):
                kw[key] = int(value)
            elif key == "eps":
                kw[key] = float(value)
            elif key in ("unit", "out", "tv_norm"):
                kw[key] = value
            else:
                raise ValueError(f"unknown config key {key!r}")
        return cls(**kw)

    @classmethod
    def from_file(cls, path) -> ExperimentConfig:
        return cls.from_text(Path(path).read_text())

    def faces(self, size: int) -> int:
        return size - 2 if self.unit == "vertices" else size


def sample_seed(master: int, size: int, unit: str, index: int) -> int:
    h = hashlib.blake2b(f"{master}|{size}|{unit}|{index}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def column(chain_id: str) -> str:
    chain, _, what = chain_id.partition(":")
    return f"tau_{chain}_{what}"


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("QUADMIX_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class SampleRecord:
    size: int
    unit: str
    faces: int
    vertices: int
    index: int
    seed: int
    map_hash: str = ""
    max_degree: int = 0
    values: dict = field(default_factory=dict)
    error: str = ""


def _measure_chain(q, chain, what, eps, tv_norm):
    K = vertex_kernel(q) if chain == "vertex" else face_kernel(q)
    if what == "uniform":
        return uniform_mixing_time(K, eps)
    if what == "tv":
        return tv_mixing_time(K, eps, tv_norm)
    return relaxation_time(K)[1]


def run_sample(cfg: ExperimentConfig, size: int, index: int) -> SampleRecord:
    faces = cfg.faces(size)
    seed = sample_seed(cfg.seed, size, cfg.unit, index)
    rec = SampleRecord(size, cfg.unit, faces, faces + 2, index, seed)
    try:
        q = sample_quadrangulation(faces, seed)
        rec.map_hash = code_hash(q.code)
        rec.max_degree = int(q.degrees.max())
        for ident in cfg.chains:
            chain, _, what = ident.partition(":")
            rec.values[column(ident)] = _measure_chain(q, chain, what, cfg.eps, cfg.tv_norm)
    except Exception as exc:  # recorded per row, never aborts the batch
        rec.error = f"{type(exc).__name__}: {exc}"
    return rec


def _run_batch(args):
    cfg, size, lo, hi = args
    return [run_sample(cfg, size, i) for i in range(lo, hi)]


def collect(cfg: ExperimentConfig, size: int) -> list[SampleRecord]:
    workers = _worker_count()
    if workers == 1:
        return _run_batch((cfg, size, 0, cfg.samples))
    step = max(1, -(-cfg.samples // (4 * workers)))
    jobs = [(cfg, size, lo, min(lo + step, cfg.samples)) for lo in range(0, cfg.samples, step)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        out = [r for batch in pool.map(_run_batch, jobs) for r in batch]
    return sorted(out, key=lambda r: r.index)


# -- aggregation -------------------------------------------------------------

def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float) or isinstance(x, np.floating):
        if math.isnan(x):
            return "nan"
        return format(float(x), ".17g")
    return str(x)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


class Moments:
    """Sums of values and pairwise products, mergeable in any order."""

    def __init__(self, names):
        self.names = list(names)
        self.n = 0
        k = len(self.names)
        self.s = np.zeros(k)
        self.ss = np.zeros((k, k))

    def add(self, row):
        x = np.asarray(row, dtype=float)
        self.n += 1
        self.s += x
        self.ss += np.outer(x, x)

    def merge(self, other):
        self.n += other.n
        self.s += other.s
        self.ss += other.ss
        return self

    def mean(self):
        return self.s / self.n

    def cov(self):
        """Unbiased covariance matrix."""
        if self.n < 2:
            return np.full((len(self.names),) * 2, math.nan)
        m = self.mean()
        return (self.ss - self.n * np.outer(m, m)) / (self.n - 1)

    def sd(self):
        return np.sqrt(np.maximum(np.diag(self.cov()), 0.0))

    def corr(self):
        c = self.cov()
        sd = self.sd()
        with np.errstate(invalid="ignore", divide="ignore"):
            return c / np.outer(sd, sd)


def _moments(records, names):
    mom = Moments(names)
    for r in records:
        if not r.error:
            mom.add([r.values[c] for c in names])
    return mom


def pearson(records, a: str, b: str) -> float:
    mom = _moments(records, [a, b])
    return float(mom.corr()[0, 1])


def _histogram(values, mean, bins):
    scaled = np.asarray(values, dtype=float) / mean
    top = max(float(scaled.max()), 1e-12)
    counts, edges = np.histogram(scaled, bins=bins, range=(0.0, top * (1 + 1e-12)))
    width = edges[1] - edges[0]
    return counts, edges, counts / (len(scaled) * width)


@dataclass
class ExperimentResult:
    records: dict
    columns: list
    paths: dict


def run_mixing_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    cols = [column(c) for c in cfg.chains]
    by_size = {size: collect(cfg, size) for size in cfg.sizes}
    paths = {}

    header = ["size", "unit", "faces", "vertices", "index", "seed", "map_hash",
              "max_degree"] + cols + ["error"]
    rows = []
    for size in cfg.sizes:
        for r in by_size[size]:
            vals = [r.values.get(c, math.nan) for c in cols]
            rows.append([r.size, r.unit, r.faces, r.vertices, r.index, r.seed, r.map_hash,
                         r.max_degree] + vals + [r.error])
    paths["samples"] = out / "samples.csv"
    _write_csv(paths["samples"], header, rows)

    pairs = [(a, b) for i, a in enumerate(cols) for b in cols[i + 1:]]
    header = ["size", "unit", "samples", "errors"]
    for c in cols:
        header += [f"mean_{c}", f"sd_{c}"]
    header += [f"corr_{a}__{b}" for a, b in pairs]
    rows = []
    for size in cfg.sizes:
        recs = by_size[size]
        mom = _moments(recs, cols)
        row = [size, cfg.unit, mom.n, len(recs) - mom.n]
        if mom.n:
            mean, sd, corr = mom.mean(), mom.sd(), mom.corr()
        else:
            k = len(cols)
            mean, sd, corr = np.full(k, math.nan), np.full(k, math.nan), np.full((k, k), math.nan)
        for i in range(len(cols)):
            row += [float(mean[i]), float(sd[i])]
        row += [float(corr[cols.index(a), cols.index(b)]) for a, b in pairs]
        rows.append(row)
    paths["summary"] = out / "summary.csv"
    _write_csv(paths["summary"], header, rows)

    for size in cfg.sizes:
        good = [r for r in by_size[size] if not r.error]
        rows = []
        for c in cols:
            vals = [r.values[c] for r in good]
            if not vals:
                continue
            mean = float(np.mean(vals))
            if mean <= 0:
                continue
            counts, edges, dens = _histogram(vals, mean, cfg.hist_bins)
            for k in range(len(counts)):
                rows.append([c, float(edges[k]), float(edges[k + 1]), int(counts[k]), float(dens[k])])
        paths[f"hist_{size}"] = out / f"hist_{size}.csv"
        _write_csv(paths[f"hist_{size}"], ["quantity", "bin_left", "bin_right", "count", "density"], rows)

    tau = column("vertex:uniform")
    if tau in cols:
        rows = []
        for size in cfg.sizes:
            vals = np.array([r.values[tau] / size for r in by_size[size] if not r.error], dtype=float)
            if len(vals) == 0:
                continue
            mean = float(vals.mean())
            sd = float(vals.std(ddof=1)) if len(vals) > 1 else math.nan
            rows.append([size, cfg.unit, math.log(size), mean, sd, mean - sd, mean + sd])
        paths["trend"] = out / "trend.csv"
        _write_csv(paths["trend"], ["size", "unit", "ln_size", "mean_tau_over_size",
                                    "sd_tau_over_size", "lower", "upper"], rows)
    return ExperimentResult(by_size, cols, paths)


def degree_experiment(cfg: ExperimentConfig) -> list[dict]:
    """Fraction of samples whose maximum degree exceeds ln(face count)."""
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    light = ExperimentConfig(cfg.sizes, cfg.samples, cfg.seed, cfg.unit, cfg.eps, (), cfg.out)
    results = []
    for size in cfg.sizes:
        recs = collect(light, size)
        good = [r for r in recs if not r.error]
        n = cfg.faces(size)
        over = sum(1 for r in good if r.max_degree > math.log(n))
        frac = over / len(good) if good else math.nan
        mean_deg = float(np.mean([r.max_degree for r in good])) if good else math.nan
        results.append(dict(size=size, unit=cfg.unit, faces=n, samples=len(good),
                            errors=len(recs) - len(good), log_faces=math.log(n),
                            mean_max_degree=mean_deg, fraction_over=frac))
    header = list(results[0]) if results else []
    _write_csv(out / "degree.csv", header, [list(r.values()) for r in results])
    return results
