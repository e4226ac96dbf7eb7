"""Reading trial tables, model persistence and curve/histogram output.

Model files are JSON documents::

    {
      "format": "rctshrink-model",
      "version": 1,
      "type": "ZMixture" | "SnrPrior",
      "weights": [...],
      "sds": [...],            # sigma_k for ZMixture, tau_k for SnrPrior
      "provenance": {"data_sha256": ..., "config": {...}, "diagnostics": {...}}
    }

Floats are written with ``repr`` precision so a write/read round trip is
exact.  Curve files are comma-separated with a leading ``# curve: ...`` line
describing the quantity, followed by a column header.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import CRIT, exaggeration_given_sig, power, power_sample
from .em import FitDiagnostics
from .errors import (EmptyInputError, InvalidInputError, SchemaMismatchError,
                     VersionUnsupportedError)
from .model import SnrPrior, TrialRecord, ZMixture, mixture_cdf
from .posterior import conditional_coverage, ratio_quartiles_given_z

__all__ = [
    "IngestReport",
    "read_trials",
    "write_trials",
    "file_sha256",
    "ModelRecord",
    "write_model",
    "read_model",
    "GridSpec",
    "emit_curves",
    "histogram_table",
    "emit_histogram",
    "write_table",
]

MODEL_FORMAT = "rctshrink-model"
MODEL_VERSION = 1
SUPPORTED_VERSIONS = (1,)
_MODEL_TYPES = {"ZMixture": (ZMixture, "sigmas"), "SnrPrior": (SnrPrior, "taus")}


@dataclass
class IngestReport:
    n_accepted: int = 0
    n_rejected: int = 0
    rejections: list = field(default_factory=list)  # (line number, reason)

    def reject(self, line, reason):
        self.n_rejected += 1
        self.rejections.append((line, reason))


def _sniff_delimiter(path, first_line):
    if Path(path).suffix.lower() in (".tsv", ".tab"):
        return "\t"
    try:
        return csv.Sniffer().sniff(first_line, delimiters=",;\t").delimiter
    except csv.Error:
        return ","


def read_trials(path, delimiter=None):
    """Parse a delimited table with columns ``b``, ``s`` and optionally ``id``.

    Bad rows are skipped and recorded in the report, never fatal.  Rejection
    reasons: ``missing-field``, ``non-numeric``, ``non-finite``,
    ``nonpositive-standard-error``.

    Returns
    -------
    trials : list of TrialRecord
    report : IngestReport
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        first = fh.readline()
        fh.seek(0)
        delim = delimiter or _sniff_delimiter(path, first)
        reader = csv.reader(fh, delimiter=delim)
        try:
            header = [h.strip().lower() for h in next(reader)]
        except StopIteration:
            raise EmptyInputError(f"{path}: file is empty") from None
        if "b" not in header or "s" not in header:
            raise InvalidInputError(f"{path}: header must name columns b and s, got {header}")
        ib, is_ = header.index("b"), header.index("s")
        iid = header.index("id") if "id" in header else None
        trials, report = [], IngestReport()
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            need = max(ib, is_, iid if iid is not None else 0)
            if len(row) <= need or not row[ib].strip() or not row[is_].strip():
                report.reject(line, "missing-field")
                continue
            try:
                b, s = float(row[ib]), float(row[is_])
            except ValueError:
                report.reject(line, "non-numeric")
                continue
            if not (math.isfinite(b) and math.isfinite(s)):
                report.reject(line, "non-finite")
                continue
            if s <= 0:
                report.reject(line, "nonpositive-standard-error")
                continue
            tid = row[iid].strip() if iid is not None and row[iid].strip() else f"row{line}"
            trials.append(TrialRecord(tid, b, s))
            report.n_accepted += 1
    if not trials:
        raise EmptyInputError(f"{path}: no valid rows ({report.n_rejected} rejected)")
    return trials, report


def write_trials(trials, path):
    write_table(path, ["id", "b", "s"], ([t.id, t.b, t.s] for t in trials))


def file_sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


@dataclass
class ModelRecord:
    model: object
    diagnostics: FitDiagnostics | None = None
    provenance: dict = field(default_factory=dict)


def write_model(m, path, diagnostics=None, data_sha256=None, config=None):
    """Serialize a :class:`ZMixture` or :class:`SnrPrior` to JSON."""
    kind = type(m).__name__
    if kind not in _MODEL_TYPES:
        raise InvalidInputError(f"cannot serialize {kind}")
    sds = getattr(m, _MODEL_TYPES[kind][1])
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "type": kind,
        "weights": list(m.weights),
        "sds": list(sds),
        "provenance": {
            "software": f"rctshrink {__version__}",
            "data_sha256": data_sha256,
            "config": config,
            "diagnostics": diagnostics.to_dict() if diagnostics is not None else None,
        },
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def read_model(path) -> ModelRecord:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaMismatchError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise SchemaMismatchError(f"{path}: not a {MODEL_FORMAT} file")
    if doc.get("version") not in SUPPORTED_VERSIONS:
        raise VersionUnsupportedError(f"{path}: unsupported version {doc.get('version')!r}")
    kind = doc.get("type")
    if kind not in _MODEL_TYPES:
        raise SchemaMismatchError(f"{path}: unknown model type {kind!r}")
    try:
        model = _MODEL_TYPES[kind][0](doc["weights"], doc["sds"])
    except (KeyError, InvalidInputError) as exc:
        raise SchemaMismatchError(f"{path}: bad model body ({exc})") from exc
    prov = doc.get("provenance") or {}
    diag = prov.get("diagnostics")
    return ModelRecord(model, FitDiagnostics(**diag) if diag else None, prov)


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_table(path, header, rows, comment=None):
    """Write a comma-separated table; floats use full precision."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


@dataclass(frozen=True)
class GridSpec:
    """Grids for the emitted curves.

    |SNR| runs over ``snr_step, 2*snr_step, ..., snr_max``; z over
    ``0, z_step, ..., z_max`` (z = 0 is skipped for ratio quartiles).
    """

    snr_max: float = 6.0
    snr_step: float = 0.05
    z_max: float = 6.0
    z_step: float = 0.05
    power_draws: int = 1_000_000
    power_bins: int = 50
    seed: int = 0

    def __post_init__(self):
        if not (self.snr_max > self.snr_step > 0 and self.z_max > self.z_step > 0):
            raise InvalidInputError("grid maxima must exceed positive steps")
        if self.power_draws < 1 or self.power_bins < 1:
            raise InvalidInputError("power_draws and power_bins must be >= 1")

    def snr_grid(self):
        n = int(round(self.snr_max / self.snr_step))
        return self.snr_step * np.arange(1, n + 1)

    def z_grid(self):
        n = int(round(self.z_max / self.z_step))
        return self.z_step * np.arange(0, n + 1)


CURVE_FILES = {
    "power_vs_snr": "power_vs_snr.csv",
    "exaggeration_vs_snr": "exaggeration_vs_snr.csv",
    "exaggeration_vs_power": "exaggeration_vs_power.csv",
    "power_histogram": "power_histogram.csv",
    "ratio_quartiles_raw": "ratio_quartiles_raw.csv",
    "ratio_quartiles_shrunk": "ratio_quartiles_shrunk.csv",
    "coverage_vs_z": "coverage_vs_z.csv",
}


def emit_curves(p: SnrPrior, out_dir, grid: GridSpec = GridSpec(), crit: float = CRIT):
    """Write every curve table for ``p`` into ``out_dir``; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {name: out / fname for name, fname in CURVE_FILES.items()}

    snr = grid.snr_grid()
    pw = power(snr, crit)
    ex = exaggeration_given_sig(snr, crit)
    write_table(paths["power_vs_snr"], ["abs_snr", "power"], zip(snr, pw),
                "curve: achieved power vs |SNR|")
    write_table(paths["exaggeration_vs_snr"], ["abs_snr", "exaggeration"], zip(snr, ex),
                "curve: exaggeration ratio given significance vs |SNR|")
    write_table(paths["exaggeration_vs_power"], ["power", "exaggeration"], zip(pw, ex),
                "curve: exaggeration ratio given significance vs power")

    sample = power_sample(p, grid.power_draws, grid.seed, crit)
    counts, edges = np.histogram(sample, bins=grid.power_bins, range=(power(0.0, crit), 1.0))
    dens = counts / (sample.size * np.diff(edges))
    write_table(paths["power_histogram"], ["bin_lo", "bin_hi", "count", "density"],
                zip(edges[:-1], edges[1:], counts, dens),
                f"curve: histogram of achieved power, {grid.power_draws} draws, seed {grid.seed}")

    zs = grid.z_grid()
    for est in ("raw", "shrunk"):
        rows = ([z, *ratio_quartiles_given_z(p, z, est)] for z in zs if z > 0)
        label = "|z|" if est == "raw" else "|E(SNR|z)|"
        write_table(paths[f"ratio_quartiles_{est}"], ["z", "q25", "q50", "q75"], rows,
                    f"curve: quartiles of {label}/|SNR| given z")
    write_table(paths["coverage_vs_z"], ["z", "coverage"],
                ((z, conditional_coverage(p, z, crit)) for z in zs),
                f"curve: conditional coverage of b +- {crit}s given z")
    return list(paths.values())


def histogram_table(zs, bins=60, symmetrize=False, overlay: ZMixture | None = None):
    """Histogram of z-values on bins symmetric about 0.

    ``bins`` is a bin count or an explicit edge array; explicit edges must
    be symmetric when ``symmetrize`` is set.  Symmetrizing adds to each bin
    the count of its mirror image, i.e. histograms the pooled sample
    ``(z, -z)``.  With ``overlay`` the bin-averaged mixture density is added.

    Returns
    -------
    header : list of str
    rows : list of lists
    """
    z = np.asarray(zs, dtype=float).ravel()
    if z.size == 0 or not np.all(np.isfinite(z)):
        raise InvalidInputError("z-values must be a nonempty finite sample")
    if np.ndim(bins) == 0:
        if int(bins) < 1:
            raise InvalidInputError("need at least one bin")
        top = float(np.max(np.abs(z))) or 1.0
        top *= 1 + 1e-9
        edges = np.linspace(-top, top, int(bins) + 1)
    else:
        edges = np.asarray(bins, dtype=float)
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise InvalidInputError("bin edges must be strictly increasing")
        if symmetrize and not np.allclose(edges, -edges[::-1], rtol=0, atol=1e-12):
            raise InvalidInputError("symmetrized histograms need edges symmetric about 0")
    counts, _ = np.histogram(z, bins=edges)
    total = z.size
    if symmetrize:
        counts = counts + counts[::-1]
        total = 2 * z.size
    width = np.diff(edges)
    header = ["bin_lo", "bin_hi", "count", "density"]
    cols = [edges[:-1], edges[1:], counts, counts / (total * width)]
    if overlay is not None:
        header.append("fit_density")
        cols.append(np.diff(mixture_cdf(overlay, edges)) / width)
    return header, [list(r) for r in zip(*cols)]


def emit_histogram(zs, bins, symmetrize, overlay, path):
    header, rows = histogram_table(zs, bins, symmetrize, overlay)
    kind = "symmetrized histogram" if symmetrize else "histogram"
    write_table(path, header, rows, f"curve: {kind} of z-values with mixture fit")
    return path
