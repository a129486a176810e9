"""JSON family specs, certificates, CSV tables and run records.

Words are 0-based inside the library. Everything written to disk or read
from the command line uses 1-based indices, matching the labels
``f1, f2, ...``.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .maps import (Activation, CoordSelect, Compose, ConstShift, EntrywisePower, Family,
                   HarmonicMean, Identity, Linear, MapError, MapExpr, MinAugment, Scale, Sum,
                   ann, check_properties, power_mean_layer)
from .polytope import Certificate, FinitePrenorm

__version__ = "0.1.0"


class SpecError(ValueError):
    """Malformed family specification."""


def encode_value(v):
    """JSON-safe scalar: infinities become ``"inf"`` / ``"-inf"``."""
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return v
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.ndarray):
        return [encode_value(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [encode_value(x) for x in v]
    if isinstance(v, dict):
        return {str(k): encode_value(x) for k, x in v.items()}
    return v


def decode_value(v):
    if v == "inf":
        return math.inf
    if v == "-inf":
        return -math.inf
    if isinstance(v, list):
        return [decode_value(x) for x in v]
    return v


# -- map trees ---------------------------------------------------------------

def _matrix(node, key, where):
    if key not in node:
        raise SpecError(f"{where}: missing field {key!r}")
    try:
        a = np.array(node[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise SpecError(f"{where}.{key}: not numeric ({exc})") from None
    if np.any(a < 0):
        raise SpecError(f"{where}.{key}: negative entries are not allowed")
    return a


def map_from_dict(node, where="map") -> MapExpr:
    """Build a :class:`MapExpr` from its JSON form."""
    if not isinstance(node, dict) or "kind" not in node:
        raise SpecError(f"{where}: expected an object with a 'kind' field")
    kind = node["kind"]
    try:
        if kind == "linear":
            A = _matrix(node, "matrix", where)
            if A.ndim != 2:
                raise SpecError(f"{where}.matrix: expected a 2-D array")
            return Linear(A)
        if kind == "ann":
            b = _matrix(node, "b", where) if node.get("b") is not None else None
            return ann(_matrix(node, "A", where), _matrix(node, "B", where), b,
                       node.get("activation", "tanh"))
        if kind == "power_mean":
            return power_mean_layer(_matrix(node, "outer", where), _matrix(node, "inner", where),
                                    float(node["alpha"]))
        if kind == "compose":
            return Compose(map_from_dict(node.get("outer"), where + ".outer"),
                           map_from_dict(node.get("inner"), where + ".inner"))
        if kind == "sum":
            terms = node.get("terms") or []
            if not terms:
                raise SpecError(f"{where}.terms: empty")
            return Sum(tuple(map_from_dict(t, f"{where}.terms[{i}]") for i, t in enumerate(terms)))
        if kind == "scale":
            return Scale(float(node["c"]), map_from_dict(node.get("inner"), where + ".inner"))
        if kind == "power":
            return EntrywisePower(float(node["alpha"]))
        if kind == "activation":
            return Activation(node["name"])
        if kind == "const":
            return ConstShift(_matrix(node, "b", where))
        if kind == "identity":
            return Identity()
        if kind == "min_augment":
            return MinAugment(node.get("subset"))
        if kind == "harmonic_mean":
            return HarmonicMean(tuple(node.get("pair", (0, 1))))
        if kind == "select":
            return CoordSelect(tuple(node["indices"]))
    except MapError as exc:
        raise SpecError(f"{where}: {exc}") from None
    except KeyError as exc:
        raise SpecError(f"{where}: missing field {exc}") from None
    raise SpecError(f"{where}: unknown kind {kind!r}")


def map_to_dict(f: MapExpr) -> dict:
    """JSON form of a map tree (the inverse of :func:`map_from_dict`)."""
    if isinstance(f, Linear):
        return {"kind": "linear", "matrix": f.matrix.tolist()}
    if isinstance(f, Compose):
        return {"kind": "compose", "outer": map_to_dict(f.outer), "inner": map_to_dict(f.inner)}
    if isinstance(f, Sum):
        return {"kind": "sum", "terms": [map_to_dict(t) for t in f.terms]}
    if isinstance(f, Scale):
        return {"kind": "scale", "c": f.c, "inner": map_to_dict(f.inner)}
    if isinstance(f, EntrywisePower):
        return {"kind": "power", "alpha": f.alpha}
    if isinstance(f, Activation):
        return {"kind": "activation", "name": f.name}
    if isinstance(f, ConstShift):
        return {"kind": "const", "b": f.b.tolist()}
    if isinstance(f, Identity):
        return {"kind": "identity"}
    if isinstance(f, MinAugment):
        return {"kind": "min_augment", "subset": None if f.subset is None else list(f.subset)}
    if isinstance(f, HarmonicMean):
        return {"kind": "harmonic_mean", "pair": list(f.pair)}
    if isinstance(f, CoordSelect):
        return {"kind": "select", "indices": list(f.indices)}
    raise SpecError(f"cannot serialize {type(f).__name__}")


def family_from_dict(doc, check_samples: int = 256, seed=0) -> Family:
    if not isinstance(doc, dict):
        raise SpecError("family: expected a JSON object")
    if "dim" not in doc:
        raise SpecError("family: missing field 'dim'")
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise SpecError("family.dim: expected a positive integer")
    items = doc.get("maps")
    if not isinstance(items, list) or not items:
        raise SpecError("family.maps: expected a nonempty list")
    maps = tuple(map_from_dict(m, f"maps[{i}]") for i, m in enumerate(items))
    labels = doc.get("labels")
    try:
        F = Family(maps, dim, tuple(labels) if labels else None)
    except MapError as exc:
        raise SpecError(f"family: {exc}") from None
    rng = np.random.default_rng(seed)
    for i, f in enumerate(F.maps):
        try:
            out = f(np.ones(dim))
        except (MapError, ValueError, IndexError) as exc:
            raise SpecError(f"maps[{i}]: cannot evaluate on R^{dim}: {exc}") from None
        if np.shape(out) != (dim,):
            raise SpecError(f"maps[{i}]: output dimension {np.shape(out)} differs from {dim}")
        if check_samples:
            rep = check_properties(f, check_samples, rng, dim=dim)
            if not rep.ok:
                kinds = sorted({v["kind"] for v in rep.violations})
                warnings.warn(f"maps[{i}] ({F.labels[i]}): property violations {kinds}",
                              stacklevel=2)
    return F


def family_to_dict(F: Family) -> dict:
    return {"dim": F.dim, "labels": list(F.labels), "maps": [map_to_dict(f) for f in F.maps]}


def file_digest(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def load_family(path, check_samples: int = 256, seed=0) -> Family:
    """Read a family from a JSON file; property violations only warn."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return family_from_dict(doc, check_samples, seed)


def save_family(F: Family, path) -> None:
    with open(path, "w") as fh:
        json.dump(family_to_dict(F), fh, indent=2)
        fh.write("\n")


# -- words -------------------------------------------------------------------

def parse_word(text: str, n_maps: int | None = None) -> tuple:
    """``"1,2"`` -> ``(0, 1)``."""
    try:
        w = tuple(int(t) - 1 for t in str(text).replace(" ", "").split(",") if t)
    except ValueError:
        raise SpecError(f"bad word {text!r}; expected comma-separated 1-based indices") from None
    if not w or min(w) < 0 or (n_maps is not None and max(w) >= n_maps):
        raise SpecError(f"word {text!r} out of range")
    return w


def format_word(word) -> str:
    return "[" + ",".join(str(i + 1) for i in word) + "]"


# -- certificates ------------------------------------------------------------

def certificate_to_dict(cert: Certificate) -> dict:
    return {
        "status": cert.status,
        "smp": [i + 1 for i in cert.smp_word],
        "alpha": float(cert.alpha),
        "alpha_fixed": f"{cert.alpha:.15e}",
        "vertices": [z.tolist() for z in cert.prenorm.vertices],
        "generator_words": [[i + 1 for i in g] for g in cert.prenorm.generator_words],
        "tolerances": {"dom_tol": cert.dom_tol, "strict_witness_tol": cert.strict_witness_tol},
        "rounds": cert.rounds,
        "restarts": [[[i + 1 for i in a], [i + 1 for i in b]] for a, b in cert.restarts],
        "eigen_residual": encode_value(cert.eigen_residual),
        "x_star": None if cert.x_star is None else cert.x_star.tolist(),
    }


def certificate_from_dict(doc) -> Certificate:
    try:
        P = FinitePrenorm([np.array(z, float) for z in doc["vertices"]],
                          [tuple(i - 1 for i in g) for g in doc.get(
                              "generator_words", [[]] * len(doc["vertices"]))])
        tol = doc.get("tolerances", {})
        xs = doc.get("x_star")
        return Certificate(smp_word=tuple(i - 1 for i in doc["smp"]), alpha=float(doc["alpha"]),
                           prenorm=P, dom_tol=float(tol.get("dom_tol", 1e-9)),
                           strict_witness_tol=float(tol.get("strict_witness_tol", 1e-9)),
                           status=doc["status"], rounds=int(doc.get("rounds", 0)),
                           eigen_residual=float(decode_value(doc.get("eigen_residual", "nan"))),
                           x_star=None if xs is None else np.array(xs, float))
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"certificate: {exc}") from None


def vertex_rounds_csv(cert: Certificate) -> str:
    """Per-round vertex coordinates (for planar figures)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n = cert.prenorm.vertices[0].size
    w.writerow(["round", "vertex", "word"] + [f"x{i + 1}" for i in range(n)])
    for r, grp in enumerate(cert.round_members):
        for j in grp:
            z = cert.prenorm.vertices[j]
            w.writerow([r, j + 1, format_word(cert.prenorm.generator_words[j])]
                       + [repr(float(v)) for v in z])
    return buf.getvalue()


# -- tables ------------------------------------------------------------------

def _num(v) -> str:
    v = float(v)
    return "inf" if math.isinf(v) else repr(v)


def bracket_csv(bracket) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "L_k", "U_k", "best_word"])
    for k, lk, uk, word in bracket.rows:
        w.writerow([k, _num(lk), _num(uk), format_word(word)])
    return buf.getvalue()


def curve_csv(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["c", "rho_c", "residual", "monotone_ok"])
    for c, r, e, ok in report.rows():
        w.writerow([_num(c), _num(r), _num(e), str(bool(ok)).lower()])
    return buf.getvalue()


@dataclass
class ResultRecord:
    command: str
    inputs_digest: str
    outputs: dict
    timing: dict = field(default_factory=dict)
    version: str = __version__

    def to_dict(self) -> dict:
        return {"command": self.command, "inputs_digest": self.inputs_digest,
                "outputs": encode_value(self.outputs), "timing": self.timing,
                "version": self.version}

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")
