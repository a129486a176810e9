"""Command-line interface: ``python -m conejsr <command> FAMILY.json [options]``.

Exit codes: 0 success, 1 error, 2 certificate verification failed,
3 budget exhausted. Word indices on the command line are 1-based.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import io as cio
from .bounds import jsr_bracket, subhomogeneous_sandwich, trajectory_divergence_check
from .cone import ConeContext
from .maps import check_properties
from .polytope import AlgoConfig, run_polytope, verify_certificate
from .spectral import PowerConfig, eigencurve, power_iterate, slice_spectral_radius

EXIT_OK, EXIT_ERROR, EXIT_VERIFY_FAILED, EXIT_BUDGET = 0, 1, 2, 3


def _floats(text):
    return [float(t) for t in text.split(",") if t.strip()]


def _pair_to_dict(ep):
    return {"vector": ep.vector, "value": ep.value, "residual": ep.residual,
            "bracket": list(ep.bracket), "lower": ep.lower, "boundary": ep.boundary,
            "converged": ep.converged, "iterations": ep.iterations, "c": ep.c}


def _bracket_to_dict(b):
    return {"lower": b.lower, "upper": b.upper, "depth": b.depth,
            "witness_word": [i + 1 for i in b.witness_word], "complete": b.complete}


def _side(out: Path, suffix: str) -> Path:
    return out.with_name(out.stem + suffix)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conejsr", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("family", help="family JSON file")
        sp.add_argument("-o", "--output", default=None, help="result JSON path")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--max-iters", type=int, default=10000)
        sp.add_argument("--hilbert-tol", type=float, default=1e-13)
        sp.add_argument("--epsilon", type=float, default=0.0, help="interior perturbation")
        return sp

    sp = common(sub.add_parser("props", help="randomized property checks"))
    sp.add_argument("--samples", type=int, default=256)

    sp = common(sub.add_parser("spectral", help="power iteration per map or on a word"))
    sp.add_argument("--word", default=None, help="comma-separated 1-based indices")

    sp = common(sub.add_parser("eigencurve", help="slice eigenvalues over a grid"))
    sp.add_argument("--cgrid", default="0.1,1,10")
    sp.add_argument("--map", type=int, default=1, help="1-based map index")

    sp = common(sub.add_parser("jsr", help="bracket the JSR over words up to kmax"))
    sp.add_argument("--kmax", type=int, default=6)
    sp.add_argument("--base-point", default=None, help="comma-separated interior point")
    sp.add_argument("--max-words", type=int, default=2 ** 20)

    sp = common(sub.add_parser("sandwich", help="bounds through asymptotic families"))
    sp.add_argument("--kmax", type=int, default=4)
    sp.add_argument("--cgrid", default=None, help="also report slice estimates at these levels")

    sp = common(sub.add_parser("polytope", help="run the certification algorithm"))
    sp.add_argument("--smp", required=True, help="initial candidate, e.g. 1,2")
    sp.add_argument("--dom-tol", type=float, default=1e-9)
    sp.add_argument("--witness-tol", type=float, default=1e-9)
    sp.add_argument("--max-vertices", type=int, default=10000)
    sp.add_argument("--max-restarts", type=int, default=50)
    sp.add_argument("--extended-smp-update", action="store_true")

    sp = common(sub.add_parser("verify", help="re-check a certificate"))
    sp.add_argument("--certificate", required=True)
    sp.add_argument("--checks", type=int, default=1000)

    sp = common(sub.add_parser("trajectory", help="Thompson nonexpansiveness along orbits"))
    sp.add_argument("--x", default=None, help="interior start point (default all ones)")
    sp.add_argument("--radius", type=float, default=0.1)
    sp.add_argument("--horizon", type=int, default=50)
    sp.add_argument("--trials", type=int, default=20)
    return p


def _power_cfg(a, **kw):
    return PowerConfig(max_iters=a.max_iters, hilbert_tol=a.hilbert_tol,
                       epsilon_perturb=a.epsilon, seed=a.seed, **kw)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        F = cio.load_family(args.family, seed=args.seed)
        digest = cio.file_digest(args.family)
        out = Path(args.output) if args.output else Path(args.family).with_suffix(
            f".{args.command}.json")
        code, outputs = _dispatch(args, F, out)
    except Exception as exc:  # report and map to the error exit code
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    rec = cio.ResultRecord(args.command, digest, outputs,
                           {"seconds": round(time.perf_counter() - t0, 6)})
    rec.dump(out)
    print(json.dumps(cio.encode_value(outputs.get("summary", {}))))
    return code


def _dispatch(a, F, out: Path):
    ctx = ConeContext(F.dim)
    cmd = a.command
    if cmd == "props":
        reps = [check_properties(f, a.samples, a.seed + i, dim=F.dim) for i, f in enumerate(F.maps)]
        per = [{"label": lab, "degree": d, "violations": len(r.violations),
                "kinds": sorted({v["kind"] for v in r.violations})}
               for lab, d, r in zip(F.labels, F.degrees(), reps)]
        return EXIT_OK, {"summary": {"ok": all(r.ok for r in reps)}, "maps": per}
    if cmd == "spectral":
        cfg = _power_cfg(a)
        if a.word:
            w = cio.parse_word(a.word, len(F))
            ep = power_iterate(F.word_map(w), ctx.unit_u, cfg, ctx)
            return EXIT_OK, {"summary": {"word": cio.format_word(w), "value": ep.value},
                             "pairs": [_pair_to_dict(ep)]}
        pairs = []
        for f in F.maps:
            if f.is_homogeneous():
                pairs.append(power_iterate(f, ctx.unit_u, cfg, ctx))
            else:
                pairs.append(slice_spectral_radius(f, cfg.slice_c, cfg, ctx))
        return EXIT_OK, {"summary": {"values": [p.value for p in pairs]},
                         "pairs": [_pair_to_dict(p) for p in pairs]}
    if cmd == "eigencurve":
        f = F.maps[a.map - 1]
        pairs, rep = eigencurve(f, _floats(a.cgrid), _power_cfg(a), ctx)
        csv_path = _side(out, ".csv")
        csv_path.write_text(cio.curve_csv(rep))
        return EXIT_OK, {"summary": {"ok": rep.ok, "csv": str(csv_path)},
                         "rho": rep.rho, "rho_zero_est": rep.rho_zero_est,
                         "rho_inf_est": rep.rho_inf_est, "rho_zero_ref": rep.rho_zero_ref,
                         "rho_inf_ref": rep.rho_inf_ref, "order_ok": rep.order_ok}
    if cmd == "jsr":
        bp = _floats(a.base_point) if a.base_point else None
        b = jsr_bracket(F, a.kmax, ctx, _power_cfg(a), base_point=bp, max_words=a.max_words)
        csv_path = _side(out, ".csv")
        csv_path.write_text(cio.bracket_csv(b))
        summary = _bracket_to_dict(b)
        summary["csv"] = str(csv_path)
        return (EXIT_OK if b.complete else EXIT_BUDGET), {"summary": summary}
    if cmd == "sandwich":
        from .bounds import slice_jsr_lower
        rep = subhomogeneous_sandwich(F, a.kmax, ctx, _power_cfg(a))
        outputs = {"summary": {"lower": rep.lower, "upper": rep.upper},
                   "inf_bracket": _bracket_to_dict(rep.inf_bracket),
                   "zero_bracket": None if rep.zero_bracket is None
                   else _bracket_to_dict(rep.zero_bracket)}
        if a.cgrid:
            outputs["slices"] = {str(c): slice_jsr_lower(F, c, min(a.kmax, 2), _power_cfg(a), ctx)[0]
                                 for c in _floats(a.cgrid)}
        return EXIT_OK, outputs
    if cmd == "polytope":
        cfg = AlgoConfig(dom_tol=a.dom_tol, strict_witness_tol=a.witness_tol,
                         max_vertices=a.max_vertices, max_restarts=a.max_restarts,
                         extended_smp_update=a.extended_smp_update)
        cert = run_polytope(F, cio.parse_word(a.smp, len(F)), ctx, cfg, _power_cfg(a))
        doc = cio.certificate_to_dict(cert)
        cert_path = _side(out, ".certificate.json")
        cert_path.write_text(json.dumps(doc, indent=2) + "\n")
        outputs = {"summary": {"status": cert.status, "alpha": doc["alpha_fixed"],
                               "vertices": len(cert.vertices), "rounds": cert.rounds,
                               "certificate": str(cert_path)},
                   "certificate": doc}
        if F.dim == 2:
            vpath = _side(out, ".vertices.csv")
            vpath.write_text(cio.vertex_rounds_csv(cert))
            outputs["summary"]["vertices_csv"] = str(vpath)
        return (EXIT_OK if cert.certified else EXIT_BUDGET), outputs
    if cmd == "verify":
        cert = cio.certificate_from_dict(json.loads(Path(a.certificate).read_text()))
        if not cert.certified:
            return EXIT_VERIFY_FAILED, {"summary": {"ok": False,
                                                    "failed": f"status is {cert.status}"}}
        ok, rep = verify_certificate(F, cert, a.checks, a.seed)
        return (EXIT_OK if ok else EXIT_VERIFY_FAILED), {
            "summary": {"ok": ok, "failed": rep.failed},
            "condition1_max": rep.condition1_max,
            "condition2_min_residual": rep.condition2_min_residual,
            "sampled_max_ratio": rep.sampled_max_ratio}
    if cmd == "trajectory":
        x = np.array(_floats(a.x)) if a.x else np.ones(F.dim)
        rep = trajectory_divergence_check(F, x, a.radius, a.horizon, a.trials, a.seed)
        return EXIT_OK, {"summary": {"violations": len(rep.violations),
                                     "fitted_C": rep.fitted_C, "rate": rep.rate,
                                     "onset_K0": rep.onset_K0}}
    raise ValueError(f"unknown command {cmd}")  # pragma: no cover


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
