"""End-to-end runs: the analysis pipeline and the randomized property harness.

Both return a plain-dict report plus an exit code:
0 pass, 2 bad input or uncertified map, 3 degenerate orbit polygon,
4 a guaranteed property failed.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .arrangement import Arrangement, build_arrangement, build_gamma, face_windings
from .dynmap import apply_map, check_segment_no_fixed_point, check_segment_angle, lip_bound, validate_orbit
from .errors import (CertificateError, ConsistencyError, DegeneracyError, LinkfixError,
                     TheoremViolation)
from .fixpoint import locate_fixed_point
from .index import FaceIndex, change_vertices, face_indices, positive_index_face
from .linking import arc_independence_check, linking_number, random_arc, straight_arc
from .problem import Problem

__all__ = ["EXIT_OK", "EXIT_INPUT", "EXIT_DEGENERATE", "EXIT_FALSIFIED",
           "Analysis", "run_pipeline", "analyze", "verify", "verify_corpus", "format_report",
           "format_corpus_report", "change_vertex_ids"]

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_FALSIFIED = 4


@dataclass
class Analysis:
    """Intermediate objects of one pipeline run, kept for rendering and tests."""

    problem: Problem
    certificate: object
    arrangement: Optional[Arrangement] = None
    indices: Optional[list] = None
    chosen_face: Optional[int] = None
    fixed_point: object = None
    linking: object = None
    linking_straight: object = None


def run_pipeline(problem: Problem, tol: Optional[float] = None, enforce: bool = True) -> Analysis:
    """Orbit polygon, faces, windings, indices, fixed point and linking number.

    Raises on the first failure; with ``enforce`` theorem assertions raise
    :class:`TheoremViolation`.
    """
    tol = problem.options.get("tol", 1e-8) if tol is None else tol
    m, orbit = problem.map, problem.orbit
    cert = lip_bound(m)
    if enforce and not cert.certified:
        raise CertificateError(f"Lipschitz bound k = {cert.k:.6g} exceeds 1", cert)
    out = Analysis(problem, cert)
    arr = build_arrangement(build_gamma(orbit))
    arr = face_windings(arr)
    out.arrangement = arr
    out.indices = face_indices(m, arr, cert, enforce=enforce)
    out.chosen_face = positive_index_face(arr, out.indices, enforce=enforce)
    fp = locate_fixed_point(m, arr.faces[out.chosen_face], arr, tol, cert, enforce=enforce)
    out.fixed_point = fp
    bound = 2.0 * (1.0 + cert.k) * tol
    eps_clear = problem.options.get("eps_clear")
    out.linking = linking_number(fp.location, orbit, m, "gamma", cert, fixed_tol=bound, eps_clear=eps_clear)
    out.linking_straight = linking_number(fp.location, orbit, m, "straight-arc", cert, fixed_tol=bound,
                                          eps_clear=eps_clear)
    if enforce:
        if out.linking.omega != out.linking_straight.omega:
            raise TheoremViolation("winding via the orbit polygon and via the straight arc differ",
                                   {"gamma": out.linking.omega, "straight": out.linking_straight.omega})
        if out.linking.lk == 0:
            raise TheoremViolation("fixed point found with linking number 0",
                                   {"fixed_point": list(fp.location)})
    return out


def _assertion(name, passed, detail=None):
    row = {"name": name, "passed": bool(passed)}
    if detail is not None:
        row["detail"] = detail
    return row


def _run_segment_checks(m, cert, points, samples, enforce):
    rows2, rows4 = [], []
    for x in points:
        r2 = check_segment_no_fixed_point(m, x, samples, cert, enforce=enforce)
        r4 = check_segment_angle(m, x, samples, cert, enforce=enforce)
        rows2.append(r2)
        rows4.append(r4)
    return rows2, rows4


def _face_rows(arr: Arrangement, indices: Optional[list]) -> list[dict]:
    by_id = {r.face: r for r in indices or []}
    rows = []
    for f in arr.faces:
        row = {"id": f.id, "bounded": f.bounded, "omega": f.omega, "area": f.area,
               "sample_point": list(f.sample_point) if f.sample_point else None}
        r: Optional[FaceIndex] = by_id.get(f.id)
        if r is not None:
            row.update(orientation_changes=r.orientation_changes, comb_index=r.comb_index,
                       num_index=r.num_index)
        else:
            row.update(orientation_changes=None, comb_index=None, num_index=None)
        rows.append(row)
    return rows


def analyze(problem: Problem, tol: Optional[float] = None, allow_uncertified: bool = False):
    """Run the full pipeline and assemble a report.  Returns ``(report, exit_code)``."""
    start = time.perf_counter()
    tol = problem.options.get("tol", 1e-8) if tol is None else tol
    m, orbit = problem.map, problem.orbit
    cert = lip_bound(m)
    enforce = not allow_uncertified
    report = {
        "name": problem.name,
        "map": {"summary": m.summary(), "certificate": cert.as_dict()},
        "orbit": {"n": orbit.n, "residual": orbit.residual, "points": [list(p) for p in orbit.points]},
        "informational": not enforce,
        "tol": tol,
        "faces": [],
        "chosen_face": None,
        "fixed_point": None,
        "linking": None,
        "segment_checks": {},
        "assertions": [],
        "error": None,
    }
    asserts = report["assertions"]

    def finish(code):
        report["exit_code"] = code
        report["status"] = "pass" if code == EXIT_OK else "fail"
        report["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
        return report, code

    asserts.append(_assertion("certificate k <= 1", cert.certified, {"k": cert.k}))
    if enforce and not cert.certified:
        report["error"] = {"kind": "certificate", "message": f"k = {cert.k:.6g} > 1",
                           "breakdown": cert.as_dict()["breakdown"]}
        return finish(EXIT_INPUT)

    samples = int(problem.options.get("segment_samples", 100))
    if math.isfinite(cert.k):
        r2, r4 = _run_segment_checks(m, cert, orbit.points, samples, enforce=False)
        report["segment_checks"] = {
            "no_fixed_point": {"passed": all(r.ok for r in r2), "min_norm": min(r.min_norm for r in r2),
                                "counterexamples": [r.counterexample for r in r2 if not r.ok]},
            "angle_bound": {"passed": all(r.ok for r in r4), "max_angle": max(r.max_angle for r in r4),
                                "counterexamples": [r.counterexample for r in r4 if not r.ok]},
        }
        asserts.append(_assertion("no fixed point on orbit segments", report["segment_checks"]["no_fixed_point"]["passed"]))
        asserts.append(_assertion("displacement angle < pi/2 along orbit segments",
                                  report["segment_checks"]["angle_bound"]["passed"]))

    out = Analysis(problem, cert)
    try:
        out = run_pipeline(problem, tol, enforce=enforce)
    except DegeneracyError as exc:
        report["error"] = {"kind": "degeneracy", "message": str(exc)}
        return finish(EXIT_DEGENERATE)
    except TheoremViolation as exc:
        report["error"] = {"kind": "theorem", "message": str(exc), "diagnostics": exc.diagnostics}
        return finish(EXIT_FALSIFIED)
    except LinkfixError as exc:
        report["error"] = {"kind": type(exc).__name__, "message": str(exc)}
        return finish(EXIT_FALSIFIED)

    arr = out.arrangement
    report["faces"] = _face_rows(arr, out.indices)
    report["chosen_face"] = out.chosen_face
    fp = out.fixed_point
    report["fixed_point"] = {"location": list(fp.location), "residual": fp.residual,
                             "box_radius": fp.box_radius, "degree": fp.degree,
                             "multiple_fixed_points": fp.multiple, "subdivisions": len(fp.steps)}
    report["linking"] = {"omega": out.linking.omega, "omega_straight_arc": out.linking_straight.omega,
                         "n": out.linking.n, "lk": out.linking.lk}
    bounded = arr.bounded_faces
    n = orbit.n
    chosen = next(r for r in out.indices if r.face == out.chosen_face)
    asserts += [
        _assertion("Euler characteristic V - E + F = 2", arr.euler_characteristic() == 2),
        _assertion("|omega| <= n - 1 on every face", all(abs(f.omega) <= n - 1 for f in arr.faces)),
        _assertion("combinatorial index = numerical index", all(r.agreement for r in out.indices)),
        _assertion("max-|omega| face has positive index", chosen.comb_index > 0,
                   {"face": out.chosen_face, "index": chosen.comb_index}),
        _assertion("degree additive at every subdivision", fp.degree_additive()),
        _assertion("fixed-point residual <= 2 (1 + k) tol", fp.residual <= 2.0 * (1.0 + cert.k) * tol,
                   {"residual": fp.residual}),
        _assertion("winding via orbit polygon = via straight arc",
                   out.linking.omega == out.linking_straight.omega),
        _assertion("linking number nonzero", out.linking.lk != 0, {"lk": out.linking.lk}),
    ]
    if not bounded:
        asserts.append(_assertion("at least one bounded face", False))
    if enforce and not all(a["passed"] for a in asserts):
        return finish(EXIT_FALSIFIED)
    return finish(EXIT_OK)


def _suite(name, checked, failures, counterexample=None, skipped=None):
    row = {"name": name, "checked": checked, "failures": failures,
           "passed": failures == 0 and skipped is None}
    if counterexample is not None:
        row["counterexample"] = counterexample
    if skipped is not None:
        row["skipped"] = skipped
    return row


def _verify_segments(problem, cert, rng, trials, samples, enforce):
    m, orbit = problem.map, problem.orbit
    pts = orbit.array()
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    pad = 0.5 * (hi - lo) + 1e-9
    xs = [tuple(p) for p in pts]
    cand = rng.uniform(lo - pad, hi + pad, size=(trials, 2))
    disp = apply_map(m, cand) - cand
    xs += [tuple(p) for p, d in zip(cand.tolist(), disp) if np.hypot(*d) > 1e-12]
    r2, r4 = _run_segment_checks(m, cert, xs, samples, enforce)
    bad2 = [r for r in r2 if not r.ok]
    bad4 = [r for r in r4 if not r.ok]
    return [
        _suite("segment: no fixed point on [x, f(x)]", len(r2), len(bad2),
               bad2[0].counterexample if bad2 else None),
        _suite("segment: displacement turns < pi/2 on [x, f(x)]", len(r4), len(bad4),
               bad4[0].counterexample if bad4 else None),
    ]


def verify(problem: Problem, seed: int = 0, trials: int = 100, allow_uncertified: bool = False):
    """Randomized property suites for one problem.  Returns ``(report, exit_code)``.

    Deterministic for a given ``(problem, seed, trials)``.
    """
    m, orbit = problem.map, problem.orbit
    cert = lip_bound(m)
    enforce = not allow_uncertified
    rng = np.random.default_rng(seed)
    samples = int(problem.options.get("segment_samples", 100))
    report = {"name": problem.name, "seed": seed, "trials": trials,
              "certificate": cert.as_dict(), "informational": not enforce, "suites": []}
    suites = report["suites"]
    if enforce and not cert.certified:
        report["error"] = {"kind": "certificate", "message": f"k = {cert.k:.6g} > 1"}
        report["exit_code"] = EXIT_INPUT
        return report, EXIT_INPUT

    suites += _verify_segments(problem, cert, rng, trials, samples, enforce)

    analysis = None
    skipped = None
    try:
        analysis = run_pipeline(problem, enforce=False)
    except DegeneracyError as exc:
        skipped = f"no arrangement: {exc}"
    except LinkfixError as exc:
        skipped = f"pipeline failed: {type(exc).__name__}: {exc}"
        if enforce:
            suites.append(_suite("pipeline", 1, 1, {"error": str(exc)}))

    if analysis is None:
        for name in ("index: combinatorial = numerical", "winding: polygon = straight-arc loop, every base point",
                     "arcs: loop windings differ by n * winding of c^-1 c2"):
            suites.append(_suite(name, 0, 0, skipped=skipped))
    else:
        rows = analysis.indices
        bad = [r for r in rows if not r.agreement]
        suites.append(_suite("index: combinatorial = numerical", len(rows), len(bad),
                             {"face": bad[0].face, "comb": bad[0].comb_index, "num": bad[0].num_index}
                             if bad else None))

        x0 = analysis.fixed_point.location
        tol = problem.options.get("tol", 1e-8)
        bound = 2.0 * (1.0 + cert.k) * tol
        n = orbit.n
        checked, failures, example = 0, 0, None
        lks = set()
        for start in range(n):
            shifted = validate_orbit(m, orbit.points[start:] + orbit.points[:start], orbit.eps)
            try:
                g = linking_number(x0, shifted, m, "gamma", cert, fixed_tol=bound)
                s = linking_number(x0, shifted, m, "straight-arc", cert, fixed_tol=bound)
                ok = g.omega == s.omega and abs(g.omega) <= n - 1
                lks.add(g.lk)
            except LinkfixError as exc:
                ok, g, s = False, None, None
                example = example or {"start": start, "error": str(exc)}
            checked += 1
            if not ok:
                failures += 1
                example = example or {"start": start, "omega_gamma": g.omega, "omega_arc": s.omega}
        if len(lks) > 1:
            failures += 1
            example = example or {"linking_numbers": sorted(lks)}
        suites.append(_suite("winding: polygon = straight-arc loop, every base point", checked, failures, example))

        checked, failures, example = 0, 0, None
        x, fx = orbit.points[0], orbit.points[1]
        for _ in range(trials):
            c, _t1 = random_arc(rng, x, fx, x0)
            c2, _t2 = random_arc(rng, x, fx, x0)
            if rng.random() < 0.2:
                c = straight_arc(x, fx)
            try:
                rep = arc_independence_check(m, orbit, c, c2, x0, cert)
                ok = rep.ok
                detail = rep.as_dict()
            except LinkfixError as exc:
                ok, detail = False, {"error": str(exc)}
            checked += 1
            if not ok:
                failures += 1
                example = example or detail
        suites.append(_suite("arcs: loop windings differ by n * winding of c^-1 c2", checked, failures, example))

    report["passed"] = all(s["passed"] or "skipped" in s for s in suites)
    code = EXIT_OK if (report["passed"] or not enforce) else EXIT_FALSIFIED
    report["exit_code"] = code
    return report, code


def format_report(report: dict) -> str:
    """Human-readable rendering of an analyze or verify report."""
    lines = []
    name = report.get("name") or "<unnamed>"
    if "suites" in report:
        lines.append(f"verify {name}  seed={report['seed']} trials={report['trials']}  "
                     f"k={report['certificate']['k']:.6g}")
        for s in report["suites"]:
            status = "skip" if "skipped" in s else ("PASS" if s["passed"] else "FAIL")
            lines.append(f"  [{status}] {s['name']}: {s['checked'] - s['failures']}/{s['checked']}")
            if "skipped" in s:
                lines.append(f"         {s['skipped']}")
            elif s.get("counterexample"):
                lines.append(f"         counterexample: {s['counterexample']}")
        if report.get("informational"):
            lines.append("  (informational mode: map is not certified, failures do not change the exit code)")
        lines.append(f"exit code {report['exit_code']}")
        return "\n".join(lines)

    cert = report["map"]["certificate"]
    lines.append(f"analyze {name}")
    lines.append(f"  map {report['map']['summary']['type']}  k = {cert['k']:.6g}")
    lines.append(f"  orbit n = {report['orbit']['n']}  residual = {report['orbit']['residual']:.3g}")
    if report["faces"]:
        lines.append("  face  bounded  omega  2p  comb  num")
        for f in report["faces"]:
            def show(v):
                return "-" if v is None else str(v)
            lines.append(f"  {f['id']:>4}  {str(f['bounded']):>7}  {f['omega']:>5}  "
                         f"{show(f['orientation_changes']):>2}  {show(f['comb_index']):>4}  "
                         f"{show(f['num_index']):>3}")
    if report["fixed_point"]:
        fp = report["fixed_point"]
        lines.append(f"  chosen face {report['chosen_face']}; fixed point ({fp['location'][0]:.12g}, "
                     f"{fp['location'][1]:.12g}) residual {fp['residual']:.3g} degree {fp['degree']}")
    if report["linking"]:
        lk = report["linking"]
        lines.append(f"  winding omega = {lk['omega']}  Lk = {lk['lk']} (mod {lk['n']})")
    for a in report["assertions"]:
        lines.append(f"  [{'PASS' if a['passed'] else 'FAIL'}] {a['name']}")
    if report.get("error"):
        lines.append(f"  error ({report['error']['kind']}): {report['error']['message']}")
    lines.append(f"exit code {report['exit_code']}")
    return "\n".join(lines)


def change_vertex_ids(arr: Arrangement) -> set[int]:
    out: set[int] = set()
    for f in arr.bounded_faces:
        out.update(change_vertices(f, arr))
    return out


def verify_corpus(seed: int = 0, trials: int = 100, documents=None):
    """Run :func:`verify` over the built-in corpus (or given documents).

    Each problem gets its own generator seeded from ``(seed, position)`` so
    reports do not depend on the order suites consume random numbers.
    """
    from .corpus import corpus_documents
    from .problem import load_problem

    docs = corpus_documents() if documents is None else documents
    reports = []
    code = EXIT_OK
    for i, doc in enumerate(docs):
        sub_seed = int(np.random.SeedSequence([seed, i]).generate_state(1)[0])
        rep, c = verify(load_problem(doc), sub_seed, trials)
        reports.append(rep)
        code = max(code, c)
    out = {"name": "corpus", "seed": seed, "trials": trials, "cases": len(reports),
           "passed": all(r["passed"] for r in reports), "reports": reports, "exit_code": code}
    return out, code


def format_corpus_report(report: dict) -> str:
    lines = [f"verify corpus  seed={report['seed']} trials={report['trials']} cases={report['cases']}"]
    for rep in report["reports"]:
        bad = [s["name"] for s in rep["suites"] if not s["passed"] and "skipped" not in s]
        lines.append(f"  [{'PASS' if not bad else 'FAIL'}] {rep['name']}" + (f": {', '.join(bad)}" if bad else ""))
    lines.append(f"exit code {report['exit_code']}")
    return "\n".join(lines)
