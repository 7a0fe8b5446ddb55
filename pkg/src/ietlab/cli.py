"""Command-line front end: ``ietlab <command> --input scene.json``.

Exit codes: 0 success, 1 invalid input, 2 undecided or capped results and
failed verifications (the partial report is still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import random
import sys
from fractions import Fraction

from .constructions import (BASE, HALF, HjGroup, LampSpec, commutation_set, difference_set_measure,
                            distinguish_invariant, verify_wreath_embedding,
                            wreath_obstruction_witness)
from .domain import Point, Subdomain
from .exact import UndecidedComparison, refinement_budget
from .finite import FiniteGroup
from .groups import (FinGenGroup, ball, birkhoff_frequency, imanishi_decompose, orbit,
                     relative_stability)
from .iet import IetError, apply, compose, d, inverse
from .serialize import SCHEMA_VERSION, SceneError, dumps, load_scene

COMMANDS = ("decompose", "growth", "birkhoff", "lamplighter", "hj", "distinguish",
            "obstruction", "verify")

EXIT_OK, EXIT_INPUT, EXIT_PARTIAL = 0, 1, 2


class _Partial(Exception):
    def __init__(self, status, result):
        super().__init__(status)
        self.status = status
        self.result = result


def build_parser():
    p = argparse.ArgumentParser(prog="ietlab", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", "-i", required=True, help="scene file (JSON)")
    p.add_argument("--output", "-o", help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--cap", type=int, default=10_000, help="regular-orbit / enumeration cap")
    p.add_argument("--depth", type=int, help="ball radius or search depth")
    p.add_argument("--n", type=int, help="iteration count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget-refine", type=int, default=64, dest="budget",
                   help="maximal enclosure refinements per comparison")
    return p


def _need(scene, key):
    if key not in scene.doc:
        raise SceneError("/", f"the scene needs a {key!r} entry")
    return scene.doc[key]


def _group(scene):
    if not scene.generators:
        raise SceneError("/", "the scene needs 'domain' and 'generators'")
    try:
        return FinGenGroup(scene.generators)
    except (ValueError, IetError) as exc:
        raise SceneError("/generators", str(exc)) from None


def _sample_points(domain, rng, k):
    out = []
    for _ in range(k):
        comp = domain.components[rng.randrange(len(domain))]
        out.append(Point(comp.label, comp.length * Fraction(rng.randrange(997), 997)))
    return out


def _points(scene, rng, k=1):
    if "points" in scene.doc:
        return [scene.point(p, f"/points/{i}") for i, p in enumerate(scene.doc["points"])]
    if "point" in scene.doc:
        return [scene.point(scene.doc["point"], "/point")]
    return _sample_points(scene.domain, rng, k)


def _base_subdomain(scene, data, where):
    return scene.subdomain(data, where, BASE)


# --- commands ---------------------------------------------------------------


def cmd_decompose(scene, args):
    G = _group(scene)
    dec = imanishi_decompose(G, cap=args.cap)
    result = {"irreducible_count": len(dec.irreducible),
              "finite_count": len(dec.finite_part),
              "decomposition": dec.to_json()}
    if scene.subgroup:
        rep = relative_stability(G, list(scene.subgroup.values()), cap=args.cap)
        result["stability"] = {
            "verdict": rep["verdict"],
            "finite_orbits_trivial": rep["finite_orbits_trivial"],
            "components": [{"component": c["component"], "verdict": c["verdict"],
                            "pieces": c["pieces"]} for c in rep["components"]]}
    if dec.residual_undecided:
        raise _Partial("UNDECIDED", result)
    return result, None


def cmd_growth(scene, args, rng):
    G = _group(scene)
    R = 6 if args.depth is None else args.depth
    if R < 0:
        raise SceneError("/", "--depth must be non-negative")
    b = ball(G, R, max_elements=args.cap)
    pts = _points(scene, rng)
    series = []
    for x in pts:
        orb = orbit(G, x, R)
        series.append({"point": x, "orbit_sizes": [n for _, n in orb.growth]})
    rows = [(r, b.sizes[r] if r < len(b.sizes) else None, series[0]["orbit_sizes"][r])
            for r in range(R + 1)]
    result = {"radius": R, "ball_sizes": b.sizes, "ball_complete": b.complete, "orbits": series}
    table = (["r", "ball_size", "orbit_size"], rows)
    if not b.complete:
        raise _Partial("CAPPED", result)
    return result, table


def cmd_birkhoff(scene, args, rng):
    if args.n is None or args.n < 1:
        raise SceneError("/", "--n must be a positive integer")
    if "map" in scene.doc:
        T = scene.iet(scene.doc["map"], "/map")
    else:
        G = _group(scene)
        T = next(iter(G.named.values()))
    x = _points(scene, rng)[0]
    E = scene.subdomain(_need(scene, "E"), "/E")
    freq = birkhoff_frequency(T, x, E, args.n)
    return {"n": args.n, "point": x, "E": E, "measure_E": E.measure(), "frequency": freq}, None


def _lamp_spec(scene):
    data = _need(scene, "lamplighter")
    angles = [scene.real(a, f"/lamplighter/angles/{i}") for i, a in enumerate(data["angles"])]
    J = _base_subdomain(scene, data["J"], "/lamplighter/J") if "J" in data else None
    try:
        return LampSpec(tuple(data.get("orders", [3])), tuple(angles), J,
                        data.get("allow_dependent", False))
    except ValueError as exc:
        raise SceneError("/lamplighter", str(exc)) from None


def cmd_lamplighter(scene, args):
    spec = _lamp_spec(scene)
    depth = 6 if args.depth is None else args.depth
    try:
        rep = verify_wreath_embedding(spec, depth, max_elements=args.cap)
    except ValueError as exc:
        raise SceneError("/lamplighter", str(exc)) from None
    result = rep.to_json()
    if not rep.complete:
        raise _Partial("CAPPED", result)
    return result, None


def _hj(scene):
    data = _need(scene, "hj")
    alpha = scene.real(data["alpha"], "/hj/alpha")
    J = _base_subdomain(scene, data["J"], "/hj/J")
    return HjGroup(J, alpha), J


def cmd_hj(scene, args):
    hj, J = _hj(scene)
    N = 1000 if args.n is None else args.n
    if N < 1:
        raise SceneError("/", "--n must be a positive integer")
    res = commutation_set(hj, N)
    I = Subdomain.from_arcs(BASE, [("C", 0, HALF)])
    result = {"N": N, "J": J, "frequency": res.frequency, "agree": res.agree,
              "mismatches": res.mismatches, "difference_measure": difference_set_measure(J, I),
              "nontrivial": res.iet}
    table = (["n", "nontrivial", "predicate"], res.rows())
    if not res.agree:
        raise _Partial("FAILED", result)
    return result, table


def cmd_distinguish(scene, args):
    data = _need(scene, "distinguish")
    alpha = scene.real(data["alpha"], "/distinguish/alpha")
    J1 = _base_subdomain(scene, data["J1"], "/distinguish/J1")
    J2 = _base_subdomain(scene, data["J2"], "/distinguish/J2")
    try:
        rep = distinguish_invariant(J1, J2, alpha, N=args.n or 0)
    except ValueError as exc:
        raise SceneError("/distinguish", str(exc)) from None
    rep["span_coefficients"] = list(rep["span_coefficients"]) if rep["span_coefficients"] else None
    return rep, None


def cmd_obstruction(scene, args):
    data = _need(scene, "obstruction")
    F = data["F"]
    try:
        if "table" in F:
            group = FiniteGroup(F["table"], F.get("action"))
        elif "permutations" in F:
            group = FiniteGroup.from_permutations(F["permutations"])
        else:
            raise ValueError("F needs 'permutations' or 'table'")
    except (ValueError, IndexError) as exc:
        raise SceneError("/obstruction/F", str(exc)) from None
    angle = scene.real(data["angle"], "/obstruction/angle")
    I = _base_subdomain(scene, data["I"], "/obstruction/I")
    depth = 3 if args.depth is None else args.depth
    try:
        rep = wreath_obstruction_witness(group, angle, I, depth)
    except ValueError as exc:
        raise SceneError("/obstruction", str(exc)) from None
    rep["F_order"] = group.order
    rep["F_abelian"] = group.is_abelian
    return rep, None


def cmd_verify(scene, args, rng):
    """Random group-law and partition checks on words in the scene's generators."""
    G = _group(scene)
    n = 1000 if args.n is None else args.n
    depth = 4 if args.depth is None else args.depth
    names = sorted(G.generators)
    violations = {"partition": 0, "associativity": 0, "inverse": 0, "apply": 0, "subadditivity": 0}

    def word():
        return G.evaluate([names[rng.randrange(len(names))] for _ in range(rng.randint(0, depth))])

    for _ in range(n):
        g, h, k = word(), word(), word()
        gh = compose(g, h)
        try:
            gh.check()
        except IetError:
            violations["partition"] += 1
        if compose(gh, k) != compose(g, compose(h, k)):
            violations["associativity"] += 1
        if not compose(g, inverse(g)).is_identity or not compose(inverse(g), g).is_identity:
            violations["inverse"] += 1
        x = _sample_points(G.domain, rng, 1)[0]
        if apply(gh, x) != apply(g, apply(h, x)):
            violations["apply"] += 1
        if d(gh) > d(g) + d(h):
            violations["subadditivity"] += 1
    result = {"checks": n, "word_length": depth, "violations": violations}
    if any(violations.values()):
        raise _Partial("FAILED", result)
    return result, None


def _render(args, envelope, table):
    if args.format == "csv":
        if table is None:
            raise SceneError("/", f"--format csv is not available for {args.command}")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table[0])
        w.writerows(table[1])
        return buf.getvalue()
    return dumps(envelope)


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    rng = random.Random(args.seed)
    config = {"command": args.command, "cap": args.cap, "depth": args.depth, "n": args.n,
              "seed": args.seed, "budget_refine": args.budget, "format": args.format}
    status, code, table = "OK", EXIT_OK, None
    try:
        if args.budget < 0 or args.cap < 1:
            raise SceneError("/", "--cap must be positive and --budget-refine non-negative")
        scene = load_scene(args.input)
        with refinement_budget(args.budget):
            handler = globals()["cmd_" + args.command]
            try:
                if args.command in ("growth", "birkhoff", "verify"):
                    result, table = handler(scene, args, rng)
                else:
                    result, table = handler(scene, args)
            except _Partial as part:
                status, code, result = part.status, EXIT_PARTIAL, part.result
            except UndecidedComparison as exc:
                status, code, result = "UNDECIDED", EXIT_PARTIAL, {"error": str(exc)}
    except SceneError as exc:
        print(f"ietlab: input error at {exc.pointer}: {exc.message}", file=sys.stderr)
        return EXIT_INPUT
    envelope = {"version": SCHEMA_VERSION, "command": args.command, "status": status,
                "config": config, "result": result}
    try:
        text = _render(args, envelope, table)
    except SceneError as exc:
        print(f"ietlab: input error at {exc.pointer}: {exc.message}", file=sys.stderr)
        return EXIT_INPUT
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
