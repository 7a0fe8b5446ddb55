"""Reading scenes and writing reports.

Scenes are validated against ``schemas/scene.schema.json`` first; every
error carries a JSON pointer into the input document.  Output is rendered
deterministically: every rational appears exactly and with a decimal form.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import jsonschema

from .domain import Domain, Point, Subdomain
from .exact import ExactReal, Symbol, SymbolBasis, format_rational, quadratic_symbol
from .iet import Iet, compose, from_permutation, identity, inverse, permute_components, \
    synchronized_rotation

SCHEMA_VERSION = 1


class SceneError(ValueError):
    """Invalid input; ``pointer`` locates the offending value."""

    def __init__(self, pointer, message):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer or "/"
        self.message = message


def _pointer(parts):
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in parts)


@lru_cache(maxsize=None)
def load_schema(name="scene"):
    text = resources.files("ietlab").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(doc, name="scene"):
    validator = jsonschema.Draft202012Validator(load_schema(name))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        best = jsonschema.exceptions.best_match(errors)
        raise SceneError(_pointer(best.absolute_path), best.message)


class Scene:
    """A validated scene: basis, domain, named generators and experiment data."""

    def __init__(self, doc):
        validate(doc)
        self.doc = doc
        self.basis = self._basis(doc.get("basis", {}))
        self.domain = None
        self.generators = {}
        self.subgroup = {}
        if "domain" in doc:
            self.domain = self._domain(doc["domain"])
        for key in ("generators", "subgroup"):
            if key in doc:
                if self.domain is None:
                    raise SceneError(f"/{key}", "a domain is required")
                target = self.generators if key == "generators" else self.subgroup
                for name, spec in doc[key].items():
                    target[name] = self.iet(spec, f"/{key}/{_pointer([name])[1:]}", target)

    # -- pieces ----------------------------------------------------------

    def _basis(self, data):
        syms = []
        for i, s in enumerate(data.get("symbols", [])):
            where = f"/basis/symbols/{i}"
            try:
                if "sqrt" in s:
                    sym = quadratic_symbol(s["name"], s["sqrt"])
                elif "lo" in s and "hi" in s:
                    sym = Symbol.from_json(s)
                else:
                    raise ValueError("a symbol needs either 'sqrt' or both 'lo' and 'hi'")
            except (ValueError, TypeError) as exc:
                raise SceneError(where, str(exc)) from None
            syms.append(sym)
        try:
            return SymbolBasis(syms, data.get("independent", True))
        except ValueError as exc:
            raise SceneError("/basis/symbols", str(exc)) from None

    def real(self, data, where):
        try:
            return self.basis.real_from_json(data)
        except (KeyError, ValueError, ZeroDivisionError) as exc:
            raise SceneError(where, str(exc).strip("'\"")) from None

    def _domain(self, data):
        comps = []
        for i, c in enumerate(data["components"]):
            comps.append((c["label"], c["kind"], self.real(c["length"], f"/domain/components/{i}/length")))
        try:
            return Domain(comps)
        except ValueError as exc:
            raise SceneError("/domain/components", str(exc)) from None

    def point(self, data, where, domain=None):
        dom = domain or self.domain
        p = Point(data["c"], self.real(data["offset"], where + "/offset"))
        try:
            dom.check_point(p)
        except (KeyError, ValueError) as exc:
            raise SceneError(where, str(exc).strip("'\"")) from None
        return p

    def subdomain(self, data, where, domain=None):
        dom = domain or self.domain
        arcs = []
        for i, a in enumerate(data["arcs"]):
            w = f"{where}/arcs/{i}"
            if a["c"] not in dom:
                raise SceneError(w + "/c", f"unknown component {a['c']!r}")
            arcs.append((a["c"], self.real(a["start"], w + "/start"), self.real(a["end"], w + "/end")))
        try:
            return Subdomain.from_arcs(dom, arcs)
        except ValueError as exc:
            raise SceneError(where, str(exc)) from None

    def iet(self, spec, where, known=None):
        known = self.generators if known is None else known
        dom = self.domain
        try:
            if "cells" in spec:
                cells = []
                for i, c in enumerate(spec["cells"]):
                    w = f"{where}/cells/{i}"
                    cells.append((c["src_c"], self.real(c["src_start"], w + "/src_start"),
                                  self.real(c["src_end"], w + "/src_end"), c["dst_c"],
                                  self.real(c["dst_start"], w + "/dst_start")))
                return Iet(dom, cells)
            b = spec["builder"]
            where = where + "/builder"
            kind = b["kind"]
            if kind == "identity":
                return identity(dom)
            if kind == "rotation":
                if "angle" not in b:
                    raise SceneError(where, "'angle' is required")
                return synchronized_rotation(dom, self.real(b["angle"], where + "/angle"),
                                             b.get("components"))
            if kind == "permute":
                return permute_components(dom, b.get("perm", {}))
            if kind == "exchange":
                comp = b.get("component")
                if comp not in dom:
                    raise SceneError(where + "/component", f"unknown component {comp!r}")
                lengths = [self.real(x, f"{where}/lengths/{i}") for i, x in enumerate(b.get("lengths", []))]
                base = from_permutation(lengths, b.get("order", []), comp, dom.component(comp).kind)
                cells = [c for c in identity(dom).cells if c[0] != comp] + list(base.cells)
                return Iet(dom, cells)
            if kind == "word":
                out = identity(dom)
                for i, name in enumerate(b.get("word", [])):
                    inv = name.endswith("^-1")
                    key = name[:-3] if inv else name
                    g = known.get(key) or self.generators.get(key)
                    if g is None:
                        raise SceneError(f"{where}/word/{i}", f"unknown generator {name!r}")
                    out = compose(out, inverse(g) if inv else g)
                return out
        except SceneError:
            raise
        except (ValueError, KeyError) as exc:
            raise SceneError(where, str(exc).strip("'\"")) from None
        raise SceneError(where, f"unsupported builder {spec!r}")


def load_scene(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SceneError("/", f"invalid JSON: {exc}") from None
    except OSError as exc:
        raise SceneError("/", f"cannot read input: {exc.strerror}") from None
    return Scene(doc)


# --- output -----------------------------------------------------------------


def rational_json(q):
    q = Fraction(q)
    return {"exact": format_rational(q), "decimal": f"{float(q):.12g}"}


def to_jsonable(obj):
    """Recursively convert results into plain JSON with exact + decimal numerics."""
    if isinstance(obj, ExactReal):
        return obj.to_json(decimal=True)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return rational_json(obj)
    if isinstance(obj, float):
        return {"decimal": f"{obj:.12g}"}
    if isinstance(obj, (Subdomain, Point)):
        return obj.to_json(decimal=True)
    if isinstance(obj, Iet):
        return obj.to_json(decimal=True)
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [to_jsonable(v) for v in obj]
        if isinstance(obj, (set, frozenset)):
            items.sort(key=lambda v: json.dumps(v, sort_keys=True))
        return items
    if type(obj).__name__ == "mpq":
        return rational_json(Fraction(obj))
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj):
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=True) + "\n"
