"""JSON and text serialization.  Rationals are always "num/den" strings."""

from __future__ import annotations

import json
from fractions import Fraction

from .algebra import StratAlg, catalog
from .exact import MPoly, rat, rat_str
from .hd import HDElem, parse_word, word_label
from .pbw import index_sort_key


class FormatError(ValueError):
    pass


def parse_rat_list(text):
    try:
        return [rat(t) for t in text.split(",")] if text.strip() else []
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational list {text!r}: {exc}") from None


# -- polynomials -------------------------------------------------------------


def poly_to_json(p: MPoly):
    return {",".join(str(k) for k in e): rat_str(c) for e, c in sorted(p.terms.items())}


def poly_from_json(data, vars):
    n = len(vars)
    terms = {}
    try:
        for key, c in data.items():
            e = tuple(int(t) for t in key.split(",")) if key else ()
            if len(e) != n:
                raise FormatError(f"exponent {key!r} needs {n} entries")
            terms[e] = terms.get(e, 0) + rat(c)
    except (AttributeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"bad polynomial: {exc}") from None
    return MPoly(vars, terms)


def wpoly_to_json(ps):
    """W-valued polynomial: exponent key -> list of W coefficients."""
    keys = sorted({e for p in ps for e in p.terms})
    return {",".join(str(k) for k in e): [rat_str(p.terms.get(e, 0)) for p in ps] for e in keys}


def wpoly_from_json(data, vars, wdim=None):
    n = len(vars)
    comps = None
    try:
        for key, vals in data.items():
            if not isinstance(vals, list):
                vals = [vals]
            if comps is None:
                comps = [dict() for _ in vals]
            if len(vals) != len(comps):
                raise FormatError("inconsistent W dimension in polynomial")
            e = tuple(int(t) for t in key.split(",")) if key else ()
            if len(e) != n:
                raise FormatError(f"exponent {key!r} needs {n} entries")
            for c, v in zip(comps, vals):
                c[e] = c.get(e, 0) + rat(v)
    except (AttributeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"bad polynomial: {exc}") from None
    if comps is None:
        comps = [dict() for _ in range(wdim or 1)]
    if wdim is not None and len(comps) != wdim:
        raise FormatError(f"polynomial has {len(comps)} W components, expected {wdim}")
    return [MPoly(vars, c) for c in comps]


def _frac_text(c: Fraction, mono: str):
    num, den = abs(c.numerator), c.denominator
    body = mono if num == 1 and mono else f"{num}{mono}"
    return body if den == 1 else f"{body}/{den}"


def poly_text(alg, p: MPoly):
    """Compact text like ``z - xy/2`` (monomials ordered by layer, then V1)."""
    if not p.terms:
        return "0"
    parts = []
    keys = sorted(p.terms, key=lambda e: index_sort_key(alg, e), reverse=True) if len(p.vars) == alg.n else sorted(p.terms, reverse=True)
    for e in keys:
        c = p.terms[e]
        mono = "".join(v + (f"^{k}" if k > 1 else "") for v, k in zip(p.vars, e) if k)
        if any(len(v) > 1 for v in p.vars):
            mono = "*".join(v + (f"^{k}" if k > 1 else "") for v, k in zip(p.vars, e) if k)
        s = _frac_text(c, mono)
        parts.append(("-" if c < 0 else "+", s))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, s in parts[1:]:
        out += f" {sign} {s}"
    return out


# -- tensors / stacks --------------------------------------------------------


def tensor_to_json(alg, A: HDElem):
    return {word_label(alg, w): [rat_str(c) for c in v] for w, v in sorted(A.tensor.items())}


def tensor_from_json(alg, wdim, k, data):
    t = {}
    for key, vals in data.items():
        w = parse_word(alg, key)
        if not isinstance(vals, list):
            vals = [vals]
        t[w] = [rat(v) for v in vals]
    try:
        return HDElem(alg, wdim, k, t)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def point_to_json(p):
    js = p.space
    return {"base": [rat_str(c) for c in p.base],
            "stack": {str(k): tensor_to_json(js.alg, A) for k, A in sorted(p.tensors().items())}}


def point_from_json(js, data):
    from .jets import JetPoint
    try:
        base = [rat(c) for c in data["base"]]
        stack = {}
        for k, tens in data.get("stack", {}).items():
            k = int(k)
            if not 0 <= k <= js.m:
                raise FormatError(f"stack degree {k} outside 0..{js.m}")
            stack[k] = tensor_from_json(js.alg, js.wdim, k, tens)
        return JetPoint(js, base, stack)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"bad jet point: {exc}") from None


# -- maps --------------------------------------------------------------------


def map_to_json(F):
    js = F.src
    out = {"alg": js.alg.name if _is_catalog(js.alg) else js.alg.to_json(), "W": js.wdim, "m": js.m,
           "vars": list(js.vars), "F_G": [poly_to_json(p) for p in F.F_G]}
    for k in range(F.tgt.m + 1):
        out[f"F^{k}"] = [poly_to_json(p) for p in F.stack_comps(k)]
    return out


def _is_catalog(alg):
    try:
        return catalog(alg.name).to_json() == alg.to_json()
    except Exception:
        return False


def map_from_json(data, js=None):
    from .contact import PolyMap
    from .jets import jet_space
    try:
        if js is None:
            a = data["alg"]
            alg = catalog(a) if isinstance(a, str) else StratAlg.from_json(a)
            js = jet_space(alg, int(data["W"]), int(data["m"]))
        vars = tuple(data.get("vars", js.vars))
        if vars != js.vars:
            raise FormatError(f"map variables {vars} do not match the jet space {js.vars}")
        comps = [poly_from_json(p, vars) for p in data["F_G"]]
        for k in range(js.m + 1):
            comps.extend(poly_from_json(p, vars) for p in data[f"F^{k}"])
        return PolyMap(js, comps)
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad map JSON: missing or malformed {exc}") from None


def dumps(obj):
    return json.dumps(obj, indent=2, ensure_ascii=False, sort_keys=False)
