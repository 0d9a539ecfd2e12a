#!/usr/bin/env python3
"""Solve an LP-format model with scipy's MILP interface (HiGHS).

Usage: milp_adapter.py MODEL.lp OUT.sol [--time-limit S] [--gap G]

Reads the LP subset written by the scheduling engine (explicit coefficients,
named rows, Bounds and Binaries sections) and writes a plain text solution:

    status optimal
    objective 1234.5
    var_name 1.0
    ...

Exit code 0 whenever a well-defined status was written, 1 on any failure.
"""

import argparse
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

SECTIONS = {"Maximize", "Minimize", "Subject To", "Bounds", "Binaries", "End"}


def fail(msg):
    print("milp_adapter: " + msg, file=sys.stderr)
    sys.exit(1)


def is_number(tok):
    try:
        float(tok)
        return True
    except ValueError:
        return False


class Model:
    def __init__(self):
        self.maximize = True
        self.obj = {}           # name -> coeff
        self.obj_const = 0.0
        self.rows = []          # (name, {var: coeff}, sense, rhs)
        self.lb = {}
        self.ub = {}
        self.binaries = set()
        self.names = []         # declaration order: objective, then rows
        self.seen = set()

    def touch(self, name):
        if name not in self.seen:
            self.seen.add(name)
            self.names.append(name)


def split_sections(text):
    sections = {}
    current = None
    for raw in text.splitlines():
        line = raw.rstrip()
        if not line.strip():
            continue
        if line.strip() in SECTIONS and not line.startswith(" "):
            current = line.strip()
            sections.setdefault(current, [])
            continue
        if current is None:
            fail("content before the first section header: %r" % line)
        sections[current].append(line)
    return sections


def parse_linear(tokens, model, allow_sense):
    """Parse '+ c v - c v ... [+ c]' and optionally a trailing 'sense rhs'."""
    coeffs = {}
    const = 0.0
    sense = None
    rhs = None
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok in ("<=", ">=", "="):
            if not allow_sense:
                fail("unexpected comparison in objective")
            sense = tok
            if i + 1 != len(tokens) - 1:
                fail("malformed row tail: %r" % tokens[i:])
            rhs = float(tokens[i + 1])
            return coeffs, const, sense, rhs
        if tok not in ("+", "-"):
            fail("expected a sign token, got %r" % tok)
        if i + 1 >= len(tokens):
            fail("dangling sign at end of expression")
        mag = float(tokens[i + 1])
        val = -mag if tok == "-" else mag
        nxt = tokens[i + 2] if i + 2 < len(tokens) else None
        if nxt is not None and nxt not in ("+", "-", "<=", ">=", "=") and not is_number(nxt):
            coeffs[nxt] = coeffs.get(nxt, 0.0) + val
            model.touch(nxt)
            i += 3
        else:
            const += val
            i += 2
    if allow_sense:
        fail("row missing comparison")
    return coeffs, const, None, None


def parse_lp(text):
    model = Model()
    sections = split_sections(text)
    if "Maximize" in sections:
        model.maximize = True
        obj_lines = sections["Maximize"]
    elif "Minimize" in sections:
        model.maximize = False
        obj_lines = sections["Minimize"]
    else:
        fail("no objective section")
    if "End" not in sections:
        fail("missing End marker")

    tokens = " ".join(obj_lines).split()
    if not tokens or not tokens[0].endswith(":"):
        fail("objective must start with a label")
    model.obj, model.obj_const, _, _ = parse_linear(tokens[1:], model, allow_sense=False)

    # rows are label-delimited token runs; labels end with ':'
    row_tokens = " ".join(sections.get("Subject To", [])).split()
    i = 0
    while i < len(row_tokens):
        if not row_tokens[i].endswith(":"):
            fail("expected a row label, got %r" % row_tokens[i])
        name = row_tokens[i][:-1]
        j = i + 1
        while j < len(row_tokens) and not row_tokens[j].endswith(":"):
            j += 1
        coeffs, const, sense, rhs = parse_linear(row_tokens[i + 1:j], model, allow_sense=True)
        model.rows.append((name, coeffs, sense, rhs - const))
        i = j

    for line in sections.get("Bounds", []):
        toks = line.split()
        if len(toks) == 3 and toks[1] == "=":
            model.touch(toks[0])
            model.lb[toks[0]] = float(toks[2])
            model.ub[toks[0]] = float(toks[2])
        elif len(toks) == 3 and toks[1] == ">=":
            model.touch(toks[0])
            model.lb[toks[0]] = float(toks[2])
        elif len(toks) == 5 and toks[1] == "<=" and toks[3] == "<=":
            model.touch(toks[2])
            model.lb[toks[2]] = float(toks[0])
            model.ub[toks[2]] = float(toks[4])
        else:
            fail("unsupported bound line: %r" % line)

    for tok in " ".join(sections.get("Binaries", [])).split():
        model.touch(tok)
        model.binaries.add(tok)
    return model


def run(model, time_limit, gap):
    names = model.names
    idx = {n: k for k, n in enumerate(names)}
    n = len(names)

    c = np.zeros(n)
    for name, coeff in model.obj.items():
        c[idx[name]] = coeff
    sign = -1.0 if model.maximize else 1.0

    lb = np.zeros(n)
    ub = np.full(n, np.inf)
    for name in names:
        k = idx[name]
        if name in model.binaries:
            lb[k], ub[k] = 0.0, 1.0
        if name in model.lb:
            lb[k] = model.lb[name]
        if name in model.ub:
            ub[k] = model.ub[name]
    integrality = np.array([1 if name in model.binaries else 0 for name in names])

    constraints = []
    if model.rows:
        a = np.zeros((len(model.rows), n))
        lo = np.full(len(model.rows), -np.inf)
        hi = np.full(len(model.rows), np.inf)
        for r, (_, coeffs, sense, rhs) in enumerate(model.rows):
            for name, coeff in coeffs.items():
                a[r, idx[name]] = coeff
            if sense in ("<=", "="):
                hi[r] = rhs
            if sense in (">=", "="):
                lo[r] = rhs
        constraints = [LinearConstraint(a, lo, hi)]

    options = {}
    if time_limit is not None:
        options["time_limit"] = time_limit
    if gap is not None:
        options["mip_rel_gap"] = gap
    res = milp(sign * c, constraints=constraints, integrality=integrality,
               bounds=Bounds(lb, ub), options=options)

    if res.status == 2:
        return "status infeasible\n"
    if res.status == 3:
        return "status unbounded\n"
    if res.status in (0, 1):
        if res.x is None:
            if res.status == 1:
                fail("solver hit its limit without an incumbent")
            fail("solver reported success without a solution vector")
        word = "optimal" if res.status == 0 else "limit"
        objective = sign * res.fun + model.obj_const
        out = ["status " + word, "objective " + repr(float(objective))]
        for k, name in enumerate(names):
            out.append(name + " " + repr(float(res.x[k])))
        return "\n".join(out) + "\n"
    message = getattr(res, "message", "") or ""
    if "unbounded" in message.lower():
        return "status unbounded\n"
    fail("solver status %s: %s" % (res.status, message))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("lp")
    ap.add_argument("sol")
    ap.add_argument("--time-limit", type=float, default=None)
    ap.add_argument("--gap", type=float, default=None)
    args = ap.parse_args()
    try:
        with open(args.lp, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        fail("cannot read %s: %s" % (args.lp, e))
    model = parse_lp(text)
    if not model.names:
        fail("model has no variables")
    result = run(model, args.time_limit, args.gap)
    with open(args.sol, "w", encoding="utf-8") as f:
        f.write(result)


if __name__ == "__main__":
    main()
