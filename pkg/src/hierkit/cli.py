"""Command-line front end.

One binary, ``hier``, with a subcommand per task: classify finite sets,
decompose them into residue chains, grow alternating trees, run the
topological games, drive Baire-style density witnesses, evaluate codes
at points, run the staged transform end to end, audit the classifiers
against each other, and generate seeded random inputs.

Every successful run prints exactly one JSON report to stdout (and, with
--json-out, the same bytes to a file).  Reports are deterministic:
identical inputs, seed and budget produce byte-identical output, so
wall-clock timing goes to stderr only.  Failures also emit JSON, to
stdout: validation problems exit 1, exhausted search budgets exit 2.

Structured arguments (--poset, --model, --presentation, ...) take either
inline JSON or ``@path`` to a JSON file.  --set takes a comma-separated
list of element ids.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time

from hierkit.alt_trees import (
    ambiguity_audit,
    classify_by_trees,
    diff_code_from_trees,
    max_alt_rank,
    witness_tree,
)
from hierkit.diff_hierarchy import DiffCode, SearchBudgetExceeded, eval_diff, sigma_pi_levels
from hierkit.effective_codes import (
    PI,
    SIGMA,
    BorelCode,
    HausdorffCode,
    effective_hausdorff_transform,
    eval_borel,
    eval_hausdorff_code,
    presentation_from_json,
    verify_transform,
    whole_space_index,
)
from hierkit.finite_space import FinitePoset, all_posets_upto_iso, bits, random_poset
from hierkit.games import (
    BANACH_MAZUR,
    CHOQUET,
    BMFromChoquet,
    DeepeningEmpty,
    RandomEmpty,
    play,
    stationary_from_relation,
)
from hierkit.residues import hausdorff_decompose, residue_levels
from hierkit.space_models import (
    SearchExhausted,
    baire_witness,
    model_from_json,
    point_from_json,
)

VALIDATION = 1
BUDGET = 2

_DEFAULT_MODEL = '{"kind": "cylinder", "alphabet": 2}'


class CliError(Exception):
    """A reportable failure: `code` picks the exit status, `extra` is
    merged into the error JSON (partial results, tables)."""

    def __init__(self, code, message, **extra):
        super().__init__(message)
        self.code = code
        self.extra = extra


# -- argument decoding -------------------------------------------------------


def _arg_json(text, what):
    if text.startswith("@"):
        try:
            with open(text[1:]) as fh:
                text = fh.read()
        except OSError as e:
            raise CliError(VALIDATION, "cannot read %s file: %s" % (what, e))
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise CliError(VALIDATION, "bad %s JSON: %s" % (what, e))


def _canon(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _digest(obj):
    return hashlib.sha256(_canon(obj).encode()).hexdigest()


def _poset_arg(text):
    data = _arg_json(text, "poset")
    try:
        poset = FinitePoset.from_cover(int(data["n"]), [tuple(e) for e in data["cover"]])
    except (KeyError, TypeError, ValueError) as e:
        raise CliError(VALIDATION, "bad poset: %s" % e)
    return poset, data


def _model_arg(text):
    data = _arg_json(text, "model")
    try:
        return model_from_json(data), data
    except (KeyError, TypeError, ValueError) as e:
        raise CliError(VALIDATION, "bad model: %s" % e)


def _set_arg(text, poset):
    mask = 0
    for part in filter(None, (p.strip() for p in text.split(","))):
        try:
            i = int(part)
        except ValueError:
            raise CliError(VALIDATION, "set elements must be integers, got %r" % part)
        if not 0 <= i < poset.n:
            raise CliError(VALIDATION, "element %d outside 0..%d" % (i, poset.n - 1))
        mask |= 1 << i
    return mask


def _point_arg(model, text):
    try:
        return point_from_json(model, _arg_json(text, "point"))
    except (KeyError, TypeError, ValueError) as e:
        raise CliError(VALIDATION, "bad point: %s" % e)


# -- JSON renderings ---------------------------------------------------------


def _code_json(code):
    return {
        "alpha": str(code.alpha),
        "polarity": code.polarity,
        "entries": [[str(rank), handle] for rank, handle in code.entries],
    }


def _tree_json(lt):
    if lt is None:
        return None
    return {
        "rank": lt.rank(),
        "nodes": [
            {"node": list(n), "label": lt.labels[n]} for n in sorted(lt.tree.nodes)
        ],
    }


def _point_json(x):
    return x.to_json() if hasattr(x, "to_json") else x


def _cover_edges(poset):
    edges = []
    for i in range(poset.n):
        for j in bits(poset.up[i]):
            if j == i:
                continue
            if any(poset.lt(i, k) and poset.lt(k, j) for k in range(poset.n)):
                continue
            edges.append([i, j])
    return edges


# -- subcommands -------------------------------------------------------------


def _cmd_classify(args):
    poset, pdata = _poset_arg(args.poset)
    mask = _set_arg(args.set, poset)
    methods = {}
    if args.method in ("residues", "all"):
        s, p = residue_levels(poset, mask)
        methods["residues"] = {"sigma": s, "pi": p}
    if args.method in ("trees", "all"):
        s, p = classify_by_trees(poset, mask)
        methods["trees"] = {"sigma": s, "pi": p}
    if args.method in ("brute", "all"):
        s, p = sigma_pi_levels(poset, mask)
        methods["brute"] = {"sigma": s, "pi": p}
    pairs = {(m["sigma"], m["pi"]) for m in methods.values()}
    if len(pairs) != 1:
        raise CliError(
            VALIDATION, "classifiers disagree: %s" % json.dumps(methods, sort_keys=True)
        )
    sigma, pi = pairs.pop()
    inputs = {"poset": _digest(pdata), "set": sorted(bits(mask)), "method": args.method}
    outputs = {
        "sigma": sigma,
        "pi": pi,
        "agree": True,
        "methods": methods,
        "witnesses": {
            "sigma_tree": _tree_json(witness_tree(poset, mask, 1)),
            "pi_tree": _tree_json(witness_tree(poset, mask, 0)),
        },
    }
    return inputs, outputs


def _cmd_residues(args):
    poset, pdata = _poset_arg(args.poset)
    mask = _set_arg(args.set, poset)
    d = hausdorff_decompose(poset, mask)
    sigma, pi = residue_levels(poset, mask)
    inputs = {"poset": _digest(pdata), "set": sorted(bits(mask))}
    outputs = {
        "chain": list(d.F),
        "theta": d.theta,
        "code": _code_json(d.code),
        "trimmed_code": _code_json(d.trimmed_code),
        "trimmed_level": d.trimmed_level,
        "co_level": d.co_level,
        "sigma": sigma,
        "pi": pi,
    }
    return inputs, outputs


def _cmd_alt(args):
    poset, pdata = _poset_arg(args.poset)
    mask = _set_arg(args.set, poset)
    r1 = max_alt_rank(poset, mask, 1)
    r0 = max_alt_rank(poset, mask, 0)
    sigma, pi = classify_by_trees(poset, mask)
    inputs = {"poset": _digest(pdata), "set": sorted(bits(mask))}
    outputs = {
        "rank_eps1": r1,
        "rank_eps0": r0,
        "sigma": sigma,
        "pi": pi,
        "witness_eps1": _tree_json(witness_tree(poset, mask, 1)),
        "witness_eps0": _tree_json(witness_tree(poset, mask, 0)),
        "code": _code_json(diff_code_from_trees(poset, mask)),
    }
    return inputs, outputs


def _cmd_play(args):
    model, mdata = _model_arg(args.model)
    rng = random.Random(args.seed)
    mover = {"random": RandomEmpty, "deepening": DeepeningEmpty}[args.empty]
    empty = mover(model, rng, first=args.first)
    tau = stationary_from_relation(model)
    game = CHOQUET if args.game == "choquet" else BANACH_MAZUR
    nonempty = tau if game == CHOQUET else BMFromChoquet(tau, model)
    transcript = play(model, empty, nonempty, args.rounds, game=game)
    inputs = {
        "model": _digest(mdata),
        "rounds": args.rounds,
        "game": args.game,
        "empty": args.empty,
        "first": args.first,
    }
    return inputs, {"transcript": transcript.to_json()}


def _normalize_dense(data):
    dense = []
    for i, entry in enumerate(data):
        if isinstance(entry, dict):
            u, f = entry.get("u", []), entry.get("f", [])
        elif isinstance(entry, (list, tuple)) and len(entry) == 2:
            u, f = entry
        else:
            raise CliError(
                VALIDATION,
                "dense constraint %d must be {u, f} or a [u, f] pair" % i,
            )
        dense.append((tuple(int(j) for j in u), tuple(int(j) for j in f)))
    if not dense:
        raise CliError(VALIDATION, "need at least one dense constraint")
    return dense


def _cmd_baire(args):
    model, mdata = _model_arg(args.model)
    dense = _normalize_dense(_arg_json(args.dense, "dense"))
    target = whole_space_index(model) if args.target is None else int(args.target)
    result = baire_witness(model, dense, target, budget=args.budget)
    inputs = {
        "model": _digest(mdata),
        "dense": _digest([[list(u), list(f)] for u, f in dense]),
        "target": target,
        "budget": args.budget,
    }
    if result.outcome == "BUDGET_EXCEEDED":
        raise CliError(
            BUDGET, "chain search exhausted budget %d" % args.budget,
            result=result.to_json(),
        )
    if result.outcome == "DENSITY_VIOLATION":
        raise CliError(
            VALIDATION,
            "constraint %s is not dense along the chain" % result.failed_index,
            result=result.to_json(),
        )
    return inputs, result.to_json()


def _cmd_eval_code(args):
    given = [k for k in ("borel", "hausdorff", "diff") if getattr(args, k) is not None]
    if len(given) != 1:
        raise CliError(VALIDATION, "need exactly one of --borel/--hausdorff/--diff")
    model, mdata = _model_arg(args.model)
    x = _point_arg(model, args.point)
    kind = given[0]
    data = _arg_json(getattr(args, kind), kind + " code")
    if kind == "borel":
        code = BorelCode.from_json(data)
        value = eval_borel(code, model, SIGMA if args.side == "sigma" else PI, x)
    elif kind == "hausdorff":
        code = HausdorffCode.from_json(data)
        value = eval_hausdorff_code(code, model, x)
    else:
        try:
            entries = tuple((int(r), int(h)) for r, h in data["entries"])
            code = DiffCode(int(data["alpha"]), data.get("polarity", "D"), entries)
        except (KeyError, TypeError) as e:
            raise CliError(VALIDATION, "bad diff code: %s" % e)
        value = eval_diff(code, x, lambda h, y: model.point_in_basic(y, h))
    inputs = {
        "model": _digest(mdata),
        "code": _digest(data),
        "kind": kind,
        "point": _digest(_point_json(x)),
        "side": args.side if kind == "borel" else None,
    }
    return inputs, {"value": value}


def _cmd_transform(args):
    model, mdata = _model_arg(args.model)
    pdata = _arg_json(args.presentation, "presentation")
    pres = presentation_from_json(model, pdata)
    inputs = {
        "model": _digest(mdata),
        "presentation": _digest(pdata),
        "budget": args.budget,
        "points": None,
    }
    if args.points is None:
        result = effective_hausdorff_transform(pres, model, args.budget)
        return inputs, {"result": result.to_json(), "verification": None}

    pts_data = _arg_json(args.points, "points")
    points = [point_from_json(model, p) for p in pts_data]
    inputs["points"] = _digest([_point_json(x) for x in points])
    report = verify_transform(
        pres, model, points, args.budget, max_budget=args.max_budget
    )
    table = [
        {
            "point": _point_json(x),
            "transform": report.result.eval_point(model, x),
            "oracle": bool(pres.member(x)),
        }
        for x in points
    ]
    for row in table:
        row["match"] = row["transform"] == row["oracle"]
    outputs = {
        "result": report.result.to_json(),
        "verification": {
            "status": report.status,
            "budgets": list(report.budgets),
            "first_change": report.first_change,
            "mismatches": [_point_json(x) for x in report.mismatches],
            "table": table,
        },
    }
    if report.status != "COMPLETE":
        raise CliError(
            BUDGET,
            "verification did not stabilize within budget %d" % report.budgets[-1],
            report=outputs,
        )
    return inputs, outputs


def _cmd_audit(args):
    depth = args.nmax
    disagreements = []
    ambiguity_violations = []
    no_least_inequalities = []
    posets = sets = 0
    for k in range(1, args.exhaustive + 1):
        for poset in all_posets_upto_iso(k):
            posets += 1
            cover = _cover_edges(poset)
            has_least = any(poset.up[i] == poset.carrier for i in range(poset.n))
            report = ambiguity_audit(poset, depth)
            for mask in range(1 << poset.n):
                sets += 1
                a = report.levels[mask]
                b = residue_levels(poset, mask)
                c = sigma_pi_levels(poset, mask)
                if not (a == b == c):
                    disagreements.append(
                        {
                            "poset": {"n": poset.n, "cover": cover},
                            "set": mask,
                            "trees": list(a),
                            "residues": list(b),
                            "brute": list(c),
                        }
                    )
            for m in range(1, depth + 1):
                if report.violations[m]:
                    entry = {
                        "poset": {"n": poset.n, "cover": cover},
                        "n": m,
                        "masks": report.violations[m],
                    }
                    # The intersection-equals-union-below identity is a
                    # theorem only above a least element; elsewhere its
                    # failures are recorded but are not defects.
                    (ambiguity_violations if has_least else no_least_inequalities).append(entry)
    inputs = {"exhaustive": args.exhaustive, "nmax": depth}
    outputs = {
        "posets": posets,
        "sets_checked": sets,
        "classifier_disagreements": disagreements,
        "ambiguity_violations": ambiguity_violations,
        "no_least_element_inequalities": no_least_inequalities,
        "violations": len(disagreements) + len(ambiguity_violations),
    }
    if outputs["violations"]:
        raise CliError(
            VALIDATION, "audit found %d violations" % outputs["violations"],
            report=outputs,
        )
    return inputs, outputs


def _cmd_gen(args):
    rng = random.Random(args.seed)
    items = []
    if args.kind == "poset":
        for _ in range(args.count):
            p = random_poset(args.n, rng)
            items.append({"n": p.n, "cover": _cover_edges(p)})
    else:
        for _ in range(args.count):
            pick = rng.randrange(3)
            if pick == 0:
                items.append({"kind": "cylinder", "alphabet": 2 + rng.randrange(3)})
            elif pick == 1:
                items.append({"kind": "pinf", "bound": 16 << rng.randrange(3)})
            else:
                p = random_poset(2 + rng.randrange(args.n - 1 or 1), rng)
                items.append(
                    {"kind": "poset", "poset": {"n": p.n, "cover": _cover_edges(p)}}
                )
    inputs = {"kind": args.kind, "n": args.n, "count": args.count}
    return inputs, {"items": items}


# -- wiring ------------------------------------------------------------------


def _build_parser():
    top = argparse.ArgumentParser(
        prog="hier",
        description="difference-hierarchy levels, games, and staged transforms",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def command(name, handler, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(handler=handler)
        p.add_argument("--json-out", metavar="FILE", help="also write the report to FILE")
        p.add_argument("--seed", type=int, default=0, help="RNG seed, echoed in the report")
        return p

    p = command("classify", _cmd_classify, "sigma/pi levels of a subset of a finite poset")
    p.add_argument("--poset", required=True, help='{"n": ..., "cover": [[lo, hi], ...]} or @file')
    p.add_argument("--set", required=True, help="comma-separated element ids")
    p.add_argument("--method", choices=["residues", "trees", "brute", "all"], default="all")

    p = command("residues", _cmd_residues, "residue chain and difference codes of a subset")
    p.add_argument("--poset", required=True)
    p.add_argument("--set", required=True)

    p = command("alt", _cmd_alt, "alternating-tree ranks, witness trees, synthesized code")
    p.add_argument("--poset", required=True)
    p.add_argument("--set", required=True)

    p = command("play", _cmd_play, "run a bounded Choquet or Banach-Mazur match")
    p.add_argument("--model", default=_DEFAULT_MODEL, help="model JSON or @file")
    p.add_argument("--rounds", type=int, default=12)
    p.add_argument("--game", choices=["choquet", "bm"], default="choquet")
    p.add_argument("--empty", choices=["random", "deepening"], default="random")
    p.add_argument("--first", type=int, default=None, help="Empty's opening basis index")

    p = command("baire", _cmd_baire, "certify a point meeting dense open-closed constraints")
    p.add_argument("--model", default=_DEFAULT_MODEL)
    p.add_argument("--dense", required=True, help='[{"u": [...], "f": [...]}, ...] or @file')
    p.add_argument("--target", type=int, default=None, help="target basic open (default: whole space)")
    p.add_argument("--budget", type=int, default=10_000)

    p = command("eval-code", _cmd_eval_code, "evaluate a Borel, Hausdorff or difference code at a point")
    p.add_argument("--model", default=_DEFAULT_MODEL)
    p.add_argument("--point", required=True, help="point JSON (model-specific) or @file")
    p.add_argument("--borel", help='{"nodes": [[...], ...]}')
    p.add_argument("--hausdorff", help='{"order": ..., "parity_set": ..., "trees": ...}')
    p.add_argument("--diff", help='{"alpha": n, "entries": [[rank, index], ...]}')
    p.add_argument("--side", choices=["sigma", "pi"], default="sigma")

    p = command("transform", _cmd_transform, "staged alternating-tree transform, optionally verified")
    p.add_argument("--model", default=_DEFAULT_MODEL)
    p.add_argument("--presentation", required=True, help="presentation JSON or @file")
    p.add_argument("--budget", type=int, default=16, help="stage budget for the tree")
    p.add_argument("--max-budget", type=int, default=None, help="cap for verification doubling")
    p.add_argument("--points", default=None, help="JSON list of points to verify against the oracle")

    p = command("audit", _cmd_audit, "cross-check all classifiers and the ambiguity identities")
    p.add_argument("--exhaustive", type=int, default=3, metavar="N",
                   help="check every poset with up to N elements (up to isomorphism)")
    p.add_argument("--nmax", type=int, default=2, help="ambiguity depth to check")

    p = command("gen", _cmd_gen, "emit seeded random posets or models")
    p.add_argument("--kind", choices=["poset", "model"], default="poset")
    p.add_argument("--n", type=int, default=5, help="poset size (or size bound for models)")
    p.add_argument("--count", type=int, default=10)

    return top


def main(argv=None):
    args = _build_parser().parse_args(argv)
    started = time.monotonic()
    try:
        try:
            inputs, outputs = args.handler(args)
        except (SearchBudgetExceeded, SearchExhausted) as e:
            raise CliError(BUDGET, str(e))
        except CliError:
            raise
        except (KeyError, ValueError) as e:
            raise CliError(VALIDATION, str(e))
    except CliError as e:
        payload = {
            "error": {
                "kind": "budget" if e.code == BUDGET else "validation",
                "message": str(e),
            }
        }
        payload.update(e.extra)
        sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
        return e.code
    report = {
        "command": args.command,
        "seed": args.seed,
        "inputs": inputs,
        "outputs": outputs,
    }
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    sys.stdout.write(text)
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(text)
    sys.stderr.write("hier %s: %.3fs\n" % (args.command, time.monotonic() - started))
    return 0


if __name__ == "__main__":
    sys.exit(main())
