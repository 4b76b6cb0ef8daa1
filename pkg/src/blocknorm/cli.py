"""Config-driven batch front end.

Reads a JSON job file, validates it, runs the requested computations and
checks, and writes a machine-readable JSON report.  A report is
reproducible from the configuration it echoes plus the seed it records;
identical runs produce byte-identical reports except for the timing fields.

Exit codes: 0 when every executed job passed, 1 when any job failed or
errored, 2 for configuration or usage errors.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import __version__, _sampling
from .blocks import make_block
from .multilinear import MultiOperator, finite_type, sup_norm
from .seqnorms import (ScalarSequence, Strong, Sup, VecSequence, Weak,
                       as_stack)
from .spaces import FiniteLpSpace, Vec
from .summing import check_compatibility, check_diagonalizable, summing_norm
from .theorems import (CoincidenceConstants, check_coincidence,
                       check_diagonal_reduction, check_finite_type_norm,
                       check_ideal_inequality, check_multiple_formula,
                       check_norm_domination, check_partition_formula,
                       find_incompatibility_witness)

SEED_ENV = "BLOCKNORM_SEED"

_JOB_KINDS = ("norm", "summing-norm", "check", "witness")
_CHECK_NAMES = ("norm-domination", "ideal", "finite-type",
                "diagonal-reduction", "multiple-formula", "partition-formula",
                "coincidence", "compatibility", "diagonalizable")


@dataclass
class Options:
    seed: int = 0
    budget: int = 8
    tol_identity: float = 1e-12
    tol_chain: float = 1e-9
    workers: int = 1


@dataclass
class Environment:
    """Resolved configuration objects, keyed by their config names."""

    spaces: dict = field(default_factory=dict)
    operators: dict = field(default_factory=dict)
    blocks: dict = field(default_factory=dict)
    classes: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# validation


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _valid_exp(x) -> bool:
    if isinstance(x, str):
        return x.lower() in ("inf", "infinity", "oo")
    return _is_num(x) and x >= 1


def _tensor_shape(data, path, diags) -> Optional[tuple[int, ...]]:
    if _is_num(data):
        return ()
    if not isinstance(data, list) or not data:
        diags.append(f"{path}: expected a nonempty nested array")
        return None
    shapes = set()
    for i, item in enumerate(data):
        s = _tensor_shape(item, f"{path}[{i}]", diags)
        if s is None:
            return None
        shapes.add(s)
    if len(shapes) != 1:
        diags.append(f"{path}: ragged tensor")
        return None
    return (len(data),) + shapes.pop()


def validate_config(cfg: Any, base_dir: Path) -> list[str]:
    """Shape, exponent and cross-reference checks; diagnostics carry field paths."""
    diags: list[str] = []
    if not isinstance(cfg, dict):
        return ["top level: expected a JSON object"]
    spaces = cfg.get("spaces", {})
    if not isinstance(spaces, dict):
        diags.append("spaces: expected an object")
        spaces = {}
    for name, sp in spaces.items():
        path = f"spaces.{name}"
        if not isinstance(sp, dict):
            diags.append(f"{path}: expected an object")
            continue
        if not isinstance(sp.get("dim"), int) or sp["dim"] < 1:
            diags.append(f"{path}.dim: expected a positive integer")
        if not _valid_exp(sp.get("exp")):
            diags.append(f"{path}.exp: expected a number >= 1 or \"inf\"")

    classes = cfg.get("classes", {})
    if not isinstance(classes, dict):
        diags.append("classes: expected an object")
        classes = {}
    for name, cl in classes.items():
        path = f"classes.{name}"
        if not isinstance(cl, dict):
            diags.append(f"{path}: expected an object")
            continue
        kind = cl.get("kind")
        if kind not in ("strong", "weak", "sup"):
            diags.append(f"{path}.kind: expected strong|weak|sup")
        elif kind == "sup":
            if "p" in cl:
                diags.append(f"{path}.p: the sup class takes no exponent")
        else:
            p = cl.get("p")
            if not (_is_num(p) and p >= 1 and math.isfinite(p)):
                diags.append(f"{path}.p: expected a finite number >= 1")

    operators = cfg.get("operators", {})
    if not isinstance(operators, dict):
        diags.append("operators: expected an object")
        operators = {}
    for name, op in operators.items():
        path = f"operators.{name}"
        if not isinstance(op, dict):
            diags.append(f"{path}: expected an object")
            continue
        doms = op.get("domains")
        if not isinstance(doms, list) or not doms:
            diags.append(f"{path}.domains: expected a nonempty list of space names")
            doms = []
        missing = [d for d in doms if d not in spaces]
        if missing:
            diags.append(f"{path}.domains: unknown spaces {missing}")
        cod = op.get("codomain")
        if cod not in spaces:
            diags.append(f"{path}.codomain: unknown space {cod!r}")
        tensor = op.get("tensor")
        if tensor is None and "tensor_file" in op:
            fpath = base_dir / op["tensor_file"]
            if not fpath.is_file():
                diags.append(f"{path}.tensor_file: no such file {op['tensor_file']!r}")
                continue
            try:
                tensor = json.loads(fpath.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                diags.append(f"{path}.tensor_file: parse error at line "
                             f"{exc.lineno} column {exc.colno}: {exc.msg}")
                continue
        if tensor is None:
            diags.append(f"{path}: expected tensor or tensor_file")
            continue
        shape = _tensor_shape(tensor, f"{path}.tensor", diags)
        if shape is None or missing or cod not in spaces or not doms:
            continue
        expected = tuple(spaces[d]["dim"] for d in doms if isinstance(
            spaces[d], dict)) + (spaces[cod]["dim"],)
        if shape != expected:
            diags.append(f"{path}.tensor: shape {shape} does not match "
                         f"spaces {expected} (codomain index last)")

    blocks = cfg.get("blocks", {})
    if not isinstance(blocks, dict):
        diags.append("blocks: expected an object")
        blocks = {}
    for name, bl in blocks.items():
        path = f"blocks.{name}"
        if not isinstance(bl, dict):
            diags.append(f"{path}: expected an object")
            continue
        kind = bl.get("kind")
        if kind not in ("diagonal", "full", "equality", "explicit"):
            diags.append(f"{path}.kind: expected diagonal|full|equality|explicit")
            continue
        bounds = bl.get("bounds")
        if (not isinstance(bounds, list) or not bounds
                or not all(isinstance(b, int) and b >= 1 for b in bounds)):
            diags.append(f"{path}.bounds: expected a list of positive integers")
            continue
        if kind == "equality":
            pair = bl.get("pair")
            n = len(bounds)
            if (not isinstance(pair, list) or len(pair) != 2
                    or not all(isinstance(i, int) and 0 <= i < n for i in pair)
                    or pair[0] == pair[1]):
                diags.append(f"{path}.pair: expected two distinct 0-based "
                             f"slot indices below {n}")
        if kind == "explicit":
            members = bl.get("members")
            if not isinstance(members, list) or not members:
                diags.append(f"{path}.members: expected a nonempty list of tuples")
                continue
            for i, t in enumerate(members):
                if (not isinstance(t, list) or len(t) != len(bounds)
                        or not all(isinstance(j, int) for j in t)):
                    diags.append(f"{path}.members[{i}]: expected {len(bounds)} "
                                 "integer indices")
                elif any(j < 0 or j >= b for j, b in zip(t, bounds)):
                    diags.append(f"{path}.members[{i}]: tuple {tuple(t)} out "
                                 f"of bounds {tuple(bounds)}")

    jobs = cfg.get("jobs")
    if not isinstance(jobs, list) or not jobs:
        diags.append("jobs: expected a nonempty list")
        jobs = []
    for i, job in enumerate(jobs):
        _validate_job(job, i, spaces, operators, blocks, classes, diags)
    return diags


def _check_stack_classes(names, path, classes, diags, *, innermost_weak_ok=True):
    if not isinstance(names, list) or not names:
        diags.append(f"{path}: expected a nonempty list of class names")
        return
    for j, cname in enumerate(names):
        if cname not in classes:
            diags.append(f"{path}[{j}]: unknown class {cname!r}")
            continue
        kind = classes[cname].get("kind") if isinstance(classes[cname], dict) else None
        if kind == "weak" and (j < len(names) - 1 or not innermost_weak_ok):
            diags.append(f"{path}[{j}]: UnsupportedClassPosition: weak class "
                         f"{cname!r} is only supported in the innermost "
                         "stack position")


def _validate_job(job, i, spaces, operators, blocks, classes, diags):
    path = f"jobs[{i}]"
    if not isinstance(job, dict):
        diags.append(f"{path}: expected an object")
        return
    kind = job.get("kind")
    if kind not in _JOB_KINDS:
        diags.append(f"{path}.kind: expected one of {list(_JOB_KINDS)}")
        return
    if "seed" in job and not isinstance(job["seed"], int):
        diags.append(f"{path}.seed: expected an integer")

    def need_operator():
        op = job.get("operator")
        if op not in operators:
            diags.append(f"{path}.operator: unknown operator {op!r}")
            return None
        return op

    def need_block(arity=None):
        bn = job.get("block")
        if bn not in blocks:
            diags.append(f"{path}.block: unknown block {bn!r}")
            return None
        bounds = blocks[bn].get("bounds")
        if (arity is not None and isinstance(bounds, list)
                and len(bounds) != arity):
            diags.append(f"{path}.block: block arity {len(bounds)} != "
                         f"operator arity {arity}")
        return bn

    def operator_arity(op):
        if op is None:
            return None
        doms = operators[op].get("domains")
        return len(doms) if isinstance(doms, list) else None

    def need_samples():
        s = job.get("samples")
        if (not isinstance(s, dict) or not isinstance(s.get("count"), int)
                or s["count"] < 1 or not isinstance(s.get("length"), int)
                or s["length"] < 1):
            diags.append(f"{path}.samples: expected {{count, length[, seed]}} "
                         "with positive integers")

    if kind == "norm":
        need_operator()
    elif kind == "summing-norm":
        op = need_operator()
        need_block(operator_arity(op))
        _check_stack_classes(job.get("xclasses"), f"{path}.xclasses", classes,
                             diags)
        _check_stack_classes(job.get("stack"), f"{path}.stack", classes, diags)
        if "truncation" in job and (not isinstance(job["truncation"], int)
                                    or job["truncation"] < 1):
            diags.append(f"{path}.truncation: expected a positive integer")
    elif kind == "witness":
        need_block()
        _check_stack_classes(job.get("xclasses"), f"{path}.xclasses", classes,
                             diags)
        _check_stack_classes(job.get("stack"), f"{path}.stack", classes, diags)
        if not isinstance(job.get("truncation"), int) or job["truncation"] < 1:
            diags.append(f"{path}.truncation: expected a positive integer")
    else:  # check
        cname = job.get("check")
        if cname not in _CHECK_NAMES:
            diags.append(f"{path}.check: expected one of {list(_CHECK_NAMES)}")
            return
        op = None
        if cname in ("norm-domination", "ideal", "diagonal-reduction",
                     "multiple-formula", "partition-formula", "coincidence"):
            op = need_operator()
            need_samples()
        if cname in ("norm-domination", "ideal"):
            need_block(operator_arity(op))
            _check_stack_classes(job.get("xclasses"), f"{path}.xclasses",
                                 classes, diags)
            _check_stack_classes(job.get("stack"), f"{path}.stack", classes,
                                 diags)
        if cname == "diagonal-reduction":
            if not _is_num(job.get("q")) or job["q"] < 1:
                diags.append(f"{path}.q: expected a number >= 1")
            if job.get("zclass") not in classes:
                diags.append(f"{path}.zclass: unknown class {job.get('zclass')!r}")
        if cname == "multiple-formula":
            qs = job.get("qs")
            if (not isinstance(qs, list) or not qs
                    or not all(_is_num(q) and q >= 1 for q in qs)):
                diags.append(f"{path}.qs: expected a list of numbers >= 1")
        if cname == "partition-formula":
            for key in ("q1", "q2"):
                if not _is_num(job.get(key)) or job[key] < 1:
                    diags.append(f"{path}.{key}: expected a number >= 1")
        if cname == "finite-type":
            need_block()
            _check_stack_classes(job.get("xclasses"), f"{path}.xclasses",
                                 classes, diags)
            _check_stack_classes(job.get("stack"), f"{path}.stack", classes,
                                 diags)
            if not isinstance(job.get("functionals"), list):
                diags.append(f"{path}.functionals: expected a list of "
                             "{space, coords}")
            if not isinstance(job.get("target"), dict):
                diags.append(f"{path}.target: expected {{space, coords}}")
        if cname == "compatibility":
            need_block()
            need_samples()
            _check_stack_classes(job.get("xclasses"), f"{path}.xclasses",
                                 classes, diags)
            _check_stack_classes(job.get("stack"), f"{path}.stack", classes,
                                 diags)
        if cname == "diagonalizable":
            need_samples()
            if job.get("space") not in spaces:
                diags.append(f"{path}.space: unknown space {job.get('space')!r}")
            for key in ("yclass", "zclass"):
                if job.get(key) not in classes:
                    diags.append(f"{path}.{key}: unknown class {job.get(key)!r}")
        if cname == "coincidence":
            if job.get("constants") is not None:
                c = job["constants"]
                if (not isinstance(c, dict) or not _is_num(c.get("c1"))
                        or not _is_num(c.get("c2"))):
                    diags.append(f"{path}.constants: expected {{c1, c2}}")


# ---------------------------------------------------------------------------
# resolution and execution


def build_environment(cfg: dict, base_dir: Path) -> Environment:
    env = Environment()
    for name, sp in cfg.get("spaces", {}).items():
        env.spaces[name] = FiniteLpSpace(sp["dim"], sp["exp"])
    for name, cl in cfg.get("classes", {}).items():
        kind = cl["kind"]
        if kind == "sup":
            env.classes[name] = Sup()
        elif kind == "strong":
            env.classes[name] = Strong(cl["p"])
        else:
            env.classes[name] = Weak(cl["p"])
    for name, op in cfg.get("operators", {}).items():
        tensor = op.get("tensor")
        if tensor is None:
            tensor = json.loads(
                (base_dir / op["tensor_file"]).read_text(encoding="utf-8"))
        domains = tuple(env.spaces[d] for d in op["domains"])
        env.operators[name] = MultiOperator(np.array(tensor, dtype=float),
                                            domains, env.spaces[op["codomain"]])
    for name, bl in cfg.get("blocks", {}).items():
        kw = {}
        if bl["kind"] == "equality":
            kw["pair"] = tuple(bl["pair"])
        if bl["kind"] == "explicit":
            kw["members"] = [tuple(t) for t in bl["members"]]
        env.blocks[name] = make_block(bl["kind"], tuple(bl["bounds"]), **kw)
    return env


def _json_safe(value):
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, float):
        return value if math.isfinite(value) else repr(value)
    if isinstance(value, np.ndarray):
        return _json_safe(value.tolist())
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def _witness_payload(witness):
    if witness is None:
        return None
    if isinstance(witness, Vec):
        return _json_safe(witness.coords)
    if isinstance(witness, VecSequence):
        return _json_safe(witness.entries)
    if isinstance(witness, ScalarSequence):
        return _json_safe(witness.values)
    if isinstance(witness, (list, tuple)):
        return [_witness_payload(w) for w in witness]
    return _json_safe(witness)


def _sequence_samples(env: Environment, job: dict, domains, seed: int):
    s = job["samples"]
    return _sampling.random_vec_sequences(
        domains, [s["length"]] * len(domains), s["count"],
        s.get("seed", seed))


def _apply_expectations(job: dict, result: dict, passed: bool,
                        opts: Options) -> bool:
    expect = job.get("expect")
    if not isinstance(expect, dict):
        return passed
    if "value" in expect and "value" in result:
        rtol = expect.get("rtol", opts.tol_chain)
        ok = abs(result["value"] - expect["value"]) <= rtol * max(
            1.0, abs(expect["value"]))
        result["expected_value"] = expect["value"]
        passed = passed and ok
    if "min_value" in expect and "value" in result:
        passed = passed and result["value"] >= expect["min_value"]
    if "min_margin" in expect and "worst_margin" in result:
        passed = passed and result["worst_margin"] >= expect["min_margin"]
    return passed


def run_job(env: Environment, job: dict, opts: Options) -> dict:
    seed = job.get("seed", opts.seed)
    budget = job.get("budget", opts.budget)
    kind = job["kind"]
    result: dict = {}
    passed = True
    if kind == "norm":
        res = sup_norm(env.operators[job["operator"]], budget=budget,
                       seed=seed)
        result = {"value": res.value, "exact": res.exact,
                  "witness": _witness_payload(list(res.witness))}
    elif kind == "summing-norm":
        T = env.operators[job["operator"]]
        block = env.blocks[job["block"]]
        xspecs = [env.classes[c] for c in job["xclasses"]]
        stack = as_stack([env.classes[c] for c in job["stack"]])
        est = summing_norm(T, block, xspecs, stack,
                           truncation=job.get("truncation"), budget=budget,
                           seed=seed)
        result = {"value": est.value, "exact": est.exact,
                  "truncation": est.truncation,
                  "witness": _witness_payload(list(est.witness))}
    elif kind == "witness":
        block = env.blocks[job["block"]]
        xspecs = [env.classes[c] for c in job["xclasses"]]
        stack = as_stack([env.classes[c] for c in job["stack"]])
        rep = find_incompatibility_witness(
            xspecs, stack, block, truncation=job["truncation"],
            budget=budget, seed=seed, tolerance=opts.tol_identity)
        result = {"compatible_so_far": rep.passed,
                  "worst_margin": rep.worst_margin,
                  "witness": _witness_payload(rep.witness),
                  "candidates": rep.samples}
    else:
        result, passed = _run_check(env, job, opts, seed, budget)
    passed = _apply_expectations(job, result, passed, opts)
    return {"name": job.get("name", job.get("check", kind)), "kind": kind,
            "status": "pass" if passed else "fail", "result": result}


def _report_dict(rep) -> dict:
    return {"instances": rep.instances, "passed": rep.passed,
            "worst_slack": _json_safe(rep.worst_slack),
            "note": rep.note,
            "details": _json_safe(rep.details),
            "witness": _witness_payload(rep.witness)}


def _run_check(env: Environment, job: dict, opts: Options, seed: int,
               budget: int) -> tuple[dict, bool]:
    cname = job["check"]
    if cname == "norm-domination":
        T = env.operators[job["operator"]]
        block = env.blocks[job["block"]]
        xspecs = [env.classes[c] for c in job["xclasses"]]
        stack = as_stack([env.classes[c] for c in job["stack"]])
        xs = _sampling.random_unit_vectors(T.domains, job["samples"]["count"],
                                           job["samples"].get("seed", seed))
        rep = check_norm_domination(T, block, xspecs, stack, xs,
                                    budget=budget, seed=seed,
                                    tol_identity=opts.tol_identity,
                                    tol_chain=opts.tol_chain)
    elif cname == "ideal":
        T = env.operators[job["operator"]]
        block = env.blocks[job["block"]]
        xspecs = [env.classes[c] for c in job["xclasses"]]
        stack = as_stack([env.classes[c] for c in job["stack"]])
        s = job["samples"]
        sample_seed = s.get("seed", seed)
        us = [_sampling.random_linear_map(dom, dom, sample_seed + 1 + k)
              for k, dom in enumerate(T.domains)]
        v = _sampling.random_linear_map(T.codomain, T.codomain, sample_seed)
        seqs = _sequence_samples(env, job, T.domains, seed)
        rep = check_ideal_inequality(v, T, us, block, xspecs, stack, seqs,
                                     budget=budget, seed=seed,
                                     tol=opts.tol_chain)
    elif cname == "finite-type":
        block = env.blocks[job["block"]]
        xspecs = [env.classes[c] for c in job["xclasses"]]
        stack = as_stack([env.classes[c] for c in job["stack"]])
        phis = [Vec(f["coords"], env.spaces[f["space"]])
                for f in job["functionals"]]
        b = Vec(job["target"]["coords"], env.spaces[job["target"]["space"]])
        rep = check_finite_type_norm(phis, b, block, xspecs, stack,
                                     budget=budget, seed=seed,
                                     tol=opts.tol_chain)
    elif cname == "diagonal-reduction":
        T = env.operators[job["operator"]]
        seqs = _sequence_samples(env, job, T.domains, seed)
        rep = check_diagonal_reduction(T, (Strong(1),) * T.arity, job["q"],
                                       env.classes[job["zclass"]], seqs,
                                       tol=opts.tol_identity)
    elif cname == "multiple-formula":
        T = env.operators[job["operator"]]
        seqs = _sequence_samples(env, job, T.domains, seed)
        rep = check_multiple_formula(T, job["qs"], seqs,
                                     tol=opts.tol_identity)
    elif cname == "partition-formula":
        T = env.operators[job["operator"]]
        seqs = _sequence_samples(env, job, T.domains, seed)
        rep = check_partition_formula(T, job["q1"], job["q2"], seqs,
                                      tol=opts.tol_identity)
    elif cname == "coincidence":
        T = env.operators[job["operator"]]
        seqs = _sequence_samples(env, job, T.domains, seed)
        constants = None
        if job.get("constants"):
            constants = CoincidenceConstants(job["constants"]["c1"],
                                             job["constants"]["c2"])
        xspecs = [env.classes[c] for c in job.get("xclasses",
                                                  [])] or [Strong(1), Strong(1)]
        rep = check_coincidence(T, xspecs, job.get("q", 1), seqs,
                                constants=constants, budget=budget, seed=seed,
                                tol_identity=opts.tol_identity,
                                tol_chain=opts.tol_chain)
    elif cname == "compatibility":
        block = env.blocks[job["block"]]
        xspecs = [env.classes[c] for c in job["xclasses"]]
        stack = as_stack([env.classes[c] for c in job["stack"]])
        samples = _sampling.random_scalar_sequences(
            xspecs, job["samples"]["length"], job["samples"]["count"],
            job["samples"].get("seed", seed))
        rep = check_compatibility(xspecs, stack, block, samples,
                                  budget=budget, seed=seed,
                                  tolerance=opts.tol_identity)
        return ({"instances": rep.samples, "passed": rep.passed,
                 "worst_margin": _json_safe(rep.worst_margin),
                 "witness": _witness_payload(rep.witness)}, rep.passed)
    else:  # diagonalizable
        space = env.spaces[job["space"]]
        s = job["samples"]
        seqs = [tup[0] for tup in _sampling.random_vec_sequences(
            [space], [s["length"]], s["count"], s.get("seed", seed))]
        rep = check_diagonalizable(env.classes[job["yclass"]],
                                   env.classes[job["zclass"]], space, seqs,
                                   budget=budget, seed=seed,
                                   tolerance=opts.tol_identity)
        return ({"instances": rep.samples, "passed": rep.passed,
                 "worst_deviation": _json_safe(rep.worst_deviation),
                 "witness": _witness_payload(rep.witness)}, rep.passed)
    return _report_dict(rep), rep.passed


def run_config(cfg: dict, base_dir: Path, kinds: tuple[str, ...],
               opts: Options) -> tuple[dict, int]:
    """Run the config's jobs of the given kinds; report in config order."""
    t0 = time.perf_counter()
    env = build_environment(cfg, base_dir)
    selected = [(i, job) for i, job in enumerate(cfg["jobs"])
                if job["kind"] in kinds]
    results: list[Optional[dict]] = [None] * len(selected)

    def run_one(pos: int) -> dict:
        i, job = selected[pos]
        t = time.perf_counter()
        try:
            out = run_job(env, job, opts)
        except Exception as exc:  # partial report on internal failure
            out = {"name": job.get("name", job["kind"]), "kind": job["kind"],
                   "status": "error", "result": {"error": f"{type(exc).__name__}: {exc}"}}
        out["timing"] = {"seconds": time.perf_counter() - t}
        return out

    if opts.workers > 1 and len(selected) > 1:
        with concurrent.futures.ThreadPoolExecutor(opts.workers) as pool:
            for pos, out in zip(range(len(selected)),
                                pool.map(run_one, range(len(selected)))):
                results[pos] = out
    else:
        for pos in range(len(selected)):
            results[pos] = run_one(pos)

    passed = sum(1 for r in results if r["status"] == "pass")
    failed = sum(1 for r in results if r["status"] == "fail")
    errors = sum(1 for r in results if r["status"] == "error")
    report = {
        "tool": {"name": "blocknorm", "version": __version__},
        "seed": opts.seed,
        "options": {"budget": opts.budget, "tol_identity": opts.tol_identity,
                    "tol_chain": opts.tol_chain, "kinds": list(kinds)},
        "config": cfg,
        "jobs": results,
        "summary": {"total": len(results), "passed": passed,
                    "failed": failed, "errors": errors},
        "timing": {"total_seconds": time.perf_counter() - t0},
    }
    code = 0 if failed == 0 and errors == 0 else 1
    return report, code


def strip_timing(report: dict) -> dict:
    """The report minus its timing fields (for byte-wise comparisons)."""
    def walk(node):
        if isinstance(node, dict):
            return {k: walk(v) for k, v in node.items() if k != "timing"}
        if isinstance(node, list):
            return [walk(v) for v in node]
        return node
    return walk(report)


def _write_report(report: dict, out: Optional[str]) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="blocknorm",
        description="Compute block summing norms and run the property checks "
                    "described by a JSON job file.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
            ("validate", "validate a config file and report diagnostics"),
            ("norm", "run the operator sup-norm jobs"),
            ("summing-norm", "run the summing-norm estimation jobs"),
            ("check", "run the property-check jobs"),
            ("witness", "run the incompatibility witness searches")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("config", help="path to the JSON job file")
        if name != "validate":
            p.add_argument("--out", default=None,
                           help="report path (default: stdout)")
            p.add_argument("--seed", type=int, default=None,
                           help=f"master seed (default: ${SEED_ENV} or 0)")
            p.add_argument("--budget", type=int, default=8,
                           help="search budget (restarts) for estimators")
            p.add_argument("--tol-identity", type=float, default=1e-12,
                           help="tolerance for exact arithmetic identities")
            p.add_argument("--tol-chain", type=float, default=1e-9,
                           help="tolerance for float-accumulating chains")
            p.add_argument("--jobs", type=int, default=1,
                           help="number of jobs to run in parallel")
    args = parser.parse_args(argv)

    path = Path(args.config)
    if not path.is_file():
        print(f"error: no such config file: {path}", file=sys.stderr)
        return 2
    try:
        cfg = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        print(f"error: parse error at line {exc.lineno} column {exc.colno}: "
              f"{exc.msg}", file=sys.stderr)
        return 2
    diags = validate_config(cfg, path.parent)
    if args.command == "validate":
        if diags:
            for d in diags:
                print(d, file=sys.stderr)
            return 2
        print("ok")
        return 0
    if diags:
        for d in diags:
            print(d, file=sys.stderr)
        return 2

    seed = args.seed
    if seed is None:
        seed = int(os.environ.get(SEED_ENV, "0"))
    opts = Options(seed=seed, budget=args.budget,
                   tol_identity=args.tol_identity, tol_chain=args.tol_chain,
                   workers=max(1, args.jobs))
    kinds = (args.command,)
    if not any(job["kind"] in kinds for job in cfg["jobs"]):
        print(f"error: the config has no jobs of kind {args.command!r}",
              file=sys.stderr)
        return 2
    report, code = run_config(cfg, path.parent, kinds, opts)
    _write_report(report, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
