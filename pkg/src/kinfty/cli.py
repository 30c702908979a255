"""Command-line front end.

Exit codes: 0 success, 1 a check ran and the property is false, 2 bad input,
3 semantic error (unbound variable, truncation overflow, ...).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import hpo, simplicial
from .hpo import DomainError, WeakDomain
from .lambda_ import (EXAMPLE_TERM, Interpreter, TermSyntaxError, UnboundVariable,
                      example_4_1, parse, parse_env)
from .simplicial import ComplexError, FiniteComplex, KanCheckAborted
from .tower import Tower, TowerConfig, TruncationOverflow

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SEMANTIC = 0, 1, 2, 3


class InputError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    inputs_digest: str
    verdicts: dict[str, str] = field(default_factory=dict)
    witnesses: dict[str, str] = field(default_factory=dict)
    details: dict[str, str] = field(default_factory=dict)
    timing: float = 0.0
    exit_code: int = EXIT_OK

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls(**json.loads(text))

    def render(self) -> str:
        lines = [f"{self.command}  [{self.inputs_digest[:12]}]"]
        for k, v in self.details.items():
            lines.append(f"  {k}: {v}")
        for k, v in self.verdicts.items():
            w = self.witnesses.get(k)
            lines.append(f"  {k}: {v}" + (f"  (witness: {w})" if w else ""))
        lines.append(f"  time: {self.timing:.3f}s")
        return "\n".join(lines)


def digest(*parts: str) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(p.encode())
        h.update(b"\0")
    return h.hexdigest()


# -- loading objects ------------------------------------------------------------

def _int_args(spec: str, parts: list[str], count: int) -> list[int]:
    if len(parts) != count or not all(p.isdigit() for p in parts):
        raise InputError(f"malformed builtin {spec!r}")
    return [int(p) for p in parts]


def load_complex(spec: str) -> FiniteComplex:
    head, *rest = spec.split(":")
    if head == "delta":
        (n,) = _int_args(spec, rest, 1)
        return simplicial.standard_simplex(n)
    if head == "boundary":
        (n,) = _int_args(spec, rest, 1)
        return simplicial.boundary_complex(n)
    if head == "horn":
        n, i = _int_args(spec, rest, 2)
        if not 0 <= i <= n:
            raise InputError(f"horn index {i} out of range for dimension {n}")
        return simplicial.horn_complex(n, i)
    if head in ("nplus", "chain", "butterfly"):
        return load_domain(spec).carrier
    text = _read(spec)
    extra: list[tuple[int, str]] = []
    try:
        X = simplicial.parse_complex(text, extra=extra)
    except ComplexError as exc:
        raise InputError(f"{spec}: {exc}") from exc
    # a domain file is also a complex; only its order and bottom lines are skipped
    for lineno, line in extra:
        if line.split(None, 1)[0] not in ("order", "bottom"):
            raise InputError(f"{spec}: line {lineno}: unrecognised line {line!r}")
    return X


def load_domain(spec: str) -> WeakDomain:
    head, *rest = spec.split(":")
    if head == "nplus":
        (d,) = _int_args(spec, rest, 1)
        return hpo.build_N_plus(d)
    if head == "chain":
        (n,) = _int_args(spec, rest, 1)
        return hpo.chain(n)
    if head == "butterfly":
        if rest not in ([], ["nobottom"]):
            raise InputError(f"malformed builtin {spec!r}")
        return hpo.butterfly(with_bottom=not rest)
    text = _read(spec)
    try:
        return hpo.parse_domain(text)
    except (ComplexError, DomainError) as exc:
        raise InputError(f"{spec}: {exc}") from exc


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path!r}: {exc.strerror}") from exc


def load_config(path: str | None, *, rep: str | None = None) -> TowerConfig:
    """``K0 = nplus(d)`` or a domain file, ``N = int``, ``rep = identity | example41``."""
    values = {"K0": "nplus(2)", "N": "3", "rep": "identity"}
    if path:
        for lineno, raw in enumerate(_read(path).splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = (s.strip() for s in line.partition("="))
            if not sep or key not in values:
                raise InputError(f"{path}:{lineno}: expected 'K0 = ...', 'N = ...' or 'rep = ...'")
            values[key] = val
    if rep is not None:
        values["rep"] = rep
    k0 = values["K0"]
    if k0.startswith("nplus(") and k0.endswith(")"):
        k0 = "nplus:" + k0[6:-1]
    if not values["N"].isdigit():
        raise InputError(f"N must be a non-negative integer, got {values['N']!r}")
    if values["rep"] not in ("identity", "example41"):
        raise InputError(f"rep must be identity or example41, got {values['rep']!r}")
    try:
        return TowerConfig(K0=load_domain(k0), N=int(values["N"]), rep=values["rep"])
    except DomainError as exc:
        raise InputError(str(exc)) from exc


# -- commands --------------------------------------------------------------------

def cmd_kan_check(args) -> RunReport:
    X = load_complex(args.object)
    rep = RunReport("kan-check", digest(args.object, str(args.dim), str(args.inner)))
    try:
        report = simplicial.kan_check(X, args.dim, inner_only=args.inner)
    except ComplexError as exc:
        raise InputError(str(exc)) from exc
    key = "inner horns" if args.inner else "kan"
    rep.verdicts[key] = "pass" if report.passed else "fail"
    if report.witness is not None:
        rep.witnesses[key] = str(report.witness)
    rep.details["f-vector"] = str(X.f_vector())
    rep.details["horns checked"] = str(report.checked)
    rep.exit_code = EXIT_OK if report.passed else EXIT_FAIL
    return rep


def cmd_domain_check(args) -> RunReport:
    K = load_domain(args.object)
    rep = RunReport("domain-check", digest(args.object))
    ok = True
    for r in hpo.is_homotopy_scott_domain(K):
        rep.verdicts[r.name] = "pass" if r.passed else "fail"
        if not r.passed:
            rep.witnesses[r.name] = r.failures[0] if r.failures else ""
            ok = False
    rep.details["vertices"] = str(len(K.vertices))
    rep.details["classes"] = str(len(K.elements()))
    rep.verdicts["Homotopy Scott Domain (finite witness)"] = "yes" if ok else "no"
    rep.exit_code = EXIT_OK if ok else EXIT_FAIL
    return rep


def _render_element(T: Tower, x) -> dict[str, str]:
    out = {"value": str(x)}
    for m, c in enumerate(T.components(x)):
        out[f"level {m}"] = str(c)
    return out


def cmd_interpret(args) -> RunReport:
    cfg = load_config(args.config)
    T = Tower(cfg)
    try:
        term = parse(args.term)
    except TermSyntaxError as exc:
        raise InputError(f"{args.term!r}: {exc}") from exc
    try:
        env = parse_env(args.env or "", T)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    rep = RunReport("interpret", digest(args.term, args.env or "", _config_text(cfg)))
    value = Interpreter(T)(term, env)
    rep.details["term"] = str(term)
    rep.details.update(_render_element(T, value))
    rep.verdicts["interpreted"] = "yes"
    return rep


def _config_text(cfg: TowerConfig) -> str:
    return f"{hpo.dump_domain(cfg.K0)}N={cfg.N}\nrep={cfg.rep}"


def cmd_example(args) -> RunReport:
    cfg = load_config(args.config, rep=args.rep or ("example41" if not args.config else None))
    run = example_4_1(cfg)
    T = run.tower
    rep = RunReport("example-4-1", digest(_config_text(cfg)))
    rep.details["rep"] = str(cfg.rep)
    rep.details["a"] = str(run.a)
    rep.details["b"] = str(run.b)
    rep.details["h(k(a))"] = str(run.hk_a)
    rep.details["h(k(a)) components"] = ", ".join(map(str, T.components(run.hk_a)))
    rep.details[f"[[{EXAMPLE_TERM}]]"] = str(run.value)
    rep.details["beta edge class"] = str(run.beta.path)
    rep.details["eta edge class"] = str(run.eta.path)
    if run.comparison.loop is not None:
        rep.details["loop"] = str(run.comparison.loop)
    rep.details["class vector"] = str(run.comparison.vector)
    for k, v in run.stable.items():
        rep.details[f"stable {k}"] = "n/a" if v is None else str(v)
    if T.equiv(run.hk_a, run.a):
        rep.details["note"] = ("h(k(a)) ≃ a under this rep; the published computation "
                               "needs rep=example41")
    rep.verdicts["verdict"] = run.comparison.verdict.value
    return rep


def cmd_tower_info(args) -> RunReport:
    cfg = load_config(args.config)
    T = Tower(cfg)
    rep = RunReport("tower-info", digest(_config_text(cfg)))
    rep.details["K0 vertices"] = str(len(cfg.K0.vertices))
    rep.details["N"] = str(cfg.N)
    rep.details["rep"] = str(cfg.rep)
    size = len(T.basis(0))
    for n in range(cfg.N + 1):
        rep.details[f"step basis level {n}"] = str(size)
        size = 1 + size * (size - 1)
    if args.dim is not None:
        r = T.check_projection_laws(args.dim)
        rep.verdicts[f"projection laws level {args.dim}"] = "pass" if r.passed else "fail"
        if r.witness:
            rep.witnesses[f"projection laws level {args.dim}"] = r.witness
        rep.exit_code = EXIT_OK if r.passed else EXIT_FAIL
    return rep


COMMANDS = {
    "kan-check": cmd_kan_check,
    "domain-check": cmd_domain_check,
    "interpret": cmd_interpret,
    "example-4-1": cmd_example,
    "tower-info": cmd_tower_info,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kinfty", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="print a JSON report")
        return sp

    sp = common(sub.add_parser("kan-check", help="fill horns up to a dimension"))
    sp.add_argument("object", help="file, or delta:n, boundary:n, horn:n:i, nplus:d")
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--inner", action="store_true", help="inner horns only")

    sp = common(sub.add_parser("domain-check", help="Homotopy Scott Domain predicates"))
    sp.add_argument("object", help="file, or nplus:d, chain:n, butterfly[:nobottom]")

    sp = common(sub.add_parser("interpret", help="interpret a λ-term in K∞"))
    sp.add_argument("term")
    sp.add_argument("--env", default="", help="x=vertex,... or example41")
    sp.add_argument("--config")

    sp = common(sub.add_parser("example-4-1", help="β versus η on (λz.xz)y"))
    sp.add_argument("--config")
    sp.add_argument("--rep", choices=["identity", "example41"])

    sp = common(sub.add_parser("tower-info", help="tower sizes and projection laws"))
    sp.add_argument("--config")
    sp.add_argument("--dim", type=int, help="check the projection laws at this level")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    start = time.perf_counter()
    try:
        rep = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TruncationOverflow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC
    except (UnboundVariable, DomainError, ComplexError, KanCheckAborted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC
    rep.timing = time.perf_counter() - start
    print(rep.to_json() if args.json else rep.render())
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
