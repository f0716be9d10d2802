"""Compare the pure-Python and compiled rewrite-search kernels.

Run as ``python -m engeler.benchmark``.  The workload is fixed and
deterministic: bounded reachability probes drawn from the identity
search (term applied to a fresh variable, target the variable) plus a
block of term-to-term searches over small K/S terms.  Both kernels see
identical inputs; the report shows wall time per block and checks that
the answers agree.
"""

from __future__ import annotations

import sys
import time

from .rewrite import BACKEND, _reduces_to_py, _to_tuples
from .terms import App, app, enumerate_s_terms, enumerate_terms, parse_term, var

try:
    from . import _reduction as _kernel
except ImportError:
    _kernel = None


def _workload():
    x = var(0)
    probes = []
    for t in enumerate_s_terms(6):
        probes.append((App(t, x), x, 60, 400))
    ks = list(enumerate_terms(4, alphabet=("K", "S")))
    for i, t in enumerate(ks):
        target = ks[(i * 7 + 3) % len(ks)]
        probes.append((t, target, 12, 300))
    probes.append((parse_term("SK(SKSK)"), parse_term("SKK"), 50, 10_000))
    # exploding searches: wide frontiers of duplicating S redexes
    probes.append((parse_term("S(SS)S(SSS)(SS)x"), x, 16, 20_000))
    probes.append((parse_term("S(SS)(SS)(S(SS))x"), x, 13, 20_000))
    return probes


def _run(fn, probes):
    t0 = time.time()
    answers = [fn(x, y, fuel, width) for x, y, fuel, width in probes]
    return answers, time.time() - t0


def main(argv=None) -> int:
    probes = _workload()
    print(f"{len(probes)} probes; import-time backend is {BACKEND!r}")

    py_answers, py_time = _run(
        lambda x, y, f, w: _reduces_to_py(x, y, f, w), probes
    )
    print(f"pure python : {py_time:8.3f}s  ({sum(py_answers)} reachable)")

    if _kernel is None:
        print("compiled    : not built (pip install -e . rebuilds it when "
              "cython and a c++ toolchain are present)")
        return 0

    c_answers, c_time = _run(
        lambda x, y, f, w: bool(
            _kernel.reaches(_to_tuples(x), _to_tuples(y), f, w)
        ),
        probes,
    )
    print(f"compiled    : {c_time:8.3f}s  ({sum(c_answers)} reachable)")

    if c_answers != py_answers:
        diverging = [
            i for i, (a, b) in enumerate(zip(py_answers, c_answers)) if a != b
        ]
        print(f"MISMATCH on probes {diverging}")
        return 1
    speedup = py_time / c_time if c_time > 0 else float("inf")
    print(f"agreement on all probes; speedup {speedup:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
