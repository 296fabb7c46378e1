"""Python bindings for the additive prime tree laboratory."""

import json
from fractions import Fraction

from . import _core

__all__ = ["expand", "tree_stats", "is_finite_type", "search_certificate", "check_certificate",
           "certificate_diagnostic", "c_rational", "reduce", "oracle_check", "run_cli"]


def _csv(values):
    return values if isinstance(values, str) else ",".join(str(v) for v in values)


def expand(primes, root, node_cap=1_000_000, depth_cap=10_000):
    return json.loads(_core.expand_json(_csv(primes), _csv(root), node_cap, depth_cap))


def tree_stats(primes, root):
    return _core.tree_stats(_csv(primes), _csv(root))


def is_finite_type(primes):
    return _core.is_finite_type(_csv(primes))


def search_certificate(primes, root, depth=40, node_cap=5_000_000):
    return json.loads(_core.search_certificate_json(_csv(primes), _csv(root), depth, node_cap))


def check_certificate(cert):
    return _core.check_certificate_json(json.dumps(cert))[0]


def certificate_diagnostic(cert):
    return _core.check_certificate_json(json.dumps(cert))[1]


def c_rational(primes):
    num, den = _core.c_rational(_csv(primes))
    return Fraction(int(num), int(den))


def reduce(k, N, primes, j, u, v):
    return json.loads(_core.reduce_json(k, N, _csv(primes), j, u, v))


def oracle_check(k, N, primes, trials):
    return _core.oracle_check(k, N, _csv(primes), trials)


def run_cli(args):
    return _core.run_cli([str(a) for a in args])
