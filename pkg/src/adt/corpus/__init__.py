"""Bundled example derivations."""

from __future__ import annotations

from importlib import resources

from ..algebra import builtin_signature
from ..schemes import Derivation, parse_derivation

SIGNATURE_OF = {
    "add": "N", "mult": "N", "pred": "N", "fact": "N", "fib": "N", "max": "N",
    "double": "N", "square": "N", "monus": "N", "iszero": "N",
    "isqrt": "N", "half": "N", "nohalf": "N",
    "exp_series": "Id", "exp_fast": "Id",
}

PR_CORPUS = ("add", "mult", "pred", "fact", "fib", "max", "double", "square", "monus", "iszero")
MU_CORPUS = ("isqrt", "half")


def text(name: str) -> str:
    return resources.files(__name__).joinpath(f"{name}.der").read_text()


def load(name: str) -> Derivation:
    return parse_derivation(builtin_signature(SIGNATURE_OF[name]), text(name))


def path(name: str) -> str:
    return str(resources.files(__name__).joinpath(name))


# Largest natural sampled per derivation.  Unary arithmetic makes fact and fib
# explode long before the default bound of 32.
SAMPLE_NAT_MAX = {"fact": 6, "fib": 14, "square": 20}


def nat_max(name: str, default: int = 32) -> int:
    return SAMPLE_NAT_MAX.get(name, default)
