"""Shared fixtures for the kernel and CLI tests."""
import random
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from kernel import core  # noqa: E402
from kernel.elab import elab_source  # noqa: E402
from kernel.levels import StructureId, to_internal_nf  # noqa: E402

CORPUS = ROOT / "corpus"
ACCEPT_FILES = sorted((CORPUS / "accept").glob("*.ttfl"))
REJECT_FILES = sorted((CORPUS / "reject").glob("*.ttfl"))


@pytest.fixture(params=list(StructureId), ids=lambda sid: sid.value)
def structure_id(request):
    return request.param


@pytest.fixture
def elab():
    """Elaborate source text, defaulting to the nat structure."""

    def run(text, structure_id=StructureId.NAT):
        return elab_source(text, structure_id)

    return run


def random_type(rng: random.Random, structure, depth: int = 0, size: int = 4, type_vars: int = 0) -> core.Term:
    """
    A random type over ``type_vars`` free type variables bound outside ``depth`` binders.

    Variables are the outermost entries of the context; Π codomains never
    mention the Π's own binder.
    """
    choices = ["base", "base", "univ"]
    if size > 0:
        choices += ["pi", "pi"]
    if type_vars:
        choices.append("var")
    pick = rng.choice(choices)
    if pick == "base":
        return rng.choice([core.BoolTy(), core.NatTy(), core.UnitTy(), core.EmptyTy(), core.LvlTy()])
    if pick == "univ":
        levels = structure.enumerate(3)
        lo = rng.randrange(len(levels) - 1)
        hi = rng.randrange(lo + 1, len(levels))
        lo_t, hi_t = to_internal_nf(levels[lo]), to_internal_nf(levels[hi])
        return core.Univ(lo_t, hi_t, core.LtPrim(core.PrimId.LT_DEC, (lo_t, hi_t)))
    if pick == "var":
        which = rng.randrange(type_vars)
        return core.Var(depth + type_vars - 1 - which)
    dom = random_type(rng, structure, depth, size - 1, type_vars)
    cod = random_type(rng, structure, depth + 1, size - 1, type_vars)
    return core.Pi("x", dom, cod)


@pytest.fixture
def rng():
    return random.Random(20240611)
