"""Kernel package: levels, core terms and normalisation.

Elaboration lives in ``kernel.elab`` and is imported directly, since it
depends on the surface syntax package.
"""
from . import core
from .levels import Level, LevelError, LevelStructure, StructureId, bootstrap, get_structure
from .nbe import KernelBug, Normalizer, normalizer_for

__all__ = [
    "core",
    "Level",
    "LevelError",
    "LevelStructure",
    "StructureId",
    "bootstrap",
    "get_structure",
    "KernelBug",
    "Normalizer",
    "normalizer_for",
]
