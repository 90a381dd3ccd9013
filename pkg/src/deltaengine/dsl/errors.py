"""Exceptions shared across the language toolchain."""

from __future__ import annotations

from typing import TYPE_CHECKING, Sequence

if TYPE_CHECKING:
    from .ast import Diagnostic


class ParseError(Exception):
    """Grammar violation. Carries one Diagnostic with the offending span."""

    def __init__(self, diagnostic: "Diagnostic"):
        super().__init__(str(diagnostic))
        self.diagnostic = diagnostic


class ValidationError(Exception):
    """Well-formed syntax that breaks a language rule (unknown identifier,
    duplicate method, bad call target, dangling method...)."""

    def __init__(self, diagnostics: Sequence["Diagnostic"]):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = list(diagnostics)
