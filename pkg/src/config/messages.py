"""
Message templates for standardized user communications
"""

from typing import List


class MessageTemplates:
    """Centralized message templates for consistent user communication."""

    @staticmethod
    def get_unknown_map(name: str, available: List[str]) -> str:
        """Return the error for a missing or unknown map name."""
        shown = f"'{name}'" if name else "(none)"
        return (f"❌ Unknown map {shown}.\n"
                f"Available kernels: {', '.join(available)}\n"
                f"💡 Run 'kernels' to see their parameters.")

    @staticmethod
    def get_seed_rejected() -> str:
        return ("❌ --seed is not accepted: every field, transect and oracle check is deterministic "
                "and bitwise reproducible across worker counts.")

    @staticmethod
    def get_escape_hint() -> str:
        """Return guidance when an orbit overflows without an escape radius."""
        return """
💡 UNBOUNDED ORBITS:

The map sent an orbit to infinity and no escape radius was set.
Pass --escape-radius R to stop accumulating once an iterate leaves the
disk of radius R; such points are flagged as escaped and keep the value
accumulated up to that step.
        """.strip()

    @staticmethod
    def get_no_closed_form(name: str, analytic: List[str]) -> str:
        return (f"❌ No closed form exists for '{name}'.\n"
                f"oracle-check supports: {', '.join(analytic)}")

    @staticmethod
    def get_oracle_failure(max_error: float, tolerance: float) -> str:
        return (f"❌ Direct summation disagrees with the closed form: "
                f"max relative error {max_error:.3e} >= {tolerance:.0e}")
