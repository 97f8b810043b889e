from typing import Dict, List, Optional, Sequence

import numpy as np
from tabulate import tabulate

from .grid_engine import FieldResult


class SummaryGenerator:
    """Generates concise CLI summaries of field, transect and oracle runs"""

    @staticmethod
    def format_duration(seconds: float) -> str:
        if seconds < 1.0:
            return f"{seconds * 1000:.0f} ms"
        if seconds < 60.0:
            return f"{seconds:.2f} s"
        minutes, rest = divmod(seconds, 60.0)
        return f"{int(minutes)}m {rest:.0f}s"

    def field_statistics(self, field: FieldResult) -> Dict[str, float]:
        kept = field.non_escaped_values()
        if kept.size == 0:
            kept = field.values.ravel()
        return {
            'min': float(np.min(kept)),
            'max': float(np.max(kept)),
            'median': float(np.median(kept)),
            'escape_fraction': field.escape_fraction,
            'wall_time': field.wall_time,
        }

    def generate_field_summary(self, field: FieldResult, outputs: Optional[Sequence[str]] = None) -> str:
        """Generate summary for CLI output"""
        stats = self.field_statistics(field)
        grid = field.grid
        rows = [
            ["Kernel", field.kernel_name],
            ["Grid", f"{grid.nx} x {grid.ny} on [{grid.xmin:g}, {grid.xmax:g}] x [{grid.ymin:g}, {grid.ymax:g}]"],
            ["p / N / n0", f"{field.params.p:g} / {field.params.N} / {field.params.n0}"],
            ["Min MD", f"{stats['min']:.6g}"],
            ["Max MD", f"{stats['max']:.6g}"],
            ["Median MD", f"{stats['median']:.6g}"],
            ["Escaped", f"{stats['escape_fraction']:.2%}"],
            ["Wall time", self.format_duration(stats['wall_time'])],
        ]
        output = "\n" + "=" * 60 + "\n"
        output += "DESCRIPTOR FIELD SUMMARY\n"
        output += "=" * 60 + "\n"
        output += tabulate(rows, tablefmt="plain") + "\n"
        if outputs:
            output += "\nWritten:\n"
            for path in outputs:
                output += f"   {path}\n"
        return output

    def generate_transect_summary(self, report, output: Optional[str] = None) -> str:
        headers = ["#", "Position", "|dMD/ds|", "Exponent"]
        rows: List[List[str]] = []
        for idx, crossing in enumerate(report.crossings, 1):
            rows.append([idx, f"{crossing.position:.6g}", f"{crossing.derivative_magnitude:.4g}",
                         f"{crossing.refinement_exponent:.3f}"])
        text = f"\nTransect: {len(report.positions)} samples, {int(np.sum(report.escaped))} escaped\n"
        if rows:
            text += tabulate(rows, headers=headers, tablefmt="simple") + "\n"
        else:
            text += "No singular crossings detected\n"
        if output:
            text += f"\nWritten: {output}\n"
        return text

    def generate_oracle_summary(self, kernel_name: str, max_error: float, tolerance: float,
                                count: int) -> str:
        status = "PASS" if max_error < tolerance else "FAIL"
        rows = [
            ["Kernel", kernel_name],
            ["Points", count],
            ["Max relative error", f"{max_error:.3e}"],
            ["Tolerance", f"{tolerance:.0e}"],
            ["Status", status],
        ]
        return "\n" + tabulate(rows, tablefmt="plain") + "\n"
