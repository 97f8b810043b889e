from datetime import datetime
from typing import Any, Dict, List, Optional

from rich.console import Console
from rich.progress import BarColumn, Progress, TextColumn, TimeElapsedColumn


class ProgressTracker:
    """Track and display progress of row-chunk evaluation"""

    def __init__(self, total_chunks: int, console: Optional[Console] = None, description: str = "Evaluating"):
        self.total_chunks = total_chunks
        self.completed_chunks = 0
        self.start_time = datetime.now()
        self.chunk_details: List[Dict[str, Any]] = []
        self._progress: Optional[Progress] = None
        self._task = None
        if console is not None:
            self._progress = Progress(
                TextColumn("[bold cyan]{task.description}"),
                BarColumn(),
                TextColumn("{task.completed}/{task.total} chunks"),
                TimeElapsedColumn(),
                console=console,
                transient=True,
            )
            self._task = self._progress.add_task(description, total=total_chunks)

    def __enter__(self) -> 'ProgressTracker':
        if self._progress is not None:
            self._progress.start()
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        if self._progress is not None:
            self._progress.stop()

    def complete_chunk(self, first_row: int, last_row: int, duration: float) -> None:
        """Record a finished chunk of rows [first_row, last_row)."""
        self.completed_chunks += 1
        self.chunk_details.append({
            'chunk': self.completed_chunks,
            'rows': (first_row, last_row),
            'duration': duration,
        })
        if self._progress is not None:
            self._progress.advance(self._task)

    def get_summary(self) -> Dict[str, Any]:
        """Get summary of all chunks"""
        total_duration = (datetime.now() - self.start_time).total_seconds()
        durations = [c['duration'] for c in self.chunk_details]
        return {
            'total_duration': total_duration,
            'total_chunks': self.total_chunks,
            'completed_chunks': self.completed_chunks,
            'slowest_chunk': max(durations) if durations else 0.0,
            'chunk_details': self.chunk_details,
        }
