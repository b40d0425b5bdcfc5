"""
Report Generation Module
key=value text reports, JSON summaries and per-frame tables
"""

import csv
import json
import os
from typing import Any, Dict, Iterable, Optional, Sequence

from .ui import UI


class Reporter:
    """Report generator for simulation and benchmark results"""

    def __init__(self, ui: Optional[UI] = None):
        """
        Initialize reporter
        :param ui: UI instance for terminal output
        """
        self.ui = ui or UI()

    def generate_report(self, summary: Dict[str, Any], output_path: str, format: str = "txt",
                        frames: Optional[Sequence[Dict[str, Any]]] = None) -> str:
        """
        Write a report; contents are deterministic (no timestamps or timings)
        :param summary: Flat key -> value summary
        :param output_path: Report save path
        :param format: txt (key=value lines) or json
        :param frames: Optional per-frame rows, written as a tab-separated table next to a txt report
        :return: Path written
        """
        dir_path = os.path.dirname(output_path)
        if dir_path:
            os.makedirs(dir_path, exist_ok=True)

        if format.lower() == "json":
            self._generate_json_report(summary, frames, output_path)
        elif format.lower() == "txt":
            self._generate_text_report(summary, output_path)
            if frames:
                self._generate_frame_table(frames, os.path.splitext(output_path)[0] + ".tsv")
        else:
            raise ValueError(f"Unsupported report format: {format} (supported: txt/json)")
        return output_path

    @staticmethod
    def format_text(summary: Dict[str, Any]) -> str:
        return "".join(f"{key}={value}\n" for key, value in summary.items())

    def _generate_text_report(self, summary: Dict[str, Any], output_path: str) -> None:
        with open(output_path, "w", encoding="utf-8") as f:
            f.write(self.format_text(summary))
        self.ui.print_success(f"Text report saved to {output_path}")

    def _generate_json_report(self, summary: Dict[str, Any], frames: Optional[Iterable[Dict[str, Any]]],
                              output_path: str) -> None:
        report = {"summary": summary}
        if frames is not None:
            report["frames"] = list(frames)
        with open(output_path, "w", encoding="utf-8") as f:
            json.dump(report, f, indent=4, ensure_ascii=False)
        self.ui.print_success(f"JSON report saved to {output_path}")

    def _generate_frame_table(self, frames: Sequence[Dict[str, Any]], output_path: str) -> None:
        columns = list(frames[0])
        with open(output_path, "w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=columns, delimiter="\t", lineterminator="\n")
            writer.writeheader()
            writer.writerows(frames)
        self.ui.print_success(f"Frame table saved to {output_path}")
