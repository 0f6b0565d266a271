"""
Markdown report builder
"""

from typing import Iterable, List, Sequence

from config.settings import APP_NAME, APP_VERSION, DSIGMA_NOTE, ONE_SIDED_CAVEAT


class ReportWriter:
    """Builds a markdown document section by section"""

    def __init__(self, title: str):
        self.lines: List[str] = []
        self.add_heading(title, 1)
        self.add_paragraph(f"Generated by {APP_NAME} {APP_VERSION}.")

    def add_heading(self, text: str, level: int = 2):
        self.lines.extend([f"{'#' * level} {text}", ""])

    def add_paragraph(self, text: str):
        self.lines.extend([text, ""])

    def add_bullets(self, items: Iterable[str]):
        self.lines.extend(f"- {item}" for item in items)
        self.lines.append("")

    def add_table(self, columns: Sequence[str], rows: Iterable[Sequence]):
        """Pipe table; None cells are rendered as empty"""
        self.lines.append("| " + " | ".join(columns) + " |")
        self.lines.append("|" + "|".join("---" for _ in columns) + "|")
        for row in rows:
            cells = ["" if cell is None else str(cell) for cell in row]
            self.lines.append("| " + " | ".join(cells) + " |")
        self.lines.append("")

    def add_conventions(self):
        """The boundary-measure convention and the LP caveat"""
        self.add_heading("Conventions")
        self.add_paragraph(DSIGMA_NOTE)
        self.add_paragraph(ONE_SIDED_CAVEAT)

    def create_document(self) -> str:
        return "\n".join(self.lines).rstrip("\n") + "\n"
