"""
Terminal UI Components
ASCII banner, color-coded messages, progress bars and result tables
"""

from typing import Dict, Iterable, Optional, Sequence, Tuple

from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, BarColumn, TextColumn, TimeElapsedColumn
from rich.table import Table
from rich.text import Text
from rich import box
import pyfiglet
from colorama import init as colorama_init

from .config import Config

# Initialize colorama for cross-platform color support (Windows compatibility)
colorama_init(autoreset=True)


class UI:
    """Terminal UI manager; diagnostics go to stderr"""

    def __init__(self, quiet: bool = False):
        """
        Initialize UI components
        :param quiet: Suppress info/success chatter
        """
        self.console = Console()
        self.err_console = Console(stderr=True)
        self.quiet = quiet
        self.progress: Optional[Progress] = None

    def show_banner(self, version: str):
        """
        Display ASCII art banner with tool info
        :param version: Tool version number
        """
        ascii_art = pyfiglet.figlet_format("VoxelLink", font=Config.BANNER_FONT)

        banner_text = Text()
        banner_text.append(ascii_art, style="bold cyan")
        banner_text.append(f"\n  VoxelLink v{version}\n", style="bold white")
        banner_text.append("  Multi-Resolution Sparse Voxel Grids for Collective Perception\n", style="dim white")
        banner_text.append("  Commands: voxelize | bandwidth | forward | simulate | bench | golden\n", style="yellow")

        panel = Panel(banner_text, box=box.DOUBLE, border_style="cyan", padding=(1, 2))
        self.console.print(panel)
        self.console.print()

    def print_info(self, message: str):
        """Print info message (cyan)"""
        if not self.quiet:
            self.console.print(f"[cyan][INFO][/cyan] {message}", highlight=False)

    def print_success(self, message: str):
        """Print success message (green)"""
        if not self.quiet:
            self.console.print(f"[green][SUCCESS][/green] {message}", highlight=False)

    def print_warning(self, message: str):
        self.err_console.print(f"[yellow][WARNING][/yellow] {message}", highlight=False)

    def print_error(self, message: str):
        self.err_console.print(f"[red][ERROR][/red] {message}", highlight=False)

    def create_progress_bar(self) -> Progress:
        """
        Create animated progress bar for long runs
        :return: Progress object
        """
        self.progress = Progress(
            SpinnerColumn(spinner_name="dots"),
            TextColumn("[bold cyan]{task.description}"),
            BarColumn(complete_style="green", finished_style="bold green"),
            TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
            TimeElapsedColumn(),
            console=self.console,
            disable=self.quiet,
        )
        return self.progress

    def show_summary(self, title: str, rows: Dict[str, object], alert: bool = False):
        """
        Display key/value results in a panel
        :param title: Panel title
        :param rows: Ordered key -> value
        :param alert: Red border instead of cyan
        """
        table = Table(show_header=False, box=box.SIMPLE, padding=(0, 2))
        table.add_column("Key", style="bold cyan")
        table.add_column("Value", style="white")
        for key, value in rows.items():
            table.add_row(str(key), str(value))

        panel = Panel(
            table,
            title=f"[bold white]{title}[/bold white]",
            border_style="red" if alert else "cyan",
            box=box.ROUNDED,
        )
        self.console.print()
        self.console.print(panel)

    def show_table(self, title: str, columns: Sequence[str], rows: Iterable[Sequence[object]]):
        """
        Display rows in a formatted table; the first column is highlighted
        :param title: Table title
        :param columns: Column headers
        :param rows: Row values
        """
        table = Table(title=f"[bold cyan]{title}[/bold cyan]", box=box.ROUNDED, border_style="cyan")
        for i, column in enumerate(columns):
            if i == 0:
                table.add_column(column, style="bold yellow", no_wrap=True)
            else:
                table.add_column(column, style="white", justify="right")
        for row in rows:
            table.add_row(*(str(v) for v in row))
        self.console.print()
        self.console.print(table)

    def show_bandwidth_table(self, rows: Iterable[Tuple[str, int, str]], mean: Optional[str] = None):
        """
        Bandwidth per input, truncated to one decimal
        :param rows: (label, frame bytes, displayed Mbit/s)
        :param mean: Displayed mean over all inputs
        """
        rows = list(rows)
        if mean is not None and len(rows) > 1:
            rows.append(("mean", "", mean))
        self.show_table("Bandwidth", ("Input", "Bytes", "Mbit/s"), rows)
