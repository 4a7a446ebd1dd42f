import sys
from typing import TextIO


class Reporter:
    """Console progress in banner style; stdout stays free for JSON"""

    def __init__(self, quiet: bool = False, stream: TextIO = None):
        self.quiet = quiet
        self.stream = stream or sys.stderr

    def _print(self, text: str = ""):
        if not self.quiet:
            print(text, file=self.stream)

    def banner(self, title: str):
        self._print("\n" + "=" * 60)
        self._print(title.upper())
        self._print("=" * 60)

    def step(self, index: int, total: int, message: str):
        self._print("\n" + "─" * 60)
        self._print(f"[{index}/{total}] {message}")
        self._print("─" * 60)

    def ok(self, message: str):
        self._print(f"✅ {message}")

    def warn(self, message: str):
        self._print(f"⚠️  {message}")

    def fail(self, message: str):
        self._print(f"❌ {message}")

    def line(self, message: str = ""):
        self._print(message)
