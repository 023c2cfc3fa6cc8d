"""Allow running the CLI as ``python -m ambuplan``."""

from .cli import entry

if __name__ == "__main__":
    raise SystemExit(entry())
