# src/polarorder/main.py
"""Entry point: `python -m polarorder.main <command> ...`."""
from polarorder.adapters.inbound.cli import app


def main() -> None:
    app()


if __name__ == "__main__":
    main()
