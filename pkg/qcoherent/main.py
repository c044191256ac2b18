"""
main.py — console entry point.

    python -m qcoherent.main qnum --sequence symmetric --theta 0.5235987756 --n 3

Command output goes to stdout (or --output); logs go to stderr.
"""
import logging
import sys

from qcoherent.cli.commands import dispatch
from qcoherent.config import settings


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
    )
    return dispatch(argv)


if __name__ == "__main__":
    sys.exit(main())
