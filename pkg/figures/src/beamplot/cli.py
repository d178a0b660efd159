"""Command-line entry point: ``beamsim-plot <figure-spec>``."""

from __future__ import annotations

import argparse
import sys

from .render import RenderError, render
from .spec import FigureSpecError, load_figure_spec


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="beamsim-plot",
        description="Render SINR-versus-snapshot figures from benchmark CSVs",
    )
    parser.add_argument("figure_spec", help="TOML figure description")
    args = parser.parse_args(argv)
    try:
        spec = load_figure_spec(args.figure_spec)
        output = render(spec)
    except (FigureSpecError, RenderError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
