#!/usr/bin/env python3
"""Render a phase-space trajectory figure: render_phase_space.py <csv> <out.png>"""

import sys


def main(argv):
    if len(argv) != 3:
        sys.stderr.write(__doc__.strip() + "\n")
        return 2
    from levi_figures import FigureJob, SchemaError, render_phase_space
    try:
        out = render_phase_space(FigureJob(inputs=(argv[1],), kind="phase-space",
                                           output=argv[2]))
    except (SchemaError, OSError) as err:
        sys.stderr.write(f"error: {err}\n")
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
