import logging
import sys

import numpy as np

# every decimal written by the package goes through this format
FLOAT_FORMAT = '.17g'

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def format_float(value):
    """
    Formats a float with 17 significant digits.

    17 significant digits are enough to round-trip any IEEE-754 double, so
    files written with this format load back bit-exact on every platform.

    Example
    -------
    >>> format_float(0.1)
    '0.10000000000000001'
    >>> format_float(1.0)
    '1'
    """
    return format(float(value), FLOAT_FORMAT)


def format_table(rows, headers=None):
    """
    Renders rows of cells as text with every column aligned.

    Parameters
    ----------
    rows : sequence of sequences
        Table body. Floats are rendered with ``format_float``, ``None`` as
        ``n/a``, anything else with ``str``.
    headers : sequence of str, optional
        Column titles printed above the body.

    Returns
    -------
    table : str
        The aligned table, one line per row, no trailing newline.

    Notes
    -----
    - Columns are right aligned to the widest cell, so output is identical
      for identical inputs (no locale or terminal dependency).

    Example
    -------
    >>> print(format_table([[0.5, 0.5], [1.0, 1.0]], headers=['mu', 'order4']))
     mu order4
    0.5    0.5
      1      1
    """

    def render(cell):
        if cell is None:
            return 'n/a'
        if isinstance(cell, (float, np.floating)):
            return format_float(cell)
        return str(cell)

    body = [[render(cell) for cell in row] for row in rows]
    if headers is not None:
        body.insert(0, [str(h) for h in headers])
    if not body:
        return ''

    n_cols = max(len(row) for row in body)
    widths = [max((len(row[c]) for row in body if c < len(row)), default=0) for c in range(n_cols)]

    return '\n'.join(' '.join(cell.rjust(widths[c]) for c, cell in enumerate(row)) for row in body)


def configure_logging(verbosity=0, stream=None):
    """
    Configures the root logger for command-line use.

    Parameters
    ----------
    verbosity : int, optional (default=0)
        0 -> WARNING, 1 -> INFO, 2 or more -> DEBUG.
    stream : file-like, optional
        Destination of log records, ``sys.stderr`` by default so stdout only
        carries results.
    """
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = logging.WARNING

    logging.basicConfig(level=level, format=LOG_FORMAT,
                        stream=sys.stderr if stream is None else stream, force=True)
