import logging
import os

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from .errors import ValidationError
from .minkowskiLoss import as_loss_order, transform_posteriors
from .utils import format_table

logger = logging.getLogger(__name__)


def correspondence_table(orders, grid_points=101):
    """
    Tabulates the transformed posterior of each order over a uniform grid.

    Parameters
    ----------
    orders : sequence of int
        Even loss orders, one column each.
    grid_points : int, optional (default=101)
        Number of posteriors on [0, 1], endpoints included, at least 2.

    Returns
    -------
    table : numpy.ndarray
        grid_points x (1 + len(orders)) array; column 0 is mu, then one
        column per order with transform(mu).

    Example
    -------
    >>> correspondence_table([4], grid_points=3)
    array([[0. , 0. ],
           [0.5, 0.5],
           [1. , 1. ]])
    """
    orders = [as_loss_order(o) for o in orders]
    if not orders:
        raise ValidationError("at least one order is needed")
    if int(grid_points) != grid_points or grid_points < 2:
        raise ValidationError(f"grid_points must be an integer >= 2, got {grid_points!r}")

    mu = np.linspace(0.0, 1.0, int(grid_points))
    columns = [mu] + [transform_posteriors(mu, order) for order in orders]
    return np.column_stack(columns)


def format_correspondence(table, orders):
    """Renders a correspondence table with a ``mu order<k> ...`` header."""
    headers = ['mu'] + [f'order{as_loss_order(o).value}' for o in orders]
    return format_table(table.tolist(), headers=headers)


def plot_correspondence(table, orders, save_path=None, filename='correspondence.svg'):
    """
    Plots transformed posteriors against the order-2 posterior.

    Parameters
    ----------
    table : numpy.ndarray
        Output of ``correspondence_table``.
    orders : sequence of int
        Orders of the table columns, used in the legend.
    save_path : str, optional
        Directory where the chart is saved. If None, nothing is written.
    filename : str, optional (default='correspondence.svg')
        File name inside ``save_path``; the extension picks the format.

    Returns
    -------
    file_path : str or None
        Where the chart was written.
    """
    # pyplot-free figure, renders headless
    fig = Figure(figsize=(6, 6))
    ax = fig.subplots()
    mu = table[:, 0]
    ax.plot(mu, mu, color='grey', linestyle=':', linewidth=1.0, label='order 2')
    for c, order in enumerate(orders, start=1):
        value = as_loss_order(order).value
        if value == 2:
            continue
        ax.plot(mu, table[:, c], linewidth=1.5, label=f'order {value}')

    ax.set_title('Correspondence between order-2 and higher-order posteriors')
    ax.set_xlabel('order-2 posterior')
    ax.set_ylabel('transformed posterior')
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.0)
    ax.grid(True)
    ax.legend()

    file_path = None
    if save_path is not None:
        os.makedirs(save_path, exist_ok=True)
        file_path = os.path.join(save_path, filename)
        # fixed salt and no timestamp: identical data gives identical SVG bytes
        with matplotlib.rc_context({'svg.hashsalt': 'minkPostPack'}):
            fig.savefig(file_path, metadata={'Date': None} if file_path.endswith('.svg') else None)
        logger.info("chart saved to %s", file_path)
    return file_path
