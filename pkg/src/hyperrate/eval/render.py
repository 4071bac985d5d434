# Copyright 2024 The hyperrate Authors

from typing import Sequence

import matplotlib.pyplot as plt

from matplotlib.axes import Axes

from hyperrate.codec.constants import LUT_SCALE


def setup_axis(xlabel: str = None,
               ylabel: str = None,
               title: str = None,
               ax: Axes = None,
               show_spines: str = 'bottomleft') -> Axes:
    """
    Helper method that sets up the axis for a plot.
    :param xlabel: x label text.
    :param ylabel: y label text.
    :param title: Axis title.
    :param ax: (optional) an existing axis to be modified.
    :param show_spines: Whether to show axes spines: 'bottomleft', 'none' or 'all'.
    :return: The axes object.
    """
    if ax is None:
        ax = plt.subplot()

    ax.get_xaxis().tick_bottom()
    ax.tick_params(labelsize=12)
    ax.get_yaxis().tick_left()

    if show_spines in ['bottomleft', 'none']:
        ax.spines['top'].set_visible(False)
        ax.spines['right'].set_visible(False)

        if show_spines == 'none':
            ax.spines['bottom'].set_visible(False)
            ax.spines['left'].set_visible(False)
    elif show_spines != 'all':
        raise NotImplementedError

    if title is not None:
        ax.set_title(title, size=16)
    if xlabel is not None:
        ax.set_xlabel(xlabel, size=12)
    if ylabel is not None:
        ax.set_ylabel(ylabel, size=12)
    return ax


def plot_trace(trace: Sequence, samples_per_line: int, savepath: str = None) -> None:
    """
    Plots the step size and the achieved rate of every line against the working target.
    :param trace: LineRecord of every line.
    :param samples_per_line: Samples in a line, converts line bits to bits per sample.
    :param savepath: If given, saves the rendering here instead of displaying.
    """
    lines = [r.line for r in trace]
    _, (ax_q, ax_rate) = plt.subplots(2, 1, figsize=(9, 7), sharex=True)

    setup_axis(ylabel='Q', title='Rate control trace', ax=ax_q)
    ax_q.step(lines, [r.q for r in trace], where='post', color='tab:blue')

    setup_axis(xlabel='Line', ylabel='bits / sample', ax=ax_rate)
    ax_rate.plot(lines, [r.actual_bits / samples_per_line for r in trace], label='Achieved')
    ax_rate.plot(lines, [r.r_target / LUT_SCALE for r in trace], linestyle='--',
                 label='Target')
    ax_rate.legend(loc='best')

    plt.tight_layout()
    if savepath is not None:
        plt.savefig(savepath)
        plt.close()


def rate_accuracy_plot(results: Sequence, savepath: str = None) -> None:
    """
    Plots achieved against target rates.
    :param results: BenchResult of every target.
    :param savepath: If given, saves the rendering here instead of displaying.
    """
    targets = [r.target for r in results]
    ax = setup_axis(xlabel='Target (bpp)', ylabel='Achieved (bpp)', title='Rate accuracy')
    ax.plot(targets, targets, linestyle='--', color=(0, 0, 0, 0.3))
    ax.plot(targets, [r.payload_rate for r in results], marker='o', label='Payload')
    ax.plot(targets, [r.container_rate for r in results], marker='x', label='Container')
    ax.legend(loc='best')

    if savepath is not None:
        plt.savefig(savepath)
        plt.close()
