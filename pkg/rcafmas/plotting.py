"""
Quality-assessment plots for experiment outputs.

.. include:: include/links.rst
"""
import matplotlib
matplotlib.use('Agg')
from matplotlib import pyplot as plt
from mpl_toolkits.axes_grid1 import make_axes_locatable as mal

from IPython import embed

import numpy as np

from .models.compound import log_compress
from .metrics import find_peak

#: Sweep metrics shown by :func:`sweep_plot` and their labels
sweep_metrics = {'pir': 'PIR', 'pmslr_db': 'PMSLR [dB]', 'fwhm_x': 'FWHM$_x$ [mm]',
                 'fwhm_z': 'FWHM$_z$ [mm]'}


def _finalize(fig, ofile):
    if ofile is None:
        plt.show()
    else:
        fig.savefig(ofile, bbox_inches='tight')
    plt.close(fig)


def psf_slices_plot(envelopes, dynamic_range_db=60., ofile=None):
    """
    Show the x-y and x-z slices through the peak of each volume.

    Args:
        envelopes (:obj:`list`):
            The :class:`~rcafmas.models.compound.EnvelopeVolume` objects.
        dynamic_range_db (:obj:`float`, optional):
            Display dynamic range.
        ofile (:obj:`str`, optional):
            Output file.  If None, the plot is shown.
    """
    n = len(envelopes)
    fig, axes = plt.subplots(2, n, figsize=(3.5*n, 6.5), squeeze=False)
    for i, env in enumerate(envelopes):
        db = log_compress(env, dynamic_range_db=dynamic_range_db)
        index = find_peak(env)[0]
        x, y, z = [env.grid.axis(j)*1e3 for j in range(3)]
        for ax, image, ext, ylabel in zip(axes[:,i],
                                          [db[:,:,index[2]].T, db[:,index[1],:].T],
                                          [[x[0], x[-1], y[-1], y[0]],
                                           [x[0], x[-1], z[-1], z[0]]],
                                          ['y [mm]', 'z [mm]']):
            im = ax.imshow(image, origin='upper', extent=ext, aspect='auto', cmap='gray',
                           vmin=-dynamic_range_db, vmax=0, interpolation='nearest')
            ax.set_xlabel('x [mm]')
            ax.set_ylabel(ylabel)
            cax = mal(ax).append_axes('right', size='5%', pad=0.05)
            fig.colorbar(im, cax=cax, label='dB')
        axes[0,i].set_title(env.method)
    fig.tight_layout()
    _finalize(fig, ofile)


def sweep_plot(sweep, ofile=None):
    """
    Show each sweep metric as a function of the number of transmissions
    and the angle span for each method.

    Args:
        sweep (:class:`~rcafmas.experiment.SweepResult`):
            Sweep results.
        ofile (:obj:`str`, optional):
            Output file.  If None, the plot is shown.
    """
    nm = len(sweep.methods)
    nq = len(sweep_metrics)
    fig, axes = plt.subplots(nq, nm, figsize=(3.5*nm, 3*nq), squeeze=False)
    ranges = np.degrees(sweep.ranges)
    for i, (metric, label) in enumerate(sweep_metrics.items()):
        scale = 1e3 if metric.startswith('fwhm') else 1.
        values = [sweep.grid(metric, m)*scale for m in sweep.methods]
        vmin = np.nanmin(values)
        vmax = np.nanmax(values)
        for j, method in enumerate(sweep.methods):
            ax = axes[i,j]
            im = ax.imshow(values[j], origin='lower', aspect='auto', vmin=vmin, vmax=vmax,
                           interpolation='nearest', cmap='viridis')
            ax.set_xticks(np.arange(len(ranges)))
            ax.set_xticklabels([f'{r:g}' for r in ranges], fontsize=7)
            ax.set_yticks(np.arange(len(sweep.angle_counts)))
            ax.set_yticklabels([str(n) for n in sweep.angle_counts], fontsize=7)
            if i == nq-1:
                ax.set_xlabel('Angle range [deg]')
            if j == 0:
                ax.set_ylabel('Transmissions')
            if i == 0:
                ax.set_title(method)
            cax = mal(ax).append_axes('right', size='5%', pad=0.05)
            fig.colorbar(im, cax=cax, label=label)
    fig.tight_layout()
    _finalize(fig, ofile)


def depth_study_plot(table, ofile=None):
    """
    Plot the contrast metrics against depth with their standard errors.

    Args:
        table (`astropy.table.Table`_):
            Table from :func:`~rcafmas.experiment.run_depth_study`.
        ofile (:obj:`str`, optional):
            Output file.  If None, the plot is shown.
    """
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    for ax, metric in zip(axes, ['TCR', 'TNR']):
        for method in np.unique(table['method']):
            indx = (table['metric'] == metric) & (table['method'] == method)
            ax.errorbar(table['depth_mm'][indx], table['value_db'][indx],
                        yerr=table['stderr_db'][indx], marker='o', capsize=3, label=method)
        ax.set_xlabel('Depth [mm]')
        ax.set_ylabel(f'{metric} [dB]')
        ax.minorticks_on()
    axes[0].legend()
    fig.tight_layout()
    _finalize(fig, ofile)

