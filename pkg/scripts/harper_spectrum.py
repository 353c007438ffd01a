"""
Harper spectrum on the torus as a function of the Floquet angle chi_p.

Writes outputs/harper_spectrum_N<N>.csv and, when matplotlib is installed,
a band plot next to it.

    python scripts/harper_spectrum.py --n 7 --angles 64
"""

import os
import sys
import argparse
import logging

import numpy as np
import pandas as pd
from scipy.linalg import eigvalsh

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from config import config
from qps_lattice import TorusSpace
from plane_projection import PeriodicPlaneSymbol, quantize_hamiltonian

logger = logging.getLogger(__name__)


def harper_bands(n: int, angles: int, chi_q: float = 0.0) -> pd.DataFrame:
    harper = PeriodicPlaneSymbol.harper()
    rows = []
    for chi_p in np.arange(angles) / angles:
        h = quantize_hamiltonian(TorusSpace(n, float(chi_p), chi_q), harper)
        for level, energy in enumerate(eigvalsh(h.matrix)):
            rows.append({'chi_p': chi_p, 'level': level, 'energy': energy})
    return pd.DataFrame(rows)


def main():
    parser = argparse.ArgumentParser(description='Harper bands against the Floquet angle')
    parser.add_argument('--n', type=int, default=7, help='Number of states N')
    parser.add_argument('--angles', type=int, default=64, help='Samples of chi_p in [0, 1)')
    parser.add_argument('--chi-q', type=float, default=0.0)
    args = parser.parse_args()

    bands = harper_bands(args.n, args.angles, args.chi_q)
    csv_path = config.get_output_path(f"harper_spectrum_N{args.n}.csv")
    os.makedirs(os.path.dirname(csv_path) or '.', exist_ok=True)
    bands.to_csv(csv_path, index=False)
    logger.info(f"Wrote {len(bands)} levels to {csv_path}")

    try:
        import matplotlib
        matplotlib.use('Agg')
        import matplotlib.pyplot as plt
    except ImportError:
        logger.warning("matplotlib not installed, skipping the plot")
        return

    fig, ax = plt.subplots(figsize=(6, 4))
    for level, group in bands.groupby('level'):
        ax.plot(group['chi_p'], group['energy'], color='k', lw=0.8)
    ax.set_xlabel(r'$\chi_p$')
    ax.set_ylabel('energy')
    ax.set_title(f'Harper bands, N={args.n}')
    png_path = csv_path.replace('.csv', '.png')
    fig.savefig(png_path, dpi=150, bbox_inches='tight')
    logger.info(f"Saved plot to {png_path}")


if __name__ == '__main__':
    main()
