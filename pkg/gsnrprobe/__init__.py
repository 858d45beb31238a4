"""
gsnrprobe: Channel Probing for Coherent Optical Transponders

Estimates the generalized SNR (GSNR) of a spectrum slot by reading the Q-factor
of a probing-light transponder, and turns that estimate into a recommended
transponder configuration for the slot.

Key Features:
- Back-to-back Q-over-OSNR characterization with a 2nd order fit and inversion
- GOSNR estimation from a probe's Q readout, normalized to the symbol rate
- Per-configuration GSNR margins and best-configuration selection
- Synthetic long-haul link model (ASE + closed-form GN nonlinear interference)
  used as the ground truth for verification
- Replay of a multi-path probing campaign with JSON/CSV reports

Example:
    >>> from gsnrprobe.experiment import build_default_scenario, run_experiment
    >>> report = run_experiment(build_default_scenario(seeds=range(20)))
    >>> print(report.summary.max_abs_error_db)

Command Line:
    $ gsnrprobe characterize b2b.csv fit.json
    $ gsnrprobe probe topology.json fit.json --probe PL2 --seed 7
    $ gsnrprobe recommend probe.json --operating-margin 0.7
    $ gsnrprobe experiment --out-dir results/
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
