"""pfedpf: personalized Bayesian federated learning with posterior fine-tuning.

Clients train small MLPs, approximate classifier-weight posteriors with a
Laplace fit, a server aggregates the Gaussians by moment matching, and each
client fine-tunes its posterior with a stack of radial normalizing flows.
The harness measures calibration and out-of-distribution detection end to end.
"""

__version__ = "0.1.0"
