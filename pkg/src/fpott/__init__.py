"""fpott: desk-scale federated traffic transformer.

Federated training of small byte-level transformer classifiers over
prompt-serialized vehicle trajectories, a feedback-driven prompt-template
optimizer, and a transformer-based synthetic traffic generator emitting
NGSIM-format CSV with physical post-processing.
"""

__version__ = "0.1.0"
