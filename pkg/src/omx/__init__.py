"""omx: regression engine and benchmark harness for cross-modality
prediction of single-cell measurements.

Models one data modality from another (chromatin accessibility -> RNA,
RNA -> surface protein) with three regressors sharing one fit/predict
contract: echo state networks, extreme learning machines, and
multi-output random forests. Evaluation uses grouped K-fold splits,
per-cell correlation score and MSE.
"""

__version__ = "0.1.0"
