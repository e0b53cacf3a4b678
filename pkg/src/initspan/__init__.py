"""Detection toolkit for multi-sentence sustainability initiative spans.

Pipeline stages: corpus loading -> preprocessing -> label derivation ->
CRF training/decoding -> span aggregation -> matching metrics. Each stage
reads and writes plain line-delimited files; see the CLI (`initspan -h`).
"""

__version__ = "0.1.0"
