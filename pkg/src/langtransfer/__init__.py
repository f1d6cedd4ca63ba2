"""Toolkit for directed pretraining-transfer graphs over languages.

Pipeline: balance corpora into fixed-budget partitions, train a shared
subword vocabulary, score monolingual and bilingual proxy MLM
configurations (or ingest externally produced matrices), build the
complete directed transfer graph, select pretraining sets, check the
transfer hypotheses against ingested downstream results, and serve it all
to the interactive explorer.
"""

__version__ = "0.1.0"
