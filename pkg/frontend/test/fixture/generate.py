"""Regenerate the contract-test workspace (requires the langtransfer package)."""

import pathlib
import random
import sys

from langtransfer import selection, transfer_graph
from langtransfer.corpus import LanguageMeta
from langtransfer.proxy_mlm import ScoreMatrix

HERE = pathlib.Path(__file__).parent


def build(seed):
    rng = random.Random(seed)
    codes = ("de", "el", "fi", "hu", "ja", "ta")
    mono = {c: round(rng.uniform(0.05, 0.4), 6) for c in codes}
    bilingual = {
        (s, t): round(mono[t] * rng.uniform(0.6, 1.6), 6)
        for s in codes for t in codes if s != t
    }
    matrix = ScoreMatrix(languages=codes, mono=mono, bilingual=bilingual,
                         seeds=(0, 1))
    families = {"de": "ie", "el": "ie", "fi": "uralic",
                "hu": "uralic", "ja": "japonic", "ta": "dravidian"}
    scripts = {"de": "latin", "el": "greek", "fi": "latin",
               "hu": "latin", "ja": "kanji", "ta": "tamil"}
    metas = {c: LanguageMeta(code=c, family=families[c], script=scripts[c])
             for c in codes}
    return transfer_graph.build_graph(matrix, metas)


def main():
    # the contract tests need at least one O-type node (donates, does not
    # receive); scan seeds until the random matrix produces one
    for seed in range(1000):
        graph = build(seed)
        types = {c: n.blood_type.value for c, n in graph.nodes.items()}
        if "O" in types.values():
            break
    else:
        sys.exit("no seed produced an O-type node")
    transfer_graph.export_graph(graph, HERE / "graph.json")
    (HERE / "wals.csv").write_text(
        "language_code,feature_id,value\n"
        "de,81A,SVO\nel,81A,SVO\nfi,81A,SVO\nhu,81A,SOV\nja,81A,SOV\nta,81A,SOV\n"
    )
    cfg = selection.PretrainConfig(
        id="most", donors=("ja", "fi"), recipients_high=("hu", "de"),
        recipients_low=("el", "ta"),
    )
    selection.write_config_manifest(cfg, HERE / "most.manifest")
    print("seed", seed, "blood types", types)


if __name__ == "__main__":
    main()
