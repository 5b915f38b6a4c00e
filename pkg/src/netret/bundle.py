"""Persistence of a trained model bundle as JSON files.

The bundle directory holds index.json, dag.json, cpts.json and poss.json.
Dumps are sorted and therefore byte-deterministic for identical inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from netret.bnr import BnrModel, Cpt
from netret.corpus import CorpusIndex
from netret.hybrid import HybridModel
from netret.network import Dag
from netret.pir import PossTable

INDEX_FILE = "index.json"
DAG_FILE = "dag.json"
CPTS_FILE = "cpts.json"
POSS_FILE = "poss.json"


@dataclass
class Bundle:
    index: CorpusIndex
    dag: Dag
    bnr: BnrModel
    hybrid: HybridModel


def _cfg_key(cfg: tuple[bool, ...]) -> str:
    return "".join("1" if b else "0" for b in cfg)


def _cfg_from_key(key: str) -> tuple[bool, ...]:
    return tuple(ch == "1" for ch in key)


def _tables_to_dict(tables: dict) -> dict:
    return {
        str(t): {
            "parents": list(table.parents),
            "rows": {_cfg_key(cfg): list(row) for cfg, row in table.rows.items()},
        }
        for t, table in tables.items()
    }


def _tables_from_dict(data: dict, cls) -> dict:
    out = {}
    for t, entry in data.items():
        rows = {
            _cfg_from_key(key): tuple(row) for key, row in entry["rows"].items()
        }
        out[int(t)] = cls(tuple(entry["parents"]), rows)
    return out


def _dump(obj: dict, path: Path) -> None:
    with path.open("w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1, ensure_ascii=False)
        fh.write("\n")


def _load(path: Path) -> dict:
    with path.open("r", encoding="utf-8") as fh:
        return json.load(fh)


def save_bundle(out_dir: Path, index: CorpusIndex, bnr: BnrModel, hybrid: HybridModel) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _dump(index.to_dict(), out_dir / INDEX_FILE)
    _dump(bnr.dag.to_dict(), out_dir / DAG_FILE)
    _dump({"tables": _tables_to_dict(bnr.cpts)}, out_dir / CPTS_FILE)
    poss = {
        "term_tables": _tables_to_dict(hybrid.tables),
        "pir": {
            "nidf": list(index.nidf),
            "ntf": {
                d: {str(t): v for t, v in index.ntf[d].items()}
                for d in index.rankable_doc_ids
            },
        },
    }
    _dump(poss, out_dir / POSS_FILE)


def load_bundle(bundle_dir: Path) -> Bundle:
    bundle_dir = Path(bundle_dir)
    index = CorpusIndex.from_dict(_load(bundle_dir / INDEX_FILE))
    dag = Dag.from_dict(_load(bundle_dir / DAG_FILE))
    cpts = _tables_from_dict(_load(bundle_dir / CPTS_FILE)["tables"], Cpt)
    tables = _tables_from_dict(_load(bundle_dir / POSS_FILE)["term_tables"], PossTable)
    return Bundle(index, dag, BnrModel(dag, cpts), HybridModel(dag, tables))
