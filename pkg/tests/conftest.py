import numpy as np
import pytest

from fvq.evaluate import DatasetManifest, ManifestEntry
from fvq.fr import extract_fr
from fvq.nr import extract_nr

import synth


@pytest.fixture(scope="session")
def ladder_features():
    """Feature matrices and MOS for the synthetic distortion ladder.

    Extracted once per session; both full-reference and no-reference feature
    sets come from the same 100 distorted clips. Wall time is recorded so the
    acceptance criteria can bound pipeline cost including extraction.
    """
    import time

    start = time.perf_counter()
    fr_rows, nr_rows, mos = [], [], []
    for source, distorted, score in synth.ladder_pairs():
        fr_rows.append(list(extract_fr(source, distorted).values()))
        nr_rows.append(list(extract_nr(distorted).values()))
        mos.append(score)
    return {
        "fr": np.asarray(fr_rows),
        "nr": np.asarray(nr_rows),
        "mos": np.asarray(mos),
        "extract_seconds": time.perf_counter() - start,
    }


@pytest.fixture(scope="session")
def ladder_manifests(ladder_features):
    n = ladder_features["mos"].size
    mos = ladder_features["mos"]
    fr = DatasetManifest(
        entries=tuple(ManifestEntry(processed=f"dist{i}.y4m", mos=float(mos[i]),
                                    reference=f"src{i}.y4m") for i in range(n)),
        mode="fr",
    )
    nr = DatasetManifest(
        entries=tuple(ManifestEntry(processed=f"dist{i}.y4m", mos=float(mos[i]))
                      for i in range(n)),
        mode="nr",
    )
    return {"fr": fr, "nr": nr}
