"""Named gadget templates and the shipped data files that pin their layouts.

Every catalog entry is built in code; ``data/gadgets/<name>.gadget`` stores the
same template as text and ``data/gadgets/SHA256SUMS`` its digest, so any layout
change shows up as a data-file mismatch.
"""
from __future__ import annotations

import hashlib
from importlib import resources
from pathlib import Path

from .gadget import GadgetTemplate, dump_template, load_template
from .gadgets3 import clause_gadget3, variable_gadget3, wire_tromino3
from .gadgets_k import PrimitiveKind, build_primitive, clause_gadget_k, variable_gadget_k

SHIPPED_K = (4, 5)


def _entries() -> dict:
    out = {
        "variable3": variable_gadget3,
        "clause3-positive": lambda: clause_gadget3("positive"),
        "clause3-negative": lambda: clause_gadget3("negative"),
        "wire3": wire_tromino3,
    }
    for k in SHIPPED_K:
        for kind in PrimitiveKind:
            out[f"{kind.value}{k}"] = (lambda kind=kind, k=k: build_primitive(kind, k))
        out[f"variable{k}"] = lambda k=k: variable_gadget_k(k)
        out[f"clause{k}-positive"] = lambda k=k: clause_gadget_k(k, "positive")
        out[f"clause{k}-negative"] = lambda k=k: clause_gadget_k(k, "negative")
    # triangle-junction layouts of the path variant, 3 digits
    from .path_variant import delta_network_path, xor_enforcer_path
    out["delta_network_path7"] = lambda: delta_network_path(7, 3)
    out["xor_enforcer_path7"] = lambda: xor_enforcer_path(7, 3)
    return out


CATALOG = _entries()


def names() -> list[str]:
    return sorted(CATALOG)


def build(name: str) -> GadgetTemplate:
    try:
        return CATALOG[name]()
    except KeyError:
        raise KeyError(f"unknown gadget {name!r}; known: {', '.join(names())}") from None


def _data_dir():
    return resources.files("kmatching") / "data" / "gadgets"


def shipped_text(name: str) -> str:
    return (_data_dir() / f"{name}.gadget").read_text()


def load_shipped(name: str) -> GadgetTemplate:
    return load_template(shipped_text(name))


def shipped_checksums() -> dict[str, str]:
    out = {}
    for line in (_data_dir() / "SHA256SUMS").read_text().splitlines():
        digest, fname = line.split()
        out[fname] = digest
    return out


def sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def write_data_files(directory: Path) -> list[str]:
    """Regenerate every ``.gadget`` file and the checksum list in ``directory``."""
    directory.mkdir(parents=True, exist_ok=True)
    sums = []
    for name in names():
        text = dump_template(build(name))
        fname = f"{name}.gadget"
        (directory / fname).write_text(text)
        sums.append(f"{sha256(text)}  {fname}")
    (directory / "SHA256SUMS").write_text("\n".join(sums) + "\n")
    return names()


if __name__ == "__main__":  # python -m kmatching.catalog <dir>
    import sys

    print("\n".join(write_data_files(Path(sys.argv[1]))))
