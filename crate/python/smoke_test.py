"""Quick end-to-end check of the pylatheta extension module.

Build first:

    cargo build --release -p latheta-py --features extension-module

then run `python3 python/smoke_test.py`. If `pylatheta` is not importable the
script loads target/release/libpylatheta.so directly.
"""

import importlib.util
import pathlib
import sys


def load():
    try:
        import pylatheta

        return pylatheta
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    lib = root / "target" / "release" / "libpylatheta.so"
    if not lib.exists():
        sys.exit(f"pylatheta is not importable and {lib} does not exist; build it first")
    spec = importlib.util.spec_from_file_location("pylatheta", lib)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    pl = load()

    a2 = pl.Lattice.builtin("a2")
    assert a2.dim == 2
    assert a2.theta("4") == [("1", 6), ("3", 6), ("4", 6)], a2.theta("4")

    custom = pl.Lattice([[2, -1], ["-1", "2"]])
    assert custom.theta("8") == [("2", 6), ("6", 6), ("8", 6)], custom.theta("8")
    assert custom.volume_sq() == "3"

    assert pl.Lattice.builtin("d4").norm_hierarchy() == ["2", "3", "4", "4"]
    assert pl.Lattice.builtin("a2_c1").norm_hierarchy() == ["1"] * 6
    assert pl.Lattice.builtin("a2_c2").norm_hierarchy() == ["1", "3/4", "1/2", "3/4", "1", "1"]

    cert = pl.Lattice.builtin("a4_c4").is_stable()
    assert not cert["stable"] and cert["violating_r"] is not None, cert
    assert pl.Lattice.builtin("a2_c1").is_stable()["stable"]

    delta = pl.Lattice.builtin("a4_c3").ratio(1.0)
    assert abs(delta - 1.002588) < 1e-5, delta

    first = a2.gts(2, 1)
    assert first[0] == ("3/4", 36), first

    code = pl.Code.builtin("c1")
    assert sum(code.weight_enumerator()) == 2 ** 3
    assert code.construction_a().dim == 6

    try:
        pl.Lattice.builtin("nope")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown lattice name accepted")

    print("pylatheta smoke test: ok")


if __name__ == "__main__":
    main()
