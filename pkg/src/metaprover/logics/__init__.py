"""Object logics: natural-deduction first-order logic (minimal,
intuitionistic NJ, classical), the sequent calculus LK, and ZF set theory
over LK. Theories are built once and cached."""

from functools import lru_cache


@lru_cache(maxsize=None)
def get_theory(name: str):
    from . import fol, lk, zf
    if name in ("Minimal", "Intuitionistic", "NJ", "FOLc", "Classical"):
        chain = fol.build_fol()
        return chain[name if name != "FOLc" else "Classical"]
    if name == "LK":
        return lk.build_lk()
    if name == "ZF":
        return zf.build_zf()
    raise KeyError(f"unknown theory {name}")


THEORY_NAMES = ["Minimal", "Intuitionistic", "NJ", "FOLc", "LK", "ZF"]
