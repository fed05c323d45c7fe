"""Shared region helpers for suffix-stripping stemmers.

R1 is the region after the first non-vowel following a vowel, R2 the same
rule applied within R1, RV the verb region; all empty when the pattern is
absent.
"""

from __future__ import annotations


def r1_r2(word: str, vowels: str) -> tuple[str, str]:
    r1 = ""
    r2 = ""
    for i in range(1, len(word)):
        if word[i] not in vowels and word[i - 1] in vowels:
            r1 = word[i + 1 :]
            break
    for i in range(1, len(r1)):
        if r1[i] not in vowels and r1[i - 1] in vowels:
            r2 = r1[i + 1 :]
            break
    return r1, r2


def rv_standard(word: str, vowels: str) -> str:
    rv = ""
    if len(word) >= 2:
        if word[1] not in vowels:
            for i in range(2, len(word)):
                if word[i] in vowels:
                    rv = word[i + 1 :]
                    break
        elif word[0] in vowels and word[1] in vowels:
            for i in range(2, len(word)):
                if word[i] not in vowels:
                    rv = word[i + 1 :]
                    break
        else:
            rv = word[3:]
    return rv


def replace_suffix(word: str, suffix: str, replacement: str) -> str:
    return word[: -len(suffix)] + replacement
