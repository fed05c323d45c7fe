"""Spanish suffix stripper."""

from __future__ import annotations

from tierkite.text.stem._regions import r1_r2, rv_standard, replace_suffix

_VOWELS = "aeiou\xe1\xe9\xed\xf3\xfa\xfc"

_STEP0 = (
    "selas", "selos", "sela", "selo", "las", "les", "los", "nos",
    "me", "se", "la", "le", "lo",
)
_STEP1 = (
    "amientos", "imientos", "amiento", "imiento", "acion", "aciones",
    "uciones", "adoras", "adores", "ancias", "log\xedas", "encias",
    "amente", "idades", "anzas", "ismos", "ables", "ibles", "istas",
    "adora", "aci\xf3n", "antes", "ancia", "log\xeda", "uci\xf3n",
    "encia", "mente", "anza", "icos", "icas", "ismo", "able", "ible",
    "ista", "osos", "osas", "ador", "ante", "idad", "ivas", "ivos",
    "ico", "ica", "oso", "osa", "iva", "ivo",
)
_STEP2A = (
    "yeron", "yendo", "yamos", "yais", "yan", "yen", "yas", "yes",
    "ya", "ye", "yo", "y\xf3",
)
_STEP2B = (
    "ar\xedamos", "er\xedamos", "ir\xedamos", "i\xe9ramos", "i\xe9semos",
    "ar\xedais", "aremos", "er\xedais", "eremos", "ir\xedais", "iremos",
    "ierais", "ieseis", "asteis", "isteis", "\xe1bamos", "\xe1ramos",
    "\xe1semos", "ar\xedan", "ar\xedas", "ar\xe9is", "er\xedan",
    "er\xedas", "er\xe9is", "ir\xedan", "ir\xedas", "ir\xe9is",
    "ieran", "iesen", "ieron", "iendo", "ieras", "ieses", "abais",
    "arais", "aseis", "\xe9amos", "ar\xe1n", "ar\xe1s", "ar\xeda",
    "er\xe1n", "er\xe1s", "er\xeda", "ir\xe1n", "ir\xe1s", "ir\xeda",
    "iera", "iese", "aste", "iste", "aban", "aran", "asen", "aron",
    "ando", "abas", "adas", "idas", "aras", "ases", "\xedais",
    "ados", "idos", "amos", "imos", "emos", "ar\xe1", "ar\xe9",
    "er\xe1", "er\xe9", "ir\xe1", "ir\xe9", "aba", "ada", "ida",
    "ara", "ase", "\xedan", "ado", "ido", "\xedas", "\xe1is",
    "\xe9is", "\xeda", "ad", "ed", "id", "an", "i\xf3", "ar", "er",
    "ir", "as", "\xeds", "en", "es",
)
_STEP3 = ("os", "a", "e", "o", "\xe1", "\xe9", "\xed", "\xf3")


def _unaccent(word: str) -> str:
    return (
        word.replace("\xe1", "a")
        .replace("\xe9", "e")
        .replace("\xed", "i")
        .replace("\xf3", "o")
        .replace("\xfa", "u")
    )


def stem(word: str) -> str:
    word = word.lower()
    step1_success = False

    r1, r2 = r1_r2(word, _VOWELS)
    rv = rv_standard(word, _VOWELS)

    for suffix in _STEP0:
        if not (word.endswith(suffix) and rv.endswith(suffix)):
            continue
        if (
            rv[: -len(suffix)].endswith(
                ("ando", "\xe1ndo", "ar", "\xe1r", "er", "\xe9r", "iendo", "i\xe9ndo", "ir", "\xedr")
            )
        ) or (
            rv[: -len(suffix)].endswith("yendo") and word[: -len(suffix)].endswith("uyendo")
        ):
            word = _unaccent(word[: -len(suffix)])
            r1 = _unaccent(r1[: -len(suffix)])
            r2 = _unaccent(r2[: -len(suffix)])
            rv = _unaccent(rv[: -len(suffix)])
        break

    for suffix in _STEP1:
        if not word.endswith(suffix):
            continue
        if suffix == "amente" and r1.endswith(suffix):
            step1_success = True
            word, r2, rv = word[:-6], r2[:-6], rv[:-6]
            if r2.endswith("iv"):
                word, r2, rv = word[:-2], r2[:-2], rv[:-2]
                if r2.endswith("at"):
                    word, rv = word[:-2], rv[:-2]
            elif r2.endswith(("os", "ic", "ad")):
                word, rv = word[:-2], rv[:-2]
        elif r2.endswith(suffix):
            step1_success = True
            if suffix in (
                "adora", "ador", "aci\xf3n", "adoras", "adores", "acion",
                "aciones", "ante", "antes", "ancia", "ancias",
            ):
                word = word[: -len(suffix)]
                r2 = r2[: -len(suffix)]
                rv = rv[: -len(suffix)]
                if r2.endswith("ic"):
                    word, rv = word[:-2], rv[:-2]
            elif suffix in ("log\xeda", "log\xedas"):
                word = replace_suffix(word, suffix, "log")
                rv = replace_suffix(rv, suffix, "log")
            elif suffix in ("uci\xf3n", "uciones"):
                word = replace_suffix(word, suffix, "u")
                rv = replace_suffix(rv, suffix, "u")
            elif suffix in ("encia", "encias"):
                word = replace_suffix(word, suffix, "ente")
                rv = replace_suffix(rv, suffix, "ente")
            elif suffix == "mente":
                word = word[: -len(suffix)]
                r2 = r2[: -len(suffix)]
                rv = rv[: -len(suffix)]
                if r2.endswith(("ante", "able", "ible")):
                    word, rv = word[:-4], rv[:-4]
            elif suffix in ("idad", "idades"):
                word = word[: -len(suffix)]
                r2 = r2[: -len(suffix)]
                rv = rv[: -len(suffix)]
                for pre in ("abil", "ic", "iv"):
                    if r2.endswith(pre):
                        word = word[: -len(pre)]
                        rv = rv[: -len(pre)]
            elif suffix in ("ivo", "iva", "ivos", "ivas"):
                word = word[: -len(suffix)]
                r2 = r2[: -len(suffix)]
                rv = rv[: -len(suffix)]
                if r2.endswith("at"):
                    word, rv = word[:-2], rv[:-2]
            else:
                word = word[: -len(suffix)]
                rv = rv[: -len(suffix)]
        break

    if not step1_success:
        for suffix in _STEP2A:
            if rv.endswith(suffix) and word[-len(suffix) - 1 : -len(suffix)] == "u":
                word = word[: -len(suffix)]
                rv = rv[: -len(suffix)]
                break

        for suffix in _STEP2B:
            if rv.endswith(suffix):
                word = word[: -len(suffix)]
                rv = rv[: -len(suffix)]
                if suffix in ("en", "es", "\xe9is", "emos"):
                    if word.endswith("gu"):
                        word = word[:-1]
                    if rv.endswith("gu"):
                        rv = rv[:-1]
                break

    for suffix in _STEP3:
        if rv.endswith(suffix):
            word = word[: -len(suffix)]
            if suffix in ("e", "\xe9"):
                rv = rv[: -len(suffix)]
                if word[-2:] == "gu" and rv.endswith("u"):
                    word = word[:-1]
            break

    return _unaccent(word)
