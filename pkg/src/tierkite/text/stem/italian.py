"""Italian suffix stripper."""

from __future__ import annotations

from tierkite.text.stem._regions import r1_r2, rv_standard, replace_suffix

_VOWELS = "aeiou\xe0\xe8\xec\xf2\xf9"

_STEP0 = (
    "gliela", "gliele", "glieli", "glielo", "gliene",
    "sene", "mela", "mele", "meli", "melo", "mene",
    "tela", "tele", "teli", "telo", "tene",
    "cela", "cele", "celi", "celo", "cene",
    "vela", "vele", "veli", "velo", "vene",
    "gli", "ci", "la", "le", "li", "lo", "mi", "ne", "si", "ti", "vi",
)
_STEP1 = (
    "atrice", "atrici", "azione", "azioni", "uzione", "uzioni",
    "usione", "usioni", "amento", "amenti", "imento", "imenti",
    "amente", "abile", "abili", "ibile", "ibili", "mente",
    "atore", "atori", "logia", "logie", "anza", "anze", "iche",
    "ichi", "ismo", "ismi", "ista", "iste", "isti", "ist\xe0",
    "ist\xe8", "ist\xec", "ante", "anti", "enza", "enze", "ico",
    "ici", "ica", "ice", "oso", "osi", "osa", "ose", "it\xe0",
    "ivo", "ivi", "iva", "ive",
)
_STEP2 = (
    "erebbero", "irebbero", "assero", "assimo", "eranno", "erebbe",
    "eremmo", "ereste", "eresti", "essero", "iranno", "irebbe",
    "iremmo", "ireste", "iresti", "iscano", "iscono", "issero",
    "arono", "avamo", "avano", "avate", "eremo", "erete", "erono",
    "evamo", "evano", "evate", "iremo", "irete", "irono", "ivamo",
    "ivano", "ivate", "ammo", "ando", "asse", "assi", "emmo",
    "enda", "ende", "endi", "endo", "erai", "erei", "Yamo", "iamo",
    "immo", "irai", "irei", "isca", "isce", "isci", "isco", "ano",
    "are", "ata", "ate", "ati", "ato", "ava", "avi", "avo",
    "er\xe0", "ere", "er\xf2", "ete", "eva", "evi", "evo",
    "ir\xe0", "ire", "ir\xf2", "ita", "ite", "iti", "ito", "iva",
    "ivi", "ivo", "ono", "uta", "ute", "uti", "uto", "ar", "ir",
)


def stem(word: str) -> str:
    word = word.lower()
    step1_success = False

    # acute accents normalize to grave
    word = (
        word.replace("\xe1", "\xe0")
        .replace("\xe9", "\xe8")
        .replace("\xed", "\xec")
        .replace("\xf3", "\xf2")
        .replace("\xfa", "\xf9")
    )

    for i in range(1, len(word)):
        if word[i - 1] == "q" and word[i] == "u":
            word = word[:i] + "U" + word[i + 1 :]
    for i in range(1, len(word) - 1):
        if word[i - 1] in _VOWELS and word[i + 1] in _VOWELS:
            if word[i] == "u":
                word = word[:i] + "U" + word[i + 1 :]
            elif word[i] == "i":
                word = word[:i] + "I" + word[i + 1 :]

    r1, r2 = r1_r2(word, _VOWELS)
    rv = rv_standard(word, _VOWELS)

    for suffix in _STEP0:
        if rv.endswith(suffix):
            if rv[-len(suffix) - 4 : -len(suffix)] in ("ando", "endo"):
                word = word[: -len(suffix)]
                r1 = r1[: -len(suffix)]
                r2 = r2[: -len(suffix)]
                rv = rv[: -len(suffix)]
            elif rv[-len(suffix) - 2 : -len(suffix)] in ("ar", "er", "ir"):
                word = replace_suffix(word, suffix, "e")
                r1 = replace_suffix(r1, suffix, "e")
                r2 = replace_suffix(r2, suffix, "e")
                rv = replace_suffix(rv, suffix, "e")
            break

    for suffix in _STEP1:
        if word.endswith(suffix):
            if suffix == "amente" and r1.endswith(suffix):
                step1_success = True
                word, r2, rv = word[:-6], r2[:-6], rv[:-6]
                if r2.endswith("iv"):
                    word, r2, rv = word[:-2], r2[:-2], rv[:-2]
                    if r2.endswith("at"):
                        word, rv = word[:-2], rv[:-2]
                elif r2.endswith(("os", "ic")):
                    word, rv = word[:-2], rv[:-2]
                elif r2.endswith("abil"):
                    word, rv = word[:-4], rv[:-4]
            elif suffix in ("amento", "amenti", "imento", "imenti") and rv.endswith(suffix):
                step1_success = True
                word, rv = word[:-6], rv[:-6]
            elif r2.endswith(suffix):
                step1_success = True
                if suffix in ("azione", "azioni", "atore", "atori"):
                    word = word[: -len(suffix)]
                    r2 = r2[: -len(suffix)]
                    rv = rv[: -len(suffix)]
                    if r2.endswith("ic"):
                        word, rv = word[:-2], rv[:-2]
                elif suffix in ("logia", "logie"):
                    word = word[:-2]
                    rv = word[:-2]
                elif suffix in ("uzione", "uzioni", "usione", "usioni"):
                    word, rv = word[:-5], rv[:-5]
                elif suffix in ("enza", "enze"):
                    word = replace_suffix(word, suffix, "te")
                    rv = replace_suffix(rv, suffix, "te")
                elif suffix == "it\xe0":
                    word, r2, rv = word[:-3], r2[:-3], rv[:-3]
                    if r2.endswith(("ic", "iv")):
                        word, rv = word[:-2], rv[:-2]
                    elif r2.endswith("abil"):
                        word, rv = word[:-4], rv[:-4]
                elif suffix in ("ivo", "ivi", "iva", "ive"):
                    word, r2, rv = word[:-3], r2[:-3], rv[:-3]
                    if r2.endswith("at"):
                        word, r2, rv = word[:-2], r2[:-2], rv[:-2]
                        if r2.endswith("ic"):
                            word, rv = word[:-2], rv[:-2]
                else:
                    word = word[: -len(suffix)]
                    rv = rv[: -len(suffix)]
            break

    if not step1_success:
        for suffix in _STEP2:
            if rv.endswith(suffix):
                word = word[: -len(suffix)]
                rv = rv[: -len(suffix)]
                break

    if rv.endswith(("a", "e", "i", "o", "\xe0", "\xe8", "\xec", "\xf2")):
        word, rv = word[:-1], rv[:-1]
        if rv.endswith("i"):
            word, rv = word[:-1], rv[:-1]

    if rv.endswith(("ch", "gh")):
        word = word[:-1]

    return word.replace("I", "i").replace("U", "u")
