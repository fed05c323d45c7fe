"""English (porter2) suffix stripper."""

from __future__ import annotations

from tierkite.text.stem._regions import r1_r2, replace_suffix

_VOWELS = "aeiouy"
_DOUBLES = ("bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt")
_LI_ENDING = "cdeghkmnrt"

_STEP0 = ("'s'", "'s", "'")
_STEP1A = ("sses", "ied", "ies", "us", "ss", "s")
_STEP1B = ("eedly", "ingly", "edly", "eed", "ing", "ed")
_STEP2 = (
    "ization", "ational", "fulness", "ousness", "iveness", "tional",
    "biliti", "lessli", "entli", "ation", "alism", "aliti", "ousli",
    "iviti", "fulli", "enci", "anci", "abli", "izer", "ator", "alli",
    "bli", "ogi", "li",
)
_STEP3 = ("ational", "tional", "alize", "icate", "iciti", "ative", "ical", "ness", "ful")
_STEP4 = (
    "ement", "ance", "ence", "able", "ible", "ment", "ant", "ent",
    "ism", "ate", "iti", "ous", "ive", "ize", "ion", "al", "er", "ic",
)

_SPECIAL = {
    "skis": "ski", "skies": "sky", "dying": "die", "lying": "lie",
    "tying": "tie", "idly": "idl", "gently": "gentl", "ugly": "ugli",
    "early": "earli", "only": "onli", "singly": "singl", "sky": "sky",
    "news": "news", "howe": "howe", "atlas": "atlas", "cosmos": "cosmos",
    "bias": "bias", "andes": "andes", "inning": "inning", "innings": "inning",
    "outing": "outing", "outings": "outing", "canning": "canning",
    "cannings": "canning", "herring": "herring", "herrings": "herring",
    "earring": "earring", "earrings": "earring", "proceed": "proceed",
    "proceeds": "proceed", "proceeded": "proceed", "proceeding": "proceed",
    "exceed": "exceed", "exceeds": "exceed", "exceeded": "exceed",
    "exceeding": "exceed", "succeed": "succeed", "succeeds": "succeed",
    "succeeded": "succeed", "succeeding": "succeed",
}


def stem(word: str) -> str:
    word = word.lower()
    if len(word) <= 2:
        return word
    if word in _SPECIAL:
        return _SPECIAL[word]

    word = word.replace("’", "'").replace("‘", "'").replace("‛", "'")
    if word.startswith("'"):
        word = word[1:]
    if word.startswith("y"):
        word = "Y" + word[1:]
    for i in range(1, len(word)):
        if word[i - 1] in _VOWELS and word[i] == "y":
            word = word[:i] + "Y" + word[i + 1 :]

    r1 = ""
    r2 = ""
    if word.startswith(("gener", "commun", "arsen")):
        r1 = word[5:] if word.startswith(("gener", "arsen")) else word[6:]
        for i in range(1, len(r1)):
            if r1[i] not in _VOWELS and r1[i - 1] in _VOWELS:
                r2 = r1[i + 1 :]
                break
    else:
        r1, r2 = r1_r2(word, _VOWELS)

    for suffix in _STEP0:
        if word.endswith(suffix):
            word = word[: -len(suffix)]
            r1 = r1[: -len(suffix)]
            r2 = r2[: -len(suffix)]
            break

    for suffix in _STEP1A:
        if word.endswith(suffix):
            if suffix == "sses":
                word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
            elif suffix in ("ied", "ies"):
                if len(word[: -len(suffix)]) > 1:
                    word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
                else:
                    word, r1, r2 = word[:-1], r1[:-1], r2[:-1]
            elif suffix == "s":
                if any(ch in _VOWELS for ch in word[:-2]):
                    word, r1, r2 = word[:-1], r1[:-1], r2[:-1]
            break

    for suffix in _STEP1B:
        if word.endswith(suffix):
            if suffix in ("eed", "eedly"):
                if r1.endswith(suffix):
                    word = replace_suffix(word, suffix, "ee")
                    r1 = replace_suffix(r1, suffix, "ee") if len(r1) >= len(suffix) else ""
                    r2 = replace_suffix(r2, suffix, "ee") if len(r2) >= len(suffix) else ""
            else:
                if any(ch in _VOWELS for ch in word[: -len(suffix)]):
                    word = word[: -len(suffix)]
                    r1 = r1[: -len(suffix)]
                    r2 = r2[: -len(suffix)]
                    if word.endswith(("at", "bl", "iz")):
                        word += "e"
                        r1 += "e"
                        if len(word) > 5 or len(r1) >= 3:
                            r2 += "e"
                    elif word.endswith(_DOUBLES):
                        word, r1, r2 = word[:-1], r1[:-1], r2[:-1]
                    elif (
                        r1 == ""
                        and len(word) >= 3
                        and word[-1] not in _VOWELS
                        and word[-1] not in "wxY"
                        and word[-2] in _VOWELS
                        and word[-3] not in _VOWELS
                    ) or (
                        r1 == ""
                        and len(word) == 2
                        and word[0] in _VOWELS
                        and word[1] not in _VOWELS
                    ):
                        word += "e"
                        if r1:
                            r1 += "e"
                        if r2:
                            r2 += "e"
            break

    if len(word) > 2 and word[-1] in "yY" and word[-2] not in _VOWELS:
        word = word[:-1] + "i"
        r1 = (r1[:-1] + "i") if r1 else ""
        r2 = (r2[:-1] + "i") if r2 else ""

    for suffix in _STEP2:
        if word.endswith(suffix):
            if r1.endswith(suffix):
                if suffix == "tional":
                    word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
                elif suffix in ("enci", "anci", "abli"):
                    word = word[:-1] + "e"
                    r1 = (r1[:-1] + "e") if r1 else ""
                    r2 = (r2[:-1] + "e") if r2 else ""
                elif suffix == "entli":
                    word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
                elif suffix in ("izer", "ization"):
                    word = replace_suffix(word, suffix, "ize")
                    r1 = replace_suffix(r1, suffix, "ize") if len(r1) >= len(suffix) else ""
                    r2 = replace_suffix(r2, suffix, "ize") if len(r2) >= len(suffix) else ""
                elif suffix in ("ational", "ation", "ator"):
                    word = replace_suffix(word, suffix, "ate")
                    r1 = replace_suffix(r1, suffix, "ate") if len(r1) >= len(suffix) else ""
                    r2 = replace_suffix(r2, suffix, "ate") if len(r2) >= len(suffix) else "e"
                elif suffix in ("alism", "aliti", "alli"):
                    word = replace_suffix(word, suffix, "al")
                    r1 = replace_suffix(r1, suffix, "al") if len(r1) >= len(suffix) else ""
                    r2 = replace_suffix(r2, suffix, "al") if len(r2) >= len(suffix) else ""
                elif suffix == "fulness":
                    word, r1, r2 = word[:-4], r1[:-4], r2[:-4]
                elif suffix in ("ousli", "ousness"):
                    word = replace_suffix(word, suffix, "ous")
                    r1 = replace_suffix(r1, suffix, "ous") if len(r1) >= len(suffix) else ""
                    r2 = replace_suffix(r2, suffix, "ous") if len(r2) >= len(suffix) else ""
                elif suffix in ("iveness", "iviti"):
                    word = replace_suffix(word, suffix, "ive")
                    r1 = replace_suffix(r1, suffix, "ive") if len(r1) >= len(suffix) else ""
                    r2 = replace_suffix(r2, suffix, "ive") if len(r2) >= len(suffix) else "e"
                elif suffix in ("biliti", "bli"):
                    word = replace_suffix(word, suffix, "ble")
                    r1 = replace_suffix(r1, suffix, "ble") if len(r1) >= len(suffix) else ""
                    r2 = replace_suffix(r2, suffix, "ble") if len(r2) >= len(suffix) else ""
                elif suffix == "ogi" and word[-4] == "l":
                    word, r1, r2 = word[:-1], r1[:-1], r2[:-1]
                elif suffix in ("fulli", "lessli"):
                    word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
                elif suffix == "li" and word[-3] in _LI_ENDING:
                    word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
            break

    for suffix in _STEP3:
        if word.endswith(suffix):
            if r1.endswith(suffix):
                if suffix == "tional":
                    word, r1, r2 = word[:-2], r1[:-2], r2[:-2]
                elif suffix == "ational":
                    word = replace_suffix(word, suffix, "ate")
                    r1 = replace_suffix(r1, suffix, "ate") if len(r1) >= len(suffix) else ""
                    r2 = replace_suffix(r2, suffix, "ate") if len(r2) >= len(suffix) else ""
                elif suffix == "alize":
                    word, r1, r2 = word[:-3], r1[:-3], r2[:-3]
                elif suffix in ("icate", "iciti", "ical"):
                    word = replace_suffix(word, suffix, "ic")
                    r1 = replace_suffix(r1, suffix, "ic") if len(r1) >= len(suffix) else ""
                    r2 = replace_suffix(r2, suffix, "ic") if len(r2) >= len(suffix) else ""
                elif suffix in ("ful", "ness"):
                    word = word[: -len(suffix)]
                    r1 = r1[: -len(suffix)]
                    r2 = r2[: -len(suffix)]
                elif suffix == "ative" and r2.endswith(suffix):
                    word, r1, r2 = word[:-5], r1[:-5], r2[:-5]
            break

    for suffix in _STEP4:
        if word.endswith(suffix):
            if r2.endswith(suffix):
                if suffix == "ion":
                    if word[-4] in "st":
                        word, r1, r2 = word[:-3], r1[:-3], r2[:-3]
                else:
                    word = word[: -len(suffix)]
                    r1 = r1[: -len(suffix)]
                    r2 = r2[: -len(suffix)]
            break

    if r2.endswith("l") and word[-2] == "l":
        word = word[:-1]
    elif r2.endswith("e"):
        word = word[:-1]
    elif r1.endswith("e"):
        if len(word) >= 4 and (
            word[-2] in _VOWELS
            or word[-2] in "wxY"
            or word[-3] not in _VOWELS
            or word[-4] in _VOWELS
        ):
            word = word[:-1]

    return word.replace("Y", "y")
