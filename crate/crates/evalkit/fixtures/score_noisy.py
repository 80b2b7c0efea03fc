"""Independent slot counter for the noisy mock fixtures.

Counts slots as 1 (function name) plus the union of ideal and actual
parameter names, and writes the expected mean accuracy per language to
noisy_expected.json. Shares no code with the Rust scorer.
"""
import json
from fractions import Fraction


def is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def slot_ok(ideal, actual, matcher):
    if matcher and "numeric_range" in matcher:
        lo, hi = matcher["numeric_range"]
        return is_number(actual) and lo <= actual <= hi
    if is_number(ideal) or is_number(actual):
        return is_number(ideal) and is_number(actual) and float(ideal) == float(actual)
    if isinstance(ideal, bool) or isinstance(actual, bool):
        return isinstance(ideal, bool) and isinstance(actual, bool) and ideal == actual
    return ideal == actual


def score(case, reply):
    if "call" not in reply:
        return Fraction(0), "fail" in reply
    call = reply["call"]
    ideal = case["ideal"]
    keys = set(ideal["arguments"]) | set(call["arguments"])
    slots = 1 + len(keys)
    good = int(call["name"] == ideal["name"])
    for k in keys:
        if k in ideal["arguments"] and k in call["arguments"]:
            good += slot_ok(ideal["arguments"][k], call["arguments"][k], case["matchers"].get(k))
    return Fraction(good, slots), False


def load(path):
    with open(path, encoding="utf-8") as f:
        return [json.loads(l) for l in f if l.strip()]


if __name__ == "__main__":
    out = {}
    for lang in ("en", "nl"):
        cases = load(f"incidents_{lang}.jsonl")
        script = {r["utterance"]: r["reply"] for r in load(f"noisy_{lang}.jsonl")}
        assert len(script) == len(cases)
        scores = [score(c, script[c["utterance"]]) for c in cases]
        mean = sum(s for s, _ in scores) / len(scores)
        out[lang] = {
            "cases": len(cases),
            "errored": sum(1 for _, e in scores if e),
            "perfect": sum(1 for s, _ in scores if s == 1),
            "mean_accuracy": float(mean),
            "mean_accuracy_exact": f"{mean.numerator}/{mean.denominator}",
        }
    with open("noisy_expected.json", "w") as f:
        json.dump(out, f, indent=2)
        f.write("\n")
    print(json.dumps(out, indent=2))
