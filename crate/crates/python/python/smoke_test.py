"""Smoke test for the pybenchie extension module.

Build and install first, for example:
    cd crates/python && maturin build --release -o dist && pip install dist/pybenchie-*.whl
then run:
    python crates/python/python/smoke_test.py
"""

import pybenchie as pb

GOLD = "\n".join([
    "sent\tS1\tSen. Mitchell is confident he has sufficient votes to block such a measure with procedural actions .",
    "fact\tS1\tf1\t{ Sen. Mitchell | he }\tis\tconfident [ he has sufficient votes to block such a measure with procedural actions ]",
    "fact\tS1\tf2\t{ Sen. Mitchell | he }\tis confident he has\tsufficient votes",
    "fact\tS1\tf2\t{ Sen. Mitchell | he }\tis confident he has\tsufficient votes to block [ such ] [ a ] measure",
    "fact\tS1\tf3\t{ Sen. Mitchell | he }\tis confident he has sufficient votes to block\t[ such ] [ a ] measure",
    "fact\tS1\tf3\t{ Sen. Mitchell | he }\tis confident he has sufficient votes to block [ such ]\t[ a ] measure",
    "fact\tS1\tf3\t{ Sen. Mitchell | he }\tis confident he has sufficient votes to block [ such ] [ a ]\tmeasure",
    "fact\tS1\tf4\t{ Sen. Mitchell | he }\tis confident he has sufficient votes to block [ such ] [ a ] measure with\tprocedural actions",
    "fact\tS1\tf4\t{ Sen. Mitchell | he }\tis confident he has sufficient votes to block [ such ] [ a ] measure\twith procedural actions\tno-entity",
]) + "\n"

OBJECTS = ["sufficient", "sufficient actions", "sufficient procedural actions", "sufficient votes"]
TSV = "".join(f"S1\tSen. Mitchell\tis confident he has\t{o}\n" for o in OBJECTS)


def close(a, b):
    return abs(a - b) < 1e-9


def main():
    gold = pb.Gold.parse(GOLD)
    assert gold.synset_ids == ["f1", "f2", "f3", "f4"], gold.synset_ids
    counts = {sid: len(ts) for sid, ts in gold.expand()}
    assert counts == {"f1": 4, "f2": 10, "f3": 16, "f4": 16}, counts
    assert pb.Gold.parse(gold.dumps()).expand() == gold.expand()
    assert all(sev != "error" for sev, *_ in gold.validate())

    extractions = pb.read_extractions(TSV)
    assert len(extractions) == 4
    report = pb.score(gold, extractions)
    assert (report.score.tp, report.score.fp, report.score.fn) == (1, 3, 3), report
    assert close(report.precision, 0.25) and close(report.recall, 0.25) and close(report.f1, 0.25)
    assert set(report.per_sentence) == {"S1"}

    by_facet = {f: pb.score(gold, extractions, facet=f).f1 for f in pb.FACETS}
    assert by_facet["C"] >= by_facet["default"] >= by_facet["E"]
    assert by_facet["default"] >= by_facet["M"]
    utterances = dict(gold.facet("C"))["f2"]
    assert all(isinstance(u, str) for u in utterances)

    reference = [pb.Triple("Sen. Mitchell", "is confident he has",
                           "sufficient votes to block such a measure with procedural actions")]
    recalls = [pb.token_overlap(e.triple, reference)[1] for e in extractions]
    assert [round(r, 4) for r in recalls] == [0.4375, 0.5, 0.5625, 0.5], recalls
    p, r, f = pb.token_overlap_corpus(gold, extractions)
    assert 0.0 <= p <= 1.0 and 0.0 <= r <= 1.0

    assert close(pb.iaa(gold, gold), 1.0)
    try:
        gold.expand(cap=5)
    except ValueError as e:
        assert "cap" in str(e)
    else:
        raise AssertionError("cap of 5 should reject f2")
    try:
        pb.Gold.parse("fact\tX\tf\ta\tb\tc\n")
    except ValueError:
        pass
    else:
        raise AssertionError("fact before its sentence should fail")

    t = pb.Triple("a", "b", "c")
    assert t == pb.Triple("a", "b", "c") and len({t, pb.Triple("a", "b", "c")}) == 1
    print("pybenchie smoke test: ok")


if __name__ == "__main__":
    main()
