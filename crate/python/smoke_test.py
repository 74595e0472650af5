"""Smoke test for the topomap_py extension module."""

import topomap_py as tm


def main():
    ktc = tm.Code("ktc", 4)
    assert (ktc.n, ktc.L, ktc.logical_count()) == (32, 4, 2)
    assert len(ktc.stabilizers()) == 32
    assert ktc.local_centralizer_check(2)

    tscc = tm.Code("tscc48", 4)
    assert tscc.is_subsystem and tscc.logical_count() == 2

    m = tm.CliffordMap.find("tcc48", "ktc-stack:2", 1)
    assert m.v <= 2 and m.ancillas == (0, 0)
    assert all(m.verify(l) for l in (2, 3, 4))
    assert tm.CliffordMap.parse(m.to_text()).to_text() == m.to_text()

    t = tm.charges("ktc", 4)
    assert sorted(t["charges"]) == ["0", "e", "f", "m"]
    assert sorted(t["spins"]) == [-1, 1, 1, 1]
    labels = dict(tm.charges("tscc48", 4)["labels"])
    assert labels == {"f1": "[m,f]", "f2": "[e,f]", "f3": "[f,0]"}, labels

    dec = tm.Decoder("tcc48", 6)
    err = dec.sample("bit_flip", 0.02, 7, 0)
    corr, ok = dec.decode(err)
    assert isinstance(corr, str) and isinstance(ok, bool)
    assert dec.decode("+1; 2,3,1:X")[1]

    fails, trials = tm.threshold_point("ktc", "bit_flip", 0.0, 6, 100, 1)
    assert (fails, trials) == (0, 100)

    pairs = tm.min_weight_perfect_matching([[0, 1, 5, 5], [1, 0, 5, 5], [5, 5, 0, 2], [5, 5, 2, 0]])
    assert sorted(tuple(sorted(p)) for p in pairs) == [(0, 1), (2, 3)]
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
