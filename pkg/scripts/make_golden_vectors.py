"""Freeze PSS/SSS reference sequences into tests/data.

Uses a plain-Python shift register written directly from the TS 38.211
recursions, independent of the package, so the frozen files act as an
oracle for ``stealthsim.nr_sync_signals``.
"""
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "tests" / "data"


def mseq(init, taps, n=127):
    # init lists x(6) x(5) ... x(0) as printed in the standard
    x = list(reversed(init))
    while len(x) < n:
        i = len(x) - 7
        x.append(sum(x[i + t] for t in taps) % 2)
    return x[:n]


def pss(n_id_2):
    x = mseq([1, 1, 1, 0, 1, 1, 0], (4, 0))
    return [1 - 2 * x[(n + 43 * n_id_2) % 127] for n in range(127)]


def sss(n_id_1, n_id_2):
    x0 = mseq([0, 0, 0, 0, 0, 0, 1], (4, 0))
    x1 = mseq([0, 0, 0, 0, 0, 0, 1], (1, 0))
    m0 = 15 * (n_id_1 // 112) + 5 * n_id_2
    m1 = n_id_1 % 112
    return [(1 - 2 * x0[(n + m0) % 127]) * (1 - 2 * x1[(n + m1) % 127]) for n in range(127)]


SSS_CELLS = [(0, 0), (0, 1), (1, 0), (111, 2), (112, 0), (223, 1), (335, 2)]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rows = [pss(k) for k in range(3)]
    (OUT / "pss.txt").write_text("\n".join(" ".join(map(str, r)) for r in rows) + "\n")
    lines = [f"{a} {b} " + " ".join(map(str, sss(a, b))) for a, b in SSS_CELLS]
    (OUT / "sss.txt").write_text("\n".join(lines) + "\n")
    print(f"wrote {OUT / 'pss.txt'} and {OUT / 'sss.txt'}")


if __name__ == "__main__":
    main()
