# make_fixtures.py
from pathlib import Path

import pandas as pd

DATA = Path("data")

# digits of the 2-adic solution of the sample chain; zero from index 8 on
TWO_ADIC_DIGITS = [1, 0, 1, 1, 0, 0, 1, 0]
TWO_ADIC_LEVELS = 16
BLOCK_LEVELS = 12


def digit(n: int) -> int:
    return TWO_ADIC_DIGITS[n] if n < len(TWO_ADIC_DIGITS) else 0


def partial_sum(start: int, stop: int) -> int:
    """sum of 2^(k-start) * a_k for start <= k <= stop"""
    return sum(2 ** (k - start) * digit(k) for k in range(start, stop + 1))


def write_witness_configs():
    (DATA / "w.txt").write_text(
        "# star = (0^w, 10^w); branch l lies in every part except part l\n"
        "kstar: 1\n"
        "star: *0, 1*0\n"
        "part 0: 1*0\n"
        "part 1: *0\n",
        encoding="utf-8",
    )
    (DATA / "w0.txt").write_text(
        "# kstar 0: y[*0;0] is divisible by every n! modulo the part\n"
        "kstar: 0\n"
        "star: *0\n"
        "part 0: 1*0\n",
        encoding="utf-8",
    )


def write_two_adic_chain():
    lines = ["# x_n = 2*x_(n+1) + a_n, targets are partial sums, tolerance 2^-(n+3)", "oracle: 2adic 32"]
    for n in range(TWO_ADIC_LEVELS):
        term = f"2*x{n + 1}+{digit(n)}" if digit(n) else f"2*x{n + 1}"
        lines.append(f"level {n}: x{n}; {term}; {partial_sum(n, 2 * n + 2)}; {n + 3}")
    (DATA / "two_adic_chain.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    rows = [{"level": n, "slot": f"x{n}", "value": partial_sum(n, len(TWO_ADIC_DIGITS))} for n in range(8)]
    pd.DataFrame(rows, columns=["level", "slot", "value"]).to_csv(DATA / "two_adic_expected.csv", index=False)


def block_cycle(n: int) -> str:
    """A 3-cycle on the first points of block n+1, a transposition for the two-point block."""
    start = (n + 1) * (n + 2) // 2
    points = [start, start + 1] if n == 0 else [start, start + 1, start + 2]
    return "(" + " ".join(str(p) for p in points) + ")"


def write_block_chain():
    lines = ["# x_n = x_(n+1)^2 * b_n over block permutations, targets the identity", "oracle: blocks 9"]
    for n in range(BLOCK_LEVELS):
        lines.append(f"level {n}: x{n}; x{n + 1}^2*b{n}; e; {n}")
    for n in range(BLOCK_LEVELS):
        lines.append(f"param {n} b{n} = {block_cycle(n)}")
    (DATA / "block_chain.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_models():
    pairs = " ".join(f"({a},{b})" for a in range(8) for b in range(8) if a < b)
    (DATA / "chain8.model").write_text(f"size: 8\nrelation < 2: {pairs}\n", encoding="utf-8")
    edges = " ".join(f"({a},{b})" for a in range(4) for b in range(4) if a != b)
    (DATA / "complete4.model").write_text(f"size: 4\nrelation E 2: {edges}\n", encoding="utf-8")


def write_presentations():
    (DATA / "presentation.txt").write_text(
        "kstar: 1\n"
        "branches: *0, 1*0\n"
        "element: 1 y[*0,1*0;0]\n"
        "element: 1 x[0;1*0;01] -1 x[1;*0;1]\n",
        encoding="utf-8",
    )
    (DATA / "quotient.txt").write_text(
        "kstar: 1\n"
        "branches: *0\n"
        "excluded: 1*0\n",
        encoding="utf-8",
    )


if __name__ == "__main__":
    DATA.mkdir(exist_ok=True)
    write_witness_configs()
    write_two_adic_chain()
    write_block_chain()
    write_models()
    write_presentations()
    print(f" Fixtures written to {DATA}/")
