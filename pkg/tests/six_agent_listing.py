"""Expected update equations for the six-variable loop in natural order.

One line per update, written as ``target <- rhs``; ``X^2`` stands for
``X X`` and ``1/S_ii`` for a reciprocal base.
"""

LISTING = {
    1: """
S_11 <- A_11
w_1 <- b_1 / S_11
x_1 <- w_1 - L_21 x_2
y_11 <- 1/S_11 - L_21 y_21
""",
    2: """
S_22 <- A_22 - L_21^2 S_11
L_21 <- A_21 / S_11
w_2 <- (b_2 - L_21 S_11 w_1) / S_22
x_2 <- w_2 - L_32 x_3 - L_62 x_6
y_22 <- 1/S_22 - L_32 y_32 - L_62 y_62
y_21 <- -L_21 y_22
""",
    3: """
S_33 <- A_33 - L_32^2 S_22
L_32 <- A_32 / S_22
w_3 <- (b_3 - L_32 S_22 w_2) / S_33
x_3 <- w_3 - L_43 x_4 - L_63 x_6
y_33 <- 1/S_33 - L_43 y_43 - L_63 y_63
y_32 <- -L_32 y_33 - L_62 y_63
""",
    4: """
S_44 <- A_44 - L_43^2 S_33
L_43 <- A_43 / S_33
w_4 <- (b_4 - L_43 S_33 w_3) / S_44
x_4 <- w_4 - L_54 x_5 - L_64 x_6
y_44 <- 1/S_44 - L_54 y_54 - L_64 y_64
y_43 <- -L_43 y_44 - L_63 y_64
""",
    5: """
S_55 <- A_55 - L_54^2 S_44
L_54 <- A_54 / S_44
w_5 <- (b_5 - L_54 S_44 w_4) / S_55
x_5 <- w_5 - L_65 x_6
y_55 <- 1/S_55 - L_65 y_65
y_54 <- -L_54 y_55 - L_64 y_65
""",
    6: """
S_66 <- A_66 - L_65^2 S_55 - L_64^2 S_44 - L_63^2 S_33 - L_62^2 S_22
L_65 <- (A_65 - L_64 L_54 S_44) / S_55
L_64 <- -L_63 L_43 S_33 / S_44
L_63 <- -L_62 L_32 S_22 / S_33
L_62 <- A_62 / S_22
w_6 <- (b_6 - L_65 S_55 w_5 - L_64 S_44 w_4 - L_63 S_33 w_3 - L_62 S_22 w_2) / S_66
x_6 <- w_6
y_66 <- 1/S_66
y_65 <- -L_65 y_66
y_64 <- -L_64 y_66 - L_54 y_65
y_63 <- -L_63 y_66 - L_43 y_64
y_62 <- -L_62 y_66 - L_32 y_63
""",
}


def _factors(term: str) -> tuple[str, ...]:
    out = []
    for tok in term.split():
        if tok.endswith("^2"):
            out += [tok[:-2]] * 2
        else:
            out.append(tok)
    return tuple(sorted(out))


def parse_line(line: str):
    """Signature ``(target, base, frozenset(terms), divisor)`` of one update."""
    target, rhs = (s.strip() for s in line.split("<-"))
    divisor = None
    if " / " in rhs:
        rhs, divisor = (s.strip() for s in rhs.rsplit(" / ", 1))
    rhs = rhs.strip()
    if rhs.startswith("(") and rhs.endswith(")"):
        rhs = rhs[1:-1]
    base = None
    if rhs.startswith("-"):
        chunks = rhs[1:].split(" - ")
    else:
        base, *chunks = rhs.split(" - ")
    terms = frozenset(_factors(c) for c in chunks)
    return target, base, terms, divisor


def expected_signatures(agent: int) -> list:
    return [parse_line(ln) for ln in LISTING[agent].strip().splitlines()]
