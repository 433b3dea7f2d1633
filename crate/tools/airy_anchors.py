"""Print the (Ai, Ai') anchor table used by the core crate's Airy evaluator.

Anchors sit at x0 = -10.5 + 0.5 k, k = 0..42, computed at 40 digits and
rounded to the nearest double.
"""

import mpmath as mp

mp.mp.dps = 40


def main():
    print("static ANCHORS: [(f64, f64); 43] = [")
    for k in range(43):
        x0 = mp.mpf(-10.5) + mp.mpf(k) / 2
        a = float(mp.airyai(x0))
        d = float(mp.airyai(x0, derivative=1))
        print(f"    ({a!r}, {d!r}),")
    print("];")


if __name__ == "__main__":
    main()
