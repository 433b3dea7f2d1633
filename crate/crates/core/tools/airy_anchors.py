"""Regenerates the anchor table in src/specfun.rs (Ai and Ai' at x0 = -10.5 + 0.5k)."""
import mpmath as mp

mp.mp.dps = 40
for k in range(43):
    x0 = mp.mpf(-10.5) + mp.mpf(k) / 2
    a = mp.airyai(x0)
    d = mp.airyai(x0, derivative=1)
    print(f"    ({float(a)!r}, {float(d)!r}),")
