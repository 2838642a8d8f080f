# Regenerates the frozen oracle values used by the unit tests.
import numpy as np
from scipy import signal, stats

np.set_printoptions(precision=17)

welch = [
    ([1.0, 2.0, 3.0, 4.0, 5.0], [2.0, 4.0, 6.0, 8.0, 10.0, 12.0]),
    ([0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0], [1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0]),
    ([3.1, 2.7, 3.9, 4.4, 3.3], [5.2, 4.8, 6.1]),
    ([10.5, 9.8, 11.2, 10.1, 10.9, 10.0], [10.4, 10.6, 10.2, 10.8, 10.3, 10.5]),
    ([-1.5, 0.2, 2.8, -0.7, 1.1, 0.4, -2.2, 0.9], [0.1, -0.3, 0.25, 0.05]),
]
print("// Welch fixtures: t, df, p")
for a, b in welch:
    a, b = np.array(a), np.array(b)
    r = stats.ttest_ind(a, b, equal_var=False)
    va, vb = a.var(ddof=1) / len(a), b.var(ddof=1) / len(b)
    df = (va + vb) ** 2 / (va ** 2 / (len(a) - 1) + vb ** 2 / (len(b) - 1))
    print(f"{{{float(r.statistic)!r}, {float(df)!r}, {float(r.pvalue)!r}}},")

print("// Butterworth |H| (order, cutoff, highpass, omega/pi, magnitude)")
for order, wc, hp in [(6, 0.25, False), (6, 0.3, True), (4, 0.1, False), (2, 0.5, True)]:
    sos = signal.butter(order, wc, btype="highpass" if hp else "lowpass", output="sos")
    for w in [0.05, 0.2, 0.25, 0.3, 0.6, 0.9]:
        _, h = signal.sosfreqz(sos, worN=[w * np.pi])
        print(f"{{{order}, {wc}, {str(hp).lower()}, {w}, {float(abs(h[0]))!r}}},")

print("// P(BA >= 13/16) for fair bits:", repr(float(stats.binom.sf(12, 16, 0.5))))
