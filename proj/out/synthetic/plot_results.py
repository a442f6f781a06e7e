#!/usr/bin/env python3
import csv, collections
import matplotlib.pyplot as plt
rows = list(csv.DictReader(open('aggregate.csv')))
by = collections.defaultdict(list)
for r in rows:
    by[r['method']].append((float(r['epsilon']), float(r['mean_gap']), float(r['std_gap'])))
for method, pts in sorted(by.items()):
    pts.sort()
    xs, ys, es = zip(*pts)
    plt.errorbar(xs, ys, yerr=es, label=method)
plt.xlabel('epsilon'); plt.ylabel('utility gap'); plt.legend()
plt.savefig('utility_gap.png', dpi=150)
