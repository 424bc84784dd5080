#!/usr/bin/env python3
"""Hand simulation of the deterministic 5-host scenario: Blue always sleeps,
the B-line attacker advances the kill chain. Writes one line per step:
"t blue red reward levels" with rewards printed as %.17g."""
import sys

HOSTS = 5
SERVER = HOSTS - 1
LENGTH = 100
W_EXPLOITED, W_PRIVILEGED, W_IMPACT = 0.1, 0.5, 10.0
UNKNOWN, DISCOVERED, SCANNED, EXPLOITED, PRIVILEGED = range(5)


def bline(levels):
    if levels[SERVER] == PRIVILEGED:
        return ("Impact", SERVER)
    for kind, need in (("Escalate", EXPLOITED), ("Exploit", SCANNED), ("Scan", DISCOVERED)):
        for h in reversed(range(HOSTS)):
            if levels[h] == need:
                return (kind, h)
    return ("Discover", None)


def main(out):
    levels = [DISCOVERED] + [UNKNOWN] * (HOSTS - 1)
    for t in range(LENGTH):
        kind, h = bline(levels)
        impact = False
        if kind == "Discover":
            reach = {0}
            for i, lv in enumerate(levels):
                if lv >= EXPLOITED:
                    reach.update(j for j in (i - 1, i + 1) if 0 <= j < HOSTS)
            for i in reach:
                levels[i] = max(levels[i], DISCOVERED)
        elif kind == "Scan":
            levels[h] = SCANNED
        elif kind == "Exploit":
            levels[h] = EXPLOITED  # p_exploit = 1, no decoys or blocks
        elif kind == "Escalate":
            levels[h] = PRIVILEGED
        else:
            impact = True
        n_exp = sum(lv == EXPLOITED for lv in levels)
        n_priv = sum(lv == PRIVILEGED for lv in levels)
        reward = 0.0 - (W_EXPLOITED * n_exp + W_PRIVILEGED * n_priv) - W_IMPACT * (1.0 if impact else 0.0) \
            - 0.1 * 0.0 - 0.05 * 0
        red = kind if h is None else "%s(%d)" % (kind, h)
        out.write("%d Sleep %s %.17g %s\n" % (t, red, reward, ",".join(str(lv) for lv in levels)))


if __name__ == "__main__":
    main(sys.stdout)
