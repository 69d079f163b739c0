#!/usr/bin/env python3
"""Sweep the public verification verdict against ground truth at l=8.

For every pair of set sizes up to a bound, draw many random share sets,
publish them with fresh one-time keys, run the public check, and compare
the verdict with a direct XOR comparison of the underlying sets. The
final table should show zero disagreements in every cell.
"""

import argparse
import random
import warnings

from asgs.kgh import AuthorizedShareSet, SchemeParams, SetRole, ShareVector
from asgs.protocol import ProtocolEnv
from asgs.pvss import Verdict, distribute_shares_and_keys, verify


def share_set(role, values, params):
    vectors = [ShareVector.from_int(params, v) for v in values]
    return AuthorizedShareSet.from_shares(role, vectors)


def sweep_cell(h, g, trials, rng, params):
    """Returns (positives, negatives, disagreements) for one (h, g) cell."""
    positives = negatives = disagreements = 0
    for trial in range(trials):
        set1 = [rng.randrange(256) for _ in range(h)]
        set2 = [rng.randrange(256) for _ in range(g)]
        if trial % 2 == 0:
            # Force agreement half the time so both verdicts are exercised.
            set2[-1] = 0
            xor1 = 0
            for v in set1:
                xor1 ^= v
            for v in set2:
                xor1 ^= v
            set2[-1] = xor1
        env = ProtocolEnv.seeded(rng.getrandbits(32), 8)
        bulletin, assignment = distribute_shares_and_keys(
            share_set(SetRole.TEMPLATE, set1, params),
            share_set(SetRole.MASTER, set2, params),
            env,
        )
        verdict = verify(bulletin, assignment, env).verdict
        truth = 0
        for v in set1 + set2:
            truth ^= v
        agree = truth == 0
        if verdict is Verdict.POSITIVE:
            positives += 1
        else:
            negatives += 1
        if (verdict is Verdict.POSITIVE) != agree:
            disagreements += 1
    return positives, negatives, disagreements


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-size", type=int, default=4, help="largest set size")
    parser.add_argument("--trials", type=int, default=256, help="trials per cell")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    params = SchemeParams.binary(8)
    rng = random.Random(args.seed)
    total_disagreements = 0
    print(f"{'h':>3} {'g':>3} {'positive':>9} {'negative':>9} {'disagree':>9}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        for h in range(1, args.max_size + 1):
            for g in range(1, args.max_size + 1):
                pos, neg, bad = sweep_cell(h, g, args.trials, rng, params)
                total_disagreements += bad
                print(f"{h:>3} {g:>3} {pos:>9} {neg:>9} {bad:>9}")
    print(f"\ntotal disagreements: {total_disagreements}")
    raise SystemExit(0 if total_disagreements == 0 else 1)


if __name__ == "__main__":
    main()
