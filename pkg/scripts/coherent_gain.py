"""Correlator processing gain on single-antenna AWGN versus per-RE SNR."""
import argparse

import numpy as np

from stealthsim.detection import coherent_gain_db


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--draws", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"expected {10 * np.log10(127):.2f} dB")
    print("snr_re_db,gain_db")
    for snr in (-20, -10, -5, 0, 5, 10):
        print(f"{snr},{coherent_gain_db(snr, args.draws, rng):.2f}")


if __name__ == "__main__":
    main()
