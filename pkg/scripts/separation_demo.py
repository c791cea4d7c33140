"""Two harmonic speakers (f0 = 110 Hz and 150 Hz) through a 24-band log-scale gammatone bank.

Prints per-band RMS (dBFS) for each speaker alone and for the mix.
"""

import numpy as np

from auditory_fb.design import ConstantQ, DesignRequest, design_filterbank
from auditory_fb.gammatone import apply_filterbank, gammatone_q_factor
from auditory_fb.scales import LogScale
from auditory_fb.signals import HarmonicSpeaker, SampledSignal, synthesize

FS = 16000
DURATION = 0.5


def db(x):
    return 20 * np.log10(max(x, 1e-12))


def main():
    design = design_filterbank(DesignRequest(200.0, 3600.0, 24, LogScale(), ConstantQ(gammatone_q_factor(4, 7.7))))
    a = synthesize(HarmonicSpeaker.uniform(110.0, 10, amplitude=0.05), DURATION, FS)
    b = synthesize(HarmonicSpeaker.uniform(150.0, 10, amplitude=0.05), DURATION, FS)
    both = SampledSignal(a.samples + b.samples, FS)
    skip = FS // 20  # ignore onset transients
    rms = {
        name: [np.sqrt(np.mean(x.samples[skip:] ** 2)) for x in apply_filterbank(design, 4, sig)]
        for name, sig in (("110 Hz", a), ("150 Hz", b), ("mix", both))
    }
    print(f"{'band':>4} {'center':>9} {'110 Hz':>8} {'150 Hz':>8} {'mix':>8}")
    for i, fc in enumerate(design.centers):
        print(f"{i + 1:>4} {fc:9.1f} {db(rms['110 Hz'][i]):8.1f} {db(rms['150 Hz'][i]):8.1f} {db(rms['mix'][i]):8.1f}")


if __name__ == "__main__":
    main()
