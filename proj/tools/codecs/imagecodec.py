#!/usr/bin/env python3
"""Lossless codec adapter for compress-eval.

    imagecodec.py encode {jpegls|jpeg2000} IN.pnm OUT
    imagecodec.py decode {jpegls|jpeg2000} IN OUT.pnm

Exits 2 when imagecodecs is missing so the harness treats the codec as unavailable.
"""
import sys

try:
    import imagecodecs
    import numpy as np
    from PIL import Image
except ImportError as exc:  # pragma: no cover
    sys.stderr.write(f"imagecodec.py: {exc}\n")
    sys.exit(2)

ENCODERS = {
    "jpegls": lambda a: imagecodecs.jpegls_encode(a, level=0),
    "jpeg2000": lambda a: imagecodecs.jpeg2k_encode(a, level=0, reversible=True),
}
DECODERS = {
    "jpegls": imagecodecs.jpegls_decode,
    "jpeg2000": imagecodecs.jpeg2k_decode,
}


def main(argv):
    if len(argv) != 5 or argv[1] not in ("encode", "decode") or argv[2] not in ENCODERS:
        sys.stderr.write(__doc__)
        return 1
    op, codec, src, dst = argv[1:]
    if op == "encode":
        pixels = np.asarray(Image.open(src))
        with open(dst, "wb") as f:
            f.write(ENCODERS[codec](pixels))
    else:
        with open(src, "rb") as f:
            pixels = DECODERS[codec](f.read())
        Image.fromarray(np.asarray(pixels, dtype=np.uint8)).save(dst, format="PPM")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
