"""Regenerates the checked-in test corpus under crates/core/tests/corpus.

Each clip is a window panning across a grayscale sample image from
scikit-image, with independent Gaussian sensor noise per frame. Some clips
get a one-second 8 kHz mono WAV. Output is deterministic.
"""

import pathlib
import wave

import numpy as np
from skimage import color, data, transform

OUT = pathlib.Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "corpus"

# name, loader, (width, height), frames, pan per frame (dx, dy), noise sigma, audio
CLIPS = [
    ("camera", data.camera, (64, 64), 24, (1, 0), 3.0, True),
    ("astronaut", lambda: color.rgb2gray(data.astronaut()), (96, 96), 20, (1, 1), 4.0, False),
    ("coins", data.coins, (80, 64), 32, (0, 1), 5.0, True),
    ("moon", data.moon, (128, 128), 16, (2, 0), 3.0, False),
    ("brick", data.brick, (64, 64), 28, (1, 1), 6.0, False),
    ("coffee", lambda: color.rgb2gray(data.coffee()), (128, 96), 18, (-1, 0), 4.0, True),
    ("grass", data.grass, (96, 64), 24, (0, -1), 5.0, False),
    ("chelsea", lambda: color.rgb2gray(data.chelsea()), (112, 80), 20, (1, 0), 3.5, True),
]


def to_u8(img):
    img = np.asarray(img, dtype=np.float64)
    if img.max() <= 1.0:
        img = img * 255.0
    return img


def write_pgm(path, frame):
    h, w = frame.shape
    path.write_bytes(b"P5\n%d %d\n255\n" % (w, h) + frame.tobytes())


def write_wav(path, rng, seconds=1.0, rate=8000):
    t = np.arange(int(seconds * rate)) / rate
    tone = 0.4 * np.sin(2 * np.pi * 440 * t) + 0.2 * np.sin(2 * np.pi * 660 * t)
    tone += rng.normal(0, 0.02, t.size)
    pcm = np.clip(tone * 32767, -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(rate)
        w.writeframes(pcm.tobytes())


def main():
    for seed, (name, load, (w, h), n, (dx, dy), sigma, audio) in enumerate(CLIPS):
        rng = np.random.default_rng(1000 + seed)
        src = to_u8(load())
        # scale so the window covers about half the source, leaving room to pan
        scale = 2.0 * max(w / src.shape[1], h / src.shape[0])
        src = transform.rescale(src, scale, anti_aliasing=True, preserve_range=True)
        x0 = (src.shape[1] - w) // 2 - dx * n // 2
        y0 = (src.shape[0] - h) // 2 - dy * n // 2
        d = OUT / name
        d.mkdir(parents=True, exist_ok=True)
        for old in d.glob("*"):
            old.unlink()
        for t in range(n):
            x, y = x0 + dx * t, y0 + dy * t
            win = src[y : y + h, x : x + w]
            assert win.shape == (h, w), (name, win.shape)
            frame = np.clip(np.rint(win + rng.normal(0, sigma, win.shape)), 0, 255).astype(np.uint8)
            write_pgm(d / f"frame_{t:03d}.pgm", frame)
        if audio:
            write_wav(d / "audio.wav", rng)
        print(name, f"{w}x{h}", n, "frames", "+audio" if audio else "")


if __name__ == "__main__":
    main()
