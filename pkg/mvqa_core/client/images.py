"""Pictures sent to models: colorized instance maps and category montages."""
import base64

import cv2
import numpy as np

from mvqa_core.modeling.render.instance_map import read_instance_map

BACKGROUND = (235, 235, 235)


def palette(n):
    """Deterministic, well separated BGR colors for ids 1..n (row 0 is background)."""
    colors = np.zeros((n + 1, 3), dtype=np.uint8)
    colors[0] = BACKGROUND
    for i in range(1, n + 1):
        hue = (i * 0.618033988749895) % 1.0
        hsv = np.uint8([[[int(hue * 179), 200, 90 + 120 * (i % 2)]]])
        colors[i] = cv2.cvtColor(hsv, cv2.COLOR_HSV2BGR)[0, 0]
    return colors


def colorize_instance_map(ids):
    n = int(ids.max()) if ids.size else 0
    return palette(n)[ids]


def encode_png(image):
    ok, buf = cv2.imencode(".png", image)
    if not ok:
        raise ValueError("PNG encoding failed")
    return buf.tobytes()


def image_bytes_to_data_uri(image_bytes):
    return "data:image/png;base64," + base64.b64encode(image_bytes).decode("utf-8")


def view_image_png(path):
    """PNG bytes for one view image; instance maps (.ppm) are colorized."""
    if path.endswith(".ppm"):
        return encode_png(colorize_instance_map(read_instance_map(path)))
    image = cv2.imread(path, cv2.IMREAD_COLOR)
    if image is None:
        raise FileNotFoundError("cannot read image {}".format(path))
    return encode_png(image)


def make_montage(images, cell=256, cols=None, labels=None):
    """Grid of equally sized cells, row-major in input order; each image is
    letterboxed into its cell and optionally captioned with its label."""
    if not images:
        raise ValueError("montage needs at least one image")
    cols = cols or int(np.ceil(np.sqrt(len(images))))
    rows = int(np.ceil(len(images) / float(cols)))
    canvas = np.full((rows * cell, cols * cell, 3), 255, dtype=np.uint8)
    for k, image in enumerate(images):
        if image.ndim == 2:
            image = cv2.cvtColor(image, cv2.COLOR_GRAY2BGR)
        h, w = image.shape[:2]
        s = (cell - 8) / float(max(h, w))
        resized = cv2.resize(image, (max(1, int(w * s)), max(1, int(h * s))),
                             interpolation=cv2.INTER_AREA)
        rh, rw = resized.shape[:2]
        y0 = (k // cols) * cell + (cell - rh) // 2
        x0 = (k % cols) * cell + (cell - rw) // 2
        canvas[y0:y0 + rh, x0:x0 + rw] = resized
        if labels is not None:
            cv2.putText(canvas, str(labels[k]), ((k % cols) * cell + 4, (k // cols) * cell + 16),
                        cv2.FONT_HERSHEY_SIMPLEX, 0.45, (0, 0, 0), 1, cv2.LINE_AA)
    return canvas
