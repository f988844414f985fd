"""Moment-invariant features for binary glyph images.

The 18-dimensional vector is the concatenation of the seven Hu invariants
of the image, the seven Hu invariants of its thinned skeleton, and the
first four affine moment invariants (Flusser-Suk), in that order.

Coordinate convention: pixel centers at integer coordinates, x = column,
y = row, origin at the top-left corner.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

N_MOMENT_FEATURES = 18


class EmptyImageError(ValueError):
    """Raised when normalized moments are requested for an all-zero image."""


def as_binary_image(image) -> np.ndarray:
    img = np.asarray(image)
    if img.ndim != 2 or img.size == 0:
        raise ValueError(f"expected a non-degenerate 2-D image, got shape {img.shape}")
    if not np.isin(img, (0, 1, False, True)).all():
        raise ValueError("image pixels must be binary")
    return img.astype(bool)


@dataclass(frozen=True)
class MomentSet:
    """Raw (m), central (mu) and normalized central (eta) moments, p+q <= 3.

    Arrays are indexed [p, q]; eta is populated for 2 <= p+q <= 3 and zero
    elsewhere. mu[0, 0] equals m[0, 0] by construction.
    """

    m: np.ndarray
    mu: np.ndarray
    eta: np.ndarray
    centroid: tuple[float, float]


def raw_moments(image) -> np.ndarray:
    """Raw moments m_pq = sum x^p y^q I(x, y) for p+q <= 3; total function."""
    img = as_binary_image(image).astype(np.float64)
    h, w = img.shape
    x = np.arange(w, dtype=np.float64)
    y = np.arange(h, dtype=np.float64)
    # column/row marginals weighted by powers; m[p, q] = (y^q)' I (x^p)
    xp = np.stack([x**p for p in range(4)])        # (4, w)
    yq = np.stack([y**q for q in range(4)])        # (4, h)
    m = np.zeros((4, 4))
    proj = yq @ img                                # (4, w): sums over rows
    for p in range(4):
        for q in range(4):
            if p + q <= 3:
                m[p, q] = proj[q] @ xp[p]
    return m


def moments(image) -> MomentSet:
    """Raw, central and normalized central moments of a non-empty image."""
    img = as_binary_image(image)
    m = raw_moments(img)
    m00 = m[0, 0]
    if m00 == 0:
        raise EmptyImageError("empty image: normalized moments are undefined")
    cx, cy = m[1, 0] / m00, m[0, 1] / m00
    h, w = img.shape
    dx = np.arange(w, dtype=np.float64) - cx
    dy = np.arange(h, dtype=np.float64) - cy
    xp = np.stack([dx**p for p in range(4)])
    yq = np.stack([dy**q for q in range(4)])
    proj = yq @ img.astype(np.float64)
    mu = np.zeros((4, 4))
    for p in range(4):
        for q in range(4):
            if p + q <= 3:
                mu[p, q] = proj[q] @ xp[p]
    eta = np.zeros((4, 4))
    for p in range(4):
        for q in range(4):
            if 2 <= p + q <= 3:
                eta[p, q] = mu[p, q] / m00 ** (1 + (p + q) / 2)
    return MomentSet(m=m, mu=mu, eta=eta, centroid=(cx, cy))


def _crop_to_content(img: np.ndarray) -> np.ndarray:
    # Invariant computations run on the bounding box, so integer translations
    # of the glyph produce bit-identical arithmetic.
    if not img.any():
        return img
    rows = np.flatnonzero(img.any(axis=1))
    cols = np.flatnonzero(img.any(axis=0))
    return img[rows[0] : rows[-1] + 1, cols[0] : cols[-1] + 1]


def hu_moments(image) -> np.ndarray:
    """The seven classical Hu invariants of a non-empty binary image."""
    e = moments(_crop_to_content(as_binary_image(image))).eta
    n20, n02, n11 = e[2, 0], e[0, 2], e[1, 1]
    n30, n03, n21, n12 = e[3, 0], e[0, 3], e[2, 1], e[1, 2]
    a = n30 + n12
    b = n21 + n03
    c = n30 - 3 * n12
    d = 3 * n21 - n03
    phi = np.empty(7)
    phi[0] = n20 + n02
    phi[1] = (n20 - n02) ** 2 + 4 * n11**2
    phi[2] = c**2 + d**2
    phi[3] = a**2 + b**2
    phi[4] = c * a * (a**2 - 3 * b**2) + d * b * (3 * a**2 - b**2)
    phi[5] = (n20 - n02) * (a**2 - b**2) + 4 * n11 * a * b
    phi[6] = d * a * (a**2 - 3 * b**2) - c * b * (3 * a**2 - b**2)
    return phi


def affine_invariants(image) -> np.ndarray:
    """The first four affine moment invariants (central moments up to order 3)."""
    ms = moments(_crop_to_content(as_binary_image(image)))
    mu = ms.mu
    u00 = mu[0, 0]
    u20, u02, u11 = mu[2, 0], mu[0, 2], mu[1, 1]
    u30, u03, u21, u12 = mu[3, 0], mu[0, 3], mu[2, 1], mu[1, 2]
    i1 = (u20 * u02 - u11**2) / u00**4
    i2 = (
        u30**2 * u03**2
        - 6 * u30 * u21 * u12 * u03
        + 4 * u30 * u12**3
        + 4 * u21**3 * u03
        - 3 * u21**2 * u12**2
    ) / u00**10
    i3 = (
        u20 * (u21 * u03 - u12**2)
        - u11 * (u30 * u03 - u21 * u12)
        + u02 * (u30 * u12 - u21**2)
    ) / u00**7
    i4 = (
        u20**3 * u03**2
        - 6 * u20**2 * u11 * u12 * u03
        - 6 * u20**2 * u02 * u21 * u03
        + 9 * u20**2 * u02 * u12**2
        + 12 * u20 * u11**2 * u21 * u03
        + 6 * u20 * u11 * u02 * u30 * u03
        - 18 * u20 * u11 * u02 * u21 * u12
        - 8 * u11**3 * u30 * u03
        - 6 * u20 * u02**2 * u30 * u12
        + 9 * u20 * u02**2 * u21**2
        + 12 * u11**2 * u02 * u30 * u12
        - 6 * u11 * u02**2 * u30 * u21
        + u02**3 * u30**2
    ) / u00**11
    return np.array([i1, i2, i3, i4])


def _thinning_pass(img: np.ndarray, subiter: int) -> np.ndarray:
    # Guo-Hall conditions on the 8-neighborhood
    #   p9 p2 p3
    #   p8 p  p4
    #   p7 p6 p5
    p = np.pad(img, 1)
    p2 = p[:-2, 1:-1]; p3 = p[:-2, 2:]; p4 = p[1:-1, 2:]; p5 = p[2:, 2:]
    p6 = p[2:, 1:-1]; p7 = p[2:, :-2]; p8 = p[1:-1, :-2]; p9 = p[:-2, :-2]
    c = (
        (~p2 & (p3 | p4)).astype(np.int8)
        + (~p4 & (p5 | p6)).astype(np.int8)
        + (~p6 & (p7 | p8)).astype(np.int8)
        + (~p8 & (p9 | p2)).astype(np.int8)
    )
    n1 = (p9 | p2).astype(np.int8) + (p3 | p4).astype(np.int8) \
        + (p5 | p6).astype(np.int8) + (p7 | p8).astype(np.int8)
    n2 = (p2 | p3).astype(np.int8) + (p4 | p5).astype(np.int8) \
        + (p6 | p7).astype(np.int8) + (p8 | p9).astype(np.int8)
    n = np.minimum(n1, n2)
    if subiter == 0:
        mask = (p6 | p7 | ~p9) & p8
    else:
        mask = (p2 | p3 | ~p5) & p4
    kill = img & (c == 1) & (n >= 2) & (n <= 3) & ~mask
    out = img.copy()
    out[kill] = False
    return out


def _thin_fixed_frame(img: np.ndarray) -> np.ndarray:
    while True:
        nxt = _thinning_pass(_thinning_pass(img, 0), 1)
        if np.array_equal(nxt, img):
            return nxt
        img = nxt


def _canonical_rotation(img: np.ndarray) -> int:
    best_k = 0
    best_key = None
    cur = img
    for k in range(4):
        key = (cur.shape, cur.tobytes())
        if best_key is None or key < best_key:
            best_key, best_k = key, k
        cur = np.rot90(cur)
    return best_k


def thin(image) -> np.ndarray:
    """Two-subiteration morphological thinning to a one-pixel-wide skeleton.

    The subiteration masks are direction-biased, so the image is rotated to
    a canonical orientation (lexicographic minimum over the four quarter
    turns) before each thinning round; thinning therefore commutes exactly
    with 90-degree rotations. Iterates until a global fixed point, so the
    result is idempotent; 8-connectivity of the input is preserved. An empty
    image maps to an empty image.
    """
    img = as_binary_image(image).copy()
    while True:
        # orientation key comes from the cropped content, so the choice is
        # blind to where the glyph sits on the canvas
        k = _canonical_rotation(_crop_to_content(img))
        out = np.rot90(_thin_fixed_frame(np.rot90(img, k)), 4 - k)
        if np.array_equal(out, img):
            return out
        img = out


@dataclass(frozen=True)
class MomentFeatures:
    """hu | hu of the thinned image | affine invariants, 18 entries total."""

    hu: np.ndarray
    hu_thinned: np.ndarray
    affine: np.ndarray

    def as_vector(self) -> np.ndarray:
        v = np.concatenate([self.hu, self.hu_thinned, self.affine])
        assert v.shape == (N_MOMENT_FEATURES,)
        return v


def log_compress(values: np.ndarray) -> np.ndarray:
    """sign(v) * log(1 + |v|); tames the dynamic range of raw invariants."""
    v = np.asarray(values, dtype=np.float64)
    return np.sign(v) * np.log1p(np.abs(v))


def extract_moment_features(image, compress: bool = False) -> MomentFeatures:
    """Full 18-feature extraction; `compress` applies log compression."""
    img = as_binary_image(image)
    hu = hu_moments(img)
    hu_t = hu_moments(thin(img))
    aff = affine_invariants(img)
    if compress:
        hu, hu_t, aff = log_compress(hu), log_compress(hu_t), log_compress(aff)
    return MomentFeatures(hu=hu, hu_thinned=hu_t, affine=aff)


def write_moment_csv(images, labels, out) -> int:
    """One CSV line per image: 18 floats at 17 significant digits plus label."""
    n = 0
    for img, label in zip(images, labels):
        vec = extract_moment_features(img).as_vector()
        out.write(",".join(f"{v:.17g}" for v in vec) + f",{int(label)}\n")
        n += 1
    return n
