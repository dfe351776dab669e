"""The radius function tau_m, covering lattices adapted to it, and the
subharmonic pointwise estimate."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from focklab.quadrature import log_disk_integral
from focklab.series import EntireSeries, polynomial_ensemble


class CoverageError(RuntimeError):
    def __init__(self, point):
        super().__init__(f"sample point {point!r} is not covered by the lattice")
        self.point = point


def tau(m: float, z) -> np.ndarray | float:
    """``1`` where ``|(m^2 - m) z| < 1``, else ``|z|^((2-m)/2) / |m^2 - m|^(1/2)``.

    For ``m = 1`` the coefficient vanishes and only the first case occurs.
    The two branches do not join continuously in general.
    """
    if not m > 0:
        raise ValueError("m must be positive")
    c = abs(m * m - m)
    r = np.abs(np.asarray(z, dtype=complex))
    out = np.ones(r.shape)
    if c > 0:
        far = c * r >= 1.0
        out[far] = r[far] ** ((2.0 - m) / 2.0) / math.sqrt(c)
    return out if out.ndim else float(out)


def _tau_min(m, rmax):
    c = abs(m * m - m)
    vals = [1.0]
    if c > 0 and c * rmax >= 1.0:
        vals += [tau(m, 1.0 / c), tau(m, rmax)]
    return min(vals)


def _hex_grid(spacing, rmax):
    if rmax == 0:
        return np.zeros(1, dtype=complex)
    dy = spacing * math.sqrt(3.0) / 2.0
    rows = int(math.ceil(rmax / dy))
    cols = int(math.ceil(rmax / spacing)) + 1
    j, i = np.meshgrid(np.arange(-rows, rows + 1), np.arange(-cols, cols + 1), indexing="ij")
    x = spacing * (i + 0.5 * (j % 2))
    z = (x + 1j * dy * j).ravel()
    return z[np.abs(z) <= rmax]


def uniform_disk_samples(rng, n, rmax):
    u = rng.random((n, 2))
    return rmax * np.sqrt(u[:, 0]) * np.exp(2j * np.pi * u[:, 1])


@dataclass
class CoveringLattice:
    m: float
    sigma: float
    region_radius: float
    centers: np.ndarray = field(repr=False)
    radii: np.ndarray = field(repr=False)
    seed: int = 0
    checks: dict = field(default_factory=dict)

    def __len__(self):
        return self.centers.size

    def to_text(self) -> str:
        """Header line ``# m sigma Rmax seed`` then ``re im radius`` per center."""
        lines = [f"# {float(self.m)!r} {float(self.sigma)!r} {float(self.region_radius)!r} {int(self.seed)}"]
        lines += [f"{float(z.real)!r} {float(z.imag)!r} {float(r)!r}"
                  for z, r in zip(self.centers, self.radii)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CoveringLattice":
        rows = text.strip().splitlines()
        head = rows[0].lstrip("#").split()
        m, sigma, rmax = (float(v) for v in head[:3])
        data = np.array([[float(v) for v in row.split()] for row in rows[1:]]).reshape(-1, 3)
        return cls(m, sigma, rmax, data[:, 0] + 1j * data[:, 1], data[:, 2], int(head[3]))


def _greedy(cands, radii, centers, cr):
    """Greedy net over ordered candidates: accept a candidate iff it lies
    outside every accepted disk and no accepted center lies in its disk.
    With candidates in order of nonincreasing radius the second condition
    follows from the first."""
    tree = cKDTree(np.c_[cands.real, cands.imag])
    covered = np.zeros(cands.size, dtype=bool)
    if centers:
        for z, r in zip(centers, cr):
            idx = tree.query_ball_point((z.real, z.imag), r)
            if idx:
                idx = np.asarray(idx)
                covered[idx[np.abs(cands[idx] - z) < r]] = True
    for k in range(cands.size):
        if covered[k]:
            continue
        z, r = cands[k], radii[k]
        if centers:
            cz = np.asarray(centers)
            if np.any(np.abs(cz - z) < np.maximum(np.asarray(cr), r)):
                continue
        centers.append(z)
        cr.append(r)
        idx = np.asarray(tree.query_ball_point((z.real, z.imag), r))
        if idx.size:
            covered[idx[np.abs(cands[idx] - z) < r]] = True


def _order(m, sigma, pts):
    r = sigma * tau(m, pts)
    order = np.lexsort((np.abs(pts), -r))
    return pts[order], r[order]


def _margin(centers, radii, pts):
    """``max_k (r_k - |pt - z_k|)`` per point; negative means uncovered."""
    out = np.full(pts.size, -np.inf)
    if pts.size == 0 or centers.size == 0:
        return out
    tree = cKDTree(np.c_[centers.real, centers.imag])
    for i, nb in enumerate(tree.query_ball_point(np.c_[pts.real, pts.imag], radii.max())):
        if nb:
            nb = np.asarray(nb)
            out[i] = np.max(radii[nb] - np.abs(centers[nb] - pts[i]))
    return out


def _uncovered(centers, radii, pts):
    return ~(_margin(centers, radii, pts) > 0)


def _patches(pts, spacing, reach, rmax):
    """Hexagonal patch of the given spacing and radius ``reach`` around each point."""
    local = _hex_grid(spacing, reach)
    cloud = (pts[:, None] + local[None, :]).ravel()
    cloud = cloud[np.abs(cloud) <= rmax]
    key = np.round(cloud / (spacing * 1e-3))
    _, keep = np.unique(np.c_[key.real, key.imag], axis=0, return_index=True)
    return cloud[np.sort(keep)]


def _jump_circle(m, rmax):
    """Radius just outside the circle where ``tau`` jumps upward, or ``None``."""
    c = abs(m * m - m)
    if c == 0 or 1.0 / c >= rmax:
        return None
    rho = (1.0 / c) * (1.0 + 1e-9)
    return rho if tau(m, rho) > 1.0 else None


def _circle_points(rho, spacing):
    n = max(8, int(math.ceil(2.0 * math.pi * rho / spacing)))
    return rho * np.exp(2j * np.pi * np.arange(n) / n)


def build_covering(m: float, sigma: float, rmax: float, seed: int = 0,
                   samples: int = 10_000, refinements: int = 2,
                   verify: bool = True) -> CoveringLattice:
    """Greedy covering of ``|z| <= rmax`` by disks ``D(z_j, sigma tau_m(z_j))``.

    Candidates come from a hexagonal grid of spacing ``sigma min(tau)/4``
    and are visited by decreasing disk radius, ties by increasing ``|z|``; a
    candidate is accepted iff it lies outside every accepted disk and no
    accepted center lies in its own disk. Where ``tau`` jumps upward within
    reach of the region, an evenly spaced ring of centers is placed just
    outside the jump after the disks that cannot reach it, and (if the jump
    more than doubles ``tau``) no small disk may cross the jump. Slivers
    left between disks are then filled from patches of a 4x finer grid
    placed where the coarse grid sits close to a disk edge, ``refinements``
    times; patch points that still cannot host a center get one shifted
    off them.

    With ``verify`` the separation property is checked on all centers and
    coverage, containment and multiplicity on ``samples`` seeded random
    points; results land in ``lattice.checks``. A coverage failure raises
    ``CoverageError`` carrying the uncovered point.
    """
    if not m > 0:
        raise ValueError("m must be positive")
    if not 0 < sigma <= 1:
        raise ValueError("sigma must lie in (0, 1]")
    if rmax < 0:
        raise ValueError("rmax must be nonnegative")
    if rmax == 0:
        lat = CoveringLattice(m, sigma, 0.0, np.zeros(1, dtype=complex),
                              np.array([sigma * tau(m, 0.0)]), seed)
        if verify:
            lat.checks = verify_covering(lat, samples, seed)
        return lat

    h = sigma * _tau_min(m, rmax) / 4.0
    jump = _jump_circle(m, rmax)
    centers, cr = [], []
    grid = _hex_grid(h, rmax)
    extra = _circle_points(jump, h) if jump else np.zeros(0, dtype=complex)
    pts, rad = _order(m, sigma, np.concatenate((grid, extra)))
    _greedy(pts, rad, centers, cr)
    # every point of the region lies within h/sqrt(3) of a grid point, so gaps
    # can only hide next to grid points whose covering margin is below that
    for _ in range(refinements):
        reach = h / math.sqrt(3.0) * 1.01
        margin = _margin(np.asarray(centers), np.asarray(cr), grid)
        edge = grid[margin < reach]
        h /= 4.0
        grid = _patches(edge, h, reach, rmax)
        fine = grid[_uncovered(np.asarray(centers), np.asarray(cr), grid)]
        if fine.size:
            pts, rad = _order(m, sigma, fine)
            _greedy(pts, rad, centers, cr)
    lat = CoveringLattice(float(m), float(sigma), float(rmax), np.asarray(centers),
                          np.asarray(cr), seed)
    if verify:
        lat.checks = verify_covering(lat, samples, seed)
        if not lat.checks["coverage"]:
            raise CoverageError(lat.checks["uncovered_point"])
    return lat


def separation_violations(lat: CoveringLattice) -> int:
    """Ordered pairs ``j != k`` with ``z_j`` inside ``D(z_k, r_k)``."""
    c, r = lat.centers, lat.radii
    if c.size < 2:
        return 0
    tree = cKDTree(np.c_[c.real, c.imag])
    bad = 0
    for k, nb in enumerate(tree.query_ball_point(np.c_[c.real, c.imag], r)):
        nb = np.asarray([j for j in nb if j != k], dtype=int)
        if nb.size:
            bad += int(np.sum(np.abs(c[nb] - c[k]) < r[k]))
    return bad


def containment_violations(lat: CoveringLattice, rng, count: int) -> int:
    """Sample ``j``, ``z`` in ``D(z_j, r_j)``, ``w`` in ``D(z, sigma tau(z))``
    and count how often ``w`` escapes ``D(z_j, 3 r_j)``."""
    j = rng.integers(0, lat.centers.size, count)
    u = rng.random((count, 4))
    z = lat.centers[j] + lat.radii[j] * np.sqrt(u[:, 0]) * np.exp(2j * np.pi * u[:, 1])
    rz = lat.sigma * tau(lat.m, z)
    w = z + rz * np.sqrt(u[:, 2]) * np.exp(2j * np.pi * u[:, 3])
    return int(np.sum(np.abs(w - lat.centers[j]) >= 3.0 * lat.radii[j]))


def multiplicity(lat: CoveringLattice, samples: int, seed: int = 0) -> int:
    """Largest number of tripled disks ``D(z_j, 3 r_j)`` containing one of
    ``samples`` seeded uniform points of the region."""
    rng = np.random.default_rng(seed)
    pts = uniform_disk_samples(rng, samples, lat.region_radius)
    c, r3 = lat.centers, 3.0 * lat.radii
    tree = cKDTree(np.c_[c.real, c.imag])
    best = 0
    for i, nb in enumerate(tree.query_ball_point(np.c_[pts.real, pts.imag], r3.max())):
        if nb:
            nb = np.asarray(nb)
            best = max(best, int(np.sum(np.abs(c[nb] - pts[i]) < r3[nb])))
    return best


def verify_covering(lat: CoveringLattice, samples: int = 10_000, seed: int = 0,
                    containment_samples: int = 1000) -> dict:
    rng = np.random.default_rng(seed)
    pts = uniform_disk_samples(rng, samples, lat.region_radius)
    miss = _uncovered(lat.centers, lat.radii, pts)
    sep = separation_violations(lat)
    cont = containment_violations(lat, rng, containment_samples)
    nmax = multiplicity(lat, samples, seed + 1)
    return {
        "separation": sep == 0,
        "separation_violations": sep,
        "coverage": not miss.any(),
        "uncovered_point": complex(pts[miss][0]) if miss.any() else None,
        "containment": cont == 0,
        "containment_violations": cont,
        "multiplicity": nmax,
        "samples": samples,
        "containment_samples": containment_samples,
        "seed": seed,
    }


def pointwise_ratio(m: float, p: float, sigma: float, f: EntireSeries, z: complex,
                    rel_tol: float = 1e-8) -> float:
    """``|f(z)|^p e^(-p|z|^m)`` divided by
    ``(sigma tau(z))^(-2) int_{D(z, sigma tau(z))} |f|^p e^(-p|w|^m) dA(w)``."""
    if f.is_zero():
        raise ValueError("pointwise_ratio needs a nonzero f")
    z = complex(z)
    rad = sigma * tau(m, z)
    lnum = p * float(f.log_abs(np.array([z]))[0]) - p * abs(z) ** m
    if lnum == -math.inf:
        return 0.0
    lden = log_disk_integral(f, m, p, z, rad, rel_tol) - 2.0 * math.log(rad)
    return math.exp(lnum - lden)


def pointwise_grid(rmax: float = 10.0, rings: int = 4, per_ring: int = 8) -> np.ndarray:
    pts = [0j]
    for k in range(1, rings + 1):
        r = rmax * k / rings
        pts += list(r * np.exp(2j * np.pi * (np.arange(per_ring) + 0.5 * (k % 2)) / per_ring))
    return np.asarray(pts)


def pointwise_ceiling(m: float, p: float, sigma: float, seed: int, count: int,
                      min_degree: int = 1, max_degree: int = 20, rmax: float = 10.0) -> float:
    zs = pointwise_grid(rmax)
    best = 0.0
    for f in polynomial_ensemble(seed, count, min_degree, max_degree):
        for z in zs:
            best = max(best, pointwise_ratio(m, p, sigma, f, z))
    return best
