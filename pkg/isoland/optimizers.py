from __future__ import absolute_import
import numpy as np
from collections import namedtuple
from scipy.optimize import minimize_scalar

from .utils.generic_utils import get_from_module


class NoConvergence(Exception):
    '''Coordinate ascent ran out of iterations.

    # Properties
        best: best point found so far (whatever the caller stores there).
    '''
    def __init__(self, message, best=None):
        super(NoConvergence, self).__init__(message)
        self.best = best


Candidate = namedtuple('Candidate', ['x', 'y', 'value', 'iterations'])


def hybrid_grid(lo, hi, n):
    '''n points on [lo, hi]: half log-spaced, half linearly spaced.'''
    if lo <= 0:
        return np.linspace(lo, hi, n)
    grid = np.concatenate([np.geomspace(lo, hi, n // 2 + n % 2),
                           np.linspace(lo, hi, n // 2)])
    return np.unique(grid)


def line_search(f, lo, hi, xatol=1e-10, maxiter=500):
    '''Maximize a scalar function on [lo, hi] (bounded Brent / golden section).

    Returns (argmax, max); the endpoints are compared explicitly, so an
    optimum on the boundary is returned exactly.
    '''
    if hi - lo <= 0:
        return lo, f(lo)
    res = minimize_scalar(lambda t: -f(t), bounds=(lo, hi), method='bounded',
                          options={'xatol': xatol, 'maxiter': maxiter})
    best_x, best_f = float(res.x), -float(res.fun)
    for edge in (lo, hi):
        if abs(edge - best_x) <= 1e3 * xatol * (1. + abs(edge)):
            value = f(edge)
            if value >= best_f:
                best_x, best_f = edge, value
    return best_x, best_f


class Optimizer(object):
    '''Abstract maximizer base class.

    Maximizers work on a two-dimensional box whose second coordinate may
    have bounds depending on the first:

        x in [x_lo, x_hi], y in bounds_fn(x).

    The objective is called as `objective(x, y)` with scalar x and array y
    and must return an array shaped like y.
    '''
    def __init__(self, **kwargs):
        self.__dict__.update(kwargs)

    def maximize(self, objective, x_grid, bounds_fn):
        raise NotImplementedError

    def get_config(self):
        return {'name': self.__class__.__name__}


class GridAscent(Optimizer):
    '''Coarse grid search followed by multi-start coordinate ascent.

    # Arguments
        grid_size: int. Number of points per axis of the coarse grid.
        top_k: int. Number of best grid cells polished.
        tol: float. Convergence tolerance on the objective.
        max_iters: int. Sweeps of coordinate ascent per start.
        xatol: float. Absolute tolerance of each line search.
        tie_tol: float. Candidates within tie_tol of the best are ties.
        window: float. Half-width of the second coordinate window, in
            standard units of the problem.
        truncation: float. Truncation of an unbounded first coordinate,
            in units of its natural scale.
    '''
    def __init__(self, grid_size=96, top_k=8, tol=1e-8, max_iters=200,
                 xatol=1e-10, tie_tol=1e-9, window=8., truncation=8., *args, **kwargs):
        super(GridAscent, self).__init__(**kwargs)
        self.grid_size = int(grid_size)
        self.top_k = int(top_k)
        self.tol = float(tol)
        self.max_iters = int(max_iters)
        self.xatol = float(xatol)
        self.tie_tol = float(tie_tol)
        self.window = float(window)
        self.truncation = float(truncation)

    def _coarse(self, objective, x_grid, bounds_fn):
        cells = []
        for i, x in enumerate(x_grid):
            lo, hi = bounds_fn(x)
            ys = np.linspace(lo, hi, self.grid_size) if hi > lo else np.array([lo])
            values = np.asarray(objective(x, ys), dtype='float64')
            for j in range(len(ys)):
                if np.isfinite(values[j]):
                    cells.append((values[j], i, ys[j]))
        if not cells:
            raise Exception('Empty feasible set: the objective is not finite anywhere on the grid.')
        cells.sort(key=lambda cell: -cell[0])
        return cells[:self.top_k]

    def _polish(self, objective, x_grid, bounds_fn, i, y):
        scalar = lambda x, y: float(np.asarray(objective(x, np.array([y])))[0])
        x_min, x_max = x_grid[0], x_grid[-1]
        x = x_grid[i]
        # local bracket for x: one grid cell either side, recentred as x moves
        width = max(x_grid[min(i + 1, len(x_grid) - 1)] - x, x - x_grid[max(i - 1, 0)])
        value = scalar(x, y)
        for it in range(self.max_iters):
            lo, hi = bounds_fn(x)
            y, value_y = line_search(lambda t: scalar(x, t), lo, hi, self.xatol)
            a, b = max(x_min, x - width), min(x_max, x + width)

            def along_x(s):
                lo_s, hi_s = bounds_fn(s)
                return scalar(s, min(max(y, lo_s), hi_s))
            new_x, new_value = line_search(along_x, a, b, self.xatol)
            if new_value < value_y:
                new_x, new_value = x, value_y
            lo, hi = bounds_fn(new_x)
            y = min(max(y, lo), hi)
            on_bracket_edge = (new_x in (a, b)) and new_x not in (x_min, x_max)
            step = abs(new_x - x)
            improvement = new_value - value
            x, value = new_x, new_value
            if on_bracket_edge:
                continue
            if improvement <= 1e-2 * self.tol and step <= 1e-6 * (1. + abs(x)):
                return Candidate(x, y, value, it + 1)
            width = max(4. * step, 0.25 * width, 1e3 * self.xatol * (1. + abs(x)))
        raise NoConvergence('Coordinate ascent did not converge in %d sweeps.' % self.max_iters,
                            best=Candidate(x, y, value, self.max_iters))

    def maximize(self, objective, x_grid, bounds_fn):
        '''Returns (best, candidates): candidates sorted by decreasing value;
        among near-ties the smallest x, then the smallest y, wins.
        '''
        x_grid = np.asarray(x_grid, dtype='float64')
        starts = self._coarse(objective, x_grid, bounds_fn)
        candidates = []
        best_partial = None
        for _, i, y in starts:
            try:
                candidates.append(self._polish(objective, x_grid, bounds_fn, i, y))
            except NoConvergence as e:
                if best_partial is None or e.best.value > best_partial.value:
                    best_partial = e.best
        if not candidates:
            raise NoConvergence('No start converged.', best=best_partial)
        candidates.sort(key=lambda c: -c.value)
        top = candidates[0].value
        ties = [c for c in candidates if c.value >= top - self.tie_tol]
        best = sorted(ties, key=lambda c: (c.x, c.y))[0]
        return best, candidates

    def get_config(self):
        return {'name': self.__class__.__name__,
                'grid_size': self.grid_size,
                'top_k': self.top_k,
                'tol': self.tol,
                'max_iters': self.max_iters,
                'xatol': self.xatol,
                'tie_tol': self.tie_tol,
                'window': self.window,
                'truncation': self.truncation}


# aliases
grid_ascent = GridAscent


def get(identifier, kwargs=None):
    return get_from_module(identifier, globals(), 'optimizer',
                           instantiate=True, kwargs=kwargs)
