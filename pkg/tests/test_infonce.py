import math

import numpy as np
import pytest
import torch

from tweetkit.embeddings.infonce import (ContrastiveConfig, infonce_loss,
                                         infonce_loss_torch)
from tweetkit.errors import BatchTooSmall, NonNormalizedInput


def unit_rows(rows):
    arr = np.asarray(rows, dtype=float)
    return arr / np.linalg.norm(arr, axis=1, keepdims=True)


class TestInfonceValues:
    def test_all_identical_gives_ln3(self):
        v = unit_rows([[1, 0], [1, 0]])
        for tau in (0.05, 0.5, 1.0, 7.0):
            assert infonce_loss(v, v.copy(), tau) == pytest.approx(math.log(3), abs=1e-9)

    def test_hand_computed_orthogonal_batch(self):
        t = unit_rows([[1, 0], [0, 1]])
        r = unit_rows([[1, 0], [0, 1]])
        want = -math.log(math.e / (math.e + 2))
        assert infonce_loss(t, r, 1.0) == pytest.approx(want, abs=1e-6)
        assert want == pytest.approx(0.5514, abs=1e-4)

    def test_low_temperature_limit(self):
        t = unit_rows([[1, 0], [0, 1]])
        r = unit_rows([[1, 0], [0, 1]])
        assert infonce_loss(t, r, 0.01) < 1e-4

    def test_loss_nonnegative_random(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            n, d = rng.integers(2, 9), rng.integers(2, 6)
            t = unit_rows(rng.normal(size=(n, d)))
            r = unit_rows(rng.normal(size=(n, d)))
            assert infonce_loss(t, r, 0.5) >= 0.0

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(1)
        t = unit_rows(rng.normal(size=(6, 4)))
        r = unit_rows(rng.normal(size=(6, 4)))
        base = infonce_loss(t, r, 0.2)
        perm = rng.permutation(6)
        assert infonce_loss(t[perm], r[perm], 0.2) == pytest.approx(base, abs=1e-9)

    def test_one_direction_mode(self):
        rng = np.random.default_rng(2)
        t = unit_rows(rng.normal(size=(4, 3)))
        r = unit_rows(rng.normal(size=(4, 3)))
        sym = infonce_loss(t, r, 0.3, symmetric=True)
        one = infonce_loss(t, r, 0.3, symmetric=False)
        assert sym != one  # generally distinct

    def test_cross_view_only_negatives(self):
        # with same-view negatives off, candidates per anchor are the N replies
        t = unit_rows([[1, 0], [1, 0]])
        r = unit_rows([[1, 0], [1, 0]])
        want = math.log(2)  # uniform over 2 candidates
        got = infonce_loss(t, r, 1.0, include_same_view_negatives=False)
        assert got == pytest.approx(want, abs=1e-9)


class TestInfonceErrors:
    def test_batch_too_small(self):
        v = unit_rows([[1, 0]])
        with pytest.raises(BatchTooSmall):
            infonce_loss(v, v, 1.0)

    def test_non_normalized(self):
        t = np.array([[1.0, 0.0], [0.0, 2.0]])
        with pytest.raises(NonNormalizedInput):
            infonce_loss(t, unit_rows([[1, 0], [0, 1]]), 1.0)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ContrastiveConfig(temperature=0.0)
        with pytest.raises(BatchTooSmall):
            ContrastiveConfig(batch_size=1)


class TestTorchMirror:
    def test_matches_numpy(self):
        rng = np.random.default_rng(4)
        for sym in (True, False):
            for same_view in (True, False):
                t = unit_rows(rng.normal(size=(5, 3)))
                r = unit_rows(rng.normal(size=(5, 3)))
                got = infonce_loss_torch(torch.tensor(t), torch.tensor(r), 0.1,
                                         symmetric=sym,
                                         include_same_view_negatives=same_view)
                want = infonce_loss(t, r, 0.1, symmetric=sym,
                                    include_same_view_negatives=same_view)
                assert float(got) == pytest.approx(want, abs=1e-9)

    def test_gradient_matches_finite_differences(self):
        """Analytic (autograd) gradients of the loss through a 2-parameter
        linear encoder vs central differences on the numpy loss."""
        rng = np.random.default_rng(7)
        feats_t = rng.normal(size=(3, 2))
        feats_r = rng.normal(size=(3, 2))
        # encoder: x -> [w0 * x0, w1 * x1], then L2 normalization
        w = torch.tensor([0.8, 1.3], dtype=torch.float64, requires_grad=True)

        def loss_torch(weights):
            t = torch.nn.functional.normalize(torch.tensor(feats_t) * weights, dim=1)
            r = torch.nn.functional.normalize(torch.tensor(feats_r) * weights, dim=1)
            return infonce_loss_torch(t, r, 0.5)

        loss = loss_torch(w)
        loss.backward()
        analytic = w.grad.numpy()

        def loss_numpy(weights):
            t = feats_t * weights
            r = feats_r * weights
            t = t / np.linalg.norm(t, axis=1, keepdims=True)
            r = r / np.linalg.norm(r, axis=1, keepdims=True)
            return infonce_loss(t, r, 0.5)

        h = 1e-5
        for i in range(2):
            wp = np.array([0.8, 1.3])
            wm = wp.copy()
            wp[i] += h
            wm[i] -= h
            fd = (loss_numpy(wp) - loss_numpy(wm)) / (2 * h)
            assert abs(analytic[i] - fd) / max(abs(fd), 1e-12) < 1e-4
