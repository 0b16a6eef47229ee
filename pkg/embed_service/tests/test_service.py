import threading
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from embed_service.app import MAX_BATCH, MAX_TEXT_LENGTH, create_app
from embed_service.backends import (BackendError, HashedTrigramBackend,
                                    build_backend)


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(model_name="hashed-trigram-256"))


class TestHealth:
    def test_ready(self, client):
        resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.json() == {"model": "hashed-trigram-256", "dim": 256}

    def test_503_while_loading(self):
        app = create_app(model_name="hashed-trigram-256", eager=False)
        # hold the slot empty to observe the loading window
        app.state.holder.set(backend=None)
        with TestClient(app) as c:
            assert c.get("/health").status_code == 503
            assert c.post("/embed",
                          json={"texts": ["orbit"]}).status_code == 503

    def test_503_on_load_failure(self):
        app = create_app(model_name="hashed-trigram-256")
        app.state.holder.set(error="weights missing")
        with TestClient(app) as c:
            resp = c.get("/health")
            assert resp.status_code == 503
            assert "weights missing" in resp.json()["error"]


class TestEmbed:
    def test_shape_and_dim_match_health(self, client):
        dim = client.get("/health").json()["dim"]
        resp = client.post("/embed", json={"texts": ["orbit"]})
        assert resp.status_code == 200
        body = resp.json()
        assert body["dim"] == dim
        assert len(body["vectors"]) == 1
        assert len(body["vectors"][0]) == dim

    def test_unit_norm(self, client):
        body = client.post("/embed", json={"texts": ["orbit", "revolve",
                                                     "x"]}).json()
        for vec in body["vectors"]:
            assert abs(np.linalg.norm(vec) - 1.0) < 1e-5

    def test_order_preserving_and_pure(self, client):
        texts = ["orbit", "attract", "orbit", "pull"]
        body = client.post("/embed", json={"texts": texts}).json()
        assert len(body["vectors"]) == 4
        # duplicate texts give identical vectors at both positions
        assert body["vectors"][0] == body["vectors"][2]
        single = client.post("/embed", json={"texts": ["attract"]}).json()
        assert body["vectors"][1] == single["vectors"][0]

    def test_deterministic_across_requests(self, client):
        a = client.post("/embed", json={"texts": ["orbit"]}).json()
        b = client.post("/embed", json={"texts": ["orbit"]}).json()
        assert a == b

    def test_batch_limit(self, client):
        at_limit = client.post("/embed",
                               json={"texts": ["t"] * MAX_BATCH})
        assert at_limit.status_code == 200
        over = client.post("/embed", json={"texts": ["t"] * (MAX_BATCH + 1)})
        assert over.status_code == 413

    def test_text_length_limit(self, client):
        ok = client.post("/embed", json={"texts": ["a" * MAX_TEXT_LENGTH]})
        assert ok.status_code == 200
        over = client.post("/embed",
                           json={"texts": ["a" * (MAX_TEXT_LENGTH + 1)]})
        assert over.status_code == 413

    def test_empty_batch_rejected(self, client):
        assert client.post("/embed", json={"texts": []}).status_code == 422

    def test_concurrent_clients_agree(self, client):
        results = []

        def worker():
            results.append(client.post("/embed",
                                       json={"texts": ["orbit"]}).json())

        threads = [threading.Thread(target=worker) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert all(r == results[0] for r in results)

    def test_cosine_symmetry_and_self_similarity(self, client):
        body = client.post("/embed",
                           json={"texts": ["orbit", "attract"]}).json()
        a, b = (np.asarray(v) for v in body["vectors"])
        assert float(a @ a) == pytest.approx(1.0, abs=1e-5)
        assert float(a @ b) == pytest.approx(float(b @ a))


class TestBackends:
    def test_hashed_backend_dimension_from_model_id(self):
        backend = build_backend("hashed-trigram-64")
        assert backend.dimension == 64
        assert backend.encode(["orbit"]).shape == (1, 64)

    def test_hashed_backend_is_a_pure_function(self):
        a = HashedTrigramBackend().encode(["orbit"])
        b = HashedTrigramBackend().encode(["orbit"])
        assert np.array_equal(a, b)

    def test_unknown_pretrained_model_raises(self):
        # no model weights are available offline, so this must surface as
        # the backend error that the app turns into a 503
        with pytest.raises(BackendError):
            build_backend("no-such-model-xyz")
