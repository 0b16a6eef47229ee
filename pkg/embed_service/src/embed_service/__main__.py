"""Run the service with uvicorn; port and model come from the environment
(EMBED_SERVICE_PORT, EMBED_SERVICE_HOST, EMBED_SERVICE_MODEL)."""

import os

import uvicorn

from .app import create_app


def main():
    host = os.environ.get("EMBED_SERVICE_HOST", "127.0.0.1")
    port = int(os.environ.get("EMBED_SERVICE_PORT", "8765"))
    uvicorn.run(create_app(eager=False), host=host, port=port)


if __name__ == "__main__":
    main()
