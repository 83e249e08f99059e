"""Minimal E-utilities client: esearch for PMID lists, efetch for records.

Network behaviour is deliberately conservative: one request in flight at
a time per spec, a polite delay between paged requests, and a bounded
retry policy (3 attempts, exponential backoff starting at the polite
delay).  429 responses honour Retry-After and become QuotaError once
retries are exhausted; other 5xx become ServiceError after retries;
4xx fail immediately.

Every test runs offline through RecordedTransport, which replays
response bodies from a fixture directory with a manifest.  Live results
drift, so provenance records the literal query rather than pretending
historical searches can be reproduced.
"""

from __future__ import annotations

import json
import time
import warnings
from dataclasses import dataclass
from pathlib import Path

import requests

__all__ = [
    "FetchSpec",
    "EntrezClient",
    "RecordedTransport",
    "RequestsTransport",
    "NetworkError",
    "ServiceError",
    "QuotaError",
    "MissingRecordsWarning",
    "DEFAULT_BASE_URL",
]

DEFAULT_BASE_URL = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils"
RETRY_ATTEMPTS = 3

# params that identify a request when matching recorded fixtures
_IGNORED_FIXTURE_PARAMS = {"api_key", "tool", "email"}


class NetworkError(RuntimeError):
    """Transport-level failure after retries; carries partial progress."""

    def __init__(self, message: str, partial: int = 0):
        super().__init__(message)
        self.partial = partial


class ServiceError(RuntimeError):
    """Non-success HTTP status from the service."""

    def __init__(self, message: str, status: int):
        super().__init__(message)
        self.status = status


class QuotaError(ServiceError):
    """Rate-limit response persisted through all retries."""

    def __init__(self, message: str):
        super().__init__(message, status=429)


class MissingRecordsWarning(UserWarning):
    """The service returned fewer records than were requested."""


@dataclass(frozen=True)
class FetchSpec:
    """Retrieval parameters: query, publication-year bounds, pacing."""

    query: str
    date_from: int | None = None
    date_to: int | None = None
    batch_size: int = 200
    polite_delay: int = 350  # milliseconds between requests

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.date_from is not None and self.date_to is not None and self.date_from > self.date_to:
            raise ValueError("date_from must not exceed date_to")
        if self.polite_delay < 0:
            raise ValueError("polite_delay must be >= 0")


class RequestsTransport:
    """Live HTTP GET via requests."""

    def __init__(self, timeout: float = 30.0):
        self.timeout = timeout
        self.session = requests.Session()

    def get(self, url: str, params: dict) -> tuple[int, dict, bytes]:
        response = self.session.get(url, params=params, timeout=self.timeout)
        return response.status_code, dict(response.headers), response.content


class RecordedTransport:
    """Replay responses from a fixture directory.

    The manifest (``manifest.json``) lists entries of the form::

        {"endpoint": "esearch", "params": {"term": "...", "retstart": "0"},
         "file": "esearch_p1.json", "status": 200}

    Matching ignores credentials-style params.  ``calls`` records every
    request issued, for politeness and paging assertions.
    """

    def __init__(self, fixture_dir: str | Path):
        self.fixture_dir = Path(fixture_dir)
        with open(self.fixture_dir / "manifest.json", encoding="utf-8") as handle:
            self.manifest = json.load(handle)["entries"]
        self.calls: list[tuple[str, dict]] = []

    def get(self, url: str, params: dict) -> tuple[int, dict, bytes]:
        endpoint = url.rsplit("/", 1)[-1].replace(".fcgi", "")
        wanted = {
            k: str(v) for k, v in params.items() if k not in _IGNORED_FIXTURE_PARAMS
        }
        self.calls.append((endpoint, wanted))
        for entry in self.manifest:
            if entry["endpoint"] != endpoint:
                continue
            recorded = {k: str(v) for k, v in entry.get("params", {}).items()}
            if recorded == wanted:
                body = (self.fixture_dir / entry["file"]).read_bytes()
                return entry.get("status", 200), entry.get("headers", {}), body
        raise LookupError(f"no recorded fixture for {endpoint} with {wanted}")


class EntrezClient:
    """Paged esearch / batched efetch against E-utilities-style endpoints.

    A client instance runs one fetch operation at a time; create distinct
    instances for parallel work against distinct specs.
    """

    def __init__(
        self,
        base_url: str = DEFAULT_BASE_URL,
        api_key: str | None = None,
        transport=None,
        database: str = "pubmed",
    ):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.transport = transport or RequestsTransport()
        self.database = database
        self._request_count = 0

    # -- plumbing -----------------------------------------------------------

    def _sleep(self, milliseconds: float):
        if milliseconds > 0:
            time.sleep(milliseconds / 1000.0)

    def _request(self, endpoint: str, params: dict, spec: FetchSpec, progress: int) -> bytes:
        """One logical request with pacing and bounded retries."""
        url = f"{self.base_url}/{endpoint}.fcgi"
        if self.api_key:
            params = {**params, "api_key": self.api_key}
        if self._request_count > 0:
            self._sleep(spec.polite_delay)
        self._request_count += 1

        last_error: Exception | None = None
        rate_limited = False
        for attempt in range(RETRY_ATTEMPTS):
            if attempt > 0:
                self._sleep(spec.polite_delay * (2 ** (attempt - 1)))
            try:
                status, headers, body = self.transport.get(url, params)
            except LookupError:
                raise
            except Exception as exc:
                last_error = exc
                continue
            if 200 <= status < 300:
                return body
            if status == 429:
                rate_limited = True
                retry_after = headers.get("Retry-After")
                if retry_after is not None:
                    try:
                        self._sleep(float(retry_after) * 1000.0)
                    except ValueError:
                        pass
                last_error = ServiceError(f"{endpoint} returned 429", status=429)
                continue
            if status >= 500:
                last_error = ServiceError(f"{endpoint} returned {status}", status=status)
                continue
            raise ServiceError(f"{endpoint} returned {status}", status=status)
        if rate_limited:
            raise QuotaError(f"{endpoint} rate-limited after {RETRY_ATTEMPTS} attempts")
        if isinstance(last_error, ServiceError):
            raise last_error
        raise NetworkError(
            f"{endpoint} failed after {RETRY_ATTEMPTS} attempts: {last_error}",
            partial=progress,
        )

    # -- operations ---------------------------------------------------------

    def search_ids(self, spec: FetchSpec) -> list[str]:
        """All PMIDs matching the query, in service order, via paged requests."""
        ids: list[str] = []
        retstart = 0
        total: int | None = None
        while total is None or retstart < total:
            params = {
                "db": self.database,
                "term": spec.query,
                "retstart": retstart,
                "retmax": spec.batch_size,
                "retmode": "json",
            }
            if spec.date_from is not None:
                params["mindate"] = spec.date_from
                params["datetype"] = "pdat"
            if spec.date_to is not None:
                params["maxdate"] = spec.date_to
                params["datetype"] = "pdat"
            try:
                body = self._request("esearch", params, spec, progress=len(ids))
            except NetworkError as exc:
                exc.partial = len(ids)
                raise
            result = json.loads(body)["esearchresult"]
            total = int(result["count"])
            page = list(result.get("idlist", []))
            ids.extend(page)
            if not page and retstart < total:
                break  # defensive: service reported more hits than it returns
            retstart += spec.batch_size
        return ids

    def fetch_medline(self, pmids: list[str], spec: FetchSpec) -> str:
        """MEDLINE-format text for the ids, batched by spec.batch_size.

        Input ids are deduplicated (first occurrence wins) before
        batching; record order follows request order.  Emits
        MissingRecordsWarning when fewer records than requested come
        back.
        """
        unique: list[str] = []
        seen: set[str] = set()
        for pmid in pmids:
            if pmid not in seen:
                seen.add(pmid)
                unique.append(pmid)
        if not unique:
            return ""
        chunks: list[str] = []
        fetched = 0
        for start in range(0, len(unique), spec.batch_size):
            batch = unique[start : start + spec.batch_size]
            params = {
                "db": self.database,
                "id": ",".join(batch),
                "rettype": "medline",
                "retmode": "text",
            }
            try:
                body = self._request("efetch", params, spec, progress=fetched)
            except NetworkError as exc:
                exc.partial = fetched
                raise
            chunks.append(body.decode("utf-8", errors="replace").strip("\n"))
            fetched += len(batch)
        text = "\n\n".join(chunk for chunk in chunks if chunk)
        if text and not text.endswith("\n"):
            text += "\n"
        returned = text.count("PMID-")
        if returned < len(unique):
            warnings.warn(
                MissingRecordsWarning(
                    f"requested {len(unique)} records, service returned {returned}"
                )
            )
        return text
